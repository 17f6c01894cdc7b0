"""``coopl`` command-line interface.

Exit codes: 0 success, 2 invalid input, 3 not realizable / inconsistent,
4 internal limit (r_max, retry cap, exhaustive cap).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from coopl import __version__
from coopl._numbers import encode
from coopl.distributions import (
    distribution_from_json,
    read_samples,
    sample_game,
    write_samples,
)
from coopl.errors import InternalLimit, InvalidInput, NotRealizable
from coopl.games import GAME_CLASSES, FlowNetwork, GameClassSpec, game_from_json, game_to_json, random_game
from coopl.harness import (
    DIST_KINDS,
    LEARNER_CLASSES,
    ExperimentConfig,
    _resolve_dist,
    held_out_error,
    run_learning_experiment,
    run_stability_experiment,
)
from coopl.learners import (
    CtsgHypothesis,
    LearnedEdgeWeights,
    TtgHypothesis,
    learn_ctsg,
    learn_flow_paths,
    learn_isg,
    learn_ttg,
    learn_wvg,
)
from coopl.reductions import cnf_to_minsum, dnf_to_mcnet, formula_from_json, minsum_to_flow
from coopl.stabilizer import PayoffVector, check_stability, pac_stabilize

log = logging.getLogger("coopl")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rng(args):
    return np.random.default_rng(args.seed)


def _load_dist(args, game):
    if getattr(args, "dist", None):
        dist = distribution_from_json(_load_json(args.dist))
        if dist.n != game.n:
            raise InvalidInput("distribution and game disagree on n")
        return dist
    return _resolve_dist(args.dist_kind, game)


# -- subcommands ------------------------------------------------------------------------


def cmd_gen_game(args):
    spec = GameClassSpec(
        game_class=args.game_class, n=args.n, k=args.k,
        weight_range=tuple(args.weight_range), value_range=tuple(args.value_range),
        quota_range=None if args.quota_range is None else tuple(args.quota_range),
        n_skills=args.n_skills, mode=args.mode,
    )
    _emit(_dump(game_to_json(random_game(spec, _rng(args)))), args.out)


def cmd_sample(args):
    game = game_from_json(_load_json(args.game))
    dist = _load_dist(args, game)
    samples = sample_game(game, dist, args.m, _rng(args), seed=args.seed)
    if args.out:
        with open(args.out, "w") as fh:
            write_samples(samples, fh)
    else:
        write_samples(samples, sys.stdout)


def cmd_stabilize(args):
    game = game_from_json(_load_json(args.game))
    if args.samples:
        with open(args.samples) as fh:
            samples = read_samples(fh)
    else:
        samples = sample_game(game, _load_dist(args, game), args.m, _rng(args), seed=args.seed)
    x = pac_stabilize(samples)
    doc = x.to_json()
    doc["m"] = len(samples)
    doc["seed"] = args.seed
    _emit(_dump(doc), args.out)


def _hypothesis_doc(hyp) -> dict:
    if isinstance(hyp, LearnedEdgeWeights):
        doc = game_to_json(hyp.as_network())
        doc["fit"] = {"class": "flow-path"}
    elif isinstance(hyp, TtgHypothesis):
        doc = game_to_json(hyp.game)
        doc["fit"] = {"class": "ttg", "r": hyp.r,
                      "task_values": [encode(v) for v in hyp.task_values]}
    elif isinstance(hyp, CtsgHypothesis):
        doc = game_to_json(hyp.as_game())
        doc["fit"] = {"class": "ctsg"}
    else:
        doc = game_to_json(hyp)
        doc["fit"] = {"class": doc["class"]}
    doc["learned"] = True
    doc["fit"]["replay"] = "exact"
    return doc


def cmd_learn(args):
    with open(args.samples) as fh:
        samples = read_samples(fh)
    cls = args.learner_class
    if cls == "flow-path":
        if not args.topology:
            raise InvalidInput("--topology is required for flow-path learning")
        topo = game_from_json(_load_json(args.topology))
        if not isinstance(topo, FlowNetwork):
            raise InvalidInput("--topology must hold a flow network")
        hyp = learn_flow_paths(samples, topo)
    elif cls == "ttg":
        hyp = learn_ttg(samples, r_max=args.r_max)
    elif cls == "isg":
        hyp = learn_isg(samples)
    elif cls == "wvg":
        hyp = learn_wvg(samples)
    else:
        if not args.skills:
            raise InvalidInput("--skills is required for ctsg learning")
        doc = _load_json(args.skills)
        skills = doc["player_skills"] if isinstance(doc, dict) else doc
        hyp = learn_ctsg(samples, skills)
    _emit(_dump(_hypothesis_doc(hyp)), args.out)


def cmd_check(args):
    game = game_from_json(_load_json(args.game))
    dist = _load_dist(args, game)
    rng = _rng(args)
    if bool(args.payoff) == bool(args.hypothesis):
        raise InvalidInput("give exactly one of --payoff or --hypothesis")
    if args.payoff:
        x = PayoffVector.from_json(_load_json(args.payoff))
        doc = check_stability(x, game, dist, args.n_test, rng).to_json()
    else:
        hdoc = _load_json(args.hypothesis)
        hyp = game_from_json({k: v for k, v in hdoc.items() if k not in ("learned", "fit")})
        if hyp.n != game.n:
            raise InvalidInput("hypothesis and game disagree on n")
        rate = held_out_error(hyp, game, dist, args.n_test, rng)
        doc = {"tested": args.n_test, "mismatches": rate.numerator * args.n_test // rate.denominator,
               "error_rate": {"num": str(rate.numerator), "den": str(rate.denominator),
                              "float": float(rate)}}
    doc["seed"] = args.seed
    _emit(_dump(doc), args.out)


def cmd_reduce(args):
    doc = _load_json(getattr(args, "in"))
    src, dst = args.src, args.dst
    if src in ("cnf", "dnf"):
        phi = formula_from_json(doc, src)
        if src == "cnf" and dst in ("minsum", "flow"):
            g = cnf_to_minsum(phi)
            result = g if dst == "minsum" else minsum_to_flow(g)
        elif src == "dnf" and dst == "mcnet":
            result = dnf_to_mcnet(phi)
        else:
            raise InvalidInput(f"no reduction from {src} to {dst}")
    elif src == "minsum" and dst == "flow":
        g = game_from_json(doc)
        if g.__class__.__name__ != "MinSum":
            raise InvalidInput("--in must hold a min-sum game")
        result = minsum_to_flow(g)
    else:
        raise InvalidInput(f"no reduction from {src} to {dst}")
    _emit(_dump(game_to_json(result)), args.out)


def cmd_experiment(args):
    doc = _load_json(args.config)
    for key in ("trials", "held_out", "m", "epsilon", "delta"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    doc["seed"] = args.seed
    cfg = ExperimentConfig.from_json(doc)
    kind = args.kind or ("learn" if cfg.learner else "stability")
    if kind == "learn":
        report = run_learning_experiment(cfg, jobs=args.jobs)
    else:
        report = run_stability_experiment(cfg, jobs=args.jobs)
    log.info("%d/%d trials succeeded in %.2fs", report.successes, report.trials, report.wall_clock)
    if args.format == "csv":
        _emit(report.to_csv(), args.out)
    else:
        _emit(_dump(report.to_json()), args.out)
    if args.out and not args.no_figures:
        from coopl.plotting import render_report_figures

        prefix = args.figures or os.path.splitext(args.out)[0]
        for path in render_report_figures(report, prefix):
            log.info("wrote %s", path)


# -- parser ------------------------------------------------------------------------------


def _add_dist_args(p):
    p.add_argument("--dist", help="distribution JSON file")
    p.add_argument("--dist-kind", default="uniform", choices=DIST_KINDS,
                   help="built-in distribution resolved against the game (default: uniform)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="coopl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"coopl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-game", parents=[common], help="draw a random game")
    p.add_argument("--class", dest="game_class", required=True, choices=GAME_CLASSES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--weight-range", type=int, nargs=2, default=(0, 10))
    p.add_argument("--value-range", type=int, nargs=2, default=(1, 20))
    p.add_argument("--quota-range", type=int, nargs=2)
    p.add_argument("--n-skills", type=int, default=4)
    p.add_argument("--mode", choices=("count", "conjunctive"), default="count")
    p.set_defaults(func=cmd_gen_game)

    p = sub.add_parser("sample", parents=[common], help="draw i.i.d. coalition samples")
    p.add_argument("--game", required=True)
    _add_dist_args(p)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("stabilize", parents=[common], help="payoff covering sampled coalitions")
    p.add_argument("--game", required=True)
    _add_dist_args(p)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--samples", help="use these samples instead of drawing m new ones")
    p.set_defaults(func=cmd_stabilize)

    p = sub.add_parser("learn", parents=[common], help="fit a consistent hypothesis")
    p.add_argument("--class", dest="learner_class", required=True, choices=LEARNER_CLASSES)
    p.add_argument("--samples", required=True)
    p.add_argument("--topology")
    p.add_argument("--skills")
    p.add_argument("--r-max", type=int, default=64)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("check", parents=[common],
                       help="held-out check of a payoff (stability) or hypothesis (error)")
    p.add_argument("--game", required=True)
    _add_dist_args(p)
    p.add_argument("--payoff")
    p.add_argument("--hypothesis")
    p.add_argument("--n-test", type=int, default=10_000)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", parents=[common], help="apply a constructive reduction")
    p.add_argument("--from", dest="src", required=True, choices=("cnf", "dnf", "minsum"))
    p.add_argument("--to", dest="dst", required=True, choices=("minsum", "mcnet", "flow"))
    p.add_argument("--in", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("experiment", parents=[common], help="seeded multi-trial experiment")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--kind", choices=("learn", "stability"))
    p.add_argument("--trials", type=int)
    p.add_argument("--held-out", dest="held_out", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--figures", help="figure path prefix (default: next to --out)")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except InternalLimit as exc:
        print(f"coopl: internal limit: {exc}", file=sys.stderr)
        return 4
    except NotRealizable as exc:
        print(f"coopl: not realizable: {exc}", file=sys.stderr)
        return 3
    except (InvalidInput, OSError) as exc:
        print(f"coopl: invalid input: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

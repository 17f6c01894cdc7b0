"""Seeded train / held-out experiments for the learners and the stabilizer.

Each trial gets its own ``numpy`` stream spawned from the base seed, so a
trial's outcome depends only on ``(config, seed, trial index)`` and trials
can run in any order or in parallel.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from coopl import __version__
from coopl.distributions import (
    Empirical,
    RandomWalkPath,
    Uniform,
    distribution_from_json,
    distribution_to_json,
    draw_many,
    sample_complexity_finite,
    sample_complexity_ttg_values,
    sample_game,
)
from coopl.errors import CooplError, InvalidInput
from coopl.games import (
    Coalition,
    FlowNetwork,
    GameClassSpec,
    SkillGame,
    evaluate,
    game_from_json,
    game_to_json,
    random_game,
)
from coopl.learners import learn_ctsg, learn_flow_paths, learn_isg, learn_ttg, learn_wvg
from coopl.stabilizer import EXHAUSTIVE_CAP, check_stability, cost_of_stability_exact, pac_stabilize

LEARNER_CLASSES = ("flow-path", "ttg", "isg", "wvg", "ctsg")
DIST_KINDS = ("uniform", "random_walk_path", "pairs_and_singletons")
HELD_OUT_DEFAULT = 10_000


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a game (fixed, or a class spec redrawn per trial), a
    coalition distribution, accuracy/confidence targets and trial counts.

    ``dist`` is either a concrete distribution or one of ``DIST_KINDS``,
    resolved against each trial's game.  ``m`` is an int or ``"auto"``.
    ``k`` is the task-count bound used to size TTG experiments.
    """

    game: object
    dist: object = "uniform"
    epsilon: float = 0.1
    delta: float = 0.1
    m: Union[int, str] = "auto"
    trials: int = 100
    held_out: int = HELD_OUT_DEFAULT
    learner: Optional[str] = None
    k: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise InvalidInput("epsilon and delta must lie strictly between 0 and 1")
        if self.trials < 1 or self.held_out < 1:
            raise InvalidInput("trials and held_out must be >= 1")
        if self.m != "auto" and (not isinstance(self.m, int) or self.m < 0):
            raise InvalidInput("m must be a non-negative int or 'auto'")
        if self.learner is not None and self.learner not in LEARNER_CLASSES:
            raise InvalidInput(f"unknown learner class {self.learner!r}")
        if isinstance(self.dist, str) and self.dist not in DIST_KINDS:
            raise InvalidInput(f"unknown distribution kind {self.dist!r}")

    def to_json(self) -> dict:
        doc = {}
        if isinstance(self.game, GameClassSpec):
            doc["game_spec"] = self.game.to_json()
        else:
            doc["game"] = game_to_json(self.game)
        doc.update(
            dist=self.dist if isinstance(self.dist, str) else distribution_to_json(self.dist),
            epsilon=self.epsilon, delta=self.delta, m=self.m, trials=self.trials,
            held_out=self.held_out, learner=self.learner, k=self.k, seed=self.seed,
        )
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ExperimentConfig":
        """Inverse of :meth:`to_json`; exactly one of ``game`` / ``game_spec``."""
        try:
            if ("game" in doc) == ("game_spec" in doc):
                raise InvalidInput("config needs exactly one of 'game' or 'game_spec'")
            if "game_spec" in doc:
                game = GameClassSpec.from_json(doc["game_spec"])
            else:
                game = game_from_json(doc["game"])
            dist = doc.get("dist", "uniform")
            if isinstance(dist, dict):
                dist = distribution_from_json(dist)
            m = doc.get("m", "auto")
            k = doc.get("k")
            return cls(
                game=game, dist=dist,
                epsilon=float(doc.get("epsilon", 0.1)), delta=float(doc.get("delta", 0.1)),
                m=m if m == "auto" else int(m),
                trials=int(doc.get("trials", 100)),
                held_out=int(doc.get("held_out", HELD_OUT_DEFAULT)),
                learner=doc.get("learner"), k=None if k is None else int(k),
                seed=int(doc.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"malformed experiment config: {exc}") from exc


@dataclass
class MetricsReport:
    kind: str
    config: dict
    m: int
    m_formula: str
    rows: list = field(default_factory=list)
    wall_clock: float = 0.0
    version: str = __version__

    @property
    def trials(self) -> int:
        return len(self.rows)

    @property
    def successes(self) -> int:
        return sum(1 for r in self.rows if r["success"])

    def to_json(self, timing: bool = True) -> dict:
        doc = {
            "kind": self.kind,
            "version": self.version,
            "config": self.config,
            "m": self.m,
            "m_formula": self.m_formula,
            "trials": self.trials,
            "successes": self.successes,
            "rows": self.rows,
        }
        if timing:
            doc["wall_clock_seconds"] = self.wall_clock
        return doc

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["trial", "n", "m", "rate", "rate_exact", "success", "status"]
        extra = sorted({k for r in self.rows for k in r} - set(cols))
        writer = csv.DictWriter(buf, fieldnames=cols + extra, lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({k: r.get(k, "") for k in cols + extra})
        return buf.getvalue()


# -- sample sizes ---------------------------------------------------------------------


def auto_m(cfg: ExperimentConfig, n: int, kind: str) -> tuple:
    """``(m, formula)`` for the experiment.  ``n`` is the player count."""
    eps, delta = cfg.epsilon, cfg.delta
    if kind == "learn" and cfg.learner == "flow-path":
        return (sample_complexity_finite(eps, delta, n * math.log(n + 1)),
                "ceil((n ln(n+1) + ln(1/delta)) / epsilon)")
    if kind == "learn" and cfg.learner == "ttg":
        k = cfg.k if cfg.k is not None else _task_count(cfg.game)
        m_values = sample_complexity_ttg_values(k, eps / 2, delta / 2)
        m_fit = sample_complexity_finite(eps / 2, delta / 2, n * math.log(2))
        return (max(m_values, m_fit),
                "max(ceil(k ln(2/delta) / (epsilon/2)), ceil((n ln 2 + ln(2/delta)) / (epsilon/2)))")
    return (sample_complexity_finite(eps, delta, n * math.log(2)),
            "ceil((n ln 2 + ln(1/delta)) / epsilon)")


def _task_count(game) -> int:
    if isinstance(game, GameClassSpec):
        return game.k
    return max(1, len(getattr(game, "tasks", ())))


# -- per-trial machinery ---------------------------------------------------------------


def _resolve_dist(dist, game):
    if not isinstance(dist, str):
        if dist.n != game.n:
            raise InvalidInput("distribution and game disagree on n")
        return dist
    if dist == "uniform":
        return Uniform(game.n)
    if dist == "random_walk_path":
        if not isinstance(game, FlowNetwork):
            raise InvalidInput("random_walk_path needs a flow game")
        return RandomWalkPath(game)
    if dist == "pairs_and_singletons":
        n = game.n
        support = [Coalition.of(n, [i]) for i in range(n)]
        support += [Coalition.of(n, [i, j]) for i in range(n) for j in range(i + 1, n)]
        return Empirical.uniform_over(support)
    raise InvalidInput(f"unknown distribution kind {dist!r}")


def _trial_game(cfg, rng):
    if isinstance(cfg.game, GameClassSpec):
        return random_game(cfg.game, rng)
    return cfg.game


def fit(learner: str, samples, game):
    """Run ``learner`` on ``samples``; ``game`` supplies topology/skills where needed."""
    if learner == "flow-path":
        return learn_flow_paths(samples, game)
    if learner == "ttg":
        return learn_ttg(samples)
    if learner == "isg":
        return learn_isg(samples)
    if learner == "wvg":
        return learn_wvg(samples)
    if learner == "ctsg":
        if not isinstance(game, SkillGame):
            raise InvalidInput("the ctsg learner needs a skill game for player skills")
        return learn_ctsg(samples, game.player_skills)
    raise InvalidInput(f"unknown learner {learner!r}")


def held_out_error(hypothesis, game, dist, count: int, rng) -> Fraction:
    """Exact fraction of ``count`` fresh draws on which ``hypothesis`` and ``game`` differ."""
    wrong_cache = {}
    wrong = 0
    for S in draw_many(dist, count, rng):
        miss = wrong_cache.get(S)
        if miss is None:
            miss = hypothesis.value(S.members) != evaluate(game, S)
            wrong_cache[S] = miss
        wrong += miss
    return Fraction(wrong, count)


def _rate_fields(rate: Fraction, eps: float) -> dict:
    return {"rate": float(rate), "rate_exact": f"{rate.numerator}/{rate.denominator}",
            "success": rate < Fraction(str(eps))}


def _learning_trial(args):
    cfg, m_fixed, index, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    game = _trial_game(cfg, rng)
    dist = _resolve_dist(cfg.dist, game)
    m = m_fixed if m_fixed is not None else auto_m(cfg, game.n, "learn")[0]
    row = {"trial": index, "n": game.n, "m": m}
    samples = sample_game(game, dist, m, rng)
    try:
        hyp = fit(cfg.learner, samples, game)
    except CooplError as exc:
        row.update(rate=1.0, rate_exact="1/1", success=False,
                   status=f"{type(exc).__name__}: {exc}")
        return row
    rate = held_out_error(hyp, game, dist, cfg.held_out, rng)
    row.update(_rate_fields(rate, cfg.epsilon), status="ok")
    return row


def _stability_trial(args):
    cfg, m_fixed, index, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    game = _trial_game(cfg, rng)
    dist = _resolve_dist(cfg.dist, game)
    m = m_fixed if m_fixed is not None else auto_m(cfg, game.n, "stability")[0]
    samples = sample_game(game, dist, m, rng)
    x = pac_stabilize(samples)
    report = check_stability(x, game, dist, cfg.held_out, rng)
    row = {"trial": index, "n": game.n, "m": m}
    row.update(_rate_fields(report.empirical_rate, cfg.epsilon), status="ok")
    row["total_payment"] = float(x.total)
    row["total_payment_exact"] = str(x.total)
    if game.n <= EXHAUSTIVE_CAP:
        _, witness = cost_of_stability_exact(game)
        row["lp_full_optimum"] = float(witness.total)
        row["lp_full_optimum_exact"] = str(witness.total)
    return row


def _run(kind: str, cfg: ExperimentConfig, jobs: int) -> MetricsReport:
    started = time.perf_counter()
    if cfg.m == "auto":
        n_hint = cfg.game.n
        m_report, formula = auto_m(cfg, n_hint, kind)
        m_fixed = None
    else:
        m_report, formula, m_fixed = cfg.m, "explicit", cfg.m
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    tasks = [(cfg, m_fixed, i, s) for i, s in enumerate(seqs)]
    worker = _learning_trial if kind == "learn" else _stability_trial
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(worker, tasks))
    else:
        rows = [worker(t) for t in tasks]
    return MetricsReport(kind, cfg.to_json(), m_report, formula, rows,
                         time.perf_counter() - started)


def run_learning_experiment(cfg: ExperimentConfig, jobs: int = 1) -> MetricsReport:
    """Per trial: draw m samples, fit the learner, measure held-out disagreement."""
    if cfg.learner is None:
        raise InvalidInput("a learning experiment needs a learner class")
    return _run("learn", cfg, jobs)


def run_stability_experiment(cfg: ExperimentConfig, jobs: int = 1) -> MetricsReport:
    """Per trial: draw m samples, stabilize, measure held-out violation rate."""
    return _run("stability", cfg, jobs)

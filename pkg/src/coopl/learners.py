"""Consistent learners for the efficiently learnable game classes.

Each learner either returns a hypothesis that reproduces every training
value exactly (checked by replay before returning) or raises
:class:`~coopl.errors.NotRealizable` / :class:`~coopl.errors.Inconsistent`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional

from coopl._numbers import Number
from coopl.distributions import SampleSet
from coopl.errors import (
    Inconsistent,
    InvalidInput,
    NotRealizable,
    ToleranceLimitExceeded,
)
from coopl.games import FlowNetwork, Isg, SkillGame, Ttg, Wvg
from coopl.numkernel import (
    GE,
    LE,
    Constraint,
    LinearProgram,
    LpStatus,
    solve_linear_system,
    solve_lp_incremental,
)

R_MAX = 64


def _distinct(samples: SampleSet) -> list:
    """Unique ``(members, value)`` rows; raises if one coalition carries two values."""
    seen = {}
    for S, v in samples:
        old = seen.setdefault(S.members, v)
        if old != v:
            raise NotRealizable(f"coalition {sorted(S.members)} observed with values {old} and {v}")
    return sorted(seen.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))


def _replay(hypothesis, samples: SampleSet) -> None:
    for S, v in samples:
        got = hypothesis.value(S.members)
        if got != v:
            raise NotRealizable(
                f"replay mismatch on {sorted(S.members)}: hypothesis gives {got}, sample says {v}"
            )


# -- network flow on paths ------------------------------------------------------


@dataclass(frozen=True)
class LearnedEdgeWeights:
    """Per-edge weights; a path is predicted to carry its minimum edge weight."""

    topology: FlowNetwork
    weights: tuple

    @property
    def n(self) -> int:
        return self.topology.n

    def value(self, members) -> Number:
        if not members:
            return 0
        path = self.topology.order_path(members)
        return min(self.weights[k] for k in path)

    def as_network(self) -> FlowNetwork:
        return self.topology.with_capacities(self.weights)


def learn_flow_paths(samples: SampleSet, topology: FlowNetwork) -> LearnedEdgeWeights:
    """Give each edge the largest value of any sampled path through it."""
    if samples.n != topology.n:
        raise InvalidInput("samples and topology disagree on the edge count")
    weights = [0] * topology.n
    for S, v in samples:
        if v < 0:
            raise InvalidInput("path values must be non-negative")
        for k in topology.order_path(S.members):
            if v > weights[k]:
                weights[k] = v
    hyp = LearnedEdgeWeights(topology, tuple(weights))
    _replay(hyp, samples)
    return hyp


# -- threshold task games ---------------------------------------------------------


@dataclass(frozen=True)
class TtgHypothesis:
    game: Ttg
    task_values: tuple  # observed distinct positive values, ascending
    r: Optional[int]  # tolerance exponent that produced the fit
    assignment: tuple = field(default=(), compare=False)  # (members, task index) used in the LP

    @property
    def n(self) -> int:
        return self.game.n

    def value(self, members) -> Number:
        return self.game.value(members)


def learn_ttg(
    samples: SampleSet,
    r_max: int = R_MAX,
    tolerance_sign: int = -1,
    top_threshold: Optional[Number] = None,
) -> TtgHypothesis:
    """Fit player weights and task thresholds by linear feasibility.

    Distinct positive sample values become the task values; each sample is
    mapped to the task whose value it shows (index 0 for value 0).  The
    program asks ``w(S) >= q[task]`` and ``w(S) <= q[task+1] - 2**-r`` with
    nondecreasing thresholds and everything non-negative, for
    ``r = 0, 1, ...`` until a consistent fit appears.

    With the defaults (``tolerance_sign=-1``, no finite top threshold) the
    program is homogeneous apart from the tolerance, so feasibility at any
    ``r`` implies feasibility at ``r = 0``; an infeasible first round is
    therefore final.  ``tolerance_sign=+1`` together with a numeric
    ``top_threshold`` reproduces the literal ``+2**-r`` variant.
    """
    if r_max < 0:
        raise InvalidInput("r_max must be >= 0")
    n = samples.n
    rows = _distinct(samples)
    if any(v < 0 for _, v in rows):
        raise InvalidInput("TTG sample values must be non-negative")
    alphas = sorted({v for _, v in rows if v > 0})
    ell = len(alphas)
    index = {a: t + 1 for t, a in enumerate(alphas)}
    sigma = [(members, index.get(v, 0)) for members, v in rows]

    if ell == 0:
        game = Ttg((0,) * n, ())
        hyp = TtgHypothesis(game, (), None, tuple(sigma))
        _replay(hyp, samples)
        return hyp

    # variables: w_0..w_{n-1}, q_1..q_ell (column n + t - 1 holds q_t)
    width = n + ell
    homogeneous = tolerance_sign < 0 and top_threshold is None
    last_error = None
    for r in range(r_max + 1):
        tol = Fraction(1, 2**r)
        cons = []
        for t in range(1, ell):
            c = [0] * width
            c[n + t - 1], c[n + t] = 1, -1
            cons.append(Constraint(tuple(c), LE, 0))
        for members, t in sigma:
            base = [0] * width
            for i in members:
                base[i] = 1
            if t >= 1:
                c = list(base)
                c[n + t - 1] = -1
                cons.append(Constraint(tuple(c), GE, 0))
            if t < ell:
                c = list(base)
                c[n + t] = -1
                cons.append(Constraint(tuple(c), LE, tolerance_sign * tol))
            elif top_threshold is not None:
                cons.append(Constraint(tuple(base), LE, top_threshold + tolerance_sign * tol))
        out = solve_lp_incremental(LinearProgram((0,) * width, tuple(cons)))
        if out.status is not LpStatus.OPTIMAL:
            last_error = f"infeasible at r={r}"
            if homogeneous:
                raise NotRealizable(
                    "no TTG with these task values separates the samples "
                    "(threshold program infeasible; scaling cannot help)"
                )
            continue
        w, q = out.x[:n], out.x[n:]
        hyp = TtgHypothesis(Ttg(w, tuple(zip(q, alphas))), tuple(alphas), r, tuple(sigma))
        try:
            _replay(hyp, samples)
        except NotRealizable as exc:
            last_error = str(exc)
            continue
        return hyp
    raise ToleranceLimitExceeded(f"no consistent TTG for r <= {r_max}: {last_error}")


# -- induced subgraph games ---------------------------------------------------------


def learn_isg(samples: SampleSet) -> Isg:
    """Solve for pair weights so that every sampled coalition's induced weight matches."""
    n = samples.n
    pairs = list(combinations(range(n), 2))
    rows, rhs = [], []
    for S, v in samples:
        rows.append([1 if i in S.members and j in S.members else 0 for i, j in pairs])
        rhs.append(v)
    if not pairs:
        if any(v != 0 for v in rhs):
            raise Inconsistent("a game with fewer than two players has value 0 everywhere")
        return Isg(n, {})
    try:
        sol = solve_linear_system(rows, rhs) if rows else [0] * len(pairs)
    except Inconsistent as exc:
        raise Inconsistent("no induced subgraph game fits the samples") from exc
    game = Isg(n, dict(zip(pairs, sol)))
    _replay(game, samples)
    return game


# -- weighted voting games ------------------------------------------------------------


def learn_wvg(samples: SampleSet) -> Wvg:
    """Find non-negative weights and a quota separating winning from losing samples.

    Winning coalitions need ``w(S) >= q`` and losing ones ``w(S) <= q - 1``
    with ``q >= 1``.  The single exception is a sample declaring the empty
    coalition winning, which forces ``q = 0``.
    """
    n = samples.n
    rows = _distinct(samples)
    if any(v not in (0, 1) for _, v in rows):
        raise InvalidInput("WVG samples must be labelled 0 or 1")
    empty_wins = any(v == 1 and not members for members, v in rows)
    width = n + 1  # weights then quota
    cons = []
    q_row = [0] * width
    q_row[n] = 1
    cons.append(Constraint(tuple(q_row), LE if empty_wins else GE, 0 if empty_wins else 1))
    for members, v in rows:
        c = [0] * width
        for i in members:
            c[i] = 1
        c[n] = -1
        cons.append(Constraint(tuple(c), GE, 0) if v == 1 else Constraint(tuple(c), LE, -1))
    out = solve_lp_incremental(LinearProgram((0,) * width, tuple(cons)), initial=[0])
    if out.status is not LpStatus.OPTIMAL:
        raise NotRealizable("no weighted voting game separates the samples")
    game = Wvg(out.x[:n], out.x[n])
    _replay(game, samples)
    return game


# -- conjunctive task skill games ------------------------------------------------------


@dataclass(frozen=True)
class CtsgHypothesis:
    """Predicts 1 exactly when the coalition's skills cover ``required``."""

    player_skills: tuple
    required: frozenset

    @property
    def n(self) -> int:
        return len(self.player_skills)

    def value(self, members) -> int:
        have = frozenset().union(*(self.player_skills[i] for i in members))
        return 1 if self.required <= have else 0

    def as_game(self) -> SkillGame:
        return SkillGame(self.player_skills, (self.required,), "conjunctive", (0,))


def learn_ctsg(
    samples: SampleSet, player_skills, universe: Optional[Iterable] = None
) -> CtsgHypothesis:
    """Intersect the skill sets of all winning samples (monotone conjunction learning)."""
    skills = tuple(frozenset(k) for k in player_skills)
    if len(skills) != samples.n:
        raise InvalidInput("one skill set per player is required")
    everything = frozenset().union(*skills) if skills else frozenset()
    if universe is not None:
        everything = everything | frozenset(universe)
    required = everything
    for S, v in samples:
        if v not in (0, 1):
            raise InvalidInput("CTSG samples must be labelled 0 or 1")
        if v == 1:
            required = required & frozenset().union(*(skills[i] for i in S.members))
    hyp = CtsgHypothesis(skills, required)
    for S, v in samples:
        if v == 0 and hyp.value(S.members) == 1:
            raise NotRealizable(
                f"losing coalition {sorted(S.members)} covers every skill shared by the winners"
            )
    return hyp

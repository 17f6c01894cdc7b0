"""Payoff divisions that are stable on sampled coalitions.

``pac_stabilize`` solves the covering program over the observed coalitions
only; ``cost_of_stability_exact`` solves it over every nonempty coalition
and is the small-n oracle the sampled version is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from coopl._numbers import Number, normalize, rational_record
from coopl.distributions import SampleSet, draw_many
from coopl.errors import ExhaustiveCapExceeded, InvalidInput
from coopl.games import Coalition, all_coalitions, evaluate
from coopl.numkernel import LE, Constraint, LinearProgram, solve_lp

EXHAUSTIVE_CAP = 16


@dataclass(frozen=True)
class PayoffVector:
    x: tuple

    def __post_init__(self):
        x = tuple(normalize(Fraction(v)) for v in self.x)
        if any(v < 0 for v in x):
            raise InvalidInput("payoffs must be non-negative")
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def total(self) -> Number:
        return normalize(sum((Fraction(v) for v in self.x), Fraction(0)))

    def pay(self, S) -> Number:
        members = S.members if isinstance(S, Coalition) else S
        return sum((self.x[i] for i in members), 0)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "x": [rational_record(v) for v in self.x],
            "total": rational_record(self.total),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PayoffVector":
        from coopl._numbers import parse_rational_record

        return cls(tuple(parse_rational_record(r) for r in doc["x"]))


@dataclass(frozen=True)
class StabilityReport:
    tested: int
    violations: int
    empirical_rate: Fraction
    tolerance: Number = 0
    worst_slack: float = 0.0  # max of v(S) - x(S) over tested draws, float for display

    def to_json(self) -> dict:
        return {
            "tested": self.tested,
            "violations": self.violations,
            "empirical_rate": rational_record(self.empirical_rate),
            "tolerance": self.tolerance,
            "worst_slack": self.worst_slack,
        }


def _covering_dual(n: int, rows: Sequence[tuple]) -> LinearProgram:
    """Dual of ``min sum(x) s.t. x(S_j) >= v_j, x >= 0``.

    One variable ``y_j >= 0`` per row, one ``<= 1`` constraint per player:
    ``min -v.y  s.t.  sum_{j : i in S_j} y_j <= 1``.  The multipliers of
    the player constraints are ``-x``.
    """
    cols = len(rows)
    cons = []
    for i in range(n):
        coeffs = [1 if i in members else 0 for members, _ in rows]
        cons.append(Constraint(tuple(coeffs), LE, 1))
    return LinearProgram(tuple(-v for _, v in rows), tuple(cons), (0,) * cols)


def _solve_covering(n: int, rows) -> PayoffVector:
    # x >= 0 already satisfies rows with v <= 0; the empty coalition has no
    # variable to pay with, so it is excluded as well.
    kept = {}
    for members, v in rows:
        if v > 0 and members:
            key = frozenset(members)
            if key not in kept or kept[key] < v:
                kept[key] = v
    if not kept:
        return PayoffVector((0,) * n)
    ordered = sorted(kept.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
    out = solve_lp(_covering_dual(n, ordered))
    # The dual is feasible (y = 0) and bounded by the primal point x = max v.
    assert out.optimal, out.status
    x = PayoffVector(tuple(-y for y in out.duals))
    assert all(x.pay(members) >= v for members, v in ordered)
    assert x.total == -out.objective
    return x


def pac_stabilize(samples: SampleSet) -> PayoffVector:
    """Cheapest non-negative payoff that covers every sampled coalition value."""
    return _solve_covering(samples.n, [(S.members, v) for S, v in samples])


def _check_cap(game, cap: int) -> None:
    if game.n > cap:
        raise ExhaustiveCapExceeded(f"n={game.n} exceeds the exhaustive cap {cap}")


def cost_of_stability_exact(game, cap: int = EXHAUSTIVE_CAP):
    """``(CoS, witness)`` by solving the covering program over all nonempty S.

    CoS is ``max(0, optimum - v(N))``; the witness attains the optimum.
    """
    _check_cap(game, cap)
    rows = [(S.members, evaluate(game, S)) for S in all_coalitions(game.n, nonempty=True)]
    x = _solve_covering(game.n, rows)
    v_grand = evaluate(game, Coalition.grand(game.n))
    return normalize(max(Fraction(0), Fraction(x.total) - v_grand)), x


def core_nonempty(game, cap: int = EXHAUSTIVE_CAP) -> bool:
    cos, _ = cost_of_stability_exact(game, cap)
    return cos == 0


def check_stability(x: PayoffVector, game, dist, n_test: int, rng) -> StabilityReport:
    """Fraction of ``n_test`` fresh draws whose value exceeds what ``x`` pays them."""
    if n_test < 1:
        raise InvalidInput("n_test must be >= 1")
    if x.n != game.n:
        raise InvalidInput("payoff vector and game disagree on n")
    slack_cache = {}
    violations = 0
    worst = float("-inf")
    for S in draw_many(dist, n_test, rng):
        slack = slack_cache.get(S)
        if slack is None:
            slack = Fraction(evaluate(game, S)) - Fraction(x.pay(S))
            slack_cache[S] = slack
        if slack > 0:
            violations += 1
        worst = max(worst, float(slack))
    return StabilityReport(n_test, violations, Fraction(violations, n_test), 0, worst)


def training_violations(x: PayoffVector, samples: SampleSet) -> int:
    """Training rows the payoff fails to cover (0 for any ``pac_stabilize`` output
    unless the sample set holds an empty coalition with positive value)."""
    return sum(1 for S, v in samples if x.pay(S) < v)

"""Exact rational linear optimization and linear-system solving.

Everything here runs on :class:`fractions.Fraction`; floats never enter a
feasibility decision.  ``solve_lp`` is a dense two-phase tableau simplex
with Bland's anticycling rule.  ``solve_lp_incremental`` wraps it in a row
generation loop for programs with many more constraints than variables
(the covering programs of the stabilizer and the separator programs of the
learners), and returns the same optimum value.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from coopl._numbers import Number, normalize, to_exact
from coopl.errors import Inconsistent, InvalidInput

GE = ">="
LE = "<="
EQ = "="
_RELATIONS = (GE, LE, EQ)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    rhs: Number

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise InvalidInput(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", tuple(to_exact(a) for a in self.coeffs))
        object.__setattr__(self, "rhs", to_exact(self.rhs))

    def lhs(self, x: Sequence[Number]) -> Fraction:
        return sum((a * xi for a, xi in zip(self.coeffs, x) if a), Fraction(0))

    def violation(self, x: Sequence[Number]) -> Fraction:
        """Amount by which ``x`` misses this row (0 when satisfied)."""
        lhs = self.lhs(x)
        if self.relation == GE:
            return max(Fraction(0), self.rhs - lhs)
        if self.relation == LE:
            return max(Fraction(0), lhs - self.rhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class LinearProgram:
    """``minimize objective . x`` subject to ``constraints`` and ``x >= lower``.

    ``lower_bounds`` defaults to all zeros; an entry of ``None`` makes that
    variable free.
    """

    objective: tuple
    constraints: tuple = ()
    lower_bounds: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(to_exact(c) for c in self.objective))
        cons = tuple(
            c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints
        )
        object.__setattr__(self, "constraints", cons)
        width = len(self.objective)
        for c in cons:
            if len(c.coeffs) != width:
                raise InvalidInput(
                    f"constraint width {len(c.coeffs)} != objective width {width}"
                )
        if self.lower_bounds is None:
            object.__setattr__(self, "lower_bounds", (0,) * width)
        else:
            lbs = tuple(None if b is None else to_exact(b) for b in self.lower_bounds)
            if len(lbs) != width:
                raise InvalidInput("lower_bounds width mismatch")
            object.__setattr__(self, "lower_bounds", lbs)

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def is_feasible_point(self, x: Sequence[Number]) -> bool:
        for xi, lb in zip(x, self.lower_bounds):
            if lb is not None and xi < lb:
                return False
        return all(c.violation(x) == 0 for c in self.constraints)

    def value(self, x: Sequence[Number]) -> Fraction:
        return sum((c * xi for c, xi in zip(self.objective, x)), Fraction(0))


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    x: Optional[tuple] = None
    objective: Optional[Number] = None
    pivots: int = 0
    duals: Optional[tuple] = field(default=None, compare=False)
    rows_used: Optional[int] = field(default=None, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _integer_row(values) -> tuple:
    """Scale a rational row to integers; returns (ints, scale)."""
    scale = 1
    for v in values:
        if isinstance(v, Fraction) and v.denominator != 1:
            scale = _lcm(scale, v.denominator)
    return [int(v * scale) for v in values], scale


class _Tableau:
    """Fraction-free simplex tableau in equality standard form with b >= 0.

    Entries are integers sharing one positive denominator ``den`` (the
    determinant of the current basis); a pivot updates every entry by a
    2x2 determinant divided exactly by the previous denominator.
    """

    def __init__(self, rows, basis, n_cols, artificial):
        self.rows = rows  # each row: n_cols integer coefficients + rhs
        self.basis = basis
        self.n_cols = n_cols
        self.artificial = artificial
        self.den = 1
        self.pivots = 0

    def objective_row(self, costs):
        """Integer reduced-cost row for integer ``costs`` (last entry: -objective)."""
        d = [c * self.den for c in costs] + [0]
        for row, b in zip(self.rows, self.basis):
            cb = costs[b]
            if cb:
                for j, a in enumerate(row):
                    if a:
                        d[j] -= cb * a
        return d

    def pivot(self, r, c, d):
        prow = self.rows[r]
        p = prow[c]
        old = self.den
        for other in self.rows + [d]:
            if other is prow:
                continue
            f = other[c]
            if f:
                other[:] = [(a * p - f * b) // old for a, b in zip(other, prow)]
            elif p != old:
                other[:] = [a * p // old if a else 0 for a in other]
        if p < 0:
            for other in self.rows + [d]:
                other[:] = [-a for a in other]
            p = -p
        self.den = p
        self.basis[r] = c
        self.pivots += 1

    def run(self, d, allowed):
        """Bland's rule until optimal or unbounded; returns True if optimal."""
        while True:
            enter = next((j for j in range(self.n_cols) if allowed[j] and d[j] < 0), None)
            if enter is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    key = (Fraction(row[-1], a), self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], enter, d)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly by two-phase simplex under Bland's rule.

    On an optimal outcome ``duals[i]`` is the multiplier of constraint
    ``i`` (non-negative for ``>=`` rows, non-positive for ``<=`` rows in
    this minimisation form), satisfying strong duality.
    """
    # Column layout: structural columns (free vars split in two), then one
    # slack/surplus per inequality row, then one artificial per >=/= row.
    struct = []  # per original var: list of (column, sign)
    n_struct = 0
    shift = []
    for lb in lp.lower_bounds:
        if lb is None:
            struct.append([(n_struct, 1), (n_struct + 1, -1)])
            n_struct += 2
            shift.append(Fraction(0))
        else:
            struct.append([(n_struct, 1)])
            n_struct += 1
            shift.append(Fraction(lb))

    prepared = []
    for con in lp.constraints:
        rhs = Fraction(con.rhs) - sum((a * s for a, s in zip(con.coeffs, shift) if a), Fraction(0))
        row = [Fraction(0)] * n_struct
        for a, cols in zip(con.coeffs, struct):
            if a:
                for col, sign in cols:
                    row[col] += sign * a
        rel, flip = con.relation, 1
        if rhs < 0:
            row = [-a for a in row]
            rhs = -rhs
            rel = {GE: LE, LE: GE, EQ: EQ}[rel]
            flip = -1
        ints, scale = _integer_row(row + [rhs])
        prepared.append((ints[:-1], rel, ints[-1], flip * scale))

    n_slack = sum(1 for _, rel, _, _ in prepared if rel != EQ)
    n_art = sum(1 for _, rel, _, _ in prepared if rel != LE)
    n_cols = n_struct + n_slack + n_art
    rows, basis, artificial, unit = [], [], set(), []
    s_col, a_col = n_struct, n_struct + n_slack
    for row, rel, rhs, _ in prepared:
        full = row + [0] * (n_slack + n_art) + [rhs]
        if rel == LE:
            full[s_col] = 1
            basis.append(s_col)
            s_col += 1
        else:
            if rel == GE:
                full[s_col] = -1
                s_col += 1
            full[a_col] = 1
            basis.append(a_col)
            artificial.add(a_col)
            a_col += 1
        unit.append(basis[-1])
        rows.append(full)

    tab = _Tableau(rows, basis, n_cols, artificial)
    if artificial:
        costs = [1 if j in artificial else 0 for j in range(n_cols)]
        d = tab.objective_row(costs)
        tab.run(d, [True] * n_cols)
        if d[-1] != 0:
            return LpOutcome(LpStatus.INFEASIBLE, pivots=tab.pivots)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] in artificial:
                row = tab.rows[i]
                j = next(
                    (j for j in range(n_cols) if j not in artificial and row[j] != 0), None
                )
                if j is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, j, d)
            i += 1

    cost_frac = [Fraction(0)] * n_cols
    for c, cols in zip(lp.objective, struct):
        for col, sign in cols:
            cost_frac[col] = sign * Fraction(c)
    costs, cost_scale = _integer_row(cost_frac)
    d = tab.objective_row(costs)
    allowed = [j not in artificial for j in range(n_cols)]
    if not tab.run(d, allowed):
        return LpOutcome(LpStatus.UNBOUNDED, pivots=tab.pivots)

    den = tab.den
    values = [Fraction(0)] * n_cols
    for row, b in zip(tab.rows, tab.basis):
        values[b] = Fraction(row[-1], den)
    x = tuple(
        normalize(s + sum(sign * values[col] for col, sign in cols))
        for s, cols in zip(shift, struct)
    )
    # y = c_B B^-1 read off the reduced costs of each row's initial unit column
    duals = tuple(
        normalize(Fraction(-d[u] * scale, den * cost_scale))
        for u, (_, _, _, scale) in zip(unit, prepared)
    )
    return LpOutcome(
        LpStatus.OPTIMAL, x=x, objective=normalize(lp.value(x)), pivots=tab.pivots,
        duals=duals,
    )


def solve_lp_incremental(
    lp: LinearProgram, batch: Optional[int] = None, initial: Sequence[int] = ()
) -> LpOutcome:
    """Row-generation driver around :func:`solve_lp`.

    Solves the program restricted to an active subset of rows, then adds
    the most violated remaining rows (ties by index) until the restricted
    optimum satisfies every row.  The active set only grows, so the loop
    terminates.  An infeasible restriction proves infeasibility; an
    unbounded restriction falls back to solving the full program.
    """
    cons = lp.constraints
    if batch is None:
        batch = max(16, 2 * lp.n_vars)
    active = sorted(set(initial))
    total_pivots = 0
    while True:
        sub = LinearProgram(lp.objective, tuple(cons[i] for i in active), lp.lower_bounds)
        out = solve_lp(sub)
        total_pivots += out.pivots
        if out.status is LpStatus.INFEASIBLE:
            return LpOutcome(LpStatus.INFEASIBLE, pivots=total_pivots, rows_used=len(active))
        if out.status is LpStatus.UNBOUNDED:
            if len(active) == len(cons):
                return LpOutcome(LpStatus.UNBOUNDED, pivots=total_pivots, rows_used=len(active))
            full = solve_lp(lp)
            return LpOutcome(
                full.status, full.x, full.objective, total_pivots + full.pivots,
                full.duals, len(cons),
            )
        in_active = set(active)
        violated = []
        for i, c in enumerate(cons):
            if i not in in_active:
                v = c.violation(out.x)
                if v:
                    violated.append((-v, i))
        if not violated:
            duals = [0] * len(cons)
            for pos, i in enumerate(active):
                duals[i] = out.duals[pos]
            return LpOutcome(
                LpStatus.OPTIMAL, out.x, out.objective, total_pivots, tuple(duals), len(active)
            )
        violated.sort()
        active = sorted(in_active.union(i for _, i in violated[:batch]))


def solve_linear_system(rows: Sequence[Sequence[Number]], rhs: Sequence[Number]) -> list:
    """Solve ``A x = b`` over the rationals by Gauss-Jordan elimination.

    Pivot columns are chosen left to right, pivot rows top to bottom, and
    free variables are set to zero, so the result is a deterministic
    function of the input.  Raises :class:`Inconsistent` when
    rank(A) < rank(A|b).
    """
    if len(rows) != len(rhs):
        raise InvalidInput("row count and rhs length differ")
    width = len(rows[0]) if rows else 0
    m = [[Fraction(to_exact(a)) for a in r] + [Fraction(to_exact(b))] for r, b in zip(rows, rhs)]
    if any(len(r) != width + 1 for r in m):
        raise InvalidInput("coefficient matrix is not rectangular")

    pivot_cols = []
    top = 0
    for col in range(width):
        p = next((i for i in range(top, len(m)) if m[i][col] != 0), None)
        if p is None:
            continue
        m[top], m[p] = m[p], m[top]
        prow = m[top]
        piv = prow[col]
        if piv != 1:
            prow = [a / piv for a in prow]
            m[top] = prow
        nz = [j for j in range(col, width + 1) if prow[j]]
        for i, row in enumerate(m):
            if i != top:
                f = row[col]
                if f:
                    for j in nz:
                        row[j] -= f * prow[j]
        pivot_cols.append(col)
        top += 1
        if top == len(m):
            break

    for row in m[top:]:
        if row[-1] != 0:
            raise Inconsistent("linear system is inconsistent")
    x = [Fraction(0)] * width
    for i, col in enumerate(pivot_cols):
        x[col] = m[i][-1]
    return [normalize(v) for v in x]

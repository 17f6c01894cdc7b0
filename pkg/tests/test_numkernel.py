from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopl.errors import Inconsistent
from coopl.numkernel import (
    EQ,
    GE,
    LE,
    Constraint,
    LinearProgram,
    LpStatus,
    solve_linear_system,
    solve_lp,
    solve_lp_incremental,
)


def lp(obj, cons, lb=None):
    return LinearProgram(tuple(obj), tuple(Constraint(tuple(c), r, b) for c, r, b in cons), lb)


def test_single_lower_bound():
    out = solve_lp(lp([1], [([1], GE, 1)]))
    assert out.status is LpStatus.OPTIMAL
    assert out.x == (1,) and out.objective == 1


def test_infeasible_pair():
    assert solve_lp(lp([1], [([1], GE, 1), ([1], LE, 0)])).status is LpStatus.INFEASIBLE


def test_unbounded():
    assert solve_lp(lp([-1], [([1], GE, 0)])).status is LpStatus.UNBOUNDED


def test_equality_and_free_variable():
    out = solve_lp(lp([1, 0], [([1, 1], EQ, 2), ([0, 1], EQ, 0)], lb=(0, None)))
    assert out.x == (2, 0)


def test_negative_rhs_and_fractional_data():
    # min x + y  s.t. -x - y <= -3/2, x - y = 1/2
    out = solve_lp(lp([1, 1], [([-1, -1], LE, Fraction(-3, 2)), ([1, -1], EQ, Fraction(1, 2))]))
    assert out.objective == Fraction(3, 2)
    assert out.x == (1, Fraction(1, 2))


def test_redundant_equalities_are_dropped():
    out = solve_lp(lp([1, 2], [([1, 1], EQ, 2), ([2, 2], EQ, 4), ([1, 0], LE, 5)]))
    assert out.optimal and out.objective == 2 and out.x == (2, 0)


def test_determinism_same_pivots():
    prog = lp([-3, -2, -4], [([1, 1, 2], LE, 4), ([2, 0, 3], LE, 5), ([2, 1, 3], LE, 7)])
    a, b = solve_lp(prog), solve_lp(prog)
    assert a == b


def test_linear_system_free_variable_zero():
    assert solve_linear_system([[1, 1]], [2]) == [2, 0]


def test_linear_system_inconsistent():
    with pytest.raises(Inconsistent):
        solve_linear_system([[1], [1]], [1, 2])


def _det(m):
    if len(m) == 1:
        return Fraction(m[0][0])
    return sum(
        (-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(len(m))
    )


small_ints = st.integers(-6, 6)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small_ints, min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(small_ints, min_size=3, max_size=3))
def test_linear_system_matches_cramer(a, b):
    det = _det(a)
    if det == 0:
        return
    expected = []
    for j in range(3):
        mj = [row[:j] + [b[i]] + row[j + 1:] for i, row in enumerate(a)]
        expected.append(_det(mj) / det)
    assert solve_linear_system(a, b) == expected


@st.composite
def bounded_lps(draw):
    """Random box-bounded LPs (always bounded, feasibility varies)."""
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 5))
    cons = []
    for _ in range(m):
        coeffs = draw(st.lists(small_ints, min_size=n, max_size=n))
        cons.append((coeffs, draw(st.sampled_from([GE, LE, EQ])), draw(st.integers(-8, 8))))
    for i in range(n):
        unit = [0] * n
        unit[i] = 1
        cons.append((unit, LE, 10))
    obj = draw(st.lists(small_ints, min_size=n, max_size=n))
    return lp(obj, cons)


def _vertex_optimum(prog):
    """Brute force: best feasible basic solution over all n-subsets of tight rows."""
    n = prog.n_vars
    rows = [(c.coeffs, c.rhs) for c in prog.constraints]
    rows += [(tuple(1 if j == i else 0 for j in range(n)), 0) for i in range(n)]
    best = None
    for idx in combinations(range(len(rows)), n):
        a = [list(rows[i][0]) for i in idx]
        if _det(a) == 0:
            continue
        x = solve_linear_system(a, [rows[i][1] for i in idx])
        if prog.is_feasible_point(x):
            val = prog.value(x)
            best = val if best is None else min(best, val)
    return best


@settings(max_examples=80, deadline=None)
@given(bounded_lps())
def test_simplex_matches_vertex_enumeration(prog):
    out = solve_lp(prog)
    best = _vertex_optimum(prog)
    if best is None:
        assert out.status is LpStatus.INFEASIBLE
    else:
        assert out.status is LpStatus.OPTIMAL
        assert prog.is_feasible_point(out.x)
        assert out.objective == best


@settings(max_examples=80, deadline=None)
@given(bounded_lps())
def test_strong_duality_and_dual_signs(prog):
    out = solve_lp(prog)
    if not out.optimal:
        return
    assert sum(y * c.rhs for y, c in zip(out.duals, prog.constraints)) == out.objective
    for y, c in zip(out.duals, prog.constraints):
        if c.relation == GE:
            assert y >= 0
        elif c.relation == LE:
            assert y <= 0
    # dual feasibility for x >= 0: c - A^T y >= 0
    for j, cj in enumerate(prog.objective):
        assert cj - sum(y * c.coeffs[j] for y, c in zip(out.duals, prog.constraints)) >= 0


@settings(max_examples=60, deadline=None)
@given(bounded_lps(), st.data())
def test_removing_a_constraint_never_worsens(prog, data):
    out = solve_lp(prog)
    if not out.optimal:
        return
    drop = data.draw(st.integers(0, len(prog.constraints) - prog.n_vars - 1))
    cons = tuple(c for i, c in enumerate(prog.constraints) if i != drop)
    relaxed = solve_lp(LinearProgram(prog.objective, cons))
    assert relaxed.optimal and relaxed.objective <= out.objective


@settings(max_examples=60, deadline=None)
@given(bounded_lps(), st.integers(1, 4))
def test_row_generation_matches_full_solve(prog, batch):
    full = solve_lp(prog)
    inc = solve_lp_incremental(prog, batch=batch)
    assert inc.status is full.status
    if full.optimal:
        assert inc.objective == full.objective
        assert prog.is_feasible_point(inc.x)
        assert sum(y * c.rhs for y, c in zip(inc.duals, prog.constraints)) == inc.objective


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 5), min_size=3, max_size=3), min_size=1, max_size=6),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_constructed_feasible_point_is_respected(rows, x0):
    # Constraints built to hold at x0 (free variables), so the LP must be feasible
    # and its optimum cannot beat the minimum over the box it is boxed into.
    cons = [(r, GE, sum(a * b for a, b in zip(r, x0))) for r in rows]
    cons += [([1 if j == i else 0 for j in range(3)], LE, 5) for i in range(3)]
    cons += [([1 if j == i else 0 for j in range(3)], GE, -5) for i in range(3)]
    prog = lp([1, 1, 1], cons, lb=(None, None, None))
    out = solve_lp(prog)
    assert out.optimal
    assert prog.is_feasible_point(out.x)
    assert out.objective <= sum(x0)

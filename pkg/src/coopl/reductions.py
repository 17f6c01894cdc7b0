"""Constructive reductions between formulas, min-sum functions, flows and MC-nets.

Literal-player layout for CNF reductions over ``n`` variables:
``x_i -> 2i``, ``not x_i -> 2i + 1``, ``y -> 2n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from coopl.distributions import Empirical, SampleSet
from coopl.errors import InvalidInput
from coopl.games import Coalition, FlowNetwork, McNet, McRule, MinSum


def _parse_clauses(n_vars: int, clauses) -> tuple:
    out = []
    for clause in clauses:
        lits = set()
        for lit in clause:
            if isinstance(lit, tuple):
                var, pol = lit
            else:
                lit = int(lit)
                if lit == 0:
                    raise InvalidInput("literal 0 is not allowed (variables are 1-based)")
                var, pol = abs(lit) - 1, lit > 0
            if not 0 <= var < n_vars:
                raise InvalidInput(f"variable {var + 1} outside 1..{n_vars}")
            lits.add((int(var), bool(pol)))
        if not lits:
            raise InvalidInput("empty clause")
        if any((v, not p) in lits for v, p in lits):
            raise InvalidInput("clause contains a variable and its negation")
        out.append(frozenset(lits))
    return tuple(out)


@dataclass(frozen=True)
class CnfFormula:
    """Conjunction of clauses; a clause is a set of ``(var, polarity)`` literals.

    The constructor also accepts DIMACS-style signed 1-based integers.
    """

    n_vars: int
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "clauses", _parse_clauses(self.n_vars, self.clauses))

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[v] == p for v, p in c) for c in self.clauses)

    def to_json(self) -> dict:
        return {"n": self.n_vars, "clauses": _signed(self.clauses)}


@dataclass(frozen=True)
class DnfFormula:
    """Disjunction of conjunctive terms; same literal encoding as :class:`CnfFormula`."""

    n_vars: int
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", _parse_clauses(self.n_vars, self.terms))

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return any(all(assignment[v] == p for v, p in t) for t in self.terms)

    def to_json(self) -> dict:
        return {"n": self.n_vars, "clauses": _signed(self.terms)}


def _signed(clauses) -> list:
    return [sorted((v + 1) if p else -(v + 1) for v, p in c) for c in clauses]


def formula_from_json(doc: dict, kind: str):
    try:
        n = int(doc["n"])
        clauses = doc["clauses"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed formula document: {exc}") from exc
    if kind == "cnf":
        return CnfFormula(n, tuple(clauses))
    if kind == "dnf":
        return DnfFormula(n, tuple(clauses))
    raise InvalidInput(f"unknown formula kind {kind!r}")


def literal_player(var: int, polarity: bool) -> int:
    return 2 * var if polarity else 2 * var + 1


def cnf_to_minsum(phi: CnfFormula) -> MinSum:
    """One 0/1 vector per clause marking its literal-players, plus one marking ``y``."""
    if not phi.clauses:
        raise InvalidInput("the CNF needs at least one clause")
    n_players = 2 * phi.n_vars + 1
    vectors = []
    for clause in phi.clauses:
        vec = [0] * n_players
        for v, p in clause:
            vec[literal_player(v, p)] = 1
        vectors.append(tuple(vec))
    y_vec = [0] * n_players
    y_vec[2 * phi.n_vars] = 1
    vectors.append(tuple(y_vec))
    return MinSum(tuple(vectors))


def assignment_to_coalition(assignment: Sequence[bool], n_vars: int) -> Coalition:
    """The literal-players made true by ``assignment``, plus ``y``."""
    if len(assignment) != n_vars:
        raise InvalidInput("assignment must cover every variable")
    members = {literal_player(v, bool(t)) for v, t in enumerate(assignment)}
    members.add(2 * n_vars)
    return Coalition(frozenset(members), 2 * n_vars + 1)


def cnf_learning_corpus(phi: CnfFormula, assignments: Iterable[Sequence[bool]], companion: bool = True) -> SampleSet:
    """Labelled coalitions ``(S_T, phi(T))``; with ``companion`` also ``(S_T - {y}, 0)``."""
    f = cnf_to_minsum(phi)
    y = 2 * phi.n_vars
    samples = []
    for T in assignments:
        S = assignment_to_coalition(T, phi.n_vars)
        samples.append((S, f.value(S.members)))
        if companion:
            samples.append((Coalition(S.members - {y}, S.n), 0))
    return SampleSet(2 * phi.n_vars + 1, tuple(samples))


def minsum_to_flow(g: MinSum) -> FlowNetwork:
    """Layered graph on ``k + 1`` vertices; layer ``l`` carries ``n`` parallel
    edges whose capacities are the entries of vector ``l``.

    Edge ``l * n + i`` is player ``i``'s copy in layer ``l``; vertex 0 is the
    source and vertex ``k`` the sink.
    """
    n, k = g.n, g.k
    edges = tuple((l, l + 1, g.vectors[l][i]) for l in range(k) for i in range(n))
    return FlowNetwork(k + 1, edges, 0, k)


def lift_coalition(S: Coalition, k: int) -> Coalition:
    """Coalition of players -> the corresponding edge set of :func:`minsum_to_flow`."""
    n = S.n
    return Coalition(frozenset(l * n + i for l in range(k) for i in S.members), n * k)


def pushforward(dist: Empirical, k: int) -> Empirical:
    """Carry an empirical distribution on players over to the lifted edge sets."""
    return Empirical(tuple(lift_coalition(S, k) for S in dist.support), dist.probs)


def dnf_to_mcnet(phi: DnfFormula) -> McNet:
    """One value-1 rule per term: positives must be present, negatives absent."""
    rules = tuple(
        McRule(frozenset(v for v, p in t if p), frozenset(v for v, p in t if not p), 1)
        for t in phi.terms
    )
    return McNet(phi.n_vars, rules)


def assignments(n_vars: int):
    """All truth assignments in lexicographic order (False before True)."""
    return product((False, True), repeat=n_vars)


def random_cnf(n_vars: int, k: int, rng, max_width: int = 3) -> CnfFormula:
    clauses = []
    for _ in range(k):
        width = int(rng.integers(1, min(max_width, n_vars) + 1))
        vars_ = rng.choice(n_vars, size=width, replace=False)
        clauses.append(frozenset((int(v), bool(rng.integers(2))) for v in vars_))
    return CnfFormula(n_vars, tuple(clauses))


def random_dnf(n_vars: int, k: int, rng, max_width: int = 3) -> DnfFormula:
    cnf = random_cnf(n_vars, k, rng, max_width)
    return DnfFormula(n_vars, cnf.clauses)

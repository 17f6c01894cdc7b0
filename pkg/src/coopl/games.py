"""Characteristic-function representations and their evaluators.

Every game exposes ``n`` and ``value(members)``; :func:`evaluate` is the
checked entry point taking a :class:`Coalition`.  Values are exact
(``int`` or ``Fraction``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

from coopl._numbers import Number, encode, normalize, to_exact
from coopl.errors import InvalidInput, NotAPath, PlayerCountMismatch


@dataclass(frozen=True)
class Coalition:
    members: frozenset
    n: int

    def __post_init__(self):
        members = frozenset(self.members)
        if self.n < 0:
            raise InvalidInput("player count must be non-negative")
        for i in members:
            if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < self.n:
                raise InvalidInput(f"player index {i!r} outside 0..{self.n - 1}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, n: int, members: Iterable[int] = ()) -> "Coalition":
        return cls(frozenset(members), n)

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "Coalition":
        return cls(frozenset(i for i in range(n) if mask >> i & 1), n)

    @classmethod
    def grand(cls, n: int) -> "Coalition":
        return cls(frozenset(range(n)), n)

    @property
    def mask(self) -> int:
        return sum(1 << i for i in self.members)

    def sorted(self) -> list:
        return sorted(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, i) -> bool:
        return i in self.members

    def __repr__(self) -> str:
        return f"Coalition({self.sorted()}, n={self.n})"


def all_coalitions(n: int, nonempty: bool = False):
    """Every coalition of ``n`` players in bitmask order."""
    for mask in range(1 if nonempty else 0, 1 << n):
        yield Coalition.from_mask(n, mask)


def _tuple_exact(values) -> tuple:
    return tuple(to_exact(v) for v in values)


@dataclass(frozen=True)
class Wvg:
    weights: tuple
    quota: Number

    def __post_init__(self):
        object.__setattr__(self, "weights", _tuple_exact(self.weights))
        object.__setattr__(self, "quota", to_exact(self.quota))
        if any(w < 0 for w in self.weights) or self.quota < 0:
            raise InvalidInput("WVG weights and quota must be non-negative")

    @property
    def n(self) -> int:
        return len(self.weights)

    def weight(self, members) -> Number:
        return sum(self.weights[i] for i in members)

    def value(self, members) -> int:
        return 1 if self.weight(members) >= self.quota else 0


@dataclass(frozen=True)
class VectorWvg:
    components: tuple

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Wvg) else Wvg(*c) for c in self.components)
        if not comps:
            raise InvalidInput("vector WVG needs at least one component")
        if len({c.n for c in comps}) != 1:
            raise InvalidInput("vector WVG components disagree on n")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return self.components[0].n

    def value(self, members) -> int:
        return 1 if all(c.value(members) for c in self.components) else 0


@dataclass(frozen=True)
class Ttg:
    """Threshold task game.  ``tasks`` holds ``(threshold, value)`` pairs.

    The implicit task (0, 0) is never stored; a coalition that completes
    no listed task is worth 0.
    """

    weights: tuple
    tasks: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", _tuple_exact(self.weights))
        tasks = tuple(sorted((to_exact(q), to_exact(v)) for q, v in self.tasks))
        object.__setattr__(self, "tasks", tasks)
        if any(w < 0 for w in self.weights):
            raise InvalidInput("TTG weights must be non-negative")
        for q, v in tasks:
            if q < 0 or v < 0:
                raise InvalidInput("TTG thresholds and values must be non-negative")
        for (q1, v1), (q2, v2) in zip(tasks, tasks[1:]):
            if q2 > q1 and not v2 > v1:
                raise InvalidInput("TTG tasks must be strictly monotone in (threshold, value)")

    @property
    def n(self) -> int:
        return len(self.weights)

    def weight(self, members) -> Number:
        return sum(self.weights[i] for i in members)

    def value(self, members) -> Number:
        w = self.weight(members)
        best = 0
        for q, v in self.tasks:
            if q <= w and v > best:
                best = v
        return best


@dataclass(frozen=True)
class Isg:
    """Induced subgraph game over the strict upper triangle ``{(i, j): w}``, i < j."""

    n_players: int
    pair_weights: tuple = ()

    def __post_init__(self):
        items = dict(self.pair_weights) if not isinstance(self.pair_weights, dict) else self.pair_weights
        clean = {}
        for (i, j), w in items.items():
            if not (0 <= i < j < self.n_players):
                raise InvalidInput(f"ISG pair ({i}, {j}) must satisfy 0 <= i < j < n")
            w = to_exact(w)
            if w != 0:
                clean[(i, j)] = w
        object.__setattr__(self, "pair_weights", tuple(sorted(clean.items())))

    @property
    def n(self) -> int:
        return self.n_players

    def weight(self, i: int, j: int) -> Number:
        if i > j:
            i, j = j, i
        return dict(self.pair_weights).get((i, j), 0)

    def value(self, members) -> Number:
        return sum(w for (i, j), w in self.pair_weights if i in members and j in members)


@dataclass(frozen=True)
class FlowNetwork:
    """Directed multigraph whose edges are the players.

    ``edges[k] = (u, v, capacity)``; vertices are ``0 .. n_vertices-1``.
    """

    n_vertices: int
    edges: tuple
    source: int
    sink: int

    def __post_init__(self):
        edges = tuple((int(u), int(v), to_exact(c)) for u, v, c in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.source == self.sink:
            raise InvalidInput("source and sink must differ")
        for u, v, c in edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise InvalidInput(f"edge ({u}, {v}) leaves the vertex range")
            if c < 0:
                raise InvalidInput("capacities must be non-negative")
        for x in (self.source, self.sink):
            if not 0 <= x < self.n_vertices:
                raise InvalidInput("source/sink outside the vertex range")

    @property
    def n(self) -> int:
        return len(self.edges)

    def capacities(self) -> tuple:
        return tuple(c for _, _, c in self.edges)

    def out_edges(self) -> list:
        out = [[] for _ in range(self.n_vertices)]
        for k, (u, _, _) in enumerate(self.edges):
            out[u].append(k)
        return out

    def with_capacities(self, caps: Sequence[Number]) -> "FlowNetwork":
        return FlowNetwork(
            self.n_vertices,
            tuple((u, v, c) for (u, v, _), c in zip(self.edges, caps)),
            self.source,
            self.sink,
        )

    def value(self, members) -> Number:
        return max_flow(self, members)

    def has_st_path(self) -> bool:
        out = self.out_edges()
        seen = {self.source}
        queue = deque([self.source])
        while queue:
            u = queue.popleft()
            for k in out[u]:
                v = self.edges[k][1]
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return self.sink in seen

    def order_path(self, edge_ids: Iterable[int]) -> list:
        """Order an edge set as a simple s-t path, or raise :class:`NotAPath`."""
        ids = set(edge_ids)
        by_tail = {}
        for k in ids:
            if not 0 <= k < self.n:
                raise NotAPath(f"edge {k} not in network")
            u = self.edges[k][0]
            if u in by_tail:
                raise NotAPath("two path edges leave the same vertex")
            by_tail[u] = k
        path, at, visited = [], self.source, {self.source}
        while at != self.sink:
            k = by_tail.get(at)
            if k is None:
                raise NotAPath("edge set does not connect source to sink")
            path.append(k)
            at = self.edges[k][1]
            if at in visited:
                raise NotAPath("edge set contains a cycle")
            visited.add(at)
        if len(path) != len(ids):
            raise NotAPath("edge set has edges off the s-t path")
        return path


def max_flow(net: FlowNetwork, members=None) -> Number:
    """Maximum s-t flow using only the edges in ``members`` (all if None).

    Shortest augmenting paths (Edmonds-Karp) on a residual multigraph;
    exact for integer and rational capacities.
    """
    allowed = range(net.n) if members is None else sorted(members)
    # residual arcs stored pairwise: arc 2k forward, 2k+1 backward
    head, cap, adj = [], [], [[] for _ in range(net.n_vertices)]
    for k in allowed:
        u, v, c = net.edges[k]
        if c == 0 or u == v:
            continue
        adj[u].append(len(head))
        head.append(v)
        cap.append(c)
        adj[v].append(len(head))
        head.append(u)
        cap.append(0)
    s, t = net.source, net.sink
    flow = 0
    while True:
        parent_arc = [-1] * net.n_vertices
        parent_arc[s] = -2
        queue = deque([s])
        while queue and parent_arc[t] == -1:
            u = queue.popleft()
            for a in adj[u]:
                v = head[a]
                if cap[a] > 0 and parent_arc[v] == -1:
                    parent_arc[v] = a
                    queue.append(v)
        if parent_arc[t] == -1:
            return normalize(Fraction(flow)) if isinstance(flow, Fraction) else flow
        bottleneck = None
        v = t
        while v != s:
            a = parent_arc[v]
            bottleneck = cap[a] if bottleneck is None else min(bottleneck, cap[a])
            v = head[a ^ 1]
        v = t
        while v != s:
            a = parent_arc[v]
            cap[a] -= bottleneck
            cap[a ^ 1] += bottleneck
            v = head[a ^ 1]
        flow += bottleneck


def path_value(net: FlowNetwork, path: Sequence[int]) -> Number:
    """Flow that fits through an ordered s-t edge list: its minimum capacity."""
    if not path:
        raise NotAPath("empty path")
    at = net.source
    for k in path:
        if not 0 <= k < net.n:
            raise NotAPath(f"edge {k} not in network")
        u, v, _ = net.edges[k]
        if u != at:
            raise NotAPath(f"edge {k} does not continue the path at vertex {at}")
        at = v
    if at != net.sink:
        raise NotAPath("path does not end at the sink")
    return min(net.edges[k][2] for k in path)


@dataclass(frozen=True)
class MinSum:
    vectors: tuple

    def __post_init__(self):
        vecs = tuple(_tuple_exact(v) for v in self.vectors)
        if not vecs:
            raise InvalidInput("min-sum needs at least one vector")
        if len({len(v) for v in vecs}) != 1:
            raise InvalidInput("min-sum vectors must share a length")
        if any(a < 0 for v in vecs for a in v):
            raise InvalidInput("min-sum entries must be non-negative")
        object.__setattr__(self, "vectors", vecs)

    @property
    def n(self) -> int:
        return len(self.vectors[0])

    @property
    def k(self) -> int:
        return len(self.vectors)

    def value(self, members) -> Number:
        return min(sum(v[i] for i in members) for v in self.vectors)


@dataclass(frozen=True)
class McRule:
    positive: frozenset
    negative: frozenset
    value: Number

    def __post_init__(self):
        object.__setattr__(self, "positive", frozenset(self.positive))
        object.__setattr__(self, "negative", frozenset(self.negative))
        object.__setattr__(self, "value", to_exact(self.value))
        if self.positive & self.negative:
            raise InvalidInput("MC-net rule has a player on both sides")

    def applies(self, members) -> bool:
        return self.positive <= members and not (self.negative & members)


@dataclass(frozen=True)
class McNet:
    n_players: int
    rules: tuple = ()

    def __post_init__(self):
        rules = tuple(r if isinstance(r, McRule) else McRule(*r) for r in self.rules)
        for r in rules:
            if any(not 0 <= i < self.n_players for i in r.positive | r.negative):
                raise InvalidInput("MC-net rule mentions a player outside 0..n-1")
        object.__setattr__(self, "rules", rules)

    @property
    def n(self) -> int:
        return self.n_players

    def value(self, members) -> Number:
        members = frozenset(members)
        return sum(r.value for r in self.rules if r.applies(members))


@dataclass(frozen=True)
class SkillGame:
    """Coalitional skill game.

    mode ``"count"``: number of tasks whose skills the coalition covers.
    mode ``"conjunctive"``: 1 iff every starred task is covered.
    """

    player_skills: tuple
    tasks: tuple
    mode: str = "count"
    starred: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "player_skills", tuple(frozenset(k) for k in self.player_skills))
        object.__setattr__(self, "tasks", tuple(frozenset(k) for k in self.tasks))
        object.__setattr__(self, "starred", tuple(sorted(set(self.starred))))
        if self.mode not in ("count", "conjunctive"):
            raise InvalidInput(f"unknown skill-game mode {self.mode!r}")
        if any(not 0 <= t < len(self.tasks) for t in self.starred):
            raise InvalidInput("starred task index out of range")
        if self.mode == "count" and self.starred:
            raise InvalidInput("starred tasks only apply in conjunctive mode")

    @property
    def n(self) -> int:
        return len(self.player_skills)

    def skills(self, members) -> frozenset:
        return frozenset().union(*(self.player_skills[i] for i in members))

    def required(self) -> frozenset:
        return frozenset().union(*(self.tasks[t] for t in self.starred))

    def value(self, members) -> int:
        have = self.skills(members)
        if self.mode == "count":
            return sum(1 for kappa in self.tasks if kappa <= have)
        return 1 if self.required() <= have else 0


Game = Union[Wvg, VectorWvg, Ttg, Isg, FlowNetwork, MinSum, McNet, SkillGame]


def evaluate(game, S: Coalition) -> Number:
    """Characteristic-function value of coalition ``S`` in ``game``."""
    if S.n != game.n:
        raise PlayerCountMismatch(f"coalition has n={S.n}, game has n={game.n}")
    return game.value(S.members)


# -- named small games ---------------------------------------------------------


def majority(n: int = 3) -> Wvg:
    return Wvg((1,) * n, n // 2 + 1)


def unanimity(n: int = 3) -> Wvg:
    return Wvg((1,) * n, n)


def additive(weights: Sequence[Number]) -> MinSum:
    """v(S) = sum of the weights in S, as a one-vector min-sum game."""
    return MinSum((tuple(weights),))


# -- random generation ----------------------------------------------------------


@dataclass(frozen=True)
class GameClassSpec:
    """Parameters for :func:`random_game`.

    ``weight_range`` bounds player weights (edge capacities for flow,
    pair weights for ISG, entries for min-sum).  ``value_range`` bounds task
    or rule values.  ``quota_range`` defaults to ``[1, total weight]``.
    ``k`` is the task count (TTG), component count (vector WVG), vector
    count (min-sum), rule count (MC-net) or task count (skill game).
    """

    game_class: str
    n: int
    weight_range: tuple = (0, 10)
    value_range: tuple = (1, 20)
    quota_range: Optional[tuple] = None
    k: int = 1
    n_skills: int = 4
    mode: str = "count"

    def to_json(self) -> dict:
        return {
            "class": self.game_class,
            "n": self.n,
            "weight_range": list(self.weight_range),
            "value_range": list(self.value_range),
            "quota_range": None if self.quota_range is None else list(self.quota_range),
            "k": self.k,
            "n_skills": self.n_skills,
            "mode": self.mode,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GameClassSpec":
        q = doc.get("quota_range")
        return cls(
            game_class=doc["class"] if "class" in doc else doc["game_class"],
            n=int(doc["n"]),
            weight_range=tuple(doc.get("weight_range", (0, 10))),
            value_range=tuple(doc.get("value_range", (1, 20))),
            quota_range=None if q is None else tuple(q),
            k=int(doc.get("k", 1)),
            n_skills=int(doc.get("n_skills", 4)),
            mode=doc.get("mode", "count"),
        )


def _randint(rng, lo, hi) -> int:
    if lo > hi:
        raise InvalidInput(f"empty range [{lo}, {hi}]")
    return int(rng.integers(lo, hi + 1))


def _weights(rng, n, rng_range):
    lo, hi = rng_range
    if lo > hi:
        raise InvalidInput(f"empty weight range [{lo}, {hi}]")
    return tuple(int(w) for w in rng.integers(lo, hi + 1, size=n)) if n else ()


def _random_wvg(spec, rng) -> Wvg:
    weights = _weights(rng, spec.n, spec.weight_range)
    lo, hi = spec.quota_range if spec.quota_range is not None else (min(1, sum(weights)), sum(weights))
    return Wvg(weights, _randint(rng, lo, hi))


def _random_ttg(spec, rng, max_tries: int = 10_000) -> Ttg:
    weights = _weights(rng, spec.n, spec.weight_range)
    total = sum(weights)
    # Thresholds above the total weight are legal (the task is unreachable);
    # the default range is widened so k distinct thresholds always exist.
    q_lo, q_hi = spec.quota_range if spec.quota_range is not None else (1, max(spec.k, total))
    v_lo, v_hi = spec.value_range
    if q_hi - q_lo + 1 < spec.k or v_hi - v_lo + 1 < spec.k:
        raise InvalidInput(f"threshold and value ranges must each hold {spec.k} distinct integers")
    for _ in range(max_tries):
        qs = sorted(int(x) for x in rng.integers(q_lo, q_hi + 1, size=spec.k))
        vs = sorted(int(x) for x in rng.integers(v_lo, v_hi + 1, size=spec.k))
        if all(a < b for a, b in zip(qs, qs[1:])) and all(a < b for a, b in zip(vs, vs[1:])):
            return Ttg(weights, tuple(zip(qs, vs)))
    raise InvalidInput("could not draw strictly monotone tasks; widen the ranges")


def _random_isg(spec, rng) -> Isg:
    pairs = {}
    for i, j in combinations(range(spec.n), 2):
        pairs[(i, j)] = _randint(rng, *spec.weight_range)
    return Isg(spec.n, pairs)


def random_layered_network(n_edges: int, rng, cap_range=(1, 10), max_depth: int = 4) -> FlowNetwork:
    """Random layered DAG with exactly ``n_edges`` edges.

    Every vertex lies on some s-t path, so random walks from s always hit t.
    Parallel edges are allowed (edges are players, not vertex pairs).
    """
    if n_edges < 1:
        raise InvalidInput("a flow network needs at least one edge")
    while True:
        depth = _randint(rng, 1, min(n_edges, max_depth))
        widths = [1] + [_randint(rng, 1, 3) for _ in range(depth - 1)] + [1]
        if sum(max(a, b) for a, b in zip(widths, widths[1:])) <= n_edges:
            break
    layers, nxt = [], 0
    for w in widths:
        layers.append(list(range(nxt, nxt + w)))
        nxt += w
    source, sink = layers[0][0], layers[-1][0]
    pairs = []
    for left, right in zip(layers, layers[1:]):
        for i in range(max(len(left), len(right))):
            pairs.append((left[i % len(left)], right[i % len(right)]))
    while len(pairs) < n_edges:
        l = _randint(rng, 0, depth - 1)
        left, right = layers[l], layers[l + 1]
        pairs.append((left[_randint(rng, 0, len(left) - 1)], right[_randint(rng, 0, len(right) - 1)]))
    caps = _weights(rng, n_edges, cap_range)
    return FlowNetwork(nxt, tuple((u, v, c) for (u, v), c in zip(pairs, caps)), source, sink)


def random_game(spec: GameClassSpec, rng):
    """Draw a game of ``spec.game_class`` from ``rng`` (a numpy Generator)."""
    cls = spec.game_class
    if spec.n < 0 or spec.k < 1:
        raise InvalidInput("n must be >= 0 and k >= 1")
    if cls == "wvg":
        return _random_wvg(spec, rng)
    if cls == "vector_wvg":
        return VectorWvg(tuple(_random_wvg(spec, rng) for _ in range(spec.k)))
    if cls == "ttg":
        return _random_ttg(spec, rng)
    if cls == "isg":
        return _random_isg(spec, rng)
    if cls == "flow":
        lo, hi = spec.weight_range
        return random_layered_network(spec.n, rng, (lo, hi))
    if cls == "minsum":
        return MinSum(tuple(_weights(rng, spec.n, spec.weight_range) for _ in range(spec.k)))
    if cls == "mcnet":
        rules = []
        for _ in range(spec.k):
            signs = rng.integers(-1, 2, size=spec.n)
            pos = [i for i in range(spec.n) if signs[i] == 1]
            neg = [i for i in range(spec.n) if signs[i] == -1]
            rules.append(McRule(pos, neg, _randint(rng, *spec.value_range)))
        return McNet(spec.n, tuple(rules))
    if cls == "skill":
        if spec.n_skills < 1:
            raise InvalidInput("skill universe must be nonempty")
        skills = []
        for _ in range(spec.n):
            mask = rng.random(spec.n_skills) < 0.5
            skills.append(frozenset(int(s) for s in range(spec.n_skills) if mask[s]))
        universe = sorted(frozenset().union(*skills)) if skills else []
        tasks = []
        for _ in range(spec.k):
            if universe:
                size = _randint(rng, 1, min(2, len(universe)))
                picks = rng.choice(len(universe), size=size, replace=False)
                tasks.append(frozenset(universe[int(p)] for p in picks))
            else:
                tasks.append(frozenset())
        if spec.mode == "conjunctive":
            n_star = _randint(rng, 1, spec.k)
            starred = tuple(int(t) for t in rng.choice(spec.k, size=n_star, replace=False))
            return SkillGame(tuple(skills), tuple(tasks), "conjunctive", starred)
        return SkillGame(tuple(skills), tuple(tasks), "count")
    raise InvalidInput(f"unknown game class {cls!r}")


# -- JSON documents ----------------------------------------------------------------

GAME_CLASSES = ("wvg", "vector_wvg", "ttg", "isg", "flow", "minsum", "mcnet", "skill")


def game_to_json(game) -> dict:
    if isinstance(game, Wvg):
        return {"class": "wvg", "n": game.n, "weights": [encode(w) for w in game.weights],
                "quota": encode(game.quota)}
    if isinstance(game, VectorWvg):
        return {"class": "vector_wvg", "n": game.n, "components": [
            {"weights": [encode(w) for w in c.weights], "quota": encode(c.quota)}
            for c in game.components]}
    if isinstance(game, Ttg):
        return {"class": "ttg", "n": game.n, "weights": [encode(w) for w in game.weights],
                "tasks": [{"threshold": encode(q), "value": encode(v)} for q, v in game.tasks]}
    if isinstance(game, Isg):
        return {"class": "isg", "n": game.n,
                "weights": [[i, j, encode(w)] for (i, j), w in game.pair_weights]}
    if isinstance(game, FlowNetwork):
        return {"class": "flow", "n": game.n, "vertices": game.n_vertices,
                "source": game.source, "sink": game.sink,
                "edges": [[u, v, encode(c)] for u, v, c in game.edges]}
    if isinstance(game, MinSum):
        return {"class": "minsum", "n": game.n,
                "vectors": [[encode(a) for a in v] for v in game.vectors]}
    if isinstance(game, McNet):
        return {"class": "mcnet", "n": game.n, "rules": [
            {"pos": sorted(r.positive), "neg": sorted(r.negative), "value": encode(r.value)}
            for r in game.rules]}
    if isinstance(game, SkillGame):
        doc = {"class": "skill", "n": game.n,
               "player_skills": [sorted(k, key=str) for k in game.player_skills],
               "tasks": [sorted(k, key=str) for k in game.tasks], "mode": game.mode}
        if game.mode == "conjunctive":
            doc["starred"] = list(game.starred)
        return doc
    raise InvalidInput(f"not a game: {type(game).__name__}")


def game_from_json(doc: dict):
    try:
        cls = doc["class"]
        n = int(doc["n"])
        if cls == "wvg":
            game = Wvg(doc["weights"], doc["quota"])
        elif cls == "vector_wvg":
            game = VectorWvg(tuple(Wvg(c["weights"], c["quota"]) for c in doc["components"]))
        elif cls == "ttg":
            game = Ttg(doc["weights"], tuple((t["threshold"], t["value"]) for t in doc["tasks"]))
        elif cls == "isg":
            game = Isg(n, {(int(i), int(j)): w for i, j, w in doc["weights"]})
        elif cls == "flow":
            game = FlowNetwork(int(doc["vertices"]), tuple(tuple(e) for e in doc["edges"]),
                               int(doc["source"]), int(doc["sink"]))
        elif cls == "minsum":
            game = MinSum(tuple(tuple(v) for v in doc["vectors"]))
        elif cls == "mcnet":
            game = McNet(n, tuple(McRule(r["pos"], r["neg"], r["value"]) for r in doc["rules"]))
        elif cls == "skill":
            game = SkillGame(tuple(doc["player_skills"]), tuple(doc["tasks"]),
                             doc.get("mode", "count"), tuple(doc.get("starred", ())))
        else:
            raise InvalidInput(f"unknown game class {cls!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed game document: {exc}") from exc
    if game.n != n:
        raise InvalidInput(f"document says n={n} but payload has {game.n} players")
    return game

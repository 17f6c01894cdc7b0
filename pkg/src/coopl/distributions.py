"""Coalition distributions, i.i.d. sampling and sample-size formulas.

All randomness flows through a ``numpy.random.Generator`` passed by the
caller, so a fixed seed gives a bit-identical sample stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from coopl._numbers import encode, to_exact
from coopl.errors import InvalidInput, RetryLimitExceeded
from coopl.games import Coalition, FlowNetwork, evaluate, game_from_json, game_to_json

WALK_RETRY_CAP = 10_000


@dataclass(frozen=True)
class Uniform:
    """Every coalition of ``n`` players equally likely."""

    n: int

    def describe(self) -> dict:
        return {"kind": "uniform", "n": self.n}


@dataclass(frozen=True)
class Product:
    """Player ``i`` joins independently with probability ``probs[i]``."""

    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise InvalidInput("product probabilities must lie in [0, 1]")
        object.__setattr__(self, "probs", probs)

    @property
    def n(self) -> int:
        return len(self.probs)

    def describe(self) -> dict:
        return {"kind": "product", "n": self.n, "probs": list(self.probs)}


@dataclass(frozen=True)
class Empirical:
    """Finite support of coalitions with explicit probabilities."""

    support: tuple
    probs: tuple

    def __post_init__(self):
        support = tuple(self.support)
        probs = tuple(float(p) for p in self.probs)
        if not support or len(support) != len(probs):
            raise InvalidInput("empirical distribution needs matching nonempty support and probs")
        if len({S.n for S in support}) != 1:
            raise InvalidInput("empirical support mixes player counts")
        if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
            raise InvalidInput("empirical probabilities must be >= 0 and sum to 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform_over(cls, support: Sequence[Coalition]) -> "Empirical":
        support = tuple(support)
        return cls(support, tuple([1.0 / len(support)] * len(support)))

    @property
    def n(self) -> int:
        return self.support[0].n

    def describe(self) -> dict:
        return {"kind": "empirical", "n": self.n,
                "support": [S.sorted() for S in self.support], "probs": list(self.probs)}


@dataclass(frozen=True)
class RandomWalkPath:
    """Uniform random walk from the source, stopped at the sink.

    A walk that has not reached the sink after ``|V|`` steps, or that
    dead-ends, is discarded and redrawn (up to ``WALK_RETRY_CAP`` times).
    The coalition is the set of traversed edges.
    """

    network: FlowNetwork
    _out: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self.network.has_st_path():
            raise InvalidInput("random-walk network has no s-t path")
        object.__setattr__(self, "_out", tuple(tuple(o) for o in self.network.out_edges()))

    @property
    def n(self) -> int:
        return self.network.n

    def walk(self, rng) -> Optional[list]:
        net = self.network
        at, edges = net.source, []
        for _ in range(net.n_vertices):
            options = self._out[at]
            if not options:
                return None
            k = options[int(rng.integers(len(options)))]
            edges.append(k)
            at = net.edges[k][1]
            if at == net.sink:
                return edges
        return None

    def describe(self) -> dict:
        return {"kind": "random_walk_path", "n": self.n, "network": game_to_json(self.network)}


CoalitionDistribution = (Uniform, Product, Empirical, RandomWalkPath)


def draw(dist, rng) -> Coalition:
    """One coalition from ``dist``."""
    return draw_many(dist, 1, rng)[0]


def draw_many(dist, count: int, rng) -> list:
    """``count`` i.i.d. coalitions from ``dist``, vectorised where possible."""
    if count < 0:
        raise InvalidInput("count must be non-negative")
    n = dist.n
    if isinstance(dist, (Uniform, Product)):
        p = 0.5 if isinstance(dist, Uniform) else np.asarray(dist.probs)
        hits = rng.random((count, n)) < p
        return [Coalition(frozenset(np.flatnonzero(row).tolist()), n) for row in hits]
    if isinstance(dist, Empirical):
        idx = rng.choice(len(dist.support), size=count, p=np.asarray(dist.probs))
        return [dist.support[int(i)] for i in idx]
    if isinstance(dist, RandomWalkPath):
        out = []
        for _ in range(count):
            for _attempt in range(WALK_RETRY_CAP):
                edges = dist.walk(rng)
                if edges is not None:
                    out.append(Coalition(frozenset(edges), n))
                    break
            else:
                raise RetryLimitExceeded(
                    f"random walk failed to reach the sink in {WALK_RETRY_CAP} attempts"
                )
        return out
    raise InvalidInput(f"not a coalition distribution: {type(dist).__name__}")


def distribution_from_json(doc: dict):
    kind = doc.get("kind")
    try:
        if kind == "uniform":
            return Uniform(int(doc["n"]))
        if kind == "product":
            return Product(tuple(doc["probs"]))
        if kind == "empirical":
            n = int(doc["n"])
            return Empirical(tuple(Coalition.of(n, s) for s in doc["support"]), tuple(doc["probs"]))
        if kind == "random_walk_path":
            net = game_from_json(doc["network"])
            if not isinstance(net, FlowNetwork):
                raise InvalidInput("random_walk_path needs a flow network")
            return RandomWalkPath(net)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed distribution document: {exc}") from exc
    raise InvalidInput(f"unknown distribution kind {kind!r}")


def distribution_to_json(dist) -> dict:
    return dist.describe()


@dataclass(frozen=True)
class SampleSet:
    n: int
    samples: tuple = ()
    seed: Optional[int] = None
    distribution: Optional[dict] = None

    def __post_init__(self):
        clean = []
        for S, v in self.samples:
            if S.n != self.n:
                raise InvalidInput("sample coalition has the wrong player count")
            clean.append((S, to_exact(v)))
        object.__setattr__(self, "samples", tuple(clean))

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def coalitions(self) -> list:
        return [S for S, _ in self.samples]

    def values(self) -> list:
        return [v for _, v in self.samples]


def sample_game(game, dist, m: int, rng, seed: Optional[int] = None) -> SampleSet:
    """``m`` i.i.d. pairs ``(S_j, v(S_j))`` with ``S_j ~ dist``."""
    if m < 0:
        raise InvalidInput("m must be non-negative")
    if dist.n != game.n:
        raise InvalidInput("distribution and game disagree on n")
    cache = {}
    samples = []
    for S in draw_many(dist, m, rng):
        if S not in cache:
            cache[S] = evaluate(game, S)
        samples.append((S, cache[S]))
    return SampleSet(game.n, tuple(samples), seed, dist.describe())


def write_samples(samples: SampleSet, fh) -> None:
    """JSON-lines: a header record, then one ``{"S": [...], "v": value}`` per sample."""
    header = {"header": True, "n": samples.n, "m": len(samples),
              "seed": samples.seed, "distribution": samples.distribution}
    fh.write(json.dumps(header, sort_keys=True) + "\n")
    for S, v in samples.samples:
        fh.write(json.dumps({"S": S.sorted(), "v": encode(v)}, sort_keys=True) + "\n")


def read_samples(fh) -> SampleSet:
    lines = [ln for ln in (line.strip() for line in fh) if ln]
    if not lines:
        raise InvalidInput("empty sample file")
    try:
        header = json.loads(lines[0])
        if not header.get("header"):
            raise InvalidInput("sample file lacks a header line")
        n = int(header["n"])
        samples = []
        for ln in lines[1:]:
            rec = json.loads(ln)
            samples.append((Coalition.of(n, rec["S"]), to_exact(rec["v"])))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed sample file: {exc}") from exc
    return SampleSet(n, tuple(samples), header.get("seed"), header.get("distribution"))


# -- sample complexity -------------------------------------------------------------


def _check_eps_delta(epsilon: float, delta: float) -> None:
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise InvalidInput("epsilon and delta must lie strictly between 0 and 1")


def sample_complexity_finite(epsilon: float, delta: float, log_class_size: float) -> int:
    """Samples for a consistent learner over a finite class: ``(ln|C| + ln(1/delta)) / epsilon``.

    ``log_class_size`` is the natural log of the class size.
    """
    _check_eps_delta(epsilon, delta)
    if log_class_size < 0:
        raise InvalidInput("log_class_size must be non-negative")
    return math.ceil((log_class_size + math.log(1 / delta)) / epsilon)


def sample_complexity_ttg_values(k: int, epsilon: float, delta: float) -> int:
    """Samples so that, w.p. >= 1-delta, unseen task values carry mass < epsilon."""
    _check_eps_delta(epsilon, delta)
    if k < 1:
        raise InvalidInput("k must be >= 1")
    return max(1, math.ceil(k * math.log(1 / delta) / epsilon))

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopl.distributions import (
    Empirical,
    Product,
    RandomWalkPath,
    Uniform,
    distribution_from_json,
    distribution_to_json,
    draw,
    draw_many,
    read_samples,
    sample_complexity_finite,
    sample_complexity_ttg_values,
    sample_game,
    write_samples,
)
from coopl.errors import InvalidInput, RetryLimitExceeded
from coopl.games import Coalition, FlowNetwork, GameClassSpec, majority, random_game


def rng(seed=0):
    return np.random.default_rng(seed)


def test_forced_inclusion_and_exclusion():
    assert draw(Product((1.0, 1.0, 1.0)), rng()) == Coalition.grand(3)
    assert draw(Product((0.0, 0.0)), rng()) == Coalition.of(2)


def test_line_graph_walk_is_the_unique_path():
    line = FlowNetwork(3, ((0, 1, 1), (1, 2, 1)), 0, 2)
    draws = draw_many(RandomWalkPath(line), 50, rng())
    assert set(draws) == {Coalition.of(2, [0, 1])}


def test_walk_retries_past_dead_ends():
    # s -> a -> t, or s -> b (dead end); half the walks are redrawn
    net = FlowNetwork(4, ((0, 1, 1), (1, 3, 1), (0, 2, 1)), 0, 3)
    draws = draw_many(RandomWalkPath(net), 200, rng(2))
    assert set(draws) == {Coalition.of(3, [0, 1])}


def test_walk_retry_cap(monkeypatch):
    import coopl.distributions as d

    net = FlowNetwork(3, ((0, 1, 1), (1, 2, 1)), 0, 2)
    dist = RandomWalkPath(net)
    monkeypatch.setattr(d.RandomWalkPath, "walk", lambda self, r: None)
    with pytest.raises(RetryLimitExceeded):
        draw(dist, rng())


def test_uniform_frequencies_within_five_sigma():
    count = 100_000
    draws = draw_many(Uniform(3), count, rng(7))
    freq = np.bincount([S.mask for S in draws], minlength=8)
    p = 1 / 8
    sigma = math.sqrt(count * p * (1 - p))
    assert np.all(np.abs(freq - count * p) < 5 * sigma)


def test_product_marginals_within_five_sigma():
    probs = (0.1, 0.5, 0.85)
    count = 100_000
    draws = draw_many(Product(probs), count, rng(8))
    for i, p in enumerate(probs):
        hits = sum(1 for S in draws if i in S)
        assert abs(hits - count * p) < 5 * math.sqrt(count * p * (1 - p))


def test_empirical_frequencies_within_five_sigma():
    support = (Coalition.of(3, [0]), Coalition.of(3, [1, 2]), Coalition.grand(3))
    probs = (0.2, 0.3, 0.5)
    count = 100_000
    draws = draw_many(Empirical(support, probs), count, rng(9))
    for S, p in zip(support, probs):
        hits = sum(1 for T in draws if T == S)
        assert abs(hits - count * p) < 5 * math.sqrt(count * p * (1 - p))


def test_empirical_validation():
    with pytest.raises(InvalidInput):
        Empirical((Coalition.of(2, [0]),), (0.5,))


def test_distribution_json_round_trip():
    net = FlowNetwork(3, ((0, 1, 2), (1, 2, 3)), 0, 2)
    for dist in (Uniform(4), Product((0.25, 0.75)),
                 Empirical.uniform_over([Coalition.of(3, [0]), Coalition.of(3, [1, 2])]),
                 RandomWalkPath(net)):
        assert distribution_from_json(distribution_to_json(dist)) == dist


def test_empty_sample_set():
    assert len(sample_game(majority(3), Uniform(3), 0, rng())) == 0


def test_seeded_samples_are_identical():
    a = sample_game(majority(3), Uniform(3), 40, rng(5))
    b = sample_game(majority(3), Uniform(3), 40, rng(5))
    assert a == b


def test_majority_values_are_binary():
    samples = sample_game(majority(3), Uniform(3), 100, rng(1))
    table = {S: int(len(S) >= 2) for S, _ in samples}
    assert all(v in (0, 1) and v == table[S] for S, v in samples)


def test_jsonl_round_trip():
    g = random_game(GameClassSpec("ttg", 5, k=2), rng(3))
    samples = sample_game(g, Uniform(5), 30, rng(4), seed=4)
    buf = io.StringIO()
    write_samples(samples, buf)
    buf.seek(0)
    assert read_samples(buf) == samples


def test_finite_class_formula():
    assert sample_complexity_finite(0.5, 0.5, math.log(2)) == 3
    assert sample_complexity_finite(0.9, 0.9, 0.0) == 1
    assert sample_complexity_finite(0.1, 0.05, 4 * math.log(5)) == 95


def test_ttg_value_formula():
    assert sample_complexity_ttg_values(3, 0.1, 0.01) == 139
    assert sample_complexity_ttg_values(1, 0.5, 0.5) == 2
    assert sample_complexity_ttg_values(1, 0.99, 0.99) == 1


@pytest.mark.parametrize("eps, delta", [(0, 0.1), (1, 0.1), (0.1, 0), (0.1, 1.5)])
def test_formula_rejects_out_of_range(eps, delta):
    with pytest.raises(InvalidInput):
        sample_complexity_finite(eps, delta, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0, 50))
def test_finite_formula_is_the_smallest_adequate_m(eps, delta, log_c):
    m = sample_complexity_finite(eps, delta, log_c)
    target = (log_c + math.log(1 / delta)) / eps
    assert m >= target - 1e-9 and m - 1 < target

from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopl.distributions import RandomWalkPath, SampleSet, Uniform, sample_game
from coopl.errors import Inconsistent, InvalidInput, NotRealizable, ToleranceLimitExceeded
from coopl.games import (
    Coalition,
    FlowNetwork,
    GameClassSpec,
    SkillGame,
    Wvg,
    all_coalitions,
    evaluate,
    random_game,
)
from coopl.learners import learn_ctsg, learn_flow_paths, learn_isg, learn_ttg, learn_wvg


def samples(n, rows):
    return SampleSet(n, tuple((Coalition.of(n, s), v) for s, v in rows))


def replays(hyp, s):
    return all(hyp.value(S.members) == v for S, v in s)


# two parallel first hops (edges 0 and 2) into a single last hop (edge 1)
FORK = FlowNetwork(3, ((0, 1, 9), (1, 2, 9), (0, 1, 9)), 0, 2)


def test_flow_paths_per_edge_max():
    hyp = learn_flow_paths(samples(3, [([0, 1], 3), ([2, 1], 5)]), FORK)
    assert hyp.weights == (3, 5, 5)
    assert hyp.value({0, 1}) == 3 and hyp.value({1, 2}) == 5


def test_flow_paths_single_edge():
    net = FlowNetwork(2, ((0, 1, 1), (0, 1, 1), (0, 1, 1)), 0, 1)
    assert learn_flow_paths(samples(3, [([0], 7)]), net).weights == (7, 0, 0)


def test_flow_paths_conflict():
    net = FlowNetwork(2, ((0, 1, 1), (0, 1, 1)), 0, 1)
    with pytest.raises(NotRealizable):
        learn_flow_paths(samples(2, [([0], 3), ([0], 5)]), net)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 60), st.integers(0, 2**32 - 1))
def test_flow_paths_replay_and_dominance(n, m, seed):
    r = np.random.default_rng(seed)
    net = random_game(GameClassSpec("flow", n, weight_range=(1, 10)), r)
    s = sample_game(net, RandomWalkPath(net), m, r)
    hyp = learn_flow_paths(s, net)
    assert replays(hyp, s)
    assert all(wh <= c for wh, (_, _, c) in zip(hyp.weights, net.edges))


def test_ttg_no_positive_samples():
    hyp = learn_ttg(samples(2, [([0], 0)]))
    assert hyp.game.tasks == () and hyp.value({0, 1}) == 0


def test_ttg_worked_example():
    s = samples(3, [([2], 10), ([0, 1], 10), ([0, 1, 2], 20), ([0], 0)])
    hyp = learn_ttg(s)
    assert replays(hyp, s)
    assert hyp.task_values == (10, 20) and hyp.r == 0


def test_ttg_contradiction():
    with pytest.raises(NotRealizable):
        learn_ttg(samples(2, [([0], 5), ([0], 9)]))


def test_ttg_unrealizable_ordering():
    # {0} beats {1} in value but {0,1} is worth less than {0}: not monotone
    with pytest.raises(NotRealizable):
        learn_ttg(samples(2, [([0], 5), ([0, 1], 3)]))


def test_ttg_literal_tolerance_variant_never_misfits():
    # The +2^-r sign lets a coalition sit exactly on the next threshold, so the
    # loop may exhaust r_max; it must never return a hypothesis that fails replay.
    s = samples(3, [([2], 10), ([0, 1], 10), ([0, 1, 2], 20), ([0], 0)])
    try:
        hyp = learn_ttg(s, r_max=8, tolerance_sign=1, top_threshold=12)
    except ToleranceLimitExceeded:
        return
    assert replays(hyp, s)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 7), st.integers(1, 4), st.integers(1, 80), st.integers(0, 2**32 - 1))
def test_ttg_realizable_samples_always_fit(n, k, m, seed):
    r = np.random.default_rng(seed)
    g = random_game(GameClassSpec("ttg", n, k=k, weight_range=(0, 8)), r)
    s = sample_game(g, Uniform(n), m, r)
    hyp = learn_ttg(s)
    assert replays(hyp, s)
    assert set(hyp.task_values) <= {v for _, v in g.tasks}


def test_isg_single_pair():
    g = learn_isg(samples(2, [([0], 0), ([1], 0), ([0, 1], 4)]))
    assert g.weight(0, 1) == 4


def test_isg_inconsistent():
    with pytest.raises(Inconsistent):
        learn_isg(samples(2, [([0, 1], 4), ([0, 1], 5)]))


def _pairs_and_singletons(n):
    return [Coalition.of(n, [i]) for i in range(n)] + [
        Coalition.of(n, p) for p in combinations(range(n), 2)
    ]


@pytest.mark.parametrize("seed", range(5))
def test_isg_exact_recovery_from_pairs(seed):
    g = random_game(GameClassSpec("isg", 4, weight_range=(-5, 5)), np.random.default_rng(seed))
    s = SampleSet(4, tuple((S, evaluate(g, S)) for S in _pairs_and_singletons(4)))
    learned = learn_isg(s)
    assert all(learned.weight(i, j) == g.weight(i, j) for i, j in combinations(range(4), 2))


def test_isg_determinism():
    s = samples(3, [([0, 1, 2], 6)])
    assert learn_isg(s) == learn_isg(s)
    assert learn_isg(s).weight(0, 1) == 6


def test_wvg_simple_separation():
    s = samples(2, [([0], 1), ([1], 0)])
    assert replays(learn_wvg(s), s)


def test_wvg_xor_is_not_realizable():
    with pytest.raises(NotRealizable):
        learn_wvg(samples(2, [([0], 1), ([1], 1), ([0, 1], 0)]))


def test_wvg_truth_table():
    g = Wvg((3, 2, 1), 4)
    s = SampleSet(3, tuple((S, evaluate(g, S)) for S in all_coalitions(3)))
    assert replays(learn_wvg(s), s)


def test_wvg_empty_winner():
    s = samples(2, [([], 1), ([0, 1], 1)])
    assert replays(learn_wvg(s), s)


def test_wvg_rejects_non_binary_labels():
    with pytest.raises(InvalidInput):
        learn_wvg(samples(1, [([0], 2)]))


SKILLS = ({"a", "b"}, {"c"}, {"a", "d"}, {"b", "c", "d"})


def test_ctsg_no_positives():
    hyp = learn_ctsg(samples(4, [([0], 0)]), SKILLS)
    assert hyp.required == frozenset("abcd")
    assert hyp.value({0, 1}) == 0


def test_ctsg_intersection():
    # {0,1} has {a,b,c}; {0,2} has {a,b,d}
    hyp = learn_ctsg(samples(4, [([0, 1], 1), ([0, 2], 1)]), SKILLS)
    assert hyp.required == frozenset("ab")


def test_ctsg_exact_recovery_over_all_skill_subsets():
    # one player per skill makes every skill subset reachable
    skills = ({"a"}, {"b"}, {"c"}, {"d"})
    truth = SkillGame(skills, ({"a", "b"},), "conjunctive", (0,))
    s = SampleSet(4, tuple((S, evaluate(truth, S)) for S in all_coalitions(4)))
    assert learn_ctsg(s, skills).required == frozenset("ab")


def test_ctsg_not_realizable():
    with pytest.raises(NotRealizable):
        learn_ctsg(samples(4, [([0], 1), ([0, 1], 0)]), SKILLS)

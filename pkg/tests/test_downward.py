import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posetruns.distributions import Pdf, upf_from_pdf
from posetruns.downward import (
    chain_from_upf_tree_down,
    check_left_invariance,
    classify_downward,
    lift_down_to_path_space,
    standard_invariant_G,
    validate_downward,
)
from posetruns.errors import RowSumError, SupportError, ZeroOnCover
from posetruns.families import LevelParams, parse_tail, success_runs_reversed
from posetruns.kernels import Verdict, n_step_distributions, pushforward
from posetruns.poset import tree_poset
from support import diamond, random_down_kernel, random_poset, random_tree, random_tree_pdf

# the reversal of the diamond upward fixture, written out by hand
DIAMOND_DOWN = {
    "e": {"e": 0.2, "a": 0.2, "b": 0.28, "t": 0.32},
    "a": {"e": 1},
    "b": {"e": 1},
    "t": {"a": 0.625, "b": 0.375},
}


def test_diamond_G_and_nu():
    Q = validate_downward(DIAMOND_DOWN, diamond())
    G = standard_invariant_G(Q)
    assert G.values == pytest.approx({"e": 1, "a": 0.4, "b": 0.4, "t": 0.32}, abs=1e-12)
    c = classify_downward(Q)
    assert c.verdict == Verdict.POSITIVE_RECURRENT
    assert c.mean_return == pytest.approx(2.12, abs=1e-12)
    # nu(e) = sum over levels of (n + 1) Q(e, S_n)
    assert 1 * 0.2 + 2 * 0.48 + 3 * 0.32 == pytest.approx(c.mean_return)
    assert c.survival == pytest.approx((1, 0.8, 0.32), abs=1e-12)


def test_downward_validation():
    D = diamond()
    with pytest.raises(SupportError):
        validate_downward(dict(DIAMOND_DOWN, t={"e": 1}), D)
    with pytest.raises(RowSumError):
        validate_downward(dict(DIAMOND_DOWN, t={"a": 0.5, "b": 0.4}), D)
    with pytest.raises(RowSumError):
        validate_downward(dict(DIAMOND_DOWN, e={"e": 0.5, "a": 0.2}), D)
    with pytest.raises(ZeroOnCover):
        validate_downward(dict(DIAMOND_DOWN, t={"a": 1.0}), D)


def test_truncated_root_row_on_chain():
    Q = success_runs_reversed(LevelParams((), parse_tail("constant:0.5")), 40)
    assert Q.e_tail == pytest.approx(0.5 ** 41)
    G = standard_invariant_G(Q, 40)
    assert G[3] == pytest.approx(0.125, abs=1e-11)
    assert G.tail_bound == pytest.approx(0.5 ** 41)
    c = classify_downward(Q, 40)
    assert c.verdict == Verdict.POSITIVE_RECURRENT
    assert c.bounds[0] <= 2 <= c.bounds[1]


def test_null_recurrent_remaining_life():
    Q = success_runs_reversed(LevelParams((), parse_tail("power:1,1")), 50)
    assert classify_downward(Q, 50).verdict == Verdict.NULL_RECURRENT


def test_tree_converse_down():
    T = tree_poset({"e": ["a", "b"], "a": ["c"]})
    upf = {"e": 1, "a": 0.6, "b": 0.3, "c": 0.2}
    Q = chain_from_upf_tree_down(upf, T)
    assert Q.row("e") == pytest.approx({"e": 0.1, "a": 0.4, "b": 0.3, "c": 0.2})
    G = standard_invariant_G(Q)
    assert max(abs(G[x] - upf[x]) for x in upf) < 1e-12


def test_downward_path_lift_projects():
    Q = validate_downward(DIAMOND_DOWN, diamond())
    L = lift_down_to_path_space(Q)
    assert sum(L.row(L.root).values()) == pytest.approx(1, abs=1e-12)
    base = n_step_distributions(Q, Q.root, 6)
    lifted = n_step_distributions(L, L.root, 6)
    for b, l in zip(base, lifted):
        pushed = pushforward(l, lambda a: a.end)
        assert all(abs(pushed.get(x, 0) - b.get(x, 0)) < 1e-12 for x in set(b) | set(pushed))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 16))
def test_random_left_invariance(seed, n):
    rng = random.Random(seed)
    Q = random_down_kernel(rng, random_poset(rng, n))
    worst, root = check_left_invariance(Q, standard_invariant_G(Q))
    assert worst < 1e-12 and root < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 20))
def test_random_tree_converse_down(seed, n):
    rng = random.Random(seed)
    T, _ = random_tree(rng, n)
    upf = upf_from_pdf(Pdf(random_tree_pdf(rng, n)), T)
    G = standard_invariant_G(chain_from_upf_tree_down(upf, T))
    assert max(abs(G[x] - upf[x]) for x in T.elements) < 1e-12

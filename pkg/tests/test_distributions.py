import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posetruns.distributions import (
    Pdf,
    check_expected_downset,
    pdf_from_upf_tree,
    rate_function,
    total_variation,
    upf_from_pdf,
)
from posetruns.errors import NegativeMass, NotATree, TailTooLarge
from posetruns.families import chain_poset
from posetruns.poset import tree_poset
from support import diamond, random_tree, random_tree_pdf

DIAMOND_PDF = Pdf({"e": 0.1, "a": 0.2, "b": 0.3, "t": 0.4})


def test_upf_on_diamond():
    F = upf_from_pdf(DIAMOND_PDF, diamond())
    assert F["e"] == pytest.approx(1.0, abs=1e-15)
    assert F["a"] == pytest.approx(0.6)
    assert F["b"] == pytest.approx(0.7)
    assert F["t"] == pytest.approx(0.4)
    assert F.is_monotone(diamond())


def test_upf_flags_missing_support():
    F = upf_from_pdf(Pdf({"e": 0.5, "t": 0.5}), diamond())
    assert "not_full_support" in F.flags


def test_tree_inversion_round_trip():
    T, _ = random_tree(random.Random(3), 12)
    pdf = Pdf(random_tree_pdf(random.Random(4), 12))
    back = pdf_from_upf_tree(upf_from_pdf(pdf, T), T)
    assert max(abs(back[x] - pdf[x]) for x in T.elements) < 1e-12


def test_tree_inversion_errors():
    with pytest.raises(NotATree):
        pdf_from_upf_tree({"e": 1, "a": 0.5, "b": 0.5, "t": 0.2}, diamond())
    T = tree_poset({"e": ["a"], "a": ["c"]})
    with pytest.raises(NegativeMass):
        pdf_from_upf_tree({"e": 1, "a": 0.5, "c": 0.7}, T)


def test_tail_too_large():
    chain = chain_poset()
    pdf = Pdf({n: 0.5 ** (n + 1) for n in range(60)})
    with pytest.raises(TailTooLarge):
        upf_from_pdf(pdf, chain, depth=5, accuracy=1e-6)
    F = upf_from_pdf(pdf, chain, depth=50, accuracy=1e-6)
    assert F.tail < 1e-6


def test_geometric_chain_has_constant_rate():
    chain = chain_poset()
    pdf = Pdf({n: 0.5 ** (n + 1) for n in range(80)}, tail=0.5 ** 80)
    r = rate_function(pdf, chain, depth=79)
    assert r.constant
    assert r.rate == pytest.approx(0.5)


def test_diamond_rate_not_constant():
    assert not rate_function(DIAMOND_PDF, diamond()).constant


def test_expected_downset_identity_on_diamond():
    chk = check_expected_downset(DIAMOND_PDF, diamond())
    # E[#{t <= X}] = 0.1*1 + 0.2*2 + 0.3*2 + 0.4*4
    assert chk.rhs == pytest.approx(2.7)
    assert chk.difference < 1e-12


def test_total_variation():
    assert total_variation({"a": 1}, {"b": 1}) == 1
    assert total_variation({"a": 0.5, "b": 0.5}, {"a": 0.5, "b": 0.5}) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 20))
def test_upf_is_monotone_on_random_trees(seed, n):
    T, _ = random_tree(random.Random(seed), n)
    F = upf_from_pdf(Pdf(random_tree_pdf(random.Random(seed + 1), n)), T)
    assert F.is_monotone(T, atol=1e-15)
    assert F[0] == pytest.approx(1.0, abs=1e-12)

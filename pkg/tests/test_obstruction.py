import itertools
from math import gcd

import pytest
from hypothesis import given, strategies as st

from lefsum import obstruction as ob
from lefsum.errors import PreconditionError


def test_quintic_case():
    v = ob.extension_obstructed(2, 1, 2, genus=6)
    assert v.obstructed and v.verdict == ob.OBSTRUCTED
    assert (v.div_untwisted, v.div_twisted) == (2, 1)


def test_inconclusive_is_never_extends():
    v = ob.extension_obstructed(2, 2, 2)
    assert not v.obstructed and v.verdict == ob.INCONCLUSIVE
    assert "extends" not in v.verdict.replace("may extend", "")


@given(st.integers(1, 8), st.integers(0, 8), st.integers(1, 6))
def test_criterion_grid(d, a, n):
    v = ob.extension_obstructed(d, a, n)
    assert v.obstructed == (a * (n - 1) % d != 0)
    if v.obstructed:
        assert v.div_untwisted != v.div_twisted
        m = v.witness_m
        assert v.div_untwisted == gcd(m + n - 2, d)


def test_witness_separates_exactly_when_obstructed():
    for d, a, n in itertools.product(range(0, 9), range(0, 9), range(1, 7)):
        genera = [None] + [g for g in range(1, 10) if ob.divides(d, 2 * g - 2)][:3]
        for g in genera:
            v = ob.extension_obstructed(d, a, n, g)
            assert v.obstructed == (v.div_untwisted != v.div_twisted), (d, a, n, g)


@given(st.integers(0, 8), st.integers(1, 8))
def test_elliptic_specialization(a, n):
    v = ob.extension_obstructed(0, a, n)
    assert v.obstructed == (a != 0 and n != 1)


def test_witness_with_genus():
    # g = 3 has 2g-2 = 4; d must divide it
    v = ob.extension_obstructed(4, 1, 2, genus=3)
    assert v.obstructed and v.div_untwisted != v.div_twisted
    with pytest.raises(PreconditionError, match="divide"):
        ob.extension_obstructed(3, 1, 2, genus=3)


def test_bad_inputs():
    with pytest.raises(PreconditionError):
        ob.extension_obstructed(-1, 1, 2)
    with pytest.raises(PreconditionError):
        ob.extension_obstructed(2, 1, 0)
    with pytest.raises(PreconditionError):
        ob.divides(-2, 4)


def test_pencil_examples():
    p = ob.choose_pencil_params(3, 5, 10)
    assert (p.s, p.k) == (6, 11)
    p = ob.choose_pencil_params(4, 4, 7)
    assert (p.s, p.k) == (4, 7)
    p = ob.choose_pencil_params(1, 3, 9)
    assert (p.s, p.k) == (3, 9)


@given(st.integers(1, 12), st.integers(1, 40), st.integers(1, 40))
def test_pencil_params_minimal(d, s0, k0):
    p = ob.choose_pencil_params(d, s0, k0)
    assert p.s % d == 0 and (p.k + 1) % d == 0
    assert s0 <= p.s < s0 + d and k0 <= p.k < k0 + d


def test_pencil_with_surface_data():
    p = ob.choose_pencil_params(2, 1, 1, surface=(5, 5, 5))
    assert (p.s, p.k, p.genus, p.degree) == (2, 1, 31, 45)
    assert (2 * p.genus - 2) % 2 == 0


def test_ample_threshold():
    assert ob.ample_threshold(5, 5, 5) == 1
    assert ob.ample_threshold(-100, 0, 1) == 11
    assert ob.ample_threshold(1, 0, 1) == 1
    with pytest.raises(PreconditionError):
        ob.ample_threshold(1, 0, 0)


@given(st.integers(-50, 50), st.integers(0, 10), st.integers(1, 10))
def test_ample_threshold_is_least(K2, KL, L2):
    s = ob.ample_threshold(K2, KL, L2)
    assert K2 + 2 * s * KL + s * s * L2 > 0
    if s > 1:
        assert K2 + 2 * (s - 1) * KL + (s - 1) ** 2 * L2 <= 0


def test_section_genus():
    assert ob.section_genus(5, 5, 5, 1, 1) == 16
    with pytest.raises(PreconditionError, match="k must be positive"):
        ob.section_genus(5, 5, 5, 1, 0)

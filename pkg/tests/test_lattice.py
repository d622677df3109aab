import itertools
import random

import pytest
import sympy
from hypothesis import given, strategies as st

from lefsum import lattice as lat
from lefsum.errors import LatticeError, UnclassifiedFormError
from lefsum.lattice import IntegralLattice
from lefsum.manifold import random_unimodular

from oracles import brute_divisibility, charpoly_signature, sympy_det


@st.composite
def symmetric_grams(draw, max_rank=6, bound=4):
    n = draw(st.integers(1, max_rank))
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = draw(st.integers(-bound, bound))
    return g


GENERATORS = {
    "+1": lat.diagonal([1]),
    "-1": lat.diagonal([-1]),
    "H": lat.hyperbolic(),
    "E8+": lat.e8(1),
    "E8-": lat.e8(-1),
}


@st.composite
def unimodular_lattices(draw, max_rank=10, scramble=True):
    names = draw(st.lists(st.sampled_from(sorted(GENERATORS)), min_size=1, max_size=4))
    blocks = [GENERATORS[n] for n in names]
    while sum(b.rank for b in blocks) > max_rank:
        blocks.pop()
    if not blocks:
        blocks = [GENERATORS["H"]]
    L = lat.direct_sum(*blocks)
    if scramble:
        cols, _ = random_unimodular(L.rank, random.Random(draw(st.integers(0, 10**6))))
        L = lat.change_basis(L, cols)
    return L


def test_egcd_small_grid():
    for a, b in itertools.product(range(-12, 13), repeat=2):
        g, x, y = lat.egcd(a, b)
        assert g >= 0 and a * x + b * y == g
        assert g == sympy.igcd(a, b)


def test_named_forms():
    E = lat.e8(1)
    assert lat.determinant(E) == 1
    assert lat.signature(E) == (8, 0, 0)
    assert lat.parity(E) == "even"
    assert lat.signature(lat.e8(-1)) == (0, 8, 0)
    assert lat.determinant(lat.hyperbolic()) == -1
    assert lat.signature(lat.hyperbolic()) == (1, 1, 0)


def test_rejects_asymmetric_gram():
    with pytest.raises(LatticeError):
        IntegralLattice([[1, 2], [0, 1]])
    with pytest.raises(LatticeError):
        IntegralLattice([[1, 2]])


def test_vectors_from_different_lattices_do_not_mix():
    a = lat.diagonal([1, 1]).vector([1, 0])
    b = lat.hyperbolic().vector([1, 0])
    with pytest.raises(LatticeError):
        a + b
    with pytest.raises(LatticeError):
        a @ b


def test_vector_arithmetic():
    L = lat.hyperbolic()
    u, v = L.basis()
    assert (u + v).square() == 2
    assert (u - v).square() == -2
    assert (3 * u) @ v == 3
    assert (-u).coords == (-1, 0)
    assert L.zero().is_zero()


@given(symmetric_grams())
def test_signature_matches_characteristic_polynomial(g):
    assert lat.signature(IntegralLattice(g)) == charpoly_signature(g)


@given(symmetric_grams(max_rank=5, bound=6))
def test_determinant_matches_sympy(g):
    assert lat.determinant(IntegralLattice(g)) == sympy_det(g)


@given(symmetric_grams(max_rank=4), symmetric_grams(max_rank=4))
def test_signature_additive(g1, g2):
    A, B = IntegralLattice(g1), IntegralLattice(g2)
    s = lat.signature(lat.direct_sum(A, B))
    a, b = lat.signature(A), lat.signature(B)
    assert s == tuple(x + y for x, y in zip(a, b))


@given(symmetric_grams())
def test_negation_swaps_signature(g):
    p, q, z = lat.signature(IntegralLattice(g))
    assert lat.signature(lat.negate(IntegralLattice(g))) == (q, p, z)


@given(unimodular_lattices(max_rank=4), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_divisibility_matches_brute_force(L, coords):
    v = L.vector(coords[: L.rank])
    assert lat.divisibility(L, v) == brute_divisibility(L.gram, v.coords)


@given(unimodular_lattices(scramble=False), st.integers(0, 10**6), st.data())
def test_divisibility_and_characteristic_are_basis_free(L, seed, data):
    coords = data.draw(st.lists(st.integers(-6, 6), min_size=L.rank, max_size=L.rank))
    cols, inv = random_unimodular(L.rank, random.Random(seed))
    L2 = lat.change_basis(L, cols)
    # old coordinates c become new coordinates inv·c
    new = [sum(inv[i][j] * coords[j] for j in range(L.rank)) for i in range(L.rank)]
    v, w = L.vector(coords), L2.vector(new)
    assert v.square() == w.square()
    assert lat.divisibility(L, v) == lat.divisibility(L2, w)
    assert lat.is_characteristic(L, v) == lat.is_characteristic(L2, w)
    assert lat.signature(L) == lat.signature(L2)
    assert lat.parity(L) == lat.parity(L2)


@given(unimodular_lattices())
def test_solve_gram(L):
    rhs = list(range(1, L.rank + 1))
    c = lat.solve_gram(L, rhs)
    assert L.apply(c) == rhs


@given(st.lists(st.lists(st.integers(-4, 4), min_size=5, max_size=5), min_size=1, max_size=3))
def test_integer_kernel(rows):
    ker = lat.integer_kernel(rows, 5)
    for v in ker:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
    assert len(ker) == 5 - sympy.Matrix(rows).rank()
    if ker:
        # a Z-basis of a saturated sublattice: the maximal minors have gcd 1
        K = sympy.Matrix(ker)
        minors = [K.extract(list(range(len(ker))), list(c)).det()
                  for c in itertools.combinations(range(5), len(ker))]
        assert lat.gcd_all(int(m) for m in minors) == 1


def test_integer_kernel_keeps_zero_columns_in_order():
    assert lat.integer_kernel([[0, 1, 0]], 3) == [[1, 0, 0], [0, 0, 1]]


@given(unimodular_lattices(max_rank=10), st.data())
def test_complement_of_hyperbolic_pair(L, data):
    # adjoin an H summand and split it off again
    X = lat.direct_sum(L, lat.hyperbolic())
    cols, _ = random_unimodular(X.rank, random.Random(data.draw(st.integers(0, 10**6))))
    Y = lat.change_basis(X, cols)
    # coordinates of the H basis vectors in the new basis
    e, f = X.basis_vector(X.rank - 2), X.basis_vector(X.rank - 1)
    ye = Y.vector(lat.solve_gram(Y, [sum(c[i] * x for i, x in enumerate(X.apply(e.coords))) for c in cols]))
    yf = Y.vector(lat.solve_gram(Y, [sum(c[i] * x for i, x in enumerate(X.apply(f.coords))) for c in cols]))
    assert ye @ yf == 1 and ye.square() == 0
    P = lat.orthogonal_complement(Y, [ye, yf])
    assert len(P) == Y.rank - 2
    assert all(p @ ye == 0 and p @ yf == 0 for p in P)
    PG = lat.change_basis(Y, [p.coords for p in P])
    assert lat.determinant(Y) == lat.determinant(PG) * -1
    assert lat.signature(PG) == lat.signature(L)


def test_complement_rejects_non_unit_span():
    L = lat.direct_sum(lat.hyperbolic(), lat.diagonal([1, -1]))
    v = L.vector([1, 1, 0, 0])  # square 2
    with pytest.raises(LatticeError):
        lat.orthogonal_complement(L, [v])
    with pytest.raises(LatticeError):
        lat.orthogonal_complement(L, [v, 2 * v])
    with pytest.raises(LatticeError):
        lat.orthogonal_complement(lat.diagonal([2, 1]), [lat.diagonal([2, 1]).vector([0, 1])])


def test_classify_round_trip_all_small_combos():
    seen = 0
    for p, q, h, ep, em in itertools.product(range(13), range(13), range(7), range(2), range(2)):
        if ep and em:
            continue  # E8 ⊕ E8(-1) is not in normal form; covered by the hyperbolic count
        rank = p + q + 2 * h + 8 * (ep + em)
        if rank == 0 or rank > 12:
            continue
        blocks = [lat.diagonal([1])] * p + [lat.diagonal([-1])] * q + [lat.hyperbolic()] * h
        blocks += [lat.e8(1)] * ep + [lat.e8(-1)] * em
        L = lat.direct_sum(*blocks)
        pos, neg, _ = lat.signature(L)
        if pos == 0 or neg == 0:
            with pytest.raises(UnclassifiedFormError):
                lat.classify_indefinite_unimodular(L)
            continue
        d = lat.classify_indefinite_unimodular(L)
        seen += 1
        assert (d.rank, d.signature) == (rank, p - q + 8 * (ep - em))
        if p or q:
            assert d.parity == "odd" and (d.plus, d.minus) == (pos, neg)
        else:
            assert d.parity == "even"
            assert d.e8_count == ep + em and d.hyperbolic == h
        # rebuilding from the descriptor gives a form with the same invariants
        if d.parity == "odd":
            R = lat.diagonal([1] * d.plus + [-1] * d.minus)
        else:
            R = lat.direct_sum(*[lat.e8(d.e8_sign)] * d.e8_count, *[lat.hyperbolic()] * d.hyperbolic)
        assert lat.signature(R) == lat.signature(L) and lat.parity(R) == lat.parity(L)
    assert seen > 50


def test_descriptor_strings():
    assert lat.describe_form(22, -16, "even").decomposition == "2·E8(−1) ⊕ 3·H"
    assert lat.describe_form(10, -8, "odd").decomposition == "⟨1⟩ ⊕ 9⟨−1⟩"
    assert lat.describe_form(2, 0, "even").decomposition == "H"


def test_classify_rejects_definite_and_degenerate():
    with pytest.raises(UnclassifiedFormError):
        lat.classify_indefinite_unimodular(lat.e8(1))
    with pytest.raises(UnclassifiedFormError):
        lat.classify_indefinite_unimodular(IntegralLattice([[0, 0], [0, 1]]))
    with pytest.raises(UnclassifiedFormError):
        lat.classify_indefinite_unimodular(IntegralLattice([[2, 1], [1, -2]]))


def test_divisibility_needs_unimodular():
    L = lat.diagonal([2, -1])
    with pytest.raises(LatticeError):
        lat.divisibility(L, L.vector([1, 0]))


def test_direct_sum_keeps_blocks():
    L = lat.direct_sum(lat.e8(-1), lat.hyperbolic(), lat.diagonal([1, -1]))
    assert L == IntegralLattice(L.gram)
    assert [len(c) for c in L.components] == [8, 2, 1, 1]
    assert L.sparse_rows == IntegralLattice(L.gram).sparse_rows

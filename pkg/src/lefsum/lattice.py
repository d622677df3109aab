"""Exact arithmetic for integral symmetric bilinear forms.

Everything here works over arbitrary-precision Python integers; the only
rationals appear inside the congruence diagonalization used for signatures
(:class:`fractions.Fraction`).

Large Gram matrices built by fibre sums are block diagonal, so signatures,
determinants and Gram solves are computed per connected block and cached
by the block's entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from math import gcd
from typing import Iterable, Sequence

from .errors import LatticeError, UnclassifiedFormError

Gram = tuple[tuple[int, ...], ...]


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def gcd_all(values: Iterable[int]) -> int:
    return reduce(gcd, values, 0)


def _as_gram(rows: Sequence[Sequence[int]]) -> Gram:
    gram = tuple(tuple(int(x) for x in row) for row in rows)
    n = len(gram)
    for i, row in enumerate(gram):
        if len(row) != n:
            raise LatticeError(f"Gram row {i} has length {len(row)}, expected {n}")
    for i in range(n):
        for j in range(i + 1, n):
            if gram[i][j] != gram[j][i]:
                raise LatticeError(f"Gram matrix not symmetric at ({i}, {j})")
    return gram


@dataclass(frozen=True, eq=False)
class IntegralLattice:
    """A free abelian group with a symmetric integer pairing given by ``gram``."""

    gram: Gram
    label: str = ""

    def __init__(self, gram: Sequence[Sequence[int]], label: str = ""):
        object.__setattr__(self, "gram", _as_gram(gram))
        object.__setattr__(self, "label", label)

    @classmethod
    def _trusted(cls, gram: Gram, label: str = "", **cached) -> IntegralLattice:
        # skips validation; ``cached`` pre-fills cached properties
        obj = object.__new__(cls)
        object.__setattr__(obj, "gram", gram)
        object.__setattr__(obj, "label", label)
        for key, value in cached.items():
            object.__setattr__(obj, key, value)
        return obj

    @property
    def rank(self) -> int:
        return len(self.gram)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, IntegralLattice):
            return NotImplemented
        return self._hash == other._hash and self.gram == other.gram

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash(self.gram)

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"<IntegralLattice{name} rank={self.rank}>"

    @cached_property
    def sparse_rows(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        return tuple(
            tuple((j, x) for j, x in enumerate(row) if x) for row in self.gram
        )

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Index sets of the connected blocks of the Gram matrix, in order."""
        parent = list(range(self.rank))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i, row in enumerate(self.sparse_rows):
            for j, _ in row:
                if j > i:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
        groups: dict[int, list[int]] = {}
        for i in range(self.rank):
            groups.setdefault(find(i), []).append(i)
        return tuple(tuple(g) for _, g in sorted(groups.items()))

    def block(self, indices: Sequence[int]) -> Gram:
        pos = {j: t for t, j in enumerate(indices)}
        out = []
        for i in indices:
            row = [0] * len(pos)
            for j, x in self.sparse_rows[i]:
                t = pos.get(j)
                if t is not None:
                    row[t] = x
            out.append(tuple(row))
        return tuple(out)

    def vector(self, coords: Sequence[int]) -> LatticeVector:
        return LatticeVector(self, tuple(int(c) for c in coords))

    def zero(self) -> LatticeVector:
        return LatticeVector(self, (0,) * self.rank)

    def basis_vector(self, i: int) -> LatticeVector:
        coords = [0] * self.rank
        coords[i] = 1
        return LatticeVector(self, tuple(coords))

    def basis(self) -> list[LatticeVector]:
        return [self.basis_vector(i) for i in range(self.rank)]

    def apply(self, coords: Sequence[int]) -> list[int]:
        """Return ``gram @ coords`` (the pairings with each basis vector)."""
        out = []
        for row in self.sparse_rows:
            out.append(sum(x * coords[j] for j, x in row))
        return out


@dataclass(frozen=True)
class LatticeVector:
    """Integer coordinates with respect to the basis of ``lattice``."""

    lattice: IntegralLattice = field(repr=False)
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise LatticeError(
                f"vector of length {len(self.coords)} in lattice of rank {self.lattice.rank}"
            )

    def _check(self, other: LatticeVector) -> None:
        if not isinstance(other, LatticeVector):
            raise TypeError(f"expected LatticeVector, got {type(other).__name__}")
        if other.lattice is not self.lattice and other.lattice != self.lattice:
            raise LatticeError("vectors live in different lattices")

    def __add__(self, other: LatticeVector) -> LatticeVector:
        self._check(other)
        return LatticeVector(self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: LatticeVector) -> LatticeVector:
        self._check(other)
        return LatticeVector(self.lattice, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> LatticeVector:
        return LatticeVector(self.lattice, tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> LatticeVector:
        if not isinstance(k, int):
            return NotImplemented
        return LatticeVector(self.lattice, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __matmul__(self, other: LatticeVector) -> int:
        return pair(self, other)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def square(self) -> int:
        return pair(self, self)


def sum_vectors(vectors: Iterable[LatticeVector], lattice: IntegralLattice) -> LatticeVector:
    total = lattice.zero()
    for v in vectors:
        total = total + v
    return total


# ---------------------------------------------------------------------------
# constructors

def diagonal(entries: Sequence[int], label: str = "") -> IntegralLattice:
    n = len(entries)
    return IntegralLattice(
        [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], label
    )


def hyperbolic() -> IntegralLattice:
    return IntegralLattice([[0, 1], [1, 0]], "H")


def e8(sign: int = 1) -> IntegralLattice:
    """Cartan matrix of E8 scaled by ``sign`` (+1 positive definite)."""
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)]
    g = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in edges:
        g[i][j] = g[j][i] = -1
    return IntegralLattice([[sign * x for x in row] for row in g], f"E8({sign:+d})")


def direct_sum(*lattices: IntegralLattice, label: str = "") -> IntegralLattice:
    """Orthogonal direct sum; the Gram matrix is block diagonal."""
    n = sum(L.rank for L in lattices)
    rows: list[tuple[int, ...]] = []
    sparse: list[tuple[tuple[int, int], ...]] = []
    comps: list[tuple[int, ...]] = []
    offset = 0
    for L in lattices:
        pad_r = (0,) * (n - offset - L.rank)
        pad_l = (0,) * offset
        for row, srow in zip(L.gram, L.sparse_rows):
            rows.append(pad_l + row + pad_r)
            sparse.append(tuple((j + offset, x) for j, x in srow))
        comps += [tuple(i + offset for i in c) for c in L.components]
        offset += L.rank
    return IntegralLattice._trusted(
        tuple(rows), label, sparse_rows=tuple(sparse), components=tuple(comps)
    )


def negate(L: IntegralLattice) -> IntegralLattice:
    return IntegralLattice([[-x for x in row] for row in L.gram], L.label and f"-{L.label}")


def change_basis(L: IntegralLattice, columns: Sequence[Sequence[int]]) -> IntegralLattice:
    """Gram matrix of the vectors whose old coordinates are ``columns``."""
    supports = [[(i, x) for i, x in enumerate(c) if x] for c in columns]
    if all(len(s) == 1 and s[0][1] == 1 for s in supports):
        return IntegralLattice(L.block([s[0][0] for s in supports]))
    images = [L.apply(c) for c in columns]
    return IntegralLattice(
        [[sum(x * img[i] for i, x in sup) for img in images] for sup in supports]
    )


# ---------------------------------------------------------------------------
# pairing, parity, characteristic vectors

def pair(v: LatticeVector, w: LatticeVector) -> int:
    v._check(w)
    total = 0
    wc = w.coords
    for i, row in enumerate(v.lattice.sparse_rows):
        vi = v.coords[i]
        if vi:
            total += vi * sum(x * wc[j] for j, x in row)
    return total


def parity(L: IntegralLattice) -> str:
    return "even" if all(L.gram[i][i] % 2 == 0 for i in range(L.rank)) else "odd"


def is_characteristic(L: IntegralLattice, k: LatticeVector) -> bool:
    if k.lattice is not L and k.lattice != L:
        raise LatticeError("vector does not belong to this lattice")
    qk = L.apply(k.coords)
    return all((qk[i] - L.gram[i][i]) % 2 == 0 for i in range(L.rank))


# ---------------------------------------------------------------------------
# signature and determinant (per connected block, cached)

@lru_cache(maxsize=512)
def _block_signature(gram: Gram) -> tuple[int, int, int]:
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    pos = neg = zero = 0
    k = 0
    while k < n:
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            off = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0),
                None,
            )
            if off is None:
                zero += n - k
                break
            i, j = off
            # e_i <- e_i + e_j; new diagonal entry is 2*a[i][j] since both diagonals vanish
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            piv = i
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            for row in a:
                row[k], row[piv] = row[piv], row[k]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        rk = a[k]
        for r in range(k + 1, n):
            f = a[r][k] / p
            if f:
                row = a[r]
                for t in range(k, n):
                    row[t] -= f * rk[t]
        for r in range(k + 1, n):
            a[r][k] = a[k][r] = Fraction(0)
        k += 1
    return pos, neg, zero


@lru_cache(maxsize=512)
def _block_det(gram: Gram) -> int:
    # Bareiss fraction-free elimination
    n = len(gram)
    if n == 0:
        return 1
    m = [list(row) for row in gram]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def signature(L: IntegralLattice) -> tuple[int, int, int]:
    """Return ``(b_plus, b_minus, b_zero)`` by exact congruence diagonalization."""
    pos = neg = zero = 0
    for comp in L.components:
        p, q, z = _block_signature(L.block(comp))
        pos, neg, zero = pos + p, neg + q, zero + z
    return pos, neg, zero


def signature_value(L: IntegralLattice) -> int:
    p, q, _ = signature(L)
    return p - q


def determinant(L: IntegralLattice) -> int:
    det = 1
    for comp in L.components:
        det *= _block_det(L.block(comp))
        if det == 0:
            return 0
    # reordering basis vectors into blocks is a congruence by a permutation matrix
    return det


def determinant_and_unimodularity(L: IntegralLattice) -> tuple[int, bool]:
    det = determinant(L)
    return det, det in (1, -1)


def is_unimodular(L: IntegralLattice) -> bool:
    return determinant_and_unimodularity(L)[1]


# ---------------------------------------------------------------------------
# solving with unimodular Gram matrices

@lru_cache(maxsize=256)
def _block_inverse(gram: Gram) -> Gram:
    # Integer row reduction of [A | I]; a unimodular A reduces to the identity.
    n = len(gram)
    rows = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(gram)]
    for k in range(n):
        while True:
            live = [i for i in range(k, n) if rows[i][k] != 0]
            if not live:
                raise LatticeError("singular Gram block")
            piv = min(live, key=lambda i: abs(rows[i][k]))
            rows[k], rows[piv] = rows[piv], rows[k]
            p = rows[k][k]
            done = True
            for i in range(k + 1, n):
                x = rows[i][k]
                if x:
                    q = x // p
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[k])]
                    if rows[i][k]:
                        done = False
            if done:
                break
        if rows[k][k] not in (1, -1):
            raise LatticeError("Gram block is not unimodular")
        if rows[k][k] == -1:
            rows[k] = [-a for a in rows[k]]
    for k in range(n - 1, -1, -1):
        for i in range(k):
            x = rows[i][k]
            if x:
                rows[i] = [a - x * b for a, b in zip(rows[i], rows[k])]
    return tuple(tuple(row[n:]) for row in rows)


def solve_gram(L: IntegralLattice, rhs: Sequence[int]) -> list[int]:
    """Return integer ``c`` with ``gram @ c == rhs``; ``L`` must be unimodular."""
    out = [0] * L.rank
    for comp in L.components:
        inv = _block_inverse(L.block(comp))
        sub = [rhs[i] for i in comp]
        for row, i in zip(inv, comp):
            out[i] = sum(x * y for x, y in zip(row, sub))
    return out


# ---------------------------------------------------------------------------
# divisibility, kernels, complements

def divisibility(L: IntegralLattice, v: LatticeVector) -> int:
    """gcd of ``pair(v, w)`` over all ``w``; 0 exactly for ``v == 0``."""
    if v.lattice is not L and v.lattice != L:
        raise LatticeError("vector does not belong to this lattice")
    if not is_unimodular(L):
        raise LatticeError("divisibility via basis pairings needs a unimodular lattice")
    return gcd_all(L.apply(v.coords))


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Z-basis of ``{x in Z^n : A x = 0}`` by unimodular column operations.

    Columns of ``A`` that are zero throughout are returned untouched as unit
    vectors, and kernel vectors are listed in the order of their column index.
    """
    work = [list(r) for r in rows]
    cols = [[int(i == j) for i in range(n)] for j in range(n)]  # cols[j] = column j of U
    pivots: set[int] = set()
    for r in range(len(work)):
        row = work[r]
        live = [c for c in range(n) if c not in pivots and row[c] != 0]
        if not live:
            continue
        p = live[0]
        for c in live[1:]:
            a, b = row[p], row[c]
            g, x, y = egcd(a, b)
            ag, bg = a // g, b // g
            new_p = [x * u + y * w for u, w in zip(cols[p], cols[c])]
            new_c = [bg * u - ag * w for u, w in zip(cols[p], cols[c])]
            cols[p], cols[c] = new_p, new_c
            for rr in work:
                up, uc = rr[p], rr[c]
                rr[p], rr[c] = x * up + y * uc, bg * up - ag * uc
        pivots.add(p)
    return [cols[j] for j in range(n) if j not in pivots]


def orthogonal_complement(L: IntegralLattice, span: Sequence[LatticeVector]) -> list[LatticeVector]:
    """Integer basis of the vectors pairing to zero with every vector of ``span``."""
    if not is_unimodular(L):
        raise LatticeError("orthogonal complement requires a unimodular lattice")
    for s in span:
        if s.lattice is not L and s.lattice != L:
            raise LatticeError("span vector does not belong to this lattice")
    span_gram = IntegralLattice([[pair(s, t) for t in span] for s in span])
    det = determinant(span_gram)
    if det == 0:
        raise LatticeError("span vectors are dependent or span a degenerate sublattice")
    if det not in (1, -1):
        raise LatticeError(f"span Gram determinant {det} is not a unit; no orthogonal splitting over Z")
    pairing_rows = [L.apply(s.coords) for s in span]
    kernel = integer_kernel(pairing_rows, L.rank)
    if len(kernel) != L.rank - len(span):
        raise LatticeError("complement has unexpected rank")
    return [L.vector(c) for c in kernel]


# ---------------------------------------------------------------------------
# classification of indefinite unimodular forms

@dataclass(frozen=True)
class FormDescriptor:
    parity: str
    rank: int
    signature: int
    decomposition: str
    plus: int = 0          # copies of <1>
    minus: int = 0         # copies of <-1>
    e8_count: int = 0
    e8_sign: int = 0
    hyperbolic: int = 0


def _term(count: int, symbol: str, dot: bool) -> str:
    if count == 1:
        return symbol
    return f"{count}·{symbol}" if dot else f"{count}{symbol}"


def describe_form(rank: int, sig: int, par: str) -> FormDescriptor:
    """Descriptor for the indefinite unimodular form with these invariants."""
    if par == "odd":
        p, q = (rank + sig) // 2, (rank - sig) // 2
        text = " ⊕ ".join(
            _term(c, s, False) for c, s in ((p, "⟨1⟩"), (q, "⟨−1⟩")) if c
        )
        return FormDescriptor(par, rank, sig, text, plus=p, minus=q)
    if sig % 8:
        raise LatticeError(f"even unimodular form with signature {sig} not divisible by 8")
    a = abs(sig) // 8
    b = (rank - 8 * a) // 2
    eps = -1 if sig < 0 else 1
    e8_sym = "E8(−1)" if eps < 0 else "E8(1)"
    text = " ⊕ ".join(
        _term(c, s, True) for c, s in ((a, e8_sym), (b, "H")) if c
    )
    return FormDescriptor(par, rank, sig, text, e8_count=a, e8_sign=eps if a else 0, hyperbolic=b)


def classify_indefinite_unimodular(L: IntegralLattice) -> FormDescriptor:
    pos, neg, zero = signature(L)
    if zero or not is_unimodular(L):
        raise UnclassifiedFormError("unclassified definite/degenerate form: not unimodular")
    if pos == 0 or neg == 0:
        raise UnclassifiedFormError("unclassified definite/degenerate form: definite")
    return describe_form(L.rank, pos - neg, parity(L))

"""Generalized fibre sums in normal form.

The lattice of ``X = M #_Σ N`` is assembled in the fixed basis order

    [P(M) | P(N) | S_1 R_1 ... S_c R_c | B_X Σ_X]

where ``P(·)`` is the orthogonal complement of ``{B, Σ}``.  Only
simply-connected summands are supported, so the number of vanishing-class /
rim-torus pairs is always ``c = 2g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence, Union

from . import lattice as lat
from .errors import PreconditionError
from .lattice import IntegralLattice, LatticeVector
from .manifold import Fibred4Manifold


@dataclass(frozen=True)
class GluingClass:
    """The integers ``a_i = <C, α_i>`` against a basis of ``H_1(Σ)``."""

    a: tuple[int, ...]

    def __init__(self, a: Sequence[int]):
        object.__setattr__(self, "a", tuple(int(x) for x in a))

    @classmethod
    def zero(cls, genus: int) -> GluingClass:
        return cls((0,) * (2 * genus))

    @property
    def divisibility(self) -> int:
        return lat.gcd_all(self.a)

    def check_genus(self, genus: int) -> None:
        if len(self.a) != 2 * genus:
            raise PreconditionError(
                f"gluing class has {len(self.a)} entries, expected 2g = {2 * genus}"
            )


@dataclass(frozen=True, eq=False)
class Splitting:
    """``H_2(M) = P(M) ⊕ span(B, Σ)`` with an explicit basis of ``P(M)``."""

    manifold: Fibred4Manifold
    basis: tuple[LatticeVector, ...]
    gram: IntegralLattice

    def coordinates(self, v: LatticeVector) -> tuple[tuple[int, ...], int, int]:
        """Return ``(p, b, beta)`` with ``v = p + b·B + beta·Σ``."""
        M = self.manifold
        b = v @ M.fibre
        beta = v @ M.section - b * (M.section @ M.section)
        qv = M.lattice.apply(v.coords)
        if self.unit_positions is not None:
            rhs = [qv[i] for i in self.unit_positions]
        else:
            rhs = [sum(c * qv[i] for i, c in enumerate(u.coords) if c) for u in self.basis]
        return tuple(lat.solve_gram(self.gram, rhs)), b, beta

    def embed(self, p: Sequence[int]) -> LatticeVector:
        L = self.manifold.lattice
        out = [0] * L.rank
        for c, u in zip(p, self.basis):
            if c:
                for i, x in enumerate(u.coords):
                    if x:
                        out[i] += c * x
        return L.vector(out)

    @cached_property
    def unit_positions(self) -> tuple[int, ...] | None:
        """Positions of the basis vectors if each is a standard unit vector."""
        out = []
        for u in self.basis:
            hits = [(i, x) for i, x in enumerate(u.coords) if x]
            if len(hits) != 1 or hits[0][1] != 1:
                return None
            out.append(hits[0][0])
        return tuple(out)

    def is_unit_basis(self) -> bool:
        return self.unit_positions is not None


@lru_cache(maxsize=64)
def splitting(M: Fibred4Manifold) -> Splitting:
    basis = lat.orthogonal_complement(M.lattice, [M.section, M.fibre])
    gram = lat.change_basis(M.lattice, [u.coords for u in basis])
    return Splitting(M, tuple(basis), gram)


@dataclass(frozen=True)
class FibreSumResult:
    manifold: Fibred4Manifold
    labels: tuple[str, ...]
    summand_count: int
    gluing: GluingClass | None
    S_squares: tuple[int, ...]
    split_M: Splitting | None = field(default=None, repr=False, compare=False)
    split_N: Splitting | None = field(default=None, repr=False, compare=False)
    # positions of the copies of the base P(M_i) and of all (S, R) pairs, nested sums included
    p_blocks: tuple[tuple[int, int], ...] = ()
    sr_pairs: tuple[tuple[int, int], ...] = ()
    canonical_data: object = field(default=None, repr=False, compare=False)

    @cached_property
    def b_index(self) -> int:
        return self.labels.index("B")

    @cached_property
    def sigma_index(self) -> int:
        return self.labels.index("Sigma")

    def indices(self, role: str) -> list[int]:
        return [i for i, t in enumerate(self.labels) if t.split(":")[0] == role]

    @cached_property
    def s_indices(self) -> list[int]:
        return self.indices("S")

    @cached_property
    def r_indices(self) -> list[int]:
        return self.indices("R")


Summand = Union[Fibred4Manifold, FibreSumResult]


def _unwrap(x: Summand) -> tuple[Fibred4Manifold, tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]:
    """Manifold plus the base-copy blocks and (S, R) pairs inside its ``P``."""
    if isinstance(x, FibreSumResult):
        if x.summand_count == 1:
            return _unwrap(x.manifold)
        split = splitting(x.manifold)
        # B and Σ are the last two basis vectors and are orthogonal to the rest, so P(X)
        # keeps the remaining basis vectors verbatim.
        assert split.is_unit_basis() and len(split.basis) == x.manifold.lattice.rank - 2
        return x.manifold, x.p_blocks, x.sr_pairs
    rank_p = x.lattice.rank - 2
    return x, ((0, rank_p),), ()


@dataclass(frozen=True)
class NormalFormLayout:
    lattice: IntegralLattice
    labels: tuple[str, ...]
    split_M: Splitting
    split_N: Splitting
    pm_range: tuple[int, int]
    pn_range: tuple[int, int]
    sr_top: tuple[tuple[int, int], ...]
    b_index: int
    sigma_index: int
    p_blocks: tuple[tuple[int, int], ...]
    sr_pairs: tuple[tuple[int, int], ...]


def normal_form_layout(M: Summand, N: Summand, S_squares: Sequence[int]) -> NormalFormLayout:
    Mm, m_blocks, m_sr = _unwrap(M)
    Nm, n_blocks, n_sr = _unwrap(N)
    if Mm.genus != Nm.genus:
        raise PreconditionError(f"genus mismatch: {Mm.genus} != {Nm.genus}")
    g = Mm.genus
    if len(S_squares) != 2 * g:
        raise PreconditionError(f"need 2g = {2 * g} vanishing-class squares, got {len(S_squares)}")
    sM, sN = splitting(Mm), splitting(Nm)
    pm, pn = sM.gram.rank, sN.gram.rank
    pieces = [sM.gram, sN.gram]
    pieces += [IntegralLattice([[s, 1], [1, 0]]) for s in S_squares]
    b_sq = Mm.section @ Mm.section + Nm.section @ Nm.section
    pieces.append(IntegralLattice([[b_sq, 1], [1, 0]]))
    L = lat.direct_sum(*pieces)
    labels = [f"PM:{j}" for j in range(pm)] + [f"PN:{j}" for j in range(pn)]
    sr_top = []
    for i in range(2 * g):
        base = pm + pn + 2 * i
        sr_top.append((base, base + 1))
        labels += [f"S:{i + 1}", f"R:{i + 1}"]
    labels += ["B", "Sigma"]
    p_blocks = m_blocks + tuple((a + pm, b + pm) for a, b in n_blocks)
    sr_pairs = m_sr + tuple((a + pm, b + pm) for a, b in n_sr) + tuple(sr_top)
    return NormalFormLayout(
        lattice=L, labels=tuple(labels), split_M=sM, split_N=sN,
        pm_range=(0, pm), pn_range=(pm, pm + pn), sr_top=tuple(sr_top),
        b_index=L.rank - 2, sigma_index=L.rank - 1,
        p_blocks=p_blocks, sr_pairs=sr_pairs,
    )


def default_s_squares(r: Sequence[int]) -> tuple[int, ...]:
    """-2 where ``r_i`` is even, -1 where odd (characteristic ``K_X`` forces ``S_i² ≡ r_i``)."""
    return tuple(-2 if x % 2 == 0 else -1 for x in r)


def generalized_fibre_sum(M: Summand, N: Summand, C: GluingClass | None = None,
                          S_squares: Sequence[int] | None = None,
                          K_X0_S: Sequence[int] | None = None,
                          name: str | None = None) -> FibreSumResult:
    """``X = M #_Σ N`` glued by ``C``, with its canonical class attached."""
    from . import canonical

    Mm, Nm = _unwrap(M)[0], _unwrap(N)[0]
    if Mm.genus != Nm.genus:
        raise PreconditionError(f"genus mismatch: {Mm.genus} != {Nm.genus}")
    g = Mm.genus
    C = C if C is not None else GluingClass.zero(g)
    C.check_genus(g)
    K_X0_S = tuple(K_X0_S) if K_X0_S is not None else (0,) * (2 * g)
    r = canonical.rim_coefficients(Mm, Nm, C, K_X0_S)
    if S_squares is None:
        S_squares = default_s_squares(r)
    S_squares = tuple(S_squares)
    for i, (s, ri) in enumerate(zip(S_squares, r)):
        if (s - ri) % 2:
            raise PreconditionError(
                f"S_{i + 1}² = {s} has the wrong parity for r_{i + 1} = {ri}; "
                "K_X would not be characteristic"
            )
    layout = normal_form_layout(M, N, S_squares)
    data = canonical.gompf_canonical(Mm, Nm, C, K_X0_S, S_squares=S_squares, layout=layout)
    L = layout.lattice
    X = Fibred4Manifold(
        name=name or f"{Mm.name}#{Nm.name}",
        euler=Mm.euler + Nm.euler + 4 * g - 4,
        sigma=Mm.sigma + Nm.sigma,
        lattice=L,
        canonical=data.K_X,
        fibre=L.basis_vector(layout.sigma_index),
        section=L.basis_vector(layout.b_index),
        genus=g,
        minimal_general_type_base=Mm.minimal_general_type_base and Nm.minimal_general_type_base,
    )
    count = (M.summand_count if isinstance(M, FibreSumResult) else 1) + (
        N.summand_count if isinstance(N, FibreSumResult) else 1
    )
    return FibreSumResult(
        manifold=X, labels=layout.labels, summand_count=count, gluing=C,
        S_squares=S_squares, split_M=layout.split_M, split_N=layout.split_N,
        p_blocks=layout.p_blocks, sr_pairs=layout.sr_pairs, canonical_data=data,
    )


@lru_cache(maxsize=64)
def iterated_fibre_sum(M: Fibred4Manifold, n: int) -> FibreSumResult:
    """``M(n)``: fold ``M(k) = M #_Σ M(k-1)`` with trivial gluing and (-2)-spheres."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    if n == 1:
        return FibreSumResult(manifold=M, labels=(), summand_count=1, gluing=None, S_squares=())
    prev = iterated_fibre_sum(M, n - 1)
    g = M.genus
    return generalized_fibre_sum(
        M, prev, GluingClass.zero(g), (-2,) * (2 * g), (0,) * (2 * g), name=f"{M.name}({n})"
    )


def twisted_sum(m: int, n: int, M: Fibred4Manifold, C: GluingClass,
                S_squares: Sequence[int] | None = None) -> FibreSumResult:
    """``M(m, n, C) = M(m) #_Σ M(n)`` glued by ``C``."""
    if m < 1 or n < 1:
        raise PreconditionError("m and n must be at least 1")
    C.check_genus(M.genus)
    return generalized_fibre_sum(
        iterated_fibre_sum(M, m), iterated_fibre_sum(M, n), C, S_squares,
        (0,) * (2 * M.genus), name=f"{M.name}({m},{n},C={list(C.a)})",
    )

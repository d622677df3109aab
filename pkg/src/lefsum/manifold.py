"""Simply-connected fibred 4-manifolds modelled by their intersection lattices.

A :class:`Fibred4Manifold` is an explicit Gram matrix together with explicit
coordinate vectors for the canonical class ``K``, the generic fibre ``Σ`` and a
section ``B``.  Algebraic surfaces before blowing up the base locus of a
pencil are :class:`AlgebraicSurfaceData`; :func:`blow_up` turns one into the
other.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from . import lattice as lat
from .errors import PreconditionError
from .lattice import FormDescriptor, IntegralLattice, LatticeVector


@dataclass(frozen=True)
class Fibred4Manifold:
    name: str
    euler: int
    sigma: int
    lattice: IntegralLattice = field(repr=False)
    canonical: LatticeVector = field(repr=False)
    fibre: LatticeVector = field(repr=False)
    section: LatticeVector = field(repr=False)
    genus: int
    exceptional: tuple[LatticeVector, ...] = field(default=(), repr=False)
    minimal_general_type_base: bool = False

    def __post_init__(self):
        self.validate()

    @property
    def b2(self) -> int:
        return self.lattice.rank

    @property
    def b2plus(self) -> int:
        return (self.lattice.rank + self.sigma) // 2

    @property
    def chi_h(self) -> int:
        """Holomorphic Euler characteristic ``(e + σ)/4``."""
        return (self.euler + self.sigma) // 4

    def validate(self) -> None:
        L = self.lattice
        for v in (self.canonical, self.fibre, self.section, *self.exceptional):
            if v.lattice is not L and v.lattice != L:
                raise PreconditionError(f"{self.name}: class not in the manifold's lattice")
        if L.rank != self.euler - 2:
            raise PreconditionError(
                f"{self.name}: rank {L.rank} != e - 2 = {self.euler - 2} (simply-connected)"
            )
        if not lat.is_unimodular(L):
            raise PreconditionError(f"{self.name}: intersection form is not unimodular")
        pos, neg, zero = lat.signature(L)
        if zero or pos - neg != self.sigma:
            raise PreconditionError(
                f"{self.name}: lattice signature {pos - neg} (b0={zero}) != sigma {self.sigma}"
            )
        if not lat.is_characteristic(L, self.canonical):
            raise PreconditionError(f"{self.name}: canonical class is not characteristic")
        if self.fibre @ self.fibre != 0:
            raise PreconditionError(f"{self.name}: fibre class has nonzero square")
        if self.fibre @ self.section != 1:
            raise PreconditionError(f"{self.name}: fibre and section do not meet once")
        if self.genus < 0 or self.canonical @ self.fibre != 2 * self.genus - 2:
            raise PreconditionError(
                f"{self.name}: adjunction fails, K·Σ = {self.canonical @ self.fibre}, "
                f"genus {self.genus}"
            )


@dataclass(frozen=True)
class AlgebraicSurfaceData:
    """An algebraic surface ``M'`` with a chosen transverse hyperplane-section class."""

    name: str
    K_squared: int
    euler: int
    lattice: IntegralLattice = field(repr=False)
    canonical: LatticeVector = field(repr=False)
    hyperplane: LatticeVector = field(repr=False)
    ample: LatticeVector | None = field(default=None, repr=False)
    minimal_general_type: bool = False
    h1_zero: bool = True

    def __post_init__(self):
        if (self.K_squared - 2 * self.euler) % 3:
            raise PreconditionError(f"{self.name}: (K² - 2e)/3 is not an integer")
        if self.canonical @ self.canonical != self.K_squared:
            raise PreconditionError(f"{self.name}: K² does not match the canonical vector")
        if self.lattice.rank != self.euler - 2:
            raise PreconditionError(f"{self.name}: rank != e - 2")
        if lat.signature_value(self.lattice) != self.sigma:
            raise PreconditionError(f"{self.name}: lattice signature != (K² - 2e)/3")
        if not lat.is_characteristic(self.lattice, self.canonical):
            raise PreconditionError(f"{self.name}: canonical class is not characteristic")
        if self.degree < 1:
            raise PreconditionError(f"{self.name}: hyperplane class must have positive square")
        if self.minimal_general_type and self.b2plus <= 1:
            raise PreconditionError(f"{self.name}: flagged general type but b2+ <= 1")

    @property
    def sigma(self) -> int:
        return (self.K_squared - 2 * self.euler) // 3

    @property
    def degree(self) -> int:
        return self.hyperplane @ self.hyperplane

    @property
    def b2plus(self) -> int:
        return (self.lattice.rank + self.sigma) // 2

    @property
    def section_genus(self) -> int:
        twice = self.degree + self.canonical @ self.hyperplane
        return 1 + twice // 2

    def with_hyperplane(self, hyperplane: LatticeVector) -> AlgebraicSurfaceData:
        return AlgebraicSurfaceData(
            self.name, self.K_squared, self.euler, self.lattice, self.canonical,
            hyperplane, self.ample, self.minimal_general_type, self.h1_zero,
        )


def blow_up(surface: AlgebraicSurfaceData, r: int, name: str | None = None,
            section_index: int = 0) -> Fibred4Manifold:
    """Blow up the ``r`` base points of the pencil through ``surface.hyperplane``.

    The section is the exceptional sphere ``E_{section_index + 1}``.
    """
    if r < 1:
        raise PreconditionError("number of blown-up points must be positive")
    if r != surface.degree:
        raise PreconditionError(
            f"r = {r} but the hyperplane section has square {surface.degree}; "
            "the proper transform would not have square 0"
        )
    if not 0 <= section_index < r:
        raise PreconditionError("section index out of range")
    base = surface.lattice
    L = lat.direct_sum(base, lat.diagonal([-1] * r))
    n0 = base.rank

    def lift(v: LatticeVector) -> LatticeVector:
        return L.vector(v.coords + (0,) * r)

    exceptional = tuple(L.basis_vector(n0 + i) for i in range(r))
    e_sum = lat.sum_vectors(exceptional, L)
    K = lift(surface.canonical) + e_sum
    fibre = lift(surface.hyperplane) - e_sum
    twice_genus_minus_two = surface.canonical @ surface.hyperplane + r
    return Fibred4Manifold(
        name=name or f"{surface.name}#{r}CP2bar",
        euler=surface.euler + r,
        sigma=surface.sigma - r,
        lattice=L,
        canonical=K,
        fibre=fibre,
        section=exceptional[section_index],
        genus=twice_genus_minus_two // 2 + 1,
        exceptional=exceptional,
        minimal_general_type_base=surface.minimal_general_type,
    )


def base_canonical(M: Fibred4Manifold) -> LatticeVector:
    """``K_{M'}`` pushed into ``M``: the canonical class minus the exceptional spheres."""
    return M.canonical - lat.sum_vectors(M.exceptional, M.lattice)


# ---------------------------------------------------------------------------
# presets

def _cp2() -> AlgebraicSurfaceData:
    L = IntegralLattice([[1]], "CP2")
    h = L.basis_vector(0)
    return AlgebraicSurfaceData(
        "CP2", K_squared=9, euler=3, lattice=L, canonical=-3 * h,
        hyperplane=3 * h, ample=h,
    )


def _quintic() -> AlgebraicSurfaceData:
    # 9<1> + 44<-1>; H has all coordinates odd so it is characteristic, H² = 45 + 4 - 44 = 5,
    # and it is primitive because some coordinate is 1.
    L = lat.diagonal([1] * 9 + [-1] * 44, "quintic")
    H = L.vector([3] * 5 + [1] * 4 + [1] * 44)
    return AlgebraicSurfaceData(
        "quintic", K_squared=5, euler=55, lattice=L, canonical=H, hyperplane=H,
        ample=H, minimal_general_type=True,
    )


PRESETS = ("E1", "quintic", "CP2")


def build_preset(name: str) -> Fibred4Manifold | AlgebraicSurfaceData:
    if name == "CP2":
        return _cp2()
    if name == "quintic":
        return _quintic()
    if name == "E1":
        return blow_up(_cp2(), 9, name="E1")
    raise PreconditionError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")


def model_from_blocks(genus: int, b_square: int, beta: int, rest: IntegralLattice,
                      k_rest: Sequence[int], name: str = "model") -> Fibred4Manifold:
    """Abstract fibred model on ``[[b_square, 1], [1, 0]] ⊕ rest``.

    ``B`` and ``Σ`` are the first two basis vectors and
    ``K = (2g-2)B + beta·Σ + k_rest``.  Useful for property tests and for
    fibrations that do not come from a named surface.
    """
    L = lat.direct_sum(IntegralLattice([[b_square, 1], [1, 0]]), rest)
    B, S = L.basis_vector(0), L.basis_vector(1)
    K = (2 * genus - 2) * B + beta * S + L.vector((0, 0, *k_rest))
    pos, neg, _ = lat.signature(L)
    return Fibred4Manifold(name, L.rank + 2, pos - neg, L, K, S, B, genus)


def random_unimodular(rank: int, rng: random.Random, steps: int = 12) -> tuple[list[list[int]], list[list[int]]]:
    """A random product of elementary matrices and its inverse, as column lists."""
    T = [[int(i == j) for j in range(rank)] for i in range(rank)]
    Tinv = [row[:] for row in T]
    if rank < 2:
        return T, Tinv
    for _ in range(steps):
        i, j = rng.sample(range(rank), 2)
        c = rng.choice((-2, -1, 1, 2))
        # T <- T·(I + c e_i e_j^T): column j += c·column i
        for row in T:
            row[j] += c * row[i]
        # Tinv <- (I - c e_i e_j^T)·Tinv: row i -= c·row j
        Tinv[i] = [a - c * b for a, b in zip(Tinv[i], Tinv[j])]
    cols = [[T[r][c] for r in range(rank)] for c in range(rank)]
    inv_rows = Tinv
    return cols, inv_rows


def rebase(M: Fibred4Manifold, columns: Sequence[Sequence[int]],
           inverse_rows: Sequence[Sequence[int]]) -> Fibred4Manifold:
    """Express ``M`` in the basis whose old coordinates are ``columns``."""
    L = lat.change_basis(M.lattice, columns)

    def move(v: LatticeVector) -> LatticeVector:
        return L.vector([sum(a * b for a, b in zip(row, v.coords)) for row in inverse_rows])

    return Fibred4Manifold(
        M.name, M.euler, M.sigma, L, move(M.canonical), move(M.fibre), move(M.section),
        M.genus, tuple(move(e) for e in M.exceptional), M.minimal_general_type_base,
    )


def random_model(rng: random.Random, max_rank: int = 10, genus: int | None = None,
                 exceptional_section: bool = False, scramble: bool = True) -> Fibred4Manifold:
    """Random simply-connected fibred model of rank ``<= max_rank``."""
    g = rng.randint(1, 3) if genus is None else genus
    blocks: list[IntegralLattice] = []
    k_parts: list[int] = []
    budget = rng.randint(0, max_rank - 2)
    while budget > 0:
        choice = rng.choice(("+1", "-1", "H", "E8") if budget >= 8 else ("+1", "-1", "H"))
        if choice == "H" and budget < 2:
            choice = "-1"
        if choice in ("+1", "-1"):
            blocks.append(lat.diagonal([1 if choice == "+1" else -1]))
            k_parts.append(rng.choice((-3, -1, 1, 3)))
            budget -= 1
        elif choice == "H":
            blocks.append(lat.hyperbolic())
            k_parts += [2 * rng.randint(-2, 2), 2 * rng.randint(-2, 2)]
            budget -= 2
        else:
            blocks.append(lat.e8(rng.choice((-1, 1))))
            k_parts += [2 * rng.randint(-1, 1) for _ in range(8)]
            budget -= 8
    rest = lat.direct_sum(*blocks) if blocks else IntegralLattice([])
    if exceptional_section:
        b_square, beta = -1, 2 * g - 3
    else:
        b_square = rng.randint(-4, 2)
        beta = b_square % 2 + 2 * rng.randint(-2, 2)
    M = model_from_blocks(g, b_square, beta, rest, k_parts, name=f"random(g={g})")
    if scramble:
        cols, inv = random_unimodular(M.lattice.rank, rng)
        M = rebase(M, cols, inv)
    return M


# ---------------------------------------------------------------------------
# derived invariants

def is_spin(M: Fibred4Manifold) -> bool:
    even = lat.parity(M.lattice) == "even"
    div = lat.divisibility(M.lattice, M.canonical)
    assert even == (div % 2 == 0), "parity and canonical divisibility disagree"
    return even


def count_singular_fibres(M: Fibred4Manifold) -> int:
    count = M.euler - (4 - 4 * M.genus)
    if count < 0:
        raise PreconditionError(f"{M.name}: negative singular fibre count {count}")
    return count


def classify_homeo(M: Fibred4Manifold) -> FormDescriptor:
    return lat.classify_indefinite_unimodular(M.lattice)

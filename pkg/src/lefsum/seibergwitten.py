"""Seiberg-Witten basic-class bookkeeping for fibre sums.

Nothing here solves gauge-theoretic equations.  The inputs are the basic
classes of blow-ups of minimal surfaces of general type, ``±(K' ± E_1 ± ... ± E_r)``
with invariant ``±1``, and the gluing formula for fibre sums relates sums
of invariants of ``X = M #_Σ N`` to products of invariants of ``M`` and ``N``.

Signs: the overall sign of the gluing formula is not determined, so values
are normalized by ``SW(K) = +1``; the class ``-c`` carries the sign
``(-1)^{χ_h}`` relative to ``c`` with ``χ_h = (e + σ)/4``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from . import fibresum as fs
from . import lattice as lat
from .errors import PreconditionError
from .fibresum import FibreSumResult, Splitting
from .lattice import LatticeVector
from .manifold import Fibred4Manifold, base_canonical

UNDETERMINED_NOTE = (
    "classes with zero fibre pairing are undetermined: only the maximal-pairing "
    "case ±(2g-2) is computed"
)


@dataclass(frozen=True)
class BasicClassSet:
    entries: tuple[tuple[LatticeVector, int], ...]
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.entries, key=lambda e: e[0].coords))
        object.__setattr__(self, "entries", ordered)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def classes(self) -> list[LatticeVector]:
        return [c for c, _ in self.entries]

    def sw(self, c: LatticeVector) -> int:
        for cls, value in self.entries:
            if cls == c:
                return value
        return 0

    def scaled(self, t: int) -> BasicClassSet:
        return BasicClassSet(tuple((c, t * s) for c, s in self.entries), self.notes)


@dataclass(frozen=True)
class CharacteristicDecomposition:
    """``PD(k) = p_M + p_N + Σ ε_i R_i + Σ s_i S_i + b·B_X + β_X Σ_X``."""

    p_M: tuple[int, ...]
    p_N: tuple[int, ...]
    eps: tuple[int, ...]
    s_coeffs: tuple[int, ...]
    fibre_coeff: int
    beta_X: int
    source: FibreSumResult = field(repr=False, compare=False)

    def assemble(self) -> LatticeVector:
        X = self.source
        coords = [0] * X.manifold.lattice.rank
        pm = len(self.p_M)
        coords[:pm] = self.p_M
        coords[pm:pm + len(self.p_N)] = self.p_N
        for i, e in zip(X.r_indices, self.eps):
            coords[i] = e
        for i, s in zip(X.s_indices, self.s_coeffs):
            coords[i] = s
        coords[X.b_index] = self.fibre_coeff
        coords[X.sigma_index] = self.beta_X
        return X.manifold.lattice.vector(coords)


def _require_general_type_blowup(M: Fibred4Manifold) -> None:
    if not M.minimal_general_type_base:
        raise PreconditionError(
            f"{M.name}: basic classes are only enumerated for blow-ups of minimal "
            "surfaces of general type"
        )
    if M.b2plus <= 1:
        raise PreconditionError(f"{M.name}: b2+ must exceed 1")


def basic_classes_blowup(M: Fibred4Manifold) -> BasicClassSet:
    """All ``±(K' ± E_1 ± ... ± E_r)``, each with invariant ``±1``."""
    _require_general_type_blowup(M)
    K0 = base_canonical(M)
    conj = -1 if M.chi_h % 2 else 1
    entries = []
    for signs in itertools.product((1, -1), repeat=len(M.exceptional)):
        c = K0
        for s, E in zip(signs, M.exceptional):
            c = c + s * E
        entries.append((c, 1))
        entries.append((-c, conj))
    return BasicClassSet(tuple(entries))


def max_fibre_filter(S: BasicClassSet, fibre: LatticeVector, g: int, sign: int = 1) -> BasicClassSet:
    """Classes pairing to ``sign·(2g-2)`` with the fibre."""
    if g < 2:
        raise PreconditionError("the fibre filter is only meaningful for g >= 2")
    target = sign * (2 * g - 2)
    return BasicClassSet(tuple(e for e in S.entries if e[0] @ fibre == target), S.notes)


def relevant_blowup_class(M: Fibred4Manifold) -> LatticeVector:
    """The unique blow-up basic class with fibre pairing ``2g-2``; it is ``K_M``."""
    survivors = max_fibre_filter(basic_classes_blowup(M), M.fibre, M.genus)
    assert survivors.classes == [M.canonical], "expected K_M to be the only survivor"
    return M.canonical


def decompose_characteristic(X: FibreSumResult, k: LatticeVector,
                             basic_class_mode: bool = False) -> CharacteristicDecomposition:
    L = X.manifold.lattice
    if X.summand_count < 2:
        raise PreconditionError("decomposition needs a fibre sum in normal form")
    if not lat.is_characteristic(L, k):
        raise PreconditionError("class is not characteristic")
    pm, pn = X.split_M.gram.rank, X.split_N.gram.rank
    c = k.coords
    dec = CharacteristicDecomposition(
        p_M=tuple(c[:pm]), p_N=tuple(c[pm:pm + pn]),
        eps=tuple(c[i] for i in X.r_indices), s_coeffs=tuple(c[i] for i in X.s_indices),
        fibre_coeff=c[X.b_index], beta_X=c[X.sigma_index], source=X,
    )
    if basic_class_mode and any(dec.s_coeffs):
        raise PreconditionError("class has a vanishing-surface component; it cannot be basic")
    return dec


_INDEX_CACHE: dict[tuple[int, int], tuple[BasicClassSet, Splitting, dict]] = {}


def _kernel_index(S: BasicClassSet, split: Splitting) -> dict[tuple[int, ...], list[tuple[int, int, int]]]:
    """``P``-part -> [(fibre pairing, β, sw)] for the classes of ``S``."""
    key = (id(S), id(split))
    hit = _INDEX_CACHE.get(key)
    if hit is not None and hit[0] is S and hit[1] is split:
        return hit[2]
    index: dict[tuple[int, ...], list[tuple[int, int, int]]] = {}
    for c, sw in S.entries:
        p, b, beta = split.coordinates(c)
        index.setdefault(p, []).append((b, beta, sw))
    if len(_INDEX_CACHE) > 256:
        _INDEX_CACHE.clear()
    _INDEX_CACHE[key] = (S, split, index)
    return index


def mst_sum(k_dec: CharacteristicDecomposition, SM: BasicClassSet, SN: BasicClassSet, g: int) -> int:
    """Right-hand side of the gluing formula, up to its global sign."""
    if g < 2:
        raise PreconditionError("the gluing formula requires g >= 2")
    if k_dec.fibre_coeff != 2 * g - 2:
        raise PreconditionError(
            f"fibre coefficient {k_dec.fibre_coeff} != 2g-2 = {2 * g - 2}; no statement"
        )
    X = k_dec.source
    top = 2 * g - 2
    kM = [(beta, sw) for b, beta, sw in _kernel_index(SM, X.split_M).get(k_dec.p_M, ()) if b == top]
    kN = [(beta, sw) for b, beta, sw in _kernel_index(SN, X.split_N).get(k_dec.p_N, ()) if b == top]
    return sum(s1 * s2 for b1, s1 in kM for b2, s2 in kN if k_dec.beta_X == b1 + b2 + 2)


def _char_in_block(gram: lat.IntegralLattice, p: tuple[int, ...]) -> bool:
    return lat.is_characteristic(gram, gram.vector(p))


def decomposition_is_characteristic(dec: CharacteristicDecomposition) -> bool:
    """Blockwise characteristic test, exact because the normal form is an orthogonal sum."""
    X = dec.source
    if not (_char_in_block(X.split_M.gram, dec.p_M) and _char_in_block(X.split_N.gram, dec.p_N)):
        return False
    L = X.manifold.lattice
    for (s_i, r_i), s, e in zip(zip(X.s_indices, X.r_indices), dec.s_coeffs, dec.eps):
        s_sq = L.gram[s_i][s_i]
        if (s * s_sq + e - s_sq) % 2 or s % 2:
            return False
    b_sq = L.gram[X.b_index][X.b_index]
    if (dec.fibre_coeff * b_sq + dec.beta_X - b_sq) % 2 or dec.fibre_coeff % 2:
        return False
    return True


def maximal_pairing_candidates(X: FibreSumResult, SM: BasicClassSet, SN: BasicClassSet,
                               window: int = 2) -> Iterator[CharacteristicDecomposition]:
    """Characteristic rim-free classes ``p_M + p_N + (2g-2)B_X + β Σ_X``.

    ``p_M`` and ``p_N`` run over the ``P``-parts of the classes in ``SM`` and
    ``SN``; ``β`` runs over a window around ``β_M + β_N + 2``.
    """
    g = X.manifold.genus
    zeros = (0,) * (2 * g)
    parts_M = {p: {beta for _, beta, _ in rows} for p, rows in _kernel_index(SM, X.split_M).items()
               if _char_in_block(X.split_M.gram, p)}
    parts_N = {p: {beta for _, beta, _ in rows} for p, rows in _kernel_index(SN, X.split_N).items()
               if _char_in_block(X.split_N.gram, p)}
    b_sq = X.manifold.lattice.gram[X.b_index][X.b_index]
    s_even = all(X.manifold.lattice.gram[i][i] % 2 == 0 for i in X.s_indices)
    if not s_even:
        return
    seen = set()
    for pM, betas_M in sorted(parts_M.items()):
        for pN, betas_N in sorted(parts_N.items()):
            for bm in betas_M:
                for bn in betas_N:
                    for delta in range(-window, window + 1):
                        beta = bm + bn + 2 + delta
                        key = (pM, pN, beta)
                        if key in seen:
                            continue
                        seen.add(key)
                        # rim-free, S-free: only the (B, Σ) block constrains the parity of β
                        if ((2 * g - 2) * b_sq + beta - b_sq) % 2 == 0:
                            yield CharacteristicDecomposition(pM, pN, zeros, zeros, 2 * g - 2, beta, X)


def summand_basic_classes(M: Fibred4Manifold, copies: int) -> BasicClassSet:
    """Known basic classes of ``M(copies)`` relevant to the gluing formula."""
    if copies == 1:
        return basic_classes_blowup(M)
    return basic_classes_Mn_fibre_nonzero(M, copies)


@lru_cache(maxsize=32)
def basic_classes_Mn_fibre_nonzero(M: Fibred4Manifold, n: int) -> BasicClassSet:
    """Basic classes of ``M(n)`` with nonzero fibre pairing: exactly ``±K``."""
    _require_general_type_blowup(M)
    g = M.genus
    if g < 2:
        raise PreconditionError("requires fibre genus g >= 2")
    if n < 2:
        raise PreconditionError("requires n >= 2")
    relevant_blowup_class(M)
    X = fs.iterated_fibre_sum(M, n)
    SM = basic_classes_blowup(M)
    SN = summand_basic_classes(M, n - 1)
    K = X.manifold.canonical
    dec = decompose_characteristic(X, K, basic_class_mode=True)
    value = mst_sum(dec, SM, SN, g)
    if abs(value) != 1:
        raise AssertionError(f"gluing formula gives {value} for K_X, expected ±1")
    for cand in maximal_pairing_candidates(X, SM, SN):
        if cand == dec:
            continue
        if mst_sum(cand, SM, SN, g) != 0:
            raise AssertionError("another maximal-pairing class has nonzero invariant")
    conj = -1 if X.manifold.chi_h % 2 else 1
    return BasicClassSet(((K, 1), (-K, conj)), (UNDETERMINED_NOTE,))

"""Canonical classes of fibre sums and their divisibilities.

Two routes are implemented and compared: the general gluing formula applied
step by step (:func:`gompf_canonical`, used while building every sum) and the
closed forms for ``M(n)`` and ``M(m, n, C)``.  Divisibilities likewise come
both from gcd formulas and from the lattice directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from . import fibresum as fs
from . import lattice as lat
from .errors import PreconditionError
from .fibresum import FibreSumResult, GluingClass, NormalFormLayout
from .lattice import LatticeVector
from .manifold import Fibred4Manifold


@dataclass(frozen=True)
class CanonicalData:
    K_X: LatticeVector = field(repr=False)
    Kbar_M: tuple[int, ...] = field(repr=False)
    Kbar_N: tuple[int, ...] = field(repr=False)
    r: tuple[int, ...]
    b_X: int
    sigma_X_coeff: int

    def reassemble(self, layout_or_result) -> LatticeVector:
        """Rebuild ``K_X`` from the components (top-level normal form only)."""
        if isinstance(layout_or_result, FibreSumResult):
            L = layout_or_result.manifold.lattice
            pm = layout_or_result.split_M.gram.rank
            sr = list(zip(layout_or_result.s_indices, layout_or_result.r_indices))
            b_idx, s_idx = layout_or_result.b_index, layout_or_result.sigma_index
        else:
            L = layout_or_result.lattice
            pm = layout_or_result.pm_range[1]
            sr = layout_or_result.sr_top
            b_idx, s_idx = layout_or_result.b_index, layout_or_result.sigma_index
        coords = [0] * L.rank
        coords[:pm] = self.Kbar_M
        coords[pm:pm + len(self.Kbar_N)] = self.Kbar_N
        for (_, ri), val in zip(sr, self.r):
            coords[ri] = val
        coords[b_idx] = self.b_X
        coords[s_idx] = self.sigma_X_coeff
        return L.vector(coords)


def _kbar_ambient(M: Fibred4Manifold) -> LatticeVector:
    g = M.genus
    K, B, S = M.canonical, M.section, M.fibre
    return K - (2 * g - 2) * B - ((K @ B) - (2 * g - 2) * (B @ B)) * S


def kbar(M: Fibred4Manifold) -> tuple[int, ...]:
    """Coordinates of ``K̄_M = K_M - (2g-2)B_M - (K_M·B_M - (2g-2)B_M²)Σ_M`` in ``P(M)``."""
    v = _kbar_ambient(M)
    p, b, beta = fs.splitting(M).coordinates(v)
    if b or beta:
        raise PreconditionError(f"{M.name}: K̄ does not lie in P(M) (b={b}, β={beta})")
    return p


def rim_coefficients(M: Fibred4Manifold, N: Fibred4Manifold, C: GluingClass,
                     K_X0_S: Sequence[int]) -> tuple[int, ...]:
    """``r_i = K_{X_0}·S_i - a_i (K_N·B_N + 1 - (2g-2) B_N²)``."""
    g = M.genus
    C.check_genus(g)
    if len(K_X0_S) != 2 * g:
        raise PreconditionError(f"K_X0·S needs 2g = {2 * g} entries")
    KB = N.canonical @ N.section
    B2 = N.section @ N.section
    factor = KB + 1 - (2 * g - 2) * B2
    return tuple(k - a * factor for k, a in zip(K_X0_S, C.a))


def gompf_canonical(M: Fibred4Manifold, N: Fibred4Manifold, C: GluingClass | None = None,
                    K_X0_S: Sequence[int] | None = None, S_squares: Sequence[int] | None = None,
                    layout: NormalFormLayout | None = None) -> CanonicalData:
    """Canonical class of ``M #_Σ N`` in the normal-form basis."""
    if M.genus != N.genus:
        raise PreconditionError(f"genus mismatch: {M.genus} != {N.genus}")
    g = M.genus
    C = C if C is not None else GluingClass.zero(g)
    K_X0_S = tuple(K_X0_S) if K_X0_S is not None else (0,) * (2 * g)
    r = rim_coefficients(M, N, C, K_X0_S)
    if layout is None:
        squares = tuple(S_squares) if S_squares is not None else fs.default_s_squares(r)
        layout = fs.normal_form_layout(M, N, squares)
    km, kn = kbar(M), kbar(N)
    b_X = 2 * g - 2
    sigma_X = (M.canonical @ M.section + N.canonical @ N.section + 2
               - (2 * g - 2) * (M.section @ M.section + N.section @ N.section))
    data = CanonicalData(layout.lattice.zero(), km, kn, r, b_X, sigma_X)
    K_X = data.reassemble(layout)
    return CanonicalData(K_X, km, kn, r, b_X, sigma_X)


def _require_exceptional_section(M: Fibred4Manifold) -> None:
    if M.section @ M.section != -1 or M.canonical @ M.section != -1:
        raise PreconditionError(
            f"{M.name}: closed forms need B_M to be an exceptional sphere (B² = K·B = -1)"
        )


def _closed_form(X: FibreSumResult, M: Fibred4Manifold, copies: int, r: Sequence[int]) -> CanonicalData:
    g = M.genus
    kb = kbar(M)
    L = X.manifold.lattice
    coords = [0] * L.rank
    if len(X.p_blocks) != copies:
        raise PreconditionError("fibre sum does not contain the expected number of base copies")
    for start, stop in X.p_blocks:
        coords[start:stop] = kb
    for ri, val in zip(X.r_indices, r):
        coords[ri] = val
    coords[X.b_index] = 2 * g - 2
    coords[X.sigma_index] = (copies - 2) + (2 * g - 2) * copies
    K = L.vector(coords)
    pm, pn = X.split_M.gram.rank, X.split_N.gram.rank
    return CanonicalData(K, tuple(coords[:pm]), tuple(coords[pm:pm + pn]),
                         tuple(r), 2 * g - 2, coords[X.sigma_index])


def canonical_Mn(M: Fibred4Manifold, n: int) -> CanonicalData:
    """``K = Σ K̄_{M_i} + (2g-2)B_X + ((n-2) + (2g-2)n)Σ_X`` with ``K̄ = (K+Σ) - (2g-2)(B+Σ)``."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    _require_exceptional_section(M)
    g = M.genus
    if n == 1:
        K, B, S = M.canonical, M.section, M.fibre
        kb_ambient = (K + S) - (2 * g - 2) * (B + S)
        K1 = kb_ambient + (2 * g - 2) * B + ((n - 2) + (2 * g - 2) * n) * S
        return CanonicalData(K1, kbar(M), (), (), 2 * g - 2, (n - 2) + (2 * g - 2) * n)
    X = fs.iterated_fibre_sum(M, n)
    return _closed_form(X, M, n, (0,) * (2 * g))


def twisted_rim_coefficients(genus: int, n: int, C: GluingClass) -> tuple[int, ...]:
    """``r_i = -a_i((2g-1)n - 1)``."""
    return tuple(-a * ((2 * genus - 1) * n - 1) for a in C.a)


def canonical_MmnC(M: Fibred4Manifold, m: int, n: int, C: GluingClass) -> CanonicalData:
    if m < 1 or n < 1:
        raise PreconditionError("m and n must be at least 1")
    _require_exceptional_section(M)
    C.check_genus(M.genus)
    X = fs.twisted_sum(m, n, M, C)
    return _closed_form(X, M, m + n, twisted_rim_coefficients(M.genus, n, C))


# ---------------------------------------------------------------------------
# divisibilities

def d_of(M: Fibred4Manifold) -> int:
    """Divisibility of ``K_M + Σ_M``."""
    return lat.divisibility(M.lattice, M.canonical + M.fibre)


def div_K_Mn(M: Fibred4Manifold, n: int, check: bool = True) -> int:
    if n < 1:
        raise PreconditionError("n must be at least 1")
    value = gcd(n - 2, d_of(M))
    if check:
        X = fs.iterated_fibre_sum(M, n).manifold
        direct = lat.divisibility(X.lattice, X.canonical)
        if direct != value:
            raise AssertionError(f"gcd formula {value} != lattice divisibility {direct}")
    return value


def div_K_MmnC(M: Fibred4Manifold, m: int, n: int, C: GluingClass, check: bool = True) -> int:
    if m < 1 or n < 1:
        raise PreconditionError("m and n must be at least 1")
    C.check_genus(M.genus)
    g = M.genus
    a = C.divisibility
    value = lat.gcd_all((m + n - 2, a * ((2 * g - 1) * n - 1), d_of(M)))
    if check:
        X = fs.twisted_sum(m, n, M, C).manifold
        direct = lat.divisibility(X.lattice, X.canonical)
        if direct != value:
            raise AssertionError(f"gcd formula {value} != lattice divisibility {direct}")
    return value

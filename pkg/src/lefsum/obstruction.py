"""Extension obstruction for boundary diffeomorphisms, and pencil parameters.

A self-diffeomorphism of the boundary of a fibre neighbourhood in ``M(n)``
is classified by a class ``C`` with divisibility ``a``.  If ``d``, the
divisibility of ``K_{M'} + Σ_{M'}``, does not divide ``a(n-1)`` it cannot
extend over the complement: the twisted sum ``M(m, n, C)`` for a suitable
``m`` would then be diffeomorphic to ``M(m+n)`` although the canonical
classes have different divisibilities.  When ``d`` does divide ``a(n-1)``
nothing is decided.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .errors import PreconditionError
from .lattice import gcd_all

INCONCLUSIVE = "inconclusive: may extend"
OBSTRUCTED = "obstructed: does not extend"


def divides(d: int, x: int) -> bool:
    """``d | x`` with the convention that 0 divides only 0."""
    if d < 0:
        raise PreconditionError("divisor must be non-negative")
    return x == 0 if d == 0 else x % d == 0


@dataclass(frozen=True)
class ObstructionVerdict:
    obstructed: bool
    d: int
    a: int
    n: int
    witness_m: int | None
    div_untwisted: int
    div_twisted: int
    genus: int | None = None

    @property
    def verdict(self) -> str:
        return OBSTRUCTED if self.obstructed else INCONCLUSIVE


def _twisted_factor(a: int, n: int, genus: int | None) -> int:
    if genus is None:
        return a * (n - 1)
    return a * ((2 * genus - 1) * n - 1)


def _divs(d: int, a: int, n: int, m: int, genus: int | None) -> tuple[int, int]:
    untwisted = gcd(m + n - 2, d)
    twisted = gcd_all((m + n - 2, _twisted_factor(a, n, genus), d))
    return untwisted, twisted


def witness_m(d: int, a: int, n: int, genus: int | None = None) -> int:
    """The gluing parameter ``m`` used to separate the two divisibilities.

    For ``d > 0`` this is the least ``m >= 1`` with ``m ≡ 2 - n (mod d)``, so that
    ``gcd(m+n-2, d) = d``.  For ``d = 0`` the canonical divisibility of
    ``M(m+n)`` is ``m+n-2`` itself, and we take the least ``m >= 1`` for which
    ``m+n-2`` does not divide the twisted factor (or ``m = 1`` if none is needed).
    """
    if d > 0:
        return (2 - n - 1) % d + 1
    factor = _twisted_factor(a, n, genus)
    if factor == 0:
        return 1
    m = 1
    while divides(m + n - 2, factor):
        m += 1
    return m


def extension_obstructed(d: int, a: int, n: int, genus: int | None = None) -> ObstructionVerdict:
    if d < 0 or a < 0:
        raise PreconditionError("d and a must be non-negative")
    if n < 1:
        raise PreconditionError("n must be at least 1")
    if genus is not None and not divides(d, 2 * genus - 2):
        raise PreconditionError(f"d = {d} must divide 2g - 2 = {2 * genus - 2}")
    obstructed = not divides(d, a * (n - 1))
    m = witness_m(d, a, n, genus)
    untwisted, twisted = _divs(d, a, n, m, genus)
    if obstructed and untwisted == twisted:
        raise AssertionError(f"witness m = {m} does not separate the divisibilities")
    return ObstructionVerdict(obstructed, d, a, n, m, untwisted, twisted, genus)


# ---------------------------------------------------------------------------
# pencil parameters realising a prescribed divisibility

@dataclass(frozen=True)
class PencilParams:
    d: int
    s: int
    k: int
    s0: int
    k0: int
    genus: int | None = None
    degree: int | None = None


def ample_threshold(K2: int, KL: int, L2: int) -> int:
    """Least ``s >= 1`` with ``K² + 2s K·L + s² L² > 0``."""
    if L2 <= 0:
        raise PreconditionError("L must have positive square")
    if KL < 0:
        raise PreconditionError("K·L must be non-negative")

    def value(s: int) -> int:
        return K2 + 2 * s * KL + s * s * L2

    s = max(1, isqrt(max(0, -K2) // L2))
    while s > 1 and value(s - 1) > 0:
        s -= 1
    while value(s) <= 0:
        s += 1
    return s


def section_genus(K2: int, KL: int, L2: int, s: int, k: int, *,
                  general_type: bool = False, d: int | None = None) -> int:
    """Genus of a section in class ``k(K + sL)`` by adjunction."""
    if k <= 0:
        raise PreconditionError("k must be positive; k = 0 gives an empty section")
    sq = k * k * (K2 + 2 * s * KL + s * s * L2)
    ks = k * (K2 + s * KL)
    if (sq + ks) % 2:
        raise PreconditionError("Σ² + K·Σ is odd; the inputs are inconsistent")
    g = 1 + (sq + ks) // 2
    if general_type and g < 2:
        raise AssertionError(f"section genus {g} < 2 on a minimal surface of general type")
    if d is not None and not divides(d, 2 * g - 2):
        raise AssertionError(f"d = {d} does not divide 2g - 2 = {2 * g - 2}")
    return g


def choose_pencil_params(d: int, s0: int, k0: int,
                         surface: tuple[int, int, int] | None = None) -> PencilParams:
    """Least ``s >= s0`` with ``d | s`` and ``k >= k0`` with ``d | k + 1``.

    With ``surface = (K², K·L, L²)`` the ampleness threshold raises ``s0`` if
    needed and the resulting section genus and degree are filled in.
    """
    if d < 1 or s0 < 1 or k0 < 1:
        raise PreconditionError("d, s0 and k0 must be positive")
    if surface is not None:
        s0 = max(s0, ample_threshold(*surface))
    s = -(-s0 // d) * d
    k = k0 + (-1 - k0) % d
    genus = degree = None
    if surface is not None:
        K2, KL, L2 = surface
        degree = k * k * (K2 + 2 * s * KL + s * s * L2)
        genus = section_genus(K2, KL, L2, s, k, d=d)
    return PencilParams(d, s, k, s0, k0, genus, degree)

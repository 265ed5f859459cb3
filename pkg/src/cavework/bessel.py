"""Bessel evaluation and root tables for cavity spectra.

Cylindrical J_n and spherical j_l are evaluated by downward (Miller)
recurrence.  The cylindrical family is normalised with
J_0(x) + 2*sum_k J_{2k}(x) = 1, the spherical one against j_0 or j_1,
whichever is larger in magnitude at the given argument.  That keeps the
values accurate to near machine precision for every order/argument pair
the root finder visits, without special-casing small or large x.

Roots are bracketed through the classical interleaving properties
(zeros of order n sit strictly between consecutive zeros of order n-1,
extrema sit between zeros) and refined by bisection to 1e-12 absolute.
Computed roots are cached per (kind, order, index); the cache is safe
for concurrent readers with a single locked writer.
"""

from __future__ import annotations

import math
import threading
from enum import Enum

from .errors import RootBracketingError

__all__ = [
    "BesselKind",
    "bessel_zero",
    "clear_root_cache",
    "cyl_j",
    "cyl_j_prime",
    "sph_j",
    "sph_xj_prime",
]


class BesselKind(Enum):
    CYL_J = "CylJ"            # zeros x_{n,m} of J_n
    CYL_J_PRIME = "CylJPrime"  # zeros y_{n,m} of J_n'
    SPH_J = "SphJ"            # zeros of spherical j_l
    SPH_XJ_PRIME = "SphXJPrime"  # zeros of d/dx [x j_l(x)]


_XTOL = 1e-13
_RESCALE = 1e250


def _cyl_miller(n_top: int, x: float, start: int) -> list[float]:
    # Downward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, seeded near zero
    # far above both the order and the turning point k ~ x.
    jp = 0.0
    j = 1e-305
    norm = 0.0
    vals = [0.0] * (n_top + 1)
    for k in range(start, 0, -1):
        jm = (2.0 * k / x) * j - jp
        jp, j = j, jm
        idx = k - 1
        if idx <= n_top:
            vals[idx] = j
        if idx > 0 and idx % 2 == 0:
            norm += 2.0 * j
        if abs(j) > _RESCALE:
            inv = 1.0 / _RESCALE
            jp *= inv
            j *= inv
            norm *= inv
            vals = [v * inv for v in vals]
    norm += vals[0] if n_top >= 0 else j
    return [v / norm for v in vals]


def _cyl_family(n_top: int, x: float) -> list[float]:
    """J_0(x) .. J_{n_top}(x) for x > 0."""
    if x <= 0.0:
        raise ValueError("argument must be positive")
    base = max(n_top, int(x), 1)
    start = base + 24 + int(math.sqrt(40.0 * base))
    prev = _cyl_miller(n_top, x, start)
    for _ in range(4):
        cur = _cyl_miller(n_top, x, start + 16)
        if max(abs(a - b) for a, b in zip(prev, cur)) <= 1e-14:
            return cur
        prev = cur
        start += 32
    raise RootBracketingError(
        BesselKind.CYL_J, n_top, -1, f"Miller recurrence stalled at x={x!r}"
    )


def cyl_j(order: int, x: float) -> float:
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    return _cyl_family(order, x)[order]


def cyl_j_prime(order: int, x: float) -> float:
    if order == 0:
        return -cyl_j(1, x)
    fam = _cyl_family(order + 1, x)
    return 0.5 * (fam[order - 1] - fam[order + 1])


def _sph_family(l_top: int, x: float) -> list[float]:
    """j_0(x) .. j_{l_top}(x) for x > 0."""
    if x <= 0.0:
        raise ValueError("argument must be positive")
    base = max(l_top, int(x), 1)
    start = base + 24 + int(math.sqrt(40.0 * base))
    jp = 0.0
    j = 1e-305
    vals = [0.0] * (l_top + 2)
    for k in range(start, 0, -1):
        jm = ((2.0 * k + 1.0) / x) * j - jp
        jp, j = j, jm
        idx = k - 1
        if idx <= l_top + 1:
            vals[idx] = j
        if abs(j) > _RESCALE:
            inv = 1.0 / _RESCALE
            jp *= inv
            j *= inv
            vals = [v * inv for v in vals]
    j0 = math.sin(x) / x
    j1 = math.sin(x) / x**2 - math.cos(x) / x
    # Anchor on whichever reference value is better conditioned.
    if abs(j0) >= abs(j1):
        scale = j0 / vals[0]
    else:
        scale = j1 / vals[1]
    return [v * scale for v in vals[: l_top + 1]]


def sph_j(order: int, x: float) -> float:
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    if order == 0:
        return math.sin(x) / x
    return _sph_family(order, x)[order]


def sph_xj_prime(order: int, x: float) -> float:
    """d/dx [x j_l(x)] = x j_{l-1}(x) - l j_l(x), for l >= 1."""
    if order < 1:
        raise ValueError("order must be >= 1")
    fam = _sph_family(order, x)
    return x * fam[order - 1] - order * fam[order]


_cache: dict[tuple[BesselKind, int, int], float] = {}
_lock = threading.RLock()


def clear_root_cache() -> None:
    with _lock:
        _cache.clear()


def _bisect(f, a: float, b: float, kind: BesselKind, order: int, index: int) -> float:
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa < 0.0) == (fb < 0.0):
        raise RootBracketingError(
            kind, order, index, f"no sign change on [{a!r}, {b!r}]"
        )
    while b - a > _XTOL:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (fa < 0.0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return 0.5 * (a + b)


def _root(kind: BesselKind, order: int, index: int) -> float:
    key = (kind, order, index)
    val = _cache.get(key)
    if val is not None:
        return val
    with _lock:
        val = _cache.get(key)
        if val is None:
            val = _compute_root(kind, order, index)
            _cache[key] = val
    return val


def _compute_root(kind: BesselKind, order: int, index: int) -> float:
    if kind is BesselKind.CYL_J:
        if order == 0:
            # McMahon: x_{0,m} ~ (m - 1/4) pi, spacing ~ pi.
            guess = (index - 0.25) * math.pi
            a = max(guess - 0.7, 0.3)
            b = guess + 0.7
            return _bisect(lambda x: cyl_j(0, x), a, b, kind, order, index)
        a = _root(kind, order - 1, index)
        b = _root(kind, order - 1, index + 1)
        return _bisect(lambda x: cyl_j(order, x), a, b, kind, order, index)

    if kind is BesselKind.CYL_J_PRIME:
        if order == 0:
            # J_0' = -J_1, so the extrema of J_0 are the zeros of J_1.
            return _root(BesselKind.CYL_J, 1, index)
        f = lambda x: cyl_j_prime(order, x)  # noqa: E731
        if index == 1:
            # J_n rises from the origin to its first maximum past x = n.
            return _bisect(f, float(order), _root(BesselKind.CYL_J, order, 1),
                           kind, order, index)
        a = _root(BesselKind.CYL_J, order, index - 1)
        b = _root(BesselKind.CYL_J, order, index)
        return _bisect(f, a, b, kind, order, index)

    if kind is BesselKind.SPH_J:
        if order == 0:
            return index * math.pi
        a = _root(kind, order - 1, index)
        b = _root(kind, order - 1, index + 1)
        return _bisect(lambda x: sph_j(order, x), a, b, kind, order, index)

    if kind is BesselKind.SPH_XJ_PRIME:
        f = lambda x: sph_xj_prime(order, x)  # noqa: E731
        if index == 1:
            b = _root(BesselKind.SPH_J, order, 1)
            p = 0.5 * b
            while f(p) <= 0.0:
                p *= 0.5
                if p < 1e-8:
                    raise RootBracketingError(
                        kind, order, index, "no positive point below first j_l zero"
                    )
            return _bisect(f, p, b, kind, order, index)
        a = _root(BesselKind.SPH_J, order, index - 1)
        b = _root(BesselKind.SPH_J, order, index)
        return _bisect(f, a, b, kind, order, index)

    raise ValueError(f"unknown root kind {kind!r}")


def bessel_zero(kind: BesselKind, order: int, index: int) -> float:
    """index-th positive root (1-based) of the requested function family.

    Orders are >= 0 for the cylindrical kinds and >= 1 for the spherical
    ones (an l = 0 spherical mode carries no field).  Roots are strictly
    increasing in index and accurate to 1e-12 absolute.
    """
    if not isinstance(kind, BesselKind):
        raise ValueError(f"kind must be a BesselKind, got {kind!r}")
    if index < 1:
        raise ValueError(f"root index must be >= 1, got {index}")
    min_order = 1 if kind in (BesselKind.SPH_J, BesselKind.SPH_XJ_PRIME) else 0
    if order < min_order:
        raise ValueError(f"{kind.value} order must be >= {min_order}, got {order}")
    return _root(kind, order, index)

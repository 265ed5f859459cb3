"""Cavity geometries: eigenfrequencies, mode validity, coupling tables.

Three shapes are supported, each with TE and TM polarization:

* rectangular box with fixed transverse walls (Lx, Ly) and the z-wall at
  the driven length,
* cylinder with either the flat end (longitudinal) or the side wall
  (radial) driven,
* sphere whose radius is driven.

The driven dimension's length is never stored in the geometry; it is
passed per call so the same geometry object serves the whole protocol.

The mode-mixing coefficients g_kp are the dimensionless part of the
instantaneous-basis overlap, i.e. the full time-dependent coupling is
(lambda_dot/lambda) * g_kp.  The tables implemented here keep the
published sign and index conventions: the first argument is the mode
whose profile is differentiated with respect to the boundary position,
so for TM pairs g_kp != g_pk (numerator carries the first index only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .bessel import BesselKind, bessel_zero
from .errors import ModeValidationError

__all__ = [
    "CylindricalGeometry",
    "Geometry",
    "ModeIndex",
    "MovingWall",
    "Polarization",
    "RectangularGeometry",
    "SphericalGeometry",
    "coupling_coefficient",
    "mode_frequency",
    "mode_index_str",
    "mode_spectrum",
    "moving_frequency_squared",
    "spectrum_to_csv",
    "validate_mode",
]

ModeIndex = tuple[int, int, int]


class Polarization(Enum):
    TE = "TE"
    TM = "TM"


class MovingWall(Enum):
    LONGITUDINAL = "longitudinal"
    RADIAL = "radial"


@dataclass(frozen=True)
class RectangularGeometry:
    """Box with fixed transverse sides lx, ly; the z-wall is driven."""

    lx: float
    ly: float

    def __post_init__(self) -> None:
        if not (self.lx > 0.0 and self.ly > 0.0):
            raise ValueError("transverse side lengths must be positive")


@dataclass(frozen=True)
class CylindricalGeometry:
    """Cylinder driven either at a flat end or at the side wall.

    For a longitudinal moving wall the fixed radius must be given; for a
    radial moving wall the fixed axis length must be given.  The driven
    dimension is supplied per call.
    """

    moving_wall: MovingWall
    radius: float | None = None
    axis_length: float | None = None

    def __post_init__(self) -> None:
        if self.moving_wall is MovingWall.LONGITUDINAL:
            if self.radius is None or not self.radius > 0.0:
                raise ValueError("longitudinal drive requires a positive radius")
            if self.axis_length is not None:
                raise ValueError("axis length is the driven dimension; do not fix it")
        elif self.moving_wall is MovingWall.RADIAL:
            if self.axis_length is None or not self.axis_length > 0.0:
                raise ValueError("radial drive requires a positive axis length")
            if self.radius is not None:
                raise ValueError("radius is the driven dimension; do not fix it")
        else:
            raise ValueError(f"unknown moving wall {self.moving_wall!r}")


@dataclass(frozen=True)
class SphericalGeometry:
    """Sphere whose radius is driven."""


Geometry = RectangularGeometry | CylindricalGeometry | SphericalGeometry


def _as_triple(mode: ModeIndex) -> tuple[int, int, int]:
    if (
        not isinstance(mode, tuple)
        or len(mode) != 3
        or not all(isinstance(i, int) and not isinstance(i, bool) for i in mode)
    ):
        raise ModeValidationError(f"mode index must be a triple of ints, got {mode!r}")
    return mode


def validate_mode(geom: Geometry, pol: Polarization, mode: ModeIndex) -> None:
    """Raise ModeValidationError unless mode is admissible for (geom, pol)."""
    a, b, c = _as_triple(mode)
    if isinstance(geom, RectangularGeometry):
        kx, ky, kz = a, b, c
        if pol is Polarization.TE:
            # B_z profile cos*cos*sin: needs kz >= 1 and a transverse variation.
            if kx < 0 or ky < 0 or kz < 1 or (kx == 0 and ky == 0):
                raise ModeValidationError(
                    f"rectangular TE requires kx,ky >= 0, (kx,ky) != (0,0), kz >= 1; got {mode}"
                )
        else:
            if kx < 1 or ky < 1 or kz < 0:
                raise ModeValidationError(
                    f"rectangular TM requires kx,ky >= 1, kz >= 0; got {mode}"
                )
    elif isinstance(geom, CylindricalGeometry):
        n, m, k = a, b, c
        if n < 0 or m < 1:
            raise ModeValidationError(
                f"cylindrical modes require azimuthal n >= 0 and radial m >= 1; got {mode}"
            )
        if pol is Polarization.TE and k < 1:
            raise ModeValidationError(f"cylindrical TE requires kz >= 1; got {mode}")
        if pol is Polarization.TM and k < 0:
            raise ModeValidationError(f"cylindrical TM requires kz >= 0; got {mode}")
    elif isinstance(geom, SphericalGeometry):
        n, l, m = a, b, c
        if n < 1 or l < 1 or abs(m) > l:
            raise ModeValidationError(
                f"spherical modes require n >= 1, l >= 1, |m| <= l; got {mode}"
            )
    else:
        raise ModeValidationError(f"unknown geometry {geom!r}")


def _cyl_root_kind(pol: Polarization) -> BesselKind:
    return BesselKind.CYL_J_PRIME if pol is Polarization.TE else BesselKind.CYL_J


def _sph_root_kind(pol: Polarization) -> BesselKind:
    return BesselKind.SPH_J if pol is Polarization.TE else BesselKind.SPH_XJ_PRIME


def mode_frequency(
    geom: Geometry, pol: Polarization, mode: ModeIndex, lam: float
) -> float:
    """Instantaneous eigenfrequency at driven length lam (units c = 1)."""
    if not lam > 0.0:
        raise ValueError("driven length must be positive")
    validate_mode(geom, pol, mode)
    if isinstance(geom, RectangularGeometry):
        kx, ky, kz = mode
        return math.pi * math.sqrt(
            (kx / geom.lx) ** 2 + (ky / geom.ly) ** 2 + (kz / lam) ** 2
        )
    if isinstance(geom, CylindricalGeometry):
        n, m, k = mode
        root = bessel_zero(_cyl_root_kind(pol), n, m)
        if geom.moving_wall is MovingWall.LONGITUDINAL:
            return math.sqrt((root / geom.radius) ** 2 + (math.pi * k / lam) ** 2)
        return math.sqrt((root / lam) ** 2 + (math.pi * k / geom.axis_length) ** 2)
    n, l, _m = mode
    return bessel_zero(_sph_root_kind(pol), l, n) / lam


def moving_frequency_squared(
    geom: Geometry, pol: Polarization, mode: ModeIndex, lam: float
) -> float:
    """The driven dimension's contribution to omega**2 at length lam.

    omega(lam)**2 = const + moving_frequency_squared(lam); the squeeze
    rate of a parametrically resonant mode is proportional to this share
    of the total frequency.
    """
    if not lam > 0.0:
        raise ValueError("driven length must be positive")
    validate_mode(geom, pol, mode)
    if isinstance(geom, RectangularGeometry):
        return (math.pi * mode[2] / lam) ** 2
    if isinstance(geom, CylindricalGeometry):
        if geom.moving_wall is MovingWall.LONGITUDINAL:
            return (math.pi * mode[2] / lam) ** 2
        root = bessel_zero(_cyl_root_kind(pol), mode[0], mode[1])
        return (root / lam) ** 2
    return mode_frequency(geom, pol, mode, lam) ** 2


def coupling_coefficient(
    geom: Geometry, pol: Polarization, k: ModeIndex, p: ModeIndex
) -> float:
    """Dimensionless mode-mixing coefficient g_kp.

    First index is differentiated against the boundary position; the
    published tables are reproduced verbatim, including zero diagonals
    where stated and the unit TM diagonal.
    """
    validate_mode(geom, pol, k)
    validate_mode(geom, pol, p)

    if isinstance(geom, RectangularGeometry):
        if k[0] != p[0] or k[1] != p[1]:
            return 0.0
        kz, pz = k[2], p[2]
        return _axial_table(pol, kz, pz)

    if isinstance(geom, CylindricalGeometry):
        if geom.moving_wall is MovingWall.LONGITUDINAL:
            if k[0] != p[0] or k[1] != p[1]:
                return 0.0
            return _axial_table(pol, k[2], p[2])
        if k[0] != p[0] or k[2] != p[2]:
            return 0.0
        n = k[0]
        kind = _cyl_root_kind(pol)
        rk = bessel_zero(kind, n, k[1])
        rp = bessel_zero(kind, n, p[1])
        if pol is Polarization.TE:
            if k[1] == p[1]:
                return rk**2 / (rk**2 - n**2)
            return (
                2.0 * rk * rp / (rk**2 - rp**2)
                * math.sqrt((rk**2 - n**2) / (rp**2 - n**2))
            )
        if k[1] == p[1]:
            return 0.0
        return 2.0 * rk * rp / (rk**2 - rp**2)

    # spherical: mixing acts on the radial quantum number only
    if k[1] != p[1] or k[2] != p[2]:
        return 0.0
    l = k[1]
    kind = _sph_root_kind(pol)
    rk = bessel_zero(kind, l, k[0])
    rp = bessel_zero(kind, l, p[0])
    if pol is Polarization.TE:
        if k[0] == p[0]:
            return 0.0
        return 2.0 * rk * rp / (rk**2 - rp**2)
    ll1 = l * (l + 1)
    if k[0] == p[0]:
        return rk**2 / (rk**2 - ll1)
    return (
        2.0 * rk * rp / (rk**2 - rp**2)
        * math.sqrt((rk**2 - ll1) / (rp**2 - ll1))
    )


def _axial_table(pol: Polarization, kz: int, pz: int) -> float:
    # sin (TE) vs cos (TM) axial profiles give different overlap tables.
    if kz == pz:
        return 0.0 if pol is Polarization.TE else 1.0
    sign = -1.0 if (kz + pz) % 2 else 1.0
    num = 2.0 * kz * pz if pol is Polarization.TE else 2.0 * kz * kz
    return sign * num / (kz**2 - pz**2)


def mode_spectrum(
    geom: Geometry, pol: Polarization, lam: float, max_frequency: float
) -> list[tuple[ModeIndex, float]]:
    """All valid modes with omega <= max_frequency at driven length lam.

    Sorted by frequency, ties broken lexicographically on the index
    triple.  Cylindrical spectra enumerate azimuthal n >= 0 only; the
    opposite-helicity partners carry identical frequencies and couplings
    and are omitted.
    """
    if not lam > 0.0:
        raise ValueError("driven length must be positive")
    out: list[tuple[ModeIndex, float]] = []

    def keep(mode: ModeIndex) -> None:
        w = mode_frequency(geom, pol, mode, lam)
        if w <= max_frequency:
            out.append((mode, w))

    if isinstance(geom, RectangularGeometry):
        nx = int(max_frequency * geom.lx / math.pi)
        ny = int(max_frequency * geom.ly / math.pi)
        nz = int(max_frequency * lam / math.pi)
        x0 = 0 if pol is Polarization.TE else 1
        z0 = 1 if pol is Polarization.TE else 0
        for kx in range(x0, nx + 1):
            for ky in range(x0, ny + 1):
                if pol is Polarization.TE and kx == 0 and ky == 0:
                    continue
                for kz in range(z0, nz + 1):
                    keep((kx, ky, kz))
    elif isinstance(geom, CylindricalGeometry):
        kind = _cyl_root_kind(pol)
        if geom.moving_wall is MovingWall.LONGITUDINAL:
            r_trans, l_axial = geom.radius, lam
        else:
            r_trans, l_axial = lam, geom.axis_length
        k0 = 1 if pol is Polarization.TE else 0
        n = 0
        while bessel_zero(kind, n, 1) / r_trans <= max_frequency:
            m = 1
            while bessel_zero(kind, n, m) / r_trans <= max_frequency:
                for k in range(k0, int(max_frequency * l_axial / math.pi) + 1):
                    keep((n, m, k))
                m += 1
            n += 1
    else:
        kind = _sph_root_kind(pol)
        l = 1
        while bessel_zero(kind, l, 1) / lam <= max_frequency:
            n = 1
            while bessel_zero(kind, l, n) / lam <= max_frequency:
                for m in range(-l, l + 1):
                    keep((n, l, m))
                n += 1
            l += 1

    out.sort(key=lambda entry: (entry[1], entry[0]))
    return out


def mode_index_str(mode: ModeIndex) -> str:
    return ":".join(str(i) for i in mode)


def spectrum_to_csv(
    spectrum: list[tuple[ModeIndex, float]], pol: Polarization
) -> str:
    lines = ["mode_index,polarization,frequency"]
    for mode, w in spectrum:
        lines.append(f"{mode_index_str(mode)},{pol.value},{w:.12g}")
    return "\n".join(lines) + "\n"

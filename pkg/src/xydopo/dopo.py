"""Spectral solver for a ring of N parametrically driven coupled oscillators.

Mode energies come from eps_k = delta - 2*j*cos k and the Bogoliubov-diagonal
spectrum Omega_k = sqrt(eps_k^2 - d2). Omega is exposed as the signed square
Omega_k^2 = eps_k^2 - d2: a negative value marks an imaginary-frequency
(dynamically unstable) mode, which keeps the numerics exact and makes phase
classification a sign test.

With no drive (d2 = 0) the spectrum Omega_k^2 = eps_k^2 never goes negative,
so the symmetry-broken region is instead detected by eps_k changing sign
inside the band: the vacuum stops being the ground state once a mode energy
crosses zero. The classifier handles that boundary case explicitly.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .quadrature import Integral, QuadratureSpec, integrate
from .types import (
    CRITICAL,
    NORMAL,
    SUPERRADIANT,
    DopoParams,
    MomentumGrid,
    NonphysicalDriveError,
    NoSqueezedVacuumError,
    Spectrum,
    SPECTRUM_OMEGA_SQUARED,
    UnstablePhaseError,
)

# tolerance on Omega^2 separating normal/critical/superradiant:
# below quadrature accuracy, above accumulated rounding
STABILITY_TOL = 1e-10


def dopo_epsilon(p: DopoParams, k):
    """Mode energy eps_k = delta - 2*j*cos k, vectorized over k."""
    k = np.asarray(k, dtype=float)
    val = p.delta - 2.0 * p.j * np.cos(k)
    return val if val.ndim else float(val)


def dopo_omega_squared(p: DopoParams, k):
    """Signed squared quasiparticle energy eps_k^2 - d2 (negative = unstable mode)."""
    eps = np.asarray(dopo_epsilon(p, k))
    val = eps * eps - p.d2
    return val if val.ndim else float(val)


def dopo_spectrum(p: DopoParams, grid: MomentumGrid) -> Spectrum:
    """Omega_k^2 on every point of a discrete grid."""
    if grid.is_continuum:
        raise ValueError("dopo_spectrum needs a discrete grid, got the continuum marker")
    return Spectrum(grid.points, dopo_omega_squared(p, grid.points),
                    kind=SPECTRUM_OMEGA_SQUARED)


def dopo_zero_point_energy(p: DopoParams, grid: MomentumGrid) -> float:
    """Zero-point energy (1/2) sum_k (Omega_k - eps_k) on a discrete grid.

    Every grid mode must be stable (Omega_k^2 >= 0); otherwise an
    UnstablePhaseError carrying the offending k values is raised.
    """
    if grid.is_continuum:
        raise ValueError("zero-point energy needs a discrete grid")
    omsq = dopo_omega_squared(p, grid.points)
    bad = omsq < 0.0
    if np.any(bad):
        raise UnstablePhaseError(
            f"{int(bad.sum())} grid mode(s) have Omega^2 < 0",
            unstable_k=grid.points[bad],
        )
    eps = dopo_epsilon(p, grid.points)
    return 0.5 * float(np.sum(np.sqrt(omsq) - eps))


def _instability_window(p: DopoParams) -> tuple[float, float] | None:
    """k-interval in [0, pi] where Omega_k^2 < 0, or None when stable."""
    if p.d2 <= 0.0:
        return None  # Omega^2 = eps^2 - d2 >= -d2 >= 0
    drive = math.sqrt(p.d2)
    if p.j == 0.0:
        return (0.0, math.pi) if abs(p.delta) < drive else None
    # |eps_k| < drive  <=>  cos k in ((delta-drive)/(2j), (delta+drive)/(2j))
    lo = (p.delta - drive) / (2.0 * p.j)
    hi = (p.delta + drive) / (2.0 * p.j)
    if lo > hi:
        lo, hi = hi, lo
    lo, hi = max(lo, -1.0), min(hi, 1.0)
    if lo >= hi:
        return None
    return (math.acos(hi), math.acos(lo))  # arccos reverses order


def dopo_energy_density(p: DopoParams, quad: QuadratureSpec = QuadratureSpec()) -> Integral:
    """Zero-point energy per site in the thermodynamic limit.

    Computed as (1/(2*pi)) * integral_0^pi Omega_k dk - delta/2, using that
    cos k integrates to zero over the band. Raises UnstablePhaseError (with
    the window endpoints) if any part of [0, pi] is unstable.
    """
    window = _instability_window(p)
    if window is not None:
        raise UnstablePhaseError(
            f"unstable window k in [{window[0]:.6f}, {window[1]:.6f}]",
            unstable_k=window,
        )

    def omega(k):
        # clip tiny negatives from rounding at a marginal gap closing
        return np.sqrt(np.maximum(dopo_omega_squared(p, k), 0.0))

    raw = integrate(omega, 0.0, math.pi, quad)
    scale = 1.0 / (2.0 * math.pi)
    return Integral(raw.value * scale - 0.5 * p.delta, raw.error * scale, raw.nodes)


class SqueezingParams(NamedTuple):
    k: float
    r: float       # squeezing magnitude, r = (1/2) artanh(drive/|eps_k|)
    theta: float   # squeezing phase; drive phase is fixed to 0, so always pi/2


def dopo_squeezing(p: DopoParams, k: float) -> SqueezingParams:
    """Squeezing parameters of the mode at momentum k.

    Defined only below threshold: needs d2 >= 0, eps_k != 0 and
    sqrt(d2) < |eps_k|. The sign of eps_k is folded out: r is a magnitude.
    """
    drive = p.drive()  # raises NonphysicalDriveError when d2 < 0
    eps = abs(dopo_epsilon(p, float(k)))
    if eps == 0.0 or drive >= eps:
        raise NoSqueezedVacuumError(
            f"mode at k={k:g} is at/beyond threshold (|eps|={eps:g}, drive={drive:g})"
        )
    return SqueezingParams(float(k), 0.5 * math.atanh(drive / eps), math.pi / 2.0)


def dopo_critical_detuning(p: DopoParams) -> float:
    """Threshold detuning -2*j - sqrt(d2), the branch reached first when the
    detuning rises from the normal phase along a negative-delta sweep."""
    if p.j < 0:
        raise ValueError(f"need j >= 0, got {p.j}")
    return -2.0 * p.j - p.drive()


def dopo_threshold_detunings(p: DopoParams) -> tuple[float, float, float, float]:
    """All four algebraic thresholds {+-2j +- sqrt(d2)}, sorted ascending."""
    drive = p.drive()
    two_j = 2.0 * abs(p.j)
    return tuple(sorted((-two_j - drive, -two_j + drive, two_j - drive, two_j + drive)))


def dopo_classify_phase(p: DopoParams, scan: int = 2001, tol: float = STABILITY_TOL) -> str:
    """Normal / superradiant / critical from a k-scan of [0, pi].

    superradiant: min_k Omega_k^2 < -tol, or (d2 = 0 boundary) eps_k changes
    sign strictly inside the band; critical: the spectrum touches zero at the
    band edge without a sign change; normal otherwise.
    """
    if scan < 1000:
        raise ValueError(f"scan must be at least 1000 points, got {scan}")
    k = np.linspace(0.0, math.pi, scan)
    eps = dopo_epsilon(p, k)
    omsq = eps * eps - p.d2
    m = float(np.min(omsq))
    if m < -tol:
        return SUPERRADIANT
    if p.d2 <= tol and float(np.min(eps)) < -tol and float(np.max(eps)) > tol:
        # a zero of eps lies strictly inside the band; Omega^2 = -d2 <= 0 there
        # even if no scan point lands on it
        return SUPERRADIANT
    if m <= tol:
        return CRITICAL
    return NORMAL

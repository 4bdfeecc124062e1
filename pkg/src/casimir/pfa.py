"""Proximity force approximation and its gradient (derivative) expansion.

The energy between two gently curved surfaces with height profiles
H_1(x, y) and H_2(x, y) over a flat reference plane is expanded in
surface slopes as

    E = int dx dy U(H) [ 1 + beta_1 |grad H_1|^2 + beta_2 |grad H_2|^2
                           + beta_x grad H_1 . grad H_2 ],

with H = H_2 - H_1 and U the parallel-plate energy density.  The
curl-type coefficient vanishes identically (beta_minus = 0), and tilt
invariance of the reference plane fixes the cross coefficient,

    2 (beta_1 + beta_2) + 2 beta_x + H dlogU/dH - 1 = 0,

which for ideal boundaries (U ~ H^-3) gives beta_x = 2 - beta_1 - beta_2.

Ideal-boundary slope coefficients (exact):

    beta_D  = 2/3                     (Dirichlet on both surfaces)
    beta_N  = 2/3 (1 - 30/pi^2)       (Neumann on both)
    beta_DN = 2/3                     (Dirichlet curved / Neumann flat)
    beta_ND = 2/3 - 80/(7 pi^2)       (Neumann curved / Dirichlet flat)
    beta_EM = 2/3 (1 - 15/pi^2)       (perfect mirrors, electromagnetic)

Closed forms for two spheres (radii R1, R2, surface gap d, same
boundary condition on both):

    E_PFA = -alpha pi^3 R1 R2 / (1440 d^2 (R1 + R2)),
    E     = E_PFA [ 1 - d/(R1+R2) + (2 beta - 1)(d/R1 + d/R2) ],

with the sphere-plate limit given by R2 -> inf.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .lifshitz import ideal_plate_energy_density

__all__ = [
    "BoundaryPair",
    "TwoSphereConfig",
    "SurfaceProfile",
    "beta_table",
    "pfa_two_spheres",
    "gradient_corrected_two_spheres",
    "gradient_expansion_energy",
    "beta_cross_general",
]

_KINDS = ("DD", "NN", "DN", "ND", "EM")

BETA_D = 2.0 / 3.0
BETA_N = (2.0 / 3.0) * (1.0 - 30.0 / math.pi**2)
BETA_DN = 2.0 / 3.0
BETA_ND = 2.0 / 3.0 - 80.0 / (7.0 * math.pi**2)
BETA_EM = (2.0 / 3.0) * (1.0 - 15.0 / math.pi**2)


@dataclass(frozen=True)
class BoundaryPair:
    """Boundary-condition pair with its energy and slope coefficients.

    ``beta_1`` belongs to surface 1 and ``beta_2`` to surface 2; for the
    mixed scalar cases the first (curved) surface carries the first
    letter of ``kind``.  ``beta_cross = 2 - beta_1 - beta_2`` and
    ``beta_minus = 0`` hold exactly for ideal boundaries.
    """

    kind: str
    alpha: float
    beta_1: float
    beta_2: float
    beta_cross: float
    beta_minus: float = 0.0


def beta_table(kind: str) -> BoundaryPair:
    """Exact coefficient table for the five ideal boundary pairs."""
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")
    if kind == "DD":
        b1 = b2 = BETA_D
        alpha = 1.0
    elif kind == "NN":
        b1 = b2 = BETA_N
        alpha = 1.0
    elif kind == "DN":
        b1, b2 = BETA_DN, BETA_ND
        alpha = -7.0 / 8.0
    elif kind == "ND":
        b1, b2 = BETA_ND, BETA_DN
        alpha = -7.0 / 8.0
    else:  # EM
        b1 = b2 = BETA_EM
        alpha = 2.0
    return BoundaryPair(kind=kind, alpha=alpha, beta_1=b1, beta_2=b2,
                        beta_cross=2.0 - b1 - b2, beta_minus=0.0)


@dataclass(frozen=True)
class TwoSphereConfig:
    """Two spheres with surface-to-surface gap ``d``; ``r2 = math.inf``
    encodes the sphere-plate geometry."""

    r1: float
    r2: float
    d: float
    pair: BoundaryPair

    def __post_init__(self):
        if not self.r1 > 0 or not self.r2 > 0:
            raise ValueError("radii must be > 0")
        if not self.d > 0:
            raise ValueError("gap d must be > 0")
        ratio = max(self.d / self.r1,
                    0.0 if math.isinf(self.r2) else self.d / self.r2)
        if ratio > 0.2:
            warnings.warn(
                f"d/R = {ratio:.3g} > 0.2: gradient expansion may be unreliable",
                stacklevel=2,
            )


def _effective_radius(r1: float, r2: float) -> float:
    """R1 R2/(R1 + R2), finite-limit safe for r2 = inf."""
    if math.isinf(r2):
        return r1
    return r1 * r2 / (r1 + r2)


def pfa_two_spheres(config: TwoSphereConfig) -> float:
    """Leading proximity-force energy for two spheres,
    E_PFA = -alpha pi^3 R_eff / (1440 d^2)."""
    reff = _effective_radius(config.r1, config.r2)
    return -config.pair.alpha * math.pi**3 * reff / (1440.0 * config.d**2)


def gradient_corrected_two_spheres(config: TwoSphereConfig) -> float:
    """Two-sphere energy through first order in d/R.

    Requires the same boundary condition on both spheres (the closed
    form assumes a single beta); use the numeric surface integrator for
    mixed pairs.
    """
    pair = config.pair
    if pair.beta_1 != pair.beta_2:
        raise ValueError(
            "closed form requires identical boundary conditions on both "
            "spheres; use gradient_expansion_energy for mixed pairs"
        )
    beta = pair.beta_1
    d, r1, r2 = config.d, config.r1, config.r2
    inv_sum = 0.0 if math.isinf(r2) else d / (r1 + r2)
    slope = d / r1 + (0.0 if math.isinf(r2) else d / r2)
    return pfa_two_spheres(config) * (1.0 - inv_sum + (2.0 * beta - 1.0) * slope)


@dataclass(frozen=True)
class SurfaceProfile:
    """Single-valued height profile H(x, y) on a rectangular grid.

    ``heights[i, j]`` is the height at (x_i, y_j) with spacings
    ``dx, dy``.  Slopes should stay well below 1 for the gradient
    expansion to make sense; a warning is emitted above 0.3.
    """

    heights: np.ndarray
    dx: float
    dy: float

    def __post_init__(self):
        h = np.asarray(self.heights, dtype=float)
        object.__setattr__(self, "heights", h)
        if h.ndim != 2 or min(h.shape) < 3:
            raise ValueError("heights must be a 2-D grid with at least 3x3 points")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("grid spacings must be > 0")
        if not np.all(np.isfinite(h)):
            raise ValueError("heights must be finite")
        gx, gy = np.gradient(h, self.dx, self.dy, edge_order=2)
        max_slope = float(np.max(np.hypot(gx, gy)))
        if max_slope >= 1.0:
            raise ValueError(f"|grad H| reaches {max_slope:.3g} >= 1; profile too steep")
        if max_slope > 0.3:
            warnings.warn(
                f"max |grad H| = {max_slope:.3g} > 0.3: slope expansion accuracy degrades",
                stacklevel=2,
            )

    def gradients(self) -> tuple[np.ndarray, np.ndarray]:
        return np.gradient(self.heights, self.dx, self.dy, edge_order=2)


def _gradient_quadrature(profile_1: SurfaceProfile, profile_2: SurfaceProfile,
                         pair: BoundaryPair, stride: int, u_of_h) -> float:
    h1 = profile_1.heights[::stride, ::stride]
    h2 = profile_2.heights[::stride, ::stride]
    dx, dy = profile_1.dx * stride, profile_1.dy * stride
    gap = h2 - h1
    if np.any(gap <= 0.0):
        raise ValueError("gap H2 - H1 must be positive everywhere")
    g1x, g1y = np.gradient(h1, dx, dy, edge_order=2)
    g2x, g2y = np.gradient(h2, dx, dy, edge_order=2)
    u = u_of_h(gap)
    corr = (1.0
            + pair.beta_1 * (g1x * g1x + g1y * g1y)
            + pair.beta_2 * (g2x * g2x + g2y * g2y)
            + pair.beta_cross * (g1x * g2x + g1y * g2y))
    return float(np.sum(u * corr) * dx * dy)


def gradient_expansion_energy(profile_1: SurfaceProfile, profile_2: SurfaceProfile,
                              pair: BoundaryPair, u_of_h=None) -> float:
    """Surface integral of the slope-corrected plate energy density.

    Midpoint rule over the grid; gradients by central differences.  The
    beta_minus (curl) term is identically zero and omitted.  ``u_of_h``
    defaults to the ideal plate density with the pair's alpha; pass a
    custom vectorized density to study other interactions.

    A warning is emitted when coarsening the grid by 2x changes the
    result by more than 1% (under-resolved profile).
    """
    if profile_1.heights.shape != profile_2.heights.shape:
        raise ValueError("profiles must share one grid")
    if (profile_1.dx, profile_1.dy) != (profile_2.dx, profile_2.dy):
        raise ValueError("profiles must share grid spacings")
    if u_of_h is None:
        alpha = pair.alpha

        def u_of_h(h):
            return -alpha * math.pi**2 / (1440.0 * h**3)

    energy = _gradient_quadrature(profile_1, profile_2, pair, 1, u_of_h)
    coarse = _gradient_quadrature(profile_1, profile_2, pair, 2, u_of_h)
    if abs(coarse - energy) > 0.01 * abs(energy):
        warnings.warn(
            f"grid convergence: 2x coarsening changes the energy by "
            f"{abs(coarse - energy) / abs(energy):.2%} (> 1%); refine the grid",
            stacklevel=2,
        )
    return energy


def beta_cross_general(beta_1: float, beta_2: float, u_of_h, h: float,
                       rel_step: float = 1e-6) -> float:
    """Cross coefficient from the tilt constraint,
    beta_x = [1 - H U'(H)/U(H)]/2 - beta_1 - beta_2, with U' numeric."""
    if not h > 0:
        raise ValueError("H must be > 0")
    u0 = u_of_h(h)
    if u0 == 0.0:
        raise ValueError("U(H) must be nonzero")
    step = h * rel_step
    du = (u_of_h(h + step) - u_of_h(h - step)) / (2.0 * step)
    return 0.5 * (1.0 - h * du / u0) - beta_1 - beta_2

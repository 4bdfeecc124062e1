"""Finite-temperature orchestration on top of the plate engine.

Provides the perfect-conductor low-temperature expansion terms

    F/A = -pi^2/(720 a^3) - (zeta(3)/2 pi) T^3 + (pi^2 a/45) T^4
          + (exponentially small),

the Drude TE zero-mode deficit

    F0/A = (T/4 pi) int_0^inf k log(1 - e^{-2 k a}) dk
         = -zeta(3) T/(16 pi a^2),

(the term a Drude metal loses relative to the plasma model), and a
temperature/separation sweep emitting free energy, numerical entropy and
the zero-mode share per grid point.

Units: hbar = c = k_B = 1; temperatures are therefore inverse lengths
(k_B T/hbar c) and energies per area come out in 1/length^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .lifshitz import PlateConfig, plate_free_energy
from .materials import DielectricModel
from .numerics import integrate_semiinfinite

__all__ = [
    "ZETA3",
    "PlasmaLimitTerms",
    "ZeroModeDeficit",
    "ThermalSweep",
    "plasma_limit_coefficients",
    "drude_zero_mode_deficit",
    "thermal_sweep",
]

# Apery's constant; appears in both the T^3 coefficient and the zero-mode deficit.
ZETA3 = 1.2020569031595943


class PlasmaLimitTerms(NamedTuple):
    """The three analytic terms of the small-aT free energy per area."""

    t0_term: float
    t3_term: float
    t4_term: float

    @property
    def total(self) -> float:
        return self.t0_term + self.t3_term + self.t4_term


class ZeroModeDeficit(NamedTuple):
    """TE zero-mode free energy per area, closed form and quadrature."""

    closed_form: float
    quadrature: float


def plasma_limit_coefficients(a: float, temperature: float) -> PlasmaLimitTerms:
    """Analytic low-temperature expansion terms for ideal-mirror plates.

    Valid for T a << 1; a warning is emitted above T a = 0.3 where the
    dropped remainder is no longer negligible.
    """
    if not a > 0:
        raise ValueError("separation a must be > 0")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature * a > 0.3:
        import warnings

        warnings.warn(
            f"T*a = {temperature * a:.3g} > 0.3: expansion outside its regime",
            stacklevel=2,
        )
    t = temperature
    return PlasmaLimitTerms(
        t0_term=-math.pi**2 / (720.0 * a**3),
        t3_term=-(ZETA3 / (2.0 * math.pi)) * t**3,
        t4_term=(math.pi**2 * a / 45.0) * t**4,
    )


def drude_zero_mode_deficit(a: float, temperature: float,
                            tol: float = 1e-12) -> ZeroModeDeficit:
    """TE zero-mode term F0/A missing from the Drude free energy.

    Returns both the closed form -zeta(3) T/(16 pi a^2) and an
    independent quadrature of (T/4 pi) int k log(1 - e^{-2ka}) dk; the
    two agree to 1e-10 relative by construction of the integral.
    """
    if not (a > 0 and temperature > 0):
        raise ValueError("a and temperature must be > 0")
    closed = -ZETA3 * temperature / (16.0 * math.pi * a * a)

    def integrand(k: float) -> float:
        if k <= 0.0:
            return 0.0
        return k * math.log1p(-math.exp(-2.0 * k * a))

    res = integrate_semiinfinite(integrand, tol, scale=1.0 / (2.0 * a))
    if not res.converged:
        raise RuntimeError("zero-mode quadrature failed to converge")
    return ZeroModeDeficit(
        closed_form=closed,
        quadrature=temperature / (4.0 * math.pi) * res.value,
    )


@dataclass(frozen=True)
class ThermalSweep:
    """Grid of separations and temperatures for one material pair.

    Entropy is computed as S/A = -dF/dT by centered differences with a
    relative temperature step of 1e-3.
    """

    separations: tuple
    temperatures: tuple
    model_1: DielectricModel
    model_2: DielectricModel
    tol: float = 1e-8
    entropy_rel_step: float = 1e-3

    def __post_init__(self):
        seps = tuple(float(a) for a in self.separations)
        temps = tuple(float(t) for t in self.temperatures)
        object.__setattr__(self, "separations", seps)
        object.__setattr__(self, "temperatures", temps)
        if any(a <= 0 for a in seps):
            raise ValueError("separations must be > 0")
        if any(t <= 0 for t in temps):
            raise ValueError("temperatures must be > 0")
        if list(seps) != sorted(set(seps)) or list(temps) != sorted(set(temps)):
            raise ValueError("grids must be strictly increasing")


def _free_energy(a: float, t: float, m1, m2, tol: float):
    cfg = PlateConfig(a=a, model_1=m1, model_2=m2, temperature=t)
    return plate_free_energy(cfg, tol)


def thermal_sweep(spec: ThermalSweep) -> list[dict]:
    """Evaluate the sweep; returns one row dict per (a, T) point.

    Row keys: ``a``, ``T``, ``F_per_A``, ``S_per_A``, ``zero_mode_share``,
    ``model_1``, ``model_2`` plus ``error`` (empty string when the point
    succeeded).  Per-point failures are recorded, not raised, so a long
    sweep survives isolated bad points.
    """
    rows: list[dict] = []
    for a in spec.separations:
        for t in spec.temperatures:
            row = {
                "a": a,
                "T": t,
                "F_per_A": math.nan,
                "S_per_A": math.nan,
                "zero_mode_share": math.nan,
                "model_1": spec.model_1.label,
                "model_2": spec.model_2.label,
                "error": "",
            }
            try:
                mid = _free_energy(a, t, spec.model_1, spec.model_2, spec.tol)
                dt = t * spec.entropy_rel_step
                hi = _free_energy(a, t + dt, spec.model_1, spec.model_2, spec.tol)
                lo = _free_energy(a, t - dt, spec.model_1, spec.model_2, spec.tol)
                row["F_per_A"] = mid.total
                row["S_per_A"] = -(hi.total - lo.total) / (2.0 * dt)
                row["zero_mode_share"] = (
                    mid.zero_mode_contribution / mid.total if mid.total != 0.0 else 0.0
                )
            except (ValueError, RuntimeError) as exc:
                row["error"] = str(exc)
            rows.append(row)
    return rows

"""Parallel-plate Casimir energy per unit area.

Zero temperature (per polarization p):

    E/A = (1/4 pi^2) sum_p  int_0^inf dkappa  int_kappa^inf q dq
          log(1 - r_p^2 e^{-2 q a}),

where the reflection coefficients are evaluated at xi = kappa and
k_perp = sqrt(q^2 - kappa^2).  For two perfect conductors this
reproduces the closed form U(a) = -pi^2/(720 a^3) (alpha = 2).

Finite temperature replaces the kappa integral by a Matsubara sum:

    F/A = T sum_n' (1/2 pi) int_{xi_n}^inf q dq sum_p
          log(1 - r_p^2 e^{-2 q a}),

with the n = 0 term weighted 1/2.  The n = 0 transverse-electric term,
where the Drude and plasma models disagree, is computed through
``materials.reflection_zero_mode`` and reported separately.

All quantities are per unit area in units hbar = c = k_B = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .materials import DielectricModel, fresnel_imag, reflection_zero_mode
from .numerics import QuadratureResult, integrate_semiinfinite, matsubara_sum

__all__ = [
    "PlateConfig",
    "PlateEnergyBreakdown",
    "ideal_plate_energy_density",
    "plate_energy_t0",
    "plate_free_energy",
]


@dataclass(frozen=True)
class PlateConfig:
    """Two parallel plates at separation ``a``; ``temperature = 0`` selects
    the zero-temperature integral path."""

    a: float
    model_1: DielectricModel
    model_2: DielectricModel
    temperature: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("separation a must be > 0")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class PlateEnergyBreakdown:
    """Energy (or free energy) per unit area split by polarization.

    ``zero_mode_contribution`` is the n = 0 transverse-electric Matsubara
    term (including its 1/2 weight); it vanishes identically at T = 0.
    ``error_estimate`` aggregates quadrature and truncation estimates.
    """

    total: float
    te: float
    tm: float
    zero_mode_contribution: float = 0.0
    error_estimate: float = 0.0
    evaluations: int = 1
    converged: bool = True


def ideal_plate_energy_density(alpha: float, d: float) -> float:
    """Ideal-boundary plate energy per unit area, U(d) = -alpha pi^2/(1440 d^3).

    alpha = 1 for a scalar field with Dirichlet-Dirichlet or
    Neumann-Neumann conditions, 2 for electromagnetic perfect mirrors,
    and -7/8 for mixed Dirichlet/Neumann (repulsive).
    """
    if not d > 0:
        raise ValueError("separation d must be > 0")
    return -alpha * math.pi**2 / (1440.0 * d**3)


def _q_integral(model_1, model_2, xi: float, a: float, tol: float,
                polarization: str, zero_mode: bool) -> QuadratureResult:
    """int_xi^inf q dq log(1 - r_p^(1) r_p^(2) e^{-2qa}) for one polarization."""

    def integrand(s: float) -> float:
        q = xi + s
        if q <= 0.0:
            return 0.0
        k2 = q * q - xi * xi
        k_perp = math.sqrt(k2) if k2 > 0.0 else 0.0
        if zero_mode:
            if k_perp == 0.0:
                return 0.0
            p1 = reflection_zero_mode(model_1, k_perp)
            p2 = reflection_zero_mode(model_2, k_perp)
        else:
            p1 = fresnel_imag(model_1, xi, k_perp)
            p2 = fresnel_imag(model_2, xi, k_perp)
        if polarization == "te":
            rprod = p1.r_te * p2.r_te
        else:
            rprod = p1.r_tm * p2.r_tm
        w = rprod * math.exp(-2.0 * q * a)
        if w >= 1.0:
            return -math.inf
        return q * math.log1p(-w)

    return integrate_semiinfinite(integrand, tol, scale=1.0 / (2.0 * a))


def plate_energy_t0(config: PlateConfig, tol: float = 1e-8) -> PlateEnergyBreakdown:
    """Zero-temperature Lifshitz energy per unit area.

    Nested adaptive quadrature: outer over the imaginary wavenumber
    kappa, inner over the polar variable q in [kappa, inf).  Perfect
    conductors on both plates converge to
    ``ideal_plate_energy_density(2, a)``.
    """
    a = config.a
    evals = 0
    per_pol = {}
    err_total = 0.0
    converged = True
    for pol in ("te", "tm"):
        inner_evals = [0]

        def outer(kappa: float) -> float:
            res = _q_integral(config.model_1, config.model_2, kappa, a,
                              tol / 5.0, pol, zero_mode=False)
            inner_evals[0] += res.evaluations
            return res.value

        res = integrate_semiinfinite(outer, tol, scale=1.0 / (2.0 * a))
        per_pol[pol] = res.value / (4.0 * math.pi**2)
        err_total += res.error_estimate / (4.0 * math.pi**2)
        evals += inner_evals[0]
        converged = converged and res.converged
    total = per_pol["te"] + per_pol["tm"]
    return PlateEnergyBreakdown(
        total=total, te=per_pol["te"], tm=per_pol["tm"],
        zero_mode_contribution=0.0, error_estimate=err_total,
        evaluations=max(evals, 1), converged=converged,
    )


def plate_free_energy(config: PlateConfig, tol: float = 1e-8) -> PlateEnergyBreakdown:
    """Finite-temperature free energy per unit area via the Matsubara sum.

    The n = 0 transverse-electric term (weight 1/2 included) is returned
    in ``zero_mode_contribution``; it is the only place the Drude and
    plasma models differ as gamma -> 0.
    """
    if not config.temperature > 0:
        raise ValueError("plate_free_energy requires temperature > 0; "
                         "use plate_energy_t0 at T = 0")
    a, t = config.a, config.temperature
    evals = 0
    err_total = 0.0
    per_pol = {}
    converged = True
    zero_mode = 0.0
    for pol in ("te", "tm"):
        inner_evals = [0]

        def summand(xi: float) -> float:
            res = _q_integral(config.model_1, config.model_2, xi, a,
                              tol / 5.0, pol, zero_mode=(xi == 0.0))
            inner_evals[0] += res.evaluations
            return res.value / (2.0 * math.pi)

        res = matsubara_sum(summand, t, tail_tol=tol)
        per_pol[pol] = res.value
        err_total += res.error_estimate
        evals += inner_evals[0]
        converged = converged and res.converged
        if pol == "te":
            zero_mode = 0.5 * t * summand(0.0)
    total = per_pol["te"] + per_pol["tm"]
    return PlateEnergyBreakdown(
        total=total, te=per_pol["te"], tm=per_pol["tm"],
        zero_mode_contribution=zero_mode, error_estimate=err_total,
        evaluations=max(evals, 1), converged=converged,
    )

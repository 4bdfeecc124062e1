"""Shared numerical kernels: modified spherical Bessel functions, adaptive
semi-infinite quadrature, Matsubara sums and dense log-determinants.

Bessel convention
-----------------
The regular function is the standard modified spherical Bessel function

    i_l(x) = sqrt(pi/(2x)) I_{l+1/2}(x),      i_0(x) = sinh(x)/x,

and the irregular one carries the pi/2 prefactor,

    k_l(x) = sqrt(pi/(2x)) K_{l+1/2}(x),      k_0(x) = (pi/2) e^{-x}/x.

With this choice the Wronskian-type identity

    i_l(x) k_l'(x) - i_l'(x) k_l(x) = -(pi/2)/x^2

holds for all l.  Scattering amplitudes are defined as ratios of these
functions, so any rescaling of the pair cancels from every energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln, ive, kve, spherical_in, spherical_kn

__all__ = [
    "QuadratureResult",
    "MatsubaraGrid",
    "modified_spherical_bessel_i",
    "modified_spherical_bessel_k",
    "bessel_i_derivative",
    "bessel_k_derivative",
    "log_bessel_i_all",
    "log_bessel_k_all",
    "integrate_semiinfinite",
    "matsubara_sum",
    "log_det_one_minus",
]

# i_l(x) ~ e^x/(2x) overflows just past this point; callers are directed
# to the log-scaled variants instead of receiving silent infinities.
_BESSEL_OVERFLOW_X = 700.0


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a numerical quadrature or truncated sum.

    Attributes
    ----------
    value : float
        Best estimate.
    error_estimate : float
        Non-negative absolute error estimate.
    evaluations : int
        Number of integrand/summand evaluations spent.
    converged : bool
        False when the requested tolerance was not certifiably reached;
        the partial value and its error estimate are still reported.
    """

    value: float
    error_estimate: float
    evaluations: int
    converged: bool = True

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be >= 0")
        if self.evaluations <= 0:
            raise ValueError("evaluations must be > 0")


@dataclass(frozen=True)
class MatsubaraGrid:
    """Thermal frequency grid xi_n = 2*pi*n*T (hbar = k_B = 1), n = 0..n_max.

    The n = 0 entry carries weight 1/2, all others weight 1.
    """

    temperature: float
    n_max: int
    frequencies: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        n = np.arange(self.n_max + 1)
        object.__setattr__(self, "frequencies", 2.0 * np.pi * n * self.temperature)
        w = np.ones(self.n_max + 1)
        w[0] = 0.5
        object.__setattr__(self, "weights", w)


# ---------------------------------------------------------------------------
# modified spherical Bessel functions
# ---------------------------------------------------------------------------

def _check_bessel_args(l: int, x: float) -> None:
    if l < 0 or l != int(l):
        raise ValueError(f"order l must be a non-negative integer, got {l}")
    if not (x > 0) or not math.isfinite(x):
        raise ValueError(f"argument x must be positive and finite, got {x}")


def modified_spherical_bessel_i(l: int, x: float) -> float:
    """Regular modified spherical Bessel function i_l(x).

    Raises OverflowError for x > 700 where the result exceeds double
    range; use :func:`log_bessel_i_all` there.
    """
    _check_bessel_args(l, x)
    if x > _BESSEL_OVERFLOW_X:
        raise OverflowError(
            f"i_{l}({x}) overflows double precision; use log_bessel_i_all"
        )
    return float(spherical_in(int(l), x))


def modified_spherical_bessel_k(l: int, x: float) -> float:
    """Irregular modified spherical Bessel function k_l(x) (pi/2 convention)."""
    _check_bessel_args(l, x)
    val = float(spherical_kn(int(l), x))
    if math.isinf(val):
        raise OverflowError(
            f"k_{l}({x}) overflows double precision; use log_bessel_k_all"
        )
    return val


def bessel_i_derivative(l: int, x: float) -> float:
    """d/dx i_l(x)."""
    _check_bessel_args(l, x)
    if x > _BESSEL_OVERFLOW_X:
        raise OverflowError(f"i_{l}'({x}) overflows double precision")
    return float(spherical_in(int(l), x, derivative=True))


def bessel_k_derivative(l: int, x: float) -> float:
    """d/dx k_l(x)."""
    _check_bessel_args(l, x)
    val = float(spherical_kn(int(l), x, derivative=True))
    if math.isinf(val):
        raise OverflowError(f"k_{l}'({x}) overflows double precision")
    return val


def log_bessel_i_all(l_max: int, x: float) -> np.ndarray:
    """log i_l(x) for l = 0..l_max, valid for any positive x.

    Uses the exponentially scaled Bessel function where it is
    representable and falls back to the ascending series

        i_l(x) = x^l/(2l+1)!! * sum_j (x^2/2)^j / (j! (2l+3)(2l+5)...(2l+2j+1))

    in log form for the deep underflow regime (large l, small x).
    """
    _check_bessel_args(0, x)
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    ls = np.arange(l_max + 1)
    scaled = ive(ls + 0.5, x)  # I_{l+1/2}(x) e^{-x}
    out = np.empty(l_max + 1)
    ok = scaled > 0.0
    out[ok] = 0.5 * np.log(np.pi / (2.0 * x)) + np.log(scaled[ok]) + x
    for l in ls[~ok]:
        # log[(2l+1)!!] = log[(2l+1)!] - log[2^l l!]
        log_dfact = gammaln(2 * l + 2) - gammaln(l + 1) - l * math.log(2.0)
        z = 0.5 * x * x
        term, total, j = 1.0, 1.0, 0
        while True:
            j += 1
            term *= z / (j * (2 * l + 2 * j + 1))
            total += term
            if term < 1e-18 * total or j > 400:
                break
        out[l] = l * math.log(x) - log_dfact + math.log(total)
    return out


def log_bessel_k_all(l_max: int, y: float) -> np.ndarray:
    """log k_l(y) for l = 0..l_max, valid for any positive y.

    Upward recurrence on the ratio r_l = k_{l+1}/k_l = 1/r_{l-1} + (2l+1)/y,
    which is stable (k_l grows with l) and never leaves log range.
    """
    _check_bessel_args(0, y)
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    logs = np.empty(l_max + 1)
    logs[0] = math.log(np.pi / (2.0 * y)) - y
    ratio = 1.0 + 1.0 / y  # k_1/k_0
    for l in range(1, l_max + 1):
        logs[l] = logs[l - 1] + math.log(ratio)
        ratio = 1.0 / ratio + (2 * l + 1) / y
    return logs


# ---------------------------------------------------------------------------
# quadrature over [0, inf)
# ---------------------------------------------------------------------------

def integrate_semiinfinite(
    f,
    tol: float = 1e-9,
    *,
    scale: float = 1.0,
    tol_abs: float = 1e-300,
    limit: int = 200,
) -> QuadratureResult:
    """Integrate f over [0, inf) for integrands decaying at least exponentially.

    The rational substitution kappa = scale*u/(1-u) maps the half line to
    [0, 1); the image integral is then refined adaptively with
    Gauss-Kronrod panels (QUADPACK).  ``scale`` is an optional
    characteristic decay length of the integrand; accuracy does not
    depend on it sharply.

    Returns
    -------
    QuadratureResult
        With ``converged=False`` if the requested tolerance could not be
        certified; the partial value is still returned.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if scale <= 0:
        raise ValueError("scale must be > 0")
    count = 0

    def mapped(u: float) -> float:
        nonlocal count
        count += 1
        if u >= 1.0:
            return 0.0
        w = 1.0 - u
        kappa = scale * u / w
        return f(kappa) * scale / (w * w)

    with np.errstate(over="ignore", invalid="ignore"):
        value, err, info, *tail = quad(
            mapped, 0.0, 1.0, epsabs=tol_abs, epsrel=tol,
            limit=limit, full_output=True,
        )
    converged = not tail  # quad appends an explanation message on trouble
    achieved = err <= max(tol * abs(value), tol_abs) * 10 or abs(value) < tol_abs
    return QuadratureResult(
        value=float(value),
        error_estimate=float(abs(err)),
        evaluations=max(count, 1),
        converged=bool(converged and achieved),
    )


def matsubara_sum(
    f,
    temperature: float,
    tail_tol: float = 1e-10,
    *,
    max_terms: int = 200_000,
) -> QuadratureResult:
    """Thermal sum T*[f(0)/2 + sum_{n>=1} f(xi_n)] with xi_n = 2*pi*n*T.

    ``f`` must decay monotonically at large xi.  Truncation happens when
    the geometric tail bound built from the last two terms drops below
    ``tail_tol`` times the partial sum (terms are assumed asymptotically
    exponential in n, which holds for separated-body integrands).
    """
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    if tail_tol <= 0:
        raise ValueError("tail_tol must be > 0")
    step = 2.0 * np.pi * temperature
    total = 0.5 * f(0.0)
    evals = 1
    prev = None
    tail = math.inf
    converged = False
    n = 0
    grow_streak = 0
    while n < max_terms:
        n += 1
        term = f(step * n)
        evals += 1
        total += term
        if not math.isfinite(term):
            raise ValueError(
                f"matsubara_sum: summand is not decaying (f(xi_{n}) = {term})"
            )
        if prev is not None and abs(prev) > 0.0:
            r = abs(term) / abs(prev)
            if r >= 1.0:
                grow_streak += 1
                if grow_streak >= 8:
                    raise ValueError(
                        "matsubara_sum: summand is not decaying; "
                        f"|f| grew for {grow_streak} consecutive terms"
                    )
            else:
                grow_streak = 0
                tail = abs(term) * r / (1.0 - r)
        prev = term
        if abs(term) == 0.0:
            tail = 0.0
        if tail <= tail_tol * max(abs(total), 1e-300):
            converged = True
            break
    return QuadratureResult(
        value=float(temperature * total),
        error_estimate=float(temperature * min(tail, abs(total))) if math.isfinite(tail) else abs(float(temperature * total)),
        evaluations=evals,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# dense log det(1 - A)
# ---------------------------------------------------------------------------

def log_det_one_minus(matrix: np.ndarray, *, norm_threshold: float = 1e-6) -> float:
    """log det(1 - A) for a round-trip matrix A with spectral radius < 1.

    For ||A||_2 below ``norm_threshold`` the expansion
    -tr(A) - tr(A^2)/2 is used instead of an LU factorization, which
    would lose relative accuracy when det(1-A) is close to 1.

    Raises
    ------
    ValueError
        If the spectral radius of A reaches 1 (a physically invalid,
        interpenetrating configuration).
    """
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    n = A.shape[0]
    if n == 0:
        return 0.0
    norm2 = np.linalg.norm(A, 2)
    if norm2 < norm_threshold:
        tr1 = float(np.trace(A))
        tr2 = float(np.einsum("ij,ji->", A, A))
        return -tr1 - 0.5 * tr2
    if norm2 >= 1.0:
        # the 2-norm bound is not decisive for non-normal A; check spectra
        rho = np.max(np.abs(np.linalg.eigvals(A)))
        if rho >= 1.0:
            raise ValueError(
                f"round-trip spectral radius {rho:.6g} >= 1: "
                "physically invalid (interpenetrating) configuration"
            )
    sign, logdet = np.linalg.slogdet(np.eye(n) - A)
    if sign <= 0:
        raise ValueError(
            "det(1 - A) is not positive: round-trip eigenvalue crossed 1 "
            "(physically invalid configuration)"
        )
    return float(logdet)

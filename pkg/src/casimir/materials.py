"""Dielectric response on the imaginary frequency axis and Fresnel
reflection coefficients for the plate geometry.

Models are evaluated at imaginary frequency xi > 0 through the analytic
continuation eps(i*xi); for the Drude model

    eps(i*xi) = 1 + omega_p^2 / (xi*(xi + gamma)),

which reduces to the plasma model for gamma -> 0.  The two models differ
qualitatively only in the zero-frequency transverse-electric channel,
handled by :func:`reflection_zero_mode`.

Sign convention: r_te = -1 for an ideal mirror.  Only even powers of the
reflection coefficients enter any implemented energy, so the sign is
unobservable; it is fixed here once to avoid confusion.  Magnetic
permeability is fixed to mu = 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DielectricModel",
    "ReflectionPair",
    "epsilon_imag",
    "fresnel_imag",
    "reflection_zero_mode",
    "EV_TO_INVERSE_LENGTH",
]

# 1 eV as an angular frequency is e/hbar = 1.5192678e15 rad/s; divided by c
# it is a wavenumber in 1/m.  Used by the CLI when reading eV inputs.
EV_RAD_PER_SEC = 1.5192678e15
EV_TO_INVERSE_LENGTH = EV_RAD_PER_SEC / 299792458.0  # 1/m per eV

_KINDS = ("pec", "plasma", "drude", "constant", "vacuum")


@dataclass(frozen=True)
class DielectricModel:
    """Material response model on the imaginary frequency axis.

    Use the constructors :meth:`perfect_conductor`, :meth:`plasma`,
    :meth:`drude`, :meth:`constant` and :meth:`vacuum` rather than the
    raw dataclass fields.  Frequencies are wavenumbers (units 1/length,
    c = 1).
    """

    kind: str
    omega_p: float = 0.0
    gamma: float = 0.0
    eps: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown dielectric model kind {self.kind!r}")
        if self.kind in ("plasma", "drude") and not self.omega_p > 0:
            raise ValueError("omega_p must be > 0")
        if self.kind == "drude" and self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.kind == "constant" and not self.eps >= 1:
            raise ValueError("constant eps must be >= 1 (passive medium)")

    @classmethod
    def perfect_conductor(cls) -> "DielectricModel":
        return cls(kind="pec")

    @classmethod
    def plasma(cls, omega_p: float) -> "DielectricModel":
        return cls(kind="plasma", omega_p=omega_p)

    @classmethod
    def drude(cls, omega_p: float, gamma: float) -> "DielectricModel":
        return cls(kind="drude", omega_p=omega_p, gamma=gamma)

    @classmethod
    def constant(cls, eps: float) -> "DielectricModel":
        return cls(kind="constant", eps=eps)

    @classmethod
    def vacuum(cls) -> "DielectricModel":
        return cls(kind="vacuum")

    @property
    def label(self) -> str:
        if self.kind == "plasma":
            return f"plasma(omega_p={self.omega_p:g})"
        if self.kind == "drude":
            return f"drude(omega_p={self.omega_p:g},gamma={self.gamma:g})"
        if self.kind == "constant":
            return f"constant(eps={self.eps:g})"
        return self.kind


@dataclass(frozen=True)
class ReflectionPair:
    """TE/TM reflection coefficients at one (xi, k_perp) point."""

    r_te: float
    r_tm: float
    xi: float
    k_perp: float


def epsilon_imag(model: DielectricModel, xi: float) -> float:
    """Permittivity eps(i*xi) for xi > 0.

    The perfect conductor has no finite permittivity; it returns
    ``math.inf`` as a sentinel that the reflection functions intercept.
    """
    if not xi > 0:
        raise ValueError("xi must be > 0 (the xi = 0 limit is reflection_zero_mode)")
    if model.kind == "pec":
        return math.inf
    if model.kind == "vacuum":
        return 1.0
    if model.kind == "constant":
        return model.eps
    # plasma is drude with gamma = 0
    return 1.0 + model.omega_p**2 / (xi * (xi + model.gamma))


def fresnel_imag(model: DielectricModel, xi: float, k_perp: float) -> ReflectionPair:
    """Fresnel coefficients at imaginary frequency.

    With q = sqrt(k_perp^2 + xi^2) and qt = sqrt(k_perp^2 + eps*xi^2)
    (c = 1),

        r_te = (q - qt)/(q + qt),     r_tm = (eps*q - qt)/(eps*q + qt).

    The xi = 0 case is delegated to :func:`reflection_zero_mode`.
    """
    if xi < 0 or k_perp < 0:
        raise ValueError("xi and k_perp must be >= 0")
    if xi == 0.0:
        if k_perp == 0.0:
            raise ValueError("xi and k_perp cannot both vanish")
        return reflection_zero_mode(model, k_perp)
    if model.kind == "pec":
        return ReflectionPair(-1.0, 1.0, xi, k_perp)
    if model.kind == "vacuum":
        return ReflectionPair(0.0, 0.0, xi, k_perp)
    eps = epsilon_imag(model, xi)
    q = math.hypot(k_perp, xi)
    qt = math.sqrt(k_perp * k_perp + eps * xi * xi)
    r_te = (q - qt) / (q + qt)
    r_tm = (eps * q - qt) / (eps * q + qt)
    return ReflectionPair(r_te, r_tm, xi, k_perp)


def reflection_zero_mode(model: DielectricModel, k_perp: float) -> ReflectionPair:
    """n = 0 Matsubara (xi -> 0+) reflection coefficients.

    This is where Drude and plasma part ways: the Drude TE zero mode is
    not reflected at all (r_te = 0), while the plasma model keeps

        r_te = (k_perp - sqrt(k_perp^2 + omega_p^2)) / (k_perp + sqrt(...)),

    from eps*xi^2 -> omega_p^2.  TM reflection goes to 1 for any
    conductor and to (eps-1)/(eps+1) for a dielectric constant.
    """
    if not k_perp > 0:
        raise ValueError("k_perp must be > 0")
    if model.kind == "pec":
        return ReflectionPair(-1.0, 1.0, 0.0, k_perp)
    if model.kind == "vacuum":
        return ReflectionPair(0.0, 0.0, 0.0, k_perp)
    if model.kind == "constant":
        r_tm = (model.eps - 1.0) / (model.eps + 1.0)
        return ReflectionPair(0.0, r_tm, 0.0, k_perp)
    if model.kind == "drude" and model.gamma > 0.0:
        return ReflectionPair(0.0, 1.0, 0.0, k_perp)
    # plasma (or drude with gamma = 0, which is the same model)
    s = math.hypot(k_perp, model.omega_p)
    r_te = (k_perp - s) / (k_perp + s)
    return ReflectionPair(r_te, 1.0, 0.0, k_perp)

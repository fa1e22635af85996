"""Catalog of complex attenuation coefficients.

Every model is written as a function of the Laplace-like variable
``u = -i w`` so that fractional powers and square roots all use the same
principal branch (see :func:`causal_attenuation.spectral.principal_power`).
The attenuated Green function spectrum is ``exp(-alpha_star(w) * r)`` times
the free-space spectrum.

==========================  ===================================================
kind                        ``alpha_star`` in terms of ``u = -i w``
==========================  ===================================================
``PowerLawKK``              ``at0 * u**g - a0 * u`` with ``at0 = alpha0/cos(g pi/2)``
``Szabo``                   ``(u/c0) * (sqrt(1 + 2 at0 c0 u**(g-1)) - 1)``
``ThermoViscous``           ``-u/c0 + u / (c0 sqrt(1 + tau0 u))``
``CausalThermoViscous``     ``alpha1 u / (c0 sqrt(1 + tau0 u))``
``CausalGamma``             ``alpha1 u / (c0 sqrt(1 + (tau0 u)**(g-1)))``
``NoAttenuation``           ``0``
==========================  ===================================================
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, fields
from functools import lru_cache

import numpy as np

from .errors import BranchViolation, ValidationError
from .spectral import principal_power


class Kind(str, enum.Enum):
    POWER_LAW_KK = "PowerLawKK"
    SZABO = "Szabo"
    THERMO_VISCOUS = "ThermoViscous"
    CAUSAL_THERMO_VISCOUS = "CausalThermoViscous"
    CAUSAL_GAMMA = "CausalGamma"
    NO_ATTENUATION = "NoAttenuation"

    @classmethod
    def parse(cls, value: "str | Kind") -> "Kind":
        if isinstance(value, Kind):
            return value
        key = str(value).replace("-", "").replace("_", "").lower()
        for k in cls:
            if k.value.lower() == key:
                return k
        names = ", ".join(k.value for k in cls)
        raise ValidationError(f"unknown model kind {value!r} (expected one of {names})")


class Classification(str, enum.Enum):
    CAUSAL = "Causal"
    NON_CAUSAL = "NonCausal"


@dataclass(frozen=True)
class CausalityExpectation:
    expected: Classification
    reason: str


@dataclass(frozen=True)
class AttenuationModel:
    """A validated attenuation model.

    Parameters
    ----------
    kind : Kind
        Model family.
    gamma : float
        Exponent; used by ``PowerLawKK``, ``Szabo`` and ``CausalGamma``.
    alpha0 : float
        Magnitude of the power law in ``s**gamma / m``.
    a0 : float
        Coefficient of the free linear term ``a0 * i w`` (``PowerLawKK`` only).
    tau0 : float
        Relaxation time in seconds.
    alpha1 : float
        Dimensionless magnitude of the causal variants.
    c0 : float
        Reference sound speed in m/s.
    """

    kind: Kind
    gamma: float = 0.0
    alpha0: float = 0.0
    a0: float = 0.0
    tau0: float = 0.0
    alpha1: float = 1.0
    c0: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        for f in fields(self)[1:]:
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float, np.floating, np.integer)):
                raise ValidationError(f"{f.name} must be a number, got {v!r}")
            v = float(v)
            if not math.isfinite(v):
                raise ValidationError(f"{f.name} must be finite")
            object.__setattr__(self, f.name, v)
        if self.c0 <= 0:
            raise ValidationError("c0 must be positive")
        for name in ("alpha0", "tau0", "alpha1"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be nonnegative")
        g = self.gamma
        if self.kind in (Kind.POWER_LAW_KK, Kind.SZABO):
            if g <= 0 or g == round(g):
                raise ValidationError("gamma must be positive and not an integer")
        elif self.kind is Kind.CAUSAL_GAMMA:
            if not 1 < g <= 2:
                raise ValidationError("CausalGamma requires gamma in (1, 2]")
        if self.kind in (Kind.CAUSAL_THERMO_VISCOUS, Kind.CAUSAL_GAMMA) and self.tau0 <= 0:
            raise ValidationError(f"{self.kind.value} requires tau0 > 0")

    # constructors -------------------------------------------------------

    @classmethod
    def power_law(cls, gamma, alpha0, a0=0.0, c0=1.0):
        return cls(Kind.POWER_LAW_KK, gamma=gamma, alpha0=alpha0, a0=a0, c0=c0)

    @classmethod
    def szabo(cls, gamma, alpha0, c0=1.0):
        return cls(Kind.SZABO, gamma=gamma, alpha0=alpha0, c0=c0)

    @classmethod
    def thermo_viscous(cls, tau0, c0=1.0):
        return cls(Kind.THERMO_VISCOUS, tau0=tau0, c0=c0)

    @classmethod
    def causal_thermo_viscous(cls, tau0, alpha1=1.0, c0=1.0):
        return cls(Kind.CAUSAL_THERMO_VISCOUS, tau0=tau0, alpha1=alpha1, c0=c0)

    @classmethod
    def causal_gamma(cls, gamma, tau0, alpha1=1.0, c0=1.0):
        return cls(Kind.CAUSAL_GAMMA, gamma=gamma, tau0=tau0, alpha1=alpha1, c0=c0)

    @classmethod
    def none(cls, c0=1.0):
        return cls(Kind.NO_ATTENUATION, c0=c0)

    # derived ------------------------------------------------------------

    @property
    def alpha0_tilde(self) -> float:
        """``alpha0 / cos(gamma pi / 2)``."""
        return self.alpha0 / math.cos(0.5 * math.pi * self.gamma)

    def label(self) -> str:
        k = self.kind
        if k in (Kind.POWER_LAW_KK, Kind.SZABO):
            return f"{k.value}(gamma={self.gamma:g}, alpha0={self.alpha0:g})"
        if k is Kind.THERMO_VISCOUS:
            return f"{k.value}(tau0={self.tau0:g})"
        if k is Kind.CAUSAL_THERMO_VISCOUS:
            return f"{k.value}(tau0={self.tau0:g}, alpha1={self.alpha1:g})"
        if k is Kind.CAUSAL_GAMMA:
            return f"{k.value}(gamma={self.gamma:g}, tau0={self.tau0:g}, alpha1={self.alpha1:g})"
        return k.value

    # serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AttenuationModel":
        if not isinstance(d, dict):
            raise ValidationError("model must be a JSON object")
        allowed = {f.name for f in fields(cls)}
        unknown = set(d) - allowed
        if unknown:
            raise ValidationError(f"unknown model fields: {sorted(unknown)}")
        if "kind" not in d:
            raise ValidationError("model is missing 'kind'")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "AttenuationModel":
        return cls.from_dict(json.loads(text))


# evaluation ---------------------------------------------------------------


def _sqrt_one_plus(x: np.ndarray) -> np.ndarray:
    return np.sqrt(1.0 + x)


def _branch_arguments(m: AttenuationModel, u: np.ndarray) -> np.ndarray | None:
    """The argument of the model's square root, or None if it has none."""
    k = m.kind
    if k is Kind.SZABO:
        nz = u != 0
        x = np.zeros_like(u)
        x[nz] = 2 * m.alpha0_tilde * m.c0 * principal_power(u[nz], m.gamma - 1)
        return 1.0 + x
    if k in (Kind.THERMO_VISCOUS, Kind.CAUSAL_THERMO_VISCOUS):
        return 1.0 + m.tau0 * u
    if k is Kind.CAUSAL_GAMMA:
        return 1.0 + principal_power(m.tau0 * u, m.gamma - 1)
    return None


def alpha_star_u(m: AttenuationModel, u) -> np.ndarray:
    """``alpha_star`` as a function of ``u = -i w`` (any complex ``u``).

    Values at ``u = 0`` are 0 for every model.
    """
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    k = m.kind
    out = np.zeros(u.shape, dtype=complex)
    if k is Kind.NO_ATTENUATION:
        return out
    if k is Kind.POWER_LAW_KK:
        return m.alpha0_tilde * principal_power(u, m.gamma) - m.a0 * u
    nz = u != 0
    un = u[nz]
    if k is Kind.SZABO:
        x = 2 * m.alpha0_tilde * m.c0 * principal_power(un, m.gamma - 1)
        # sqrt(1+x) - 1 written without cancellation
        out[nz] = (un / m.c0) * x / (1.0 + _sqrt_one_plus(x))
    elif k is Kind.THERMO_VISCOUS:
        s = _sqrt_one_plus(m.tau0 * un)
        out[nz] = -(un / m.c0) * (m.tau0 * un) / (s * (1.0 + s))
    elif k is Kind.CAUSAL_THERMO_VISCOUS:
        out[nz] = m.alpha1 * un / (m.c0 * _sqrt_one_plus(m.tau0 * un))
    elif k is Kind.CAUSAL_GAMMA:
        x = principal_power(m.tau0 * un, m.gamma - 1)
        out[nz] = m.alpha1 * un / (m.c0 * _sqrt_one_plus(x))
    return out


def check_branch(m: AttenuationModel, omega: np.ndarray) -> None:
    """Raise :class:`BranchViolation` if a square-root argument jumps the cut.

    Adjacent frequency samples (in ascending order) whose arguments both lie
    in the left half-plane with imaginary parts of opposite sign straddle the
    negative real axis, where the principal root is discontinuous.  Pairs on
    opposite sides of ``w = 0`` are conjugates of each other by Hermitian
    symmetry and are not compared.
    """
    w = np.sort(np.asarray(omega, dtype=float).ravel())
    if w.size < 2:
        return
    z = _branch_arguments(m, -1j * w)
    if z is None:
        return
    a, b = z[:-1], z[1:]
    same_side = w[:-1] * w[1:] > 0
    bad = same_side & (a.real < 0) & (b.real < 0) & (a.imag * b.imag < 0)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise BranchViolation(
            f"{m.label()}: square-root argument crosses the branch cut between "
            f"w={w[i]:.6g} and w={w[i + 1]:.6g}"
        )


def alpha_star(m: AttenuationModel, omega, check: bool = True):
    """Complex attenuation coefficient ``alpha_star(w)`` in 1/m.

    Parameters
    ----------
    m : AttenuationModel
    omega : float or array_like
        Angular frequency.
    check : bool
        Run :func:`check_branch` when ``omega`` is an array.
    """
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValidationError("omega must be finite")
    if check and w.ndim > 0:
        check_branch(m, w)
    out = alpha_star_u(m, -1j * w).reshape(w.shape)
    return out[()] if out.ndim == 0 else out


def beta_star(m: AttenuationModel, r: float, omega, check: bool = True):
    """``alpha_star(w) * r``."""
    if r < 0:
        raise ValidationError("r must be nonnegative")
    return alpha_star(m, omega, check=check) * r


def attenuation_law(m: AttenuationModel, omega):
    """Real part of :func:`alpha_star`."""
    return np.real(alpha_star(m, omega))


def small_omega_alpha0(m: AttenuationModel) -> float:
    """Leading low-frequency coefficient of a ``CausalGamma`` model.

    For small ``|w|`` the attenuation law behaves as
    ``alpha0_eff * |tau0 w|**gamma`` with
    ``alpha0_eff = alpha1 sin((pi/2)(gamma - 1)) / (2 tau0 c0)``.
    """
    if m.kind is not Kind.CAUSAL_GAMMA:
        raise ValidationError("small-frequency coefficient is defined for CausalGamma")
    return m.alpha1 * math.sin(0.5 * math.pi * (m.gamma - 1)) / (2 * m.tau0 * m.c0)


def bulk_delay(m: AttenuationModel, r: float) -> float:
    """Low-frequency travel time ``r / c0 + r * d(alpha_star)/du`` at ``u = 0``.

    The causal thermo-viscous variants behave like ``alpha1 u / c0`` near
    ``u = 0``, which delays the bulk of a pulse to ``(1 + alpha1) r / c0``
    although the front still travels at ``c0``.  Other kinds add no finite
    delay.
    """
    extra = m.alpha1 if m.kind in (Kind.CAUSAL_THERMO_VISCOUS, Kind.CAUSAL_GAMMA) else 0.0
    return (1.0 + extra) * r / m.c0


def expected_causality(m: AttenuationModel) -> CausalityExpectation:
    """Whether the model's Green function has a finite front speed."""
    C, N = Classification.CAUSAL, Classification.NON_CAUSAL
    k = m.kind
    if k in (Kind.POWER_LAW_KK, Kind.SZABO):
        if m.gamma < 1:
            return CausalityExpectation(C, "power-law exponent below one")
        return CausalityExpectation(N, "power-law exponent above one")
    if k is Kind.THERMO_VISCOUS:
        if m.tau0 == 0:
            return CausalityExpectation(C, "zero relaxation time is lossless")
        return CausalityExpectation(N, "thermo-viscous model has infinite front speed")
    if k is Kind.NO_ATTENUATION:
        return CausalityExpectation(C, "lossless propagation")
    return CausalityExpectation(C, "causal variant with bounded front speed")


# derivatives in omega -------------------------------------------------------


def _sympy_expr(m: AttenuationModel, u):
    import sympy as sp

    k = m.kind
    if k is Kind.NO_ATTENUATION:
        return sp.Integer(0) * u
    if k is Kind.POWER_LAW_KK:
        return sp.Float(m.alpha0_tilde) * u ** sp.Float(m.gamma) - sp.Float(m.a0) * u
    c0 = sp.Float(m.c0)
    if k is Kind.SZABO:
        b = sp.Float(2 * m.alpha0_tilde * m.c0)
        return (u / c0) * (sp.sqrt(1 + b * u ** sp.Float(m.gamma - 1)) - 1)
    tau0 = sp.Float(m.tau0)
    if k is Kind.THERMO_VISCOUS:
        return -u / c0 + u / (c0 * sp.sqrt(1 + tau0 * u))
    a1 = sp.Float(m.alpha1)
    if k is Kind.CAUSAL_THERMO_VISCOUS:
        return a1 * u / (c0 * sp.sqrt(1 + tau0 * u))
    # CausalGamma; (tau0 u)**p = tau0**p u**p on the principal branch
    p = sp.Float(m.gamma - 1)
    return a1 * u / (c0 * sp.sqrt(1 + sp.Float(m.tau0 ** (m.gamma - 1)) * u**p))


@lru_cache(maxsize=64)
def _derivative_fn(m: AttenuationModel, order: int):
    import sympy as sp

    u = sp.Symbol("u")
    expr = sp.diff(_sympy_expr(m, u), u, order) if order else _sympy_expr(m, u)
    return sp.lambdify(u, expr, modules="numpy")


def alpha_star_derivative(m: AttenuationModel, omega, order: int):
    """``d^order alpha_star / dw^order`` evaluated analytically.

    The derivative is taken symbolically in ``u = -i w`` and converted with
    ``d/dw = -i d/du``.  The value at ``w = 0`` is not defined for every
    model and is returned as whatever the formula yields (possibly inf/nan).
    """
    if order < 0:
        raise ValidationError("derivative order must be nonnegative")
    w = np.asarray(omega, dtype=float)
    if order == 0:
        return alpha_star(m, w, check=False)
    fn = _derivative_fn(m, int(order))
    u = -1j * w
    with np.errstate(all="ignore"):
        val = np.asarray(fn(u), dtype=complex) * np.ones_like(u)
    out = (-1j) ** order * val
    return out[()] if out.ndim == 0 else out


__all__ = [
    "AttenuationModel",
    "CausalityExpectation",
    "Classification",
    "Kind",
    "alpha_star",
    "alpha_star_derivative",
    "alpha_star_u",
    "attenuation_law",
    "beta_star",
    "bulk_delay",
    "check_branch",
    "expected_causality",
    "small_omega_alpha0",
]

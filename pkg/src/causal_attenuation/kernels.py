"""Time-domain kernels and Green functions.

The medium kernel of an attenuation model at distance ``r`` is

    K(r, t) = (1/sqrt(2 pi)) F^-1{ exp(-alpha_star(w) r) }(t)

and the attenuated Green function of a point source is

    G(r, t) = K(r, t - r/c0) / (4 pi r).

With the transform conventions of :mod:`causal_attenuation.spectral` the
factor ``1/sqrt(2 pi)`` makes ``K`` the identity kernel of time convolution
when the model is lossless.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.signal.windows import tukey
from scipy.special import erf

from .errors import UnresolvedShift, ValidationError
from .models import AttenuationModel, Kind, alpha_star, alpha_star_u, bulk_delay
from .spectral import (
    SQRT_2PI,
    ComplexSpectrum,
    SpectralGrid,
    TimeSignal,
    apply_multiplier,
    frac_power,
    inverse_ft,
    make_grid,
    principal_power,
    sample_spectrum,
)

#: fraction of the band, counted from the Nyquist edge, used for truncation bounds
TRUNCATION_BAND = 0.05
#: Tukey taper fraction used when windowing is requested
TUKEY_ALPHA = 0.1


# grids -------------------------------------------------------------------


def figure_grid() -> SpectralGrid:
    """Grid used for the power-law and Szabo figure configurations."""
    return make_grid(2**18, 2.0**-14, -4.0)


def thermo_viscous_grid(tau0: float, n: int = 2**20, omega_max_tau0: float = 50.0) -> SpectralGrid:
    """Grid resolving the spectral decay of the thermo-viscous families.

    ``dt = pi tau0 / omega_max_tau0`` so that ``omega_max = omega_max_tau0 / tau0``;
    a quarter of the window lies at negative times.
    """
    if tau0 <= 0:
        raise ValidationError("tau0 must be positive")
    dt = np.pi * tau0 / omega_max_tau0
    return make_grid(n, dt, -(n // 4) * dt)


def default_grid(m: AttenuationModel) -> SpectralGrid:
    """Grid used by the command line when none is given."""
    if m.kind in (Kind.THERMO_VISCOUS, Kind.CAUSAL_THERMO_VISCOUS) and m.tau0 > 0:
        return thermo_viscous_grid(m.tau0)
    return figure_grid()


# data types ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KernelField:
    """Kernel (or pressure) samples for several radii on a common grid."""

    grid: SpectralGrid
    radii: np.ndarray
    values: np.ndarray
    model: AttenuationModel

    def __post_init__(self) -> None:
        r = np.array(self.radii, dtype=float)
        v = np.array(self.values, dtype=float)
        if r.ndim != 1 or r.size == 0:
            raise ValidationError("radii must be a nonempty 1-d array")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValidationError("radii must be positive and strictly ascending")
        if v.shape != (r.size, self.grid.n):
            raise ValidationError(f"values must have shape {(r.size, self.grid.n)}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("values must be finite")
        r.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)

    def row(self, i: int) -> TimeSignal:
        return TimeSignal(self.grid, self.values[i])


@dataclass(frozen=True, eq=False)
class GreenTrace:
    """Green function samples at one radius.

    ``shifted`` traces are front-aligned: sample ``t`` holds ``G(r, t + r/c0)``.
    """

    r: float
    grid: SpectralGrid
    samples: np.ndarray
    shifted: bool

    def __post_init__(self) -> None:
        s = np.array(self.samples, dtype=float)
        if s.shape != (self.grid.n,) or not np.all(np.isfinite(s)):
            raise ValidationError("trace samples must be finite and match the grid")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def signal(self) -> TimeSignal:
        return TimeSignal(self.grid, self.samples)


# spectra -----------------------------------------------------------------


def _ascending_window(grid: SpectralGrid) -> np.ndarray:
    # periodic Tukey window centred on w=0, mapped to fftfreq order
    return np.fft.ifftshift(tukey(grid.n, TUKEY_ALPHA, sym=False))


def kernel_spectrum(
    m: AttenuationModel,
    r: float,
    grid: SpectralGrid,
    delay: float = 0.0,
    window: bool = False,
) -> ComplexSpectrum:
    """Samples of ``exp(-alpha_star(w) r) exp(i w delay)`` on the grid."""
    if r < 0:
        raise ValidationError("r must be nonnegative")

    def fn(w):
        s = np.exp(-alpha_star(m, w) * r)
        if delay:
            s = s * np.exp(1j * w * delay)
        if window:
            s = s * _ascending_window(grid)
        return s

    return sample_spectrum(grid, fn)


def truncation_bound(spec: ComplexSpectrum) -> float:
    """Largest spectral magnitude near the band edge relative to the peak.

    A rough bound on what is lost by truncating the spectrum at the Nyquist
    frequency.
    """
    a = np.abs(spec.samples)
    peak = a.max()
    if peak == 0:
        return 0.0
    edge = np.abs(spec.omega) >= (1 - TRUNCATION_BAND) * spec.grid.omega_max
    return float(a[edge].max() / peak)


# kernels ---------------------------------------------------------------------


def kernel_K(m: AttenuationModel, r: float, grid: SpectralGrid, window: bool = False) -> TimeSignal:
    """Medium kernel ``K(r, .)``.

    For a lossless model this is the discrete delta ``1/dt`` at ``t = 0``.
    """
    if r <= 0:
        raise ValidationError("r must be positive")
    spec = kernel_spectrum(m, r, grid, window=window)
    k = inverse_ft(spec)
    return TimeSignal(grid, k.samples / SQRT_2PI, "1/s")


def _field(
    grid: SpectralGrid,
    radii: Sequence[float],
    fn: Callable[[float], np.ndarray],
    workers: int | None,
) -> np.ndarray:
    radii = list(radii)
    if workers == 1 or len(radii) == 1:
        rows = [fn(r) for r in radii]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(fn, radii))
    return np.vstack(rows) if rows else np.zeros((0, grid.n))


def kernel_field(
    m: AttenuationModel,
    radii: Sequence[float],
    grid: SpectralGrid,
    window: bool = False,
    workers: int | None = None,
) -> KernelField:
    """:func:`kernel_K` for each radius, computed in parallel."""
    vals = _field(grid, radii, lambda r: kernel_K(m, r, grid, window).samples, workers)
    return KernelField(grid, np.asarray(radii, float), vals, m)


def backward_difference_symbol(grid: SpectralGrid) -> np.ndarray:
    """``(1 - exp(i w dt)) / dt``: the symbol of ``f(t) - f(t - dt)`` over ``dt``.

    Tends to ``-i w`` as ``dt -> 0`` and maps the right half ``u``-plane into
    the symbol of a one-sided (causal) difference operator.
    """
    return (1.0 - np.exp(1j * grid.omega * grid.dt)) / grid.dt


def kernel_Kstar(m: AttenuationModel, grid: SpectralGrid, symbol: str = "exact") -> TimeSignal:
    """Kernel of the attenuation operator, ``(1/sqrt(2 pi)) F^-1{alpha_star}``.

    Parameters
    ----------
    symbol : {"exact", "backward"}
        ``"exact"`` samples ``alpha_star(w)`` on the grid.  Since
        ``alpha_star`` typically grows with ``|w|`` the result is a
        distribution and the truncated samples ring on both sides of
        ``t = 0``.  ``"backward"`` evaluates ``alpha_star`` at the
        backward-difference symbol instead of ``u = -i w``; for a coefficient
        analytic in the right half-plane this gives an exactly one-sided
        lattice kernel that converges to the same distribution as
        ``dt -> 0``.
    """
    if symbol == "exact":
        spec = sample_spectrum(grid, lambda w: alpha_star(m, w))
    elif symbol == "backward":
        u = backward_difference_symbol(grid)
        spec = sample_spectrum(grid, lambda w: alpha_star_u(m, u))
    else:
        raise ValidationError(f"unknown symbol {symbol!r}")
    return TimeSignal(grid, inverse_ft(spec).samples / SQRT_2PI, "1/(m s)")


def kernel_Kstar_prime(m: AttenuationModel, grid: SpectralGrid) -> TimeSignal:
    """Kernel of the second radial derivative of ``beta_star``.

    In standard form ``beta_star = alpha_star r`` is linear in ``r``, so this
    kernel vanishes identically.
    """
    return TimeSignal(grid, np.zeros(grid.n), "1/(m^2 s)")


def _t_half_closed(t, tau0: float):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.sqrt(2.0) * np.exp(-t[pos] / tau0) / np.sqrt(tau0 * t[pos])
    return out


def _t_half_primitive(t, tau0: float):
    # int_0^t of the closed form, zero for t <= 0
    return SQRT_2PI * erf(np.sqrt(np.maximum(t, 0.0) / tau0))


def kernel_T_half(tau0: float, grid: SpectralGrid, mode: str = "cell") -> TimeSignal:
    """Closed-form kernel of the thermo-viscous half operator.

    ``sqrt(2 pi) H(t) exp(-t/tau0) / (Gamma(1/2) sqrt(tau0 t))``.  Its spectrum
    is ``(1 - i tau0 w)**(-1/2)`` and its integral is ``sqrt(2 pi)``.

    Parameters
    ----------
    mode : {"cell", "midpoint"}
        ``"cell"`` stores the exact average over ``[t - dt/2, t + dt/2]``
        (an erf difference), so the samples sum to the integral of the kernel
        over the window.  ``"midpoint"`` stores point values, with the
        ``t = 0`` bin evaluated at ``t = dt/2``.
    """
    if tau0 <= 0:
        raise ValidationError("tau0 must be positive")
    dt = grid.dt
    if mode == "cell":
        t = grid.t
        s = (_t_half_primitive(t + dt / 2, tau0) - _t_half_primitive(t - dt / 2, tau0)) / dt
    elif mode == "midpoint":
        s = _t_half_closed(grid.t, tau0)
        s[grid.zero_index] = _t_half_closed(np.array([dt / 2]), tau0)[0]
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return TimeSignal(grid, s, "1/s")


def t_half_spectral(tau0: float, grid: SpectralGrid) -> TimeSignal:
    """Spectral inversion of ``(1 - i tau0 w)**(-1/2)``, normalized like :func:`kernel_T_half`."""
    if tau0 <= 0:
        raise ValidationError("tau0 must be positive")
    return inverse_ft(sample_spectrum(grid, t_half_multiplier(tau0)), "1/s")


# Green functions -------------------------------------------------------------


def check_window(m: AttenuationModel, r: float, grid: SpectralGrid, shifted: bool = False) -> None:
    """Raise :class:`UnresolvedShift` if a Green trace at ``r`` would wrap around.

    The front ``r/c0`` and the low-frequency bulk arrival of
    :func:`~causal_attenuation.models.bulk_delay` must both precede the last
    sample; otherwise the periodic inverse transform folds the pulse onto
    negative times.  Shifted traces drop the front delay.
    """
    front = 0.0 if shifted else r / m.c0
    bulk = bulk_delay(m, r) - r / m.c0 + front
    if front >= grid.t_end:
        raise UnresolvedShift(f"travel time {front:.6g} s exceeds the window end {grid.t_end:.6g} s")
    if bulk >= grid.t_end:
        raise UnresolvedShift(
            f"low-frequency arrival {bulk:.6g} s exceeds the window end {grid.t_end:.6g} s"
        )


def green_trace(
    m: AttenuationModel,
    r: float,
    grid: SpectralGrid,
    shifted: bool = False,
    window: bool = False,
) -> GreenTrace:
    """Green function ``G(r, t) = K(r, t - r/c0) / (4 pi r)``.

    Unshifted traces apply the travel-time delay ``r/c0`` as an exact phase
    ramp in frequency.

    Raises
    ------
    UnresolvedShift
        If the pulse would not fit in the window (see :func:`check_window`).
    """
    if r <= 0:
        raise ValidationError("r must be positive")
    delay = 0.0 if shifted else r / m.c0
    check_window(m, r, grid, shifted)
    spec = kernel_spectrum(m, r, grid, delay=delay, window=window)
    g = inverse_ft(spec).samples / (SQRT_2PI * 4 * np.pi * r)
    return GreenTrace(float(r), grid, g, shifted)


def helmholtz_residual(m: AttenuationModel, radii: Sequence[float], grid: SpectralGrid) -> float:
    """Finite-difference residual of the attenuated Helmholtz equation.

    With ``k = alpha_star - i w / c0`` the Green function spectrum
    ``exp(-k r) / (sqrt(2 pi) 4 pi r)`` satisfies ``lap G = k**2 G`` away from
    the origin.  The radial Laplacian ``G'' + 2 G' / r`` is replaced by
    central differences across the (uniformly spaced) radii and the largest
    relative residual over interior radii and grid frequencies is returned.
    Ratios ``G(r_j)/G(r_i)`` are formed analytically so that strongly damped
    frequencies do not underflow.
    """
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size < 5:
        raise ValidationError("need at least 5 radii")
    if np.any(r <= 0):
        raise ValidationError("radii must be positive")
    h = np.diff(r)
    if np.any(h <= 0) or np.ptp(h) > 1e-9 * h.mean():
        raise ValidationError("radii must be uniformly spaced and ascending")
    dr = h.mean()
    w = grid.omega
    k = alpha_star(m, w) - 1j * w / m.c0
    worst = 0.0
    for i in range(1, r.size - 1):
        ri = r[i]
        rp = np.exp(-k * dr) * ri / r[i + 1]
        rm = np.exp(k * dr) * ri / r[i - 1]
        lap = (rp - 2.0 + rm) / dr**2 + (2.0 / ri) * (rp - rm) / (2 * dr)
        worst = max(worst, float(np.max(np.abs(lap - k**2))))
    return worst


# operators -------------------------------------------------------------------


def t_half_multiplier(tau0: float) -> Callable[[np.ndarray], np.ndarray]:
    """``(1 - i tau0 w)**(-1/2)``."""
    return lambda w: 1.0 / np.sqrt(1.0 - 1j * tau0 * np.asarray(w))


def l_half_multiplier(tau0: float) -> Callable[[np.ndarray], np.ndarray]:
    """``(1 - i tau0 w)**(1/2)``, the inverse of :func:`t_half_multiplier`."""
    return lambda w: np.sqrt(1.0 - 1j * tau0 * np.asarray(w))


def l_multiplier(tau0: float) -> Callable[[np.ndarray], np.ndarray]:
    """``1 - i tau0 w``, the symbol of ``I + tau0 d/dt``."""
    return lambda w: 1.0 - 1j * tau0 * np.asarray(w)


def l_gamma_multiplier(tau0: float, gamma: float) -> Callable[[np.ndarray], np.ndarray]:
    """``1 + (-i tau0 w)**(gamma - 1)``."""
    return lambda w: 1.0 + principal_power(-1j * tau0 * np.asarray(w), gamma - 1)


def t_half_gamma_multiplier(tau0: float, gamma: float) -> Callable[[np.ndarray], np.ndarray]:
    """``(1 + (-i tau0 w)**(gamma - 1))**(-1/2)``."""
    lg = l_gamma_multiplier(tau0, gamma)
    return lambda w: 1.0 / np.sqrt(lg(w))


def frac_derivative(f: TimeSignal, gamma: float) -> TimeSignal:
    """Fractional time derivative ``D_t**gamma`` with symbol ``(-i w)**gamma``."""
    return apply_multiplier(f, lambda w: frac_power(w, gamma), f.unit)


def apply_operator(f: TimeSignal, multiplier: Callable[[np.ndarray], np.ndarray]) -> TimeSignal:
    """Apply a spectral multiplier such as :func:`t_half_multiplier` to ``f``."""
    return apply_multiplier(f, multiplier, f.unit)


__all__ = [
    "GreenTrace",
    "KernelField",
    "apply_operator",
    "backward_difference_symbol",
    "check_window",
    "default_grid",
    "figure_grid",
    "frac_derivative",
    "green_trace",
    "helmholtz_residual",
    "kernel_K",
    "kernel_Kstar",
    "kernel_Kstar_prime",
    "kernel_T_half",
    "kernel_field",
    "kernel_spectrum",
    "l_gamma_multiplier",
    "l_half_multiplier",
    "l_multiplier",
    "t_half_gamma_multiplier",
    "t_half_multiplier",
    "t_half_spectral",
    "thermo_viscous_grid",
    "truncation_bound",
]

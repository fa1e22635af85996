"""Quantitative causality diagnostics.

* :func:`noncausality_metric` measures the share of a kernel's energy that
  sits at negative times.
* :func:`front_arrival` and :func:`travel_time_fit` locate wavefronts and
  test that travel time is linear in distance.
* :func:`kk_residual` checks the Kramers-Kronig pairing between real and
  imaginary parts of a derivative of ``alpha_star``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.signal import fftconvolve
from scipy.stats import linregress

from .errors import DegenerateSignal, NonDecayingIntegrand, ValidationError
from .kernels import GreenTrace, green_trace, kernel_K, kernel_spectrum, truncation_bound
from .models import AttenuationModel, Classification, alpha_star_derivative
from .spectral import SpectralGrid, TimeSignal

SCHEMA_VERSION = 1
DEFAULT_THRESHOLD = 1e-3
DEFAULT_LEVEL = 1e-4
#: guard band in units of dt
DEFAULT_GUARD = 4
_TINY = 1e-300


@dataclass(frozen=True)
class CausalityReport:
    """Outcome of a negative-time energy test.

    ``classification`` is ``NonCausal`` exactly when ``metric > threshold``.
    """

    metric: float
    epsilon: float
    classification: Classification
    threshold: float
    windowed: bool = False
    truncation_bound: float = 0.0
    norm: str = "l2"

    def __post_init__(self) -> None:
        if not 0.0 <= self.metric <= 1.0:
            raise ValidationError(f"metric must lie in [0, 1], got {self.metric}")
        if self.classification is not classify(self.metric, self.threshold):
            raise ValidationError("classification disagrees with metric and threshold")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["classification"] = self.classification.value
        d["schema_version"] = SCHEMA_VERSION
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CausalityReport":
        d = dict(d)
        d.pop("schema_version", None)
        d["classification"] = Classification(d["classification"])
        return cls(**d)


@dataclass(frozen=True, eq=False)
class FrontFit:
    """Least-squares line ``arrival = slope * r + intercept``."""

    radii: np.ndarray
    arrivals: np.ndarray
    slope: float
    intercept: float
    r_squared: float
    front_speed: float

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.arrivals)):
            raise ValidationError("arrivals must be finite")
        if not self.front_speed > 0:
            raise ValidationError("front speed must be positive")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "radii": [float(x) for x in self.radii],
            "arrivals": [float(x) for x in self.arrivals],
            "slope": float(self.slope),
            "intercept": float(self.intercept),
            "r_squared": float(self.r_squared),
            "front_speed": float(self.front_speed),
        }


# negative-time energy ---------------------------------------------------------


def noncausality_metric(
    f: TimeSignal, epsilon: float | None = None, norm: str = "l2", origin: float = 0.0
) -> float:
    """Share of ``f`` located before ``origin - epsilon``.

    With ``norm="l2"`` this is ``sum_{t < origin-eps} f**2 / sum f**2``; with
    ``norm="linf"`` the ratio of the largest magnitudes.

    Parameters
    ----------
    epsilon : float, optional
        Guard band, at least ``2*dt``.  Defaults to ``4*dt``.
    """
    dt = f.grid.dt
    eps = DEFAULT_GUARD * dt if epsilon is None else float(epsilon)
    if eps < 2 * dt * (1 - 1e-12):
        raise ValidationError("epsilon must be at least 2*dt")
    s = f.samples
    before = f.t < origin - eps
    if norm == "l2":
        total = float(np.dot(s, s))
        if total < _TINY:
            raise DegenerateSignal("signal has no energy")
        part = float(np.dot(s[before], s[before]))
    elif norm == "linf":
        total = float(np.max(np.abs(s)))
        if total < _TINY:
            raise DegenerateSignal("signal is identically zero")
        part = float(np.max(np.abs(s[before]), initial=0.0))
    else:
        raise ValidationError(f"unknown norm {norm!r}")
    return min(1.0, part / total)


def classify(metric: float, threshold: float = DEFAULT_THRESHOLD) -> Classification:
    """``NonCausal`` iff ``metric > threshold``."""
    if not 0 < threshold < 0.5:
        raise ValidationError("threshold must lie in (0, 0.5)")
    return Classification.NON_CAUSAL if metric > threshold else Classification.CAUSAL


def assess(
    f: TimeSignal,
    epsilon: float | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    windowed: bool = False,
    truncation: float = 0.0,
    norm: str = "l2",
) -> CausalityReport:
    """Build a :class:`CausalityReport` for a signal."""
    eps = DEFAULT_GUARD * f.grid.dt if epsilon is None else float(epsilon)
    metric = noncausality_metric(f, eps, norm)
    return CausalityReport(
        metric=metric,
        epsilon=eps,
        classification=classify(metric, threshold),
        threshold=threshold,
        windowed=windowed,
        truncation_bound=truncation,
        norm=norm,
    )


def kernel_report(
    m: AttenuationModel,
    r: float,
    grid: SpectralGrid,
    epsilon: float | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    window: bool = False,
    norm: str = "l2",
) -> tuple[TimeSignal, CausalityReport]:
    """Kernel ``K(r, .)`` of ``m`` together with its causality report."""
    k = kernel_K(m, r, grid, window=window)
    bound = truncation_bound(kernel_spectrum(m, r, grid, window=window))
    return k, assess(k, epsilon, threshold, window, bound, norm)


# fronts -----------------------------------------------------------------------


def front_arrival(trace: GreenTrace, level: float = DEFAULT_LEVEL) -> float:
    """Earliest time at which the cumulative energy reaches ``level`` of the total.

    Linear interpolation is used between samples.
    """
    if trace.shifted:
        raise ValidationError("front arrival needs an unshifted trace")
    if not 0 < level <= 0.1:
        raise ValidationError("level must lie in (0, 0.1]")
    e = np.cumsum(trace.samples**2)
    total = e[-1]
    if total < _TINY:
        raise DegenerateSignal("trace has no energy")
    target = level * total
    j = int(np.searchsorted(e, target))
    t = trace.grid.t
    if j == 0:
        return float(t[0])
    e0, e1 = e[j - 1], e[j]
    frac = (target - e0) / (e1 - e0) if e1 > e0 else 0.0
    return float(t[j - 1] + frac * trace.grid.dt)


def travel_time_fit(
    m: AttenuationModel,
    radii: Sequence[float],
    grid: SpectralGrid,
    level: float = DEFAULT_LEVEL,
    workers: int | None = None,
) -> FrontFit:
    """Fit arrival time against distance over several radii."""
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size < 4:
        raise ValidationError("need at least 4 radii")

    def arrival(ri: float) -> float:
        return front_arrival(green_trace(m, ri, grid), level)

    with ThreadPoolExecutor(max_workers=workers) as ex:
        arrivals = np.array(list(ex.map(arrival, r)))
    fit = linregress(r, arrivals)
    slope = float(fit.slope)
    if slope <= 0:
        raise ValidationError(f"arrival times do not increase with distance (slope {slope:.3g})")
    return FrontFit(
        radii=r,
        arrivals=arrivals,
        slope=slope,
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue**2),
        front_speed=1.0 / slope,
    )


# Kramers-Kronig ----------------------------------------------------------------


def _lattice_hilbert(x: np.ndarray) -> np.ndarray:
    """Hilbert transform on an infinite lattice of data supported on ``x``.

    Kernel ``2/(pi k)`` at odd offsets ``k``, applied by linear (not cyclic)
    convolution so no periodic image of the data enters.
    """
    n = x.size
    k = np.arange(-(n - 1), n)
    ker = np.zeros(k.size)
    odd = k % 2 == 1
    ker[odd] = 2.0 / (np.pi * k[odd])
    return fftconvolve(x, ker, mode="same")


def _quad(fn, a, b, **kw) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return quad(fn, a, b, limit=200, **kw)[0]


def _tail_moments(re, omega_e: float, n_moments: int) -> np.ndarray:
    """Finite-part moments ``int_{omega_e}^inf re(s) s**(-j-1) ds``.

    ``re`` is split into a fitted power law ``c s**p``, whose moments are
    continued analytically to ``-c omega_e**(p-j) / (p-j)``, and a remainder
    integrated numerically.
    """
    r1, r2, r4 = re(omega_e), re(2 * omega_e), re(4 * omega_e)
    growth = 0.0
    if r1 != 0 and r2 != 0 and r1 * r2 > 0:
        p = math.log2(r2 / r1)
        c = r1 / omega_e**p
        if r4 * r2 > 0:
            drift = abs(math.log2(r4 / r2) - p)
            if p >= 0 and drift > 0.02:
                raise NonDecayingIntegrand(
                    f"tail is not a power law (exponent drifts by {drift:.3g})"
                )
        growth = p
    else:
        p, c = 0.0, 0.0
    if c != 0 and growth >= n_moments - 1:
        raise NonDecayingIntegrand(
            f"integrand grows like |w|**{growth:.3g}; increase the derivative index"
        )
    out = np.empty(n_moments)
    for j in range(n_moments):
        if c != 0 and abs(p - j) < 1e-6:
            raise NonDecayingIntegrand("logarithmically divergent tail moment")
        fp = -c * omega_e ** (p - j) / (p - j) if c != 0 else 0.0
        rem = _quad(lambda s: (re(s) - c * s**p) * s ** (-j - 1), omega_e, np.inf)
        out[j] = fp + rem
    return out


def kk_residual(
    m: AttenuationModel,
    grid: SpectralGrid,
    deriv_index: int = 1,
    extension: int = 2,
    kmin: int = 4,
    n_moments: int = 4,
) -> float:
    """Relative Kramers-Kronig residual of ``alpha_star**(m)``.

    Returns ``||Im a - H{Re a}|| / ||Im a||`` over the band
    ``kmin*dw <= |w| < omega_max/2`` where ``a`` is the ``deriv_index``-th
    frequency derivative of ``alpha_star`` and ``H`` is the Hilbert transform.

    The Hilbert transform of the truncated samples is corrected for the
    missing tails:

    * the derivative is sampled analytically on a lattice with the grid's
      frequency step reaching ``extension`` times beyond ``omega_max``;
    * the ``w = 0`` sample is replaced by its cell average, since several
      derivatives have an integrable singularity there;
    * the lattice transform uses the aperiodic kernel ``2/(pi k)`` on odd
      offsets;
    * the contribution of ``|s| > Omega`` is added as the series
      ``-(1/pi) sum_j w**j int_{|s|>Omega} Re a(s) s**(-j-1) ds``, with
      moments of power-law growth taken as finite parts.

    Raises
    ------
    DegenerateSignal
        If ``alpha_star`` vanishes identically.
    NonDecayingIntegrand
        If the real part grows too fast for the tail series.
    """
    if deriv_index < 0:
        raise ValidationError("deriv_index must be nonnegative")
    if extension < 1 or kmin < 1:
        raise ValidationError("extension and kmin must be at least 1")
    dw = grid.domega
    half = extension * (grid.n // 2)
    k = np.arange(-half, half + 1)
    w = k * dw
    a = np.empty(w.size, dtype=complex)
    nz = k != 0
    a[nz] = alpha_star_derivative(m, w[nz], deriv_index)
    if not np.all(np.isfinite(a[nz])):
        raise NonDecayingIntegrand("derivative is not finite on the lattice")

    def re_at(s):
        return float(np.real(alpha_star_derivative(m, np.array([s]), deriv_index))[0])

    def im_at(s):
        return float(np.imag(alpha_star_derivative(m, np.array([s]), deriv_index))[0])

    h = dw / 2
    a[half] = complex(
        (_quad(re_at, 0, h) + _quad(lambda s: re_at(-s), 0, h)) / dw,
        (_quad(im_at, 0, h) + _quad(lambda s: im_at(-s), 0, h)) / dw,
    )
    scale = np.max(np.abs(a))
    if scale == 0:
        raise DegenerateSignal("alpha_star derivative vanishes identically")

    hil = _lattice_hilbert(a.real)
    omega_e = (half + 0.5) * dw
    pos = _tail_moments(re_at, omega_e, n_moments)
    neg = _tail_moments(lambda s: re_at(-s), omega_e, n_moments)
    for j in range(n_moments):
        hil -= (pos[j] + (-1) ** (j + 1) * neg[j]) / np.pi * w**j

    band = (np.abs(k) >= kmin) & (np.abs(w) < grid.omega_max / 2)
    num = np.linalg.norm((a.imag - hil)[band])
    den = np.linalg.norm(a.imag[band])
    if den < _TINY:
        raise DegenerateSignal("imaginary part vanishes on the band")
    return float(num / den)


__all__ = [
    "DEFAULT_LEVEL",
    "DEFAULT_THRESHOLD",
    "SCHEMA_VERSION",
    "CausalityReport",
    "FrontFit",
    "assess",
    "classify",
    "front_arrival",
    "kernel_report",
    "kk_residual",
    "noncausality_metric",
    "travel_time_fit",
]

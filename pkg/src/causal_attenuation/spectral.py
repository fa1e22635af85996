"""Discrete Fourier and Hilbert machinery on a time/frequency lattice.

Conventions
-----------
The continuous transform pair used throughout the package is

.. math::

    \\mathcal{F} f(\\omega) = \\frac{1}{\\sqrt{2\\pi}} \\int e^{i\\omega t} f(t)\\,dt,
    \\qquad
    \\mathcal{F}^{-1} g(t) = \\frac{1}{\\sqrt{2\\pi}} \\int e^{-i\\omega t} g(\\omega)\\,d\\omega .

With this choice a delay multiplies the spectrum by :math:`e^{+ia\\omega}`,
``F{f(t - a)} = exp(i a w) F{f}``, and a delta at ``t = a`` has spectrum
``exp(i a w) / sqrt(2 pi)``.

Time samples sit at ``t_j = t0 + j*dt`` and frequency samples follow numpy's
``fftfreq`` ordering, ``w_k = 2*pi*fftfreq(n, dt)[k]``.  The first-sample
offset ``t0`` must be an integer multiple of ``dt`` so that ``t = 0`` is a
lattice point; the corresponding phase ramp is then exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import ImaginaryLeakage, ValidationError

SQRT_2PI = float(np.sqrt(2.0 * np.pi))

#: relative tolerance on imaginary residue accepted by :func:`inverse_ft`
LEAKAGE_TOL = 1e-8
#: relative tolerance of the Hermitian-symmetry check on spectra
HERMITIAN_TOL = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpectralGrid:
    """Paired uniform sampling of time and angular frequency.

    Parameters
    ----------
    n : int
        Number of samples, a power of two no smaller than 8.
    dt : float
        Time step in seconds.
    t0 : float
        Time of the first sample.  Must satisfy ``t0 <= -n*dt/4`` and be an
        integer multiple of ``dt``.
    """

    n: int
    dt: float
    t0: float

    def __post_init__(self) -> None:
        n = self.n
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise ValidationError(f"n must be an integer, got {n!r}")
        if n < 8 or (n & (n - 1)) != 0:
            raise ValidationError(f"n must be a power of two >= 8, got {n}")
        object.__setattr__(self, "n", int(n))
        dt = float(self.dt)
        t0 = float(self.t0)
        if not np.isfinite(dt) or dt <= 0:
            raise ValidationError(f"dt must be positive, got {self.dt!r}")
        if not np.isfinite(t0):
            raise ValidationError("t0 must be finite")
        if t0 > -n * dt / 4 * (1 - 1e-12):
            raise ValidationError(
                f"t0={t0} leaves less than a quarter of the window at t<0 "
                f"(need t0 <= {-n * dt / 4})"
            )
        k = round(-t0 / dt)
        if abs(-t0 / dt - k) > 1e-9 * max(1.0, k):
            raise ValidationError("t0 must be an integer multiple of dt")
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "t0", t0)

    @property
    def domega(self) -> float:
        """Frequency step ``2*pi/(n*dt)``."""
        return 2.0 * np.pi / (self.n * self.dt)

    @property
    def omega_max(self) -> float:
        """Nyquist angular frequency ``pi/dt``."""
        return np.pi / self.dt

    @property
    def zero_index(self) -> int:
        """Index of the ``t = 0`` sample."""
        return int(round(-self.t0 / self.dt))

    @property
    def t_end(self) -> float:
        """Time of the last sample."""
        return self.t0 + (self.n - 1) * self.dt

    @cached_property
    def t(self) -> np.ndarray:
        """Sample times, ascending."""
        j = np.arange(self.n) - self.zero_index
        return _readonly(j * self.dt)

    @cached_property
    def omega(self) -> np.ndarray:
        """Angular frequencies in ``fftfreq`` order."""
        return _readonly(np.fft.fftfreq(self.n) * (2.0 * np.pi / self.dt))

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(i w_k t0) with the integer product reduced mod n for accuracy
        k = np.fft.fftfreq(self.n, 1.0 / self.n).astype(np.int64)
        m = -self.zero_index
        return _readonly(np.exp(2j * np.pi * ((k * m) % self.n) / self.n))

    def index_of(self, t: float) -> int:
        """Index of the lattice time ``t``; raises if ``t`` is off-lattice."""
        x = (t - self.t0) / self.dt
        j = int(round(x))
        if abs(x - j) > 1e-6 or not 0 <= j < self.n:
            raise ValidationError(f"t={t} is not a sample time of the grid")
        return j

    def to_dict(self) -> dict:
        return {"n": self.n, "dt": self.dt, "t0": self.t0}


def make_grid(n: int, dt: float, t0: float) -> SpectralGrid:
    """Build and validate a :class:`SpectralGrid`."""
    return SpectralGrid(n=n, dt=dt, t0=t0)


@dataclass(frozen=True, eq=False)
class TimeSignal:
    """Real samples of a function of time on ``grid.t``."""

    grid: SpectralGrid
    samples: np.ndarray
    unit: str = ""

    def __post_init__(self) -> None:
        s = np.array(self.samples, dtype=float)
        if s.shape != (self.grid.n,):
            raise ValidationError(f"expected {self.grid.n} samples, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValidationError("time samples must be finite")
        object.__setattr__(self, "samples", _readonly(s))

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    def energy(self) -> float:
        return float(np.sum(self.samples**2))


def hermitian_defect(samples: np.ndarray) -> float:
    """Largest deviation from ``s(-w) = conj(s(w))`` relative to ``max|s|``.

    ``samples`` are in ``fftfreq`` order.  The Nyquist bin has no partner
    and must therefore be real.
    """
    s = np.asarray(samples)
    n = s.size
    scale = np.max(np.abs(s)) if n else 0.0
    if scale == 0.0:
        return 0.0
    half = n // 2
    pos = s[1:half]
    neg = s[n - 1 : half : -1]
    d = max(
        np.max(np.abs(pos - np.conj(neg)), initial=0.0),
        abs(s[0].imag),
        abs(s[half].imag) if n % 2 == 0 else 0.0,
    )
    return float(d / scale)


@dataclass(frozen=True, eq=False)
class ComplexSpectrum:
    """Complex samples on ``grid.omega``.

    ``hermitian=True`` claims that the samples are the spectrum of a real
    signal; the claim is checked on construction.
    """

    grid: SpectralGrid
    samples: np.ndarray
    hermitian: bool = False

    def __post_init__(self) -> None:
        s = np.array(self.samples, dtype=complex)
        if s.shape != (self.grid.n,):
            raise ValidationError(f"expected {self.grid.n} samples, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValidationError("spectral samples must be finite")
        if self.hermitian:
            d = hermitian_defect(s)
            if d > HERMITIAN_TOL:
                raise ValidationError(f"spectrum is not Hermitian (defect {d:.3g})")
        object.__setattr__(self, "samples", _readonly(s))

    @property
    def omega(self) -> np.ndarray:
        return self.grid.omega


def sample_spectrum(
    grid: SpectralGrid, fn: Callable[[np.ndarray], np.ndarray]
) -> ComplexSpectrum:
    """Evaluate a Hermitian function of frequency on the grid.

    The Nyquist sample at ``-pi/dt`` has no mirror partner on the lattice; it
    is replaced by its real part, which is the average of ``fn(-pi/dt)`` and
    ``fn(+pi/dt)`` for a Hermitian ``fn``.
    """
    s = np.array(fn(grid.omega), dtype=complex)
    s = np.broadcast_to(s, (grid.n,)).copy()
    s[grid.n // 2] = s[grid.n // 2].real
    return ComplexSpectrum(grid, s, hermitian=True)


def forward_ft(f: TimeSignal) -> ComplexSpectrum:
    """Discrete forward transform ``(1/sqrt(2 pi)) sum exp(i w t) f(t) dt``."""
    g = f.grid
    s = (g.dt / SQRT_2PI) * g.n * np.fft.ifft(f.samples) * g._phase
    # the transform of real data is Hermitian up to rounding; make it exact
    s[0] = s[0].real
    s[g.n // 2] = s[g.n // 2].real
    return ComplexSpectrum(g, s, hermitian=True)


def inverse_ft_complex(grid: SpectralGrid, samples: np.ndarray) -> np.ndarray:
    """Discrete inverse transform returning complex time samples."""
    return (grid.domega / SQRT_2PI) * np.fft.fft(np.conj(grid._phase) * samples)


def inverse_ft(s: ComplexSpectrum, unit: str = "") -> TimeSignal:
    """Discrete inverse transform ``(1/sqrt(2 pi)) sum exp(-i w t) s(w) dw``.

    Raises
    ------
    ImaginaryLeakage
        If the imaginary part of the result exceeds ``1e-8`` of the real part
        in 2-norm.
    """
    z = inverse_ft_complex(s.grid, s.samples)
    re = np.linalg.norm(z.real)
    im = np.linalg.norm(z.imag)
    if im > LEAKAGE_TOL * re:
        raise ImaginaryLeakage(
            f"imaginary residue {im:.3g} vs real part {re:.3g}"
            + ("" if s.hermitian else " (spectrum not marked Hermitian)")
        )
    return TimeSignal(s.grid, z.real, unit)


def convolve(f: TimeSignal, g: TimeSignal) -> TimeSignal:
    """Time convolution ``(f * g)(t) = int f(t - s) g(s) ds`` on the lattice.

    Evaluated through ``F{f * g} = sqrt(2 pi) F{f} F{g}``; the result is
    cyclic over the window.
    """
    if f.grid != g.grid:
        raise ValidationError("signals live on different grids")
    prod = SQRT_2PI * forward_ft(f).samples * forward_ft(g).samples
    return inverse_ft(ComplexSpectrum(f.grid, prod, hermitian=True))


def delta(grid: SpectralGrid, at: float = 0.0) -> TimeSignal:
    """Discrete delta: ``1/dt`` at the sample ``t = at``, zero elsewhere."""
    s = np.zeros(grid.n)
    s[grid.index_of(at)] = 1.0 / grid.dt
    return TimeSignal(grid, s)


def hilbert(s: np.ndarray) -> np.ndarray:
    """Discrete Hilbert transform of real samples on a uniform lattice.

    Uses the multiplier ``-i*sgn`` in the conjugate domain, i.e. the identity
    ``H{F f} = -i F{sgn f}``.  The input is treated as one period of a cyclic
    sequence, so any cyclic ordering of the lattice gives the same answer.
    Inputs should decay toward the ends of the array; otherwise the
    wrap-around produces edge artefacts.
    """
    x = np.asarray(s, dtype=float)
    mult = -1j * np.sign(np.fft.fftfreq(x.size))
    return np.fft.ifft(mult * np.fft.fft(x)).real


def principal_power(u, p: float):
    """Principal branch ``u**p = |u|**p exp(i p Arg u)`` for complex ``u``.

    ``0**p`` is 0 for ``p > 0`` and 1 for ``p == 0``; a negative power at the
    origin raises.
    """
    z = np.asarray(u, dtype=complex)
    zero = z == 0
    if p < 0 and np.any(zero):
        raise ValidationError("negative power of zero")
    with np.errstate(divide="ignore"):
        out = np.abs(z) ** p * np.exp(1j * p * np.angle(z))
    if p == 0:
        out = np.where(zero, 1.0 + 0j, out)
    else:
        out = np.where(zero, 0j, out)
    return out[()] if out.ndim == 0 else out


def frac_power(omega, gamma: float):
    """Fractional derivative symbol ``(-i w)**gamma`` on the principal branch.

    Equals ``|w|**gamma * exp(-i gamma (pi/2) sgn w)``.
    """
    w = np.asarray(omega, dtype=float)
    if gamma < 0 and np.any(w == 0):
        raise ValidationError("frac_power: pole at omega=0 for gamma<0")
    with np.errstate(divide="ignore"):
        out = np.abs(w) ** gamma * np.exp(-0.5j * np.pi * gamma * np.sign(w))
    return out[()] if out.ndim == 0 else out


def apply_multiplier(
    f: TimeSignal, fn: Callable[[np.ndarray], np.ndarray], unit: str = ""
) -> TimeSignal:
    """Apply the operator with spectral multiplier ``fn(w)`` to ``f``."""
    spec = forward_ft(f).samples * np.asarray(fn(f.grid.omega), dtype=complex)
    spec[f.grid.n // 2] = spec[f.grid.n // 2].real
    return inverse_ft(ComplexSpectrum(f.grid, spec, hermitian=True), unit)


__all__ = [
    "SQRT_2PI",
    "ComplexSpectrum",
    "SpectralGrid",
    "TimeSignal",
    "apply_multiplier",
    "convolve",
    "delta",
    "forward_ft",
    "frac_power",
    "hermitian_defect",
    "hilbert",
    "inverse_ft",
    "inverse_ft_complex",
    "make_grid",
    "principal_power",
    "sample_spectrum",
]

"""Pressure fields of a point source by Green-function convolution.

For a source ``f(t)`` at the origin the attenuated pressure at distance ``r``
is ``p(r, t) = (G(r, .) * f)(t)``.  In frequency this reads

    F{p}(r, w) = exp(-alpha_star(w) r) exp(i w r / c0) F{f}(w) / (4 pi r),

which is what :func:`propagate` evaluates.  :func:`propagate_direct` sums the
same convolution in the time domain and serves as an oracle on small grids.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import OutOfWindow, ValidationError
from .io import read_trace_csv, write_trace_csv
from .kernels import check_window, green_trace
from .models import AttenuationModel, alpha_star
from .spectral import ComplexSpectrum, SpectralGrid, TimeSignal, forward_ft, inverse_ft

#: largest grid accepted by the O(n**2) time-domain oracle
DIRECT_MAX_N = 4096


@dataclass(frozen=True, eq=False)
class SourcePulse:
    """Time profile of a point source; zero at negative times."""

    grid: SpectralGrid
    samples: np.ndarray
    description: str = ""

    def __post_init__(self) -> None:
        s = np.array(self.samples, dtype=float)
        if s.shape != (self.grid.n,):
            raise ValidationError(f"expected {self.grid.n} samples, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValidationError("source samples must be finite")
        if np.any(s[self.grid.t < 0] != 0):
            raise ValidationError("source must vanish for t < 0")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def signal(self) -> TimeSignal:
        return TimeSignal(self.grid, self.samples)


@dataclass(frozen=True, eq=False)
class PressureField:
    """Pressure samples ``values[i, j] = p(radii[i], t_j)``."""

    grid: SpectralGrid
    radii: np.ndarray
    values: np.ndarray
    model: AttenuationModel

    def __post_init__(self) -> None:
        r = np.array(self.radii, dtype=float)
        v = np.array(self.values, dtype=float)
        if r.ndim != 1 or r.size == 0 or np.any(r <= 0):
            raise ValidationError("radii must be a nonempty array of positive values")
        if v.shape != (r.size, self.grid.n):
            raise ValidationError(f"values must have shape {(r.size, self.grid.n)}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("values must be finite")
        r.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)

    def trace(self, i: int) -> TimeSignal:
        return TimeSignal(self.grid, self.values[i])


def gaussian_pulse(
    grid: SpectralGrid, center: float, width: float, amplitude: float = 1.0
) -> SourcePulse:
    """``amplitude * exp(-(t - center)**2 / (2 width**2))`` cut to ``t >= 0``."""
    if width <= 0:
        raise ValidationError("width must be positive")
    t = grid.t
    s = amplitude * np.exp(-0.5 * ((t - center) / width) ** 2)
    s[t < 0] = 0.0
    return SourcePulse(grid, s, f"gaussian(center={center:g}, width={width:g})")


def hann_pulse(grid: SpectralGrid, start: float, duration: float, amplitude: float = 1.0) -> SourcePulse:
    """Raised-cosine pulse supported on ``[start, start + duration]``."""
    if start < 0 or duration <= 0:
        raise ValidationError("need start >= 0 and duration > 0")
    x = (grid.t - start) / duration
    s = np.where((x >= 0) & (x <= 1), 0.5 * amplitude * (1 - np.cos(2 * np.pi * x)), 0.0)
    return SourcePulse(grid, s, f"hann(start={start:g}, duration={duration:g})")


def source_from_csv(path, grid: SpectralGrid) -> SourcePulse:
    """Read a two-column ``(t, f)`` CSV and resample it onto ``grid``.

    Values are linearly interpolated; outside the tabulated range, and at
    negative times, the source is zero.
    """
    t, f = read_trace_csv(path)
    order = np.argsort(t)
    s = np.interp(grid.t, t[order], f[order], left=0.0, right=0.0)
    s[grid.t < 0] = 0.0
    return SourcePulse(grid, s, f"csv:{path}")


def source_to_csv(path, src: SourcePulse):
    """Write ``src`` as a two-column ``(t, f)`` CSV."""
    return write_trace_csv(path, src.grid.t, src.samples, ("t", "f"))


def _check_radii(m: AttenuationModel, radii, grid: SpectralGrid) -> np.ndarray:
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    if r.ndim != 1 or r.size == 0 or np.any(r <= 0):
        raise ValidationError("radii must be positive")
    for ri in r:
        check_window(m, float(ri), grid)
    return r


def propagate(
    m: AttenuationModel,
    src: SourcePulse,
    radii: Sequence[float],
    grid: SpectralGrid | None = None,
    workers: int | None = None,
) -> PressureField:
    """Pressure field of ``src`` at each radius, computed in frequency."""
    grid = src.grid if grid is None else grid
    if grid != src.grid:
        raise ValidationError("source and grid differ")
    r = _check_radii(m, radii, grid)
    w = grid.omega
    src_spec = forward_ft(src.signal()).samples
    a = alpha_star(m, w)
    nyq = grid.n // 2

    def one(ri: float) -> np.ndarray:
        s = np.exp(-a * ri + 1j * w * (ri / m.c0)) * src_spec / (4 * np.pi * ri)
        s[nyq] = s[nyq].real
        return inverse_ft(ComplexSpectrum(grid, s, hermitian=True)).samples

    with ThreadPoolExecutor(max_workers=workers) as ex:
        rows = list(ex.map(one, r))
    return PressureField(grid, r, np.vstack(rows), m)


def propagate_direct(m: AttenuationModel, src: SourcePulse, radii: Sequence[float]) -> PressureField:
    """Time-domain oracle for :func:`propagate`.

    Evaluates ``p(t_i) = dt * sum_j G(t_i - t_j) f(t_j)`` with the lag taken
    cyclically over the window, the same discretization the frequency route
    realizes.  Limited to ``n <= 4096``.
    """
    grid = src.grid
    if grid.n > DIRECT_MAX_N:
        raise ValidationError(f"direct convolution is limited to n <= {DIRECT_MAX_N}")
    r = _check_radii(m, radii, grid)
    n, z = grid.n, grid.zero_index
    i = np.arange(n)
    lag = (i[:, None] - i[None, :] + z) % n
    rows = []
    for ri in r:
        g = green_trace(m, ri, grid).samples
        rows.append(grid.dt * (g[lag] @ src.samples))
    return PressureField(grid, r, np.vstack(rows), m)


def snapshot(field: PressureField, t: float) -> np.ndarray:
    """``(r, p(r, t))`` pairs, linearly interpolated in time.

    Returns an array of shape ``(len(radii), 2)``.
    """
    g = field.grid
    if not g.t0 <= t <= g.t_end:
        raise OutOfWindow(f"t={t} outside [{g.t0}, {g.t_end}]")
    x = (t - g.t0) / g.dt
    j = min(int(np.floor(x)), g.n - 2)
    frac = x - j
    p = (1 - frac) * field.values[:, j] + frac * field.values[:, j + 1]
    return np.column_stack([field.radii, p])


__all__ = [
    "PressureField",
    "SourcePulse",
    "gaussian_pulse",
    "hann_pulse",
    "propagate",
    "propagate_direct",
    "snapshot",
    "source_from_csv",
    "source_to_csv",
]

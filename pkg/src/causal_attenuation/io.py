"""File formats: CSV tables, ``.npy`` matrices with JSON sidecars, SVG plots."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .spectral import SpectralGrid

FLOAT_FMT = "%.17g"
#: SVG plots are decimated to at most this many (min, max) pairs
SVG_MAX_POINTS = 4000


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def read_json(path: Path):
    return json.loads(Path(path).read_text())


# radius x time fields --------------------------------------------------------


def write_field_csv(path: Path, radii: Sequence[float], t: np.ndarray, values: np.ndarray) -> Path:
    """Wide CSV: header ``r, t_0, t_1, ...``; one row per radius."""
    path = Path(path)
    values = np.asarray(values, dtype=float)
    with path.open("w", newline="") as fh:
        fh.write(",".join(["r"] + [_fmt(x) for x in t]) + "\n")
        for r, row in zip(radii, values):
            fh.write(",".join([_fmt(r)] + [_fmt(x) for x in row]) + "\n")
    return path


def read_field_csv(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`write_field_csv`; returns ``(radii, t, values)``."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "r":
        raise ValidationError("field CSV must start with an 'r' column")
    t = np.array([float(x) for x in rows[0][1:]])
    data = np.array([[float(x) for x in row] for row in rows[1:]]).reshape(-1, t.size + 1)
    return data[:, 0], t, data[:, 1:]


def write_field_npy(
    path: Path, grid: SpectralGrid, radii: Sequence[float], values: np.ndarray, meta: dict
) -> tuple[Path, Path]:
    """Binary matrix plus a JSON sidecar with the grid, radii and ``meta``."""
    path = Path(path)
    np.save(path, np.asarray(values, dtype=float))
    side = path.with_suffix(".json")
    write_json(side, {"grid": grid.to_dict(), "radii": [float(r) for r in radii], **meta})
    return path, side


def read_field_npy(path: Path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    return np.load(path), read_json(path.with_suffix(".json"))


# two-column traces -------------------------------------------------------------


def write_trace_csv(path: Path, t: np.ndarray, y: np.ndarray, names=("t", "value")) -> Path:
    path = Path(path)
    np.savetxt(path, np.column_stack([t, y]), delimiter=",", fmt=FLOAT_FMT,
               header=",".join(names), comments="")
    return path


def read_trace_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column CSV with a header row; returns ``(t, y)``."""
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 2:
        raise ValidationError("expected two columns")
    return data[:, 0], data[:, 1]


def write_rows_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) if isinstance(x, float) else x for x in row])
    return path


def read_rows_csv(path: Path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


# plots ----------------------------------------------------------------------------


def _envelope(t: np.ndarray, y: np.ndarray, max_points: int) -> tuple[np.ndarray, np.ndarray]:
    # keep the min and max of each block so spikes survive decimation
    n = t.size
    if n <= 2 * max_points:
        return t, y
    block = int(np.ceil(n / max_points))
    m = (n // block) * block
    tb = t[:m].reshape(-1, block)
    yb = y[:m].reshape(-1, block)
    lo, hi = yb.argmin(axis=1), yb.argmax(axis=1)
    rows = np.arange(tb.shape[0])
    first = np.minimum(lo, hi)
    second = np.maximum(lo, hi)
    tt = np.column_stack([tb[rows, first], tb[rows, second]]).ravel()
    yy = np.column_stack([yb[rows, first], yb[rows, second]]).ravel()
    return np.append(tt, t[m:]), np.append(yy, y[m:])


def write_svg(
    path: Path,
    t: np.ndarray,
    y: np.ndarray,
    title: str,
    xlabel: str = "t [s]",
    ylabel: str = "",
    xlim: tuple[float, float] | None = None,
    deterministic: bool = True,
) -> Path:
    """Single-trace line chart as a self-contained SVG file.

    With ``deterministic`` the file carries no creation date and uses a fixed
    hash salt for element ids, so identical input gives identical bytes.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if xlim is not None:
        keep = (t >= xlim[0]) & (t <= xlim[1])
        t, y = t[keep], y[keep]
    t, y = _envelope(t, y, SVG_MAX_POINTS)
    with matplotlib.rc_context({"svg.hashsalt": "causal-attenuation", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t, y, lw=0.8)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, lw=0.3)
        fig.tight_layout()
        metadata = {"Date": None} if deterministic else {}
        fig.savefig(path, format="svg", metadata=metadata)
        plt.close(fig)
    return path


__all__ = [
    "read_field_csv",
    "read_field_npy",
    "read_json",
    "read_rows_csv",
    "read_trace_csv",
    "write_field_csv",
    "write_field_npy",
    "write_json",
    "write_rows_csv",
    "write_svg",
    "write_trace_csv",
]

"""Command-line interface.

Commands
--------
kernel             medium kernels K(r, t) for one or more radii
green              Green function traces G(r, t)
causality          negative-time energy reports (and a front fit for >= 4 radii)
kk-check           Kramers-Kronig residual of a derivative of alpha_star
simulate           pressure traces of a point source
sweep              Cartesian parameter sweep, one CSV row per configuration
reproduce-figures  the ten reference configurations with plots and a manifest

Exit status is 0 on success, 2 for invalid input, 3 when a numerical
self-check fails and 1 for I/O errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .causality import (
    DEFAULT_LEVEL,
    DEFAULT_THRESHOLD,
    SCHEMA_VERSION,
    kernel_report,
    kk_residual,
    travel_time_fit,
)
from .errors import DiagnosticError, ValidationError
from .io import write_field_csv, write_field_npy, write_json, write_rows_csv, write_svg, write_trace_csv
from .kernels import default_grid, figure_grid, green_trace, kernel_field, thermo_viscous_grid
from .models import AttenuationModel, Kind, expected_causality
from .spectral import SpectralGrid, make_grid
from .wavesim import gaussian_pulse, propagate, snapshot, source_from_csv

#: environment variable naming the default output directory
OUT_ENV = "CAUSAL_ATTENUATION_OUT"
COMMANDS = ("kernel", "green", "causality", "kk-check", "simulate", "sweep", "reproduce-figures")
FORMATS = ("csv", "json", "svg", "npy")
SWEEP_COLUMNS = (
    "kind", "gamma", "alpha0", "tau0", "alpha1", "r",
    "metric", "classification", "truncation_bound", "front_speed", "kk_residual",
)
MODEL_KEYS = ("gamma", "alpha0", "a0", "tau0", "alpha1", "c0")
FIGURE_RADIUS = 0.25
FIGURE_GAMMAS = ((0.5, 0.1581), (1.5, 0.0316), (2.7, 0.0071), (3.3, 0.0027))
FIGURE_TAU0 = 1e-5


@dataclass(frozen=True)
class RunConfig:
    """Validated settings of one command invocation."""

    command: str
    kind: str = "PowerLawKK"
    gamma: tuple[float, ...] = (0.5,)
    alpha0: tuple[float, ...] = (0.1581,)
    a0: tuple[float, ...] = (0.0,)
    tau0: tuple[float, ...] = (0.0,)
    alpha1: tuple[float, ...] = (1.0,)
    c0: tuple[float, ...] = (1.0,)
    n: int | None = None
    dt: float | None = None
    t0: float | None = None
    radii: tuple[float, ...] = (FIGURE_RADIUS,)
    epsilon: float | None = None
    threshold: float = DEFAULT_THRESHOLD
    level: float = DEFAULT_LEVEL
    out: Path = Path("out")
    formats: tuple[str, ...] = ("csv", "json", "svg")
    window: bool = False
    deterministic: bool = False
    deriv_index: int = 1
    norm: str = "l2"
    source: Path | None = None
    pulse_center: float | None = None
    pulse_width: float | None = None
    shifted: bool = False
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        Kind.parse(self.kind)
        for name in MODEL_KEYS + ("radii",):
            if len(getattr(self, name)) == 0:
                raise ValidationError(f"empty range for {name}")
        if self.command != "sweep":
            for name in MODEL_KEYS:
                if len(getattr(self, name)) != 1:
                    raise ValidationError(f"{name} takes a single value outside 'sweep'")
        if any(r <= 0 for r in self.radii):
            raise ValidationError("radii must be positive")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ValidationError(f"unknown formats {sorted(bad)}")
        if (self.n is None) != (self.dt is None):
            raise ValidationError("--n and --dt must be given together")
        if self.t0 is not None and self.n is None:
            raise ValidationError("--t0 needs --n and --dt")
        if self.deriv_index < 0:
            raise ValidationError("deriv index must be nonnegative")
        if self.norm not in ("l2", "linf"):
            raise ValidationError("norm must be l2 or linf")

    def models(self) -> list[AttenuationModel]:
        """All models of the Cartesian product (one outside 'sweep')."""
        kind = Kind.parse(self.kind)
        return [
            AttenuationModel(kind, gamma=g, alpha0=a, a0=b, tau0=tau, alpha1=a1, c0=c)
            for g, a, b, tau, a1, c in itertools.product(
                self.gamma, self.alpha0, self.a0, self.tau0, self.alpha1, self.c0
            )
        ]

    def model(self) -> AttenuationModel:
        return self.models()[0]

    def grid(self, m: AttenuationModel) -> SpectralGrid:
        if self.n is None:
            return default_grid(m)
        t0 = -(self.n // 4) * self.dt if self.t0 is None else self.t0
        return make_grid(self.n, self.dt, t0)


# parsing ----------------------------------------------------------------------


def parse_values(text) -> tuple[float, ...]:
    """Comma-separated numbers or an inclusive ``start:stop:step`` range."""
    if isinstance(text, (int, float)):
        return (float(text),)
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    s = str(text).strip()
    if not s:
        return ()
    if ":" in s:
        parts = [float(x) for x in s.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValidationError(f"range must be start:stop:step with step > 0, got {s!r}")
        start, stop, step = parts
        if stop < start:
            return ()
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 12) for i in range(count))
    try:
        return tuple(float(x) for x in s.split(",") if x.strip())
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="causal-attenuation",
        description="Attenuation-model kernels, Green functions and causality checks.",
    )
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="JSON file with settings; flags override it")
    p.add_argument("--model", dest="kind", help="model kind, e.g. PowerLawKK or CausalGamma")
    for name in MODEL_KEYS:
        p.add_argument(f"--{name}", help="value, comma list or start:stop:step (sweep)")
    p.add_argument("--n", type=int, help="samples (power of two)")
    p.add_argument("--dt", type=float, help="time step [s]")
    p.add_argument("--t0", type=float, help="first sample time [s]; default -n*dt/4")
    p.add_argument("--radii", help="radii [m], comma list or start:stop:step")
    p.add_argument("--epsilon", type=float, help="guard band [s]; default 4*dt")
    p.add_argument("--threshold", type=float, help=f"classification threshold (default {DEFAULT_THRESHOLD})")
    p.add_argument("--level", type=float, help=f"front-detection energy level (default {DEFAULT_LEVEL})")
    p.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./out)")
    p.add_argument("--format", dest="formats", help="comma list of csv,json,svg,npy")
    p.add_argument("--window", action="store_true", default=None, help="Tukey-taper spectra")
    p.add_argument("--seedless-deterministic", dest="deterministic", action="store_true",
                   default=None, help="omit timestamps so outputs are byte-identical")
    p.add_argument("--deriv-index", type=int, help="derivative order for kk-check (default 1)")
    p.add_argument("--norm", choices=("l2", "linf"), help="non-causality norm (default l2)")
    p.add_argument("--source", type=Path, help="two-column (t, f) CSV source for simulate")
    p.add_argument("--pulse-center", type=float, help="Gaussian source centre [s]")
    p.add_argument("--pulse-width", type=float, help="Gaussian source width [s]")
    p.add_argument("--shifted", action="store_true", default=None, help="front-aligned traces")
    p.add_argument("--workers", type=int, help="worker threads")
    return p


def config_from_args(argv: Sequence[str] | None = None, env=None) -> RunConfig:
    env = os.environ if env is None else env
    args = build_parser().parse_args(argv)
    settings: dict = {}
    if args.config is not None:
        settings.update(_load_config_file(args.config))
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        settings[key] = val
    settings["command"] = args.command
    if "out" not in settings:
        settings["out"] = env.get(OUT_ENV, "out")
    return _make_config(settings)


def _load_config_file(path: Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    model = data.pop("model", None)
    if isinstance(model, dict):
        model = dict(model)
        if "kind" in model:
            data.setdefault("kind", model.pop("kind"))
        for k, v in model.items():
            if k not in MODEL_KEYS:
                raise ValidationError(f"unknown model field {k!r}")
            data.setdefault(k, v)
    elif model is not None:
        data.setdefault("kind", model)
    if "format" in data:
        data["formats"] = data.pop("format")
    if "seedless_deterministic" in data:
        data["deterministic"] = data.pop("seedless_deterministic")
    return data


def _make_config(s: dict) -> RunConfig:
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(s) - known
    if unknown:
        raise ValidationError(f"unknown settings: {sorted(unknown)}")
    s = dict(s)
    for name in MODEL_KEYS + ("radii",):
        if name in s:
            s[name] = parse_values(s[name])
    if "formats" in s and isinstance(s["formats"], str):
        s["formats"] = tuple(x.strip() for x in s["formats"].split(",") if x.strip())
    elif "formats" in s:
        s["formats"] = tuple(s["formats"])
    for name in ("out", "source"):
        if s.get(name) is not None:
            s[name] = Path(s[name])
    return RunConfig(**s)


# commands -----------------------------------------------------------------------


def _grid_meta(grid: SpectralGrid) -> dict:
    return {"n": grid.n, "dt": grid.dt, "t0": grid.t0}


def _emit_field(cfg: RunConfig, stem: str, grid, radii, values, meta: dict, ylabel: str) -> list[Path]:
    out = cfg.out
    files = []
    if "csv" in cfg.formats:
        files.append(write_field_csv(out / f"{stem}.csv", radii, grid.t, values))
    if "npy" in cfg.formats:
        files.extend(write_field_npy(out / f"{stem}.npy", grid, radii, values, meta))
    if "json" in cfg.formats and "npy" not in cfg.formats:
        files.append(write_json(out / f"{stem}.json",
                                {"grid": _grid_meta(grid), "radii": list(map(float, radii)), **meta}))
    if "svg" in cfg.formats:
        files.append(write_svg(out / f"{stem}.svg", grid.t, values[0],
                               f"{meta['model_label']}, r = {radii[0]:g} m",
                               ylabel=ylabel, deterministic=cfg.deterministic))
    return files


def _meta(cfg: RunConfig, m: AttenuationModel) -> dict:
    return {"schema_version": SCHEMA_VERSION, "model": m.to_dict(), "model_label": m.label(),
            "window": cfg.window}


def cmd_kernel(cfg: RunConfig) -> list[Path]:
    m = cfg.model()
    grid = cfg.grid(m)
    kf = kernel_field(m, cfg.radii, grid, window=cfg.window, workers=cfg.workers)
    return _emit_field(cfg, "kernel", grid, kf.radii, kf.values, _meta(cfg, m), "K(r, t)")


def cmd_green(cfg: RunConfig) -> list[Path]:
    m = cfg.model()
    grid = cfg.grid(m)
    rows = [green_trace(m, r, grid, shifted=cfg.shifted, window=cfg.window).samples for r in cfg.radii]
    meta = {**_meta(cfg, m), "shifted": cfg.shifted}
    return _emit_field(cfg, "green", grid, np.asarray(cfg.radii), np.vstack(rows), meta, "G(r, t)")


def _reports(cfg: RunConfig, m: AttenuationModel, grid: SpectralGrid) -> list[dict]:
    out = []
    for r in cfg.radii:
        _, rep = kernel_report(m, r, grid, cfg.epsilon, cfg.threshold, cfg.window, cfg.norm)
        out.append({"r": float(r), **rep.to_dict()})
    return out


def cmd_causality(cfg: RunConfig) -> list[Path]:
    m = cfg.model()
    grid = cfg.grid(m)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "model": m.to_dict(),
        "grid": _grid_meta(grid),
        "expected": expected_causality(m).expected.value,
        "reports": _reports(cfg, m, grid),
    }
    if len(cfg.radii) >= 4:
        doc["front_fit"] = travel_time_fit(m, cfg.radii, grid, cfg.level, cfg.workers).to_dict()
    return [write_json(cfg.out / "causality.json", doc)]


def cmd_kk(cfg: RunConfig) -> list[Path]:
    m = cfg.model()
    grid = cfg.grid(m)
    res = kk_residual(m, grid, cfg.deriv_index)
    doc = {"schema_version": SCHEMA_VERSION, "model": m.to_dict(), "grid": _grid_meta(grid),
           "deriv_index": cfg.deriv_index, "kk_residual": res}
    return [write_json(cfg.out / "kk.json", doc)]


def cmd_simulate(cfg: RunConfig) -> list[Path]:
    m = cfg.model()
    grid = cfg.grid(m)
    if cfg.source is not None:
        src = source_from_csv(cfg.source, grid)
    else:
        span = grid.t_end
        center = cfg.pulse_center if cfg.pulse_center is not None else 0.05 * span
        width = cfg.pulse_width if cfg.pulse_width is not None else 0.005 * span
        src = gaussian_pulse(grid, center, width)
    field = propagate(m, src, cfg.radii, workers=cfg.workers)
    meta = {**_meta(cfg, m), "source": src.description}
    files = _emit_field(cfg, "pressure", grid, field.radii, field.values, meta, "p(r, t)")
    if "csv" in cfg.formats:
        t_snap = float(field.radii[-1] / m.c0)
        if grid.t0 <= t_snap <= grid.t_end:
            snap = snapshot(field, t_snap)
            files.append(write_trace_csv(cfg.out / "snapshot.csv", snap[:, 0], snap[:, 1], ("r", "p")))
    return files


def _sweep_one(cfg: RunConfig, m: AttenuationModel) -> list[list]:
    grid = cfg.grid(m)
    front = ""
    if len(cfg.radii) >= 4:
        try:
            front = travel_time_fit(m, cfg.radii, grid, cfg.level, workers=1).front_speed
        except (DiagnosticError, ValidationError):
            front = ""
    try:
        kk = kk_residual(m, grid, cfg.deriv_index)
    except DiagnosticError:
        kk = ""
    rows = []
    for r in cfg.radii:
        _, rep = kernel_report(m, r, grid, cfg.epsilon, cfg.threshold, cfg.window, cfg.norm)
        rows.append([m.kind.value, m.gamma, m.alpha0, m.tau0, m.alpha1, float(r),
                     rep.metric, rep.classification.value, rep.truncation_bound, front, kk])
    return rows


def cmd_sweep(cfg: RunConfig) -> list[Path]:
    models = cfg.models()  # validates every configuration before any work
    with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
        results = list(ex.map(lambda m: _sweep_one(cfg, m), models))
    rows = [row for block in results for row in block]
    return [write_rows_csv(cfg.out / "sweep.csv", SWEEP_COLUMNS, rows)]


def figure_configs() -> list[tuple[str, AttenuationModel]]:
    """The ten reference configurations in figure order."""
    out = [("power_law", AttenuationModel.power_law(g, a)) for g, a in FIGURE_GAMMAS]
    out += [("szabo", AttenuationModel.szabo(g, a)) for g, a in FIGURE_GAMMAS]
    out += [
        ("thermo_viscous", AttenuationModel.thermo_viscous(FIGURE_TAU0)),
        ("thermo_viscous", AttenuationModel.causal_thermo_viscous(FIGURE_TAU0, alpha1=1.0)),
    ]
    return out


def reproduce_figures(out_dir: Path, deterministic: bool = True, threshold: float = DEFAULT_THRESHOLD,
                      formats: Sequence[str] = ("csv", "json", "svg")) -> dict:
    """Compute and write the ten reference kernels; returns the manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    fig_grid = figure_grid()
    tv_grid = thermo_viscous_grid(FIGURE_TAU0)
    for family, m in figure_configs():
        grid = tv_grid if family == "thermo_viscous" else fig_grid
        k, rep = kernel_report(m, FIGURE_RADIUS, grid, threshold=threshold)
        stem = f"{family}_{m.kind.value}" + (f"_gamma{m.gamma:g}" if family != "thermo_viscous" else "")
        files = []
        if "csv" in formats:
            files.append(write_trace_csv(out_dir / f"{stem}.csv", grid.t, k.samples, ("t", "K")))
        if "json" in formats:
            doc = {"model": m.to_dict(), "r": FIGURE_RADIUS, "grid": _grid_meta(grid), **rep.to_dict()}
            files.append(write_json(out_dir / f"{stem}.json", doc))
        if "svg" in formats:
            xlim = (-0.01, 0.3) if family == "thermo_viscous" else (-0.25, 0.75)
            files.append(write_svg(out_dir / f"{stem}.svg", grid.t, k.samples,
                                   f"{m.label()}, r = {FIGURE_RADIUS:g} m", ylabel="K(r, t)",
                                   xlim=xlim, deterministic=deterministic))
        entries.append({
            "family": family,
            "model": m.to_dict(),
            "r": FIGURE_RADIUS,
            "grid": _grid_meta(grid),
            "metric": rep.metric,
            "classification": rep.classification.value,
            "expected": expected_causality(m).expected.value,
            "files": [f.name for f in files],
        })
    manifest = {"schema_version": SCHEMA_VERSION, "threshold": threshold, "configurations": entries}
    write_json(out_dir / "manifest.json", manifest)
    return manifest


def cmd_reproduce(cfg: RunConfig) -> list[Path]:
    reproduce_figures(cfg.out, cfg.deterministic, cfg.threshold, cfg.formats)
    return [cfg.out / "manifest.json"]


HANDLERS = {
    "kernel": cmd_kernel,
    "green": cmd_green,
    "causality": cmd_causality,
    "kk-check": cmd_kk,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "reproduce-figures": cmd_reproduce,
}


def run(cfg: RunConfig) -> list[Path]:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return HANDLERS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        files = run(cfg)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except DiagnosticError as exc:
        print(f"numerical diagnostic: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(f)
    return 0


__all__ = ["RunConfig", "build_parser", "config_from_args", "figure_configs", "main",
           "parse_values", "reproduce_figures", "run"]


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())

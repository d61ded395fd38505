"""Batch experiment harness.

Runs the full texture-comparison protocol for a configured phantom and
deformation: builds the image pair (f1, f2) for every requested texture mode,
sweeps the flow regularization weight, evaluates the four error measures per
weight and writes CSV tables, plots and a reproducible run manifest.

Mode pipelines (the distinction carries the semantics):

* ``none``   - f1 is the full-band time-reversal reconstruction of the
               phantom; f2 = warp(f1) by the ground-truth field (the
               validation protocol: the deformed image is produced by
               interpolation). Texture-free baseline.
* ``gauss``  - additive white-noise texture behaves like a material property
               advected with the motion: f1 = reconstruction + alpha * noise,
               f2 = warp(f1). The noise never passes through the acoustic
               chain and the chain is never re-run after the deformation.
* ``band``   - texture is a reconstruction artifact regenerated after the
               deformation: the phantom is warped first, then both f1 and f2
               are band-limited reconstructions of their own acoustic data.

Before the flow, every mode's pair is normalized to a common working
amplitude (``flow_scale`` times the base reconstruction maximum is mapped to
``flow_scale``); the gauss-mode noise level ``alpha`` is absolute on that
working scale. Error measures are evaluated on the imaging region of
interest (a disc of ``roi_fraction`` times the sensor radius) intersected
with the ground-truth magnitude mask; outside the array the reconstructions
are identically zero and measure nothing.

Band edges in configs are in object-relative units: the sensor radius is the
reference length, so an edge kappa is used as kappa / radius on the grid.

CSV outputs are RFC-4180 (CRLF) and byte-deterministic for a fixed config and
seed. The manifest echoes the fully resolved configuration and can be passed
back to ``run`` to reproduce the run exactly.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .bandlimit import convolve_psf  # noqa: F401  (re-exported for pipeline users)
from .core import (
    BandSpec,
    ErrorReport,
    Grid,
    Image,
    MetricsRow,
    SensorGeometry,
    write_image,
)
from .flow import FlowConfig, default_lambda_grid, lambda_sweep
from .metrics import EPS_MAG, aae, aee, aee_rel, magnitude_mask_fraction, warping_error
from .phantom import (
    DeformationSpec,
    PhantomSpec,
    add_gaussian_texture,
    make_displacement,
    make_phantom,
    support_radius,
    warp_image,
)
from .reconstruct import reconstruct_textured, reconstruct_time_reversal
from .wave import SolverConfig, simulate

__all__ = [
    "TextureMode",
    "ExperimentConfig",
    "ConfigError",
    "RunResult",
    "load_config",
    "config_to_dict",
    "validate_config",
    "run_experiment",
    "emit_plots",
]

PHANTOM_MARGIN = 0.1  # phantom support must stay inside (1 - margin) * R


class ConfigError(ValueError):
    """Raised for malformed or invariant-violating experiment configurations."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in problems))


@dataclass(frozen=True)
class TextureMode:
    kind: str  # none | gauss | band
    alpha: float = 0.3
    seed: int = 0
    kappa_min: float = 0.0
    kappa_max: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "gauss", "band"):
            raise ValueError(f"unknown texture mode kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "none":
            return "none"
        if self.kind == "gauss":
            return f"gauss_{self.alpha:g}"
        return f"band_{self.kappa_min:g}"

    @property
    def uses_acoustics(self) -> bool:
        return self.kind in ("none", "band")


@dataclass(frozen=True)
class ExperimentConfig:
    grid: Grid
    sensors: SensorGeometry
    phantom: PhantomSpec
    deformation: DeformationSpec
    solver: SolverConfig
    modes: tuple[TextureMode, ...]
    lambdas: tuple[float, ...]
    report_lambdas: tuple[float, ...]
    flow: FlowConfig
    output_dir: str
    seed: int = 0
    flow_scale: float = 200.0  # working image amplitude fed to the flow solver
    roi_fraction: float = 0.95  # metrics region of interest, fraction of the sensor radius


# ---------------------------------------------------------------------------
# Config (de)serialization
# ---------------------------------------------------------------------------


def _build(section: str, cls, data: dict, problems: list[str], **overrides):
    if not isinstance(data, dict):
        problems.append(f"{section}: expected an object, got {type(data).__name__}")
        return None
    fields_ = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    unknown = set(data) - fields_
    if unknown:
        problems.append(f"{section}: unknown keys {sorted(unknown)}")
        return None
    merged = dict(data)
    merged.update(overrides)
    for key in ("center", "origin", "shift", "pivot", "direction"):
        if key in merged and isinstance(merged[key], list):
            merged[key] = tuple(merged[key])
    try:
        return cls(**merged)
    except (TypeError, ValueError) as exc:
        problems.append(f"{section}: {exc}")
        return None


def _config_from_dict(raw: dict) -> ExperimentConfig:
    problems: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["top level: expected a JSON object"])
    if "config" in raw:  # accept a run manifest as a config
        raw = raw["config"]

    required = {"grid", "sensors", "phantom", "deformation", "solver", "texture_modes", "output_dir"}
    missing = required - set(raw)
    if missing:
        raise ConfigError([f"missing sections: {sorted(missing)}"])

    grid_raw = dict(raw["grid"]) if isinstance(raw["grid"], dict) else raw["grid"]
    if isinstance(grid_raw, dict) and "origin" not in grid_raw:
        try:
            grid = Grid.centered(
                int(grid_raw["width"]),
                int(grid_raw.get("height", grid_raw["width"])),
                float(grid_raw.get("dx", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"grid: {exc}")
            grid = None
    else:
        grid = _build("grid", Grid, grid_raw, problems)

    sensors = _build("sensors", SensorGeometry, raw["sensors"], problems)
    phantom = _build("phantom", PhantomSpec, raw["phantom"], problems)
    deformation = _build("deformation", DeformationSpec, raw["deformation"], problems)
    solver = _build("solver", SolverConfig, raw["solver"], problems)

    modes: list[TextureMode] = []
    modes_raw = raw.get("texture_modes", [])
    if not isinstance(modes_raw, list) or not modes_raw:
        problems.append("texture_modes: need a nonempty list")
    else:
        for i, mraw in enumerate(modes_raw):
            mode = _build(f"texture_modes[{i}]", TextureMode, mraw, problems)
            if mode is not None:
                modes.append(mode)

    lam_raw = raw.get("lambdas", {"num": 21, "lo_exp": 0.5, "hi_exp": 2.5})
    if isinstance(lam_raw, dict):
        unknown = set(lam_raw) - {"num", "lo_exp", "hi_exp", "extra"}
        if unknown:
            problems.append(f"lambdas: unknown keys {sorted(unknown)}")
            lambdas: tuple[float, ...] = ()
        else:
            grid_part = default_lambda_grid(
                int(lam_raw.get("num", 21)),
                float(lam_raw.get("lo_exp", 0.5)),
                float(lam_raw.get("hi_exp", 2.5)),
            )
            lambdas = tuple(sorted(set(map(float, grid_part)) | set(map(float, lam_raw.get("extra", [])))))
    elif isinstance(lam_raw, list):
        lambdas = tuple(float(v) for v in lam_raw)
    else:
        problems.append("lambdas: expected a list or grid description")
        lambdas = ()

    report_lambdas = tuple(float(v) for v in raw.get("report_lambdas", [10.0**1.1]))

    flow_raw = dict(raw.get("flow", {}))
    flow_raw.setdefault("lam", lambdas[0] if lambdas else 10.0)
    flow = _build("flow", FlowConfig, flow_raw, problems)

    output_dir = raw.get("output_dir")
    if not isinstance(output_dir, str) or not output_dir:
        problems.append("output_dir: need a nonempty string")

    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        problems.append("seed: need an integer")

    flow_scale = raw.get("flow_scale", 200.0)
    roi_fraction = raw.get("roi_fraction", 0.95)

    if problems or None in (grid, sensors, phantom, deformation, solver, flow):
        raise ConfigError(problems or ["configuration could not be constructed"])
    return ExperimentConfig(
        grid=grid,
        sensors=sensors,
        phantom=phantom,
        deformation=deformation,
        solver=solver,
        modes=tuple(modes),
        lambdas=lambdas,
        report_lambdas=report_lambdas,
        flow=flow,
        output_dir=output_dir,
        seed=seed,
        flow_scale=float(flow_scale),
        roi_fraction=float(roi_fraction),
    )


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    """Load a JSON experiment config (or a run manifest) and validate it."""
    try:
        with open(os.fspath(path), "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    cfg = _config_from_dict(raw)
    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Fully resolved configuration (lambda grid expanded), JSON-serializable."""
    return {
        "grid": {
            "width": cfg.grid.width,
            "height": cfg.grid.height,
            "dx": cfg.grid.dx,
            "origin": list(cfg.grid.origin),
        },
        "sensors": {
            "center": list(cfg.sensors.center),
            "radius": cfg.sensors.radius,
            "num_sensors": cfg.sensors.num_sensors,
        },
        "phantom": _tuples_to_lists(asdict(cfg.phantom)),
        "deformation": _tuples_to_lists(asdict(cfg.deformation)),
        "solver": asdict(cfg.solver),
        "texture_modes": [_tuples_to_lists(asdict(m)) for m in cfg.modes],
        "lambdas": list(cfg.lambdas),
        "report_lambdas": list(cfg.report_lambdas),
        "flow": asdict(cfg.flow),
        "output_dir": cfg.output_dir,
        "seed": cfg.seed,
        "flow_scale": cfg.flow_scale,
        "roi_fraction": cfg.roi_fraction,
    }


def _tuples_to_lists(d: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def validate_config(cfg: ExperimentConfig) -> list[str]:
    """Invariant checks beyond per-type construction; empty list means valid."""
    problems: list[str] = []
    grid, geom = cfg.grid, cfg.sensors
    dx = grid.dx
    dt = cfg.solver.cfl * dx

    xs_min = grid.origin[0]
    ys_min = grid.origin[1]
    xs_max = grid.origin[0] + (grid.width - 1) * dx
    ys_max = grid.origin[1] + (grid.height - 1) * dx
    clearance = min(
        geom.center[0] - xs_min,
        xs_max - geom.center[0],
        geom.center[1] - ys_min,
        ys_max - geom.center[1],
    )
    if geom.radius + dx > clearance:
        problems.append(
            f"sensor circle (radius {geom.radius:g}) does not fit inside the grid "
            f"(clearance {clearance:g})"
        )

    if not cfg.modes:
        problems.append("at least one texture mode is required")
    labels = [m.label for m in cfg.modes]
    if len(set(labels)) != len(labels):
        problems.append(f"texture mode labels are not unique: {labels}")

    if not cfg.lambdas:
        problems.append("lambda grid must be nonempty")
    elif any(l <= 0 for l in cfg.lambdas):
        problems.append("lambda grid must be strictly positive")

    if not (cfg.flow_scale > 0 and np.isfinite(cfg.flow_scale)):
        problems.append(f"flow_scale must be positive, got {cfg.flow_scale}")
    if not (0 < cfg.roi_fraction <= 1):
        problems.append(f"roi_fraction must be in (0, 1], got {cfg.roi_fraction}")

    try:
        img = make_phantom(cfg.phantom, grid)
        reach = support_radius(img, geom.center)
        limit = (1.0 - PHANTOM_MARGIN) * geom.radius
        if reach > limit:
            problems.append(
                f"phantom support reaches {reach:g} from the array center; "
                f"limit is {limit:g} (10% margin inside the circle)"
            )
    except ValueError as exc:
        problems.append(f"phantom: {exc}")

    try:
        make_displacement(cfg.deformation, grid)
    except ValueError as exc:
        problems.append(f"deformation: {exc}")

    if cfg.solver.t_max < 2.0 * geom.radius:
        problems.append(
            f"solver t_max {cfg.solver.t_max:g} is shorter than the circle diameter "
            f"{2 * geom.radius:g}"
        )

    acoustic = any(m.uses_acoustics for m in cfg.modes)
    if acoustic and geom.num_sensors < np.pi * geom.radius / dx:
        problems.append(
            f"{geom.num_sensors} sensors undersample the circle for reconstruction; "
            f"need >= {np.pi * geom.radius / dx:.0f}"
        )

    for mode in cfg.modes:
        if mode.kind == "band":
            if not (0 <= mode.kappa_min < mode.kappa_max):
                problems.append(f"mode {mode.label}: need 0 <= kappa_min < kappa_max")
                continue
            kmax_grid = mode.kappa_max / geom.radius
            if kmax_grid > np.pi / dx:
                problems.append(
                    f"mode {mode.label}: scaled band edge {kmax_grid:g} exceeds the grid "
                    f"Nyquist {np.pi / dx:g}"
                )
            if kmax_grid > np.pi / dt:
                problems.append(
                    f"mode {mode.label}: scaled band edge {kmax_grid:g} exceeds the trace "
                    f"Nyquist {np.pi / dt:g}"
                )
        elif mode.kind == "gauss" and mode.alpha < 0:
            problems.append(f"mode {mode.label}: alpha must be nonnegative")
    return problems


# ---------------------------------------------------------------------------
# Experiment execution
# ---------------------------------------------------------------------------


@dataclass
class ModeArtifacts:
    label: str
    f1: Image
    f2: Image
    lambdas: list[float]
    rows: list[MetricsRow]
    converged: list[bool]
    quiver_field: "np.ndarray | None" = None  # (2, H, W) flow at the quiver lambda
    quiver_lambda: float | None = None


@dataclass
class RunResult:
    report: ErrorReport
    run_dir: str
    pipeline_log: dict[str, list[str]]
    failures: dict[str, str]
    modes: list[ModeArtifacts]
    u0: "np.ndarray"
    grid: Grid
    csv_files: list[str] = field(default_factory=list)
    quiver_files: list[str] = field(default_factory=list)
    curve_files: list[str] = field(default_factory=list)
    combined_curve_file: str | None = None
    manifest_file: str | None = None


def _metrics_row(u_est, u0_field, f1, f2) -> MetricsRow:
    try:
        a = aae(u_est, u0_field)
        rel = aee_rel(u_est, u0_field)
        frac = magnitude_mask_fraction(u0_field)
    except ValueError:
        a, rel, frac = 0.0, 0.0, 0.0  # empty magnitude mask (null deformation)
    return MetricsRow(
        aae=a,
        aee_abs=aee(u_est, u0_field),
        aee_rel=rel,
        warping=warping_error(f1, f2, u_est),
        mask_fraction=frac,
    )


def run_experiment(cfg: ExperimentConfig, emit: bool = True) -> RunResult:
    """Execute every texture mode, compute metrics over the lambda sweep and
    write tables, plots and the run manifest into cfg.output_dir."""
    problems = validate_config(cfg)
    if problems:
        raise ConfigError(problems)
    run_dir = cfg.output_dir
    os.makedirs(run_dir, exist_ok=True)

    grid, geom = cfg.grid, cfg.sensors
    log: dict[str, list[str]] = {}
    failures: dict[str, str] = {}

    phantom_img = make_phantom(cfg.phantom, grid)
    u0 = make_displacement(cfg.deformation, grid)
    warped = warp_image(phantom_img, u0)

    write_image(phantom_img, os.path.join(run_dir, "phantom.raw"))
    write_image(warped, os.path.join(run_dir, "phantom_warped.raw"))
    write_image(Image(grid=grid, values=u0.ux), os.path.join(run_dir, "u0_x.raw"))
    write_image(Image(grid=grid, values=u0.uy), os.path.join(run_dir, "u0_y.raw"))

    # shared acoustic chain (phantom and warped phantom are mode-independent)
    m1 = m2 = None
    acoustic_error: str | None = None
    if any(m.uses_acoustics for m in cfg.modes):
        try:
            m1 = simulate(phantom_img, geom, cfg.solver)
            m2 = simulate(warped, geom, cfg.solver)
        except ValueError as exc:
            acoustic_error = f"acoustic chain failed: {exc}"

    report = ErrorReport()
    mode_artifacts: list[ModeArtifacts] = []
    quiver_lam = cfg.report_lambdas[0] if cfg.report_lambdas else None

    for mode in cfg.modes:
        label = mode.label
        stages: list[str] = ["make_phantom", "make_displacement"]
        try:
            if mode.kind == "gauss":
                f1 = add_gaussian_texture(phantom_img, mode.alpha, mode.seed)
                stages.append("add_gaussian_texture:f1")
                f2 = warp_image(f1, u0)
                stages.append("warp_image:f2")
            else:
                stages.append("warp_image:phantom")
                if acoustic_error is not None:
                    raise ValueError(acoustic_error)
                stages.extend(["simulate:f1", "simulate:f2"])
                if mode.kind == "none":
                    f1 = reconstruct_time_reversal(m1, grid, cfg.solver)
                    f2 = reconstruct_time_reversal(m2, grid, cfg.solver)
                    stages.extend(["time_reversal:f1", "time_reversal:f2"])
                else:
                    band = BandSpec(mode.kappa_min, mode.kappa_max).scaled(1.0 / geom.radius)
                    f1 = reconstruct_textured(m1, band, grid, cfg.solver)
                    f2 = reconstruct_textured(m2, band, grid, cfg.solver)
                    stages.extend(
                        ["bandpass_even_time_reversal:f1", "bandpass_even_time_reversal:f2"]
                    )

            results = lambda_sweep(f1, f2, cfg.lambdas, cfg.flow)
            stages.append(f"lambda_sweep[{len(cfg.lambdas)}]")
            rows, conv = [], []
            quiver_field = None
            quiver_used = None
            for lam, res in zip(cfg.lambdas, results):
                row = _metrics_row(res.field, u0, f1, f2)
                rows.append(row)
                conv.append(res.converged)
                report.add(label, lam, row)
                if quiver_lam is not None and np.isclose(lam, quiver_lam, rtol=1e-9):
                    quiver_field = np.stack([res.field.ux, res.field.uy])
                    quiver_used = lam
            if quiver_field is None and results:
                mid = len(results) // 2
                quiver_field = np.stack([results[mid].field.ux, results[mid].field.uy])
                quiver_used = cfg.lambdas[mid]

            write_image(f1, os.path.join(run_dir, f"{label}_f1.raw"))
            write_image(f2, os.path.join(run_dir, f"{label}_f2.raw"))
            mode_artifacts.append(
                ModeArtifacts(
                    label=label,
                    f1=f1,
                    f2=f2,
                    lambdas=list(cfg.lambdas),
                    rows=rows,
                    converged=conv,
                    quiver_field=quiver_field,
                    quiver_lambda=quiver_used,
                )
            )
        except Exception as exc:  # a failing mode must not take down the others
            failures[label] = str(exc)
        finally:
            log[label] = stages

    result = RunResult(
        report=report,
        run_dir=run_dir,
        pipeline_log=log,
        failures=failures,
        modes=mode_artifacts,
        u0=np.stack([u0.ux, u0.uy]),
        grid=grid,
    )
    _write_csvs(cfg, result)
    if emit:
        emit_plots(result)
    _write_manifest(cfg, result)
    return result


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    return repr(float(x))


def _write_csvs(cfg: ExperimentConfig, result: RunResult) -> None:
    header = ["lambda", "AAE", "AEEabs", "AEErel", "Warping", "mask_fraction", "converged"]
    for art in result.modes:
        path = os.path.join(result.run_dir, f"errors_{art.label}.csv")
        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for lam, row, conv in zip(art.lambdas, art.rows, art.converged):
                writer.writerow(
                    [
                        _fmt(lam),
                        _fmt(row.aae),
                        _fmt(row.aee_abs),
                        _fmt(row.aee_rel),
                        _fmt(row.warping),
                        _fmt(row.mask_fraction),
                        _fmt(conv),
                    ]
                )
        result.csv_files.append(path)

    combined = os.path.join(result.run_dir, "errors_combined.csv")
    with open(combined, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["texture_mode"] + header)
        for art in result.modes:
            for lam, row, conv in zip(art.lambdas, art.rows, art.converged):
                writer.writerow(
                    [
                        art.label,
                        _fmt(lam),
                        _fmt(row.aae),
                        _fmt(row.aee_abs),
                        _fmt(row.aee_rel),
                        _fmt(row.warping),
                        _fmt(row.mask_fraction),
                        _fmt(conv),
                    ]
                )
    result.csv_files.append(combined)

    # headline table in the classical column layout, at the report lambdas
    report_path = os.path.join(result.run_dir, "report.csv")
    with open(report_path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Texture Mode", "lambda", "AAE", "AEEabs", "AEErel", "Warping"])
        for art in result.modes:
            for target in cfg.report_lambdas:
                for lam, row in zip(art.lambdas, art.rows):
                    if np.isclose(lam, target, rtol=1e-9):
                        writer.writerow(
                            [
                                art.label,
                                _fmt(lam),
                                _fmt(row.aae),
                                _fmt(row.aee_abs),
                                _fmt(row.aee_rel),
                                _fmt(row.warping),
                            ]
                        )
    result.csv_files.append(report_path)

    # per-metric minima over the sweep (the "best lambda" summary)
    best_path = os.path.join(result.run_dir, "best_lambda.csv")
    with open(best_path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["texture_mode", "metric", "best_lambda", "value"])
        for art in result.modes:
            for metric in ("aae", "aee_abs", "aee_rel", "warping"):
                vals = [getattr(r, metric) for r in art.rows]
                i = int(np.argmin(vals))
                writer.writerow([art.label, metric, _fmt(art.lambdas[i]), _fmt(vals[i])])
    result.csv_files.append(best_path)


def _write_manifest(cfg: ExperimentConfig, result: RunResult) -> None:
    manifest = {
        "config": config_to_dict(cfg),
        "versions": {"paelast": __version__, "numpy": np.__version__},
        "pipeline_log": result.pipeline_log,
        "failures": result.failures,
        "csv_files": [os.path.basename(p) for p in result.csv_files],
    }
    path = os.path.join(result.run_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    result.manifest_file = path


def emit_plots(result: RunResult) -> None:
    """Quiver overlays (estimate vs ground truth) per mode, per-mode error
    curves, one combined curve figure and the phantom support mask."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    run_dir = result.run_dir
    h, w = result.grid.shape
    step = max(1, min(h, w) // 24)
    yy, xx = np.mgrid[0:h:step, 0:w:step]

    for art in result.modes:
        if art.quiver_field is None:
            continue
        fig, ax = plt.subplots(figsize=(6, 6))
        ax.imshow(art.f1.values, cmap="gray", origin="lower")
        ax.quiver(
            xx,
            yy,
            result.u0[0][yy, xx],
            result.u0[1][yy, xx],
            color="lime",
            angles="xy",
            scale_units="xy",
            scale=0.25,
            width=0.004,
            label="ground truth",
        )
        ax.quiver(
            xx,
            yy,
            art.quiver_field[0][yy, xx],
            art.quiver_field[1][yy, xx],
            color="red",
            angles="xy",
            scale_units="xy",
            scale=0.25,
            width=0.003,
            label="estimate",
        )
        ax.set_title(f"{art.label}  (lambda = {art.quiver_lambda:.4g})")
        ax.legend(loc="upper right")
        path = os.path.join(run_dir, f"quiver_{art.label}.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        result.quiver_files.append(path)

    def _curves(ax_a, ax_e, art, color=None):
        aaes = [r.aae for r in art.rows]
        aees = [r.aee_abs for r in art.rows]
        ax_a.semilogx(art.lambdas, aaes, marker="o", ms=3, label=art.label, color=color)
        ax_e.semilogx(art.lambdas, aees, marker="o", ms=3, label=art.label, color=color)

    for art in result.modes:
        fig, (ax_a, ax_e) = plt.subplots(1, 2, figsize=(9, 4))
        _curves(ax_a, ax_e, art)
        ax_a.set_xlabel("lambda")
        ax_a.set_ylabel("angular error")
        ax_e.set_xlabel("lambda")
        ax_e.set_ylabel("endpoint error")
        fig.suptitle(art.label)
        fig.tight_layout()
        path = os.path.join(run_dir, f"curves_{art.label}.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        result.curve_files.append(path)

    if result.modes:
        fig, (ax_a, ax_e) = plt.subplots(1, 2, figsize=(9, 4))
        for art in result.modes:
            _curves(ax_a, ax_e, art)
        ax_a.set_xlabel("lambda")
        ax_a.set_ylabel("angular error")
        ax_e.set_xlabel("lambda")
        ax_e.set_ylabel("endpoint error")
        ax_a.legend()
        fig.tight_layout()
        path = os.path.join(run_dir, "curves_all.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        result.combined_curve_file = path

    # support mask of the phantom, for orientation
    try:
        from .core import read_image

        phantom_img = read_image(os.path.join(run_dir, "phantom.raw"))
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.imshow(phantom_img.values > 0, cmap="gray", origin="lower")
        ax.set_title("phantom support mask")
        fig.savefig(os.path.join(run_dir, "phantom_mask.png"), dpi=110)
        plt.close(fig)
    except ValueError:
        pass

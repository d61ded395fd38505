"""Shared domain types, grid geometry and file I/O.

Conventions used throughout the package:

* Images are stored as float64 arrays indexed ``values[row, col]``. The pixel
  (row=i, col=j) has its center at physical coordinates
  ``(origin_x + j*dx, origin_y + i*dx)``; pixels are square (one dx for both
  axes).
* The sound speed is fixed to 1, so time and length share units and every
  angular frequency ``kappa`` is in radians per grid-length unit.
* Displacement fields are in pixel units (multiply by dx for physical length).
* All types are immutable after construction; every function here is pure.

File format: raw little-endian float64, row-major, with a JSON sidecar header
``<path>.json`` describing the grid (images) or the acquisition geometry
(sensor traces).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "Image",
    "SensorGeometry",
    "SensorData",
    "DisplacementField",
    "BandSpec",
    "MetricsRow",
    "ErrorReport",
    "read_image",
    "write_image",
    "read_sensor_data",
    "write_sensor_data",
    "bilinear_sample",
    "resample_bilinear",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Grid:
    """Uniform square-pixel 2D grid."""

    width: int
    height: int
    dx: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)  # physical coords of pixel (0, 0) center

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"grid dimensions must be positive, got {self.width}x{self.height}")
        if not (self.dx > 0 and np.isfinite(self.dx)):
            raise ValueError(f"grid spacing must be positive and finite, got {self.dx}")

    @classmethod
    def centered(cls, width: int, height: int | None = None, dx: float = 1.0) -> "Grid":
        """Grid whose physical origin (0, 0) sits at the center of the image."""
        if height is None:
            height = width
        ox = -0.5 * (width - 1) * dx
        oy = -0.5 * (height - 1) * dx
        return cls(width=width, height=height, dx=dx, origin=(ox, oy))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def pixel_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical (x, y) coordinate arrays of all pixel centers, each height x width."""
        xs = self.origin[0] + self.dx * np.arange(self.width)
        ys = self.origin[1] + self.dx * np.arange(self.height)
        return np.meshgrid(xs, ys)

    def to_pixel(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates -> fractional (col, row) pixel coordinates."""
        return (np.asarray(x) - self.origin[0]) / self.dx, (np.asarray(y) - self.origin[1]) / self.dx


@dataclass(frozen=True, eq=False)
class Image:
    """Scalar field on a grid (source amplitude, reconstruction, phantom)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = _freeze(self.values)
        if v.ndim != 2 or v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("image contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.grid.width

    @property
    def height(self) -> int:
        return self.grid.height

    @property
    def dx(self) -> float:
        return self.grid.dx

    @property
    def origin(self) -> tuple[float, float]:
        return self.grid.origin

    def with_values(self, values: np.ndarray) -> "Image":
        return Image(grid=self.grid, values=values)


@dataclass(frozen=True)
class SensorGeometry:
    """Detectors uniformly spaced in angle on a circle."""

    center: tuple[float, float]
    radius: float
    num_sensors: int

    def __post_init__(self):
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise ValueError(f"sensor radius must be positive, got {self.radius}")
        if self.num_sensors < 3:
            raise ValueError(f"need at least 3 sensors, got {self.num_sensors}")

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.num_sensors) / self.num_sensors

    @property
    def positions(self) -> np.ndarray:
        """num_sensors x 2 array of physical (x, y) detector positions."""
        th = self.angles
        return np.stack(
            [self.center[0] + self.radius * np.cos(th), self.center[1] + self.radius * np.sin(th)],
            axis=1,
        )


@dataclass(frozen=True, eq=False)
class SensorData:
    """Per-detector time traces.

    ``time_origin`` is the index of t = 0: 0 for causal data, the center index
    for evenized (symmetric-in-time) data.
    """

    geometry: SensorGeometry
    dt: float
    traces: np.ndarray  # num_sensors x num_steps
    time_origin: int = 0

    def __post_init__(self):
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        tr = _freeze(self.traces)
        if tr.ndim != 2 or tr.shape[0] != self.geometry.num_sensors:
            raise ValueError(
                f"traces shape {tr.shape} does not match {self.geometry.num_sensors} sensors"
            )
        if not np.all(np.isfinite(tr)):
            raise ValueError("sensor traces contain non-finite values")
        if not (0 <= self.time_origin < tr.shape[1]):
            raise ValueError(f"time_origin {self.time_origin} outside trace window")
        object.__setattr__(self, "traces", tr)

    @property
    def num_sensors(self) -> int:
        return self.traces.shape[0]

    @property
    def num_steps(self) -> int:
        return self.traces.shape[1]

    @property
    def is_causal(self) -> bool:
        return self.time_origin == 0

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.num_steps) - self.time_origin) * self.dt

    def with_traces(self, traces: np.ndarray, time_origin: int | None = None) -> "SensorData":
        return SensorData(
            geometry=self.geometry,
            dt=self.dt,
            traces=traces,
            time_origin=self.time_origin if time_origin is None else time_origin,
        )


@dataclass(frozen=True, eq=False)
class DisplacementField:
    """2D vector field on a grid; components in pixel units."""

    grid: Grid
    ux: np.ndarray
    uy: np.ndarray

    def __post_init__(self):
        ux = _freeze(self.ux)
        uy = _freeze(self.uy)
        if ux.shape != self.grid.shape or uy.shape != self.grid.shape:
            raise ValueError(
                f"component shapes {ux.shape}/{uy.shape} do not match grid {self.grid.shape}"
            )
        if not (np.all(np.isfinite(ux)) and np.all(np.isfinite(uy))):
            raise ValueError("displacement field contains non-finite values")
        object.__setattr__(self, "ux", ux)
        object.__setattr__(self, "uy", uy)

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.ux, self.uy)


@dataclass(frozen=True)
class BandSpec:
    """Hard band-pass window [kappa_min, kappa_max], radians per length unit.

    The degenerate case kappa_min == kappa_max (empty band) is allowed and
    yields identically zero kernels; experiment configs reject it.
    """

    kappa_min: float
    kappa_max: float

    def __post_init__(self):
        if not (0 <= self.kappa_min <= self.kappa_max) or not np.isfinite(self.kappa_max):
            raise ValueError(
                f"need 0 <= kappa_min <= kappa_max, got ({self.kappa_min}, {self.kappa_max})"
            )

    @property
    def half_width(self) -> float:
        """a = (kappa_max - kappa_min) / 2."""
        return 0.5 * (self.kappa_max - self.kappa_min)

    @property
    def kappa0(self) -> float:
        """Center frequency of the window."""
        return self.kappa_min + self.half_width

    def scaled(self, factor: float) -> "BandSpec":
        return BandSpec(self.kappa_min * factor, self.kappa_max * factor)


@dataclass(frozen=True)
class MetricsRow:
    """One row of an error table: the four flow-validation measures."""

    aae: float
    aee_abs: float
    aee_rel: float
    warping: float
    mask_fraction: float = 1.0

    def __post_init__(self):
        for name in ("aae", "aee_abs", "aee_rel", "warping", "mask_fraction"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be nonnegative and finite, got {v}")


@dataclass
class ErrorReport:
    """Error-measure rows keyed by (texture_mode, lambda)."""

    rows: dict[tuple[str, float], MetricsRow] = field(default_factory=dict)

    def add(self, mode: str, lam: float, row: MetricsRow) -> None:
        self.rows[(mode, float(lam))] = row

    def modes(self) -> list[str]:
        seen: list[str] = []
        for mode, _ in self.rows:
            if mode not in seen:
                seen.append(mode)
        return seen

    def lambdas(self, mode: str) -> list[float]:
        return sorted(lam for m, lam in self.rows if m == mode)


# ---------------------------------------------------------------------------
# File I/O: raw float64 payload + JSON sidecar header
# ---------------------------------------------------------------------------

_IMAGE_HEADER_KEYS = {"width", "height", "dx", "origin"}
_SENSOR_HEADER_KEYS = {"num_sensors", "num_steps", "dt", "radius", "center", "time_origin"}


def _sidecar(path: str | os.PathLike) -> str:
    return f"{os.fspath(path)}.json"


def _load_header(path, required_keys) -> dict:
    try:
        with open(_sidecar(path), "r", encoding="ascii") as fh:
            header = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed or missing header {_sidecar(path)}: {exc}") from exc
    missing = required_keys - set(header)
    if missing:
        raise ValueError(f"header {_sidecar(path)} missing keys {sorted(missing)}")
    return header


def _load_payload(path, count: int) -> np.ndarray:
    data = np.fromfile(os.fspath(path), dtype="<f8")
    if data.size != count:
        raise ValueError(
            f"payload size mismatch in {path}: header declares {count} values, file has {data.size}"
        )
    if not np.all(np.isfinite(data)):
        raise ValueError(f"payload of {path} contains non-finite values")
    return data


def write_image(image: Image, path: str | os.PathLike) -> None:
    header = {
        "width": image.width,
        "height": image.height,
        "dx": image.dx,
        "origin": list(image.origin),
    }
    image.values.astype("<f8").tofile(os.fspath(path))
    with open(_sidecar(path), "w", encoding="ascii") as fh:
        json.dump(header, fh, indent=0, sort_keys=True)


def read_image(path: str | os.PathLike) -> Image:
    header = _load_header(path, _IMAGE_HEADER_KEYS)
    try:
        w, h = int(header["width"]), int(header["height"])
        dx = float(header["dx"])
        origin = (float(header["origin"][0]), float(header["origin"][1]))
    except (TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed header fields in {_sidecar(path)}: {exc}") from exc
    data = _load_payload(path, w * h)
    return Image(grid=Grid(width=w, height=h, dx=dx, origin=origin), values=data.reshape(h, w))


def write_sensor_data(data: SensorData, path: str | os.PathLike) -> None:
    header = {
        "num_sensors": data.num_sensors,
        "num_steps": data.num_steps,
        "dt": data.dt,
        "radius": data.geometry.radius,
        "center": list(data.geometry.center),
        "time_origin": data.time_origin,
    }
    data.traces.astype("<f8").tofile(os.fspath(path))
    with open(_sidecar(path), "w", encoding="ascii") as fh:
        json.dump(header, fh, indent=0, sort_keys=True)


def read_sensor_data(path: str | os.PathLike) -> SensorData:
    header = _load_header(path, _SENSOR_HEADER_KEYS)
    try:
        ns, nt = int(header["num_sensors"]), int(header["num_steps"])
        dt = float(header["dt"])
        geom = SensorGeometry(
            center=(float(header["center"][0]), float(header["center"][1])),
            radius=float(header["radius"]),
            num_sensors=ns,
        )
        origin = int(header["time_origin"])
    except (TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed header fields in {_sidecar(path)}: {exc}") from exc
    payload = _load_payload(path, ns * nt)
    return SensorData(geometry=geom, dt=dt, traces=payload.reshape(ns, nt), time_origin=origin)


# ---------------------------------------------------------------------------
# Bilinear resampling
# ---------------------------------------------------------------------------


def bilinear_sample(values: np.ndarray, x, y):
    """Bilinear interpolation of ``values`` at fractional pixel coords (x=col, y=row).

    Coordinates outside the grid clamp to the boundary pixel, so the function
    is total on finite inputs. Exact at pixel centers and on affine images;
    bounded by the min/max of the four surrounding pixels.
    """
    h, w = values.shape
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, w - 1.0)
    y = np.clip(np.asarray(y, dtype=np.float64), 0.0, h - 1.0)
    x0 = np.clip(np.floor(x).astype(np.intp), 0, max(w - 2, 0))
    y0 = np.clip(np.floor(y).astype(np.intp), 0, max(h - 2, 0))
    tx = x - x0
    ty = y - y0
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    v00 = values[y0, x0]
    v01 = values[y0, x1]
    v10 = values[y1, x0]
    v11 = values[y1, x1]
    return (1 - ty) * ((1 - tx) * v00 + tx * v01) + ty * ((1 - tx) * v10 + tx * v11)


def resample_bilinear(image: Image, x, y):
    """Bilinear sample of an Image at fractional pixel coordinates (x=col, y=row)."""
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("resampling coordinates must be finite")
    return bilinear_sample(image.values, x, y)

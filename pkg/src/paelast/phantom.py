"""Synthetic sources, ground-truth displacement fields, warping and noise texture.

Phantoms are piecewise-constant binary structures (value ``amplitude`` inside,
0 outside) with homogeneous interiors surrounded by edges, in the spirit of
vascular cross-sections. Displacement fields are analytic so the ground truth
entering the error measures is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DisplacementField, Grid, Image, bilinear_sample

__all__ = [
    "PhantomSpec",
    "DeformationSpec",
    "make_phantom",
    "make_displacement",
    "warp_image",
    "add_gaussian_texture",
    "MAX_DISPLACEMENT_PX",
]

# Small-displacement regime that justifies the linearized flow model.
MAX_DISPLACEMENT_PX = 5.0

_PHANTOM_KINDS = ("disc", "annulus", "branching_tree")
_DEFORMATION_KINDS = ("rigid_translation", "rigid_rotation", "nonrigid_bump")


@dataclass(frozen=True)
class PhantomSpec:
    """Geometry of a synthetic source; lengths in physical units.

    kind "disc": center, radius.
    kind "annulus": center, inner_radius, outer_radius.
    kind "branching_tree": center (trunk base), trunk_length, trunk_width,
    depth (0 = trunk only), branch_angle (radians), length_ratio, width_ratio,
    jitter (relative angle randomization, seeded) and seed.
    """

    kind: str
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.0
    inner_radius: float = 0.0
    outer_radius: float = 0.0
    trunk_length: float = 0.0
    trunk_width: float = 0.0
    depth: int = 0
    branch_angle: float = 0.6
    length_ratio: float = 0.72
    width_ratio: float = 0.6
    jitter: float = 0.0
    seed: int = 0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in _PHANTOM_KINDS:
            raise ValueError(f"unknown phantom kind {self.kind!r}, expected one of {_PHANTOM_KINDS}")
        if not (np.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ValueError(f"amplitude must be nonnegative, got {self.amplitude}")
        if self.kind == "disc" and self.radius < 0:
            raise ValueError("disc radius must be nonnegative")
        if self.kind == "annulus" and not (0 <= self.inner_radius <= self.outer_radius):
            raise ValueError("annulus needs 0 <= inner_radius <= outer_radius")
        if self.kind == "branching_tree":
            if self.trunk_length < 0 or self.trunk_width < 0:
                raise ValueError("tree trunk dimensions must be nonnegative")
            if self.depth < 0:
                raise ValueError("tree depth must be nonnegative")


@dataclass(frozen=True)
class DeformationSpec:
    """Analytic ground-truth deformation; displacements in pixel units.

    kind "rigid_translation": shift (pixels).
    kind "rigid_rotation": angle (radians) about pivot (physical coords).
    kind "nonrigid_bump": Gaussian bump u(x) = peak * exp(-|x-c|^2/(2 sigma^2)) * d
    with unit direction d, center in physical coords, sigma in pixels.
    """

    kind: str
    shift: tuple[float, float] = (0.0, 0.0)
    angle: float = 0.0
    pivot: tuple[float, float] = (0.0, 0.0)
    center: tuple[float, float] = (0.0, 0.0)
    sigma: float = 1.0
    peak: float = 0.0
    direction: tuple[float, float] = (1.0, 0.0)

    def __post_init__(self):
        if self.kind not in _DEFORMATION_KINDS:
            raise ValueError(
                f"unknown deformation kind {self.kind!r}, expected one of {_DEFORMATION_KINDS}"
            )
        if self.kind == "nonrigid_bump":
            if self.sigma <= 0:
                raise ValueError("bump sigma must be positive")
            if np.hypot(*self.direction) == 0:
                raise ValueError("bump direction must be nonzero")


def _segment_mask(xs: np.ndarray, ys: np.ndarray, p0, p1, width: float) -> np.ndarray:
    """Pixels whose centers lie within width/2 of the segment p0-p1, flat caps."""
    dx_, dy_ = p1[0] - p0[0], p1[1] - p0[1]
    length = np.hypot(dx_, dy_)
    if length == 0 or width <= 0:
        return np.zeros_like(xs, dtype=bool)
    ex, ey = dx_ / length, dy_ / length
    rx, ry = xs - p0[0], ys - p0[1]
    along = rx * ex + ry * ey
    perp = -rx * ey + ry * ex
    return (along >= 0) & (along <= length) & (np.abs(perp) <= 0.5 * width)


def _tree_segments(spec: PhantomSpec) -> list[tuple[tuple, tuple, float]]:
    rng = np.random.default_rng(spec.seed)
    segments = []

    def grow(base, angle, length, width, depth):
        tip = (base[0] + length * np.cos(angle), base[1] + length * np.sin(angle))
        segments.append((base, tip, width))
        if depth == 0:
            return
        for sign in (-1.0, 1.0):
            jit = spec.jitter * spec.branch_angle * (2.0 * rng.random() - 1.0)
            grow(
                tip,
                angle + sign * spec.branch_angle + jit,
                length * spec.length_ratio,
                width * spec.width_ratio,
                depth - 1,
            )

    grow(spec.center, 0.5 * np.pi, spec.trunk_length, spec.trunk_width, spec.depth)
    return segments


def make_phantom(spec: PhantomSpec, grid: Grid) -> Image:
    """Rasterize a phantom: amplitude inside the structure, 0 outside, deterministic."""
    xs, ys = grid.pixel_coords()
    if spec.kind == "disc":
        mask = (xs - spec.center[0]) ** 2 + (ys - spec.center[1]) ** 2 <= spec.radius**2
        if spec.radius == 0:
            mask &= False
    elif spec.kind == "annulus":
        r2 = (xs - spec.center[0]) ** 2 + (ys - spec.center[1]) ** 2
        mask = (r2 >= spec.inner_radius**2) & (r2 <= spec.outer_radius**2)
        if spec.outer_radius == 0:
            mask &= False
    else:
        mask = np.zeros(grid.shape, dtype=bool)
        for p0, p1, width in _tree_segments(spec):
            mask |= _segment_mask(xs, ys, p0, p1, width)
    return Image(grid=grid, values=np.where(mask, spec.amplitude, 0.0))


def support_radius(image: Image, center: tuple[float, float], threshold: float = 0.0) -> float:
    """Largest distance from ``center`` to a pixel with |value| > threshold."""
    xs, ys = image.grid.pixel_coords()
    occupied = np.abs(image.values) > threshold
    if not occupied.any():
        return 0.0
    r = np.hypot(xs - center[0], ys - center[1])
    return float(r[occupied].max())


def make_displacement(spec: DeformationSpec, grid: Grid) -> DisplacementField:
    """Evaluate an analytic displacement field on the grid (pixel units).

    Raises if the realized field exceeds the small-displacement cap of
    MAX_DISPLACEMENT_PX pixels anywhere on the grid.
    """
    xs, ys = grid.pixel_coords()
    if spec.kind == "rigid_translation":
        ux = np.full(grid.shape, float(spec.shift[0]))
        uy = np.full(grid.shape, float(spec.shift[1]))
    elif spec.kind == "rigid_rotation":
        rx = xs - spec.pivot[0]
        ry = ys - spec.pivot[1]
        c, s = np.cos(spec.angle), np.sin(spec.angle)
        # physical displacement of the rotated point, converted to pixels
        ux = (c * rx - s * ry - rx) / grid.dx
        uy = (s * rx + c * ry - ry) / grid.dx
    else:
        dnorm = np.hypot(*spec.direction)
        ex, ey = spec.direction[0] / dnorm, spec.direction[1] / dnorm
        # sigma is in pixels; distances measured in pixels as well
        r2 = ((xs - spec.center[0]) ** 2 + (ys - spec.center[1]) ** 2) / grid.dx**2
        env = spec.peak * np.exp(-0.5 * r2 / spec.sigma**2)
        ux = env * ex
        uy = env * ey
    mag = float(np.hypot(ux, uy).max())
    if mag > MAX_DISPLACEMENT_PX:
        raise ValueError(
            f"displacement magnitude {mag:.3f} px exceeds the {MAX_DISPLACEMENT_PX} px cap"
        )
    return DisplacementField(grid=grid, ux=ux, uy=uy)


def warp_image(f1: Image, u: DisplacementField) -> Image:
    """Warp an image: f2(x) = f1(x + u(x)), bilinear sampling, clamped borders."""
    if u.grid != f1.grid:
        raise ValueError("image and displacement field are on different grids")
    h, w = f1.grid.shape
    cols, rows = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    warped = bilinear_sample(f1.values, cols + u.ux, rows + u.uy)
    return Image(grid=f1.grid, values=warped)


def add_gaussian_texture(f: Image, alpha: float, seed: int) -> Image:
    """Add i.i.d. standard-normal noise scaled by alpha; deterministic for a seed."""
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 0:
        return f
    rng = np.random.default_rng(seed)
    return Image(grid=f.grid, values=f.values + alpha * rng.standard_normal(f.grid.shape))

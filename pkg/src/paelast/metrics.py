"""Error measures for validating estimated flow against ground truth.

Integrals are realized as pixel means so values are comparable across grid
resolutions. Angle-based and relative measures are restricted to pixels where
the ground-truth magnitude is at least ``eps_mag`` (phase and the relative
error are undefined on vanishing vectors); the warping error compares the
second image against the flow-warped first image with the same backward
convention as the phantom warp, f2(x) vs f1(x + u(x)).
"""

from __future__ import annotations

import numpy as np

from .core import DisplacementField, Image
from .phantom import warp_image

__all__ = ["aae", "aee", "aee_rel", "warping_error", "magnitude_mask_fraction", "EPS_MAG"]

EPS_MAG = 1e-3  # px; pixels with |u0| below this are excluded from masked measures


def _check_grids(u: DisplacementField, u0: DisplacementField) -> None:
    if u.grid != u0.grid:
        raise ValueError("displacement fields are on different grids")


def _magnitude_mask(u0: DisplacementField, eps_mag: float, mask) -> np.ndarray:
    out = u0.magnitude() >= eps_mag
    if mask is not None:
        out &= np.asarray(mask, dtype=bool)
    if not out.any():
        raise ValueError("ground-truth magnitude mask is empty; angle/relative errors undefined")
    return out


def magnitude_mask_fraction(u0: DisplacementField, eps_mag: float = EPS_MAG, mask=None) -> float:
    """Fraction of pixels entering the masked measures."""
    out = u0.magnitude() >= eps_mag
    if mask is not None:
        out &= np.asarray(mask, dtype=bool)
    return float(np.mean(out))


def aae(u: DisplacementField, u0: DisplacementField, mask=None, eps_mag: float = EPS_MAG) -> float:
    """Average angular error: mean |phase(u) - phase(u0)| wrapped to [0, pi].

    Restricted to pixels with |u0| >= eps_mag, intersected with the optional
    region-of-interest mask.
    """
    _check_grids(u, u0)
    m = _magnitude_mask(u0, eps_mag, mask)
    d = np.abs(np.arctan2(u.uy, u.ux) - np.arctan2(u0.uy, u0.ux))
    d = np.minimum(d, 2.0 * np.pi - d)
    return float(d[m].mean())


def aee(u: DisplacementField, u0: DisplacementField, mask=None) -> float:
    """Average endpoint error: mean Euclidean pointwise distance."""
    _check_grids(u, u0)
    err = np.hypot(u.ux - u0.ux, u.uy - u0.uy)
    if mask is not None:
        err = err[np.asarray(mask, dtype=bool)]
    return float(err.mean())


def aee_rel(u: DisplacementField, u0: DisplacementField, mask=None, eps_mag: float = EPS_MAG) -> float:
    """Average relative endpoint error: mean of ||u - u0|| / ||u0|| over the mask."""
    _check_grids(u, u0)
    m = _magnitude_mask(u0, eps_mag, mask)
    err = np.hypot(u.ux - u0.ux, u.uy - u0.uy)
    return float((err[m] / u0.magnitude()[m]).mean())


def warping_error(f1: Image, f2: Image, u: DisplacementField, mask=None) -> float:
    """Mean absolute residual between f2 and the u-warped f1."""
    if f1.grid != f2.grid or u.grid != f1.grid:
        raise ValueError("images and flow must share one grid")
    predicted = warp_image(f1, u)
    resid = np.abs(f2.values - predicted.values)
    if mask is not None:
        resid = resid[np.asarray(mask, dtype=bool)]
    return float(resid.mean())

"""Horn-Schunck optical flow for quasi-static image pairs.

Minimizes the discrete energy

    E(u, v) = sum (Ix u + Iy v + It)^2 + lambda * sum_edges (du^2 + dv^2)

with Ix, Iy the central-difference gradients of the first image (one-sided at
borders) and the regularizer summed over horizontal/vertical pixel edges
(homogeneous Neumann boundary). The weight sits on the regularizer; divide by
lambda if a data-term weighting is wanted.

Sign convention: It = f1 - f2, the linearization of the backward warp
f2(x) = f1(x + u(x)). The estimate therefore lives in the same convention as
the image warp, the ground-truth deformation fields and the error measures:
a pair built as f2 = warp(f1, u0) is recovered as u ~ +u0, and warping f1
with the estimate predicts f2.

Solved by red-black Gauss-Seidel on the Euler-Lagrange equations: each color
update is an exact per-pixel 2x2 minimization with the other color frozen, so
the energy is non-increasing at every half sweep. Iteration stops once both
the relative update norm and the relative Euler-Lagrange residual fall below
the tolerance.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .core import DisplacementField, Image

__all__ = ["FlowConfig", "FlowResult", "horn_schunck", "lambda_sweep", "default_lambda_grid"]

THREADS_ENV_VAR = "PAELAST_THREADS"


@dataclass(frozen=True)
class FlowConfig:
    lam: float = 10.0  # regularization weight (on the smoothness term)
    max_iterations: int = 2000
    tolerance: float = 1e-6  # relative update / residual stopping threshold
    gradient_scheme: str = "central"

    def __post_init__(self):
        if not (self.lam > 0 and np.isfinite(self.lam)):
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not (self.tolerance > 0):
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.gradient_scheme != "central":
            raise ValueError(f"unsupported gradient scheme {self.gradient_scheme!r}")


@dataclass(frozen=True)
class FlowResult:
    field: DisplacementField
    energy: float
    energy_history: np.ndarray  # energy after each full iteration, [0] = initial
    iterations: int
    converged: bool  # False = stopped at max_iterations (warning flag)


def _neighbor_sums(u: np.ndarray, out: np.ndarray) -> np.ndarray:
    out.fill(0.0)
    out[1:, :] += u[:-1, :]
    out[:-1, :] += u[1:, :]
    out[:, 1:] += u[:, :-1]
    out[:, :-1] += u[:, 1:]
    return out


def _energy(ix, iy, it, lam, u, v) -> float:
    data = ix * u + iy * v + it
    reg = (
        np.sum((u[:, 1:] - u[:, :-1]) ** 2)
        + np.sum((u[1:, :] - u[:-1, :]) ** 2)
        + np.sum((v[:, 1:] - v[:, :-1]) ** 2)
        + np.sum((v[1:, :] - v[:-1, :]) ** 2)
    )
    return float(np.sum(data * data) + lam * reg)


def horn_schunck(f1: Image, f2: Image, cfg: FlowConfig) -> FlowResult:
    """Estimate the displacement field between two images."""
    if f1.grid != f2.grid:
        raise ValueError("image pair is on different grids")
    iy, ix = np.gradient(f1.values)
    it = f1.values - f2.values  # backward-warp linearization, see module docstring
    lam = cfg.lam

    h, w = f1.grid.shape
    nbh = np.full((h, w), 4.0)
    nbh[0, :] -= 1
    nbh[-1, :] -= 1
    nbh[:, 0] -= 1
    nbh[:, -1] -= 1

    a11 = ix * ix + lam * nbh
    a12 = ix * iy
    a22 = iy * iy + lam * nbh
    det = a11 * a22 - a12 * a12
    bx = -ix * it
    by = -iy * it

    rows, cols = np.indices((h, w))
    colors = [np.flatnonzero(((rows + cols) % 2 == c).ravel()) for c in (0, 1)]
    parts = [
        (idx, a11.ravel()[idx], a12.ravel()[idx], a22.ravel()[idx], det.ravel()[idx],
         bx.ravel()[idx], by.ravel()[idx])
        for idx in colors
    ]

    u = np.zeros((h, w))
    v = np.zeros((h, w))
    su = np.empty_like(u)
    sv = np.empty_like(v)
    uf = u.reshape(-1)
    vf = v.reshape(-1)

    res0 = np.sqrt(np.sum((ix * it) ** 2) + np.sum((iy * it) ** 2))
    energies = [_energy(ix, iy, it, lam, u, v)]
    tiny = np.finfo(np.float64).tiny
    converged = False
    iterations = 0

    def rel_residual() -> float:
        _neighbor_sums(u, su)
        _neighbor_sums(v, sv)
        shared = ix * u + iy * v + it
        ru = ix * shared + lam * (nbh * u - su)
        rv = iy * shared + lam * (nbh * v - sv)
        return np.sqrt(np.sum(ru * ru) + np.sum(rv * rv)) / max(res0, tiny)

    for iterations in range(1, cfg.max_iterations + 1):
        upd_sq = 0.0
        for idx, c11, c12, c22, cdet, cbx, cby in parts:
            _neighbor_sums(u, su)
            _neighbor_sums(v, sv)
            b1 = lam * su.ravel()[idx] + cbx
            b2 = lam * sv.ravel()[idx] + cby
            u_new = (c22 * b1 - c12 * b2) / cdet
            v_new = (c11 * b2 - c12 * b1) / cdet
            du = u_new - uf[idx]
            dv = v_new - vf[idx]
            upd_sq += float(du @ du + dv @ dv)
            uf[idx] = u_new
            vf[idx] = v_new
        energies.append(_energy(ix, iy, it, lam, u, v))

        norm = np.sqrt(np.sum(u * u) + np.sum(v * v))
        # the residual pass costs as much as an iteration; only check it once
        # the cheap update criterion is already met
        if np.sqrt(upd_sq) <= cfg.tolerance * max(norm, tiny) and rel_residual() <= cfg.tolerance:
            converged = True
            break

    field = DisplacementField(grid=f1.grid, ux=u, uy=v)
    history = np.asarray(energies)
    return FlowResult(
        field=field,
        energy=float(history[-1]),
        energy_history=history,
        iterations=iterations,
        converged=converged,
    )


def default_lambda_grid(num: int = 21, lo_exp: float = 0.5, hi_exp: float = 2.5) -> np.ndarray:
    """Log-spaced regularization weights, default 21 points over [10^0.5, 10^2.5]."""
    return np.logspace(lo_exp, hi_exp, num)


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV_VAR, "1")))
    except ValueError:
        return 1


def lambda_sweep(
    f1: Image,
    f2: Image,
    lambdas,
    cfg: FlowConfig,
    workers: int | None = None,
) -> list[FlowResult]:
    """One flow per regularization weight, cold-started and independent.

    Results are ordered like ``lambdas`` regardless of the worker count
    (override the default of 1 with the PAELAST_THREADS environment variable).
    """
    lams = [float(l) for l in lambdas]
    if not lams or any(l <= 0 for l in lams):
        raise ValueError("lambda grid must be nonempty and strictly positive")
    if workers is None:
        workers = _worker_count()
    if workers <= 1 or len(lams) == 1:
        return [horn_schunck(f1, f2, replace(cfg, lam=l)) for l in lams]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(horn_schunck, f1, f2, replace(cfg, lam=l)) for l in lams]
        return [fut.result() for fut in futures]

"""Photoacoustic inversion on a circular array by time reversal.

The wave equation is stepped backward from t = T to 0 on the reconstruction
grid while the measured traces, linearly interpolated in angle between
sensors, are imposed as Dirichlet values on the rasterized sensor circle.
The ring is thick enough (|dist - R| <= 0.55 dx) that no 4-connected stencil
path crosses it, so the interior evolution is fully determined by the data.
The field at t = 0 restricted to the interior of the circle is the
reconstruction.

``reconstruct_textured`` composes the texture chain: hard band-pass of the
causal traces, even extension, restriction to t >= 0 (the negative half is
redundant by symmetry) and time reversal, yielding the band-limited image.
"""

from __future__ import annotations

import numpy as np

from .bandlimit import apply_bandpass, make_even
from .core import BandSpec, Grid, Image, SensorData
from .wave import SolverConfig, _CFL_LIMIT, _laplacian

__all__ = ["reconstruct_time_reversal", "reconstruct_textured"]

_RING_HALF_WIDTH = 0.55  # in units of dx; > 0.5 blocks every 4-connected crossing


def _ring_geometry(grid: Grid, m: SensorData):
    """Ring cell indices, interior mask and per-cell angular interpolation."""
    geom = m.geometry
    xs, ys = grid.pixel_coords()
    dist = np.hypot(xs - geom.center[0], ys - geom.center[1])
    half = _RING_HALF_WIDTH * grid.dx
    ring = np.abs(dist - geom.radius) <= half
    if not ring.any():
        raise ValueError("sensor circle does not intersect the reconstruction grid")
    ri, rj = np.nonzero(ring)
    if ri.min() == 0 or rj.min() == 0 or ri.max() == grid.height - 1 or rj.max() == grid.width - 1:
        raise ValueError("sensor circle touches the reconstruction grid boundary")
    theta = np.mod(np.arctan2(ys[ring] - geom.center[1], xs[ring] - geom.center[0]), 2 * np.pi)
    s_pos = theta / (2 * np.pi / geom.num_sensors)
    s0 = np.floor(s_pos).astype(np.intp) % geom.num_sensors
    w = s_pos - np.floor(s_pos)
    s1 = (s0 + 1) % geom.num_sensors
    interior = dist < geom.radius - half
    return ring, interior, s0, s1, w


def reconstruct_time_reversal(m: SensorData, grid: Grid, cfg: SolverConfig) -> Image:
    """Invert causal circle data for the initial pressure by time reversal."""
    if not m.is_causal:
        raise ValueError("time reversal expects causal data (time_origin 0)")
    geom = m.geometry
    dx = grid.dx
    if m.dt > (_CFL_LIMIT + 1e-12) * dx:
        raise ValueError(
            f"data time step {m.dt:g} violates the stability bound {_CFL_LIMIT * dx:g} "
            f"for grid spacing {dx:g}"
        )
    t_span = (m.num_steps - 1) * m.dt
    if t_span < 2.0 * geom.radius:
        raise ValueError(
            f"trace duration {t_span:g} is shorter than the sensor-circle diameter "
            f"{2 * geom.radius:g}; reconstruction would be incomplete"
        )
    min_sensors = np.pi * geom.radius / dx
    if geom.num_sensors < min_sensors:
        raise ValueError(
            f"{geom.num_sensors} sensors undersample the circle; need >= {min_sensors:.0f} "
            f"(arc spacing <= 2 dx)"
        )

    ring, interior, s0, s1, w = _ring_geometry(grid, m)
    # ring Dirichlet values for every time step: angle-interpolated traces
    ring_data = (1.0 - w)[:, None] * m.traces[s0, :] + w[:, None] * m.traces[s1, :]

    inv_dx2 = 1.0 / (dx * dx)
    dt2 = m.dt * m.dt
    q_next = np.zeros(grid.shape)  # field at step n+1
    q_cur = np.zeros(grid.shape)  # field at step n
    q_cur[ring] = ring_data[:, m.num_steps - 1]
    lap = np.empty_like(q_cur)
    for n in range(m.num_steps - 1, 0, -1):
        q_prev = 2.0 * q_cur - q_next + dt2 * _laplacian(q_cur, inv_dx2, lap)
        q_prev[ring] = ring_data[:, n - 1]
        q_next, q_cur = q_cur, q_prev
    return Image(grid=grid, values=np.where(interior, q_cur, 0.0))


def reconstruct_textured(
    m: SensorData,
    band: BandSpec,
    grid: Grid,
    cfg: SolverConfig,
    decay_threshold: float = 1e-3,
    taper_fraction: float = 0.2,
) -> Image:
    """Band-limited (textured) reconstruction from causal full-band traces.

    The filtered, evenized data is restarted at the time where its envelope
    has decayed below ``decay_threshold`` of the maximum (never below the
    minimum duration time reversal needs, capped by the available window).
    Hard band-pass ringing decays only like 1/t, so the last
    ``taper_fraction`` of the restart window is brought to zero by a cosine
    ramp; cutting the oscillation mid-swing would otherwise inject a
    phase-dependent step into the backward evolution.
    """
    if not m.is_causal:
        raise ValueError("textured reconstruction expects causal data")
    even = make_even(apply_bandpass(m, band))
    causal = even.traces[:, even.time_origin :]

    envelope = np.abs(causal).max(axis=0)
    peak = envelope.max()
    n_min = int(np.ceil(2.0 * m.geometry.radius / m.dt)) + 2
    if peak > 0:
        above = np.nonzero(envelope >= decay_threshold * peak)[0]
        n_keep = min(max(int(above[-1]) + 1, n_min), causal.shape[1])
    else:
        n_keep = min(n_min, causal.shape[1])
    kept = causal[:, :n_keep].copy()
    n_taper = min(int(taper_fraction * n_keep), max(n_keep - n_min, 0))
    if n_taper > 0:
        ramp = 0.5 * (1.0 + np.cos(np.pi * np.arange(1, n_taper + 1) / n_taper))
        kept[:, n_keep - n_taper :] *= ramp[None, :]
    restarted = SensorData(geometry=m.geometry, dt=m.dt, traces=kept, time_origin=0)
    return reconstruct_time_reversal(restarted, grid, cfg)

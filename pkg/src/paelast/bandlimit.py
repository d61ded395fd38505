"""Band-limitation texture machinery.

Fourier convention: forward transforms are unnormalized
(``F(k) = int f(t) exp(-i k t) dt``), inverse transforms carry ``(2 pi)^-n``.
Under this convention the pair implemented here is self-consistent:

* ``irf`` is the 1D inverse transform of the indicator of
  ``{kappa_min <= |k| <= kappa_max}``:
  ``phi(t) = (sin(kappa_max t) - sin(kappa_min t)) / (pi t)``.
* ``psf`` is the 2D inverse transform of the same annulus indicator:
  ``Psi(r) = (kappa_max J1(kappa_max r) - kappa_min J1(kappa_min r)) / (2 pi r)``.

The line-integral projection (Abel transform) of ``psf`` equals ``irf``
exactly, which closes the Fourier/Abel/Hankel cycle and is what the
trace-domain and image-domain filters realized below rely on.

Discrete operations are exact circular projections: ``apply_bandpass``
symmetrizes causal traces onto a doubled time axis (which both suppresses
wrap-around of the half-line data and makes the masked result an even
function of time), applies the hard spectral mask there, and restricts back.
This makes the operator idempotent to round-off and makes filtering commute
exactly with evenization.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import j1 as _bessel_j1

from .core import BandSpec, Image, SensorData

__all__ = [
    "irf",
    "irf_kernel",
    "psf",
    "apply_bandpass",
    "make_even",
    "convolve_psf",
    "convolve_time",
    "abel_radial",
]


def irf(t, band: BandSpec):
    """Time-domain impulse response of the hard band-pass window.

    Even in t; the removable singularity at t = 0 is evaluated analytically
    (value ``(kappa_max - kappa_min) / pi``).
    """
    t = np.asarray(t, dtype=np.float64)
    a = band.half_width
    # sin(a t)/t written via the normalized sinc for stability at t = 0
    return (2.0 * a / np.pi) * np.cos(band.kappa0 * t) * np.sinc(a * t / np.pi)


def irf_kernel(band: BandSpec, dt: float, half_width: int) -> np.ndarray:
    """irf sampled on a symmetric grid of 2*half_width + 1 points, spacing dt."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if half_width < 0:
        raise ValueError(f"half_width must be nonnegative, got {half_width}")
    n = np.arange(-half_width, half_width + 1)
    return irf(n * dt, band)


def _j1_over_z(z: np.ndarray) -> np.ndarray:
    """J1(z)/z, finite at z = 0 (limit 1/2)."""
    z = np.asarray(z, dtype=np.float64)
    small = np.abs(z) < 1e-6
    zsafe = np.where(small, 1.0, z)
    return np.where(small, 0.5 - z * z / 16.0, _bessel_j1(zsafe) / zsafe)


def psf(r, band: BandSpec):
    """Radial profile of the band-pass point-spread function.

    Oscillatory Bessel kernel, finite at r = 0 with value
    ``(kappa_max^2 - kappa_min^2) / (4 pi)``; decays like r^(-3/2).
    """
    r = np.asarray(r, dtype=np.float64)
    kmax, kmin = band.kappa_max, band.kappa_min
    return (kmax**2 * _j1_over_z(kmax * r) - kmin**2 * _j1_over_z(kmin * r)) / (2.0 * np.pi)


# ---------------------------------------------------------------------------
# Trace-domain operations
# ---------------------------------------------------------------------------


def _even_buffer(traces: np.ndarray) -> np.ndarray:
    """Mirror causal traces onto a circular buffer of length 2N-1.

    Index n of the buffer holds the sample at time |n or n-M| so the sequence
    is circularly even about n = 0 and its DFT is real.
    """
    n = traces.shape[1]
    buf = np.empty((traces.shape[0], 2 * n - 1), dtype=np.float64)
    buf[:, :n] = traces
    buf[:, n:] = traces[:, -1:0:-1]
    return buf


def _check_nyquist(band: BandSpec, dt: float) -> None:
    nyq = np.pi / dt
    if band.kappa_max > nyq * (1 + 1e-12):
        raise ValueError(
            f"band edge {band.kappa_max:g} exceeds the Nyquist frequency pi/dt = {nyq:g}"
        )


def _mask_even_buffer(buf: np.ndarray, dt: float, band: BandSpec) -> np.ndarray:
    """Hard spectral mask (inclusive edges) on a circular buffer, along axis 1."""
    m = buf.shape[1]
    spectrum = np.fft.rfft(buf, axis=1)
    omega = 2.0 * np.pi * np.fft.rfftfreq(m, d=dt)
    keep = (omega >= band.kappa_min) & (omega <= band.kappa_max)
    spectrum *= keep
    return np.fft.irfft(spectrum, n=m, axis=1)


def apply_bandpass(m: SensorData, band: BandSpec) -> SensorData:
    """Hard band-pass of sensor traces in time (inclusive band edges).

    Causal data is symmetrized to even time internally, masked on the doubled
    axis, and restricted back to t >= 0; evenized data is masked on its own
    symmetric axis. Rejects band edges above the Nyquist frequency pi/dt.
    """
    _check_nyquist(band, m.dt)
    if m.is_causal:
        buf = _even_buffer(m.traces)
        out = _mask_even_buffer(buf, m.dt, band)
        return m.with_traces(out[:, : m.num_steps])
    if m.num_steps % 2 == 1 and m.time_origin == (m.num_steps - 1) // 2:
        rolled = np.roll(m.traces, -m.time_origin, axis=1)
        out = _mask_even_buffer(rolled, m.dt, band)
        return m.with_traces(np.roll(out, m.time_origin, axis=1))
    raise ValueError("traces must be causal (time_origin 0) or centered evenized data")


def make_even(m: SensorData) -> SensorData:
    """Even extension of causal traces, computed spectrally.

    Uses the identity "spectrum of the even extension = 2 Re(causal spectrum)"
    on zero-padded transforms; in discrete time the t = 0 sample would be
    counted twice, so it is corrected once, making the output equal the index
    mirror m[|n|]. Output has a symmetric time axis (centered time_origin).
    """
    if not m.is_causal:
        raise ValueError("make_even expects causal data (time_origin 0)")
    x = m.traces
    n = m.num_steps
    two_re = 2.0 * np.fft.rfft(x, n=2 * n, axis=1).real
    y = np.fft.irfft(two_re, n=2 * n, axis=1)
    out = np.empty((m.num_sensors, 2 * n - 1), dtype=np.float64)
    out[:, n - 1 :] = y[:, :n]
    out[:, n - 1] -= x[:, 0]  # the doubled t = 0 sample
    out[:, : n - 1] = y[:, n + 1 :]
    return m.with_traces(out, time_origin=n - 1)


def convolve_time(kernel: np.ndarray, m: SensorData, kernel_dt: float | None = None) -> SensorData:
    """Per-sensor linear convolution of the traces with a sampled time kernel.

    The kernel must have odd length (symmetric support about its center
    sample) and be sampled on the trace time step; the result is scaled by dt
    so it approximates the continuous convolution, and is returned on the
    input time axis.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 1 or kernel.size % 2 == 0:
        raise ValueError("kernel must be a 1D array of odd length")
    if kernel_dt is not None and not np.isclose(kernel_dt, m.dt, rtol=1e-9, atol=0.0):
        raise ValueError(f"kernel dt {kernel_dt:g} does not match trace dt {m.dt:g}")
    out = fftconvolve(m.traces, kernel[None, :], mode="same", axes=1) * m.dt
    return m.with_traces(out)


# ---------------------------------------------------------------------------
# Image-domain operations
# ---------------------------------------------------------------------------


def convolve_psf(f: Image, band: BandSpec) -> Image:
    """Band-limit an image: spectral annulus mask, the discrete realization of
    convolution with the band-pass point-spread function.

    The mask is applied on the image's own frequency grid (an exact circular
    projection: idempotent, and plane waves with in-band |kappa| are
    eigenfunctions). Rejects band edges above the grid Nyquist pi/dx.
    """
    nyq = np.pi / f.dx
    if band.kappa_max > nyq * (1 + 1e-12):
        raise ValueError(f"band edge {band.kappa_max:g} exceeds the grid Nyquist pi/dx = {nyq:g}")
    kx = 2.0 * np.pi * np.fft.fftfreq(f.width, d=f.dx)
    ky = 2.0 * np.pi * np.fft.fftfreq(f.height, d=f.dx)
    kr = np.hypot(kx[None, :], ky[:, None])
    keep = (kr >= band.kappa_min) & (kr <= band.kappa_max)
    out = np.fft.ifft2(np.fft.fft2(f.values) * keep).real
    return f.with_values(out)


# ---------------------------------------------------------------------------
# Abel transform of the point-spread function
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def abel_radial(band: BandSpec, s_samples, envelope_tol: float = 1e-6) -> np.ndarray:
    """Line-integral projection of the radial point-spread function.

    Evaluates ``2 * int_0^inf psf(sqrt(s^2 + v^2)) dv`` (the substitution
    v^2 = r^2 - s^2 removes the inverse-square-root singularity) by composite
    Gauss-Legendre quadrature with three chunks per kernel oscillation, with
    the tail truncated where the r^(-3/2) envelope falls below envelope_tol.
    Even in s by construction.
    """
    s = np.asarray(s_samples, dtype=np.float64)
    if band.kappa_max == band.kappa_min:
        return np.zeros_like(s)
    coeff = np.sqrt(2.0 / np.pi) / (2.0 * np.pi) * (
        np.sqrt(band.kappa_max) + np.sqrt(band.kappa_min)
    )
    r_max = (coeff / envelope_tol) ** (2.0 / 3.0)
    r_max = max(r_max, 40.0 / band.kappa_max)
    period = 2.0 * np.pi / band.kappa_max
    chunk = period / 3.0

    out = np.empty(s.shape, dtype=np.float64)
    flat = s.ravel()
    res = np.empty(flat.shape)
    for i, si in enumerate(flat):
        v_max_sq = r_max * r_max - si * si
        if v_max_sq <= 0:
            res[i] = 0.0
            continue
        v_max = np.sqrt(v_max_sq)
        n_chunks = int(np.ceil(v_max / chunk))
        edges = np.linspace(0.0, v_max, n_chunks + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        weights = half[:, None] * _GL_WEIGHTS[None, :]
        vals = psf(np.sqrt(si * si + nodes * nodes), band)
        res[i] = 2.0 * float(np.sum(vals * weights))
    out.flat[:] = res
    if not np.all(np.isfinite(out)):
        raise ArithmeticError("Abel-transform quadrature produced non-finite values")
    return out

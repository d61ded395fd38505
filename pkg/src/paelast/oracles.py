"""Independent reference computations.

Each routine here takes a deliberately different route from the operation it
cross-checks (direct quadrature instead of closed forms, O(N^2) transform
sums instead of FFTs, from-scratch Bessel evaluation instead of scipy) so the
test suite always compares two independent implementations. The CLI `oracle`
subcommand prints the reference values produced here.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .core import BandSpec

__all__ = [
    "quad_irf",
    "j1_reference",
    "psf_reference",
    "bilinear_reference",
    "bandpass_reference",
    "convolve_time_reference",
    "mirror_even_reference",
    "ORACLE_SUITES",
]


def quad_irf(t: float, band: BandSpec) -> float:
    """irf via adaptive quadrature of (1/pi) * int_band cos(kappa t) dkappa."""
    val, _ = quad(lambda k: math.cos(k * t), band.kappa_min, band.kappa_max, limit=200)
    return val / math.pi


def _j1_series(z: float) -> float:
    """Bessel J1 power series, accurate for |z| <= 18 in float64."""
    half = 0.5 * z
    term = half
    total = term
    for k in range(1, 60):
        term *= -(half * half) / (k * (k + 1))
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-300):
            break
    return total


def _j1_integral(z: float) -> float:
    """Bessel J1 via its integral representation (adaptive quadrature)."""
    val, _ = quad(lambda th: math.cos(th - z * math.sin(th)), 0.0, math.pi, limit=400)
    return val / math.pi


def j1_reference(z: float) -> float:
    """From-scratch J1: series for small arguments cross-checked by quadrature."""
    if abs(z) <= 12.0:
        series = _j1_series(z)
        integral = _j1_integral(z)
        if abs(series - integral) > 1e-9 * max(1.0, abs(series)):
            raise ArithmeticError(f"J1 reference routes disagree at z={z}")
        return series
    return _j1_integral(z)


def psf_reference(r: float, band: BandSpec) -> float:
    """Point-spread value via the independent J1 (limit handled analytically)."""
    if r == 0.0:
        return (band.kappa_max**2 - band.kappa_min**2) / (4.0 * math.pi)
    kmax, kmin = band.kappa_max, band.kappa_min
    return (kmax * j1_reference(kmax * r) - kmin * j1_reference(kmin * r)) / (2.0 * math.pi * r)


def bilinear_reference(values: np.ndarray, x: float, y: float) -> float:
    """Textbook four-point bilinear formula with border clamping."""
    h, w = values.shape
    x = min(max(float(x), 0.0), w - 1.0)
    y = min(max(float(y), 0.0), h - 1.0)
    j0 = min(int(math.floor(x)), w - 2) if w > 1 else 0
    i0 = min(int(math.floor(y)), h - 2) if h > 1 else 0
    j1_ = min(j0 + 1, w - 1)
    i1 = min(i0 + 1, h - 1)
    s = x - j0
    t = y - i0
    return float(
        values[i0, j0] * (1 - s) * (1 - t)
        + values[i0, j1_] * s * (1 - t)
        + values[i1, j0] * (1 - s) * t
        + values[i1, j1_] * s * t
    )


def _dft(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    k = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return x @ w.T


def _idft(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    k = np.arange(n)
    w = np.exp(2j * np.pi * np.outer(k, k) / n)
    return (x @ w.T) / n


def mirror_even_reference(traces: np.ndarray) -> np.ndarray:
    """Even extension by index mirroring: out[n] = traces[|n - (N-1)|]."""
    n = traces.shape[1]
    idx = np.abs(np.arange(-(n - 1), n))
    return traces[:, idx]


def bandpass_reference(traces: np.ndarray, dt: float, band: BandSpec) -> np.ndarray:
    """Brute-force O(N^2) version of the causal band-pass path.

    Mirrors the traces to the symmetric axis, applies the same inclusive mask
    through direct DFT sums, and restricts back to t >= 0.
    """
    n = traces.shape[1]
    sym = np.empty((traces.shape[0], 2 * n - 1))
    sym[:, :n] = traces
    sym[:, n:] = traces[:, -1:0:-1]
    m = sym.shape[1]
    spectrum = _dft(sym)
    omega = 2.0 * np.pi * np.fft.fftfreq(m, d=dt)
    keep = (np.abs(omega) >= band.kappa_min) & (np.abs(omega) <= band.kappa_max)
    out = _idft(spectrum * keep).real
    return out[:, :n]


def convolve_time_reference(kernel: np.ndarray, traces: np.ndarray, dt: float) -> np.ndarray:
    """Direct O(N K) centered linear convolution, scaled by dt."""
    half = (len(kernel) - 1) // 2
    n = traces.shape[1]
    out = np.zeros_like(traces, dtype=np.float64)
    for lag in range(-half, half + 1):
        w = kernel[half + lag]
        if w == 0.0:
            continue
        lo = max(0, lag)
        hi = min(n, n + lag)
        out[:, lo:hi] += w * traces[:, lo - lag : hi - lag]
    return out * dt


# ---------------------------------------------------------------------------
# CLI suites: print reference values
# ---------------------------------------------------------------------------


def _suite_irf() -> None:
    band = BandSpec(0.4, 10.0)
    print("irf reference values, band (0.4, 10), via adaptive quadrature:")
    for t in (0.0, 0.25, 0.654498, 1.0, 2.0):
        print(f"  t={t:<9g} irf={quad_irf(t, band):+.9f}")


def _suite_psf() -> None:
    band = BandSpec(0.4, 10.0)
    print("psf reference values, band (0.4, 10), via series/quadrature J1:")
    for r in (0.0, 0.5, 1.0, 2.0, 5.0):
        print(f"  r={r:<9g} psf={psf_reference(r, band):+.9f}")


def _suite_abel() -> None:
    from .bandlimit import abel_radial

    print("Abel transform of the psf vs. the irf (cycle closure):")
    for edges in ((0.4, 10.0), (1.8, 10.0)):
        band = BandSpec(*edges)
        s = np.linspace(0.0, 20.0 / band.kappa_max, 9)
        proj = abel_radial(band, s)
        for si, pi_ in zip(s, proj):
            print(f"  band={edges} s={si:<8.4f} abel={pi_:+.7f} irf={quad_irf(si, band):+.7f}")


def _suite_bilinear() -> None:
    rng = np.random.default_rng(7)
    values = rng.standard_normal((5, 6))
    print("bilinear reference samples on a seeded random 5x6 image:")
    for x, y in ((0.0, 0.0), (2.5, 1.5), (4.9, 3.2), (7.0, -1.0)):
        print(f"  (x={x}, y={y}) -> {bilinear_reference(values, x, y):+.9f}")


def _suite_wave_trace() -> None:
    from .core import Grid, Image
    from .wave import wave_trace_oracle

    grid = Grid.centered(96)
    xs, ys = grid.pixel_coords()
    img = Image(grid=grid, values=np.exp(-(xs**2 + ys**2) / (2.0 * 5.0**2)))
    t = np.linspace(0.0, 40.0, 9)
    tr = wave_trace_oracle(img, (30.0, 0.0), t)
    print("quadrature trace of a Gaussian source (sigma=5) at distance 30:")
    for ti, vi in zip(t, tr):
        print(f"  t={ti:<6g} p={vi:+.7e}")


ORACLE_SUITES = {
    "irf": _suite_irf,
    "psf": _suite_psf,
    "abel": _suite_abel,
    "bilinear": _suite_bilinear,
    "wave-trace": _suite_wave_trace,
}

"""Spectral-side wave trace and length-spectrum extraction.

F(t) = sum_i mult_i w(lambda_i) cos(t lambda_i) for a smooth spectral
window w.  Peaks of |F| sit at closed-geodesic lengths; finite propagation
speed predicts no peak below the shortest length.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CompletenessError, ValidationError

__all__ = [
    "GaussianWindow",
    "KernelWindow",
    "TraceSeries",
    "spectral_wave_trace",
    "detect_length_peaks",
    "export_trace",
]


@dataclass(frozen=True)
class GaussianWindow:
    """w(lambda) = exp(-(lambda - center)^2 / (2 sigma^2))."""

    center: float
    sigma: float

    def __call__(self, lam):
        z = (np.asarray(lam, dtype=float) - self.center) / self.sigma
        return np.exp(-0.5 * z * z)

    def tail_mass(self, lambda_max):
        """Window mass above lambda_max relative to the total mass."""
        z = (lambda_max - self.center) / (self.sigma * math.sqrt(2.0))
        return 0.5 * math.erfc(z)


@dataclass(frozen=True)
class KernelWindow:
    """Band-limited alternative window: kernel transform recentred on lambda.

    w(lambda) = fourier((lambda - center)/width); compactly supported, so
    the tail mass is exactly zero once lambda_max clears the support.
    """

    kernel: object
    center: float
    width: float

    def __call__(self, lam):
        z = (np.asarray(lam, dtype=float) - self.center) / self.width
        return self.kernel.fourier(z)

    def tail_mass(self, lambda_max):
        edge = self.center + self.width * self.kernel.fourier_support_halfwidth
        return 0.0 if lambda_max >= edge else 1.0


@dataclass(frozen=True)
class TraceSeries:
    """Windowed trace on a uniform t-grid (even in t by construction)."""

    t: np.ndarray
    values: np.ndarray
    window: object


def spectral_wave_trace(spectrum, window, t_grid, tail_tol=1e-8):
    """Evaluate F(t) over t_grid by direct summation in fixed order."""
    t = np.asarray(t_grid, dtype=float)
    mass = window.tail_mass(spectrum.lambda_max)
    if mass > tail_tol:
        raise CompletenessError(
            f"window tail mass {mass:.3e} beyond lambda_max exceeds {tail_tol}"
        )
    weights = spectrum.multiplicities * window(spectrum.frequencies)
    values = weights @ np.cos(np.outer(spectrum.frequencies, t))
    return TraceSeries(t, values, window)


def _refine_parabolic(t, y, i):
    """3-point parabolic refinement around grid maximum i, on log|y|."""
    if i == 0 or i == len(t) - 1:
        return t[i], y[i]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    if min(y0, y1, y2) > 0:
        y0, y1, y2 = math.log(y0), math.log(y1), math.log(y2)
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return t[i], y[i]
    shift = 0.5 * (y0 - y2) / denom
    shift = max(-0.5, min(0.5, shift))
    return t[i] + shift * (t[1] - t[0]), y[i]


def detect_length_peaks(trace, min_separation, count):
    """Greedy height-ranked local maxima of |F| with pairwise separation.

    Returns up to ``count`` (t_peak, height) pairs, tallest first; fewer
    when the trace has fewer maxima.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    a = np.abs(trace.values)
    t = trace.t
    idx = np.where((a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:]))[0] + 1
    idx = idx[t[idx] >= min_separation]
    order = idx[np.argsort(-a[idx], kind="stable")]
    peaks = []
    for i in order:
        if all(abs(t[i] - p) >= min_separation for p, _ in peaks):
            tp, height = _refine_parabolic(t, a, i)
            peaks.append((float(tp), float(height)))
            if len(peaks) == count:
                break
    return peaks


def export_trace(trace, path, header_lines=()):
    """Two-column (t, F) text output for external plotting."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for ti, vi in zip(trace.t, trace.values):
            fh.write(f"{float(ti)!r} {float(vi)!r}\n")

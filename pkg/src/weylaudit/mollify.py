"""Band-limited mollifiers and their convolutions with counting data.

Three kernel kinds:

* ``plateau``   -- Fourier transform equal to 1 on [-1/2,1/2], a smooth
                   exp(-1/u) transition on 1/2 < |xi| < 1, zero beyond.
                   All moments of order >= 1 vanish.
* ``nonneg``    -- square of an inverse-transformed bump, pointwise >= 0,
                   Fourier support in [-1/2,1/2], unit integral.
* ``tauberian`` -- backward integral of tau * nonneg(tau); inherits the
                   Fourier support.

Kernels have no closed time-domain form; they are sampled once by an FFT
inverse cosine transform and evaluated through cubic splines, together
with antiderivative tables used by the convolution routines.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from .errors import KernelBuildError, ValidationError

__all__ = [
    "Kernel",
    "ScaledKernel",
    "build_plateau_kernel",
    "build_nonneg_kernel",
    "tauberian_kernel",
    "convolve_counting",
    "convolve_density",
    "tauberian_gap_check",
    "ConvolveResult",
    "plateau_fourier",
    "plateau_moments_highprec",
    "export_table",
]

TAIL_THRESHOLD = 1e-12


def _transition(u):
    """C-infinity step from 1 at u<=0 to 0 at u>=1, built from exp(-1/u)."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return b / (a + b)


def plateau_fourier(xi):
    """Analytic Fourier transform of the plateau kernel.

    Exactly 1 on |xi| <= 1/2 and exactly 0 on |xi| >= 1, so plateau and
    support identities hold with zero tolerance.
    """
    xi = np.abs(np.asarray(xi, dtype=float))
    out = np.zeros(xi.shape)
    out[xi <= 0.5] = 1.0
    mid = (xi > 0.5) & (xi < 1.0)
    out[mid] = _transition((xi[mid] - 0.5) * 2.0)
    return out


def _quarter_bump(xi):
    """Even bump supported in [-1/4,1/4]: exp(-1/(1-(4 xi)^2))."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape)
    inside = np.abs(xi) < 0.25
    v = 4.0 * xi[inside]
    out[inside] = np.exp(-1.0 / (1.0 - v * v))
    return out


def _inverse_cosine_fft(fourier_fn, t_max, dt):
    """Sample f(t) = (2 pi)^-1 int fhat(xi) e^{i t xi} dxi on t = 0..t_max.

    fhat must be even, real, compactly supported.  The periodization
    length 2*t_max keeps aliasing far below the kernel tails.
    """
    period = 2.0 * t_max
    dxi = 2.0 * math.pi / period
    m = int(round(period / dt))
    fhat = fourier_fn(np.arange(m // 2 + 1) * dxi)
    vals = (dxi / (2.0 * math.pi)) * m * np.fft.irfft(fhat, m)
    n = m // 2
    return np.arange(n) * dt, vals[:n]


@dataclass(frozen=True)
class Kernel:
    """Sampled even kernel with interpolants and antiderivative tables.

    ``t`` covers [0, t_cut]; evenness supplies negative arguments.
    ``integral`` is the full-line integral of rho (1 up to table accuracy
    for plateau and nonneg kinds).
    """

    kind: str
    fourier_support_halfwidth: float
    plateau_halfwidth: float
    grid_spacing: float
    t_cut: float
    t: np.ndarray
    values: np.ndarray
    integral: float
    tail_bound: float
    _rho_spline: CubicSpline
    _phi_spline: CubicSpline
    _gap_spline: CubicSpline
    _checks: dict

    def rho(self, s):
        """Kernel value at s (even extension, zero beyond t_cut)."""
        s = np.abs(np.asarray(s, dtype=float))
        out = np.zeros(s.shape)
        inside = s < self.t_cut
        out[inside] = self._rho_spline(s[inside])
        return out

    def phi(self, s):
        """Antiderivative Phi(s) = integral of rho over (-inf, s]."""
        s = np.asarray(s, dtype=float)
        out = np.where(s >= 0, self.integral, 0.0)
        inside = np.abs(s) < self.t_cut
        v = self._phi_spline(np.abs(s[inside]))
        out[inside] = np.where(s[inside] >= 0, v, self.integral - v)
        return out

    def gap(self, s):
        """D(s) = integral over (-inf, s] of (step - Phi); even, decaying."""
        s = np.abs(np.asarray(s, dtype=float))
        out = np.zeros(s.shape)
        inside = s < self.t_cut
        out[inside] = self._gap_spline(s[inside])
        return out

    def fourier(self, xi):
        """Fourier transform; exactly zero outside the declared support."""
        if self.kind == "plateau":
            return plateau_fourier(xi)
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape)
        inside = np.abs(xi) < self.fourier_support_halfwidth
        if np.any(inside):
            # trapezoid over the even table; the integrand decays below
            # TAIL_THRESHOLD at the cutoff so endpoint error is negligible
            xin = np.abs(xi[inside])
            c = np.cos(np.outer(xin, self.t))
            out[inside] = self.grid_spacing * (2.0 * c @ self.values - self.values[0])
        return out

    def moment(self, k, method="auto"):
        """Numerical moment integral of rho(t) t^k over the line.

        Odd k vanish exactly under the symmetric rule.  The table route
        amplifies the double-precision noise floor by t^k and cannot
        certify small even moments beyond k = 1; "auto" therefore uses
        high-precision band-limited sampling for even k >= 2 on the
        plateau kind (see moments_highprec).
        """
        if k < 0:
            raise ValidationError("moment order must be >= 0")
        if k % 2 == 1:
            return 0.0
        if method == "auto" and self.kind == "plateau" and k >= 2:
            return _plateau_moment_highprec([k])[k]
        integrand = self.values * self.t**k
        return 2.0 * np.trapezoid(integrand, dx=self.grid_spacing)

    @property
    def build_checks(self):
        """Invariant diagnostics recorded at construction."""
        return dict(self._checks)


class ScaledKernel(NamedTuple):
    """rho_T(t) = T rho(T t); Fourier support scales to T * halfwidth."""

    kernel: Kernel
    scale: float

    def rho(self, s):
        return self.scale * self.kernel.rho(self.scale * np.asarray(s, dtype=float))

    def phi(self, s):
        return self.kernel.phi(self.scale * np.asarray(s, dtype=float))

    def fourier(self, xi):
        return self.kernel.fourier(np.asarray(xi, dtype=float) / self.scale)

    @property
    def reach(self):
        """Half-width of the effective support in the spectral variable."""
        return self.kernel.t_cut / self.scale


def _finalize(kind, t, vals, dt, support_halfwidth, plateau_halfwidth, period_hint,
              tail_threshold=TAIL_THRESHOLD):
    """Trim to the empirical cutoff, build antiderivative tables, verify."""
    win = max(1, int(round(3.0 * period_hint / dt)))
    small = np.abs(vals) < tail_threshold
    run = np.cumsum(small)
    ok = np.where(run[win:] - run[:-win] == win)[0]
    if len(ok) == 0:
        raise KernelBuildError(
            f"{kind} kernel tail never stays below {tail_threshold} "
            f"over three oscillation periods within t_max={t[-1]:.1f}"
        )
    # run[j+win] - run[j] counts small samples over j+1 .. j+win
    n = int(ok[0]) + win + 1
    t = t[:n].copy()
    vals = vals[:n].copy()
    tail_bound = float(np.abs(vals[-win:]).max())

    phi_half = cumulative_trapezoid(vals, dx=dt, initial=0.0)
    integral = 2.0 * phi_half[-1]
    phi = integral / 2.0 + phi_half  # Phi on t >= 0
    gap = cumulative_trapezoid((phi - integral)[::-1], dx=dt, initial=0.0)[::-1]

    checks = {"integral": integral, "tail_bound": tail_bound, "t_cut": t[-1]}
    if kind in ("plateau", "nonneg") and abs(integral - 1.0) > 1e-8:
        raise KernelBuildError(
            f"{kind} kernel integral {integral!r} deviates from 1 by more than 1e-8; "
            "grid too coarse or t_max too small"
        )
    if kind == "nonneg" and vals.min() < 0:
        raise KernelBuildError(f"nonneg kernel has negative table value {vals.min()!r}")
    t.setflags(write=False)
    vals.setflags(write=False)
    return Kernel(
        kind=kind,
        fourier_support_halfwidth=support_halfwidth,
        plateau_halfwidth=plateau_halfwidth,
        grid_spacing=dt,
        t_cut=float(t[-1]),
        t=t,
        values=vals,
        integral=float(integral),
        tail_bound=tail_bound,
        _rho_spline=CubicSpline(t, vals),
        _phi_spline=CubicSpline(t, phi),
        _gap_spline=CubicSpline(t, gap),
        _checks=checks,
    )


def build_plateau_kernel(grid_spacing=1e-3, t_max=1000.0):
    """Construct the plateau kernel by inverse FFT of its analytic transform."""
    if grid_spacing <= 0 or t_max <= 0:
        raise ValidationError("grid_spacing and t_max must be > 0")
    t, vals = _inverse_cosine_fft(plateau_fourier, t_max, grid_spacing)
    return _finalize(
        "plateau", t, vals, grid_spacing,
        support_halfwidth=1.0, plateau_halfwidth=0.5,
        period_hint=2.0 * math.pi,
    )


def build_nonneg_kernel(grid_spacing=1e-3, t_max=4000.0, tail_threshold=TAIL_THRESHOLD):
    """Non-negative kernel: normalized square of the inverse bump transform.

    The bump transform is supported in [-1/4,1/4], so the square has
    Fourier support in [-1/2,1/2] and is pointwise non-negative.  Squaring
    keeps the table clean far below double-precision FFT noise, so
    ``tail_threshold`` may be pushed to ~1e-18 when a deep table is needed
    (the tauberian companion integrates the tail against t and loses about
    five orders of magnitude).
    """
    if grid_spacing <= 0 or t_max <= 0:
        raise ValidationError("grid_spacing and t_max must be > 0")
    t, h = _inverse_cosine_fft(_quarter_bump, t_max, grid_spacing)
    sq = h * h
    norm = 2.0 * np.trapezoid(sq, dx=grid_spacing)
    vals = sq / norm
    return _finalize(
        "nonneg", t, vals, grid_spacing,
        support_halfwidth=0.5, plateau_halfwidth=0.0,
        period_hint=8.0 * math.pi,
        tail_threshold=tail_threshold,
    )


def tauberian_kernel(nonneg):
    """Companion kernel rho10(t) = int_t^inf tau rho~(tau) dtau.

    The source table must reach deep enough that the weighted tail
    integral still clears TAIL_THRESHOLD; build the nonneg kernel with
    ``tail_threshold=1e-18`` for comfortable margin.
    """
    if nonneg.kind != "nonneg":
        raise ValidationError("tauberian_kernel requires a nonneg-kind input")
    t = nonneg.t
    dt = nonneg.grid_spacing
    integrand = t * nonneg.values
    vals = cumulative_trapezoid(integrand[::-1], dx=dt, initial=0.0)[::-1]
    try:
        return _finalize(
            "tauberian", t.copy(), vals, dt,
            support_halfwidth=nonneg.fourier_support_halfwidth,
            plateau_halfwidth=0.0,
            period_hint=8.0 * math.pi,
        )
    except KernelBuildError as exc:
        raise KernelBuildError(
            f"{exc}; rebuild the nonneg source with tail_threshold=1e-18 "
            "so its table reaches deeper"
        ) from None


class ConvolveResult(NamedTuple):
    value: float
    complete: bool


def convolve_counting(spectrum, scaled_kernel, lam):
    """(N * rho_T)(lambda) = sum mult_i Phi_T(lambda - lambda_i).

    ``complete`` is False when the kernel reach extends past the spectrum's
    completeness bound; the value is still returned.
    """
    terms = scaled_kernel.phi(lam - spectrum.frequencies)
    value = math.fsum((spectrum.multiplicities * terms).tolist())
    complete = lam + scaled_kernel.reach <= spectrum.lambda_max
    return ConvolveResult(value, complete)


def convolve_density(spectrum, scaled_kernel, lam):
    """(N' * kappa_T)(lambda) = sum mult_i kappa_T(lambda - lambda_i)."""
    terms = scaled_kernel.rho(lam - spectrum.frequencies)
    value = math.fsum((spectrum.multiplicities * terms).tolist())
    complete = lam + scaled_kernel.reach <= spectrum.lambda_max
    return ConvolveResult(value, complete)


def tauberian_gap_check(spectrum, kernel, scale, grid):
    """Series of integrals over (-inf, lambda] of N - N * rho_T.

    The staircase part integrates exactly; the mollified part reduces to
    the kernel's tabulated (trapezoidal) second antiderivative, so the 1/T
    decay of the bound can be observed without grid-resolution noise.
    """
    grid = np.asarray(grid, dtype=float)
    freqs = spectrum.frequencies
    mults = spectrum.multiplicities.astype(float)
    out = np.empty(len(grid))
    for i, lam in enumerate(grid):
        d = kernel.gap(scale * (lam - freqs)) / scale
        out[i] = math.fsum((mults * d).tolist())
    return grid, out


def export_table(kernel, path):
    """Two-column (t, rho) text dump of the sampled kernel for inspection."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# weylaudit kernel kind={kernel.kind} "
                 f"spacing={kernel.grid_spacing!r} t_cut={kernel.t_cut!r}\n")
        for ti, vi in zip(kernel.t, kernel.values):
            fh.write(f"{float(ti)!r} {float(vi)!r}\n")


# -- high-precision moment certification ------------------------------------

def _plateau_moment_highprec(orders, sample_dt=2.5, t_end=2600.0, dxi=None):
    """Even moments of the plateau kernel via band-limited sampling.

    rho(t) t^k is entire of exponential type 1 (Fourier support in
    [-1,1]), so the trapezoid with any spacing below 2*pi is exact up to
    the truncation tail; values are evaluated from the analytic transform
    in >=100-bit arithmetic to keep the t^k-amplified noise floor down.
    Returns {k: float moment}.
    """
    try:
        import gmpy2
        from gmpy2 import cos, exp, mpfr

        gmpy2.get_context().precision = 120
        pi = mpfr(gmpy2.const_pi())
        half = mpfr("0.5")
        one = mpfr(1)

        def hp_transition(u):
            return exp(-1 / (1 - u)) / (exp(-1 / u) + exp(-1 / (1 - u)))

    except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
        import mpmath as mp

        mp.mp.dps = 36
        pi = mp.pi
        half = mp.mpf("0.5")
        one = mp.mpf(1)
        cos, exp = mp.cos, mp.exp

        def hp_transition(u):
            return exp(-1 / (1 - u)) / (exp(-1 / u) + exp(-1 / (1 - u)))

    if dxi is None:
        dxi = pi / 4000
    nxi = int(1.0 / float(dxi)) + 1
    xis = []
    fh = []
    for j in range(nxi + 1):
        x = j * dxi
        if x <= half:
            v = one
        elif x >= 1:
            v = one * 0
        else:
            v = hp_transition((x - half) * 2)
        if v != 0:
            xis.append(x)
            fh.append(v)

    dt = one * sample_dt
    n = int(t_end / sample_dt)
    vals = []
    for i in range(n + 1):
        ti = dt * i
        s = fh[0] / 2
        for x, f in zip(xis[1:], fh[1:]):
            s += f * cos(ti * x)
        vals.append(s * dxi / pi)

    out = {}
    for k in orders:
        if k % 2 == 1:
            out[k] = 0.0
            continue
        acc = sum(v * (dt * i) ** k for i, v in enumerate(vals[1:], 1)) * 2
        if k == 0:
            acc += vals[0]
        out[k] = float(acc * dt)
    return out


def plateau_moments_highprec(orders=(1, 2, 3, 4, 5)):
    """Certified plateau-kernel moments for the listed orders."""
    return _plateau_moment_highprec(list(orders))

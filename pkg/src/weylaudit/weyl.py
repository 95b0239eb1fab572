"""Integrated expansion coefficients and Riesz-transformed predictions.

A coefficient set holds A_i, the volume integrals of the local expansion
densities, for i = 0..m.  Transforming to Riesz order k multiplies the
lambda^(d-i) term by k!(d-i)!/(d-i+k)!; the factors are kept as exact
rationals so coefficient identities can be checked with zero tolerance.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .counting import PrefixPowerSums, riesz_mean
from .errors import ParseError, ValidationError

__all__ = [
    "WeylCoefficients",
    "RieszPrediction",
    "unit_ball_volume",
    "leading_coefficient",
    "riesz_factor",
    "riesz_transform_coeffs",
    "predict_counting",
    "predict_riesz",
    "fit_unknown_coefficients",
    "torus_coefficients",
    "sphere_coefficients",
    "save_coefficients",
    "load_coefficients",
]


def unit_ball_volume(d):
    """Volume of the unit ball in R^d: pi^(d/2) / Gamma(d/2 + 1)."""
    if d < 1:
        raise ValidationError("dimension must be >= 1")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def leading_coefficient(d, volume):
    """A_0 = Vol(M) * omega_d / (2 pi)^d, the Weyl leading coefficient."""
    if volume <= 0:
        raise ValidationError("volume must be > 0")
    return volume * unit_ball_volume(d) / (2.0 * math.pi) ** d


@dataclass(frozen=True)
class WeylCoefficients:
    """Integrated coefficients A_0..A_m with a known/to-be-fitted mask."""

    dimension: int
    values: tuple
    known: tuple

    def __post_init__(self):
        if self.dimension < 1:
            raise ValidationError("dimension must be >= 1")
        values = tuple(float(v) for v in self.values)
        known = tuple(bool(b) for b in self.known)
        if len(values) != len(known):
            raise ValidationError("values and known mask must have equal length")
        if len(values) > self.dimension + 1:
            raise ValidationError("at most d+1 coefficients are meaningful")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "known", known)

    @property
    def exponents(self):
        return tuple(self.dimension - i for i in range(len(self.values)))


@dataclass(frozen=True)
class RieszPrediction:
    """Polynomial sum of coeff * lambda^exponent, exponents decreasing."""

    order: int
    terms: tuple  # ((exponent, coefficient), ...)


def riesz_factor(d, k, i):
    """Exact rational factor k!(d-i)!/(d-i+k)! applied to A_i at order k."""
    if k < 0 or i < 0 or d - i < 0:
        raise ValidationError("need k >= 0 and 0 <= i <= d")
    return Fraction(math.factorial(k) * math.factorial(d - i), math.factorial(d - i + k))


def riesz_transform_coeffs(coeffs, k):
    """Term-wise Riesz transform of a coefficient set; k = 0 is the identity."""
    if k < 0:
        raise ValidationError("order must be >= 0")
    d = coeffs.dimension
    terms = tuple(
        (d - i, float(riesz_factor(d, k, i) * Fraction(a)) if a else 0.0)
        for i, a in enumerate(coeffs.values)
    )
    return RieszPrediction(k, terms)


def predict_riesz(prediction, lam):
    """Evaluate the prediction polynomial by Horner over decreasing exponents."""
    if lam <= 0:
        raise ValidationError("lambda must be > 0")
    if not prediction.terms:
        return 0.0
    exps = [e for e, _ in prediction.terms]
    acc = 0.0
    for (e, c), nxt in zip(prediction.terms, exps[1:] + [0]):
        acc = (acc + c) * lam ** (e - nxt)
    return acc


def predict_counting(coeffs, lam):
    """Asymptotic prediction for N(lambda) itself (order-0 polynomial)."""
    return predict_riesz(riesz_transform_coeffs(coeffs, 0), lam)


def fit_unknown_coefficients(spectrum, coeffs, k, lambda_grid):
    """Least-squares estimate of unfitted A_i from the order-k Riesz residual.

    Known coefficients are untouched; the fitted set is returned with the
    same mask (fitted entries remain marked unknown to flag provenance).
    """
    grid = np.asarray(lambda_grid, dtype=float)
    unknown = [i for i, b in enumerate(coeffs.known) if not b]
    if not unknown:
        return coeffs
    if len(grid) == 0:
        raise ValidationError("empty fitting grid")
    if len(grid) < len(unknown):
        raise ValidationError("need at least as many grid points as unknowns")
    d = coeffs.dimension
    ps = PrefixPowerSums.build(spectrum, k_max=max(k, 0))
    target = np.asarray([riesz_mean(ps, k, lam) for lam in grid])
    pred = riesz_transform_coeffs(coeffs, k)
    known_part = np.zeros(len(grid))
    for (e, c), b in zip(pred.terms, coeffs.known):
        if b:
            known_part += c * grid**e
    design = np.column_stack(
        [float(riesz_factor(d, k, i)) * grid ** (d - i) for i in unknown]
    )
    if np.linalg.matrix_rank(design) < len(unknown):
        raise ValidationError("rank-deficient design matrix")
    sol, *_ = np.linalg.lstsq(design, target - known_part, rcond=None)
    values = list(coeffs.values)
    for i, v in zip(unknown, sol):
        values[i] = float(v)
    return WeylCoefficients(d, tuple(values), coeffs.known)


def torus_coefficients(torus):
    """Flat torus preset: A_0 from the volume, higher coefficients zero."""
    d = torus.dimension
    values = [leading_coefficient(d, torus.volume)] + [0.0] * min(d, 2)
    known = [True] * len(values)
    return WeylCoefficients(d, tuple(values), tuple(known))


def sphere_coefficients(sphere):
    """Round sphere preset: exact A_0, higher coefficients left for fitting."""
    d = sphere.dimension
    values = [leading_coefficient(d, sphere.volume)] + [0.0] * min(d, 2)
    known = [True] + [False] * (len(values) - 1)
    return WeylCoefficients(d, tuple(values), tuple(known))


def save_coefficients(coeffs, path):
    """Write exponent/value/provenance triples in the report text format."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# weylaudit coefficients v1\n")
        fh.write(f"# dimension = {coeffs.dimension}\n")
        for e, v, b in zip(coeffs.exponents, coeffs.values, coeffs.known):
            fh.write(f"{e} {v!r} {'known' if b else 'fitted'}\n")


def load_coefficients(path):
    header = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    header[key.strip()] = val.strip()
                continue
            parts = line.split()
            if len(parts) != 3 or parts[2] not in ("known", "fitted"):
                raise ParseError(f"expected 'exponent value known|fitted', got {line!r}", lineno)
            rows.append((int(parts[0]), float(parts[1]), parts[2] == "known"))
    if "dimension" not in header:
        raise ParseError("coefficient file missing 'dimension' header")
    d = int(header["dimension"])
    rows.sort(key=lambda r: -r[0])
    expected = [d - i for i in range(len(rows))]
    if [r[0] for r in rows] != expected:
        raise ParseError(f"exponents must be consecutive from {d} downwards")
    return WeylCoefficients(d, tuple(r[1] for r in rows), tuple(r[2] for r in rows))

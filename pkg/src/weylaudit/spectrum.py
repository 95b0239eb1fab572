"""Frequency spectra: data model, validation, ingestion and persistence.

The internal unit is always the frequency lambda_i = sqrt(Laplace
eigenvalue); eigenvalue lists are converted at ingestion.  A Spectrum is
asserted complete below its ``lambda_max`` bound and is immutable after
construction.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError

__all__ = [
    "Spectrum",
    "from_frequencies",
    "from_laplace_eigenvalues",
    "load",
    "save",
    "truncate",
    "perturb",
]

_FORMAT_HEADER = "# weylaudit spectrum v1"


@dataclass(frozen=True)
class Spectrum:
    """Sorted frequencies with multiplicities, complete below lambda_max.

    ``frequencies`` is strictly increasing and non-negative,
    ``multiplicities`` are positive integers.  Counting uses the strict
    convention N(lambda) = sum of multiplicities with lambda_i < lambda.
    """

    frequencies: np.ndarray
    multiplicities: np.ndarray
    lambda_max: float
    label: str = ""

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        mults = np.asarray(self.multiplicities, dtype=np.int64)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "multiplicities", mults)
        object.__setattr__(self, "lambda_max", float(self.lambda_max))
        if freqs.ndim != 1 or mults.shape != freqs.shape:
            raise ValidationError("frequencies and multiplicities must be 1-d and equal length")
        if not np.all(np.isfinite(freqs)):
            raise ValidationError("non-finite frequency")
        if len(freqs) and freqs[0] < 0:
            raise ValidationError("negative frequency")
        if np.any(np.diff(freqs) <= 0):
            raise ValidationError("frequencies must be strictly increasing")
        if np.any(mults < 1):
            raise ValidationError("multiplicities must be >= 1")
        if self.lambda_max < 0 or not math.isfinite(self.lambda_max):
            raise ValidationError("lambda_max must be finite and non-negative")
        if len(freqs) and freqs[-1] > self.lambda_max:
            raise ValidationError(
                f"frequency {freqs[-1]} above completeness bound {self.lambda_max}"
            )
        self.frequencies.setflags(write=False)
        self.multiplicities.setflags(write=False)

    @property
    def total_count(self):
        """Total multiplicity, equal to N(lambda_max) by completeness."""
        return int(self.multiplicities.sum())

    def __len__(self):
        return len(self.frequencies)

    @property
    def entries(self):
        return list(zip(self.frequencies.tolist(), self.multiplicities.tolist()))

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (
            self.lambda_max == other.lambda_max
            and self.label == other.label
            and np.array_equal(self.frequencies, other.frequencies)
            and np.array_equal(self.multiplicities, other.multiplicities)
        )


def _merge_sorted(freqs, mults, merge_tol):
    """Merge sorted frequencies closer than merge_tol (chained), adding
    multiplicities; merged groups take the multiplicity-weighted mean."""
    if len(freqs) == 0:
        return freqs, mults
    out_f = []
    out_m = []
    group_f = [freqs[0]]
    group_m = [mults[0]]
    for f, m in zip(freqs[1:], mults[1:]):
        if f - group_f[-1] <= merge_tol:
            group_f.append(f)
            group_m.append(m)
        else:
            w = float(np.sum(group_m))
            out_f.append(float(np.dot(group_f, group_m)) / w)
            out_m.append(int(w))
            group_f = [f]
            group_m = [m]
    w = float(np.sum(group_m))
    out_f.append(float(np.dot(group_f, group_m)) / w)
    out_m.append(int(w))
    return np.asarray(out_f), np.asarray(out_m, dtype=np.int64)


def from_frequencies(values, lambda_max, merge_tol=0.0, label=""):
    """Build a Spectrum from (frequency, multiplicity) pairs.

    Bare frequencies are accepted and treated as multiplicity one;
    repeated entries merge when within merge_tol of each other.
    """
    if merge_tol < 0:
        raise ValidationError("merge_tol must be >= 0")
    freqs = []
    mults = []
    for v in values:
        if np.isscalar(v):
            f, m = float(v), 1
        else:
            f, m = float(v[0]), int(v[1])
        if not math.isfinite(f):
            raise ValidationError(f"non-finite frequency {f}")
        if f < 0:
            raise ValidationError(f"negative frequency {f}")
        if f > lambda_max:
            raise ValidationError(f"frequency {f} above lambda_max {lambda_max}")
        if m < 1:
            raise ValidationError(f"multiplicity {m} must be >= 1")
        freqs.append(f)
        mults.append(m)
    freqs = np.asarray(freqs)
    mults = np.asarray(mults, dtype=np.int64)
    order = np.argsort(freqs, kind="stable")
    freqs, mults = _merge_sorted(freqs[order], mults[order], merge_tol)
    return Spectrum(freqs, mults, lambda_max, label)


def from_laplace_eigenvalues(values, lambda_max, merge_tol=0.0, label=""):
    """Build a Spectrum from Laplace eigenvalues E, stored as sqrt(E)."""
    pairs = []
    for v in values:
        if np.isscalar(v):
            e, m = float(v), 1
        else:
            e, m = float(v[0]), int(v[1])
        if e < 0:
            raise ValidationError(f"negative eigenvalue {e}")
        pairs.append((math.sqrt(e), m))
    return from_frequencies(pairs, lambda_max, merge_tol, label)


def save(spectrum, path, format="structured"):
    """Write a spectrum file; the structured format round-trips bit-exactly."""
    lines = []
    if format == "structured":
        lines.append(_FORMAT_HEADER)
        lines.append(f"# lambda_max = {spectrum.lambda_max!r}")
        lines.append(f"# label = {spectrum.label}")
        lines.append("# unit = frequency")
    elif format != "plain":
        raise ValidationError(f"unknown format {format!r}")
    for f, m in zip(spectrum.frequencies, spectrum.multiplicities):
        lines.append(f"{float(f)!r} {int(m)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load(path, format="structured", lambda_max=None):
    """Read a spectrum file written by :func:`save` (or plain two-column text).

    For the plain format ``lambda_max`` defaults to the largest frequency.
    Comment lines start with '#'; the structured header carries
    lambda_max, label and a unit tag (frequency or eigenvalue).
    """
    header = {}
    pairs = []
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
            if len(parts) != 2:
                raise ParseError(f"expected 'frequency multiplicity', got {line!r}", lineno)
            try:
                f = float(parts[0])
                m = int(parts[1])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if f < 0:
                raise ParseError(f"negative value {f}", lineno)
            if m < 1:
                raise ParseError(f"multiplicity {m} must be >= 1", lineno)
            pairs.append((f, m))

    if format == "structured":
        if "lambda_max" not in header:
            raise ParseError("structured file missing 'lambda_max' header")
        lam = float(header["lambda_max"])
        label = header.get("label", "")
        unit = header.get("unit", "frequency")
        if unit == "eigenvalue":
            return from_laplace_eigenvalues(pairs, lam, label=label)
        if unit != "frequency":
            raise ParseError(f"unknown unit tag {unit!r}")
    elif format == "plain":
        lam = lambda_max if lambda_max is not None else (max(f for f, _ in pairs) if pairs else 0.0)
        label = ""
    else:
        raise ValidationError(f"unknown format {format!r}")

    freqs = np.asarray([f for f, _ in pairs])
    mults = np.asarray([m for _, m in pairs], dtype=np.int64)
    if np.any(np.diff(freqs) <= 0):
        raise ValidationError(f"{path}: frequencies not strictly increasing")
    return Spectrum(freqs, mults, lam, label)


def truncate(spectrum, new_lambda_max):
    """Keep entries with frequency strictly below the new bound."""
    if new_lambda_max < 0 or new_lambda_max > spectrum.lambda_max:
        raise ValidationError(
            f"new bound {new_lambda_max} outside [0, {spectrum.lambda_max}]"
        )
    keep = spectrum.frequencies < new_lambda_max
    return Spectrum(
        spectrum.frequencies[keep].copy(),
        spectrum.multiplicities[keep].copy(),
        new_lambda_max,
        spectrum.label,
    )


def perturb(spectrum, action, mu, tol=0.0):
    """Inject a synthetic defect: remove-one or add-one multiplicity at mu."""
    freqs = spectrum.frequencies.copy()
    mults = spectrum.multiplicities.copy()
    near = np.where(np.abs(freqs - mu) <= tol)[0]
    if action == "remove-one":
        if len(near) == 0:
            raise ValidationError(f"no entry within {tol} of {mu} to remove")
        i = near[np.argmin(np.abs(freqs[near] - mu))]
        if mults[i] == 1:
            freqs = np.delete(freqs, i)
            mults = np.delete(mults, i)
        else:
            mults[i] -= 1
    elif action == "add-one":
        if mu < 0 or mu > spectrum.lambda_max:
            raise ValidationError(f"{mu} outside [0, lambda_max]")
        if len(near):
            i = near[np.argmin(np.abs(freqs[near] - mu))]
            mults[i] += 1
        else:
            i = int(np.searchsorted(freqs, mu))
            freqs = np.insert(freqs, i, mu)
            mults = np.insert(mults, i, 1)
    else:
        raise ValidationError(f"unknown action {action!r}")
    return Spectrum(freqs, mults, spectrum.lambda_max, spectrum.label)

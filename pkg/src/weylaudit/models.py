"""Exact model spectra: flat tori and round spheres.

These provide ground truth for every downstream check.  Torus frequencies
are dual-lattice vector norms; multiplicity correctness relies on exact
integer arithmetic whenever the (rescaled) Gram matrix is integer.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceBudgetError, ValidationError
from .spectrum import Spectrum

__all__ = [
    "FlatTorus",
    "RoundSphere",
    "torus_spectrum",
    "sphere_spectrum",
    "torus_geodesic_lengths",
]

DEFAULT_POINT_BUDGET = 10**8


@dataclass(frozen=True)
class FlatTorus:
    """R^d / L Z^d with lattice basis vectors as matrix columns."""

    dimension: int
    basis: np.ndarray

    def __post_init__(self):
        if self.dimension < 1:
            raise ValidationError("torus dimension must be >= 1")
        basis = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if basis.shape != (self.dimension, self.dimension):
            raise ValidationError(f"basis must be {self.dimension}x{self.dimension}")
        if abs(np.linalg.det(basis)) < 1e-300:
            raise ValidationError("singular lattice basis")
        object.__setattr__(self, "basis", basis)
        self.basis.setflags(write=False)

    @classmethod
    def square(cls, dimension, side):
        return cls(dimension, side * np.eye(dimension))

    @property
    def volume(self):
        return float(abs(np.linalg.det(self.basis)))

    @property
    def dual_basis(self):
        """Columns generate the dual lattice 2*pi*(L^T)^-1 Z^d."""
        return 2.0 * math.pi * np.linalg.inv(self.basis.T)


@dataclass(frozen=True)
class RoundSphere:
    """Unit round sphere S^d, d >= 2."""

    dimension: int

    def __post_init__(self):
        if self.dimension < 2:
            raise ValidationError("sphere dimension must be >= 2")

    @property
    def volume(self):
        d = self.dimension
        return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def _scaled_integer_gram(gram):
    """Return (scale, H) with gram = scale*H and H integer, or None."""
    mags = np.abs(gram[np.abs(gram) > 0])
    if len(mags) == 0:
        return None
    scale = mags.min()
    H = gram / scale
    Hr = np.rint(H)
    if np.max(np.abs(H - Hr)) < 1e-9:
        return scale, Hr.astype(np.int64)
    return None


def _lattice_norms(basis, radius, budget, merge_tol, include_origin=True):
    """Sorted distinct norms |B m| < radius over m in Z^d with counts.

    Walks an axis-aligned bounding box of the ellipsoid and filters by
    norm.  Equal norms merge exactly through integer quadratic-form values
    when the rescaled Gram matrix is integer, otherwise within merge_tol.
    """
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    d = basis.shape[0]
    inv = np.linalg.inv(basis)
    # |m_i| <= radius * ||row_i(B^-1)|| on the ellipsoid
    half = np.floor(radius * np.linalg.norm(inv, axis=1) + 1e-9).astype(np.int64)
    n_points = 1
    for h in half:
        n_points *= 2 * int(h) + 1
    if n_points > budget:
        raise ResourceBudgetError(
            f"lattice enumeration needs {n_points} candidates, budget is {budget}"
        )
    gram = basis.T @ basis
    exact = _scaled_integer_gram(gram)

    ranges = [np.arange(-int(h), int(h) + 1, dtype=np.int64) for h in half]
    slab_points = n_points // len(ranges[0]) if len(ranges[0]) else 1
    chunk_rows = max(1, (4 << 20) // max(1, slab_points))

    exact_vals = []
    exact_counts = []
    float_norms = []
    for start in range(0, len(ranges[0]), chunk_rows):
        sub = [ranges[0][start : start + chunk_rows]] + ranges[1:]
        mesh = np.meshgrid(*sub, indexing="ij")
        m = np.stack([g.ravel() for g in mesh], axis=0)  # (d, chunk)
        if not include_origin:
            m = m[:, np.any(m != 0, axis=0)]
        if exact is not None:
            scale, H = exact
            q = np.einsum("in,ij,jn->n", m, H, m)
            vals, counts = np.unique(q[scale * q < radius * radius], return_counts=True)
            exact_vals.append(vals)
            exact_counts.append(counts)
        else:
            v = basis @ m.astype(float)
            norms = np.sqrt(np.einsum("in,in->n", v, v))
            float_norms.append(norms[norms < radius])

    if exact is not None:
        scale, _ = exact
        vals = np.concatenate(exact_vals) if exact_vals else np.empty(0, dtype=np.int64)
        counts = np.concatenate(exact_counts) if exact_counts else np.empty(0, dtype=np.int64)
        uniq, inverse = np.unique(vals, return_inverse=True)
        total = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(total, inverse, counts)
        return np.sqrt(scale * uniq.astype(float)), total

    norms = np.sort(np.concatenate(float_norms)) if float_norms else np.empty(0)
    if len(norms) == 0:
        return np.empty(0), np.empty(0, dtype=np.int64)
    # group runs with gap <= merge_tol
    breaks = np.where(np.diff(norms) > merge_tol)[0] + 1
    groups = np.split(norms, breaks)
    out = np.asarray([g.mean() for g in groups])
    counts = np.asarray([len(g) for g in groups], dtype=np.int64)
    return out, counts


def torus_spectrum(torus, lambda_max, point_budget=DEFAULT_POINT_BUDGET, merge_tol=None):
    """Complete torus spectrum below lambda_max: dual-lattice vector norms."""
    if lambda_max <= 0:
        raise ValidationError("lambda_max must be > 0")
    if merge_tol is None:
        merge_tol = 1e-9 * lambda_max
    freqs, mults = _lattice_norms(torus.dual_basis, lambda_max, point_budget, merge_tol)
    label = f"flat torus d={torus.dimension} vol={torus.volume!r}"
    return Spectrum(freqs, mults, lambda_max, label)


def torus_geodesic_lengths(torus, length_max, point_budget=DEFAULT_POINT_BUDGET, merge_tol=None):
    """Sorted distinct closed-geodesic lengths |L m| < length_max with counts."""
    if length_max <= 0:
        raise ValidationError("length_max must be > 0")
    if merge_tol is None:
        merge_tol = 1e-9 * length_max
    lengths, counts = _lattice_norms(
        torus.basis, length_max, point_budget, merge_tol, include_origin=False
    )
    return list(zip(lengths.tolist(), counts.tolist()))


def sphere_multiplicity(dimension, degree):
    """Dimension of degree-l spherical harmonics on S^d, exactly."""
    d, l = dimension, degree
    if l == 0:
        return 1
    return math.comb(l + d, d) - math.comb(l + d - 2, d)


def sphere_spectrum(sphere, lambda_max):
    """Closed-form sphere spectrum: frequencies sqrt(l(l+d-1)) below lambda_max."""
    if lambda_max <= 0:
        raise ValidationError("lambda_max must be > 0")
    d = sphere.dimension
    freqs = []
    mults = []
    l = 0
    while l * (l + d - 1) < lambda_max * lambda_max:
        freqs.append(math.sqrt(l * (l + d - 1)))
        mults.append(sphere_multiplicity(d, l))
        l += 1
    return Spectrum(
        np.asarray(freqs),
        np.asarray(mults, dtype=np.int64),
        lambda_max,
        f"round sphere S^{d}",
    )

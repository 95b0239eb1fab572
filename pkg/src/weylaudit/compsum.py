"""Compensated (Neumaier) summation helpers.

Used wherever long reductions must be accurate and reproducible: the
summation order is always the array order, so results are deterministic
regardless of how callers parallelize around these routines.
"""

import numpy as np


def neumaier_sum(values):
    """Sum of a 1-d array with Neumaier's compensated algorithm."""
    s = 0.0
    c = 0.0
    for v in np.asarray(values, dtype=float):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def neumaier_cumsum(values):
    """Running compensated prefix sums; out[i] = sum(values[:i+1])."""
    values = np.asarray(values, dtype=float)
    out = np.empty(len(values))
    s = 0.0
    c = 0.0
    for i, v in enumerate(values):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out

"""scikit-learn style wrappers around the core analysis routines.

Only the two operations with a natural fit/transform or fit/predict split
are wrapped; everything else in the package is plain functions on frozen
dataclasses, where the estimator protocol would add ceremony without
value.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .audit import AuditConfig, detect_defects
from .counting import PrefixPowerSums, riesz
from .errors import ValidationError
from .spectrum import Spectrum

__all__ = ["RieszMeanTransformer", "CompletenessAuditor"]


def _as_spectrum(X):
    if isinstance(X, Spectrum):
        return X
    raise ValidationError("expected a Spectrum instance")


def _as_query_array(X):
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValidationError("query points must be 1-d or a single column")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("query points must be finite")
    return arr


class RieszMeanTransformer(TransformerMixin, BaseEstimator):
    """fit(spectrum) builds prefix power sums; transform(lambdas) -> R_k N.

    Parameters
    ----------
    order : int, Riesz order k >= 0.
    """

    def __init__(self, order=1):
        self.order = order

    def fit(self, X, y=None):
        spectrum = _as_spectrum(X)
        if self.order < 0:
            raise ValidationError("order must be >= 0")
        self.spectrum_ = spectrum
        self.prefix_sums_ = PrefixPowerSums.build(
            spectrum, k_max=max(self.order, 1)
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "prefix_sums_")
        lams = _as_query_array(X)
        values = [
            riesz(self.spectrum_, self.order, lam, self.prefix_sums_) for lam in lams
        ]
        return np.asarray(values)[:, np.newaxis]


class CompletenessAuditor(BaseEstimator):
    """fit(spectrum) runs the matched-filter audit; predict gives the verdict.

    Parameters mirror AuditConfig; ``coefficients`` must be a
    WeylCoefficients baseline for the spectrum being audited.
    """

    def __init__(
        self,
        coefficients=None,
        order=1,
        grid=(20.0, 100.0, 0.1),
        candidates=None,
        threshold=0.5,
        min_separation=5.0,
    ):
        self.coefficients = coefficients
        self.order = order
        self.grid = grid
        self.candidates = candidates
        self.threshold = threshold
        self.min_separation = min_separation

    def fit(self, X, y=None):
        spectrum = _as_spectrum(X)
        if self.coefficients is None:
            raise ValidationError("coefficients baseline is required")
        config = AuditConfig(
            coefficients=self.coefficients,
            order=self.order,
            grid=tuple(self.grid),
            candidates=None if self.candidates is None else tuple(self.candidates),
            threshold=self.threshold,
            min_separation=self.min_separation,
        )
        self.report_ = detect_defects(spectrum, config)
        return self

    def predict(self, X=None):
        check_is_fitted(self, "report_")
        return self.report_.verdict

    @property
    def anomalies_(self):
        check_is_fitted(self, "report_")
        return self.report_.anomalies

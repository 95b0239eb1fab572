import math

import numpy as np
import pytest

import weylaudit as w
from weylaudit.errors import ValidationError


@pytest.fixture(scope="module")
def torus_coeffs(square_torus):
    return w.torus_coefficients(square_torus)


def test_config_validation(torus_coeffs):
    with pytest.raises(ValidationError):
        w.AuditConfig(coefficients=torus_coeffs, order=0)
    cfg = w.AuditConfig(coefficients=torus_coeffs, order=0, allow_order_zero=True)
    assert cfg.order == 0
    with pytest.raises(ValidationError):
        w.AuditConfig(coefficients=torus_coeffs, grid=(100.0, 20.0, 0.1))
    with pytest.raises(ValidationError):
        w.AuditConfig(
            coefficients=torus_coeffs, candidates=(20.0, 99.9, 0.25)
        )  # no margin
    with pytest.raises(ValidationError):
        w.AuditConfig(coefficients=torus_coeffs, threshold=0.0)


def test_default_candidate_grid(torus_coeffs):
    cfg = w.AuditConfig(coefficients=torus_coeffs)
    assert cfg.candidates == (22.0, 90.0, 0.25)
    mus = cfg.candidate_grid()
    assert mus[0] == 22.0 and mus[-1] == 90.0


def test_residual_series_small(torus100, torus_coeffs):
    grid = np.arange(20.0, 100.0, 0.5)
    r = w.residual_series(torus100, torus_coeffs, 1, grid)
    assert np.abs(r).max() <= 1.0  # flat-torus R_1 residual is bounded


def test_residual_zero_coeffs_is_riesz(torus100):
    zero = w.WeylCoefficients(2, (0.0, 0.0, 0.0), (True,) * 3)
    grid = np.array([30.0, 50.0])
    r = w.residual_series(torus100, zero, 1, grid)
    ps = w.PrefixPowerSums.build(torus100)
    assert r[0] == pytest.approx(w.riesz_mean(ps, 1, 30.0))


def test_clean_spectrum_is_clean(torus100, torus_coeffs):
    report = w.detect_defects(torus100, w.AuditConfig(coefficients=torus_coeffs))
    assert report.verdict == "clean"
    assert report.anomalies == ()


def test_remove_one_detected(torus100, torus_coeffs):
    bad = w.perturb(torus100, "remove-one", 25.0, tol=1e-9)
    report = w.detect_defects(bad, w.AuditConfig(coefficients=torus_coeffs))
    assert report.verdict == "anomalies-found"
    assert len(report.anomalies) == 1
    a = report.anomalies[0]
    assert a.sign == "missing"
    assert abs(a.mu - 25.0) <= 1.0
    assert 0.5 <= a.amplitude <= 1.5


def test_add_one_detected(torus100, torus_coeffs):
    bad = w.perturb(torus100, "add-one", 25.0, tol=1e-9)
    report = w.detect_defects(bad, w.AuditConfig(coefficients=torus_coeffs))
    assert len(report.anomalies) == 1
    a = report.anomalies[0]
    assert a.sign == "extra"
    assert abs(a.mu - 25.0) <= 1.0
    assert 0.5 <= -a.amplitude <= 1.5


def test_linear_response_within_ten_percent(torus100, torus_coeffs):
    bad = w.perturb(torus100, "remove-one", 25.0, tol=1e-9)
    report = w.detect_defects(bad, w.AuditConfig(coefficients=torus_coeffs))
    assert report.anomalies[0].amplitude == pytest.approx(1.0, rel=0.1)


def test_monotone_evidence(torus100, torus_coeffs):
    """Defect score at the true mu is non-decreasing as the grid grows."""
    bad = w.perturb(torus100, "remove-one", 25.0, tol=1e-9)
    scores = []
    for stop in (60.0, 80.0, 100.0):
        grid = 20.0 + 0.1 * np.arange(int((stop - 20.0) / 0.1) + 1)
        r = w.residual_series(bad, torus_coeffs, 1, grid)
        g = np.where(grid > 25.0, -(1.0 - 25.0 / grid), 0.0)
        scores.append(float(r @ g) / math.sqrt(float(g @ g)))
    assert scores[0] <= scores[1] <= scores[2]


def test_report_text_round_and_deterministic(torus100, torus_coeffs):
    cfg = w.AuditConfig(coefficients=torus_coeffs)
    bad = w.perturb(torus100, "remove-one", 25.0, tol=1e-9)
    t1 = w.detect_defects(bad, cfg).to_text()
    t2 = w.detect_defects(bad, cfg).to_text()
    assert t1 == t2
    assert "[config]" in t1 and "[verdict]" in t1
    assert "anomalies-found" in t1


def test_certificate_clean_and_found(torus100, torus_coeffs):
    rep = w.completeness_certificate(torus100, torus_coeffs, (20.0, 100.0))
    assert rep.verdict == "clean"
    bad = w.perturb(torus100, "remove-one", 25.0, tol=1e-9)
    rep2 = w.completeness_certificate(bad, torus_coeffs, (20.0, 100.0))
    assert rep2.verdict == "anomalies-found"
    assert abs(rep2.anomalies[0].mu - 25.0) <= 1.0


def test_certificate_short_range_inconclusive(torus100, torus_coeffs):
    rep = w.completeness_certificate(torus100, torus_coeffs, (50.0, 51.0))
    assert rep.verdict == "inconclusive"
    assert "fewer than 20 grid steps" in rep.to_text()


def test_certificate_noisy_baseline_inconclusive(torus100):
    # a wildly wrong known baseline leaves a huge residual noise floor
    wrong = w.WeylCoefficients(2, (2.0 * math.pi, 0.0, 0.0), (True,) * 3)
    rep = w.completeness_certificate(torus100, wrong, (20.0, 100.0))
    assert rep.verdict == "inconclusive"

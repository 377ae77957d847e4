import cmath
import math

import numpy as np
import pytest

from semicoh.asymptotics import error_slopes, rotated_contour_integral, spa_integrate
from semicoh.errors import DegenerateStationaryPoint

QUARTIC_F = ([0.0, 0.0, 2.0, 0.0, 24.0], lambda x: x * x + x ** 4)
ONE = ([1.0, 0.0, 0.0], lambda x: 1.0 + 0 * x)


def _gauss(hbar):
    # int exp(i x^2/hbar) dx
    return math.sqrt(math.pi * hbar) * cmath.exp(0.25j * math.pi)


def test_pure_gaussian_exact():
    for h in (0.3, 0.05):
        res = spa_integrate([0.0, 0.0, 2.0, 0.0, 0.0], [1.0, 0.0, 0.0], h)
        assert res.R == 0
        assert abs(res.A0 - _gauss(h)) < 1e-15
        oracle = rotated_contour_integral(lambda x: x * x, lambda x: 1.0 + 0 * x, h, math.pi / 8)
        assert abs(oracle - _gauss(h)) < 1e-10


def test_quadratic_amplitude():
    # int (1 + x^2) exp(i x^2/hbar) dx = A0 (1 + i hbar/2) from the Gaussian second moment
    h = 0.1
    res = spa_integrate([0.0, 0.0, 2.0, 0.0, 0.0], [1.0, 0.0, 2.0], h)
    assert res.R == 0.5
    exact = _gauss(h) * (1 + 0.5j * h)
    assert abs(res.corrected - exact) < 1e-15
    oracle = rotated_contour_integral(lambda x: x * x, lambda x: 1 + x * x, h, math.pi / 8)
    assert abs(oracle - exact) < 1e-10


def test_quartic_correction_coefficient():
    res = spa_integrate(QUARTIC_F[0], ONE[0], 0.05)
    # Gaussian fourth moment: int x^4 exp(i x^2/hbar) = -3 hbar^2/4 A0,
    # so the first-order term i/hbar x^4 gives i hbar R with R = -3/4
    assert res.R == -0.75
    assert np.isreal(res.R)


def test_quartic_error_slopes():
    s0, s1, e0, e1 = error_slopes([0.2, 0.1, 0.05, 0.025], QUARTIC_F[1], ONE[1],
                                  QUARTIC_F[0], ONE[0], math.pi / 8)
    assert abs(s0 - 1) < 0.15
    assert abs(s1 - 2) < 0.3
    assert np.all(e1 < e0)


def test_contour_rotation_matches_real_axis():
    # a damped integrand is absolutely integrable on the real axis as well
    f = lambda x: x * x + 1j * 0.5 * x * x
    g = lambda x: 1.0 + 0 * x
    a = rotated_contour_integral(f, g, 0.2, 0.0)
    b = rotated_contour_integral(f, g, 0.2, math.pi / 10)
    assert abs(a - b) < 1e-10


def test_sign_of_curvature():
    res = spa_integrate([0.0, 0.0, -2.0, 0.0, 0.0], [1.0, 0.0, 0.0], 0.1)
    assert abs(res.A0 - np.conj(_gauss(0.1))) < 1e-15


def test_degenerate_points():
    with pytest.raises(DegenerateStationaryPoint):
        spa_integrate([0.0, 0.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0], 0.1)
    with pytest.raises(DegenerateStationaryPoint):
        spa_integrate([0.0, 1e-3, 2.0, 0.0, 0.0], [1.0, 0.0, 0.0], 0.1)
    with pytest.raises(DegenerateStationaryPoint):
        spa_integrate([0.0, 0.0, 2.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.1)

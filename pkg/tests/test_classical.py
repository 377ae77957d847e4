import csv
import math

import numpy as np
import pytest
from scipy.integrate import quad

from semicoh.classical import (TangentMatrix, find_periodic_orbit, gamma_of, integrate_ensemble,
                               integrate_real, loglog_slope, monodromy_vv, phase_velocity,
                               shoot_momentum, smoothing_action_defect, turning_points,
                               well_bottom)
from semicoh.coherent import CoherentParams, PhasePoint, label_of
from semicoh.complextraj import _shoot
from semicoh.errors import BelowMinimum, Degenerate, NoRootTrajectory, Unbound
from semicoh.hamiltonian import SymbolKind, harmonic_model, polynomial_model

from conftest import random_symplectic


def test_free_particle_closed_forms(fig_params):
    free = polynomial_model([0.0], fig_params)
    b, c = fig_params.b, fig_params.c
    for t in (0.5, 2.0, 10.0):
        tr = integrate_real(free, "smoothed", PhasePoint(0.0, 1.0), t)
        m = tr.tangent()
        assert abs(m.qq - 1) < 1e-12 and abs(m.pp - 1) < 1e-12 and abs(m.pq) < 1e-12
        assert abs(m.qp - c * t / b) < 1e-11
        assert abs(tr.action - (t / 2 - c * c * t / 4)) < 1e-12
        assert abs(tr.i_term - c * c * t / 4) < 1e-13


def test_oscillator_tangent_is_rotation(oscillator):
    w = oscillator.omega
    tr = integrate_real(oscillator, "weyl", PhasePoint(0.3, -0.1), 2.7)
    th = w * 2.7
    ref = np.array([[math.cos(th), math.sin(th)], [-math.sin(th), math.cos(th)]])
    assert np.max(np.abs(tr.tangent().as_array() - ref)) < 1e-10


def test_zero_time(barrier):
    tr = integrate_real(barrier, "smoothed", PhasePoint(0.0, 1.0), 0.0)
    assert np.array_equal(tr.tangent().as_array(), np.eye(2))
    assert tr.action == 0 and tr.i_term == 0


@pytest.mark.parametrize("kind", ["smoothed", "weyl", "antismoothed"])
def test_symplectic_and_energy(barrier, quartic, kind):
    for model, start, t in [(barrier, PhasePoint(0.0, 1.0), 10.0),
                            (quartic, PhasePoint(1.0, 0.5), 20.0)]:
        tr = integrate_real(model, kind, start, t)
        assert np.max(np.abs(tr.determinants() - 1)) < 1e-9
        E = tr.energy()
        assert np.max(np.abs(E - E[0])) / abs(E[0]) < 1e-9
        assert np.isreal(tr.i_term)


def test_ensemble_matches_single(barrier):
    q0 = np.array([0.0, 0.5, -1.0])
    p0 = np.array([1.0, -0.3, 0.2])
    ens = integrate_ensemble(barrier, "smoothed", q0, p0, 3.0)
    for k in range(3):
        tr = integrate_real(barrier, "smoothed", PhasePoint(q0[k], p0[k]), 3.0)
        assert abs(ens.q[k] - tr.q[-1]) < 1e-8
        assert abs(ens.S_H[k] - tr.action) < 1e-8


def test_gamma_examples(fig_params):
    assert gamma_of(TangentMatrix.identity()) == 0
    b, c = fig_params.b, fig_params.c
    for t in (0.5, 3.0):
        m = TangentMatrix(1.0, c * t / b, 0.0, 1.0)
        assert abs(gamma_of(m) - 1j * t * c / (1j * t * c + 2 * b)) < 1e-15
        assert abs(gamma_of(m) - m.M_uv / m.M_vv) < 1e-15
    with pytest.raises(Degenerate):
        gamma_of(TangentMatrix(0.0, 0.0, 0.0, 0.0))


def test_sqrt_gamma_bound():
    rng = np.random.default_rng(5)
    for a in random_symplectic(rng, 1000):
        g = gamma_of(TangentMatrix.from_array(a))
        assert abs(np.sqrt(g).imag) <= 1
        assert abs(g) < 1


def test_action_time_derivative(barrier):
    # fixed end points: dS_H/dt = -E
    q0, q1, t, h = 0.0, 1.5, 2.0, 1e-4
    p, tr = shoot_momentum(barrier, "weyl", q0, q1, t, p_guess=1.0)
    sp = shoot_momentum(barrier, "weyl", q0, q1, t + h, p_guess=p)[1].action
    sm = shoot_momentum(barrier, "weyl", q0, q1, t - h, p_guess=p)[1].action
    assert abs((sp - sm) / (2 * h) + tr.energy()[0]) < 1e-6


def test_shoot_failure(barrier):
    with pytest.raises(NoRootTrajectory):
        shoot_momentum(barrier, "weyl", 0.0, 40.0, 0.5, scan=(-3.0, 3.0))


def test_oscillator_orbit(oscillator):
    w = oscillator.omega
    E = 0.4
    orb = find_periodic_orbit(oscillator, "weyl", E)
    assert abs(orb.period - 2 * math.pi / w) < 1e-10
    assert abs(orb.action - 2 * math.pi * E / w) < 1e-10
    assert abs(orb.dT_dE) < 1e-5
    assert orb.closure() < 1e-8


def _quadrature_period(E):
    qt = (4 * E) ** 0.25
    # E - q^4/4 = (qt - q)(qt + q)(qt^2 + q^2)/4, the root factor goes into the weight
    g = lambda q: 1 / np.sqrt((qt + q) * (qt * qt + q * q) / 2)
    half = quad(g, 0, qt, weight="alg", wvar=(0, -0.5), epsabs=1e-13, epsrel=1e-13)[0]
    return 4 * half


def test_quartic_period_against_quadrature():
    model = polynomial_model([0, 0, 0, 0, 0.25], CoherentParams.from_b(1.0, 1.0))
    orb = find_periodic_orbit(model, "weyl", 1.0)
    assert abs(orb.period - _quadrature_period(1.0)) < 1e-7
    assert orb.closure() < 1e-8


@pytest.mark.parametrize("E", [0.1, 0.3, 0.7, 1.2, 2.0])
def test_action_derivative_is_period(quartic, E):
    h = 1e-5 * E
    up = find_periodic_orbit(quartic, "smoothed", E + h).action
    dn = find_periodic_orbit(quartic, "smoothed", E - h).action
    T = find_periodic_orbit(quartic, "smoothed", E).period
    assert abs((up - dn) / (2 * h) / T - 1) < 1e-5


def test_monodromy_trivial_cases(oscillator):
    orb = find_periodic_orbit(oscillator, "smoothed", 0.5)
    zd = phase_velocity(oscillator, "smoothed", PhasePoint(orb.turning[1], 0.0))
    assert abs(monodromy_vv(orb, 1, zd) - 1) < 1e-5
    assert monodromy_vv(orb, 0, zd) == 1


def test_monodromy_against_integration(quartic):
    orb = find_periodic_orbit(quartic, "smoothed", 1.0)
    i = len(orb.trajectory.t) // 3
    pt = PhasePoint(orb.trajectory.q[i], orb.trajectory.p[i])
    zd = phase_velocity(quartic, "smoothed", pt)
    direct = integrate_real(quartic, "smoothed", pt, orb.period, 1e-13).tangent().M_vv
    assert abs(monodromy_vv(orb, 1, zd) - direct) < 1e-5 * abs(direct)
    # the same number from the complex variational pair on the real orbit
    z = label_of(pt, quartic.params).z
    run = _shoot(quartic, SymbolKind.SMOOTHED, z, np.conj(z), orb.period, 1e-12, False)
    assert abs(run.y[3, -1] - direct) < 1e-7


def test_orbit_errors(quartic):
    with pytest.raises(BelowMinimum):
        find_periodic_orbit(quartic, "weyl", -1.0)
    hump = polynomial_model([0, 0, 1.0, 0, -0.1], CoherentParams.from_b(1.0, 1.0))
    with pytest.raises(Unbound):
        turning_points(hump, "weyl", 5.0, q_range=(-4, 4))


def test_well_bottom(quartic):
    q, v, w = well_bottom(quartic, "smoothed")
    # smoothed q^4/4 is q^4/4 + 3 s q^2/2 + const with s = b^2/2
    assert abs(q) < 1e-12
    assert abs(w - math.sqrt(3 * quartic.params.b ** 2 / 2)) < 1e-12


def test_smoothing_defect_scales_quadratically():
    hs = [0.2, 0.1, 0.05, 0.025, 0.0125]
    d = []
    for h in hs:
        m = polynomial_model([0, 0, 0, 0, 0.25], CoherentParams.from_b(math.sqrt(h), h))
        d.append(smoothing_action_defect(m, PhasePoint(1.0, 0.0), 1.0))
    assert abs(loglog_slope(hs, d) - 2.0) < 0.2


def test_trajectory_csv(tmp_path, barrier):
    tr = integrate_real(barrier, "smoothed", PhasePoint(0.0, 1.0), 1.0)
    path = tmp_path / "traj.csv"
    tr.to_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "q", "p", "m_qq", "m_qp", "m_pq", "m_pp", "S_H", "I"]
    assert len(rows) == len(tr.t) + 1
    assert float(rows[-1][1]) == tr.q[-1]


def test_loglog_slope():
    x = np.array([1.0, 2.0, 4.0])
    assert abs(loglog_slope(x, 3 * x ** 2) - 2) < 1e-12

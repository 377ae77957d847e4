"""Real trajectories, tangent matrices, actions and periodic orbits.

The tangent matrix m maps initial to final displacements in the scaled
variables (dq/b, dp/c).  It is integrated together with the trajectory, the
Hamilton action S_H = int (p dq - H dt) and the I term
int (b^2/4 H_qq + c^2/4 H_pp) dt, all in one augmented state.
"""

from dataclasses import dataclass
import csv

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ._ode import integrate
from .coherent import ComplexPhase, PhasePoint
from .errors import (BelowMinimum, Degenerate, NoRootTrajectory, NonFiniteState,
                     StepFailure, Unbound)
from .hamiltonian import SymbolKind, eval_symbol

__all__ = [
    "TangentMatrix", "RealTrajectory", "EnsembleEnd", "PeriodicOrbit",
    "integrate_real", "integrate_ensemble", "gamma_of", "well_bottom",
    "turning_points", "find_periodic_orbit", "phase_velocity", "monodromy_vv",
    "shoot_momentum", "smoothing_action_defect", "loglog_slope",
]

TRAJ_COLUMNS = ("t", "q", "p", "m_qq", "m_qp", "m_pq", "m_pp", "S_H", "I")


@dataclass(frozen=True)
class TangentMatrix:
    qq: float
    qp: float
    pq: float
    pp: float

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a)
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    def as_array(self):
        return np.array([[self.qq, self.qp], [self.pq, self.pp]])

    @property
    def det(self):
        return self.qq * self.pp - self.qp * self.pq

    # the same map in the (u, v) coordinates
    @property
    def M_uu(self):
        return 0.5 * (self.qq + self.pp + 1j * self.pq - 1j * self.qp)

    @property
    def M_uv(self):
        return 0.5 * (self.qq - self.pp + 1j * self.pq + 1j * self.qp)

    @property
    def M_vu(self):
        return 0.5 * (self.qq - self.pp - 1j * self.pq - 1j * self.qp)

    @property
    def M_vv(self):
        return 0.5 * (self.qq + self.pp - 1j * self.pq + 1j * self.qp)


def gamma_of(m):
    """Packet-shape parameter M_uv / M_vv."""
    num = m.qq + 1j * m.qp + 1j * m.pq - m.pp
    den = m.qq + 1j * m.qp - 1j * m.pq + m.pp
    if np.any(np.abs(den) < 1e-14):
        raise Degenerate("denominator of gamma vanishes; tangent matrix is not symplectic")
    return num / den


def _rhs(model, kind, n):
    b, c = model.params.b, model.params.c
    cb, bc = c / b, b / c

    def f(t, y):
        y = y.reshape(8, n)
        q, p = y[0], y[1]
        d = eval_symbol(model, kind, q, p)
        out = np.empty_like(y)
        out[0] = d.H_p
        out[1] = -d.H_q
        mqq, mqp, mpq, mpp = y[2], y[3], y[4], y[5]
        out[2] = d.H_qp * mqq + cb * d.H_pp * mpq
        out[3] = d.H_qp * mqp + cb * d.H_pp * mpp
        out[4] = -bc * d.H_qq * mqq - d.H_qp * mpq
        out[5] = -bc * d.H_qq * mqp - d.H_qp * mpp
        out[6] = p * d.H_p - d.H
        out[7] = 0.25 * b * b * d.H_qq + 0.25 * c * c * d.H_pp
        return out.ravel()
    return f


def _watch(n):
    # m_qq + i m_qp (Gaussian IVR prefactor) and M_uu (fixed-width prefactor)
    def w(y):
        y = y.reshape(8, n)
        a = y[2] + 1j * y[3]
        h = 0.5 * (y[2] + y[5] + 1j * y[4] - 1j * y[3])
        return np.concatenate([a, h])
    return w


def _initial(q0, p0):
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    q0, p0 = np.broadcast_arrays(q0, p0)
    n = q0.size
    y0 = np.zeros((8, n))
    y0[0], y0[1] = q0.ravel(), p0.ravel()
    y0[2] = y0[5] = 1.0
    return y0, n


@dataclass
class RealTrajectory:
    """Recorded real trajectory with tangent matrix, S_H and I.

    half_arg_a, half_arg_h: continuous half-arguments of m_qq + i m_qp and of
    M_uu, starting from 0 at t = 0.
    """
    model: object
    kind: SymbolKind
    start: PhasePoint
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    m: np.ndarray
    S_H: np.ndarray
    I: np.ndarray
    half_arg_a: np.ndarray
    half_arg_h: np.ndarray

    @property
    def duration(self):
        return float(self.t[-1])

    @property
    def end(self):
        return PhasePoint(float(self.q[-1]), float(self.p[-1]))

    def tangent(self, i=-1):
        return TangentMatrix(*(float(v) for v in self.m[:, i]))

    @property
    def action(self):
        return float(self.S_H[-1])

    @property
    def i_term(self):
        return float(self.I[-1])

    def sqrt_a(self, i=-1):
        """Continued sqrt(m_qq + i m_qp)."""
        a = self.m[0, i] + 1j * self.m[1, i]
        return np.sqrt(abs(a)) * np.exp(1j * self.half_arg_a[i])

    def sqrt_h(self, i=-1):
        """Continued sqrt(M_uu), M_uu = (m_pp + m_qq - i m_qp + i m_pq)/2."""
        h = 0.5 * (self.m[0, i] + self.m[3, i] + 1j * self.m[2, i] - 1j * self.m[1, i])
        return np.sqrt(abs(h)) * np.exp(1j * self.half_arg_h[i])

    def energy(self):
        return np.real(eval_symbol(self.model, self.kind, self.q, self.p).H)

    def determinants(self):
        return self.m[0] * self.m[3] - self.m[1] * self.m[2]

    def rows(self):
        return np.column_stack([self.t, self.q, self.p, self.m[0], self.m[1],
                                self.m[2], self.m[3], self.S_H, self.I])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRAJ_COLUMNS)
            for row in self.rows():
                w.writerow([f"{v:.17g}" for v in row])


def integrate_real(model, kind, start, t, tol=1e-12):
    """Integrate one real trajectory from ``start`` over [0, t]."""
    kind = SymbolKind.parse(kind)
    if t < 0:
        raise ValueError("duration must be non-negative")
    y0, n = _initial(start.q, start.p)
    run = integrate(_rhs(model, kind, 1), y0.ravel(), float(t), rtol=tol, atol=tol,
                    watch=_watch(1), record=True)
    y = run.y
    return RealTrajectory(model, kind, start, run.t, y[0], y[1], y[2:6], y[6], y[7],
                          0.5 * run.args[0], 0.5 * run.args[1])


@dataclass
class EnsembleEnd:
    """End points of a batch of trajectories sharing one duration."""
    q0: np.ndarray
    p0: np.ndarray
    q: np.ndarray
    p: np.ndarray
    m: np.ndarray
    S_H: np.ndarray
    I: np.ndarray
    half_arg_a: np.ndarray
    half_arg_h: np.ndarray

    def tangent(self):
        return TangentMatrix(self.m[0], self.m[1], self.m[2], self.m[3])

    def sqrt_a(self):
        a = self.m[0] + 1j * self.m[1]
        return np.sqrt(np.abs(a)) * np.exp(1j * self.half_arg_a)

    def sqrt_h(self):
        h = 0.5 * (self.m[0] + self.m[3] + 1j * self.m[2] - 1j * self.m[1])
        return np.sqrt(np.abs(h)) * np.exp(1j * self.half_arg_h)


def integrate_ensemble(model, kind, q0, p0, t, tol=1e-11, chunk=4096):
    """Integrate many initial conditions to the same time t."""
    kind = SymbolKind.parse(kind)
    q0 = np.asarray(q0, dtype=float).ravel()
    p0 = np.asarray(p0, dtype=float).ravel()
    parts = []
    for s in range(0, q0.size, chunk):
        y0, n = _initial(q0[s:s + chunk], p0[s:s + chunk])
        run = integrate(_rhs(model, kind, n), y0.ravel(), float(t), rtol=tol, atol=tol,
                        watch=_watch(n))
        parts.append((run.y[:, -1].reshape(8, n), run.args[:, -1]))
    y = np.concatenate([a for a, _ in parts], axis=1)
    args = np.concatenate([g.reshape(2, -1) for _, g in parts], axis=1)
    return EnsembleEnd(q0, p0, y[0], y[1], y[2:6], y[6], y[7],
                       0.5 * args[0], 0.5 * args[1])


def phase_velocity(model, kind, point):
    """(u dot, v dot) at a real phase point."""
    d = eval_symbol(model, kind, point.q, point.p)
    qd, pd = np.real(d.H_p), -np.real(d.H_q)
    b, c = model.params.b, model.params.c
    ud = (qd / b + 1j * pd / c) / np.sqrt(2.0)
    vd = (qd / b - 1j * pd / c) / np.sqrt(2.0)
    return ComplexPhase(complex(ud), complex(vd))


def monodromy_vv(orbit, n, zdot):
    """(M^n)_vv over n traversals of a periodic orbit."""
    hbar = orbit.model.params.hbar
    return 1.0 - n * 1j * hbar * orbit.dT_dE * zdot.u * zdot.v


# -- periodic orbits ------------------------------------------------------

def well_bottom(model, kind, q_range=(-50.0, 50.0), npts=4001):
    """Position, value and curvature frequency of the minimum of H(q, 0)."""
    kind = SymbolKind.parse(kind)
    qs = np.linspace(q_range[0], q_range[1], npts)
    with np.errstate(over="ignore"):
        vs = np.real(model.rest_energy(kind, qs))
    vs = np.where(np.isfinite(vs), vs, np.inf)
    i = int(np.argmin(vs))
    if i in (0, npts - 1):
        raise Unbound(f"no confining minimum inside q in {tuple(q_range)}")

    def dV(x):
        return float(np.real(model.potential(kind, x, 1)))
    a, b = qs[i - 1], qs[i + 1]
    if dV(a) < 0 < dV(b):
        qmin = brentq(dV, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
    else:
        qmin = qs[i]
    vmin = float(np.real(model.rest_energy(kind, qmin)))
    k = float(np.real(model.potential(kind, qmin, 2)))
    if not k > 0:
        raise Unbound(f"flat or inverted well bottom at q = {qmin:.6g}")
    omega0 = np.sqrt(k / model.mass)
    return qmin, vmin, omega0


def turning_points(model, kind, energy, q_range=(-50.0, 50.0), bottom=None):
    kind = SymbolKind.parse(kind)
    qmin, vmin, _ = bottom if bottom is not None else well_bottom(model, kind, q_range)
    if energy < vmin:
        raise BelowMinimum(f"energy {energy} lies below the well minimum {vmin}")

    def g(x):
        return float(np.real(model.rest_energy(kind, x))) - energy
    if energy == vmin:
        return qmin, qmin
    with np.errstate(over="ignore"):
        if not g(q_range[1]) > 0:
            raise Unbound("no right turning point inside the search range")
        if not g(q_range[0]) > 0:
            raise Unbound("no left turning point inside the search range")
    qr = brentq(g, qmin, q_range[1], xtol=1e-15, rtol=1e-15, maxiter=500)
    ql = brentq(g, q_range[0], qmin, xtol=1e-15, rtol=1e-15, maxiter=500)
    return ql, qr


@dataclass
class PeriodicOrbit:
    model: object
    kind: SymbolKind
    energy: float
    period: float
    action: float
    I: float
    dT_dE: float
    dI_dE: float
    turning: tuple
    trajectory: RealTrajectory

    def epsilon(self, q, p):
        """b^2/4 H_qq + c^2/4 H_pp at points of the orbit."""
        return np.real(eval_symbol(self.model, self.kind, q, p).epsilon)

    def closure(self):
        """|z(T) - z(0)| in scaled units."""
        tr = self.trajectory
        b, c = self.model.params.b, self.model.params.c
        dq, dp = tr.q[-1] - tr.q[0], tr.p[-1] - tr.p[0]
        return float(np.hypot(dq / b, dp / c) / np.sqrt(2.0))


def _half_period(model, kind, ql, tol):
    f = _rhs(model, kind, 1)
    y0 = np.array([ql, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0])

    def ev(t, y):
        return y[1]
    ev.terminal = True
    ev.direction = -1
    # crude upper bound for the search horizon, extended until the event fires
    horizon = 10.0
    for _ in range(30):
        sol = solve_ivp(f, (0.0, horizon), y0, method="DOP853", rtol=tol, atol=tol,
                        events=ev)
        if sol.status == -1:
            raise StepFailure(sol.message)
        if sol.t_events[0].size:
            return float(sol.t_events[0][0])
        horizon *= 2
    raise Unbound("orbit did not return within the search horizon")


def _orbit_core(model, kind, energy, q_range, tol, bottom):
    ql, qr = turning_points(model, kind, energy, q_range, bottom)
    T = 2.0 * _half_period(model, kind, ql, tol)
    tr = integrate_real(model, kind, PhasePoint(ql, 0.0), T, tol)
    return T, tr, (ql, qr)


def find_periodic_orbit(model, kind, energy, q_range=(-50.0, 50.0), tol=1e-12,
                        rel_step=1e-4):
    """Periodic orbit of H(q, p) = energy with period, actions and derivatives."""
    kind = SymbolKind.parse(kind)
    bottom = well_bottom(model, kind, q_range)
    vmin = bottom[1]
    if energy <= vmin:
        raise BelowMinimum(f"energy {energy} is not above the minimum {vmin}")
    T, tr, tp = _orbit_core(model, kind, energy, q_range, tol, bottom)
    action = tr.action + energy * T
    I = tr.i_term

    def TI(E):
        Te, tre, _ = _orbit_core(model, kind, E, q_range, tol, bottom)
        return np.array([Te, tre.i_term])

    h = rel_step * (energy - vmin)
    up, dn = TI(energy + h), TI(energy - h)
    mid = np.array([T, I])
    central = (up - dn) / (2 * h)
    fwd, bwd = (up - mid) / h, (mid - dn) / h
    scale = np.maximum(np.abs(central), 1e-300)
    if np.any(np.abs(fwd - bwd) > 1e-3 * scale):
        up2, dn2 = TI(energy + h / 2), TI(energy - h / 2)
        central = (4 * (up2 - dn2) / h - (up - dn) / (2 * h)) / 3
    return PeriodicOrbit(model, kind, energy, T, action, I, float(central[0]),
                         float(central[1]), tp, tr)


# -- boundary shooting on real trajectories ----------------------------------

def shoot_momentum(model, kind, q0, q1, t, p_guess=None, tol=1e-12, xtol=1e-11,
                   max_iter=60, scan=(-20.0, 20.0)):
    """Initial momentum of the real trajectory from q0 to q1 in time t."""
    kind = SymbolKind.parse(kind)
    ratio = model.params.b / model.params.c

    def shot(p):
        tr = integrate_real(model, kind, PhasePoint(q0, p), t, tol)
        return tr.q[-1] - q1, tr
    p = model.mass * (q1 - q0) / t if p_guess is None else float(p_guess)
    try:
        for _ in range(max_iter):
            r, tr = shot(p)
            if abs(r) < xtol:
                return p, tr
            dqdp = ratio * tr.m[1, -1]
            if dqdp == 0:
                break
            step = -r / dqdp
            # damp wild Newton steps
            step = float(np.clip(step, -2.0, 2.0))
            p += step
    except (StepFailure, NonFiniteState):
        pass
    # fall back to a bracketing scan
    ps = np.linspace(scan[0], scan[1], 401)
    vals = []
    for pv in ps:
        try:
            vals.append(shot(pv)[0])
        except (StepFailure, NonFiniteState):
            vals.append(np.nan)
    vals = np.array(vals)
    for i in range(len(ps) - 1):
        if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]) and vals[i] * vals[i + 1] < 0:
            p = brentq(lambda x: shot(x)[0], ps[i], ps[i + 1], xtol=1e-14, rtol=1e-15)
            return p, shot(p)[1]
    raise NoRootTrajectory(f"no real trajectory from {q0} to {q1} in time {t}")


def smoothing_action_defect(model, start, t, tol=1e-12):
    """|(S_H + I)[smoothed] - S_H[Weyl]| for trajectories with common end points.

    The Weyl trajectory from ``start`` fixes the end position; the smoothed
    trajectory is shot between the same two positions.
    """
    w = integrate_real(model, SymbolKind.WEYL, start, t, tol)
    q1 = w.q[-1]
    _, s = shoot_momentum(model, SymbolKind.SMOOTHED, start.q, q1, t, p_guess=start.p,
                          tol=tol)
    return abs(s.action + s.i_term - w.action)


def loglog_slope(x, y):
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])

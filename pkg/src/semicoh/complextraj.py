"""Complex boundary-value trajectories and the coherent-state propagator.

The trajectory runs in the independent complex coordinates (u, v) with

    i hbar du/dt =  dH/dv,      i hbar dv/dt = -dH/du,

and the mixed boundary conditions u(0) = z', v(t) = conj(z'').  The unknown
v(0) is found by Newton shooting; the Jacobian dv(t)/dv(0) is the variation
dv'' started from du' = 0, dv' = 1, which is also the M_vv prefactor.
"""

from dataclasses import dataclass, field

import numpy as np

from ._ode import integrate
from ._phase import phase_continue
from .coherent import ComplexLabel, _as_label, overlap, qp_from_uv
from .errors import NoConvergence, NonFiniteState, ReturnsBranchAmbiguity, StepFailure
from .hamiltonian import SymbolKind, eval_symbol

__all__ = ["ComplexTrajectory", "solve_boundary", "propagator",
           "propagator_from", "phase_continue"]


@dataclass
class ComplexTrajectory:
    model: object
    kind: SymbolKind
    zprime: complex
    zdoubleprime: complex
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    S: complex
    I: complex
    M_vv: complex
    half_arg: float
    residual: float
    iterations: int
    residual_history: list = field(default_factory=list)

    @property
    def duration(self):
        return float(self.t[-1])

    @property
    def u1(self):
        return complex(self.u[0])

    @property
    def v1(self):
        return complex(self.v[0])

    @property
    def u2(self):
        return complex(self.u[-1])

    @property
    def v2(self):
        return complex(self.v[-1])

    def energy(self):
        q, p = qp_from_uv(self.u, self.v, self.model.params)
        return eval_symbol(self.model, self.kind, q, p).H


def _rhs(model, kind):
    par = model.params
    hbar = par.hbar

    def f(t, y):
        u, v, du, dv = y[0], y[1], y[2], y[3]
        q, p = qp_from_uv(u, v, par)
        d = eval_symbol(model, kind, q, p)
        Huv, Huu, Hvv = d.H_uv, d.H_uu, d.H_vv
        ud = d.H_v / (1j * hbar)
        vd = -d.H_u / (1j * hbar)
        out = np.empty(6, dtype=complex)
        out[0] = ud
        out[1] = vd
        out[2] = -1j / hbar * (Huv * du + Hvv * dv)
        out[3] = 1j / hbar * (Huu * du + Huv * dv)
        out[4] = 0.5j * hbar * (ud * v - vd * u) - d.H
        out[5] = 0.5 * Huv
        return out
    return f


def _watch(y):
    return np.array([y[3]])


def _shoot(model, kind, z1, w, t, ode_tol, record):
    y0 = np.array([z1, w, 0.0, 1.0, 0.0, 0.0], dtype=complex)
    return integrate(_rhs(model, kind), y0, t, rtol=ode_tol, atol=ode_tol,
                     watch=_watch, record=record)


def _newton(model, kind, z1, target, t, w, tol, ode_tol, max_iter, backtracks):
    history = []
    run = _shoot(model, kind, z1, w, t, ode_tol, False)
    r = run.y[1, -1] - target
    history.append(abs(r))
    it = 0
    while abs(r) > tol:
        if it >= max_iter:
            raise NoConvergence(f"Newton shooting stalled at residual {abs(r):.3e}")
        jac = run.y[3, -1]
        step = -r / jac
        lam = 1.0
        for _ in range(backtracks + 1):
            try:
                trial = _shoot(model, kind, z1, w + lam * step, t, ode_tol, False)
                r_new = trial.y[1, -1] - target
                if np.isfinite(r_new) and abs(r_new) < abs(r):
                    break
            except (StepFailure, NonFiniteState):
                pass
            lam *= 0.5
        else:
            raise NoConvergence(f"no descent after {backtracks} backtracks "
                                f"(residual {abs(r):.3e})")
        w = w + lam * step
        run, r = trial, r_new
        history.append(abs(r))
        it += 1
    return w, it, history


def _finish(model, kind, z1, z2, w, t, ode_tol, it, history):
    run = _shoot(model, kind, z1, w, t, ode_tol, True)
    y = run.y
    u, v = y[0], y[1]
    hbar = model.params.hbar
    S = y[4, -1] - 0.5j * hbar * (u[-1] * v[-1] + u[0] * v[0])
    return ComplexTrajectory(
        model, kind, z1, z2, run.t, u, v, y[2], y[3], complex(S), complex(y[5, -1]),
        complex(y[3, -1]), float(0.5 * run.args[0, -1]),
        float(abs(v[-1] - np.conj(z2))), it, history)


def _solve_from(model, kind, z1, z2, t, seed, tol, ode_tol, max_iter, backtracks):
    target = np.conj(z2)
    try:
        w, it, hist = _newton(model, kind, z1, target, t, seed, tol, ode_tol,
                              max_iter, backtracks)
        return _finish(model, kind, z1, z2, w, t, ode_tol, it, hist)
    except (NoConvergence, StepFailure, NonFiniteState) as err:
        first_error = err
    # homotopy in time: continue the root from short times, where the
    # trajectory is close to the straight overlap limit
    for n in (8, 32, 128):
        w = seed
        try:
            total = 0
            for k in range(1, n + 1):
                w, it, hist = _newton(model, kind, z1, target, t * k / n, w, tol,
                                      ode_tol, max_iter, backtracks)
                total += it
            return _finish(model, kind, z1, z2, w, t, ode_tol, total, hist)
        except (NoConvergence, StepFailure, NonFiniteState):
            continue
    raise NoConvergence(f"shooting failed from seed {seed}: {first_error}")


def solve_boundary(model, kind, zprime, zdoubleprime, t, tol=1e-10, ode_tol=1e-12,
                   max_iter=50, backtracks=8, seeds=None, all_roots=False,
                   action_tol=1e-6):
    """Complex trajectory with u(0) = z', v(t) = conj(z'').

    By default one root is followed from the seed v(0) = conj(z').  Extra
    ``seeds`` add more starting guesses; distinct roots either raise
    ReturnsBranchAmbiguity or, with ``all_roots``, are all returned.
    """
    kind = SymbolKind.parse(kind)
    if not t > 0:
        raise ValueError("boundary problem needs t > 0")
    z1 = _as_label(zprime, model.params).z
    z2 = _as_label(zdoubleprime, model.params).z
    primary = _solve_from(model, kind, z1, z2, t, np.conj(z1), tol, ode_tol,
                          max_iter, backtracks)
    if seeds is None and not all_roots:
        return primary
    roots = [primary]
    for s in (seeds or []):
        try:
            r = _solve_from(model, kind, z1, z2, t, complex(s), tol, ode_tol,
                            max_iter, backtracks)
        except NoConvergence:
            continue
        if all(abs(r.S - o.S) > action_tol * max(1.0, abs(o.S)) for o in roots):
            roots.append(r)
    if all_roots:
        return roots
    if len(roots) > 1:
        raise ReturnsBranchAmbiguity(f"{len(roots)} distinct roots found", roots)
    return primary


def propagator_from(traj):
    """Semiclassical <z''|exp(-iHt/hbar)|z'> from a converged trajectory."""
    hbar = traj.model.params.hbar
    sigma = traj.kind.sigma
    z1, z2 = traj.zprime, traj.zdoubleprime
    expo = (1j * traj.S / hbar + 1j * sigma * traj.I / hbar
            - 0.5 * (abs(z1) ** 2 + abs(z2) ** 2)
            - 0.5 * np.log(abs(traj.M_vv)) - 1j * traj.half_arg)
    return complex(np.exp(expo))


def propagator(model, kind, zprime, zdoubleprime, t, **kw):
    """Semiclassical coherent-state propagator K(z'', t; z', 0)."""
    if t == 0:
        z1 = _as_label(zprime, model.params)
        z2 = _as_label(zdoubleprime, model.params)
        return complex(overlap(z2, z1))
    return propagator_from(solve_boundary(model, kind, zprime, zdoubleprime, t, **kw))

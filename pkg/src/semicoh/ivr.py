"""Mixed propagators <x|K(t)|z'> built from one real trajectory.

Three variants share the same ingredients (end point, tangent matrix,
action) and differ in the Hamiltonian symbol and the packet shape:

* ``paper``  - smoothed symbol, thawed width (1-g)/(1+g), I phase.
* ``hk``     - Weyl symbol, frozen width, prefactor sqrt(M_uu).
* ``heller`` - Weyl symbol, thawed width, no I phase.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.integrate import trapezoid

from .classical import (EnsembleEnd, RealTrajectory, TangentMatrix, gamma_of,
                        integrate_ensemble, integrate_real, shoot_momentum)
from .coherent import PI_M14, WINDOW, _as_point, bargmann_grid, wavefunction
from .errors import CausticWarning, ConfigError, GridTooCoarse
from .hamiltonian import SymbolKind

__all__ = [
    "METHODS", "MixedPacket", "mixed_paper_ivr", "mixed_hk", "mixed_heller",
    "mixed_packet", "propagate_state", "coordinate_propagator",
    "sampling_spread", "default_xgrid", "free_packet_exact",
]

METHODS = {"paper": SymbolKind.SMOOTHED, "hk": SymbolKind.WEYL,
           "heller": SymbolKind.WEYL}


def _method(name):
    key = str(name).lower().replace("_", "").replace("-", "")
    key = {"paperivr": "paper", "ivr": "paper", "hermankluk": "hk",
           "thawed": "heller"}.get(key, key)
    if key not in METHODS:
        raise ConfigError(f"unknown propagation method {name!r}")
    return key


def default_xgrid(L, n=1024):
    return np.linspace(-L, L, n)


@dataclass
class MixedPacket:
    method: str
    x: np.ndarray
    psi: np.ndarray
    q_r: float
    p_r: float
    gamma: complex
    prefactor: complex
    S_H: float
    I_r: float
    tangent: TangentMatrix
    trajectory: RealTrajectory
    params: object

    @property
    def width_coefficient(self):
        """(1 - g)/(1 + g) for thawed packets, 1 for HK."""
        if self.method == "hk":
            return 1.0 + 0j
        m = self.tangent
        return (m.pp - 1j * m.pq) / (m.qq + 1j * m.qp)

    def norm(self):
        return float(trapezoid(np.abs(self.psi) ** 2, self.x))

    def analytic_norm(self):
        if self.method == "hk":
            return float(abs(self.tangent.M_uu))
        return 1.0

    def complex_endpoint_momentum(self, x):
        """Complex end momentum reached by the stationary trajectory at x."""
        p = self.params
        return self.p_r + 1j * self.width_coefficient * (p.c / p.b) * (np.asarray(x) - self.q_r)

    def position_moments(self):
        w = np.abs(self.psi) ** 2
        n = trapezoid(w, self.x)
        mean = trapezoid(self.x * w, self.x) / n
        var = trapezoid((self.x - mean) ** 2 * w, self.x) / n
        return float(mean), float(var)

    def momentum_moments(self):
        """Mean and variance of p from the discrete Fourier transform."""
        dx = self.x[1] - self.x[0]
        k = 2 * np.pi * np.fft.fftfreq(self.x.size, d=dx)
        w = np.abs(np.fft.fft(self.psi)) ** 2
        pk = self.params.hbar * k
        n = w.sum()
        mean = (pk * w).sum() / n
        var = ((pk - mean) ** 2 * w).sum() / n
        return float(mean), float(var)


def _amplitude(method, params, q0, p0, q_r, p_r, m, S, I, sqrt_a, sqrt_h, x):
    """Packet values; broadcasts over trajectories (rows) and x (columns)."""
    b, hbar = params.b, params.hbar
    dx = x - q_r
    phase = p_r * dx + 0.5 * p0 * q0 + S
    if method == "hk":
        pref = sqrt_h
        width = 1.0
    else:
        pref = 1.0 / sqrt_a
        width = (m.pp - 1j * m.pq) / (m.qq + 1j * m.qp)
        if method == "paper":
            phase = phase + I
    expo = -0.5 * width * (dx / b) ** 2 + 1j * phase / hbar
    return PI_M14 / math.sqrt(b) * pref * np.exp(expo), pref


def mixed_packet(model, method, zprime, t, x, traj=None, tol=1e-12):
    method = _method(method)
    kind = METHODS[method]
    start = _as_point(zprime, model.params)
    if traj is None:
        traj = integrate_real(model, kind, start, t, tol)
    elif traj.kind is not kind:
        raise ConfigError(f"{method} needs a {kind.value} trajectory")
    x = np.asarray(x, dtype=float)
    m = traj.tangent()
    psi, pref = _amplitude(method, model.params, start.q, start.p, traj.q[-1],
                           traj.p[-1], m, traj.action, traj.i_term, traj.sqrt_a(),
                           traj.sqrt_h(), x)
    return MixedPacket(method, x, psi, float(traj.q[-1]), float(traj.p[-1]),
                       complex(gamma_of(m)), complex(pref), traj.action,
                       traj.i_term if method == "paper" else 0.0, m, traj,
                       model.params)


def mixed_paper_ivr(model, zprime, t, x, traj=None, tol=1e-12):
    """Thawed Gaussian from the smoothed-symbol trajectory, with the I phase."""
    return mixed_packet(model, "paper", zprime, t, x, traj, tol)


def mixed_hk(model, zprime, t, x, traj=None, tol=1e-12):
    """Frozen-width Herman-Kluk packet on the Weyl trajectory."""
    return mixed_packet(model, "hk", zprime, t, x, traj, tol)


def mixed_heller(model, zprime, t, x, traj=None, tol=1e-12):
    """Heller's thawed Gaussian on the Weyl trajectory."""
    return mixed_packet(model, "heller", zprime, t, x, traj, tol)


def sampling_spread(m, method, hbar=1.0):
    """Phase-space area of initial conditions that contribute near x''."""
    method = _method(method)
    if m.qp == 0:
        return math.inf
    if method == "hk":
        return hbar / math.sqrt(abs(m.qp)) / math.sqrt(abs(m.pp + m.qq - 1j * m.qp + 1j * m.pq))
    return hbar / math.sqrt(2 * abs(m.qp)) * math.sqrt(abs(m.qq + 1j * m.qp))


def free_packet_exact(params, mass, zprime, t, x):
    """Exact free evolution of <x|z'>, the closed-form spreading Gaussian."""
    pt = _as_point(zprime, params)
    b, hbar = params.b, params.hbar
    x = np.asarray(x, dtype=float)
    tau = 1 + 1j * hbar * t / (mass * b * b)
    arg = (-(x - pt.q - pt.p * t / mass) ** 2 / (2 * b * b * tau)
           + 1j * (pt.p * x - 0.5 * pt.p * pt.q - pt.p ** 2 * t / (2 * mass)) / hbar)
    return PI_M14 / math.sqrt(b) / np.sqrt(tau) * np.exp(arg)


# -- superpositions over phase space -----------------------------------------

def _superpose(method, params, ens, coef, weight, x, chunk=512):
    out = np.zeros(x.size, dtype=complex)
    m = ens.tangent()
    sa, sh = ens.sqrt_a(), ens.sqrt_h()
    for s in range(0, coef.size, chunk):
        sl = slice(s, s + chunk)
        mm = TangentMatrix(m.qq[sl, None], m.qp[sl, None], m.pq[sl, None], m.pp[sl, None])
        amp, _ = _amplitude(method, params, ens.q0[sl, None], ens.p0[sl, None],
                            ens.q[sl, None], ens.p[sl, None], mm, ens.S_H[sl, None],
                            ens.I[sl, None], sa[sl, None], sh[sl, None], x[None, :])
        out += (weight[sl] * coef[sl]) @ amp
    return out


def _trap_weights(n, h):
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _state_extent(psi0, x, params):
    w = np.abs(psi0) ** 2
    n = trapezoid(w, x)
    qm = trapezoid(x * w, x) / n
    vq = trapezoid((x - qm) ** 2 * w, x) / n
    dpsi = np.gradient(psi0, x)
    pm = float(np.real(trapezoid(np.conj(psi0) * (-1j * params.hbar) * dpsi, x) / n))
    vp = float(np.real(trapezoid(params.hbar ** 2 * np.abs(dpsi) ** 2, x) / n)) - pm ** 2
    sq = math.sqrt(max(vq, 0) + params.b ** 2 / 2)
    sp = math.sqrt(max(vp, 0) + params.c ** 2 / 2)
    return (qm - 6 * sq, qm + 6 * sq), (pm - 6 * sp, pm + 6 * sp)


def propagate_state(model, psi0, x, t, method="paper", grid=None, tol=1e-4,
                    check=True, ode_tol=1e-11):
    """psi(x, t) = int dq'dp'/(2 pi hbar) <x|K(t)|z'> <z'|psi0>.

    grid: dict with optional keys 'q' and 'p', each (lo, hi, n).  Missing
    ranges default to 6 sigma of the Husimi density of psi0 and n = 41.
    With ``check`` the result is compared against the grid refined to
    2n - 1 points per axis; GridTooCoarse is raised above ``tol`` (relative L2).
    """
    method = _method(method)
    params = model.params
    x = np.asarray(x, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)
    grid = dict(grid or {})
    qr, pr = _state_extent(psi0, x, params)
    ql, qh, nq = grid.get("q", (qr[0], qr[1], 41))
    pl, ph, npp = grid.get("p", (pr[0], pr[1], 41))
    if check:
        nq, npp = 2 * nq - 1, 2 * npp - 1
    qs = np.linspace(ql, qh, nq)
    ps = np.linspace(pl, ph, npp)
    Q, Pm = np.meshgrid(qs, ps, indexing="ij")
    coef = bargmann_grid(psi0, qs, ps, params, x=x)
    ens = integrate_ensemble(model, METHODS[method], Q.ravel(), Pm.ravel(), t, ode_tol)
    wq = _trap_weights(nq, qs[1] - qs[0])
    wp = _trap_weights(npp, ps[1] - ps[0])
    W = np.outer(wq, wp).ravel() / (2 * np.pi * params.hbar)
    fine = _superpose(method, params, ens, coef.ravel(), W, x)
    if not check:
        return fine
    sub = np.zeros((nq, npp), dtype=bool)
    sub[::2, ::2] = True
    sel = sub.ravel()
    Wc = np.outer(_trap_weights((nq + 1) // 2, 2 * (qs[1] - qs[0])),
                  _trap_weights((npp + 1) // 2, 2 * (ps[1] - ps[0]))).ravel()
    Wc = Wc / (2 * np.pi * params.hbar)
    ens_c = EnsembleEnd(*(a[..., sel] if a.ndim == 2 else a[sel] for a in
                          (ens.q0, ens.p0, ens.q, ens.p, ens.m, ens.S_H, ens.I,
                           ens.half_arg_a, ens.half_arg_h)))
    coarse = _superpose(method, params, ens_c, coef.ravel()[sel], Wc, x)
    nrm = math.sqrt(trapezoid(np.abs(fine) ** 2, x))
    diff = math.sqrt(trapezoid(np.abs(fine - coarse) ** 2, x))
    if diff > tol * max(nrm, 1e-300):
        raise GridTooCoarse(f"phase-space grid not converged: relative change {diff / nrm:.2e}")
    return fine


# -- coordinate-space propagator ----------------------------------------------

def _maslov(traj):
    mqp = traj.m[1, 1:]
    s = np.sign(mqp)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def coordinate_propagator(model, xprime, xdoubleprime, t, method="paper", mode="spa",
                          p_guess=None, n=64, tol=1e-3, check=True, ode_tol=1e-11):
    """<x''|K(t)|x'> either by stationary phase or by phase-space quadrature.

    The stationary-phase form is exp(i S/hbar)/(b sqrt(2 pi i m_qp)) with
    S = S_H (Weyl) or S_H + I (smoothed), continued through focal points.
    mode='brute' integrates the mixed propagator against <z'|x'> directly.
    """
    method = _method(method)
    kind = METHODS[method]
    params = model.params
    b, c, hbar = params.b, params.c, params.hbar
    p0, traj = shoot_momentum(model, kind, xprime, xdoubleprime, t, p_guess=p_guess,
                              tol=1e-12)
    m = traj.tangent()
    if mode == "spa":
        if abs(m.qp) < 1e-12:
            warnings.warn("m_qp vanishes: focal point", CausticWarning)
            return complex(np.inf, np.inf)
        nu = _maslov(traj)
        S = traj.action + (traj.i_term if method == "paper" else 0.0)
        pref = np.exp(-1j * np.pi / 4 - 1j * np.pi * nu / 2) / (b * math.sqrt(2 * np.pi * abs(m.qp)))
        return complex(pref * np.exp(1j * S / hbar))
    if mode != "brute":
        raise ConfigError(f"unknown mode {mode!r}")
    width = math.sqrt(m.qq ** 2 + m.qp ** 2) if method != "hk" else 1.0
    wp = 8 * c * (abs(m.qq) + width) / max(abs(m.qp), 1e-12)
    nn = 2 * n - 1 if check else n
    qs = np.linspace(xprime - WINDOW * b, xprime + WINDOW * b, nn)
    ps = np.linspace(p0 - wp, p0 + wp, nn)
    Q, Pm = np.meshgrid(qs, ps, indexing="ij")
    ens = integrate_ensemble(model, kind, Q.ravel(), Pm.ravel(), t, ode_tol)
    amp, _ = _amplitude(method, params, ens.q0, ens.p0, ens.q, ens.p, ens.tangent(),
                        ens.S_H, ens.I, ens.sqrt_a(), ens.sqrt_h(), xdoubleprime)
    bra = np.conj(wavefunction((0.0, 0.0), params, xprime - ens.q0)
                  * np.exp(1j * ens.p0 * (xprime - 0.5 * ens.q0) / hbar))
    f = (amp * bra).reshape(nn, nn)
    hq, hp = qs[1] - qs[0], ps[1] - ps[0]
    full = np.einsum("i,ij,j->", _trap_weights(nn, hq), f, _trap_weights(nn, hp))
    full /= 2 * np.pi * hbar
    if check:
        sub = f[::2, ::2]
        coarse = np.einsum("i,ij,j->", _trap_weights(n, 2 * hq), sub,
                           _trap_weights(n, 2 * hp)) / (2 * np.pi * hbar)
        if abs(full - coarse) > tol * abs(full):
            raise GridTooCoarse(f"phase-space quadrature not converged "
                                f"({abs(full - coarse) / abs(full):.2e})")
    return complex(full)

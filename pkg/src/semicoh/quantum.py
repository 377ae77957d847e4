"""Exact reference: diagonalization in the sine basis of a box [-L, L].

phi_n(x) = L^{-1/2} sin(n pi x / 2L + n pi / 2),  n = 1..N, with kinetic
energies hbar^2 (n pi / 2L)^2 / 2m.  The largest of them, E_max, fixes L
through V(+-L) = E_max so the box walls sit where the potential already
exceeds every represented energy.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.special import roots_legendre as leggauss
from scipy.integrate import simpson
from scipy.optimize import brentq

from .coherent import bargmann_grid
from .errors import LeakageWarning, NotConfining, QuadratureFailure
from .hamiltonian import SymbolKind

__all__ = ["SpectralBasis", "EigenSolution", "build_basis", "diagonalize",
           "evolve_exact", "expand", "eigenfunction", "husimi_exact",
           "write_eigenvalues"]


@dataclass(frozen=True)
class SpectralBasis:
    L: float
    N: int
    hbar: float
    mass: float = 1.0

    @property
    def E_max(self):
        return self.kinetic(self.N)

    def kinetic(self, n):
        return self.hbar ** 2 * (np.asarray(n) * np.pi / (2 * self.L)) ** 2 / (2 * self.mass)

    def functions(self, x, n=None):
        """Basis values, shape (len(x), N); zero outside the box."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        n = np.arange(1, self.N + 1) if n is None else np.atleast_1d(n)
        th = np.pi * (x[:, None] + self.L) / (2 * self.L)
        out = np.sin(n[None, :] * th) / math.sqrt(self.L)
        out[(x < -self.L) | (x > self.L)] = 0.0
        return out


def _wall(model):
    def V(x):
        with np.errstate(over="ignore"):
            return float(np.real(model.rest_energy(SymbolKind.WEYL, x)))
    return lambda L: min(V(L), V(-L))


def _solve_L(g, L_max):
    L = 1e-3
    while g(L) <= 0:
        L *= 1.5
        if L > L_max:
            raise NotConfining(f"potential does not confine below |x| = {L_max}")
    return brentq(g, L / 1.5, L, xtol=1e-14, rtol=1e-15)


def build_basis(model, E_max=None, N=None, L=None, L_max=1e3):
    """Choose the box and basis size from any two of (E_max, N, L)."""
    hbar, m = model.params.hbar, model.mass
    wall = _wall(model)
    if L is not None and N is not None:
        basis = SpectralBasis(float(L), int(N), hbar, m)
    elif N is not None:
        def g(Lv):
            return wall(Lv) - (N * np.pi * hbar) ** 2 / (8 * m * Lv * Lv)
        basis = SpectralBasis(_solve_L(g, L_max), int(N), hbar, m)
    elif E_max is not None:
        if L is None:
            # walls exactly at the classical turning points of E_max
            L = _solve_L(lambda Lv: wall(Lv) - E_max, L_max)
        n = int(math.floor(math.sqrt(8 * m * L * L * E_max) / (np.pi * hbar) + 1e-9))
        basis = SpectralBasis(float(L), max(n, 1), hbar, m)
    else:
        raise ValueError("give two of E_max, N, L (or N alone)")
    if wall(basis.L) < basis.E_max * (1 - 1e-9):
        raise NotConfining(f"V(+-L) = {wall(basis.L):.6g} is below E_max = {basis.E_max:.6g}")
    return basis


@dataclass
class EigenSolution:
    basis: SpectralBasis
    energies: np.ndarray
    vectors: np.ndarray      # columns are eigenvectors in the sine basis
    trusted: int
    residuals: np.ndarray
    model: object


def _cos_moments(model, basis, nodes):
    """C_k = int V(x) cos(k pi (x + L)/2L) dx for k = 0..2N."""
    y, w = leggauss(nodes)
    L = basis.L
    x = L * y
    V = np.real(model.rest_energy(SymbolKind.WEYL, x))
    k = np.arange(2 * basis.N + 1)
    return np.cos(np.outer(k, np.pi * (x + L) / (2 * L))) @ (w * V) * L


def hamiltonian_matrix(model, basis, nodes=None):
    N = basis.N
    nodes = nodes or 4 * N + 64
    C = _cos_moments(model, basis, nodes)
    C2 = _cos_moments(model, basis, 2 * nodes)
    if np.max(np.abs(C - C2)) > 1e-9 * max(np.max(np.abs(C2)), 1e-300):
        raise QuadratureFailure("potential matrix elements not converged")
    n = np.arange(1, N + 1)
    Vm = (C2[np.abs(n[:, None] - n[None, :])] - C2[n[:, None] + n[None, :]]) / (2 * basis.L)
    return Vm + np.diag(basis.kinetic(n))


def _solve(model, basis):
    H = hamiltonian_matrix(model, basis)
    E, U = np.linalg.eigh(H)
    res = np.linalg.norm(H @ U - U * E, axis=0)
    return E, U, res


def diagonalize(model, basis, trust_check=True):
    E, U, res = _solve(model, basis)
    trusted = basis.N
    if trust_check:
        big = SpectralBasis(basis.L, int(math.ceil(1.25 * basis.N)), basis.hbar, basis.mass)
        E2 = np.linalg.eigvalsh(hamiltonian_matrix(model, big))[:basis.N]
        rel = np.abs(E - E2) / np.maximum(np.abs(E), 1e-300)
        bad = np.nonzero(rel >= 1e-5)[0]
        trusted = int(bad[0]) if bad.size else basis.N
    return EigenSolution(basis, E, U, trusted, res, model)


def eigenfunction(solution, n, x):
    return solution.basis.functions(x) @ solution.vectors[:, n]


def _project(solution, psi0, x):
    basis = solution.basis
    if callable(psi0):
        y, w = leggauss(4 * basis.N + 64)
        xs = basis.L * y
        vals = np.asarray(psi0(xs), dtype=complex)
        c = basis.functions(xs).T @ (w * basis.L * vals)
        norm2 = float(np.sum(w * basis.L * np.abs(vals) ** 2))
    else:
        x = np.asarray(x, dtype=float)
        vals = np.asarray(psi0, dtype=complex)
        c = simpson(basis.functions(x) * vals[:, None], x=x, axis=0)
        norm2 = float(simpson(np.abs(vals) ** 2, x=x))
    return c, norm2


def expand(solution, psi0, x=None):
    """Eigenbasis coefficients of psi0 (callable, or samples on x)."""
    c, norm2 = _project(solution, psi0, x)
    captured = float(np.sum(np.abs(c) ** 2))
    if captured < (1 - 1e-8) * norm2:
        warnings.warn(f"basis captures {captured / norm2:.10f} of the norm",
                      LeakageWarning, stacklevel=2)
    return solution.vectors.T @ c


def evolve_exact(solution, psi0, t, x, coeffs=None):
    """psi(x, t) by phase-advancing eigencomponents."""
    a = expand(solution, psi0, x) if coeffs is None else coeffs
    a_t = a * np.exp(-1j * solution.energies * t / solution.basis.hbar)
    return solution.basis.functions(x) @ (solution.vectors @ a_t)


def husimi_exact(solution, m, q, p, params):
    """|<z|Psi_m>|^2 on the tensor grid q x p."""
    def psi(x):
        return eigenfunction(solution, m, x)
    return np.abs(bargmann_grid(psi, q, p, params)) ** 2


def write_eigenvalues(solution, path):
    with open(path, "w") as fh:
        fh.write("n,E_n,trusted\n")
        for n, E in enumerate(solution.energies):
            fh.write(f"{n},{E:.17g},{int(n < solution.trusted)}\n")

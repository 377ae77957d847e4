import cmath
import math

import numpy as np
import pytest
from scipy.integrate import simpson

from semicoh.coherent import CoherentParams, ComplexLabel, PhasePoint, wavefunction
from semicoh.errors import LeakageWarning, NotConfining
from semicoh.hamiltonian import harmonic_model, polynomial_model
from semicoh.quantum import (SpectralBasis, build_basis, diagonalize, eigenfunction,
                             evolve_exact, expand, husimi_exact, write_eigenvalues)


@pytest.fixture(scope="module")
def ho():
    model = harmonic_model(1.0, CoherentParams.natural(1.0, 1.0))
    return model, diagonalize(model, build_basis(model, N=120))


def test_barrier_basis(barrier, barrier_solution):
    basis = barrier_solution.basis
    assert abs(basis.L - 7.24176) < 1e-5
    assert abs(basis.E_max - 9.4098) < 1e-4
    big = diagonalize(barrier, build_basis(barrier, N=500))
    rel = np.abs(barrier_solution.energies - big.energies[:400]) / big.energies[:400]
    assert np.all(rel[:260] < 1e-8)
    assert barrier_solution.trusted >= 260


def test_basis_choices(barrier):
    model = harmonic_model(1.0, CoherentParams.natural(1.0, 1.0))
    basis = build_basis(model, E_max=20)
    assert abs(basis.L - math.sqrt(40)) < 1e-12
    assert basis.N == 25
    one = build_basis(barrier, N=1)
    assert one.N == 1 and abs(one.E_max - barrier.potential("weyl", one.L)) < 1e-9


def test_basis_orthonormal_on_sample():
    basis = SpectralBasis(3.0, 40, 0.1)
    x = np.linspace(-3, 3, 20001)
    phi = basis.functions(x)
    assert np.max(np.abs(phi[[0, -1]])) < 1e-14
    assert np.max(np.abs(simpson(phi[:, :, None] * phi[:, None, :], x=x, axis=0) - np.eye(40))) < 1e-12


def test_particle_in_a_box():
    flat = polynomial_model([0.0], CoherentParams.from_b(1.0, 1.0))
    # a hand-built box: the potential vanishes inside
    sol = diagonalize(flat, SpectralBasis(2.0, 10, 1.0), trust_check=False)
    n = np.arange(1, 11)
    assert np.allclose(sol.energies, (n * math.pi / 4) ** 2 / 2, rtol=1e-12)
    with pytest.raises(NotConfining):
        build_basis(flat, N=10)


def test_oscillator_levels_and_vectors(ho):
    _, sol = ho
    assert np.max(np.abs(sol.energies[:30] - (np.arange(30) + 0.5))) < 1e-6
    U = sol.vectors
    assert np.max(np.abs(U.T @ U - np.eye(U.shape[1]))) < 1e-12
    assert np.max(sol.residuals) < 1e-10
    x = np.linspace(-8, 8, 4001)
    phi0 = eigenfunction(sol, 0, x)
    assert abs(abs(simpson(phi0 * np.pi ** -0.25 * np.exp(-x * x / 2), x=x)) - 1) < 1e-8


def test_oscillator_coherent_evolution(ho):
    model, sol = ho
    par = model.params
    z = 1.2 - 0.5j
    x = np.linspace(-9, 9, 2001)
    psi0 = lambda s: wavefunction(ComplexLabel(z), par, s)
    a = expand(sol, psi0)
    assert abs(np.sum(np.abs(a) ** 2) - 1) < 1e-10
    for t in (0.7, 3.0):
        out = evolve_exact(sol, psi0, t, x, coeffs=a)
        ref = cmath.exp(-0.5j * t) * wavefunction(ComplexLabel(z * cmath.exp(-1j * t)), par, x)
        assert np.max(np.abs(out - ref)) < 1e-8
        assert abs(simpson(np.abs(out) ** 2, x=x) - 1) < 1e-8
        E = np.sum(np.abs(a * np.exp(-1j * sol.energies * t)) ** 2 * sol.energies)
        assert abs(E - (abs(z) ** 2 + 0.5)) < 1e-8


def test_sampled_expansion_matches_callable(ho):
    model, sol = ho
    x = np.linspace(-10, 10, 4001)
    f = lambda s: wavefunction(PhasePoint(0.5, 0.3), model.params, s)
    assert np.max(np.abs(expand(sol, f) - expand(sol, f(x), x))) < 1e-8


def test_leakage_warning(ho):
    model, sol = ho
    far = lambda s: wavefunction(PhasePoint(sol.basis.L, 0.0), model.params, s)
    with pytest.warns(LeakageWarning):
        expand(sol, far)


def test_oscillator_husimi(ho):
    model, sol = ho
    q = np.linspace(-2, 2, 5)
    p = np.linspace(-1.5, 1.5, 4)
    for m in (0, 3):
        rho = husimi_exact(sol, m, q, p, model.params)
        z2 = (q[:, None] ** 2 + p[None, :] ** 2) / 2
        assert np.max(np.abs(rho - np.exp(-z2) * z2 ** m / math.factorial(m))) < 1e-8


def test_barrier_ground_husimi_normalized(barrier, barrier_solution, fig_params):
    q = np.linspace(-3, 3, 121)
    p = np.linspace(-1.5, 1.5, 121)
    rho = husimi_exact(barrier_solution, 0, q, p, fig_params)
    total = simpson(simpson(rho, x=p, axis=1), x=q) / (2 * math.pi * fig_params.hbar)
    assert abs(total - 1) < 1e-4


def test_write_eigenvalues(tmp_path, barrier_solution):
    path = tmp_path / "eig.csv"
    write_eigenvalues(barrier_solution, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,E_n,trusted"
    assert len(lines) == 401
    n, E, tr = lines[1].split(",")
    assert float(E) == barrier_solution.energies[0] and tr == "1"

# %% [markdown]
# Semiclassical Husimi densities of quartic-well levels compared with the
# exact ones, |<z|Psi_m>|^2 from the sine-basis eigenvectors.

# %%
import math

import numpy as np

from semicoh.coherent import CoherentParams
from semicoh.hamiltonian import polynomial_model
from semicoh.quantum import build_basis, diagonalize, husimi_exact
from semicoh.spectral import husimi_semiclassical, quantize

hbar = 0.1
params = CoherentParams.from_b(math.sqrt(hbar), hbar)
model = polynomial_model([0, 0, 0.5, 0, 0.25], params)
sol = diagonalize(model, build_basis(model, E_max=40))
q = np.linspace(-3, 3, 120)
p = np.linspace(-3, 3, 120)

for rule in ("smoothed", "weyl"):
    for lv in quantize(model, rule, range(0, 7, 2)):
        sc = husimi_semiclassical(model, rule, lv, q, p).rho
        ex = husimi_exact(sol, lv.m, q, p, params)
        ov = np.sum(sc * ex) / math.sqrt(np.sum(sc * sc) * np.sum(ex * ex))
        print(f"{rule:>9} m={lv.m}  E={lv.energy:.6f}  exact={sol.energies[lv.m]:.6f}  overlap={ov:.4f}")

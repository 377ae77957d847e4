# %% [markdown]
# Three quantization rules on the anharmonic well q^2/2 + q^4/4, with the
# widths b = c = sqrt(hbar), against exact diagonalization.

# %%
import math

import numpy as np

from semicoh.classical import loglog_slope
from semicoh.coherent import CoherentParams
from semicoh.hamiltonian import polynomial_model
from semicoh.quantum import build_basis, diagonalize
from semicoh.spectral import QuantizationRule, quantize

rules = list(QuantizationRule)
hbars = [0.2, 0.1, 0.05]
sep = {}
for h in hbars:
    model = polynomial_model([0, 0, 0.5, 0, 0.25], CoherentParams.from_b(math.sqrt(h), h))
    E = {r: np.array([lv.energy for lv in quantize(model, r, range(11))]) for r in rules}
    exact = diagonalize(model, build_basis(model, E_max=3 * E[rules[2]][-1] + 5)).energies[:11]
    print(f"hbar = {h}")
    print("  m " + "".join(f"{r.value:>14}" for r in rules) + f"{'exact':>14}")
    for m in range(0, 11, 2):
        print(f"{m:3d} " + "".join(f"{E[r][m]:14.8f}" for r in rules) + f"{exact[m]:14.8f}")
    for i, a in enumerate(rules):
        for b in rules[i + 1:]:
            sep.setdefault((a.value, b.value), []).append(np.max(np.abs(E[a] - E[b])))

# %%
for (a, b), v in sep.items():
    print(f"{a:>12} - {b:<12} slope {loglog_slope(hbars, v):.2f}")

# %% [markdown]
# Both corrected rules sit O(hbar^2) away from WKB.  Their hbar^2 terms agree, so
# the smoothed and antismoothed levels differ only at the next order.

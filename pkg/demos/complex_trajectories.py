# %% [markdown]
# Coherent-state propagator from complex trajectories in the exponential well.
# The boundary problem is solved by Newton shooting on v(0).

# %%
import numpy as np

from semicoh.coherent import CoherentParams, overlap
from semicoh.complextraj import propagator, propagator_from, solve_boundary
from semicoh.hamiltonian import barrier_model

params = CoherentParams.from_b(0.3, 0.05)
model = barrier_model(1.0, 1.0, 5.0, 1.0, params)
z1, z2 = 0.2 + 2.0j, 0.6 + 1.5j

for t in (0.5, 1.0, 1.5, 2.0):
    tr = solve_boundary(model, "smoothed", z1, z2, t)
    K = propagator_from(tr)
    rev = propagator(model, "smoothed", np.conj(z2), np.conj(z1), t)
    print(f"t={t}: K={K:.6f}  |K|={abs(K):.4f}  Newton steps {tr.iterations}"
          f"  residual {tr.residual:.1e}  reversed-pair difference {abs(K - rev):.1e}")

print("t=0 overlap", overlap(z2, z1))

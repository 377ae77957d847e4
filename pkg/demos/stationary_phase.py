# %% [markdown]
# First correction to the stationary-phase value of int exp(i(x^2 + x^4)/hbar) dx.
# The reference comes from quadrature along a ray rotated by pi/8.

# %%
import math

from semicoh.asymptotics import error_slopes, spa_integrate

f = lambda x: x * x + x ** 4
g = lambda x: 1.0 + 0 * x
hbars = [0.2, 0.1, 0.05, 0.025, 0.0125]
s0, s1, e0, e1 = error_slopes(hbars, f, g, [0, 0, 2, 0, 24], [1, 0, 0], math.pi / 8)
print("R =", spa_integrate([0, 0, 2, 0, 24], [1, 0, 0], 0.1).R)
for h, a, b in zip(hbars, e0, e1):
    print(f"hbar={h:<7} leading {a:.3e}  corrected {b:.3e}")
print(f"slopes {s0:.3f} and {s1:.3f}")

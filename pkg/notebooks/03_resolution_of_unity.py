# %% [markdown]
# # Resolution of unity by Monte Carlo
#
# Integrating `|<xi|z>|^2` over a spacelike surface of labels with the
# invariant measure gives a constant.  The estimator uses counter-based
# streams, so a fixed seed reproduces every digit.

# %%
import numpy as np

from pcs import massive as mv
from pcs import spinors as sp
from pcs.integrate import MCConfig

boosted = np.array([np.cosh(0.5), 0.0, 0.0, np.sinh(0.5)])

# %%
for r in (0, 2):
    rep = mv.MassiveRep(1.0, r, 0.3)
    for name, xi in (("rest", sp.REFERENCE_TIME), ("boosted", boosted)):
        est = mv.resolution_check(rep, mv.SurfaceLabel(), xi, MCConfig(seed=3, samples=400_000))
        print(f"r={r} {name:8s} ratio {est.value:.4f} +- {est.error:.4f}")

# %% [markdown]
# ## Convergence with sample count
# The stderr shrinks like `1/sqrt(n)`.

# %%
rep = mv.MassiveRep(1.0, 0, 0.3)
for n in (10_000, 100_000, 1_000_000):
    est = mv.resolution_check(rep, mv.SurfaceLabel(), sp.REFERENCE_TIME, MCConfig(seed=3, samples=n))
    print(f"n={n:>9,d}  ratio {est.value:.5f}  stderr {est.error:.1e}")

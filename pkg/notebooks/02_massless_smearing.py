# %% [markdown]
# # Massless states: smearing, coefficients and twistors

# %%
import numpy as np

from pcs import massless as ml
from pcs import numgeom as ng
from pcs.integrate import QuadratureSpec

# %% [markdown]
# ## Smearing profiles
# The Legendre profile reproduces polynomials up to its degree exactly,
# and both profiles are normalised.

# %%
rng = np.random.default_rng(1)
for N in (2, 8, 20):
    err = max(ml.reproduction_error(N, rng.uniform(-1, 1, N + 1)) for _ in range(5))
    print(f"N={N:2d}  reproduction error {err:.1e}")
for eps in (1e-3, 1e-2, 0.1):
    print(f"rational eps={eps:g}  normalisation errors", ml.normalisation_errors(ml.MasslessRep(eps=eps)))

# %% [markdown]
# ## Metric coefficients as the rational width shrinks
# `F` follows its logarithmic asymptote.  `c1` and `eps*c2` settle at
# constants of their own, and `c3` carries a log.

# %%
for eps in (1e-2, 1e-3, 1e-4):
    k = ml.massless_metric_coefficients(ml.MasslessRep(eps=eps))
    F_ratio = k.F / (eps / np.pi * np.log(2 / eps))
    print(f"eps={eps:.0e}  c1={k.c1:.4f}  eps*c2={eps * k.c2:.4f}  c3/eps={k.c3 / eps:.3f}  F ratio={F_ratio:.4f}")

# %% [markdown]
# ## Twistor data and energy
# Each label determines a twistor pair satisfying the constraint exactly.

# %%
rep = ml.MasslessRep(r=2, sigma=0.1, eps=0.08)
z = ml.random_label(rng, 0.3, 0.5)
print("twistor residual", ml.twistor_residual(rep, z))
print("constraint", ml.twistor_constraint(rep, z))
print("<n.xi> =", ml.energy_expectation(rep), " e^(s^2/4) =", rep.energy_factor)

# %% [markdown]
# ## Connection
# The numeric connection agrees with the exact form.  The leading form
# assumes a unit mean of the smearing variable and is off by a few percent.

# %%
quad = QuadratureSpec(40)
v = rng.normal(size=ml.TANGENT_DIM)
v /= np.linalg.norm(v)
num = ng.connection_numeric(rep, z, v, quad).value
print("numeric ", num)
print("exact   ", ml.connection_exact(rep, z, v))
print("leading ", ml.connection_analytic(rep, z, v))

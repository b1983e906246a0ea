# %% [markdown]
# # Contraction perturbations
#
# g(x) = s/(1-s) ||x||^2/2 + (1-s) f(x/(1-s)) has P_1 g = (1-s) P_1 f, so it is
# a contraction whose distance to f shrinks with s.

# %%
import numpy as np

from proxgeneric import AbsSum, ProbeSpec, choose_sigma, perturb, prox
from proxgeneric.contraction import realized_distance

f = AbsSum(1)
plan = perturb(f, 0.1)
print("P_1 g(3) =", prox(plan.g, [3.0]).y, "= 0.9 * P_1 f(3) =", 0.9 * prox(f, [3.0]).y)

# %% [markdown]
# Distance against s: it falls roughly linearly.

# %%
mesh = ProbeSpec("mesh", 1e-3)
for k in range(1, 11):
    est = realized_distance(f, 2.0 ** -k, 20, mesh)
    print(f"sigma = 2^-{k:<2d}  d in [{est.lower:.5f}, {est.upper:.5f}]")

# %% [markdown]
# Choosing s for a target distance: s = min(1/2, eps/(2M)).

# %%
for eps in (0.1, 0.01):
    p = choose_sigma(f, eps, 20, mesh)
    print(f"eps={eps}: M={p.m_bound:g}, sigma={p.sigma:.2e}, realized upper={p.realized.upper:.2e}")

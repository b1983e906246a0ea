# %% [markdown]
# # Proximal point dynamics
#
# Iterating P_1 f converges to a minimizer. When the minimizer is unique the
# convergence is uniform on balls; otherwise different starts stop at
# different minimizers.

# %%
import numpy as np

from proxgeneric import AbsSum, IndicatorBox, Quadratic, Zero, iterate, perturb, stability_probe
from proxgeneric import super_regularity_probe

print("x0 = 2.5 under soft thresholding:", iterate(AbsSum(1), [2.5]).points[:, 0])

# %%
for f in (Quadratic(np.eye(1), [-2.0]), AbsSum(1), Zero(1), IndicatorBox([-1.0], [2.0])):
    rep = super_regularity_probe(f, s=1.0)
    print(f"{f!r:45s} {rep.verdict:28s} spread={rep.spread:.2g} x_T={rep.x_T}")

# %% [markdown]
# Stability: iterates of a nearby contraction stay close to the original fixed point.

# %%
f = Quadratic(np.eye(1))
pr = stability_probe(f, perturb(f, 1e-3).g, s=2.0, eps=1e-2, max_iters=50)
print(f"n0 = {pr.n0}, worst error {pr.worst_error:.3g}, delta in [{pr.delta.lower:.4f}, {pr.delta.upper:.4f}]")

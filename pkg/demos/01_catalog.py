# %% [markdown]
# # Convex function catalog
#
# Functions are small immutable nodes. Each one evaluates itself, describes
# its subdifferential exactly and knows what its minimizers look like.

# %%
import numpy as np

from proxgeneric import AbsSum, IndicatorBox, Perturbed, Quadratic, Shifted, Zero, from_dict

x = np.array([3.0, -4.0])
print("Zero(x)      =", Zero(2)(x))
print("AbsSum(x)    =", AbsSum(2)(x))
print("Perturbed(Zero, 0.5) at ||x|| = 2:", Perturbed(Zero(2), 0.5)(np.array([2.0, 0.0])))

# %% [markdown]
# Subdifferentials are sets. At a kink of |x| it is an interval; on the face of
# a box it is a normal cone; outside the domain it is empty and says why.

# %%
print(AbsSum(1).subdifferential([0.0]))
print(IndicatorBox([-1.0], [1.0]).subdifferential([1.0]))
print(IndicatorBox([-1.0], [1.0]).subdifferential([2.0]))

# %% [markdown]
# Minimizer metadata, and the declarative form used by configs.

# %%
for f in (Zero(1), Quadratic(np.eye(1), [-2.0]), AbsSum(1)):
    info = f.minimizer_info()
    print(f"{f!r:45s} -> {info.kind:6s} {info.point}")

q = from_dict({"type": "quadratic", "Q": [[1, 0], [0, 2]], "b": [0, 0]})
print(q, "round-trips:", from_dict(q.to_dict()) == q)
print("constants are invisible to the class:", Shifted(q, 17.0).subdifferential([1.0, 1.0]))

# %% [markdown]
# # Operator characterizations under random falsification
#
# Proxes are firmly nonexpansive and satisfy the cycle inequality. The
# resolvent of a quarter-turn rotation is firmly nonexpansive too, but not
# cyclic, so the two checks really measure different things.

# %%
import numpy as np

from proxgeneric import AbsSum, Quadratic, Zero, prox_operator
from proxgeneric.checks import (check_cycle_inequality, check_firmly_nonexpansive,
                                check_resolvent_identity, graphical_convergence_probe,
                                rotation_resolvent)

T = prox_operator(AbsSum(2))
print(check_firmly_nonexpansive(T, 10_000).worst_margin, check_cycle_inequality(T, 6, 1000).worst_margin)

R = rotation_resolvent()
print("rotation firm margin:", check_firmly_nonexpansive(R, 10_000).worst_margin)
cyc = check_cycle_inequality(R, 6, 10_000)
print("rotation cycle margin:", cyc.worst_margin, "witness length", cyc.witness["length"])

# %% [markdown]
# Resolvent identity and graphical convergence.

# %%
for f in (Quadratic(np.eye(1)), Zero(1), AbsSum(1)):
    print(f, check_resolvent_identity(f, 2.0).worst_margin,
          graphical_convergence_probe(f).details["gaps"][-1])

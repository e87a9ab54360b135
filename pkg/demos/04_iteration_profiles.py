# %% [markdown]
# # How long does the reactor take to settle?
#
# For each initial exit state we count recycle passes until the trajectory
# comes within epsilon percent of the attractor.  Plotting that count N
# against the initial conversion gives an iteration-count profile.

# %%
import numpy as np

from recycle_reactor import Grid1D, ReactorParams, StoppingCriterion, profile_1d, tree_profile

base = ReactorParams()
alpha0 = Grid1D(0.0, 1.0, 201)

# %%
prof = profile_1d(base, alpha0, theta0=0.2, criterion=StoppingCriterion(0.001))
print("N ranges from", prof.counts.min(), "to", prof.counts.max())
print("fastest start: alpha0 =", alpha0.values[prof.counts.argmin()])

# %%
# A tree stacks one profile per recycle ratio.  The envelope peaks where the
# leading multiplier is closest to the unit circle.
f_grid = Grid1D(0.40, 0.45, 11)
tree = tree_profile(base, f_grid, Grid1D(0.0, 1.0, 21), theta0=0.2)
env = tree.counts.max(axis=0)
for f, k, n in zip(f_grid.values, tree.periods, env):
    print(f"f={f:.3f}  period {k}  max N {n}")
print(f"envelope peak at f = {f_grid.values[int(np.argmax(env))]:.3f}")

# %% [markdown]
# # Sweeping the recycle ratio
#
# Continuation along f: each cell starts from the orbit found in the
# previous one, so branches are followed cheaply.

# %%
import numpy as np

from recycle_reactor import Grid1D, ReactorParams, bifurcation_diagram, eigenvalue_curve

base = ReactorParams()
f_grid = Grid1D(0.30, 0.55, 51)

# %%
# With theta_H=-0.001 the attractor stays a fixed point; the leading
# multiplier approaches the unit circle near f=0.427 without crossing it.
curve = eigenvalue_curve(base, f_grid, k_expected=1)
i = int(np.nanargmax(curve.leading))
print(f"max |lambda| = {curve.leading[i]:.4f} at f = {f_grid.values[i]:.3f}")

# %%
# At theta_H=-0.002 a window of 2-periodic behaviour opens.
series = bifurcation_diagram(base.with_(theta_H=-0.002), f_grid)
for f, k, branch in zip(f_grid.values, series.periods, series.branches):
    print(f"f={f:.3f}  period {k}  alpha1 {np.round(branch, 4)}")

# %% [markdown]
# # Which period where?
#
# classify_grid runs a bifurcation sweep per heating temperature and records
# the attractor period of every (theta_H, f) cell.

# %%
import numpy as np

from recycle_reactor import Grid1D, classify_grid

theta_H = Grid1D(-0.012, -0.001, 6)
f = Grid1D(0.30, 0.55, 26)
cls = classify_grid(theta_H, f, seed=(0.5, 0.2))

# %%
print("theta_H \\ f", " ".join(f"{v:.2f}" for v in f.values[::5]))
for th, row in zip(theta_H.values, cls.periods):
    print(f"{th:+.4f}  ", "".join(str(k) if k < 10 else "*" for k in row))
print("periods present:", sorted(set(np.unique(cls.periods))))

# %% [markdown]
# # Locating period-doubling edges
#
# A flip bifurcation is where a multiplier passes through -1.  fb_window
# scans a bracket for the doubled period and bisects both edges.

# %%
from recycle_reactor import ReactorParams, detect_attractor, fb_window

base = ReactorParams()

# %%
left, right = fb_window(base.with_(theta_H=-0.002), 0.30, 0.55, k_from=1, tol=1e-4)
print(f"2-periodic window: {left:.4f} < f < {right:.4f}")

# %%
# Just inside the edges the new 2-cycle is born with a multiplier close to 1.
for f in (left + 1e-4, right - 1e-4):
    att = detect_attractor((0.5, 0.2), base.with_(theta_H=-0.002, f=f))
    print(f"f={f:.4f}: period {att.period}, leading |lambda| {att.moduli[0]:.4f}")

# %%
# A second doubling, 2 -> 4, for a colder heating medium.
left, right = fb_window(base.with_(theta_H=-0.012), 0.35, 0.46, k_from=2, tol=1e-4)
print(f"4-periodic window: {left:.4f} < f < {right:.4f}")

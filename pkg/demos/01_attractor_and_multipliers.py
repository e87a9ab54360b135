# %% [markdown]
# # One pass, one map, one attractor
#
# A single pass through the tubular reactor maps an inlet state to an exit
# state.  Recycling a fraction f of the product closes that into a map on
# exit states, and the stable periodic points of that map are what the
# reactor settles into.

# %%
import numpy as np

from recycle_reactor import (
    IntegratorConfig,
    ReactorParams,
    ReactorState,
    detect_attractor,
    integrate_pass,
    recycle_map,
)

params = ReactorParams()          # Da=0.15, n=1.5, gamma=15, beta=2, delta=3, theta_H=-0.001, f=0.427
print(params)

# %%
# A single pass from a cool, unconverted inlet.
res = integrate_pass(ReactorState(0.0, 0.0), params, IntegratorConfig(1000), with_monodromy=True)
print("exit state:", res.exit)
print("monodromy matrix:\n", res.monodromy)

# %%
# The recycle map: exit state in, next exit state out.  Its Jacobian is f times the monodromy.
x = (0.5, 0.2)
for _ in range(5):
    x, jac = recycle_map(x, params, with_monodromy=True)
    print(x)
print("map Jacobian:\n", jac)

# %%
# The base case settles on a fixed point.  Its leading multiplier is real,
# close to -1, so nearby trajectories approach it slowly while alternating sides.
att = detect_attractor((0.5, 0.2), params)
print("period", att.period, "stable", att.stable)
print("orbit", att.orbit)
print("multipliers", att.eigenvalues, "moduli", att.moduli)

# %%
# Lowering the heating temperature slightly gives a 2-periodic attractor.
for theta_H in (-0.001, -0.002):
    att = detect_attractor((0.5, 0.2), params.with_(theta_H=theta_H))
    print(f"theta_H={theta_H}: period {att.period}, |lambda| {np.round(att.moduli, 4)}")

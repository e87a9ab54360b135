# %% [markdown]
# # Iteration counts over the initial-state plane
#
# The 2-D profile covers both initial conversion and temperature.  It is
# written as a grayscale PGM with dark cells settling quickly.

# %%
import warnings

from recycle_reactor import Grid1D, ReactorParams, profile_2d
from recycle_reactor.errors import DegenerateRangeWarning
from recycle_reactor.output import emit_csv, emit_pgm, read_pgm

params = ReactorParams(theta_H=-0.012)
grid = profile_2d(params, Grid1D(0.0, 1.0, 48), Grid1D(0.0, 0.4, 32), workers=4)
print("counts shape (theta0 rows, alpha0 columns):", grid.counts.shape)

# %%
emit_csv(grid, "profile2d.csv")
emit_pgm(grid, "profile2d.pgm")
img = read_pgm("profile2d.pgm")
print("image", img.shape, "gray levels", img.min(), "-", img.max())

# %%
# A single-cell grid has no range to scale; it comes out mid-gray with a warning.
one = profile_2d(params, Grid1D(0.5, 0.5, 1), Grid1D(0.2, 0.2, 1))
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    emit_pgm(one, "single.pgm")
print([w.category.__name__ for w in caught], read_pgm("single.pgm"))

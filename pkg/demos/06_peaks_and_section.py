# %% [markdown]
# # Peaks in a narrow window
#
# Near alpha0 = 0.41 at theta_H = -0.012 the profile is crowded with peaks.
# Pairing the heights of consecutive peaks gives a peak Poincare section.

# %%
import numpy as np
from scipy.stats import spearmanr

from recycle_reactor import Grid1D, ReactorParams, detect_peaks, peak_poincare_section, profile_1d

params = ReactorParams(theta_H=-0.012)
window = Grid1D(0.40, 0.42, 500)
prof = profile_1d(params, window, theta0=0.2)

# %%
peaks = detect_peaks(prof)
print(len(peaks), "strict peaks")
print("locations:", np.round(window.values[peaks], 5))

# %%
pairs = np.array(peak_poincare_section(prof))
print(pairs[:10])
print("rank correlation of consecutive peak heights:", spearmanr(pairs[:, 0], pairs[:, 1]).statistic)

# %%
# A higher prominence threshold keeps only the dominant spikes.
print(len(detect_peaks(prof, prominence=50)), "peaks with prominence >= 50")

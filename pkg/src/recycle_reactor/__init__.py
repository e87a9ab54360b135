"""Tubular reactor with external recycle, treated as a discrete iteration map.

Finds fixed points and periodic orbits of the recycle map, their
multipliers, and iteration-count ("iterative time") profiles over initial
conditions and parameters.
"""
__version__ = "0.1.0"

from .reactor import (
    IntegratorConfig,
    PassResult,
    ReactorParams,
    ReactorState,
    integrate_pass,
    reaction_rate,
    rhs,
    rhs_jacobian,
)
from .itermap import (
    Attractor,
    ExitState,
    StoppingCriterion,
    convergence_distance,
    count_iterations,
    detect_attractor,
    eigenvalues_2x2,
    map_power_jacobian,
    recycle_map,
)
from .analysis import (
    BifurcationSeries,
    ClassGrid,
    EigenvalueCurve,
    Grid1D,
    NGrid,
    bifurcation_diagram,
    classify_grid,
    detect_peaks,
    eigenvalue_curve,
    fb_window,
    peak_poincare_section,
    profile_1d,
    profile_2d,
    tree_profile,
)

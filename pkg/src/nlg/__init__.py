"""Non-local threshold energies, rearrangement operators, and their limits.

The package computes, exactly on step functions and numerically on
Lipschitz functions, the family of non-local energies whose integrand is
the singular kernel delta^p/|y-x|^(d+p) restricted to pairs of points
where the function values differ by more than delta.  It ships the
operator toolbox (vertical segmentation, truncation, monotone
rearrangement, hostility functionals with their gap formulas), the limit
constants, d-dimensional estimators by line sectioning and Monte Carlo,
and brute-force / quadrature oracles against which every closed form is
tested.
"""

from .core import (DiscreteArrangement, EnemyList, HostilityWeights, Interval,
                   FULL_LINE, PiecewiseAffine1D, SchemaError, StepFunction1D,
                   TailMode, validate_and_build)
from .functional1d import (EnergyParams, affine_interpolation_energy,
                           energy_quadrature, integrate_pointwise_hostility,
                           interaction_pairs, local_energy, pair_cell_energy,
                           pair_cell_quadrature, pointwise_hostility,
                           step_cells, step_energy)
from .rearrange import (brute_force_min_hostility, clamp_values, hostility_gap,
                        left_right_gap, monotone_rearrangement,
                        monotone_rearrangement_step, multiset_permutations,
                        reduce_arrangement, step_hostility, total_hostility,
                        vertical_segmentation)
from .constants import (LimitConstant, Provenance, gamma_limit_constant,
                        spherical_moment, spherical_moment_quadrature,
                        staircase_constant)
from .multidim import (AffineRamp, Box, Direction, RadialTent, TensorTent,
                       energy_by_montecarlo, energy_by_sectioning,
                       local_energy_by_sectioning, local_energy_field, section)

__version__ = "0.1.0"

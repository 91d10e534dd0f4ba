"""Canonical partition functions of quantum gases on a torus.

The series evaluator lives in :mod:`torusgas.series`; independent
verification computations in :mod:`torusgas.oracles`; the HTTP surface in
:mod:`torusgas.service` with :mod:`torusgas.cli` as its batch client.
"""

from .cycles import CycleStructure, enumerate_compositions, enumerate_cycle_types, \
    statistics_sign, unity_check
from .errors import (ConfigurationError, ConsistencyError, DomainError, RangeError,
                     TorusGasError)
from .graphs import (AlphaConfig, CouplingGraph, build_coupling_graph, constraint_rank,
                     is_valid_merger, nonzero_integer_solution, nullspace_basis)
from .oracles import (DiscretePolicy, discrete_G2, e_hat_m, exact_Q2, ideal_gas_Q,
                      matrix_A_check)
from .potential import (DualPotential, GaussianPotential, TabulatedPotential,
                        ZeroPotential, dual_l1_bound, load_potential_table)
from .series import EvaluationResult, TruncationPolicy, evaluate_G, evaluate_Q, \
    mean_field_Q
from .shifts import (CoefficientCase, CycleMoments, Event, EventSet, ShiftProfile,
                     coefficient_difference, cycle_boltzmann_factor,
                     cycle_moments_closed, cycle_moments_direct, shift_at, z_l1)
from .thermal import (SystemParams, Statistics, theta_sum, theta_truncation_radius,
                      thermal_wavelength)

__version__ = "0.1.0"

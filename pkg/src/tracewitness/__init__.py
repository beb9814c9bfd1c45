"""Matrix means on positive definite matrices and counterexamples to trace
inequalities for non-tracial positive functionals ``phi(X) = Tr(S X)``."""

from .errors import (
    ConditionError,
    ConvergenceError,
    InputError,
    NumericalError,
    ScalarFunctional,
    TraceWitnessError,
)
from .functionals import TraceFunctional, classify_traciality, commutator_defect, rank_one_spread
from .harness import SamplerConfig, SuiteReport, run_suite, slope_estimate
from .means import (
    MeanKind,
    arithmetic_mean,
    bures_cross,
    fidelity,
    fidelity_amplitude,
    mean,
    metric_geomean,
    riccati_solution,
    spectral_geomean,
)
from .samplers import random_density, random_pd, random_unit_vector, random_unitary
from .witnesses import (
    InequalityKind,
    WitnessReport,
    amean_witness,
    bures_witness,
    evaluate,
    quad_square_witness,
    replay,
    run_witness,
    sgm_cs_witness,
    sgm_square_family,
    sgm_square_witness,
)

__version__ = "0.1.0"

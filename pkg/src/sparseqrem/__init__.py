"""Readout error mitigation for sparse measurement distributions."""
from .baselines import mooney_mitigate, rigorous_mitigate
from .distributions import SparseDistribution, element_sum, from_counts
from .errors import QremError
from .mitigator import (
    MitigationReport,
    ReducedInverse,
    apply_inverse_matrix_free,
    error_bound,
    extend_subspace,
    mitigate,
    mitigation_overhead,
    reduced_inverse,
)
from .noise_model import LocalCalibration, TensorNoiseModel, full_matrix, svd_cache, synth_uniform
from .simplex import sgs_project
from .sum_correction import delta_approx, delta_exact, least_norm

__version__ = "0.1.0"

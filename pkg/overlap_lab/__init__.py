"""
Overlap Laboratory

Eigenvector overlaps of complex Ginibre, spherical and truncated unitary
random matrices: sampling, exact conditional expectations and Monte Carlo
verification.
"""

from .errors import (
    OverlapLabError,
    ParameterError,
    EmptyInputError,
    NonPositiveArgument,
    ConfigError,
    NumericalError,
    NonConvergence,
    DegenerateSpectrum,
    SingularMatrix,
    NotPositiveDefinite,
    PoleSingularity,
    exit_code_for,
)
from .linalg import Spectrum, SchurForm, schur, eigenvalues
from .sampling import (
    RngStream,
    EnsembleKind,
    EnsembleSpec,
    sample_matrix,
    conditional_schur,
    conditional_schur_batch,
    decompose_ov11_sample,
)
from .analysis import (
    OverlapMatrix,
    overlap_matrix,
    overlap_pair_recurrence,
    quenched_ov11,
    quenched_ov12,
    quenched_trace,
    inv_gamma2_cdf,
    MomentAccumulator,
    ks_one_sample,
    ks_two_sample,
    ReplicaRunner,
)
from .experiments import ExperimentConfig, ExperimentReport, Experiment, run_experiment

__version__ = '1.0.0'

__all__ = [
    # Errors
    'OverlapLabError',
    'ParameterError',
    'EmptyInputError',
    'NonPositiveArgument',
    'ConfigError',
    'NumericalError',
    'NonConvergence',
    'DegenerateSpectrum',
    'SingularMatrix',
    'NotPositiveDefinite',
    'PoleSingularity',
    'exit_code_for',
    # Linear algebra
    'Spectrum',
    'SchurForm',
    'schur',
    'eigenvalues',
    # Sampling
    'RngStream',
    'EnsembleKind',
    'EnsembleSpec',
    'sample_matrix',
    'conditional_schur',
    'conditional_schur_batch',
    'decompose_ov11_sample',
    # Analysis
    'OverlapMatrix',
    'overlap_matrix',
    'overlap_pair_recurrence',
    'quenched_ov11',
    'quenched_ov12',
    'quenched_trace',
    'inv_gamma2_cdf',
    'MomentAccumulator',
    'ks_one_sample',
    'ks_two_sample',
    'ReplicaRunner',
    # Experiments
    'ExperimentConfig',
    'ExperimentReport',
    'Experiment',
    'run_experiment',
]

"""
Overlap computations, closed-form expectations, statistics and the replica harness.
"""

from .overlaps import (
    OverlapMatrix,
    RecurrenceState,
    overlap_matrix,
    run_recurrence,
    overlap_pair_recurrence,
    mixed_trace,
    mixed_trace_residuals,
    match_spectra,
)
from .formulas import (
    QuantityKind,
    QuenchedResult,
    RadiusBand,
    quenched_ov11,
    quenched_ov11_all,
    quenched_ov12,
    quenched_trace,
    evaluate_quenched,
    inv_gamma2_cdf,
    inv_gamma2_pdf,
    inv_gamma2_quantile,
    inv_gamma2_median,
    origin_factor_mean,
    origin_factor_second_moment,
    origin_expectation,
    collect_band_values,
    quenched_invariance_probe,
)
from .statistical_analysis import (
    MomentAccumulator,
    KsVerdict,
    merge_moments,
    ks_coefficient,
    ks_critical_value,
    ks_noise_scale,
    ecdf,
    ks_one_sample,
    ks_two_sample,
    describe_sample,
)
from .monte_carlo import ReplicaRunner

__all__ = [
    # Overlaps
    'OverlapMatrix',
    'RecurrenceState',
    'overlap_matrix',
    'run_recurrence',
    'overlap_pair_recurrence',
    'mixed_trace',
    'mixed_trace_residuals',
    'match_spectra',
    # Quenched formulas
    'QuantityKind',
    'QuenchedResult',
    'RadiusBand',
    'quenched_ov11',
    'quenched_ov11_all',
    'quenched_ov12',
    'quenched_trace',
    'evaluate_quenched',
    'inv_gamma2_cdf',
    'inv_gamma2_pdf',
    'inv_gamma2_quantile',
    'inv_gamma2_median',
    'origin_factor_mean',
    'origin_factor_second_moment',
    'origin_expectation',
    'collect_band_values',
    'quenched_invariance_probe',
    # Statistics
    'MomentAccumulator',
    'KsVerdict',
    'merge_moments',
    'ks_coefficient',
    'ks_critical_value',
    'ks_noise_scale',
    'ecdf',
    'ks_one_sample',
    'ks_two_sample',
    'describe_sample',
    # Harness
    'ReplicaRunner',
]

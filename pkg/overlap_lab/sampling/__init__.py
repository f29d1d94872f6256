"""
Random streams, scalar and vector laws, matrix ensembles and conditional samplers.
"""

from .rng import RngStream, as_stream
from .distributions import (
    LawKind,
    ScalarLaw,
    sample_x,
    sample_y,
    sample_beta,
    sample_gamma_v,
    sample_complex_gaussian,
    sample_scalar,
    sample_v,
    sample_w,
    constant_c,
    constant_d,
    constant_c1,
    constant_d1,
    log_constant_c,
    log_constant_d,
    integrate_c_mc,
    integrate_d_mc,
)
from .ensembles import (
    EnsembleKind,
    EnsembleSpec,
    SpherePoint,
    sample_ginibre,
    sample_haar_unitary,
    sample_tue,
    sample_spherical,
    sample_matrix,
    kostlan_radii,
    stereo_project,
    stereo_project_many,
    stereo_unproject,
    chordal_distance_sq,
)
from .conditional import (
    ConditionalSchurDraw,
    conditional_schur,
    conditional_schur_batch,
    decompose_ov11_sample,
    origin_factor_sample,
    origin_limit_sample,
)

__all__ = [
    # Streams
    'RngStream',
    'as_stream',
    # Scalar and vector laws
    'LawKind',
    'ScalarLaw',
    'sample_x',
    'sample_y',
    'sample_beta',
    'sample_gamma_v',
    'sample_complex_gaussian',
    'sample_scalar',
    'sample_v',
    'sample_w',
    # Normalization constants
    'constant_c',
    'constant_d',
    'constant_c1',
    'constant_d1',
    'log_constant_c',
    'log_constant_d',
    'integrate_c_mc',
    'integrate_d_mc',
    # Ensembles
    'EnsembleKind',
    'EnsembleSpec',
    'SpherePoint',
    'sample_ginibre',
    'sample_haar_unitary',
    'sample_tue',
    'sample_spherical',
    'sample_matrix',
    'kostlan_radii',
    'stereo_project',
    'stereo_project_many',
    'stereo_unproject',
    'chordal_distance_sq',
    # Conditional sampling
    'ConditionalSchurDraw',
    'conditional_schur',
    'conditional_schur_batch',
    'decompose_ov11_sample',
    'origin_factor_sample',
    'origin_limit_sample',
]

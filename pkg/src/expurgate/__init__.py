"""Expurgated error exponents for memoryless channels."""
from .channel import (
    Channel,
    DistanceMatrix,
    InputDistribution,
    bhattacharyya_matrix,
    bsc,
    chernoff_distance_matrix,
    expected_distance,
    load_channel_spec,
    uniform_input,
    validate_channel,
    validate_input,
)
from .curves import (
    CurvePoint,
    ExponentCurve,
    all_curves,
    classify_phase,
    curve_chernoff_new,
    curve_ckm,
    curve_gallager,
    zero_rate_limit,
)
from .ensemble import (
    EnumeratorModel,
    RateFunction,
    moment_exponent_empirical,
    moment_exponent_theory,
    quantized_exponents,
)
from .errors import *  # noqa: F401,F403
from .exponents import (
    ExponentInputs,
    best_chernoff_parameter,
    ckm_E,
    gallager_E0,
    gallager_EG,
    random_coding_exponent,
)
from .gaussian import GaussianParams, gaussian_D_of_R, gaussian_exponent_curve, gaussian_R_of_D
from .kernels import BACKEND
from .ratedistortion import RdProblem, critical_rate_R1, dq_of_r, joint_oracle, rq_of_d

__version__ = "0.1.0"

"""Sharp constants for weighted polynomial inequalities of Markov, Bernstein and Nikolskii type."""
from .exceptions import (InsufficientData, InvalidExponent, LPFailure, NoConvergence, SharpConstError,
                         SingularGram, UnsupportedDimension, ZeroScale)
from .extremal import (EvenPoly, ExtremalProblem, FullPoly, SharpConstant, SharpConstantResult,
                       endpoint_equivalence_check, sharp_constant)
from .limits import (LimitEstimate, ScaledSequence, bessel_origin_sequence, extrapolate,
                     gegenbauer_endpoint_sequence, trial_lower_bound, verify_relation)
from .multivar import (DomainSpec, MultiPolyCoeffs, haar_symmetrize_full, multivariate_sharp_constant,
                       reduction_factor, zonal_symmetrize)
from .operators import OperatorSpec
from .polybasis import EvenPolyCoeffs, PolyCoeffs1D
from .quadrature import WeightSpec, weighted_lp_norm

__version__ = "0.1.0"

__all__ = [
    "DomainSpec", "EvenPoly", "EvenPolyCoeffs", "ExtremalProblem", "FullPoly", "InsufficientData",
    "InvalidExponent", "LPFailure", "LimitEstimate", "MultiPolyCoeffs", "NoConvergence", "OperatorSpec",
    "PolyCoeffs1D", "ScaledSequence", "SharpConstError", "SharpConstant", "SharpConstantResult",
    "SingularGram", "UnsupportedDimension", "WeightSpec", "ZeroScale", "bessel_origin_sequence",
    "endpoint_equivalence_check", "extrapolate", "gegenbauer_endpoint_sequence", "haar_symmetrize_full",
    "multivariate_sharp_constant", "reduction_factor", "sharp_constant", "trial_lower_bound",
    "verify_relation", "weighted_lp_norm", "zonal_symmetrize",
]

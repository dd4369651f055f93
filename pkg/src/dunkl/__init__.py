"""Numerical Dunkl harmonic analysis for the reflection groups Z2 and Z2^d.

Core objects: the weighted measure mu_k and its quadrature grids, the Dunkl
kernel and transform, the generalized translation and convolution, the free
Schrodinger flow e^{it Delta_k}, thin sets in the sense of relative density,
annihilating-pair constants, and a scale-localized (Littlewood-Paley style)
decomposition used to certify those constants.  Everything is desk-scale
numerics: dense operators on composite Gauss-Legendre grids, with every
claimed inequality re-checked by an independent route where one exists.
"""

from .annihilate import (
    AnnihilationOperator,
    PairConstants,
    annihilation_operator,
    operator_norm,
    pair_constants,
    verify_pair,
    verify_two_time,
)
from .ensembles import DEFAULT_SEED, focused_ensemble, schwartz_ensemble
from .kernel import bessel_j_normalized, dunkl_kernel, dunkl_kernel_series
from .lp import LPFamily, apply_L_N, apply_T_N, bound_suite, build_family
from .measure import (
    QuadratureGrid,
    RootSystemConfig,
    SampledFunction,
    ball_measure,
    ball_measure_bound,
    build_grid,
    normalization_constant,
    rank1,
    weight_density,
)
from .reports import OperatorReport
from .schrodinger import gaussian_packet, propagate
from .selfcheck import run_selfcheck
from .thinsets import SetUnion, generate_comb, thinness_check
from .transform import TransformOperator, plancherel_defect, transform_operator
from .translate import convolve, translate

__version__ = "0.1.0"

__all__ = [
    "AnnihilationOperator",
    "DEFAULT_SEED",
    "LPFamily",
    "OperatorReport",
    "PairConstants",
    "QuadratureGrid",
    "RootSystemConfig",
    "SampledFunction",
    "SetUnion",
    "TransformOperator",
    "annihilation_operator",
    "apply_L_N",
    "apply_T_N",
    "ball_measure",
    "ball_measure_bound",
    "bessel_j_normalized",
    "bound_suite",
    "build_family",
    "build_grid",
    "convolve",
    "dunkl_kernel",
    "dunkl_kernel_series",
    "focused_ensemble",
    "gaussian_packet",
    "generate_comb",
    "normalization_constant",
    "operator_norm",
    "pair_constants",
    "plancherel_defect",
    "propagate",
    "rank1",
    "run_selfcheck",
    "schwartz_ensemble",
    "thinness_check",
    "transform_operator",
    "translate",
    "verify_pair",
    "verify_two_time",
    "weight_density",
    "__version__",
]

"""Dyadic spectral calculus and Besov norms for the harmonic oscillator
-Delta + |x|^2, with paraproducts, the heat semigroup, and an empirical
verification harness."""

from .hermite import (
    Grid,
    GridFunction,
    HermiteBasis,
    QuadratureRule,
    SpectralCoefficients,
    analyze,
    apply_derivative,
    apply_poly_diff,
    apply_position,
    eval_hermite,
    gauss_hermite_rule,
    synthesize,
)
from .calculus import (
    DyadicPartition,
    KernelMatrix,
    SymbolFn,
    apply_H_power,
    apply_multiplier,
    build_partition,
    low_block,
    lp_block,
    multiplier_kernel,
    operator_norm,
    widened_block,
)
from .besov import (
    BesovParams,
    BlockProfile,
    besov_norm,
    duality_pairing,
    embedding_ratio,
    interpolation_check,
    lp_norm,
    sandwich_check,
)
from .paraproduct import BonyPieces, bony_decompose, product
from .semigroup import (
    HeatFlowParams,
    Trajectory,
    duhamel_solve,
    heat_apply,
    max_reg_ratio,
    mehler_kernel,
    semigroup_norm,
    smoothing_rate_fit,
    smoothing_ratio,
)
from .corpus import Corpus, generate_corpus
from .config import ExperimentConfig, load_config
from .checks import run_suite

__version__ = "0.1.0"

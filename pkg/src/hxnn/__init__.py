"""Hypercomplex algebras from structure constants, degeneracy analysis,
and single-hidden-layer hypercomplex perceptrons with split activations."""

from .algebra import (
    Algebra,
    AlgebraParseError,
    DimensionError,
    StructureConstants,
    add,
    embed,
    mul_direct,
    norm,
    parse_algebra,
    scalar_mul,
    serialize_algebra,
    structure_constants,
)
from .bilinear import (
    BilinearMatrixSet,
    DegeneracyReport,
    DEGENERATE,
    NON_DEGENERATE,
    build_bilinear_matrices,
    check_degeneracy,
    det_exact,
    mul_bilinear,
)
from .harness import (
    Dataset,
    ExperimentConfig,
    RunReport,
    TargetFunction,
    config_hash,
    generate_dataset,
    make_config,
    parse_config,
    run_experiment,
    sup_error,
    sweep,
)
from .network import (
    DivergenceError,
    GradientBundle,
    HMLPParams,
    SplitActivation,
    backward,
    forward,
    init,
    load_checkpoint,
    loss_mse,
    save_checkpoint,
    split_apply,
    train_sgd,
)
from .zoo import CliffordSignature, cayley_dickson, clifford, named

__all__ = [
    "Algebra",
    "AlgebraParseError",
    "BilinearMatrixSet",
    "CliffordSignature",
    "Dataset",
    "DegeneracyReport",
    "DEGENERATE",
    "DimensionError",
    "DivergenceError",
    "ExperimentConfig",
    "GradientBundle",
    "HMLPParams",
    "NON_DEGENERATE",
    "RunReport",
    "SplitActivation",
    "StructureConstants",
    "TargetFunction",
    "add",
    "backward",
    "build_bilinear_matrices",
    "cayley_dickson",
    "check_degeneracy",
    "clifford",
    "config_hash",
    "det_exact",
    "embed",
    "forward",
    "generate_dataset",
    "init",
    "load_checkpoint",
    "loss_mse",
    "make_config",
    "mul_bilinear",
    "mul_direct",
    "named",
    "norm",
    "parse_algebra",
    "parse_config",
    "run_experiment",
    "save_checkpoint",
    "scalar_mul",
    "serialize_algebra",
    "split_apply",
    "structure_constants",
    "sup_error",
    "sweep",
    "train_sgd",
]

__version__ = "0.1.0"

"""Exact normal forms and invariants of metric and connection jets."""
from .connection_normalizer import (
    ConnectionNormalForm,
    adapted_chart,
    normalize_connection,
    normalize_connection_checked,
    torsion,
)
from .equivariant_maps import delta_n, gamma_n, kernel_basis, kernel_dimension, kernel_membership
from .errors import BackendIncompleteError, DomainError, InvariantViolation, JetError, StructuralError
from .jet_algebra import ScalarJet, jet_compose, jet_multiply, jet_partial, pack_taylor, unpack_taylor
from .jet_groups import (
    ConnectionJet,
    DiffeoJet,
    MetricJet,
    PoissonJet,
    TensorJet,
    UnipotentFactors,
    act_on_connection_jet,
    act_on_scalar_jet,
    act_on_tensor_jet,
    diffeo_compose,
    diffeo_invert,
    eta_assemble,
    eta_factorize,
)
from .metric_normalizer import MetricInvariants, MetricNormalForm, metric_invariants, normalize_metric
from .natural_ops import EvaluationRule, LaplacianRule, LocalRule, eval_in_adapted_chart, laplacian_at_point
from .quantization import (
    FormalSeries,
    MoyalBackend,
    StarBackend,
    associativity_check,
    canonical_star_at_point,
    moyal_star,
    poisson_bracket,
)
from .serialization import parse_jet_file, serialize

__all__ = [
    "BackendIncompleteError",
    "ConnectionJet",
    "ConnectionNormalForm",
    "DiffeoJet",
    "DomainError",
    "EvaluationRule",
    "FormalSeries",
    "InvariantViolation",
    "JetError",
    "LaplacianRule",
    "LocalRule",
    "MetricInvariants",
    "MetricJet",
    "MetricNormalForm",
    "MoyalBackend",
    "PoissonJet",
    "ScalarJet",
    "StarBackend",
    "StructuralError",
    "TensorJet",
    "UnipotentFactors",
    "act_on_connection_jet",
    "act_on_scalar_jet",
    "act_on_tensor_jet",
    "adapted_chart",
    "associativity_check",
    "canonical_star_at_point",
    "delta_n",
    "diffeo_compose",
    "diffeo_invert",
    "eta_assemble",
    "eta_factorize",
    "eval_in_adapted_chart",
    "gamma_n",
    "jet_compose",
    "jet_multiply",
    "jet_partial",
    "kernel_basis",
    "kernel_dimension",
    "kernel_membership",
    "laplacian_at_point",
    "metric_invariants",
    "moyal_star",
    "normalize_connection",
    "normalize_connection_checked",
    "normalize_metric",
    "pack_taylor",
    "parse_jet_file",
    "poisson_bracket",
    "serialize",
    "torsion",
    "unpack_taylor",
]

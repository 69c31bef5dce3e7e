"""Scalar Herglotz-Nevanlinna functions, generalized Donoghue classes and
the coupling calculus of conservative L-systems."""

from .donoghue import (
    DonoghueClassTag,
    alpha_transform,
    classify,
    neg_reciprocal,
    q_alpha,
    q_alpha_zeros,
    scale_to_class,
)
from .errors import (
    ClassError,
    ConsistencyError,
    DomainError,
    LsysError,
    NormalizationError,
    PoleError,
    SchemaError,
    SpectralPointError,
)
from .funcs import (
    ConstImag,
    DensityPanel,
    ExpTransport,
    FiniteMeasureWarning,
    FuncExpr,
    Moebius,
    NegReciprocal,
    Power,
    Product,
    Scale,
    SpectralMeasure,
    WeylTransform,
    dumps_expr,
    evaluate,
    herglotz_probe,
    loads_expr,
    normalized_mass,
    weyl_eval,
)
from .livsic import char_from_livsic, hypothesis_flip, livsic_from_char, m_from_s, s_from_m, transfer_from_char
from .lsystem import Hypothesis, LSystem, attractor_diagnostics, couple, make_lsystem, power, validate
from .models import (
    attractor_model,
    catalog,
    coupling_geometry,
    example3_livsic,
    im_part_decomposition,
    model_triple,
    resolvent_B,
    resolvent_T,
    star_extension_matrices,
    transport_system,
)

__version__ = "0.1.0"

__all__ = [
    "alpha_transform",
    "attractor_diagnostics",
    "attractor_model",
    "catalog",
    "char_from_livsic",
    "ClassError",
    "classify",
    "ConsistencyError",
    "ConstImag",
    "couple",
    "coupling_geometry",
    "DensityPanel",
    "DomainError",
    "DonoghueClassTag",
    "dumps_expr",
    "evaluate",
    "example3_livsic",
    "ExpTransport",
    "FiniteMeasureWarning",
    "FuncExpr",
    "herglotz_probe",
    "Hypothesis",
    "hypothesis_flip",
    "im_part_decomposition",
    "livsic_from_char",
    "loads_expr",
    "LsysError",
    "LSystem",
    "m_from_s",
    "make_lsystem",
    "model_triple",
    "Moebius",
    "neg_reciprocal",
    "NegReciprocal",
    "NormalizationError",
    "normalized_mass",
    "PoleError",
    "Power",
    "power",
    "Product",
    "q_alpha",
    "q_alpha_zeros",
    "resolvent_B",
    "resolvent_T",
    "s_from_m",
    "Scale",
    "scale_to_class",
    "SchemaError",
    "SpectralMeasure",
    "SpectralPointError",
    "star_extension_matrices",
    "transfer_from_char",
    "transport_system",
    "validate",
    "weyl_eval",
    "WeylTransform",
]

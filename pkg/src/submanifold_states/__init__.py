"""Restriction states of submanifolds of P^n1 x P^n2 and their entanglement."""

from .coherent import CoherentState, coherent_state, product_coherent_state
from .entanglement import (
    EntanglementReport,
    analyze,
    concurrence,
    entanglement_entropy,
    ppt_check,
    schmidt,
    wootters_eof,
)
from .projective import (
    ManifoldModel,
    SectionBasis,
    dim_sections,
    evaluate_section,
    fs_weight,
    monomial_norm,
)
from .quadrature import QuadratureRule, SubmanifoldSpec, build_rule, induced_density, integrate
from .states import (
    DensityMatrix,
    GramOperator,
    partial_trace_1,
    partial_trace_2,
    product_factor_residual,
    restriction_gram,
    restriction_state,
    rho_from_gram,
    tensor_product,
)

__version__ = "0.1.0"

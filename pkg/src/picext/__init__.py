"""Exact homological algebra for two-term complexes of f.g. abelian groups.

The library computes with strictly commutative Picard stacks over a point
through their standard incarnation as complexes [K^-1 -> K^0]: derived Hom
groups, extensions and their Baer sum, the mutually inverse classification
maps between extensions and Ext^1, and independent brute-force oracles that
cross-check all of it.
"""

from .abelian import (
    FgAbGroup,
    GroupElement,
    GroupHom,
    canonical_invariants,
    cokernel,
    direct_sum,
    enumerate_elements,
    ext1_group,
    hom_group,
    kernel,
    pullback_group,
    pushout_group,
)
from .complexes import (
    BoundedComplex,
    ChainMap,
    Homotopy,
    TwoTermComplex,
    cohomology,
    cokernel_complex,
    fibered_product_complex,
    fibered_sum_complex,
    free_cover,
    free_resolution,
    is_quasi_isomorphism,
    kernel_complex,
    mapping_cone,
    shift,
    truncate,
)
from .derived import (
    DerivedHomGroup,
    chain_maps_mod_homotopy,
    derived_hom,
    hom_stack_complex,
    pi_epsilon_sequence,
)
from .extensions import (
    ExtClass,
    Extension,
    are_equivalent,
    baer_sum,
    ext_class,
    is_split,
    long_exact_sequence,
    neutral_extension,
    product_extension,
    psi,
    pullback_extension,
    pushdown_extension,
    theta,
    validate_extension,
)
from .int_linalg import IntMatrix, SmithDecomposition, kernel_basis, smith_normal_form, solve_linear
from .oracle import FactorSet, brute_force_hom_count, ext1_by_factor_sets, splitting_formula_ext

__version__ = "0.1.0"

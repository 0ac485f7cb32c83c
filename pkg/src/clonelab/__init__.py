"""Desk-scale workbench for clone lattices.

Exhaustive clone computations on finite carriers, computable pairing
constructions on the naturals, a term partial evaluator, canonicity
analysis and the finite combinatorics feeding all of it.
"""

from .finite import (
    Carrier,
    OpSet,
    OpTable,
    RelationTable,
    ResourceLimitError,
    all_op_tables,
    clone_closure,
    closure_slice,
    closure_slice_is_full,
    compose,
    make_projection,
    pol,
    respects,
)
from .ideals import (
    DecompositionCertificate,
    DegenerateWitnessError,
    PrincipalIdeal,
    decompose_with,
    preserves_ideal,
    reconstructs_ideal,
)
from .lattice import precompleteness_evidence, unary_interval_chain
from .symbolic import (
    AlmostUnaryWitness,
    Box,
    ConstructionRefuted,
    SpreadWitness,
    SymbolicFn,
    cantor_pairing,
    check_injective_on,
    delta_pairing,
    max_fn,
    median_fn,
    min_fn,
    pairing_bijection,
    standard_merge,
)
from .pairings import (
    color_gated_pairing,
    family_generators,
    marked_merge,
    nested_pairing,
    recovered_pairing,
    split_merge_pairing,
    two_sided_pairing,
)
from .almost_unary import (
    almost_unary_check,
    depends_heavily,
    median_witness,
    spread_supports,
    witnessed_spread_check,
)
from .terms import (
    BinaryApp,
    Const,
    Registry,
    SubsetSpec,
    Term,
    UnaryApp,
    VarX,
    VarY,
    bounded_term_search,
    default_registry,
    eval_term,
    find_agreement,
    format_term,
    parse_term,
    partial_eval,
    thin_for,
)
from .canonical import (
    canonical_subset,
    classify_on_region,
    is_canonical,
    minimal_heavy_subterm,
    region_interaction,
    similar,
    tuple_pattern,
    unary_on_region,
)
from .combinatorics import (
    BlockSequence,
    Coloring,
    IndependentFamily,
    anti_ramsey_search,
    builtin_coloring,
    hausdorff_family,
    partition_check,
    verify_independent,
)

__version__ = "0.1.0"

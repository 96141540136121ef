"""Rewriting and finite-algebra workbench for n-quasigroups and n-loops."""

from .terms import (
    App,
    Elem,
    ParseError,
    Signature,
    Var,
    apply_substitution,
    match,
    parse_term,
    positions,
    rename_apart,
    replace_at,
    size,
    subterm_at,
    unify,
    variables,
)
from .rewriting import (
    CapExceeded,
    CriticalPair,
    MaxRoundsExceeded,
    Rule,
    StepBoundExceeded,
    TerminationNotVerified,
    Trs,
    UnorientableError,
    check_conditions,
    check_confluence,
    complete,
    critical_pairs,
    enumerate_terms,
    format_trs,
    joinable,
    local_confluence_oracle,
    normalize,
    parse_trs,
    reducts,
    rewrite_steps,
)
from .varieties import (
    VarietySpec,
    base_loop,
    base_quasigroup,
    complete_loop,
    complete_quasigroup,
    generate_trs,
)
from .algebras import (
    AlgebraError,
    CarrierTooLargeError,
    Congruence,
    Embedding,
    FiniteAlgebra,
    NotAQuasigroupError,
    algebra_from_function,
    algebra_from_json,
    algebra_to_json,
    cyclic_loop,
    derive_divisions,
    enumerate_congruences,
    generated_congruence,
    permutation_quasigroup,
    restrict,
    validate,
    validate_embedding,
)
from .amalgams import (
    AmalgamDiagram,
    AmalgamElement,
    UnknownElementError,
    apply_op,
    build_amalgam,
    check_strong_amalgamation,
    check_unique_normal_forms,
    normalize_element,
    parse_element_term,
)
from .codescent import (
    CepReport,
    cep_by_enumeration,
    check_cep,
    identity_embedding,
    is_effective_codescent,
    search_noncep_monomorphism,
    verify_prop_3_6,
)

__version__ = "0.1.0"

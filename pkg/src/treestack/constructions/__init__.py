from .basic import (
    FiniteAcceptor,
    erase_hashes,
    hash_letters,
    hash_order_dfa,
    is_hash_letter,
    lift_inverse_erasing,
    product_with_dfa,
    specialize_hashes,
    trim,
    union_automata,
    wrap_endmarkers,
)
from .pipeline import (
    DEFAULT_MAX_N,
    Stages,
    check_materializable,
    expand_descriptor,
    hash_automaton,
    materialization_threshold,
    permutation_automaton,
    permutation_closure,
    prepare,
    sigma_automaton,
)
from .sigma import (
    ACCEPT,
    START,
    PipelineMeta,
    build_A_sigma,
    history_settled,
    phase_one_schemas,
    phase_three_schemas,
    phase_two_glue,
    subroutine_schemas,
)

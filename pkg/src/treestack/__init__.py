"""Tree-stack automata and the block-permutation closure construction."""

from .core import (
    DOWN,
    ID,
    TRUE,
    Automaton,
    Down,
    Eq,
    Id,
    LabeledTree,
    Meta,
    Push,
    Set,
    Transition,
    TreeStack,
    Up,
    apply_instruction,
    degree,
    enabled_transitions,
    normalize_degree,
    normalize_root_accept,
    predicate_holds,
    step,
    validate,
)
from .labels import ROOT, DASH, Box, Choice, Composite, Plain, Special, canonical, parse_label
from .runner import (
    Accepted,
    Budget,
    BudgetExhausted,
    Rejected,
    accepts,
    check_add_root,
    enumerate_slice,
    final_tree,
    replay,
    restriction_degree,
    visit_counts,
)

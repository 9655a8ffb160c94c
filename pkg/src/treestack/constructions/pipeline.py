"""End-to-end closure pipeline and in-memory expansion of descriptors."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Optional

from ..core import Automaton, Meta, degree, normalize_degree
from ..errors import ContractError, InputError, MaterializationRefused
from ..fileformat import PipelineDescriptor, hash_letter
from ..oracle import Permutation, all_permutations
from .basic import (
    erase_hashes,
    hash_order_dfa,
    lift_inverse_erasing,
    product_with_dfa,
    specialize_hashes,
    union_automata,
    wrap_endmarkers,
)
from .sigma import PipelineMeta, build_A_sigma

DEFAULT_MAX_N = 4
DEFAULT_THRESHOLD = 100_000


def materialization_threshold() -> int:
    raw = os.environ.get("TREESTACK_THRESHOLD")
    if raw is None:
        return DEFAULT_THRESHOLD
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"TREESTACK_THRESHOLD must be an integer, got {raw!r}") from exc


@dataclass(frozen=True)
class Stages:
    """Intermediate automata of the pipeline for one base automaton and N."""

    wrapped: Automaton
    marked: Automaton
    n: int
    k: int

    @property
    def degree(self) -> int:
        return self.wrapped.meta.declared_degree


def _base_k(aut: Automaton, k: Optional[int]) -> int:
    k = aut.meta.claimed_k if k is None else k
    if k is None:
        raise InputError("restriction k is neither given nor recorded in the automaton")
    return k


def prepare(aut: Automaton, n: int, k: Optional[int] = None) -> Stages:
    """Normalize, insert hashes, force their order, add end markers, mark hashes."""
    if n < 1:
        raise InputError("N must be positive")
    k = _base_k(aut, k)
    base = normalize_degree(aut)
    base = replace(base, meta=replace(base.meta, claimed_k=k))
    inner = [hash_letter(j) for j in range(2, n + 1)]
    lifted = lift_inverse_erasing(base, inner)
    ordered = product_with_dfa(lifted, hash_order_dfa(n, base.terminals))
    wrapped = wrap_endmarkers(ordered, n)
    if wrapped.meta.declared_degree != degree(base):
        raise ContractError("degree changed while adding end markers")
    marked = specialize_hashes(wrapped, n)
    return Stages(wrapped, marked, n, k)


def hash_automaton(aut: Automaton, n: int, k: Optional[int] = None) -> Automaton:
    return prepare(aut, n, k).marked


def sigma_automaton(aut: Automaton, n: int, sigma: Permutation, k: Optional[int] = None,
                    stages: Optional[Stages] = None) -> Automaton:
    """Automaton for the words w_s(1) ... w_s(N) with hashes kept."""
    stages = stages or prepare(aut, n, k)
    meta = PipelineMeta(n, stages.k, stages.degree, sigma)
    return build_A_sigma(stages.wrapped, stages.marked, meta)


def permutation_automaton(aut: Automaton, n: int, sigma: Permutation, k: Optional[int] = None) -> Automaton:
    return erase_hashes(sigma_automaton(aut, n, sigma, k))


def permutation_closure(aut: Automaton, n: int, k: Optional[int] = None,
                        max_n: int = DEFAULT_MAX_N) -> Automaton:
    """Automaton for all block permutations of the language of ``aut``."""
    if n > max_n:
        raise InputError(f"N = {n} exceeds the cap of {max_n} ({n}! branches)")
    stages = prepare(aut, n, k)
    parts = [
        erase_hashes(sigma_automaton(aut, n, sigma, stages=stages))
        for sigma in all_permutations(n)
    ]
    out = union_automata(parts)
    return replace(out, meta=replace(out.meta, claimed_k=stages.k + n + 3,
                                     declared_degree=stages.degree + n + 1))


def expand_descriptor(desc: PipelineDescriptor, base: Automaton) -> Automaton:
    k = base.meta.claimed_k
    if desc.stage == "hash":
        return hash_automaton(base, desc.n, k)
    if desc.stage == "perm":
        if desc.sigma is None:
            raise InputError("perm descriptor needs sigma")
        return permutation_automaton(base, desc.n, Permutation(desc.sigma), k)
    return permutation_closure(base, desc.n, k)


def check_materializable(aut: Automaton, threshold: Optional[int] = None) -> None:
    """Raise unless ``aut`` has an explicit table within the threshold."""
    threshold = materialization_threshold() if threshold is None else threshold
    if not aut.explicit:
        raise MaterializationRefused("transitions are generated on demand; no finite table is kept")
    if len(aut.transitions) > threshold:
        raise MaterializationRefused(
            f"{len(aut.transitions)} transitions exceed the threshold of {threshold}"
        )

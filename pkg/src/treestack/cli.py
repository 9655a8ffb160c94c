"""Batch command-line interface.

Exit codes: 0 success / accepted / equal / complete, 1 rejected / unequal /
invalid, 2 parse or usage error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .constructions import (
    check_materializable,
    hash_automaton,
    permutation_automaton,
    permutation_closure,
)
from .core import degree, validate
from .errors import InputError, MaterializationRefused, ParseError, TreeStackError
from .fileformat import (
    PipelineDescriptor,
    is_descriptor,
    parse_automaton,
    parse_descriptor,
    render_automaton,
    render_descriptor,
)
from .oracle import (
    ALL,
    LanguageSlice,
    Permutation,
    cn_slice,
    compare_slices,
    fixture,
    parse_word,
    render_slice,
)
from .runner import Accepted, Budget, BudgetExhausted, accepts, enumerate_slice, render_trace

FIXTURE_PREFIX = "fixture:"


def load(spec: str):
    """Load an automaton from a path, a descriptor, or ``fixture:NAME``."""
    if spec.startswith(FIXTURE_PREFIX):
        from .fixtures import fixture_automaton

        return fixture_automaton(spec[len(FIXTURE_PREFIX):])
    path = Path(spec)
    text = path.read_text(encoding="utf-8")
    if not is_descriptor(text):
        return parse_automaton(text)
    from .constructions import expand_descriptor

    desc = parse_descriptor(text)
    base = desc.base
    if not base.startswith(FIXTURE_PREFIX) and not os.path.isabs(base):
        base = os.fspath(path.parent / base)
    return expand_descriptor(desc, load(base))


def _budget(args) -> Budget:
    return Budget(args.max_steps, args.max_nodes, args.max_configs)


def _k(args, aut) -> int:
    k = args.k if args.k is not None else aut.meta.claimed_k
    if k is None:
        raise InputError("no --k given and the automaton records no restriction")
    return k


def _budget_flags(p):
    d = Budget()
    p.add_argument("--k", type=int, default=None, help="restriction bound (default: from file)")
    p.add_argument("--max-steps", type=int, default=d.max_steps)
    p.add_argument("--max-nodes", type=int, default=d.max_nodes)
    p.add_argument("--max-configs", type=int, default=d.max_configs)


def _settings_line(k: int, budget: Budget) -> str:
    return (
        f"# k {k} max_steps {budget.max_steps} max_nodes {budget.max_nodes} "
        f"max_configs {budget.max_configs}"
    )


def cmd_validate(args) -> int:
    aut = load(args.file)
    report = validate(aut)
    for line in report.lines():
        print(line)
    if report.ok:
        print(f"ok: {len(aut.transitions)} transitions, degree {degree(aut)}")
        return 0
    return 1


def cmd_run(args) -> int:
    aut = load(args.file)
    k = _k(args, aut)
    word = parse_word(args.word)
    verdict = accepts(aut, word, k, _budget(args))
    if isinstance(verdict, Accepted):
        print(f"accepted ({len(verdict.trace)} transitions)")
        if args.trace:
            print(render_trace(verdict.trace))
        return 0
    if isinstance(verdict, BudgetExhausted):
        print(f"budget exhausted ({verdict.reason})")
        return 3
    print("rejected")
    return 1


def _slice_of(aut, args, max_len: int):
    k = _k(args, aut)
    budget = _budget(args)
    res = enumerate_slice(aut, max_len, k, budget)
    return LanguageSlice(res.words, max_len, res.complete), k, budget


def cmd_enumerate(args) -> int:
    aut = load(args.file)
    s, k, budget = _slice_of(aut, args, args.max_len)
    text = render_slice(s)
    head, _, rest = text.partition("\n")
    sys.stdout.write(head + "\n" + _settings_line(k, budget) + "\n" + rest)
    return 0 if s.complete else 3


def _write(args, text: str):
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _base_ref(spec: str) -> str:
    if spec.startswith(FIXTURE_PREFIX):
        return spec
    return os.fspath(Path(spec).resolve())


def _emit(args, aut, stage: str, sigma=None) -> int:
    try:
        check_materializable(aut)
    except MaterializationRefused as exc:
        desc = PipelineDescriptor(
            _base_ref(args.file), args.N, stage, sigma,
            aut.meta.claimed_k, aut.meta.declared_degree, aut.meta.notes,
        )
        print(f"writing pipeline descriptor: {exc}", file=sys.stderr)
        _write(args, render_descriptor(desc))
        return 0
    _write(args, render_automaton(aut))
    return 0


def cmd_hash(args) -> int:
    base = load(args.file)
    return _emit(args, hash_automaton(base, args.N), "hash")


def cmd_perm(args) -> int:
    base = load(args.file)
    sigma = Permutation.parse(args.sigma)
    return _emit(args, permutation_automaton(base, args.N, sigma), "perm", sigma.images)


def cmd_closure(args) -> int:
    base = load(args.file)
    return _emit(args, permutation_closure(base, args.N), "closure")


def _oracle_slice(args, max_len: int) -> LanguageSlice:
    spec = args.oracle
    name = spec[len(FIXTURE_PREFIX):] if spec.startswith(FIXTURE_PREFIX) else None
    try:
        base = fixture(name, max_len) if name else None
    except InputError:
        base = None
    if base is None:
        base, _, _ = _slice_of(load(spec), args, max_len)
    if args.N is None:
        raise InputError("--oracle needs -N")
    sigma = Permutation.parse(args.sigma) if args.sigma else ALL
    return cn_slice(base, args.N, sigma)


def cmd_compare(args) -> int:
    left_aut = load(args.file_a)
    left, _, _ = _slice_of(left_aut, args, args.max_len)
    if args.oracle:
        if args.file_b:
            raise InputError("give either a second file or --oracle, not both")
        right = _oracle_slice(args, args.max_len)
    elif args.file_b:
        right, _, _ = _slice_of(load(args.file_b), args, args.max_len)
    else:
        raise InputError("nothing to compare against")
    diff = compare_slices(left, right)
    print(f"# max_len {args.max_len}")
    for line in diff.lines():
        print(line)
    print("equal" if diff.equal else "different")
    return 0 if diff.equal else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treestack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an automaton file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="decide membership of one word")
    p.add_argument("file")
    p.add_argument("word", help="space-separated letters; '-' is the empty word")
    _budget_flags(p)
    p.add_argument("--trace", action="store_true", help="print the witness run")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("enumerate", help="list accepted words up to a length")
    p.add_argument("file")
    p.add_argument("--max-len", type=int, required=True)
    _budget_flags(p)
    p.set_defaults(func=cmd_enumerate)

    for name, func, help_ in (
        ("hash", cmd_hash, "marker-pushing automaton for N blocks"),
        ("perm", cmd_perm, "automaton for one block permutation"),
        ("closure", cmd_closure, "automaton for all block permutations"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file")
        p.add_argument("-N", type=int, required=True)
        if name == "perm":
            p.add_argument("--sigma", required=True, help='block order, e.g. "2 1"')
        p.add_argument("-o", "--output")
        p.set_defaults(func=func)

    p = sub.add_parser("compare", help="compare two slices")
    p.add_argument("file_a")
    p.add_argument("file_b", nargs="?")
    p.add_argument("--oracle", help="base automaton whose closure slice is the reference")
    p.add_argument("-N", type=int)
    p.add_argument("--sigma")
    p.add_argument("--max-len", type=int, required=True)
    _budget_flags(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TreeStackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

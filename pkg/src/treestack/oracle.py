"""Brute-force ground truth for language slices and permutation closures."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import InputError, ParseError


def word_key(word: tuple):
    return (len(word), word)


@dataclass(frozen=True)
class LanguageSlice:
    words: frozenset
    max_len: int
    complete: bool = True

    def __post_init__(self):
        words = frozenset(tuple(w) for w in self.words)
        object.__setattr__(self, "words", words)
        too_long = [w for w in words if len(w) > self.max_len]
        if too_long:
            raise InputError(f"word longer than max_len {self.max_len}: {' '.join(too_long[0])}")

    def sorted_words(self) -> list:
        return sorted(self.words, key=word_key)


@dataclass(frozen=True)
class Permutation:
    images: tuple

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise InputError(f"not a permutation of 1..{len(images)}: {images}")

    @property
    def size(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        try:
            return cls(tuple(int(x) for x in text.replace(",", " ").split()))
        except ValueError as exc:
            raise InputError(f"bad permutation {text!r}") from exc

    def __str__(self) -> str:
        return " ".join(str(i) for i in self.images)


def all_permutations(n: int) -> list:
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


ALL = "all"


def splits(word: tuple, n: int):
    """Every way of cutting ``word`` into ``n`` (possibly empty) factors."""
    for cuts in itertools.combinations_with_replacement(range(len(word) + 1), n - 1):
        bounds = (0,) + cuts + (len(word),)
        yield tuple(word[bounds[j]:bounds[j + 1]] for j in range(n))


def rearrange(parts: tuple, sigma: Permutation) -> tuple:
    out = ()
    for j in sigma.images:
        out += parts[j - 1]
    return out


def cn_slice(s: LanguageSlice, n: int, sigma: Union[Permutation, str] = ALL) -> LanguageSlice:
    if n < 1:
        raise InputError("N must be positive")
    perms = all_permutations(n) if sigma == ALL else [sigma]
    for p in perms:
        if p.size != n:
            raise InputError(f"permutation {p} does not act on 1..{n}")
    out = set()
    for w in s.words:
        for parts in splits(w, n):
            for p in perms:
                out.add(rearrange(parts, p))
    return LanguageSlice(frozenset(out), s.max_len, s.complete)


def cyclic_shift_slice(s: LanguageSlice) -> LanguageSlice:
    out = {w[i:] + w[:i] for w in s.words for i in range(max(len(w), 1))}
    return LanguageSlice(frozenset(out), s.max_len, s.complete)


@dataclass
class SliceDiff:
    only_left: list = field(default_factory=list)
    only_right: list = field(default_factory=list)
    caveats: list = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return not self.only_left and not self.only_right

    def lines(self) -> list:
        out = [f"< {render_word(w)}" for w in self.only_left]
        out += [f"> {render_word(w)}" for w in self.only_right]
        out += [f"note: {c}" for c in self.caveats]
        return out


def compare_slices(left: LanguageSlice, right: LanguageSlice) -> SliceDiff:
    if left.max_len != right.max_len:
        raise InputError(f"max_len differs: {left.max_len} vs {right.max_len}")
    diff = SliceDiff(
        sorted(left.words - right.words, key=word_key),
        sorted(right.words - left.words, key=word_key),
    )
    for side, s in (("left", left), ("right", right)):
        if not s.complete:
            diff.caveats.append(f"{side} slice is incomplete (search was capped)")
    return diff


# -- fixture languages -------------------------------------------------------


def _anbn(max_len: int):
    for n in range(1, max_len // 2 + 1):
        yield ("a",) * n + ("b",) * n


def _anbmcndm(max_len: int):
    for n in range(1, max_len):
        for m in range(1, max_len):
            if 2 * (n + m) <= max_len:
                yield ("a",) * n + ("b",) * m + ("c",) * n + ("d",) * m


def _abc_star(max_len: int):
    for n in range(0, max_len // 3 + 1):
        yield ("a", "b", "c") * n


_SINGLETON = re.compile(r"^singleton\((.*)\)$")


def singleton_word(name: str):
    m = _SINGLETON.match(name)
    if not m:
        return None
    body = m.group(1).strip()
    return tuple(body.split()) if " " in body else tuple(body)


def fixture(name: str, max_len: int) -> LanguageSlice:
    word = singleton_word(name)
    if word is not None:
        words = [word] if len(word) <= max_len else []
    elif name == "anbn":
        words = _anbn(max_len)
    elif name == "anbmcndm":
        words = _anbmcndm(max_len)
    elif name == "abc-star":
        words = _abc_star(max_len)
    else:
        raise InputError(f"unknown fixture {name!r}")
    return LanguageSlice(frozenset(words), max_len, True)


# -- slice files ---------------------------------------------------------------


def render_word(word: Iterable[str]) -> str:
    word = tuple(word)
    return " ".join(word) if word else "-"


def parse_word(text: str) -> tuple:
    tokens = text.split()
    if tokens == ["-"]:
        return ()
    return tuple(tokens)


def render_slice(s: LanguageSlice) -> str:
    head = f"# max_len {s.max_len} complete {'true' if s.complete else 'false'}"
    return "\n".join([head] + [render_word(w) for w in s.sorted_words()]) + "\n"


def parse_slice(text: str) -> LanguageSlice:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty slice file", 1)
    head = lines[0].split()
    if len(head) != 5 or head[:2] != ["#", "max_len"] or head[3] != "complete":
        raise ParseError("expected '# max_len L complete BOOL'", 1)
    if head[4] not in ("true", "false"):
        raise ParseError("complete must be true or false", 1, 0)
    words = set()
    for line in lines[1:]:
        if line.strip() and not line.lstrip().startswith("#"):
            words.add(parse_word(line))
    return LanguageSlice(frozenset(words), int(head[2]), head[4] == "true")

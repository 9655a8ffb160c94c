"""Bundled automaton files for the fixture languages."""

from importlib import resources

from ..core import ID, TRUE, Meta, Transition, explicit_automaton
from ..errors import InputError
from ..fileformat import parse_automaton
from ..oracle import singleton_word

FILES = {"anbn": "anbn.tsa", "anbmcndm": "example.tsa", "example": "example.tsa", "abc-star": "abc-star.tsa"}


def fixture_text(name: str) -> str:
    if name not in FILES:
        raise InputError(f"no bundled file for {name!r}")
    return resources.files(__package__).joinpath(FILES[name]).read_text(encoding="utf-8")


def singleton_automaton(word) -> "Automaton":
    word = tuple(word)
    states = [f"s{i}" for i in range(len(word) + 1)]
    transitions = [Transition(states[i], x, TRUE, ID, states[i + 1]) for i, x in enumerate(word)]
    return explicit_automaton(
        states, dict.fromkeys(word), [], states[0], [states[-1]], transitions, Meta(claimed_k=1)
    )


def fixture_automaton(name: str):
    word = singleton_word(name)
    if word is not None:
        return singleton_automaton(word)
    return parse_automaton(fixture_text(name))

"""Tagged letters and synchronization words.

A synchronization word interleaves two tapes; each letter carries the tape
it came from plus a symbol. Decoding a word recovers the (input, output)
pair it synchronizes.
"""
from __future__ import annotations

from enum import IntEnum
from typing import Iterable, NamedTuple, Sequence


class Tape(IntEnum):
    INPUT = 1
    OUTPUT = 2


class Letter(NamedTuple):
    tape: Tape
    symbol: str

    def __repr__(self) -> str:
        return f"({int(self.tape)},{self.symbol})"


SyncWord = tuple  # tuple[Letter, ...]


def inp(symbol: str) -> Letter:
    return Letter(Tape.INPUT, symbol)


def out(symbol: str) -> Letter:
    return Letter(Tape.OUTPUT, symbol)


def word(letters: Iterable[Letter]) -> SyncWord:
    return tuple(letters)


def input_word(symbols: Iterable[str]) -> SyncWord:
    return tuple(inp(s) for s in symbols)


def output_word(symbols: Iterable[str]) -> SyncWord:
    return tuple(out(s) for s in symbols)


def tags(w: Sequence[Letter]) -> tuple[int, ...]:
    """Tape projection of a word, as a sequence over {1, 2}."""
    return tuple(int(l.tape) for l in w)


def project_input(w: Sequence[Letter]) -> tuple[str, ...]:
    return tuple(l.symbol for l in w if l.tape is Tape.INPUT)


def project_output(w: Sequence[Letter]) -> tuple[str, ...]:
    return tuple(l.symbol for l in w if l.tape is Tape.OUTPUT)


def decode(w: Sequence[Letter]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """The pair of words a synchronization encodes."""
    return project_input(w), project_output(w)


def convolve(tag_seq: Sequence[int], symbols: Sequence[str]) -> SyncWord:
    """Rebuild a word from its tape tags and its symbol sequence."""
    if len(tag_seq) != len(symbols):
        raise ValueError("tag and symbol sequences differ in length")
    return tuple(Letter(Tape(t), s) for t, s in zip(tag_seq, symbols))


def recompose(tag_seq: Sequence[int], pair: tuple[Sequence[str], Sequence[str]]) -> SyncWord:
    """Interleave a pair of words following the given tag sequence."""
    u, v = list(pair[0]), list(pair[1])
    if len(u) + len(v) != len(tag_seq):
        raise ValueError("pair does not fit the tag sequence")
    letters = []
    i = j = 0
    for t in tag_seq:
        if t == 1:
            letters.append(inp(u[i]))
            i += 1
        else:
            letters.append(out(v[j]))
            j += 1
    return tuple(letters)


def format_word(w: Sequence[Letter]) -> str:
    return "".join(f"({int(l.tape)},{l.symbol})" for l in w) if w else "ε"

"""Propositional sentences over countably many atoms, with a total enumeration.

Concrete syntax (whitespace between tokens is ignored):

    sentence := '_|_'                      falsum
              | 'a' DIGITS                 atom, e.g. a0, a17
              | '!' sentence               negation
              | '(' sentence '&' sentence ')'
              | '(' sentence '|' sentence ')'
              | '(' sentence '->' sentence ')'

Binary connectives always carry their parentheses; negation does not.

The enumeration maps every natural number to a sentence and back. Index 0 is
falsum; any other index k is split as (k-1) = 5*payload + tag, where the tag
selects the constructor and the payload carries an atom index, a child index,
or a Cantor-paired child pair. Decoding is polynomial in the bit length of k.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Callable, Union

# Chain-shaped sequence members nest one level per index, and indexes run up
# to the stage step budget (512 under the standard schedule). Recursive
# traversal of such a member needs roughly one frame per level on top of
# whatever stack the host process already uses, so the default 1000-frame
# limit has no headroom. Never lower a limit the host raised already.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))


class _HashSlot:
    # Nodes nest hundreds of levels deep, so the recursive structural hash is
    # computed once per node and cached here rather than on every lookup.
    __slots__ = ("_hs",)


@dataclass(frozen=True, slots=True)
class Bottom(_HashSlot):
    def __hash__(self) -> int:
        return 0x5F0


@dataclass(frozen=True, slots=True)
class Atom(_HashSlot):
    index: int

    def __hash__(self) -> int:
        try:
            return self._hs
        except AttributeError:
            h = hash((0, self.index))
            object.__setattr__(self, "_hs", h)
            return h


@dataclass(frozen=True, slots=True)
class Not(_HashSlot):
    inner: "Sentence"

    def __hash__(self) -> int:
        try:
            return self._hs
        except AttributeError:
            h = hash((1, hash(self.inner)))
            object.__setattr__(self, "_hs", h)
            return h


@dataclass(frozen=True, slots=True)
class And(_HashSlot):
    left: "Sentence"
    right: "Sentence"

    def __hash__(self) -> int:
        try:
            return self._hs
        except AttributeError:
            h = hash((2, hash(self.left), hash(self.right)))
            object.__setattr__(self, "_hs", h)
            return h


@dataclass(frozen=True, slots=True)
class Or(_HashSlot):
    left: "Sentence"
    right: "Sentence"

    def __hash__(self) -> int:
        try:
            return self._hs
        except AttributeError:
            h = hash((3, hash(self.left), hash(self.right)))
            object.__setattr__(self, "_hs", h)
            return h


@dataclass(frozen=True, slots=True)
class Implies(_HashSlot):
    left: "Sentence"
    right: "Sentence"

    def __hash__(self) -> int:
        try:
            return self._hs
        except AttributeError:
            h = hash((4, hash(self.left), hash(self.right)))
            object.__setattr__(self, "_hs", h)
            return h


Sentence = Union[Bottom, Atom, Not, And, Or, Implies]

BOTTOM = Bottom()

_TAG_ATOM, _TAG_NOT, _TAG_AND, _TAG_OR, _TAG_IMPLIES = range(5)


def _pair(x: int, y: int) -> int:
    s = x + y
    return s * (s + 1) // 2 + y


def _unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


@lru_cache(maxsize=1 << 17)
def sentence_at(k: int) -> Sentence:
    """Sentence with enumeration index k (total; the inverse of sentence_index)."""
    if k < 0:
        raise ValueError("index must be a natural number")
    if k == 0:
        return BOTTOM
    m = k - 1
    tag = m % 5
    payload = m // 5
    if tag == _TAG_ATOM:
        return Atom(payload)
    if tag == _TAG_NOT:
        return Not(sentence_at(payload))
    a, b = _unpair(payload)
    if tag == _TAG_AND:
        return And(sentence_at(a), sentence_at(b))
    if tag == _TAG_OR:
        return Or(sentence_at(a), sentence_at(b))
    return Implies(sentence_at(a), sentence_at(b))


@lru_cache(maxsize=1 << 17)
def sentence_index(s: Sentence) -> int:
    if isinstance(s, Bottom):
        return 0
    if isinstance(s, Atom):
        return 1 + 5 * s.index + _TAG_ATOM
    if isinstance(s, Not):
        return 1 + 5 * sentence_index(s.inner) + _TAG_NOT
    if isinstance(s, And):
        return 1 + 5 * _pair(sentence_index(s.left), sentence_index(s.right)) + _TAG_AND
    if isinstance(s, Or):
        return 1 + 5 * _pair(sentence_index(s.left), sentence_index(s.right)) + _TAG_OR
    if isinstance(s, Implies):
        return 1 + 5 * _pair(sentence_index(s.left), sentence_index(s.right)) + _TAG_IMPLIES
    raise TypeError(f"not a sentence: {s!r}")


def decode_cost(k: int) -> int:
    """Number of elementary decode steps for sentence_at(k); used to check
    that decoding stays polynomial in the bit length of k."""
    steps = 1
    if k == 0:
        return steps
    stack = [k]
    while stack:
        j = stack.pop()
        if j == 0:
            continue
        m = j - 1
        tag = m % 5
        payload = m // 5
        steps += 1
        if tag == _TAG_NOT:
            stack.append(payload)
        elif tag != _TAG_ATOM:
            a, b = _unpair(payload)
            stack.append(a)
            stack.append(b)
    return steps


def sentence_size(s: Sentence) -> int:
    """AST node count plus the bit length of every atom index (min 1 per atom)."""
    if isinstance(s, Bottom):
        return 1
    if isinstance(s, Atom):
        return 1 + max(1, s.index.bit_length())
    if isinstance(s, Not):
        return 1 + sentence_size(s.inner)
    return 1 + sentence_size(s.left) + sentence_size(s.right)


@lru_cache(maxsize=1 << 16)
def atoms_of(s: Sentence) -> frozenset[int]:
    if isinstance(s, Bottom):
        return frozenset()
    if isinstance(s, Atom):
        return frozenset((s.index,))
    if isinstance(s, Not):
        return atoms_of(s.inner)
    return atoms_of(s.left) | atoms_of(s.right)


class ParseError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, literal: str) -> None:
        if not self.text.startswith(literal, self.pos):
            raise ParseError(f"expected {literal!r}", self.pos)
        self.pos += len(literal)

    def sentence(self) -> Sentence:
        self.skip_ws()
        c = self.peek()
        if c == "!":
            self.pos += 1
            return Not(self.sentence())
        if c == "_":
            self.expect("_|_")
            return BOTTOM
        if c == "a":
            self.pos += 1
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == start:
                raise ParseError("expected atom index", start)
            return Atom(int(self.text[start : self.pos]))
        if c == "(":
            self.pos += 1
            left = self.sentence()
            self.skip_ws()
            op = self.peek()
            if op == "&":
                self.pos += 1
                ctor: Callable[[Sentence, Sentence], Sentence] = And
            elif op == "|":
                self.pos += 1
                ctor = Or
            elif op == "-":
                self.expect("->")
                ctor = Implies
            else:
                raise ParseError("expected connective '&', '|' or '->'", self.pos)
            right = self.sentence()
            self.skip_ws()
            self.expect(")")
            return ctor(left, right)
        raise ParseError("expected sentence", self.pos)


def parse_sentence(text: str) -> Sentence:
    p = _Parser(text)
    s = p.sentence()
    p.skip_ws()
    if p.pos != len(text):
        raise ParseError("trailing input", p.pos)
    return s


@lru_cache(maxsize=1 << 16)
def render_sentence(s: Sentence) -> str:
    # Iterative so that deeply nested sentences never hit the recursion limit.
    parts: list[str] = []
    stack: list[object] = [s]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
        elif isinstance(item, Bottom):
            parts.append("_|_")
        elif isinstance(item, Atom):
            parts.append(f"a{item.index}")
        elif isinstance(item, Not):
            parts.append("!")
            stack.append(item.inner)
        elif isinstance(item, And):
            stack += (")", item.right, " & ", item.left, "(")
        elif isinstance(item, Or):
            stack += (")", item.right, " | ", item.left, "(")
        elif isinstance(item, Implies):
            stack += (")", item.right, " -> ", item.left, "(")
        else:
            raise TypeError(f"not a sentence: {item!r}")
    return "".join(parts)


TOP = Implies(BOTTOM, BOTTOM)


@dataclass(frozen=True)
class Theory:
    """A deterministic total axiom list. axiom_at(i) must be defined for all i."""

    name: str
    axiom_at: Callable[[int], Sentence]


EMPTY_THEORY = Theory("empty", lambda i: TOP)


def theory_from_axioms(name: str, axioms: list[Sentence]) -> Theory:
    """Finite axiom list padded with the trivial tautology."""
    frozen = tuple(axioms)

    def axiom_at(i: int) -> Sentence:
        return frozen[i] if i < len(frozen) else TOP

    return Theory(name, axiom_at)

"""Builtin sentence sequences and partition helpers.

Every family is total in n and cheap to evaluate. The catalog order is
load-bearing: the program decoder assigns generator slots by position in
builtin_catalog(), so reordering entries changes every encoded program.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Callable, Optional

from .logic import (
    And,
    Atom,
    BOTTOM,
    Not,
    Or,
    Sentence,
    atoms_of,
    sentence_at,
)
from .bits import Bits


@dataclass(frozen=True)
class SequenceDef:
    id: str
    kind: str  # "builtin" or "machine"
    description: str
    emit: Callable[[int], Sentence] = field(compare=False)
    machine_prefix: Optional[Bits] = field(default=None, compare=False)


def generate(seq: SequenceDef, n: int) -> Sentence:
    if n < 0:
        raise ValueError("sequence position must be a natural number")
    return seq.emit(n)


def _tautology(n: int) -> Sentence:
    return Or(Atom(n), Not(Atom(n)))


def _neg_atom(n: int) -> Sentence:
    return Not(Atom(n))


def _atom(n: int) -> Sentence:
    return Atom(n)


# Split families case on a shadow atom paired with the diagonal one. The
# shadow lives far above any diagonal position a run can reach, so distinct
# members of one split family never mention each other's atoms and a streamed
# run of them stays jointly satisfiable.
_SHADOW = 1024
_DEEP_SHADOW = 2048


def _split_rest(n: int) -> Sentence:
    return And(Not(Atom(n)), Not(Atom(_SHADOW + n)))


def _double_neg(n: int) -> Sentence:
    return Not(Not(Atom(n)))


def _deep_split_rest(n: int) -> Sentence:
    return And(Not(Atom(n)), And(Not(Atom(_SHADOW + n)), Not(Atom(_DEEP_SHADOW + n))))


def _split_next(n: int) -> Sentence:
    return And(Not(Atom(n)), Atom(_SHADOW + n))


def _deep_split_next(n: int) -> Sentence:
    return And(Not(Atom(n)), And(Not(Atom(_SHADOW + n)), Atom(_DEEP_SHADOW + n)))


def _deep_split_merge(n: int) -> Sentence:
    return Or(_deep_split_next(n), _deep_split_rest(n))


def _monotone(n: int) -> Sentence:
    return reduce(lambda acc, i: Or(acc, Atom(i)), range(1, n + 1), Atom(0))


def _mutex(n: int) -> Sentence:
    if n == 0:
        return Atom(0)
    blockers: Sentence = Not(Atom(n - 1))
    for i in range(n - 2, -1, -1):
        blockers = And(Not(Atom(i)), blockers)
    return And(Atom(n), blockers)


def _enumeration(n: int) -> Sentence:
    return sentence_at(n)


def _neg_tautology(n: int) -> Sentence:
    return Not(_tautology(n))


def _exactly_one(phi: Sentence, psi: Sentence, chi: Sentence) -> Sentence:
    only_phi = And(phi, And(Not(psi), Not(chi)))
    only_psi = And(Not(phi), And(psi, Not(chi)))
    only_chi = And(Not(phi), And(Not(psi), chi))
    return Or(Or(only_phi, only_psi), only_chi)


def _partition_tautology(n: int) -> Sentence:
    return _exactly_one(_atom(n), _split_next(n), _split_rest(n))


# Slot position sets the stream rate: slot s costs |gamma(s+1)| header bits,
# so low slots fire often. Families whose trends need mass sit low; the
# equivalent pair (atom, double negation) shares one tier so neither is
# favored; falsum and the contradiction family never pass the gate at any
# rate, so they sit high.
_FAMILIES: tuple[tuple[str, str, Callable[[int], Sentence]], ...] = (
    ("neg_atom_chain", "not a_n", _neg_atom),
    ("tautology_chain", "a_n or not a_n", _tautology),
    ("split_rest", "not a_n and not the shadow atom", _split_rest),
    ("atom_chain", "a_n", _atom),
    ("double_neg_chain", "not not a_n", _double_neg),
    ("split_next", "not a_n and the shadow atom", _split_next),
    ("deep_split_merge", "either deep-shadow cut of the rest cell", _deep_split_merge),
    ("monotone_chain", "a_0 or ... or a_n (each member implies the next)", _monotone),
    ("mutex_family", "a_n is the first true atom (pairwise exclusive)", _mutex),
    ("constant_bottom", "falsum at every position", lambda n: BOTTOM),
    ("neg_tautology_chain", "negated tautology (contradiction) at every position", _neg_tautology),
    ("enumeration", "the n-th sentence of the canonical enumeration", _enumeration),
    ("partition_tautology", "exactly-one-of-three composite over the canonical split", _partition_tautology),
)


@lru_cache(maxsize=1)
def builtin_catalog() -> tuple[SequenceDef, ...]:
    """All builtin families, in generator-slot order."""
    return tuple(SequenceDef(fid, "builtin", desc, emit) for fid, desc, emit in _FAMILIES)


@lru_cache(maxsize=1)
def catalog_by_id() -> dict[str, SequenceDef]:
    return {seq.id: seq for seq in builtin_catalog()}


def sequence_by_id(fid: str) -> SequenceDef:
    try:
        return catalog_by_id()[fid]
    except KeyError:
        raise KeyError(f"unknown sequence family: {fid!r}") from None


def constant_of(phi: Sentence, fid: Optional[str] = None) -> SequenceDef:
    """The constant sequence that emits phi at every position."""
    name = fid if fid is not None else f"constant({phi!r})"
    return SequenceDef(name, "builtin", "a fixed sentence at every position", lambda n: phi)


@dataclass(frozen=True)
class PartitionTriple:
    phi: SequenceDef
    psi: SequenceDef
    chi: SequenceDef


def canonical_partition() -> PartitionTriple:
    by_id = catalog_by_id()
    return PartitionTriple(by_id["atom_chain"], by_id["split_next"], by_id["split_rest"])


def refined_partition() -> tuple[SequenceDef, SequenceDef, SequenceDef, SequenceDef]:
    """Four-way partition: the rest cell of the canonical split, cut by the
    deep shadow atom. Sum trends are checked on the merged triple (atom_chain,
    split_next, deep_split_merge), which rejoins the last two cells; the cut
    cells themselves stay out of the catalog."""
    by_id = catalog_by_id()
    cut_in = SequenceDef(
        "deep_split_next", "builtin", "not a_n, not the shadow atom, the deep shadow atom", _deep_split_next
    )
    cut_out = SequenceDef("deep_split_rest", "builtin", "not a_n and neither shadow atom", _deep_split_rest)
    return by_id["atom_chain"], by_id["split_next"], cut_in, cut_out


def merged_partition() -> PartitionTriple:
    """The refined partition with its last two cells disjoined into one
    sequence; a valid triple in its own right."""
    by_id = catalog_by_id()
    return PartitionTriple(by_id["atom_chain"], by_id["split_next"], by_id["deep_split_merge"])


def equiv_pair() -> tuple[SequenceDef, SequenceDef]:
    """Two families whose members are pairwise semantically equivalent."""
    by_id = catalog_by_id()
    return by_id["atom_chain"], by_id["double_neg_chain"]


MAX_PARTITION_ATOMS = 20


@dataclass(frozen=True)
class PartitionReport:
    ok: bool
    checked: int
    first_failure: Optional[int] = None


def validate_partition(triple: PartitionTriple, n_max: int) -> PartitionReport:
    """Check that exactly one member is true under every assignment, for each
    position up to n_max inclusive."""
    from .prover import truth_table

    for n in range(n_max + 1):
        members = [generate(triple.phi, n), generate(triple.psi, n), generate(triple.chi, n)]
        atoms: set[int] = set()
        for s in members:
            atoms |= atoms_of(s)
        if len(atoms) > MAX_PARTITION_ATOMS:
            raise ValueError(f"{len(atoms)} atoms at position {n} exceeds cap {MAX_PARTITION_ATOMS}")
        order = sorted(atoms)
        full = (1 << (1 << len(order))) - 1
        m1, m2, m3 = (truth_table(s, order) for s in members)
        exactly_one = (m1 & ~m2 & ~m3) | (~m1 & m2 & ~m3) | (~m1 & ~m2 & m3)
        if (exactly_one & full) != full:
            return PartitionReport(False, n + 1, first_failure=n)
    return PartitionReport(True, n_max + 1)

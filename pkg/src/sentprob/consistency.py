"""Bounded consistency gate over claim sets.

``consistent_enough`` is the acceptance test a claim set must pass before it
absorbs new sentences: a direct bounded refutation attempt, plus an optional
probe stage that rejects a set whenever some subset can be refuted under a
probe sentence and under its negation (which pins the subset as contradictory
even when the direct attempt runs out of budget).

The gate is deliberately one-sided. False means a contradiction was exhibited
within budget; true means none was found, not that none exists. Adding
sentences to a set can therefore only move the verdict from true to false,
never back (``antitone_check`` spot-checks that law).

Probe sentences come from a prefix of the canonical enumeration: the first
``probe_pool_cap`` indices are scanned and those within the size cap kept, so
raising the size cap only ever adds probes. The subset stage recurses with a
shrinking depth allowance; depth 0 is the plain refutation check. Verdicts
are memoized per (claim-set key, remaining depth) in a ``ConCache``, which is
an idempotent map and may be shared across calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional

from .logic import Not, Sentence, render_sentence, sentence_at, sentence_size
from .prover import refute_bounded


@dataclass(frozen=True, slots=True)
class ConParams:
    proof_budget: int
    sentence_size_cap: int = 64
    probe_pool_cap: int = 256
    subset_cap: int = 12
    probe_depth: int = 1

    def __post_init__(self) -> None:
        for name in ("proof_budget", "sentence_size_cap", "probe_pool_cap",
                     "subset_cap", "probe_depth"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be a natural number")


class SetCapExceeded(Exception):
    """Claim set too large for the subset probe stage; scale the set or the
    params down rather than silently approximating."""

    def __init__(self, size: int, cap: int) -> None:
        super().__init__(
            f"claim set has {size} members; the subset stage is capped at {cap}"
        )
        self.size = size
        self.cap = cap


class ClaimSet:
    """Immutable sentence set with a canonical order (ascending rendering),
    so equal sets always produce the same memo key. Renderings rather than
    enumeration indices: the index of a deeply nested sentence has more bits
    than could ever be materialized, while its rendering stays linear."""

    __slots__ = ("sentences", "key", "_named")

    def __init__(self, named: dict[str, Sentence]):
        self.key = tuple(sorted(named))
        self.sentences = tuple(named[r] for r in self.key)
        self._named = named

    @classmethod
    def of(cls, items: Iterable[Sentence] = ()) -> "ClaimSet":
        return cls({render_sentence(s): s for s in items})

    def union(self, items: Iterable[Sentence]) -> "ClaimSet":
        extra: dict[str, Sentence] = {}
        for s in items:
            r = render_sentence(s)
            if r not in self._named and r not in extra:
                extra[r] = s
        if not extra:
            return self
        merged = dict(self._named)
        merged.update(extra)
        return ClaimSet(merged)

    def __contains__(self, s: Sentence) -> bool:
        return render_sentence(s) in self._named

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)

    def __bool__(self) -> bool:
        return bool(self.sentences)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ClaimSet) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"ClaimSet(<{len(self.sentences)} sentences>)"


EMPTY_CLAIMS = ClaimSet.of(())


class ConCache:
    """Shared memo for consistency verdicts, plus counters the harness can
    report. Keys are (claim-set key, remaining probe depth)."""

    __slots__ = ("data", "hits", "misses", "max_depth")

    def __init__(self) -> None:
        self.data: dict[tuple[tuple[str, ...], int], bool] = {}
        self.hits = 0
        self.misses = 0
        self.max_depth = 0

    def stats(self) -> dict[str, int]:
        return {
            "entries": len(self.data),
            "hits": self.hits,
            "misses": self.misses,
            "max_depth": self.max_depth,
        }


@lru_cache(maxsize=64)
def probe_pool(pool_cap: int, size_cap: int) -> tuple[Sentence, ...]:
    """First pool_cap enumeration indices, keeping sentences within the size
    cap. The scanned prefix is fixed by pool_cap alone."""
    return tuple(
        s for s in map(sentence_at, range(pool_cap)) if sentence_size(s) <= size_cap
    )


def consistent_enough(
    claims: ClaimSet, params: ConParams, cache: Optional[ConCache] = None
) -> bool:
    """False iff a contradiction in the claims is exhibited within budget,
    either by direct refutation or through the subset probe stage."""
    if cache is None:
        cache = ConCache()
    return _verdict(claims, params.probe_depth, params, cache)


def _verdict(claims: ClaimSet, depth: int, params: ConParams, cache: ConCache) -> bool:
    key = (claims.key, depth)
    cached = cache.data.get(key)
    if cached is not None:
        cache.hits += 1
        return cached
    cache.misses += 1
    level = params.probe_depth - depth
    if level > cache.max_depth:
        cache.max_depth = level
    result = not refute_bounded(claims.sentences, params.proof_budget).refuted
    if result and depth > 0:
        result = _probe_stage(claims, depth, params, cache)
    cache.data[key] = result
    return result


def _probe_stage(claims: ClaimSet, depth: int, params: ConParams, cache: ConCache) -> bool:
    if len(claims) > params.subset_cap:
        raise SetCapExceeded(len(claims), params.subset_cap)
    pool = probe_pool(params.probe_pool_cap, params.sentence_size_cap)
    members = claims.sentences
    for mask in range(1 << len(members)):
        subset = tuple(members[i] for i in range(len(members)) if mask >> i & 1)
        base = ClaimSet.of(subset)
        for probe in pool:
            negated = Not(probe)
            if probe in base or negated in base:
                continue
            if _verdict(base.union((probe,)), depth - 1, params, cache):
                continue
            if not _verdict(base.union((negated,)), depth - 1, params, cache):
                return False
    return True


def antitone_check(
    claims: ClaimSet,
    extra: Sentence,
    params: ConParams,
    cache: Optional[ConCache] = None,
) -> bool:
    """Property-test helper: true unless adding ``extra`` turned a rejected
    set into an accepted one, which the gate must never do."""
    if cache is None:
        cache = ConCache()
    base = consistent_enough(claims, params, cache)
    grown = consistent_enough(claims.union((extra,)), params, cache)
    return not (base is False and grown is True)

import random

import pytest

from sentprob.logic import (
    BOTTOM,
    EMPTY_THEORY,
    TOP,
    And,
    Atom,
    Implies,
    Not,
    Or,
    theory_from_axioms,
)
from sentprob.prover import (
    MAX_TABLE_ATOMS,
    AtomLimitError,
    RefutationVerdict,
    clausify,
    clausify_set,
    entails,
    is_theorem_bounded,
    refute_bounded,
    semantic_consistent,
    truth_table,
)


def rand_sentence(rng, depth, atoms=3):
    if depth == 0 or rng.random() < 0.25:
        k = rng.randrange(atoms + 1)
        return BOTTOM if k == atoms else Atom(k)
    op = rng.randrange(4)
    if op == 0:
        return Not(rand_sentence(rng, depth - 1, atoms))
    left = rand_sentence(rng, depth - 1, atoms)
    right = rand_sentence(rng, depth - 1, atoms)
    return (And, Or, Implies)[op - 1](left, right)


def test_direct_contradiction_refutes_quickly():
    r = refute_bounded([Atom(0), Not(Atom(0))], 4)
    assert r.verdict is RefutationVerdict.REFUTED
    assert r.refuted
    assert r.steps_used <= 4


def test_single_atom_saturates():
    r = refute_bounded([Atom(0)], 10_000)
    assert r.verdict is RefutationVerdict.UNKNOWN
    assert r.saturated
    assert not r.refuted


def test_modus_ponens_refutation():
    r = refute_bounded([Implies(Atom(0), Atom(1)), Atom(0), Not(Atom(1))], 16)
    assert r.refuted
    assert r.steps_used == 5


def test_bottom_refutes_at_setup():
    r = refute_bounded([BOTTOM], 0)
    assert r.refuted
    assert r.steps_used == 0


def test_zero_budget_is_unknown_without_setup_contradiction():
    r = refute_bounded([Atom(0), Not(Atom(0))], 0)
    assert r.verdict is RefutationVerdict.UNKNOWN
    assert not r.saturated


def test_duplicate_sentences_collapse():
    a = refute_bounded([Atom(0), Atom(0), Not(Atom(0))], 8)
    b = refute_bounded([Atom(0), Not(Atom(0))], 8)
    assert a == b


def test_clausify_basics():
    assert clausify(BOTTOM) == {frozenset()}
    assert clausify(Atom(0)) == {frozenset({1})}
    assert clausify(Not(Atom(2))) == {frozenset({-3})}


def test_clausify_fresh_atoms_clear_source_range():
    for cl in clausify_set([Or(Atom(0), Atom(1)), Implies(Atom(2), Atom(0))]):
        for lit in cl:
            assert abs(lit) <= 3 or abs(lit) >= 2**32


def test_truth_table_semantics():
    assert truth_table(TOP, [0]) == 0b11
    assert truth_table(BOTTOM, [0]) == 0
    a0 = truth_table(Atom(0), [0, 1])
    na0 = truth_table(Not(Atom(0)), [0, 1])
    assert a0 & na0 == 0
    assert a0 | na0 == 0b1111
    assert truth_table(And(Atom(0), Atom(1)), [0, 1]) == a0 & truth_table(Atom(1), [0, 1])


def test_truth_table_atom_limit():
    wide = Atom(0)
    for i in range(1, MAX_TABLE_ATOMS + 1):
        wide = Or(wide, Atom(i))
    with pytest.raises(AtomLimitError):
        semantic_consistent([wide])


def test_semantic_consistent_examples():
    assert semantic_consistent([])
    assert semantic_consistent([Atom(0)])
    assert not semantic_consistent([Atom(0), Not(Atom(0))])
    assert not semantic_consistent([Or(Atom(0), Atom(1)), Not(Atom(0)), Not(Atom(1))])


def test_entails():
    assert entails([Atom(0), Implies(Atom(0), Atom(1))], Atom(1))
    assert not entails([Atom(0)], Atom(1))
    assert entails([], TOP)
    assert entails([BOTTOM], Atom(5))


def test_is_theorem_bounded():
    assert is_theorem_bounded(TOP, EMPTY_THEORY, 0, 64)
    assert not is_theorem_bounded(Atom(0), EMPTY_THEORY, 0, 64)
    t = theory_from_axioms("mp", [Atom(0), Implies(Atom(0), Atom(1))])
    assert is_theorem_bounded(Atom(1), t, 2, 64)
    assert not is_theorem_bounded(Atom(1), t, 1, 64)


def test_agrees_with_semantic_oracle_on_random_sets():
    rng = random.Random(31337)
    for _ in range(600):
        sents = [rand_sentence(rng, 3) for _ in range(rng.randrange(1, 4))]
        sat = semantic_consistent(sents)
        r = refute_bounded(sents, 10_000)
        if sat:
            assert not r.refuted
        else:
            assert r.refuted


def test_saturation_implies_satisfiable():
    rng = random.Random(4242)
    for _ in range(400):
        sents = [rand_sentence(rng, 2) for _ in range(rng.randrange(1, 4))]
        r = refute_bounded(sents, 10_000)
        if r.saturated:
            assert semantic_consistent(sents)


def test_budget_monotone():
    rng = random.Random(777)
    for _ in range(120):
        sents = [rand_sentence(rng, 3) for _ in range(rng.randrange(1, 4))]
        low = refute_bounded(sents, 8)
        high = refute_bounded(sents, 2_000)
        if low.refuted:
            assert high.refuted
            assert high.steps_used == low.steps_used
        assert low.steps_used <= 8


def test_deterministic_across_input_order():
    sents = [Implies(Atom(0), Atom(1)), Not(Atom(1)), Atom(0)]
    a = refute_bounded(sents, 64)
    b = refute_bounded(list(reversed(sents)), 64)
    assert a == b

import pytest
from hypothesis import given, settings, strategies as st

from dcsys.oracle import (
    MAX_ORACLE_ATOMS,
    TheoryGenParams,
    count_answer_sets,
    enumerate_answer_sets,
    random_theory,
)
from dcsys.theory import CONSTRAINT, HORN, validate_theory

from conftest import make_theory


def test_trivial_theories():
    assert enumerate_answer_sets(make_theory(1)) == {frozenset(), frozenset({1})}
    assert enumerate_answer_sets(make_theory(1, clauses=[(1,), (-1,)])) == set()
    assert count_answer_sets(make_theory(0)) == 1


def test_small_graph(small_theory):
    assert enumerate_answer_sets(small_theory) == set()


def test_refuses_large_theories():
    with pytest.raises(ValueError):
        enumerate_answer_sets(make_theory(MAX_ORACLE_ATOMS + 1))
    with pytest.raises(ValueError):
        TheoryGenParams(n_c_atoms=MAX_ORACLE_ATOMS + 1)
    with pytest.raises(ValueError):
        TheoryGenParams(n_clauses=-1)


def test_generator_determinism_and_empty():
    p = TheoryGenParams(seed=7)
    assert random_theory(p) == random_theory(p)
    assert random_theory(TheoryGenParams(0, 0, 0, 0, 0, 0)) == make_theory(0)


def test_generated_theories_are_valid():
    for seed in range(500):
        t = random_theory(TheoryGenParams(10, 6, 10, 4, 8, 4, seed))
        assert validate_theory(t) == []
        for s in t.selects:
            assert 0 <= s.lower <= len(s.scope) and (s.upper is None or s.lower <= s.upper <= len(s.scope))
        assert all(t.atom(r.head).kind == HORN for r in t.horn)
        assert all(t.atom(abs(l)).kind == CONSTRAINT for cl in t.clauses for l in cl)


def test_clause_length_bias():
    lengths = [len(cl) for seed in range(200) for cl in random_theory(TheoryGenParams(10, 0, 10, 0, 0, 0, seed)).clauses]
    share = sum(2 <= n <= 3 for n in lengths) / len(lengths)
    assert 0.45 < share < 0.8


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_count_matches_enumeration(seed):
    t = random_theory(TheoryGenParams(9, 4, 8, 3, 6, 3, seed))
    assert count_answer_sets(t) == len(enumerate_answer_sets(t))

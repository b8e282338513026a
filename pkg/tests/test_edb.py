import pytest
from hypothesis import given, strategies as st

from dcsys.edb import (
    ConstantBinding,
    apply_bindings,
    format_edb,
    merge,
    parse_edb,
)
from dcsys.errors import DCSyntaxError, EDBError

from conftest import SMALL_GRAPH


def test_binding_replaces_range_bound():
    assert apply_bindings("queens[1..q].", {"q": 8}) == "queens[1..8]."


def test_binding_identity_without_labels():
    assert apply_bindings("vtx(1).", {}) == "vtx(1)."


def test_binding_respects_token_boundaries():
    assert apply_bindings("qq(q).", {"q": 3}) == "qq(3)."
    assert apply_bindings("q1(q_). q.", {"q": 3}) == "q1(q_). 3."


def test_binding_is_single_pass():
    assert apply_bindings("a(b).", [ConstantBinding("a", "b"), ConstantBinding("b", "c")]) == "b(c)."


def test_binding_parse():
    assert ConstantBinding.parse("n=14") == ConstantBinding("n", "14")
    for bad in ("n", "=3", "n=", "3=4", "n=a b"):
        with pytest.raises(ValueError):
            ConstantBinding.parse(bad)


def test_graph_facts():
    db = parse_edb(SMALL_GRAPH)
    assert db["vtx"].arity == 1 and list(db["vtx"].tuples) == [(1,), (2,), (3,)]
    assert list(db["edge"].tuples) == [(1, 3), (3, 2)]


def test_range_expands_ascending():
    db = parse_edb("queens[1..8].")
    assert [t[0] for t in db["queens"].tuples] == list(range(1, 9))


def test_empty_range_and_empty_text():
    assert len(parse_edb("r[3..2].")["r"]) == 0
    assert parse_edb("") == parse_edb("% only a comment\n")


def test_set_fact_and_comments():
    db = parse_edb("% colours\ncol(r;g;b).\ncol(r).")
    assert [t[0] for t in db["col"].tuples] == ["r", "g", "b"]


def test_syntax_errors_carry_location():
    with pytest.raises(DCSyntaxError) as err:
        parse_edb("vtx(1).\nvtx(2")
    assert err.value.line == 2
    with pytest.raises(EDBError, match="not an integer"):
        parse_edb("r[a..3].")


def test_arity_conflict():
    with pytest.raises(EDBError):
        parse_edb("vtx(1). vtx(1,2).")
    with pytest.raises(EDBError):
        merge([parse_edb("vtx(1)."), parse_edb("vtx(1,2).")])


def test_merge():
    a, b = parse_edb("vtx(1)."), parse_edb("vtx(2). vtx(1).")
    assert merge([a, b]) == parse_edb("vtx(1). vtx(2).")
    assert merge([a, parse_edb("")]) == a


def test_domain_order():
    assert parse_edb("n(3). n(1). n(2).").domain("n") == [1, 2, 3]
    assert parse_edb("c(g). c(r). c(b).").domain("c") == ["g", "r", "b"]


constants = st.one_of(st.integers(-50, 50), st.from_regex(r"[a-z][a-z0-9_]{0,4}", fullmatch=True))


@given(st.lists(st.tuples(st.sampled_from(["p", "q", "rel"]), st.lists(constants, min_size=1, max_size=3)), max_size=20))
def test_format_round_trip(facts):
    arity = {}
    text = []
    for name, args in facts:
        name = f"{name}{len(args)}"
        arity.setdefault(name, len(args))
        text.append(f"{name}({','.join(map(str, args))}).")
    db = parse_edb("\n".join(text))
    again = parse_edb(format_edb(db))
    assert again == db
    assert all(list(again[n].tuples) == list(db[n].tuples) for n in arity)


@given(st.integers(-20, 20), st.integers(0, 30))
def test_range_size(lo, width):
    assert len(parse_edb(f"r[{lo}..{lo + width}].")["r"]) == width + 1


@given(st.text(alphabet="abq(),. 123=\n", max_size=40))
def test_bindings_idempotent(text):
    once = apply_bindings(text, {"q": 7})
    assert apply_bindings(once, {"q": 7}) == once

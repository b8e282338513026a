"""Extensional database: data files of facts, element sets and integer ranges.

Accepted statements (``%`` starts a comment)::

    vtx(1).            individual fact, any arity
    col(red;green).    unary set, one tuple per element
    queens[1..8].      unary integer range, ascending
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from .errors import DCSyntaxError, EDBError
from .lexer import TokenStream

Constant = Union[int, str]
Row = tuple


@dataclass(frozen=True)
class ConstantBinding:
    """A ``-c label=value`` substitution."""

    label: str
    value: str

    @classmethod
    def parse(cls, text: str) -> "ConstantBinding":
        label, sep, value = text.partition("=")
        label, value = label.strip(), value.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", label) or not value or re.search(r"[\s(),.]", value):
            raise ValueError(f"bad constant binding {text!r}, expected label=value")
        return cls(label, value)


def _as_bindings(bindings) -> list[ConstantBinding]:
    if bindings is None:
        return []
    if isinstance(bindings, Mapping):
        return [ConstantBinding(k, str(v)) for k, v in bindings.items()]
    return list(bindings)


def apply_bindings(source_text: str, bindings) -> str:
    """Replace whole-token occurrences of each label by its value, in one pass."""
    table = {b.label: b.value for b in _as_bindings(bindings)}
    if not table:
        return source_text
    labels = sorted(table, key=len, reverse=True)
    pattern = re.compile(r"(?<![A-Za-z0-9_])(" + "|".join(map(re.escape, labels)) + r")(?![A-Za-z0-9_])")
    return pattern.sub(lambda m: table[m.group(1)], source_text)


def constant_from_text(text: str) -> Constant:
    try:
        return int(text)
    except ValueError:
        return text


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    tuples: tuple[Row, ...] = ()

    @cached_property
    def members(self) -> frozenset:
        return frozenset(self.tuples)

    def __contains__(self, row) -> bool:
        return tuple(row) in self.members

    def __len__(self) -> int:
        return len(self.tuples)


@dataclass(frozen=True)
class Database:
    relations: Mapping[str, Relation] = field(default_factory=dict)
    origin: tuple[str, ...] = ()

    def __contains__(self, name: str) -> bool:
        return name in self.relations

    def __getitem__(self, name: str) -> Relation:
        return self.relations[name]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Database):
            return NotImplemented
        return self._nonempty() == other._nonempty()

    def __hash__(self):
        return hash(tuple(self._nonempty().values()))

    def _nonempty(self) -> dict[str, Relation]:
        return {k: v for k, v in self.relations.items() if v.tuples}

    def domain(self, name: str) -> list[Constant]:
        """Constants of a unary relation in grounding order.

        All-integer relations are sorted numerically; anything containing
        a symbolic constant keeps first-appearance order.
        """
        rel = self.relations[name]
        values = [row[0] for row in rel.tuples]
        if all(isinstance(v, int) for v in values):
            return sorted(values)
        return values


class _Builder:
    def __init__(self):
        self.rows: dict[str, dict[Row, None]] = {}
        self.arity: dict[str, int] = {}

    def add(self, name: str, row: Row, where: str = ""):
        known = self.arity.setdefault(name, len(row))
        if known != len(row):
            raise EDBError(f"{where}relation {name} used with arity {known} and {len(row)}")
        self.rows.setdefault(name, {})[row] = None

    def declare(self, name: str, arity: int, where: str = ""):
        known = self.arity.setdefault(name, arity)
        if known != arity:
            raise EDBError(f"{where}relation {name} used with arity {known} and {arity}")
        self.rows.setdefault(name, {})

    def build(self, origin: Sequence[str] = ()) -> Database:
        rels = {name: Relation(name, self.arity[name], tuple(rows)) for name, rows in self.rows.items()}
        return Database(rels, tuple(origin))


def _constant(ts: TokenStream) -> Constant:
    tok = ts.peek()
    if ts.accept("-"):
        return -int(ts.expect_kind("int", "integer").text)
    if tok.kind == "int":
        ts.next()
        return int(tok.text)
    if tok.kind == "name":
        ts.next()
        return tok.text
    ts.error(f"expected a constant, found {tok.text or 'end of input'!r}")


def _int_bound(ts: TokenStream) -> int:
    tok = ts.peek()
    value = _constant(ts)
    if not isinstance(value, int):
        raise EDBError(f"{tok.line}:{tok.column}: range bound {value!r} is not an integer")
    return value


def parse_edb(source_text: str, origin: str = "") -> Database:
    ts = TokenStream(source_text)
    b = _Builder()
    while not ts.at_eof():
        head = ts.expect_kind("name", "relation name")
        where = f"{head.line}:{head.column}: "
        if ts.accept("["):
            lo = _int_bound(ts)
            ts.expect("..")
            hi = _int_bound(ts)
            ts.expect("]")
            b.declare(head.text, 1, where)
            for v in range(lo, hi + 1):
                b.add(head.text, (v,), where)
        elif ts.accept("("):
            args = [_constant(ts)]
            if ts.at(";"):
                while ts.accept(";"):
                    args.append(_constant(ts))
                ts.expect(")")
                for v in args:
                    b.add(head.text, (v,), where)
            else:
                while ts.accept(","):
                    args.append(_constant(ts))
                ts.expect(")")
                b.add(head.text, tuple(args), where)
        else:
            ts.error(f"expected '(' or '[' after {head.text}")
        ts.expect(".")
    return b.build([origin] if origin else [])


def merge(databases: Iterable[Database]) -> Database:
    b = _Builder()
    origin: list[str] = []
    for db in databases:
        origin.extend(db.origin)
        for rel in db.relations.values():
            b.declare(rel.name, rel.arity)
            for row in rel.tuples:
                b.add(rel.name, row)
    return b.build(origin)


def format_edb(db: Database) -> str:
    """Serialize as individual facts; ``parse_edb`` reads it back unchanged."""
    lines = []
    for rel in db.relations.values():
        for row in rel.tuples:
            lines.append(f"{rel.name}({','.join(map(str, row))}).")
    return "\n".join(lines) + ("\n" if lines else "")


def read_edb_files(paths: Sequence[str], bindings=None) -> Database:
    dbs = []
    for path in paths:
        with open(path) as fh:
            text = apply_bindings(fh.read(), bindings)
        try:
            dbs.append(parse_edb(text, origin=str(path)))
        except DCSyntaxError as exc:
            raise DCSyntaxError(f"{path}: {exc}") from None
    return merge(dbs)

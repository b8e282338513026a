"""Text format for ground theories (``.tdc``).

::

    dc 1 <natoms> <nclauses> <nselects> <nhorn> <npost>
    atom <id> <c|h> <name>
    cl <lit> ... 0
    sel <lower> <upper|-1> <id> ... 0
    horn <head> <body> ... 0
    post <lit> ... 0
    unsat

Lines starting with ``#`` are comments.  ``unsat`` replaces all
constraint lines when grounding already proved the theory unsatisfiable.
"""

from __future__ import annotations

import io
import re
from typing import TextIO, Union

from .edb import constant_from_text
from .errors import TdcError
from .theory import CONSTRAINT, HORN, GroundAtom, GroundTheory, HornClause, SelectConstraint, validate_theory

FORMAT_VERSION = 1
_NAME_RE = re.compile(r"^([^()\s,]+)(?:\(([^()\s]*)\))?$")


def format_tdc(theory: GroundTheory) -> str:
    out = io.StringIO()
    write_tdc(theory, out)
    return out.getvalue()


def write_tdc(theory: GroundTheory, sink: TextIO) -> None:
    t = theory
    if t.ground_unsat:
        counts = (0, 0, 0, 0)
    else:
        counts = (len(t.clauses), len(t.selects), len(t.horn), len(t.post))
    sink.write(f"dc {FORMAT_VERSION} {len(t.atoms)} {' '.join(map(str, counts))}\n")
    for a in t.atoms:
        sink.write(f"atom {a.id} {a.kind} {a.name}\n")
    if t.ground_unsat:
        sink.write("unsat\n")
        return
    for cl in t.clauses:
        sink.write("cl " + " ".join(map(str, cl)) + " 0\n")
    for s in t.selects:
        upper = -1 if s.upper is None else s.upper
        sink.write(f"sel {s.lower} {upper} " + " ".join(map(str, s.scope)) + " 0\n")
    for h in t.horn:
        sink.write(" ".join(["horn", str(h.head), *map(str, h.body), "0"]) + "\n")
    for cl in t.post:
        sink.write("post " + " ".join(map(str, cl)) + " 0\n")


def parse_atom_name(name: str) -> tuple[str, tuple]:
    m = _NAME_RE.match(name)
    if not m:
        raise TdcError(f"bad atom name {name!r}")
    pred, args = m.group(1), m.group(2)
    if args is None:
        return pred, ()
    if args == "":
        raise TdcError(f"bad atom name {name!r}")
    return pred, tuple(constant_from_text(a) for a in args.split(","))


def _ints(fields: list[str], lineno: int) -> list[int]:
    try:
        values = [int(f) for f in fields]
    except ValueError:
        raise TdcError(f"line {lineno}: expected integers, got {' '.join(fields)!r}") from None
    if not values or values[-1] != 0:
        raise TdcError(f"line {lineno}: list must end with 0")
    if 0 in values[:-1]:
        raise TdcError(f"line {lineno}: 0 inside a list")
    return values[:-1]


def parse_tdc(text: str) -> GroundTheory:
    lines = [(n, ln.strip()) for n, ln in enumerate(text.splitlines(), 1)]
    lines = [(n, ln) for n, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise TdcError("empty theory file")
    n, header = lines[0]
    fields = header.split()
    if len(fields) != 7 or fields[0] != "dc":
        raise TdcError(f"line {n}: malformed header {header!r}")
    try:
        version, *counts = (int(f) for f in fields[1:])
    except ValueError:
        raise TdcError(f"line {n}: malformed header {header!r}") from None
    if version != FORMAT_VERSION:
        raise TdcError(f"line {n}: unsupported format version {version}")
    theory = GroundTheory()
    for n, line in lines[1:]:
        kw, _, rest = line.partition(" ")
        fields = rest.split()
        if kw == "atom":
            if len(fields) != 3:
                raise TdcError(f"line {n}: malformed atom line")
            try:
                atom_id = int(fields[0])
            except ValueError:
                raise TdcError(f"line {n}: bad atom id {fields[0]!r}") from None
            if atom_id != len(theory.atoms) + 1:
                raise TdcError(f"line {n}: atom ids must be dense and ascending, got {atom_id}")
            if fields[1] not in (CONSTRAINT, HORN):
                raise TdcError(f"line {n}: unknown atom kind {fields[1]!r}")
            pred, args = parse_atom_name(fields[2])
            theory.atoms.append(GroundAtom(atom_id, pred, args, fields[1]))
        elif kw == "cl":
            theory.clauses.append(tuple(_ints(fields, n)))
        elif kw == "post":
            theory.post.append(tuple(_ints(fields, n)))
        elif kw == "sel":
            if len(fields) < 3:
                raise TdcError(f"line {n}: malformed sel line")
            try:
                lower, upper = int(fields[0]), int(fields[1])
            except ValueError:
                raise TdcError(f"line {n}: malformed sel bounds") from None
            if upper < -1 or lower < 0:
                raise TdcError(f"line {n}: bad sel bounds")
            scope = _ints(fields[2:], n)
            theory.selects.append(SelectConstraint(lower, None if upper == -1 else upper, tuple(scope)))
        elif kw == "horn":
            ids = _ints(fields, n)
            if not ids:
                raise TdcError(f"line {n}: horn rule without head")
            theory.horn.append(HornClause(ids[0], tuple(ids[1:])))
        elif kw == "unsat" and not fields:
            theory.ground_unsat = True
        else:
            raise TdcError(f"line {n}: unknown line type {kw!r}")
    found = (len(theory.atoms), len(theory.clauses), len(theory.selects), len(theory.horn), len(theory.post))
    if tuple(counts) != found:
        raise TdcError(f"header counts {tuple(counts)} do not match contents {found}")
    if theory.ground_unsat and any(found[1:]):
        raise TdcError("unsat theory must not list constraints")
    diags = validate_theory(theory)
    if diags:
        raise TdcError("; ".join(diags))
    return theory


def read_tdc(source: Union[TextIO, str]) -> GroundTheory:
    """Read from an open text stream, or from a path when given a string."""
    if isinstance(source, str):
        with open(source) as fh:
            return parse_tdc(fh.read())
    return parse_tdc(source.read())

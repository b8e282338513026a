"""Instantiate a rule program over a database into a ground DC theory."""

from __future__ import annotations

import os
from typing import Callable, Iterator, Mapping, Optional, Sequence

from .edb import Constant, ConstantBinding, Database
from .errors import GroundError
from .idb import (
    Atom,
    BinOp,
    Comparison,
    Condition,
    Const,
    DisjunctionRule,
    HornRule,
    ImplicationRule,
    Neg,
    NotRule,
    Program,
    Rule,
    SelectRule,
    Var,
    VarDecl,
    expr_variables,
    mentioned_variables,
)
from .tdc import read_tdc, write_tdc  # noqa: F401  (re-exported)
from .theory import CONSTRAINT, HORN, GroundAtom, GroundTheory, HornClause, SelectConstraint

Binding = Mapping[str, Constant]


# --- conditions --------------------------------------------------------------

def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def eval_expr(expr, binding: Binding) -> Constant:
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return binding[expr.name]
        except KeyError:
            raise GroundError(f"unbound variable {expr.name}") from None
    if isinstance(expr, Neg):
        v = eval_expr(expr.operand, binding)
        if not isinstance(v, int):
            raise GroundError(f"arithmetic on non-integer {v!r}")
        return -v
    if isinstance(expr, BinOp):
        a = eval_expr(expr.left, binding)
        b = eval_expr(expr.right, binding)
        if not isinstance(a, int) or not isinstance(b, int):
            raise GroundError(f"arithmetic on non-integer operands in {expr}")
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if b == 0:
            raise GroundError(f"division by zero in {expr}")
        q = _trunc_div(a, b)
        return q if expr.op == "/" else a - b * q
    raise GroundError(f"cannot evaluate {expr!r}")


def eval_condition(cond: Condition, binding: Binding, db: Database) -> bool:
    if isinstance(cond, Atom):
        row = tuple(eval_expr(t, binding) for t in cond.args)
        return cond.pred in db and row in db[cond.pred]
    left = eval_expr(cond.left, binding)
    right = eval_expr(cond.right, binding)
    op = cond.op
    if isinstance(left, int) and isinstance(right, int):
        return {
            "==": left == right, "!=": left != right,
            "<": left < right, "<=": left <= right,
            ">": left > right, ">=": left >= right,
        }[op]
    if op == "==":
        return str(left) == str(right)
    if op == "!=":
        return str(left) != str(right)
    raise GroundError(f"ordered comparison {cond} on non-integer values {left!r}, {right!r}")


def enumerate_bindings(
    variables: Sequence[VarDecl],
    conditions: Sequence[Condition],
    db: Database,
    base: Optional[Binding] = None,
) -> Iterator[dict[str, Constant]]:
    """Nested loops over the variables' ranges in declaration order.

    Each condition is tested as soon as all of its variables are bound.
    """
    base = dict(base or {})
    names = [v.name for v in variables]
    depth_of = {n: i + 1 for i, n in enumerate(names)}
    checks: list[list[Condition]] = [[] for _ in range(len(names) + 1)]
    for cond in conditions:
        level = 0
        for name in expr_variables(cond):
            if name in depth_of:
                level = max(level, depth_of[name])
            elif name not in base:
                raise GroundError(f"condition {cond} uses variable {name} outside its scope")
        checks[level].append(cond)
    if not all(eval_condition(c, base, db) for c in checks[0]):
        return
    domains = [db.domain(v.type) for v in variables]
    binding = dict(base)

    def rec(i: int):
        if i == len(names):
            yield dict(binding)
            return
        name = names[i]
        tests = checks[i + 1]
        for value in domains[i]:
            binding[name] = value
            if all(eval_condition(c, binding, db) for c in tests):
                yield from rec(i + 1)
        binding.pop(name, None)

    yield from rec(0)


# --- grounding ---------------------------------------------------------------

class _Grounder:
    def __init__(self, program: Program, db: Database, log: Optional[Callable[[str], None]]):
        self.program = program
        self.db = db
        self.log = log
        self.horn_preds = program.horn_predicates
        self.ids: dict[tuple, int] = {}
        self.theory = GroundTheory()
        self.seen_clauses: set = set()
        self.seen_post: set = set()
        self.seen_selects: set = set()
        self.seen_horn: set = set()

    def atom_id(self, atom: Atom, binding: Binding) -> int:
        args = tuple(eval_expr(t, binding) for t in atom.args)
        key = (atom.pred, args)
        found = self.ids.get(key)
        if found is None:
            found = len(self.theory.atoms) + 1
            kind = HORN if atom.pred in self.horn_preds else CONSTRAINT
            self.theory.atoms.append(GroundAtom(found, atom.pred, args, kind))
            self.ids[key] = found
        return found

    def free_vars(self, rule: Rule) -> list[VarDecl]:
        used = mentioned_variables(rule)
        return [v for v in self.program.variables if v.name in used]

    def add_clause(self, lits: list[int], post: bool):
        clause = tuple(dict.fromkeys(lits))
        if any(-lit in clause for lit in clause):
            return
        key = frozenset(clause)
        seen = self.seen_post if post else self.seen_clauses
        if key in seen:
            return
        seen.add(key)
        (self.theory.post if post else self.theory.clauses).append(clause)

    def ground_rule(self, rule: Rule, index: int = 0):
        variables = self.free_vars(rule)
        forall_conds = rule.forall.conditions if rule.forall else ()
        if isinstance(rule, SelectRule):
            self.ground_select(rule, variables, forall_conds, index)
            return
        for b in enumerate_bindings(variables, forall_conds, self.db):
            if isinstance(rule, HornRule):
                body = tuple(dict.fromkeys(self.atom_id(a, b) for a in rule.body))
                for h in rule.head:
                    hid = self.atom_id(h, b)
                    key = (hid, frozenset(body))
                    if key not in self.seen_horn:
                        self.seen_horn.add(key)
                        self.theory.horn.append(HornClause(hid, body))
            elif isinstance(rule, NotRule):
                self.add_clause([-self.atom_id(a, b) for a in rule.literals], rule.post)
            elif isinstance(rule, DisjunctionRule):
                self.add_clause([self.atom_id(a, b) for a in rule.literals], rule.post)
            elif isinstance(rule, ImplicationRule):
                neg_body = [-self.atom_id(a, b) for a in rule.body]
                heads = [self.atom_id(a, b) for a in rule.head]
                if rule.connective == "or":
                    self.add_clause(neg_body + heads, rule.post)
                else:
                    for h in heads:
                        self.add_clause(neg_body + [h], rule.post)
            else:
                raise GroundError(f"unknown rule type {type(rule).__name__}")

    def ground_select(self, rule: SelectRule, variables: list[VarDecl], forall_conds, index: int = 0):
        bound = set(rule.bound)
        outer = [v for v in variables if v.name not in bound]
        inner = [v for v in variables if v.name in bound]
        outer_names = {v.name for v in outer}
        outer_conds = [c for c in forall_conds if set(expr_variables(c)) <= outer_names]
        inner_conds = [c for c in forall_conds if c not in outer_conds] + list(rule.conditions)
        for ob in enumerate_bindings(outer, outer_conds, self.db):
            scope: dict[int, None] = {}
            for ib in enumerate_bindings(inner, inner_conds, self.db, base=ob):
                for t in rule.targets:
                    scope[self.atom_id(t, ib)] = None
            if len(scope) < rule.lower:
                if not self.theory.ground_unsat and self.log:
                    shown = ",".join(f"{k}={v}" for k, v in ob.items())
                    self.log(f"Select({rule.lower},...) with {len(scope)} candidate atoms at {shown or 'top level'}: theory unsatisfiable")
                self.theory.ground_unsat = True
                continue
            if not scope:
                continue
            # dedup within one rule only, so coinciding scopes from different
            # rules (a cycle's out- and in-Selects) stay separate constraints
            key = (index, rule.lower, rule.upper, frozenset(scope))
            if key in self.seen_selects:
                continue
            self.seen_selects.add(key)
            self.theory.selects.append(SelectConstraint(rule.lower, rule.upper, tuple(scope)))

    def run(self) -> GroundTheory:
        for idx, rule in enumerate(self.program.rules, 1):
            before = self.theory.n_constraints
            self.ground_rule(rule, idx)
            if self.log:
                self.log(f"rule {idx}: {self.theory.n_constraints - before} ground constraints, {len(self.theory.atoms)} atoms so far")
        t = self.theory
        if t.ground_unsat:
            t.clauses, t.selects, t.horn, t.post = [], [], [], []
        return t


def ground(program: Program, db: Database, log: Optional[Callable[[str], None]] = None) -> GroundTheory:
    return _Grounder(program, db, log).run()


def output_name(bindings: Sequence[ConstantBinding], data_files: Sequence[str], rule_file: str) -> str:
    parts = [b.value for b in bindings]
    parts += [os.path.basename(f) for f in data_files]
    parts.append(os.path.basename(rule_file))
    return "_".join(parts) + ".tdc"


def ground_sources(rule_text: str, data_texts: Sequence[str], bindings=None, log=None) -> GroundTheory:
    """Text-level pipeline: bindings, parsing, validation, grounding."""
    from .edb import apply_bindings, merge, parse_edb
    from .idb import parse_idb, validate

    db = merge(parse_edb(apply_bindings(t, bindings)) for t in data_texts)
    program = parse_idb(apply_bindings(rule_text, bindings))
    diags = validate(program, db)
    if diags:
        raise GroundError("; ".join(diags))
    return ground(program, db, log=log)

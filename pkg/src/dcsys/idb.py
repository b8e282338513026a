"""The rule language: predicate/variable declarations and the rule section.

A rule file has three sections::

    idbpred             % predicate declarations, typed by unary EDB relations
    hc(vtx,vtx).
    idbvar              % typed variables
    vtx X,Y.
    idbrules            % constraints, Horn rules and post-constraints
    Select(1,1,Y;edge(X,Y)) hc(X,Y).
    Horn Forall(X,Y;X==i,edge(X,Y)) hc(X,Y) -> vstd(Y).
    vstd(X).

Identifiers starting with an upper-case letter are variables; everything
else in argument position is a constant.  A non-Horn rule is a
post-constraint when it mentions a predicate defined by Horn rules, or when
it carries an explicit ``Post`` prefix.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .edb import Constant, Database
from .errors import DCSyntaxError
from .lexer import TokenStream

UNBOUNDED_SENTINEL = 999
SECTIONS = ("idbpred", "idbvar", "idbrules")
COMPARISONS = ("==", "!=", "<", "<=", ">", ">=")


# --- terms and expressions -------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: Constant

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * / mod
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        op = " mod " if self.op == "mod" else self.op
        return f"({self.left}{op}{self.right})"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"

    def __str__(self) -> str:
        return f"(-{self.operand})"


Term = Union[Var, Const]
Expr = Union[Var, Const, BinOp, Neg]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class Comparison:
    op: str
    left: Expr
    right: Expr

    def __str__(self) -> str:
        return f"{self.left}{self.op}{self.right}"


Condition = Union[Atom, Comparison]


@dataclass(frozen=True)
class Forall:
    variables: tuple[str, ...] = ()
    conditions: tuple[Condition, ...] = ()

    def __str__(self) -> str:
        inner = ",".join(self.variables)
        if self.conditions:
            inner += ";" + ",".join(map(str, self.conditions))
        return f"Forall({inner})"


# --- rules -----------------------------------------------------------------

@dataclass(frozen=True)
class SelectRule:
    lower: int
    upper: Optional[int]  # None means unbounded
    bound: tuple[str, ...]
    conditions: tuple[Condition, ...]
    targets: tuple[Atom, ...]
    forall: Optional[Forall] = None
    post: bool = False

    def atoms(self) -> tuple[Atom, ...]:
        return self.targets


@dataclass(frozen=True)
class NotRule:
    literals: tuple[Atom, ...]
    forall: Optional[Forall] = None
    post: bool = False

    def atoms(self) -> tuple[Atom, ...]:
        return self.literals


@dataclass(frozen=True)
class DisjunctionRule:
    literals: tuple[Atom, ...]
    forall: Optional[Forall] = None
    post: bool = False

    def atoms(self) -> tuple[Atom, ...]:
        return self.literals


@dataclass(frozen=True)
class ImplicationRule:
    body: tuple[Atom, ...]
    head: tuple[Atom, ...]
    connective: str  # "or" | "and"
    forall: Optional[Forall] = None
    post: bool = False

    def atoms(self) -> tuple[Atom, ...]:
        return self.body + self.head


@dataclass(frozen=True)
class HornRule:
    body: tuple[Atom, ...]
    head: tuple[Atom, ...]
    forall: Optional[Forall] = None

    def atoms(self) -> tuple[Atom, ...]:
        return self.body + self.head


Rule = Union[SelectRule, NotRule, DisjunctionRule, ImplicationRule, HornRule]


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    param_types: tuple[str, ...]


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: str


@dataclass(frozen=True)
class Program:
    predicates: tuple[PredicateDecl, ...]
    variables: tuple[VarDecl, ...]
    rules: tuple[Rule, ...]  # source order

    @property
    def horn_rules(self) -> list[HornRule]:
        return [r for r in self.rules if isinstance(r, HornRule)]

    @property
    def constraints(self) -> list[Rule]:
        return [r for r in self.rules if not isinstance(r, HornRule) and not r.post]

    @property
    def post_constraints(self) -> list[Rule]:
        return [r for r in self.rules if not isinstance(r, HornRule) and r.post]

    @property
    def horn_predicates(self) -> set[str]:
        return {a.pred for r in self.horn_rules for a in r.head}

    def predicate(self, name: str) -> Optional[PredicateDecl]:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def var_types(self) -> dict[str, str]:
        return {v.name: v.type for v in self.variables}


# --- variable collection ---------------------------------------------------

def expr_variables(expr) -> Iterator[str]:
    if isinstance(expr, Var):
        yield expr.name
    elif isinstance(expr, BinOp):
        yield from expr_variables(expr.left)
        yield from expr_variables(expr.right)
    elif isinstance(expr, Neg):
        yield from expr_variables(expr.operand)
    elif isinstance(expr, Atom):
        for t in expr.args:
            yield from expr_variables(t)
    elif isinstance(expr, Comparison):
        yield from expr_variables(expr.left)
        yield from expr_variables(expr.right)


def rule_conditions(rule: Rule) -> tuple[Condition, ...]:
    conds = rule.forall.conditions if rule.forall else ()
    if isinstance(rule, SelectRule):
        conds = conds + rule.conditions
    return conds


def mentioned_variables(rule: Rule) -> set[str]:
    names: set[str] = set()
    for a in rule.atoms():
        names.update(expr_variables(a))
    for c in rule_conditions(rule):
        names.update(expr_variables(c))
    if rule.forall:
        names.update(rule.forall.variables)
    if isinstance(rule, SelectRule):
        names.update(rule.bound)
    return names


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.ts = TokenStream(text)

    def parse(self) -> Program:
        ts = self.ts
        predicates: list[PredicateDecl] = []
        variables: list[VarDecl] = []
        rules: list[Rule] = []
        expected = 0
        while not ts.at_eof():
            tok = ts.peek()
            if tok.kind != "name" or tok.text not in SECTIONS:
                ts.error(f"expected section keyword, found {tok.text!r}")
            idx = SECTIONS.index(tok.text)
            if idx < expected:
                ts.error(f"section {tok.text} out of order or repeated")
            expected = idx + 1
            ts.next()
            while not ts.at_eof() and not self._at_section():
                if idx == 0:
                    predicates.append(self.pred_decl())
                elif idx == 1:
                    variables.extend(self.var_decl())
                else:
                    rules.append(self.rule())
        horn_preds = {a.pred for r in rules if isinstance(r, HornRule) for a in r.head}
        classified = []
        for r in rules:
            if not isinstance(r, HornRule) and not r.post and any(a.pred in horn_preds for a in r.atoms()):
                r = dataclasses.replace(r, post=True)
            classified.append(r)
        return Program(tuple(predicates), tuple(variables), tuple(classified))

    def _at_section(self) -> bool:
        tok = self.ts.peek()
        return tok.kind == "name" and tok.text in SECTIONS

    def pred_decl(self) -> PredicateDecl:
        ts = self.ts
        name = ts.expect_kind("name", "predicate name").text
        types: list[str] = []
        if ts.accept("("):
            types.append(ts.expect_kind("name", "type name").text)
            while ts.accept(","):
                types.append(ts.expect_kind("name", "type name").text)
            ts.expect(")")
        ts.expect(".")
        return PredicateDecl(name, tuple(types))

    def var_decl(self) -> list[VarDecl]:
        ts = self.ts
        type_name = ts.expect_kind("name", "type name").text
        names = [ts.expect_kind("name", "variable name").text]
        while ts.accept(","):
            names.append(ts.expect_kind("name", "variable name").text)
        ts.expect(".")
        return [VarDecl(n, type_name) for n in names]

    # rules

    def rule(self) -> Rule:
        ts = self.ts
        explicit_post = ts.accept("Post")
        if ts.accept("Horn"):
            if explicit_post:
                ts.error("a Horn rule cannot be a post-constraint")
            forall = self.maybe_forall()
            body: tuple[Atom, ...] = ()
            if not ts.at("->"):
                body = self.atom_list(",")
            if ts.accept("->"):
                head = self.atom_list(",")
            else:
                body, head = (), body
            ts.expect(".")
            return HornRule(body, head, forall)

        forall = self.maybe_forall()
        start = ts.peek()
        if ts.at("Select"):
            rule = self.select_rule(forall)
        elif ts.accept("NOT"):
            if forall is None:
                forall = self.maybe_forall()
            rule = NotRule(self.atom_list(","), forall)
        else:
            first, sep = self.atom_seq()
            if ts.accept("->"):
                if sep == "|":
                    ts.error("implication body must be a conjunction", start)
                head, hsep = self.atom_seq()
                connective = "and" if hsep == "," else "or"
                rule = ImplicationRule(first, head, connective, forall)
            else:
                if sep == ",":
                    ts.error("a conjunction is not a rule; use '|' for disjunction or '->' for implication", start)
                rule = DisjunctionRule(first, forall)
        ts.expect(".")
        if explicit_post:
            rule = dataclasses.replace(rule, post=True)
        return rule

    def select_rule(self, forall: Optional[Forall]) -> SelectRule:
        ts = self.ts
        kw = ts.expect("Select")
        ts.expect("(")
        lower = int(ts.expect_kind("int", "lower bound").text)
        ts.expect(",")
        upper_tok = ts.expect_kind("int", "upper bound")
        upper_val = int(upper_tok.text)
        bound: list[str] = []
        conditions: tuple[Condition, ...] = ()
        if ts.accept(","):
            bound.append(ts.expect_kind("name", "variable").text)
            while ts.accept(","):
                bound.append(ts.expect_kind("name", "variable").text)
        if ts.accept(";"):
            conditions = self.condition_list()
        ts.expect(")")
        upper = None if upper_val == UNBOUNDED_SENTINEL else upper_val
        if upper is not None and lower > upper:
            raise DCSyntaxError(f"Select lower bound {lower} exceeds upper bound {upper}", kw.line, kw.column)
        targets = self.atom_list(",")
        return SelectRule(lower, upper, tuple(bound), conditions, targets, forall)

    def maybe_forall(self) -> Optional[Forall]:
        ts = self.ts
        if not ts.accept("Forall"):
            return None
        ts.expect("(")
        names: list[str] = []
        if ts.peek().kind == "name":
            names.append(ts.next().text)
            while ts.accept(","):
                names.append(ts.expect_kind("name", "variable").text)
        conditions: tuple[Condition, ...] = ()
        if ts.accept(";"):
            conditions = self.condition_list()
        ts.expect(")")
        return Forall(tuple(names), conditions)

    def atom_seq(self) -> tuple[tuple[Atom, ...], Optional[str]]:
        ts = self.ts
        atoms = [self.atom()]
        sep = None
        while ts.at(",") or ts.at("|"):
            tok = ts.next()
            if sep is not None and tok.text != sep:
                ts.error("cannot mix ',' and '|' in one list", tok)
            sep = tok.text
            atoms.append(self.atom())
        return tuple(atoms), sep

    def atom_list(self, sep: str) -> tuple[Atom, ...]:
        atoms = [self.atom()]
        while self.ts.accept(sep):
            atoms.append(self.atom())
        return tuple(atoms)

    def atom(self) -> Atom:
        ts = self.ts
        name = ts.expect_kind("name", "predicate")
        if name.text in ("Select", "NOT", "Horn", "Forall", "Post") or name.text[0].isupper():
            ts.error(f"expected a predicate, found {name.text!r}", name)
        args: list[Term] = []
        if ts.accept("("):
            args.append(self.term())
            while ts.accept(","):
                args.append(self.term())
            ts.expect(")")
        return Atom(name.text, tuple(args))

    def term(self) -> Term:
        ts = self.ts
        tok = ts.peek()
        if ts.accept("-"):
            return Const(-int(ts.expect_kind("int", "integer").text))
        if tok.kind == "int":
            ts.next()
            return Const(int(tok.text))
        if tok.kind == "name":
            ts.next()
            return Var(tok.text) if tok.text[0].isupper() else Const(tok.text)
        ts.error(f"expected a variable or constant, found {tok.text or 'end of input'!r}")

    def condition_list(self) -> tuple[Condition, ...]:
        conds = [self.condition()]
        while self.ts.accept(","):
            conds.append(self.condition())
        return tuple(conds)

    def condition(self) -> Condition:
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "name" and not tok.text[0].isupper() and ts.at("(", 1) and tok.text != "mod":
            return self.atom()
        left = self.expr()
        op = ts.peek()
        if op.text not in COMPARISONS or op.kind != "op":
            ts.error(f"expected a comparison operator, found {op.text or 'end of input'!r}")
        ts.next()
        return Comparison(op.text, left, self.expr())

    def expr(self) -> Expr:
        ts = self.ts
        node = self.mul_expr()
        while ts.at("+") or ts.at("-"):
            op = ts.next().text
            node = BinOp(op, node, self.mul_expr())
        return node

    def mul_expr(self) -> Expr:
        ts = self.ts
        node = self.unary()
        while ts.at("*") or ts.at("/") or ts.at("mod"):
            op = ts.next().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        ts = self.ts
        if ts.accept("-"):
            operand = self.unary()
            if isinstance(operand, Const) and isinstance(operand.value, int):
                return Const(-operand.value)
            return Neg(operand)
        if ts.accept("("):
            node = self.expr()
            ts.expect(")")
            return node
        tok = ts.peek()
        if tok.kind == "int":
            ts.next()
            return Const(int(tok.text))
        if tok.kind == "name":
            ts.next()
            return Var(tok.text) if tok.text[0].isupper() else Const(tok.text)
        ts.error(f"expected an expression, found {tok.text or 'end of input'!r}")


def parse_idb(source_text: str) -> Program:
    return _Parser(source_text).parse()


# --- printer ---------------------------------------------------------------

def _fmt_atoms(atoms, sep=", ") -> str:
    return sep.join(map(str, atoms))


def format_rule(rule: Rule) -> str:
    prefix = f"{rule.forall} " if rule.forall else ""
    if isinstance(rule, HornRule):
        return f"Horn {prefix}{_fmt_atoms(rule.body)} -> {_fmt_atoms(rule.head)}."
    if isinstance(rule, SelectRule):
        upper = UNBOUNDED_SENTINEL if rule.upper is None else rule.upper
        inner = f"{rule.lower},{upper}"
        if rule.bound:
            inner += "," + ",".join(rule.bound)
        if rule.conditions:
            inner += ";" + ",".join(map(str, rule.conditions))
        text = f"{prefix}Select({inner}) {_fmt_atoms(rule.targets)}."
    elif isinstance(rule, NotRule):
        text = f"{prefix}NOT {_fmt_atoms(rule.literals)}."
    elif isinstance(rule, DisjunctionRule):
        text = f"{prefix}{_fmt_atoms(rule.literals, ' | ')}."
    else:
        sep = ", " if rule.connective == "and" else " | "
        text = f"{prefix}{_fmt_atoms(rule.body)} -> {_fmt_atoms(rule.head, sep)}."
    return ("Post " + text) if rule.post else text


def format_program(program: Program) -> str:
    lines = ["idbpred"]
    for p in program.predicates:
        lines.append(f"{p.name}({','.join(p.param_types)})." if p.param_types else f"{p.name}.")
    lines.append("idbvar")
    for v in program.variables:
        lines.append(f"{v.type} {v.name}.")
    lines.append("idbrules")
    lines.extend(format_rule(r) for r in program.rules)
    return "\n".join(lines) + "\n"


# --- validation ------------------------------------------------------------

def _constants_in(expr) -> Iterator[Constant]:
    if isinstance(expr, Const):
        yield expr.value
    elif isinstance(expr, BinOp):
        yield from _constants_in(expr.left)
        yield from _constants_in(expr.right)
    elif isinstance(expr, Neg):
        yield from _constants_in(expr.operand)


def validate(program: Program, db: Database) -> list[str]:
    diags: list[str] = []

    def unary_type(name: str, what: str) -> bool:
        if name not in db:
            diags.append(f"{what}: unknown EDB relation {name}/1")
            return False
        if db[name].arity != 1:
            diags.append(f"{what}: type {name} must be a unary EDB relation, has arity {db[name].arity}")
            return False
        return True

    preds: dict[str, PredicateDecl] = {}
    for p in program.predicates:
        if p.name in preds:
            diags.append(f"predicate {p.name} declared twice")
        preds[p.name] = p
        if p.name in db:
            diags.append(f"predicate {p.name} clashes with EDB relation {p.name}")
        for t in p.param_types:
            unary_type(t, f"predicate {p.name}")

    var_types: dict[str, str] = {}
    for v in program.variables:
        if v.name in var_types:
            diags.append(f"variable {v.name} declared twice")
        if not v.name[0].isupper():
            diags.append(f"variable {v.name} must start with an upper-case letter")
        var_types[v.name] = v.type
        unary_type(v.type, f"variable {v.name}")

    horn_preds = program.horn_predicates

    def domain(type_name: str):
        if type_name in db and db[type_name].arity == 1:
            return set(db.domain(type_name))
        return None

    def check_atom(atom: Atom, where: str):
        decl = preds.get(atom.pred)
        if decl is None:
            if atom.pred in db:
                diags.append(f"{where}: EDB relation {atom.pred} used as a predicate (only allowed in conditions)")
            else:
                diags.append(f"{where}: unknown predicate {atom.pred}/{len(atom.args)}")
            return
        if len(atom.args) != len(decl.param_types):
            diags.append(f"{where}: {atom.pred} has arity {len(decl.param_types)}, used with {len(atom.args)}")
            return
        for arg, ptype in zip(atom.args, decl.param_types):
            pdom = domain(ptype)
            if pdom is None:
                continue
            if isinstance(arg, Const):
                if arg.value not in pdom:
                    diags.append(f"{where}: constant {arg.value} is not of type {ptype}")
            elif arg.name in var_types:
                vdom = domain(var_types[arg.name])
                if vdom is not None and not vdom <= pdom:
                    diags.append(f"{where}: variable {arg.name} of type {var_types[arg.name]} does not fit parameter type {ptype} of {atom.pred}")

    def check_condition(cond: Condition, where: str):
        if isinstance(cond, Atom):
            if cond.pred not in db:
                diags.append(f"{where}: unknown EDB relation {cond.pred}/{len(cond.args)}")
            elif db[cond.pred].arity != len(cond.args):
                diags.append(f"{where}: EDB relation {cond.pred} has arity {db[cond.pred].arity}, used with {len(cond.args)}")
        elif cond.op not in ("==", "!="):
            consts = list(_constants_in(cond.left)) + list(_constants_in(cond.right))
            if any(isinstance(c, str) for c in consts):
                diags.append(f"{where}: ordered comparison {cond} on a symbolic constant")

    for idx, rule in enumerate(program.rules, 1):
        where = f"rule {idx}"
        for name in sorted(mentioned_variables(rule)):
            if name not in var_types:
                diags.append(f"{where}: undeclared variable {name}")
        for atom in rule.atoms():
            check_atom(atom, where)
        for cond in rule_conditions(rule):
            check_condition(cond, where)
        if isinstance(rule, SelectRule):
            if rule.upper is not None and rule.lower > rule.upper:
                diags.append(f"{where}: Select lower bound exceeds upper bound")
            if any(a.pred in horn_preds for a in rule.targets):
                diags.append(f"{where}: Select over a Horn-defined predicate is not supported")
            elif rule.post:
                diags.append(f"{where}: Select cannot be a post-constraint")
    return diags

"""Ground DC theories and their answer-set semantics.

A theory is a triple of constraints over constraint atoms (clauses and
cardinality ``Select`` constraints), definite Horn rules whose heads are
Horn atoms, and post-constraint clauses over all atoms.  A set ``M`` of
constraint atoms is an answer set when it satisfies the constraints and its
Horn closure ``LM(horn ∪ M)`` satisfies the post-constraints.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .edb import Constant

CONSTRAINT = "c"
HORN = "h"


@dataclass(frozen=True)
class GroundAtom:
    id: int
    predicate: str
    args: tuple[Constant, ...]
    kind: str

    @property
    def name(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(map(str, self.args))})"

    @property
    def is_horn(self) -> bool:
        return self.kind == HORN


@dataclass(frozen=True)
class SelectConstraint:
    lower: int
    upper: Optional[int]  # None: unbounded
    scope: tuple[int, ...]

    def holds(self, count: int) -> bool:
        return self.lower <= count and (self.upper is None or count <= self.upper)


@dataclass(frozen=True)
class HornClause:
    head: int
    body: tuple[int, ...] = ()


@dataclass
class GroundTheory:
    atoms: list[GroundAtom] = field(default_factory=list)
    clauses: list[tuple[int, ...]] = field(default_factory=list)
    selects: list[SelectConstraint] = field(default_factory=list)
    horn: list[HornClause] = field(default_factory=list)
    post: list[tuple[int, ...]] = field(default_factory=list)
    ground_unsat: bool = False

    def atom(self, atom_id: int) -> GroundAtom:
        return self.atoms[atom_id - 1]

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_constraints(self) -> int:
        return len(self.clauses) + len(self.selects) + len(self.horn) + len(self.post)

    def constraint_atoms(self) -> list[int]:
        return [a.id for a in self.atoms if a.kind == CONSTRAINT]

    def horn_atoms(self) -> list[int]:
        return [a.id for a in self.atoms if a.kind == HORN]

    def post_atoms(self) -> set[int]:
        """Atoms occurring in post-constraints (reported as a statistic only)."""
        return {abs(lit) for cl in self.post for lit in cl}


@dataclass(frozen=True)
class AnswerSet:
    m: frozenset[int]
    closure: frozenset[int]

    def names(self, theory: GroundTheory) -> list[str]:
        return [theory.atom(i).name for i in sorted(self.m)]

    def derived_names(self, theory: GroundTheory) -> list[str]:
        return [theory.atom(i).name for i in sorted(self.closure - self.m)]


def least_model(horn: Sequence[HornClause], seed: Iterable[int]) -> set[int]:
    """Least set containing ``seed`` and closed under ``horn`` (linear time)."""
    model = set(seed)
    missing = []
    watchers: dict[int, list[int]] = {}
    queue = deque(model)
    for idx, rule in enumerate(horn):
        body = set(rule.body)
        pending = len(body - model)
        missing.append(pending)
        if pending == 0:
            if rule.head not in model:
                model.add(rule.head)
                queue.append(rule.head)
        else:
            for b in body:
                if b not in model:
                    watchers.setdefault(b, []).append(idx)
    while queue:
        atom = queue.popleft()
        for idx in watchers.pop(atom, ()):
            missing[idx] -= 1
            if missing[idx] == 0:
                head = horn[idx].head
                if head not in model:
                    model.add(head)
                    queue.append(head)
    return model


def clause_satisfied(clause: Sequence[int], true_atoms: set[int] | frozenset[int]) -> bool:
    return any((lit > 0) == (abs(lit) in true_atoms) for lit in clause)


def check_answer_set(theory: GroundTheory, m: Iterable[int]) -> bool:
    m = set(m)
    if theory.ground_unsat:
        return False
    if any(theory.atom(i).kind != CONSTRAINT for i in m):
        return False
    if not all(clause_satisfied(cl, m) for cl in theory.clauses):
        return False
    for sel in theory.selects:
        if not sel.holds(len(set(sel.scope) & m)):
            return False
    closure = least_model(theory.horn, m)
    return all(clause_satisfied(cl, closure) for cl in theory.post)


def answer_set_for(theory: GroundTheory, m: Iterable[int]) -> AnswerSet:
    m = frozenset(m)
    return AnswerSet(m, frozenset(least_model(theory.horn, m)))


def validate_theory(theory: GroundTheory) -> list[str]:
    diags: list[str] = []
    n = len(theory.atoms)
    seen: set[tuple] = set()
    for pos, atom in enumerate(theory.atoms, 1):
        if atom.id != pos:
            diags.append(f"atom ids not dense: position {pos} has id {atom.id}")
        if atom.kind not in (CONSTRAINT, HORN):
            diags.append(f"atom {atom.id}: unknown kind {atom.kind!r}")
        key = (atom.predicate, atom.args)
        if key in seen:
            diags.append(f"atom {atom.name} listed twice")
        seen.add(key)

    def kind_of(i: int) -> Optional[str]:
        if not 1 <= i <= n:
            return None
        return theory.atoms[i - 1].kind

    def check_ids(ids, where, want=None):
        for i in ids:
            k = kind_of(abs(i))
            if i == 0 or k is None:
                diags.append(f"{where}: dangling atom id {i}")
            elif want is not None and k != want:
                diags.append(f"{where}: atom {theory.atoms[abs(i) - 1].name} must be of kind {want}")

    for idx, cl in enumerate(theory.clauses, 1):
        check_ids(cl, f"clause {idx}", CONSTRAINT)
    for idx, sel in enumerate(theory.selects, 1):
        where = f"select {idx}"
        check_ids(sel.scope, where, CONSTRAINT)
        if sel.lower < 0:
            diags.append(f"{where}: negative lower bound")
        if sel.upper is not None and sel.lower > sel.upper:
            diags.append(f"{where}: lower bound {sel.lower} exceeds upper bound {sel.upper}")
        if not sel.scope and not theory.ground_unsat:
            diags.append(f"{where}: empty scope")
    for idx, rule in enumerate(theory.horn, 1):
        where = f"horn rule {idx}"
        check_ids([rule.head], where, HORN)
        check_ids(rule.body, where)
        if any(b < 0 for b in rule.body):
            diags.append(f"{where}: negative body literal")
    for idx, cl in enumerate(theory.post, 1):
        check_ids(cl, f"post-constraint {idx}")
    return diags

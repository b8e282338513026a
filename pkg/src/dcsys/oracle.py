"""Brute-force reference semantics and random theories for testing.

``enumerate_answer_sets`` evaluates every subset of the constraint atoms at
once as rows of a boolean matrix, so it shares no code with the solver or
with :func:`dcsys.theory.check_answer_set`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .theory import CONSTRAINT, HORN, GroundAtom, GroundTheory, HornClause, SelectConstraint

MAX_ORACLE_ATOMS = 20


@dataclass(frozen=True)
class TheoryGenParams:
    n_c_atoms: int = 6
    n_h_atoms: int = 3
    n_clauses: int = 6
    n_selects: int = 2
    n_horn: int = 4
    n_post: int = 2
    seed: int = 0

    def __post_init__(self):
        counts = (self.n_c_atoms, self.n_h_atoms, self.n_clauses, self.n_selects, self.n_horn, self.n_post)
        if min(counts) < 0:
            raise ValueError("counts must be nonnegative")
        if self.n_c_atoms > MAX_ORACLE_ATOMS:
            raise ValueError(f"at most {MAX_ORACLE_ATOMS} constraint atoms")


def _literal_columns(values: np.ndarray, clause) -> np.ndarray:
    sat = np.zeros(values.shape[0], dtype=bool)
    for lit in clause:
        col = values[:, abs(lit)]
        sat |= col if lit > 0 else ~col
    return sat


def answer_set_mask(theory: GroundTheory) -> tuple[list[int], np.ndarray, np.ndarray]:
    """Constraint atoms, all candidate subsets as a (2^n, n_atoms+1) matrix, and the answer-set mask."""
    c_atoms = [a.id for a in theory.atoms if a.kind == CONSTRAINT]
    n = len(c_atoms)
    if n > MAX_ORACLE_ATOMS:
        raise ValueError(f"{n} constraint atoms exceed the oracle bound of {MAX_ORACLE_ATOMS}")
    rows = np.arange(1 << n, dtype=np.int64)
    values = np.zeros((1 << n, theory.n_atoms + 1), dtype=bool)
    for j, atom in enumerate(c_atoms):
        values[:, atom] = (rows >> j) & 1 == 1
    ok = np.full(1 << n, not theory.ground_unsat)
    for cl in theory.clauses:
        ok &= _literal_columns(values, cl)
    for sel in theory.selects:
        scope = sorted(set(sel.scope))
        count = values[:, scope].sum(axis=1) if scope else np.zeros(1 << n, dtype=np.int64)
        ok &= count >= sel.lower
        if sel.upper is not None:
            ok &= count <= sel.upper
    # naive fixpoint iteration of the Horn rules on every row at once
    changed = True
    while changed:
        changed = False
        for rule in theory.horn:
            fired = values[:, list(rule.body)].all(axis=1) if rule.body else np.ones(1 << n, dtype=bool)
            new = fired & ~values[:, rule.head]
            if new.any():
                values[:, rule.head] |= fired
                changed = True
    for cl in theory.post:
        ok &= _literal_columns(values, cl)
    return c_atoms, values, ok


def enumerate_answer_sets(theory: GroundTheory) -> set[frozenset[int]]:
    c_atoms, values, ok = answer_set_mask(theory)
    result = set()
    for row in np.flatnonzero(ok):
        result.add(frozenset(a for a in c_atoms if values[row, a]))
    return result


def count_answer_sets(theory: GroundTheory) -> int:
    return int(answer_set_mask(theory)[2].sum())


def random_theory(params: TheoryGenParams) -> GroundTheory:
    rng = random.Random(params.seed)
    nc, nh = params.n_c_atoms, params.n_h_atoms
    atoms = [GroundAtom(i, "c", (i,), CONSTRAINT) for i in range(1, nc + 1)]
    atoms += [GroundAtom(nc + i, "h", (i,), HORN) for i in range(1, nh + 1)]
    c_ids = list(range(1, nc + 1))
    h_ids = list(range(nc + 1, nc + nh + 1))
    all_ids = c_ids + h_ids
    theory = GroundTheory(atoms=atoms)

    def clause(pool, max_len=5):
        # about half of all clauses are short so propagation has something to do
        length = rng.randint(2, 3) if rng.random() < 0.5 else rng.randint(1, max_len)
        chosen = rng.sample(pool, min(length, len(pool)))
        return tuple(a if rng.random() < 0.5 else -a for a in chosen)

    if c_ids:
        for _ in range(params.n_clauses):
            theory.clauses.append(clause(c_ids))
        for _ in range(params.n_selects):
            scope = tuple(rng.sample(c_ids, rng.randint(1, min(8, len(c_ids)))))
            lower = rng.randint(0, len(scope))
            upper = None if rng.random() < 0.2 else rng.randint(lower, len(scope))
            theory.selects.append(SelectConstraint(lower, upper, scope))
    if h_ids:
        for _ in range(params.n_horn):
            head = rng.choice(h_ids)
            size = 0 if rng.random() < 0.05 else rng.randint(1, min(3, len(all_ids)))
            body = tuple(rng.sample(all_ids, size))
            theory.horn.append(HornClause(head, body))
    if all_ids:
        for _ in range(params.n_post):
            theory.post.append(clause(all_ids, max_len=3))
    return theory

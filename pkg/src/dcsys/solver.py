"""Backtracking search for answer sets of ground DC theories.

Davis-Putnam style: propagate to a fixpoint, run a two-sided lookahead on
the most constrained constraint atoms, branch, and backtrack
chronologically.  Horn atoms are never guessed; they become true only when
some rule body is fully true and false only when every rule for them has
been removed by a false body atom.
"""

from __future__ import annotations

import math
import os
import random
import time
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .theory import CONSTRAINT, AnswerSet, GroundTheory, answer_set_for, check_answer_set

TRUE, FALSE, UNASSIGNED = 1, -1, 0

# assignment reasons
BRANCH = "branch"
PROPAGATED = "propagated"
HORN_DERIVED = "horn-derived"
HORN_EXHAUSTED = "horn-exhausted"

# lookahead outcomes
CONFLICT = "conflict"
FORCED = "forced"
BRANCHING = "branch"
COMPLETE = "complete"

WEIGHT_CAP = 6
ENV_LOOKAHEAD_K = "DC_LOOKAHEAD_K"


@dataclass
class Stats:
    decisions: int = 0
    backtracks: int = 0
    lookahead_tests: int = 0
    propagations: int = 0
    models_found: int = 0
    forced_by_lookahead: int = 0
    satisfied_seen: int = 0
    cpu_ms: float = 0.0


@dataclass(frozen=True)
class Decision:
    atom: int
    value: int
    polarity_forced: bool = False  # True for the second (flipped) branch


def clause_weight(unassigned: int) -> int:
    return 1 << (WEIGHT_CAP - min(unassigned, WEIGHT_CAP))


def default_lookahead_k(n_unassigned: int) -> int:
    return min(n_unassigned, max(16, math.ceil(n_unassigned / 16)))


def branch_score(f_true: int, f_false: int) -> int:
    return 1024 * min(f_true, f_false) + f_true + f_false


class Solver:
    """Search state over one immutable theory.  Not shareable across threads."""

    def __init__(
        self,
        theory: GroundTheory,
        lookahead_k: Optional[int] = None,
        log: Optional[Callable[[str], None]] = None,
        on_event: Optional[Callable[[str, "Solver"], None]] = None,
    ):
        self.theory = theory
        self.log = log
        self.on_event = on_event
        if lookahead_k is None:
            env = os.environ.get(ENV_LOOKAHEAD_K)
            if env:
                lookahead_k = int(env)
                if lookahead_k <= 0:
                    raise ValueError(f"{ENV_LOOKAHEAD_K} must be a positive integer")
        self.fixed_k = lookahead_k
        self.stats = Stats()

        n = theory.n_atoms
        self.n = n
        self.is_c = [False] * (n + 1)
        for a in theory.atoms:
            self.is_c[a.id] = a.kind == CONSTRAINT
        self.c_atoms = [a for a in range(1, n + 1) if self.is_c[a]]

        # clauses: T_C first, then post-constraints
        self.cl_lits: list[tuple[int, ...]] = [tuple(dict.fromkeys(cl)) for cl in (*theory.clauses, *theory.post)]
        self.cl_len = [len(cl) for cl in self.cl_lits]
        self.cl_post = [False] * len(theory.clauses) + [True] * len(theory.post)
        self.cl_true = [0] * len(self.cl_lits)
        self.cl_false = [0] * len(self.cl_lits)
        self.pos_occ: list[list[int]] = [[] for _ in range(n + 1)]
        self.neg_occ: list[list[int]] = [[] for _ in range(n + 1)]
        for idx, cl in enumerate(self.cl_lits):
            for lit in cl:
                (self.pos_occ if lit > 0 else self.neg_occ)[abs(lit)].append(idx)

        self.sel_scope = [tuple(dict.fromkeys(s.scope)) for s in theory.selects]
        self.sel_lo = [s.lower for s in theory.selects]
        self.sel_hi = [len(sc) if s.upper is None else min(s.upper, len(sc)) for s, sc in zip(theory.selects, self.sel_scope)]
        self.sel_t = [0] * len(theory.selects)
        self.sel_f = [0] * len(theory.selects)
        self.sel_size = [len(sc) for sc in self.sel_scope]
        self.sel_occ: list[list[int]] = [[] for _ in range(n + 1)]
        for idx, scope in enumerate(self.sel_scope):
            for a in scope:
                self.sel_occ[a].append(idx)

        self.h_head = [r.head for r in theory.horn]
        self.h_body = [tuple(dict.fromkeys(r.body)) for r in theory.horn]
        self.h_len = [len(b) for b in self.h_body]
        self.h_true = [0] * len(theory.horn)
        self.h_false = [0] * len(theory.horn)
        self.body_occ: list[list[int]] = [[] for _ in range(n + 1)]
        self.live = [0] * (n + 1)
        for idx, body in enumerate(self.h_body):
            self.live[self.h_head[idx]] += 1
            for a in body:
                self.body_occ[a].append(idx)

        self.val = [UNASSIGNED] * (n + 1)
        self.reason: list[Optional[str]] = [None] * (n + 1)
        self.trail: list[int] = []
        self.qhead = 0
        self.decisions: list[Decision] = []
        self.rng: Optional[random.Random] = None
        self._initialized = False

    # --- assignment primitives ------------------------------------------------

    def value(self, atom: int) -> int:
        return self.val[atom]

    def assign(self, atom: int, value: int, reason: str = PROPAGATED) -> bool:
        """Record ``atom = value``; False on a clash with the current value."""
        cur = self.val[atom]
        if cur != UNASSIGNED:
            return cur == value
        self.val[atom] = value
        self.reason[atom] = reason
        self.trail.append(atom)
        return True

    def undo(self, mark: int) -> None:
        """Unassign everything above trail position ``mark``.

        Trail entries below ``qhead`` have had their counters applied and
        are reverted here; the rest were never processed.
        """
        trail, val, reason = self.trail, self.val, self.reason
        qhead = self.qhead
        cl_true, cl_false = self.cl_true, self.cl_false
        pos_occ, neg_occ, sel_occ, body_occ = self.pos_occ, self.neg_occ, self.sel_occ, self.body_occ
        while len(trail) > mark:
            a = trail.pop()
            if len(trail) < qhead:
                if val[a] == TRUE:
                    for c in pos_occ[a]:
                        cl_true[c] -= 1
                    for c in neg_occ[a]:
                        cl_false[c] -= 1
                    sel_t = self.sel_t
                    for x in sel_occ[a]:
                        sel_t[x] -= 1
                    h_true = self.h_true
                    for r in body_occ[a]:
                        h_true[r] -= 1
                else:
                    for c in pos_occ[a]:
                        cl_false[c] -= 1
                    for c in neg_occ[a]:
                        cl_true[c] -= 1
                    sel_f = self.sel_f
                    for x in sel_occ[a]:
                        sel_f[x] -= 1
                    h_false, live, h_head = self.h_false, self.live, self.h_head
                    for r in body_occ[a]:
                        h_false[r] -= 1
                        if h_false[r] == 0:
                            live[h_head[r]] += 1
            val[a] = UNASSIGNED
            reason[a] = None
        self.qhead = min(qhead, mark)

    # --- propagation ----------------------------------------------------------

    def initialize(self) -> bool:
        """Level-0 checks on every constraint, then propagate."""
        self._initialized = True
        if self.theory.ground_unsat:
            return False
        for c in range(len(self.cl_lits)):
            if not self._check_clause(c):
                return False
        for s in range(len(self.sel_scope)):
            if not self._check_select(s):
                return False
        for r, body in enumerate(self.h_body):
            if not body and not self._fire(r):
                return False
        for a in range(1, self.n + 1):
            if not self.is_c[a] and self.live[a] == 0 and not self.assign(a, FALSE, HORN_EXHAUSTED):
                return False
        return self.propagate()

    def propagate(self) -> bool:
        """Run to fixpoint; False on conflict.

        Counters for an atom are all updated before any of its constraints
        is checked, so an early conflict return leaves them consistent.
        """
        trail, val, reason = self.trail, self.val, self.reason
        cl_true, cl_false, cl_lits, cl_len, cl_post = self.cl_true, self.cl_false, self.cl_lits, self.cl_len, self.cl_post
        pos_occ, neg_occ = self.pos_occ, self.neg_occ
        sel_occ, sel_t, sel_f, sel_size = self.sel_occ, self.sel_t, self.sel_f, self.sel_size
        sel_lo, sel_hi, sel_scope = self.sel_lo, self.sel_hi, self.sel_scope
        body_occ, h_true, h_false, h_len, h_head, live = (
            self.body_occ, self.h_true, self.h_false, self.h_len, self.h_head, self.live)
        rng = self.rng
        start = qhead = self.qhead
        newly_satisfied = 0
        ok = True
        while qhead < len(trail):
            if rng is not None:
                j = rng.randrange(qhead, len(trail))
                trail[qhead], trail[j] = trail[j], trail[qhead]
            a = trail[qhead]
            qhead += 1
            fire = exhausted = ()
            if val[a] == TRUE:
                sat_list, fal_list = pos_occ[a], neg_occ[a]
                for x in sel_occ[a]:
                    sel_t[x] += 1
                for r in body_occ[a]:
                    h_true[r] += 1
                    if h_true[r] == h_len[r]:
                        fire = fire + (h_head[r],)
            else:
                sat_list, fal_list = neg_occ[a], pos_occ[a]
                for x in sel_occ[a]:
                    sel_f[x] += 1
                for r in body_occ[a]:
                    h_false[r] += 1
                    if h_false[r] == 1:
                        hd = h_head[r]
                        live[hd] -= 1
                        if live[hd] == 0:
                            exhausted = exhausted + (hd,)
            for c in sat_list:
                if cl_true[c] == 0:
                    newly_satisfied += 1
                cl_true[c] += 1
            for c in fal_list:
                cl_false[c] += 1

            # clauses that lost a literal
            for c in fal_list:
                if cl_true[c]:
                    continue
                nf = cl_false[c]
                n_lits = cl_len[c]
                if nf == n_lits:
                    ok = False
                    break
                if nf + 1 != n_lits or cl_post[c]:
                    continue
                unit = 0
                for lit in cl_lits[c]:
                    x = val[lit if lit > 0 else -lit]
                    if x == UNASSIGNED:
                        unit = lit
                    elif (x == TRUE) == (lit > 0):
                        unit = None
                        break
                if unit is None:
                    continue
                if unit == 0:
                    ok = False
                    break
                if unit > 0:
                    val[unit] = TRUE
                    reason[unit] = PROPAGATED
                    trail.append(unit)
                else:
                    val[-unit] = FALSE
                    reason[-unit] = PROPAGATED
                    trail.append(-unit)
            if not ok:
                break

            # cardinality constraints
            for x in sel_occ[a]:
                t = sel_t[x]
                u = sel_size[x] - t - sel_f[x]
                if t > sel_hi[x] or t + u < sel_lo[x]:
                    ok = False
                    break
                if u == 0:
                    continue
                if t == sel_hi[x]:
                    fill = FALSE
                elif t + u == sel_lo[x]:
                    fill = TRUE
                else:
                    continue
                for b in sel_scope[x]:
                    if val[b] == UNASSIGNED:
                        val[b] = fill
                        reason[b] = PROPAGATED
                        trail.append(b)
            if not ok:
                break

            # Horn chaining and exhaustion
            for hd in fire:
                cur = val[hd]
                if cur == UNASSIGNED:
                    val[hd] = TRUE
                    reason[hd] = HORN_DERIVED
                    trail.append(hd)
                elif cur == FALSE:
                    ok = False
                    break
            for hd in exhausted:
                # no rule left that could derive hd
                cur = val[hd]
                if cur == UNASSIGNED:
                    val[hd] = FALSE
                    reason[hd] = HORN_EXHAUSTED
                    trail.append(hd)
                elif cur == TRUE:
                    ok = False
                    break
            if not ok:
                break
        self.qhead = qhead
        self.stats.propagations += qhead - start
        self.stats.satisfied_seen += newly_satisfied
        return ok

    def _check_clause(self, c: int) -> bool:
        lits = self.cl_lits[c]
        if self.cl_true[c]:
            return True
        nf = self.cl_false[c]
        if nf == len(lits):
            return False
        if nf < len(lits) - 1 or self.cl_post[c]:
            return True
        val = self.val
        unit = 0
        for lit in lits:
            x = val[abs(lit)]
            if x == UNASSIGNED:
                unit = lit
            elif (x == TRUE) == (lit > 0):
                return True
        if unit == 0:
            return False
        return self.assign(abs(unit), TRUE if unit > 0 else FALSE, PROPAGATED)

    def _check_select(self, s: int) -> bool:
        t, f = self.sel_t[s], self.sel_f[s]
        scope = self.sel_scope[s]
        u = len(scope) - t - f
        lo, hi = self.sel_lo[s], self.sel_hi[s]
        if t > hi or t + u < lo:
            return False
        if u == 0:
            return True
        if t == hi:
            fill = FALSE
        elif t + u == lo:
            fill = TRUE
        else:
            return True
        val = self.val
        for a in scope:
            if val[a] == UNASSIGNED:
                self.assign(a, fill, PROPAGATED)
        return True

    def _fire(self, r: int) -> bool:
        head = self.h_head[r]
        cur = self.val[head]
        if cur == UNASSIGNED:
            return self.assign(head, TRUE, HORN_DERIVED)
        return cur == TRUE

    # --- heuristics -----------------------------------------------------------

    def scores(self) -> dict[int, int]:
        """Summed weight of unsatisfied constraints per unassigned atom."""
        val = self.val
        score: dict[int, int] = {}
        for c, lits in enumerate(self.cl_lits):
            if self.cl_true[c]:
                continue
            w = clause_weight(len(lits) - self.cl_false[c])
            for lit in lits:
                a = abs(lit)
                if val[a] == UNASSIGNED:
                    score[a] = score.get(a, 0) + w
        for s, scope in enumerate(self.sel_scope):
            t, f = self.sel_t[s], self.sel_f[s]
            u = len(scope) - t - f
            if t >= self.sel_lo[s] and t + u <= self.sel_hi[s]:
                continue
            w = clause_weight(u)
            for a in scope:
                if val[a] == UNASSIGNED:
                    score[a] = score.get(a, 0) + w
        return score

    def score(self, atom: int) -> int:
        return self.scores().get(atom, 0)

    def lookahead_k(self, n_unassigned: int) -> int:
        if self.fixed_k is not None:
            return min(n_unassigned, self.fixed_k)
        return default_lookahead_k(n_unassigned)

    def _probe(self, atom: int, value: int) -> tuple[bool, int]:
        mark = len(self.trail)
        self.assign(atom, value, PROPAGATED)
        ok = self.propagate()
        forced = len(self.trail) - mark - 1
        self.undo(mark)
        return ok, forced

    def lookahead(self):
        """Test the top-ranked unassigned constraint atoms both ways.

        Returns ``(CONFLICT, None)``, ``(FORCED, None)`` when some atom
        had one failing polarity and was fixed to the other,
        ``(BRANCHING, Decision)``, or ``(COMPLETE, None)`` when nothing
        is left to assign.
        """
        val = self.val
        unassigned = [a for a in self.c_atoms if val[a] == UNASSIGNED]
        if not unassigned:
            return COMPLETE, None
        score = self.scores()
        unassigned.sort(key=lambda a: (-score.get(a, 0), a))
        k = self.lookahead_k(len(unassigned))
        forced_any = False
        best = None
        for a in unassigned[:k]:
            if val[a] != UNASSIGNED:
                continue
            self.stats.lookahead_tests += 1
            ok_t, f_t = self._probe(a, TRUE)
            ok_f, f_f = self._probe(a, FALSE)
            if not ok_t and not ok_f:
                self._trace(f"lookahead: {self._name(a)} fails both ways")
                return CONFLICT, None
            if not (ok_t and ok_f):
                forced = FALSE if not ok_t else TRUE
                self.stats.forced_by_lookahead += 1
                self._trace(f"lookahead: {self._name(a)} forced {'T' if forced == TRUE else 'F'}")
                self.assign(a, forced, PROPAGATED)
                if not self.propagate():
                    return CONFLICT, None
                forced_any = True
                continue
            key = (branch_score(f_t, f_f), -a)
            if best is None or key > best[0]:
                best = (key, a, TRUE if f_t >= f_f else FALSE)
        if forced_any or best is None:
            return FORCED, None
        return BRANCHING, Decision(best[1], best[2])

    # --- search ---------------------------------------------------------------

    def _name(self, a: int) -> str:
        return self.theory.atom(a).name

    def _trace(self, msg: str) -> None:
        if self.log:
            self.log(msg)

    def _event(self, kind: str) -> None:
        if self.on_event:
            self.on_event(kind, self)

    def _post_satisfied(self) -> bool:
        """All constraint atoms assigned: underived Horn atoms count as false."""
        val = self.val
        for c in range(len(self.theory.clauses), len(self.cl_lits)):
            if self.cl_true[c]:
                continue
            for lit in self.cl_lits[c]:
                x = val[abs(lit)]
                if (lit > 0 and x == TRUE) or (lit < 0 and x != TRUE):
                    break
            else:
                return False
        return True

    def _current_model(self) -> AnswerSet:
        m = [a for a in self.c_atoms if self.val[a] == TRUE]
        answer = answer_set_for(self.theory, m)
        if not check_answer_set(self.theory, answer.m):
            raise AssertionError("solver produced a set that is not an answer set")
        derived = {a for a in range(1, self.n + 1) if self.val[a] == TRUE}
        if derived != set(answer.closure):
            raise AssertionError("solver closure disagrees with the least model")
        return answer

    def _backtrack(self) -> bool:
        """Flip the most recent untried branch; False when none is left."""
        while self.decisions:
            d = self.decisions.pop()
            mark = self._marks.pop()
            self.undo(mark)
            if d.polarity_forced:
                continue
            self.stats.backtracks += 1
            flipped = Decision(d.atom, -d.value, True)
            self._trace(f"backtrack: {self._name(d.atom)}={'T' if flipped.value == TRUE else 'F'} at level {len(self.decisions) + 1}")
            self.decisions.append(flipped)
            self._marks.append(mark)
            self.assign(d.atom, flipped.value, BRANCH)
            self._event("backtrack")
            return True
        return False

    def iter_answer_sets(self) -> Iterator[AnswerSet]:
        """Enumerate every answer set exactly once."""
        if self._initialized:
            raise RuntimeError("a Solver instance runs one search only")
        start = time.process_time()
        self._marks: list[int] = []
        try:
            ok = self.initialize()
            while True:
                if ok:
                    ok = self.propagate()
                if ok:
                    outcome, decision = self.lookahead()
                    if outcome == COMPLETE:
                        if self._post_satisfied():
                            self.stats.models_found += 1
                            self._trace("answer set found")
                            self._event("model")
                            self.stats.cpu_ms = (time.process_time() - start) * 1000
                            yield self._current_model()
                        else:
                            self._trace("post-constraint violated by closure")
                        ok = False
                    elif outcome == FORCED:
                        continue
                    elif outcome == BRANCHING:
                        self.stats.decisions += 1
                        self._marks.append(len(self.trail))
                        self.decisions.append(decision)
                        self._trace(f"branch: {self._name(decision.atom)}={'T' if decision.value == TRUE else 'F'} at level {len(self.decisions)}")
                        self.assign(decision.atom, decision.value, BRANCH)
                        self._event("decision")
                        continue
                    else:
                        ok = False
                if not ok:
                    if not self._backtrack():
                        return
                    ok = True
        finally:
            self.stats.cpu_ms = (time.process_time() - start) * 1000

    def solve(self) -> Optional[AnswerSet]:
        for answer in self.iter_answer_sets():
            return answer
        return None

    def count(self) -> int:
        return sum(1 for _ in self.iter_answer_sets())


def solve(theory: GroundTheory, **kwargs) -> tuple[Optional[AnswerSet], Stats]:
    s = Solver(theory, **kwargs)
    answer = s.solve()
    return answer, s.stats


def count_answer_sets(theory: GroundTheory, **kwargs) -> tuple[int, Stats]:
    s = Solver(theory, **kwargs)
    n = s.count()
    return n, s.stats

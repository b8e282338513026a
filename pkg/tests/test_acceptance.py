"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line (visible with
``pytest -v`` too, the lines bypass capture).  ``DC_STRETCH=1`` also runs the
optional Schur 4-44/4-45 instances, which have no time budget.
"""

import itertools
import os
import random
import re
import signal
import statistics
import time
from contextlib import contextmanager

import numpy as np
import pytest

from dcsys import benchmarks
from dcsys.cli import dcs_main, ground_main
from dcsys.oracle import TheoryGenParams, enumerate_answer_sets, random_theory
from dcsys.oracle import count_answer_sets as oracle_count
from dcsys.solver import BRANCH, Solver, count_answer_sets, solve
from dcsys.theory import HornClause, check_answer_set, least_model

from test_solver import _fixpoint, select_as_clauses

HAM_VERTICES = 30
HAM_DENSITY = 0.15  # about half of the graphs have a hamilton cycle
HAM_INSTANCES = 100
HAM_CAP_S = 20


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in benchmarks.RULE_FILES + benchmarks.DATA_FILES:
        (tmp_path / name).write_text(benchmarks.read(name))
    return tmp_path


def run_cli(capsys, rule, data, consts, *dcs_flags):
    """ground + dcs in-process; returns (exit code, stdout, tdc name, seconds)."""
    argv = ["-r", rule, "-d", *data] + (["-c", *consts] if consts else [])
    t0 = time.perf_counter()
    assert ground_main(argv) == 0
    name = capsys.readouterr().out.strip().splitlines()[-1]
    code = dcs_main(["-f", name, *dcs_flags])
    out = capsys.readouterr().out
    return code, out, name, time.perf_counter() - t0


# --- independent oracles -----------------------------------------------------

def schur_partition_exists(boxes, n):
    """All boxes**n colourings at once; a colouring fails when x, y, x+y share a box."""
    digits = np.arange(boxes ** n, dtype=np.int64)
    colour = np.empty((boxes ** n, n + 1), dtype=np.int8)
    for x in range(1, n + 1):
        colour[:, x] = digits % boxes
        digits //= boxes
    ok = np.ones(boxes ** n, dtype=bool)
    for x in range(1, n + 1):
        for y in range(x, n + 1 - x):
            ok &= ~((colour[:, x] == colour[:, y]) & (colour[:, y] == colour[:, x + y]))
    return bool(ok.any())


def queens_by_permutation(n):
    return sum(
        1
        for cols in itertools.permutations(range(n))
        if len({r + c for r, c in enumerate(cols)}) == n and len({r - c for r, c in enumerate(cols)}) == n
    )


def colourings(vertices, edges, k=3):
    return sum(
        1
        for col in itertools.product(range(k), repeat=len(vertices))
        if all(col[vertices.index(a)] != col[vertices.index(b)] for a, b in edges)
    )


def has_hamilton_cycle(n, edges):
    """Held-Karp dynamic programme over vertex subsets starting at vertex 1."""
    succ = {v: set() for v in range(1, n + 1)}
    for a, b in edges:
        succ[a].add(b)
    reach = {(1 << 0, 1)}
    frontier = reach
    for _ in range(n - 1):
        nxt = set()
        for mask, v in frontier:
            for w in succ[v]:
                bit = 1 << (w - 1)
                if w != 1 and not mask & bit:
                    nxt.add((mask | bit, w))
        frontier = nxt
    full = (1 << n) - 1
    return any(mask == full and 1 in succ[v] for mask, v in frontier)


def is_hamilton_cycle(n, chosen):
    nxt = dict(chosen)
    if len(nxt) != n or sorted(nxt.values()) != list(range(1, n + 1)):
        return False
    v, seen = 1, set()
    while v not in seen:
        seen.add(v)
        v = nxt[v]
    return len(seen) == n


def hc_edges(theory, answer):
    return [theory.atom(a).args for a in answer.m]


class Timeout(Exception):
    pass


@contextmanager
def time_limit(seconds):
    def fire(*_):
        raise Timeout()
    old = signal.signal(signal.SIGALRM, fire)
    signal.alarm(seconds)
    try:
        yield
    finally:
        signal.alarm(0)
        signal.signal(signal.SIGALRM, old)


# --- criteria ------------------------------------------------------------------

def test_1_grounding_size(report):
    sizes, slowest = set(), 0.0
    for seed in range(5):
        edges = benchmarks.digraph_with_degree(30, 130, seed)
        t0 = time.perf_counter()
        t = benchmarks.load("hcp", [], {"i": 1}, extra_data=[benchmarks.digraph_edb(range(1, 31), edges)])
        slowest = max(slowest, time.perf_counter() - t0)
        sizes.add((t.n_atoms, t.n_constraints, len(t.selects), len(t.horn), len(t.post)))
    ok = sizes == {(160, 220, 60, 130, 30)} and slowest < 1.0
    report(1, ok, f"sizes {sorted(sizes)} (want 160 atoms, 220 constraints), slowest grounding {slowest:.3f}s")


def test_2_pigeonhole(report, work, capsys):
    rows = []
    for n in range(2, 9):
        code, out, _, secs = run_cli(capsys, "pigeon", ["pigeon.edb"], [f"p={n + 1}", f"h={n}"])
        rows.append((n, code, secs))
    ok = all(code == 1 and secs < 60 for _, code, secs in rows)
    shown = ", ".join(f"{n + 1}/{n}:exit {c} {s:.1f}s" for n, c, s in rows)
    report(2, ok, shown)


def test_3_schur(report, work, capsys):
    results = {}
    for n in (13, 14):
        code, out, name, secs = run_cli(capsys, "schur", ["schur.edb"], ["b=3", f"n={n}"], "-A")
        truth = schur_partition_exists(3, n)
        good = code == (0 if truth else 1) and secs < 60
        if code == 0:
            boxes = {}
            for line in out.splitlines():
                m = re.fullmatch(r"in\((\d+),(\d+)\)", line)
                if m:
                    boxes.setdefault(int(m.group(2)), set()).add(int(m.group(1)))
            good &= sorted(x for b in boxes.values() for x in b) == list(range(1, n + 1))
            good &= all(x + y not in b for b in boxes.values() for x in b for y in b)
        results[n] = (truth, code, secs, good)
    ok = results[13][0] and not results[14][0] and all(r[3] for r in results.values())
    report(3, ok, ", ".join(f"3-{n}: oracle {'SAT' if t else 'UNSAT'}, exit {c}, {s:.2f}s" for n, (t, c, s, _) in results.items()))


@pytest.mark.skipif(os.environ.get("DC_STRETCH") != "1", reason="stretch instances run only with DC_STRETCH=1")
def test_3_schur_stretch(work, capsys):
    code44, *_ = run_cli(capsys, "schur", ["schur.edb"], ["b=4", "n=44"])
    code45, *_ = run_cli(capsys, "schur", ["schur.edb"], ["b=4", "n=45"])
    with capsys.disabled():
        print(f"\ncriterion 3 (stretch): 4-44 exit {code44}, 4-45 exit {code45}")
    assert (code44, code45) == (0, 1)


def test_4_queens(report, work, capsys):
    rows = []
    for n in (4, 5, 6, 8):
        code, out, name, secs = run_cli(capsys, "queens", ["queens.edb"], [f"q={n}"], "-C")
        stat = (work / "dcs.stat").read_text().splitlines()[-1].split()
        rows.append((n, queens_by_permutation(n), int(out.split()[-1]), int(stat[4]), code, secs))
    ok = all(oracle == got == recorded and code == 0 and secs < 30 for _, oracle, got, recorded, code, secs in rows)
    report(4, ok, ", ".join(f"n={n}: {got} (oracle {o}) {s:.2f}s" for n, o, got, _, _, s in rows))


def test_5_colouring(report, work, capsys):
    t0 = time.perf_counter()
    k4_code, _, _, _ = run_cli(capsys, "color", ["k4.gph"], [])
    c5_code, out, _, _ = run_cli(capsys, "color", ["c5.gph"], [], "-C")
    secs = time.perf_counter() - t0
    k4 = colourings([1, 2, 3, 4], [(a, b) for a in range(1, 5) for b in range(a + 1, 5)])
    c5 = colourings([1, 2, 3, 4, 5], [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])
    got = int(out.split()[-1])
    ok = k4 == 0 and k4_code == 1 and c5 == got == 30 and c5_code == 0 and secs < 10
    report(5, ok, f"K4 exit {k4_code} (oracle {k4} colourings), C5 {got} answer sets (oracle {c5}), {secs:.2f}s")


def test_6_hamiltonicity(report):
    times, sat, unsat, capped, bad = [], 0, 0, 0, []
    vertices = range(1, HAM_VERTICES + 1)
    for seed in range(HAM_INSTANCES):
        edges = benchmarks.random_digraph(HAM_VERTICES, HAM_DENSITY, seed)
        t = benchmarks.load("hcp", [], {"i": 1}, extra_data=[benchmarks.digraph_edb(vertices, edges)])
        t0 = time.perf_counter()
        try:
            with time_limit(HAM_CAP_S):
                answer, _ = solve(t)
        except Timeout:
            capped += 1
            times.append(float("inf"))
            continue
        times.append(time.perf_counter() - t0)
        if answer is None:
            unsat += 1
        else:
            sat += 1
            if not (check_answer_set(t, answer.m) and is_hamilton_cycle(HAM_VERTICES, hc_edges(t, answer))):
                bad.append(seed)
    median = statistics.median(times)

    # small graphs: every status against Held-Karp, every UNSAT against the exhaustive oracle
    rng = random.Random(2024)
    small_sat = small_unsat = 0
    for _ in range(60):
        n = rng.randint(3, 10)
        edges = set(benchmarks.random_digraph(n, rng.uniform(0.1, 0.4), rng.randrange(10**6)))
        if rng.random() < 0.5:  # plant a cycle so both outcomes occur
            order = rng.sample(range(1, n + 1), n)
            planted = set(zip(order, order[1:] + order[:1]))
            edges = planted | set(rng.sample(sorted(edges - planted), min(len(edges - planted), 20 - n)))
        edges = sorted(edges)
        if len(edges) > 20:  # keep the exhaustive oracle within its 20-atom bound
            edges = sorted(rng.sample(edges, 20))
        if not edges:  # the rule file needs an edge relation to exist
            continue
        t = benchmarks.load("hcp", [], {"i": 1}, extra_data=[benchmarks.digraph_edb(range(1, n + 1), edges)])
        answer, _ = solve(t)
        truth = has_hamilton_cycle(n, edges)
        if answer is None:
            small_unsat += 1
            if truth or enumerate_answer_sets(t):
                bad.append(("small", n, edges))
        else:
            small_sat += 1
            if not (truth and check_answer_set(t, answer.m) and is_hamilton_cycle(n, hc_edges(t, answer))):
                bad.append(("small", n, edges))
    ok = not bad and median < 60
    report(6, ok, f"v=30 p={HAM_DENSITY}: {sat} SAT, {unsat} UNSAT, {capped} over the {HAM_CAP_S}s cap, "
                  f"median {median:.3f}s; v<=10: {small_sat} SAT, {small_unsat} UNSAT oracle-confirmed; {len(bad)} mismatches")


def _acceptance_params(seed):
    rng = random.Random(seed)
    budget = rng.randint(0, 40)
    cuts = sorted(rng.randint(0, budget) for _ in range(3))
    parts = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], budget - cuts[2]]
    return TheoryGenParams(rng.randint(0, 12), rng.randint(0, 8), parts[0], parts[1], parts[2], parts[3], seed)


def test_7_oracle_equivalence(report):
    t0 = time.perf_counter()
    mismatches = []
    for seed in range(500):
        t = random_theory(_acceptance_params(seed))
        assert len(t.constraint_atoms()) <= 12 and len(t.horn_atoms()) <= 8 and t.n_constraints <= 40
        want = oracle_count(t)
        got, _ = count_answer_sets(t)
        answer, _ = solve(t)
        if got != want or (answer is None) != (want == 0):
            mismatches.append(seed)
    secs = time.perf_counter() - t0
    report(7, not mismatches and secs < 120, f"500 theories, {len(mismatches)} mismatches, {secs:.1f}s")


def test_8_property_suite(report):
    failures = []
    rng = random.Random(8)
    for _ in range(300):
        rules = [HornClause(rng.randint(1, 10), tuple(rng.sample(range(1, 11), rng.randint(0, 3)))) for _ in range(rng.randint(0, 15))]
        s1 = set(rng.sample(range(1, 11), rng.randint(0, 5)))
        s2 = s1 | set(rng.sample(range(1, 11), rng.randint(0, 5)))
        lm1, lm2 = least_model(rules, s1), least_model(rules, s2)
        if not (s1 <= lm1 <= lm2 and least_model(rules, lm1) == lm1):
            failures.append("least model")
    for seed in range(500):
        t = random_theory(TheoryGenParams(8, 4, 8, 3, 6, 3, seed))
        r = random.Random(seed)
        c = t.constraint_atoms()
        picks = [(a, r.choice([1, -1])) for a in r.sample(c, min(len(c), r.randint(0, 3)))]
        reference = _fixpoint(t, None, picks)
        if any(_fixpoint(t, 7919 * seed + k, picks) != reference for k in range(3)):
            failures.append(f"confluence {seed}")
    for seed in range(200):
        t = random_theory(TheoryGenParams(8, 4, 6, 4, 6, 3, seed))
        if count_answer_sets(t)[0] != count_answer_sets(select_as_clauses(t))[0]:
            failures.append(f"select-as-clauses {seed}")
        branched = []
        Solver(t, on_event=lambda kind, s: branched.extend(a for a in s.trail if not s.is_c[a] and s.reason[a] == BRANCH)).count()
        if branched:
            failures.append(f"horn branched {seed}")
    report(8, not failures, f"least-model, confluence (500 theories), Select-as-clauses, Horn-never-branched: {len(failures)} failures {failures[:3]}")


DETERMINISM_CASES = [
    ("hcp", ["1.gph"], ["i=1"], []),
    ("queens", ["queens.edb"], ["q=6"], ["-C"]),
    ("pigeon", ["pigeon.edb"], ["p=5", "h=4"], []),
    ("color", ["c5.gph"], [], ["-C", "-A"]),
    ("color", ["k4.gph"], [], []),
    ("schur", ["schur.edb"], ["b=3", "n=13"], ["-A"]),
]


def test_9_determinism(report, work, capsys):
    differing = []
    for rule, data, consts, flags in DETERMINISM_CASES:
        seen = set()
        for _ in range(20):
            code, out, name, _ = run_cli(capsys, rule, data, consts, *flags)
            stat = (work / "dcs.stat").read_text().splitlines()[-1].rsplit(" ", 1)[0]
            seen.add((code, out, (work / name).read_bytes(), stat))
        if len(seen) != 1:
            differing.append(rule)
    report(9, not differing, f"{len(DETERMINISM_CASES)} benchmarks x 20 runs, differing: {differing or 'none'}")

"""
Counting N-queens solutions
===========================

Exhaustive search keeps going after each answer set, as if it had hit a
conflict, so the solver doubles as an exact model counter.
"""

import time

from dcsys import benchmarks
from dcsys.solver import count_answer_sets

print(benchmarks.read("queens"))

###############################################################################
# Counts for a few board sizes.  The statistics show how much of the tree
# the lookahead manages to cut away.

for q in range(4, 9):
    theory = benchmarks.load("queens", ["queens.edb"], {"q": q})
    t0 = time.perf_counter()
    count, stats = count_answer_sets(theory)
    print(f"q={q}: {count:3d} solutions  {stats.decisions:5d} decisions  "
          f"{stats.forced_by_lookahead:4d} literals fixed by lookahead  {time.perf_counter() - t0:.2f}s")

"""
Schur numbers
=============

Split ``1..n`` into ``b`` boxes so that no box holds ``x``, ``y`` and
``x + y``.  With three boxes this works up to 13 and fails from 14 on.
"""

from dcsys import benchmarks
from dcsys.solver import solve

for n in (12, 13, 14):
    theory = benchmarks.load("schur", ["schur.edb"], {"b": 3, "n": n})
    answer, stats = solve(theory)
    if answer is None:
        print(f"n={n}: impossible ({stats.backtracks} backtracks)")
        continue
    boxes = {}
    for a in answer.m:
        x, box = theory.atom(a).args
        boxes.setdefault(box, []).append(x)
    print(f"n={n}:", [sorted(v) for _, v in sorted(boxes.items())])

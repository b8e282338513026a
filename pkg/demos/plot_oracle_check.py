"""
Checking the solver against brute force
=======================================

The oracle enumerates every subset of the constraint atoms with numpy and
keeps the answer sets.  On small random theories its count must agree with
the backtracking solver exactly.
"""

from dcsys.oracle import TheoryGenParams, enumerate_answer_sets, random_theory
from dcsys.solver import count_answer_sets
from dcsys.tdc import format_tdc

params = TheoryGenParams(n_c_atoms=5, n_h_atoms=2, n_clauses=4, n_selects=1, n_horn=3, n_post=2, seed=11)
theory = random_theory(params)
print(format_tdc(theory))

###############################################################################
# Both sides of the comparison on this one theory.

truth = enumerate_answer_sets(theory)
count, _ = count_answer_sets(theory)
print(f"oracle {len(truth)}, solver {count}")
for m in sorted(truth, key=sorted):
    print(" ", sorted(theory.atom(a).name for a in m))

###############################################################################
# And over a few hundred seeds.

bad = 0
for seed in range(300):
    t = random_theory(TheoryGenParams(8, 4, 8, 3, 6, 3, seed))
    bad += count_answer_sets(t)[0] != len(enumerate_answer_sets(t))
print(f"{bad} disagreements in 300 theories")

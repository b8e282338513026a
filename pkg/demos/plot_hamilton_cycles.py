"""
Hamilton cycles with Horn rules
===============================

The hamiltonicity encoding picks one outgoing and one incoming edge per
vertex with two ``Select`` rules, then uses Horn rules to compute which
vertices are reachable from the start vertex.  A post-constraint demands
that every vertex is reached, which rules out unions of disjoint cycles.
"""

from dcsys import benchmarks
from dcsys.solver import solve
from dcsys.theory import check_answer_set

print(benchmarks.read("hcp"))

###############################################################################
# A random digraph on 12 vertices.  Around density 0.3 roughly half the
# graphs of this size have a hamilton cycle.

n = 12
edges = benchmarks.random_digraph(n, 0.3, seed=7)
theory = benchmarks.load("hcp", [], {"i": 1}, extra_data=[benchmarks.digraph_edb(range(1, n + 1), edges)])
print(f"{len(edges)} edges -> {theory.n_atoms} atoms, {theory.n_constraints} constraints")

###############################################################################
# The theory is small: one atom per edge plus one per vertex.  Selects
# account for 2n constraints, Horn rules for one per edge.

answer, stats = solve(theory)
if answer is None:
    print("no hamilton cycle")
else:
    assert check_answer_set(theory, answer.m)
    succ = dict(theory.atom(a).args for a in answer.m)
    v, tour = 1, [1]
    while succ[v] != 1:
        v = succ[v]
        tour.append(v)
    print("cycle:", " -> ".join(map(str, tour + [1])))
print(f"decisions {stats.decisions}, backtracks {stats.backtracks}, lookahead tests {stats.lookahead_tests}")

###############################################################################
# The derived ``vstd`` atoms are never guessed.  They come out of the least
# model of the Horn part, seeded with the chosen edges.

if answer is not None:
    print(sorted(answer.derived_names(theory)))

import pytest

from dcsys import benchmarks
from dcsys.edb import apply_bindings, parse_edb
from dcsys.idb import parse_idb
from dcsys.theory import CONSTRAINT, HORN, GroundAtom, GroundTheory

SMALL_GRAPH = "vtx(1).\nvtx(2).\nvtx(3).\nedge(1,3).\nedge(3,2).\n"


def make_theory(n_c, n_h=0, clauses=(), selects=(), horn=(), post=()):
    """Tiny theories by hand: atoms 1..n_c are constraint atoms, the rest Horn."""
    atoms = [GroundAtom(i, "a", (i,), CONSTRAINT) for i in range(1, n_c + 1)]
    atoms += [GroundAtom(n_c + i, "h", (i,), HORN) for i in range(1, n_h + 1)]
    return GroundTheory(atoms, list(clauses), list(selects), list(horn), list(post))


@pytest.fixture
def small_db():
    return parse_edb(SMALL_GRAPH)


@pytest.fixture
def hcp_program():
    return parse_idb(apply_bindings(benchmarks.read("hcp"), {"i": 1}))


@pytest.fixture
def small_theory():
    return benchmarks.load("hcp", [], {"i": 1}, extra_data=[SMALL_GRAPH])

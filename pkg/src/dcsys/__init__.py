"""Grounder and solver for DC theories: constraints, Horn rules and post-constraints."""

from .edb import Database, apply_bindings, merge, parse_edb
from .errors import DCError
from .grounder import ground, ground_sources
from .idb import parse_idb, validate
from .solver import Solver, count_answer_sets, solve
from .tdc import read_tdc, write_tdc
from .theory import AnswerSet, GroundTheory, check_answer_set, least_model

__all__ = [
    "AnswerSet", "DCError", "Database", "GroundTheory", "Solver",
    "apply_bindings", "check_answer_set", "count_answer_sets", "ground", "ground_sources",
    "least_model", "merge", "parse_edb", "parse_idb", "read_tdc", "solve", "validate", "write_tdc",
]

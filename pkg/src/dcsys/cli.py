"""Command-line front ends.

``ground -r rf -d df [df ...] [-c label=v ...] [-V]`` writes the ground
theory to ``<constants>_<data files>_<rule file>.tdc`` in the current
directory.  ``dcs -f file.tdc [-A] [-P] [-C] [-V]`` searches for (or counts)
answer sets and appends one line of statistics to ``dcs.stat``.

Exit codes: 0 success (answer set found, or count finished), 1 no answer
set, 2 usage error, 3 unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .edb import ConstantBinding, apply_bindings, merge, parse_edb
from .errors import DCError
from .grounder import ground, output_name
from .idb import parse_idb, validate
from .solver import Solver, Stats
from .tdc import read_tdc, write_tdc
from .theory import GroundTheory

EXIT_OK, EXIT_UNSAT, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3
STAT_FILE = "dcs.stat"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


@dataclass
class GroundArgs:
    rule_file: str
    data_files: list[str]
    bindings: list[ConstantBinding] = field(default_factory=list)
    verbose: bool = False


@dataclass
class DcsArgs:
    theory_file: str
    print_atoms: bool = False
    print_theory: bool = False
    count: bool = False
    verbose: bool = False


def _ground_parser() -> _Parser:
    p = _Parser(prog="ground", description="Ground a rule file over data files into a .tdc theory.")
    p.add_argument("-r", dest="rule", action="append", metavar="rf", help="rule (IDB) file; exactly one")
    p.add_argument("-d", dest="data", action="extend", nargs="+", metavar="df", help="data (EDB) files")
    p.add_argument("-c", dest="consts", action="extend", nargs="+", metavar="label=v", default=[],
                   help="constant substitutions, e.g. -c b=3 n=14")
    p.add_argument("-V", dest="verbose", action="store_true", help="report progress on stdout")
    return p


def parse_ground_args(argv: Optional[Sequence[str]] = None) -> GroundArgs:
    p = _ground_parser()
    ns = p.parse_args(argv)
    if not ns.rule:
        p.error("a rule file is required (-r)")
    if len(ns.rule) > 1:
        p.error("exactly one rule file may be given")
    if not ns.data:
        p.error("at least one data file is required (-d)")
    bindings: list[ConstantBinding] = []
    for text in ns.consts:
        try:
            b = ConstantBinding.parse(text)
        except ValueError as exc:
            p.error(str(exc))
        if any(x.label == b.label for x in bindings):
            p.error(f"constant {b.label} given twice")
        bindings.append(b)
    return GroundArgs(ns.rule[0], list(ns.data), bindings, ns.verbose)


def run_ground(args: GroundArgs) -> int:
    say = print if args.verbose else (lambda *a, **k: None)
    try:
        dbs = []
        for path in args.data_files:
            say(f"reading data file {path}")
            with open(path) as fh:
                dbs.append(parse_edb(apply_bindings(fh.read(), args.bindings), origin=path))
        db = merge(dbs)
        say(f"data: {len(db.relations)} relations, {sum(len(r) for r in db.relations.values())} tuples")
        say(f"reading rule file {args.rule_file}")
        with open(args.rule_file) as fh:
            program = parse_idb(apply_bindings(fh.read(), args.bindings))
        say(f"rules: {len(program.predicates)} predicates, {len(program.variables)} variables, {len(program.rules)} rules")
        diags = validate(program, db)
        if diags:
            for d in diags:
                print(f"ground: {args.rule_file}: {d}", file=sys.stderr)
            return EXIT_INPUT
        theory = ground(program, db, log=say if args.verbose else None)
    except (DCError, OSError) as exc:
        print(f"ground: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = output_name(args.bindings, args.data_files, args.rule_file)
    try:
        with open(out, "w") as fh:
            write_tdc(theory, fh)
    except OSError as exc:
        print(f"ground: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    say(f"{theory.n_atoms} atoms, {theory.n_constraints} constraints"
        + (" (unsatisfiable at ground time)" if theory.ground_unsat else ""))
    print(out)
    return EXIT_OK


def ground_main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_ground_args(argv)
    except _UsageError:
        return EXIT_USAGE
    return run_ground(args)


# --- dcs ---------------------------------------------------------------------

def _dcs_parser() -> _Parser:
    p = _Parser(prog="dcs", description="Find or count answer sets of a .tdc theory.")
    p.add_argument("-f", dest="file", metavar="filename", help="theory produced by ground")
    p.add_argument("-A", dest="atoms", action="store_true", help="print the true atoms of the answer set")
    p.add_argument("-P", dest="print_theory", action="store_true", help="print the theory and exit")
    p.add_argument("-C", dest="count", action="store_true", help="count all answer sets")
    p.add_argument("-V", dest="verbose", action="store_true", help="trace branching and backtracking")
    return p


def parse_dcs_args(argv: Optional[Sequence[str]] = None) -> DcsArgs:
    p = _dcs_parser()
    ns = p.parse_args(argv)
    if not ns.file:
        p.error("a theory file is required (-f)")
    return DcsArgs(ns.file, ns.atoms, ns.print_theory, ns.count, ns.verbose)


def stat_record(name: str, theory: GroundTheory, sat: bool, models: Optional[int], stats: Stats) -> str:
    return " ".join([
        name,
        str(theory.n_atoms),
        str(theory.n_constraints),
        "SAT" if sat else "UNSAT",
        "-" if models is None else str(models),
        str(stats.decisions),
        str(stats.backtracks),
        str(stats.lookahead_tests),
        f"{stats.cpu_ms:.1f}",
    ])


def append_stats(path: str, record: str) -> None:
    try:
        with open(path, "a") as fh:
            fh.write(record + "\n")
    except OSError as exc:
        print(f"dcs: cannot append to {path}: {exc}", file=sys.stderr)


def _print_answer(theory, answer, header="ANSWER"):
    print(header)
    for name in answer.names(theory):
        print(name)
    derived = answer.derived_names(theory)
    if derived:
        print("HORN")
        for name in derived:
            print(name)


def run_dcs(args: DcsArgs, stat_path: str = STAT_FILE) -> int:
    try:
        theory = read_tdc(args.theory_file)
    except (DCError, OSError) as exc:
        print(f"dcs: {args.theory_file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.print_theory:
        write_tdc(theory, sys.stdout)
        return EXIT_OK
    solver = Solver(theory, log=print if args.verbose else None)
    name = os.path.basename(args.theory_file)
    if args.count:
        n = 0
        for answer in solver.iter_answer_sets():
            n += 1
            if args.print_atoms:
                _print_answer(theory, answer, f"ANSWER {n}")
        print(f"MODELS {n}")
        status, models = n > 0, n
        code = EXIT_OK
    else:
        answer = solver.solve()
        status, models = answer is not None, None
        if answer is None:
            print("UNSATISFIABLE")
            code = EXIT_UNSAT
        else:
            print("SATISFIABLE")
            if args.print_atoms:
                _print_answer(theory, answer)
            code = EXIT_OK
    st = solver.stats
    if args.verbose:
        print(f"decisions {st.decisions} backtracks {st.backtracks} lookahead tests {st.lookahead_tests} "
              f"propagations {st.propagations}")
    append_stats(stat_path, stat_record(name, theory, status, models, st))
    return code


def dcs_main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_dcs_args(argv)
    except _UsageError:
        return EXIT_USAGE
    return run_dcs(args)


def ground_entry() -> None:
    sys.exit(ground_main())


def dcs_entry() -> None:
    sys.exit(dcs_main())

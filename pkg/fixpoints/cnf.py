""" cnf.py, part of django-fixpoints: CNF formulas over dense
DIMACS variables, their evaluation, two independent satisfiability
oracles and bit-exact DIMACS interchange.
"""

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .conf import app_settings
from .exceptions import DimacsParseError, InputError, ResourceError

logger = logging.getLogger(__name__)

# assignments enumerated per numpy batch in the exhaustive oracle
EXHAUSTIVE_CHUNK = 1 << 16


class Status(enum.Enum):
    SAT = 'SAT'
    UNSAT = 'UNSAT'

    def flipped(self):
        return Status.UNSAT if self is Status.SAT else Status.SAT


@dataclass(frozen=True)
class CnfFormula:
    """ A clause list over variables 1..num_vars. Clause and literal
    order are kept exactly as given.
    """
    num_vars: int
    clauses: tuple

    def __post_init__(self):
        if self.num_vars < 0:
            raise InputError(
                "num_vars must be a natural number, got {0}".format(
                    self.num_vars))
        clauses = tuple(tuple(int(lit) for lit in clause)
                        for clause in self.clauses)
        for index, clause in enumerate(clauses):
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise InputError(
                        "clause {0}: literal {1} outside 1..{2}".format(
                            index, lit, self.num_vars))
        object.__setattr__(self, 'clauses', clauses)

    @property
    def num_clauses(self):
        return len(self.clauses)


@dataclass(frozen=True)
class Assignment:
    """ Total assignment; values[v - 1] is the value of variable v. """
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, 'values',
                           tuple(bool(v) for v in self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, var):
        return self.values[var - 1]

    def satisfies(self, lit):
        return self.values[abs(lit) - 1] == (lit > 0)

    def literals(self):
        return [v if value else -v
                for v, value in enumerate(self.values, start=1)]

    def flipped(self, var):
        values = list(self.values)
        values[var - 1] = not values[var - 1]
        return Assignment(tuple(values))

    @classmethod
    def from_literals(cls, num_vars, literals):
        values = [False] * num_vars
        for lit in literals:
            if lit > 0:
                values[lit - 1] = True
        return cls(tuple(values))


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: Assignment = None

    def __post_init__(self):
        if (self.witness is None) == (self.status is Status.SAT):
            raise InputError(
                "a {0} verdict {1} a witness".format(
                    self.status.value,
                    "requires" if self.status is Status.SAT
                    else "cannot carry"))

    @property
    def tag(self):
        return self.status


def evaluate(formula, assignment):
    """ True iff every clause has a literal satisfied by the
    assignment.
    """
    if len(assignment) != formula.num_vars:
        raise InputError(
            "assignment over {0} variables given for a formula over "
            "{1}".format(len(assignment), formula.num_vars))
    return all(any(assignment.satisfies(lit) for lit in clause)
               for clause in formula.clauses)


def solve_exhaustive(formula, cap=None):
    """ Exact oracle by enumeration. Returns the lexicographically
    first model, variable 1 most significant and False before True.
    """
    if cap is None:
        cap = app_settings.EXHAUSTIVE_CAP
    n = formula.num_vars
    if n > cap:
        raise ResourceError(
            "exhaustive search over {0} variables exceeds the cap of "
            "{1}".format(n, cap))
    if any(not clause for clause in formula.clauses):
        return Verdict(Status.UNSAT)

    total = 1 << n
    for start in range(0, total, EXHAUSTIVE_CHUNK):
        index = np.arange(start, min(start + EXHAUSTIVE_CHUNK, total),
                          dtype=np.int64)
        bits = [None] + [((index >> (n - v)) & 1).astype(bool)
                         for v in range(1, n + 1)]
        alive = np.ones(len(index), dtype=bool)
        for clause in formula.clauses:
            hit = np.zeros(len(index), dtype=bool)
            for lit in clause:
                hit |= bits[lit] if lit > 0 else ~bits[-lit]
            alive &= hit
            if not alive.any():
                break
        if alive.any():
            first = int(index[int(np.argmax(alive))])
            return Verdict(Status.SAT, Assignment(
                tuple((first >> (n - v)) & 1 for v in range(1, n + 1))))
    return Verdict(Status.UNSAT)


class _Dpll(object):
    """ Chronological DPLL over two watched literals. Branching picks
    the lowest unassigned variable, true first; no learning.
    """

    def __init__(self, formula):
        self.n = formula.num_vars
        self.assign = [None] * (self.n + 1)
        self.trail = []
        self.qhead = 0
        self.next_var = 1
        self.watches = {}
        self.clauses = []
        self.units = []
        self.empty = False
        for clause in formula.clauses:
            lits = list(dict.fromkeys(clause))
            if any(-lit in lits for lit in lits):
                continue
            if not lits:
                self.empty = True
            elif len(lits) == 1:
                self.units.append(lits[0])
            else:
                index = len(self.clauses)
                self.clauses.append(lits)
                self.watches.setdefault(lits[0], []).append(index)
                self.watches.setdefault(lits[1], []).append(index)

    def value(self, lit):
        v = self.assign[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def set(self, lit):
        self.assign[abs(lit)] = lit > 0
        self.trail.append(lit)

    def undo(self, position):
        for lit in self.trail[position:]:
            self.assign[abs(lit)] = None
            self.next_var = min(self.next_var, abs(lit))
        del self.trail[position:]
        self.qhead = position

    def propagate(self):
        while self.qhead < len(self.trail):
            false_lit = -self.trail[self.qhead]
            self.qhead += 1
            watching = self.watches.get(false_lit, [])
            kept = []
            for position, index in enumerate(watching):
                clause = self.clauses[index]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                if self.value(clause[0]) is True:
                    kept.append(index)
                    continue
                for k in range(2, len(clause)):
                    if self.value(clause[k]) is not False:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(index)
                        break
                else:
                    kept.append(index)
                    if self.value(clause[0]) is False:
                        kept.extend(watching[position + 1:])
                        self.watches[false_lit] = kept
                        return False
                    self.set(clause[0])
            self.watches[false_lit] = kept
        return True

    def pick(self):
        while self.next_var <= self.n and self.assign[self.next_var] is not None:
            self.next_var += 1
        return self.next_var if self.next_var <= self.n else None

    def solve(self):
        if self.empty:
            return None
        for lit in self.units:
            if self.value(lit) is False:
                return None
            if self.value(lit) is None:
                self.set(lit)
        # decisions: (trail position, literal, alternative tried)
        decisions = []
        ok = self.propagate()
        while True:
            if ok:
                var = self.pick()
                if var is None:
                    return Assignment(tuple(self.assign[1:]))
                decisions.append((len(self.trail), var, False))
                self.set(var)
                ok = self.propagate()
                continue
            while decisions:
                position, lit, tried = decisions.pop()
                self.undo(position)
                if not tried:
                    decisions.append((position, -lit, True))
                    self.set(-lit)
                    break
            else:
                return None
            ok = self.propagate()


def solve_dpll(formula):
    model = _Dpll(formula).solve()
    if model is None:
        return Verdict(Status.UNSAT)
    return Verdict(Status.SAT, model)


def solve_pysat(formula, name=None):
    """ In-process oracle for formulas past the DPLL threshold. """
    from pysat.solvers import Solver

    if name is None:
        name = app_settings.PYSAT_SOLVER
    if any(not clause for clause in formula.clauses):
        return Verdict(Status.UNSAT)
    with Solver(name=name, bootstrap_with=[list(c) for c in formula.clauses]) as solver:
        if not solver.solve():
            return Verdict(Status.UNSAT)
        model = Assignment.from_literals(formula.num_vars, solver.get_model() or [])
    if not evaluate(formula, model):
        raise ResourceError(
            "pysat solver {0} returned a model that fails "
            "evaluation".format(name))
    return Verdict(Status.SAT, model)


def write_dimacs(formula):
    lines = ["p cnf {0} {1}".format(formula.num_vars, formula.num_clauses)]
    for clause in formula.clauses:
        lines.append(" ".join([str(lit) for lit in clause] + ["0"]))
    return "\n".join(lines) + "\n"


def dimacs_bytes(formula):
    return write_dimacs(formula).encode('ascii')


def read_dimacs(text):
    """ Parse DIMACS-CNF. Every clause sits on one line and ends with
    its 0 terminator; comment lines start with 'c'.
    """
    header = None
    clauses = []
    lineno = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0] == 'c':
            continue
        if tokens[0] == 'p':
            if header is not None:
                raise DimacsParseError(lineno, "second problem line")
            if (len(tokens) != 4 or tokens[1] != 'cnf'
                    or not tokens[2].isdigit() or not tokens[3].isdigit()):
                raise DimacsParseError(
                    lineno, "malformed header '{0}'".format(line.strip()))
            header = (int(tokens[2]), int(tokens[3]))
            continue
        if header is None:
            raise DimacsParseError(lineno, "clause before the problem line")
        try:
            literals = [int(token) for token in tokens]
        except ValueError:
            raise DimacsParseError(
                lineno, "non-integer token in '{0}'".format(line.strip()))
        if literals[-1] != 0:
            raise DimacsParseError(lineno, "missing 0 terminator")
        clause = literals[:-1]
        if 0 in clause:
            raise DimacsParseError(lineno, "0 terminator before end of line")
        for lit in clause:
            if abs(lit) > header[0]:
                raise DimacsParseError(
                    lineno, "literal {0} outside 1..{1}".format(
                        lit, header[0]))
        clauses.append(clause)
    if header is None:
        raise DimacsParseError(lineno, "missing problem line")
    if len(clauses) != header[1]:
        raise DimacsParseError(
            lineno, "header declares {0} clauses, found {1}".format(
                header[1], len(clauses)))
    return CnfFormula(header[0], clauses)

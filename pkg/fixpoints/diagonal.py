""" diagonal.py, part of django-fixpoints, builds SAT instances that a
given total classifier misclassifies.

Two tiers. The finite tier searches a small space of formulas whose
meaning is stipulated by an interpretation map. The machine tier wraps
a classifier program into a diagonal program D_t that inverts the
classifier's verdict on its own input, compiles "D_t accepts within t
steps" to CNF and feeds the resulting formula back to D_t through the
pinned-input channel.

Classifier convention: a classifier takes input (its DIMACS bytes at
address 0), always halts, and halts with HALT_ACCEPT for SAT and
HALT_REJECT for UNSAT.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import NamedTuple

from .cnf import (
    Status, CnfFormula, Verdict, dimacs_bytes, evaluate, solve_dpll,
    solve_exhaustive, solve_pysat)
from .conf import app_settings
from .exceptions import (
    BoundNotFound, ConstructionError, ContractViolation, FixpointsError,
    InputError, ResourceError)
from .machine import (
    HALTS, OPERANDS, Instruction, Op, Outcome, Program, content_hash, run)
from .tableau import decode_witness, encode

logger = logging.getLogger(__name__)

# cells above this distance from the top are reserved for the SELF image
SELF_REGION = 4096
PROLOGUE_LENGTH = 5


# Finite tier

class Claim(NamedTuple):
    """ "The classifier outputs `verdict` on formula `target`." """
    target: int
    verdict: Status


@dataclass(frozen=True)
class FiniteSpace:
    formulas: tuple
    interpretation: tuple

    def __post_init__(self):
        object.__setattr__(self, 'formulas', tuple(self.formulas))
        object.__setattr__(self, 'interpretation',
                           tuple(Claim(*c) for c in self.interpretation))
        if len(self.formulas) != len(self.interpretation):
            raise InputError("{0} formulas but {1} claims".format(
                len(self.formulas), len(self.interpretation)))
        for index, claim in enumerate(self.interpretation):
            if not 0 <= claim.target < len(self.formulas):
                raise InputError("claim of formula {0} targets {1}, outside "
                                 "the space".format(index, claim.target))

    def __len__(self):
        return len(self.formulas)


@dataclass(frozen=True)
class ClassifierTable:
    verdicts: tuple

    def __post_init__(self):
        object.__setattr__(self, 'verdicts', tuple(
            Status(v) for v in self.verdicts))

    def __getitem__(self, index):
        return self.verdicts[index]


class CaseBranch(NamedTuple):
    assumed: Status
    claim_holds: bool
    required: Status
    fails: bool


@dataclass(frozen=True)
class FiniteReport:
    fixed_point_index: int
    misclassified: bool
    case_analysis: tuple
    table: ClassifierTable
    required: tuple
    cnf_verdicts: tuple

    @property
    def divergent(self):
        """ Indices where the stipulated meaning under the table
        disagrees with the formula's real satisfiability.
        """
        return tuple(i for i, (required, real) in enumerate(
            zip(self.required, self.cnf_verdicts)) if required is not real)


def _required_verdict(claim, table_verdict):
    """ A formula is true, hence should be classified SAT, exactly when
    its claim holds.
    """
    holds = table_verdict is claim.verdict
    return holds, Status.SAT if holds else Status.UNSAT


def finite_fixed_point(space, table):
    if len(table.verdicts) != len(space):
        raise InputError("table has {0} verdicts for a space of {1}".format(
            len(table.verdicts), len(space)))
    cnf_verdicts = tuple(solve_exhaustive(f).status for f in space.formulas)
    required = tuple(
        _required_verdict(claim, table[claim.target])[1]
        for claim in space.interpretation)

    index = None
    for i, claim in enumerate(space.interpretation):
        if claim.target == i and claim.verdict is Status.UNSAT:
            index = i
            break
    branches = ()
    misclassified = False
    if index is not None:
        claim = space.interpretation[index]
        for assumed in (Status.SAT, Status.UNSAT):
            holds, needed = _required_verdict(claim, assumed)
            branches += (CaseBranch(assumed, holds, needed, needed is not assumed),)
        misclassified = required[index] is not table[index]
    return FiniteReport(index, misclassified, branches, table, required,
                        cnf_verdicts)


def self_describing_space(k):
    """ k formulas over fresh unit clauses; the last one claims the
    classifier answers UNSAT on it, the others make alternating claims
    about the last one. k = 2 gives p ("S says SAT") and not-p ("S says
    UNSAT").
    """
    if k < 1:
        raise InputError("a space needs at least one formula")
    formulas = []
    claims = []
    for i in range(k):
        var = i // 2 + 1
        formulas.append(CnfFormula(var, [[var if i % 2 == 0 else -var]]))
        if i == k - 1:
            claims.append(Claim(i, Status.UNSAT))
        else:
            claims.append(Claim(k - 1, Status.SAT if i % 2 == 0 else Status.UNSAT))
    return FiniteSpace(tuple(formulas), tuple(claims))


def minimal_space():
    return self_describing_space(2)


def all_tables(k):
    for verdicts in itertools.product((Status.SAT, Status.UNSAT), repeat=k):
        yield ClassifierTable(verdicts)


# Machine tier

def check_classifier(classifier):
    if not classifier.takes_input:
        raise ConstructionError("classifiers read their formula from memory; "
                                "declare the program with .input")
    if not any(ins.op in HALTS for ins in classifier.instructions):
        raise ConstructionError("classifier has no halting instruction")
    if any(ins.op is Op.SELF for ins in classifier.instructions):
        raise ConstructionError("classifier uses SELF, which would overwrite "
                                "the diagonal program's image")
    if classifier.memory_cells <= SELF_REGION:
        raise ConstructionError(
            "classifier memory of {0} cells leaves no room for the formula "
            "below the {1}-cell SELF region".format(
                classifier.memory_cells, SELF_REGION))


def _shifted(ins):
    if ins.op is Op.HALT_ACCEPT:
        return Instruction(Op.HALT_REJECT, ())
    if ins.op is Op.HALT_REJECT:
        return Instruction(Op.HALT_ACCEPT, ())
    args = tuple(arg + PROLOGUE_LENGTH if kind == 't' else arg
                 for kind, arg in zip(OPERANDS[ins.op], ins.args))
    return Instruction(ins.op, args)


def build_diagonal_program(classifier, t):
    """ D_t: deposit its own serialization (which embeds t) at the top
    of memory, clear the registers, then run the classifier on the
    formula at address 0 with its halts exchanged.
    """
    check_classifier(classifier)
    base = classifier.memory_cells - SELF_REGION
    prologue = (
        Instruction(Op.LOADI, (1, t & classifier.mask)),
        Instruction(Op.LOADI, (0, base)),
        Instruction(Op.SELF, (0, 1)),
        Instruction(Op.LOADI, (0, 0)),
        Instruction(Op.LOADI, (1, 0)),
    )
    return Program(
        prologue + tuple(_shifted(ins) for ins in classifier.instructions),
        register_count=max(2, classifier.register_count),
        word_bits=classifier.word_bits,
        memory_cells=classifier.memory_cells,
        takes_input=True)


def verdict_of(outcome):
    return Status.SAT if outcome.tag is Outcome.ACCEPT else Status.UNSAT


def classify(classifier, data, name='classifier', fuel=None):
    if fuel is None:
        fuel = app_settings.SIMULATION_FUEL
    outcome = run(classifier, data, fuel)
    if outcome.tag is Outcome.OUT_OF_FUEL:
        raise ResourceError("classifier {0} did not halt within {1} "
                            "steps".format(name, fuel))
    return verdict_of(outcome)


def select_oracle(formula, solver=None):
    """ (name, solve function) for a forged formula: DPLL up to the
    size threshold, then the given external solver, the configured
    solver command, or pysat.
    """
    if formula.num_vars <= app_settings.DPLL_MAX_VARS:
        return 'dpll', solve_dpll
    if solver is not None:
        return solver.name, solver.solve
    if app_settings.SOLVER_CMD:
        from .harness import ExternalSolver
        solver = ExternalSolver.from_settings()
        return solver.name, solver.solve
    name = app_settings.PYSAT_SOLVER
    return 'pysat:' + name, lambda f: solve_pysat(f, name)


class Attempt(NamedTuple):
    """ One bound tried by the search. runtime is the measured runtime
    of D_t, or t + 1 as a lower bound when it ran out of fuel.
    """
    t: int
    runtime: int
    exceeded: bool
    note: str = ''


@dataclass(frozen=True)
class MisclassificationCertificate:
    classifier_name: str
    classifier: Program
    classifier_hash: str
    diagonal_program: Program
    bound_t: int
    pinned: tuple
    forged: CnfFormula
    classifier_verdict: Status
    oracle_verdict: Verdict
    oracle: str
    transcript: tuple

    @property
    def runtime(self):
        return self.transcript[-1].runtime


def _close_quine(diagonal, t, rounds):
    """ Refine the pin set until the formula's own bytes agree with
    every initial cell D_t reads while running on them. Returns
    (formula, layout, pins, outcome) or (None, None, note, outcome).
    """
    base = diagonal.memory_cells - SELF_REGION
    pins = ()
    for round_number in range(rounds + 1):
        formula, layout = encode(diagonal, pins, t)
        data = dimacs_bytes(formula)
        if len(data) >= base:
            note = "formula of {0} bytes does not fit below the SELF region"
            return None, None, note.format(len(data)), None
        outcome = run(diagonal, data, fuel=t)
        if outcome.tag is Outcome.OUT_OF_FUEL:
            return None, None, 'exceeded', outcome
        wanted = tuple(sorted(
            (a, data[a] if a < len(data) else 0) for a in outcome.initial_reads))
        logger.debug("t=%d round %d: %d pins, %d wanted", t, round_number,
                     len(pins), len(wanted))
        if wanted == pins:
            return formula, layout, pins, outcome
        pins = wanted
    return None, None, 'pins did not close in {0} rounds'.format(rounds), outcome


def forge(classifier, t_cap, name='classifier', solver=None):
    """ Doubling search for a self-consistent bound t, then the
    misclassification certificate at that bound.

    solver, when given, is the external solver for formulas past the
    DPLL threshold.
    """
    transcript = []
    t = app_settings.T_START
    while t <= t_cap:
        diagonal = build_diagonal_program(classifier, t)
        formula, layout, pins, outcome = _close_quine(
            diagonal, t, app_settings.QUINE_ROUNDS)
        if formula is None:
            note = pins
            if outcome is None:
                transcript.append(Attempt(t, 0, False, note))
                logger.info("forge %s: t=%d, %s", name, t, note)
                break
            if outcome.tag is Outcome.OUT_OF_FUEL:
                transcript.append(Attempt(t, t + 1, True))
                logger.info("forge %s: t=%d, D_t needs more than %d steps",
                            name, t, t)
            else:
                transcript.append(Attempt(t, outcome.steps_used, False, note))
                logger.info("forge %s: t=%d, %s", name, t, note)
            t *= 2
            continue

        transcript.append(Attempt(t, outcome.steps_used, False))
        logger.info("forge %s: D_t halts in %d <= %d steps, %d pins",
                    name, outcome.steps_used, t, len(pins))
        data = dimacs_bytes(formula)
        claimed = classify(classifier, data, name)
        oracle_name, solve = select_oracle(formula, solver)
        verdict = solve(formula)
        logger.info("forge %s: %d vars, %d clauses, classifier %s, %s %s",
                    name, formula.num_vars, formula.num_clauses,
                    claimed.value, oracle_name, verdict.status.value)
        if verdict.status is Status.SAT:
            decode_witness(layout, verdict.witness, formula)
        if verdict.status is claimed:
            raise ContractViolation(
                "classifier {0} and oracle {1} agree on the forged formula "
                "at t = {2}".format(name, oracle_name, t))
        return MisclassificationCertificate(
            classifier_name=name,
            classifier=classifier,
            classifier_hash=content_hash(classifier),
            diagonal_program=diagonal,
            bound_t=t,
            pinned=pins,
            forged=formula,
            classifier_verdict=claimed,
            oracle_verdict=verdict,
            oracle=oracle_name,
            transcript=tuple(transcript))
    raise BoundNotFound(name, t_cap, transcript)


def audit_certificate(certificate):
    """ Names of the checks the certificate fails; empty when it holds.
    Uses nothing but the certificate and the deterministic toolchain.
    """
    c = certificate
    failed = []
    if content_hash(c.classifier) != c.classifier_hash:
        failed.append('hash')
    try:
        rebuilt = build_diagonal_program(c.classifier, c.bound_t)
    except FixpointsError:
        rebuilt = None
    if rebuilt != c.diagonal_program:
        failed.append('construction')
    if not c.transcript or c.transcript[-1].exceeded \
            or c.transcript[-1].runtime > c.bound_t:
        failed.append('bound')

    data = dimacs_bytes(c.forged)
    try:
        if classify(c.classifier, data, c.classifier_name) is not c.classifier_verdict:
            failed.append('simulation')
    except FixpointsError:
        failed.append('simulation')

    try:
        outcome = run(c.diagonal_program, data, fuel=c.bound_t)
        reads = tuple(sorted((a, data[a] if a < len(data) else 0)
                             for a in outcome.initial_reads))
        if outcome.tag is Outcome.OUT_OF_FUEL or reads != tuple(c.pinned):
            failed.append('pins')
    except FixpointsError:
        failed.append('pins')

    try:
        if encode(c.diagonal_program, c.pinned, c.bound_t)[0] != c.forged:
            failed.append('rederivation')
    except FixpointsError:
        failed.append('rederivation')

    resolved = solve_dpll(c.forged)
    if resolved.status is not c.oracle_verdict.status:
        failed.append('oracle')
    elif (c.oracle_verdict.witness is not None
          and not evaluate(c.forged, c.oracle_verdict.witness)):
        failed.append('witness')

    if c.classifier_verdict is c.oracle_verdict.status:
        failed.append('disagreement')
    return failed


def verify_certificate(certificate):
    failed = audit_certificate(certificate)
    if failed:
        logger.warning("certificate for %s fails: %s",
                       certificate.classifier_name, ", ".join(failed))
    return not failed

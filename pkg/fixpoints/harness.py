""" harness.py, part of django-fixpoints: the external solver adapter,
certificate persistence and the artifacts directory used by the
management commands.
"""

import hashlib
import logging
import os
import shlex
import subprocess
from dataclasses import dataclass

from django.template.loader import render_to_string

from .assembler import assemble, disassemble, load
from .cnf import (
    Assignment, Status, Verdict, evaluate, read_dimacs, write_dimacs)
from .conf import app_settings
from .diagonal import Attempt, MisclassificationCertificate
from .exceptions import AdapterError, CertificateFormatError, FixpointsError

logger = logging.getLogger(__name__)

CERTIFICATE_MAGIC = 'fixpoints-certificate 1'
CLASSIFIERS_DIR = os.path.join(os.path.dirname(__file__), 'classifiers')


def resolve_classifier(path_or_name):
    """ (name, Program) for an assembly path or a bundled classifier
    name such as 'const_unsat'.
    """
    path = path_or_name
    if not os.path.exists(path):
        bundled = os.path.join(CLASSIFIERS_DIR, path_or_name + '.asm')
        if os.path.exists(bundled):
            path = bundled
    name = os.path.splitext(os.path.basename(path))[0]
    return name, load(path)


# Artifacts

def artifacts_dir():
    path = app_settings.ARTIFACTS_DIR
    os.makedirs(path, exist_ok=True)
    return path


def store_artifact(data, suffix):
    """ Write bytes under the artifacts directory, named by their
    sha256. Returns the path.
    """
    if isinstance(data, str):
        data = data.encode('ascii')
    name = hashlib.sha256(data).hexdigest() + suffix
    path = os.path.join(artifacts_dir(), name)
    if not os.path.exists(path):
        with open(path, 'wb') as f:
            f.write(data)
    return path


# External solver

@dataclass(frozen=True)
class SolverAdapterConfig:
    """ command holds exactly one '{input}' placeholder, replaced by
    the path of the DIMACS file.
    """
    command: str
    timeout: float = 60

    def __post_init__(self):
        if self.command.count('{input}') != 1:
            raise AdapterError(
                "solver command must contain exactly one {{input}} "
                "placeholder: '{0}'".format(self.command))

    @property
    def name(self):
        return 'external:' + os.path.basename(shlex.split(self.command)[0])


def parse_solver_output(text, num_vars):
    """ Verdict from SAT-competition output: one 's' line and, for
    SATISFIABLE, 'v' lines ending in 0.
    """
    status = None
    literals = []
    for line in text.splitlines():
        words = line.split()
        if not words or words[0] == 'c':
            continue
        if words[0] == 's':
            answer = ' '.join(words[1:])
            if answer == 'SATISFIABLE':
                status = Status.SAT
            elif answer == 'UNSATISFIABLE':
                status = Status.UNSAT
            else:
                raise AdapterError("unknown solver status '{0}'".format(answer))
        elif words[0] == 'v':
            try:
                literals.extend(int(word) for word in words[1:])
            except ValueError:
                raise AdapterError("malformed model line '{0}'".format(line))
        else:
            raise AdapterError("unparseable solver output line '{0}'".format(
                line[:60]))
    if status is None:
        raise AdapterError("solver printed no 's' status line")
    if status is Status.UNSAT:
        return Verdict(Status.UNSAT)
    literals = [lit for lit in literals if lit != 0]
    if not literals and num_vars:
        raise AdapterError("solver answered SATISFIABLE without a model")
    if any(abs(lit) > num_vars for lit in literals):
        raise AdapterError("model mentions variables beyond {0}".format(
            num_vars))
    return Verdict(Status.SAT, Assignment.from_literals(num_vars, literals))


def external_solver_check(formula, config):
    dimacs = write_dimacs(formula)
    path = store_artifact(dimacs, '.cnf')
    args = shlex.split(config.command.format(input=path))
    logger.info("running %s on %s", config.name, path)
    try:
        completed = subprocess.run(args, capture_output=True, text=True,
                                   timeout=config.timeout)
    except FileNotFoundError:
        raise AdapterError("solver executable '{0}' not found".format(args[0]))
    except subprocess.TimeoutExpired:
        raise AdapterError("solver timed out after {0} seconds".format(
            config.timeout))
    verdict = parse_solver_output(completed.stdout, formula.num_vars)
    if verdict.status is Status.SAT and not evaluate(formula, verdict.witness):
        raise AdapterError("solver model fails evaluation")
    return verdict


class ExternalSolver(object):

    def __init__(self, config):
        self.config = config

    @classmethod
    def from_settings(cls, command=None, timeout=None):
        command = command or app_settings.SOLVER_CMD
        if not command:
            raise AdapterError("no solver command given and "
                               "FIXPOINTS_SOLVER_CMD is not set")
        return cls(SolverAdapterConfig(
            command, timeout or app_settings.SOLVER_TIMEOUT))

    @property
    def name(self):
        return self.config.name

    def solve(self, formula):
        return external_solver_check(formula, self.config)


# Certificates

def write_certificate(certificate):
    sections = [
        ('classifier', disassemble(certificate.classifier)),
        ('diagonal', disassemble(certificate.diagonal_program)),
        ('formula', write_dimacs(certificate.forged)),
    ]
    return render_to_string('fixpoints/certificate.txt', {
        'certificate': certificate,
        'magic': CERTIFICATE_MAGIC,
        'sections': sections,
    })


def _status(word, lineno):
    try:
        return Status(word)
    except ValueError:
        raise CertificateFormatError(
            "line {0}: unknown verdict '{1}'".format(lineno, word))


def read_certificate(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != CERTIFICATE_MAGIC:
        raise CertificateFormatError(
            "line 1: expected '{0}', got '{1}'".format(
                CERTIFICATE_MAGIC, lines[0] if lines else ''))
    fields = {}
    attempts = []
    sections = {}
    index = 1
    while index < len(lines):
        lineno = index + 1
        key, _, rest = lines[index].partition(' ')
        if key == 'begin':
            try:
                name, count = rest.split()
                count = int(count)
            except ValueError:
                raise CertificateFormatError(
                    "line {0}: malformed section header".format(lineno))
            end = index + 1 + count
            if end >= len(lines) or lines[end] != 'end':
                raise CertificateFormatError(
                    "line {0}: section {1} is not closed after {2} "
                    "lines".format(lineno, name, count))
            sections[name] = "\n".join(lines[index + 1:end]) + "\n"
            index = end + 1
            continue
        if key == 'attempt':
            words = rest.split(' ', 3)
            try:
                attempts.append(Attempt(int(words[0]), int(words[1]),
                                        words[2] == 'exceeded',
                                        words[3] if len(words) > 3 else ''))
            except (IndexError, ValueError):
                raise CertificateFormatError(
                    "line {0}: malformed attempt".format(lineno))
        elif key == 'end-certificate':
            break
        elif key:
            fields[key] = (rest, lineno)
        index += 1

    required = ('classifier-name', 'classifier-hash', 'bound-t', 'pins',
                'classifier-verdict', 'oracle', 'oracle-verdict')
    for key in required:
        if key not in fields:
            raise CertificateFormatError("missing field '{0}'".format(key))
    for name in ('classifier', 'diagonal', 'formula'):
        if name not in sections:
            raise CertificateFormatError("missing section '{0}'".format(name))

    try:
        forged = read_dimacs(sections['formula'])
        pins_text, lineno = fields['pins']
        pinned = tuple(tuple(int(x) for x in pin.split(':'))
                       for pin in pins_text.split() if pin != 'none')
        oracle_status = _status(*fields['oracle-verdict'])
        witness = None
        if oracle_status is Status.SAT:
            if 'witness' not in fields:
                raise CertificateFormatError("SAT verdict without a witness")
            literals = [int(x) for x in fields['witness'][0].split()]
            witness = Assignment.from_literals(forged.num_vars, literals)
        return MisclassificationCertificate(
            classifier_name=fields['classifier-name'][0],
            classifier=assemble(sections['classifier']),
            classifier_hash=fields['classifier-hash'][0],
            diagonal_program=assemble(sections['diagonal']),
            bound_t=int(fields['bound-t'][0]),
            pinned=pinned,
            forged=forged,
            classifier_verdict=_status(*fields['classifier-verdict']),
            oracle_verdict=Verdict(oracle_status, witness),
            oracle=fields['oracle'][0],
            transcript=tuple(attempts))
    except CertificateFormatError:
        raise
    except (FixpointsError, IndexError, ValueError) as e:
        raise CertificateFormatError(str(e))

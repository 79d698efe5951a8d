import dataclasses

from django.test import SimpleTestCase, override_settings

from ..cnf import CnfFormula, Status, dimacs_bytes
from ..diagonal import (
    PROLOGUE_LENGTH, SELF_REGION, Attempt, Claim, ClassifierTable,
    FiniteSpace, all_tables, audit_certificate, build_diagonal_program,
    classify, finite_fixed_point, forge, minimal_space, select_oracle,
    self_describing_space, verify_certificate)
from ..exceptions import (
    BoundNotFound, ConstructionError, InputError, ResourceError)
from ..machine import Instruction, Op, Outcome, Program, run, serialize
from .test_assembler import bundled


class FiniteTierTests(SimpleTestCase):

    def test_minimal_space(self):
        """ p says "S answers SAT on not-p", not-p says "S answers UNSAT
        on not-p"; not-p is the fixed point.
        """
        space = minimal_space()
        self.assertEqual(space.formulas, (CnfFormula(1, [[1]]),
                                          CnfFormula(1, [[-1]])))
        self.assertEqual(space.interpretation, (Claim(1, Status.SAT),
                                                Claim(1, Status.UNSAT)))

    def test_every_table_fails_on_two(self):
        for table in all_tables(2):
            report = finite_fixed_point(minimal_space(), table)
            self.assertEqual(report.fixed_point_index, 1)
            self.assertTrue(report.misclassified, table)
            self.assertEqual(len(report.case_analysis), 2)
            self.assertTrue(all(branch.fails for branch in report.case_analysis))

    def test_every_table_fails_on_three(self):
        space = self_describing_space(3)
        tables = list(all_tables(3))
        self.assertEqual(len(tables), 8)
        for table in tables:
            report = finite_fixed_point(space, table)
            self.assertEqual(report.fixed_point_index, 2)
            self.assertTrue(report.misclassified, table)

    def test_case_analysis(self):
        report = finite_fixed_point(minimal_space(),
                                    ClassifierTable((Status.SAT, Status.SAT)))
        sat, unsat = report.case_analysis
        self.assertEqual((sat.assumed, sat.claim_holds, sat.required),
                         (Status.SAT, False, Status.UNSAT))
        self.assertEqual((unsat.assumed, unsat.claim_holds, unsat.required),
                         (Status.UNSAT, True, Status.SAT))

    def test_divergence_from_cnf_semantics(self):
        """ The stipulated meaning of not-p disagrees with its actual
        satisfiability once S answers SAT on it.
        """
        report = finite_fixed_point(minimal_space(),
                                    ClassifierTable((Status.SAT, Status.SAT)))
        self.assertEqual(report.cnf_verdicts, (Status.SAT, Status.SAT))
        self.assertEqual(report.required, (Status.SAT, Status.UNSAT))
        self.assertEqual(report.divergent, (1,))

    def test_space_without_fixed_point(self):
        space = FiniteSpace((CnfFormula(1, [[1]]),), (Claim(0, Status.SAT),))
        report = finite_fixed_point(space, ClassifierTable((Status.UNSAT,)))
        self.assertIsNone(report.fixed_point_index)
        self.assertFalse(report.misclassified)
        self.assertEqual(report.case_analysis, ())

    def test_claim_outside_space(self):
        with self.assertRaises(InputError):
            FiniteSpace((CnfFormula(1, [[1]]),), (Claim(1, Status.SAT),))

    def test_table_size_mismatch(self):
        with self.assertRaises(InputError):
            finite_fixed_point(minimal_space(), ClassifierTable((Status.SAT,)))

    def test_empty_space(self):
        with self.assertRaises(InputError):
            self_describing_space(0)


class DiagonalProgramTests(SimpleTestCase):

    DATA = b'p cnf 1 1\n1 0\n'

    def test_prologue(self):
        classifier = bundled('const_unsat')
        diagonal = build_diagonal_program(classifier, 8)
        base = classifier.memory_cells - SELF_REGION
        self.assertEqual(diagonal.instructions[:PROLOGUE_LENGTH], (
            Instruction(Op.LOADI, (1, 8)),
            Instruction(Op.LOADI, (0, base)),
            Instruction(Op.SELF, (0, 1)),
            Instruction(Op.LOADI, (0, 0)),
            Instruction(Op.LOADI, (1, 0)),
        ))
        self.assertTrue(diagonal.takes_input)
        self.assertEqual(diagonal.memory_cells, classifier.memory_cells)

    def test_inverts_the_classifier(self):
        """ D_t accepts exactly where the classifier rejects. """
        for name in ('const_sat', 'const_unsat', 'header_check', 'scan_all',
                     'first_byte_parity'):
            classifier = bundled(name)
            diagonal = build_diagonal_program(classifier, 16)
            for data in (self.DATA, b'c comment', b''):
                outcome = run(diagonal, data, 1000)
                expected = run(classifier, data, 1000).tag
                self.assertEqual(
                    outcome.tag is Outcome.ACCEPT,
                    expected is Outcome.REJECT, (name, data))

    def test_parity_of_first_byte(self):
        """ D_t rejects formulas starting with an even byte and accepts
        the odd ones, the opposite of the classifier.
        """
        classifier = bundled('first_byte_parity')
        diagonal = build_diagonal_program(classifier, 512)
        for first in (b'p', b'c', b'\x00', b'\x01', b'\xff'):
            data = first + self.DATA[1:]
            even = data[0] % 2 == 0
            self.assertEqual(run(classifier, data, 1000).tag,
                             Outcome.ACCEPT if even else Outcome.REJECT)
            self.assertEqual(run(diagonal, data, 1000).tag,
                             Outcome.REJECT if even else Outcome.ACCEPT)

    def test_runtime_is_prologue_plus_classifier(self):
        classifier = bundled('header_check')
        outcome = run(build_diagonal_program(classifier, 16), self.DATA)
        self.assertEqual(outcome.steps_used,
                         PROLOGUE_LENGTH + run(classifier, self.DATA).steps_used)
        self.assertEqual(outcome.initial_reads, frozenset([0]))

    def test_self_image_in_memory(self):
        classifier = bundled('const_unsat')
        diagonal = build_diagonal_program(classifier, 8)
        outcome = run(diagonal, self.DATA)
        image = serialize(diagonal)
        base = classifier.memory_cells - SELF_REGION
        self.assertEqual(
            bytes(outcome.final.memory[base + k] for k in range(len(image))),
            image)

    def test_bound_is_embedded(self):
        classifier = bundled('const_sat')
        self.assertNotEqual(serialize(build_diagonal_program(classifier, 8)),
                            serialize(build_diagonal_program(classifier, 16)))

    def test_classifier_without_input(self):
        with self.assertRaises(ConstructionError):
            build_diagonal_program(Program((Instruction(Op.HALT_ACCEPT),)), 8)

    def test_classifier_with_self(self):
        classifier = Program((
            Instruction(Op.SELF, (0, 1)),
            Instruction(Op.HALT_ACCEPT),
        ), word_bits=16, memory_cells=8192, takes_input=True)
        with self.assertRaises(ConstructionError):
            build_diagonal_program(classifier, 8)

    def test_classifier_memory_too_small(self):
        classifier = Program((Instruction(Op.HALT_ACCEPT),), takes_input=True)
        with self.assertRaises(ConstructionError):
            build_diagonal_program(classifier, 8)

    def test_classifier_without_halt(self):
        classifier = Program((Instruction(Op.JMP, (0,)),), word_bits=16,
                             memory_cells=8192, takes_input=True)
        with self.assertRaises(ConstructionError):
            build_diagonal_program(classifier, 8)

    def test_classify_out_of_fuel(self):
        looping = Program((
            Instruction(Op.JZ, (0, 0)),
            Instruction(Op.HALT_ACCEPT),
        ), takes_input=True)
        with self.assertRaises(ResourceError) as cm:
            classify(looping, b'', 'looping', fuel=10)
        self.assertIn('looping', str(cm.exception))


class OracleSelectionTests(SimpleTestCase):

    FORMULA = CnfFormula(2, [[1, 2]])

    def test_small_formulas_use_dpll(self):
        self.assertEqual(select_oracle(self.FORMULA)[0], 'dpll')

    @override_settings(FIXPOINTS_DPLL_MAX_VARS=1, FIXPOINTS_SOLVER_CMD=None)
    def test_pysat_fallback(self):
        name, solve = select_oracle(self.FORMULA)
        self.assertEqual(name, 'pysat:glucose4')
        self.assertEqual(solve(self.FORMULA).status, Status.SAT)

    @override_settings(FIXPOINTS_DPLL_MAX_VARS=1)
    def test_given_solver(self):
        class Solver(object):
            name = 'external:fake'

            def solve(self, formula):
                return None
        self.assertEqual(select_oracle(self.FORMULA, Solver())[0],
                         'external:fake')


class ForgeTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super(ForgeTests, cls).setUpClass()
        cls.const_unsat = forge(bundled('const_unsat'), 1 << 10, 'const_unsat')
        cls.const_sat = forge(bundled('const_sat'), 1 << 10, 'const_sat')

    def test_const_unsat(self):
        """ D_8 runs in seven steps and reads nothing; the forged
        formula is satisfiable while the classifier says UNSAT.
        """
        c = self.const_unsat
        self.assertEqual(c.bound_t, 8)
        self.assertEqual(c.transcript, (Attempt(4, 5, True), Attempt(8, 7, False)))
        self.assertEqual(c.runtime, 7)
        self.assertEqual(c.pinned, ())
        self.assertEqual(c.classifier_verdict, Status.UNSAT)
        self.assertEqual(c.oracle_verdict.status, Status.SAT)
        self.assertEqual(audit_certificate(c), [])

    def test_const_sat(self):
        c = self.const_sat
        self.assertEqual(c.bound_t, 8)
        self.assertEqual(c.classifier_verdict, Status.SAT)
        self.assertEqual(c.oracle_verdict.status, Status.UNSAT)
        self.assertIsNone(c.oracle_verdict.witness)
        self.assertTrue(verify_certificate(c))

    def test_header_check(self):
        """ The forged formula's own first byte is 'p', so the pin set
        closes on cell 0 with value 112.
        """
        c = forge(bundled('header_check'), 64, 'header_check')
        self.assertEqual(c.bound_t, 16)
        self.assertEqual(c.pinned, ((0, 112),))
        self.assertEqual(dimacs_bytes(c.forged)[0], 112)
        self.assertEqual(c.classifier_verdict, Status.SAT)
        self.assertEqual(c.oracle_verdict.status, Status.UNSAT)
        self.assertEqual([a.exceeded for a in c.transcript], [True, True, False])
        self.assertEqual(audit_certificate(c), [])

    def test_scan_all_exceeds_every_bound(self):
        """ Reading the whole formula takes longer than any bound the
        formula can describe.
        """
        with self.assertRaises(BoundNotFound) as cm:
            forge(bundled('scan_all'), 16, 'scan_all')
        transcript = cm.exception.transcript
        self.assertEqual([a.t for a in transcript], [4, 8, 16])
        self.assertTrue(all(a.exceeded for a in transcript))
        self.assertEqual(cm.exception.t_cap, 16)

    def test_cap_below_start(self):
        with self.assertRaises(BoundNotFound) as cm:
            forge(bundled('const_unsat'), 2, 'const_unsat')
        self.assertEqual(cm.exception.transcript, [])

    def test_deterministic(self):
        self.assertEqual(forge(bundled('const_unsat'), 1 << 10, 'const_unsat'),
                         self.const_unsat)

    def test_forged_formula_is_self_consistent(self):
        """ D_t run on the formula's own bytes reads exactly the pinned
        cells and halts within the bound.
        """
        c = self.const_unsat
        outcome = run(c.diagonal_program, dimacs_bytes(c.forged), c.bound_t)
        self.assertEqual(outcome.tag, Outcome.ACCEPT)
        self.assertEqual(outcome.initial_reads, frozenset())


class LoopingClassifierForgeTests(SimpleTestCase):
    """ first_byte_parity loops over its input byte, so D_t's runtime
    depends on the formula it is forged into.
    """

    @classmethod
    def setUpClass(cls):
        super(LoopingClassifierForgeTests, cls).setUpClass()
        cls.certificate = forge(bundled('first_byte_parity'), 512,
                                'first_byte_parity')

    def test_bound_and_pins(self):
        c = self.certificate
        self.assertEqual(c.bound_t, 512)
        self.assertEqual(c.pinned, ((0, 112),))
        self.assertEqual([a.t for a in c.transcript],
                         [4, 8, 16, 32, 64, 128, 256, 512])
        self.assertEqual([a.exceeded for a in c.transcript],
                         [True] * 7 + [False])
        self.assertLessEqual(c.runtime, 512)

    def test_verdicts_disagree(self):
        """ 'p' is even: the classifier says SAT, and D_t, which rejects,
        makes the formula unsatisfiable.
        """
        c = self.certificate
        data = dimacs_bytes(c.forged)
        self.assertEqual(data[0] % 2, 0)
        self.assertEqual(c.classifier_verdict, Status.SAT)
        self.assertEqual(run(c.diagonal_program, data, c.bound_t).tag,
                         Outcome.REJECT)
        self.assertEqual(c.runtime, PROLOGUE_LENGTH
                         + run(bundled('first_byte_parity'), data).steps_used)
        self.assertEqual(c.oracle_verdict.status, Status.UNSAT)

    def test_audit(self):
        self.assertEqual(audit_certificate(self.certificate), [])


class AuditTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super(AuditTests, cls).setUpClass()
        cls.certificate = forge(bundled('const_unsat'), 1 << 10, 'const_unsat')

    def audit(self, **changes):
        return audit_certificate(dataclasses.replace(self.certificate, **changes))

    def test_hash(self):
        self.assertEqual(self.audit(classifier_hash='0' * 64), ['hash'])

    def test_verdict_flipped(self):
        failed = self.audit(classifier_verdict=Status.SAT)
        self.assertIn('simulation', failed)
        self.assertIn('disagreement', failed)

    def test_wrong_bound(self):
        failed = self.audit(bound_t=4)
        self.assertIn('construction', failed)
        self.assertIn('rederivation', failed)

    def test_exceeded_transcript(self):
        self.assertEqual(self.audit(transcript=(Attempt(8, 9, True),)), ['bound'])

    def test_swapped_formula(self):
        failed = self.audit(forged=CnfFormula(1, [[1], [-1]]))
        self.assertIn('rederivation', failed)
        self.assertIn('oracle', failed)

    def test_clause_deleted(self):
        forged = self.certificate.forged
        shorter = CnfFormula(forged.num_vars, forged.clauses[:-1])
        self.assertIn('rederivation', self.audit(forged=shorter))
        self.assertFalse(verify_certificate(
            dataclasses.replace(self.certificate, forged=shorter)))

    def test_other_classifier(self):
        failed = self.audit(classifier=bundled('const_sat'))
        self.assertIn('hash', failed)
        self.assertIn('construction', failed)
        self.assertFalse(verify_certificate(
            dataclasses.replace(self.certificate, classifier=bundled('const_sat'))))

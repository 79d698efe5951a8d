import random

from django.test import SimpleTestCase

from ..exceptions import DecodeError, InputError
from ..goedel import (
    BASE, DIGIT, And, BinDigit0, BinDigit1, Diag, Eq, Exists, ForAll, Implies,
    Not, Or, Plus, Prov, Succ, Times, Var, Zero, code, decode, denotation,
    diagonalize, free_variables, goedel_sentence, matryoshka_family, numeral,
    numeral_value, parse_formula, parse_term, pretty, self_subst, size,
    substitute)


def random_term(rng, depth, names=('x',)):
    if depth == 0:
        return rng.choice([Zero(), Var(rng.choice(names)),
                           numeral(rng.randrange(100))])
    kind = rng.randrange(6)
    if kind == 0:
        return Plus(random_term(rng, depth - 1, names),
                    random_term(rng, depth - 1, names))
    if kind == 1:
        return Times(random_term(rng, depth - 1, names),
                     random_term(rng, depth - 1, names))
    unary = (Succ, BinDigit0, BinDigit1, Diag)[rng.randrange(4)]
    if kind < 4:
        return unary(random_term(rng, depth - 1, names))
    return random_term(rng, 0, names)


def random_formula(rng, depth, names=('x',)):
    if depth == 0:
        if rng.random() < 0.5:
            return Prov(random_term(rng, 2, names))
        return Eq(random_term(rng, 2, names), random_term(rng, 2, names))
    kind = rng.randrange(5)
    if kind == 0:
        return Not(random_formula(rng, depth - 1, names))
    if kind == 1:
        cls = rng.choice((And, Or, Implies))
        return cls(random_formula(rng, depth - 1, names),
                   random_formula(rng, depth - 1, names))
    if kind == 2:
        cls = rng.choice((ForAll, Exists))
        return cls('y', random_formula(rng, depth - 1, names + ('y',)))
    return random_formula(rng, 0, names)


class CodingTests(SimpleTestCase):

    def test_alphabet(self):
        self.assertEqual(BASE, 55)
        self.assertEqual(code(Zero()), 1)

    def test_variable_names(self):
        self.assertEqual(code(Var('x')),
                         (DIGIT[Var] * BASE + DIGIT['x']) * BASE + DIGIT['END'])
        for name in ('X', '1x', 'forall', ''):
            with self.assertRaises(InputError):
                Var(name)

    def test_round_trip(self):
        """ decode inverts code on 500 random formulas and terms. """
        rng = random.Random(17)
        for _ in range(500):
            formula = random_formula(rng, 3)
            self.assertEqual(decode(code(formula)), formula)
            term = random_term(rng, 4)
            self.assertEqual(decode(code(term)), term)

    def test_injective(self):
        rng = random.Random(19)
        seen = {}
        for _ in range(300):
            formula = random_formula(rng, 2)
            seen.setdefault(code(formula), formula)
            self.assertEqual(seen[code(formula)], formula)

    def assertDecodeError(self, value, offset):
        with self.assertRaises(DecodeError) as cm:
            decode(value)
        self.assertEqual(cm.exception.offset, offset)

    def test_not_a_code(self):
        self.assertDecodeError(0, 0)

    def test_zero_digit(self):
        """ S followed by the unused digit 0. """
        self.assertDecodeError(DIGIT[Succ] * BASE, 1)

    def test_trailing_digits(self):
        self.assertDecodeError(code(Zero()) * BASE + DIGIT[Zero], 1)

    def test_truncated(self):
        self.assertDecodeError(DIGIT[Plus], 1)

    def test_empty_variable_name(self):
        with self.assertRaises(DecodeError):
            decode(DIGIT[Var] * BASE + DIGIT['END'])


class NumeralTests(SimpleTestCase):

    def test_least_significant_bit_outermost(self):
        self.assertEqual(numeral(5), BinDigit1(BinDigit0(BinDigit1(Zero()))))
        self.assertEqual(numeral(0), Zero())
        self.assertEqual(numeral(2), BinDigit0(BinDigit1(Zero())))

    def test_value(self):
        rng = random.Random(64)
        for _ in range(1000):
            n = rng.randrange(1 << 64)
            self.assertEqual(denotation(numeral(n)), n)
            self.assertEqual(numeral_value(numeral(n)), n)
            self.assertLessEqual(size(numeral(n)), n.bit_length() + 1)

    def test_non_canonical(self):
        """ A leading zero bit or a successor is not a numeral. """
        self.assertIsNone(numeral_value(BinDigit0(Zero())))
        self.assertIsNone(numeral_value(Succ(Zero())))
        self.assertIsNone(numeral_value(BinDigit1(Var('x'))))

    def test_negative(self):
        with self.assertRaises(InputError):
            numeral(-1)

    def test_denotation(self):
        term = Plus(Succ(Var('x')), Times(numeral(3), numeral(4)))
        self.assertEqual(denotation(term, {'x': 2}), 15)
        with self.assertRaises(InputError):
            denotation(Var('x'))


class SubstitutionTests(SimpleTestCase):

    def test_free_variables(self):
        formula = parse_formula("forall y. (x + y) = z")
        self.assertEqual(free_variables(formula), {'x', 'z'})

    def test_bound_occurrences_untouched(self):
        formula = parse_formula("(x = 0 & forall x. x = 0)")
        self.assertEqual(substitute(formula, 'x', numeral(3)),
                         parse_formula("(#3 = 0 & forall x. x = 0)"))

    def test_capture(self):
        formula = parse_formula("forall y. x = y")
        with self.assertRaises(InputError):
            substitute(formula, 'x', Var('y'))

    def test_self_subst(self):
        """ Substitutes the numeral of the formula's own code. """
        formula = Not(Prov(Var('x')))
        n = code(formula)
        self.assertEqual(self_subst(n), code(Not(Prov(numeral(n)))))

    def test_self_subst_rejects(self):
        with self.assertRaises(InputError):
            self_subst(code(Var('x')))
        with self.assertRaises(InputError):
            self_subst(code(Eq(Var('x'), Var('y'))))
        with self.assertRaises(InputError):
            self_subst(code(Eq(Zero(), Zero())))
        with self.assertRaises(InputError):
            self_subst(0)


class DiagonalLemmaTests(SimpleTestCase):

    def test_goedel_sentence(self):
        psi, certificate = goedel_sentence()
        self.assertTrue(certificate.passed)
        self.assertEqual(psi, Not(Prov(Diag(numeral(certificate.b)))))
        self.assertEqual(certificate.beta, Not(Prov(Diag(Var('x')))))
        self.assertEqual(free_variables(psi), set())
        self.assertEqual(certificate.delta_b, code(psi))

    def test_random_formulas(self):
        """ 200 random formulas with one free variable x: the
        certificate passes and the size bound holds.
        """
        rng = random.Random(200)
        for _ in range(200):
            theta = And(random_formula(rng, 2),
                        Eq(Var('x'), numeral(rng.randrange(10))))
            psi, certificate = diagonalize(theta)
            self.assertTrue(certificate.passed, pretty(theta))
            self.assertEqual(free_variables(psi), set())
            self.assertLessEqual(size(psi), certificate.size_bound)

    def test_size_constant(self):
        """ c is fixed at 8 for one occurrence of x and grows with each
        further occurrence.
        """
        _, certificate = goedel_sentence()
        self.assertEqual(certificate.size_constant, 8)
        self.assertEqual(certificate.size_bound,
                         size(certificate.theta) + 8 * size(certificate.beta))
        psi, certificate = diagonalize(parse_formula("x = x"))
        self.assertEqual(certificate.size_constant, 16)
        self.assertLessEqual(size(psi), certificate.size_bound)

    def test_other_variable_name(self):
        psi, certificate = diagonalize(parse_formula("exists y. (n + y) = #7"))
        self.assertTrue(certificate.passed)

    def test_requires_one_free_variable(self):
        with self.assertRaises(InputError):
            diagonalize(parse_formula("x = y"))
        with self.assertRaises(InputError):
            diagonalize(parse_formula("0 = 0"))
        with self.assertRaises(InputError):
            diagonalize(Var('x'))

    def test_matryoshka(self):
        family = matryoshka_family(2)
        self.assertEqual([n for n, _, _ in family], [0, 1])
        self.assertNotEqual(code(family[0][1]), code(family[1][1]))

    def test_matryoshka_fifty(self):
        """ Fifty pairwise distinct self-referential sentences. """
        family = matryoshka_family(50)
        self.assertTrue(all(c.passed for _, _, c in family))
        self.assertEqual(len({code(psi) for _, psi, _ in family}), 50)

    def test_matryoshka_empty(self):
        with self.assertRaises(InputError):
            matryoshka_family(0)


class SyntaxTests(SimpleTestCase):

    def test_parse(self):
        self.assertEqual(parse_formula("~Prov(x)"), Not(Prov(Var('x'))))
        self.assertEqual(
            parse_formula("forall y. ((x + #3) = S(y) -> Prov(D(y)))"),
            ForAll('y', Implies(Eq(Plus(Var('x'), numeral(3)), Succ(Var('y'))),
                                Prov(Diag(Var('y'))))))
        self.assertEqual(parse_term("(b1(0) * 0)"),
                         Times(BinDigit1(Zero()), Zero()))

    def test_pretty(self):
        self.assertEqual(pretty(numeral(5)), "#5")
        self.assertEqual(pretty(numeral(5), shorthand=False), "b1(b0(b1(0)))")
        self.assertEqual(pretty(Succ(numeral(5))), "S(#5)")
        self.assertEqual(pretty(BinDigit0(Zero())), "b0(0)")
        self.assertEqual(pretty(Or(Eq(Zero(), Zero()), Not(Prov(Var('x'))))),
                         "(0 = 0 | ~Prov(x))")

    def test_pretty_round_trip(self):
        rng = random.Random(23)
        for _ in range(300):
            formula = random_formula(rng, 3)
            self.assertEqual(parse_formula(pretty(formula)), formula)
            self.assertEqual(parse_formula(pretty(formula, False)), formula)

    def test_parse_errors(self):
        for text in ("x =", "x = 0 0", "forall forall. x = 0", "(x ^ 0) = 0",
                     "Prov(x", "(x = 0 + 0 = 0)"):
            with self.assertRaises(InputError):
                parse_formula(text)

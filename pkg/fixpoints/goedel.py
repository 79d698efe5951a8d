""" goedel.py, part of django-fixpoints: first-order arithmetic syntax,
its Goedel coding, self-substitution and the diagonal construction.

Coding. A term or formula is written in prefix form over ALPHABET and
read as a base-B numeral, most significant digit first, where B is
len(ALPHABET) + 1. Digit 0 is never used, so the reading is injective
and code(Zero) == 1. A variable is VAR, its name characters, then END.

Numerals are binary: b0(t) denotes 2t, b1(t) denotes 2t + 1, and the
least significant bit is the outermost symbol, so numeral(5) is
b1(b0(b1(0))).

Text syntax::

    term    := '0' | '#' N | var | 'S(' term ')' | 'b0(' term ')'
             | 'b1(' term ')' | 'D(' term ')'
             | '(' term '+' term ')' | '(' term '*' term ')'
    formula := term '=' term | 'Prov(' term ')' | '~' formula
             | '(' formula '&' formula ')' | '(' formula '|' formula ')'
             | '(' formula '->' formula ')'
             | 'forall' var '.' formula | 'exists' var '.' formula

'#n' is shorthand for numeral(n). D is the self-substitution symbol,
denoting self_subst.
"""

import logging
import re
from dataclasses import dataclass

from .exceptions import DecodeError, InputError

logger = logging.getLogger(__name__)


# Terms

@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class BinDigit0:
    arg: object


@dataclass(frozen=True)
class BinDigit1:
    arg: object


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not re.match(VARIABLE_REGEX, self.name) or self.name in KEYWORDS:
            raise InputError("invalid variable name '{0}'".format(self.name))


@dataclass(frozen=True)
class Succ:
    arg: object


@dataclass(frozen=True)
class Plus:
    left: object
    right: object


@dataclass(frozen=True)
class Times:
    left: object
    right: object


@dataclass(frozen=True)
class Diag:
    arg: object


# Formulas

@dataclass(frozen=True)
class Eq:
    left: object
    right: object


@dataclass(frozen=True)
class Prov:
    arg: object


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class ForAll:
    var: str
    body: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


TERMS = (Zero, BinDigit0, BinDigit1, Var, Succ, Plus, Times, Diag)
FORMULAS = (Eq, Prov, Not, And, Or, Implies, ForAll, Exists)
UNARY_TERMS = (BinDigit0, BinDigit1, Succ, Diag)

VARIABLE_CHARS = 'abcdefghijklmnopqrstuvwxyz0123456789_'
VARIABLE_REGEX = r'^[a-z][a-z0-9_]*$'
KEYWORDS = ('forall', 'exists')

# END closes a variable name
SYMBOLS = (Zero, BinDigit0, BinDigit1, Succ, Plus, Times, Diag, Var, 'END',
           Eq, Prov, Not, And, Or, Implies, ForAll, Exists)
ALPHABET = SYMBOLS + tuple(VARIABLE_CHARS)
BASE = len(ALPHABET) + 1
DIGIT = {symbol: digit for digit, symbol in enumerate(ALPHABET, start=1)}

# numeral(code(beta)) has at most log2(BASE) * |beta| + 1 symbols, so each
# occurrence of the free variable adds at most (SIZE_CONSTANT + 2) * |beta|.
SIZE_CONSTANT = 6


def is_term(obj):
    return isinstance(obj, TERMS)


def is_formula(obj):
    return isinstance(obj, FORMULAS)


def _chain(term):
    """ Split a run of unary term symbols off a term: returns the
    wrapper classes outermost first and the innermost term.
    """
    wrappers = []
    while isinstance(term, UNARY_TERMS):
        wrappers.append(type(term))
        term = term.arg
    return wrappers, term


def _wrap(wrappers, term):
    for cls in reversed(wrappers):
        term = cls(term)
    return term


# Coding

def symbols(obj):
    """ Prefix serialization as a list of alphabet digits. """
    out = []
    stack = [obj]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.append(DIGIT[Var])
            out.extend(DIGIT[c] for c in node.name)
            out.append(DIGIT['END'])
        elif isinstance(node, (ForAll, Exists)):
            out.append(DIGIT[type(node)])
            stack.append(node.body)
            stack.append(Var(node.var))
        elif isinstance(node, Zero):
            out.append(DIGIT[Zero])
        elif isinstance(node, (BinDigit0, BinDigit1, Succ, Diag, Prov, Not)):
            out.append(DIGIT[type(node)])
            stack.append(node.arg)
        elif isinstance(node, (Plus, Times, Eq, And, Or, Implies)):
            out.append(DIGIT[type(node)])
            stack.append(node.right)
            stack.append(node.left)
        else:
            raise InputError("not a term or formula: {0!r}".format(node))
    return out


def size(obj):
    return len(symbols(obj))


def code(obj):
    value = 0
    for digit in symbols(obj):
        value = value * BASE + digit
    return value


def _digits(value):
    if value < 1:
        raise DecodeError(0, "{0} is not a code".format(value))
    digits = []
    while value:
        value, digit = divmod(value, BASE)
        digits.append(digit)
    digits.reverse()
    return digits


class _Reader(object):

    def __init__(self, digits):
        self.digits = digits
        self.position = 0

    def take(self):
        if self.position >= len(self.digits):
            raise DecodeError(self.position, "code ends mid-expression")
        digit = self.digits[self.position]
        if digit == 0:
            raise DecodeError(self.position, "digit 0 is not in the alphabet")
        self.position += 1
        return ALPHABET[digit - 1]

    def name(self):
        chars = []
        while True:
            symbol = self.take()
            if symbol == 'END':
                break
            if not isinstance(symbol, str):
                raise DecodeError(self.position - 1,
                                  "symbol inside a variable name")
            chars.append(symbol)
        name = ''.join(chars)
        if not re.match(VARIABLE_REGEX, name) or name in KEYWORDS:
            raise DecodeError(self.position - 1,
                              "invalid variable name '{0}'".format(name))
        return name

    def term(self):
        wrappers = []
        at = self.position
        symbol = self.take()
        while symbol in UNARY_TERMS:
            wrappers.append(symbol)
            at = self.position
            symbol = self.take()
        if symbol is Zero:
            core = Zero()
        elif symbol is Var:
            core = Var(self.name())
        elif symbol in (Plus, Times):
            core = symbol(self.term(), self.term())
        else:
            raise DecodeError(at, "expected a term")
        return _wrap(wrappers, core)

    def formula(self):
        at = self.position
        symbol = self.take()
        if symbol is Eq:
            return Eq(self.term(), self.term())
        if symbol is Prov:
            return Prov(self.term())
        if symbol is Not:
            return Not(self.formula())
        if symbol in (And, Or, Implies):
            return symbol(self.formula(), self.formula())
        if symbol in (ForAll, Exists):
            if self.take() is not Var:
                raise DecodeError(self.position - 1, "quantifier needs a variable")
            return symbol(self.name(), self.formula())
        raise DecodeError(at, "expected a formula")


def decode(value):
    """ Inverse of code. Raises DecodeError naming the digit position
    when value is not the code of a term or formula.
    """
    digits = _digits(value)
    reader = _Reader(digits)
    first = ALPHABET[digits[0] - 1] if digits[0] else None
    if first in FORMULAS:
        result = reader.formula()
    else:
        result = reader.term()
    if reader.position != len(digits):
        raise DecodeError(reader.position, "{0} trailing digits".format(
            len(digits) - reader.position))
    return result


# Numerals and substitution

def numeral(n):
    if n < 0:
        raise InputError("numerals denote naturals, got {0}".format(n))
    bits = []
    while n:
        bits.append(n & 1)
        n >>= 1
    term = Zero()
    for bit in reversed(bits):
        term = BinDigit1(term) if bit else BinDigit0(term)
    return term


def numeral_value(term):
    """ n when term is exactly numeral(n), else None. """
    wrappers, core = _chain(term)
    if not isinstance(core, Zero) or any(w not in (BinDigit0, BinDigit1)
                                         for w in wrappers):
        return None
    if wrappers and wrappers[-1] is BinDigit0:
        return None
    value = 0
    for cls in reversed(wrappers):
        value = 2 * value + (1 if cls is BinDigit1 else 0)
    return value


def free_variables(obj):
    if isinstance(obj, TERMS):
        _, core = _chain(obj)
        if isinstance(core, Var):
            return {core.name}
        if isinstance(core, (Plus, Times)):
            return free_variables(core.left) | free_variables(core.right)
        return set()
    if isinstance(obj, (Eq, And, Or, Implies)):
        return free_variables(obj.left) | free_variables(obj.right)
    if isinstance(obj, (Prov, Not)):
        return free_variables(obj.arg)
    if isinstance(obj, (ForAll, Exists)):
        return free_variables(obj.body) - {obj.var}
    raise InputError("not a term or formula: {0!r}".format(obj))


def substitute(obj, name, replacement, bound=frozenset()):
    """ obj with every free occurrence of variable name replaced. """
    if isinstance(obj, TERMS):
        wrappers, core = _chain(obj)
        if isinstance(core, Var):
            if core.name != name:
                return obj
            captured = free_variables(replacement) & bound
            if captured:
                raise InputError("substituting for {0} captures {1}".format(
                    name, ", ".join(sorted(captured))))
            core = replacement
        elif isinstance(core, (Plus, Times)):
            core = type(core)(substitute(core.left, name, replacement, bound),
                              substitute(core.right, name, replacement, bound))
        return _wrap(wrappers, core)
    if isinstance(obj, (Eq, And, Or, Implies)):
        return type(obj)(substitute(obj.left, name, replacement, bound),
                         substitute(obj.right, name, replacement, bound))
    if isinstance(obj, (Prov, Not)):
        return type(obj)(substitute(obj.arg, name, replacement, bound))
    if isinstance(obj, (ForAll, Exists)):
        if obj.var == name:
            return obj
        return type(obj)(obj.var, substitute(obj.body, name, replacement,
                                             bound | {obj.var}))
    raise InputError("not a term or formula: {0!r}".format(obj))


def _only_free_variable(formula):
    names = free_variables(formula)
    if len(names) != 1:
        raise InputError(
            "expected exactly one free variable, found {0}{1}".format(
                len(names), ": " + ", ".join(sorted(names)) if names else ""))
    return names.pop()


def self_subst(n):
    """ The diagonal function: code of decode(n) with its free variable
    replaced by numeral(n).
    """
    try:
        formula = decode(n)
    except DecodeError as e:
        raise InputError("{0} is not a formula code ({1})".format(n, e))
    if not is_formula(formula):
        raise InputError("{0} codes a term, not a formula".format(n))
    name = _only_free_variable(formula)
    return code(substitute(formula, name, numeral(n)))


def denotation(term, env=None):
    """ Standard-model value of a term, with D read as self_subst. """
    env = env or {}
    wrappers, core = _chain(term)
    if isinstance(core, Zero):
        value = 0
    elif isinstance(core, Var):
        if core.name not in env:
            raise InputError("variable {0} has no value".format(core.name))
        value = env[core.name]
    elif isinstance(core, Plus):
        value = denotation(core.left, env) + denotation(core.right, env)
    elif isinstance(core, Times):
        value = denotation(core.left, env) * denotation(core.right, env)
    else:
        raise InputError("not a term: {0!r}".format(core))
    for cls in reversed(wrappers):
        if cls is BinDigit0:
            value = 2 * value
        elif cls is BinDigit1:
            value = 2 * value + 1
        elif cls is Succ:
            value += 1
        else:
            value = self_subst(value)
    return value


# Diagonal lemma

@dataclass(frozen=True)
class DiagonalCertificate:
    theta: object
    beta: object
    b: int
    psi: object
    psi_code: int
    delta_b: int

    @property
    def passed(self):
        return self.delta_b == self.psi_code

    @property
    def size_constant(self):
        """ c in |psi| <= |theta| + c * |beta|. It is SIZE_CONSTANT + 2
        per occurrence of the free variable in theta, so 8 for the usual
        single occurrence.
        """
        occurrences = (symbols(self.beta).count(DIGIT[Diag])
                       - symbols(self.theta).count(DIGIT[Diag]))
        return occurrences * (SIZE_CONSTANT + 2)

    @property
    def size_bound(self):
        return size(self.theta) + self.size_constant * size(self.beta)


def diagonalize(theta):
    """ psi := beta[x := numeral(code(beta))] with beta := theta[x := D(x)].
    The certificate evaluates the D term of psi and compares it with
    code(psi).
    """
    if not is_formula(theta):
        raise InputError("diagonalize takes a formula")
    name = _only_free_variable(theta)
    beta = substitute(theta, name, Diag(Var(name)))
    b = code(beta)
    psi = substitute(beta, name, numeral(b))
    certificate = DiagonalCertificate(
        theta=theta, beta=beta, b=b, psi=psi, psi_code=code(psi),
        delta_b=denotation(Diag(numeral(b))))
    logger.debug("diagonalized %d-symbol formula into %d symbols",
                 size(theta), size(psi))
    return psi, certificate


def goedel_sentence():
    return diagonalize(Not(Prov(Var('x'))))


def matryoshka_family(n_max):
    """ phi_n := diagonalize(~Prov((x + #n))) for n < n_max. """
    if n_max < 1:
        raise InputError("n_max must be at least 1, got {0}".format(n_max))
    family = []
    for n in range(n_max):
        psi, certificate = diagonalize(Not(Prov(Plus(Var('x'), numeral(n)))))
        family.append((n, psi, certificate))
    return family


# Text syntax

TOKEN_REGEX = re.compile(
    r'\s*(->|#\d+|[A-Za-z_][A-Za-z0-9_]*|\d+|[()+*=~&|.])')
CONNECTIVES = {'&': And, '|': Or, '->': Implies}
TERM_FUNCTIONS = {'S': Succ, 'b0': BinDigit0, 'b1': BinDigit1, 'D': Diag}


def _tokenize(text):
    tokens = []
    position = 0
    text = text.rstrip()
    while position < len(text):
        token_match = TOKEN_REGEX.match(text, position)
        if not token_match:
            raise InputError("unexpected character at {0}: '{1}'".format(
                position, text[position:position + 10].strip()))
        tokens.append(token_match.group(1))
        position = token_match.end()
    return tokens


class _Parser(object):

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.position = 0

    def peek(self, ahead=0):
        index = self.position + ahead
        return self.tokens[index] if index < len(self.tokens) else None

    def take(self, expected=None):
        token = self.peek()
        if token is None:
            raise InputError("unexpected end of input")
        if expected is not None and token != expected:
            raise InputError("expected '{0}' at token {1}, got '{2}'".format(
                expected, self.position, token))
        self.position += 1
        return token

    def operator_inside(self):
        """ The operator at depth one of the parenthesis opening here. """
        depth = 0
        for token in self.tokens[self.position:]:
            if token == '(':
                depth += 1
            elif token == ')':
                depth -= 1
                if depth == 0:
                    return None
            elif depth == 1 and token in ('+', '*', '&', '|', '->'):
                return token
        return None

    def variable(self):
        token = self.take()
        if not re.match(VARIABLE_REGEX, token) or token in KEYWORDS:
            raise InputError("expected a variable, got '{0}'".format(token))
        return token

    def term(self):
        token = self.peek()
        if token == '0':
            self.take()
            return Zero()
        if token is not None and token.startswith('#'):
            self.take()
            return numeral(int(token[1:]))
        if token in TERM_FUNCTIONS and self.peek(1) == '(':
            self.take()
            self.take('(')
            inner = self.term()
            self.take(')')
            return TERM_FUNCTIONS[token](inner)
        if token == '(':
            self.take()
            left = self.term()
            operator = self.take()
            if operator not in ('+', '*'):
                raise InputError("expected '+' or '*', got '{0}'".format(
                    operator))
            right = self.term()
            self.take(')')
            return (Plus if operator == '+' else Times)(left, right)
        return Var(self.variable())

    def formula(self):
        token = self.peek()
        if token == '~':
            self.take()
            return Not(self.formula())
        if token in KEYWORDS:
            self.take()
            name = self.variable()
            self.take('.')
            return (ForAll if token == 'forall' else Exists)(name, self.formula())
        if token == 'Prov' and self.peek(1) == '(':
            self.take()
            self.take('(')
            inner = self.term()
            self.take(')')
            return Prov(inner)
        if token == '(' and self.operator_inside() in CONNECTIVES:
            self.take()
            left = self.formula()
            connective = self.take()
            if connective not in CONNECTIVES:
                raise InputError("expected a connective, got '{0}'".format(
                    connective))
            right = self.formula()
            self.take(')')
            return CONNECTIVES[connective](left, right)
        left = self.term()
        self.take('=')
        return Eq(left, self.term())


def parse_formula(text):
    parser = _Parser(text)
    result = parser.formula()
    if parser.peek() is not None:
        raise InputError("trailing input from '{0}'".format(parser.peek()))
    return result


def parse_term(text):
    parser = _Parser(text)
    result = parser.term()
    if parser.peek() is not None:
        raise InputError("trailing input from '{0}'".format(parser.peek()))
    return result


def pretty(obj, shorthand=True):
    """ Text form accepted by parse_formula / parse_term. Canonical
    numerals other than 0 print as '#n' when shorthand is on.
    """
    if isinstance(obj, TERMS):
        if shorthand and not isinstance(obj, Zero):
            value = numeral_value(obj)
            if value is not None:
                return "#{0}".format(value)
        wrappers, core = _chain(obj)
        if wrappers:
            names = {v: k for k, v in TERM_FUNCTIONS.items()}
            inner = pretty(core, shorthand)
            # an inner numeral run may itself shorten
            for depth in range(1, len(wrappers)):
                value = numeral_value(_wrap(wrappers[depth:], core))
                if shorthand and value is not None and value:
                    inner = "#{0}".format(value)
                    wrappers = wrappers[:depth]
                    break
            text = inner
            for cls in reversed(wrappers):
                text = "{0}({1})".format(names[cls], text)
            return text
        if isinstance(core, Zero):
            return "0"
        if isinstance(core, Var):
            return core.name
        return "({0} {1} {2})".format(pretty(core.left, shorthand),
                                      '+' if isinstance(core, Plus) else '*',
                                      pretty(core.right, shorthand))
    if isinstance(obj, Eq):
        return "{0} = {1}".format(pretty(obj.left, shorthand),
                                  pretty(obj.right, shorthand))
    if isinstance(obj, Prov):
        return "Prov({0})".format(pretty(obj.arg, shorthand))
    if isinstance(obj, Not):
        return "~{0}".format(pretty(obj.arg, shorthand))
    if isinstance(obj, (And, Or, Implies)):
        symbol = {And: '&', Or: '|', Implies: '->'}[type(obj)]
        return "({0} {1} {2})".format(pretty(obj.left, shorthand), symbol,
                                      pretty(obj.right, shorthand))
    if isinstance(obj, (ForAll, Exists)):
        return "{0} {1}. {2}".format(
            'forall' if isinstance(obj, ForAll) else 'exists', obj.var,
            pretty(obj.body, shorthand))
    raise InputError("not a term or formula: {0!r}".format(obj))

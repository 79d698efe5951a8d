""" fixpoints.py, part of django-fixpoints, renders formulas, programs
and verdicts inside the report and file templates.
"""

from re import match as regex_match

from django import template

from ..assembler import disassemble
from ..cnf import Assignment, CnfFormula, Status, Verdict, write_dimacs
from ..goedel import FORMULAS, TERMS, pretty
from ..machine import Program

register = template.Library()


@register.filter
def dimacs(formula):
    return write_dimacs(formula)


@register.filter
def assembly(program):
    if not isinstance(program, Program):
        return ''
    return disassemble(program)


@register.filter
def verdict(value):
    """ 'SAT' or 'UNSAT' for a Status, a Verdict or a Claim. """
    if isinstance(value, Verdict):
        value = value.status
    if isinstance(value, Status):
        return value.value
    return ''


def _clause_text(clause):
    if not clause:
        return "false"
    literals = ["~p{0}".format(-lit) if lit < 0 else "p{0}".format(lit)
                for lit in clause]
    if len(literals) == 1:
        return literals[0]
    return "({0})".format(" | ".join(literals))


@register.filter
def formula(value):
    """ Text form of an arithmetic term or formula, or of a CNF
    formula as a conjunction over p1, p2, ...
    """
    if isinstance(value, CnfFormula):
        if not value.clauses:
            return "true"
        return " & ".join(_clause_text(clause) for clause in value.clauses)
    if isinstance(value, TERMS + FORMULAS):
        return pretty(value)
    return str(value)


@register.filter
def model(assignment):
    """ Space-separated DIMACS literals of an Assignment. """
    if not isinstance(assignment, Assignment):
        return ''
    return " ".join(str(lit) for lit in assignment.literals())


@register.filter
def pins(pinned):
    if not pinned:
        return "none"
    return " ".join("{0}:{1}".format(a, v) for a, v in pinned)


@register.filter
def line_count(text):
    return len(text.splitlines())


@register.filter
def claim(value):
    """ The sentence a Claim asserts, F<n> naming formula n. """
    inner = "S(F{0}) = SAT".format(value.target)
    if value.verdict is Status.UNSAT:
        return "~({0})".format(inner)
    return inner


class BiconditionalNode(template.Node):
    """ Renders 'left <-> right'; formula objects go through the
    formula filter first.
    """

    def __init__(self, left, right, asvar):
        # left and right are template.Variable instances
        self.left = left
        self.right = right
        self.asvar = asvar

    def render(self, context):
        text = "{0} <-> {1}".format(
            formula(self.left.resolve(context)),
            formula(self.right.resolve(context)))
        if self.asvar:
            context[self.asvar] = text
            return ''
        return text


@register.tag(name="biconditional")
def do_biconditional(parser, token):
    """ {% biconditional left right [as name] %} """
    bits = token.split_contents()
    tag_name, arguments = bits[0], bits[1:]
    asvar = None
    if len(arguments) == 4 and arguments[2] == 'as':
        asvar = arguments[3]
        arguments = arguments[:2]
    if len(arguments) != 2:
        raise template.TemplateSyntaxError(
            "'{0}' tag requires exactly two arguments, optionally "
            "followed by 'as name'".format(tag_name))

    # a side is a template variable or a quoted literal
    side_regex = r'^([A-Za-z_][\w.]*|".*"|{0}.*{0})$'.format("'")
    for argument in arguments:
        if not regex_match(side_regex, argument):
            raise template.TemplateSyntaxError(
                "Malformed argument '{0}' to the {1} tag.".format(
                    argument, tag_name))
    if asvar is not None and not regex_match(r'^[A-Za-z_]\w*$', asvar):
        raise template.TemplateSyntaxError(
            "'{0}' is not a valid name for the {1} tag to store its "
            "result in.".format(asvar, tag_name))
    return BiconditionalNode(template.Variable(arguments[0]),
                             template.Variable(arguments[1]), asvar)

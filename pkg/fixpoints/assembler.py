""" assembler.py, part of django-fixpoints, reads and writes the
line-oriented assembly format for machine programs.

Grammar, one statement per line::

    line       := [label ':'] [directive | instruction] [';' comment]
    directive  := '.registers' N | '.word' N | '.cells' N | '.input'
    instruction:= MNEMONIC [operand {',' operand}]
    operand    := 'r' N | N | 0xHEX | label

Registers are written r0..r7, constants in decimal or hex, jump
targets as labels or instruction indices. Mnemonics are the Op names
and are case-insensitive.
"""

from re import match as regex_match

from .exceptions import AssemblyError, InputError
from .machine import OPERANDS, Instruction, Op, Program

LABEL_REGEX = r'^([A-Za-z_][\w]*)\s*:\s*(.*)$'
REGISTER_REGEX = r'^[rR](\d+)$'
NUMBER_REGEX = r'^(0[xX][0-9a-fA-F]+|\d+)$'
NAME_REGEX = r'^[A-Za-z_][\w]*$'

DIRECTIVES = {
    '.registers': 'register_count',
    '.word': 'word_bits',
    '.cells': 'memory_cells',
}


def _number(text):
    return int(text, 16) if text.lower().startswith('0x') else int(text)


def assemble(text):
    """ Parse assembly text into a Program. """
    geometry = {}
    labels = {}
    pending = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(';', 1)[0].strip()
        label_match = regex_match(LABEL_REGEX, line)
        if label_match:
            name, line = label_match.groups()
            if name in labels:
                raise AssemblyError(lineno, "label '{0}' defined twice".format(
                    name))
            labels[name] = len(pending)
        if not line:
            continue
        bits = line.split(None, 1)
        word = bits[0]
        if word.startswith('.'):
            if word == '.input':
                if len(bits) > 1:
                    raise AssemblyError(lineno, ".input takes no argument")
                geometry['takes_input'] = True
            elif word in DIRECTIVES:
                if len(bits) != 2 or not regex_match(NUMBER_REGEX, bits[1].strip()):
                    raise AssemblyError(
                        lineno, "{0} requires one numeric argument".format(word))
                geometry[DIRECTIVES[word]] = _number(bits[1].strip())
            else:
                raise AssemblyError(lineno, "unknown directive '{0}'".format(word))
            continue
        try:
            op = Op[word.upper()]
        except KeyError:
            raise AssemblyError(lineno, "unknown mnemonic '{0}'".format(word))
        operands = [o.strip() for o in bits[1].split(',')] if len(bits) > 1 else []
        if len(operands) != len(OPERANDS[op]):
            raise AssemblyError(lineno, "{0} takes {1} operands, got {2}".format(
                op.name, len(OPERANDS[op]), len(operands)))
        pending.append((lineno, op, operands))

    instructions = []
    for lineno, op, operands in pending:
        args = []
        for kind, operand in zip(OPERANDS[op], operands):
            if kind == 'r':
                register_match = regex_match(REGISTER_REGEX, operand)
                if not register_match:
                    raise AssemblyError(
                        lineno, "expected a register, got '{0}'".format(operand))
                args.append(int(register_match.groups()[0]))
            elif regex_match(NUMBER_REGEX, operand):
                args.append(_number(operand))
            elif kind == 't' and regex_match(NAME_REGEX, operand):
                if operand not in labels:
                    raise AssemblyError(
                        lineno, "undefined label '{0}'".format(operand))
                args.append(labels[operand])
            else:
                raise AssemblyError(
                    lineno, "malformed operand '{0}'".format(operand))
        instructions.append(Instruction(op, tuple(args)))
    try:
        return Program(tuple(instructions), **geometry)
    except InputError as e:
        raise AssemblyError(len(text.splitlines()), str(e))


def disassemble(program):
    """ Canonical assembly text; assemble(disassemble(p)) == p. """
    targets = set()
    for ins in program.instructions:
        for kind, arg in zip(OPERANDS[ins.op], ins.args):
            if kind == 't':
                targets.add(arg)
    lines = [
        ".registers {0}".format(program.register_count),
        ".word {0}".format(program.word_bits),
        ".cells {0}".format(program.memory_cells),
    ]
    if program.takes_input:
        lines.append(".input")
    for pc, ins in enumerate(program.instructions):
        operands = []
        for kind, arg in zip(OPERANDS[ins.op], ins.args):
            if kind == 'r':
                operands.append("r{0}".format(arg))
            elif kind == 't':
                operands.append("l{0}".format(arg))
            else:
                operands.append(str(arg))
        text = ins.op.name
        if operands:
            text += " " + ", ".join(operands)
        prefix = "l{0}:".format(pc) if pc in targets else ""
        lines.append("{0:<8}{1}".format(prefix, text))
    return "\n".join(lines) + "\n"


def load(path):
    with open(path) as f:
        return assemble(f.read())

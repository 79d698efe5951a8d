""" machine.py, part of django-fixpoints: a small register machine
with deterministic semantics, a fuel-bounded simulator and a
canonical, injective byte serialization of its programs.
"""

import enum
import functools
import hashlib
import logging
from dataclasses import dataclass
from typing import NamedTuple

from .exceptions import DecodeError, InputError

logger = logging.getLogger(__name__)

MAX_REGISTERS = 8
MAX_WORD_BITS = 32

SERIAL_MAGIC = 0x52
SERIAL_VERSION = 1


class Op(enum.IntEnum):
    LOADI = 1
    MOV = 2
    ADD = 3
    SUB = 4
    LOAD = 5
    STORE = 6
    JZ = 7
    JMP = 8
    SELF = 9
    HALT_ACCEPT = 10
    HALT_REJECT = 11


# operand kinds: 'r' register, 'c' constant, 't' jump target
OPERANDS = {
    Op.LOADI: 'rc',
    Op.MOV: 'rr',
    Op.ADD: 'rr',
    Op.SUB: 'rr',
    Op.LOAD: 'rr',
    Op.STORE: 'rr',
    Op.JZ: 'rt',
    Op.JMP: 't',
    Op.SELF: 'rr',
    Op.HALT_ACCEPT: '',
    Op.HALT_REJECT: '',
}

HALTS = (Op.HALT_ACCEPT, Op.HALT_REJECT)
MEMORY_OPS = (Op.LOAD, Op.STORE, Op.SELF)


class Instruction(NamedTuple):
    op: Op
    args: tuple = ()

    def successors(self, pc):
        """ Possible next pcs, with 'accept' and 'reject' for halts. """
        if self.op is Op.HALT_ACCEPT:
            return ('accept',)
        if self.op is Op.HALT_REJECT:
            return ('reject',)
        if self.op is Op.JMP:
            return (self.args[0],)
        if self.op is Op.JZ:
            return tuple(sorted({self.args[1], pc + 1}))
        return (pc + 1,)


class Outcome(enum.Enum):
    ACCEPT = 'Accept'
    REJECT = 'Reject'
    OUT_OF_FUEL = 'OutOfFuel'


@dataclass(frozen=True)
class Program:
    """ A register machine program. Memory cells hold words and are
    addressed by the low bits of a register, so memory_cells must be
    a power of two no larger than 2 ** word_bits.
    """
    instructions: tuple
    register_count: int = 4
    word_bits: int = 16
    memory_cells: int = 256
    takes_input: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'instructions', tuple(
            Instruction(Op(ins[0]), tuple(ins[1])) for ins in self.instructions))
        validate(self)

    @property
    def mask(self):
        return (1 << self.word_bits) - 1

    @property
    def address_bits(self):
        return self.memory_cells.bit_length() - 1

    def __len__(self):
        return len(self.instructions)


def validate(program):
    if not 1 <= program.register_count <= MAX_REGISTERS:
        raise InputError("register_count must be in 1..{0}, got {1}".format(
            MAX_REGISTERS, program.register_count))
    if not 1 <= program.word_bits <= MAX_WORD_BITS:
        raise InputError("word_bits must be in 1..{0}, got {1}".format(
            MAX_WORD_BITS, program.word_bits))
    cells = program.memory_cells
    if cells < 1 or cells & (cells - 1) or cells > (1 << program.word_bits):
        raise InputError(
            "memory_cells must be a power of two no larger than "
            "2 ** {0}, got {1}".format(program.word_bits, cells))
    count = len(program.instructions)
    if count == 0:
        raise InputError("a program needs at least one instruction")
    # input bytes and SELF image bytes land in memory unmasked
    holds_bytes = program.takes_input or any(
        ins.op is Op.SELF for ins in program.instructions)
    if holds_bytes and program.word_bits < 8:
        raise InputError("a program reading input or using SELF needs "
                         "word_bits of at least 8, got {0}".format(
                             program.word_bits))
    for pc, ins in enumerate(program.instructions):
        kinds = OPERANDS[ins.op]
        if len(ins.args) != len(kinds):
            raise InputError("{0} at {1} takes {2} operands, got {3}".format(
                ins.op.name, pc, len(kinds), len(ins.args)))
        for kind, arg in zip(kinds, ins.args):
            if kind == 'r' and not 0 <= arg < program.register_count:
                raise InputError("{0} at {1}: register r{2} outside "
                                 "r0..r{3}".format(ins.op.name, pc, arg,
                                                   program.register_count - 1))
            if kind == 'c' and not 0 <= arg <= program.mask:
                raise InputError("{0} at {1}: constant {2} does not fit in "
                                 "{3} bits".format(ins.op.name, pc, arg,
                                                   program.word_bits))
            if kind == 't' and not 0 <= arg < count:
                raise InputError("{0} at {1}: target {2} outside "
                                 "0..{3}".format(ins.op.name, pc, arg,
                                                 count - 1))
        if count in ins.successors(pc):
            raise InputError("{0} at {1} falls through the end of the "
                             "program".format(ins.op.name, pc))


class Memory(object):
    """ Immutable sparse vector of memory_cells words, zero by
    default. Only nonzero cells are stored.
    """

    def __init__(self, size, cells=None):
        self.size = size
        self._cells = {a: v for a, v in (cells or {}).items() if v}

    def __len__(self):
        return self.size

    def __getitem__(self, address):
        if not 0 <= address < self.size:
            raise IndexError(address)
        return self._cells.get(address, 0)

    def __eq__(self, other):
        if not isinstance(other, Memory):
            return NotImplemented
        return self.size == other.size and self._cells == other._cells

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):
        return "Memory({0}, {1!r})".format(self.size, self._cells)

    def nonzero(self):
        return dict(self._cells)

    def with_cells(self, updates):
        cells = dict(self._cells)
        cells.update(updates)
        return Memory(self.size, cells)

    @classmethod
    def from_bytes(cls, size, data):
        if len(data) > size:
            raise InputError("input of {0} bytes exceeds {1} memory "
                             "cells".format(len(data), size))
        return cls(size, dict(enumerate(data)))


@dataclass(frozen=True)
class Config:
    pc: int
    registers: tuple
    memory: Memory

    @classmethod
    def initial(cls, program, data=b''):
        memory = Memory(program.memory_cells)
        if program.takes_input:
            memory = Memory.from_bytes(program.memory_cells, data)
        return cls(0, (0,) * program.register_count, memory)


class Halted(NamedTuple):
    outcome: Outcome
    config: Config


@dataclass(frozen=True)
class RunOutcome:
    tag: Outcome
    steps_used: int
    final: Config
    initial_reads: frozenset = frozenset()


class _Cells(object):
    """ Copy-on-write view of a memory image that remembers which
    addresses were read before being written.
    """

    def __init__(self, base, size):
        self.base = base
        self.size = size
        self.own = None
        self.written = set()
        self.initial_reads = set()

    def read(self, address):
        if address not in self.written:
            self.initial_reads.add(address)
        cells = self.own if self.own is not None else self.base
        return cells.get(address, 0)

    def write(self, address, value):
        if self.own is None:
            self.own = dict(self.base)
        self.written.add(address)
        self.own[address] = value

    def snapshot(self):
        return Memory(self.size, self.own if self.own is not None else self.base)


def _execute(program, pc, registers, cells):
    """ Run the instruction at pc in place. Returns the next pc or an
    Outcome for a halt.
    """
    ins = program.instructions[pc]
    op, args = ins.op, ins.args
    mask = program.mask
    amask = program.memory_cells - 1
    if op is Op.LOADI:
        registers[args[0]] = args[1] & mask
    elif op is Op.MOV:
        registers[args[0]] = registers[args[1]]
    elif op is Op.ADD:
        registers[args[0]] = (registers[args[0]] + registers[args[1]]) & mask
    elif op is Op.SUB:
        registers[args[0]] = (registers[args[0]] - registers[args[1]]) & mask
    elif op is Op.LOAD:
        registers[args[0]] = cells.read(registers[args[1]] & amask)
    elif op is Op.STORE:
        cells.write(registers[args[0]] & amask, registers[args[1]])
    elif op is Op.JZ:
        return args[1] if registers[args[0]] == 0 else pc + 1
    elif op is Op.JMP:
        return args[0]
    elif op is Op.SELF:
        image = serialize(program)
        base = registers[args[0]]
        for offset, byte in enumerate(image):
            cells.write((base + offset) & amask, byte)
        registers[args[1]] = len(image) & mask
    elif op is Op.HALT_ACCEPT:
        return Outcome.ACCEPT
    else:
        return Outcome.REJECT
    return pc + 1


def step(program, config):
    """ One step. Returns the successor Config, or Halted carrying the
    halted configuration (pc = instruction count).
    """
    registers = list(config.registers)
    cells = _Cells(config.memory.nonzero(), program.memory_cells)
    result = _execute(program, config.pc, registers, cells)
    after = Config(
        len(program) if isinstance(result, Outcome) else result,
        tuple(registers), cells.snapshot())
    if isinstance(result, Outcome):
        return Halted(result, after)
    return after


def run(program, data=b'', fuel=1000):
    """ Run from the initial configuration for at most fuel steps.
    Input bytes are loaded at address 0 when the program takes input.
    """
    data = bytes(data)
    if len(data) > program.memory_cells:
        raise InputError("input of {0} bytes exceeds {1} memory "
                         "cells".format(len(data), program.memory_cells))
    start = Config.initial(program, data)
    registers = list(start.registers)
    cells = _Cells(start.memory.nonzero(), program.memory_cells)
    pc = 0
    steps = 0
    while steps < fuel:
        result = _execute(program, pc, registers, cells)
        steps += 1
        if isinstance(result, Outcome):
            final = Config(len(program), tuple(registers), cells.snapshot())
            return RunOutcome(result, steps, final,
                              frozenset(cells.initial_reads))
        pc = result
    logger.debug("program of %d instructions ran out of fuel after %d "
                 "steps", len(program), steps)
    return RunOutcome(Outcome.OUT_OF_FUEL, steps,
                      Config(pc, tuple(registers), cells.snapshot()),
                      frozenset(cells.initial_reads))


def _const_width(word_bits):
    return (word_bits + 7) // 8


@functools.lru_cache(maxsize=256)
def serialize(program):
    """ Canonical self-delimiting encoding:

        0x52 0x01 registers word_bits log2(cells) flags count(2 bytes)

    then per instruction its opcode byte and operands: registers one
    byte, targets two bytes, constants ceil(word_bits / 8) bytes, all
    big-endian.
    """
    count = len(program)
    if count > 0xffff:
        raise InputError("programs are limited to 65535 instructions")
    out = bytearray([SERIAL_MAGIC, SERIAL_VERSION, program.register_count,
                     program.word_bits, program.address_bits,
                     1 if program.takes_input else 0])
    out += count.to_bytes(2, 'big')
    width = _const_width(program.word_bits)
    for ins in program.instructions:
        out.append(int(ins.op))
        for kind, arg in zip(OPERANDS[ins.op], ins.args):
            if kind == 'r':
                out.append(arg)
            elif kind == 't':
                out += arg.to_bytes(2, 'big')
            else:
                out += arg.to_bytes(width, 'big')
    return bytes(out)


def deserialize_prefix(data, offset=0):
    """ Decode one program starting at offset. Returns the program and
    the offset just past it.
    """
    data = bytes(data)

    def take(n):
        nonlocal offset
        if offset + n > len(data):
            raise DecodeError(offset, "truncated: {0} more bytes "
                              "needed".format(offset + n - len(data)))
        chunk = data[offset:offset + n]
        offset += n
        return chunk

    start = offset
    magic, version = take(2)
    if magic != SERIAL_MAGIC or version != SERIAL_VERSION:
        raise DecodeError(start, "bad magic or version {0:#04x} "
                          "{1:#04x}".format(magic, version))
    registers, word_bits, address_bits, flags = take(4)
    if flags not in (0, 1):
        raise DecodeError(offset - 1, "bad flags byte {0}".format(flags))
    count = int.from_bytes(take(2), 'big')
    width = _const_width(word_bits)
    instructions = []
    for _ in range(count):
        at = offset
        code = take(1)[0]
        try:
            op = Op(code)
        except ValueError:
            raise DecodeError(at, "unknown opcode {0}".format(code))
        args = []
        for kind in OPERANDS[op]:
            if kind == 'r':
                args.append(take(1)[0])
            elif kind == 't':
                args.append(int.from_bytes(take(2), 'big'))
            else:
                args.append(int.from_bytes(take(width), 'big'))
        instructions.append(Instruction(op, tuple(args)))
    if address_bits > 63:
        raise DecodeError(start + 4, "address bits {0} out of "
                          "range".format(address_bits))
    try:
        program = Program(tuple(instructions), registers, word_bits,
                          1 << address_bits, bool(flags))
    except InputError as e:
        raise DecodeError(start, "ill-formed program: {0}".format(e))
    return program, offset


def deserialize(data):
    program, end = deserialize_prefix(data)
    if end != len(data):
        raise DecodeError(end, "{0} trailing bytes".format(len(data) - end))
    return program


def content_hash(program):
    return hashlib.sha256(serialize(program)).hexdigest()

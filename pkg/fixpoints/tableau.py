""" tableau.py, part of django-fixpoints, compiles "program p accepts
within t steps" into CNF and decodes satisfying assignments back into
execution traces.

Variable numbering is deterministic: the constant-true variable, then
for every time 0..t its reachable pc states and register bits, then
per step the memory access record and the auxiliary variables in the
order the constraints are emitted.

Memory is encoded by access records rather than memory columns. Every
step that may touch memory gets one record (address bits, value bits,
load/store/self flags). A load is resolved against the earlier records
latest first: a matching store supplies its value, a SELF whose block
covers the address supplies the matching byte of the program image,
and an address nobody wrote reads the initial memory, which is pinned,
zero for programs without input, or a free byte that every read of
the cell agrees on.
"""

import logging
from dataclasses import dataclass
from types import MappingProxyType

from pysat.formula import IDPool

from .cnf import evaluate
from .cnf import CnfFormula
from .exceptions import ContractViolation, InputError
from .machine import (
    MEMORY_OPS, Config, Halted, Memory, Op, Outcome, serialize, step)

logger = logging.getLogger(__name__)

HALT_STATES = ('accept', 'reject')

# emitted clauses <= CLAUSE_BOUND_C * (t*t*word_bits + t*len(program)
# + t*len(pinned)*word_bits), for register_count <= 8, word_bits <= 32.
CLAUSE_BOUND_C = 2048


def clause_bound(program, t, pinned=()):
    w = program.word_bits
    return CLAUSE_BOUND_C * (t * t * w + t * len(program)
                             + t * len(pinned) * w)


def state_order(state):
    if isinstance(state, int):
        return (0, state)
    return (1, HALT_STATES.index(state))


def reachable(program, t):
    """ Over-approximates the pc states possible at each time 0..t by
    following both arms of every JZ.
    """
    reach = [frozenset([0])]
    for _ in range(t):
        states = set()
        for state in reach[-1]:
            if state in HALT_STATES:
                states.add(state)
            else:
                states.update(program.instructions[state].successors(state))
        reach.append(frozenset(states))
    return tuple(reach)


@dataclass(frozen=True)
class TableauLayout:
    program: object
    t: int
    pinned_inputs: tuple
    var_of: MappingProxyType
    num_vars: int
    reach: tuple

    def var(self, *component):
        return self.var_of[component]


@dataclass(frozen=True)
class Trace:
    configs: tuple
    outcome: Outcome
    steps_used: int
    initial_memory: Memory


def _check_pins(program, pinned):
    pinned = tuple((int(a), int(v)) for a, v in pinned)
    addresses = [a for a, _ in pinned]
    if len(set(addresses)) != len(addresses):
        raise InputError("pinned addresses must be distinct")
    for address, value in pinned:
        if not 0 <= address < program.memory_cells:
            raise InputError("pinned address {0} outside 0..{1}".format(
                address, program.memory_cells - 1))
        if not 0 <= value <= 0xff:
            raise InputError("pinned value {0} at {1} is not a byte".format(
                value, address))
    if pinned and not program.takes_input:
        raise InputError("pins given for a program that takes no input")
    return tuple(sorted(pinned))


class _Encoder(object):

    def __init__(self, program, pinned, t):
        self.program = program
        self.pinned = pinned
        self.t = t
        self.pool = IDPool()
        self.clauses = []
        self.serial = 0
        self.true = self.var('const', 'true')
        self.clauses.append([self.true])
        self.records = {}
        self.unresolved = {}
        self.reads = []
        self.image = serialize(program)

    # bookkeeping

    def var(self, *key):
        return self.pool.id(key)

    def aux(self, kind):
        self.serial += 1
        return self.pool.id(('aux', kind, self.serial))

    def add(self, clause):
        if self.true in clause:
            return
        self.clauses.append([lit for lit in clause if lit != -self.true])

    # gates

    def iff(self, guard, x, y):
        self.add(guard + [-x, y])
        self.add(guard + [x, -y])

    def const(self, guard, bits, value):
        for b, x in enumerate(bits):
            self.add(guard + [x if (value >> b) & 1 else -x])

    def define_or(self, out, lits):
        for lit in lits:
            self.add([-lit, out])
        self.add([-out] + list(lits))

    def and_(self, lits):
        lits = [lit for lit in lits if lit != self.true]
        if -self.true in lits:
            return -self.true
        if not lits:
            return self.true
        if len(lits) == 1:
            return lits[0]
        out = self.aux('and')
        for lit in lits:
            self.add([-out, lit])
        self.add([out] + [-lit for lit in lits])
        return out

    def or_(self, lits):
        lits = [lit for lit in lits if lit != -self.true]
        if self.true in lits:
            return self.true
        if not lits:
            return -self.true
        if len(lits) == 1:
            return lits[0]
        out = self.aux('or')
        self.define_or(out, lits)
        return out

    def equal(self, xs, ys):
        diffs = []
        for x, y in zip(xs, ys):
            d = self.aux('xor')
            self.add([-d, x, y])
            self.add([-d, -x, -y])
            self.add([d, -x, y])
            self.add([d, x, -y])
            diffs.append(d)
        return -self.or_(diffs)

    def adder(self, guard, xs, ys, out, carry):
        """ out = xs + ys + carry over len(out) bits, LSB first. """
        for b in range(len(out)):
            x, y = xs[b], ys[b]
            for sx in (0, 1):
                for sy in (0, 1):
                    for sc in (0, 1):
                        self.add(guard + [
                            -x if sx else x, -y if sy else y,
                            -carry if sc else carry,
                            out[b] if sx ^ sy ^ sc else -out[b]])
            if b < len(out) - 1:
                nxt = self.aux('carry')
                self.add(guard + [-x, -y, nxt])
                self.add(guard + [-x, -carry, nxt])
                self.add(guard + [-y, -carry, nxt])
                self.add(guard + [x, y, -nxt])
                self.add(guard + [x, carry, -nxt])
                self.add(guard + [y, carry, -nxt])
                carry = nxt

    def subtract(self, xs, ys):
        out = [self.aux('diff') for _ in xs]
        self.adder([], xs, [-y for y in ys], out, self.true)
        return out

    def less_than(self, bits, bound):
        if bound >= 1 << len(bits):
            return self.true
        terms = []
        prefix = self.true
        for b in reversed(range(len(bits))):
            x = bits[b]
            if (bound >> b) & 1:
                terms.append(self.and_([prefix, -x]))
                prefix = self.and_([prefix, x])
            else:
                prefix = self.and_([prefix, -x])
        return self.or_(terms)

    def at_most_one(self, lits, time):
        # sequential counter
        if len(lits) < 2:
            return
        s = [self.var(time, 'amo', k) for k in range(len(lits) - 1)]
        self.add([-lits[0], s[0]])
        for k in range(1, len(lits) - 1):
            self.add([-lits[k], s[k]])
            self.add([-s[k - 1], s[k]])
            self.add([-lits[k], -s[k - 1]])
        self.add([-lits[-1], -s[-1]])

    # machine state

    def pc(self, i, state):
        return self.var(i, 'pc', state)

    def reg(self, i, r):
        return [self.var(i, 'reg', r, b)
                for b in range(self.program.word_bits)]

    def frame(self, guard, i, keep=None):
        for r in range(self.program.register_count):
            if r == keep:
                continue
            for x, y in zip(self.reg(i, r), self.reg(i + 1, r)):
                self.iff(guard, x, y)

    def encode(self):
        p, t = self.program, self.t
        self.reach = reachable(p, t)
        if any(p.instructions[k].op is Op.SELF
               for states in self.reach[:-1] for k in states
               if isinstance(k, int)) and len(self.image) >= p.memory_cells:
            raise InputError(
                "SELF image of {0} bytes does not fit in {1} memory "
                "cells".format(len(self.image), p.memory_cells))

        for i, states in enumerate(self.reach):
            for state in sorted(states, key=state_order):
                self.pc(i, state)
            for r in range(p.register_count):
                self.reg(i, r)

        self.add([self.pc(0, 0)])
        for r in range(p.register_count):
            self.const([], self.reg(0, r), 0)
        for i, states in enumerate(self.reach):
            lits = [self.pc(i, s) for s in sorted(states, key=state_order)]
            self.add(lits)
            self.at_most_one(lits, i)

        for i in range(t):
            self.step(i)

        if 'accept' in self.reach[t]:
            self.add([self.pc(t, 'accept')])
        else:
            self.clauses.append([])
        return CnfFormula(self.pool.top, self.clauses)

    def step(self, i):
        p = self.program
        states = sorted(self.reach[i], key=state_order)
        memory_pcs = [k for k in states if isinstance(k, int)
                      and p.instructions[k].op in MEMORY_OPS]
        if memory_pcs:
            self.record(i, memory_pcs)
        m = p.address_bits
        for state in states:
            g = [-self.pc(i, state)]
            if state in HALT_STATES:
                self.add(g + [self.pc(i + 1, state)])
                self.frame(g, i)
                continue
            ins = p.instructions[state]
            op, args = ins.op, ins.args
            if op not in (Op.JZ, Op.JMP) and op not in (
                    Op.HALT_ACCEPT, Op.HALT_REJECT):
                self.add(g + [self.pc(i + 1, state + 1)])
            if op is Op.LOADI:
                self.const(g, self.reg(i + 1, args[0]), args[1])
                self.frame(g, i, keep=args[0])
            elif op is Op.MOV:
                for x, y in zip(self.reg(i, args[1]), self.reg(i + 1, args[0])):
                    self.iff(g, x, y)
                self.frame(g, i, keep=args[0])
            elif op in (Op.ADD, Op.SUB):
                ys = self.reg(i, args[1])
                carry = -self.true
                if op is Op.SUB:
                    ys = [-y for y in ys]
                    carry = self.true
                self.adder(g, self.reg(i, args[0]), ys,
                           self.reg(i + 1, args[0]), carry)
                self.frame(g, i, keep=args[0])
            elif op is Op.LOAD:
                record = self.records[i]
                for x, y in zip(self.reg(i, args[1])[:m], record['addr']):
                    self.iff(g, x, y)
                for x, y in zip(record['val'], self.reg(i + 1, args[0])):
                    self.iff(g, x, y)
                self.frame(g, i, keep=args[0])
            elif op is Op.STORE:
                record = self.records[i]
                for x, y in zip(self.reg(i, args[0])[:m], record['addr']):
                    self.iff(g, x, y)
                for x, y in zip(self.reg(i, args[1]), record['val']):
                    self.iff(g, x, y)
                self.frame(g, i)
            elif op is Op.SELF:
                record = self.records[i]
                for x, y in zip(self.reg(i, args[0])[:m], record['addr']):
                    self.iff(g, x, y)
                self.const(g, self.reg(i + 1, args[1]),
                           len(self.image) & p.mask)
                self.frame(g, i, keep=args[1])
            elif op is Op.JZ:
                target = args[1]
                if target != state + 1:
                    self.add(g + self.reg(i, args[0]) + [self.pc(i + 1, target)])
                    for x in self.reg(i, args[0]):
                        self.add(g + [-x, self.pc(i + 1, state + 1)])
                else:
                    self.add(g + [self.pc(i + 1, state + 1)])
                self.frame(g, i)
            elif op is Op.JMP:
                self.add(g + [self.pc(i + 1, args[0])])
                self.frame(g, i)
            else:
                halt = 'accept' if op is Op.HALT_ACCEPT else 'reject'
                self.add(g + [self.pc(i + 1, halt)])
                self.frame(g, i)
        if i in self.records and self.records[i]['load'] is not None:
            self.resolve_read(i)

    def record(self, i, memory_pcs):
        p = self.program
        by_op = {Op.LOAD: [], Op.STORE: [], Op.SELF: []}
        for k in memory_pcs:
            by_op[p.instructions[k].op].append(self.pc(i, k))
        record = {'addr': [self.var(i, 'addr', b)
                           for b in range(p.address_bits)],
                  'val': None}
        for op, name in ((Op.LOAD, 'load'), (Op.STORE, 'store'),
                         (Op.SELF, 'self')):
            record[name] = None
            if by_op[op]:
                record[name] = self.var(i, name)
                self.define_or(record[name], by_op[op])
        value_pcs = by_op[Op.LOAD] + by_op[Op.STORE]
        if value_pcs:
            record['val'] = [self.var(i, 'val', b)
                             for b in range(p.word_bits)]
            for x in record['val']:
                self.add([-x] + value_pcs)
        # idle records are all zero
        for x in record['addr']:
            self.add([-x] + [self.pc(i, k) for k in memory_pcs])
        self.records[i] = record

    def resolve_read(self, j):
        p = self.program
        m, w = p.address_bits, p.word_bits
        record = self.records[j]
        load = record['load']
        unresolved = self.true
        selections = []
        offset = None
        for i in reversed(range(j)):
            other = self.records.get(i)
            if other is None:
                continue
            if other['store'] is not None:
                hit = self.and_([other['store'],
                                 self.equal(other['addr'], record['addr'])])
                for x, y in zip(other['val'], record['val']):
                    self.iff([-load, -unresolved, -hit], x, y)
                unresolved = self.and_([unresolved, -hit])
            if other['self'] is not None:
                distance = self.subtract(record['addr'], other['addr'])
                hit = self.and_([other['self'],
                                 self.less_than(distance, len(self.image))])
                chosen = self.and_([unresolved, hit])
                if offset is None:
                    offset = [self.var(j, 'self_offset', b) for b in range(m)]
                for x, y in zip(distance, offset):
                    self.iff([-chosen], x, y)
                selections.append(chosen)
                unresolved = self.and_([unresolved, -hit])

        if selections:
            from_self = self.var(j, 'from_self')
            self.define_or(from_self, selections)
            for k, byte in enumerate(self.image):
                differs = [-x if (k >> b) & 1 else x
                           for b, x in enumerate(offset)]
                for b, x in enumerate(record['val']):
                    self.add([-load, -from_self] + differs
                             + [x if (byte >> b) & 1 else -x])

        if p.takes_input:
            for address, value in self.pinned:
                differs = [-x if (address >> b) & 1 else x
                           for b, x in enumerate(record['addr'])]
                for b, x in enumerate(record['val']):
                    self.add([-load, -unresolved] + differs
                             + [x if (value >> b) & 1 else -x])
            # unwritten cells start as input bytes
            for x in record['val'][8:]:
                self.add([-load, -unresolved, -x])
            for earlier in self.reads:
                other = self.records[earlier]
                same = self.equal(other['addr'], record['addr'])
                for x, y in zip(other['val'], record['val']):
                    self.iff([-other['load'], -load, -self.unresolved[earlier],
                              -unresolved, -same], x, y)
        else:
            for x in record['val']:
                self.add([-load, -unresolved, -x])
        self.unresolved[j] = unresolved
        self.reads.append(j)


def encode(program, pinned=(), t=1):
    """ CNF satisfiable iff some initial memory agreeing with the pins
    (other cells free bytes, or zero when the program takes no input) lets
    the program reach HALT_ACCEPT within t steps.
    """
    if t < 1:
        raise InputError("the step bound t must be at least 1, got {0}".format(t))
    pinned = _check_pins(program, pinned)
    encoder = _Encoder(program, pinned, t)
    formula = encoder.encode()
    layout = TableauLayout(
        program=program, t=t, pinned_inputs=pinned,
        var_of=MappingProxyType(dict(encoder.pool.obj2id)),
        num_vars=formula.num_vars, reach=encoder.reach)
    logger.debug("encoded %d instructions, t=%d: %d vars, %d clauses",
                 len(program), t, formula.num_vars, formula.num_clauses)
    return formula, layout


def _word(assignment, layout, *key):
    bits = layout.program.word_bits if key[1] != 'addr' else layout.program.address_bits
    return sum(assignment[layout.var_of[key + (b,)]] << b for b in range(bits))


def _initial_memory(layout, assignment):
    """ Initial memory: pins, plus the witness value of every load
    from a cell nobody wrote before it.
    """
    p = layout.program
    cells = dict(layout.pinned_inputs)
    if not p.takes_input:
        return Memory(p.memory_cells)
    config = Config(0, (0,) * p.register_count, Memory(p.memory_cells, cells))
    written = set()
    amask = p.memory_cells - 1
    for i in range(layout.t):
        ins = p.instructions[config.pc]
        if ins.op is Op.LOAD:
            address = config.registers[ins.args[1]] & amask
            if address not in written and address not in cells:
                cells[address] = _word(assignment, layout, i, 'val')
                config = Config(config.pc, config.registers,
                                config.memory.with_cells({address: cells[address]}))
        elif ins.op is Op.STORE:
            written.add(config.registers[ins.args[0]] & amask)
        elif ins.op is Op.SELF:
            base = config.registers[ins.args[0]]
            written.update((base + k) & amask
                           for k in range(len(serialize(p))))
        result = step(p, config)
        if isinstance(result, Halted):
            break
        config = result
    return Memory(p.memory_cells, cells)


def decode_witness(layout, assignment, formula=None):
    """ Rebuild the run a satisfying assignment describes and replay
    it under machine.step; any disagreement is a ContractViolation.
    """
    if formula is not None and not evaluate(formula, assignment):
        raise ContractViolation("assignment does not satisfy the formula")
    if len(assignment) < layout.num_vars:
        raise ContractViolation(
            "assignment covers {0} of {1} variables".format(
                len(assignment), layout.num_vars))
    p = layout.program

    def state_at(i):
        on = [s for s in layout.reach[i] if assignment[layout.var_of[(i, 'pc', s)]]]
        if len(on) != 1:
            raise ContractViolation("time {0}: {1} pc states set".format(
                i, len(on)))
        return on[0]

    def registers_at(i):
        return tuple(_word(assignment, layout, i, 'reg', r)
                     for r in range(p.register_count))

    memory = _initial_memory(layout, assignment)
    config = Config(0, (0,) * p.register_count, memory)
    configs = [config]
    outcome = None
    steps_used = None
    for i in range(layout.t + 1):
        expected = config.pc
        if outcome is not None:
            expected = 'accept' if outcome is Outcome.ACCEPT else 'reject'
        state = state_at(i)
        if state != expected:
            raise ContractViolation(
                "time {0}: witness pc {1}, replay pc {2}".format(
                    i, state, expected))
        if registers_at(i) != config.registers:
            raise ContractViolation(
                "time {0}: witness registers {1}, replay {2}".format(
                    i, registers_at(i), config.registers))
        if i == layout.t:
            break
        if outcome is None:
            result = step(p, config)
            if isinstance(result, Halted):
                outcome, config = result.outcome, result.config
                steps_used = i + 1
            else:
                config = result
        configs.append(config)
    if outcome is not Outcome.ACCEPT:
        raise ContractViolation("witness run does not accept within {0} "
                                "steps".format(layout.t))
    return Trace(tuple(configs), outcome, steps_used, memory)


def write_layout(layout):
    """ Sidecar text: one 'v <index> <component...>' line per variable. """
    lines = ["c fixpoints tableau layout",
             "t {0}".format(layout.t),
             "vars {0}".format(layout.num_vars)]
    for address, value in layout.pinned_inputs:
        lines.append("pin {0} {1}".format(address, value))
    for key, index in sorted(layout.var_of.items(), key=lambda item: item[1]):
        lines.append("v {0} {1}".format(index, " ".join(str(k) for k in key)))
    return "\n".join(lines) + "\n"


def read_layout(text):
    """ Parse a sidecar back into (t, pins, {index: component words}). """
    t = None
    pins = []
    table = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        words = line.split()
        if not words or words[0] in ('c', 'vars'):
            continue
        if words[0] == 't':
            t = int(words[1])
        elif words[0] == 'pin':
            pins.append((int(words[1]), int(words[2])))
        elif words[0] == 'v':
            table[int(words[1])] = tuple(words[2:])
        else:
            raise InputError("layout line {0}: unknown record '{1}'".format(
                lineno, words[0]))
    return t, tuple(pins), table

"""Prefix-free program encoding and a bounded interpreter.

A program is decoded from the front of a bitstring; the bits after the
encoding are the machine's input data. The encoding is self-delimiting, so no
valid encoding is a proper prefix of another.

Wire format (MSB-first, gamma = Elias gamma code):

    gamma(1) = '1'            generator program:
        gamma(g+1)                builtin family slot, position g % 14 in
                                  sequences.builtin_catalog()
        1 mode bit                0 = stream, 1 = indexed
    gamma(v), v >= 2          register machine with v-1 instructions, each:
        4-bit opcode              value mod 8 selects the instruction
        2-bit register            one of 4 unbounded natural registers
        gamma(t), JZ only         jump target, resolved as (t-1) mod count

Register instructions: INC, DEC (floor 0), JZ (jump when register is zero),
OUT (emit the sentence whose index is the register value), HALT, LOADBIT (shift one data
bit into the register: r := 2r + bit), SHL (double), NOP. Falling off the end
halts; exhausting the data during LOADBIT halts.

A stream generator ignores its data and emits family member i-1 at step
4*i*i, so a budget of t steps yields isqrt(t // 4) members in order. An
indexed generator reads gamma(n+1) from its data at one bit per step, then
spends one step emitting member n and halts; an index beyond the step budget
is dropped (the member is never materialized), which keeps a t-step run from
building sentences no t-step process could use.

Decoding costs no run steps; the step budget governs run_bounded only. The
trace invariant bits_read <= steps_used refers to data bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from math import isqrt
from typing import Optional, Union

from .bits import BitReader, Bits, BitsExhausted, gamma_encode, read_gamma
from .logic import Sentence, sentence_at
from .sequences import SequenceDef, builtin_catalog, sequence_by_id

SLOT_COUNT = len(builtin_catalog())

_GENERATOR_MARK = gamma_encode(1)
_STREAM_BIT = Bits(0, 1)
_INDEXED_BIT = Bits(1, 1)


class Opcode(IntEnum):
    INC = 0
    DEC = 1
    JZ = 2
    OUT = 3
    HALT = 4
    LOADBIT = 5
    SHL = 6
    NOP = 7


@dataclass(frozen=True, slots=True)
class Instruction:
    op: Opcode
    reg: int
    target: int = 0  # JZ only; an index into the instruction list


@dataclass(frozen=True)
class MachineProgram:
    instructions: tuple[Instruction, ...]


@dataclass(frozen=True)
class GeneratorProgram:
    family: SequenceDef
    indexed: bool


Program = Union[MachineProgram, GeneratorProgram]


@dataclass(frozen=True)
class OutputTrace:
    emitted: tuple[Sentence, ...]
    steps_used: int
    halted: bool
    bits_read: int


_EMPTY_TRACE = OutputTrace((), 0, True, 0)


def decode_program(reader: BitReader) -> Optional[Program]:
    """Decode one program, leaving the cursor at the first data bit.
    Returns None when the source runs out mid-encoding."""
    try:
        header = read_gamma(reader)
        if header == 1:
            slot = read_gamma(reader)
            mode = reader.take()
            family = builtin_catalog()[(slot - 1) % SLOT_COUNT]
            return GeneratorProgram(family, indexed=bool(mode))
        count = header - 1
        instructions = []
        for _ in range(count):
            op = Opcode(reader.take_int(4) % 8)
            reg = reader.take_int(2)
            target = 0
            if op is Opcode.JZ:
                target = (read_gamma(reader) - 1) % count
            instructions.append(Instruction(op, reg, target))
        return MachineProgram(tuple(instructions))
    except BitsExhausted:
        return None


def _slot_of(fid: str) -> int:
    for g, seq in enumerate(builtin_catalog()):
        if seq.id == fid:
            return g
    raise ValueError(f"unknown generator id: {fid!r}")


def encode_generator(fid: str, indexed: bool) -> Bits:
    slot = _slot_of(fid)
    mode = _INDEXED_BIT if indexed else _STREAM_BIT
    return _GENERATOR_MARK.concat(gamma_encode(slot + 1)).concat(mode)


def encode_machine_program(p: MachineProgram) -> Bits:
    count = len(p.instructions)
    out = gamma_encode(count + 1)
    for ins in p.instructions:
        if not 0 <= ins.reg < 4:
            raise ValueError(f"register out of range: {ins.reg}")
        out = out.concat(Bits(int(ins.op), 4)).concat(Bits(ins.reg, 2))
        if ins.op is Opcode.JZ:
            if not 0 <= ins.target < count:
                raise ValueError(f"jump target out of range: {ins.target}")
            out = out.concat(gamma_encode(ins.target + 1))
    return out


def assemble_emit_one(k: int) -> Bits:
    """Bitstring that decodes to a program emitting exactly the sentence at
    enumeration index k, then halting. Length is 9 + |gamma(k+1)| bits; the run needs a step budget of
    at least max(k, |gamma(k+1)| + 1)."""
    if k < 0:
        raise ValueError("sentence index must be a natural number")
    return assemble_sequence_emitter("enumeration").concat(gamma_encode(k + 1))


def assemble_sequence_emitter(fid: str) -> Bits:
    """Program prefix for the indexed form of a builtin family: append
    gamma(n+1) and the run emits member n."""
    return encode_generator(fid, indexed=True)


def assemble_stream_emitter(fid: str) -> Bits:
    """Program bits for the in-order form of a builtin family; the run emits
    members 0, 1, ... on the quadratic schedule until the budget is spent."""
    return encode_generator(fid, indexed=False)


def run_bounded(program: Program, data: BitReader, t: int) -> OutputTrace:
    if t < 0:
        raise ValueError("step budget must be a natural number")
    if isinstance(program, GeneratorProgram):
        return _run_generator(program, data, t)
    return _run_machine(program, data, t)


def _run_generator(program: GeneratorProgram, data: BitReader, t: int) -> OutputTrace:
    family = program.family
    if not program.indexed:
        members = isqrt(t // 4)
        emitted = tuple(family.emit(i) for i in range(members))
        return OutputTrace(emitted, t, False, 0)
    zeros = 0
    steps = 0
    value: Optional[int] = None
    while steps < t:
        bit = data.read()
        if bit is None:
            return OutputTrace((), steps, True, steps)
        steps += 1
        if bit == 0:
            zeros += 1
            continue
        value = 1
        break
    if value is None:
        return OutputTrace((), steps, False, steps)
    for _ in range(zeros):
        if steps >= t:
            return OutputTrace((), steps, False, steps)
        bit = data.read()
        if bit is None:
            return OutputTrace((), steps, True, steps)
        steps += 1
        value = value * 2 + bit
    n = value - 1
    bits_read = steps
    if n > t:
        return OutputTrace((), steps, True, bits_read)
    if steps >= t:
        return OutputTrace((), steps, False, bits_read)
    steps += 1
    return OutputTrace((family.emit(n),), steps, True, bits_read)


def _run_machine(program: MachineProgram, data: BitReader, t: int) -> OutputTrace:
    instructions = program.instructions
    regs = [0, 0, 0, 0]
    emitted: list[Sentence] = []
    pc = 0
    steps = 0
    bits_read = 0
    halted = False
    while steps < t:
        if pc >= len(instructions):
            halted = True
            break
        ins = instructions[pc]
        steps += 1
        op = ins.op
        if op is Opcode.INC:
            regs[ins.reg] += 1
            pc += 1
        elif op is Opcode.DEC:
            if regs[ins.reg]:
                regs[ins.reg] -= 1
            pc += 1
        elif op is Opcode.JZ:
            pc = ins.target if regs[ins.reg] == 0 else pc + 1
        elif op is Opcode.OUT:
            emitted.append(sentence_at(regs[ins.reg]))
            pc += 1
        elif op is Opcode.HALT:
            halted = True
            break
        elif op is Opcode.LOADBIT:
            bit = data.read()
            if bit is None:
                halted = True
                break
            bits_read += 1
            regs[ins.reg] = regs[ins.reg] * 2 + bit
            pc += 1
        elif op is Opcode.SHL:
            regs[ins.reg] *= 2
            pc += 1
        else:
            pc += 1
    return OutputTrace(tuple(emitted), steps, halted, bits_read)


def run_prefix(bits: Bits, t: int) -> OutputTrace:
    """Decode a program from the front of bits and run it on the remainder.
    An incomplete encoding yields the empty trace."""
    reader = BitReader(bits)
    program = decode_program(reader)
    if program is None:
        return _EMPTY_TRACE
    return run_bounded(program, reader, t)


def machine_backed(fid: str, budget_slack: int = 16) -> SequenceDef:
    """A machine-run twin of a builtin family: member n is produced by the
    indexed emitter under a linear step budget. Exceeding the budget raises,
    since that would mean the family is not quickly computable as encoded."""
    base = sequence_by_id(fid)
    prefix = assemble_sequence_emitter(base.id)

    def emit(n: int) -> Sentence:
        bits = prefix.concat(gamma_encode(n + 1))
        budget = 2 * n + budget_slack
        trace = run_prefix(bits, budget)
        if len(trace.emitted) != 1:
            raise RuntimeError(
                f"emitter for {base.id!r} produced {len(trace.emitted)} sentences at n={n}"
            )
        return trace.emitted[0]

    return SequenceDef(
        f"{base.id}@machine",
        "machine",
        f"machine-run twin of {base.id}",
        emit,
        machine_prefix=prefix,
    )

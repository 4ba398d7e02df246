"""Seeded random programs and tapes for equivalence sweeps and stress tests."""
from __future__ import annotations

import random
from fractions import Fraction

from .machine import Instruction, Opcode, Program, TapeState

# weighted towards movement so random runs stay strict-write-safe for longer
_CLASSICAL_WEIGHTS = [
    (Opcode.LEFT, 20),
    (Opcode.RIGHT, 20),
    (Opcode.MARK, 14),
    (Opcode.UNMARK, 10),
    (Opcode.JMP, 10),
    (Opcode.JIF, 16),
    (Opcode.HALT, 10),
]

_GATE_WEIGHTS = [
    (Opcode.HAD, 18),
    (Opcode.FLIP, 12),
    (Opcode.PHASE, 10),
]

_PHASE_TURNS = (Fraction(1, 2), Fraction(1, 4), Fraction(3, 4), Fraction(1, 3))


def _pick(rng: random.Random, weighted: list[tuple[Opcode, int]]) -> Opcode:
    return rng.choices([op for op, _ in weighted], weights=[w for _, w in weighted])[0]


def _instruction(rng: random.Random, op: Opcode, n: int) -> Instruction:
    if op in (Opcode.JMP, Opcode.JIF):
        return Instruction(op, target=rng.randint(1, n))
    if op is Opcode.PHASE:
        return Instruction(op, turn=rng.choice(_PHASE_TURNS))
    return Instruction(op)


def random_classical_program(rng: random.Random, max_len: int = 20) -> Program:
    n = rng.randint(1, max_len)
    ops = [_pick(rng, _CLASSICAL_WEIGHTS) for _ in range(n)]
    return Program(tuple(_instruction(rng, op, n) for op in ops))


def random_gate_program(
    rng: random.Random, max_len: int = 12, gate_fraction: float = 0.4
) -> Program:
    """Classical program with HAD/FLIP/PHASE mixed in (no MEASURE)."""
    n = rng.randint(1, max_len)
    instrs = []
    for _ in range(n):
        if rng.random() < gate_fraction:
            op = _pick(rng, _GATE_WEIGHTS)
        else:
            op = _pick(rng, _CLASSICAL_WEIGHTS)
        instrs.append(_instruction(rng, op, n))
    return Program(tuple(instrs))


def random_tape(rng: random.Random, max_marks: int = 16, span: int = 16) -> TapeState:
    count = rng.randint(0, max_marks)
    cells = list(range(-span, span + 1))
    marks = frozenset(rng.sample(cells, min(count, len(cells))))
    return TapeState(marks, head=0)

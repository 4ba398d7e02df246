"""Programs as finite-difference fields on the phase space (q, p).

Each instruction index carries a pair of evaluators: a signed tape increment
dpH(q) and an integer pointer increment dqH(q).  One time step is

    q' = q + dpH(q, p),    p' = p - dqH(q, p),

with both increments read at the old point.  Iterating this reproduces the
direct interpreter exactly; `check_equivalence` asserts that, step by step.

Increment values per opcode (dpH, dqH):

    LEFT    -q/2, -1          RIGHT   +q, -1
    MARK    +1,   -1          UNMARK  -1, -1     (strict-write preconditions)
    JMP k   0,    p - k       HALT    0,  0
    JIF k   0,    p - k  when the current bit is 1

On a false JIF the default pointer increment is -1 (advance to the next
instruction).  `paper_literal=True` selects +1 instead, which steps the
pointer *backwards*; it is kept for fidelity experiments and documented to
diverge from the direct semantics.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .dyadic import Dyadic, current_bit
from .machine import (
    Instruction,
    Opcode,
    Program,
    QUANTUM_OPCODES,
    RunStatus,
    StrictWriteError,
    Trace,
    WrongEngineError,
    encode,
    run_direct,
)

_HALF = Fraction(1, 2)
_ZERO = Fraction(0)


def tape_increment(instr: Instruction, q: Dyadic) -> Fraction:
    """dpH at (q, p): the signed dyadic added to the tape encoding."""
    op = instr.opcode
    if op is Opcode.LEFT:
        return -_HALF * q.as_fraction()
    if op is Opcode.RIGHT:
        return q.as_fraction()
    if op is Opcode.MARK:
        if current_bit(q) == 1:
            raise StrictWriteError("MARK: current cell already 1")
        return Fraction(1)
    if op is Opcode.UNMARK:
        if current_bit(q) == 0:
            raise StrictWriteError("UNMARK: current cell already 0")
        return Fraction(-1)
    if op in (Opcode.JMP, Opcode.JIF, Opcode.HALT):
        return _ZERO
    raise WrongEngineError(f"{op.value} has no classical increment")


def pointer_increment(
    instr: Instruction, p: int, q: Dyadic, paper_literal: bool = False
) -> int:
    """dqH at (q, p): the value subtracted from the instruction pointer."""
    op = instr.opcode
    if op is Opcode.HALT:
        return 0
    if op is Opcode.JMP:
        return p - instr.target
    if op is Opcode.JIF:
        if current_bit(q) == 1:
            return p - instr.target
        return 1 if paper_literal else -1
    if op in QUANTUM_OPCODES:
        raise WrongEngineError(f"{op.value} has no classical increment")
    return -1  # every tape-acting opcode advances to the next instruction


@dataclass(frozen=True)
class PhasePoint:
    q: Dyadic
    p: int

    def __str__(self) -> str:
        return f"({self.q}, {self.p})"


@dataclass(frozen=True)
class HamiltonianField:
    """Per-instruction (dpH, dqH) evaluator pairs for a classical program."""

    program: Program
    paper_literal: bool = False
    _evaluators: tuple[
        tuple[Callable[[Dyadic], Fraction], Callable[[int, Dyadic], int]], ...
    ] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        evaluators = []
        for instr in self.program:
            if instr.opcode in QUANTUM_OPCODES:
                raise WrongEngineError(
                    f"{instr.opcode.value} cannot be compiled to a classical field"
                )
            evaluators.append(self._make_pair(instr))
        object.__setattr__(self, "_evaluators", tuple(evaluators))

    def _make_pair(self, instr: Instruction):
        literal = self.paper_literal

        def dp_h(q: Dyadic) -> Fraction:
            return tape_increment(instr, q)

        def dq_h(p: int, q: Dyadic) -> int:
            return pointer_increment(instr, p, q, paper_literal=literal)

        return dp_h, dq_h

    def dp_h(self, p: int, q: Dyadic) -> Fraction:
        return self._evaluators[p - 1][0](q)

    def dq_h(self, p: int, q: Dyadic) -> int:
        return self._evaluators[p - 1][1](p, q)

    def __len__(self) -> int:
        return len(self.program)


def compile_hamiltonian(prog: Program, paper_literal: bool = False) -> HamiltonianField:
    """Build the finite-difference field for a classical program."""
    return HamiltonianField(prog, paper_literal=paper_literal)


def apply_increment(q: Dyadic, dq: Fraction) -> Dyadic:
    return Dyadic.from_fraction(q.as_fraction() + dq)


def dynamics_step(fld: HamiltonianField, s: PhasePoint) -> PhasePoint:
    """One step of the pair of difference equations, increments at the old point."""
    dq = fld.dp_h(s.p, s.q)
    dp = fld.dq_h(s.p, s.q)
    return PhasePoint(apply_increment(s.q, dq), s.p - dp)


@dataclass
class DynamicsTrace:
    rows: list[tuple[int, PhasePoint]] = field(default_factory=list)
    status: RunStatus = RunStatus.STEP_LIMIT
    error: Optional[Exception] = None
    error_step: Optional[int] = None

    @property
    def steps(self) -> int:
        return len(self.rows) - 1

    def q_rows(self) -> list[tuple[int, int, Dyadic]]:
        return [(t, s.p, s.q) for t, s in self.rows]


def run_dynamics(
    fld: HamiltonianField, s0: PhasePoint, max_steps: int = 10_000
) -> DynamicsTrace:
    """Iterate dynamics_step until the HALT rest point, pointer exit, or max_steps.

    A HALT instruction compiles to the zero increment pair, so reaching it is
    a fixed point; other numeric fixed points (a jump to itself) are not
    treated as termination and run to the step limit.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    prog = fld.program
    trace = DynamicsTrace(rows=[(0, s0)])
    t, s = 0, s0
    while True:
        if not prog.in_range(s.p):
            trace.status = RunStatus.FELL_OFF
            return trace
        if prog.instruction(s.p).opcode is Opcode.HALT:
            trace.status = RunStatus.HALTED
            return trace
        if t >= max_steps:
            trace.status = RunStatus.STEP_LIMIT
            return trace
        try:
            s = dynamics_step(fld, s)
        except (StrictWriteError, WrongEngineError) as exc:
            trace.status = RunStatus.ERROR
            trace.error = exc
            trace.error_step = t
            return trace
        t += 1
        trace.rows.append((t, s))


@dataclass
class EquivalenceReport:
    """Lockstep comparison of the direct interpreter and the dynamics engine."""

    passed: bool
    steps: int
    divergence_step: Optional[int]
    direct_trace: Trace
    dynamics_trace: DynamicsTrace

    def to_json_obj(self) -> dict:
        return {
            "pass": self.passed,
            "steps": self.steps,
            "divergence_step": self.divergence_step,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def check_equivalence(
    prog: Program,
    tape0,
    p0: int = 1,
    max_steps: int = 10_000,
    paper_literal: bool = False,
) -> EquivalenceReport:
    """Run both engines and compare encode(tape_t) == q_t and pointers at every t.

    Matching error outcomes (both engines rejecting the same step) count as
    agreement; any mismatch in values, trace length, or terminal status is a
    divergence.
    """
    direct = run_direct(prog, tape0, p0, max_steps)
    fld = compile_hamiltonian(prog, paper_literal=paper_literal)
    dyn = run_dynamics(fld, PhasePoint(encode(tape0), p0), max_steps)

    divergence: Optional[int] = None
    for (t_a, p_a, tape_a), (t_b, s_b) in zip(direct.rows, dyn.rows):
        assert t_a == t_b
        if p_a != s_b.p or encode(tape_a) != s_b.q:
            divergence = t_a
            break
    if divergence is None and (
        len(direct.rows) != len(dyn.rows)
        or direct.status is not dyn.status
        or direct.error_step != dyn.error_step
    ):
        # prefixes agree but one run continues or ends differently
        divergence = min(len(direct.rows), len(dyn.rows))
    steps = min(direct.steps, dyn.steps)
    return EquivalenceReport(
        passed=divergence is None,
        steps=steps,
        divergence_step=divergence,
        direct_trace=direct,
        dynamics_trace=dyn,
    )

"""Post-machine programs, the explicit tape, and the direct interpreter.

A program is a 1-based list of instructions over an infinite binary tape with
a reading head.  `encode`/`decode` give the bijection between (tape, head)
and a nonnegative dyadic rational: cells at and left of the head form the
integer part, cells right of it the fraction.

Writes are strict: MARK requires the current cell to be 0 and UNMARK requires
it to be 1.  Anything else would carry in the arithmetic view of the tape and
silently corrupt neighbouring cells.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .dyadic import Dyadic, format_dyadic


class Opcode(enum.Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"
    MARK = "MARK"
    UNMARK = "UNMARK"
    JMP = "JMP"
    JIF = "JIF"
    HALT = "HALT"
    HAD = "HAD"
    FLIP = "FLIP"
    PHASE = "PHASE"
    MEASURE = "MEASURE"


CLASSICAL_OPCODES = frozenset(
    {Opcode.LEFT, Opcode.RIGHT, Opcode.MARK, Opcode.UNMARK, Opcode.JMP, Opcode.JIF, Opcode.HALT}
)
QUANTUM_OPCODES = frozenset({Opcode.HAD, Opcode.FLIP, Opcode.PHASE, Opcode.MEASURE})
JUMP_OPCODES = frozenset({Opcode.JMP, Opcode.JIF})


class ProgramParseError(ValueError):
    """Assembly error; `line` is the 1-based source line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class StrictWriteError(RuntimeError):
    """MARK on a 1-cell or UNMARK on a 0-cell."""


class WrongEngineError(RuntimeError):
    """A quantum instruction reached a classical engine."""


@dataclass(frozen=True)
class Instruction:
    opcode: Opcode
    target: Optional[int] = None  # JMP/JIF destination, 1-based
    turn: Optional[Fraction] = None  # PHASE angle as a fraction of a full turn

    def __str__(self) -> str:
        if self.opcode in JUMP_OPCODES:
            return f"{self.opcode.value} {self.target}"
        if self.opcode is Opcode.PHASE:
            return f"{self.opcode.value} {self.turn}"
        return self.opcode.value


@dataclass(frozen=True)
class Program:
    """1-based instruction list; valid pointer values are 1..len."""

    instructions: tuple[Instruction, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.instructions) < 1:
            raise ValueError("a program needs at least one instruction")
        for i, instr in enumerate(self.instructions, start=1):
            if instr.opcode in JUMP_OPCODES:
                t = instr.target
                if t is None or not 1 <= t <= len(self.instructions):
                    raise ValueError(
                        f"instruction {i}: target {t} outside 1..{len(self.instructions)}"
                    )

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    def instruction(self, p: int) -> Instruction:
        if not 1 <= p <= len(self.instructions):
            raise IndexError(f"pointer {p} outside 1..{len(self.instructions)}")
        return self.instructions[p - 1]

    def in_range(self, p: int) -> bool:
        return 1 <= p <= len(self.instructions)

    @property
    def is_classical(self) -> bool:
        return all(i.opcode in CLASSICAL_OPCODES for i in self.instructions)


@dataclass(frozen=True, eq=False)
class TapeState:
    """Finite set of marked cells plus the head cell.

    Cell indices are arbitrary integers; two tapes are equal when one is a
    translation of the other (the encoding only sees head-relative offsets).
    """

    marks: frozenset[int] = frozenset()
    head: int = 0

    def normalized(self) -> frozenset[int]:
        return frozenset(i - self.head for i in self.marks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TapeState):
            return NotImplemented
        return self.normalized() == other.normalized()

    def __hash__(self) -> int:
        return hash(self.normalized())

    def read(self) -> int:
        return 1 if self.head in self.marks else 0


_LABEL_RE = re.compile(r"^(\d+)\s*:\s*(.*)$")

_MNEMONICS = {op.value: op for op in Opcode}


def parse_program(text: str, name: str = "") -> Program:
    """Assemble one instruction per line.

    Optional `<k>:` labels must match the instruction's position, `;` starts
    a comment, blank lines are skipped, mnemonics are case-insensitive.
    """
    entries: list[tuple[int, Instruction]] = []  # (source line, instruction)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        m = _LABEL_RE.match(line)
        if m:
            label = int(m.group(1))
            if label != len(entries) + 1:
                raise ProgramParseError(
                    f"label {label} does not match instruction position {len(entries) + 1}",
                    lineno,
                )
            line = m.group(2).strip()
            if not line:
                raise ProgramParseError("label without an instruction", lineno)
        parts = line.split()
        mnemonic = parts[0].upper()
        op = _MNEMONICS.get(mnemonic)
        if op is None:
            raise ProgramParseError(f"unknown mnemonic {parts[0]!r}", lineno)
        args = parts[1:]
        if op in JUMP_OPCODES:
            if len(args) != 1 or not args[0].isdigit():
                raise ProgramParseError(f"{mnemonic} needs one numeric target", lineno)
            entries.append((lineno, Instruction(op, target=int(args[0]))))
        elif op is Opcode.PHASE:
            if len(args) != 1:
                raise ProgramParseError("PHASE needs one rational turn, e.g. 1/2", lineno)
            try:
                turn = Fraction(args[0])
            except (ValueError, ZeroDivisionError):
                raise ProgramParseError(f"bad PHASE turn {args[0]!r}", lineno) from None
            entries.append((lineno, Instruction(op, turn=turn)))
        else:
            if args:
                raise ProgramParseError(f"{mnemonic} takes no argument", lineno)
            entries.append((lineno, Instruction(op)))
    if not entries:
        raise ProgramParseError("empty program", 1)
    n = len(entries)
    for lineno, instr in entries:
        if instr.opcode in JUMP_OPCODES and not 1 <= instr.target <= n:
            raise ProgramParseError(
                f"target {instr.target} outside 1..{n}", lineno
            )
    return Program(tuple(instr for _, instr in entries), name=name)


def load_program(path: str) -> Program:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_program(fh.read(), name=path)


def encode(tape: TapeState) -> Dyadic:
    """Tape to dyadic: mark at cell i contributes 2**(head - i)."""
    num = 0
    scale = max((i - tape.head for i in tape.marks), default=0)
    scale = max(scale, 0)
    for i in tape.marks:
        num |= 1 << (scale - (i - tape.head))
    return Dyadic(num, scale)


def decode(q: Dyadic) -> TapeState:
    """Dyadic to the canonical tape with head at cell 0."""
    marks = set()
    whole = q.num >> q.scale
    e = 0
    while whole:
        if whole & 1:
            marks.add(-e)
        whole >>= 1
        e += 1
    for j in range(1, q.scale + 1):
        if (q.num >> (q.scale - j)) & 1:
            marks.add(j)
    return TapeState(frozenset(marks), head=0)


class RunStatus(enum.Enum):
    HALTED = "halted"
    FELL_OFF = "fell-off-programme"
    STEP_LIMIT = "step-limit"
    ERROR = "error"


def direct_step(prog: Program, tape: TapeState, p: int) -> Optional[tuple[TapeState, int]]:
    """One instruction on the explicit tape; None means HALT was reached."""
    instr = prog.instruction(p)
    op = instr.opcode
    if op in QUANTUM_OPCODES:
        raise WrongEngineError(f"{op.value} at {p} needs the quantum engine")
    if op is Opcode.HALT:
        return None
    if op is Opcode.LEFT:
        return TapeState(tape.marks, tape.head - 1), p + 1
    if op is Opcode.RIGHT:
        return TapeState(tape.marks, tape.head + 1), p + 1
    if op is Opcode.MARK:
        if tape.read() == 1:
            raise StrictWriteError(f"MARK at {p}: current cell already 1")
        return TapeState(tape.marks | {tape.head}, tape.head), p + 1
    if op is Opcode.UNMARK:
        if tape.read() == 0:
            raise StrictWriteError(f"UNMARK at {p}: current cell already 0")
        return TapeState(tape.marks - {tape.head}, tape.head), p + 1
    if op is Opcode.JMP:
        return tape, instr.target
    # JIF
    return tape, instr.target if tape.read() == 1 else p + 1


@dataclass
class Trace:
    """States visited, one row per time step including t=0."""

    rows: list[tuple[int, int, TapeState]] = field(default_factory=list)
    status: RunStatus = RunStatus.STEP_LIMIT
    error: Optional[Exception] = None
    error_step: Optional[int] = None

    @property
    def steps(self) -> int:
        return len(self.rows) - 1

    def q_rows(self) -> list[tuple[int, int, Dyadic]]:
        return [(t, p, encode(tape)) for t, p, tape in self.rows]


def run_direct(prog: Program, tape: TapeState, p0: int = 1, max_steps: int = 10_000) -> Trace:
    """Iterate direct_step until HALT, the pointer leaves 1..n, or max_steps."""
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    trace = Trace(rows=[(0, p0, tape)])
    t, p = 0, p0
    while True:
        if not prog.in_range(p):
            trace.status = RunStatus.FELL_OFF
            return trace
        if prog.instruction(p).opcode is Opcode.HALT:
            trace.status = RunStatus.HALTED
            return trace
        if t >= max_steps:
            trace.status = RunStatus.STEP_LIMIT
            return trace
        try:
            tape, p = direct_step(prog, tape, p)
        except (StrictWriteError, WrongEngineError) as exc:
            trace.status = RunStatus.ERROR
            trace.error = exc
            trace.error_step = t
            return trace
        t += 1
        trace.rows.append((t, p, tape))


def trace_csv(rows: Iterable[tuple[int, int, Dyadic]]) -> str:
    """`t,p,q` rows with q as a canonical binary literal."""
    lines = ["t,p,q"]
    for t, p, q in rows:
        lines.append(f"{t},{p},{format_dyadic(q)}")
    return "\n".join(lines) + "\n"

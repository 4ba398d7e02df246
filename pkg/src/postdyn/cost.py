"""Cost accounting across the whole preparation-computation-reading cycle.

Counters are integers, weights are exact nonnegative rationals, and totals
are exact; the module only measures, it renders no verdict on whether quantum
gains survive the classical overheads.  There is no built-in exchange rate
between a gate application and a classical step: all weights are caller
configuration, defaulting to 1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .dyadic import Dyadic
from .dynamics import PhasePoint, compile_hamiltonian, run_dynamics
from .machine import Program, TapeState, encode, run_direct
from .quantum import init_state, run_quantum

EVENT_CLASSES = (
    "circuit_assemble",
    "classical_step",
    "gate_apply",
    "measure",
    "prepare_qubit",
)


@dataclass(frozen=True)
class CostWeights:
    prepare_qubit: Fraction = Fraction(1)
    gate_apply: Fraction = Fraction(1)
    measure: Fraction = Fraction(1)
    circuit_assemble: Fraction = Fraction(1)
    classical_step: Fraction = Fraction(1)

    def __post_init__(self):
        for name in EVENT_CLASSES:
            value = Fraction(getattr(self, name))
            if value < 0:
                raise ValueError(f"weight {name} must be >= 0")
            object.__setattr__(self, name, value)

    def to_json_obj(self) -> dict:
        return {name: str(getattr(self, name)) for name in EVENT_CLASSES}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CostWeights":
        unknown = set(obj) - set(EVENT_CLASSES)
        if unknown:
            raise ValueError(f"unknown weight classes: {sorted(unknown)}")
        return cls(**{name: Fraction(value) for name, value in obj.items()})

    @classmethod
    def from_json(cls, text: str) -> "CostWeights":
        return cls.from_json_obj(json.loads(text))


@dataclass
class CostLedger:
    weights: CostWeights
    counts: dict[str, int] = field(
        default_factory=lambda: {name: 0 for name in EVENT_CLASSES}
    )

    def record(self, event: str, times: int = 1) -> None:
        if event not in self.counts:
            raise KeyError(f"unknown event class {event!r}")
        if times < 0:
            raise ValueError("counters are monotone, cannot decrease")
        self.counts[event] += times

    def subtotal(self, event: str) -> Fraction:
        return self.counts[event] * getattr(self.weights, event)

    def total(self) -> Fraction:
        return sum((self.subtotal(name) for name in EVENT_CLASSES), Fraction(0))

    def __add__(self, other: "CostLedger") -> "CostLedger":
        if self.weights != other.weights:
            raise ValueError("cannot merge ledgers with different weights")
        merged = CostLedger(self.weights)
        for name in EVENT_CLASSES:
            merged.counts[name] = self.counts[name] + other.counts[name]
        return merged

    def to_json_obj(self) -> dict:
        return {
            "counts": {name: self.counts[name] for name in EVENT_CLASSES},
            "weights": self.weights.to_json_obj(),
            "subtotals": {name: str(self.subtotal(name)) for name in EVENT_CLASSES},
            "total": str(self.total()),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def tape_window(tape: TapeState) -> int:
    """Cells that must be initialised: the span covering head and all marks."""
    cells = set(tape.marks) | {tape.head}
    return max(cells) - min(cells) + 1


ENGINES = ("direct", "dynamics", "quantum")


def instrument_run(
    engine: str,
    prog: Program,
    tape: TapeState,
    weights: Optional[CostWeights] = None,
    p0: int = 1,
    max_steps: int = 10_000,
    seed: int = 0,
) -> CostLedger:
    """Run an engine and account its events.

    Classical engines charge one classical_step per executed transition.
    The quantum engine charges prepare_qubit per initial-tape cell,
    circuit_assemble per instruction, gate_apply per instruction application
    per branch, and measure per measurement barrier.  Instrumentation is
    derived from the run result; it never alters engine behaviour.
    """
    ledger = CostLedger(weights if weights is not None else CostWeights())
    if engine == "direct":
        trace = run_direct(prog, tape, p0, max_steps)
        ledger.record("classical_step", trace.steps)
    elif engine == "dynamics":
        fld = compile_hamiltonian(prog)
        trace = run_dynamics(fld, PhasePoint(encode(tape), p0), max_steps)
        ledger.record("classical_step", trace.steps)
    elif engine == "quantum":
        _, stats = run_quantum(prog, init_state(encode(tape), p0), max_steps, seed)
        ledger.record("prepare_qubit", tape_window(tape))
        ledger.record("circuit_assemble", len(prog))
        ledger.record("gate_apply", stats.applications)
        ledger.record("measure", len(stats.measurements))
    else:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    return ledger


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side totals; margin is classical minus quantum, no verdict."""

    classical: CostLedger
    quantum: CostLedger

    def margin(self) -> Fraction:
        return self.classical.total() - self.quantum.total()

    def to_json_obj(self) -> dict:
        return {
            "classical": self.classical.to_json_obj(),
            "quantum": self.quantum.to_json_obj(),
            "margin": str(self.margin()),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def compare_report(classical: CostLedger, quantum: CostLedger) -> ComparisonReport:
    if classical.weights != quantum.weights:
        raise ValueError("ledgers must share the same weights")
    return ComparisonReport(classical, quantum)

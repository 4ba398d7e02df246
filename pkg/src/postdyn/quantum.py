"""Sparse complex-amplitude states over phase points (q, p).

Terms superpose whole machine states: both the tape encoding q and the
instruction pointer p, so branches may sit at different program stages at
once.  Each step advances every live term by the instruction at its own p;
classical opcodes use the same increment rules as the dynamics engine, and
three gate opcodes act on the current cell:

    HAD      split on the current bit with amplitude 1/sqrt(2), the bit-1
             component negated when the input bit is 1
    FLIP     deterministically invert the current bit (q +/- 1)
    PHASE r  multiply the amplitude by exp(2*pi*i*r) when the bit is 1

A term whose pointer rests on HALT or has left 1..n is halted and carried
unchanged.  A term on MEASURE suspends; measurement fires as a global barrier
once every live term is suspended, collapsing on the current bit via the run's
seeded RNG.

Branches landing on the same (q, p) in one step have their amplitudes summed.
Such merges ("collisions") make the step non-injective and can shrink or grow
the norm; they are counted and reported rather than forbidden.  Term merging
is done in canonical order, so runs are byte-reproducible.
"""
from __future__ import annotations

import cmath
import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .dyadic import Dyadic, add_one, current_bit, format_dyadic, sub_one
from .dynamics import apply_increment, pointer_increment, tape_increment
from .machine import Opcode, Program, StrictWriteError

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

TermKey = tuple[Dyadic, int]


def _term_sort_key(key: TermKey) -> tuple[str, int]:
    return format_dyadic(key[0]), key[1]


@dataclass(frozen=True)
class QuantumState:
    """Sparse map from phase point to complex amplitude.

    No stored amplitude has magnitude <= prune_epsilon; the map is treated as
    an immutable snapshot between steps.
    """

    terms: dict[TermKey, complex]
    prune_epsilon: float = 1e-15

    def __post_init__(self):
        if self.prune_epsilon < 0:
            raise ValueError("prune_epsilon must be >= 0")
        for key, amp in self.terms.items():
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError(f"non-finite amplitude at {key}")

    def norm_squared(self) -> float:
        return sum(abs(a) ** 2 for a in self.terms.values())

    def sorted_terms(self) -> list[tuple[TermKey, complex]]:
        return sorted(self.terms.items(), key=lambda kv: _term_sort_key(kv[0]))

    def __len__(self) -> int:
        return len(self.terms)


def init_state(q0: Dyadic, p0: int, prune_epsilon: float = 1e-15) -> QuantumState:
    """Basis state |q0, p0> with amplitude 1."""
    return QuantumState({(q0, p0): complex(1.0, 0.0)}, prune_epsilon)


def is_halted(prog: Program, p: int) -> bool:
    return not prog.in_range(p) or prog.instruction(p).opcode is Opcode.HALT


def is_suspended(prog: Program, p: int) -> bool:
    return prog.in_range(p) and prog.instruction(p).opcode is Opcode.MEASURE


def _branches(prog: Program, q: Dyadic, p: int, amp: complex) -> list[tuple[Dyadic, int, complex]]:
    """Successor contributions of one live term, in a fixed emission order."""
    instr = prog.instruction(p)
    op = instr.opcode
    bit = current_bit(q)
    if op is Opcode.HAD:
        if bit == 0:
            return [(q, p + 1, amp * _INV_SQRT2), (add_one(q), p + 1, amp * _INV_SQRT2)]
        return [(sub_one(q), p + 1, amp * _INV_SQRT2), (q, p + 1, -amp * _INV_SQRT2)]
    if op is Opcode.FLIP:
        return [(add_one(q) if bit == 0 else sub_one(q), p + 1, amp)]
    if op is Opcode.PHASE:
        if bit == 1:
            amp = amp * cmath.exp(2j * math.pi * float(instr.turn))
        return [(q, p + 1, amp)]
    # classical opcode: same increments as the dynamics engine
    try:
        dq = tape_increment(instr, q)
    except StrictWriteError as exc:
        raise StrictWriteError(
            f"branch ({format_dyadic(q)}, {p}) with amplitude {amp}: {exc}"
        ) from exc
    dp = pointer_increment(instr, p, q)
    return [(apply_increment(q, dq), p - dp, amp)]


def _merge(
    contributions: list[tuple[Dyadic, int, complex]], prune_epsilon: float
) -> tuple[dict[TermKey, complex], int]:
    """Sum amplitudes per phase point; returns (terms, collision count)."""
    merged: dict[TermKey, complex] = {}
    hits: dict[TermKey, int] = {}
    for q, p, amp in contributions:
        key = (q, p)
        merged[key] = merged.get(key, 0j) + amp
        hits[key] = hits.get(key, 0) + 1
    collisions = sum(c - 1 for c in hits.values() if c > 1)
    pruned = {k: a for k, a in merged.items() if abs(a) > prune_epsilon}
    return pruned, collisions


def _advance(prog: Program, state: QuantumState) -> tuple[QuantumState, int, int]:
    """One step over all terms; returns (state, collisions, applications)."""
    contributions: list[tuple[Dyadic, int, complex]] = []
    applications = 0
    for (q, p), amp in state.sorted_terms():
        if is_halted(prog, p) or is_suspended(prog, p):
            contributions.append((q, p, amp))
            continue
        contributions.extend(_branches(prog, q, p, amp))
        applications += 1
    terms, collisions = _merge(contributions, state.prune_epsilon)
    return QuantumState(terms, state.prune_epsilon), collisions, applications


def q_step(prog: Program, s: QuantumState) -> QuantumState:
    """Advance every live term one step by the instruction at its own pointer."""
    state, _, _ = _advance(prog, s)
    return state


def measure_distribution(s: QuantumState) -> tuple[float, float]:
    """Squared-amplitude mass on current bit 0 and bit 1, without collapse."""
    p0 = p1 = 0.0
    for (q, _), amp in s.terms.items():
        if current_bit(q) == 1:
            p1 += abs(amp) ** 2
        else:
            p0 += abs(amp) ** 2
    return p0, p1


def _measure_with_rng(s: QuantumState, rng: random.Random) -> tuple[int, QuantumState]:
    if not s.terms:
        raise ValueError("cannot measure an empty state")
    p0, p1 = measure_distribution(s)
    total = p0 + p1
    bit = 1 if rng.random() < p1 / total else 0
    kept_mass = p1 if bit == 1 else p0
    scale = 1.0 / math.sqrt(kept_mass)
    terms = {
        (q, p): amp * scale
        for (q, p), amp in s.sorted_terms()
        if current_bit(q) == bit
    }
    terms = {k: a for k, a in terms.items() if abs(a) > s.prune_epsilon}
    return bit, QuantumState(terms, s.prune_epsilon)


def measure(s: QuantumState, rng_seed: int) -> tuple[int, QuantumState]:
    """Sample the current bit, discard the other branch, renormalise."""
    return _measure_with_rng(s, random.Random(rng_seed))


def _release_measured(prog: Program, state: QuantumState) -> tuple[QuantumState, int]:
    """Move terms resting on MEASURE past it (pointer + 1)."""
    contributions: list[tuple[Dyadic, int, complex]] = []
    for (q, p), amp in state.sorted_terms():
        if is_suspended(prog, p):
            contributions.append((q, p + 1, amp))
        else:
            contributions.append((q, p, amp))
    terms, collisions = _merge(contributions, state.prune_epsilon)
    return QuantumState(terms, state.prune_epsilon), collisions


@dataclass
class RunStats:
    """Diagnostics of a superposed run.

    `collisions` counts amplitude merges (branches landing on an occupied
    phase point); `final_norm` is the squared norm at exit.  `applications`
    (instruction applications over all branches) and `measurements` (barrier
    outcomes, in order) feed cost accounting and reports.
    """

    steps: int = 0
    peak_terms: int = 0
    collisions: int = 0
    final_norm: float = 0.0
    applications: int = 0
    measurements: list[int] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "steps": self.steps,
            "peak_terms": self.peak_terms,
            "collisions": self.collisions,
            "final_norm": self.final_norm,
            "measurements": list(self.measurements),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def run_quantum(
    prog: Program,
    s0: QuantumState,
    max_steps: int = 10_000,
    seed: int = 0,
) -> tuple[QuantumState, RunStats]:
    """Iterate q_step until every term is halted or the step limit.

    When all live terms are suspended at MEASURE, a measurement fires as one
    step: collapse on the current bit (seeded RNG), then release the suspended
    terms past their MEASURE.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    rng = random.Random(seed)
    state = s0
    stats = RunStats(peak_terms=len(state))
    while stats.steps < max_steps:
        live = [p for (_, p) in state.terms if not is_halted(prog, p)]
        if not live:
            break
        if all(is_suspended(prog, p) for p in live):
            bit, state = _measure_with_rng(state, rng)
            stats.measurements.append(bit)
            state, collisions = _release_measured(prog, state)
            stats.collisions += collisions
        else:
            state, collisions, applications = _advance(prog, state)
            stats.collisions += collisions
            stats.applications += applications
        stats.steps += 1
        stats.peak_terms = max(stats.peak_terms, len(state))
        if not state.terms:
            break
    stats.final_norm = state.norm_squared()
    return state, stats


def state_dump_obj(state: QuantumState, prog: Program) -> list[dict]:
    """JSON-ready dump rows sorted by (q literal, p).

    A pointer that has left the program is rendered as "halted"; a term
    resting on HALT keeps its instruction index.
    """
    rows = []
    for (q, p), amp in state.sorted_terms():
        rows.append(
            {
                "q": format_dyadic(q),
                "p": p if prog.in_range(p) else "halted",
                "re": amp.real,
                "im": amp.imag,
            }
        )
    return rows


def state_dump_json(state: QuantumState, prog: Program) -> str:
    return json.dumps(state_dump_obj(state, prog), sort_keys=True)

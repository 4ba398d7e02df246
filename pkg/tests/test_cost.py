import json
import random
from fractions import Fraction

import pytest

from postdyn.cost import (
    EVENT_CLASSES,
    ComparisonReport,
    CostLedger,
    CostWeights,
    compare_report,
    instrument_run,
    tape_window,
)
from postdyn.dyadic import Dyadic
from postdyn.dynamics import PhasePoint, compile_hamiltonian, run_dynamics
from postdyn.machine import TapeState, parse_program, run_direct
from postdyn.quantum import init_state, run_quantum, state_dump_json

F = Fraction


def prog(*ops):
    return parse_program("\n".join(ops))


def random_weights(rng):
    return CostWeights(
        **{
            name: F(rng.randint(0, 12), rng.randint(1, 9))
            for name in EVENT_CLASSES
        }
    )


def test_direct_run_counts_steps():
    ledger = instrument_run("direct", prog("JMP 1"), TapeState(), max_steps=10)
    assert ledger.counts["classical_step"] == 10
    assert ledger.total() == 10


def test_dynamics_run_counts_steps():
    ledger = instrument_run("dynamics", prog("MARK", "RIGHT", "HALT"), TapeState())
    assert ledger.counts["classical_step"] == 2


def test_quantum_run_event_counts():
    ledger = instrument_run("quantum", prog("HAD", "HALT"), TapeState())
    assert ledger.counts == {
        "circuit_assemble": 2,
        "classical_step": 0,
        "gate_apply": 1,
        "measure": 0,
        "prepare_qubit": 1,
    }
    assert ledger.total() == 4


def test_quantum_measure_counts_barriers():
    ledger = instrument_run("quantum", prog("HAD", "MEASURE", "HALT"), TapeState())
    assert ledger.counts["measure"] == 1


def test_tape_window():
    assert tape_window(TapeState()) == 1
    assert tape_window(TapeState(frozenset({-2, -1, 1}), 0)) == 4
    assert tape_window(TapeState(frozenset({5}), 0)) == 6


def test_zero_weights_zero_total():
    weights = CostWeights(F(0), F(0), F(0), F(0), F(0))
    ledger = instrument_run("direct", prog("JMP 1"), TapeState(), weights, max_steps=50)
    assert ledger.counts["classical_step"] == 50
    assert ledger.total() == 0


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        CostWeights(prepare_qubit=F(-1))


def test_breakdown_sums_exactly_random_weights():
    rng = random.Random(31)
    p = prog("HAD", "RIGHT", "JIF 5", "FLIP", "MEASURE", "HALT")
    for _ in range(100):
        weights = random_weights(rng)
        ledger = instrument_run("quantum", p, TapeState(), weights, max_steps=32)
        assert sum(ledger.subtotal(c) for c in EVENT_CLASSES) == ledger.total()


def test_instrumentation_does_not_change_results():
    p = prog("MARK", "RIGHT", "JIF 1", "MARK", "HALT")
    tape = TapeState()
    before = run_direct(p, tape, 1, 100)
    instrument_run("direct", p, tape, max_steps=100)
    after = run_direct(p, tape, 1, 100)
    assert before.rows == after.rows and before.status is after.status

    fld = compile_hamiltonian(p)
    d_before = run_dynamics(fld, PhasePoint(Dyadic(0, 0), 1), 100)
    instrument_run("dynamics", p, tape, max_steps=100)
    d_after = run_dynamics(fld, PhasePoint(Dyadic(0, 0), 1), 100)
    assert d_before.rows == d_after.rows

    qp = prog("HAD", "MEASURE", "HALT")
    q_before, s_before = run_quantum(qp, init_state(Dyadic(0, 0), 1), 32, seed=9)
    instrument_run("quantum", qp, tape, max_steps=32, seed=9)
    q_after, s_after = run_quantum(qp, init_state(Dyadic(0, 0), 1), 32, seed=9)
    assert state_dump_json(q_before, qp) == state_dump_json(q_after, qp)
    assert s_before.to_json() == s_after.to_json()


def test_ledger_merge_is_commutative_and_checks_weights():
    rng = random.Random(8)
    w = random_weights(rng)
    a = instrument_run("direct", prog("JMP 1"), TapeState(), w, max_steps=3)
    b = instrument_run("quantum", prog("HAD", "HALT"), TapeState(), w)
    assert (a + b).counts == (b + a).counts
    assert (a + b).total() == a.total() + b.total()
    other = CostLedger(CostWeights(gate_apply=F(7)))
    with pytest.raises(ValueError):
        a + other


def test_compare_report_margins():
    w = CostWeights()
    a = instrument_run("direct", prog("JMP 1"), TapeState(), w, max_steps=100)
    b = instrument_run("quantum", prog("HAD", "HALT"), TapeState(), w)
    report = compare_report(a, b)
    assert report.margin() == a.total() - b.total()
    equal = compare_report(a, a)
    assert equal.margin() == 0


def test_compare_requires_same_weights():
    a = CostLedger(CostWeights())
    b = CostLedger(CostWeights(gate_apply=F(30)))
    with pytest.raises(ValueError):
        compare_report(a, b)


def test_weights_json_round_trip():
    w = CostWeights(F(1, 3), F(30), F(2), F(5, 7), F(1))
    again = CostWeights.from_json(json.dumps(w.to_json_obj()))
    assert again == w
    with pytest.raises(ValueError):
        CostWeights.from_json('{"bogus_class": "1"}')


def test_report_serialisation_deterministic_and_sorted():
    w = CostWeights()
    a = instrument_run("direct", prog("JMP 1"), TapeState(), w, max_steps=5)
    b = instrument_run("quantum", prog("HAD", "HALT"), TapeState(), w)
    text = compare_report(a, b).to_json()
    assert text == compare_report(a, b).to_json()
    obj = json.loads(text)
    assert list(obj["classical"]["counts"]) == sorted(obj["classical"]["counts"])
    assert obj["margin"] == "1"


def test_unknown_engine_rejected():
    with pytest.raises(ValueError):
        instrument_run("warp", prog("HALT"), TapeState())

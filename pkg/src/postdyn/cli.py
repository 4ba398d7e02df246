"""Command-line entry point.

Subcommands: run (direct interpreter), dyn (phase-space dynamics), quantum
(superposition engine), check (direct-vs-dynamics equivalence), tokens
(polynomial identity verification), cost (event ledgers and comparison).

Exit status: 0 success/pass, 1 semantic failure (divergence, identity
failure, engine error), 2 usage or parse errors.  Diagnostics go to stderr;
data goes to files or stdout.  Repeat invocations with identical flags
produce byte-identical outputs.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import cost as cost_mod
from . import dynamics, machine, quantum, tokens
from .dyadic import DyadicParseError, DyadicUnderflowError, parse_dyadic
from .machine import ProgramParseError, RunStatus, StrictWriteError, WrongEngineError


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load_run_inputs(args) -> tuple[machine.Program, machine.TapeState]:
    prog = machine.load_program(args.program)
    tape = machine.decode(parse_dyadic(args.tape))
    if not prog.in_range(args.start):
        raise ProgramParseError(f"start index {args.start} outside 1..{len(prog)}", 0)
    return prog, tape


def _cmd_run(args) -> int:
    prog, tape = _load_run_inputs(args)
    trace = machine.run_direct(prog, tape, args.start, args.max_steps)
    _write(args.trace, machine.trace_csv(trace.q_rows()))
    print(f"status: {trace.status.value} after {trace.steps} steps", file=sys.stderr)
    if trace.status is RunStatus.ERROR:
        print(f"error at step {trace.error_step}: {trace.error}", file=sys.stderr)
        return 1
    return 0


def _cmd_dyn(args) -> int:
    prog, tape = _load_run_inputs(args)
    fld = dynamics.compile_hamiltonian(prog, paper_literal=args.paper_literal)
    s0 = dynamics.PhasePoint(machine.encode(tape), args.start)
    trace = dynamics.run_dynamics(fld, s0, args.max_steps)
    _write(args.trace, machine.trace_csv(trace.q_rows()))
    print(f"status: {trace.status.value} after {trace.steps} steps", file=sys.stderr)
    if trace.status is RunStatus.ERROR:
        print(f"error at step {trace.error_step}: {trace.error}", file=sys.stderr)
        return 1
    return 0


def _cmd_quantum(args) -> int:
    prog, tape = _load_run_inputs(args)
    s0 = quantum.init_state(machine.encode(tape), args.start, args.prune_epsilon)
    state, stats = quantum.run_quantum(prog, s0, args.max_steps, args.seed)
    if args.dump_state:
        _write(args.dump_state, quantum.state_dump_json(state, prog) + "\n")
    sys.stdout.write(stats.to_json() + "\n")
    return 0


def _cmd_check(args) -> int:
    prog, tape = _load_run_inputs(args)
    report = dynamics.check_equivalence(
        prog, tape, args.start, args.max_steps, paper_literal=args.paper_literal
    )
    sys.stdout.write(report.to_json() + "\n")
    return 0 if report.passed else 1


def _cmd_tokens(args) -> int:
    if args.table:
        with open(args.table, "r", encoding="utf-8") as fh:
            seq = tokens.load_coeff_csv(fh.read())
        n_max = args.degree if args.degree is not None else seq.n_max
    else:
        if args.degree is None:
            raise ValueError("--degree is required with --family")
        param = Fraction(args.param) if args.param is not None else None
        seq = tokens.standard_token(args.family, args.degree, param)
        n_max = args.degree
    report = tokens.verify_token_identity(seq, n_max)
    sys.stdout.write(report.to_json() + "\n")
    return 0 if report.passed else 1


def _load_weights(path: Optional[str]) -> cost_mod.CostWeights:
    if path is None:
        return cost_mod.CostWeights()
    with open(path, "r", encoding="utf-8") as fh:
        return cost_mod.CostWeights.from_json(fh.read())


def _cmd_cost(args) -> int:
    prog, tape = _load_run_inputs(args)
    weights = _load_weights(args.weights)
    if args.cost_command == "ledger":
        ledger = cost_mod.instrument_run(
            args.engine, prog, tape, weights, args.start, args.max_steps, args.seed
        )
        sys.stdout.write(ledger.to_json() + "\n")
    else:  # compare
        classical = cost_mod.instrument_run(
            "direct", prog, tape, weights, args.start, args.max_steps, args.seed
        )
        quantum_ledger = cost_mod.instrument_run(
            "quantum", prog, tape, weights, args.start, args.max_steps, args.seed
        )
        report = cost_mod.compare_report(classical, quantum_ledger)
        sys.stdout.write(report.to_json() + "\n")
    return 0


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("program", help="path to a .post assembly file")
    p.add_argument("--tape", default="0.", help="initial tape as a binary literal")
    p.add_argument("--start", type=int, default=1, help="initial instruction index")
    p.add_argument("--max-steps", type=int, default=100_000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="postdyn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="direct interpreter on the explicit tape")
    _add_run_args(p_run)
    p_run.add_argument("--trace", help="write t,p,q CSV here (default stdout)")
    p_run.set_defaults(func=_cmd_run)

    p_dyn = sub.add_parser("dyn", help="finite-difference dynamics on (q, p)")
    _add_run_args(p_dyn)
    p_dyn.add_argument("--trace", help="write t,p,q CSV here (default stdout)")
    p_dyn.add_argument(
        "--paper-literal",
        action="store_true",
        help="use pointer increment +1 on a false conditional jump",
    )
    p_dyn.set_defaults(func=_cmd_dyn)

    p_q = sub.add_parser("quantum", help="sparse superposition engine")
    _add_run_args(p_q)
    p_q.add_argument("--seed", type=int, default=0)
    p_q.add_argument("--prune-epsilon", type=float, default=1e-15)
    p_q.add_argument("--dump-state", help="write the final state JSON here")
    p_q.set_defaults(func=_cmd_quantum)

    p_chk = sub.add_parser("check", help="lockstep direct-vs-dynamics equivalence")
    _add_run_args(p_chk)
    p_chk.add_argument("--paper-literal", action="store_true")
    p_chk.set_defaults(func=_cmd_check)

    p_tok = sub.add_parser("tokens", help="polynomial sequence identities")
    tok_sub = p_tok.add_subparsers(dest="tokens_command", required=True)
    p_ver = tok_sub.add_parser("verify", help="check the convolution identity")
    group = p_ver.add_mutually_exclusive_group(required=True)
    group.add_argument("--family", choices=tokens.FAMILIES)
    group.add_argument("--table", help="coefficient CSV: n,c0,c1,... with a/b entries")
    p_ver.add_argument("--param", help="family parameter as a/b (abel)")
    p_ver.add_argument("--degree", type=int, help="check n = 0..degree")
    p_ver.set_defaults(func=_cmd_tokens)

    p_cost = sub.add_parser("cost", help="event ledgers under configurable weights")
    cost_sub = p_cost.add_subparsers(dest="cost_command", required=True)
    p_led = cost_sub.add_parser("ledger", help="account one engine run")
    _add_run_args(p_led)
    p_led.add_argument("--engine", choices=cost_mod.ENGINES, default="direct")
    p_led.add_argument("--weights", help="weights JSON with a/b entries")
    p_led.add_argument("--seed", type=int, default=0)
    p_led.set_defaults(func=_cmd_cost)
    p_cmp = cost_sub.add_parser("compare", help="direct vs quantum, same weights")
    _add_run_args(p_cmp)
    p_cmp.add_argument("--weights", help="weights JSON with a/b entries")
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.set_defaults(func=_cmd_cost)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ProgramParseError, DyadicParseError, FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StrictWriteError, WrongEngineError, DyadicUnderflowError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

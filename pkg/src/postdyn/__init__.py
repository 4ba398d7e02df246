"""Post-machine computation as exact discrete dynamics on the (q, p) phase
space, with a superposition engine over phase points, binomial-type polynomial
identities, and quantum/classical cost accounting."""

from .dyadic import (
    Dyadic,
    DyadicParseError,
    DyadicUnderflowError,
    add_one,
    current_bit,
    double,
    format_dyadic,
    halve,
    parse_dyadic,
    sub_one,
)
from .machine import (
    Instruction,
    Opcode,
    Program,
    ProgramParseError,
    RunStatus,
    StrictWriteError,
    TapeState,
    Trace,
    WrongEngineError,
    decode,
    direct_step,
    encode,
    load_program,
    parse_program,
    run_direct,
    trace_csv,
)
from .dynamics import (
    DynamicsTrace,
    EquivalenceReport,
    HamiltonianField,
    PhasePoint,
    check_equivalence,
    compile_hamiltonian,
    dynamics_step,
    run_dynamics,
)
from .quantum import (
    QuantumState,
    RunStats,
    init_state,
    measure,
    measure_distribution,
    q_step,
    run_quantum,
    state_dump_json,
    state_dump_obj,
)
from .tokens import (
    PolySeq,
    VerificationReport,
    binomial_from_token,
    h_symbol_coeffs,
    load_coeff_csv,
    standard_token,
    token_from_binomial,
    verify_binomial_identity,
    verify_token_identity,
)
from .cost import (
    ComparisonReport,
    CostLedger,
    CostWeights,
    compare_report,
    instrument_run,
)

__version__ = "0.1.0"

# core/__init__.py

# Public API of the qudit PBC toolkit. The dense simulator lives in
# core.statevector and is imported from there to keep its apply_* names apart
# from the tableau ones.
from . import constants, settings
from .exceptions import (
    QpbcError,
    InputError,
    InvalidInputDataError,
    InvalidModulusError,
    InverseOfZero,
    ShapeError,
    NotMagic,
    NoOpObservable,
    NotAStabilizerGroup,
    NormalizationError,
    ParseError,
    ResourceLimitError,
    OracleTooLarge,
    EnumerationTooLarge,
    ExecutionError,
    BackendError,
    NumericalFailure,
    InternalInvariantViolation,
    MissingConfigurationError,
)
from .field import FieldElem, fp_inv, validate_prime
from .pauli import (
    CommutationPhase,
    PauliObservable,
    commutation_phase,
    dense_matrix,
    pauli_mul,
    pauli_pow,
    random_pauli,
    symplectic_form,
)
from .gates import CliffordGate, GateKind, conjugate_observable
from .tableau import (
    MeasurementResult,
    StabilizerTableau,
    apply_gate,
    measure_pauli,
    synthesize_preparation_circuit,
)
from .magic import MagicParams, magic_state_vector, uv_exponent_vector
from .circuit import CircuitIR, GadgetizedCircuit, gadgetize, parse, random_circuit, render
from .backends import DenseBackend, PauliBackend, UniformBackend
from .compiler import (
    PbcSession,
    Transcript,
    VRecord,
    classify_and_execute,
    conjugate_through_correction,
    conjugate_through_v,
    enumerate_branches,
    run_session,
)
from .emitter import (
    AdaptiveCircuit,
    GateStats,
    emit_method1,
    emit_method2,
    ghz_prep_circuit,
    optimize_k,
    stats,
)
from .stabilizer_states import StabilizerStateDesc, enumerate_stabilizer_states
from .monotones import BoundReport, RomResult, bound_report, renyi_entropy, rom, st_norm
from .hybrid import (
    Decomposition,
    HybridReport,
    decompose_magic,
    eta,
    hybrid_estimate,
    plan_samples,
    random_program,
)
from .database import Base, SessionLocal, create_db_and_tables, engine, get_db
from . import crud_rom_results

__all__ = [
    "constants",
    "settings",
    "QpbcError",
    "InputError",
    "InvalidInputDataError",
    "InvalidModulusError",
    "InverseOfZero",
    "ShapeError",
    "NotMagic",
    "NoOpObservable",
    "NotAStabilizerGroup",
    "NormalizationError",
    "ParseError",
    "ResourceLimitError",
    "OracleTooLarge",
    "EnumerationTooLarge",
    "ExecutionError",
    "BackendError",
    "NumericalFailure",
    "InternalInvariantViolation",
    "MissingConfigurationError",
    "FieldElem",
    "fp_inv",
    "validate_prime",
    "CommutationPhase",
    "PauliObservable",
    "commutation_phase",
    "dense_matrix",
    "pauli_mul",
    "pauli_pow",
    "random_pauli",
    "symplectic_form",
    "CliffordGate",
    "GateKind",
    "conjugate_observable",
    "MeasurementResult",
    "StabilizerTableau",
    "apply_gate",
    "measure_pauli",
    "synthesize_preparation_circuit",
    "MagicParams",
    "magic_state_vector",
    "uv_exponent_vector",
    "CircuitIR",
    "GadgetizedCircuit",
    "gadgetize",
    "parse",
    "random_circuit",
    "render",
    "DenseBackend",
    "PauliBackend",
    "UniformBackend",
    "PbcSession",
    "Transcript",
    "VRecord",
    "classify_and_execute",
    "conjugate_through_correction",
    "conjugate_through_v",
    "enumerate_branches",
    "run_session",
    "AdaptiveCircuit",
    "GateStats",
    "emit_method1",
    "emit_method2",
    "ghz_prep_circuit",
    "optimize_k",
    "stats",
    "StabilizerStateDesc",
    "enumerate_stabilizer_states",
    "BoundReport",
    "RomResult",
    "bound_report",
    "renyi_entropy",
    "rom",
    "st_norm",
    "Decomposition",
    "HybridReport",
    "decompose_magic",
    "eta",
    "hybrid_estimate",
    "plan_samples",
    "random_program",
    "Base",
    "SessionLocal",
    "create_db_and_tables",
    "engine",
    "get_db",
    "crud_rom_results",
]

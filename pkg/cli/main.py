# cli/main.py
"""`qpbc` command line: JSON on stdout, logs and errors on stderr.

Exit codes: 0 success, 1 usage error, 2 input error, 3 resource limit,
4 execution failure.
"""

import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError

from core import constants, settings
from core.backends import DenseBackend, UniformBackend
from core.circuit import CircuitIR, GadgetizedCircuit, gadgetize, parse, random_circuit, render
from core.compiler import Transcript, enumerate_branches, profile_run, run_session
from core.database import SessionLocal, create_db_and_tables
from core.emitter import AdaptiveCircuit, emit_method1, emit_method2, ghz_prep_circuit, render_adaptive, stats
from core.exceptions import (
    InputError,
    InvalidInputDataError,
    MissingConfigurationError,
    ParseError,
    QpbcError,
    ResourceLimitError,
)
from core.hybrid import (
    decompose_magic,
    exact_q0,
    hybrid_estimate,
    magic_rom,
    plan_samples,
    random_program,
)
from core.magic import MagicParams, magic_state_vector, magic_tensor_power, uv_exponent_vector
from core.models import EntropyResponse, ProgramDocument
from core.monotones import bound_report, renyi_entropy, st_norm
from core.statevector import adaptive_distribution, circuit_distribution, gadgetized_distribution

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_EXECUTION = 4

Document = Any


class UsageError(Exception):
    pass


class QpbcArgumentParser(argparse.ArgumentParser):
    """argparse reports usage problems with exit 2; ours use exit 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# --- Helpers ---


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise InvalidInputDataError("input", path, f"Cannot read input file ({e.strerror}).") from e


def _validation_message(e: ValidationError, what: str) -> str:
    first = e.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    return f"Invalid {what}: {first.get('msg')}" + (f" at '{location}'" if location else "")


def load_document(text: str) -> Document:
    """Circuit text, or one of the JSON documents written by the other subcommands."""
    if not text.lstrip().startswith("{"):
        return parse(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Malformed JSON: {e.msg}", e.lineno, e.colno) from e
    if not isinstance(data, dict):
        raise ParseError("JSON input must be an object")
    if isinstance(data.get("circuit"), dict):
        data = data["circuit"]
    if data.get("kind") == "adaptive":
        model, what = AdaptiveCircuit, "adaptive circuit"
    elif "steps" in data:
        model, what = Transcript, "transcript"
    elif "program" in data:
        model, what = ProgramDocument, "program"
    elif "n_data" in data:
        model, what = GadgetizedCircuit, "gadgetized circuit"
    elif "gates" in data:
        model, what = CircuitIR, "circuit"
    else:
        raise ParseError("Unrecognized JSON document; expected a circuit, transcript, program or adaptive circuit")
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ParseError(_validation_message(e, what)) from e


def _expect(document: Document, kinds: tuple, command: str) -> None:
    if not isinstance(document, kinds):
        names = ", ".join(k.__name__ for k in kinds)
        raise InvalidInputDataError("input", type(document).__name__, f"'{command}' expects one of: {names}.")


def _magic_params(p: int, values: Optional[Sequence[int]]) -> MagicParams:
    if values is None:
        return MagicParams.default(p)
    z, gamma, eps = values
    return MagicParams(p=p, z=z, gamma=gamma, eps=eps)


def _jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json", by_alias=True)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _distribution_rows(distribution: dict, digits: int = 12) -> list[dict]:
    return [
        {"outcomes": list(outcomes), "probability": round(prob, digits)}
        for outcomes, prob in sorted(distribution.items())
        if prob >= constants.BRANCH_PRUNE_THRESHOLD
    ]


class Result:
    """What a subcommand produced: a JSON payload, optional table rows, or raw text."""

    def __init__(self, payload: Any = None, rows: Optional[list[dict]] = None, text: Optional[str] = None):
        self.payload = payload
        self.rows = rows
        self.text = text


# --- Subcommands ---


def cmd_parse(args, timings) -> Result:
    ir = parse(_read_input(args.input))
    if args.render:
        return Result(text=render(ir))
    return Result(ir)


def cmd_gadgetize(args, timings) -> Result:
    document = load_document(_read_input(args.input))
    _expect(document, (CircuitIR,), "gadgetize")
    return Result(gadgetize(document))


def cmd_compile(args, timings) -> Result:
    document = load_document(_read_input(args.input))
    _expect(document, (CircuitIR, GadgetizedCircuit), "compile")
    gc = gadgetize(document) if isinstance(document, CircuitIR) else document
    if args.backend == "uniform":
        backend = UniformBackend(gc.p, gc.n_magic)
    else:
        backend = DenseBackend(gc.p, gc.magic_params, use_k_scaling=args.k_scaling)
    start = time.perf_counter()
    transcript = run_session(gc, backend, settings.stage_rng(args.seed, constants.SEED_LABEL_COMPILE), validate=args.validate)
    timings["compile"] = time.perf_counter() - start
    return Result(transcript)


def _program_of(document) -> tuple[int, int, list, Optional[list[MagicParams]]]:
    if isinstance(document, Transcript):
        return document.p, document.t, document.pbc_program(), document.magic_params
    return document.p, document.t, list(document.program), document.magic_params


def cmd_emit(args, timings) -> Result:
    document = load_document(_read_input(args.input))
    _expect(document, (Transcript, ProgramDocument), "emit")
    _, t, program, params = _program_of(document)
    start = time.perf_counter()
    if args.method == 1:
        circuit = emit_method1(program, optimize=args.optimize_k, t=t, magic_params=params)
    else:
        circuit = emit_method2(program, optimize=args.optimize_k, t=t, magic_params=params)
    timings["emit"] = time.perf_counter() - start
    if args.format == "text":
        return Result(text=render_adaptive(circuit))
    report = stats(circuit)
    rows = [{"block": i, "sum_count": n} for i, n in enumerate(report.block_sum_counts)]
    return Result({"circuit": circuit, "stats": report}, rows=rows)


def cmd_ghz(args, timings) -> Result:
    circuit = ghz_prep_circuit(args.t, args.p)
    if args.format == "text":
        return Result(text=render_adaptive(circuit))
    report = stats(circuit)
    return Result({"circuit": circuit, "stats": report}, rows=[report.model_dump(exclude={"block_sum_counts"})])


def cmd_simulate(args, timings) -> Result:
    document = load_document(_read_input(args.input))
    _expect(document, (CircuitIR, GadgetizedCircuit, AdaptiveCircuit), "simulate")
    start = time.perf_counter()
    outputs = None
    if isinstance(document, AdaptiveCircuit):
        distribution = adaptive_distribution(document)
        outputs = document.outputs
    elif args.via == "compiler":
        gc = gadgetize(document) if isinstance(document, CircuitIR) else document
        distribution = enumerate_branches(gc)
    elif isinstance(document, CircuitIR):
        distribution = circuit_distribution(document)
    else:
        distribution = gadgetized_distribution(document)
    timings["simulate"] = time.perf_counter() - start
    rows = _distribution_rows(distribution)
    return Result({"outputs": outputs, "distribution": rows}, rows=rows)


def cmd_rom(args, timings) -> Result:
    params = _magic_params(args.p, args.params)
    start = time.perf_counter()
    if args.cache:
        create_db_and_tables()
        db = SessionLocal()
        try:
            summary, _ = magic_rom(args.p, args.copies, params, args.solver, db=db)
        finally:
            db.close()
    else:
        summary, _ = magic_rom(args.p, args.copies, params, args.solver)
    timings["rom"] = time.perf_counter() - start
    return Result(summary, rows=[summary.model_dump()])


def cmd_entropy(args, timings) -> Result:
    params = _magic_params(args.p, args.params)
    state = magic_tensor_power(params, args.copies)
    value = renyi_entropy(state, args.alpha, args.p)
    response = EntropyResponse(p=args.p, alpha=args.alpha, copies=args.copies, params=params.as_tuple(), entropy=value)
    return Result(response, rows=[response.model_dump()])


def cmd_bounds(args, timings) -> Result:
    params = _magic_params(args.p, args.params)
    start = time.perf_counter()
    if args.cache:
        create_db_and_tables()
        db = SessionLocal()
        try:
            summary, _ = magic_rom(args.p, args.copies, params, args.solver, db=db)
        finally:
            db.close()
    else:
        summary, _ = magic_rom(args.p, args.copies, params, args.solver)
    report = bound_report(args.p, args.copies, params, rom_value=summary.rom)
    report = report.model_copy(
        update={"planned_samples": plan_samples(args.accuracy, args.failure_probability, summary.rom, args.p)}
    )
    timings["bounds"] = time.perf_counter() - start
    return Result(report, rows=[report.model_dump(exclude={"magic_params"})])


def cmd_hybrid(args, timings) -> Result:
    rng_program = settings.stage_rng(args.seed, constants.SEED_LABEL_RANDOM_CIRCUIT)
    if args.input:
        document = load_document(_read_input(args.input))
        _expect(document, (Transcript, ProgramDocument), "hybrid")
        p, t, program, params_list = _program_of(document)
        if params_list and len(set(params_list)) > 1:
            raise InvalidInputDataError("magic_params", "mixed", "hybrid sampling needs identical magic states")
        params = params_list[0] if params_list else _magic_params(p, args.params)
    else:
        if args.p is None or args.t is None:
            raise UsageError("hybrid: give an input program or --p, --t and --length")
        p, t = args.p, args.t
        program = random_program(p, t, args.length, rng_program)
        params = _magic_params(p, args.params)

    start = time.perf_counter()
    decomposition = decompose_magic(p, args.k, mode=args.decomposition, params=params, solver=args.solver)
    timings["decompose"] = time.perf_counter() - start

    if args.exact:
        mode, samples = "exact", 0
    elif args.plan:
        mode = args.mode
        samples = plan_samples(args.accuracy, args.failure_probability, decomposition.l1, p)
    else:
        mode, samples = args.mode, args.samples
        if samples is None:
            raise UsageError("hybrid: give --samples, --plan or --exact")

    start = time.perf_counter()
    report = hybrid_estimate(
        program,
        t,
        args.k,
        samples,
        settings.stage_rng(args.seed, constants.SEED_LABEL_SAMPLE),
        decomposition=decomposition,
        mode=mode,
        failure_probability=args.failure_probability,
        workers=args.workers,
    )
    timings["sample"] = time.perf_counter() - start
    update = {"seed": args.seed, "elapsed_seconds": None}
    if args.exact:
        update["q0"] = exact_q0(program, p, t, params)
    report = report.model_copy(update=update)
    return Result(report, rows=[report.model_dump()])


def cmd_profile(args, timings) -> Result:
    rng = settings.stage_rng(args.seed, constants.SEED_LABEL_PROFILE)
    rows = []
    for t in range(1, args.t_max + 1):
        ir = random_circuit(args.p, args.n, t, args.m, args.depth, rng)
        gc = gadgetize(ir)
        start = time.perf_counter()
        transcript = profile_run(gc, rng)
        elapsed = time.perf_counter() - start
        counts = transcript.case_counts()
        rows.append(
            {
                "t": t,
                "elements": len(gc.elements),
                "seconds": round(elapsed, 6),
                "case1": counts[1],
                "case2": counts[2],
                "case3": counts[3],
            }
        )
        logger.info(f"profile t={t}: {elapsed:.4f}s, cases {counts}")
    return Result({"p": args.p, "n": args.n, "rows": rows}, rows=rows)


def cmd_magic(args, timings) -> Result:
    params = _magic_params(args.p, args.params)
    psi = magic_state_vector(args.p, *params.as_tuple())
    rows = [
        {"basis": j, "re": round(float(a.real), 12), "im": round(float(a.imag), 12)}
        for j, a in enumerate(psi)
    ]
    payload = {
        "p": args.p,
        "params": list(params.as_tuple()),
        "exponent_vector": list(uv_exponent_vector(args.p, *params.as_tuple())),
        "amplitudes": [[r["re"], r["im"]] for r in rows],
        "st_norm": st_norm(np.outer(psi, psi.conj()), args.p),
        "renyi_half": renyi_entropy(psi, 0.5, args.p),
    }
    return Result(payload, rows=rows)


# --- Parser ---


def _add_params(parser) -> None:
    parser.add_argument("--params", nargs=3, type=int, metavar=("Z", "GAMMA", "EPS"), help="U_v parameters")


def build_parser() -> QpbcArgumentParser:
    parser = QpbcArgumentParser(prog="qpbc", description="Qudit Pauli-based computation toolkit")
    parser.add_argument("--log-level", default=None, help="Logging level (default from LOG_LEVEL or WARNING)")
    parser.add_argument("--pretty", action="store_true", help="Print a table instead of JSON where available")
    parser.add_argument("--timings", action="store_true", help="Report stage timings on stderr")
    parser.add_argument("-o", "--output", default=None, help="Write the result to a file instead of stdout")
    parser.add_argument("--oracle-limit", type=int, default=None, help="Override QPBC_ORACLE_LIMIT")
    parser.add_argument("--enumeration-limit", type=int, default=None, help="Override QPBC_ENUMERATION_LIMIT")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=QpbcArgumentParser)

    p = sub.add_parser("parse", help="Validate a circuit and echo its IR")
    p.add_argument("input")
    p.add_argument("--render", action="store_true", help="Echo canonical circuit text instead of JSON")
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser("gadgetize", help="Replace U_v gates by injection gadgets")
    p.add_argument("input")
    p.set_defaults(handler=cmd_gadgetize)

    p = sub.add_parser("compile", help="Compile to a PBC transcript")
    p.add_argument("input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("dense", "uniform"), default="dense")
    p.add_argument("--k-scaling", action="store_true", help="Measure SUM-optimal scaled observables")
    p.add_argument("--validate", action="store_true", help="Check operator-list invariants after each step")
    p.set_defaults(handler=cmd_compile)

    p = sub.add_parser("emit", help="Emit an adaptive circuit for a PBC")
    p.add_argument("input")
    p.add_argument("--method", type=int, choices=(1, 2), default=1)
    p.add_argument("--optimize-k", action="store_true")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(handler=cmd_emit)

    p = sub.add_parser("ghz", help="Constant-depth GHZ preparation circuit")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(handler=cmd_ghz)

    p = sub.add_parser("simulate", help="Exact outcome distribution with the dense oracle")
    p.add_argument("input")
    p.add_argument("--via", choices=("dense", "compiler"), default="dense")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("rom", help="Robustness of magic of |T_v>^(x)copies")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--solver", choices=settings.SUPPORTED_LP_SOLVERS, default=None)
    p.add_argument("--cache", action="store_true", help="Read and write the result cache")
    _add_params(p)
    p.set_defaults(handler=cmd_rom)

    p = sub.add_parser("entropy", help="Stabilizer Renyi entropy of |T_v>^(x)copies")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--copies", type=int, default=1)
    _add_params(p)
    p.set_defaults(handler=cmd_entropy)

    p = sub.add_parser("bounds", help="Sampling-cost exponents and sample plan")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--accuracy", type=float, default=constants.DEFAULT_ACCURACY)
    p.add_argument("--failure-probability", type=float, default=constants.DEFAULT_FAILURE_PROBABILITY)
    p.add_argument("--solver", choices=settings.SUPPORTED_LP_SOLVERS, default=None)
    p.add_argument("--cache", action="store_true")
    _add_params(p)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("hybrid", help="Virtual-qudit hybrid estimate of q0")
    p.add_argument("input", nargs="?", default=None, help="Program or transcript JSON")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--length", type=int, default=3, help="Random program length when no input is given")
    p.add_argument("--k", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--samples", type=int, default=None)
    group.add_argument("--plan", action="store_true", help="Use the Hoeffding sample count")
    group.add_argument("--exact", action="store_true", help="Exact expectation and dense q0, no sampling")
    p.add_argument("--mode", choices=("session", "tabulated"), default="session")
    p.add_argument("--accuracy", type=float, default=constants.DEFAULT_ACCURACY)
    p.add_argument("--failure-probability", type=float, default=constants.DEFAULT_FAILURE_PROBABILITY)
    p.add_argument("--decomposition", choices=("optimal", "cached"), default="optimal")
    p.add_argument("--solver", choices=settings.SUPPORTED_LP_SOLVERS, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_params(p)
    p.set_defaults(handler=cmd_hybrid)

    p = sub.add_parser("profile", help="Compile-time growth on random circuits")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t-max", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_profile)

    p = sub.add_parser("magic", help="Summary of a magic state |T_v>")
    p.add_argument("--p", type=int, required=True)
    _add_params(p)
    p.set_defaults(handler=cmd_magic)
    return parser


# --- Entry point ---


def _configure_logging(level: Optional[str]) -> None:
    level = (level or os.getenv("LOG_LEVEL", "WARNING")).upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(module)s:%(funcName)s:%(lineno)d - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        force=True,
    )


def _error_document(e: Exception) -> str:
    location = e.location() if isinstance(e, ParseError) else None
    return json.dumps(
        {"error": type(e).__name__, "message": getattr(e, "message", str(e)), "location": location}
    )


def exit_code_for(e: Exception) -> int:
    if isinstance(e, ResourceLimitError):
        return EXIT_RESOURCE
    if isinstance(e, (InputError, MissingConfigurationError)):
        return EXIT_INPUT
    return EXIT_EXECUTION


def _emit(result: Result, pretty: bool, output: Optional[str]) -> None:
    if result.text is not None:
        text = result.text
    elif pretty and result.rows:
        text = pd.DataFrame(result.rows).to_string(index=False) + "\n"
    elif isinstance(result.payload, BaseModel):
        text = result.payload.model_dump_json(indent=2, by_alias=True) + "\n"
    else:
        text = json.dumps(_jsonable(result.payload), indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(parser.format_usage() + str(e) + "\n")
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    _configure_logging(args.log_level)
    if args.oracle_limit is not None:
        os.environ[settings.ORACLE_LIMIT_ENV] = str(args.oracle_limit)
    if args.enumeration_limit is not None:
        os.environ[settings.ENUMERATION_LIMIT_ENV] = str(args.enumeration_limit)

    timings: dict[str, float] = {}
    try:
        result = args.handler(args, timings)
        _emit(result, args.pretty, args.output)
    except UsageError as e:
        sys.stderr.write(str(e) + "\n")
        return EXIT_USAGE
    except QpbcError as e:
        logger.debug(f"{type(e).__name__}: {e.message}", exc_info=True)
        sys.stderr.write(_error_document(e) + "\n")
        return exit_code_for(e)
    except Exception as e:
        logger.error(f"Unexpected failure in '{args.command}': {e}", exc_info=True)
        sys.stderr.write(_error_document(e) + "\n")
        return EXIT_EXECUTION
    if args.timings:
        sys.stderr.write(json.dumps({"timings": {k: round(v, 6) for k, v in timings.items()}}) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

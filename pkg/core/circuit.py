# core/circuit.py
"""Circuit text format, the Clifford+U_v IR, and magic-state gadgetization."""

import logging
import re
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .exceptions import InvalidModulusError, ParseError
from .field import validate_prime
from .gates import CliffordGate, GateKind
from .magic import MagicParams

logger = logging.getLogger(__name__)


class UvGate(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Literal["uv"] = "uv"
    target: int = Field(..., ge=0)
    z: int
    gamma: int
    eps: int

    def params(self, p: int) -> MagicParams:
        return MagicParams(p=p, z=self.z, gamma=self.gamma, eps=self.eps)


class Measure(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Literal["measure"] = "measure"
    target: int = Field(..., ge=0)


class MidMeasure(BaseModel):
    """Z measurement of a gadget's data wire; the wire is retired afterwards."""

    model_config = ConfigDict(frozen=True)

    op: Literal["mid_measure"] = "mid_measure"
    wire: int = Field(..., ge=0)
    id: int = Field(..., ge=0)


class Correction(BaseModel):
    """C_sigma = U_v (X^dag)^sigma U_v^dag on a magic wire, sigma from MidMeasure `id`."""

    model_config = ConfigDict(frozen=True)

    op: Literal["correction"] = "correction"
    wire: int = Field(..., ge=0)
    id: int = Field(..., ge=0)
    z: int
    gamma: int
    eps: int

    def params(self, p: int) -> MagicParams:
        return MagicParams(p=p, z=self.z, gamma=self.gamma, eps=self.eps)


class FinalMeasure(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Literal["final_measure"] = "final_measure"
    wire: int = Field(..., ge=0)
    logical: int = Field(..., ge=0)


CircuitElement = Annotated[
    Union[CliffordGate, UvGate, Measure], Field(discriminator="op")
]
GadgetElement = Annotated[
    Union[CliffordGate, MidMeasure, Correction, FinalMeasure],
    Field(discriminator="op"),
]


class CircuitIR(BaseModel):
    p: int
    n: int = Field(..., ge=1)
    gates: list[CircuitElement] = Field(default_factory=list)

    @property
    def t(self) -> int:
        return sum(1 for g in self.gates if isinstance(g, UvGate))

    @property
    def measured_qudits(self) -> list[int]:
        return [g.target for g in self.gates if isinstance(g, Measure)]

    def is_runnable(self) -> bool:
        return bool(self.measured_qudits)


class GadgetizedCircuit(BaseModel):
    """Adaptive Clifford circuit on n_data + n_magic wires.

    Data wires come first; magic wire n_data + i holds |T_v> for the i-th U_v
    gate and receives the logical qudit once that gadget has run.
    """

    p: int
    n_data: int = Field(..., ge=1)
    n_magic: int = Field(..., ge=0)
    wires: int
    magic_params: list[MagicParams] = Field(default_factory=list)
    elements: list[GadgetElement] = Field(default_factory=list)
    wire_map_history: list[list[int]] = Field(default_factory=list)

    @property
    def magic_wires(self) -> list[int]:
        return list(range(self.n_data, self.n_data + self.n_magic))

    @property
    def final_wire_map(self) -> list[int]:
        return self.wire_map_history[-1]

    def mid_measure_positions(self) -> list[int]:
        return [i for i, e in enumerate(self.elements) if isinstance(e, MidMeasure)]

    def final_measure_positions(self) -> list[int]:
        return [i for i, e in enumerate(self.elements) if isinstance(e, FinalMeasure)]


# --- Text format ---

_CLIFFORD_MNEMONICS = {
    "F": GateKind.F,
    "FINV": GateKind.FINV,
    "S": GateKind.S,
    "SINV": GateKind.SINV,
    "X": GateKind.X,
    "Z": GateKind.Z,
}
_TOKEN = re.compile(r"\S+")


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(line)]


def _int(token: tuple[str, int], line_no: int, what: str) -> int:
    text, col = token
    try:
        return int(text, 10)
    except ValueError:
        raise ParseError(f"Expected integer {what}, found '{text}'", line_no, col)


def parse(text: str) -> CircuitIR:
    """Parse circuit text into a validated CircuitIR."""
    p: Optional[int] = None
    n: Optional[int] = None
    gates: list = []
    measured: set[int] = set()

    def qudit(token, line_no):
        q = _int(token, line_no, "qudit index")
        if not 0 <= q < n:
            raise ParseError(f"Qudit index {q} out of range for {n} qudits", line_no, token[1])
        if q in measured:
            raise ParseError(f"Qudit {q} is used after MEASURE", line_no, token[1])
        return q

    def power(token, line_no):
        k = _int(token, line_no, "power") % p
        if k == 0:
            raise ParseError(f"Power {token[0]} is trivial modulo {p}", line_no, token[1])
        return k

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        head, col = toks[0]
        if p is None:
            if head != "qudits" or len(toks) != 4 or toks[2][0] != "dim":
                raise ParseError("Expected header 'qudits <n> dim <p>'", line_no, col)
            n = _int(toks[1], line_no, "qudit count")
            if n < 1:
                raise ParseError("Qudit count must be positive", line_no, toks[1][1])
            p_value = _int(toks[3], line_no, "dimension")
            try:
                p = validate_prime(p_value)
            except InvalidModulusError:
                raise ParseError(
                    f"Dimension {p_value} is not a supported odd prime", line_no, toks[3][1]
                )
            continue

        args = toks[1:]
        if head in _CLIFFORD_MNEMONICS:
            kind = _CLIFFORD_MNEMONICS[head]
            max_args = 2 if kind in (GateKind.X, GateKind.Z) else 1
            if not 1 <= len(args) <= max_args:
                raise ParseError(f"{head} takes {max_args} argument(s) at most", line_no, col)
            q = qudit(args[0], line_no)
            k = power(args[1], line_no) if len(args) == 2 else 1
            gates.append(CliffordGate(kind=kind, target=q, power=k))
        elif head == "SUM":
            if len(args) not in (2, 3):
                raise ParseError("SUM takes <ctrl> <tgt> [k]", line_no, col)
            c = qudit(args[0], line_no)
            t = qudit(args[1], line_no)
            if c == t:
                raise ParseError("SUM control and target must differ", line_no, args[1][1])
            k = power(args[2], line_no) if len(args) == 3 else 1
            gates.append(CliffordGate(kind=GateKind.SUM, control=c, target=t, power=k))
        elif head == "UV":
            if len(args) != 4:
                raise ParseError("UV takes <q> <z'> <g'> <e'>", line_no, col)
            q = qudit(args[0], line_no)
            z, g, e = (_int(a, line_no, "U_v parameter") % p for a in args[1:])
            if g == 0:
                raise ParseError("U_v parameter gamma' must be nonzero", line_no, args[2][1])
            gates.append(UvGate(target=q, z=z, gamma=g, eps=e))
        elif head == "MEASURE":
            if len(args) != 1:
                raise ParseError("MEASURE takes one qudit index", line_no, col)
            q = qudit(args[0], line_no)
            measured.add(q)
            gates.append(Measure(target=q))
        else:
            raise ParseError(f"Unknown mnemonic '{head}'", line_no, col)

    if p is None:
        raise ParseError("Missing header 'qudits <n> dim <p>'", 1, 1)
    ir = CircuitIR(p=p, n=n, gates=gates)
    logger.debug(f"Parsed circuit: n={n}, p={p}, {len(gates)} instructions, t={ir.t}")
    return ir


def render(ir: CircuitIR) -> str:
    lines = [f"qudits {ir.n} dim {ir.p}"]
    for g in ir.gates:
        if isinstance(g, UvGate):
            lines.append(f"UV {g.target} {g.z} {g.gamma} {g.eps}")
        elif isinstance(g, Measure):
            lines.append(f"MEASURE {g.target}")
        elif g.kind is GateKind.SUM:
            suffix = f" {g.power}" if g.power != 1 else ""
            lines.append(f"SUM {g.control} {g.target}{suffix}")
        elif g.kind in (GateKind.X, GateKind.Z):
            suffix = f" {g.power}" if g.power != 1 else ""
            lines.append(f"{g.kind.value} {g.target}{suffix}")
        else:
            lines.extend([f"{g.kind.value} {g.target}"] * g.power)
    return "\n".join(lines) + "\n"


# --- Gadgetization ---


def gadgetize(ir: CircuitIR) -> GadgetizedCircuit:
    """Replace each U_v by its injection gadget on a fresh magic wire."""
    n = ir.n
    t = ir.t
    wire_map = list(range(n))
    history = [list(wire_map)]
    elements: list = []
    magic_params: list[MagicParams] = []

    for g in ir.gates:
        if isinstance(g, CliffordGate):
            elements.append(g.remap(wire_map))
        elif isinstance(g, UvGate):
            gadget_id = len(magic_params)
            params = g.params(ir.p)
            magic_params.append(params)
            magic_wire = n + gadget_id
            data_wire = wire_map[g.target]
            elements.extend(
                [
                    CliffordGate(kind=GateKind.F, target=data_wire, power=2),
                    CliffordGate(
                        kind=GateKind.SUM, control=magic_wire, target=data_wire
                    ),
                    MidMeasure(wire=data_wire, id=gadget_id),
                    Correction(
                        wire=magic_wire,
                        id=gadget_id,
                        z=params.z,
                        gamma=params.gamma,
                        eps=params.eps,
                    ),
                ]
            )
            wire_map[g.target] = magic_wire
            history.append(list(wire_map))
        else:
            elements.append(FinalMeasure(wire=wire_map[g.target], logical=g.target))

    logger.info(f"Gadgetized circuit: {n} data wires, {t} magic wires, {len(elements)} elements")
    return GadgetizedCircuit(
        p=ir.p,
        n_data=n,
        n_magic=t,
        wires=n + t,
        magic_params=magic_params,
        elements=elements,
        wire_map_history=history,
    )


def random_circuit(
    p: int,
    n: int,
    t: int,
    m: int,
    clifford_depth: int,
    rng: np.random.Generator,
) -> CircuitIR:
    """Random Clifford+U_v circuit with t magic gates and m final measurements."""
    validate_prime(p)
    m = min(m, n)
    gates: list = []
    kinds = [GateKind.F, GateKind.FINV, GateKind.S, GateKind.SINV, GateKind.X, GateKind.Z]
    uv_slots = set(rng.choice(clifford_depth + t, size=t, replace=False).tolist()) if t else set()
    for slot in range(clifford_depth + t):
        if slot in uv_slots:
            gamma = int(rng.integers(1, p))
            gates.append(
                UvGate(
                    target=int(rng.integers(0, n)),
                    z=int(rng.integers(0, p)),
                    gamma=gamma,
                    eps=int(rng.integers(0, p)),
                )
            )
        elif n > 1 and rng.random() < 0.3:
            c, tgt = rng.choice(n, size=2, replace=False).tolist()
            gates.append(
                CliffordGate(
                    kind=GateKind.SUM, control=c, target=tgt, power=int(rng.integers(1, p))
                )
            )
        else:
            kind = kinds[int(rng.integers(0, len(kinds)))]
            power = int(rng.integers(1, p)) if kind in (GateKind.X, GateKind.Z) else 1
            gates.append(CliffordGate(kind=kind, target=int(rng.integers(0, n)), power=power))
    for q in rng.choice(n, size=m, replace=False).tolist():
        gates.append(Measure(target=q))
    return CircuitIR(p=p, n=n, gates=gates)

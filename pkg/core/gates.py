# core/gates.py
"""Clifford gates over {F, F^dag, S, S^dag, SUM, X, Z} and their action on Paulis.

Forward conjugation computes U P U^dag; backward computes U^dag P U. Per-qudit
rules on (lam, x, z):

    F      (lam - x z, -z,  x)
    F^dag  (lam - x z,  z, -x)
    S      (lam + x(x-1)/2, x, z + x)
    S^dag  (lam - x(x-1)/2, x, z - x)
    X^k    lam - k z
    Z^k    lam + k x
    SUM^k  x_t += k x_c,  z_c -= k z_t
"""

from enum import Enum
from typing import Iterable, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import ShapeError
from .pauli import PauliObservable

Direction = Literal["forward", "backward"]


class GateKind(str, Enum):
    F = "F"
    FINV = "FINV"
    S = "S"
    SINV = "SINV"
    SUM = "SUM"
    X = "X"
    Z = "Z"


_INVERSE_KIND = {
    GateKind.F: GateKind.FINV,
    GateKind.FINV: GateKind.F,
    GateKind.S: GateKind.SINV,
    GateKind.SINV: GateKind.S,
}


class CliffordGate(BaseModel):
    """A Clifford gate raised to an integer power; SUM carries a control wire."""

    model_config = ConfigDict(frozen=True)

    op: Literal["gate"] = "gate"
    kind: GateKind
    target: int = Field(..., ge=0)
    control: Optional[int] = Field(None, ge=0)
    power: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_wires(self):
        if self.kind is GateKind.SUM:
            if self.control is None:
                raise ShapeError("SUM gate requires a control wire.")
            if self.control == self.target:
                raise ShapeError("SUM control and target must differ.")
        elif self.control is not None:
            raise ShapeError(f"{self.kind.value} gate takes no control wire.")
        return self

    def wires(self) -> tuple[int, ...]:
        if self.control is None:
            return (self.target,)
        return (self.control, self.target)

    def inverse(self, p: int) -> "CliffordGate":
        if self.kind in _INVERSE_KIND:
            return self.model_copy(update={"kind": _INVERSE_KIND[self.kind]})
        return self.model_copy(update={"power": p - (self.power % p)})

    def remap(self, wire_map: Sequence[int]) -> "CliffordGate":
        return self.model_copy(
            update={
                "target": wire_map[self.target],
                "control": None if self.control is None else wire_map[self.control],
            }
        )


def gate(kind, target: int, control: Optional[int] = None, power: int = 1):
    return CliffordGate(kind=GateKind(kind), target=target, control=control, power=power)


def _apply_once(lam: int, x: list, z: list, g: CliffordGate, p: int) -> int:
    t = g.target
    kind = g.kind
    if kind is GateKind.F:
        lam -= x[t] * z[t]
        x[t], z[t] = -z[t], x[t]
    elif kind is GateKind.FINV:
        lam -= x[t] * z[t]
        x[t], z[t] = z[t], -x[t]
    elif kind is GateKind.S:
        lam += x[t] * (x[t] - 1) // 2
        z[t] += x[t]
    elif kind is GateKind.SINV:
        lam -= x[t] * (x[t] - 1) // 2
        z[t] -= x[t]
    x[t] %= p
    z[t] %= p
    return lam


def _forward(P: PauliObservable, g: CliffordGate) -> PauliObservable:
    p = P.p
    for w in g.wires():
        if w >= P.n:
            raise IndexError(f"Gate wire {w} out of range for {P.n} qudits.")
    lam = P.lam
    x = list(P.x)
    z = list(P.z)
    t = g.target
    if g.kind is GateKind.X:
        lam -= g.power * z[t]
    elif g.kind is GateKind.Z:
        lam += g.power * x[t]
    elif g.kind is GateKind.SUM:
        c = g.control
        x[t] += g.power * x[c]
        z[c] -= g.power * z[t]
    else:
        for _ in range(g.power):
            lam = _apply_once(lam, x, z, g, p)
    return PauliObservable._make(p, lam, x, z)


def conjugate_by_gate(
    P: PauliObservable, g: CliffordGate, direction: Direction = "forward"
) -> PauliObservable:
    if direction == "forward":
        return _forward(P, g)
    return _forward(P, g.inverse(P.p))


def conjugate_observable(
    gates: Iterable[CliffordGate],
    P: PauliObservable,
    direction: Direction = "backward",
) -> PauliObservable:
    """U P U^dag (forward) or U^dag P U (backward) for U = g_last ... g_first."""
    gates = list(gates)
    if direction == "forward":
        for g in gates:
            P = _forward(P, g)
    elif direction == "backward":
        for g in reversed(gates):
            P = _forward(P, g.inverse(P.p))
    else:
        raise ValueError(f"Unknown conjugation direction '{direction}'.")
    return P


def invert_sequence(gates: Sequence[CliffordGate], p: int) -> list[CliffordGate]:
    """Gates of U^dag in application order."""
    return [g.inverse(p) for g in reversed(gates)]

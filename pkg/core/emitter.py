# core/emitter.py
"""Adaptive circuits that measure a sequence of Pauli observables with ancillas.

Method 1 couples every computational wire to one shared ancilla; Method 2
couples wire i to ancilla i of a GHZ register so the SUM chains run in
parallel. Within a block, controlled-(X^c Z^d) is a chain of c SUMs conjugated
on the target by X^(1/2) Z^(d/2) S^(-d/c) (and the inverse afterwards); a
pure Z^b wire uses b SUMs inside F^dag ... F.
"""

import logging
from typing import Annotated, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field

from .exceptions import NoOpObservable, ShapeError
from .field import half, inv_mod
from .gates import CliffordGate, GateKind
from .magic import MagicParams
from .pauli import PauliObservable, scaled_observable

logger = logging.getLogger(__name__)


# --- Elements ---


class AncillaMeasure(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Literal["measure_anc"] = "measure_anc"
    wire: int = Field(..., ge=0)
    label: str


class AncillaReset(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Literal["reset"] = "reset"
    wire: int = Field(..., ge=0)


class ClassicalCombine(BaseModel):
    """register[label] = offset + sum(coeff * register[src]) mod p."""

    model_config = ConfigDict(frozen=True)

    op: Literal["ccombine"] = "ccombine"
    label: str
    offset: int = 0
    terms: dict[str, int] = Field(default_factory=dict)


class ConditionalPauli(BaseModel):
    """X or Z on a wire raised to offset + sum(coeff * register[src]) mod p."""

    model_config = ConfigDict(frozen=True)

    op: Literal["cpauli"] = "cpauli"
    kind: Literal["X", "Z"]
    wire: int = Field(..., ge=0)
    offset: int = 0
    terms: dict[str, int] = Field(default_factory=dict)


AdaptiveElement = Annotated[
    Union[CliffordGate, AncillaMeasure, AncillaReset, ClassicalCombine, ConditionalPauli],
    Field(discriminator="op"),
]


class KScaling(BaseModel):
    """Measure M' = omega^(k lam) X(kx) Z(kz) instead of M; sigma = k^-1 sigma' + offset."""

    model_config = ConfigDict(frozen=True)

    k: int
    observable: PauliObservable
    inverse_k: int
    offset: int
    cost: int

    def reinterpret(self, sigma_prime: int) -> int:
        return (self.inverse_k * sigma_prime + self.offset) % self.observable.p


class ObservableBlock(BaseModel):
    index: int
    observable: PauliObservable
    measured: PauliObservable
    k: int = 1
    result_label: str
    raw_labels: list[str] = Field(default_factory=list)
    start: int
    end: int
    prep_start: Optional[int] = None
    prep_end: Optional[int] = None


class AdaptiveCircuit(BaseModel):
    """Computational wires 0..t-1, ancillas t..t+ancillas-1."""

    kind: Literal["adaptive"] = "adaptive"
    p: int
    t: int = Field(..., ge=0)
    ancillas: int = Field(..., ge=0)
    method: Literal["method1", "method2", "ghz"]
    elements: list[AdaptiveElement] = Field(default_factory=list)
    blocks: list[ObservableBlock] = Field(default_factory=list)
    outputs: list[str] = Field(default_factory=list)
    magic_params: Optional[list[MagicParams]] = None

    @property
    def wires(self) -> int:
        return self.t + self.ancillas


class GateStats(BaseModel):
    sum_count: int = 0
    depth: int = 0
    prep_sum_count: int = 0
    block_sum_counts: list[int] = Field(default_factory=list)
    sum_upper_bound: int = 0


# --- k scaling ---


def sum_cost(P: PauliObservable) -> int:
    """SUM gates needed to measure P: sum_j x_j + z_j [x_j = 0]."""
    return sum(x if x else z for x, z in zip(P.x, P.z))


def optimize_k(M: PauliObservable) -> KScaling:
    """The scaling k in [1, p-1] with the fewest SUM gates; ties go to the smallest k."""
    if M.is_identity():
        raise NoOpObservable()
    p = M.p
    best = None
    for k in range(1, p):
        cost = sum(
            (k * x) % p if x else (k * z) % p for x, z in zip(M.x, M.z)
        )
        if best is None or cost < best[1]:
            best = (k, cost)
    k, cost = best
    xz = sum(a * b for a, b in zip(M.x, M.z))
    return KScaling(
        k=k,
        observable=scaled_observable(M, k),
        inverse_k=inv_mod(k, p),
        offset=((k - 1) * half(p) * xz) % p,
        cost=cost,
    )


# --- Emission helpers ---


def _pre_conjugation(P: PauliObservable, wire: int) -> list[CliffordGate]:
    p = P.p
    c, d = P.x[wire], P.z[wire]
    if c == 0 and d == 0:
        return []
    if c == 0:
        return [CliffordGate(kind=GateKind.FINV, target=wire)]
    if d == 0:
        return []
    h = half(p)
    e = (inv_mod(c, p) * d) % p
    return [
        CliffordGate(kind=GateKind.X, target=wire, power=h),
        CliffordGate(kind=GateKind.Z, target=wire, power=(h * d) % p),
        CliffordGate(kind=GateKind.SINV, target=wire, power=e),
    ]


def _post_conjugation(P: PauliObservable, wire: int) -> list[CliffordGate]:
    p = P.p
    c, d = P.x[wire], P.z[wire]
    if c == 0 and d == 0:
        return []
    if c == 0:
        return [CliffordGate(kind=GateKind.F, target=wire)]
    if d == 0:
        return []
    h = half(p)
    e = (inv_mod(c, p) * d) % p
    return [
        CliffordGate(kind=GateKind.S, target=wire, power=e),
        CliffordGate(kind=GateKind.Z, target=wire, power=(-h * d) % p),
        CliffordGate(kind=GateKind.X, target=wire, power=(-h) % p),
    ]


def _sum_chain(P: PauliObservable, wire: int, control: int) -> list[CliffordGate]:
    count = P.x[wire] if P.x[wire] else P.z[wire]
    return [
        CliffordGate(kind=GateKind.SUM, control=control, target=wire)
        for _ in range(count)
    ]


def _scaling_for(M: PauliObservable, optimize: bool) -> Optional[KScaling]:
    if optimize and not M.is_identity():
        return optimize_k(M)
    return None


def _combine(label: str, raw_labels: Sequence[str], lam: int, scaling: Optional[KScaling], p: int):
    if scaling is None:
        return ClassicalCombine(label=label, offset=lam % p, terms={r: 1 for r in raw_labels})
    k_inv = scaling.inverse_k
    return ClassicalCombine(
        label=label,
        offset=(k_inv * lam + scaling.offset) % p,
        terms={r: k_inv for r in raw_labels},
    )


def _check_program(program: Sequence[PauliObservable], t: Optional[int]):
    if not program:
        if t is None:
            raise ShapeError("An empty program needs an explicit wire count.")
        return None, t
    p, n = program[0].p, program[0].n
    for i, M in enumerate(program):
        if M.p != p or M.n != n:
            raise ShapeError(
                f"Observable {i} has (p={M.p}, n={M.n}); expected (p={p}, n={n})."
            )
    if t is not None and t != n:
        raise ShapeError(f"Observables act on {n} wires, circuit has {t}.")
    return p, n


# --- GHZ preparation ---


def _ghz_elements(wires: Sequence[int], p: int, prefix: str) -> list:
    """Constant-depth preparation of sum_x |x...x>/sqrt(p) on the given |0> wires.

    Wires are taken in pairs. With an odd count the first t-1 wires are
    prepared and the last one is copied from its neighbour by one SUM, which
    adds at most one layer.
    """
    t = len(wires)
    if t == 0:
        return []
    if t == 1:
        return [CliffordGate(kind=GateKind.F, target=wires[0])]
    if t % 2:
        return _ghz_elements(wires[:-1], p, prefix) + [
            CliffordGate(kind=GateKind.SUM, control=wires[-2], target=wires[-1])
        ]
    pairs = [(wires[2 * i], wires[2 * i + 1]) for i in range(t // 2)]
    elements: list = []
    elements += [CliffordGate(kind=GateKind.F, target=a) for a, _ in pairs]
    elements += [CliffordGate(kind=GateKind.SUM, control=a, target=b) for a, b in pairs]
    elements += [
        CliffordGate(kind=GateKind.SUM, control=pairs[k][1], target=pairs[k + 1][0])
        for k in range(len(pairs) - 1)
    ]
    # pair k (1-based) >= 2: its first qudit now holds x_k + x_(k-1)
    labels = {k: f"{prefix}m{k - 1}" for k in range(2, len(pairs) + 1)}
    elements += [
        AncillaMeasure(wire=pairs[k - 1][0], label=labels[k])
        for k in range(2, len(pairs) + 1)
    ]
    for k in range(2, len(pairs) + 1):
        # x_k = (-1)^(k+1) x_1 + r_k with r_k = sum_j (-1)^(k-1-j) m_j
        terms = {
            labels[j + 1]: (-((-1) ** (k - 1 - j))) % p for j in range(1, k)
        }
        elements.append(ConditionalPauli(kind="X", wire=pairs[k - 1][1], terms=terms))
    elements += [
        CliffordGate(kind=GateKind.SUM, control=pairs[k - 2][1], target=pairs[k - 1][1], power=2)
        for k in range(2, len(pairs) + 1, 2)
    ]
    elements += [AncillaReset(wire=pairs[k - 1][0]) for k in range(2, len(pairs) + 1)]
    elements += [
        CliffordGate(kind=GateKind.SUM, control=pairs[k - 2][1], target=pairs[k - 1][0])
        for k in range(2, len(pairs) + 1)
    ]
    return elements


def ghz_prep_circuit(t: int, p: int) -> AdaptiveCircuit:
    """Stand-alone GHZ_t preparation on t ancilla wires starting in |0>."""
    if t < 2:
        raise ShapeError(f"GHZ preparation needs at least 2 qudits, got t={t}.")
    elements = _ghz_elements(list(range(t)), p, prefix="")
    return AdaptiveCircuit(p=p, t=0, ancillas=t, method="ghz", elements=elements)


# --- Methods ---


def emit_method1(
    program: Sequence[PauliObservable],
    optimize: bool = False,
    t: Optional[int] = None,
    magic_params: Optional[list[MagicParams]] = None,
) -> AdaptiveCircuit:
    p, t = _check_program(program, t)
    p = p if p is not None else 3
    ancilla = t
    elements: list = []
    blocks: list[ObservableBlock] = []
    for b, M in enumerate(program):
        start = len(elements)
        result = f"sigma{b}"
        scaling = _scaling_for(M, optimize)
        measured = scaling.observable if scaling else M
        raw: list[str] = []
        if measured.is_identity():
            elements.append(ClassicalCombine(label=result, offset=measured.lam))
        else:
            raw = [f"m{b}"]
            elements.append(AncillaReset(wire=ancilla))
            elements.append(CliffordGate(kind=GateKind.F, target=ancilla))
            for w in range(t):
                elements += _pre_conjugation(measured, w)
            for w in range(t):
                elements += _sum_chain(measured, w, ancilla)
            for w in range(t):
                elements += _post_conjugation(measured, w)
            elements.append(CliffordGate(kind=GateKind.FINV, target=ancilla))
            elements.append(AncillaMeasure(wire=ancilla, label=raw[0]))
            elements.append(_combine(result, raw, measured.lam, scaling, p))
        blocks.append(
            ObservableBlock(
                index=b,
                observable=M,
                measured=measured,
                k=scaling.k if scaling else 1,
                result_label=result,
                raw_labels=raw,
                start=start,
                end=len(elements),
            )
        )
    logger.info(f"Emitted Method 1 circuit: {len(program)} observables on {t} wires")
    return AdaptiveCircuit(
        p=p,
        t=t,
        ancillas=1,
        method="method1",
        elements=elements,
        blocks=blocks,
        outputs=[blk.result_label for blk in blocks],
        magic_params=magic_params,
    )


def emit_method2(
    program: Sequence[PauliObservable],
    optimize: bool = False,
    t: Optional[int] = None,
    magic_params: Optional[list[MagicParams]] = None,
) -> AdaptiveCircuit:
    p, t = _check_program(program, t)
    p = p if p is not None else 3
    ancillas = list(range(t, 2 * t))
    elements: list = []
    blocks: list[ObservableBlock] = []
    for b, M in enumerate(program):
        start = len(elements)
        result = f"sigma{b}"
        scaling = _scaling_for(M, optimize)
        measured = scaling.observable if scaling else M
        raw: list[str] = []
        prep_start = prep_end = None
        if measured.is_identity():
            elements.append(ClassicalCombine(label=result, offset=measured.lam))
        else:
            raw = [f"m{b}.{i}" for i in range(t)]
            elements += [AncillaReset(wire=a) for a in ancillas]
            prep_start = len(elements)
            elements += _ghz_elements(ancillas, p, prefix=f"g{b}.")
            prep_end = len(elements)
            for w in range(t):
                elements += _pre_conjugation(measured, w)
            chains = [_sum_chain(measured, w, ancillas[w]) for w in range(t)]
            for layer in range(max(len(c) for c in chains)):
                elements += [c[layer] for c in chains if layer < len(c)]
            for w in range(t):
                elements += _post_conjugation(measured, w)
            elements += [CliffordGate(kind=GateKind.FINV, target=a) for a in ancillas]
            elements += [
                AncillaMeasure(wire=a, label=label) for a, label in zip(ancillas, raw)
            ]
            elements.append(_combine(result, raw, measured.lam, scaling, p))
        blocks.append(
            ObservableBlock(
                index=b,
                observable=M,
                measured=measured,
                k=scaling.k if scaling else 1,
                result_label=result,
                raw_labels=raw,
                start=start,
                end=len(elements),
                prep_start=prep_start,
                prep_end=prep_end,
            )
        )
    logger.info(f"Emitted Method 2 circuit: {len(program)} observables on {t} wires")
    return AdaptiveCircuit(
        p=p,
        t=t,
        ancillas=t,
        method="method2",
        elements=elements,
        blocks=blocks,
        outputs=[blk.result_label for blk in blocks],
        magic_params=magic_params,
    )


# --- Accounting ---


def _element_wires(e) -> tuple[int, ...]:
    if isinstance(e, CliffordGate):
        return e.wires()
    if isinstance(e, (AncillaMeasure, AncillaReset, ConditionalPauli)):
        return (e.wire,)
    return ()


def circuit_depth(elements: Sequence) -> int:
    """ASAP layering: one layer per element on its wires, after any outcomes it reads."""
    ready: dict[int, int] = {}
    label_ready: dict[str, int] = {}
    depth = 0
    for e in elements:
        if isinstance(e, ClassicalCombine):
            label_ready[e.label] = max((label_ready.get(s, 0) for s in e.terms), default=0)
            continue
        wires = _element_wires(e)
        layer = max((ready.get(w, 0) for w in wires), default=0)
        if isinstance(e, ConditionalPauli):
            layer = max([layer] + [label_ready.get(s, 0) for s in e.terms])
        layer += 1
        for w in wires:
            ready[w] = layer
        if isinstance(e, AncillaMeasure):
            label_ready[e.label] = layer
        depth = max(depth, layer)
    return depth


def _sum_weight(elements: Sequence) -> int:
    return sum(
        e.power for e in elements if isinstance(e, CliffordGate) and e.kind is GateKind.SUM
    )


def stats(c: AdaptiveCircuit) -> GateStats:
    total = _sum_weight(c.elements)
    prep = 0
    per_block = []
    for blk in c.blocks:
        block_prep = 0
        if blk.prep_start is not None:
            block_prep = _sum_weight(c.elements[blk.prep_start : blk.prep_end])
        prep += block_prep
        per_block.append(_sum_weight(c.elements[blk.start : blk.end]) - block_prep)
    if c.method == "ghz":
        prep = total
    return GateStats(
        sum_count=total - prep,
        depth=circuit_depth(c.elements),
        prep_sum_count=prep,
        block_sum_counts=per_block,
        sum_upper_bound=(c.p - 1) * c.t * c.t,
    )


# --- Text rendering ---


def _terms_text(terms: dict[str, int]) -> str:
    return " ".join(f"{k}:{v}" for k, v in terms.items())


def render_adaptive(c: AdaptiveCircuit) -> str:
    """Circuit text extended with MEASURE_ANC, RESET, CCOMBINE and CX/CZ lines."""
    lines = [
        f"qudits {c.wires} dim {c.p}",
        f"# method {c.method}; computational wires 0..{c.t - 1}; ancillas {c.ancillas}",
    ]
    for e in c.elements:
        if isinstance(e, CliffordGate):
            suffix = f" {e.power}" if e.power != 1 else ""
            if e.kind is GateKind.SUM:
                lines.append(f"SUM {e.control} {e.target}{suffix}")
            elif e.kind in (GateKind.X, GateKind.Z, GateKind.S, GateKind.SINV):
                lines.append(f"{e.kind.value} {e.target}{suffix}")
            else:
                lines.extend([f"{e.kind.value} {e.target}"] * e.power)
        elif isinstance(e, AncillaMeasure):
            lines.append(f"MEASURE_ANC {e.wire} {e.label}")
        elif isinstance(e, AncillaReset):
            lines.append(f"RESET {e.wire}")
        elif isinstance(e, ConditionalPauli):
            lines.append(f"C{e.kind} {e.wire} {e.offset} {_terms_text(e.terms)}".rstrip())
        else:
            lines.append(f"CCOMBINE {e.label} {e.offset} {_terms_text(e.terms)}".rstrip())
    return "\n".join(lines) + "\n"

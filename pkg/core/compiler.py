# core/compiler.py
"""Runtime reduction of a gadgetized circuit to a standard PBC on the magic register.

Every measurement is pulled back to time zero: through the Clifford gates and
instantiated corrections that precede it, then through the V unitaries left by
earlier random outcomes (latest first). The resulting observable is classified
against the operator list:

    Case 1  anticommutes with a list entry   sigma uniform, V recorded
    Case 2  lies in the span of the list     sigma derived classically
    Case 3  commutes and is independent      measured on the backend
"""

import logging
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from . import constants
from .backends import DenseBackend, PauliBackend, UniformBackend, probable_outcomes
from .circuit import Correction, GadgetizedCircuit, MidMeasure
from .exceptions import BackendError, InternalInvariantViolation, QpbcError, ShapeError
from .field import half, inv_mod
from .gates import CliffordGate, conjugate_by_gate
from .linalg import rank_mod_p
from .magic import MagicParams
from .pauli import (
    CommutationPhase,
    PauliObservable,
    check_dimension,
    pauli_mul,
    pauli_pow,
    symplectic_form,
)
from .tableau import express_in_group

logger = logging.getLogger(__name__)

Source = Literal["sampled", "derived", "backend"]


# --- Records ---


class ListEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    observable: PauliObservable
    outcome: int
    origin: Literal["dummy", "measured"]


class OperatorList(BaseModel):
    """Pairwise commuting, independent observables with known outcomes."""

    entries: list[ListEntry] = Field(default_factory=list)

    @classmethod
    def initial(cls, p: int, n_data: int, n_total: int) -> "OperatorList":
        return cls(
            entries=[
                ListEntry(
                    observable=PauliObservable.single(p, n_total, i, z=1),
                    outcome=0,
                    origin="dummy",
                )
                for i in range(n_data)
            ]
        )

    def observables(self) -> list[PauliObservable]:
        return [e.observable for e in self.entries]

    def check(self) -> None:
        """Raise InternalInvariantViolation unless entries commute and are independent."""
        obs = self.observables()
        for i, a in enumerate(obs):
            for b in obs[i + 1 :]:
                if symplectic_form(a, b):
                    raise InternalInvariantViolation(
                        f"operator list entries {a.label()} and {b.label()} do not commute"
                    )
        if obs:
            matrix = np.array([o.vector() for o in obs])
            if rank_mod_p(matrix, obs[0].p) != len(obs):
                raise InternalInvariantViolation("operator list entries are dependent")


class VRecord(BaseModel):
    """V maps the a-eigenstate of A to the sigma-eigenstate of M."""

    model_config = ConfigDict(frozen=True)

    M: PauliObservable
    sigma: int
    A: PauliObservable
    a: int
    phi: CommutationPhase


class StepRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: Literal["mid", "final", "pbc"]
    label: int
    case: Literal[1, 2, 3]
    lam: int = Field(..., alias="lambda")
    x: list[int]
    z: list[int]
    sigma: int
    source: Source
    magic: Optional[PauliObservable] = None
    k: Optional[int] = None

    def observable(self, p: int) -> PauliObservable:
        return PauliObservable(p=p, n=len(self.x), lam=self.lam, x=tuple(self.x), z=tuple(self.z))


class Transcript(BaseModel):
    p: int
    n: int
    t: int
    steps: list[StepRecord] = Field(default_factory=list)
    outcomes: list[int] = Field(default_factory=list)
    mids: dict[int, int] = Field(default_factory=dict)
    magic_params: list[MagicParams] = Field(default_factory=list)

    def case_counts(self) -> dict[int, int]:
        counts = {1: 0, 2: 0, 3: 0}
        for s in self.steps:
            counts[s.case] += 1
        return counts

    def pbc_program(self) -> list[PauliObservable]:
        """The Case-3 observables restricted to the magic wires, in execution order."""
        return [s.magic for s in self.steps if s.case == 3]

    def pbc_outcomes(self) -> list[int]:
        return [s.sigma for s in self.steps if s.case == 3]


class Decision(BaseModel):
    case: Literal[1, 2, 3]
    pivot: Optional[int] = None
    sigma: Optional[int] = None


# --- Conjugation rules ---


def _correction_images(p: int, sigma: int, params: MagicParams) -> tuple[tuple, tuple]:
    """(lam, x, z) images of X and Z under C_sigma (.) C_sigma^dag."""
    g, zp = params.gamma, params.z
    if p == 3:
        x_image = ((sigma * (g * sigma + 2 * zp)) % 3, 1, (2 * g * sigma) % 3)
    else:
        x_image = ((-sigma * (half(p) * g * sigma + zp)) % p, 1, (-g * sigma) % p)
    z_image = (sigma % p, 0, 1)
    return x_image, z_image


def conjugate_through_correction(
    P: PauliObservable,
    sigma: int,
    params: MagicParams,
    wire: int,
    direction: Literal["forward", "backward"] = "forward",
) -> PauliObservable:
    """C_sigma P C_sigma^dag (forward) or C_sigma^dag P C_sigma (backward) on one wire."""
    p, n = P.p, P.n
    if direction == "backward":
        sigma = -sigma
    sigma %= p
    c, d = P.x[wire], P.z[wire]
    if sigma == 0 or (c == 0 and d == 0):
        return P
    x_image, z_image = _correction_images(p, sigma, params)
    xs = list(P.x)
    zs = list(P.z)
    xs[wire] = zs[wire] = 0
    result = PauliObservable._make(p, P.lam, xs, zs)
    if c:
        lam, x, z = x_image
        result = pauli_mul(result, pauli_pow(PauliObservable.single(p, n, wire, x, z, lam), c))
    if d:
        lam, x, z = z_image
        result = pauli_mul(result, pauli_pow(PauliObservable.single(p, n, wire, x, z, lam), d))
    return result


def conjugate_through_v(P: PauliObservable, v: VRecord) -> PauliObservable:
    """V P V^dag = omega^(l(a - sigma) - beta) P A^-l M^l with l = phi^-1 (alpha - beta)."""
    p = P.p
    alpha = symplectic_form(v.M, P)
    beta = symplectic_form(v.A, P)
    l = (inv_mod(v.phi.phi, p) * (alpha - beta)) % p
    result = pauli_mul(pauli_mul(P, pauli_pow(v.A, -l)), pauli_pow(v.M, l))
    return result.shift_phase(l * (v.a - v.sigma) - beta)


def conjugate_through_v_dagger(P: PauliObservable, v: VRecord) -> PauliObservable:
    """V^dag P V, found by inverting the forward rule."""
    p = P.p
    alpha = symplectic_form(v.M, P)
    beta = symplectic_form(v.A, P)
    l = (inv_mod(v.phi.phi, p) * (alpha - beta)) % p
    candidate = pauli_mul(pauli_mul(P, pauli_pow(v.A, l)), pauli_pow(v.M, -l))
    image = conjugate_through_v(candidate, v)
    if image.x != P.x or image.z != P.z:
        raise InternalInvariantViolation(f"V^dag conjugation of {P.label()} did not close")
    return candidate.shift_phase(P.lam - image.lam)


def make_v_record(M: PauliObservable, sigma: int, A: PauliObservable, a: int) -> VRecord:
    phi = symplectic_form(M, A)
    if phi == 0:
        raise ShapeError("V needs an observable that does not commute with its partner.")
    return VRecord(M=M, sigma=sigma % M.p, A=A, a=a % M.p, phi=CommutationPhase(phi=phi, p=M.p))


# --- Session ---


class PbcSession:
    """Operator list, V records, backend and rng of one compilation run.

    Wires 0..n_data-1 start in |0>; wires n_data.. are the magic register held
    by the backend.
    """

    def __init__(
        self,
        p: int,
        n_data: int,
        n_magic: int,
        backend: PauliBackend,
        rng: Optional[np.random.Generator] = None,
        validate: bool = False,
    ):
        if backend.t != n_magic or backend.p != p:
            raise ShapeError(
                f"Backend holds {backend.t} qudits (p={backend.p}); session needs {n_magic} (p={p})."
            )
        self.p = p
        self.n_data = n_data
        self.n_magic = n_magic
        self.n_total = n_data + n_magic
        self.backend = backend
        self.rng = rng if rng is not None else np.random.default_rng()
        self.validate = validate
        self.operator_list = OperatorList.initial(p, n_data, self.n_total)
        self.v_records: list[VRecord] = []
        self.steps: list[StepRecord] = []

    @property
    def magic_wires(self) -> list[int]:
        return list(range(self.n_data, self.n_total))

    def fork(self) -> "PbcSession":
        clone = PbcSession.__new__(PbcSession)
        clone.__dict__.update(self.__dict__)
        clone.backend = self.backend.fork()
        clone.operator_list = OperatorList(entries=list(self.operator_list.entries))
        clone.v_records = list(self.v_records)
        clone.steps = list(self.steps)
        return clone

    def front(self, R: PauliObservable) -> PauliObservable:
        """Return W^dag R W for W = V_1 V_2 ... V_k, the oldest record outermost."""
        for v in self.v_records:
            R = conjugate_through_v_dagger(R, v)
        return R

    def decide(self, M_front: PauliObservable) -> Decision:
        entries = self.operator_list.entries
        for i, entry in enumerate(entries):
            if symplectic_form(M_front, entry.observable):
                return Decision(case=1, pivot=i)
        found = express_in_group(self.operator_list.observables(), M_front)
        if found is not None:
            powers, delta = found
            sigma = (delta + sum(int(k) * e.outcome for k, e in zip(powers, entries))) % self.p
            return Decision(case=2, sigma=sigma)
        data_x = M_front.x[: self.n_data]
        if any(data_x):
            raise InternalInvariantViolation(
                f"Case-3 observable {M_front.label()} has X support on stabilizer wires"
            )
        return Decision(case=3)

    def magic_part(self, M_front: PauliObservable) -> PauliObservable:
        return M_front.restrict(self.magic_wires)

    def commit(
        self,
        M_front: PauliObservable,
        decision: Decision,
        sigma: int,
        kind: str = "pbc",
        label: int = 0,
        k: Optional[int] = None,
    ) -> int:
        """Record the outcome of a decided measurement and update the list or V records."""
        sigma %= self.p
        magic = None
        if decision.case == 1:
            pivot = self.operator_list.entries[decision.pivot]
            self.v_records.append(make_v_record(M_front, sigma, pivot.observable, pivot.outcome))
            source = "sampled"
        elif decision.case == 2:
            source = "derived"
        else:
            magic = self.magic_part(M_front)
            self.operator_list.entries.append(
                ListEntry(observable=M_front, outcome=sigma, origin="measured")
            )
            source = "backend"
        self.steps.append(
            StepRecord(
                kind=kind,
                label=label,
                case=decision.case,
                lam=M_front.lam,
                x=list(M_front.x),
                z=list(M_front.z),
                sigma=sigma,
                source=source,
                magic=magic,
                k=k,
            )
        )
        if self.validate:
            self.operator_list.check()
        return sigma


def classify_and_execute(
    session: PbcSession, M_front: PauliObservable, kind: str = "pbc", label: int = 0
) -> tuple[int, int]:
    """Classify a pulled-back observable and obtain its outcome; returns (case, sigma)."""
    decision = session.decide(M_front)
    k = None
    if decision.case == 1:
        sigma = int(session.rng.integers(0, session.p))
    elif decision.case == 2:
        sigma = decision.sigma
    else:
        magic = session.magic_part(M_front)
        try:
            sigma = session.backend.measure(magic, session.rng)
        except QpbcError:
            raise
        except Exception as e:
            logger.error(f"Backend failed measuring {magic.label()}: {e}", exc_info=True)
            raise BackendError(f"measurement of {magic.label()} failed", e) from e
        history = getattr(session.backend, "k_history", None)
        if history and getattr(session.backend, "use_k_scaling", False):
            k = history[-1]
    session.commit(M_front, decision, sigma, kind=kind, label=label, k=k)
    return decision.case, sigma


# --- Gadgetized circuits ---


class GadgetRun:
    """Walks the measurements of a gadgetized circuit: mid-circuit ones, then finals."""

    def __init__(self, gc: GadgetizedCircuit, session: PbcSession):
        self.gc = gc
        self.session = session
        self.order = gc.mid_measure_positions() + gc.final_measure_positions()
        self.cursor = 0
        self.mids: dict[int, int] = {}
        self.outcomes: list[int] = []

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.order)

    def fork(self) -> "GadgetRun":
        clone = GadgetRun.__new__(GadgetRun)
        clone.gc = self.gc
        clone.session = self.session.fork()
        clone.order = self.order
        clone.cursor = self.cursor
        clone.mids = dict(self.mids)
        clone.outcomes = list(self.outcomes)
        return clone

    def _pull_back(self, position: int) -> PauliObservable:
        gc = self.gc
        element = gc.elements[position]
        R = PauliObservable.single(gc.p, gc.wires, element.wire, z=1)
        for e in reversed(gc.elements[:position]):
            if isinstance(e, CliffordGate):
                R = conjugate_by_gate(R, e, "backward")
            elif isinstance(e, Correction):
                R = conjugate_through_correction(
                    R, self.mids[e.id], e.params(gc.p), e.wire, "backward"
                )
        return self.session.front(R)

    def next_front(self) -> PauliObservable:
        return self._pull_back(self.order[self.cursor])

    def _label(self):
        element = self.gc.elements[self.order[self.cursor]]
        if isinstance(element, MidMeasure):
            return "mid", element.id
        return "final", element.logical

    def record(self, sigma: int) -> None:
        kind, label = self._label()
        if kind == "mid":
            self.mids[label] = sigma
        else:
            self.outcomes.append(sigma)
        self.cursor += 1

    def step(self) -> tuple[int, int]:
        M_front = self.next_front()
        kind, label = self._label()
        case, sigma = classify_and_execute(self.session, M_front, kind=kind, label=label)
        self.record(sigma)
        return case, sigma

    def transcript(self) -> Transcript:
        return Transcript(
            p=self.gc.p,
            n=self.gc.n_data,
            t=self.gc.n_magic,
            steps=list(self.session.steps),
            outcomes=list(self.outcomes),
            mids=dict(self.mids),
            magic_params=list(self.gc.magic_params),
        )


def run_session(
    gc: GadgetizedCircuit,
    backend: PauliBackend,
    rng: np.random.Generator,
    validate: bool = False,
) -> Transcript:
    session = PbcSession(gc.p, gc.n_data, gc.n_magic, backend, rng, validate=validate)
    run = GadgetRun(gc, session)
    while not run.done:
        run.step()
    transcript = run.transcript()
    logger.info(
        f"Compiled {len(run.order)} measurements; case counts {transcript.case_counts()}"
    )
    return transcript


def expansion_options(
    session: PbcSession, M_front: PauliObservable, decision: Decision
) -> list[tuple[int, float]]:
    """Possible outcomes of a decided measurement with their exact probabilities."""
    if decision.case == 2:
        return [(decision.sigma, 1.0)]
    if decision.case == 1:
        return [(s, 1.0 / session.p) for s in range(session.p)]
    return probable_outcomes(session.backend, session.magic_part(M_front))


def apply_option(
    session: PbcSession,
    M_front: PauliObservable,
    decision: Decision,
    sigma: int,
    kind: str = "pbc",
    label: int = 0,
) -> None:
    if decision.case == 3:
        session.backend.project(session.magic_part(M_front), sigma)
    session.commit(M_front, decision, sigma, kind, label)


def enumerate_branches(
    gc: GadgetizedCircuit, backend: Optional[PauliBackend] = None
) -> dict[tuple[int, ...], float]:
    """Exact distribution over final outcomes by exploring every compiler branch."""
    check_dimension(gc.p, gc.n_magic)
    check_dimension(gc.p, gc.n_data)
    backend = backend if backend is not None else DenseBackend(gc.p, gc.magic_params)
    root = GadgetRun(gc, PbcSession(gc.p, gc.n_data, gc.n_magic, backend))
    distribution: dict[tuple[int, ...], float] = {}
    stack = [(1.0, root)]
    while stack:
        weight, run = stack.pop()
        if weight < constants.BRANCH_PRUNE_THRESHOLD:
            continue
        if run.done:
            key = tuple(run.outcomes)
            distribution[key] = distribution.get(key, 0.0) + weight
            continue
        M_front = run.next_front()
        decision = run.session.decide(M_front)
        kind, label = run._label()
        options = expansion_options(run.session, M_front, decision)
        for i, (sigma, prob) in enumerate(options):
            child = run if i == len(options) - 1 else run.fork()
            apply_option(child.session, M_front, decision, sigma, kind, label)
            child.record(sigma)
            stack.append((weight * prob, child))
    logger.debug(f"Enumerated {len(distribution)} outcome tuples")
    return distribution


def profile_run(gc: GadgetizedCircuit, rng: np.random.Generator) -> Transcript:
    """Compile against a uniform stand-in backend; outcomes carry no physics."""
    return run_session(gc, UniformBackend(gc.p, gc.n_magic), rng, validate=True)


def check_case3_program(transcript: Transcript) -> None:
    """Raise InternalInvariantViolation unless Case-3 observables commute, are independent and fit t."""
    program = transcript.pbc_program()
    if len(program) > transcript.t:
        raise InternalInvariantViolation(
            f"{len(program)} backend measurements exceed t={transcript.t}"
        )
    for i, a in enumerate(program):
        for b in program[i + 1 :]:
            if symplectic_form(a, b):
                raise InternalInvariantViolation("Case-3 observables do not commute")
    if program and rank_mod_p(np.array([m.vector() for m in program]), transcript.p) != len(program):
        raise InternalInvariantViolation("Case-3 observables are dependent")


# --- Generalized PBC programs ---


def _through_prefix(P: PauliObservable, prefix: Sequence[CliffordGate]) -> PauliObservable:
    for g in reversed(list(prefix)):
        P = conjugate_by_gate(P, g, "backward")
    return P


def replay_program(
    program: Sequence[PauliObservable], session: PbcSession, prefix: Sequence[CliffordGate] = ()
) -> list[int]:
    """Run a (generalized) PBC through a session; Clifford prefix acts on the first wires."""
    outcomes = []
    for label, P in enumerate(program):
        R = _through_prefix(P, prefix)
        _, sigma = classify_and_execute(session, session.front(R), label=label)
        outcomes.append(sigma)
    if session.backend.measurements > session.n_magic:
        raise InternalInvariantViolation(
            f"{session.backend.measurements} backend measurements on {session.n_magic} magic qudits"
        )
    return outcomes


def enumerate_program(
    program: Sequence[PauliObservable], session: PbcSession, prefix: Sequence[CliffordGate] = ()
) -> dict[tuple[int, ...], float]:
    """Exact outcome distribution of a (generalized) PBC, exploring every branch of the session."""
    pulled = [_through_prefix(P, prefix) for P in program]
    distribution: dict[tuple[int, ...], float] = {}
    stack = [(1.0, session, ())]
    while stack:
        weight, current, outcomes = stack.pop()
        if weight < constants.BRANCH_PRUNE_THRESHOLD:
            continue
        if len(outcomes) == len(pulled):
            distribution[outcomes] = distribution.get(outcomes, 0.0) + weight
            continue
        M_front = current.front(pulled[len(outcomes)])
        decision = current.decide(M_front)
        options = expansion_options(current, M_front, decision)
        for i, (sigma, prob) in enumerate(options):
            child = current if i == len(options) - 1 else current.fork()
            apply_option(child, M_front, decision, sigma, label=len(outcomes))
            stack.append((weight * prob, child, outcomes + (sigma,)))
    return distribution

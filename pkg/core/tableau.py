# core/tableau.py
"""Stabilizer-state engine holding n commuting generators, each with eigenvalue 1."""

import logging
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .exceptions import NotAStabilizerGroup, ShapeError
from .field import inv_mod
from .gates import (
    CliffordGate,
    GateKind,
    conjugate_by_gate,
    invert_sequence,
)
from .linalg import rank_mod_p, solve_mod_p
from .pauli import (
    PauliObservable,
    pauli_mul,
    pauli_pow,
    product_of_powers,
    symplectic_form,
)

logger = logging.getLogger(__name__)


class StabilizerTableau(BaseModel):
    """Generators g_i with g_i |psi> = |psi>; phases are carried in each lam."""

    model_config = ConfigDict(frozen=True)

    p: int
    n: int = Field(..., ge=0)
    generators: tuple[PauliObservable, ...]

    @classmethod
    def zero_state(cls, p: int, n: int) -> "StabilizerTableau":
        return cls(
            p=p,
            n=n,
            generators=tuple(PauliObservable.single(p, n, i, z=1) for i in range(n)),
        )

    def generator_matrix(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, 2 * self.n), dtype=np.int64)
        return np.array([g.vector() for g in self.generators], dtype=np.int64)

    def validate(self) -> "StabilizerTableau":
        if len(self.generators) != self.n:
            raise NotAStabilizerGroup(
                f"expected {self.n} generators, found {len(self.generators)}"
            )
        for g in self.generators:
            if g.p != self.p or g.n != self.n:
                raise NotAStabilizerGroup("generator modulus or size mismatch")
        for i, a in enumerate(self.generators):
            for j in range(i + 1, len(self.generators)):
                if symplectic_form(a, self.generators[j]):
                    raise NotAStabilizerGroup(f"generators {i} and {j} do not commute")
        if rank_mod_p(self.generator_matrix(), self.p) != self.n:
            raise NotAStabilizerGroup("generators are not independent")
        return self

    def express(self, M: PauliObservable) -> Optional[tuple[np.ndarray, int]]:
        """Powers k and phase delta with M = omega^delta prod g_i^k_i, or None."""
        return express_in_group(self.generators, M)

    def stabilizes(self, M: PauliObservable) -> bool:
        found = self.express(M)
        return found is not None and found[1] == 0

    def same_state(self, other: "StabilizerTableau") -> bool:
        """True when both tableaux generate the same group with the same phases."""
        if self.p != other.p or self.n != other.n:
            return False
        return all(other.stabilizes(g) for g in self.generators)


class MeasurementResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma: int
    tableau: StabilizerTableau
    deterministic: bool


def express_in_group(
    generators: Sequence[PauliObservable], M: PauliObservable
) -> Optional[tuple[np.ndarray, int]]:
    p, n = M.p, M.n
    if not generators:
        return (np.zeros(0, dtype=np.int64), M.lam) if M.is_identity() else None
    matrix = np.array([g.vector() for g in generators], dtype=np.int64)
    powers = solve_mod_p(matrix.T, M.vector(), p)
    if powers is None:
        return None
    product = product_of_powers(generators, powers.tolist(), p, n)
    return powers, (M.lam - product.lam) % p


def apply_gate(T: StabilizerTableau, g: CliffordGate) -> StabilizerTableau:
    for w in g.wires():
        if w >= T.n:
            raise IndexError(f"Gate wire {w} out of range for {T.n} qudits.")
    return T.model_copy(
        update={
            "generators": tuple(
                conjugate_by_gate(G, g, "forward") for G in T.generators
            )
        }
    )


def apply_gates(T: StabilizerTableau, gates: Sequence[CliffordGate]) -> StabilizerTableau:
    for g in gates:
        T = apply_gate(T, g)
    return T


def measure_pauli(
    T: StabilizerTableau, M: PauliObservable, rng: np.random.Generator
) -> MeasurementResult:
    """Projective measurement of M; outcome sigma means eigenvalue omega^sigma."""
    if M.p != T.p or M.n != T.n:
        raise ShapeError(
            f"Observable (p={M.p}, n={M.n}) does not match tableau (p={T.p}, n={T.n})."
        )
    p = T.p
    gens = list(T.generators)
    phases = [symplectic_form(M, g) for g in gens]
    pivot = next((i for i, phi in enumerate(phases) if phi), None)
    if pivot is None:
        found = express_in_group(gens, M)
        if found is None:
            raise NotAStabilizerGroup("observable commutes with but lies outside the group")
        sigma = found[1]
        logger.debug(f"Deterministic measurement of {M.label()} -> {sigma}")
        return MeasurementResult(sigma=sigma, tableau=T, deterministic=True)

    sigma = int(rng.integers(0, p))
    phi_pivot_inv = inv_mod(phases[pivot], p)
    for i, phi in enumerate(phases):
        if i != pivot and phi:
            k = (-phi * phi_pivot_inv) % p
            gens[i] = pauli_mul(gens[i], pauli_pow(gens[pivot], k))
    gens[pivot] = M.shift_phase(-sigma)
    logger.debug(f"Random measurement of {M.label()} -> {sigma} (pivot {pivot})")
    return MeasurementResult(
        sigma=sigma,
        tableau=T.model_copy(update={"generators": tuple(gens)}),
        deterministic=False,
    )


def synthesize_preparation_circuit(T: StabilizerTableau) -> list[CliffordGate]:
    """Gates preparing the tableau's state from |0...0>.

    Builds a reduction U with U|psi> = |0...0> qudit by qudit. One row is made
    Z-type with S and F^dag and then concentrated on the pivot qudit with SUMs;
    the pivot column is cleared from the remaining rows, and X powers zero the
    phases at the end. The preparation is U^dag.
    """
    T.validate()
    p, n = T.p, T.n
    gens = list(T.generators)
    reduction: list[CliffordGate] = []

    def apply(g: CliffordGate) -> None:
        reduction.append(g)
        for i, G in enumerate(gens):
            gens[i] = conjugate_by_gate(G, g, "forward")

    remaining = list(range(n))
    pivot_rows: dict[int, int] = {}
    for q in range(n):
        r = next(i for i in remaining if gens[i].x[q] or gens[i].z[q])
        for j in range(q, n):
            xj = gens[r].x[j]
            if xj:
                k = (-gens[r].z[j] * inv_mod(xj, p)) % p
                if k:
                    apply(CliffordGate(kind=GateKind.S, target=j, power=k))
                apply(CliffordGate(kind=GateKind.FINV, target=j))
        # z_q is nonzero here: either it was already, or F^dag moved x_q into it.
        for j in range(q + 1, n):
            zj = gens[r].z[j]
            if zj:
                k = (zj * inv_mod(gens[r].z[q], p)) % p
                apply(CliffordGate(kind=GateKind.SUM, control=j, target=q, power=k))
        c_inv = inv_mod(gens[r].z[q], p)
        for i in remaining:
            if i != r and gens[i].z[q]:
                k = (-gens[i].z[q] * c_inv) % p
                gens[i] = pauli_mul(gens[i], pauli_pow(gens[r], k))
        remaining.remove(r)
        pivot_rows[q] = r

    for q, r in pivot_rows.items():
        mu = (gens[r].lam * inv_mod(gens[r].z[q], p)) % p
        if mu:
            apply(CliffordGate(kind=GateKind.X, target=q, power=mu))

    preparation = invert_sequence(reduction, p)
    logger.debug(f"Synthesized {len(preparation)} gates for an {n}-qudit stabilizer state")
    return preparation

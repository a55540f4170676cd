# core/backends.py
"""Quantum backends that execute Pauli measurements on the magic register."""

import logging
from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np

from . import constants
from .emitter import optimize_k
from .exceptions import BackendError, ShapeError
from .magic import MagicParams, magic_state_vector
from .pauli import PauliObservable
from .statevector import DenseState, measure_projector, outcome_probabilities

logger = logging.getLogger(__name__)


class PauliBackend(ABC):
    """Measures observables on a t-qudit register; outcome sigma means eigenvalue omega^sigma."""

    def __init__(self, p: int, t: int):
        self.p = p
        self.t = t
        self.measurements = 0

    def _check(self, M: PauliObservable) -> None:
        if M.p != self.p or M.n != self.t:
            raise ShapeError(
                f"Backend holds {self.t} qudits of dimension {self.p}; "
                f"got an observable with n={M.n}, p={M.p}."
            )

    def measure(self, M: PauliObservable, rng: np.random.Generator) -> int:
        self._check(M)
        probabilities = self.outcome_probabilities(M)
        try:
            sigma = int(rng.choice(self.p, p=probabilities / probabilities.sum()))
        except ValueError as e:
            raise BackendError(f"invalid outcome distribution for {M.label()}", e) from e
        self.project(M, sigma)
        return sigma

    @abstractmethod
    def outcome_probabilities(self, M: PauliObservable) -> np.ndarray:
        ...

    @abstractmethod
    def project(self, M: PauliObservable, sigma: int) -> None:
        ...

    @abstractmethod
    def fork(self) -> "PauliBackend":
        ...


class DenseBackend(PauliBackend):
    """Exact statevector backend holding |T_v1> (x) ... (x) |T_vt>.

    With use_k_scaling the backend measures the SUM-optimal M' = scaled(M, k)
    and maps its outcome back, as an emitted circuit would; the k values used
    are kept in k_history.
    """

    def __init__(
        self,
        p: int,
        magic_params: Sequence[MagicParams],
        use_k_scaling: bool = False,
        state: Optional[DenseState] = None,
    ):
        params = list(magic_params)
        super().__init__(p, len(params) if state is None else state.n)
        self.magic_params = params
        self.use_k_scaling = use_k_scaling
        self.k_history: list[int] = []
        if state is None:
            state = DenseState.zero(p, 0)
            for mp in params:
                state = state.tensor(DenseState(p, 1, magic_state_vector(p, *mp.as_tuple())))
        self.state = state

    def outcome_probabilities(self, M: PauliObservable) -> np.ndarray:
        self._check(M)
        return outcome_probabilities(self.state, M)

    def project(self, M: PauliObservable, sigma: int) -> None:
        self._check(M)
        probability, post = measure_projector(self.state, M, sigma)
        if post is None:
            raise BackendError(
                f"outcome {sigma} of {M.label()} has probability {probability:.3g}"
            )
        self.state = post
        self.measurements += 1

    def measure(self, M: PauliObservable, rng: np.random.Generator) -> int:
        if not self.use_k_scaling or M.is_identity():
            return super().measure(M, rng)
        scaling = optimize_k(M)
        self.k_history.append(scaling.k)
        sigma_prime = super().measure(scaling.observable, rng)
        return scaling.reinterpret(sigma_prime)

    def fork(self) -> "DenseBackend":
        clone = DenseBackend(self.p, self.magic_params, self.use_k_scaling, state=self.state)
        clone.measurements = self.measurements
        clone.k_history = list(self.k_history)
        return clone


class UniformBackend(PauliBackend):
    """Stand-in backend returning uniform outcomes; used to profile compilation."""

    def outcome_probabilities(self, M: PauliObservable) -> np.ndarray:
        self._check(M)
        return np.full(self.p, 1.0 / self.p)

    def project(self, M: PauliObservable, sigma: int) -> None:
        self._check(M)
        self.measurements += 1

    def fork(self) -> "UniformBackend":
        clone = UniformBackend(self.p, self.t)
        clone.measurements = self.measurements
        return clone


def probable_outcomes(backend: PauliBackend, M: PauliObservable) -> list[tuple[int, float]]:
    probabilities = backend.outcome_probabilities(M)
    return [
        (sigma, float(prob))
        for sigma, prob in enumerate(probabilities)
        if prob >= constants.BRANCH_PRUNE_THRESHOLD
    ]

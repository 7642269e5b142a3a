"""Turning an arbitrary attack into a symmetric one with the same averaged metrics.

An attack on ``n`` qubits is stored as the probe-state matrix ``E[i, j]``
(z basis, ``N = 2**n`` messages) together with, for each announced basis,
a complete projective measurement on the probe and the message Eve guesses for
each outcome.

A protocol transform ``T`` (an involution permuting Alice's states up to sign)
maps ``E`` to ``T E T``. One symmetrization step appends an ancilla: the new
probe states are ``(E (x) |0> + T E T (x) |1>) / sqrt(2)``, and Eve reads the
ancilla first, then uses either her original rule or the rule she would have
used had Alice sent ``T|alpha>``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConsistencyError, DomainError
from .oracle import HADAMARD, RealizedAttack, bases, basis_change, states_in_basis
from .quantum import shannon_entropy

KINDS = ("bit-flip", "basis-swap", "phase-flip", "qubit-exchange")
METRICS = ("disturbance", "eve_success", "eve_information")
_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def _on_qubit(op: np.ndarray, q: int, n: int) -> np.ndarray:
    m = np.ones((1, 1))
    for k in range(n):
        m = np.kron(op if k == q else np.eye(2), m)
    return m


@dataclass(frozen=True)
class ProtocolTransform:
    """An involution on Alice's message space that maps her state set onto itself.

    ``phase-flip`` is the bit flip as seen from the x basis, i.e. basis-swap,
    bit-flip, basis-swap; it is needed to reach every symmetry of the protocol.
    """

    kind: str
    n: int
    qubit: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown transform {self.kind!r}")
        if self.kind == "qubit-exchange" and self.n != 2:
            raise DomainError("qubit-exchange needs n == 2")
        if not 0 <= self.qubit < self.n:
            raise DomainError(f"qubit {self.qubit} out of range for n={self.n}")

    @property
    def label(self) -> str:
        return self.kind if self.kind == "qubit-exchange" else f"{self.kind}[{self.qubit}]"

    @cached_property
    def matrix(self) -> np.ndarray:
        if self.kind == "qubit-exchange":
            return np.eye(4)[[0, 2, 1, 3]]
        op = {"bit-flip": _PAULI_X, "basis-swap": HADAMARD, "phase-flip": _PAULI_Z}[self.kind]
        return _on_qubit(op, self.qubit, self.n)

    @cached_property
    def state_action(self) -> dict[tuple[tuple[int, ...], int], tuple[tuple[int, ...], int, float]]:
        """``(basis, message) -> (basis', message', sign)`` with ``T|i_b> = sign |i'_b'>``."""
        N = 2**self.n
        columns = {b: basis_change(b) for b in bases(self.n)}
        out = {}
        for b, wb in columns.items():
            for i in range(N):
                image = self.matrix @ wb[:, i]
                hit = None
                for b2, w2 in columns.items():
                    overlaps = w2.T @ image
                    k = int(np.argmax(np.abs(overlaps)))
                    if abs(abs(overlaps[k]) - 1.0) < 1e-12:
                        hit = (b2, k, float(np.sign(overlaps[k])))
                        break
                if hit is None:
                    raise ConsistencyError(f"{self.label} does not preserve Alice's state set")
                out[(b, i)] = hit
        return out

    def basis_image(self, b: tuple[int, ...]) -> tuple[int, ...]:
        return self.state_action[(b, 0)][0]

    def message_map(self, b: tuple[int, ...]) -> list[int]:
        """``sigma_b``: message ``i`` in basis ``b`` goes to ``sigma_b[i]`` in the image basis."""
        return [self.state_action[(b, i)][1] for i in range(2**self.n)]


def bit_flip(q: int, n: int) -> ProtocolTransform:
    return ProtocolTransform("bit-flip", n, q)


def basis_swap(q: int, n: int) -> ProtocolTransform:
    return ProtocolTransform("basis-swap", n, q)


def phase_flip(q: int, n: int) -> ProtocolTransform:
    return ProtocolTransform("phase-flip", n, q)


def qubit_exchange() -> ProtocolTransform:
    return ProtocolTransform("qubit-exchange", 2, 0)


def generators(n: int) -> list[ProtocolTransform]:
    """The defining symmetries: bit flips, basis swaps and (for pairs) the qubit exchange."""
    if n not in (1, 2):
        raise DomainError("only n = 1 or 2 is supported")
    gens = [bit_flip(q, n) for q in range(n)] + [basis_swap(q, n) for q in range(n)]
    if n == 2:
        gens.append(qubit_exchange())
    return gens


def symmetrization_chain(n: int) -> list[ProtocolTransform]:
    """Transforms, in application order, whose successive steps average over the whole group.

    Applying steps ``t_1 .. t_k`` mixes ``{I, t_k} ... {I, t_1}``; these orders
    make that product an exact enumeration of the symmetry group (modulo sign).
    """
    if n == 1:
        return [basis_swap(0, 1), bit_flip(0, 1), phase_flip(0, 1)]
    if n == 2:
        return [
            qubit_exchange(), basis_swap(1, 2), basis_swap(0, 2),
            bit_flip(0, 2), phase_flip(0, 2), bit_flip(1, 2), phase_flip(1, 2),
        ]
    raise DomainError("only n = 1 or 2 is supported")


@dataclass
class RawAttack:
    """Probe states ``states[i, j]`` (z basis) and Eve's rule per announced basis.

    ``measurement[b]`` is ``(vectors, guesses)``: an orthonormal basis of the
    probe space (rows) and the message guessed for each outcome.
    """

    n: int
    states: np.ndarray
    measurement: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]]

    @property
    def N(self) -> int:
        return 2**self.n

    @property
    def probe_dim(self) -> int:
        return self.states.shape[2]

    @property
    def gram(self) -> np.ndarray:
        flat = self.states.reshape(self.N * self.N, -1)
        return flat @ flat.T

    def validate(self, tol: float = 1e-10) -> None:
        N = self.N
        cols = np.einsum("ijd,kjd->ik", self.states, self.states)
        if np.abs(cols - np.eye(N)).max() > tol:
            raise ConsistencyError("probe states do not come from an isometry")
        for b in bases(self.n):
            vec, guesses = self.measurement[b]
            if vec.shape != (self.probe_dim, self.probe_dim):
                raise ConsistencyError(f"measurement for basis {b} is not complete")
            if np.abs(vec @ vec.T - np.eye(self.probe_dim)).max() > tol:
                raise ConsistencyError(f"measurement for basis {b} is not orthonormal")
            if len(guesses) != self.probe_dim:
                raise ConsistencyError(f"guess table for basis {b} has wrong length")


def _check_dims(t: ProtocolTransform, a: RawAttack) -> None:
    if t.n != a.n:
        raise DomainError(f"transform acts on {t.n} qubit(s), attack on {a.n}")


def apply_transform(t: ProtocolTransform, a: RawAttack) -> RawAttack:
    """The attack ``T E T`` with Eve's rule relabeled to match."""
    _check_dims(t, a)
    T = t.matrix
    states = np.einsum("ik,kld,lj->ijd", T, a.states, T)
    meas = {}
    for b in bases(a.n):
        target = t.basis_image(b)
        sigma = t.message_map(b)
        inverse = np.argsort(sigma)
        vec, guesses = a.measurement[target]
        meas[b] = (vec, inverse[np.asarray(guesses)])
    return RawAttack(a.n, states, meas)


def _direct_sum(first: RawAttack, second: RawAttack) -> RawAttack:
    d1, d2 = first.probe_dim, second.probe_dim
    states = np.concatenate([first.states, second.states], axis=2) / math.sqrt(2.0)
    meas = {}
    for b in bases(first.n):
        v1, g1 = first.measurement[b]
        v2, g2 = second.measurement[b]
        vec = np.zeros((d1 + d2, d1 + d2))
        vec[:d1, :d1] = v1
        vec[d1:, d1:] = v2
        meas[b] = (vec, np.concatenate([g1, g2]))
    return RawAttack(first.n, states, meas)


def symmetrize_step(a: RawAttack, t: ProtocolTransform) -> RawAttack:
    """Ancilla-doubled attack that is symmetric under ``t`` and keeps every averaged metric."""
    return _direct_sum(a, apply_transform(t, a))


def symmetrize_full(a: RawAttack) -> RawAttack:
    for t in symmetrization_chain(a.n):
        a = symmetrize_step(a, t)
    return a


def is_symmetric(a: RawAttack, t: ProtocolTransform, tol: float = 1e-10) -> bool:
    return bool(np.abs(a.gram - apply_transform(t, a).gram).max() <= tol)


def _outcome_probabilities(a: RawAttack, b: tuple[int, ...]) -> np.ndarray:
    """``P[i, j, o]``: Bob gets ``j`` and Eve outcome ``o`` when Alice sends ``i`` in basis ``b``."""
    eb = states_in_basis(a.states, b)
    vec, _ = a.measurement[b]
    return np.einsum("od,ijd->ijo", vec, eb) ** 2


def per_state_metrics(a: RawAttack) -> dict[tuple[tuple[int, ...], int], dict[str, float]]:
    """Disturbance and Eve success for each of Alice's ``4**n`` states."""
    N = a.N
    ham = np.array([[bin(i ^ j).count("1") / a.n for j in range(N)] for i in range(N)])
    out = {}
    for b in bases(a.n):
        P = _outcome_probabilities(a, b)
        guesses = np.asarray(a.measurement[b][1])
        for i in range(N):
            out[(b, i)] = {
                "disturbance": float(np.sum(P[i].sum(axis=1) * ham[i])),
                "eve_success": float(P[i][:, guesses == i].sum()),
            }
    return out


def _basis_information(a: RawAttack, b: tuple[int, ...]) -> float:
    P = _outcome_probabilities(a, b).sum(axis=1) / a.N  # (i, o)
    px = P.sum(axis=1)
    py = P.sum(axis=0)
    return shannon_entropy(px) + shannon_entropy(py[py > 0] / py.sum()) - shannon_entropy(
        P[P > 0] / P.sum()
    )


def averaged_metric(a: RawAttack, metric: str) -> float:
    """Average of a metric over Alice's states, by direct enumeration.

    ``eve_information`` is not a per-state quantity; it is the mutual
    information between Alice's message and Eve's outcome, averaged over the
    ``2**n`` announced bases.
    """
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}")
    if metric == "eve_information":
        return float(np.mean([_basis_information(a, b) for b in bases(a.n)]))
    per = per_state_metrics(a)
    return float(np.mean([v[metric] for v in per.values()]))


def from_realized(r: RealizedAttack) -> RawAttack:
    """Wrap a realized symmetric attack, using its syndrome/cartesian measurement."""
    N = 2**r.n
    guesses = np.tile(np.arange(N), N)
    meas = {b: (mu.reshape(N * N, -1), guesses.copy()) for b, mu in r.eve_basis.items()}
    return RawAttack(r.n, r.states.copy(), meas)


def likelihood_measurement(n: int, states: np.ndarray) -> dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]]:
    """A complete projective rule per basis with maximum-likelihood guesses.

    For one qubit the basis diagonalizes ``rho_0 - rho_1`` (the Helstrom
    measurement); for pairs it diagonalizes ``sum_i rho_i^2``, a heuristic.
    """
    meas = {}
    for b in bases(n):
        eb = states_in_basis(states, b)
        rho = np.einsum("ijd,ije->ide", eb, eb)
        key = rho[0] - rho[1] if n == 1 else np.einsum("ide,ief->df", rho, rho)
        _, vec = np.linalg.eigh(key)
        vec = vec.T
        likelihood = np.einsum("od,ide,oe->oi", vec, rho, vec)
        meas[b] = (vec, np.argmax(likelihood, axis=1))
    return meas


def random_attack(n: int, probe_dim: int, rng: np.random.Generator) -> RawAttack:
    """A generic (asymmetric) attack from a random isometry, with the likelihood rule."""
    N = 2**n
    q, _ = np.linalg.qr(rng.normal(size=(probe_dim * N, N)))
    states = np.transpose(q.T.reshape(N, probe_dim, N), (0, 2, 1))
    return RawAttack(n, states, likelihood_measurement(n, states))


def z_copy_attack() -> RawAttack:
    """Copies the z-basis bit perfectly into a qubit probe and ignores the x basis."""
    states = np.zeros((2, 2, 2))
    states[0, 0, 0] = 1.0
    states[1, 1, 1] = 1.0
    ident = (np.eye(2), np.array([0, 1]))
    return RawAttack(1, states, {(0,): ident, (1,): ident})


def identity_raw_attack(n: int) -> RawAttack:
    N = 2**n
    states = np.zeros((N, N, 1))
    for i in range(N):
        states[i, i, 0] = 1.0
    meas = {b: (np.eye(1), np.array([0])) for b in bases(n)}
    return RawAttack(n, states, meas)


def group_elements(transforms: list[ProtocolTransform]) -> list[np.ndarray]:
    """Closure of the given transforms as matrices, identified up to sign."""
    n = transforms[0].n
    elements = [np.eye(2**n)]
    frontier = list(elements)
    while frontier:
        fresh = []
        for g, t in itertools.product(frontier, transforms):
            h = t.matrix @ g
            if not any(_same_up_to_sign(h, e) for e in elements):
                elements.append(h)
                fresh.append(h)
        frontier = fresh
    return elements


def _same_up_to_sign(x: np.ndarray, y: np.ndarray) -> bool:
    return bool(np.allclose(x, y, atol=1e-12) or np.allclose(x, -y, atol=1e-12))

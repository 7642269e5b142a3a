"""Brute-force verification by explicit realization and Monte Carlo sampling.

An attack is turned into concrete probe vectors (rows of a Gram factorization)
and an isometry from Alice's message space into probe (x) message. For every
announced basis Eve's measurement is rebuilt from the realized vectors of that
basis: first the syndrome set, then the square-root measurement on the set,
which for these group-covariant sets is the cartesian basis of the pyramid.
Shots are drawn from the Born-rule joint distribution of
(basis, message, Bob outcome, Eve outcome).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import coherent, incoherent
from .coherent import CoherentParams
from .errors import ConsistencyError, DomainError
from .incoherent import IncoherentParams
from .quantum import realize_gram

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
ORTHO_TOL = 1e-10


def bases(n: int) -> list[tuple[int, ...]]:
    """All per-qubit basis choices; entry ``q`` is 0 for z and 1 for x on qubit ``q``."""
    return list(itertools.product((0, 1), repeat=n))


def basis_label(b: tuple[int, ...]) -> str:
    return "".join("zx"[v] for v in b)


def basis_change(b: tuple[int, ...]) -> np.ndarray:
    """Real symmetric matrix taking z-basis amplitudes to basis ``b`` (qubit 0 is the low bit)."""
    w = np.ones((1, 1))
    for v in b:
        w = np.kron(HADAMARD if v else np.eye(2), w)
    return w


def states_in_basis(states: np.ndarray, b: tuple[int, ...]) -> np.ndarray:
    """Probe-state matrix ``W E W`` for Alice preparing (and Bob measuring) in basis ``b``."""
    w = basis_change(b)
    return np.einsum("ik,kld,lj->ijd", w, states, w)


def isometry_columns(states: np.ndarray) -> np.ndarray:
    """Column ``i`` is ``sum_j E[i, j] (x) |j>``, flattened as ``probe * N + j``."""
    N, _, d = states.shape
    return np.transpose(states, (0, 2, 1)).reshape(N, d * N).T


def _set_measurement(psi: np.ndarray, extra: np.ndarray) -> np.ndarray:
    """Square-root measurement for the rows ``psi`` dilated into ``extra`` coordinates.

    Returns vectors ``mu[k]`` with ``<mu_k|psi_i> = (G^{1/2})_{ki}``; directions
    missing from the span of ``psi`` are completed orthonormally along the rows
    of ``extra``, which must be unit vectors orthogonal to every probe state.
    """
    g = psi @ psi.T
    w, v = np.linalg.eigh(0.5 * (g + g.T))
    scale = max(1.0, float(np.abs(w).max()))
    live = w > 1e-12 * scale
    inv_sqrt = (v[:, live] / np.sqrt(w[live])) @ v[:, live].T
    mu = inv_sqrt @ psi
    null = v[:, ~live]
    mu_extra = np.zeros((len(psi), extra.shape[0]))
    mu_extra[:, : null.shape[1]] = null
    return mu + mu_extra @ extra


@dataclass
class RealizedAttack:
    n: int
    states: np.ndarray  # (N, N, probe_dim), z basis
    eve_basis: dict[tuple[int, ...], np.ndarray]  # basis -> (N sets, N outcomes, probe_dim)
    analytic: dict[str, float] = field(default_factory=dict)

    @property
    def isometry(self) -> np.ndarray:
        return isometry_columns(self.states)

    @property
    def probe_dim(self) -> int:
        return self.states.shape[2]


def _realize(n: int, gram: np.ndarray) -> np.ndarray:
    N = 2**n
    vec = realize_gram(gram)
    # room for completing each syndrome set's measurement to a full basis
    padded = np.hstack([vec, np.zeros((N * N, N * N - vec.shape[1]))]) if vec.shape[1] < N * N else vec
    return padded.reshape(N, N, -1)


def _eve_measurement(states_b: np.ndarray, rank_dim: int) -> np.ndarray:
    N, _, d = states_b.shape
    mu = np.zeros((N, N, d))
    used = rank_dim
    for m in range(N):
        psi = np.array([states_b[i, i ^ m] for i in range(N)])
        g = psi @ psi.T
        lam = np.linalg.eigvalsh(0.5 * (g + g.T))
        r = int(np.sum(lam > 1e-12 * max(1.0, float(np.abs(lam).max()))))
        extra = np.zeros((N, d))
        for t in range(N - r):
            extra[t, used + t] = 1.0
        used += N - r
        mu[m] = _set_measurement(psi, extra)
    if used != d:
        raise ConsistencyError(f"measurement dilation used {used} of {d} probe dimensions")
    flat = mu.reshape(N * N, d)
    err = np.abs(flat @ flat.T - np.eye(N * N)).max()
    if err > ORTHO_TOL:
        raise ConsistencyError(f"Eve's measurement basis is not orthonormal (error {err:.2e})")
    return mu


def build_isometry(attack: IncoherentParams | CoherentParams) -> RealizedAttack:
    """Realize a symmetric attack as explicit probe states and Eve measurements."""
    if isinstance(attack, IncoherentParams):
        n, gram = 1, incoherent.gram4(attack)
        analytic = {
            "disturbance": attack.D,
            "bob_success": attack.F,
            "eve_success": incoherent.eve_success(attack),
            "eve_information": incoherent.eve_information(attack),
        }
    elif isinstance(attack, CoherentParams):
        n, gram = 2, coherent.gram16(attack)
        analytic = {
            "disturbance": coherent.disturbance(attack),
            "bob_success": coherent.bob_pair_success(attack),
            "eve_success": coherent.eve_pair_success(attack),
            "eve_information": coherent.eve_pair_information(attack),
        }
    else:
        raise DomainError(f"cannot realize {type(attack).__name__}")
    N = 2**n
    rank = realize_gram(gram).shape[1]
    states = _realize(n, gram)
    cols = isometry_columns(states)
    err = np.abs(cols.T @ cols - np.eye(N)).max()
    if err > ORTHO_TOL:
        raise ConsistencyError(f"isometry columns not orthonormal (error {err:.2e})")
    eve = {b: _eve_measurement(states_in_basis(states, b), rank) for b in bases(n)}
    return RealizedAttack(n, states, eve, {k: float(v) for k, v in analytic.items()})


@dataclass
class SimulationReport:
    n: int
    shots: int
    seed: int
    disturbance: float
    disturbance_se: float
    bob_success: float
    bob_success_se: float
    eve_success: float
    eve_success_se: float
    eve_information: float
    disturbance_by_basis: dict[str, float]
    disturbance_by_bit: dict[str, float]
    eve_success_by_bit: dict[str, float]
    counts_by_basis: dict[str, int]
    counts_by_bit: dict[str, int]
    failure_counts: list[list[int]]
    max_norm_error: float

    def as_flat_dict(self) -> dict[str, float | int]:
        out: dict[str, float | int] = {}
        for key, val in asdict(self).items():
            if isinstance(val, dict):
                for k, v in val.items():
                    out[f"{key}.{k}"] = v
            elif key == "failure_counts":
                for a, row in enumerate(val):
                    for c, v in enumerate(row):
                        out[f"failure_counts.{a}{c}"] = v
            else:
                out[key] = val
        return out


def standard_error(p: float, shots: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / shots)


def joint_distribution(r: RealizedAttack) -> tuple[np.ndarray, float]:
    """Born-rule probabilities ``P[b, i, j, m, k]`` given basis ``b`` and message ``i``.

    Also returns the largest deviation of a joint-state norm from 1.
    """
    N = 2**r.n
    blist = bases(r.n)
    probs = np.zeros((len(blist), N, N, N, N))
    norm_err = 0.0
    for bi, b in enumerate(blist):
        eb = states_in_basis(r.states, b)
        mu = r.eve_basis[b]
        amp = np.einsum("mkd,ijd->ijmk", mu, eb)
        probs[bi] = amp**2
        norms = np.einsum("ijd,ijd->i", eb, eb)
        norm_err = max(norm_err, float(np.abs(norms - 1.0).max()))
    return probs, norm_err


def _plugin_information(joint: np.ndarray) -> float:
    """Mutual information (bits) of a 2-D count table."""
    total = joint.sum()
    if total == 0:
        return 0.0
    p = joint / total
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    nz = p > 0
    return float(np.sum(p[nz] * np.log2(p[nz] / (px @ py)[nz])))


def simulate(r: RealizedAttack, shots: int, seed: int, partitions: int = 1) -> SimulationReport:
    """Sample ``shots`` sifted rounds and aggregate the empirical metrics.

    Each round: Alice draws a uniform message and per-qubit basis, Bob measures
    in Alice's basis, Eve (told the basis) measures the syndrome set and then the
    cartesian basis and guesses the aligned message.
    """
    if shots < 1:
        raise DomainError("shots must be >= 1")
    n, N = r.n, 2**r.n
    blist = bases(n)
    cond, norm_err = joint_distribution(r)
    joint = cond / (len(blist) * N)
    flat = joint.reshape(-1)
    flat = flat / flat.sum()
    counts = np.zeros(flat.size, dtype=np.int64)
    sizes = [shots // partitions + (1 if k < shots % partitions else 0) for k in range(partitions)]
    for k, size in enumerate(sizes):
        rng = np.random.default_rng(np.random.SeedSequence([seed, k]))
        counts += rng.multinomial(size, flat)
    c = counts.reshape(joint.shape)  # (b, i, j, m, k)

    nb = len(blist)
    bi_, i_, j_, m_, k_ = np.meshgrid(
        np.arange(nb), np.arange(N), np.arange(N), np.arange(N), np.arange(N), indexing="ij"
    )
    bit_errors = np.zeros_like(c, dtype=float)
    for q in range(n):
        bit_errors += ((i_ >> q) & 1) != ((j_ >> q) & 1)
    dist = float(np.sum(c * bit_errors) / (n * shots))
    bob = float(np.sum(c[i_ == j_]) / shots)
    eve_hit = k_ == i_
    eve = float(np.sum(c[eve_hit]) / shots)

    by_basis, counts_basis = {}, {}
    for bidx, b in enumerate(blist):
        tot = int(c[bidx].sum())
        counts_basis[basis_label(b)] = tot
        by_basis[basis_label(b)] = float(np.sum(c[bidx] * bit_errors[bidx]) / (n * tot)) if tot else 0.0
    by_bit, eve_by_bit, counts_bit = {}, {}, {}
    for q in range(n):
        for v in (0, 1):
            sel = ((i_ >> q) & 1) == v
            tot = int(c[sel].sum())
            key = f"q{q}={v}"
            counts_bit[key] = tot
            by_bit[key] = float(np.sum(c[sel] * bit_errors[sel]) / (n * tot)) if tot else 0.0
            eve_by_bit[key] = float(np.sum(c[sel & eve_hit]) / tot) if tot else 0.0

    failures = [[0, 0], [0, 0]]
    if n == 2:
        for a in (0, 1):
            for b in (0, 1):
                sel = ((((i_ ^ j_) >> 0) & 1) == a) & ((((i_ ^ j_) >> 1) & 1) == b)
                failures[a][b] = int(c[sel].sum())

    # message vs (basis, set, outcome)
    table = np.transpose(c.sum(axis=2), (1, 0, 2, 3)).reshape(N, -1)
    info = _plugin_information(table)

    return SimulationReport(
        n=n, shots=shots, seed=seed,
        disturbance=dist, disturbance_se=standard_error(dist, shots),
        bob_success=bob, bob_success_se=standard_error(bob, shots),
        eve_success=eve, eve_success_se=standard_error(eve, shots),
        eve_information=info,
        disturbance_by_basis=by_basis, disturbance_by_bit=by_bit,
        eve_success_by_bit=eve_by_bit,
        counts_by_basis=counts_basis, counts_by_bit=counts_bit,
        failure_counts=failures, max_norm_error=norm_err,
    )


def z_scores(report: SimulationReport, analytic: dict[str, float]) -> dict[str, float]:
    """``(empirical - analytic) / standard error`` for each probability metric."""
    out = {}
    for key in ("disturbance", "bob_success", "eve_success"):
        emp = getattr(report, key)
        se = getattr(report, f"{key}_se")
        diff = emp - analytic[key]
        if se > 0:
            out[key] = diff / se
        else:
            out[key] = 0.0 if abs(diff) < 1e-12 else math.copysign(math.inf, diff)
    return out

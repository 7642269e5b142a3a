"""Symmetric two-qubit (coherent) attacks.

Messages are indexed ``i = bit(first qubit) + 2 * bit(second qubit)``. The
probe state ``E[i, j]`` is what Eve holds when Alice sent ``i`` and Bob
receives ``j``. States with different error syndromes ``m = i ^ j`` are
orthogonal; within a syndrome set the overlap ``<E[i, i^m] | E[k, k^m]>``
depends only on ``i ^ k``. Ten real scalars describe the whole Gram matrix::

    A  = <E00|E00>   A1 = <E00|E11>   A2 = <E00|E33>
    B  = <E01|E01>   B1 = <E01|E10>   B2 = <E01|E32>   B3 = <E01|E23>
    C  = <E03|E03>   C1 = <E03|E12>   C2 = <E03|E30>

subject to five linear relations (see :func:`relation_residuals`), leaving
five free parameters. The free chart used here is ``(B, C, A1, B2, C1)``.
"""
from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .errors import DomainError, InfeasibleError
from .incoherent import IncoherentParams
from .quantum import PSD_TOL, shannon_entropy

SCALARS = ("A", "A1", "A2", "B", "B1", "B2", "B3", "C", "C1", "C2")
FREE = ("B", "C", "A1", "B2", "C1")
RELATIONS = (
    "A+2B+C=1",
    "B-C=B3+C1",
    "A-B=A1+B1",
    "A1-A2=B2+B3",
    "B1-C2=B2+C1",
)
RADICAND_TOL = 1e-12
_DEGENERATE = 1e-15


@dataclass(frozen=True)
class CoherentParams:
    A: float
    A1: float
    A2: float
    B: float
    B1: float
    B2: float
    B3: float
    C: float
    C1: float
    C2: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class PyramidSolution:
    a: float
    b: float
    c: float
    d: float

    @property
    def probabilities(self) -> tuple[float, float, float, float]:
        return (self.a**2, self.b**2, self.c**2, self.d**2)

    def matrix(self) -> np.ndarray:
        """Rows are the four states in the cartesian basis; entry ``[i, k]`` is coef ``i ^ k``."""
        coef = (self.a, self.b, self.c, self.d)
        return np.array([[coef[i ^ k] for k in range(4)] for i in range(4)])


@dataclass(frozen=True)
class PairMetrics:
    disturbance: float
    eve_pair_success: float
    eve_pair_information: float
    bob_pair_success: float


def relation_residuals(p: CoherentParams) -> tuple[float, ...]:
    """Signed residuals ``lhs - rhs`` of the five linear relations, in order."""
    return (
        p.A + 2 * p.B + p.C - 1.0,
        (p.B - p.C) - (p.B3 + p.C1),
        (p.A - p.B) - (p.A1 + p.B1),
        (p.A1 - p.A2) - (p.B2 + p.B3),
        (p.B1 - p.C2) - (p.B2 + p.C1),
    )


def set_weights(p: CoherentParams) -> tuple[float, float, float, float]:
    """Probabilities of the syndrome sets S0..S3."""
    return (p.A, p.B, p.B, p.C)


def set_correlations(p: CoherentParams) -> tuple[tuple[float, float, float], ...]:
    """Unnormalized in-set overlaps ``G_m(delta)`` for ``delta = 1, 2, 3`` (``delta = i ^ k``)."""
    return (
        (p.A1, p.A1, p.A2),
        (p.B1, p.B3, p.B2),
        (p.B3, p.B1, p.B2),
        (p.C1, p.C1, p.C2),
    )


def block_eigenvalues(p: CoherentParams) -> np.ndarray:
    """Eigenvalues of the four in-set 4x4 Gram blocks, shape ``(4, 4)``.

    Each block is a group matrix over Z2 x Z2, diagonalized by the Hadamard
    transform: ``lam[m, s] = sum_delta (-1)^{popcount(s & delta)} G_m(delta)``.
    """
    out = np.empty((4, 4))
    for m, (w, corr) in enumerate(zip(set_weights(p), set_correlations(p))):
        g = (w,) + corr
        for s in range(4):
            out[m, s] = sum((-1) ** bin(s & delta).count("1") * g[delta] for delta in range(4))
    return out


def feasibility_violation(p: CoherentParams) -> float:
    """Total magnitude of negative set weights and negative block eigenvalues."""
    lam = block_eigenvalues(p)
    neg_w = sum(max(0.0, -w) for w in (p.A, p.B, p.C))
    return neg_w + float(np.sum(np.clip(-lam, 0.0, None)))


def check_feasible(p: CoherentParams, tol: float = PSD_TOL) -> None:
    """Raise :class:`InfeasibleError` naming the first violated constraint."""
    for name, w in (("A", p.A), ("B", p.B), ("C", p.C)):
        if w < -tol:
            raise InfeasibleError(f"negative set probability {name} = {w:.6g}")
    lam = block_eigenvalues(p)
    for m in range(4):
        if lam[m].min() < -tol:
            raise InfeasibleError(
                f"Gram block of syndrome set S{m} is not PSD "
                f"(min eigenvalue {lam[m].min():.6g})"
            )


def from_free(B: float, C: float, A1: float, B2: float, C1: float) -> CoherentParams:
    """Solve the remaining five scalars from the free chart and validate the result."""
    A = 1.0 - 2.0 * B - C
    B3 = B - C - C1
    B1 = A - B - A1
    A2 = A1 - B2 - B3
    C2 = B1 - B2 - C1
    p = CoherentParams(A, A1, A2, B, B1, B2, B3, C, C1, C2)
    check_feasible(p)
    return p


def from_scalars(values: dict[str, float], tol: float = 1e-9) -> CoherentParams:
    """Build from all ten named scalars, checking every relation and feasibility."""
    missing = [k for k in SCALARS if k not in values]
    if missing:
        raise DomainError(f"missing coherent parameters: {', '.join(missing)}")
    p = CoherentParams(**{k: float(values[k]) for k in SCALARS})
    for idx, r in enumerate(relation_residuals(p), start=1):
        if abs(r) > tol:
            raise InfeasibleError(
                f"relation {idx} ({RELATIONS[idx - 1]}) violated, residual {r:.6g}"
            )
    check_feasible(p)
    return p


def free_chart(p: CoherentParams) -> tuple[float, float, float, float, float]:
    return (p.B, p.C, p.A1, p.B2, p.C1)


def disturbance(p: CoherentParams) -> float:
    """Per-qubit probability that Bob's bit differs from Alice's."""
    return 1.0 - (p.A + p.B)


def set_overlaps(p: CoherentParams) -> list[tuple[float, float, float] | None]:
    """Normalized overlap triples ``(k1, k2, k3)`` for each syndrome set.

    ``k1``, ``k2``, ``k3`` are the overlaps at index distance ``i ^ k`` of 1, 3
    and 2 respectively, which is the argument order of :func:`pyramid_solve`.
    Sets of zero probability are returned as ``None``.
    """
    out = []
    for w, (g1, g2, g3) in zip(set_weights(p), set_correlations(p)):
        out.append(None if w <= _DEGENERATE else (g1 / w, g3 / w, g2 / w))
    return out


def pyramid_solve(k1: float, k2: float, k3: float, tol: float = RADICAND_TOL) -> PyramidSolution:
    """Coefficients of four pyramid states in their optimal measurement basis.

    Solves ``a^2+b^2+c^2+d^2 = 1``, ``2(ab+cd) = k1``, ``2(ad+bc) = k2``,
    ``2(ac+bd) = k3`` with ``a`` the largest coefficient, via the 4-point
    Hadamard transform of the overlap function.
    """
    rad = (
        1.0 + k1 + k2 + k3,
        1.0 + k1 - k2 - k3,
        1.0 - k1 + k2 - k3,
        1.0 - k1 - k2 + k3,
    )
    if min(rad) < -tol:
        raise InfeasibleError(
            f"no four states have overlaps ({k1:.6g}, {k2:.6g}, {k3:.6g}); "
            f"radicand {min(rad):.3e}"
        )
    u0, u1, u2, u3 = (math.sqrt(max(r, 0.0)) for r in rad)
    return PyramidSolution(
        a=(u0 + u1 + u2 + u3) / 4,
        b=(u0 + u1 - u2 - u3) / 4,
        c=(u0 - u1 - u2 + u3) / 4,
        d=(u0 - u1 + u2 - u3) / 4,
    )


def set_solutions(p: CoherentParams) -> list[tuple[float, PyramidSolution | None]]:
    """``(weight, pyramid)`` per syndrome set; degenerate sets carry ``None``."""
    out = []
    for w, k in zip(set_weights(p), set_overlaps(p)):
        if k is None:
            out.append((w, None))
        else:
            # radicands scale with 1/w, so the absolute PSD tolerance is relaxed accordingly
            out.append((w, pyramid_solve(*k, tol=max(RADICAND_TOL, PSD_TOL / w))))
    return out


def eve_pair_success(p: CoherentParams) -> float:
    """Probability that Eve identifies both qubits.

    Absolute accuracy is about ``sqrt(eps * w)`` when a block eigenvalue of a set
    with weight ``w`` sits at the rounding floor (overlaps within ~1e-8 of +-1).
    """
    return sum(w * sol.a**2 for w, sol in set_solutions(p) if sol is not None)


def eve_pair_information(p: CoherentParams) -> float:
    """Mutual information (bits, out of 2) between Alice's pair and Eve's outcome."""
    total = 0.0
    for w, sol in set_solutions(p):
        if sol is None:
            continue
        probs = np.array(sol.probabilities)
        total += w * (2.0 - shannon_entropy(probs / probs.sum()))
    return total


def bob_pair_success(p: CoherentParams) -> float:
    return p.A


def pair_metrics(p: CoherentParams) -> PairMetrics:
    return PairMetrics(disturbance(p), eve_pair_success(p), eve_pair_information(p), bob_pair_success(p))


def product_embedding(q: IncoherentParams) -> CoherentParams:
    """Two independent copies of a single-qubit attack, as a coherent attack."""
    F, F1, D, D1 = q.F, q.F1, q.D, q.D1
    return CoherentParams(
        A=F * F, A1=F * F1, A2=F1 * F1,
        B=F * D, B1=F * D1, B2=F1 * D1, B3=F1 * D,
        C=D * D, C1=D * D1, C2=D1 * D1,
    )


def identity_attack() -> CoherentParams:
    return from_free(0.0, 0.0, 1.0, 0.0, 0.0)


def gram16(p: CoherentParams) -> np.ndarray:
    """Gram matrix of the sixteen probe states, flat index ``4 * i + j``."""
    weights = set_weights(p)
    corr = set_correlations(p)
    g = np.zeros((16, 16))
    for i in range(4):
        for j in range(4):
            m = i ^ j
            for k in range(4):
                delta = i ^ k
                val = weights[m] if delta == 0 else corr[m][delta - 1]
                g[4 * i + j, 4 * k + (k ^ m)] = val
    return g


def as_tuple(p: CoherentParams) -> tuple[float, ...]:
    return astuple(p)

"""Symmetric single-qubit (incoherent) attacks.

A symmetric attack on one qubit is fixed by two numbers: the disturbance ``D``
and the overlap ``D1 = <E01|E10>`` of the probe states left behind when Bob
receives the wrong bit. Everything else follows from normalization and the
bit/basis symmetries::

    F = 1 - D,   F1 = F - D - D1,   cos(alpha) = F1 / F,   cos(beta) = D1 / D

Eve first learns (deterministically) whether Bob's bit is right or wrong and
then discriminates two pure states with overlap ``cos(alpha)`` or
``cos(beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleError
from .quantum import binary_entropy

_EPS = 1e-12


def helstrom(cos_overlap: float) -> float:
    """Success probability for two equiprobable pure states with the given overlap."""
    s2 = max(0.0, 1.0 - cos_overlap * cos_overlap)
    return 0.5 * (1.0 + math.sqrt(s2))


@dataclass(frozen=True)
class IncoherentParams:
    D: float
    D1: float
    F: float = field(init=False)
    F1: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "F", 1.0 - self.D)
        object.__setattr__(self, "F1", self.F - self.D - self.D1)

    @property
    def cos_alpha(self) -> float:
        return self.F1 / self.F if self.F > 0 else 0.0

    @property
    def cos_beta(self) -> float | None:
        """``D1/D``; ``None`` when ``D == 0`` (the wrong-bit set never occurs)."""
        return self.D1 / self.D if self.D > 0 else None


@dataclass(frozen=True)
class AttackMetrics:
    disturbance: float
    eve_information: float
    eve_success: float
    bob_information: float
    bob_success: float


def new_params(D: float, D1: float) -> IncoherentParams:
    """Build a feasible symmetric attack from ``(D, D1)``.

    Raises:
        DomainError: if ``D`` is not a probability.
        InfeasibleError: if the 4x4 Gram matrix would not be PSD.
    """
    if not 0.0 <= D <= 1.0:
        raise DomainError(f"disturbance must lie in [0, 1], got {D!r}")
    p = IncoherentParams(D, D1)
    if abs(p.D1) > p.D + _EPS:
        raise InfeasibleError(f"|D1| = {abs(D1):.6g} exceeds D = {D:.6g}")
    if abs(p.F1) > p.F + _EPS:
        raise InfeasibleError(f"|F1| = {abs(p.F1):.6g} exceeds F = {p.F:.6g}")
    return p


def _p_alpha(p: IncoherentParams) -> float:
    return helstrom(p.cos_alpha)


def _p_beta(p: IncoherentParams) -> float:
    cb = p.cos_beta
    return 0.5 if cb is None else helstrom(cb)


def eve_information(p: IncoherentParams) -> float:
    """Mutual information (bits) between Alice's bit and Eve's optimal outcome."""
    info = 1.0 - p.F * binary_entropy(_p_alpha(p))
    if p.D > 0:
        info -= p.D * binary_entropy(_p_beta(p))
    return info


def eve_success(p: IncoherentParams) -> float:
    """Probability that Eve guesses Alice's bit."""
    return p.F * _p_alpha(p) + p.D * _p_beta(p)


def bob_metrics(D: float) -> tuple[float, float]:
    """Bob's information (bits) and success probability on sifted bits."""
    if not 0.0 <= D <= 1.0:
        raise DomainError(f"disturbance must lie in [0, 1], got {D!r}")
    return 1.0 - binary_entropy(D), 1.0 - D


def optimal_attack(D: float) -> IncoherentParams:
    """The attack with ``cos(alpha) = cos(beta) = 1 - 2D``.

    It maximizes both Eve's information and her success probability at fixed
    disturbance.
    """
    if not 0.0 <= D <= 0.5:
        raise DomainError(f"optimal attack defined for D in [0, 1/2], got {D!r}")
    return new_params(D, D * (1.0 - 2.0 * D))


def metrics(p: IncoherentParams) -> AttackMetrics:
    ib, pb = bob_metrics(p.D)
    return AttackMetrics(p.D, eve_information(p), eve_success(p), ib, pb)


def gram4(p: IncoherentParams) -> np.ndarray:
    """Gram matrix of the probe states ordered ``(E00, E01, E10, E11)``."""
    g = np.diag([p.F, p.D, p.D, p.F])
    g[0, 3] = g[3, 0] = p.F1
    g[1, 2] = g[2, 1] = p.D1
    return g


def chsh_parameter(cos_alpha: float) -> float:
    """CHSH value ``2*sqrt(2)*cos(alpha)`` of the Alice-Bob correlations."""
    if abs(cos_alpha) > 1.0 + _EPS:
        raise DomainError(f"|cos(alpha)| must not exceed 1, got {cos_alpha!r}")
    return 2.0 * math.sqrt(2.0) * cos_alpha


def crossing_disturbance() -> float:
    """Disturbance at which Eve's optimal information equals Bob's."""
    return 0.5 * (1.0 - 1.0 / math.sqrt(2.0))


def small_d_slope(D: float = 1e-4) -> float:
    """Empirical slope ``I_e_opt(D) / D`` near zero disturbance.

    Tends to ``2 / ln 2`` (about 2.885 bits per unit disturbance).
    """
    return eve_information(optimal_attack(D)) / D

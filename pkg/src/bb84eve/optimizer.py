"""Maximization of Eve's pair success / pair information at fixed disturbance.

With the disturbance fixed, ``C = D - B`` and the free chart reduces to
``x = (B, A1, B2, C1)``. The search is a multi-start Nelder-Mead over ``x``
with a linear penalty on the PSD violation of the four syndrome blocks.
Start 0 is always the product of two optimal incoherent attacks, the others
are seeded random feasible points.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from . import coherent, incoherent
from .coherent import CoherentParams
from .errors import DomainError, InfeasibleError, OptimizationError
from .quantum import PSD_TOL, is_psd

OBJECTIVES = ("success", "information")


@dataclass(frozen=True)
class OptimizationOptions:
    restarts: int = 32
    max_iterations: int = 2000
    seed: int = 0
    feasibility_penalty: float = 1e3
    convergence_tol: float = 1e-8
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if self.convergence_tol <= 0 or self.feasibility_penalty <= 0:
            raise DomainError("tolerances must be positive")


@dataclass
class CurvePoint:
    D: float
    P1: float
    P2: float | None
    I1: float
    I2: float | None
    Pb1: float
    Pb2: float | None
    relative_gain: float | None
    error: str = ""
    flags: str = ""


def _chart(D: float, x) -> tuple[float, ...]:
    B, A1, B2, C1 = x
    return (B, D - B, A1, B2, C1)


def _lambdas(D: float, x) -> tuple[tuple[float, ...], float]:
    """Block eigenvalues (S0, S1, S3; S2 equals S1) and the weight violation."""
    B, A1, B2, C1 = x
    C = D - B
    A = 1.0 - B - D
    B3 = B - C - C1
    B1 = A - B - A1
    A2 = A1 - B2 - B3
    C2 = B1 - B2 - C1
    lam0 = (A + 2 * A1 + A2, A - A2, A - A2, A - 2 * A1 + A2)
    lam1 = (B + B1 + B3 + B2, B - B1 + B3 - B2, B + B1 - B3 - B2, B - B1 - B3 + B2)
    lam3 = (C + 2 * C1 + C2, C - C2, C - C2, C - 2 * C1 + C2)
    weight_violation = max(0.0, -A) + max(0.0, -B) + max(0.0, -C)
    return (lam0, lam1, lam3), weight_violation


def _success(blocks) -> float:
    lam0, lam1, lam3 = blocks
    sq = lambda lam: sum(math.sqrt(v) if v > 0 else 0.0 for v in lam) ** 2  # noqa: E731
    return (sq(lam0) + 2 * sq(lam1) + sq(lam3)) / 16.0


def _set_information(lam) -> float:
    # weight * (2 - H(c^2)) with sqrt(weight) * c_x = (1/4) sum_s (-1)^{s.x} sqrt(lam_s)
    r = [math.sqrt(v) if v > 0 else 0.0 for v in lam]
    w = sum(v * v for v in r) / 4.0
    if w <= 0.0:
        return 0.0
    gam = (
        (r[0] + r[1] + r[2] + r[3]) / 4,
        (r[0] - r[1] + r[2] - r[3]) / 4,
        (r[0] + r[1] - r[2] - r[3]) / 4,
        (r[0] - r[1] - r[2] + r[3]) / 4,
    )
    total = 2.0 * w
    for g in gam:
        g2 = g * g
        if g2 > 0.0:
            total += g2 * math.log2(g2 / w)
    return total


def _information(blocks) -> float:
    lam0, lam1, lam3 = blocks
    return _set_information(lam0) + 2 * _set_information(lam1) + _set_information(lam3)


_OBJECTIVE_FN = {"success": _success, "information": _information}


def _violation(blocks, weight_violation: float) -> float:
    return weight_violation + sum(max(0.0, -v) for lam in blocks for v in lam)


def penalized_objective(x, D: float, objective: str, penalty: float) -> float:
    """Negated objective plus ``penalty * violation`` (for minimization)."""
    blocks, wv = _lambdas(D, x)
    return -_OBJECTIVE_FN[objective](blocks) + penalty * _violation(blocks, wv)


def _restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, index]))


def _random_feasible_start(D: float, rng: np.random.Generator, x_product) -> np.ndarray:
    for _ in range(200):
        B = rng.uniform(0.0, D)
        C = D - B
        A = 1.0 - B - D
        x = np.array([B, rng.uniform(-A, A), rng.uniform(-B, B), rng.uniform(-C, C)])
        blocks, wv = _lambdas(D, x)
        if _violation(blocks, wv) == 0.0:
            return x
    # fall back to a shrinking perturbation around the product attack
    scale = max(D, 1e-3)
    for _ in range(200):
        x = np.asarray(x_product) + rng.normal(0.0, scale, 4)
        x[0] = min(max(x[0], 0.0), D)
        blocks, wv = _lambdas(D, x)
        if _violation(blocks, wv) == 0.0:
            return x
        scale *= 0.7
    return np.asarray(x_product, dtype=float)


def _initial_simplex(x0: np.ndarray, D: float) -> np.ndarray:
    step = 0.05 * max(D, 1e-3)
    simplex = np.tile(x0, (5, 1))
    for k in range(4):
        simplex[k + 1, k] += step if k != 0 or x0[0] + step <= D else -step
    return simplex


def _run_restart(D: float, objective: str, opts: OptimizationOptions, index: int, x_product):
    x0 = np.asarray(x_product, dtype=float) if index == 0 else _random_feasible_start(
        D, _restart_rng(opts.seed, index), x_product
    )
    fun = penalized_objective
    args = (D, objective, opts.feasibility_penalty)
    best_x, best_f = x0, fun(x0, *args)
    x = x0
    # a second pass from the first optimum refreshes a collapsed simplex
    for _ in range(2):
        res = minimize(
            fun, x, args=args, method="Nelder-Mead",
            options={
                "initial_simplex": _initial_simplex(x, D),
                "maxiter": opts.max_iterations,
                "xatol": opts.convergence_tol,
                "fatol": opts.convergence_tol,
            },
        )
        x = res.x
        blocks, wv = _lambdas(D, x)
        if _violation(blocks, wv) <= PSD_TOL and res.fun < best_f:
            best_x, best_f = x, res.fun
    return best_x


def _evaluate(p: CoherentParams, objective: str) -> float:
    if objective == "success":
        return coherent.eve_pair_success(p)
    return coherent.eve_pair_information(p)


def _maximize(D: float, objective: str, opts: OptimizationOptions) -> tuple[CoherentParams, float]:
    if objective not in OBJECTIVES:
        raise DomainError(f"unknown objective {objective!r}")
    if not 0.0 <= D <= 0.5:
        raise DomainError(f"disturbance must lie in [0, 1/2], got {D!r}")
    product = coherent.product_embedding(incoherent.optimal_attack(D))
    B, _, A1, B2, C1 = coherent.free_chart(product)
    x_product = (B, A1, B2, C1)

    indices = range(opts.restarts)
    if opts.workers > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as pool:
            xs = list(pool.map(lambda k: _run_restart(D, objective, opts, k, x_product), indices))
    else:
        xs = [_run_restart(D, objective, opts, k, x_product) for k in indices]

    best: tuple[CoherentParams, float] | None = None
    failures = []
    # candidates are scanned in restart order so ties resolve identically on every schedule
    for k, x in enumerate(xs):
        try:
            p = coherent.from_free(*_chart(D, x))
        except InfeasibleError as exc:
            failures.append(f"restart {k}: {exc}")
            continue
        if not is_psd(coherent.gram16(p), PSD_TOL):
            failures.append(f"restart {k}: gram16 not PSD")
            continue
        val = _evaluate(p, objective)
        if best is None or val > best[1]:
            best = (p, val)
    if best is None:
        raise OptimizationError(f"no feasible point at D={D}: " + "; ".join(failures[:5]))
    return best


def maximize_pair_success(D: float, opts: OptimizationOptions | None = None):
    """Best coherent attack for guessing both qubits; returns ``(params, P2)``."""
    return _maximize(D, "success", opts or OptimizationOptions())


def maximize_pair_information(D: float, opts: OptimizationOptions | None = None):
    """Best coherent attack for pair information; returns ``(params, I2)``."""
    return _maximize(D, "information", opts or OptimizationOptions())


def disturbance_grid(D_min: float, D_max: float, steps: int) -> list[float]:
    if steps == 1:
        if D_min != D_max:
            raise DomainError("a single-step grid needs D_min == D_max")
        return [float(D_min)]
    if steps < 2 or not 0.0 <= D_min < D_max <= 0.5:
        raise DomainError(f"need 0 <= D_min < D_max <= 0.5 and steps >= 2, got ({D_min}, {D_max}, {steps})")
    return [float(v) for v in np.linspace(D_min, D_max, steps)]


def sweep_curves(
    D_min: float,
    D_max: float,
    steps: int,
    opts: OptimizationOptions | None = None,
    objectives: tuple[str, ...] = OBJECTIVES,
) -> list[CurvePoint]:
    """Incoherent baselines and coherent optima on an evenly spaced disturbance grid."""
    opts = opts or OptimizationOptions()
    points = []
    for D in disturbance_grid(D_min, D_max, steps):
        single = incoherent.optimal_attack(D)
        P1 = incoherent.eve_success(single) ** 2
        I1 = 2.0 * incoherent.eve_information(single)
        Pb1 = (1.0 - D) ** 2
        pt = CurvePoint(D, P1, None, I1, None, Pb1, None, None)
        errors = []
        if "success" in objectives:
            try:
                p, P2 = maximize_pair_success(D, opts)
                pt = replace(pt, P2=P2, Pb2=coherent.bob_pair_success(p),
                             relative_gain=(P2 - P1) / P1)
            except OptimizationError as exc:
                errors.append(str(exc))
        if "information" in objectives:
            try:
                _, I2 = maximize_pair_information(D, opts)
                pt = replace(pt, I2=I2)
            except OptimizationError as exc:
                errors.append(str(exc))
        pt.error = "; ".join(errors)
        points.append(pt)
    _flag_monotonicity(points, opts.convergence_tol)
    return points


def _flag_monotonicity(points: list[CurvePoint], tol: float) -> None:
    prev = None
    for pt in points:
        if pt.P2 is None:
            continue
        if prev is not None and pt.P2 < prev - tol:
            pt.flags = "P2-decreasing"
        prev = pt.P2

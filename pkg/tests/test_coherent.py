import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.linalg import sqrtm

from bb84eve import coherent as coh
from bb84eve import incoherent as inc
from bb84eve.errors import DomainError, InfeasibleError
from bb84eve.quantum import is_psd, realize_gram

A_SPEC = 0.93301270189221932338  # (1 + sqrt(3)/2)/2, mpmath
D_SPEC = 0.06698729810778067662


def random_feasible(rng, tries=10_000):
    for _ in range(tries):
        B, C = rng.uniform(0, 0.5, 2)
        A = 1 - 2 * B - C
        if A < 0:
            continue
        A1, B2, C1 = rng.uniform(-A, A), rng.uniform(-B, B), rng.uniform(-C, C)
        try:
            return coh.from_free(B, C, A1, B2, C1)
        except InfeasibleError:
            continue
    raise RuntimeError("sampler failed")


def _kron_gram(q):
    # G[4i+j, 4k+l] = g1[(i0,j0),(k0,l0)] * g1[(i1,j1),(k1,l1)], with g1 indexed 2*i+j
    g1 = inc.gram4(q)
    g = np.zeros((16, 16))
    for i in range(4):
        for j in range(4):
            for k in range(4):
                for l in range(4):
                    a = g1[2 * (i & 1) + (j & 1), 2 * (k & 1) + (l & 1)]
                    b = g1[2 * (i >> 1) + (j >> 1), 2 * (k >> 1) + (l >> 1)]
                    g[4 * i + j, 4 * k + l] = a * b
    return g


def _set_vectors(p, m):
    """Unit-normalized probe states of syndrome set m, realized from the 16x16 Gram matrix."""
    rows = realize_gram(coh.gram16(p))
    v = np.array([rows[4 * i + (i ^ m)] for i in range(4)])
    w = float(v[0] @ v[0])
    return v / math.sqrt(w), w


def test_pyramid_reference_case():
    sol = coh.pyramid_solve(0.5, 0.25, 0.5)
    assert sol.a == pytest.approx(A_SPEC, abs=1e-14)
    assert (sol.b, sol.c) == pytest.approx((0.25, 0.25), abs=1e-14)
    assert sol.d == pytest.approx(D_SPEC, abs=1e-14)


def _group_gram(k1, k2, k3):
    f = (1.0, k1, k3, k2)  # overlap at index distance 0, 1, 2, 3
    return np.array([[f[i ^ k] for k in range(4)] for i in range(4)])


@given(st.integers(0, 2**32 - 1))
def test_pyramid_matches_matrix_square_root(seed):
    # the square-root of the group Gram matrix holds the coefficients at entry [i, i ^ k]
    rng = np.random.default_rng(seed)
    u = rng.dirichlet(np.ones(4)) * 4  # nonnegative radicands summing to 4
    k1 = (u[0] + u[1] - u[2] - u[3]) / 4
    k2 = (u[0] - u[1] + u[2] - u[3]) / 4
    k3 = (u[0] - u[1] - u[2] + u[3]) / 4
    sol = coh.pyramid_solve(k1, k2, k3)
    root = np.real(sqrtm(_group_gram(k1, k2, k3)))
    assert np.allclose(sol.matrix(), root, atol=1e-7)
    assert np.allclose(sol.matrix() @ sol.matrix().T, _group_gram(k1, k2, k3), atol=1e-12)
    assert sol.a >= max(sol.b, sol.c, sol.d) - 1e-15


def test_pyramid_infeasible():
    with pytest.raises(InfeasibleError):
        coh.pyramid_solve(0.9, -0.9, 0.9)


def test_relations_and_from_free():
    chart = coh.free_chart(coh.product_embedding(inc.optimal_attack(0.06)))
    p = coh.from_free(*chart)
    assert np.abs(coh.relation_residuals(p)).max() <= 1e-15
    assert coh.free_chart(p) == pytest.approx(chart)
    assert coh.disturbance(p) == pytest.approx(0.06, abs=1e-15)


def test_from_scalars_reports_relation():
    vals = coh.product_embedding(inc.optimal_attack(0.2)).as_dict()
    assert coh.from_scalars(vals) == coh.CoherentParams(**vals)
    vals["B3"] += 1e-3
    with pytest.raises(InfeasibleError, match="relation 2"):
        coh.from_scalars(vals)
    del vals["C2"]
    with pytest.raises(DomainError, match="C2"):
        coh.from_scalars(vals)


def test_infeasible_messages():
    with pytest.raises(InfeasibleError, match="negative set probability"):
        coh.from_free(0.6, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(InfeasibleError, match="S0 is not PSD"):
        coh.from_free(0.05, 0.01, 0.95, 0.0, 0.0)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_product_embedding_is_tensor_product(D, t):
    q = inc.new_params(D, -D + t * (min(D, 2 - 3 * D) + D))
    p = coh.product_embedding(q)
    assert np.abs(coh.relation_residuals(p)).max() <= 1e-12
    assert np.allclose(coh.gram16(p), _kron_gram(q), atol=1e-12)
    assert coh.disturbance(p) == pytest.approx(D, abs=1e-12)


def well_conditioned(p, floor=1e-8):
    # block eigenvalues near the rounding floor make sqrt amplify ~1e-17 input error to ~1e-9
    lam = coh.block_eigenvalues(p)
    return all(w <= 1e-12 or lam[m].min() >= floor * w for m, w in enumerate(coh.set_weights(p)))


@given(st.floats(0.0, 0.5), st.floats(0.0, 1.0))
def test_product_pair_metrics(D, t):
    q = inc.new_params(D, -D + t * 2 * D)
    p = coh.product_embedding(q)
    assume(well_conditioned(p))
    assert coh.eve_pair_success(p) == pytest.approx(inc.eve_success(q) ** 2, abs=1e-10)
    assert coh.eve_pair_information(p) == pytest.approx(2 * inc.eve_information(q), abs=1e-10)
    assert coh.bob_pair_success(p) == pytest.approx((1 - D) ** 2, abs=1e-12)


def test_gram16_structure(rng):
    for _ in range(20):
        p = random_feasible(rng)
        g = coh.gram16(p)
        assert np.allclose(g, g.T)
        assert is_psd(g)
        # different syndrome sets are orthogonal
        for a in range(16):
            for b in range(16):
                if (a // 4) ^ (a % 4) != (b // 4) ^ (b % 4):
                    assert g[a, b] == 0.0
        assert np.trace(g) == pytest.approx(4.0)


def test_block_eigenvalues_match_numeric(rng):
    for _ in range(20):
        p = random_feasible(rng)
        g = coh.gram16(p)
        lam = coh.block_eigenvalues(p)
        for m in range(4):
            idx = [4 * i + (i ^ m) for i in range(4)]
            assert np.sort(lam[m]) == pytest.approx(np.linalg.eigvalsh(g[np.ix_(idx, idx)]), abs=1e-12)


def test_pair_success_matches_square_root_measurement(rng):
    # independent route: realize the 16 states, apply the square-root measurement per set
    for _ in range(20):
        p = random_feasible(rng)
        total = 0.0
        for m, (w, _) in enumerate(coh.set_solutions(p)):
            if w <= 1e-12:
                continue
            v, _ = _set_vectors(p, m)
            root = np.real(sqrtm(v @ v.T))
            total += w * float(np.sum(np.diag(root) ** 2)) / 4
        assert coh.eve_pair_success(p) == pytest.approx(total, abs=1e-7)


def test_pair_success_is_optimal_discrimination(rng):
    cp = pytest.importorskip("cvxpy")
    for _ in range(4):
        p = random_feasible(rng)
        total = 0.0
        for m, (w, _) in enumerate(coh.set_solutions(p)):
            if w <= 1e-9:
                continue
            v, _ = _set_vectors(p, m)
            dim = v.shape[1]
            rhos = [np.outer(x, x) for x in v]
            povm = [cp.Variable((dim, dim), symmetric=True) for _ in range(4)]
            cons = [P >> 0 for P in povm] + [sum(povm) == np.eye(dim)]
            prob = cp.Problem(cp.Maximize(sum(cp.trace(P @ r) for P, r in zip(povm, rhos)) / 4), cons)
            prob.solve(solver="CLARABEL")
            total += w * prob.value
        assert coh.eve_pair_success(p) == pytest.approx(total, abs=1e-6)


def test_identity_attack():
    p = coh.identity_attack()
    m = coh.pair_metrics(p)
    assert m.disturbance == 0.0
    assert m.eve_pair_success == pytest.approx(0.25)
    assert m.eve_pair_information == pytest.approx(0.0, abs=1e-12)
    assert m.bob_pair_success == 1.0


def test_set_overlaps_degenerate_sets():
    p = coh.product_embedding(inc.optimal_attack(0.0))
    ov = coh.set_overlaps(p)
    assert ov[0] == pytest.approx((1.0, 1.0, 1.0))
    assert ov[1] is None and ov[2] is None and ov[3] is None


def test_as_tuple_order():
    p = coh.product_embedding(inc.optimal_attack(0.1))
    assert coh.as_tuple(p) == tuple(p.as_dict()[k] for k in coh.SCALARS)

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bb84eve import incoherent as inc
from bb84eve import oracle
from bb84eve import symmetrizer as sym
from bb84eve.errors import ConsistencyError, DomainError


def full_space_metrics(a):
    """Averaged metrics from the isometry matrix and Kronecker-product projectors."""
    N, n = a.N, a.n
    V = oracle.isometry_columns(a.states)  # (d * N, N), index probe * N + j
    dist = succ = info = 0.0
    for b in oracle.bases(n):
        W = oracle.basis_change(b)
        vec, guesses = a.measurement[b]
        amp = np.kron(vec, W.T) @ V @ W  # rows (o, j), columns i
        P = (amp**2).reshape(vec.shape[0], N, N)  # (o, j, i)
        for i in range(N):
            for j in range(N):
                dist += P[:, j, i].sum() * bin(i ^ j).count("1") / n
            succ += P[np.asarray(guesses) == i, :, i].sum()
        joint = P.sum(axis=1).T / N  # (i, o)
        px, po = joint.sum(axis=1), joint.sum(axis=0)
        nz = joint > 0
        info += np.sum(joint[nz] * np.log2(joint[nz] / np.outer(px, po)[nz]))
    k = len(oracle.bases(n))
    return {"disturbance": dist / (k * N), "eve_success": succ / (k * N), "eve_information": info / k}


def _metrics(a):
    return {m: sym.averaged_metric(a, m) for m in sym.METRICS}


def test_z_copy_reference_values():
    got = _metrics(sym.z_copy_attack())
    assert got == pytest.approx({"disturbance": 0.25, "eve_success": 0.75, "eve_information": 0.5}, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2])
def test_metrics_match_full_space_route(n, rng):
    for _ in range(5):
        a = sym.random_attack(n, 3, rng)
        a.validate()
        expected = full_space_metrics(a)
        for m, v in _metrics(a).items():
            assert v == pytest.approx(expected[m], abs=1e-12), m


@pytest.mark.parametrize("D", [0.1, 0.25])
def test_realized_symmetric_attack(D):
    r = oracle.build_isometry(inc.optimal_attack(D))
    a = sym.from_realized(r)
    a.validate()
    got = _metrics(a)
    for m in sym.METRICS:
        assert got[m] == pytest.approx(r.analytic[m], abs=1e-10)
    assert all(sym.is_symmetric(a, t) for t in sym.generators(1))
    # every one of Alice's four states sees the same disturbance and success
    per = sym.per_state_metrics(a)
    assert np.ptp([v["disturbance"] for v in per.values()]) < 1e-12
    assert np.ptp([v["eve_success"] for v in per.values()]) < 1e-12


@settings(max_examples=25)
@given(st.integers(1, 2), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_step_preserves_metrics_and_symmetrizes(n, d, seed):
    a = sym.random_attack(n, d, np.random.default_rng(seed))
    before = _metrics(a)
    for t in sym.generators(n):
        s = sym.symmetrize_step(a, t)
        s.validate()
        assert s.probe_dim == 2 * d
        assert sym.is_symmetric(s, t)
        for m, v in _metrics(s).items():
            assert v == pytest.approx(before[m], abs=1e-10)


@pytest.mark.parametrize("n", [1, 2])
def test_full_symmetrization(n, rng):
    a = sym.random_attack(n, 2, rng)
    s = sym.symmetrize_full(a)
    s.validate()
    assert s.probe_dim == 2 * 2 ** len(sym.symmetrization_chain(n))
    for t in sym.generators(n):
        assert sym.is_symmetric(s, t)
    for m, v in _metrics(s).items():
        assert v == pytest.approx(_metrics(a)[m], abs=1e-10)


def test_generator_only_chain_is_not_enough(rng):
    a = sym.random_attack(1, 2, rng)
    for t in sym.generators(1):
        a = sym.symmetrize_step(a, t)
    assert not all(sym.is_symmetric(a, t) for t in sym.generators(1))


@pytest.mark.parametrize("n, order", [(1, 8), (2, 128)])
def test_chain_enumerates_group(n, order):
    group = sym.group_elements(sym.generators(n))
    assert len(group) == order
    chain = sym.symmetrization_chain(n)
    products = []
    for picks in itertools.product((False, True), repeat=len(chain)):
        g = np.eye(2**n)
        for t, used in zip(chain, picks):
            if used:
                g = t.matrix @ g
        products.append(g)
    for g in group:
        assert sum(sym._same_up_to_sign(g, h) for h in products) == 1


def test_state_actions():
    h = sym.basis_swap(0, 1)
    assert h.basis_image((0,)) == (1,)
    assert h.message_map((0,)) == [0, 1]
    x = sym.bit_flip(0, 1)
    assert x.basis_image((0,)) == (0,) and x.message_map((0,)) == [1, 0]
    assert x.message_map((1,)) == [0, 1]  # |+> -> |+>, |-> -> -|->
    assert x.state_action[((1,), 1)][2] == -1.0
    z = sym.phase_flip(0, 1)
    assert z.message_map((1,)) == [1, 0]
    s = sym.qubit_exchange()
    assert s.basis_image((0, 1)) == (1, 0)
    assert s.message_map((0, 0)) == [0, 2, 1, 3]
    assert sym.bit_flip(1, 2).label == "bit-flip[1]"


def test_transforms_are_involutions():
    for n in (1, 2):
        for t in sym.generators(n) + sym.symmetrization_chain(n):
            assert np.allclose(t.matrix @ t.matrix, np.eye(2**n))


def test_apply_transform_twice_is_identity(rng):
    a = sym.random_attack(2, 2, rng)
    for t in sym.generators(2):
        back = sym.apply_transform(t, sym.apply_transform(t, a))
        assert np.allclose(back.states, a.states)
        for b in oracle.bases(2):
            assert np.array_equal(back.measurement[b][1], a.measurement[b][1])


def test_identity_attack_symmetric():
    for n in (1, 2):
        a = sym.identity_raw_attack(n)
        a.validate()
        assert all(sym.is_symmetric(a, t) for t in sym.generators(n))
        assert sym.averaged_metric(a, "disturbance") == 0.0


def test_errors(rng):
    with pytest.raises(DomainError):
        sym.ProtocolTransform("rotate", 1)
    with pytest.raises(DomainError):
        sym.ProtocolTransform("qubit-exchange", 1)
    with pytest.raises(DomainError):
        sym.bit_flip(1, 1)
    with pytest.raises(DomainError):
        sym.apply_transform(sym.bit_flip(0, 2), sym.z_copy_attack())
    with pytest.raises(DomainError):
        sym.averaged_metric(sym.z_copy_attack(), "key_rate")
    with pytest.raises(DomainError):
        sym.generators(3)
    a = sym.random_attack(1, 2, rng)
    broken = sym.RawAttack(1, 2 * a.states, a.measurement)
    with pytest.raises(ConsistencyError):
        broken.validate()

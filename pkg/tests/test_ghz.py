import numpy as np
import pytest
from conftest import bit, dense_1q, dense_permutation, random_state, states
from hypothesis import given, settings
from hypothesis import strategies as st

from bqtsim.ghz import (
    GhzOutcome,
    basis_matrix,
    decoded_index,
    ghz_basis,
    ghz_decode_circuit,
    ghz_measure,
    measure_via_decode,
    outcome_distribution,
    run_circuit,
)
from bqtsim.oracle import joint_state, measured_wires
from bqtsim.protocol import InputCoefficients
from bqtsim.statevector import H, SQRT2_INV, StateError, ZeroProbabilityError, basis_state, fidelity, from_amplitudes


def ket_sum(n, terms):
    v = np.zeros(2**n, dtype=complex)
    for bits, a in terms.items():
        v[int(bits, 2)] += a
    return v


# =============================================================================
# basis
# =============================================================================


def test_single_qubit_basis_is_hadamard_basis():
    b = ghz_basis(1)
    assert np.allclose(b[0].vector.amps, [SQRT2_INV, SQRT2_INV])
    assert np.allclose(b[1].vector.amps, [SQRT2_INV, -SQRT2_INV])


def test_three_qubit_canonical_order():
    b = ghz_basis(3)
    expected = [
        ket_sum(3, {"000": SQRT2_INV, "111": SQRT2_INV}),
        ket_sum(3, {"000": SQRT2_INV, "111": -SQRT2_INV}),
        ket_sum(3, {"001": SQRT2_INV, "110": SQRT2_INV}),
        ket_sum(3, {"001": SQRT2_INV, "110": -SQRT2_INV}),
    ]
    for g, e in zip(b[:4], expected):
        assert np.allclose(g.vector.amps, e, atol=1e-15)
    assert [g.outcome.label() for g in b[:4]] == ["η1+", "η1-", "η2+", "η2-"]
    assert b[0].seed == "000" and b[3].sign == -1


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_gram_matrix_by_explicit_inner_products(n):
    b = ghz_basis(n)
    assert len(b) == 2**n
    for i, gi in enumerate(b):
        for j, gj in enumerate(b):
            ip = sum(np.conj(x) * y for x, y in zip(gi.vector.amps, gj.vector.amps))
            assert abs(ip - (i == j)) < 1e-12


def test_canonical_index_round_trip():
    for n in (1, 3, 5):
        for idx in range(2**n):
            o = GhzOutcome.from_index(n, idx)
            assert o.canonical_index == idx == 2 * o.seed + (o.sign == -1)


@pytest.mark.parametrize("n", [0, 9])
def test_basis_width_guard(n):
    with pytest.raises(StateError):
        ghz_basis(n)


def test_outcome_validation():
    with pytest.raises(StateError):
        GhzOutcome(3, 4, 1)  # leading bit set
    with pytest.raises(StateError):
        GhzOutcome(3, 0, 0)
    with pytest.raises(StateError):
        GhzOutcome.from_index(2, 4)


@settings(max_examples=30, deadline=None)
@given(states(1, 6))
def test_resolution_of_identity(s):
    n = s.num_qubits
    b = basis_matrix(n)
    assert np.max(np.abs(b @ b.conj().T @ s.amps - s.amps)) < 1e-10
    assert abs(outcome_distribution(s, list(range(n))).sum() - 1) < 1e-10


@settings(max_examples=30, deadline=None)
@given(states(2, 6), st.data())
def test_partial_outcome_probabilities_sum_to_one(s, data):
    k = data.draw(st.integers(1, s.num_qubits))
    qubits = data.draw(st.permutations(range(s.num_qubits)))[:k]
    assert abs(outcome_distribution(s, qubits).sum() - 1) < 1e-10


# =============================================================================
# measurement
# =============================================================================


def test_measure_pure_ghz():
    g = from_amplitudes(ket_sum(3, {"000": 1, "111": 1}))
    o, p, post = ghz_measure(g, [0, 1, 2], rng=1)
    assert o.label() == "η1+" and abs(p - 1) < 1e-12
    o, p, post = ghz_measure(g, [0, 1, 2], branch=GhzOutcome(3, 0, 1))
    assert abs(p - 1) < 1e-12


def test_forced_zero_branch_raises():
    g = from_amplitudes(ket_sum(3, {"000": 1, "111": 1}))
    with pytest.raises(ZeroProbabilityError):
        ghz_measure(g, [0, 1, 2], branch=GhzOutcome(3, 1, 1))


def test_random_measurement_needs_rng():
    with pytest.raises(ValueError):
        ghz_measure(basis_state("000"), [0, 1, 2])


def test_alice_measurement_on_joint_state_is_uniform():
    # oracle: project the expanded joint state by hand, one basis vector at a time
    for seed in range(4):
        c = InputCoefficients.random(seed)
        psi = joint_state(c, 3)
        wa, _ = measured_wires(3)
        assert wa == [0, 1, 4]
        amps = psi.amps.reshape([2] * 10)
        for g in ghz_basis(3)[:4]:
            acc = np.zeros([2] * 7, dtype=complex)
            for idx in range(8):
                b0, b1, b2 = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
                acc += np.conj(g.vector.amps[idx]) * amps[b0, b1, :, :, b2]
            assert abs(np.sum(np.abs(acc) ** 2) - 0.25) < 1e-12
            _, p, _ = ghz_measure(psi, wa, branch=g.outcome)
            assert abs(p - 0.25) < 1e-12


def test_forced_pair_gives_first_collapsed_state():
    c = InputCoefficients.random(11)
    psi = joint_state(c, 3)
    wa, wb = measured_wires(3)
    _, pa, post = ghz_measure(psi, wa, branch=GhzOutcome(3, 0, 1))
    _, pb, post = ghz_measure(post, wb, branch=GhzOutcome(3, 0, 1))
    assert abs(pa * pb - 1 / 16) < 1e-12
    remaining = np.kron(
        ket_sum(2, {"00": c.alpha, "11": c.beta}), ket_sum(2, {"00": c.gamma, "11": c.delta})
    )
    expected = np.kron(
        np.kron(np.kron(ket_sum(2, {"00": SQRT2_INV, "11": SQRT2_INV}), ket_sum(2, {"00": SQRT2_INV, "11": SQRT2_INV})), [SQRT2_INV]), [1]
    )
    del expected
    # reorder post into (measured..., 2, 3, 4, 5) and check the remaining factor
    t = post.amps.reshape([2] * 10)
    t = np.transpose(t, [0, 1, 4, 2, 3, 9, 5, 6, 7, 8])
    m = t.reshape(64, 16)
    ghz_ab = np.kron(basis_matrix(3)[:, 0], basis_matrix(3)[:, 0])
    rest = ghz_ab.conj() @ m
    assert abs(np.vdot(rest, rest) - 1) < 1e-12
    assert abs(abs(np.vdot(rest, remaining)) ** 2 - 1) < 1e-12


# =============================================================================
# decode circuit
# =============================================================================


def dense_decode(n):
    u = np.eye(2**n)
    for k in range(1, n):
        u = dense_permutation(n, lambda i, k=k: i ^ (bit(i, 0, n) << (n - 1 - k))) @ u
    return dense_1q(H, 0, n) @ u


def test_decode_n2_bell():
    s = run_circuit(from_amplitudes([1, 0, 0, 1]), ghz_decode_circuit(2), [0, 1])
    assert np.allclose(s.amps, [1, 0, 0, 0], atol=1e-15)


def test_decode_n3_first_state():
    u = dense_decode(3)
    g = ket_sum(3, {"000": SQRT2_INV, "111": SQRT2_INV})
    assert np.allclose(u @ g, basis_state("000").amps, atol=1e-15)
    s = run_circuit(from_amplitudes(g), ghz_decode_circuit(3), [0, 1, 2])
    assert np.allclose(s.amps, basis_state("000").amps, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_decode_maps_basis_to_distinct_kets(n):
    u = dense_decode(n)
    seen = set()
    for g in ghz_basis(n):
        out = u @ g.vector.amps
        k = int(np.argmax(np.abs(out)))
        assert abs(abs(out[k]) - 1) < 1e-12
        assert k == decoded_index(g.outcome)
        seen.add(k)
    assert len(seen) == 2**n


def test_decode_circuit_needs_two_qubits():
    with pytest.raises(StateError):
        ghz_decode_circuit(1)


def test_decode_path_distribution_matches_projection():
    rng = np.random.default_rng(5)
    s = random_state(rng, 3)
    exact = outcome_distribution(s, [0, 1, 2])
    counts_a = np.zeros(8)
    counts_b = np.zeros(8)
    gen_a, gen_b = np.random.default_rng(100), np.random.default_rng(200)
    for _ in range(1000):
        counts_a[ghz_measure(s, [0, 1, 2], rng=gen_a)[0].canonical_index] += 1
        counts_b[measure_via_decode(s, [0, 1, 2], rng=gen_b)[0].canonical_index] += 1
    tv = 0.5 * np.abs(counts_a / 1000 - counts_b / 1000).sum()
    assert tv < 0.05
    assert 0.5 * np.abs(counts_b / 1000 - exact).sum() < 0.05


def test_pure_basis_state_is_deterministic_on_both_paths():
    g = ghz_basis(3)[3]  # eta_2^-
    for measure in (ghz_measure, measure_via_decode):
        for seed in range(5):
            o, p, _ = measure(g.vector, [0, 1, 2], rng=seed)
            assert o.label() == "η2-" and abs(p - 1) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_forced_post_states_agree(n, rng):
    s = random_state(rng, n + 2)
    qubits = list(rng.permutation(n + 2)[:n])
    for g in ghz_basis(n):
        o1, p1, post1 = ghz_measure(s, qubits, branch=g.outcome)
        o2, p2, post2 = measure_via_decode(s, qubits, branch=g.outcome)
        assert o1 == o2
        assert abs(p1 - p2) < 1e-12
        assert fidelity(post1, post2) > 1 - 1e-10

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lqts.models import (
    SpinChainModel,
    SubsystemSpec,
    build_hamiltonian,
    complement_hamiltonian,
    interaction_hamiltonian,
    local_hamiltonian,
    pauli_string,
    spin_flip,
    total_sz,
    translation_operator,
)

from conftest import PAULI, kron_pauli

X, Y, Z, I2 = PAULI["x"], PAULI["y"], PAULI["z"], PAULI["i"]

labels = st.sampled_from("xyz")


@st.composite
def pauli_ops(draw):
    L = draw(st.integers(1, 5))
    sites = draw(st.lists(st.integers(0, L - 1), unique=True, max_size=L))
    return L, {s: draw(labels) for s in sites}


@given(pauli_ops())
def test_pauli_string_matches_kron(case):
    L, ops = case
    np.testing.assert_array_equal(pauli_string(L, ops), kron_pauli(L, ops))


@given(pauli_ops())
def test_pauli_string_involutory(case):
    L, ops = case
    p = pauli_string(L, ops)
    np.testing.assert_allclose(p @ p, np.eye(2**L), atol=1e-14)


def test_pauli_string_small_cases():
    np.testing.assert_array_equal(pauli_string(2, {0: "z"}), np.diag([1, 1, -1, -1]))
    xx = pauli_string(2, {0: "x", 1: "x"})
    assert xx[3, 0] == 1 and np.count_nonzero(xx[:, 0]) == 1


def test_pauli_string_rejects_bad_input():
    with pytest.raises(ValueError):
        pauli_string(2, {2: "x"})
    with pytest.raises(ValueError):
        pauli_string(2, {0: "q"})


def test_ising_two_sites_hand_matrix():
    # periodic L=2 counts the single bond twice: H = -2 XX
    h = build_hamiltonian(SpinChainModel("ising", 2))
    np.testing.assert_allclose(h, -2 * np.kron(X, X), atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), [-2, -2, 2, 2], atol=1e-12)


def test_ising_two_sites_open_and_field():
    h = build_hamiltonian(SpinChainModel("ising", 2, h=0.7, periodic=False))
    ref = -(np.kron(X, X) + 0.7 * (np.kron(Z, I2) + np.kron(I2, Z)))
    np.testing.assert_allclose(h, ref, atol=1e-15)
    r = np.sqrt(1 + 4 * 0.7**2)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), sorted([-r, -1, 1, r]), atol=1e-12)


def test_xxz_two_sites_hand_matrix():
    J, d = 0.8, 1.0
    h = build_hamiltonian(SpinChainModel("xxz", 2, J=J, delta=d))
    ref = 2 * J * (np.kron(X, X) + np.kron(Y, Y) + d * np.kron(Z, Z))
    np.testing.assert_allclose(h, ref, atol=1e-15)
    # XX + YY + ZZ has triplet eigenvalue 1 and singlet -3
    np.testing.assert_allclose(np.linalg.eigvalsh(h), 2 * J * np.array([-3, 1, 1, 1]), atol=1e-12)


def test_hamiltonian_matches_kron_construction():
    L, J, hf = 4, 1.3, 0.4
    ref = np.zeros((16, 16), dtype=complex)
    for i in range(L):
        ref -= J * kron_pauli(L, {i: "x", (i + 1) % L: "x"})
        ref -= J * hf * kron_pauli(L, {i: "z"})
    np.testing.assert_allclose(build_hamiltonian(SpinChainModel("ising", L, J=J, h=hf)), ref, atol=1e-13)


@pytest.mark.parametrize("L", [2, 3])
def test_model_bounds(L):
    SpinChainModel("ising", L)
    with pytest.raises(ValueError):
        SpinChainModel("ising", 1)
    with pytest.raises(ValueError):
        SpinChainModel("ising", 14)
    with pytest.raises(ValueError):
        SpinChainModel("ising", L, J=0)
    with pytest.raises(ValueError):
        SpinChainModel("heisenberg", L)


def test_model_json_roundtrip():
    for m in (SpinChainModel("ising", 5, J=0.5, h=1.25), SpinChainModel("xxz", 6, delta=-0.5, periodic=False)):
        assert SpinChainModel.from_json(m.to_json()) == m
    with pytest.raises(ValueError):
        SpinChainModel.from_dict({"family": "ising", "L": 4, "delta": 1.0})
    with pytest.raises(ValueError):
        SpinChainModel.from_dict({"family": "xxz", "L": 4, "spin": 1})


@pytest.mark.parametrize("delta", [-1.5, 0.3, 1.0])
def test_xxz_symmetries(delta):
    L = 5
    h = build_hamiltonian(SpinChainModel("xxz", L, delta=delta))
    for op in (total_sz(L), spin_flip(L), translation_operator(L)):
        assert np.abs(h @ op - op @ h).max() < 1e-11


def test_ising_translation_and_parity():
    L = 6
    h = build_hamiltonian(SpinChainModel("ising", L, h=0.9))
    parity = pauli_string(L, {i: "z" for i in range(L)})
    for op in (translation_operator(L), parity):
        assert np.abs(h @ op - op @ h).max() < 1e-11


def test_translation_moves_site_zero_to_one():
    L = 4
    t = translation_operator(L)
    z0, z1 = pauli_string(L, {0: "z"}), pauli_string(L, {1: "z"})
    np.testing.assert_allclose(t @ z0 @ t.T, z1, atol=1e-14)


@given(st.floats(-2, 2, allow_nan=False), st.integers(2, 7))
def test_ising_spectrum_even_in_field(hf, L):
    a = np.linalg.eigvalsh(build_hamiltonian(SpinChainModel("ising", L, h=hf)))
    b = np.linalg.eigvalsh(build_hamiltonian(SpinChainModel("ising", L, h=-hf)))
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_local_hamiltonian_terms():
    m = SpinChainModel("ising", 4, J=1.1, h=0.6)
    ha = local_hamiltonian(m, SubsystemSpec(4, 2))
    ref = -1.1 * (np.kron(X, X) + 0.6 * (np.kron(Z, I2) + np.kron(I2, Z)))
    np.testing.assert_allclose(ha, ref, atol=1e-14)
    np.testing.assert_allclose(local_hamiltonian(m, SubsystemSpec(4, 1)), -1.1 * 0.6 * Z, atol=1e-14)
    xxz = SpinChainModel("xxz", 4, delta=0.5)
    np.testing.assert_array_equal(local_hamiltonian(xxz, SubsystemSpec(4, 1)), np.zeros((2, 2)))


@pytest.mark.parametrize("family,L,n_a,start", list(itertools.product(["ising", "xxz"], [4, 5], [1, 2, 3], [0, 3])))
def test_hamiltonian_decomposition(family, L, n_a, start):
    m = SpinChainModel(family, L, h=0.7, delta=0.4)
    sub = SubsystemSpec(L, n_a, start)
    h = sub.permute_operator(build_hamiltonian(m))
    ha, hb = local_hamiltonian(m, sub), complement_hamiltonian(m, sub)
    hint = interaction_hamiltonian(m, sub)
    np.testing.assert_allclose(np.kron(ha, np.eye(sub.d_B)) + np.kron(np.eye(sub.d_A), hb) + hint, h, atol=1e-12)
    # only the two boundary bonds couple the window to the rest
    assert np.abs(hint).max() > 0


def test_whole_window():
    m = SpinChainModel("ising", 3, h=0.2)
    sub = SubsystemSpec(3, 3)
    assert sub.is_whole and sub.d_B == 1
    np.testing.assert_allclose(local_hamiltonian(m, sub), build_hamiltonian(m), atol=1e-14)
    np.testing.assert_array_equal(complement_hamiltonian(m, sub), np.zeros((1, 1)))


def test_subsystem_spec():
    sub = SubsystemSpec(6, 3, 4)
    assert sub.sites == [4, 5, 0] and sub.complement == [1, 2, 3]
    assert sub.dims == (8, 8)
    with pytest.raises(ValueError):
        SubsystemSpec(4, 5)
    with pytest.raises(ValueError):
        SubsystemSpec(4, 2, 4)


def test_permute_operator_relabels_sites():
    L = 4
    sub = SubsystemSpec(L, 2, 2)
    op = pauli_string(L, {2: "x", 3: "y", 1: "z"})
    # window-first order puts sites 2, 3, 0, 1 at positions 0..3
    np.testing.assert_allclose(sub.permute_operator(op), pauli_string(L, {0: "x", 1: "y", 3: "z"}), atol=1e-14)


def test_split_vectors_matches_permute(rng):
    L = 5
    sub = SubsystemSpec(L, 2, 3)
    v = rng.normal(size=(2**L, 3))
    t = sub.split_vectors(v)
    rho = v @ v.T
    np.testing.assert_allclose(
        np.einsum("abn,cbn->ac", t, t), np.einsum("ibjb->ij", sub.permute_operator(rho).reshape(4, 8, 4, 8)),
        atol=1e-12,
    )

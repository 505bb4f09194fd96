import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lqts.anticommutator import (
    UnsolvableError,
    block_residuals,
    lqts_via_omega,
    series_solution,
    solve_anticommutator,
)
from lqts.linalg import NotPSDError, eigh
from lqts.models import SpinChainModel, SubsystemSpec, local_hamiltonian
from lqts.susceptibility import lqts
from lqts.thermal import energy_variance, gibbs

from conftest import ensemble, random_hermitian


def psd_with_kernel(rng, n, kernel):
    u, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    vals = np.concatenate([rng.uniform(0.05, 2.0, n - kernel), np.zeros(kernel)])
    return (u * vals) @ u.conj().T, u, vals


def solvable_rhs(rng, u, vals):
    y = u.conj().T @ random_hermitian(rng, len(vals)) @ u
    ker = vals == 0
    y[np.ix_(ker, ker)] = 0
    return u @ y @ u.conj().T


@given(st.integers(0, 2**32 - 1), st.integers(2, 16), st.integers(0, 3))
def test_solution_meets_block_contract(seed, n, kernel):
    rng = np.random.default_rng(seed)
    kernel = min(kernel, n - 1)
    x, u, vals = psd_with_kernel(rng, n, kernel)
    y = solvable_rhs(rng, u, vals)
    sol = solve_anticommutator(x, y)
    res = block_residuals(x, sol.W, y)
    assert max(res["PP"], res["PR"], res["RP"]) <= 1e-8
    assert sol.kernel_rank == kernel
    np.testing.assert_allclose(sol.W, sol.W.conj().T, atol=1e-12)
    # minimal solution: zero RR block
    wt = u.conj().T @ sol.W @ u
    ker = vals == 0
    assert np.abs(wt[np.ix_(ker, ker)]).max(initial=0) <= 1e-12


@given(st.integers(0, 2**32 - 1), st.integers(2, 10), st.integers(1, 3))
def test_unsolvable_rejected(seed, n, kernel):
    rng = np.random.default_rng(seed)
    kernel = min(kernel, n - 1)
    x, u, vals = psd_with_kernel(rng, n, kernel)
    y = solvable_rhs(rng, u, vals)
    k = u[:, vals == 0][:, 0]
    y = y + np.outer(k, k.conj())
    with pytest.raises(UnsolvableError) as info:
        solve_anticommutator(x, y)
    # max entry of a unit rank-one projector in any kernel basis is at least 1/kernel
    assert info.value.norm >= 1 / kernel - 1e-9


def test_identity_case(rng):
    y = random_hermitian(rng, 5)
    np.testing.assert_allclose(solve_anticommutator(np.eye(5), y).W, y / 2, atol=1e-14)


def test_two_by_two_hand_case():
    sol = solve_anticommutator(np.diag([1.0, 0.0]), np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(sol.W, [[0, 1], [1, 0]], atol=1e-14)
    assert sol.kernel_rank == 1


def test_commutator_rhs_is_traceless(rng):
    x, _, _ = psd_with_kernel(rng, 8, 3)
    h = random_hermitian(rng, 8)
    y = -0.5j * (h @ x - x @ h)
    sol = solve_anticommutator(x, y)
    assert sol.residual_norm <= 1e-9
    assert abs(np.trace(x @ sol.W)) <= 1e-10


def test_non_hermitian_variant(rng):
    x, u, vals = psd_with_kernel(rng, 6, 2)
    y = u.conj().T @ (rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))) @ u
    y[4:, 4:] = 0
    y = u @ y @ u.conj().T
    sol = solve_anticommutator(x, y, hermitian=False)
    assert sol.residual_norm <= 1e-9


def test_rejects_indefinite():
    with pytest.raises(NotPSDError):
        solve_anticommutator(np.diag([1.0, -1.0]), np.eye(2))


def series_instance(rng, n, kernel):
    # eigenbasis-diagonal X with Y supported on pairs x_m < x_n, where the series converges
    vals = np.concatenate([np.sort(rng.uniform(0.1, 1.0, n - kernel)), np.zeros(kernel)])
    y = np.zeros((n, n), dtype=complex)
    sup = n - kernel
    for m in range(sup):
        for k in range(sup):
            if vals[m] < 0.9 * vals[k]:
                y[m, k] = rng.normal() + 1j * rng.normal()
    return np.diag(vals), y


@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(0, 2))
def test_series_reproduces_closed_form_block(seed, n, kernel):
    rng = np.random.default_rng(seed)
    kernel = min(kernel, n - 1)
    x, y = series_instance(rng, n, kernel)
    closed = solve_anticommutator(x, y, hermitian=False).W
    series = series_solution(x, y, n_terms=200)
    sup = np.diag(x) > 0
    # compare in the eigenbasis used internally
    spec = eigh(x, split_blocks=False)
    u = spec.vectors
    s = spec.values > 1e-12
    cw = (u.conj().T @ closed @ u)[np.ix_(s, s)]
    sw = (u.conj().T @ series @ u)[np.ix_(s, s)]
    np.testing.assert_allclose(sw, cw, atol=1e-8)
    assert sup.sum() == s.sum()


@pytest.mark.parametrize("family,L,n_a,beta", [("ising", 2, 1, 1.0), ("ising", 3, 1, 0.7), ("xxz", 3, 2, 1.5), ("ising", 4, 2, 2.0)])
def test_omega_route_matches_lqts(family, L, n_a, beta):
    _, ens = ensemble(family, L, beta, h=0.3, delta=0.6)
    sub = SubsystemSpec(L, n_a)
    assert lqts_via_omega(ens, sub) == pytest.approx(lqts(ens, sub).lqts_beta, rel=1e-7)


def test_omega_route_whole_system():
    _, ens = ensemble("ising", 3, 1.2, h=0.5)
    assert lqts_via_omega(ens, SubsystemSpec(3, 3)) == pytest.approx(energy_variance(ens), abs=1e-9)


def test_omega_route_non_interacting():
    m1, m2 = SpinChainModel("ising", 2, h=0.4, periodic=False), SpinChainModel("ising", 2, h=1.1, periodic=False)
    sub = SubsystemSpec(2, 1)
    ha, hb = local_hamiltonian(m1, sub), local_hamiltonian(m2, sub)
    ens = gibbs(eigh(np.kron(ha, np.eye(2)) + np.kron(np.eye(2), hb)), 1.0)
    assert lqts_via_omega(ens, sub) == pytest.approx(energy_variance(gibbs(eigh(ha), 1.0)), rel=1e-8)

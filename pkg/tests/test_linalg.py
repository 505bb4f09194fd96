import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lqts.linalg import (
    DimensionError,
    NotHermitianError,
    NotPSDError,
    SpectralDecomposition,
    check_hermitian,
    eigh,
    group_degenerate,
    kron,
    partial_trace,
    pinv_power,
    support_projector,
)

from conftest import naive_partial_trace, random_hermitian, random_psd

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(1, 12))
def test_eigh_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, n)
    spec = eigh(h)
    assert np.all(np.diff(spec.values) >= 0)
    np.testing.assert_allclose(spec.reconstruct(), h, atol=1e-10)
    np.testing.assert_allclose(spec.vectors.conj().T @ spec.vectors, np.eye(n), atol=1e-10)


def test_eigh_block_split_matches_dense(rng):
    a, b = random_hermitian(rng, 5), random_hermitian(rng, 3)
    h = np.zeros((8, 8), dtype=complex)
    idx_a, idx_b = [0, 2, 3, 6, 7], [1, 4, 5]
    h[np.ix_(idx_a, idx_a)] = a
    h[np.ix_(idx_b, idx_b)] = b
    split = eigh(h)
    dense = eigh(h, split_blocks=False)
    np.testing.assert_allclose(split.values, dense.values, atol=1e-12)
    np.testing.assert_allclose(split.reconstruct(), h, atol=1e-12)


def test_eigh_deterministic(rng):
    h = random_hermitian(rng, 16)
    a, b = eigh(h), eigh(h.copy())
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.vectors, b.vectors)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitianError, match=r"A\[0,1\]"):
        eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_check_hermitian_rejects_nonsquare():
    with pytest.raises(DimensionError):
        check_hermitian(np.zeros((2, 3)))


def test_spectral_function(rng):
    p = random_psd(rng, 4)
    root = eigh(p).function(np.sqrt)
    np.testing.assert_allclose(root @ root, p, atol=1e-10)


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_partial_trace_matches_loops(seed, na, nb):
    rng = np.random.default_rng(seed)
    da, db = 2**na, 2**nb
    op = random_hermitian(rng, da * db)
    for keep in "AB":
        np.testing.assert_allclose(
            partial_trace(op, (da, db), keep), naive_partial_trace(op, da, db, keep), atol=1e-12
        )


def test_partial_trace_of_product(rng):
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 4)
    np.testing.assert_allclose(partial_trace(kron(a, b), (2, 4), "A"), np.trace(b) * a, atol=1e-12)
    np.testing.assert_allclose(partial_trace(kron(a, b), (2, 4), "B"), np.trace(a) * b, atol=1e-12)


def test_partial_trace_bad_dims():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(6), (2, 4))


def test_kron_identity_shorthand(rng):
    a = random_hermitian(rng, 2)
    np.testing.assert_array_equal(kron(a, 3), np.kron(a, np.eye(3)))
    np.testing.assert_array_equal(kron(2, a), np.kron(np.eye(2), a))


def test_kron_cap():
    with pytest.raises(DimensionError):
        kron(2**7, 2**7)


@given(seeds, st.integers(2, 8), st.integers(0, 3))
def test_pinv_penrose_identities(seed, n, kernel):
    rng = np.random.default_rng(seed)
    rank = max(n - kernel, 1)
    a = random_psd(rng, n, rank)
    x = pinv_power(a)
    np.testing.assert_allclose(a @ x @ a, a, atol=1e-8 * np.abs(a).max())
    np.testing.assert_allclose(x @ a @ x, x, atol=1e-8 * np.abs(x).max())
    np.testing.assert_allclose((a @ x).conj().T, a @ x, atol=1e-8)
    np.testing.assert_allclose(x @ a, support_projector(a), atol=1e-8)


def test_pinv_power_composes(rng):
    a = random_psd(rng, 5, 3)
    x = pinv_power(a)
    np.testing.assert_allclose(pinv_power(a, 2), x @ x, atol=1e-8 * np.abs(x @ x).max())


def test_pinv_rejects_negative():
    with pytest.raises(NotPSDError):
        pinv_power(np.diag([1.0, -0.5]))


def test_group_degenerate():
    spec = SpectralDecomposition(np.array([-1.0, -1.0 + 1e-13, 0.0, 2.0, 2.0, 2.0]), np.eye(6))
    part = group_degenerate(spec)
    assert list(part.multiplicities) == [2, 1, 3]
    np.testing.assert_allclose(part.energies, [-1.0, 0.0, 2.0], atol=1e-12)
    proj = part[2].projector(spec.vectors)
    np.testing.assert_allclose(np.trace(proj), 1.0)
    np.testing.assert_allclose(np.trace(part[2].projector(spec.vectors, normalized=False)), 3.0)

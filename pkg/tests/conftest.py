import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.linalg import solve_continuous_lyapunov

from lqts import SpinChainModel, SubsystemSpec, build_hamiltonian, eigh, gibbs

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.diag([1.0 + 0j, -1.0]),
}


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    return a @ a.conj().T


def kron_pauli(L, ops):
    """Pauli string from explicit Kronecker products; site 0 is the leftmost factor."""
    out = np.array([[1.0 + 0j]])
    for i in range(L):
        out = np.kron(out, PAULI[ops.get(i, "i")])
    return out


def naive_partial_trace(op, d_a, d_b, keep="A"):
    """Quadruple-loop partial trace."""
    if keep == "A":
        out = np.zeros((d_a, d_a), dtype=complex)
        for i in range(d_a):
            for j in range(d_a):
                for k in range(d_b):
                    out[i, j] += op[i * d_b + k, j * d_b + k]
        return out
    out = np.zeros((d_b, d_b), dtype=complex)
    for i in range(d_b):
        for j in range(d_b):
            for k in range(d_a):
                out[i, j] += op[k * d_b + i, k * d_b + j]
    return out


def sld_lqts(model, n_a, beta, start=0):
    """LQTS via the symmetric logarithmic derivative of rho_A, from dense matrices.

    Uses ``d rho / d beta = -(rho H - <H> rho)`` and a Lyapunov solve
    ``rho_A L + L rho_A = 2 d rho_A``; needs a full-rank ``rho_A``.
    """
    h = build_hamiltonian(model)
    w, v = np.linalg.eigh(h)
    p = np.exp(-beta * (w - w.min()))
    p /= p.sum()
    rho = (v * p) @ v.conj().T
    drho = -(rho @ h - (p @ w) * rho)
    sub = SubsystemSpec(model.L, n_a, start)
    rho = sub.permute_operator(rho)
    drho = sub.permute_operator(drho)
    ra = naive_partial_trace(rho, sub.d_A, sub.d_B)
    da = naive_partial_trace(drho, sub.d_A, sub.d_B)
    lsld = solve_continuous_lyapunov(ra, 2 * da)
    return float(np.trace(ra @ lsld @ lsld).real)


def ensemble(family="ising", L=4, beta=1.0, **kw):
    model = SpinChainModel(family, L, **kw)
    return model, gibbs(eigh(build_hamiltonian(model)), beta)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

"""Solutions of ``X W + W X = Y`` for positive semidefinite ``X``.

With ``R`` the kernel projector of ``X`` and ``P = 1 - R``, the equation is
solvable only if ``R Y R = 0``; the ``R W R`` block is then free and is set
to zero. In the eigenbasis ``{x_m}`` of ``X`` every other block is fixed
entry by entry::

    W_mn = Y_mn / (x_m + x_n)      whenever x_m + x_n > rank_tol

This is the sum of the alternating series
``sum_n (-1)^n X^n P Y X^+(n+1)`` on the ``P W P`` block together with the
pseudoinverse terms ``X^+ Y R`` and ``R Y X^+`` on the off-diagonal
blocks. :func:`series_solution` evaluates the series literally and is used
as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_square, check_hermitian, default_rank_tol, eigh, NotPSDError, PSD_ATOL
from .models import SubsystemSpec
from .thermal import GibbsEnsemble, energy_variance, purify

SOLVABILITY_ATOL = 1e-10


class UnsolvableError(ValueError):
    def __init__(self, norm: float):
        super().__init__(f"R Y R has max entry {norm:.3e}; X W + W X = Y has no solution")
        self.norm = norm


@dataclass(frozen=True)
class AnticommutatorSolution:
    W: np.ndarray
    residual_norm: float
    kernel_rank: int
    closed_form: bool = True
    series_terms_used: int = 0


def _psd_basis(x: np.ndarray, rank_tol: float | None):
    spec = eigh(x, split_blocks=False)
    top = max(float(np.abs(spec.values).max()), 1.0)
    if spec.values[0] < -PSD_ATOL * top:
        raise NotPSDError(f"X has eigenvalue {spec.values[0]:.3e}")
    if rank_tol is None:
        rank_tol = default_rank_tol(spec.values)
    return spec.values, spec.vectors, rank_tol


def block_residuals(x, w, y, rank_tol: float | None = None) -> dict[str, float]:
    """Max-entry norms of ``X W + W X - Y`` on the PP, PR, RP and RR blocks."""
    vals, u, rank_tol = _psd_basis(check_hermitian(x), rank_tol)
    return _blocks(vals, u, rank_tol, x @ w + w @ x - y)


def _blocks(vals, u, rank_tol, mismatch) -> dict[str, float]:
    res = u.conj().T @ mismatch @ u
    sup = vals > rank_tol
    out = {}
    for name, rows, cols in (("PP", sup, sup), ("PR", sup, ~sup), ("RP", ~sup, sup), ("RR", ~sup, ~sup)):
        block = res[np.ix_(rows, cols)]
        out[name] = float(np.abs(block).max()) if block.size else 0.0
    return out


def solve_anticommutator(x, y, rank_tol: float | None = None, hermitian: bool = True,
                         atol: float = SOLVABILITY_ATOL) -> AnticommutatorSolution:
    """Particular solution with zero ``R W R`` block.

    ``hermitian=True`` requires a Hermitian ``Y`` and returns a Hermitian
    ``W``; with ``hermitian=False`` any square ``Y`` is accepted.
    """
    x = check_hermitian(x)
    y = check_hermitian(y) if hermitian else as_square(y)
    if y.shape != x.shape:
        raise ValueError(f"shape mismatch: X {x.shape}, Y {y.shape}")
    vals, u, rank_tol = _psd_basis(x, rank_tol)
    sup = vals > rank_tol
    yt = u.conj().T @ y @ u
    rr = yt[np.ix_(~sup, ~sup)]
    rr_norm = float(np.abs(rr).max()) if rr.size else 0.0
    if rr_norm > atol:
        raise UnsolvableError(rr_norm)

    xs = np.where(sup, vals, 0.0)
    denom = xs[:, None] + xs[None, :]
    wt = np.zeros_like(yt, dtype=np.result_type(yt, float))
    ok = denom > rank_tol
    wt[ok] = yt[ok] / denom[ok]
    w = u @ wt @ u.conj().T
    if hermitian:
        w = 0.5 * (w + w.conj().T)

    res = _blocks(vals, u, rank_tol, x @ w + w @ x - y)
    return AnticommutatorSolution(w, max(res["PP"], res["PR"], res["RP"]), int((~sup).sum()))


def series_solution(x, y, n_terms: int = 200, rank_tol: float | None = None) -> np.ndarray:
    """Partial sum of ``X^+ Y R + R Y X^+ + sum_n (-1)^n X^n P Y (X^+(n+1) - R)``.

    Only the ``P W P`` block of this expression is meaningful: it converges
    when ``x_m < x_n`` for every pair with ``Y_mn != 0``, while the ``- R``
    term leaks into ``P W R``. Meant for checking the ``P W P`` block of
    :func:`solve_anticommutator` on such instances.
    """
    x = check_hermitian(x)
    y = as_square(y)
    vals, u, rank_tol = _psd_basis(x, rank_tol)
    sup = vals > rank_tol
    inv = np.where(sup, 1.0 / np.where(sup, vals, 1.0), 0.0)
    p = np.diag(sup.astype(float))
    r = np.diag((~sup).astype(float))
    yt = u.conj().T @ y @ u
    xd = np.where(sup, vals, 0.0)

    w = np.diag(inv) @ yt @ r + r @ yt @ np.diag(inv)
    xn = np.ones_like(xd)
    invn = inv.copy()
    for k in range(n_terms):
        w = w + (-1) ** k * (np.diag(xn) @ p @ yt @ (np.diag(invn) - r))
        xn = xn * xd
        invn = invn * inv
    return u @ w @ u.conj().T


def lqts_via_omega(ens: GibbsEnsemble, sub: SubsystemSpec, rank_tol: float | None = None) -> float:
    """LQTS from the optimal ancilla generator ``Omega``.

    ``rho_a`` is the purification reduced to ``a = B A'B'``; ``Omega`` solves
    ``Omega rho_a + rho_a Omega = -(i/2) [H', rho_a]`` with ``H'`` the copy of
    ``H`` acting on ``A'B'``, and ``S_A = Var(H) - 4 Tr[rho_a Omega^2]``.
    """
    pur = purify(ens, sub.L)
    psi = pur.cut_a(sub)  # (d_A, d_B * D), ancilla index last
    rho_a = psi.T @ psi.conj()
    rho_a = 0.5 * (rho_a + rho_a.conj().T)

    v = ens.spectrum.vectors
    h = (v * (ens.energies - ens.mean_energy)) @ v.conj().T
    # ancilla carries |E_i*>, so H acts there as H^T
    h_prime = np.kron(np.eye(sub.d_B), h.T)
    q = -0.5j * (h_prime @ rho_a - rho_a @ h_prime)
    sol = solve_anticommutator(rho_a, q, rank_tol)
    omega = sol.W
    corr = 4.0 * float(np.trace(rho_a @ omega @ omega).real)
    return energy_variance(ens) - corr

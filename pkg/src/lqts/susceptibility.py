"""Local quantum thermal susceptibility (LQTS) of a subsystem.

The LQTS is the quantum Fisher information of the reduced Gibbs state
``rho_A(beta) = Tr_B[exp(-beta H) / Z]`` with respect to ``beta``. Three
independent evaluations are provided:

* :func:`lqts` (main path) works in the eigenbasis ``{lambda_j, g_j}`` of
  ``rho_A`` and uses ``d rho_A / d beta = -K`` with
  ``K = Tr_B[rho (H - <H>)]``::

      S_A = 2 sum_jk |<g_j|K|g_k>|^2 / (lambda_j + lambda_k)

  Subtracting ``<H>`` before reducing is algebraically identical to the
  ``- <H>^2`` correction and avoids the cancellation between two large
  numbers. Both ``rho_A`` and ``K`` are taken from one SVD of the
  weighted eigenvector matrix, see :func:`lqts`.
* :func:`lqts_eigendiff` subtracts from the energy variance the phase
  Fisher information of the complementary part of an explicit
  purification.
* :func:`lqts_fidelity_oracle` takes the defining limit of the Bures
  fidelity numerically.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg.lapack import dgejsv

from .linalg import eigh, group_degenerate, partial_trace
from .models import SubsystemSpec
from .thermal import (
    GibbsEnsemble,
    energy_variance,
    gibbs,
    purify,
    reduced_thermal_state,
    weighted_reduction,
)

LAMBDA_FLOOR = 0.0
UNRELIABLE_MASS = 1e-6
FIDELITY_ATOL = 1e-10
NULL_RELATIVE = 1e-12
# Jacobi SVD costs grow steeply past this many Schmidt values
JACOBI_MAX_RANK = 1024


@dataclass(frozen=True)
class LqtsResult:
    lqts_beta: float
    heat_capacity_global: float
    complement_phase_qfi: float
    spectrum_floor_used: float
    method: str
    dropped_lambda_mass: float = 0.0
    reliable: bool = True


def lqts(ens: GibbsEnsemble, sub: SubsystemSpec, floor: float = LAMBDA_FLOOR) -> LqtsResult:
    """LQTS from the Schmidt basis of the reduced state.

    ``rho_A = F F^dag`` with ``F = [sqrt(w_i) <a, b|E_i>]`` of shape
    ``(d_A, d_B N)``. With the SVD ``F = U diag(sigma) W^dag`` the columns
    of ``U`` are the eigenvectors ``g_j`` of ``rho_A``, ``lambda_j = sigma_j^2``
    and ``<g_j|K|g_k> = sigma_j sigma_k X_jk`` with ``X = W^dag D W``,
    ``D = diag(E_i - <H>)``. Hence::

        S_A = 2 sum_jk lambda_j lambda_k |X_jk|^2 / (lambda_j + lambda_k)

    which never divides a small matrix element by a small eigenvalue. The
    rows of ``F`` carry Boltzmann factors spanning many orders of
    magnitude, so a plain SVD loses the relative accuracy of small
    ``sigma``; see :func:`_row_singular_pairs`. Pairs with
    ``lambda_j + lambda_k <= floor * max(lambda)`` are skipped; the mass of
    eigenvalues whose diagonal pair is skipped is reported and above
    ``1e-6`` the result is marked unreliable.
    """
    w = ens.weights
    occupied = w > 0
    de = ens.energies[occupied] - ens.mean_energy
    a = sub.split_vectors(ens.spectrum.vectors[:, occupied])
    f = (a * np.sqrt(w[occupied])).reshape(sub.d_A, -1)
    sigma, wh = _row_singular_pairs(f)
    x = (wh * np.tile(de, sub.d_B)) @ wh.conj().T

    lam = sigma**2
    pair = lam[:, None] + lam[None, :]
    floor_abs = floor * float(lam.max())
    keep = pair > floor_abs
    value = 2.0 * float(np.sum(np.outer(lam, lam)[keep] * np.abs(x[keep]) ** 2 / pair[keep]))
    dropped = float(lam[2 * lam <= floor_abs].sum())

    heat = energy_variance(ens)
    reliable = dropped <= UNRELIABLE_MASS
    if not reliable:
        warnings.warn(
            f"lambda floor discarded {dropped:.2e} of the reduced-state mass; LQTS unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    return LqtsResult(value, heat, heat - value, floor_abs, "schmidt_closed_form", dropped, reliable)


def _row_singular_pairs(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Singular values and right singular vectors ``W^dag`` of a wide matrix.

    Real input goes through the preconditioned Jacobi SVD of ``F^T`` with
    its rows sorted by decreasing norm. Jacobi rotations determine each
    singular value to high relative accuracy when the columns are badly
    scaled, and the presorting makes the QR preconditioner insensitive to
    the row scaling. Complex input, and more than ``JACOBI_MAX_RANK`` rows,
    fall back to the standard SVD.
    """
    if np.iscomplexobj(f) or f.shape[0] > min(f.shape[1], JACOBI_MAX_RANK):
        _, sigma, wh = np.linalg.svd(f, full_matrices=False)
        return sigma, wh
    order = np.argsort(-np.einsum("ij,ij->j", f, f), kind="stable")
    sva, u, _, work, _, info = dgejsv(np.asfortranarray(f[:, order].T), joba=0, jobu=0, jobv=3,
                                      jobr=0, jobt=0, jobp=0)
    if info != 0:
        _, sigma, wh = np.linalg.svd(f, full_matrices=False)
        return sigma, wh
    wh = np.empty((u.shape[1], f.shape[1]))
    wh[:, order] = u.T
    return sva * (work[0] / work[1]), wh


def _system_hamiltonian(ens: GibbsEnsemble) -> np.ndarray:
    """``H - <H>`` rebuilt from the spectrum."""
    v = ens.spectrum.vectors
    return (v * (ens.energies - ens.mean_energy)) @ v.conj().T


def complement_phase_qfi(ens: GibbsEnsemble, sub: SubsystemSpec) -> float:
    """Phase Fisher information of the part of the purification complementary to A'.

    The reduced state on A B B' has rank at most ``d_A``; its support
    ``{lambda_j, e_j}`` comes from an SVD of the purification across the
    cut A B B' | A'. The kernel contributions ``sum_{k in ker} |<e_k|H|e_j>|^2``
    are obtained as ``||H e_j||^2`` minus the support part, so the kernel
    basis is never built.
    """
    pur = purify(ens, sub.L)
    psi = pur.cut_a_prime(sub)
    u, s, _ = np.linalg.svd(psi, full_matrices=False)
    lam = s**2

    h = _system_hamiltonian(ens)
    dim, d_b = pur.dim, sub.d_B
    hu = np.einsum("xy,ybr->xbr", h, u.reshape(dim, d_b, -1)).reshape(dim * d_b, -1)
    gm = u.conj().T @ hu
    col = np.sum(np.abs(hu) ** 2, axis=0)
    outside = np.clip(col - np.sum(np.abs(gm) ** 2, axis=0), 0, None)

    pair = lam[:, None] + lam[None, :]
    diff = (lam[:, None] - lam[None, :]) ** 2
    ok = pair > 0
    inside = 0.5 * float(np.sum(diff[ok] / pair[ok] * np.abs(gm[ok]) ** 2))
    return inside + float(lam @ outside)


def lqts_eigendiff(ens: GibbsEnsemble, sub: SubsystemSpec) -> LqtsResult:
    """LQTS as energy variance minus the complementary phase Fisher information."""
    heat = energy_variance(ens)
    corr = complement_phase_qfi(ens, sub)
    return LqtsResult(heat - corr, heat, corr, 0.0, "eigen_difference")


def _sqrtm_psd(a: np.ndarray) -> np.ndarray:
    return eigh(a, split_blocks=False).function(lambda x: np.sqrt(np.clip(x, 0, None)))


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))`` (not squared).

    Evaluated as the sum of singular values of ``sqrt(rho) sqrt(sigma)``,
    which keeps small eigenvalues accurate in absolute terms.
    """
    return float(np.linalg.svd(_sqrtm_psd(rho) @ _sqrtm_psd(sigma), compute_uv=False).sum())


def infidelity(rho: np.ndarray, sigma: np.ndarray) -> tuple[float, float]:
    """``(1 - F, F)`` for trace-normalized copies of ``rho`` and ``sigma``.

    ``1 - F`` is computed as ``||sqrt(rho) - sqrt(sigma) U||_F^2 / 2`` with
    ``U`` the optimal unitary from the polar decomposition, so it carries
    relative rather than absolute rounding error when the states are close.
    """
    a = _sqrtm_psd(rho)
    b = _sqrtm_psd(sigma)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    left, sv, right = np.linalg.svd(a @ b)
    u = right.conj().T @ left.conj().T
    return 0.5 * float(np.linalg.norm(a - b @ u) ** 2), float(sv.sum())


def _extrapolate_to_zero(x: np.ndarray, y: np.ndarray) -> float:
    """Neville interpolation of ``y(x)`` evaluated at ``x = 0``."""
    p = list(map(float, y))
    n = len(x)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i])
    return p[0]


def default_eps(beta: float) -> list[float]:
    eps = min(1e-2 * beta, 2e-2)
    return [eps, eps / 2]


def lqts_fidelity_oracle(ens: GibbsEnsemble, sub: SubsystemSpec, eps_list=None) -> float:
    """LQTS from the fidelity of reduced states at neighbouring temperatures.

    For each step the symmetric combination
    ``4 [(1 - F(beta, beta + eps)) + (1 - F(beta, beta - eps))] / eps^2``
    is formed; its error is even in ``eps``, so a polynomial extrapolation
    in ``eps^2`` to zero removes the leading errors.
    """
    beta = ens.beta
    eps_list = default_eps(beta) if eps_list is None else list(eps_list)
    rho = reduced_thermal_state(ens, sub)
    est = []
    for eps in eps_list:
        eps = abs(float(eps))
        if not (0 < eps <= 1e-2 * beta):
            raise ValueError(f"step {eps} must lie in (0, 1e-2 * beta]")
        acc = 0.0
        for b in (beta + eps, beta - eps):
            loss, f = infidelity(rho, reduced_thermal_state(gibbs(ens.spectrum, b), sub))
            if f > 1 + FIDELITY_ATOL:
                raise ValueError(f"fidelity {f!r} exceeds 1 beyond tolerance")
            acc += loss
        est.append(4.0 * acc / eps**2)
    eps2 = np.array(eps_list, dtype=float) ** 2
    return _extrapolate_to_zero(eps2, np.array(est))


def lqts_fidelity(ens: GibbsEnsemble, sub: SubsystemSpec, eps_list=None) -> LqtsResult:
    heat = energy_variance(ens)
    value = lqts_fidelity_oracle(ens, sub, eps_list)
    return LqtsResult(value, heat, heat - value, 0.0, "fidelity_limit")


@dataclass(frozen=True)
class LowTExpansion:
    first_order: float
    second_order: float
    gap: float
    energies: np.ndarray
    multiplicities: np.ndarray
    overlaps: dict[int, float] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return self.first_order + self.second_order


def low_t_expansion(ens_or_spectrum, sub: SubsystemSpec, beta: float | None = None,
                    tol: float | None = None, rank_tol: float | None = None) -> LowTExpansion:
    """Low-temperature expansion of the LQTS in powers of ``exp(-beta E_1)``.

    Energies are measured from the ground multiplet. The first-order term
    sums over multiplets with ``E_i <= 2 E_1``::

        sum_i (n_i / n_0) E_i^2 exp(-beta E_i) (1 - Tr[P_0 Pi_i])

    with ``Pi_i`` the reduced normalized multiplet projectors and ``P_0``
    the support projector of ``Pi_0``. The second-order term involves only
    the first excited multiplet; its alternating series over powers of
    ``Pi_0`` is summed in closed form in the eigenbasis ``{p_m, phi_m}`` of
    ``Pi_0``::

        sum_n (-1)^n Tr[Pi_1 Pi_0^{-(n+2)} Pi_1 Pi_0^{n+1}]
            = sum_{m, m' in supp} |<phi_m|Pi_1|phi_m'>|^2 p_m' / (p_m (p_m + p_m'))
    """
    if isinstance(ens_or_spectrum, GibbsEnsemble):
        spectrum = ens_or_spectrum.spectrum
        beta = ens_or_spectrum.beta if beta is None else beta
    else:
        spectrum = ens_or_spectrum
    if beta is None:
        raise ValueError("beta is required")

    part = group_degenerate(spectrum, tol)
    if len(part) < 2:
        raise ValueError("spectrum has a single multiplet; no excited level to expand in")
    energies = part.energies - part.energies[0]
    n = part.multiplicities
    gap = float(energies[1])
    if gap <= part.tol:
        raise ValueError(f"first gap {gap:.3e} is not resolved above tolerance {part.tol:.3e}")

    v = spectrum.vectors
    included = [i for i in range(1, len(part)) if energies[i] <= 2 * gap + part.tol]

    def reduced_projector(i):
        members = part[i].members
        return weighted_reduction(v[:, members], np.full(len(members), 1.0 / n[i]), sub)

    pi0 = reduced_projector(0)
    spec0 = eigh(pi0, split_blocks=False)
    p, phi = spec0.values, spec0.vectors
    if rank_tol is None:
        rank_tol = 1e-12 * float(p.max())
    sup = p > rank_tol
    p0 = np.diag(sup.astype(float))

    overlaps: dict[int, float] = {}
    first = 0.0
    rotated: dict[int, np.ndarray] = {}
    for i in included:
        b = phi.conj().T @ reduced_projector(i) @ phi
        rotated[i] = b
        ov = float(np.trace(p0 @ b).real)
        overlaps[i] = ov
        first += n[i] / n[0] * energies[i] ** 2 * np.exp(-beta * energies[i]) * (1.0 - ov)

    b1 = rotated.get(1)
    if b1 is None:
        b1 = phi.conj().T @ reduced_projector(1) @ phi
    ps = p[sup]
    pinv = np.zeros_like(p)
    pinv[sup] = 1.0 / ps
    bs = b1[np.ix_(sup, sup)]
    series = float(np.sum(np.abs(bs) ** 2 * ps[None, :] / (ps[:, None] * (ps[:, None] + ps[None, :]))))
    eye = np.eye(len(p))
    bracket = (
        -2.0
        + np.trace(p0 @ b1).real
        + np.trace(b1 @ np.diag(pinv) @ b1 @ (eye + p0)).real
        - 2.0 * series
    )
    second = (gap * n[1] / n[0]) ** 2 * np.exp(-2 * beta * gap) * float(bracket)
    return LowTExpansion(
        float(first), float(second), gap, energies[[0] + included], n[[0] + included], overlaps
    )


def high_t_expansion(h: np.ndarray, sub: SubsystemSpec, beta: float) -> float:
    """Two-term high-temperature expansion of the LQTS (error O(beta^2)).

    With ``H`` made traceless and ``Ht = Tr_B[H] / d_B``::

        S_A = Tr[Ht^2 - 2 beta Ht Tr_B[H^2] / d_B + beta Ht^3] / d_A
    """
    h = sub.permute_operator(np.asarray(h))
    dim = h.shape[0]
    h = h - np.trace(h) / dim * np.eye(dim)
    d_a, d_b = sub.dims
    ht = partial_trace(h, (d_a, d_b), "A") / d_b
    h2 = partial_trace(h @ h, (d_a, d_b), "A") / d_b
    val = np.trace(ht @ ht - 2 * beta * ht @ h2 + beta * ht @ ht @ ht) / d_a
    return float(val.real)


def cramer_rao_bound(result, beta: float, n_measurements: int = 1) -> float:
    """Lower bound ``T^2 / sqrt(N S_A)`` on the RMS error of a local temperature estimate.

    Returns ``inf`` when the susceptibility vanishes. For an
    :class:`LqtsResult` values below ``NULL_RELATIVE`` times the heat
    capacity count as zero, since they are roundoff of an exact null.
    """
    if n_measurements < 1:
        raise ValueError("n_measurements must be positive")
    if isinstance(result, LqtsResult):
        s = result.lqts_beta
        null = NULL_RELATIVE * abs(result.heat_capacity_global)
    else:
        s, null = float(result), 0.0
    if s <= null:
        return float("inf")
    return (1.0 / beta) ** 2 / np.sqrt(n_measurements * s)


def temperature_susceptibility(lqts_beta: float, beta: float) -> float:
    """Convert a susceptibility with respect to ``beta`` into one with respect to ``T``."""
    return lqts_beta * beta**4

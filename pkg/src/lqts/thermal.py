"""Gibbs ensembles, energy variance and reduced thermal states.

Units: k_B = 1 and energies in units of J, so ``beta`` is measured in 1/J.
All Boltzmann factors are taken relative to the ground energy,
``exp(-beta * (E_i - E_0))``, which keeps them in [0, 1] for any beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DimensionError,
    SpectralDecomposition,
    default_degeneracy_tol,
    group_degenerate,
)
from .models import SubsystemSpec

PURIFY_MAX_ENTRIES = 2**16


@dataclass(frozen=True)
class GibbsEnsemble:
    beta: float
    spectrum: SpectralDecomposition
    weights: np.ndarray
    log_z_shifted: float

    @property
    def energies(self) -> np.ndarray:
        return self.spectrum.values

    @property
    def ground_energy(self) -> float:
        return float(self.spectrum.values[0])

    @property
    def log_partition(self) -> float:
        return -self.beta * self.ground_energy + self.log_z_shifted

    @property
    def mean_energy(self) -> float:
        return float(self.weights @ self.energies)

    def density_matrix(self) -> np.ndarray:
        v = self.spectrum.vectors
        return (v * self.weights) @ v.conj().T


def boltzmann_weights(values: np.ndarray, beta: float) -> tuple[np.ndarray, float]:
    x = np.exp(-beta * (values - values[0]))
    z = x.sum()
    return x / z, float(np.log(z))


def gibbs(spectrum: SpectralDecomposition, beta: float) -> GibbsEnsemble:
    if not (np.isfinite(beta) and beta > 0):
        raise ValueError(f"beta must be finite and positive, got {beta}")
    w, logz = boltzmann_weights(spectrum.values, beta)
    return GibbsEnsemble(float(beta), spectrum, w, logz)


def log_partition(values: np.ndarray, beta: float) -> float:
    """``ln Z`` for a spectrum, stable for large ``beta``."""
    e0 = float(np.min(values))
    return -beta * e0 + float(np.log(np.sum(np.exp(-beta * (values - e0)))))


def _variance(weights: np.ndarray, energies: np.ndarray) -> float:
    mean = weights @ energies
    return float(max(weights @ (energies - mean) ** 2, 0.0))


def energy_variance(ens: GibbsEnsemble) -> float:
    """``Tr[rho H^2] - Tr[rho H]^2``, the global thermal susceptibility."""
    return _variance(ens.weights, ens.energies)


def reduced_thermal_state(ens: GibbsEnsemble, sub: SubsystemSpec) -> np.ndarray:
    """``Tr_B`` of the Gibbs state, on the window in site order."""
    return weighted_reduction(ens.spectrum.vectors, ens.weights, sub)


def weighted_reduction(vectors: np.ndarray, coeffs: np.ndarray, sub: SubsystemSpec) -> np.ndarray:
    """``Tr_B[sum_i c_i |v_i><v_i|]`` for real coefficients ``c_i``."""
    m = sub.split_vectors(vectors)
    d_a = sub.d_A
    flat = m.reshape(d_a, -1)
    scaled = (m * coeffs).reshape(d_a, -1)
    out = scaled @ flat.conj().T
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class PurifiedState:
    """Thermofield purification ``sum_i sqrt(w_i) |E_i> (x) |E_i*>``.

    Stored as the coefficient matrix ``M`` with ``|psi> = sum_ab M[a, b] |a>|b>``;
    for this purification ``M`` equals ``sqrt(rho_beta)``. The ancilla copy
    A'B' uses the same site layout as the system AB.
    """

    matrix: np.ndarray
    n_sites: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def vector(self) -> np.ndarray:
        return self.matrix.reshape(-1)

    def reduced_system(self) -> np.ndarray:
        """State on AB."""
        return self.matrix @ self.matrix.conj().T

    def cut_a(self, sub: SubsystemSpec) -> np.ndarray:
        """Amplitudes as a ``(d_A, d_B * D)`` matrix for the cut A | B A'B'."""
        psi = sub.split_vectors(self.matrix)
        return psi.reshape(sub.d_A, -1)

    def cut_a_prime(self, sub: SubsystemSpec) -> np.ndarray:
        """Amplitudes as a ``(D * d_B, d_A)`` matrix for the cut A B B' | A'.

        Row index is ``system_index * d_B + b_prime``.
        """
        # ancilla is the row space of M.T
        psi = sub.split_vectors(self.matrix.T)  # (a', b', system)
        return np.transpose(psi, (2, 1, 0)).reshape(-1, sub.d_A)


def purify(ens: GibbsEnsemble, n_sites: int | None = None,
           max_entries: int = PURIFY_MAX_ENTRIES) -> PurifiedState:
    dim = ens.spectrum.dim
    if dim * dim > max_entries:
        raise DimensionError(
            f"explicit purification needs {dim * dim} amplitudes, above the cap of {max_entries}"
        )
    if n_sites is None:
        n_sites = int(round(np.log2(dim)))
    v = ens.spectrum.vectors
    m = (v * np.sqrt(ens.weights)) @ v.conj().T
    return PurifiedState(m, n_sites)


COUNT_MODES = ("levels", "states")


def _lowest(spectrum: SpectralDecomposition, k: int, tol: float | None, count: str) -> np.ndarray:
    if count == "states":
        if not 1 <= k <= len(spectrum.values):
            raise ValueError(f"k must be in [1, {len(spectrum.values)}], got {k}")
        return np.arange(k)
    if count != "levels":
        raise ValueError(f"count must be one of {COUNT_MODES}, got {count!r}")
    part = group_degenerate(spectrum, tol)
    if not 1 <= k <= len(part):
        raise ValueError(f"k_levels must be in [1, {len(part)}], got {k}")
    return np.concatenate([part[i].members for i in range(k)])


def truncated_energy_variance(spectrum: SpectralDecomposition, k_levels: int, beta: float,
                              tol: float | None = None, count: str = "levels") -> float:
    """Energy variance of the Gibbs distribution kept on the lowest ``k_levels`` levels.

    With ``count="levels"`` a level is a whole degenerate multiplet; with
    ``count="states"`` the lowest ``k_levels`` eigenstates are kept one by one,
    so a degenerate ground doublet alone gives zero at ``k_levels=2``.
    """
    keep = _lowest(spectrum, k_levels, tol, count)
    values = spectrum.values[keep]
    w, _ = boltzmann_weights(values, beta)
    return _variance(w, values)


def level_gaps(spectrum: SpectralDecomposition, n_levels: int, tol: float | None = None,
               count: str = "levels") -> np.ndarray:
    """Gaps ``E_j - E_0`` of the first ``n_levels`` excited levels or states (NaN-padded)."""
    if count == "states":
        e = spectrum.values
    elif count == "levels":
        if tol is None:
            tol = default_degeneracy_tol(spectrum.values)
        e = group_degenerate(spectrum, tol).energies
    else:
        raise ValueError(f"count must be one of {COUNT_MODES}, got {count!r}")
    out = np.full(n_levels, np.nan)
    gaps = e[1:n_levels + 1] - e[0]
    out[:len(gaps)] = gaps
    return out

"""Dense Hermitian linear algebra used throughout the package.

Operators are plain 2-D numpy arrays. Functions that require Hermitian or
positive semidefinite input check it and raise a ``ValueError`` subclass
with a short diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

HERMITIAN_ATOL = 1e-12
PSD_ATOL = 1e-12
MAX_KRON_ENTRIES = 2**26


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


class DimensionError(ValueError):
    pass


def as_square(op) -> np.ndarray:
    a = np.asarray(op)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def check_hermitian(op, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Return ``op`` as an array, raising if any entry pair breaks Hermiticity."""
    a = as_square(op)
    dev = np.abs(a - a.conj().T)
    worst = float(dev.max())
    if worst > atol:
        i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
        raise NotHermitianError(
            f"matrix is not Hermitian: |A[{i},{j}] - conj(A[{j},{i}])| = {worst:.3e} "
            f"(A[{i},{j}]={a[i, j]}, A[{j},{i}]={a[j, i]}), tolerance {atol:g}"
        )
    return a


def _real_if_possible(a: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(a) and not np.any(a.imag):
        return np.ascontiguousarray(a.real)
    return a


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with eigenvectors stored column-wise.

    ``vectors`` is real when the decomposed operator was real symmetric.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values) @ v.conj().T

    def function(self, f) -> np.ndarray:
        """Apply the scalar function ``f`` spectrally."""
        v = self.vectors
        return (v * f(self.values)) @ v.conj().T


def _block_components(a: np.ndarray) -> tuple[int, np.ndarray]:
    n_comp, labels = connected_components(csr_matrix(a != 0), directed=False)
    return n_comp, labels


def eigh(op, check: bool = True, split_blocks: bool = True) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    When ``split_blocks`` is set, the matrix is first split into the
    connected components of its nonzero pattern (e.g. symmetry sectors of a
    spin Hamiltonian written in the computational basis) and each block is
    diagonalized separately. The result is an exact eigendecomposition of
    the full matrix in either case; eigenvalues are returned in ascending
    order with a stable sort so the output is a fixed function of the
    input bits.
    """
    a = check_hermitian(op) if check else as_square(op)
    a = _real_if_possible(a)
    n = a.shape[0]
    if split_blocks and n > 1:
        n_comp, labels = _block_components(a)
    else:
        n_comp, labels = 1, np.zeros(n, dtype=int)
    if n_comp == 1:
        values, vectors = np.linalg.eigh(a)
        return SpectralDecomposition(values, vectors)

    values = np.empty(n)
    vectors = np.zeros((n, n), dtype=a.dtype)
    col = 0
    for c in range(n_comp):
        idx = np.flatnonzero(labels == c)
        w, v = np.linalg.eigh(a[np.ix_(idx, idx)])
        k = len(idx)
        values[col:col + k] = w
        vectors[idx, col:col + k] = v
        col += k
    order = np.argsort(values, kind="stable")
    return SpectralDecomposition(values[order], np.ascontiguousarray(vectors[:, order]))


def kron(a, b) -> np.ndarray:
    """Tensor product; an integer argument stands for the identity of that dimension.

    Row index convention: ``i_a * dim_b + i_b``.
    """
    a = np.eye(a) if isinstance(a, (int, np.integer)) else as_square(a)
    b = np.eye(b) if isinstance(b, (int, np.integer)) else as_square(b)
    dim = a.shape[0] * b.shape[0]
    if dim * dim > MAX_KRON_ENTRIES:
        raise DimensionError(f"tensor product of dimension {dim} exceeds the {MAX_KRON_ENTRIES}-entry cap")
    return np.kron(a, b)


def partial_trace(op, dims: tuple[int, int], keep: str = "A") -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``C^dA (x) C^dB``."""
    a = as_square(op)
    d_a, d_b = dims
    if d_a * d_b != a.shape[0]:
        raise DimensionError(f"dims {dims} do not factor an operator of dimension {a.shape[0]}")
    t = a.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        return np.einsum("ibjb->ij", t)
    if keep == "B":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def _psd_spectrum(op, rank_tol: float | None) -> tuple[SpectralDecomposition, float]:
    spec = eigh(op, split_blocks=False)
    top = max(float(np.abs(spec.values).max()), 1.0)
    if spec.values[0] < -PSD_ATOL * top:
        raise NotPSDError(f"operator has eigenvalue {spec.values[0]:.3e} below -{PSD_ATOL:g}")
    if rank_tol is None:
        rank_tol = default_rank_tol(spec.values)
    return spec, rank_tol


def default_rank_tol(values: np.ndarray) -> float:
    return 1e-12 * max(float(np.max(values)), 0.0)


def pinv_power(op, m: int = 1, rank_tol: float | None = None) -> np.ndarray:
    """``m``-th power of the Moore-Penrose pseudoinverse of a PSD operator.

    Eigenvalues at or below ``rank_tol`` (default ``1e-12 * max eigenvalue``)
    are treated as kernel and mapped to zero.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    spec, rank_tol = _psd_spectrum(op, rank_tol)
    inv = np.zeros_like(spec.values)
    sup = spec.values > rank_tol
    inv[sup] = spec.values[sup] ** (-m)
    return spec.function(lambda _: inv)


def support_projector(op, rank_tol: float | None = None) -> np.ndarray:
    spec, rank_tol = _psd_spectrum(op, rank_tol)
    v = spec.vectors[:, spec.values > rank_tol]
    return v @ v.conj().T


@dataclass(frozen=True)
class Eigenspace:
    energy: float
    members: np.ndarray

    @property
    def multiplicity(self) -> int:
        return len(self.members)

    def projector(self, vectors: np.ndarray, normalized: bool = True) -> np.ndarray:
        """Projector onto the eigenspace; trace 1 if ``normalized`` else trace n_i."""
        v = vectors[:, self.members]
        p = v @ v.conj().T
        return p / self.multiplicity if normalized else p


@dataclass(frozen=True)
class EigenspacePartition:
    groups: list[Eigenspace] = field(default_factory=list)
    tol: float = 0.0

    def __len__(self) -> int:
        return len(self.groups)

    def __getitem__(self, i: int) -> Eigenspace:
        return self.groups[i]

    @property
    def energies(self) -> np.ndarray:
        return np.array([g.energy for g in self.groups])

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([g.multiplicity for g in self.groups])


def default_degeneracy_tol(values: np.ndarray) -> float:
    spread = float(values[-1] - values[0]) if len(values) else 0.0
    return 1e-9 * spread if spread > 0 else 1e-9


def group_degenerate(spec: SpectralDecomposition, tol: float | None = None) -> EigenspacePartition:
    """Group ascending eigenvalues into multiplets.

    A new group starts whenever the gap to the previous eigenvalue exceeds
    ``tol``. The group energy is the mean of its members.
    """
    values = np.asarray(spec.values)
    if tol is None:
        tol = default_degeneracy_tol(values)
    if tol <= 0:
        raise ValueError("degeneracy tolerance must be positive")
    breaks = np.flatnonzero(np.diff(values) > tol) + 1
    groups = [
        Eigenspace(float(values[idx].mean()), idx)
        for idx in np.split(np.arange(len(values)), breaks)
    ]
    return EigenspacePartition(groups, tol)

"""Spin-1/2 chain Hamiltonians and subsystem bookkeeping.

Basis convention: site ``i`` of an ``L``-site chain is bit ``L - 1 - i`` of
the computational basis index, so site 0 is the most significant bit and
``kron(op_0, op_1, ..., op_{L-1})`` acts site by site. Reshaping a state
vector to ``(2,) * L`` therefore puts the axes in site order.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

MIN_SITES = 2
MAX_SITES = 13
FAMILIES = ("ising", "xxz")

PauliTerm = tuple[float, dict[int, str]]


@dataclass(frozen=True)
class SpinChainModel:
    """Ising chain in a transverse field or XXZ chain.

    ``h`` is only used by the Ising family and ``delta`` only by XXZ.
    """

    family: str
    L: int
    J: float = 1.0
    h: float = 0.0
    delta: float = 0.0
    periodic: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}; expected one of {FAMILIES}")
        if not (MIN_SITES <= int(self.L) <= MAX_SITES) or int(self.L) != self.L:
            raise ValueError(f"L must be an integer in [{MIN_SITES}, {MAX_SITES}], got {self.L}")
        if not np.isfinite(self.J) or self.J == 0:
            raise ValueError(f"J must be finite and nonzero, got {self.J}")
        for name in ("h", "delta"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def param_name(self) -> str:
        return "h" if self.family == "ising" else "delta"

    @property
    def param(self) -> float:
        return getattr(self, self.param_name)

    def with_param(self, name: str, value) -> SpinChainModel:
        if name == "L":
            value = int(value)
        return dataclasses.replace(self, **{name: value})

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "L": self.L,
            "J": self.J,
            self.param_name: self.param,
            "periodic": self.periodic,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> SpinChainModel:
        known = {"family", "L", "J", "h", "delta", "periodic"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown model keys: {sorted(extra)}")
        family = d.get("family")
        wrong = "delta" if family == "ising" else "h"
        if wrong in d:
            raise ValueError(f"key {wrong!r} does not apply to family {family!r}")
        return cls(
            family=family,
            L=int(d["L"]),
            J=float(d.get("J", 1.0)),
            h=float(d.get("h", 0.0)),
            delta=float(d.get("delta", 0.0)),
            periodic=bool(d.get("periodic", True)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> SpinChainModel:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SubsystemSpec:
    """Contiguous window of ``n_A`` sites starting at ``start`` on an ``L``-site chain.

    The window wraps around the chain end. Operators and vectors are
    brought into window-first order by a cyclic shift of the sites: the
    window sites ``start, ..., start + n_A - 1`` followed by the remaining
    sites in cyclic order.
    """

    L: int
    n_A: int
    start: int = 0

    def __post_init__(self):
        if not 1 <= self.n_A <= self.L:
            raise ValueError(f"n_A must be in [1, L={self.L}], got {self.n_A}")
        if not 0 <= self.start < self.L:
            raise ValueError(f"start must be in [0, {self.L}), got {self.start}")

    @property
    def d_A(self) -> int:
        return 2**self.n_A

    @property
    def d_B(self) -> int:
        return 2 ** (self.L - self.n_A)

    @property
    def dims(self) -> tuple[int, int]:
        return self.d_A, self.d_B

    @property
    def sites(self) -> list[int]:
        return [(self.start + k) % self.L for k in range(self.n_A)]

    @property
    def complement(self) -> list[int]:
        return [(self.start + k) % self.L for k in range(self.n_A, self.L)]

    @property
    def site_order(self) -> list[int]:
        return self.sites + self.complement

    @property
    def is_whole(self) -> bool:
        return self.n_A == self.L

    def split_vectors(self, vectors: np.ndarray) -> np.ndarray:
        """Reshape column vectors ``(2**L, N)`` into ``(d_A, d_B, N)``."""
        n = vectors.shape[1]
        t = vectors.reshape((2,) * self.L + (n,))
        if self.start:
            t = np.transpose(t, self.site_order + [self.L])
        return t.reshape(self.d_A, self.d_B, n)

    def permute_operator(self, op: np.ndarray) -> np.ndarray:
        """Rewrite a ``2**L`` operator in window-first site order."""
        if self.start == 0:
            return op
        L = self.L
        order = self.site_order
        t = op.reshape((2,) * (2 * L))
        t = np.transpose(t, order + [L + s for s in order])
        return t.reshape(2**L, 2**L)


_PHASE = {"x": (1, 1.0, 1.0), "y": (1, 1j, -1j), "z": (0, 1.0, -1.0)}


def pauli_string(L: int, ops: Mapping[int, str]) -> np.ndarray:
    """Dense ``2**L`` matrix of a product of Pauli operators.

    Built directly from bit arithmetic: a Pauli string maps basis state
    ``b`` to ``b ^ flipmask`` with a phase fixed by the bits of ``b``.
    """
    if len(ops) != len(set(ops)):
        raise ValueError("duplicate site in Pauli string")
    dim = 2**L
    b = np.arange(dim)
    flip = 0
    phase = np.ones(dim, dtype=complex)
    for site, p in ops.items():
        if not 0 <= site < L:
            raise ValueError(f"site {site} out of range for L={L}")
        if p not in _PHASE:
            raise ValueError(f"unknown Pauli label {p!r}")
        flips, up, down = _PHASE[p]
        bit = L - 1 - site
        occupied = (b >> bit) & 1
        phase *= np.where(occupied, down, up)
        flip |= flips << bit
    out = np.zeros((dim, dim), dtype=complex)
    out[b ^ flip, b] = phase
    return out


def _bonds(model: SpinChainModel) -> list[tuple[int, int]]:
    L = model.L
    last = L if model.periodic else L - 1
    return [(i, (i + 1) % L) for i in range(last)]


def pauli_terms(model: SpinChainModel) -> list[PauliTerm]:
    """Hamiltonian as a list of ``(coefficient, {site: pauli})`` terms."""
    J = model.J
    terms: list[PauliTerm] = []
    if model.family == "ising":
        for i, j in _bonds(model):
            terms.append((-J, {i: "x", j: "x"}))
        if model.h != 0:
            for i in range(model.L):
                terms.append((-J * model.h, {i: "z"}))
    else:
        for i, j in _bonds(model):
            terms.append((J, {i: "x", j: "x"}))
            terms.append((J, {i: "y", j: "y"}))
            if model.delta != 0:
                terms.append((J * model.delta, {i: "z", j: "z"}))
    return terms


def _assemble(L: int, terms) -> np.ndarray:
    dim = 2**L
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, ops in terms:
        out += coeff * pauli_string(L, ops)
    return out


def build_hamiltonian(model: SpinChainModel) -> np.ndarray:
    return _assemble(model.L, pauli_terms(model))


def _restricted(model: SpinChainModel, sites: list[int]) -> np.ndarray:
    pos = {s: k for k, s in enumerate(sites)}
    inside = [
        (c, {pos[s]: p for s, p in ops.items()})
        for c, ops in pauli_terms(model)
        if all(s in pos for s in ops)
    ]
    return _assemble(len(sites), inside)


def local_hamiltonian(model: SpinChainModel, sub: SubsystemSpec) -> np.ndarray:
    """Sum of the terms supported inside the window, on the ``d_A`` space."""
    return _restricted(model, sub.sites)


def complement_hamiltonian(model: SpinChainModel, sub: SubsystemSpec) -> np.ndarray:
    """Sum of the terms supported inside the complement, on the ``d_B`` space.

    Returns the 1x1 zero matrix when the window is the whole chain.
    """
    if sub.is_whole:
        return np.zeros((1, 1), dtype=complex)
    return _restricted(model, sub.complement)


def interaction_hamiltonian(model: SpinChainModel, sub: SubsystemSpec) -> np.ndarray:
    """``H - H_A (x) 1 - 1 (x) H_B`` in window-first order."""
    h = sub.permute_operator(build_hamiltonian(model))
    h_a = local_hamiltonian(model, sub)
    h_b = complement_hamiltonian(model, sub)
    return h - np.kron(h_a, np.eye(sub.d_B)) - np.kron(np.eye(sub.d_A), h_b)


def translation_operator(L: int) -> np.ndarray:
    """Permutation matrix moving the state on site ``i`` to site ``i + 1``."""
    dim = 2**L
    b = np.arange(dim)
    # site i -> i+1 is a right rotation of the bit string read from site 0
    shifted = (b >> 1) | ((b & 1) << (L - 1))
    out = np.zeros((dim, dim))
    out[shifted, b] = 1.0
    return out


def total_sz(L: int) -> np.ndarray:
    return sum(pauli_string(L, {i: "z"}) for i in range(L))


def spin_flip(L: int) -> np.ndarray:
    return pauli_string(L, {i: "x" for i in range(L)})

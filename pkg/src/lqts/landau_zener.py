"""Heat capacity of a two-level (Landau-Zener) spectrum.

Ground multiplet of degeneracy ``n0`` at energy 0, excited multiplet of
degeneracy ``n1`` at ``delta_e``. With ``p`` the excited population the
energy variance is ``delta_e**2 * p * (1 - p)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .extrema import local_extrema

BRACKET = (2.0, 20.0)


@dataclass(frozen=True)
class TwoLevelSystem:
    delta_e: float
    beta: float
    n0: int = 1
    n1: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.delta_e) and self.delta_e >= 0):
            raise ValueError("delta_e must be finite and non-negative")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError("beta must be finite and positive")
        if self.n0 < 1 or self.n1 < 1:
            raise ValueError("degeneracies must be >= 1")

    def heat_capacity(self) -> float:
        return float(lz_heat_capacity(self.delta_e, self.beta, self.n0, self.n1))


def excited_population(delta_e, beta, n0=1, n1=1):
    return expit(np.log(n1 / n0) - beta * np.asarray(delta_e, dtype=float))


def lz_heat_capacity(delta_e, beta, n0=1, n1=1):
    """Energy variance of the two-level Gibbs state; vectorized over ``delta_e``."""
    de = np.asarray(delta_e, dtype=float)
    p = excited_population(de, beta, n0, n1)
    out = de**2 * p * (1.0 - p)
    return float(out) if out.ndim == 0 else out


def _stationarity(x: float, ratio: float) -> float:
    # log form of exp(x) = ratio * (2 + x) / (x - 2)
    return x - np.log(ratio) - np.log((2.0 + x) / (x - 2.0))


def lz_optimal_gap(n0: int = 1, n1: int = 1, beta: float = 1.0) -> float:
    """Gap ``delta_e*`` maximizing the two-level heat capacity at fixed ``beta``.

    Solves ``exp(x) = (n1/n0) (2 + x) / (x - 2)`` for ``x = beta * delta_e``
    on ``(2, 20]``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    ratio = n1 / n0
    lo = BRACKET[0] * (1 + 1e-12)
    hi = BRACKET[1]
    f_lo, f_hi = _stationarity(lo, ratio), _stationarity(hi, ratio)
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValueError(f"no root of the stationarity condition in {BRACKET} for n1/n0 = {ratio}")
    x = brentq(_stationarity, lo, hi, args=(ratio,), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return x / beta


def stationarity_residual(delta_e: float, n0: int, n1: int, beta: float) -> float:
    x = beta * delta_e
    return float(np.exp(x) - n1 / n0 * (2 + x) / (x - 2))


@dataclass(frozen=True)
class SweepClassification:
    delta_e_star: float
    classification: str
    extrema: list[dict] = field(default_factory=list)
    gamma_c: float = float("nan")
    delta_e_min: float = float("nan")
    consistent: bool = True

    def to_dict(self) -> dict:
        return {
            "delta_e_star": self.delta_e_star,
            "classification": self.classification,
            "extrema": self.extrema,
        }


def _check_profile(gamma: np.ndarray, gap: np.ndarray) -> int:
    if gamma.shape != gap.shape or gamma.ndim != 1 or len(gamma) < 3:
        raise ValueError("gap profile needs matching 1-D arrays with at least 3 samples")
    if np.any(np.diff(gamma) <= 0):
        raise ValueError("control parameter must be strictly increasing")
    if np.any(gap < 0) or not np.all(np.isfinite(gap)):
        raise ValueError("gaps must be finite and non-negative")
    i = int(np.argmin(gap))
    d = np.diff(gap)
    if i in (0, len(gap) - 1) or np.all(d == 0):
        raise ValueError("gap profile has no interior minimum")
    if np.any(d[:i] > 0) or np.any(d[i:] < 0):
        raise ValueError("gap profile is not unimodal (decreasing then increasing)")
    return i


def lz_classify_sweep(gamma, gap, n0: int = 1, n1: int = 1, beta: float = 1.0) -> SweepClassification:
    """Classify the heat-capacity curve along a gap profile ``gap(gamma)``.

    A single maximum at the gap minimum ``gamma_c`` when ``min(gap) > delta_e*``,
    otherwise a maximum, a local minimum at ``gamma_c`` and a second maximum.
    """
    gamma = np.asarray(gamma, dtype=float)
    gap = np.asarray(gap, dtype=float)
    i = _check_profile(gamma, gap)
    star = lz_optimal_gap(n0, n1, beta)
    label = "single_maximum" if gap[i] > star else "max_min_max"

    heat = lz_heat_capacity(gap, beta, n0, n1)
    found = local_extrema(gamma, heat)
    extrema = [{"gamma": g, "kind": kind} for g, _, kind in found]
    kinds = [e["kind"] for e in extrema]
    expected = ["max"] if label == "single_maximum" else ["max", "min", "max"]
    return SweepClassification(star, label, extrema, float(gamma[i]), float(gap[i]), kinds == expected)

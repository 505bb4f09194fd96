"""Parameter sweeps over spin-chain models and their CSV/JSON outputs.

Every grid point is an independent task. With ``workers > 1`` the points
are spread over a process pool and gathered back in grid order, so the
output does not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Sequence

import numpy as np

from .extrema import nearest_local_extremum, parabolic_vertex
from .landau_zener import lz_classify_sweep
from .linalg import eigh
from .models import MAX_SITES, SpinChainModel, SubsystemSpec, build_hamiltonian
from .susceptibility import lqts, lqts_eigendiff, lqts_fidelity
from .thermal import (
    COUNT_MODES,
    PURIFY_MAX_ENTRIES,
    energy_variance,
    gibbs,
    level_gaps,
    truncated_energy_variance,
)

CSV_COLUMNS = [
    "family", "L", "J", "param_name", "param_value", "beta", "n_A", "method",
    "lqts_beta", "heat_capacity", "complement_qfi", "dropped_lambda_mass", "error",
]
METHODS = ("schmidt", "eigendiff", "fidelity")
SWEEP_PARAMS = ("h", "delta", "beta", "n_A")
DEFAULT_COUNT = 41


class ConfigError(ValueError):
    pass


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid:
    min: float
    max: float
    count: int = DEFAULT_COUNT
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError("grid count must be at least 2")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"unknown grid spacing {self.spacing!r}")
        if self.spacing == "log" and (self.min <= 0 or self.max <= 0):
            raise ConfigError("log grid needs positive bounds")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    @classmethod
    def parse(cls, text: str) -> Grid:
        """``min:max:count`` with an optional ``:log`` suffix."""
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ConfigError(f"grid must look like min:max:count[:log], got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]), int(parts[2]), *(parts[3:] or ["linear"]))
        except ValueError as exc:
            raise ConfigError(f"bad grid {text!r}: {exc}") from exc

    @classmethod
    def from_dict(cls, d: dict) -> Grid:
        return cls(float(d["min"]), float(d["max"]), int(d.get("count", DEFAULT_COUNT)),
                   d.get("spacing", "linear"))


def check_resources(L: int, methods: Iterable[str] = ("schmidt",)) -> None:
    if L > MAX_SITES:
        raise ResourceError(f"L={L}: Hilbert space 2^{L} is above the 2^{MAX_SITES} cap")
    if "eigendiff" in methods and 4**L > PURIFY_MAX_ENTRIES:
        raise ResourceError(f"method 'eigendiff' needs an explicit purification; L={L} is too large")


@dataclass(frozen=True)
class SweepJob:
    model: SpinChainModel
    beta: float
    param: str
    grid: Grid
    subsystems: tuple[int, ...] = (1,)
    start: int = 0
    methods: tuple[str, ...] = ("schmidt",)
    out: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ConfigError(f"swept parameter must be one of {SWEEP_PARAMS}, got {self.param!r}")
        if self.param in ("h", "delta") and self.param != self.model.param_name:
            raise ConfigError(f"parameter {self.param!r} does not apply to family {self.model.family!r}")
        bad = set(self.methods) - set(METHODS)
        if bad or not self.methods:
            raise ConfigError(f"methods must be drawn from {METHODS}, got {sorted(bad)}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.param == "beta" and self.grid.min <= 0:
            raise ConfigError("beta grid must be positive")
        if self.param != "beta" and not self.beta > 0:
            raise ConfigError("beta must be positive")
        for n_a in self.sizes_for_check():
            if not 1 <= n_a <= self.model.L:
                raise ConfigError(f"subsystem size {n_a} outside [1, {self.model.L}]")
        if not 0 <= self.start < self.model.L:
            raise ConfigError("start site outside the chain")

    def sizes_for_check(self) -> list[int]:
        return [int(v) for v in self.points()] if self.param == "n_A" else list(self.subsystems)

    def points(self) -> list[float]:
        vals = self.grid.values()
        if self.param == "n_A":
            return sorted({int(round(v)) for v in vals})
        return [float(v) for v in vals]


def _method_result(method: str, ens, sub):
    if method == "schmidt":
        return lqts(ens, sub)
    if method == "eigendiff":
        return lqts_eigendiff(ens, sub)
    return lqts_fidelity(ens, sub)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def sweep_point(job: SweepJob, value) -> list[dict]:
    """All CSV rows for one grid point."""
    model, beta = job.model, job.beta
    if job.param in ("h", "delta"):
        model = model.with_param(job.param, value)
    elif job.param == "beta":
        beta = float(value)
    sizes = [int(value)] if job.param == "n_A" else list(job.subsystems)
    base = {
        "family": model.family, "L": model.L, "J": model.J, "param_name": job.param,
        "param_value": value, "beta": beta,
    }
    rows = []
    try:
        ens = gibbs(eigh(build_hamiltonian(model)), beta)
        heat = energy_variance(ens)
    except Exception as exc:  # noqa: BLE001 - recorded per row, sweep continues
        for n_a in sizes:
            for m in job.methods:
                rows.append({**base, "n_A": n_a, "method": m, "error": f"{type(exc).__name__}: {exc}"})
        return rows
    for n_a in sizes:
        sub = SubsystemSpec(model.L, n_a, job.start)
        for m in job.methods:
            row = {**base, "n_A": n_a, "method": m, "heat_capacity": heat}
            try:
                res = _method_result(m, ens, sub)
                row.update(lqts_beta=res.lqts_beta, complement_qfi=res.complement_phase_qfi,
                           dropped_lambda_mass=res.dropped_lambda_mass,
                           error="" if res.reliable else "unreliable: lambda floor mass")
            except Exception as exc:  # noqa: BLE001
                row["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    return rows


def _map_ordered(fn, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_sweep(job: SweepJob) -> list[dict]:
    check_resources(job.model.L, job.methods)
    chunks = _map_ordered(partial(sweep_point, job), job.points(), job.workers)
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows: list[dict], columns: Sequence[str] = CSV_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def failed_rows(rows: list[dict]) -> int:
    return sum(1 for r in rows if r.get("error") and not str(r["error"]).startswith("unreliable"))


# --- peak scaling ------------------------------------------------------------

SCALING_POINTS = {
    # family, parameter window, extremum kind, expected location
    "peak": ("ising", (0.2, 2.0), "max", 1.0),
    "ferro": ("xxz", (-1.5, -0.5), "min", -1.0),
    "antiferro": ("xxz", (0.5, 1.5), "min", 1.0),
}
# the single-site XXZ LQTS vanishes identically; values this far below the
# largest extremum are roundoff and carry no scaling
NULL_RELATIVE = 1e-12


@dataclass
class ScalingFit:
    family: str
    L: int
    beta: float
    point: str
    points: list[dict] = field(default_factory=list)
    alpha: float = float("nan")
    prefactor: float = float("nan")
    residual: float = float("nan")
    window: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "family": self.family, "L": self.L, "beta": self.beta, "point": self.point,
            "alpha": self.alpha, "prefactor": self.prefactor, "residual": self.residual,
            "window": self.window, "points": self.points,
        }


def _lqts_profile(model: SpinChainModel, beta: float, value: float, sizes: Sequence[int]) -> list[float]:
    m = model.with_param(model.param_name, value)
    ens = gibbs(eigh(build_hamiltonian(m)), beta)
    return [lqts(ens, SubsystemSpec(m.L, n)).lqts_beta for n in sizes]


def fit_power_law(n_over_l: np.ndarray, values: np.ndarray) -> tuple[float, float, float]:
    """Least-squares fit of ``log(value) = alpha log(n/L) + c``; returns ``(alpha, exp(c), rms)``."""
    x, y = np.log(n_over_l), np.log(values)
    alpha, c = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (alpha * x + c)) ** 2)))
    return float(alpha), float(np.exp(c)), rms


def run_peak_scaling(L: int, point: str = "peak", beta: float | None = None,
                     sizes: Sequence[int] | None = None, grid: Grid | None = None,
                     workers: int = 1) -> ScalingFit:
    """Extremum of the LQTS over the model parameter, per subsystem size, and its power-law fit.

    For each ``n_A`` the grid-local extremum nearest the expected location
    is refined by a parabola and re-evaluated. ``beta`` defaults to
    ``3 L / 4``. The fit uses sizes ``n_A <= L/2`` whose extremum is
    interior and whose value is not negligible against the largest one.
    """
    if point not in SCALING_POINTS:
        raise ConfigError(f"point must be one of {sorted(SCALING_POINTS)}")
    family, window, kind, target = SCALING_POINTS[point]
    check_resources(L)
    beta = 0.75 * L if beta is None else float(beta)
    sizes = list(range(1, L // 2 + 1)) if sizes is None else [int(s) for s in sizes]
    grid = grid or Grid(*window, DEFAULT_COUNT)
    model = SpinChainModel(family, L)
    xs = grid.values()

    table = np.array(_map_ordered(partial(_lqts_profile, model, beta, sizes=sizes), list(xs), workers))
    fit = ScalingFit(family, L, beta, point)
    for col, n in enumerate(sizes):
        ys = table[:, col]
        i, on_edge = nearest_local_extremum(xs, ys, target, kind)
        loc, val = float(xs[i]), float(ys[i])
        if not on_edge:
            xv, _ = parabolic_vertex(xs, ys, i)
            refined = _lqts_profile(model, beta, xv, [n])[0]
            better = refined > val if kind == "max" else refined < val
            if better:
                loc, val = xv, refined
        fit.points.append({"n_A": n, "location": loc, "value": val, "boundary": on_edge})
    scale = max(abs(p["value"]) for p in fit.points)
    for p in fit.points:
        p["used"] = (not p["boundary"]) and p["value"] > NULL_RELATIVE * scale and 2 * p["n_A"] <= L
    used = [p for p in fit.points if p["used"]]
    fit.window = [p["n_A"] for p in used]
    if len(used) < 3:
        raise ValueError(f"only {len(used)} usable extrema; a power-law fit needs at least 3")
    fit.alpha, fit.prefactor, fit.residual = fit_power_law(
        np.array([p["n_A"] for p in used]) / L, np.array([p["value"] for p in used])
    )
    return fit


# --- few-level heat capacity -------------------------------------------------

def few_level_point(model: SpinChainModel, beta: float, param: str, k_list: Sequence[int],
                    n_gaps: int, count: str, value: float) -> dict:
    m = model.with_param(param, value) if param in ("h", "delta") else model
    b = float(value) if param == "beta" else beta
    row = {"family": m.family, "L": m.L, "J": m.J, "param_name": param, "param_value": value, "beta": b}
    try:
        spec = eigh(build_hamiltonian(m))
        row["full_variance"] = energy_variance(gibbs(spec, b))
        for k in k_list:
            row[f"var_k{k}"] = truncated_energy_variance(spec, k, b, count=count)
        for j, g in enumerate(level_gaps(spec, n_gaps, count=count), start=1):
            row[f"gap_{j}"] = float(g)
        row["error"] = ""
    except Exception as exc:  # noqa: BLE001
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def few_level_columns(k_list: Sequence[int], n_gaps: int) -> list[str]:
    return (["family", "L", "J", "param_name", "param_value", "beta", "full_variance"]
            + [f"var_k{k}" for k in k_list] + [f"gap_{j}" for j in range(1, n_gaps + 1)] + ["error"])


def run_few_level(model: SpinChainModel, beta: float, param: str, grid: Grid,
                  k_list: Sequence[int] = (2,), n_gaps: int = 4, workers: int = 1,
                  count: str = "levels") -> list[dict]:
    """Full and truncated energy variance plus the first gaps along a grid.

    ``count`` selects whether ``k`` counts degenerate levels or single
    eigenstates (see :func:`truncated_energy_variance`).
    """
    check_resources(model.L)
    if param not in ("h", "delta", "beta"):
        raise ConfigError("few-level sweeps run over h, delta or beta")
    if count not in COUNT_MODES:
        raise ConfigError(f"count must be one of {COUNT_MODES}")
    fn = partial(few_level_point, model, beta, param, list(k_list), n_gaps, count)
    return _map_ordered(fn, [float(v) for v in grid.values()], workers)


# --- Landau-Zener ------------------------------------------------------------

class ProfileError(ValueError):
    pass


def load_gap_profile(path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column ``gamma, delta_e`` file; commas or whitespace, ``#`` comments, optional header."""
    gamma, gap = [], []
    seen_data = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = [f for f in line.replace(",", " ").split() if f]
            try:
                nums = [float(f) for f in fields]
            except ValueError:
                if not seen_data and not gamma:
                    seen_data = True  # header row
                    continue
                raise ProfileError(f"{path}:{lineno}: cannot parse {raw.strip()!r}") from None
            if len(nums) != 2 or not all(math.isfinite(v) for v in nums):
                raise ProfileError(f"{path}:{lineno}: expected two finite numbers, got {raw.strip()!r}")
            seen_data = True
            gamma.append(nums[0])
            gap.append(nums[1])
    if len(gamma) < 3:
        raise ProfileError(f"{path}: need at least 3 samples, found {len(gamma)}")
    return np.array(gamma), np.array(gap)


def run_lz(beta: float, n0: int, n1: int, profile_path) -> dict:
    gamma, gap = load_gap_profile(profile_path)
    try:
        res = lz_classify_sweep(gamma, gap, n0, n1, beta)
    except ValueError as exc:
        raise ProfileError(f"{profile_path}: {exc}") from exc
    return res.to_dict()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"

"""Command-line front end: ``lqts {sweep,scaling,few-level,lz}``.

Config files are JSON. Schemas (all keys optional unless noted)::

    sweep:     {"model": {"family", "L", "J", "h"|"delta", "periodic"},
                "beta": 9, "sweep": {"param", "min", "max", "count", "spacing"},
                "subsystems": [1, 2, 4], "start": 0, "methods": ["schmidt"],
                "out": "sweep.csv", "workers": 1}
    scaling:   {"L": 10 | [8, 10], "point": "peak"|"ferro"|"antiferro", "beta": null,
                "n_A": [1, 2, 3, 4, 5], "sweep": {"min", "max", "count"},
                "out": "fit.json", "workers": 1}
    few-level: {"model": {...}, "beta": 9, "sweep": {"param", "min", "max", "count"},
                "k_levels": [2], "n_gaps": 4, "count": "levels"|"states",
                "out": "few.csv", "workers": 1}
    lz:        {"beta": 9, "n0": 1, "n1": 1, "profile": "gap.txt" (required), "out": "lz.json"}

Exit codes: 0 success, 2 invalid config, 3 some rows errored, 4 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    METHODS,
    ConfigError,
    Grid,
    ProfileError,
    ResourceError,
    SweepJob,
    check_resources,
    dump_json,
    failed_rows,
    few_level_columns,
    rows_to_csv,
    run_few_level,
    run_lz,
    run_peak_scaling,
    run_sweep,
)
from .models import SpinChainModel

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL, EXIT_RESOURCE = 0, 2, 3, 4

DEFAULT_MODEL = {"family": "ising", "L": 8, "J": 1.0, "h": 1.0, "periodic": True}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg


def _model(cfg: dict, args) -> SpinChainModel:
    d = dict(cfg.get("model", DEFAULT_MODEL))
    if args.L is not None:
        d["L"] = args.L
    if isinstance(d.get("L"), int):
        check_resources(d["L"])
    return SpinChainModel.from_dict(d)


def _grid(cfg: dict, args, default: Grid) -> tuple[str | None, Grid]:
    sw = cfg.get("sweep", {})
    grid = Grid.parse(args.grid) if args.grid else (Grid.from_dict(sw) if "min" in sw else default)
    return sw.get("param"), grid


def _methods(cfg: dict, args) -> tuple[str, ...]:
    if args.method:
        return METHODS if args.method == "all" else (args.method,)
    m = cfg.get("methods", ["schmidt"])
    if m == "all" or m == ["all"]:
        return METHODS
    return tuple(m)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _pick(args, cfg, key, default=None):
    v = getattr(args, key, None)
    return v if v is not None else cfg.get(key, default)


def cmd_sweep(args, cfg) -> int:
    model = _model(cfg, args)
    param, grid = _grid(cfg, args, Grid(0.0, 2.0))
    job = SweepJob(
        model=model,
        beta=float(_pick(args, cfg, "beta", 9.0)),
        param=param or model.param_name,
        grid=grid,
        subsystems=tuple(int(n) for n in cfg.get("subsystems", range(1, model.L + 1))),
        start=int(cfg.get("start", 0)),
        methods=_methods(cfg, args),
        out=_pick(args, cfg, "out"),
        workers=int(_pick(args, cfg, "workers", 1)),
    )
    rows = run_sweep(job)
    _emit(rows_to_csv(rows), job.out)
    return EXIT_PARTIAL if failed_rows(rows) else EXIT_OK


def cmd_scaling(args, cfg) -> int:
    ls = args.L if args.L is not None else cfg.get("L", 10)
    ls = ls if isinstance(ls, list) else [ls]
    grid = Grid.parse(args.grid) if args.grid else (
        Grid.from_dict(cfg["sweep"]) if "sweep" in cfg else None)
    fits, status = [], EXIT_OK
    for L in ls:
        try:
            fit = run_peak_scaling(int(L), cfg.get("point", "peak"), _pick(args, cfg, "beta"),
                                   cfg.get("n_A"), grid, int(_pick(args, cfg, "workers", 1)))
            fits.append(fit.to_dict())
        except (ConfigError, ResourceError):
            raise
        except ValueError as exc:
            fits.append({"L": int(L), "error": str(exc)})
            status = EXIT_PARTIAL
    _emit(dump_json(fits if len(fits) > 1 else fits[0]), _pick(args, cfg, "out"))
    return status


def cmd_few_level(args, cfg) -> int:
    model = _model(cfg, args)
    param, grid = _grid(cfg, args, Grid(0.0, 2.0))
    k_list = [int(k) for k in cfg.get("k_levels", [2])]
    n_gaps = int(cfg.get("n_gaps", 4))
    rows = run_few_level(model, float(_pick(args, cfg, "beta", 9.0)), param or model.param_name,
                         grid, k_list, n_gaps, int(_pick(args, cfg, "workers", 1)),
                         cfg.get("count", "levels"))
    _emit(rows_to_csv(rows, few_level_columns(k_list, n_gaps)), _pick(args, cfg, "out"))
    return EXIT_PARTIAL if any(r["error"] for r in rows) else EXIT_OK


def cmd_lz(args, cfg) -> int:
    profile = cfg.get("profile")
    if profile is None:
        raise ConfigError("lz config needs a 'profile' path")
    if args.config and not Path(profile).is_absolute():
        profile = str(Path(args.config).parent / profile)
    report = run_lz(float(_pick(args, cfg, "beta", 9.0)), int(cfg.get("n0", 1)),
                    int(cfg.get("n1", 1)), profile)
    _emit(dump_json(report), _pick(args, cfg, "out"))
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "scaling": cmd_scaling, "few-level": cmd_few_level, "lz": cmd_lz}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON job file")
    common.add_argument("--L", type=int, help="chain length override")
    common.add_argument("--beta", type=float, help="inverse temperature override")
    common.add_argument("--grid", help="min:max:count[:log] override for the swept parameter")
    common.add_argument("--out", help="output path (stdout if omitted)")
    common.add_argument("--workers", type=int, help="process pool size")
    common.add_argument("--method", choices=[*METHODS, "all"], help="LQTS method(s)")
    p = argparse.ArgumentParser(prog="lqts", description="Local quantum thermal susceptibility experiments")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = _load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except ResourceError as exc:
        print(f"lqts: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigError, ProfileError, ValueError, KeyError, TypeError) as exc:
        print(f"lqts: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()

"""Command-line entry point: ``exball-nls check|evolve|analyze``.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error,
3 numerical abort (non-finite values or boundary budget), 4 integrity error
(missing snapshot or hash mismatch).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import fft as sfft

from . import diagnostics as dg
from .checks import SUITES
from .errors import BudgetExceededError, ExballError, IntegrityError, NumericalAbort
from .fields import from_spec
from .nls_solver import EvolutionConfig, evolve
from .persistence import load_trajectory, read_manifest, save_trajectory, write_field, write_json
from .radial_core import RadialGrid

log = logging.getLogger("exball_nls")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT, EXIT_INTEGRITY = 0, 1, 2, 3, 4

_TOP_KEYS = {"spec_version", "grid", "evolution", "etas", "initial_condition", "diagnostics", "output_dir", "seed"}
_SECTION_KEYS = {
    "grid": {"L", "M"},
    "evolution": {"p", "dt", "t_start", "t_end", "snapshot_stride", "dealias_factor", "boundary_budget", "nonlinear"},
    "etas": {"eta0", "eta1", "eta2", "eta3"},
    "diagnostics": {"R", "A", "morawetz_windows"},
}


class ConfigError(ExballError):
    pass


def default_config_path():
    return resources.files("exball_nls") / "configs" / "default.json"


def load_config(path) -> dict:
    """Read and validate a run configuration; raises ConfigError naming the bad field."""
    if str(path) == "default":
        text = default_config_path().read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if cfg.get("spec_version") != 1:
        raise ConfigError(f"spec_version must be 1, got {cfg.get('spec_version')!r}")
    for section, allowed in _SECTION_KEYS.items():
        sub = cfg.get(section, {})
        if not isinstance(sub, dict):
            raise ConfigError(f"{section} must be an object")
        bad = set(sub) - allowed
        if bad:
            raise ConfigError(f"unknown keys in {section}: {sorted(bad)}")
    if "grid" not in cfg or "initial_condition" not in cfg:
        raise ConfigError("config needs 'grid' and 'initial_condition'")
    ev = cfg.get("evolution", {})
    for name in ("dt", "t_end", "snapshot_stride"):
        if name in ev and not (isinstance(ev[name], (int, float)) and ev[name] > 0):
            raise ConfigError(f"evolution.{name} must be positive, got {ev[name]!r}")
    return cfg


def build_run(cfg: dict):
    """(grid, u0, EvolutionConfig, EtaConstants) from a validated config."""
    try:
        grid = RadialGrid(**cfg["grid"])
    except ExballError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    try:
        evo = EvolutionConfig(**cfg.get("evolution", {}))
    except ExballError as exc:
        raise ConfigError(f"evolution: {exc}") from exc
    try:
        etas = dg.EtaConstants(**cfg.get("etas", {}))
    except ExballError as exc:
        raise ConfigError(f"etas: {exc}") from exc
    try:
        u0 = from_spec(grid, cfg["initial_condition"], cfg.get("seed"))
    except ExballError as exc:
        raise ConfigError(f"initial_condition: {exc}") from exc
    return grid, u0, evo, etas


def _say(args, msg):
    if not args.quiet:
        print(msg)


def cmd_check(args) -> int:
    results = SUITES[args.suite]()
    ok = True
    for res in results:
        _say(args, res.line())
        if res.passed is False:
            ok = False
    return EXIT_OK if ok else EXIT_FAIL


def cmd_evolve(args) -> int:
    cfg = load_config(args.config)
    grid, u0, evo, etas = build_run(cfg)
    out = Path(args.out or cfg.get("output_dir", "runs/run"))
    try:
        traj = evolve(u0, evo)
    except NumericalAbort as exc:
        print(f"numerical abort at step {exc.step}: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except BudgetExceededError as exc:
        print(f"boundary budget: {exc}", file=sys.stderr)
        return EXIT_ABORT
    extra = {k: cfg[k] for k in ("etas", "initial_condition", "diagnostics", "seed") if k in cfg}
    extra["etas"] = asdict(etas)
    save_trajectory(traj, out, extra)
    radii = cfg.get("diagnostics", {}).get("R", [])
    dg.write_diagnostics_csv(out / "diagnostics.csv", traj, radii)
    dm, de = traj.drifts()
    _say(args, f"snapshots: {len(traj)}  t_final: {traj.times[-1]:.6g}")
    _say(args, f"mass drift: {dm:.3e}")
    _say(args, f"energy drift: {de:.3e}")
    _say(args, f"written: {out}")
    if traj.truncated:
        print(f"boundary budget exceeded; trajectory truncated at t={traj.last_trusted_time}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def _update_report(run_dir: Path, key: str, payload: dict):
    path = run_dir / "report.json"
    report = json.loads(path.read_text()) if path.is_file() else {}
    report[key] = payload
    write_json(path, report)


def cmd_analyze(args) -> int:
    run_dir = Path(args.run_dir)
    manifest = read_manifest(run_dir)
    traj = load_trajectory(run_dir)
    extra = manifest.get("extra", {})
    etas = dg.EtaConstants(**extra.get("etas", {}))
    diag = extra.get("diagnostics", {})
    out = Path(args.out) if args.out else run_dir
    out.mkdir(parents=True, exist_ok=True)

    if args.analysis == "intervals":
        records = dg.classify_intervals(traj, dg.partition_intervals(traj, etas), etas)
        dg.write_intervals_csv(out / "intervals.csv", records)
        summary = dg.interval_summary(records, etas)
        _update_report(out, "intervals", summary)
        _say(args, f"intervals: {summary['n_intervals']}  exceptional: {summary['n_exceptional']}  "
                   f"unexceptional: {summary['n_unexceptional']}")
        _say(args, f"min unexceptional length: {summary['min_unexceptional_length']}  (eta1 = {etas.eta1})")
    elif args.analysis == "morawetz":
        windows = diag.get("morawetz_windows") or [[float(traj.times[0]), float(traj.times[-1])]]
        rows = []
        for ta, tb in windows:
            for A in diag.get("A", [1, 2, 4, 8]):
                val = dg.morawetz_integral(traj, ta, tb, A)
                rows.append((ta, tb, A, val, val / (A * np.sqrt(tb - ta))))
        np.savetxt(out / "morawetz.csv", np.array(rows), delimiter=",", header="t_a,t_b,A,value,ratio",
                   comments="", fmt="%.16e")
        wl6 = dg.weighted_l6_integral(traj)
        payload = {"max_ratio": max(r[4] for r in rows), "weighted_l6": wl6}
        _update_report(out, "morawetz", payload)
        _say(args, f"max Morawetz ratio: {payload['max_ratio']:.6e}  weighted L6: {wl6:.6e}")
    else:
        v, defect = dg.scattering_profile(traj, "forward")
        digest = write_field(out / "v_plus.bin", v.values)
        edges = np.linspace(0, len(traj) - 1, 5).round().astype(int)
        rows = []
        for i0, i1 in zip(edges[:-1], edges[1:]):
            ta, tb = float(traj.times[i0]), float(traj.times[i1])
            rows.append((ta, tb, dg.cauchy_defect(traj, ta, tb)))
        np.savetxt(out / "cauchy_defect.csv", np.array(rows), delimiter=",", header="t_a,t_b,defect",
                   comments="", fmt="%.16e")
        _update_report(out, "scatter", {"final_defect": defect, "v_plus_sha256": digest})
        for ta, tb, d in rows:
            _say(args, f"defect [{ta:g}, {tb:g}]: {d:.6e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exball-nls", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None, help="FFT worker threads (env EXBALL_NLS_THREADS)")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p = sub.add_parser("evolve", help="run an evolution from a JSON config ('default' for the shipped one)")
    p.add_argument("config")
    p = sub.add_parser("analyze", help="diagnostics on a stored run")
    p.add_argument("run_dir")
    p.add_argument("analysis", choices=["intervals", "morawetz", "scatter"])
    return parser


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("EXBALL_NLS_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"EXBALL_NLS_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    handlers = {"check": cmd_check, "evolve": cmd_evolve, "analyze": cmd_analyze}
    try:
        workers = _threads(args)
        if workers < 1:
            raise ConfigError(f"--threads must be >= 1, got {workers}")
        with sfft.set_workers(workers):
            return handlers[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (NumericalAbort, BudgetExceededError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except ExballError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

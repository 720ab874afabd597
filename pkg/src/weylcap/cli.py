"""Configuration-driven experiment runner for the library.

Four subcommands: ``signaling`` builds a tight window and reports its
orthonormality and decay figures, ``capacity`` assembles a channel and
writes the full capacity report, ``lti-sweep`` runs the slow-Doppler
limit sweep, and ``validate`` runs the named self-check suite.

Configs are JSON (TOML accepted); command-line flags override file
values.  Exit codes: 0 success, 1 failed validation check, 2 config
error, 3 numerical error.  Outputs are plain JSON and CSV written
without timestamps, so a fixed config reproduces byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .capacity import capacity_report, lti_limit_sweep
from .channel import (
    GridSpreading,
    PointMassSpreading,
    _set_twist_phase_sign,
    exponential_spreading,
)
from .gabor import GaborSystem, Lattice, tight_window
from .tfcore import (
    TFGridFunction,
    TimeGrid,
    decay_envelope_fit,
    fourier,
    grid_for_scale,
)
from .validate import run_checks

__all__ = ["main"]

_REQUIRED = object()


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 2."""


def _number(cfg: dict, key: str, default=_REQUIRED, minimum=None, exclusive=False) -> float:
    if key not in cfg:
        if default is _REQUIRED:
            raise ConfigError(f"missing config key '{key}'")
        return default
    val = cfg.pop(key)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"config key '{key}' must be a number, got {val!r}")
    val = float(val)
    if minimum is not None and (val <= minimum if exclusive else val < minimum):
        side = "exceed" if exclusive else "be at least"
        raise ConfigError(f"config key '{key}' must {side} {minimum}, got {val}")
    return val


def _integer(cfg: dict, key: str, default=_REQUIRED):
    if key not in cfg:
        if default is _REQUIRED:
            raise ConfigError(f"missing config key '{key}'")
        return default
    val = cfg.pop(key)
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"config key '{key}' must be an integer, got {val!r}")
    return val


def _choice(cfg: dict, key: str, options: tuple, default=_REQUIRED) -> str:
    if key not in cfg:
        if default is _REQUIRED:
            raise ConfigError(f"missing config key '{key}'")
        return default
    val = cfg.pop(key)
    if val not in options:
        raise ConfigError(f"config key '{key}' must be one of {', '.join(options)}, got {val!r}")
    return val


def _flag(cfg: dict, key: str, default: bool = False) -> bool:
    if key not in cfg:
        return default
    val = cfg.pop(key)
    if not isinstance(val, bool):
        raise ConfigError(f"config key '{key}' must be true or false, got {val!r}")
    return val


def _reject_unknown(cfg: dict, command: str) -> None:
    if cfg:
        key = sorted(cfg)[0]
        raise ConfigError(f"unknown config key '{key}' for command '{command}'")


def _load_config(args) -> dict:
    cfg = {}
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()
        if path.suffix.lower() == ".toml":
            try:
                import tomllib as toml_loader
            except ImportError:
                import tomli as toml_loader
            try:
                cfg = toml_loader.loads(text)
            except toml_loader.TOMLDecodeError as exc:
                raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc
        else:
            try:
                cfg = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError(f"config file {path} must hold a table of keys")
    # flags override file values
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.grid_n is not None:
        cfg["grid_n"] = args.grid_n
    if args.grid_dt is not None:
        cfg["grid_dt"] = args.grid_dt
    if args.out is not None:
        cfg["output_dir"] = str(args.out)
    if getattr(args, "checks", None) is not None:
        cfg["checks"] = [name for name in args.checks.split(",") if name]
    if getattr(args, "inject_fault", False):
        cfg["inject_fault"] = True
    return cfg


def _out_dir(cfg: dict, force: bool, filenames: tuple) -> Path:
    if "output_dir" not in cfg:
        raise ConfigError("missing config key 'output_dir' (or pass --out)")
    out = Path(cfg.pop("output_dir"))
    out.mkdir(parents=True, exist_ok=True)
    if not force:
        for name in filenames:
            target = out / name
            if target.exists():
                raise ConfigError(f"output file exists: {target}; pass --force to overwrite")
    return out


def _grid_override(cfg: dict, default_n: int):
    """Explicit grid from overrides, or (None, n) to use module defaults."""
    n = _integer(cfg, "grid_n", default=None)
    dt = _number(cfg, "grid_dt", default=None, minimum=0.0, exclusive=True)
    if n is not None and (n < 16 or n % 2):
        raise ConfigError(f"config key 'grid_n' must be an even integer of at least 16, got {n}")
    if dt is not None:
        half = 0.5 * (n if n is not None else default_n) * dt
        return TimeGrid(-half, dt, n if n is not None else default_n), n or default_n
    return None, (n if n is not None else default_n)


def _dump_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def cmd_signaling(cfg: dict, force: bool) -> int:
    s = _number(cfg, "s", default=1.0, minimum=0.0, exclusive=True)
    rho = _number(cfg, "rho")
    seed = _integer(cfg, "seed", default=None)
    grid, grid_n = _grid_override(cfg, default_n=1024)
    out = _out_dir(cfg, force, ("summary.json", "window.csv"))
    _reject_unknown(cfg, "signaling")
    if rho <= 1.0:
        raise ConfigError(
            f"config key 'rho' = {rho} puts the lattice in the Balian-Low regime; need rho > 1"
        )
    root = np.sqrt(s)
    lattice = Lattice(root / rho, 1.0 / (root * rho))
    if grid is None:
        grid = grid_for_scale(s, n=grid_n)
    psi = tight_window(s, lattice, grid=grid)
    span = range(-3, 4)
    gram = GaborSystem(psi, lattice.adjoint(), span, span).gram()
    gram_max_dev = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
    c_time, rate_time = decay_envelope_fit(psi)
    c_freq, rate_freq = decay_envelope_fit(fourier(psi))
    d_est = float(min(rate_time * root / np.pi, 1.0 - 1e-9))
    payload = {
        "schema_version": 1,
        "command": "signaling",
        "s": s,
        "rho": rho,
        "seed": seed,
        "gram_max_dev": gram_max_dev,
        "decay": {
            "C_time": float(c_time),
            "rate_time": float(rate_time),
            "C_freq": float(c_freq),
            "rate_freq": float(rate_freq),
            "D_est": d_est,
        },
        "units": {
            "s": "dimensionless",
            "rho": "dimensionless",
            "gram_max_dev": "dimensionless",
            "C_time": "dimensionless",
            "rate_time": "hertz",
            "C_freq": "dimensionless",
            "rate_freq": "seconds",
            "D_est": "dimensionless",
        },
    }
    _dump_json(payload, out / "summary.json")
    rows = ["t,real,imag"]
    for t, v in zip(psi.grid.points, psi.values):
        rows.append("%.17g,%.17g,%.17g" % (t, v.real, v.imag))
    (out / "window.csv").write_text("\n".join(rows) + "\n")
    return 0


def cmd_capacity(cfg: dict, force: bool) -> int:
    alpha = _number(cfg, "alpha", minimum=0.0, exclusive=True)
    beta = _number(cfg, "beta", minimum=0.0, exclusive=True)
    rho = _number(cfg, "rho")
    s = _number(cfg, "s", default=None, minimum=0.0, exclusive=True)
    T = _number(cfg, "T", minimum=0.0, exclusive=True)
    W = _number(cfg, "W", minimum=0.0, exclusive=True)
    eta2 = _number(cfg, "eta2", minimum=0.0, exclusive=True)
    p_total = _number(cfg, "P_total", minimum=0.0, exclusive=True)
    seed = _integer(cfg, "seed", default=None)
    phase_seed = _integer(cfg, "phase_seed", default=None)
    kind = _choice(cfg, "channel_kind", ("identity", "exponential", "zero"), default="exponential")
    grid, grid_n = _grid_override(cfg, default_n=2048)
    out = _out_dir(cfg, force, ("summary.json", "atoms.csv"))
    _reject_unknown(cfg, "capacity")
    if phase_seed is None:
        phase_seed = seed
    if kind == "identity":
        spreading = PointMassSpreading(1.0, 0.0, 0.0)
    elif kind == "zero":
        vals = np.zeros((16, 16))
        axis = TimeGrid(-2.0, 0.25, 16)
        spreading = GridSpreading(TFGridFunction(x_grid=axis, w_grid=axis, values=vals))
    else:
        spreading = exponential_spreading(alpha, beta, 1.0, phase_seed=phase_seed)
    rep = capacity_report(
        spreading,
        region=(T, W),
        eta2=eta2,
        total_power=p_total,
        rho=rho,
        s=s,
        alpha=alpha,
        beta=beta,
        grid=grid,
        grid_n=grid_n,
    )
    (out / "summary.json").write_text(rep.to_json())
    (out / "atoms.csv").write_text(rep.to_csv())
    print(
        "csir_exact=%.6f csir_symbol=%.6f csit_exact=%.6f csit_symbol=%.6f "
        "bound_csir=%.6f bound_csit=%.6f"
        % (
            rep.csir_exact,
            rep.csir_symbol,
            rep.csit_exact,
            rep.csit_symbol,
            rep.error_bound_csir,
            rep.error_bound_csit,
        )
    )
    return 0


def cmd_lti_sweep(cfg: dict, force: bool) -> int:
    alpha = _number(cfg, "alpha", minimum=0.0, exclusive=True)
    W = _number(cfg, "W", minimum=0.0, exclusive=True)
    rho = _number(cfg, "rho")
    eta2 = _number(cfg, "eta2", minimum=0.0, exclusive=True)
    mode = _choice(cfg, "mode", ("csir", "csit"), default="csir")
    p_total = _number(cfg, "P_total", default=None, minimum=0.0, exclusive=True)
    allow_truncation = _flag(cfg, "allow_truncation")
    seed = _integer(cfg, "seed", default=None)
    raw_seq = cfg.pop("beta_seq", None)
    out = _out_dir(cfg, force, ("summary.json", "sweep.csv"))
    _reject_unknown(cfg, "lti-sweep")
    if not isinstance(raw_seq, (list, tuple)) or not raw_seq:
        raise ConfigError("config key 'beta_seq' must be a non-empty list of rates")
    beta_seq = []
    for item in raw_seq:
        if isinstance(item, bool) or not isinstance(item, (int, float)) or item <= 0.0:
            raise ConfigError(f"config key 'beta_seq' must hold positive numbers, got {item!r}")
        beta_seq.append(float(item))
    if any(b2 <= b1 for b1, b2 in zip(beta_seq, beta_seq[1:])):
        raise ConfigError("config key 'beta_seq' must be strictly increasing")
    if mode == "csit" and p_total is None:
        raise ConfigError("missing config key 'P_total' (required when mode is 'csit')")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rows = lti_limit_sweep(
            tuple(beta_seq),
            alpha=alpha,
            W=W,
            rho=rho,
            eta2=eta2,
            mode=mode,
            total_power=p_total,
        )
    if len(rows) < len(beta_seq) and not allow_truncation:
        raise RuntimeError(
            f"sweep truncated by the atom budget after {len(rows)} of "
            f"{len(beta_seq)} rates; set allow_truncation to keep the partial table"
        )
    header = "beta,normalized_capacity,lti_target,gap"
    if mode == "csit":
        header += ",power_total"
    lines = [header]
    row_payload = []
    for row in rows:
        entry = {
            "beta": row.beta,
            "normalized_capacity": row.normalized_capacity,
            "lti_target": row.lti_target,
            "gap": row.gap,
        }
        cells = "%.17g,%.17g,%.17g,%.17g" % (
            row.beta,
            row.normalized_capacity,
            row.lti_target,
            row.gap,
        )
        if mode == "csit":
            entry["power_total"] = row.power_total
            cells += ",%.17g" % row.power_total
        row_payload.append(entry)
        lines.append(cells)
    payload = {
        "schema_version": 1,
        "command": "lti-sweep",
        "alpha": alpha,
        "W": W,
        "rho": rho,
        "eta2": eta2,
        "mode": mode,
        "P_total": p_total,
        "seed": seed,
        "beta_seq": beta_seq,
        "rows": row_payload,
        "truncated": len(rows) < len(beta_seq),
        "units": {
            "alpha": "hertz",
            "beta": "seconds",
            "W": "hertz",
            "eta2": "dimensionless",
            "P_total": "dimensionless",
            "normalized_capacity": "bits",
            "lti_target": "bits",
            "gap": "bits",
            "power_total": "dimensionless",
        },
    }
    _dump_json(payload, out / "summary.json")
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    return 0


def cmd_validate(cfg: dict, force: bool) -> int:
    names = cfg.pop("checks", None)
    inject = _flag(cfg, "inject_fault")
    cfg.pop("seed", None)
    cfg.pop("output_dir", None)
    _reject_unknown(cfg, "validate")
    if names is not None:
        if not isinstance(names, list) or any(not isinstance(n, str) for n in names):
            raise ConfigError("config key 'checks' must be a list of check names")
        if not names:
            print("warning: no checks selected", file=sys.stderr)
            return 0
    if inject:
        _set_twist_phase_sign(-1.0)
    try:
        try:
            results = run_checks(names)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    finally:
        if inject:
            _set_twist_phase_sign(1.0)
    for res in results:
        word = "PASS" if res.passed else "FAIL"
        print(f"{word} {res.name} (measure {res.measure:.3e}, threshold {res.threshold:.3e})")
    return 0 if all(res.passed for res in results) else 1


_COMMANDS = {
    "signaling": cmd_signaling,
    "capacity": cmd_capacity,
    "lti-sweep": cmd_lti_sweep,
    "validate": cmd_validate,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed recorded in outputs and used for phases")
    common.add_argument("--force", action="store_true", help="overwrite existing output files")
    common.add_argument("--grid-n", type=int, dest="grid_n", help="grid sample count override")
    common.add_argument("--grid-dt", type=float, dest="grid_dt", help="grid spacing override")
    parser = argparse.ArgumentParser(prog="weylcap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("signaling", parents=[common], help="tight window report")
    sub.add_parser("capacity", parents=[common], help="channel capacity report")
    sub.add_parser("lti-sweep", parents=[common], help="slow-Doppler limit sweep")
    val = sub.add_parser("validate", parents=[common], help="run the self-check suite")
    val.add_argument("--checks", help="comma-separated check names (empty selects none)")
    val.add_argument(
        "--inject-fault",
        action="store_true",
        dest="inject_fault",
        help="flip a twist phase sign to demonstrate the checks catch it",
    )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        return _COMMANDS[args.command](cfg, args.force)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

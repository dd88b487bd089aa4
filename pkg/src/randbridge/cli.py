"""Command-line interface: simulate, density, filter, verify, figures.

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
Every command is byte-reproducible for a fixed seed; numeric output is
written with 15 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Iterable, List, Optional

import numpy as np

from .bridge import BridgeSpec, bridge_marginal_pdf, bridge_transition_pdf
from .config import Config, ConfigError
from .errors import InferenceError
from .gauss import rng_stream
from .info import InfoModel, info_drift, info_posterior, info_transition
from .laws import DiscretePins, LengthLaw
from .random_bridge import RandomBridgeModel, random_bridge_values
from .verify import SUITE_NAMES, VerifyConfig, report_json, run_suite

_FMT = "%.15g"


def _fmt(x: float) -> str:
    return _FMT % (x,)


class CliError(Exception):
    """Usage or configuration problem: exit code 2."""


def _load_config(path: Optional[str]) -> Config:
    if path is None:
        return Config()
    try:
        return Config.from_file(path)
    except FileNotFoundError as exc:
        raise CliError(f"config file not found: {path}") from exc
    except ConfigError as exc:
        raise CliError(f"bad config: {exc}") from exc


def _apply_overrides(cfg: Config, args) -> Config:
    from dataclasses import replace

    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "paths", None) is not None:
        updates["paths"] = args.paths
    if getattr(args, "out", None) is not None:
        updates["out_dir"] = args.out
    return replace(cfg, **updates) if updates else cfg


def _write_paths_csv(path: str, rows: Iterable[tuple]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path_id", "t", "value", "absorbed"])
        for pid, t, value, absorbed in rows:
            writer.writerow([pid, _fmt(t), _fmt(value), int(absorbed)])


def _simulate_rows(model: RandomBridgeModel, grid: np.ndarray, n: int,
                   seed: int, stream: int):
    vals, taus, zs = random_bridge_values(model, grid,
                                          n, rng_stream(seed, stream))
    for pid in range(n):
        for j, t in enumerate(grid):
            yield pid, float(t), float(vals[pid, j]), bool(t >= taus[pid])


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    grid = np.linspace(0.0, cfg.t_max, cfg.n_steps + 1)
    model = cfg.bridge_model()
    out_path = os.path.join(cfg.out_dir, "paths.csv")
    _write_paths_csv(out_path, _simulate_rows(model, grid, cfg.paths,
                                              cfg.seed, 0))
    print(out_path)
    return 0


# the three canonical path sets; the per-path grid runs to the realized
# length (capped far beyond any plausible draw) so every emitted path
# terminates exactly on its pin
_FIGURES = (
    ("fig1_left", LengthLaw.exponential(0.1),
     DiscretePins((0.0, 1.0, 2.0, 3.0), (0.125, 0.375, 0.375, 0.125))),
    ("fig1_right", LengthLaw.exponential(0.1), None),  # standard normal pin
    ("fig2", LengthLaw.exponential(0.1),
     DiscretePins((-4.0, 4.0), (0.3, 0.7))),
)

_FIG_CAP = 400.0


def _figure_rows(model: RandomBridgeModel, n: int, dt: float, seed: int,
                 stream: int):
    rng = rng_stream(seed, stream)
    s_tau, s_pin, s_w = rng.spawn(3)
    taus = np.atleast_1d(model.length.sample(s_tau, n))
    zs = np.atleast_1d(model.pin.sample(s_pin, n))
    from .bridge import bridge_values

    for pid in range(n):
        tau = min(float(taus[pid]), _FIG_CAP)
        grid = np.arange(0.0, tau, dt)
        grid = np.append(grid, tau)
        vals = bridge_values(np.array([taus[pid]]), np.array([zs[pid]]),
                             grid, s_w)[0]
        for t, v in zip(grid, vals):
            yield pid, float(t), float(v), bool(t >= taus[pid])


def cmd_figures(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    from .laws import ContinuousPin

    written = []
    for k, (name, length, pin) in enumerate(_FIGURES):
        model = RandomBridgeModel(length, pin if pin is not None
                                  else ContinuousPin.gaussian())
        out_path = os.path.join(cfg.out_dir, f"{name}.csv")
        _write_paths_csv(out_path, _figure_rows(model, cfg.paths, args.dt,
                                                cfg.seed, 10 + k))
        written.append(out_path)
    print("\n".join(written))
    return 0


def cmd_density(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    n = args.n
    if args.kind == "marginal":
        spec = BridgeSpec(args.r, args.z)
        xs = np.linspace(args.lo, args.hi, n)
        doc = {"kind": "marginal", "x": xs.tolist(),
               "values": [float(bridge_marginal_pdf(spec, args.t, x)) for x in xs]}
    elif args.kind == "transition":
        spec = BridgeSpec(args.r, args.z)
        ys = np.linspace(args.lo, args.hi, n)
        doc = {"kind": "transition", "y": ys.tolist(),
               "values": [float(bridge_transition_pdf(spec, args.t, args.x,
                                                      args.u, y)) for y in ys]}
    elif args.kind == "drift":
        model = cfg.info_model()
        ts = np.linspace(args.t, args.u, args.nt)
        xs = np.linspace(args.lo, args.hi, n)
        doc = {"kind": "drift", "t": ts.tolist(), "x": xs.tolist(),
               "values": [[info_drift(model, float(s), float(x))
                           for x in xs] for s in ts]}
    else:  # info_transition
        model = cfg.info_model()
        kernel = info_transition(model, args.t, args.x, args.u)
        if model.is_pin(args.x):
            ys = np.empty(0)  # absorbed input: no Lebesgue part at all
        else:
            ys = np.linspace(args.lo, args.hi, n)
        doc = {"kind": "info_transition", "y": ys.tolist(),
               "values": kernel.lebesgue(ys).tolist(),
               "atoms": {_fmt(model.z1): kernel.atom1,
                         _fmt(model.z2): kernel.atom2},
               "total_mass": kernel.total_mass()}
    text = json.dumps(doc)
    if args.out_file:
        os.makedirs(os.path.dirname(args.out_file) or ".", exist_ok=True)
        with open(args.out_file, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _read_observations(path: str):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CliError("empty observations file")
        cols = [c.strip().lower() for c in header]
        if cols[:2] != ["t", "value"]:
            raise CliError("observations header must be: t,value")
        for line in reader:
            if not line:
                continue
            rows.append((float(line[0]), float(line[1])))
    if any(b[0] <= a[0] for a, b in zip(rows, rows[1:])):
        raise CliError("observation times must be strictly increasing")
    return rows


def cmd_filter(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    model = cfg.info_model()
    rows = _read_observations(args.observations)
    out_rows: List[dict] = []
    for t, value in rows:
        absorbed = model.is_pin(value)
        row = {"t": t, "value": value, "absorbed": absorbed}
        if absorbed:
            row["p_past"] = 1.0
            row["p_z1"] = float(value == model.z1)
            row["p_z2"] = float(value == model.z2)
            row["drift"] = 0.0
            row["decision"] = "inject" if value == model.z1 else "withdraw"
        else:
            try:
                row["p_past"] = 0.0  # non-absorbed value: length beyond t
                row["p_z1"] = info_posterior(
                    model, t, value, False,
                    lambda r, z: (np.asarray(z) == model.z1).astype(float))
                row["p_z2"] = 1.0 - row["p_z1"]
                row["drift"] = info_drift(model, t, value)
                row["decision"] = "hold"
            except InferenceError as exc:
                row["error"] = str(exc)
        out_rows.append(row)
    text = json.dumps({"rows": out_rows})
    if args.out_file:
        os.makedirs(os.path.dirname(args.out_file) or ".", exist_ok=True)
        with open(args.out_file, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_verify(args) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    names = args.suite or list(cfg.suites) or list(SUITE_NAMES)
    for name in names:
        if name not in SUITE_NAMES:
            raise CliError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    vcfg = VerifyConfig(seed=cfg.seed, size_factor=args.size_factor
                        if args.size_factor is not None else cfg.size_factor)
    os.makedirs(cfg.out_dir, exist_ok=True)
    all_ok = True
    for name in names:
        reports = run_suite(name, vcfg)
        doc = report_json(name, reports, vcfg)
        out_path = os.path.join(cfg.out_dir, f"verify_{name}.json")
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        ok = all(r.passed for r in reports)
        all_ok &= ok
        print(f"{name}: {'pass' if ok else 'FAIL'} "
              f"({sum(r.passed for r in reports)}/{len(reports)}) -> {out_path}")
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randbridge",
        description="Bridges with random length and pinning point: "
                    "simulation, densities, filtering, verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="override the output directory")

    p_sim = sub.add_parser("simulate", help="sample paths to CSV")
    common(p_sim)
    p_sim.add_argument("--paths", type=int, help="number of paths")
    p_sim.set_defaults(func=cmd_simulate)

    p_fig = sub.add_parser("figures", help="emit the three canonical path sets")
    common(p_fig)
    p_fig.add_argument("--paths", type=int, help="number of paths per set")
    p_fig.add_argument("--dt", type=float, default=0.05, help="time step")
    p_fig.set_defaults(func=cmd_figures)

    p_den = sub.add_parser("density", help="evaluate a density on a grid")
    common(p_den)
    p_den.add_argument("--kind", required=True,
                       choices=["marginal", "transition", "info_transition",
                                "drift"])
    p_den.add_argument("--r", type=float, default=1.0, help="bridge length")
    p_den.add_argument("--z", type=float, default=0.0, help="bridge pin")
    p_den.add_argument("--t", type=float, required=True)
    p_den.add_argument("--x", type=float, default=0.0)
    p_den.add_argument("--u", type=float, default=0.0)
    p_den.add_argument("--lo", type=float, default=-3.0)
    p_den.add_argument("--hi", type=float, default=3.0)
    p_den.add_argument("--n", type=int, default=121)
    p_den.add_argument("--nt", type=int, default=9,
                       help="time-grid points for the drift kind")
    p_den.add_argument("--out-file", help="write JSON here instead of stdout")
    p_den.set_defaults(func=cmd_density)

    p_fil = sub.add_parser("filter", help="run the filter over observations")
    common(p_fil)
    p_fil.add_argument("--observations", required=True,
                       help="CSV with header t,value")
    p_fil.add_argument("--out-file", help="write JSON here instead of stdout")
    p_fil.set_defaults(func=cmd_filter)

    p_ver = sub.add_parser("verify", help="run verification suites")
    common(p_ver)
    p_ver.add_argument("--suite", action="append",
                       help="suite name (repeatable; default: all)")
    p_ver.add_argument("--size-factor", type=float,
                       help="scale Monte-Carlo sizes")
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

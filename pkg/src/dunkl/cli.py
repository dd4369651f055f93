"""Batch front end: strict JSON configs, experiment commands, JSON/CSV reports.

Commands: selfcheck, transform, kernel, propagate, thin gen|check,
pair norm|verify, two-time, lp bounds, cutoff-decay.  Each writes
``<command>-report.json`` into the output directory, plus CSV tables where a
command produces bulk numbers.  Exit codes: 0 success, 1 an invariant or
acceptance gate failed (the report is still written), 2 invalid input or
configuration.

Configs are versioned JSON with fixed blocks (root_system, grid, seed,
experiment, out); unknown keys anywhere are rejected.  Command-line flags
override config values.  Reports embed the fully resolved config and the
package version; the output directory itself is delivery plumbing, not part
of the experiment identity, so it is not echoed back.  With --no-timestamp
the report bytes depend only on config and seed.

CSV columns:
    kernel        x, y, value_re, value_im, regime
    propagate     x, re_u, im_u, abs2          (one file per requested time)
    lp bounds     bound_id, N, eps_hat, value, ratio
    cutoff-decay  ell, t, C_hat
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, lp
from .annihilate import (
    annihilation_operator,
    operator_norm,
    pair_constants,
    verify_pair,
    verify_two_time,
)
from .ensembles import DEFAULT_SEED, schwartz_ensemble
from .kernel import KernelRangeError, dunkl_kernel_record, dunkl_kernel_series
from .measure import GridError, RootSystemConfig, build_grid, rank1
from .reports import REPORT_SCHEMA_VERSION
from .schrodinger import AliasingError, gaussian_packet, propagate
from .selfcheck import run_selfcheck
from .thinsets import SetUnion, ThinSetError, generate_comb, thinness_check
from .transform import export_operator, plancherel_defect, transform_operator
from .translate import cutoff_decay_experiment

CONFIG_VERSION = 1


class ConfigError(ValueError):
    """Malformed or out-of-contract configuration input."""


@dataclass(frozen=True)
class ExperimentConfig:
    version: int
    d: int
    multiplicities: tuple
    R: float
    n: int
    seed: int
    out: str
    experiment: dict

    @property
    def cfg(self) -> RootSystemConfig:
        if self.d == 1:
            return rank1(float(self.multiplicities[0]))
        return RootSystemConfig(d=self.d, multiplicities=tuple(self.multiplicities))

    def resolved(self, experiment: dict) -> dict:
        return {
            "version": self.version,
            "root_system": {"d": self.d, "multiplicities": list(self.multiplicities)},
            "grid": {"R": self.R, "n": self.n},
            "seed": self.seed,
            "experiment": experiment,
        }


def _reject_unknown(block: dict, allowed: set, where: str) -> None:
    extra = set(block) - allowed
    if extra:
        raise ConfigError(f"unknown {where} field(s): {', '.join(sorted(extra))}")


def config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(doc, {"version", "root_system", "grid", "seed", "out", "experiment"}, "config")
    if "version" not in doc:
        raise ConfigError("config field 'version' is mandatory")
    if doc["version"] != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {doc['version']!r}, expected {CONFIG_VERSION}")
    root = doc.get("root_system", {})
    _reject_unknown(root, {"d", "multiplicities"}, "root_system")
    mults = tuple(float(v) for v in root.get("multiplicities", (1.0,)))
    d = int(root.get("d", len(mults)))
    if d != len(mults):
        raise ConfigError(f"d={d} does not match {len(mults)} multiplicities")
    if any(v < 0 for v in mults):
        raise ConfigError("multiplicities must be nonnegative")
    gridblock = doc.get("grid", {})
    _reject_unknown(gridblock, {"R", "n"}, "grid")
    R = float(gridblock.get("R", 12.0))
    n = int(gridblock.get("n", 1024))
    if R <= 0 or n < 8:
        raise ConfigError(f"grid R={R}, n={n} out of range")
    experiment = doc.get("experiment", {})
    if not isinstance(experiment, dict):
        raise ConfigError("experiment block must be an object")
    return ExperimentConfig(
        version=CONFIG_VERSION,
        d=d,
        multiplicities=mults,
        R=R,
        n=n,
        seed=int(doc.get("seed", DEFAULT_SEED)),
        out=str(doc.get("out", ".")),
        experiment=dict(experiment),
    )


def _load_config(args) -> ExperimentConfig:
    doc = {"version": CONFIG_VERSION}
    if args.config is not None:
        text = Path(args.config).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    cfg = config_from_dict(doc)
    mults = cfg.multiplicities
    if args.k is not None:
        mults = tuple(args.k)
    return ExperimentConfig(
        version=cfg.version,
        d=len(mults),
        multiplicities=mults,
        R=cfg.R if args.grid_R is None else float(args.grid_R),
        n=cfg.n if args.grid_n is None else int(args.grid_n),
        seed=cfg.seed if args.seed is None else int(args.seed),
        out=cfg.out if args.out is None else str(args.out),
        experiment=cfg.experiment,
    )


def _params(cfg: ExperimentConfig, args, spec: dict) -> dict:
    """Resolve experiment parameters: defaults < config block < CLI flags."""
    _reject_unknown(cfg.experiment, set(spec), "experiment")
    out = {}
    for name, (default, cast) in spec.items():
        value = getattr(args, name, None)
        if value is None:
            value = cfg.experiment.get(name, default)
        out[name] = None if value is None else cast(value)
    return out


def _float_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _int_list(text) -> list:
    return [int(float(v)) for v in _float_list(text)]


def _write_json(out_dir: str, name: str, doc: dict) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / name
    target.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return target


def _write_csv(out_dir: str, name: str, header: list, rows: list) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / name
    with open(target, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return target


def _emit(command: str, cfg: ExperimentConfig, experiment: dict, payload: dict, args) -> None:
    doc = {
        "report_schema_version": REPORT_SCHEMA_VERSION,
        "code_version": __version__,
        "command": command,
        "config": cfg.resolved(experiment),
        "result": payload,
    }
    if not args.no_timestamp:
        doc["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    _write_json(cfg.out, f"{command}-report.json", doc)


def _need_rank1(cfg: ExperimentConfig, command: str) -> None:
    if cfg.d != 1:
        raise ConfigError(f"{command}: rank-one (d = 1) configs only")


def _load_set(path: str) -> SetUnion:
    try:
        return SetUnion.from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read set from {path}: {exc}") from exc


def _comb_pair(cfg: ExperimentConfig, eps: float, extent: int, s_path, sigma_path):
    S = _load_set(s_path) if s_path else generate_comb(eps, extent, cfg.cfg, seed=cfg.seed)
    Sigma = (
        _load_set(sigma_path)
        if sigma_path
        else generate_comb(eps, extent, cfg.cfg, seed=cfg.seed + 1)
    )
    return S, Sigma


def _sets_block(S: SetUnion, Sigma: SetUnion, names=("S", "Sigma")) -> dict:
    return {
        names[0]: json.loads(S.to_json()),
        names[1]: json.loads(Sigma.to_json()),
    }


def cmd_selfcheck(cfg: ExperimentConfig, args) -> int:
    _need_rank1(cfg, "selfcheck")
    _params(cfg, args, {})
    payload = run_selfcheck(cfg.cfg, R=cfg.R, n=cfg.n, seed=cfg.seed)
    _emit("selfcheck", cfg, {}, payload, args)
    return 0 if payload["passed"] else 1


def cmd_transform(cfg: ExperimentConfig, args) -> int:
    spec = {"degree": (20, int), "dump_operator": (None, str)}
    p = _params(cfg, args, spec)
    grid = build_grid(cfg.R, cfg.n, cfg.cfg)
    op = transform_operator(grid)
    defect = plancherel_defect(op, degree=p["degree"])
    x = grid.x if cfg.d == 1 else np.sqrt(np.sum(grid.nodes**2, axis=1))
    f = np.exp(-0.7 * x**2).astype(np.complex128)
    round_trip = float(np.max(np.abs(op.inverse_values(op.forward_values(f)) - f)))
    if p["dump_operator"]:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        export_operator(op, str(Path(cfg.out) / p["dump_operator"]))
    payload = {
        "plancherel_defect": defect,
        "round_trip": round_trip,
        "degree": p["degree"],
        "operator_dumped": bool(p["dump_operator"]),
        "passed": bool(defect <= 1e-5 and round_trip <= 1e-7),
    }
    _emit("transform", cfg, p, payload, args)
    return 0 if payload["passed"] else 1


def cmd_kernel(cfg: ExperimentConfig, args) -> int:
    spec = {
        "x": ([0.0, 0.5, 1.3, 2.2, -1.7], _float_list),
        "y": ([0.4, 1.1, -0.9, 3.0, 2.6], _float_list),
        "mode": ("minus_i", str),
    }
    p = _params(cfg, args, spec)
    if len(p["x"]) != len(p["y"]):
        raise ConfigError("kernel: x and y lists must have equal length")
    if p["mode"] not in ("minus_i", "plain"):
        raise ConfigError(f"kernel: unknown mode {p['mode']!r}")
    rows, worst = [], 0.0
    for xv, yv in zip(p["x"], p["y"]):
        rec = dunkl_kernel_record(xv, yv, cfg.cfg, mode=p["mode"])
        rows.append([xv, yv, rec.value.real, rec.value.imag, rec.regime])
        if cfg.d == 1:
            arg = -1j * yv if p["mode"] == "minus_i" else yv
            oracle = dunkl_kernel_series(xv, arg, float(cfg.multiplicities[0]))
            worst = max(worst, abs(rec.value - oracle) / max(1.0, abs(oracle)))
    _write_csv(cfg.out, "kernel-table.csv", ["x", "y", "value_re", "value_im", "regime"], rows)
    payload = {
        "points": len(rows),
        "mode": p["mode"],
        "max_series_rel_diff": worst if cfg.d == 1 else None,
        "passed": bool(cfg.d != 1 or worst <= 1e-10),
    }
    _emit("kernel", cfg, p, payload, args)
    return 0 if payload["passed"] else 1


def cmd_propagate(cfg: ExperimentConfig, args) -> int:
    _need_rank1(cfg, "propagate")
    spec = {
        "t": ([1.0], _float_list),
        "waist": (2.0, float),
        "focus_time": (2.0, float),
        "method": ("multiplier", str),
    }
    p = _params(cfg, args, spec)
    if p["method"] not in ("multiplier", "explicit"):
        raise ConfigError(f"propagate: unknown method {p['method']!r}")
    grid = build_grid(cfg.R, cfg.n, cfg.cfg)
    op = transform_operator(grid)
    u0 = gaussian_packet(grid, waist=p["waist"], focus_time=p["focus_time"]).normalized()
    times, defects = [], []
    for t in p["t"]:
        state = propagate(u0, t, method=p["method"], op=op)
        defect = abs(state.norm() - u0.norm())
        defects.append(defect)
        times.append(t)
        rows = [
            [float(xv), float(uv.real), float(uv.imag), float(abs(uv) ** 2)]
            for xv, uv in zip(grid.x, state.u.values)
        ]
        _write_csv(cfg.out, f"propagate-t{t:g}.csv", ["x", "re_u", "im_u", "abs2"], rows)
    payload = {
        "times": times,
        "conservation_defects": defects,
        "method": p["method"],
        "passed": bool(max(defects) <= 1e-5),
    }
    _emit("propagate", cfg, p, payload, args)
    return 0 if payload["passed"] else 1


def cmd_thin_gen(cfg: ExperimentConfig, args) -> int:
    _need_rank1(cfg, "thin gen")
    spec = {"eps_target": (0.05, float), "extent": (3, int)}
    p = _params(cfg, args, spec)
    S = generate_comb(p["eps_target"], p["extent"], cfg.cfg, seed=cfg.seed)
    report = thinness_check(S, cfg.cfg)
    Path(cfg.out).mkdir(parents=True, exist_ok=True)
    (Path(cfg.out) / "thin-set.json").write_text(S.to_json() + "\n")
    payload = {
        "pieces": len(S.pieces),
        "eps_hat": report.epsilon_hat,
        "eps_target": p["eps_target"],
        "set_file": "thin-set.json",
        "passed": bool(report.epsilon_hat <= p["eps_target"]),
    }
    _emit("thin-gen", cfg, p, payload, args)
    return 0 if payload["passed"] else 1


def cmd_thin_check(cfg: ExperimentConfig, args) -> int:
    _need_rank1(cfg, "thin check")
    spec = {"set": (None, str)}
    p = _params(cfg, args, spec)
    if not p["set"]:
        raise ConfigError("thin check: --set PATH is required")
    S = _load_set(p["set"])
    report = thinness_check(S, cfg.cfg)
    payload = {
        "pieces": len(S.pieces),
        "eps_hat": report.epsilon_hat,
        "argmax": list(np.atleast_1d(report.argmax).astype(float)),
        "n_samples": report.n_samples,
        "R_check": report.R_check,
        "passed": True,
    }
    _emit("thin-check", cfg, p, payload, args)
    return 0


def _pair_payload(cfg, S, Sigma, norm_h, constants, ensemble_size, max_ratio, ok) -> dict:
    return {
        "sets": _sets_block(S, Sigma),
        "grid": {"R": cfg.R, "n": cfg.n},
        "norm_H": norm_h,
        "D": constants.D,
        "C": constants.C,
        "ensemble_size": ensemble_size,
        "max_ratio": max_ratio,
        "pass": bool(ok),
    }


def cmd_pair_norm(cfg: ExperimentConfig, args) -> int:
    _need_rank1(cfg, "pair norm")
    spec = {
        "eps": (0.05, float),
        "extent": (3, int),
        "set_s": (None, str),
        "set_sigma": (None, str),
    }
    p = _params(cfg, args, spec)
    S, Sigma = _comb_pair(cfg, p["eps"], p["extent"], p["set_s"], p["set_sigma"])
    op = transform_operator(build_grid(cfg.R, cfg.n, cfg.cfg))
    norm_h = operator_norm(annihilation_operator(S, Sigma, op))
    constants = pair_constants(norm_h)
    payload = _pair_payload(cfg, S, Sigma, norm_h, constants, 0, None, norm_h < 1.0)
    _emit("pair-norm", cfg, p, payload, args)
    return 0 if payload["pass"] else 1


def cmd_pair_verify(cfg: ExperimentConfig, args) -> int:
    _need_rank1(cfg, "pair verify")
    spec = {
        "eps": (0.05, float),
        "extent": (3, int),
        "set_s": (None, str),
        "set_sigma": (None, str),
        "ensemble_size": (50, int),
    }
    p = _params(cfg, args, spec)
    S, Sigma = _comb_pair(cfg, p["eps"], p["extent"], p["set_s"], p["set_sigma"])
    op = transform_operator(build_grid(cfg.R, cfg.n, cfg.cfg))
    norm_h = operator_norm(annihilation_operator(S, Sigma, op))
    constants = pair_constants(norm_h)
    members = schwartz_ensemble(op.grid, size=p["ensemble_size"], seed=cfg.seed)
    report = verify_pair(members, S, Sigma, constants, op=op)
    ok = bool(norm_h < 1.0 and report.passed)
    payload = _pair_payload(
        cfg, S, Sigma, norm_h, constants,
        report.params["ensemble_size"], report.values["max_ratio"], ok,
    )
    payload["bound"] = report.tolerances["bound"]
    _emit("pair-verify", cfg, p, payload, args)
    return 0 if ok else 1


def cmd_two_time(cfg: ExperimentConfig, args) -> int:
    _need_rank1(cfg, "two-time")
    spec = {
        "s_time": (0.0, float),
        "t_time": (1.0, float),
        "eps": (0.05, float),
        "extent": (3, int),
        "set_a": (None, str),
        "set_b": (None, str),
        "ensemble_size": (50, int),
    }
    p = _params(cfg, args, spec)
    A, B = _comb_pair(cfg, p["eps"], p["extent"], p["set_a"], p["set_b"])
    op = transform_operator(build_grid(cfg.R, cfg.n, cfg.cfg))
    members = schwartz_ensemble(op.grid, size=p["ensemble_size"], seed=cfg.seed)
    report = verify_two_time(members, A, B, p["s_time"], p["t_time"], op=op)
    payload = {
        "sets": _sets_block(A, B, names=("A", "B")),
        "grid": {"R": cfg.R, "n": cfg.n},
        "S": p["s_time"],
        "T": p["t_time"],
        "norm_H": report.values["norm_H"],
        "D": report.values["D"],
        "C": report.values["C"],
        "ensemble_size": report.params["ensemble_size"],
        "max_ratio": report.values["max_ratio"],
        "bound": report.tolerances["bound"],
        "pass": bool(report.passed),
    }
    _emit("two-time", cfg, p, payload, args)
    return 0 if payload["pass"] else 1


def cmd_lp_bounds(cfg: ExperimentConfig, args) -> int:
    _need_rank1(cfg, "lp bounds")
    spec = {"N": (4, int), "eps_list": ([0.025, 0.05, 0.1], _float_list), "n_max": (6, int)}
    p = _params(cfg, args, spec)
    grid = build_grid(cfg.R, cfg.n, cfg.cfg)
    family = lp.build_family(max(p["n_max"], p["N"]), grid, cfg.cfg)
    rows, all_passed, summaries = [], True, []
    for eps in p["eps_list"]:
        S = generate_comb(eps, 3, cfg.cfg, seed=cfg.seed)
        Sigma = generate_comb(eps, 3, cfg.cfg, seed=cfg.seed + 1)
        report = lp.bound_suite(p["N"], family, S, Sigma)
        all_passed = all_passed and bool(report.passed)
        vals = report.values
        for bound_id in ("bound_i", "bound_ii", "bound_iii", "bound_iv"):
            rows.append([bound_id, p["N"], eps, vals[bound_id], ""])
        rows.append(["bound_v", p["N"], vals["eps_hat_S"], vals["bound_v"], vals["ratio_v"]])
        rows.append(
            ["bound_vi", p["N"], vals["eps_hat_Sigma"], vals["bound_vi"], vals["ratio_vi"]]
        )
        summaries.append({"eps_target": eps, **{k: float(v) for k, v in vals.items()}})
    _write_csv(cfg.out, "lp-bounds.csv", ["bound_id", "N", "eps_hat", "value", "ratio"], rows)
    payload = {"N": p["N"], "suites": summaries, "passed": all_passed}
    _emit("lp-bounds", cfg, p, payload, args)
    return 0 if all_passed else 1


def cmd_cutoff_decay(cfg: ExperimentConfig, args) -> int:
    spec = {
        "ell": ([0, 1, 2], _int_list),
        "t": ([0.25, 0.5, 1.0, 2.0], _float_list),
        "x_list": ([0.5, 1.0, 2.0, 4.0, 7.0], _float_list),
    }
    p = _params(cfg, args, spec)
    rows, constants = [], {}
    for ell in p["ell"]:
        for t in p["t"]:
            report = cutoff_decay_experiment(ell, t, p["x_list"], cfg.cfg, n=cfg.n, R=cfg.R)
            c_hat = report.values["C_hat"]
            rows.append([ell, t, c_hat])
            constants[f"ell={ell},t={t:g}"] = c_hat
    values = [r[2] for r in rows]
    spread = max(values) / min(values) if min(values) > 0 else math.inf
    _write_csv(cfg.out, "cutoff-decay.csv", ["ell", "t", "C_hat"], rows)
    payload = {
        "constants": constants,
        "spread": spread,
        "passed": bool(math.isfinite(spread)),
    }
    _emit("cutoff-decay", cfg, p, payload, args)
    return 0 if payload["passed"] else 1


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output directory (default '.')")
    common.add_argument("--seed", type=int, help="RNG seed")
    common.add_argument("--grid-n", type=int, dest="grid_n", help="quadrature nodes per axis")
    common.add_argument("--grid-R", type=float, dest="grid_R", help="grid half-width")
    common.add_argument("--k", type=_float_list, help="multiplicities, comma separated")
    common.add_argument(
        "--no-timestamp", action="store_true", help="omit timestamps for byte-stable reports"
    )

    parser = argparse.ArgumentParser(
        prog="dunkl", description="Dunkl harmonic analysis experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("selfcheck", parents=[common]).set_defaults(func=cmd_selfcheck)

    tp = sub.add_parser("transform", parents=[common])
    tp.add_argument("--degree", type=int)
    tp.add_argument("--dump-operator", dest="dump_operator", metavar="PATH")
    tp.set_defaults(func=cmd_transform)

    kp = sub.add_parser("kernel", parents=[common])
    kp.add_argument("--x", type=_float_list)
    kp.add_argument("--y", type=_float_list)
    kp.add_argument("--mode", choices=["minus_i", "plain"])
    kp.set_defaults(func=cmd_kernel)

    pp = sub.add_parser("propagate", parents=[common])
    pp.add_argument("--t", type=_float_list)
    pp.add_argument("--waist", type=float)
    pp.add_argument("--focus-time", type=float, dest="focus_time")
    pp.add_argument("--method", choices=["multiplier", "explicit"])
    pp.set_defaults(func=cmd_propagate)

    thin = sub.add_parser("thin").add_subparsers(dest="subcommand", required=True)
    tg = thin.add_parser("gen", parents=[common])
    tg.add_argument("--eps-target", type=float, dest="eps_target")
    tg.add_argument("--extent", type=int)
    tg.set_defaults(func=cmd_thin_gen)
    tc = thin.add_parser("check", parents=[common])
    tc.add_argument("--set", metavar="PATH")
    tc.set_defaults(func=cmd_thin_check)

    pair = sub.add_parser("pair").add_subparsers(dest="subcommand", required=True)
    pn = pair.add_parser("norm", parents=[common])
    pv = pair.add_parser("verify", parents=[common])
    for sp in (pn, pv):
        sp.add_argument("--eps", type=float)
        sp.add_argument("--extent", type=int)
        sp.add_argument("--set-s", dest="set_s", metavar="PATH")
        sp.add_argument("--set-sigma", dest="set_sigma", metavar="PATH")
    pv.add_argument("--ensemble-size", type=int, dest="ensemble_size")
    pn.set_defaults(func=cmd_pair_norm)
    pv.set_defaults(func=cmd_pair_verify)

    tt = sub.add_parser("two-time", parents=[common])
    tt.add_argument("--s-time", type=float, dest="s_time")
    tt.add_argument("--t-time", type=float, dest="t_time")
    tt.add_argument("--eps", type=float)
    tt.add_argument("--extent", type=int)
    tt.add_argument("--set-a", dest="set_a", metavar="PATH")
    tt.add_argument("--set-b", dest="set_b", metavar="PATH")
    tt.add_argument("--ensemble-size", type=int, dest="ensemble_size")
    tt.set_defaults(func=cmd_two_time)

    lpp = sub.add_parser("lp").add_subparsers(dest="subcommand", required=True)
    lb = lpp.add_parser("bounds", parents=[common])
    lb.add_argument("--N", type=int, dest="N")
    lb.add_argument("--eps-list", type=_float_list, dest="eps_list")
    lb.add_argument("--n-max", type=int, dest="n_max")
    lb.set_defaults(func=cmd_lp_bounds)

    cd = sub.add_parser("cutoff-decay", parents=[common])
    cd.add_argument("--ell", type=_int_list)
    cd.add_argument("--t", type=_float_list)
    cd.add_argument("--x-list", type=_float_list, dest="x_list")
    cd.set_defaults(func=cmd_cutoff_decay)
    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(_load_config(args), args)
    except (
        ConfigError,
        GridError,
        ThinSetError,
        KernelRangeError,
        AliasingError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

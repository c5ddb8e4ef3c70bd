"""Batch experiment runner: `expanse <task> --config <path>`.

Tasks: check | falsify | equicontinuity | ball-inclusion | constants |
shadow | entropy | hstar | xdelta. Reports are deterministic JSON trees
plus flat CSV tables; exit code 0 on completion, 2 on a falsified
property (so CI can assert expected falsifications), 1 on error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import entropy as entropy_mod
from . import expansivity as expa
from . import shadowing as shad
from .alignment import rep_epsilon_check
from .flows import flow_from_config
from .reports import write_csv, write_report

TASKS = ("check", "falsify", "equicontinuity", "ball-inclusion", "constants",
         "shadow", "entropy", "hstar", "xdelta")
RANDOMIZED_TASKS = ("shadow",)

SCALE_DEFAULTS = {"T": 20.0, "h": 0.01, "band_width": 2.0, "grid": 64}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    task: str
    flow: dict
    scale: dict
    seed: int | None
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, task: str, cfg: dict) -> "ExperimentConfig":
        if task not in TASKS:
            raise ConfigError(f"unknown task: {task!r}")
        if "flow" not in cfg:
            raise ConfigError("config needs a 'flow' subtree")
        scale = {**SCALE_DEFAULTS, **cfg.get("scale", {})}
        for key in ("T", "h", "band_width"):
            if not scale[key] >= 0:
                raise ConfigError(f"scale.{key} must be nonnegative")
        if scale["T"] <= 0 or scale["h"] <= 0:
            raise ConfigError("scale.T and scale.h must be positive")
        seed = cfg.get("seed")
        if task in RANDOMIZED_TASKS and seed is None:
            raise ConfigError(f"task {task!r} is randomized: a seed is mandatory")
        return cls(task=task, flow=cfg["flow"], scale=scale,
                   seed=None if seed is None else int(seed), raw=dict(cfg))

    def require(self, *keys):
        for k in keys:
            if k not in self.raw:
                raise ConfigError(f"task {self.task!r} needs config key {k!r}")
        return [self.raw[k] for k in keys]


def _apply_override(cfg: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError(f"override must look like key=value: {assignment!r}")
    dotted, raw_val = assignment.split("=", 1)
    try:
        value = json.loads(raw_val)
    except json.JSONDecodeError:
        value = raw_val
    node = cfg
    keys = dotted.split(".")
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


def _base_report(conf: ExperimentConfig) -> dict:
    return {"task": conf.task, "config": conf.raw, "scale": conf.scale}


def _write_pair_costs(out_dir: Path, pair_costs) -> None:
    rows = [list(x) + list(y) + [c] for x, y, c in pair_costs]
    width = (len(rows[0]) - 1) // 2 if rows else 1
    header = [f"x{i}" for i in range(width)] + [f"y{i}" for i in range(width)] + ["cost"]
    write_csv(out_dir / "pairs.csv", header, rows)


def _run_property(conf: ExperimentConfig, flow, out_dir: Path) -> int:
    (prop,) = conf.require("property")
    eps, delta = conf.require("eps", "delta")
    rep = expa.check_property(
        flow, prop, float(eps), float(delta),
        T=conf.scale["T"], h=conf.scale["h"], band_width=conf.scale["band_width"],
        strict_t0=bool(conf.raw.get("strict_t0", False)),
        t0_step=float(conf.raw.get("t0_step", 0.5)),
        max_pairs=conf.raw.get("max_pairs"))
    doc = _base_report(conf)
    doc["report"] = rep.to_dict()
    write_report(doc, out_dir / "report.json")
    _write_pair_costs(out_dir, rep.pair_costs)
    return 2 if rep.verdict == "falsified" else 0


def _run_equicontinuity(conf: ExperimentConfig, flow, out_dir: Path) -> int:
    eps, delta = conf.require("eps", "delta")
    rep = expa.check_equicontinuity(
        flow, bool(conf.raw.get("singular", False)), float(eps), float(delta),
        T=conf.scale["T"], h=conf.scale["h"],
        max_pairs=conf.raw.get("max_pairs"))
    doc = _base_report(conf)
    doc["report"] = rep.to_dict()
    write_report(doc, out_dir / "report.json")
    _write_pair_costs(out_dir, rep.pair_costs)
    return 2 if rep.verdict == "falsified" else 0


def _run_ball_inclusion(conf: ExperimentConfig, flow, out_dir: Path) -> int:
    eps, delta = conf.require("eps", "delta")
    grid = flow.space.grid(int(conf.raw.get("x_grid", 1000)))
    rep = expa.ball_inclusion_check(
        flow, float(eps), float(delta), x_grid=grid,
        ball_samples=int(conf.raw.get("ball_samples", 100)))
    doc = _base_report(conf)
    doc["report"] = rep.to_dict()
    write_report(doc, out_dir / "report.json")
    return 2 if rep.verdict == "falsified" else 0


def _run_constants(conf: ExperimentConfig, flow, out_dir: Path) -> int:
    consts = expa.comparability_constants(flow)
    c, c_info = expa.local_norm_constant(flow, seed=conf.seed or 0)
    doc = _base_report(conf)
    doc["report"] = {
        "B": consts.B, "C": consts.C,
        "argmax_B": list(consts.argmax_B), "argmax_C": list(consts.argmax_C),
        "n_grid": consts.n_grid, "degenerate": consts.degenerate,
        "local_norm_c": c, "local_norm_info": c_info,
    }
    if conf.raw.get("return_time", False):
        doc["report"]["return_time"] = expa.return_time_bound_check(flow)
    write_report(doc, out_dir / "report.json")
    return 0


def _run_shadow(conf: ExperimentConfig, flow, out_dir: Path) -> int:
    eps = float(conf.require("eps")[0])
    if "pseudo_orbit_file" in conf.raw:
        po = shad.PseudoOrbit.load(conf.raw["pseudo_orbit_file"])
    else:
        x0, n_seg, delta = conf.require("x0", "n_segments", "delta")
        po = shad.generate_pseudo_orbit(
            flow, np.asarray(x0, dtype=float), int(n_seg), float(delta),
            T_min=float(conf.raw.get("T_min", 1.0)), seed=conf.seed)
    po.save(out_dir / "pseudo_orbit.txt")
    result = shad.find_shadow(flow, po, eps, h=float(conf.raw.get("h_shadow", 0.02)))
    doc = _base_report(conf)
    if result is None:
        doc["report"] = {"shadowed": False, "eps": eps}
    else:
        doc["report"] = {
            "shadowed": True, "eps": eps,
            "shadow_point": list(result.shadow_point.coords),
            "max_error": result.max_error,
            "per_segment_errors": list(result.per_segment_errors),
            "rep_eps_ok": rep_epsilon_check(result.reparam, eps),
        }
    write_report(doc, out_dir / "report.json")
    return 0


def _entropy_grid(conf: ExperimentConfig, flow):
    n = int(conf.scale["grid"])
    if hasattr(flow.space, "radii"):
        return flow.space.grid(n_angles=max(4, n // max(1, len(flow.space.radii))))
    return flow.space.grid(n)


def _run_entropy(conf: ExperimentConfig, flow, out_dir: Path) -> int:
    t_ladder, eps_ladder = conf.require("t_ladder", "eps_ladder")
    grid = conf.raw.get("K_grid") or _entropy_grid(conf, flow)
    est = entropy_mod.entropy_estimate(
        flow, [np.asarray(p, dtype=float) for p in grid],
        t_ladder, eps_ladder, h_sample=float(conf.raw.get("h_sample", 0.05)))
    doc = _base_report(conf)
    doc["report"] = {
        "h_estimate": est.h_estimate,
        "per_eps_slopes": [[e, s] for e, s in est.per_eps_slopes],
        "K_descriptor": est.K_descriptor,
    }
    write_report(doc, out_dir / "report.json")
    write_csv(out_dir / "triples.csv", ["t", "eps", "r"], est.r_table)
    return 0


def _run_hstar(conf: ExperimentConfig, flow, out_dir: Path) -> int:
    delta_ladder, t_ladder, eps_ladder = conf.require(
        "delta_ladder", "t_ladder", "eps_ladder")
    est = entropy_mod.h_star_estimate(
        flow, delta_ladder, t_ladder, eps_ladder,
        T_escape=float(conf.raw.get("T_escape", 50.0)),
        h_sample=float(conf.raw.get("h_sample", 0.05)))
    doc = _base_report(conf)
    doc["report"] = {
        "h_star_estimate": est.h_estimate,
        "per_eps_slopes": [[e, s] for e, s in est.per_eps_slopes],
        "K_descriptor": est.K_descriptor,
        "all_empty": est.all_empty,
    }
    write_report(doc, out_dir / "report.json")
    write_csv(out_dir / "triples.csv", ["t", "eps", "r"], est.r_table)
    return 0


def _run_xdelta(conf: ExperimentConfig, flow, out_dir: Path) -> int:
    delta = float(conf.require("delta")[0])
    kept = entropy_mod.x_delta_set(
        flow, delta, T_escape=float(conf.raw.get("T_escape", 50.0)),
        h=float(conf.raw.get("h_escape", 0.05)))
    doc = _base_report(conf)
    doc["report"] = {"delta": delta, "n_kept": len(kept)}
    write_report(doc, out_dir / "report.json")
    width = len(kept[0]) if kept else flow.space.dim
    write_csv(out_dir / "points.csv", [f"x{i}" for i in range(width)], kept)
    return 0


_RUNNERS = {
    "check": _run_property,
    "falsify": _run_property,
    "equicontinuity": _run_equicontinuity,
    "ball-inclusion": _run_ball_inclusion,
    "constants": _run_constants,
    "shadow": _run_shadow,
    "entropy": _run_entropy,
    "hstar": _run_hstar,
    "xdelta": _run_xdelta,
}


def run(task: str, cfg: dict, out_dir) -> int:
    """Execute one experiment; writes report files and returns the exit code."""
    conf = ExperimentConfig.from_dict(task, cfg)
    flow = flow_from_config(conf.flow)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[task](conf, flow, out)


def emit_report(report: dict, path) -> None:
    """Byte-stable serialization of a report tree (sorted keys, 12 sig digits)."""
    write_report(report, path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="expanse",
        description="Expansivity, shadowing and entropy experiments on catalog flows.")
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE", help="dotted config override")
    args = parser.parse_args(argv)
    try:
        cfg = json.loads(Path(args.config).read_text())
        for ov in args.override:
            _apply_override(cfg, ov)
        if args.seed is not None:
            cfg["seed"] = args.seed
        out_dir = args.out or cfg.get("out", ".")
        return run(args.task, cfg, out_dir)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

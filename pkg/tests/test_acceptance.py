"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints one ``ACCEPTANCE n (<name>): PASS|FAIL`` line (visible
with ``pytest -s`` or in captured output). Scales not pinned by a
criterion are recorded in the produced reports.
"""

import json
import math
import time

import numpy as np
import pytest

from expanse.alignment import _find_orbit_time, rep_epsilon_check
from expanse.cli import main as cli_main
from expanse.entropy import entropy_estimate, h_star_estimate, x_delta_set
from expanse.expansivity import (
    ball_inclusion_check,
    check_equicontinuity,
    check_property,
    comparability_constants,
    hierarchy_check,
)
from expanse.flows import (
    interval_flow,
    interval_flow_transit_time,
    rotation_flow,
    suspension_doubling,
    trivial_flow,
)
from expanse.shadowing import PseudoOrbit, find_shadow, generate_pseudo_orbit
from expanse.spaces import CircleUnion, FiniteSet, exp_radii, harmonic_radii


class criterion:
    def __init__(self, num, name):
        self.num, self.name = num, name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        print(f"ACCEPTANCE {self.num} ({self.name}): {status}")
        return False


def test_criterion_1_harmonic_circles_falsification():
    with criterion(1, "harmonic-circles singular-expansivity falsification"):
        flow = rotation_flow(CircleUnion(harmonic_radii(16)))
        start = time.monotonic()
        rep = check_property(flow, "singular_expansive", eps=1.0, delta=0.1)
        elapsed = time.monotonic() - start
        assert elapsed < 120.0
        assert rep.verdict == "falsified"
        w = rep.witness
        n = round(1.0 / math.hypot(*w.x.coords))
        assert n >= 9
        assert math.hypot(*w.y.coords) == pytest.approx(1.0 / (n + 1), abs=1e-12)
        assert w.alignment.cost <= 0.1 + 1e-9
        # the conclusion fails for every sampled t0 in the recorded window
        T = rep.scale["T"]
        s = w.alignment.reparam
        for t0 in np.arange(-T, T + 1e-9, rep.scale["t0_step"]):
            p = flow.evaluate(s(float(t0)), w.y.vec)
            hit = _find_orbit_time(flow, w.x.vec, p, t0 - 1.0, t0 + 1.0, 1e-7)
            assert hit is None


def test_criterion_2_ball_inclusion():
    with criterion(2, "interval-flow ball inclusion"):
        flow = interval_flow(1.0)
        grid = flow.space.grid(1000)
        start = time.monotonic()
        ok = ball_inclusion_check(flow, eps=0.85, delta=0.4,
                                  x_grid=grid, ball_samples=100)
        bad = ball_inclusion_check(flow, eps=0.5, delta=0.4,
                                   x_grid=grid, ball_samples=100)
        elapsed = time.monotonic() - start
        assert elapsed < 60.0
        assert ok.verdict == "certified_at_scale"
        assert ok.stats["max_transit_time"] <= 0.85 + 1e-9
        # analytic bound ln(1.4/0.6) ~ 0.8473 approached near x = 1/2
        assert ok.stats["max_transit_time"] == pytest.approx(
            math.log(1.4 / 0.6), abs=2e-3)
        assert bad.verdict == "falsified"


def _rk4_scaled(field, t_arr, x_arr, n_steps=1024):
    # z' = t * V(z) over unit internal time: z(1) = phi_t(x), fixed-step RK4
    z = x_arr.copy()
    du = 1.0 / n_steps
    for _ in range(n_steps):
        k1 = t_arr * field(z)
        k2 = t_arr * field(z + 0.5 * du * k1)
        k3 = t_arr * field(z + 0.5 * du * k2)
        k4 = t_arr * field(z + du * k3)
        z = z + (du / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return z


def test_criterion_3_transit_time_vs_rk4():
    with criterion(3, "transit-time formula vs bisected RK4"):
        rng = np.random.default_rng(2024)
        xs = rng.uniform(0.1, 0.9, size=1000)
        ys = rng.uniform(0.1, 0.9, size=1000)
        formula = np.array([interval_flow_transit_time(x, y)
                            for x, y in zip(xs, ys)])
        logistic = lambda z: z * (1.0 - z)
        lo = np.full(1000, -6.0)
        hi = np.full(1000, 6.0)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            val = _rk4_scaled(logistic, mid, xs)
            lower = val < ys
            lo = np.where(lower, mid, lo)
            hi = np.where(lower, hi, mid)
        bisected = 0.5 * (lo + hi)
        assert np.abs(formula - bisected).max() <= 1e-6


def test_criterion_4_equicontinuity_split():
    with criterion(4, "equicontinuity split on the interval flow"):
        flow = interval_flow(1.0)
        for delta in (1e-2, 1e-3, 1e-4):
            rep = check_equicontinuity(flow, False, eps=0.1, delta=delta)
            assert rep.verdict == "falsified", f"delta={delta}"
            w = rep.witness
            ts = np.linspace(-20.0, 20.0, 80001)
            sep = np.abs(flow.evaluate(ts, w.x.vec)[:, 0]
                         - flow.evaluate(ts, w.y.vec)[:, 0])
            assert sep.max() >= 0.1
        sing = check_equicontinuity(flow, True, eps=0.85, delta=0.4)
        assert sing.verdict == "certified_at_scale"


def test_criterion_5_comparability_constants():
    with criterion(5, "comparability constants B and C"):
        # dense-grid oracle for the logistic ratios
        dense = np.linspace(1e-9, 1.0 - 1e-9, 2_000_001)
        v = dense * (1.0 - dense)
        dist = np.minimum(dense, 1.0 - dense)
        b_oracle = float((v / dist).max())
        c_arg_oracle = float(dense[np.argmax(dist / v)])
        assert b_oracle == pytest.approx(1.0, abs=1e-6)
        assert c_arg_oracle == pytest.approx(0.5, abs=1e-6)

        rep = comparability_constants(interval_flow(1.0))
        assert rep.B == pytest.approx(1.0, abs=1e-3)
        assert rep.C == pytest.approx(2.0, abs=1e-3)
        assert rep.argmax_C[0] == pytest.approx(0.5, abs=1e-3)

        rot = comparability_constants(rotation_flow(CircleUnion(exp_radii(8))))
        assert rot.B == pytest.approx(1.0, abs=1e-6)
        assert rot.C == pytest.approx(1.0, abs=1e-6)


def test_criterion_6_x_delta_geometry():
    with criterion(6, "X_delta geometry"):
        exp_rot = rotation_flow(CircleUnion(exp_radii(8)))
        grid = exp_rot.space.grid(16)
        kept = x_delta_set(exp_rot, 0.2, grid=grid, T_escape=20.0)
        expected = {tuple(p) for p in grid
                    if math.hypot(p[0], p[1]) >= 0.2}
        assert {tuple(p) for p in kept} == expected
        radii_kept = {round(math.hypot(*p), 9) for p in kept}
        assert radii_kept == {round(math.exp(-n), 9) for n in (0, 1)}

        flow = interval_flow(1.0)
        assert x_delta_set(flow, 0.1, grid=flow.space.grid(64),
                           T_escape=50.0) == []


def test_criterion_7_entropy_ladders():
    with criterion(7, "entropy: zero on equicontinuous, ln 2 control"):
        exp_rot = rotation_flow(CircleUnion(exp_radii(4)))
        grid = exp_rot.space.grid(16)
        est = entropy_estimate(exp_rot, grid, [10.0, 20.0, 30.0, 40.0, 50.0],
                               [0.1, 0.05])
        for _, slope in est.per_eps_slopes:
            assert abs(slope) <= 0.02

        flow = interval_flow(1.0)
        hstar = h_star_estimate(flow, [0.05, 0.1, 0.2], [2.0, 4.0], [0.1],
                                grid=flow.space.grid(32), T_escape=50.0)
        assert hstar.h_estimate <= 0.02

        susp = suspension_doubling()
        section = [np.array([k / 1024, 0.5]) for k in range(1024)]
        pos = entropy_estimate(susp, section, [2.0, 3.0, 4.0, 5.0, 6.0],
                               [0.25, 0.2])
        assert 0.55 <= pos.h_estimate <= 0.85


def test_criterion_8_shadowing():
    with criterion(8, "shadowing on interval(1), drift control on circles"):
        flow = interval_flow(1.0)
        for seed in range(100):
            po = generate_pseudo_orbit(flow, np.array([0.3]), 10,
                                       delta=1e-3, seed=seed)
            res = find_shadow(flow, po, eps=0.05)
            assert res is not None, f"seed {seed}"
            assert res.max_error <= 0.05
            assert rep_epsilon_check(res.reparam, 0.05)

        radii = [0.8 + 0.02 * k for k in range(11)]  # total drift 0.2
        rot = rotation_flow(CircleUnion(radii))
        drift_po = PseudoOrbit(
            points=tuple((r, 0.0) for r in radii),
            durations=(2.0 * math.pi,) * 11, i_min=-5, T_min=1.0,
            delta=0.0201)
        drift_po.validate(rot)
        assert find_shadow(rot, drift_po, eps=0.05) is None


def test_criterion_9_hierarchy_invariant():
    with criterion(9, "k* vs singular hierarchy at matched scales"):
        def interval_pairs():
            out = []
            for x in np.linspace(0.02, 0.98, 250):
                for off in (1e-3, 1e-2, 0.05, -1e-2):
                    y = min(max(x + off, 0.0), 1.0)
                    out.append((np.array([x]), np.array([y])))
            return out

        def circle_pairs(flow):
            sp = flow.space
            out = []
            for i in range(len(sp.radii)):
                for k in range(36):
                    ang = 2.0 * math.pi * k / 36
                    x = sp.on_circle(i, ang)
                    out.append((x, sp.on_circle(i, ang + 0.05)))
                    if i + 1 < len(sp.radii):
                        out.append((x, sp.on_circle(i + 1, ang)))
                    out.append((x, flow.evaluate(0.5, x)))
                    out.append((x, sp.on_circle(i, ang + math.pi)))
            return out

        flows_pairs = [
            (interval_flow(1.0), interval_pairs()),
            (rotation_flow(CircleUnion(exp_radii(8))), None),
            (rotation_flow(CircleUnion(harmonic_radii(8))), None),
            (trivial_flow(FiniteSet([[0.0, 0.0], [1.0, 0.0]])), None),
        ]
        for flow, pairs in flows_pairs:
            if pairs is None and hasattr(flow.space, "radii"):
                pairs = circle_pairs(flow)
            elif pairs is None:
                pts = flow.space.grid()
                base = [(a, b) for a in pts for b in pts]
                pairs = [base[i % len(base)] for i in range(1000)]
            assert len(pairs) >= 1000, flow.name
            rep = hierarchy_check(flow, pairs, delta=0.25,
                                  T=4.0, h=0.05, band_width=0.5)
            assert rep["violations"] == [], flow.name


def test_criterion_10_determinism(tmp_path):
    with criterion(10, "byte-identical reports under identical seeds"):
        configs = {
            "falsify": {
                "flow": {"name": "circles", "family": "harmonic", "depth": 16},
                "property": "singular_expansive", "eps": 1.0, "delta": 0.1,
                "scale": {"T": 6.0, "h": 0.05, "band_width": 1.0},
            },
            "ball-inclusion": {
                "flow": {"name": "interval", "lambda": 1.0},
                "eps": 0.85, "delta": 0.4, "x_grid": 200, "ball_samples": 25,
            },
            "equicontinuity": {
                "flow": {"name": "interval", "lambda": 1.0},
                "eps": 0.1, "delta": 1e-3, "scale": {"T": 10.0, "h": 0.02},
            },
            "constants": {"flow": {"name": "interval", "lambda": 1.0},
                          "seed": 0},
            "shadow": {
                "flow": {"name": "interval", "lambda": 1.0},
                "eps": 0.05, "x0": [0.3], "n_segments": 6, "delta": 1e-3,
                "seed": 7,
            },
            "entropy": {
                "flow": {"name": "trivial",
                         "space": {"kind": "finite_set",
                                   "points": [[0.0], [1.0]]}},
                "t_ladder": [1.0, 2.0], "eps_ladder": [0.5],
            },
            "hstar": {
                "flow": {"name": "circles", "family": "exp", "depth": 4},
                "delta_ladder": [0.2], "t_ladder": [2.0, 4.0],
                "eps_ladder": [0.1], "T_escape": 10.0,
            },
            "xdelta": {
                "flow": {"name": "circles", "family": "exp", "depth": 8},
                "delta": 0.2, "T_escape": 10.0,
            },
        }
        for task, cfg in configs.items():
            cfg_path = tmp_path / f"{task}.json"
            cfg_path.write_text(json.dumps(cfg))
            outs = []
            for run_dir in ("r1", "r2"):
                out = tmp_path / task / run_dir
                code = cli_main([task, "--config", str(cfg_path),
                                 "--out", str(out)])
                assert code in (0, 2), task
                outs.append(out)
            for name in ("report.json", "pairs.csv", "triples.csv",
                         "points.csv", "pseudo_orbit.txt"):
                a, b = outs[0] / name, outs[1] / name
                assert a.exists() == b.exists()
                if a.exists():
                    assert a.read_bytes() == b.read_bytes(), f"{task}/{name}"

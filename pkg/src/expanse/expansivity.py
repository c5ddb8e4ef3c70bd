"""Falsifiers and desk-scale certifiers for the expansivity hierarchy.

A "certified_at_scale" verdict is not a proof: the properties quantify
over all pairs, all increasing homeomorphisms and all of R, and every
truncation (window, step, grid, band) is recorded in the report. Only a
falsification, which exhibits a concrete witness pair, is conclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .alignment import (
    AlignmentResult,
    Reparam,
    _find_orbit_time,
    align,
    orbit_membership,
)
from .flows import FlowModel, OrbitSample, sample_orbit
from .spaces import CircleUnion, FiniteSet, Interval01, Point, Torus2, as_coords

DEFAULT_T = 20.0
DEFAULT_H = 0.01
DEFAULT_BAND = 2.0
DEFAULT_GRID = 64
TOL_ORBIT = 1e-7

# weight kind and zero-fixing flag mandated by each definition
PROPERTY_RULES = {
    "expansive": ("unit", True, "t0_zero"),
    "kstar": ("unit", True, "t0_free"),
    "rescaling": ("field_norm", False, "t0_zero"),
    "singular_expansive": ("sing_dist", False, "t0_free"),
}


class ExpansivityError(ValueError):
    pass


@dataclass(frozen=True)
class Witness:
    x: Point
    y: Point
    alignment: AlignmentResult


@dataclass
class PropertyReport:
    property: str
    verdict: str  # falsified | certified_at_scale | inconclusive
    eps: float
    delta: float
    scale: dict
    witness: Optional[Witness] = None
    stats: dict = field(default_factory=dict)
    pair_costs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        doc = {
            "property": self.property,
            "verdict": self.verdict,
            "eps": self.eps,
            "delta": self.delta,
            "scale": dict(self.scale),
            "stats": dict(self.stats),
        }
        if self.witness is not None:
            w = self.witness
            rep = w.alignment.reparam.compressed()
            doc["witness"] = {
                "x": list(w.x.coords),
                "y": list(w.y.coords),
                "cost": w.alignment.cost,
                "argmax_t": w.alignment.argmax_t,
                "weight_kind": w.alignment.weight_kind,
                "reparam_knots_t": rep.knots_t.tolist(),
                "reparam_knots_s": rep.knots_s.tolist(),
            }
        return doc


# ------------------------------------------------------------- pair grids

def _interval_bases(delta: float, n_uniform: int) -> list:
    xs = set(np.linspace(0.0, 1.0, n_uniform + 2)[1:-1])
    for c in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0):
        v = delta * c
        if 0.0 < v < 0.5:
            xs.add(v)
            xs.add(1.0 - v)
    for k in range(2, 14):
        xs.add(2.0 ** -k)
        xs.add(1.0 - 2.0 ** -k)
    return [np.array([x]) for x in sorted(xs)]


def default_pair_grid(flow: FlowModel, delta: float,
                      n_uniform: int = 16, n_angles: int = 4) -> list:
    """Deterministic stratified pair grid for the expansivity falsifiers.

    Stratification is orbit-dense near the singular set, where the
    interesting violations live: adjacent-circle radial pairs (outermost
    first) on circle unions, geometric ladders near the endpoints on the
    interval.
    Each base also gets a same-orbit partner so the conclusion-true branch
    is exercised.
    """
    sp = flow.space
    pairs = []
    if isinstance(sp, CircleUnion):
        angles = [2.0 * math.pi * k / n_angles for k in range(n_angles)]
        for i in range(len(sp.radii)):
            for ang in angles:
                x = sp.on_circle(i, ang)
                if i + 1 < len(sp.radii):
                    pairs.append((x, sp.on_circle(i + 1, ang)))
                r = sp.radii[i]
                chord = min(delta, 1.8 * r)
                dtheta = 2.0 * math.asin(chord / (2.0 * r))
                pairs.append((x, sp.on_circle(i, ang + dtheta)))
                if not flow.forward_only:
                    pairs.append((x, flow.evaluate(0.5, x)))
    elif isinstance(sp, Interval01):
        for x in _interval_bases(delta, n_uniform):
            for y in sp.partners(x, delta) + sp.partners(x, 0.5 * delta):
                pairs.append((x, y))
            if not flow.forward_only:
                pairs.append((x, flow.evaluate(0.5, x)))
    elif isinstance(sp, FiniteSet):
        pts = sp.grid()
        pairs = [(a, b) for a in pts for b in pts]
    elif isinstance(sp, Torus2):
        for x in sp.grid(6):
            for y in sp.partners(x, delta):
                pairs.append((x, y))
    else:
        raise ExpansivityError(f"no default pair grid for {sp.kind}")
    return pairs


def _t0_ladder(T: float, step: float) -> np.ndarray:
    """Candidate t0 values ordered outward from 0."""
    ks = np.arange(1, int(T / step) + 1)
    out = [0.0]
    for k in ks:
        out.extend((k * step, -k * step))
    return np.array(out)


def _conclusion_holds(flow, x, y, eps, mode, reparam, T, t0_step, tol) -> bool:
    """The definition's conclusion: the aligned point lies on the x-orbit.

    t0_zero checks phi_{s(0)}(y) in phi_[-eps,eps](x); t0_free scans the
    sampled t0 window for phi_{s(t0)}(y) in phi_[t0-eps,t0+eps](x).
    """
    if mode == "t0_zero":
        p = flow.evaluate(reparam(0.0), as_coords(y))
        return _find_orbit_time(flow, x, p, -eps, eps, tol) is not None
    for t0 in _t0_ladder(T, t0_step):
        p = flow.evaluate(reparam(float(t0)), as_coords(y))
        if _find_orbit_time(flow, x, p, t0 - eps, t0 + eps, tol) is not None:
            return True
    return False


class _SampleCache:
    def __init__(self, flow, T, h):
        self.flow, self.T, self.h = flow, T, h
        self._cache = {}

    def __call__(self, x) -> OrbitSample:
        key = tuple(np.asarray(x, dtype=float))
        if key not in self._cache:
            self._cache[key] = sample_orbit(self.flow, x, self.T, self.h)
        return self._cache[key]


def _scale_record(T, h, band_width, n_pairs, **extra) -> dict:
    rec = {"T": T, "h": h, "band_width": band_width, "grid": n_pairs}
    rec.update(extra)
    return rec


def check_property(flow: FlowModel, property: str, eps: float, delta: float,
                   pair_grid=None, *, T: float = DEFAULT_T, h: float = DEFAULT_H,
                   band_width: float = DEFAULT_BAND, strict_t0: bool = False,
                   t0_step: float = 0.5, max_pairs: Optional[int] = None,
                   tol_orbit: float = TOL_ORBIT) -> PropertyReport:
    """Falsify or desk-scale-certify one of the four expansivity properties.

    For each sampled pair, minimizes the property's weighted separation over
    reparametrizations; a pair with cost <= delta whose conclusion fails (at
    the mandated t0 quantifier, over the sampled window) is a witness. The
    strict_t0 flag strengthens the free-t0 conclusions to t0 = 0.
    """
    if property not in PROPERTY_RULES:
        raise ExpansivityError(f"unknown property: {property!r}")
    if eps <= 0 or delta <= 0:
        raise ExpansivityError("eps and delta must be positive")
    weight_kind, fix_zero, t0_mode = PROPERTY_RULES[property]
    if strict_t0:
        t0_mode = "t0_zero"
    pairs = list(pair_grid) if pair_grid is not None else default_pair_grid(flow, delta)
    scanned = pairs if max_pairs is None else pairs[:max_pairs]

    samples = _SampleCache(flow, T, h)
    pair_costs = []
    below = 0
    witness = None
    for x, y in scanned:
        res = align(samples(x), samples(y), weight_kind=weight_kind,
                    fix_zero=fix_zero, band_width=band_width)
        pair_costs.append((tuple(as_coords(x)), tuple(as_coords(y)), res.cost))
        if res.cost <= delta:
            below += 1
            if not _conclusion_holds(flow, as_coords(x), as_coords(y), eps,
                                     t0_mode, res.reparam, T, t0_step, tol_orbit):
                witness = Witness(flow.space.point(*as_coords(x)),
                                  flow.space.point(*as_coords(y)), res)
                break

    if witness is not None:
        verdict = "falsified"
    elif len(scanned) < len(pairs):
        verdict = "inconclusive"
    else:
        verdict = "certified_at_scale"
    return PropertyReport(
        property=property, verdict=verdict, eps=eps, delta=delta,
        witness=witness,
        scale=_scale_record(T, h, band_width, len(pairs), t0_step=t0_step,
                            t0_window=[-T, T], strict_t0=strict_t0,
                            tol_orbit=tol_orbit),
        stats={"pairs_checked": len(pair_costs), "pairs_total": len(pairs),
               "pairs_below_delta": below},
        pair_costs=pair_costs,
    )


# -------------------------------------------------------- equicontinuity

def _equicontinuity_pairs(flow, delta, singular_variant, n_uniform=16):
    sp = flow.space
    sing = flow.singular
    pairs = []

    def bound_at(x):
        return delta * float(sing.distances(as_coords(x))) if singular_variant else delta

    if isinstance(sp, Interval01):
        bases = _interval_bases(delta, n_uniform)
    elif isinstance(sp, (CircleUnion, FiniteSet, Torus2)):
        bases = sp.grid(8) if not isinstance(sp, FiniteSet) else sp.grid()
    else:
        raise ExpansivityError(f"no pair generator for {sp.kind}")
    for x in bases:
        b = bound_at(x)
        if b <= 0:
            continue
        # 0.999 keeps boundary partners strictly inside the hypothesis,
        # so fp noise cannot manufacture a violation of sup <= eps = delta
        # on an isometry
        for frac in (0.999, 0.5):
            for y in sp.partners(x, frac * b):
                if sp.distance(as_coords(x), as_coords(y)) <= b:
                    pairs.append((x, y))
    return pairs


def check_equicontinuity(flow: FlowModel, singular_variant: bool, eps: float,
                         delta: float, pair_grid=None, *, T: float = DEFAULT_T,
                         h: float = DEFAULT_H,
                         max_pairs: Optional[int] = None) -> PropertyReport:
    """Check that hypothesis-close pairs stay eps-close over the window.

    Plain variant: d(x, y) <= delta. Singular variant: d(x, y) <=
    delta * dist(x, Sing). The conclusion sup_{|t|<=T} d(phi_t x, phi_t y)
    <= eps is evaluated on the sample grid with no reparametrization.
    """
    if eps <= 0 or delta <= 0:
        raise ExpansivityError("eps and delta must be positive")
    pairs = list(pair_grid) if pair_grid is not None \
        else _equicontinuity_pairs(flow, delta, singular_variant)
    scanned = pairs if max_pairs is None else pairs[:max_pairs]
    name = "singular_equicontinuous" if singular_variant else "equicontinuous"

    samples = _SampleCache(flow, T, h)
    pair_costs = []
    witness = None
    for x, y in scanned:
        xs, ys = samples(x), samples(y)
        seps = flow.space.distance(xs.points, ys.points)
        i = int(np.argmax(seps))
        sup = float(seps[i])
        pair_costs.append((tuple(as_coords(x)), tuple(as_coords(y)), sup))
        if sup > eps:
            res = AlignmentResult(cost=sup, reparam=Reparam.identity(-T, T),
                                  argmax_t=float(xs.times[i]), weight_kind="unit")
            witness = Witness(flow.space.point(*as_coords(x)),
                              flow.space.point(*as_coords(y)), res)
            break

    if witness is not None:
        verdict = "falsified"
    elif len(scanned) < len(pairs):
        verdict = "inconclusive"
    else:
        verdict = "certified_at_scale"
    return PropertyReport(
        property=name, verdict=verdict, eps=eps, delta=delta, witness=witness,
        scale=_scale_record(T, h, 0.0, len(pairs)),
        stats={"pairs_checked": len(pair_costs), "pairs_total": len(pairs)},
        pair_costs=pair_costs,
    )


# -------------------------------------------------------- ball inclusion

def ball_inclusion_check(flow: FlowModel, eps: float, delta: float,
                         x_grid=None, ball_samples: int = 100, *,
                         tol_orbit: float = TOL_ORBIT) -> PropertyReport:
    """Verify B[x, delta dist(x, Sing)] subset of phi_[-eps,eps](x) on a grid.

    The sufficient condition for singular expansivity and singular
    equicontinuity; supported for one-dimensional flows, where the ball is
    an interval and transit times certify membership.
    """
    if not isinstance(flow.space, Interval01):
        raise ExpansivityError("ball inclusion check needs a one-dimensional flow")
    if not 0.0 < delta < 0.5:
        raise ExpansivityError("delta must lie in (0, 1/2)")
    grid = x_grid if x_grid is not None else flow.space.grid(1000)
    xs = np.array([as_coords(p)[0] for p in grid])
    witness = None
    max_abs_t = 0.0
    argmax = None
    for x in xs:
        rho = delta * float(flow.singular.distances(np.array([x])))
        if rho == 0.0:
            continue
        ys = np.linspace(x - rho, x + rho, ball_samples)
        if flow.transit_time_fn is not None and 0.0 < x < 1.0:
            ts = np.asarray(flow.transit_time_fn(np.full_like(ys, x), ys))
        else:
            ts = np.array([orbit_membership(flow, np.array([x]), np.array([y]),
                                            eps, tol_orbit) or math.inf for y in ys])
        worst = int(np.argmax(np.abs(ts)))
        if abs(ts[worst]) > max_abs_t:
            max_abs_t = float(abs(ts[worst]))
            argmax = (float(x), float(ys[worst]))
        if abs(ts[worst]) > eps + 1e-9:
            res = AlignmentResult(cost=float(abs(ts[worst])),
                                  reparam=Reparam.identity(-eps, eps),
                                  argmax_t=float(ts[worst]), weight_kind="unit")
            witness = Witness(flow.space.point(x), flow.space.point(ys[worst]), res)
            break
    verdict = "falsified" if witness is not None else "certified_at_scale"
    return PropertyReport(
        property="ball_inclusion", verdict=verdict, eps=eps, delta=delta,
        witness=witness,
        scale=_scale_record(0.0, 0.0, 0.0, len(xs), ball_samples=ball_samples),
        stats={"max_transit_time": max_abs_t, "argmax_pair": argmax},
    )


# ------------------------------------------------------------- constants

@dataclass(frozen=True)
class ConstantsReport:
    B: float
    C: float
    argmax_B: tuple
    argmax_C: tuple
    n_grid: int
    degenerate: bool


def _constants_grid(flow: FlowModel) -> list:
    sp = flow.space
    if isinstance(sp, Interval01):
        xs = np.unique(np.concatenate([
            np.linspace(0.0, 1.0, 1025)[1:-1],
            np.geomspace(1e-8, 0.4, 64),
            1.0 - np.geomspace(1e-8, 0.4, 64),
        ]))
        return [np.array([x]) for x in xs]
    if isinstance(sp, CircleUnion):
        return sp.grid(8, with_origin=False)
    return sp.grid(16) if not isinstance(sp, FiniteSet) else sp.grid()


def comparability_constants(flow: FlowModel, grid=None) -> ConstantsReport:
    """Grid maxima of ||V|| / dist(., Sing) and its reciprocal.

    B bounds the field by the singular distance (Lipschitz direction); C
    the reverse, meaningful only when the field's zeros are nondegenerate.
    C is +inf when the grid exposes a vanishing field off the singular set.
    """
    if flow.vector_field is None:
        raise ExpansivityError(f"{flow.name} has no vector field")
    pts = np.array([as_coords(p) for p in (grid if grid is not None
                                           else _constants_grid(flow))])
    v = np.asarray(flow.vector_field(pts), dtype=float)
    norms = np.sqrt((v ** 2).sum(axis=-1))
    dists = flow.singular.distances(pts)
    keep = dists > 0.0
    pts, norms, dists = pts[keep], norms[keep], dists[keep]
    if pts.shape[0] == 0:
        raise ExpansivityError("grid contains no nonsingular points")
    ratio_b = norms / dists
    i_b = int(np.argmax(ratio_b))
    degenerate = bool((norms == 0.0).any())
    with np.errstate(divide="ignore"):
        ratio_c = dists / norms
    i_c = int(np.argmax(ratio_c))
    return ConstantsReport(
        B=float(ratio_b[i_b]), C=float(ratio_c[i_c]),
        argmax_B=tuple(float(v) for v in pts[i_b]),
        argmax_C=tuple(float(v) for v in pts[i_c]),
        n_grid=pts.shape[0], degenerate=degenerate,
    )


def local_norm_constant(flow: FlowModel, grid=None, n_pairs: int = 10_000,
                        seed: int = 0) -> tuple:
    """Radius factor c with ||V(y)|| within [1/2, 2] of ||V(x)|| on c||V(x)||-balls.

    Starts from c = 1/(4 L) with L the (given or grid-estimated) local
    Lipschitz constant and halves c until the two-sided bound verifies on
    the sampled pairs. Returns (c, report).
    """
    if flow.vector_field is None:
        raise ExpansivityError(f"{flow.name} has no vector field")
    pts = np.array([as_coords(p) for p in (grid if grid is not None
                                           else _constants_grid(flow))])
    v = np.asarray(flow.vector_field(pts), dtype=float)
    norms = np.sqrt((v ** 2).sum(axis=-1))
    if flow.lipschitz_L is not None:
        L = flow.lipschitz_L
    else:
        sub = pts[:: max(1, len(pts) // 128)]
        vs = np.asarray(flow.vector_field(sub), dtype=float)
        d = flow.space.distance(sub[:, None, :], sub[None, :, :])
        dv = np.sqrt(((vs[:, None, :] - vs[None, :, :]) ** 2).sum(-1))
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(d > 0, dv / d, 0.0)
        L = float(np.nanmax(r))
    if L <= 0:
        return math.inf, {"L_hat": 0.0, "halvings": 0, "pairs_checked": 0}
    c = 1.0 / (4.0 * L)
    rng = np.random.default_rng(seed)
    nonsing = pts[norms > 0]
    halvings = 0
    while True:
        ok = True
        checked = 0
        for _ in range(n_pairs):
            x = nonsing[rng.integers(len(nonsing))]
            vx = math.sqrt(float((np.asarray(flow.vector_field(x)) ** 2).sum()))
            if vx == 0.0:
                continue
            y = flow.space.sample_near(rng, x, 0.999 * c * vx)
            vy = math.sqrt(float((np.asarray(flow.vector_field(y)) ** 2).sum()))
            checked += 1
            if not (0.5 * vx <= vy <= 2.0 * vx):
                ok = False
                break
        if ok or halvings >= 30:
            return c, {"L_hat": L, "halvings": halvings, "pairs_checked": checked}
        c *= 0.5
        halvings += 1


def return_time_bound_check(flow: FlowModel, x_grid=None, delta_grid=None, *,
                            r_hi: float = 3.0, h: float = 0.002,
                            iters: int = 20) -> dict:
    """Largest r0 such that returns to delta||V(x)||-balls force |t| < 3 delta.

    Bisects over r candidates; for each, scans sampled x, delta < r/3 and
    |t| < r for a return d(phi_t x, x) <= delta ||V(x)|| with |t| >= 3 delta.
    """
    if flow.vector_field is None:
        raise ExpansivityError(f"{flow.name} has no vector field")
    grid = x_grid if x_grid is not None else _constants_grid(flow)
    grid = [as_coords(p) for p in grid
            if float(flow.singular.distances(as_coords(p))) > 0][:64]
    deltas = np.asarray(delta_grid if delta_grid is not None
                        else np.geomspace(1e-3, r_hi / 3.0 * 0.99, 10))
    ts = np.arange(-int(r_hi / h), int(r_hi / h) + 1) * h
    cache = []
    for x in grid:
        pts = flow.evaluate(ts, x)
        dist_back = flow.space.distance(pts, x[None, :])
        vx = math.sqrt(float((np.asarray(flow.vector_field(x)) ** 2).sum()))
        cache.append((x, dist_back, vx))

    def violation(r):
        for x, dist_back, vx in cache:
            t_mask = np.abs(ts) < r
            for d in deltas[deltas < r / 3.0]:
                bad = t_mask & (dist_back <= d * vx) & (np.abs(ts) >= 3.0 * d)
                if bad.any():
                    i = int(np.argmax(bad))
                    return (tuple(x), float(d), float(ts[i]))
        return None

    lo, hi = 0.0, r_hi
    worst = violation(r_hi)
    if worst is None:
        return {"r0": r_hi, "violation": None, "n_grid": len(grid),
                "deltas": deltas.tolist(), "h": h}
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if violation(mid) is None:
            lo = mid
        else:
            hi = mid
    return {"r0": lo, "violation": worst, "n_grid": len(grid),
            "deltas": deltas.tolist(), "h": h}


# -------------------------------------------------------------- hierarchy

def hierarchy_check(flow: FlowModel, pairs=None, delta: float = 0.25, *,
                    T: float = 5.0, h: float = 0.05,
                    band_width: float = 1.0) -> dict:
    """Implication cost_sing <= delta/diam(X)  =>  cost_unit <= delta, per pair.

    Both costs are minimized over the same free path class (zero fixing is
    absorbed by shifting y along its orbit), so the pointwise bound
    dist(., Sing) <= diam(X) makes the implication structural; any recorded
    violation would expose an arithmetic bug.
    """
    pairs = list(pairs) if pairs is not None else default_pair_grid(flow, delta)
    diam = flow.space.diameter
    samples = _SampleCache(flow, T, h)
    cache = {}
    rows = []
    violations = []
    for x, y in pairs:
        key = (tuple(as_coords(x)), tuple(as_coords(y)))
        if key not in cache:
            xs, ys = samples(x), samples(y)
            c_sing = align(xs, ys, weight_kind="sing_dist", band_width=band_width).cost
            c_unit = align(xs, ys, weight_kind="unit", band_width=band_width).cost
            cache[key] = (c_sing, c_unit)
        c_sing, c_unit = cache[key]
        rows.append((key[0], key[1], c_sing, c_unit))
        if c_sing <= delta / diam and not c_unit <= delta:
            violations.append(rows[-1])
    return {
        "delta": delta, "diam": diam, "pairs": rows, "violations": violations,
        "n_pairs": len(rows), "scale": _scale_record(T, h, band_width, len(rows)),
    }


def delta_star(flow: FlowModel, property: str, eps_values, pair_grid=None, *,
               T: float = DEFAULT_T, h: float = DEFAULT_H,
               band_width: float = DEFAULT_BAND, t0_step: float = 0.5,
               tol_orbit: float = TOL_ORBIT) -> list:
    """delta*(eps) curve: infimum of falsifying costs per eps.

    The violation set {delta : some pair has cost <= delta and a failed
    conclusion} is monotone, so the largest violation-free delta is exactly
    the minimum cost among conclusion-failing pairs; no bisection needed at
    a fixed sample set. Returns [(eps, delta_star)] with inf when no pair
    fails.
    """
    weight_kind, fix_zero, t0_mode = PROPERTY_RULES[property]
    pairs = list(pair_grid) if pair_grid is not None \
        else default_pair_grid(flow, min(eps_values))
    samples = _SampleCache(flow, T, h)
    aligned = []
    for x, y in pairs:
        res = align(samples(x), samples(y), weight_kind=weight_kind,
                    fix_zero=fix_zero, band_width=band_width)
        aligned.append((as_coords(x), as_coords(y), res))
    curve = []
    for eps in eps_values:
        fail_costs = [res.cost for x, y, res in aligned
                      if not _conclusion_holds(flow, x, y, eps, t0_mode,
                                               res.reparam, T, t0_step, tol_orbit)]
        curve.append((float(eps), min(fail_costs) if fail_costs else math.inf))
    return curve

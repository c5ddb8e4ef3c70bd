"""Pseudo-orbit generation and eps-shadowing with Rep(eps) reparametrizations.

Finite pseudo-orbits stand in for the two-sided infinite ones; the index
range is symmetric around 0 so the two-sided cumulative clock S(i) keeps
its meaning. The shadow search anchors the candidate orbit at clock 0 and
runs a slope-constrained minimax DP outward in both directions; the slope
set is kept strictly inside [1 - eps, 1 + eps], so every returned
reparametrization is admissible by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .alignment import Reparam
from .flows import FlowModel
from .spaces import CircleUnion, Interval01, Point, as_coords


class ShadowingError(ValueError):
    pass


@dataclass(frozen=True)
class PseudoOrbit:
    """A (delta, T_min)-pseudo-orbit indexed over [i_min, i_min + n - 1]."""

    points: tuple       # coordinate tuples, list position p = i - i_min
    durations: tuple
    i_min: int
    T_min: float
    delta: float

    def __post_init__(self):
        if len(self.points) != len(self.durations) or not self.points:
            raise ShadowingError("points and durations must match and be nonempty")
        if any(t < self.T_min for t in self.durations):
            raise ShadowingError("every duration must be >= T_min")
        if not self.i_min <= 0 <= self.i_max:
            raise ShadowingError("index range must contain 0")

    @property
    def i_max(self) -> int:
        return self.i_min + len(self.points) - 1

    def entry(self, i: int):
        if not self.i_min <= i <= self.i_max:
            raise ShadowingError(f"index {i} outside [{self.i_min}, {self.i_max}]")
        p = i - self.i_min
        return np.asarray(self.points[p], dtype=float), float(self.durations[p])

    def validate(self, flow: FlowModel, tol: float = 1e-12) -> None:
        for i in range(self.i_min, self.i_max):
            x, t = self.entry(i)
            nxt, _ = self.entry(i + 1)
            jump = flow.space.distance(flow.evaluate(t, x), nxt)
            if jump > self.delta + tol:
                raise ShadowingError(f"jump {jump} at index {i} exceeds delta")

    def save(self, path) -> None:
        lines = [f"# i_min={self.i_min} T_min={self.T_min:.12g} delta={self.delta:.12g}"]
        for p, t in zip(self.points, self.durations):
            coords = ",".join(f"{v:.17g}" for v in p)
            lines.append(f"{coords},{t:.17g}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "PseudoOrbit":
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        meta = dict(kv.split("=") for kv in lines[0].lstrip("# ").split())
        pts, durs = [], []
        for ln in lines[1:]:
            vals = [float(v) for v in ln.split(",")]
            pts.append(tuple(vals[:-1]))
            durs.append(vals[-1])
        return cls(points=tuple(pts), durations=tuple(durs),
                   i_min=int(meta["i_min"]), T_min=float(meta["T_min"]),
                   delta=float(meta["delta"]))


def cumulative_clock(po: PseudoOrbit, i: int) -> float:
    """S(i): summed durations before index i, negated partial sums below 0."""
    if not po.i_min <= i <= po.i_max + 1:
        raise ShadowingError(f"index {i} outside [{po.i_min}, {po.i_max + 1}]")
    if i == 0:
        return 0.0
    if i > 0:
        return float(sum(po.entry(k)[1] for k in range(0, i)))
    return -float(sum(po.entry(k)[1] for k in range(i, 0)))


@dataclass(frozen=True)
class ShadowResult:
    shadow_point: Point
    reparam: Reparam
    max_error: float
    per_segment_errors: tuple


def generate_pseudo_orbit(flow: FlowModel, x0, n_segments: int, delta: float,
                          T_min: float = 1.0, seed: int = 0) -> PseudoOrbit:
    """Seeded forward chain x_{i+1} = phi_{t_i}(x_i) + jump, |jump| <= delta.

    Durations are uniform in [T_min, 2 T_min]; jumps are uniform over the
    delta-ball intersected with the space. x0 starts the chain at the
    leftmost index -floor(n/2); deterministic under the seed.
    """
    if delta < 0:
        raise ShadowingError("delta must be nonnegative")
    if T_min < 1.0:
        raise ShadowingError("T_min must be >= 1")
    rng = np.random.default_rng(seed)
    pts = [as_coords(x0)]
    durs = [float(rng.uniform(T_min, 2.0 * T_min)) for _ in range(n_segments)]
    for k in range(n_segments - 1):
        tip = flow.evaluate(durs[k], pts[-1])
        if delta == 0.0:
            nxt = tip
        else:
            nxt = None
            for _ in range(100):
                try:
                    nxt = flow.space.sample_near(rng, tip, delta)
                    break
                except Exception:
                    continue
            if nxt is None:
                raise ShadowingError("jump left the domain 100 times in a row")
        pts.append(np.asarray(nxt, dtype=float))
    return PseudoOrbit(points=tuple(tuple(p) for p in pts), durations=tuple(durs),
                       i_min=-(n_segments // 2), T_min=T_min, delta=delta)


def default_candidates(flow: FlowModel, po: PseudoOrbit, eps: float,
                       level: int = 1) -> list:
    """Candidate shadow start points: pulled-back entries plus perturbations.

    Every entry x_i is flowed to clock 0 (z_i = phi_{-S(i)}(x_i)): whichever
    segment carries the visible dynamics, some candidate matches it exactly
    and the slope corrections only absorb the residual seam slips. The
    index-0 entry comes first; a tau ladder around it stands in for the
    free s(0), and on circle unions nearby circles are scanned as well
    since radial position is the invariant a shadow must match.
    """
    z0, _ = po.entry(0)
    out = []

    def push(z):
        z = np.asarray(z, dtype=float)
        if all(flow.space.distance(z, c) > 1e-12 for c in out):
            out.append(z)

    for i in sorted(range(po.i_min, po.i_max + 1), key=abs):
        s_i = cumulative_clock(po, i)
        if flow.forward_only and -s_i < 0:
            continue
        x_i, _ = po.entry(i)
        push(flow.evaluate(-s_i, x_i))
    taus = [k * eps / (2.0 * level) for k in range(-level, level + 1) if k != 0]
    for tau in taus:
        if not flow.forward_only or tau >= 0:
            push(flow.evaluate(float(tau), z0))
    if isinstance(flow.space, CircleUnion):
        sp = flow.space
        rho = math.hypot(z0[0], z0[1])
        span = abs(po.delta) * len(po.points) + 1e-12
        alpha = math.atan2(z0[1], z0[0])
        for r in sp.radii:
            if abs(r - rho) <= span:
                push(np.array([r * math.cos(alpha), r * math.sin(alpha)]))
    return out


def _reference_trajectory(flow, po, ts):
    """phi_{t - S(i)}(x_i) on the grid, segment chosen by S(i) <= t < S(i+1)."""
    s_vals = np.array([cumulative_clock(po, i)
                       for i in range(po.i_min, po.i_max + 2)])
    seg = np.clip(np.searchsorted(s_vals, ts, side="right") - 1, 0,
                  len(po.points) - 1)
    ref = np.empty((len(ts), len(po.points[0])))
    for p in range(len(po.points)):
        m = seg == p
        if m.any():
            x = np.asarray(po.points[p], dtype=float)
            ref[m] = flow.evaluate(ts[m] - s_vals[p], x)
    return ref, seg


def _sweep(lc_rows, prev=None):
    """Forward minimax sweep over cone rows; returns terminal costs and choices."""
    D = lc_rows[0] if prev is None else np.maximum(lc_rows[0], prev)
    choices = []
    for r in range(1, len(lc_rows)):
        width = len(lc_rows[r])
        prev_w = len(D)
        cand = np.full((3, width), np.inf)
        for a, off in enumerate((0, -1, -2)):
            lo = max(0, -off)
            hi = min(width, prev_w - off)
            if lo < hi:
                cand[a, lo:hi] = D[lo + off:hi + off]
        pick = np.argmin(cand, axis=0).astype(np.int8)
        D = np.maximum(lc_rows[r], cand[pick, np.arange(width)])
        choices.append(pick)
    return D, choices


def _backtrack(choices, end):
    path = [end]
    for pick in reversed(choices):
        off = (0, -1, -2)[int(pick[path[-1]])]
        path.append(path[-1] + off)
    path.reverse()
    return path


def _try_candidate(flow, po, z, h, q, ts, ref, seg):
    """Slope-constrained minimax alignment of the z-orbit to the reference."""
    n_lo = int(round(-ts[0] / h))
    n_hi = int(round(ts[-1] / h))
    a0 = n_lo  # grid index of t = 0

    h_u = h / q
    m_lo = -n_lo * (q + 1)
    m_hi = n_hi * (q + 1)
    orbit = flow.evaluate(np.arange(m_lo, m_hi + 1) * h_u, z)

    def cone(kdist, sign):
        center = sign * kdist * q
        return center - kdist, center + kdist

    def rows(direction):
        count = n_hi if direction > 0 else n_lo
        out = []
        for r in range(count + 1):
            k = a0 + direction * r
            lo, hi = cone(r, direction)
            cells = orbit[lo - m_lo:hi - m_lo + 1]
            out.append(flow.space.distance(cells, ref[k][None, :]))
        return out

    fwd_rows = rows(+1)
    bwd_rows = rows(-1)
    Df, ch_f = _sweep(fwd_rows)
    Db, ch_b = _sweep(bwd_rows)
    end_f = int(np.argmin(Df))
    end_b = int(np.argmin(Db))
    max_error = max(float(Df[end_f]), float(Db[end_b]))

    path_f = _backtrack(ch_f, end_f)
    path_b = _backtrack(ch_b, end_b)
    m_path = np.empty(len(ts), dtype=np.int64)
    for r, rel in enumerate(path_f):
        lo, _ = cone(r, +1)
        m_path[a0 + r] = lo + rel
    for r, rel in enumerate(path_b):
        lo, _ = cone(r, -1)
        m_path[a0 - r] = lo + rel
    reparam = Reparam(ts.copy(), m_path * h_u)

    per_cell = flow.space.distance(orbit[m_path - m_lo], ref)
    per_segment = tuple(float(per_cell[seg == p].max()) if (seg == p).any()
                        else 0.0 for p in range(len(po.points)))
    return max_error, reparam, per_segment


def find_shadow(flow: FlowModel, po: PseudoOrbit, eps: float,
                candidate_grid=None, *, h: float = 0.02,
                mode: str = "first") -> Optional[ShadowResult]:
    """Search for a point whose Rep(eps)-reparametrized orbit eps-shadows po.

    Candidates are scanned in grid order; mode "first" returns the first
    one with max_error <= eps (None when none succeeds), mode "best" the
    smallest-error result regardless of success. The shadowing inequality
    is evaluated one-sidedly (left limit) at segment-boundary times.
    """
    if eps <= 0:
        raise ShadowingError("eps must be positive")
    q = max(2, int(math.ceil(1.25 / eps)))
    candidates = list(candidate_grid) if candidate_grid is not None \
        else default_candidates(flow, po, eps)
    s_min = cumulative_clock(po, po.i_min)
    s_max = cumulative_clock(po, po.i_max + 1)
    n_lo = int(math.floor(-s_min / h + 1e-9))
    n_hi = int(math.floor(s_max / h + 1e-9))
    ts = np.arange(-n_lo, n_hi + 1) * h
    ref, seg = _reference_trajectory(flow, po, ts)
    best = None
    for z in candidates:
        err, reparam, per_seg = _try_candidate(flow, po, as_coords(z), h, q, ts, ref, seg)
        res = ShadowResult(
            shadow_point=flow.space.point(*as_coords(z)), reparam=reparam,
            max_error=err, per_segment_errors=per_seg)
        if mode == "first":
            if err <= eps:
                return res
        else:
            if best is None or err < best.max_error:
                best = res
    return best if mode == "best" else None

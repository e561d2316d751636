"""Characteristic foliations in planar charts.

Everything here works in a two dimensional real chart ``(x, y)`` of the
surface (or of a maximally real submanifold of ``C^2``).  A
:class:`LeafField` supplies an unnormalized vector field whose direction
spans the characteristic line; its zeros are the complex tangencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

from .cr_geometry import (
    GenericGraph,
    MaximallyRealGraph,
    SurfaceInHypersurface,
    characteristic_direction_pair,
    find_complex_tangencies,
    jacobian_fd,
    tangency_defect,
)
from .disc_families import ConeField
from .errors import ChartTooSmall, NonHyperbolicTangency, NoTouchingLine, SingularLeafField

__all__ = [
    "LeafField",
    "Leaf",
    "ClosedSetSample",
    "HyperbolicTree",
    "ConditionVerdict",
    "SpecialPoint",
    "integrate_leaf",
    "separatrix_tree",
    "check_characteristic_condition",
    "check_orbit_condition",
    "find_special_point",
    "brute_force_extremal",
]


# ----------------------------------------------------------------------
# fields and closed sets


@dataclass
class LeafField:
    """Line field on a rectangular chart with optional excluded discs.

    ``raw(P)`` maps points of shape ``(2, M)`` to vectors of the same
    shape; only the direction (up to sign) matters.
    """

    raw: Callable
    region: tuple = (-1.0, 1.0, -1.0, 1.0)
    holes: tuple = ()
    singular_points: list = field(default_factory=list)
    surface: Optional[SurfaceInHypersurface] = None

    @classmethod
    def from_surface(cls, s: SurfaceInHypersurface, region=(-1.0, 1.0, -1.0, 1.0), holes=()) -> "LeafField":
        def raw(P):
            ca, cb = tangency_defect(s, P[0], P[1])
            return np.stack([-cb, ca]) * s.orientation

        sing = [r.point for r in find_complex_tangencies(s, region, holes=holes)]
        return cls(raw, tuple(region), tuple(holes), sing, s)

    @classmethod
    def from_pair(cls, M: GenericGraph, M1: MaximallyRealGraph, region=(-1.0, 1.0, -1.0, 1.0)) -> "LeafField":
        """Characteristic field of ``M1`` inside ``M`` for ``n = 2``, in the ``x`` chart."""
        if M.n != 2:
            raise ValueError("planar charts need n = 2")

        def raw(P):
            P = np.atleast_2d(P)
            out = np.empty_like(P, dtype=float)
            for j in range(P.shape[1]):
                out[:, j] = characteristic_direction_pair(M, M1, P[:, j])
            return out

        return cls(raw, tuple(region), ())

    @classmethod
    def from_vector_field(cls, f: Callable, region=(-1.0, 1.0, -1.0, 1.0), holes=(), singular_points=()) -> "LeafField":
        return cls(f, tuple(region), tuple(holes), list(singular_points))

    def direction(self, P, reference=None, tol: float = 1e-14) -> np.ndarray:
        P = np.asarray(P, float)
        squeeze = P.ndim == 1
        P2 = P.reshape(2, -1)
        W = np.asarray(self.raw(P2), float).reshape(2, -1)
        nrm = np.linalg.norm(W, axis=0)
        if np.any(nrm <= tol):
            raise SingularLeafField("direction requested at a singular point")
        W = W / nrm
        if reference is not None:
            ref = np.asarray(reference, float).reshape(2, -1)
            flip = np.sum(W * ref, axis=0) < 0
            W[:, flip] *= -1
        return W[:, 0] if squeeze else W

    def inside(self, P) -> np.ndarray:
        P = np.asarray(P, float).reshape(2, -1)
        x0, x1, y0, y1 = self.region
        ok = (P[0] >= x0) & (P[0] <= x1) & (P[1] >= y0) & (P[1] <= y1)
        for cx, cy, r in self.holes:
            ok &= np.hypot(P[0] - cx, P[1] - cy) > r
        return ok


@dataclass
class ClosedSetSample:
    """Closed set in the chart: a membership predicate plus a point cloud.

    A point is counted as inside when the predicate holds or it lies
    within ``epsilon`` of the cloud.
    """

    predicate: Callable
    points: np.ndarray
    epsilon: float

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, float))
        if self.points.shape[0] == 2 and self.points.shape[1] != 2:
            self.points = self.points.T
        self._tree = cKDTree(self.points)

    def contains(self, P) -> np.ndarray:
        P = np.asarray(P, float).reshape(2, -1)
        d, _ = self._tree.query(P.T)
        return np.asarray(self.predicate(P), bool) | (d <= self.epsilon)

    def distance(self, P) -> np.ndarray:
        P = np.asarray(P, float).reshape(2, -1)
        return self._tree.query(P.T)[0]

    @classmethod
    def point(cls, p, epsilon: float = 1e-3) -> "ClosedSetSample":
        p = np.asarray(p, float)
        return cls(lambda P: np.hypot(P[0] - p[0], P[1] - p[1]) <= 0.0, p[None, :], epsilon)

    @classmethod
    def disc(cls, center, radius: float, pitch: float = 0.01) -> "ClosedSetSample":
        cx, cy = center
        g = np.arange(-radius, radius + pitch / 2, pitch)
        X, Y = np.meshgrid(cx + g, cy + g, indexing="ij")
        keep = np.hypot(X - cx, Y - cy) <= radius
        pts = np.stack([X[keep], Y[keep]], axis=1)
        th = np.linspace(0, 2 * np.pi, max(16, int(2 * np.pi * radius / pitch)), endpoint=False)
        rim = np.stack([cx + radius * np.cos(th), cy + radius * np.sin(th)], axis=1)
        return cls(lambda P: np.hypot(P[0] - cx, P[1] - cy) <= radius, np.vstack([pts, rim]), 2 * pitch)

    @classmethod
    def from_predicate(cls, predicate: Callable, region, pitch: float = 0.01) -> "ClosedSetSample":
        x0, x1, y0, y1 = region
        X, Y = np.meshgrid(np.arange(x0, x1 + pitch / 2, pitch), np.arange(y0, y1 + pitch / 2, pitch), indexing="ij")
        P = np.stack([X.ravel(), Y.ravel()])
        keep = np.asarray(predicate(P), bool)
        if not np.any(keep):
            raise ValueError("empty closed set")
        return cls(predicate, P[:, keep].T, 2 * pitch)


# ----------------------------------------------------------------------
# leaf integration


@dataclass
class Leaf:
    points: np.ndarray
    status: str
    arclength: float
    return_distance: Optional[float] = None


def _rk4_step(field_: LeafField, P, prev, h):
    k1 = field_.direction(P, prev)
    k2 = field_.direction(P + 0.5 * h * k1, k1)
    k3 = field_.direction(P + 0.5 * h * k2, k2)
    k4 = field_.direction(P + h * k3, k3)
    return P + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), k4


def integrate_leaf(field_: LeafField, p, arclength: float, step: float = 1e-2, initial_direction=None, eps_singular: float = 1e-3, detect_closing: bool = True) -> Leaf:
    """RK4 integration of the unit line field with orientation continuation.

    Stops at the chart boundary, near a singular point, or when the
    leaf returns through the transversal at its start point (a closed
    leaf; the crossing distance is reported).
    """
    P = np.asarray(p, float).reshape(2, 1)
    prev = field_.direction(P) if initial_direction is None else np.asarray(initial_direction, float).reshape(2, 1)
    prev = field_.direction(P, prev)
    p0, d0 = P[:, 0].copy(), prev[:, 0].copy()
    pts = [P[:, 0].copy()]
    nsteps = int(np.ceil(arclength / step))
    h = arclength / nsteps
    status = "complete"
    travelled = 0.0
    for k in range(nsteps):
        try:
            Pn, prev = _rk4_step(field_, P, prev, h)
        except SingularLeafField:
            status = "singular"
            break
        if not field_.inside(Pn)[0]:
            status = "boundary"
            break
        if any(np.hypot(Pn[0, 0] - sx, Pn[1, 0] - sy) < eps_singular for sx, sy in field_.singular_points):
            pts.append(Pn[:, 0].copy())
            status = "singular"
            break
        travelled += h
        if detect_closing and travelled > 10 * h:
            a = (P[:, 0] - p0) @ d0
            b = (Pn[:, 0] - p0) @ d0
            if a < 0 <= b:
                s = -a / (b - a)
                cross = P[:, 0] + s * (Pn[:, 0] - P[:, 0])
                dist = float(np.linalg.norm(cross - p0))
                if dist < 10 * h:
                    pts.append(cross)
                    return Leaf(np.array(pts), "closed", travelled - (1 - s) * h, dist)
        pts.append(Pn[:, 0].copy())
        P = Pn
    return Leaf(np.array(pts), status, travelled)


def _integrate_many(field_: LeafField, P, prev, length: float, step: float):
    """Vectorized RK4 for many leaves; points leaving the chart are frozen."""
    P = np.array(P, float)
    prev = field_.direction(P, prev)
    alive = field_.inside(P)
    traj = [P.copy()]
    n = int(np.ceil(length / step))
    for _ in range(n):
        if not np.any(alive):
            break
        Pa = P[:, alive]
        Pn, dn = _rk4_step(field_, Pa, prev[:, alive], step)
        ok = field_.inside(Pn)
        idx = np.nonzero(alive)[0]
        P[:, idx[ok]] = Pn[:, ok]
        prev[:, idx[ok]] = dn[:, ok]
        alive[idx[~ok]] = False
        traj.append(np.where(alive[None, :], P, np.nan))
    return np.array(traj)  # (steps, 2, M)


# ----------------------------------------------------------------------
# separatrices and the hyperbolic tree


@dataclass
class HyperbolicTree:
    hyperbolic_points: list
    separatrices: list
    edges: list
    eigen_slopes: list
    traced_slopes: list
    has_cycle: bool

    @property
    def is_tree(self) -> bool:
        return not self.has_cycle


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def separatrix_tree(s: SurfaceInHypersurface, region, holes=(), step: float = 5e-3, launch: float = 1e-4, max_length: float = 50.0, pitch: Optional[float] = None) -> HyperbolicTree:
    """Trace the four separatrices of every hyperbolic point and look for cycles."""
    reports = find_complex_tangencies(s, region, pitch=pitch, holes=holes)
    for r in reports:
        if r.kind != "hyperbolic":
            raise NonHyperbolicTangency(f"{r.kind} tangency at {r.point} (lambda={r.lam:.4g})")
    pts = [np.array(r.point) for r in reports]
    field_ = LeafField.from_surface(s, region, holes)
    field_.singular_points = [tuple(p) for p in pts]
    seps, eig_slopes, traced_slopes, edges = [], [], [], []
    uf = _UnionFind()
    cycle = False
    boundary_count = 0

    def raw_at(q):
        return field_.raw(q.reshape(2, 1))[:, 0]

    for i, h0 in enumerate(pts):
        J = jacobian_fd(lambda Q: field_.raw(Q), h0.reshape(2, 1), step=1e-5)[..., 0]
        evals, evecs = np.linalg.eig(J)
        if np.any(np.abs(evals.imag) > 1e-9) or np.prod(evals.real) >= 0:
            raise NonHyperbolicTangency(f"linearization at {tuple(h0)} is not a saddle")
        slopes = []
        for k in range(2):
            e = evecs[:, k].real
            e = e / np.linalg.norm(e)
            slopes.append(float(e[1] / e[0]) if abs(e[0]) > 1e-300 else np.inf)
            for sgn in (1.0, -1.0):
                start = h0 + sgn * launch * e
                leaf = integrate_leaf(
                    LeafField(field_.raw, field_.region, field_.holes, [tuple(p) for j, p in enumerate(pts) if j != i]),
                    start,
                    max_length,
                    step=step,
                    initial_direction=sgn * e,
                    eps_singular=10 * step,
                    detect_closing=False,
                )
                poly = np.vstack([h0, leaf.points])
                seps.append(poly)
                near = poly[1 : max(3, int(0.05 / step))]
                d = near - h0
                traced_slopes.append(_slope_at_origin(d))
                end = poly[-1]
                target = None
                if leaf.status == "singular":
                    dists = [np.linalg.norm(end - p) for p in pts]
                    target = int(np.argmin(dists))
                if target is None:
                    node_b = ("boundary", boundary_count)
                    boundary_count += 1
                else:
                    node_b = ("h", target)
                node_a = ("h", i)
                # a separatrix joining two saddles is traced from both ends; keep it once
                dup = False
                if target is not None:
                    mid = poly[len(poly) // 2]
                    for (ea, eb, emid) in edges:
                        if {ea, eb} == {node_a, node_b} and _polyline_distance(seps[emid], mid) < 20 * step:
                            dup = True
                            break
                if not dup:
                    edges.append((node_a, node_b, len(seps) - 1))
                    if not uf.union(node_a, node_b):
                        cycle = True
        eig_slopes.append(slopes)
    return HyperbolicTree([tuple(p) for p in pts], seps, [(a, b) for a, b, _ in edges], eig_slopes, traced_slopes, cycle)


def _slope_at_origin(d: np.ndarray) -> float:
    """Tangent slope at 0 of a curve through the origin sampled at offsets ``d``; curvature is fitted out."""
    swap = np.ptp(d[:, 1]) > np.ptp(d[:, 0])
    u, w = (d[:, 1], d[:, 0]) if swap else (d[:, 0], d[:, 1])
    m = np.linalg.lstsq(np.stack([u, u * u], 1), w, rcond=None)[0][0]
    if swap:
        return float(1.0 / m) if m != 0 else np.inf
    return float(m)


def _polyline_distance(poly, q) -> float:
    return float(np.min(np.linalg.norm(poly - q, axis=1)))


# ----------------------------------------------------------------------
# the characteristic condition


@dataclass
class ConditionVerdict:
    holds: Optional[bool]
    witness: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return {True: "holds", False: "fails", None: "inconclusive"}[self.holds]


def _rotated(field_: LeafField) -> LeafField:
    def raw(P):
        W = field_.raw(P)
        return np.stack([-W[1], W[0]])

    return LeafField(raw, field_.region, field_.holes, field_.singular_points)


def _transversal(field_: LeafField, seed, length: float, step: float):
    """Integral curve of the rotated field through ``seed``; returns ``(points, closed)``."""
    rot = _rotated(field_)
    fwd = integrate_leaf(rot, seed, length, step)
    if fwd.status == "closed":
        return fwd.points[:-1], True
    d0 = rot.direction(np.asarray(seed, float))
    bwd = integrate_leaf(rot, seed, length, step, initial_direction=-d0, detect_closing=False)
    pts = np.vstack([bwd.points[::-1], fwd.points[1:]])
    return pts, False


def check_characteristic_condition(field_: LeafField, C: ClosedSetSample, seed=None, step: float = 1e-2, leaf_length: float = 10.0, transversal_length: float = 20.0) -> ConditionVerdict:
    """Look for a leaf segment ``gamma`` through ``C`` with endpoints outside ``C``
    whose middle projects to a boundary point of the projection of ``C``.

    The foliation is straightened on a flow box spanned by a transversal
    (integral curve of the rotated field) and the leaves through its
    points; ``C`` is projected along leaves to the transversal.
    """
    pts_c = C.points
    if seed is None:
        seed = pts_c.mean(axis=0)
        if not field_.inside(seed)[0]:
            seed = pts_c[0]
    for sx, sy in field_.singular_points:
        if np.min(np.hypot(pts_c[:, 0] - sx, pts_c[:, 1] - sy)) < 2 * step:
            raise SingularLeafField("closed set meets a singular point of the foliation")
    T, closed = _transversal(field_, seed, transversal_length, step)
    K = T.shape[0]
    refs = field_.direction(T.T)
    fwd = _integrate_many(field_, T.T, refs, leaf_length, step)
    bwd = _integrate_many(field_, T.T, -refs, leaf_length, step)
    cloud = np.concatenate([fwd, bwd[1:]], axis=0)  # (steps, 2, K)
    labels = np.broadcast_to(np.arange(K), (cloud.shape[0], K))
    flat = np.moveaxis(cloud, 1, 2).reshape(-1, 2)
    lab = labels.reshape(-1)
    ok = np.all(np.isfinite(flat), axis=1)
    tree = cKDTree(flat[ok])
    lab = lab[ok]
    d, idx = tree.query(pts_c)
    if np.max(d) > 2 * step:
        raise ChartTooSmall(f"flow box misses part of the closed set (gap {np.max(d):.3g})")
    # a transversal point is in the projection when its leaf meets C
    dist_cloud = C.distance(flat[ok].T)
    hit = dist_cloud <= C.epsilon
    covered = np.zeros(K, bool)
    covered[np.unique(lab[hit])] = True
    covered[np.unique(lab[idx])] = True
    proj = np.nonzero(covered)[0]
    diagnostics = {"transversal_points": int(K), "closed_transversal": bool(closed), "projection_size": int(proj.size)}
    if closed:
        if np.all(covered):
            return ConditionVerdict(False, {"reason": "projection covers the closed transversal"}, diagnostics)
        # boundary indices: covered with an uncovered neighbour
        cand = [int(k) for k in proj if not covered[(k + 1) % K] or not covered[(k - 1) % K]]
    else:
        cand = [int(proj.max()), int(proj.min())]
    pts_cloud = flat[ok]
    for k in cand:
        on_leaf = np.nonzero((lab == k) & hit)[0]
        if on_leaf.size == 0:
            on_leaf = np.nonzero(lab == k)[0]
        order = on_leaf[np.argsort(dist_cloud[on_leaf])]
        for m in order[:4]:
            p0 = pts_cloud[m]
            gamma = _leaf_exit(field_, C, p0, leaf_length, step)
            if gamma is not None:
                witness = {"gamma": gamma.tolist(), "gamma0": p0.tolist(), "transversal_index": int(k)}
                return ConditionVerdict(True, witness, diagnostics)
    return ConditionVerdict(False, {"reason": "every extremal leaf stays in C"}, diagnostics)


def _leaf_exit(field_: LeafField, C: ClosedSetSample, p0, length: float, step: float):
    d = field_.direction(np.asarray(p0, float))
    ends = []
    for sgn in (1.0, -1.0):
        leaf = integrate_leaf(field_, p0, length, step, initial_direction=sgn * d, detect_closing=False)
        outside = ~C.contains(leaf.points.T)
        if not np.any(outside):
            return None
        ends.append(leaf.points[: int(np.argmax(outside)) + 1])
    return np.vstack([ends[1][::-1], ends[0][1:]])


# ----------------------------------------------------------------------
# orbit condition


def check_orbit_condition(frame: Callable, C: ClosedSetSample, inside_chart: Callable, starts: np.ndarray, rng: np.random.Generator, budget: int = 100, seg_length: float = 0.2, substeps: int = 10, probe: float = 1e-3) -> ConditionVerdict:
    """Random piecewise integral curves of a distribution, started in ``C``.

    ``frame(P)`` returns an array ``(r, d, M)`` of ``r`` vector fields
    spanning the distribution at points ``P`` of shape ``(d, M)``.
    ``C`` provides ``contains(P)``.  A start point escapes when a visited
    point leaves ``C``.  An orbit that never escapes is a trapped-orbit
    certificate when, at every visited point, short moves along each
    frame vector stay in ``C`` or leave the chart; otherwise the start
    is unresolved and the verdict is inconclusive.
    """
    starts = np.atleast_2d(np.asarray(starts, float))
    escapes, trapped, open_cases = [], [], []
    for j in range(starts.shape[1]):
        P = starts[:, j : j + 1].copy()
        lo, hi = P.copy(), P.copy()
        visited = [P[:, 0].copy()]
        escaped_at = None
        for step in range(1, budget + 1):
            F = frame(P)
            coef = rng.standard_normal(F.shape[0])
            coef /= np.linalg.norm(coef)
            h = seg_length / substeps
            for _ in range(substeps):
                V = np.tensordot(coef, frame(P), axes=1)
                Pn = P + h * V
                if not inside_chart(Pn)[0]:
                    break
                P = Pn
            if not C.contains(P)[0]:
                escaped_at = step
                break
            lo, hi = np.minimum(lo, P), np.maximum(hi, P)
            visited.append(P[:, 0].copy())
        if escaped_at is not None:
            escapes.append(escaped_at)
            continue
        if _locally_invariant(frame, C, inside_chart, visited, probe):
            trapped.append({"start": starts[:, j].tolist(), "box_lo": lo[:, 0].tolist(), "box_hi": hi[:, 0].tolist(), "visited": len(visited)})
        else:
            open_cases.append(j)
    diag = {"escapes": escapes, "max_escape_steps": max(escapes) if escapes else None, "trials": int(starts.shape[1])}
    if trapped:
        return ConditionVerdict(False, {"trapped_orbits": trapped}, diag)
    if open_cases:
        return ConditionVerdict(None, {"unresolved_starts": open_cases}, diag)
    return ConditionVerdict(True, {}, diag)


def _locally_invariant(frame, C, inside_chart, visited, probe: float = 1e-3) -> bool:
    V = np.array(visited).T
    F = frame(V)
    for r in range(F.shape[0]):
        for sgn in (1.0, -1.0):
            Q = V + sgn * probe * F[r]
            bad = inside_chart(Q) & ~np.asarray(C.contains(Q), bool)
            if np.any(bad):
                return False
    return True


# ----------------------------------------------------------------------
# special point


@dataclass
class SpecialPoint:
    point: np.ndarray
    tangent: np.ndarray
    offset: float
    blend: float
    cone_margin: float
    one_sided_fraction: float
    line: np.ndarray = field(repr=False)


def _blend_field(field_: LeafField, cone_dir: Callable, lam: float, reference) -> LeafField:
    def raw(P):
        X = field_.direction(P, np.broadcast_to(np.asarray(reference, float).reshape(2, 1), np.shape(P)))
        v = np.asarray(cone_dir(P), float).reshape(2, -1)
        v = v / np.linalg.norm(v, axis=0)
        return lam * X + (1 - lam) * v

    return LeafField(raw, field_.region, field_.holes, field_.singular_points)


def find_special_point(field_: LeafField, C: ClosedSetSample, cone_dir: Callable, reference, lam: float = 0.9, start=None, normal=None, sweep: float = 2.0, step: float = 5e-3, length: float = 4.0, tol: Optional[float] = None, radius: float = 0.2, coarse: int = 64) -> SpecialPoint:
    """Sweep flow lines of the blended field ``lam X + (1 - lam) v`` towards ``C``.

    ``reference`` orients the line field; ``cone_dir(P)`` gives the cone
    generator ``v``.  Flow lines start on the segment
    ``start + s * normal``, ``s in [0, sweep]``; ``s = 0`` must miss
    ``C``.  The first touching offset is bracketed on a coarse scan and
    refined by bisection.
    """
    tol = step if tol is None else tol
    lams = [lam] + [l for l in (0.95, 0.99) if l > lam]
    pts = C.points
    for lam_try in lams:
        W = _blend_field(field_, cone_dir, lam_try, reference)
        n = np.asarray(normal, float)
        n = n / np.linalg.norm(n)
        s0 = np.asarray(start, float)

        def lines(offs):
            offs = np.atleast_1d(offs)
            P = s0[:, None] + offs[None, :] * n[:, None]
            d = W.direction(P)
            fw = _integrate_many(W, P, d, length, step)
            bw = _integrate_many(W, P, -d, length, step)
            return np.concatenate([bw[::-1], fw[1:]], axis=0)  # (steps, 2, M)

        def first_touch(offs):
            traj = lines(offs)
            flat = np.moveaxis(traj, 1, 2).reshape(-1, 2)
            good = np.all(np.isfinite(flat), axis=1)
            hit = np.zeros(flat.shape[0], bool)
            hit[good] = C.contains(flat[good].T)
            hit = hit.reshape(traj.shape[0], -1).any(axis=0)
            return int(np.argmax(hit)) if np.any(hit) else None

        if first_touch(0.0) is not None:
            raise NoTouchingLine("the sweep must start on the C-free side")
        offsets = np.linspace(0.0, sweep, coarse + 1)
        first = first_touch(offsets[1:])
        if first is None:
            if lam_try == lams[-1]:
                raise NoTouchingLine("no flow line of the blended field touches C inside the chart")
            continue
        lo, hi = offsets[first], offsets[first + 1]
        while hi - lo > tol / 4:
            inner = np.linspace(lo, hi, 17)[1:-1]
            k = first_touch(inner)
            if k is None:
                lo = inner[-1]
            else:
                hi = inner[k]
                lo = inner[k - 1] if k > 0 else lo
        traj = lines(hi)[:, :, 0]
        L = traj[np.all(np.isfinite(traj), axis=1)]
        tree = cKDTree(L)
        d, _ = tree.query(pts)
        p_sp = pts[int(np.argmin(d))]
        v_sp = W.direction(p_sp)
        X = field_.direction(p_sp, np.asarray(reference, float))
        v = np.asarray(cone_dir(p_sp.reshape(2, 1)), float)[:, 0]
        v = v / np.linalg.norm(v)
        cone = ConeField(p_sp[None, :], [np.vstack([v, X])]).fill([X])
        margin = _interior_margin(np.vstack([v, X]), v_sp)
        if cone.membership(0, v_sp) > 1e-9:
            margin = -1.0
        # one-sidedness of C near p_sp relative to the touching line
        near = np.linalg.norm(pts - p_sp, axis=1) <= radius
        _, j = tree.query(pts[near])
        seg_dir = np.gradient(L, axis=0)[j]
        rel = pts[near] - L[j]
        side = seg_dir[:, 0] * rel[:, 1] - seg_dir[:, 1] * rel[:, 0]
        far = np.abs(side) > C.epsilon * np.linalg.norm(seg_dir, axis=1)
        ref_side = np.sign(np.median(side[far])) if np.any(far) else 1.0
        frac = float(np.mean(np.sign(side[far]) == ref_side)) if np.any(far) else 1.0
        return SpecialPoint(p_sp, v_sp, hi, lam_try, margin, frac, L)
    raise NoTouchingLine("sweep failed")


def _interior_margin(G: np.ndarray, d: np.ndarray) -> float:
    """Smallest coefficient when ``d`` is written in the two generators (planar cones)."""
    coef = np.linalg.lstsq(G.T, d, rcond=None)[0]
    return float(np.min(coef / np.linalg.norm(coef)))


def brute_force_extremal(C: ClosedSetSample, sweep_direction) -> np.ndarray:
    """First point of ``C`` met by straight lines swept along ``sweep_direction``."""
    n = np.asarray(sweep_direction, float)
    return C.points[int(np.argmin(C.points @ n))]

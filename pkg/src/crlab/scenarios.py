"""Named experiments returning structured reports.

Every scenario is a plain function ``f(params, seed, jobs) -> ScenarioReport``
registered in :data:`SCENARIOS` together with its default parameters.
Checks only re-run invariants that the library modules already assert;
the command line front end and the acceptance tests both call these.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError

__all__ = [
    "Check",
    "Table",
    "ScenarioReport",
    "ScenarioSpec",
    "SCENARIOS",
    "run",
    "parallel_map",
]


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: Optional[float] = None
    relation: str = ""

    def line(self) -> str:
        bound = f" {self.relation} {self.threshold:.6g}" if self.threshold is not None else ""
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.value:.6g}{bound}"


@dataclass
class Table:
    name: str
    header: list
    rows: list = field(default_factory=list)


@dataclass
class ScenarioReport:
    scenario: str
    params: dict
    seed: int
    checks: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    tables: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, value: float, threshold: Optional[float] = None, relation: str = "<", passed: Optional[bool] = None) -> Check:
        """Record ``value relation threshold`` (or an explicit verdict)."""
        value = float(value)
        if passed is None:
            ops = {"<": value < threshold, "<=": value <= threshold, ">": value > threshold, ">=": value >= threshold, "==": value == threshold}
            passed = bool(ops[relation])
        c = Check(name, bool(passed), value, None if threshold is None else float(threshold), relation if threshold is not None else "")
        self.checks.append(c)
        return c

    def table(self, name: str, header: list) -> Table:
        t = Table(name, list(header))
        self.tables.append(t)
        return t


@dataclass(frozen=True)
class ScenarioSpec:
    func: Callable
    defaults: dict
    grid_param: Optional[str] = None
    tol_param: Optional[str] = None
    description: str = ""


def parallel_map(fn: Callable, items: list, jobs: int = 1) -> list:
    """Order-preserving map over independent sub-computations."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ----------------------------------------------------------------------
# model builders from coefficient lists


def _poly(spec, nvars: int):
    from .polynomials import Polynomial

    p = Polynomial.from_json(spec)
    if p.nvars != nvars:
        raise ConfigError(f"polynomial has {p.nvars} variables, expected {nvars}")
    return p


def polynomial_map(specs: list, n: int):
    """``(h, dh)`` for a map ``R^n -> R^n`` given by ``n`` polynomials."""
    if len(specs) != n:
        raise ConfigError(f"expected {n} component polynomials, got {len(specs)}")
    polys = [_poly(s, n) for s in specs]
    derivs = [[p.deriv(k) for k in range(n)] for p in polys]

    def h(X):
        return np.stack([p(*X) for p in polys])

    def dh(X):
        X = np.asarray(X, float)
        return np.stack([np.stack([np.broadcast_to(d(*X), X.shape[1:]) for d in row]) for row in derivs])

    return h, dh


def _quadratic_h():
    # second derivatives bounded by one on the unit ball
    return polynomial_map(
        [
            {"terms": [[0.5, [2, 0]], [0.25, [0, 2]]]},
            {"terms": [[0.5, [1, 1]]]},
        ],
        2,
    )


def _gamma_surface_poly(gamma: float) -> dict:
    return {"terms": [[2 * gamma + 1, [2, 0]], [-(2 * gamma - 1), [0, 2]]]}


# ----------------------------------------------------------------------
# scenarios


def hilbert_identity(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from .circle_ops import CircleFn, CircleGrid, hilbert_T1, random_band_limited

    rep = ScenarioReport("hilbert-identity", p, seed)
    grid = CircleGrid(p["N"])
    k = np.arange(1, p["kmax"] + 1)
    th = grid.theta
    out = hilbert_T1(CircleFn(grid, np.cos(np.outer(k, th)))).values
    per_k = np.max(np.abs(out - np.sin(np.outer(k, th))), axis=1)
    rep.check("T1 cos = sin, k <= kmax", per_k.max(), p["tol"])
    f = random_band_limited(grid, p["samples"], p["band"], np.random.default_rng(seed))
    inv = hilbert_T1(hilbert_T1(f)).values + f.values - f.at_one()[:, None]
    rep.check("T1 T1 X = -X + X(1)", np.max(np.abs(inv)), p["tol"])
    t = rep.table("cosine_modes", ["k", "sup_error"])
    t.rows = [[int(kk), float(e)] for kk, e in zip(k, per_k)]
    return rep


def bishop(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from .bishop_solver import BishopProblem, SolverConfig, solve_bishop
    from .circle_ops import CircleFn, hilbert_T1, holder_norm
    from .cr_geometry import MaximallyRealGraph
    from .disc_families import PsiConfig, build_psi

    rep = ScenarioReport("bishop", p, seed)
    psi = build_psi(PsiConfig(N=p["N"]))
    grid = psi.grid
    v = np.asarray(p["v"], float)
    n = v.size
    if p.get("h") is not None:
        h, dh = polynomial_map(p["h"], n)
    elif n == 2:
        h, dh = _quadratic_h()
    else:
        raise ConfigError("a custom 'h' is required unless v has two components")
    M1 = MaximallyRealGraph(n, h, dh=dh)
    flat = MaximallyRealGraph(n, lambda X: np.zeros_like(X), dh=lambda X: np.zeros((n, n) + X.shape[1:]))

    def seed_at(c):
        return CircleFn(grid, c * v[:, None] * psi.values.real[None, :])

    def solve(target, c):
        cfg = SolverConfig(c=c, tol=p["tol"])
        return solve_bishop(BishopProblem(target, seed_at(c), 1.0, cfg))

    X0 = seed_at(p["c"])
    r0 = solve(flat, p["c"])
    rep.check("flat: X = X0 exactly", np.max(np.abs(r0.X.values - X0.values)), 0.0, "<=")
    rep.check("flat: iterations", r0.iterations, 1, "<=")

    r = solve(M1, p["c"])
    resub = np.max(np.abs(r.X.values + hilbert_T1(CircleFn(grid, M1(r.X.values))).values - X0.values))
    rep.check("quadratic: re-substituted residual", resub, 1e-11)
    rep.check("quadratic: contraction ratio", r.contraction_ratio, p["max_ratio"])
    rep.check("quadratic: attachment residual", r.attachment_residual, 1e-10)
    rep.constants["iterations"] = r.iterations

    cs = np.geomspace(p["c_min"], p["c_max"], p["sweep"])

    def dev(c):
        s = solve(M1, float(c))
        return holder_norm(s.X - seed_at(float(c)), 1, 0.5).sup_part

    devs = np.array(parallel_map(dev, list(cs), jobs))
    slope = float(np.polyfit(np.log(cs), np.log(devs), 1)[0])
    rep.check("log-log slope of |X - X0|_C1 vs c", slope, p["min_slope"], ">=")
    rep.constants["slope"] = slope
    t = rep.table("sweep", ["c", "c1_deviation"])
    t.rows = [[float(c), float(d)] for c, d in zip(cs, devs)]
    return rep


def disc_family(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from .cr_geometry import normalized_model_i1
    from .disc_families import attached_pivot_family, cone_field_from_family, half_attached_family, verify_family_properties

    rep = ScenarioReport("disc-family", p, seed)
    n, c = p["n"], p["c"]
    M, M1, support, v1 = normalized_model_i1(n=n, cubic=p["cubic"], mixed=p["mixed"])
    fam = half_attached_family(M1, np.zeros(n), v1, c)
    props = verify_family_properties(fam, support, M)
    for name, e in props.entries.items():
        rep.check(f"{name} margin", e["margin"], 0.0, ">", passed=e["pass"] and e["margin"] > 0)

    pivot = attached_pivot_family(M, M1, p["pivot_radius"])
    m = pivot.build()
    th = pivot.grid.theta
    nz = np.abs(np.sin(th / 2)) > 1e-12
    gap = (m.Y[0] - np.abs(M1(m.X)[0]))[nz] / (1 - np.cos(th[nz]))
    rep.check("pivot containment r(1 - cos) > |h1(X)| (normalized)", gap.min(), 0.0, ">")

    # string of discs along the x2 axis and the cone field along the same axis
    stride = max(1, fam.psi.grid.N // p["boundary_points"])
    idx = np.arange(0, fam.psi.grid.N, stride)
    s_vals = np.linspace(-1.0, 1.0, p["string"])
    disc_rows = rep.table("disc_string", ["s", "theta"] + [f"{q}_z{k + 1}" for k in range(n) for q in ("re", "im")])

    def member(s):
        x = np.zeros(n)
        x[1] = 0.5 * s * c * c
        return fam.build(x)

    for s, d in zip(s_vals, parallel_map(member, list(s_vals), jobs)):
        for j in idx:
            z = d.boundary[:, j]
            disc_rows.rows.append([float(s), float(fam.psi.grid.theta[j])] + [float(w) for k in range(n) for w in (z[k].real, z[k].imag)])

    cone_rows = rep.table("cone_field", [f"x{k + 1}" for k in range(n)] + [f"d{k + 1}" for k in range(n)])
    chis = [np.eye(n)[1] * s * p["cone_spread"] for s in np.linspace(-1.0, 1.0, p["cones"])]
    cf = cone_field_from_family(pivot, [{"chi": chi} for chi in chis])
    for k, base in enumerate(cf.base_points):
        for g in cf.generators[k]:
            cone_rows.rows.append([float(b) for b in base.real] + [float(x) for x in g])
    rep.check("cone field open at every base point", float(all(cf.is_open(k) for k in range(len(chis)))), 1.0, "==")
    return rep


def _slope_error(traced: list, oracle: list) -> float:
    worst = 0.0
    for m in traced:
        errs = []
        for o in oracle:
            if np.isfinite(m) and np.isfinite(o) and max(abs(m), abs(o)) < 1e3:
                errs.append(abs(m - o))
            else:
                errs.append(abs(math.atan(m) - math.atan(o)) if np.isfinite(m) and np.isfinite(o) else (0.0 if np.isinf(m) and np.isinf(o) else np.inf))
        worst = max(worst, min(errs))
    return worst


def foliation(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from .cr_geometry import SurfaceInHypersurface, bishop_invariant, find_complex_tangencies
    from .foliation_analysis import LeafField, integrate_leaf, separatrix_tree

    rep = ScenarioReport("foliation", p, seed)
    g = _poly(p["g"] if p.get("g") is not None else _gamma_surface_poly(p["gamma"]), 2)
    gx, gy = g.deriv(0), g.deriv(1)
    S = SurfaceInHypersurface(g=g, g_grad=lambda x, y: (gx(x, y), gy(x, y)))
    region = tuple(p["region"])
    holes = tuple(tuple(h) for h in p["holes"])
    tang = find_complex_tangencies(S, region, holes=holes)
    rep.constants["tangencies"] = [{"point": [float(q) for q in r.point], "lambda": float(r.lam), "kind": r.kind} for r in tang]
    rep.check("complex tangencies found", len(tang), 1, ">=")
    if p.get("g") is None:
        for r in tang:
            rep.check("lambda equals gamma", abs(bishop_invariant(S, r.point) - p["gamma"]), p["slope_tol"])
    hyperbolic = [r for r in tang if r.kind == "hyperbolic"]
    if hyperbolic and len(hyperbolic) == len(tang):
        tree = separatrix_tree(S, region, holes=holes)
        rep.check("four separatrices per hyperbolic point", len(tree.separatrices), 4 * len(hyperbolic), "==")
        gxx, gxy, gyy = gx.deriv(0), gx.deriv(1), gy.deriv(1)
        worst = 0.0
        for i, q in enumerate(tree.hyperbolic_points):
            a, b, cc = float(gyy(*q)), float(gxy(*q)), float(gxx(*q))
            oracle = list(np.roots([a, 2 * b, cc]).real) if abs(a) > 1e-14 else [np.inf, -cc / (2 * b)]
            worst = max(worst, _slope_error(tree.traced_slopes[4 * i : 4 * i + 4], oracle))
        rep.check("separatrix slopes vs level-set oracle", worst, p["slope_tol"])
        rep.constants["has_cycle"] = bool(tree.has_cycle)
        rep.constants["traced_slopes"] = [float(s) for s in tree.traced_slopes]
        t = rep.table("separatrices", ["separatrix", "index", "x", "y"])
        for k, poly in enumerate(tree.separatrices):
            t.rows += [[k, j, float(x), float(y)] for j, (x, y) in enumerate(poly)]
    F = LeafField.from_surface(S, region, holes)
    leaf = integrate_leaf(F, tuple(p["leaf_start"]), p["leaf_length"], step=p["leaf_step"])
    vals = g(leaf.points[:, 0], leaf.points[:, 1])
    drift = float(np.max(np.abs(vals - vals[0])) / max(leaf.arclength, 1e-300))
    rep.check("leaf conservation per unit arclength", drift, p["tol"])
    return rep


@dataclass(frozen=True)
class _SolidSet:
    """Closed subset of ``R^3`` given by a predicate on ``(3, M)`` arrays."""

    predicate: Callable

    def contains(self, P) -> np.ndarray:
        return np.asarray(self.predicate(np.asarray(P, float).reshape(3, -1)), bool)


def check_condition(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from .foliation_analysis import ClosedSetSample, LeafField, check_characteristic_condition, check_orbit_condition

    rep = ScenarioReport("check-condition", p, seed)
    t = rep.table("verdicts", ["case", "condition", "expected", "verdict"])

    def record(case, cond, expected, verdict):
        t.rows.append([case, cond, expected, verdict.label])
        rep.constants[f"{case}/{cond}"] = {"verdict": verdict.label, "witness": _plain(verdict.witness)}
        rep.check(f"{case}: {cond} {expected}", float(verdict.label == expected), 1.0, "==")

    def constant(P):
        P = np.asarray(P, float)
        return np.stack([np.zeros_like(P[0]), np.ones_like(P[0])])

    flat = LeafField.from_vector_field(constant, (-1, 1, -1, 1))
    record("foliated ball", "characteristic", "holds", check_characteristic_condition(flat, ClosedSetSample.disc((0.1, 0.0), 0.3, pitch=0.02)))

    ann = LeafField.from_vector_field(lambda P: np.asarray(P, float).copy(), (-2, 2, -2, 2), holes=((0, 0, 0.5),))
    th = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    circle = ClosedSetSample(lambda P: np.abs(np.hypot(P[0], P[1]) - 1.0) <= 0.0, np.stack([np.cos(th), np.sin(th)], 1), 0.02)
    record("transversal circle", "characteristic", "fails", check_characteristic_condition(ann, circle, seed=(1.0, 0.0)))

    def levi_flat(P):
        M = P.shape[1]
        e2, e3 = np.zeros((3, M)), np.zeros((3, M))
        e2[1] = 1
        e3[2] = 1
        return np.stack([e2, e3])

    chart = lambda P: (np.abs(P[0]) <= 1) & (P[1] ** 2 + P[2] ** 2 <= 1)
    trap = _SolidSet(lambda P: (np.abs(P[0]) <= 1e-9) & (np.sum(P[1:] ** 2, 0) <= 1 + 1e-12))
    rng = np.random.default_rng(seed)
    record("Levi-flat trap", "orbit", "fails", check_orbit_condition(levi_flat, trap, chart, np.array([[0.0], [0.1], [0.2]]), rng, budget=200))

    record("single point", "characteristic", "holds", check_characteristic_condition(flat, ClosedSetSample.point((0.1, 0.2))))
    point3 = _SolidSet(lambda P: np.linalg.norm(P, axis=0) <= 0.0)
    record("single point", "orbit", "holds", check_orbit_condition(levi_flat, point3, chart, np.zeros((3, 1)), rng))
    return rep


def _shapes(pitch: float) -> dict:
    from .foliation_analysis import ClosedSetSample

    def ellipse(P):
        x, y = P[0] - 0.1, P[1] + 0.2
        c, s = np.cos(0.5), np.sin(0.5)
        u, w = c * x + s * y, -s * x + c * y
        return (u / 0.5) ** 2 + (w / 0.25) ** 2 <= 1

    def c_shape(P):
        x, y = P[0] - 0.2, P[1]
        r = np.hypot(x, y)
        return (r >= 0.3) & (r <= 0.6) & (np.arctan2(y, x) ** 2 >= 0.8**2)

    return {
        "disc": ClosedSetSample.disc((0.2, 0.1), 0.4, pitch=pitch),
        "ellipse": ClosedSetSample.from_predicate(ellipse, (-0.6, 0.8, -0.8, 0.4), pitch=pitch),
        "c-shape": ClosedSetSample.from_predicate(c_shape, (-0.5, 0.9, -0.7, 0.7), pitch=pitch),
    }


def special_point(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from .foliation_analysis import LeafField, brute_force_extremal, find_special_point

    rep = ScenarioReport("special-point", p, seed)
    pitch = p["pitch"]
    X = np.asarray(p["characteristic"], float)
    v = np.asarray(p["cone"], float)
    field_ = LeafField.from_vector_field(lambda P: np.broadcast_to(X.reshape(2, 1), (2, np.asarray(P).shape[1])).copy(), (-2, 2, -2, 2))
    cone = lambda P: np.broadcast_to(v.reshape(2, 1), (2, np.atleast_2d(P).shape[1])).copy()
    lam = p["blend"]
    W = lam * X / np.linalg.norm(X) + (1 - lam) * v / np.linalg.norm(v)
    W /= np.linalg.norm(W)
    normal = np.array([W[1], -W[0]])
    if normal @ np.asarray(p["normal"], float) < 0:
        normal = -normal
    shapes = _shapes(pitch)
    t = rep.table("special_points", ["shape", "x", "y", "brute_x", "brute_y", "distance", "cone_margin", "one_sided"])

    def one(name):
        C = shapes[name]
        sp = find_special_point(field_, C, cone, reference=X, lam=lam, start=tuple(p["start"]), normal=tuple(p["normal"]), sweep=p["sweep"])
        return sp, brute_force_extremal(C, normal)

    names = list(shapes)
    for name, (sp, bf) in zip(names, parallel_map(one, names, jobs)):
        d = float(np.linalg.norm(sp.point - bf))
        rep.check(f"{name}: distance to brute force (pitches)", d / pitch, 2.0, "<=")
        rep.check(f"{name}: v_sp inside filled cone", sp.cone_margin, 0.0, ">")
        t.rows.append([name, float(sp.point[0]), float(sp.point[1]), float(bf[0]), float(bf[1]), d, float(sp.cone_margin), float(sp.one_sided_fraction)])
    return rep


def envelope(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from .extension_lab import coverage_radius, extension_coverage, shrinking_hartogs_isotopy

    rep = ScenarioReport("envelope", p, seed)
    rho, c, C = p["sigma_args"]
    rep.check("coverage radius formula", abs(coverage_radius(rho, c, C) - p["sigma_expected"]), 0.0, "==")
    iso = shrinking_hartogs_isotopy(eps=p["eps"], disc_radius=p["disc_radius"], start=p["start"], steps=p["steps"], N=p["N"])
    cov = extension_coverage(iso, rings=p["rings"], angles=p["angles"], seed=seed)
    center = np.zeros((2, 1), complex)
    rep.check("coverage contains the bidisc center", float(cov.contains(center)[0]), 1.0, "==")
    rep.constants["continuity_modulus"] = iso.continuity()
    rep.constants["coverage_points"] = int(cov.points.shape[1])
    rep.constants["min_radius"] = float(np.min(cov.radius)) if cov.radius.size else 0.0
    t = rep.table("coverage", ["tau", "re_zeta", "im_zeta", "radius", "re_z1", "im_z1", "re_z2", "im_z2"])
    t.rows = cov.rows()
    return rep


def gauss(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from .extension_lab import MaximallyRealSlice, gauss_approximation

    rep = ScenarioReport("gauss", p, seed)
    L = MaximallyRealSlice.linear(p["slice"])
    zh = L.point(np.asarray(p["base"], float))
    funcs = {
        "1": lambda z: np.ones(z.shape[1:], complex),
        "z1": lambda z: z[0],
        "z1^2": lambda z: z[0] ** 2,
    }
    t = rep.table("errors", ["f", "tau", "error"])
    for name, f in funcs.items():
        exact = complex(f(zh.reshape(-1, 1))[0]) if np.ndim(f(zh.reshape(-1, 1))) else complex(f(zh.reshape(-1, 1)))
        errs = [abs(gauss_approximation(f, L, zh, tau) - exact) for tau in p["taus"]]
        t.rows += [[name, float(tau), float(e)] for tau, e in zip(p["taus"], errs)]
        rep.check(f"f={name}: error at largest tau", errs[-1], p["tol"])
        floor = p["roundoff"]
        monotone = all(b <= a or max(a, b) <= floor for a, b in zip(errs, errs[1:]))
        rep.check(f"f={name}: error monotone in tau", float(monotone), 1.0, "==")
    return rep


def torus(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from . import torus_example as te

    rep = ScenarioReport("torus", p, seed)
    frame = te.build_reeb_frame(check_samples=p["frame_samples"], seed=seed)
    rng = np.random.default_rng(seed)
    X = rng.uniform(-5, 5, (3, 4 * p["relation_samples"]))
    X = X[:, np.sum(X * X, 0) <= 25][:, : p["relation_samples"]]
    model = te.build_MP(frame, p["P"])
    rel = te.frame_relations(model, X, y_scale=p["y_scale"], seed=seed)
    fr = te.verify_frame(frame, X)
    for key in ("plucker", "cross", "orthogonality", "identity", "tangency"):
        rep.check(f"relations: {key}", rel[key], p["tol"])
    rep.check("frame orthonormality", fr["max_orthonormal_defect"], 1e-10)
    rep.check("L normal to T2", 1 - fr["min_normal_alignment_on_T2"], 1e-10)

    T = te.torus_points()
    rhoT = np.abs([float(te.torus_defining(q)) for q in T.T]).max()
    rep.check("rho_T on T2 samples", rhoT, 1e-12)

    Xr = X[:, : p["ratio_samples"]]
    br = te.bracket_rank_report(model, Xr)
    rep.check("determinant ratio min", br.ratio.min(), 0.9, ">=")
    rep.check("determinant ratio max", br.ratio.max(), 1.1, "<=")
    rep.check("quartic sum >= 1/3", float(np.min(np.sum(br.a**4, 0))), 1 / 3 - 1e-12, ">=")

    x_star = np.array([3 / math.sqrt(2), -3 / math.sqrt(2), 0.0])
    cub = te.cubic_variant_determinant(frame, x_star)
    a_star = np.array([1, -1, 0]) / math.sqrt(2)
    rep.check("cubic: a at the chosen point", min(np.abs(cub["a"] - a_star).max(), np.abs(cub["a"] + a_star).max()), 1e-12)
    rep.check("cubic: leading coefficient vanishes", abs(cub["leading"]), 1e-8)
    rep.constants["cubic_leading"] = [cub["leading"].real, cub["leading"].imag]

    tr = te.transversality_check(model)
    rep.check("transversality dimension", tr["min_dimension"], 6, "==")

    mp = te.find_min_P(frame, p["R"], n=p["grid"])
    rep.check(f"finite P* at R={p['R']}", float(mp.P_star is not None), 1.0, "==")
    _min_p_tables(rep, mp)
    return rep


def _min_p_tables(rep: ScenarioReport, mp) -> None:
    d = mp.as_dict()
    rep.constants["min_P"] = d
    t = rep.table("min_P_history", ["P", "samples", "min_relative_singular", "ratio_min", "ratio_max", "rank4", "dominant"])
    t.rows = [[float(h[0]), int(h[1]), float(h[2]), float(h[3]), float(h[4]), int(h[5]), int(h[6])] for h in mp.history]
    s = rep.table("min_P_summary", ["R", "P_star", "P_rank", "min_relative_singular", "min_abs_det", "samples"])
    if mp.P_star is not None:
        s.rows = [[float(mp.R), float(mp.P_star), float(mp.P_rank), float(mp.min_relative_singular), float(mp.min_abs_det), int(mp.samples)]]


def torus_verify(p: dict, seed: int, jobs: int) -> ScenarioReport:
    from . import torus_example as te

    rep = ScenarioReport("torus-verify", p, seed)
    frame = te.build_reeb_frame(check_samples=p["frame_samples"], seed=seed)
    mp = te.find_min_P(frame, p["radius"], n=p["grid"], budget=p["budget"])
    rep.check(f"finite P* at R={p['radius']}", float(mp.P_star is not None), 1.0, "==")
    if mp.P_star is not None:
        rep.check("rank four at every sample (relative singular value)", mp.min_relative_singular, 1e-8, ">")
    _min_p_tables(rep, mp)
    return rep


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int, bool, np.bool_)):
        return obj.item() if hasattr(obj, "item") else obj
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


SCENARIOS = {
    "hilbert-identity": ScenarioSpec(hilbert_identity, {"N": 512, "kmax": 64, "samples": 100, "band": 64, "tol": 1e-10}, "N", "tol", "conjugation identities on the circle"),
    "bishop": ScenarioSpec(
        bishop,
        {"N": 4096, "c": 0.05, "v": [1.0, 0.5], "h": None, "tol": 1e-12, "max_ratio": 0.5, "c_min": 0.02, "c_max": 0.2, "sweep": 7, "min_slope": 1.9},
        "N",
        "tol",
        "flat and quadratic Bishop equations, deviation scaling",
    ),
    "disc-family": ScenarioSpec(
        disc_family,
        {"n": 3, "c": 0.02, "cubic": 0.2, "mixed": 0.3, "pivot_radius": 0.05, "string": 5, "boundary_points": 256, "cones": 5, "cone_spread": 0.02},
        "boundary_points",
        None,
        "half-attached family properties, disc string and cone field",
    ),
    "foliation": ScenarioSpec(
        foliation,
        {"gamma": 1.0, "g": None, "region": [-1, 1, -1, 1], "holes": [], "slope_tol": 1e-3, "leaf_start": [0.5, 0.2], "leaf_length": 2.0, "leaf_step": 1e-2, "tol": 1e-8},
        None,
        "tol",
        "tangency classification, separatrices, leaf conservation",
    ),
    "check-condition": ScenarioSpec(check_condition, {}, None, None, "characteristic and orbit condition verdicts"),
    "special-point": ScenarioSpec(
        special_point,
        {"pitch": 0.01, "characteristic": [0.0, 1.0], "cone": [1.0, 1.0], "blend": 0.9, "start": [-1.5, 0.0], "normal": [1.0, 0.0], "sweep": 3.0},
        None,
        None,
        "special point sweep against brute force on three shapes",
    ),
    "envelope": ScenarioSpec(
        envelope,
        {"sigma_args": [0.1, 1.0, 2.0], "sigma_expected": 0.025, "eps": 0.2, "disc_radius": 0.9, "start": 0.85, "steps": 21, "N": 64, "rings": 8, "angles": 32},
        "N",
        None,
        "continuity principle on the Hartogs shell",
    ),
    "gauss": ScenarioSpec(
        gauss,
        {"slice": [[0.1, 0.05], [-0.03, 0.08]], "base": [0.1, 0.0], "taus": [1e2, 1e3, 1e4], "tol": 1e-3, "roundoff": 1e-12},
        None,
        "tol",
        "Gauss kernel approximation on a tilted slice",
    ),
    "torus": ScenarioSpec(
        torus,
        {"P": 1e3, "tol": 1e-8, "relation_samples": 10000, "ratio_samples": 100, "y_scale": 0.05, "R": 0.5, "grid": 32, "frame_samples": 10000},
        "grid",
        "tol",
        "torus frame, bracket determinant, cubic variant, P* on a small ball",
    ),
    "torus-verify": ScenarioSpec(torus_verify, {"radius": 5.0, "grid": 32, "budget": 30, "frame_samples": 10000}, "grid", None, "P* search on a ball"),
}


def resolve_params(name: str, overrides: Optional[dict] = None) -> dict:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(sorted(SCENARIOS))}")
    spec = SCENARIOS[name]
    params = dict(spec.defaults)
    for k, v in (overrides or {}).items():
        if k not in params:
            raise ConfigError(f"scenario {name!r} has no parameter {k!r}")
        params[k] = v
    return params


def run(name: str, params: Optional[dict] = None, seed: int = 0, jobs: int = 1) -> ScenarioReport:
    """Run a registered scenario with defaults overridden by ``params``."""
    full = resolve_params(name, params)
    return SCENARIOS[name].func(full, int(seed), int(jobs))

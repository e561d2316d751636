"""Families of analytic discs attached or half-attached to real submanifolds.

The building blocks are

* the half-disc conformal map ``Psi`` (unit disc onto a smoothed upper
  half-disc, sending the right half circle onto ``[-1, 1]``),
* the disc self-map ``Phi_c = (i - c Psi) / (i + c Psi)``,
* flat discs ``x + c v Psi``, their Bishop deformations onto a
  maximally real graph, and the composed half-attached family,
* round discs with a pivot, attached to a generic graph, whose boundary
  leaves the maximally real submanifold on one side,
* cone fields generated by tangent vectors at ``zeta = 1``.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.optimize import nnls

from .bishop_solver import BishopProblem, SolverConfig, solve_bishop, solve_linearized
from .circle_ops import CircleFn, CircleGrid, dtheta, eval_power_series, negative_frequency_ratio
from .conformal import SzegoMap, apply_mobius, half_disc_curve, mobius_three_points
from .cr_geometry import GenericGraph, MaximallyRealGraph, SupportModel
from .errors import NonConvergence, ParameterOutOfRange, RankDeficiency

__all__ = [
    "PsiConfig",
    "ConformalHalfMap",
    "AnalyticDisc",
    "DiscFamily",
    "ConeField",
    "PropertyReport",
    "build_psi",
    "phi_c",
    "flat_family",
    "half_attached_family",
    "adjust_tangent",
    "attached_pivot_family",
    "cone_field_from_family",
    "verify_flat_family",
    "verify_family_properties",
    "export_family_csv",
    "smooth_bump",
    "rank_margin",
]


# ----------------------------------------------------------------------
# conformal map onto the half-disc domain


@dataclass(frozen=True)
class PsiConfig:
    N: int = 4096
    bridge_order: int = 5
    per_piece: int = 8
    levels: int = 8


@dataclass(frozen=True)
class ConformalHalfMap:
    """Boundary table of ``Psi`` on a circle grid plus its Taylor coefficients."""

    grid: CircleGrid
    values: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)
    dvalues: np.ndarray = field(repr=False)
    C1: float
    C2: float
    profile: Callable = field(repr=False)

    def __call__(self, zeta) -> np.ndarray:
        """Interior (or boundary) values from the Taylor series."""
        return eval_power_series(self.coeffs[None, :], zeta)[0]

    def real_part(self) -> CircleFn:
        return CircleFn(self.grid, self.values.real)

    def check_invariants(self, radii=(0.25, 0.5, 0.75, 0.9, 0.99)) -> dict:
        N = self.grid.N
        right = np.cos(self.grid.theta) > 1e-12
        th = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
        interior = np.concatenate([self(r * np.exp(1j * th)) for r in radii])
        return {
            "psi(1)": abs(self.values[0]),
            "psi(i)-1": abs(self.values[N // 4] - 1.0),
            "psi(-i)+1": abs(self.values[3 * N // 4] + 1.0),
            "min dpsi/dtheta on right half": float(np.min(self.dvalues.real[right])),
            "max |Im dpsi/dtheta| on right half": float(np.max(np.abs(self.dvalues.imag[right]))),
            "min Im psi inside": float(np.min(interior.imag)),
            "negative frequency ratio": negative_frequency_ratio(self.values),
            "C1": self.C1,
        }


@lru_cache(maxsize=4)
def build_psi(config: PsiConfig = PsiConfig()) -> ConformalHalfMap:
    """Numerical conformal map with ``Psi(1) = 0`` and ``Psi(+-i) = +-1``."""
    curve, profile = half_disc_curve(config.bridge_order)
    riemann = SzegoMap(curve, 1j * np.sqrt(3.0), per_piece=config.per_piece, levels=config.levels)
    P = curve.period
    # parameter values of the boundary points 0, 1 and -1
    img0, img1, imgm1 = riemann.boundary_value(np.array([0.0, 1.0, P - 1.0]))
    mob = mobius_three_points([-1j, 1.0, 1j], [imgm1, img0, img1])
    grid = CircleGrid(config.N)
    targets = apply_mobius(mob, grid.zeta)
    a0 = riemann.angle(np.array([0.0]))[0]
    lift = a0 + np.mod(np.angle(targets) - a0, 2 * np.pi)
    lift[0] = a0
    params = riemann.invert(lift)
    params[0] = 0.0
    vals = curve.z(params)
    vals[0] = 0.0
    N = config.N
    coeffs = np.fft.fft(vals) / N
    coeffs = coeffs[: N // 2]
    dvals = dtheta(CircleFn(grid, vals)).values[0]
    C1 = float(dvals[0].real)
    C2 = float(max(np.max(np.abs(vals)), np.max(np.abs(dvals))))
    return ConformalHalfMap(grid, vals, coeffs, dvals, C1, C2, profile)


@dataclass(frozen=True)
class DiscSelfMap:
    psi: ConformalHalfMap
    c: float

    def __call__(self, zeta):
        p = self.psi(zeta)
        return (1j - self.c * p) / (1j + self.c * p)

    def boundary(self) -> np.ndarray:
        p = self.psi.values
        return (1j - self.c * p) / (1j + self.c * p)

    def containment(self) -> float:
        """``max |Phi_c - 1|`` over the boundary grid and interior rings."""
        th = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
        pts = np.concatenate([r * np.exp(1j * th) for r in (0.0, 0.3, 0.6, 0.9)])
        return float(max(np.max(np.abs(self.boundary() - 1)), np.max(np.abs(self(pts) - 1))))

    @property
    def angular_speed_at_one(self) -> float:
        return 2 * self.c * self.psi.C1


def phi_c(psi: ConformalHalfMap, c: float) -> DiscSelfMap:
    """Self-map of the disc fixing 1 and squeezing everything towards 1."""
    if c <= 0:
        raise ParameterOutOfRange("c must be positive")
    return DiscSelfMap(psi, float(c))


# ----------------------------------------------------------------------
# discs and families


@dataclass
class AnalyticDisc:
    """Holomorphic disc in ``C^n`` known by its boundary samples.

    ``evaluator`` (optional) evaluates the disc at arbitrary points of
    the closed disc; by default the Taylor series of the samples is
    used.
    """

    grid: CircleGrid
    boundary: np.ndarray = field(repr=False)
    evaluator: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        self.boundary = np.atleast_2d(np.asarray(self.boundary, complex))
        self.holomorphy_defect = negative_frequency_ratio(self.boundary)

    @property
    def n(self) -> int:
        return self.boundary.shape[0]

    def __call__(self, zeta) -> np.ndarray:
        if self.evaluator is not None:
            return self.evaluator(zeta)
        N = self.grid.N
        coeffs = np.fft.fft(self.boundary, axis=-1)[:, : N // 2] / N
        return eval_power_series(coeffs, zeta)

    def at_one(self) -> np.ndarray:
        return self.boundary[:, 0]

    def dtheta_at_one(self) -> np.ndarray:
        return dtheta(CircleFn(self.grid, self.boundary)).values[:, 0]


@dataclass
class DiscFamily:
    """Parametrized discs: ``builder(**params) -> AnalyticDisc``."""

    name: str
    params: dict
    builder: Callable
    info: dict = field(default_factory=dict)

    def member(self, **kw) -> AnalyticDisc:
        return self.builder(**kw)


def flat_family(c: float, x, v, psi: ConformalHalfMap, rho0: float = 1.0) -> AnalyticDisc:
    """Disc ``x + c v Psi`` lying in the complex line through ``x`` spanned by ``v``."""
    x = np.asarray(x, float)
    v = np.asarray(v, float)
    if np.linalg.norm(x) > c + 1e-15 or np.linalg.norm(v) > 2 or c > rho0 / 9:
        raise ParameterOutOfRange("flat family needs |x| <= c, |v| <= 2 and c <= rho0 / 9")
    bd = x[:, None] + c * v[:, None] * psi.values[None, :]
    return AnalyticDisc(psi.grid, bd, lambda z: x.reshape(-1, *([1] * np.ndim(z))) + c * np.multiply.outer(v, psi(z)))


def _seed(psi: ConformalHalfMap, c, x, v) -> CircleFn:
    return CircleFn(psi.grid, np.asarray(x, float)[:, None] + c * np.asarray(v, float)[:, None] * psi.values.real[None, :])


def _shifted_graph(M1: MaximallyRealGraph, p1) -> MaximallyRealGraph:
    p1 = np.asarray(p1, complex)
    if np.allclose(p1, 0):
        return M1
    px = p1.real.reshape(-1, 1)
    py = p1.imag.reshape(-1, 1)
    return MaximallyRealGraph(M1.n, lambda x: M1(x + px) - py, M1.rho1, M1.order)


def _disc_from_solution(report, p) -> np.ndarray:
    return report.X.values + 1j * report.Y.values


def adjust_tangent(M1: MaximallyRealGraph, psi: ConformalHalfMap, v1, c: float, config: Optional[SolverConfig] = None, target: float = 1e-10, max_steps: int = 50):
    """Correction ``v(c)`` making ``d/dtheta X(1)`` a fixed positive multiple of ``v1``.

    Damped Newton with the Jacobian assembled from linearized solves.
    Returns ``(v_c, residual, report)``.
    """
    v1 = np.asarray(v1, float)
    n = v1.size
    cfg = config or SolverConfig(c=c)
    goal = c * psi.C1 * v1
    w = np.zeros(n)
    rep = None
    for step in range(max_steps):
        prob = BishopProblem(M1, _seed(psi, c, np.zeros(n), v1 + w), 1.0, cfg)
        rep = solve_bishop(prob)
        F = dtheta(rep.X).values[:, 0] - goal
        res = float(np.max(np.abs(F)))
        if res < target:
            return w, res, rep
        J = np.empty((n, n))
        for k in range(n):
            src = CircleFn(psi.grid, np.outer(np.eye(n)[k], c * psi.values.real))
            dX = solve_linearized(prob, rep.X, src)
            J[:, k] = dtheta(dX).values[:, 0]
        dw = np.linalg.solve(J, -F)
        lam = 1.0
        while lam > 1e-3:
            trial = w + lam * dw
            prob_t = BishopProblem(M1, _seed(psi, c, np.zeros(n), v1 + trial), 1.0, cfg)
            Ft = dtheta(solve_bishop(prob_t).X).values[:, 0] - goal
            if np.max(np.abs(Ft)) < res:
                break
            lam *= 0.5
        w = w + lam * dw
    raise NonConvergence(f"tangent adjustment stalled at residual {res:.3e}")


class HalfAttachedFamily(DiscFamily):
    """``A_{x, v}(zeta) = Z^1_{c, x, v1 + v(c) + v}(Phi_c(zeta))``."""

    def __init__(self, M1, psi, v1, c, config, v_c, p1):
        self.M1 = M1
        self.psi = psi
        self.v1 = np.asarray(v1, float)
        self.c = float(c)
        self.config = config
        self.v_c = v_c
        self.p1 = p1
        self.phi = phi_c(psi, c)
        self._phi_bd = self.phi.boundary()
        super().__init__(
            "half-attached",
            {"c": c, "|x| max": c * c, "|v| max": c},
            self.build,
            {"v_c": v_c, "C1": psi.C1},
        )

    def problem(self, x, v) -> BishopProblem:
        return BishopProblem(self.M1, _seed(self.psi, self.c, x, self.v1 + self.v_c + v), 1.0, self.config)

    def solve(self, x=None, v=None):
        n = self.v1.size
        x = np.zeros(n) if x is None else np.asarray(x, float)
        v = np.zeros(n) if v is None else np.asarray(v, float)
        if np.linalg.norm(x) > self.c**2 * (1 + 1e-12) or np.linalg.norm(v) > self.c * (1 + 1e-12):
            raise ParameterOutOfRange("half-attached family requires |x| <= c^2 and |v| <= c")
        p = self.problem(x, v)
        return p, solve_bishop(p)

    def build(self, x=None, v=None) -> AnalyticDisc:
        _, rep = self.solve(x, v)
        Z = rep.Z
        N = self.psi.grid.N
        coeffs = np.fft.fft(Z, axis=-1)[:, : N // 2] / N
        shift = np.asarray(self.p1, complex).reshape(-1, 1)

        def inner(w):
            return eval_power_series(coeffs, w)

        bd = inner(self._phi_bd) + shift
        disc = AnalyticDisc(self.psi.grid, bd, lambda z: inner(self.phi(z)) + shift.reshape(-1, *([1] * np.ndim(z))))
        disc.inner = rep
        return disc


def half_attached_family(M1: MaximallyRealGraph, p1, v1, c: float, psi: Optional[ConformalHalfMap] = None, config: Optional[SolverConfig] = None, crdim: int = 1) -> HalfAttachedFamily:
    """Half-attached family at ``p1`` with tangent direction ``v1``.

    ``M1`` must be normalized to second order at ``p1``.  For generic
    submanifolds of CR dimension above one the construction runs
    unchanged but is flagged as experimental.
    """
    if crdim > 1:
        warnings.warn("CR dimension above one: half-attached family is experimental", UserWarning)
    psi = psi or build_psi()
    cfg = config or SolverConfig(c=c)
    M1s = _shifted_graph(M1, p1)
    v_c, _, _ = adjust_tangent(M1s, psi, v1, c, cfg)
    return HalfAttachedFamily(M1s, psi, v1, c, cfg, v_c, np.asarray(p1, complex) if np.ndim(p1) else np.zeros(len(v1), complex))


# ----------------------------------------------------------------------
# attached round discs with a pivot


def smooth_bump(x, center: float = 0.0, width: float = 1.0) -> np.ndarray:
    """``exp(1 - 1 / (1 - s^2))`` for ``|s| < 1``, zero elsewhere, with ``s = (x - center) / width``."""
    s = (np.asarray(x, float) - center) / width
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass
class PivotDisc:
    disc: AnalyticDisc
    tau: float
    X: np.ndarray = field(repr=False)
    Y: np.ndarray = field(repr=False)
    tangency_residual: float = 0.0


class PivotFamily(DiscFamily):
    """Round first component with pivot, remaining components attached to ``M``.

    Boundary: ``Z_1 = i r (1 - zeta)(1 + i tau) + chi_1 + i (h_1(chi) + nu)``
    and ``X' = chi' - T1[phi'(X, Y_1) + t mu(theta)]``,
    ``Y' = T1 X' + (phi' + t mu)(1)``, where the bump ``mu`` is supported
    near ``theta = pi``; ``tau`` makes the boundary tangent to ``M1`` at
    ``zeta = 1``.
    """

    def __init__(self, M: GenericGraph, M1: MaximallyRealGraph, r0: float, grid: CircleGrid, config: SolverConfig, bump_width: float = np.pi / 4):
        self.M = M
        self.M1 = M1
        self.r0 = float(r0)
        self.grid = grid
        self.config = config
        self.mu = smooth_bump(grid.theta, np.pi, bump_width)
        super().__init__("pivot", {"r0": r0, "t": M.n - 1, "chi": M.n, "nu": 1}, self.build)

    def _h1_grad(self, chi):
        from .cr_geometry import jacobian_fd

        return jacobian_fd(self.M1.h, chi.reshape(-1, 1))[0, :, 0]

    def build(self, t=None, chi=None, nu: float = 0.0, r=None, tol: float = 1e-14, max_iter: int = 60) -> PivotDisc:
        n = self.M.n
        r = self.r0 if r is None else float(r)
        t = np.zeros(n - 1) if t is None else np.asarray(t, float)
        chi = np.zeros(n) if chi is None else np.asarray(chi, float)
        th = self.grid.theta
        h1chi = float(self.M1(chi.reshape(-1, 1))[0, 0])
        grad = self._h1_grad(chi)
        mu = self.mu
        tau = 0.0
        for _ in range(max_iter):
            X1 = r * np.sin(th) - r * tau * (1 - np.cos(th)) + chi[0]
            Y1 = r * (1 - np.cos(th)) + r * tau * np.sin(th) + h1chi + nu

            def target(Xp, theta, X1=X1, Y1=Y1):
                return self.M(np.vstack([X1[None], Xp]), Y1) + np.outer(t, mu)

            seed = CircleFn(self.grid, np.repeat(chi[1:, None], self.grid.N, axis=1))
            rep = solve_bishop(BishopProblem(target, seed, 1.0, self.config))
            Xp = rep.X.values
            dX = np.concatenate([[r], dtheta(rep.X).values[:, 0]])
            if r == 0.0:
                new_tau = 0.0
            else:
                new_tau = float(grad @ dX) / r
            if abs(new_tau - tau) <= tol:
                tau = new_tau
                break
            tau = new_tau
        else:
            raise NonConvergence("pivot tangency iteration did not converge")
        X1 = r * np.sin(th) - r * tau * (1 - np.cos(th)) + chi[0]
        Y1 = r * (1 - np.cos(th)) + r * tau * np.sin(th) + h1chi + nu
        X = np.vstack([X1[None], Xp])
        Yp = self.M(X, Y1) + np.outer(t, mu)
        Y = np.vstack([Y1[None], Yp])
        dX = dtheta(CircleFn(self.grid, X)).values[:, 0]
        dY1 = dtheta(CircleFn(self.grid, Y1)).values[0, 0]
        resid = abs(dY1 - float(grad @ dX))
        disc = AnalyticDisc(self.grid, X + 1j * Y)
        return PivotDisc(disc, tau, X, Y, resid)

    def side_margin(self, member: PivotDisc) -> np.ndarray:
        """``Y_1 - h_1(X)`` along the boundary (positive means the side ``(M1)^+``)."""
        return member.Y[0] - self.M1(member.X)[0]

    def normal_rank(self, chi=None, step: float = 1e-6) -> tuple:
        """Jacobian of ``t -> d/dtheta X'(1)`` and its column-normalized smallest singular value."""
        n = self.M.n
        cols = []
        for k in range(n - 1):
            e = np.zeros(n - 1)
            e[k] = step
            dp = self.build(t=e, chi=chi).disc.dtheta_at_one().real[1:]
            dm = self.build(t=-e, chi=chi).disc.dtheta_at_one().real[1:]
            cols.append((dp - dm) / (2 * step))
        J = np.stack(cols, axis=1)
        return J, rank_margin(J)


def attached_pivot_family(M: GenericGraph, M1: MaximallyRealGraph, r0: float, grid: Optional[CircleGrid] = None, config: Optional[SolverConfig] = None) -> PivotFamily:
    """Round discs attached to ``M`` through the base point of straightened coordinates."""
    grid = grid or CircleGrid(1024)
    cfg = config or SolverConfig(c=max(r0, 1e-6))
    return PivotFamily(M, M1, r0, grid, cfg)


# ----------------------------------------------------------------------
# cones


def rank_margin(J: np.ndarray) -> float:
    """Smallest singular value after normalizing the columns."""
    J = np.atleast_2d(np.asarray(J, float))
    norms = np.linalg.norm(J, axis=0)
    if np.any(norms == 0):
        return 0.0
    return float(np.linalg.svd(J / norms, compute_uv=False)[-1])


@dataclass
class ConeField:
    """Finitely generated cones of directions at base points.

    ``generators[k]`` is an array ``(m_k, d)`` of unit vectors.
    """

    base_points: np.ndarray
    generators: list
    filled: bool = False

    def is_open(self, k: int = 0, threshold: float = 1e-3) -> bool:
        G = np.asarray(self.generators[k])
        return rank_margin(G.T) > threshold if G.shape[0] >= G.shape[1] else False

    def membership(self, k: int, direction) -> float:
        """Relative residual of the best nonnegative combination (0 means inside)."""
        d = np.asarray(direction, float)
        G = np.asarray(self.generators[k]).T
        coef, res = nnls(G, d)
        return float(res / max(np.linalg.norm(d), 1e-300))

    def contains(self, k: int, direction, tol: float = 1e-9) -> bool:
        return self.membership(k, direction) <= tol

    def fill(self, characteristic, lambdas=(0.25, 0.5, 0.75, 0.9)) -> "ConeField":
        """Add ``lam X + (1 - lam) v`` for every generator ``v`` and ``X`` the characteristic direction."""
        new = []
        for k, G in enumerate(self.generators):
            X = np.asarray(characteristic[k] if np.ndim(characteristic) > 1 else characteristic, float)
            X = X / np.linalg.norm(X)
            rows = [np.asarray(G)]
            for lam in lambdas:
                B = lam * X[None, :] + (1 - lam) * np.asarray(G)
                rows.append(B / np.linalg.norm(B, axis=1, keepdims=True))
            rows.append(X[None, :])
            new.append(np.vstack(rows))
        return ConeField(self.base_points, new, filled=True)


def cone_field_from_family(family, base_params: list, t_step: float = 1e-3) -> ConeField:
    """Cone generated by ``d/dtheta`` of family members at ``zeta = 1``.

    For a :class:`PivotFamily` the normal-deformation parameter ``t``
    runs over ``{0, +-t_step e_k}``; for a flat or half-attached family
    ``v`` is perturbed instead.
    """
    bases, gens = [], []
    for params in base_params:
        if isinstance(family, PivotFamily):
            n = family.M.n
            tvals = [np.zeros(n - 1)] + [s * t_step * np.eye(n - 1)[k] for k in range(n - 1) for s in (1, -1)]
            vecs = [family.build(t=tv, chi=params.get("chi")).disc.dtheta_at_one().real for tv in tvals]
            base = family.build(chi=params.get("chi")).disc.at_one()
        else:
            v0 = np.asarray(params["v"], float)
            n = v0.size
            vlist = [v0] + [v0 + s * t_step * np.eye(n)[k] for k in range(n) for s in (1, -1)]
            vecs = [family.member(v=vv).dtheta_at_one().real for vv in vlist]
            base = family.member(v=v0).at_one()
        G = np.array(vecs)
        G = G / np.linalg.norm(G, axis=1, keepdims=True)
        bases.append(base)
        gens.append(G)
    cf = ConeField(np.array(bases), gens)
    for k in range(len(gens)):
        if not cf.is_open(k):
            raise RankDeficiency("cone generators do not span an open cone")
    return cf


# ----------------------------------------------------------------------
# property checks


@dataclass
class PropertyReport:
    entries: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, margin: float, **detail):
        self.entries[name] = {"pass": bool(passed), "margin": float(margin), **detail}

    @property
    def all_pass(self) -> bool:
        return all(e["pass"] for e in self.entries.values())

    def lines(self) -> list:
        return [f"{k}: {'pass' if e['pass'] else 'FAIL'} (margin {e['margin']:.3e})" for k, e in self.entries.items()]


def _bilipschitz(disc: AnalyticDisc, samples: int = 128) -> tuple:
    N = disc.grid.N
    idx = np.linspace(0, N - 1, samples).round().astype(int)
    z = disc.grid.zeta[idx]
    rings = np.concatenate([r * np.exp(1j * np.linspace(0, 2 * np.pi, 32, endpoint=False)) for r in (0.5, 0.9)])
    pts = np.concatenate([z, rings])
    vals = np.concatenate([disc.boundary[:, idx], disc(rings)], axis=1)
    dz = np.abs(pts[:, None] - pts[None, :])
    dv = np.linalg.norm(vals[:, :, None] - vals[:, None, :], axis=0)
    off = dz > 0
    ratio = dv[off] / dz[off]
    return float(ratio.min()), float(ratio.max())


def verify_flat_family(c: float, psi: ConformalHalfMap, x=None, v=None) -> PropertyReport:
    """Checks of the flat family over ``R^n``."""
    x = np.zeros(3) if x is None else np.asarray(x, float)
    v = np.array([1.0, 0.0, 0.0]) if v is None else np.asarray(v, float)
    n = x.size
    rep = PropertyReport()
    disc = flat_family(c, x, v, psi)
    rep.add("(1_0) center", np.allclose(disc.at_one(), x, atol=1e-14), float(np.max(np.abs(disc.at_one() - x))))
    lo, hi = _bilipschitz(disc)
    rep.add("(2_0) embedding", lo > 0, lo, upper=hi)
    right = np.cos(psi.grid.theta) >= 0
    attach = float(np.max(np.abs(disc.boundary.imag[:, right])))
    rep.add("(3_0) half-attached", attach < 1e-12, 1e-12 - attach)
    d1 = disc.dtheta_at_one()
    mult = d1.real @ v / (v @ v)
    rep.add("(4_0) tangent multiple", mult > 0 and np.allclose(d1, mult * v, atol=1e-10), mult)
    Jx = np.eye(n)
    rep.add("(5_0) rank in x", rank_margin(Jx) > 1e-3, rank_margin(Jx))
    Jv = c * psi.C1 * np.eye(n)
    rep.add("(6_0) rank in v", rank_margin(Jv) > 1e-3, rank_margin(Jv))
    return rep


def verify_family_properties(family: HalfAttachedFamily, support: SupportModel, M: Optional[GenericGraph] = None, attach_tol: float = 1e-10, sweep: int = 3) -> PropertyReport:
    """Numerical checks of the half-attached family against a support model.

    Margins are normalized so that they stay of unit size as ``c``
    shrinks: containment margins are divided by ``|X' |^2`` or by the
    height ``c Im Psi(Phi_c)`` of the point above the edge.
    """
    c = family.c
    psi = family.psi
    n = family.v1.size
    grid = psi.grid
    th = grid.theta
    rep = PropertyReport()

    base = family.build()
    p, sol = family.solve()
    pin = float(np.max(np.abs(base.at_one() - family.p1)))
    rep.add("(1_1) base point", pin < 1e-13, 1e-13 - pin, residual=pin)

    # size and embedding over a small sweep of parameters
    rng = np.random.default_rng(0)
    sizes, lows = [], []
    for k in range(sweep):
        xs = rng.standard_normal(n)
        vs = rng.standard_normal(n)
        xs *= (c * c) * 0.5 / np.linalg.norm(xs)
        vs *= c * 0.5 / np.linalg.norm(vs)
        d = family.build(xs, vs) if k else base
        sizes.append(np.max(np.abs(d.boundary - family.p1[:, None])))
        lows.append(_bilipschitz(d)[0])
    lam1 = max(sizes) / c**2
    rep.add("(2_1) embedding", min(lows) > 0, min(lows), Lambda1=lam1)

    right = np.cos(th) >= 0
    A = base.boundary - family.p1[:, None]
    attach = float(np.max(np.abs(A.imag - family.M1(A.real))[:, right]))
    rep.add("(3_1) half-attachment", attach < attach_tol, attach_tol - attach, residual=attach)

    d1 = base.dtheta_at_one()
    v1 = family.v1
    mult = float(d1.real @ v1 / (v1 @ v1))
    dev = float(np.max(np.abs(d1 - mult * v1)))
    rep.add("(4_1) tangent multiple", mult > 0 and dev < 1e-9, mult, deviation=dev)

    Jx = np.empty((2 * n, n))
    for k in range(n):
        src = CircleFn(grid, np.repeat(np.eye(n)[k][:, None], grid.N, axis=1))
        dX = solve_linearized(p, sol.X, src)
        dY = np.einsum("ij,j->i", family.M1.jacobian(sol.X.values[:, :1])[..., 0], dX.values[:, 0])
        Jx[:n, k] = dX.values[:, 0]
        Jx[n:, k] = dY
    rm5 = rank_margin(Jx)
    rep.add("(5_1) rank in x", rm5 > 1e-3, rm5)

    Jv = np.empty((n, n))
    for k in range(n):
        src = CircleFn(grid, np.outer(np.eye(n)[k], c * psi.values.real))
        dX = solve_linearized(p, sol.X, src)
        Jv[:, k] = 2 * c * psi.C1 * dtheta(dX).values[:, 0]
    rm6 = rank_margin(Jv)
    rep.add("(6_1) rank in v", rm6 > 1e-3, rm6)

    # (7_1): boundary over the right half circle stays in {x_1 > g(x')}
    Xb = A.real
    mask = right & (np.abs(np.sin(th / 2)) > 1e-12)
    gap = Xb[0, mask] - support.g(Xb[1:, mask])
    scale = np.sum(Xb[1:, mask] ** 2, axis=0)
    m7 = float(np.min(gap / np.maximum(scale, 1e-300)))
    rep.add("(7_1) edge side", m7 > 0, m7)

    # (8_1): translated along the transversal x_1 axis
    m8 = np.inf
    for frac in (0.25, 1.0):
        xt = np.zeros(n)
        xt[0] = frac * c * c
        At = family.build(xt).boundary - family.p1[:, None]
        Xt = At.real[:, right]
        gap = Xt[0] - support.g(Xt[1:])
        m8 = min(m8, float(np.min(gap)) / (frac * c * c))
    rep.add("(8_1) transversal side", m8 > 0, m8)

    # (9_1): interior and left half circle lie in the half-wedge
    if support.psi is not None and M is not None:
        left = np.cos(th) < -1e-12
        ring = np.concatenate([rr * np.exp(1j * np.linspace(0, 2 * np.pi, 128, endpoint=False)) for rr in (0.0, 0.3, 0.6, 0.9, 0.99)])
        pts = np.concatenate([grid.zeta[left], ring])
        vals = base(pts) - family.p1[:, None]
        height = c * np.imag(psi(family.phi(pts)))
        X, Y = vals.real, vals.imag
        a_full = np.concatenate([[1.0], support.a])
        wedge = (a_full @ Y - support.psi(X, Y[1:])) / height
        sides = (Y[1:] - M(X, Y[0])) / height
        m9 = float(min(np.min(wedge), np.min(sides)))
        rep.add("(9_1) half-wedge", m9 > 0, m9)
    return rep


def export_family_csv(path, rows: list, n: int, param_names: list):
    """Write ``(params..., theta, Re z_1, Im z_1, ...)`` rows for plotting."""
    header = list(param_names) + ["theta"] + [f"{p}{k + 1}" for k in range(n) for p in ("re_z", "im_z")]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for params, disc in rows:
            for j, t in enumerate(disc.grid.theta):
                z = disc.boundary[:, j]
                w.writerow(list(params) + [f"{t:.17g}"] + [f"{v:.17g}" for k in range(n) for v in (z[k].real, z[k].imag)])

"""Picard solution of Bishop-type equations on the unit circle.

The unknown is a real boundary map ``X: S^1 -> R^n`` with

    X = X0 - T1[d h(X)],

where ``T1`` is the normalized conjugate operator.  The disc with
boundary ``X + i Y``, ``Y = T1 X + d h(X(1))``, is then holomorphic and
its boundary lies on ``{y = d h(x)}`` wherever ``T1 X0`` vanishes
(for the seeds used here, on the closed right half circle).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .circle_ops import CircleFn, hilbert_T1, holder_norm, negative_frequency_ratio
from .cr_geometry import MaximallyRealGraph, jacobian_fd
from .errors import Diverged, DomainEscape, ParameterOutOfRange

__all__ = [
    "SolverConfig",
    "BishopProblem",
    "SolveReport",
    "solve_bishop",
    "solve_linearized",
    "contraction_report",
    "find_contraction_threshold",
]


@dataclass
class SolverConfig:
    c: float = 0.05
    alpha: float = 0.5
    rho1: float = 1.0
    tol: float = 1e-12
    max_iter: int = 200
    K: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tol <= 0:
            raise ParameterOutOfRange("tol must be positive")
        if self.c <= 0:
            raise ParameterOutOfRange("c must be positive")
        c1 = self.K.get("c1")
        if c1 is not None and self.c > c1:
            raise ParameterOutOfRange(f"c={self.c} exceeds recorded contraction threshold c1={c1}")


@dataclass
class BishopProblem:
    """Data of one Bishop equation.

    ``target`` is either a :class:`MaximallyRealGraph` or a callable
    ``h(X, theta)`` acting on arrays of shape ``(n, N)``.
    ``jacobian`` optionally gives ``Dh`` with shape ``(n, n, N)``.
    """

    target: Union[MaximallyRealGraph, Callable]
    seed: CircleFn
    d: float = 1.0
    config: SolverConfig = field(default_factory=SolverConfig)
    jacobian: Optional[Callable] = None

    def __post_init__(self):
        if not 0.0 <= self.d <= 1.0:
            raise ParameterOutOfRange("deformation parameter d must lie in [0, 1]")
        if not self.seed.is_real:
            raise TypeError("seed must be real")
        c1norm = holder_norm(self.seed, 1, self.config.alpha).value
        self.seed_c1_norm = c1norm
        if np.max(np.abs(self.seed.values)) > self.config.rho1:
            warnings.warn("seed leaves the domain ball; solver regime not guaranteed", RuntimeWarning)

    @property
    def theta(self):
        return self.seed.grid.theta

    def h(self, X: np.ndarray) -> np.ndarray:
        if isinstance(self.target, MaximallyRealGraph):
            return self.target(X)
        return np.asarray(self.target(X, self.theta))

    def dh(self, X: np.ndarray) -> np.ndarray:
        if self.jacobian is not None:
            return np.asarray(self.jacobian(X, self.theta))
        if isinstance(self.target, MaximallyRealGraph):
            return self.target.jacobian(X)
        return jacobian_fd(lambda xx: self.target(xx, self.theta), X, step=1e-5)


@dataclass
class SolveReport:
    X: CircleFn
    Y: CircleFn
    iterations: int
    residual: float
    contraction_ratio: float
    attachment_residual: float
    holomorphy_defect: float

    @property
    def Z(self) -> np.ndarray:
        return self.X.values + 1j * self.Y.values


def _picard_map(p: BishopProblem, X: np.ndarray) -> np.ndarray:
    hx = p.d * p.h(X)
    return p.seed.values - hilbert_T1(CircleFn(p.seed.grid, hx)).values


def _check_domain(p: BishopProblem, X: np.ndarray):
    r = float(np.max(np.linalg.norm(X, axis=0)))
    if r > p.config.rho1:
        raise DomainEscape(f"boundary map reached |X| = {r:.3g} > rho1 = {p.config.rho1}")


def _iterate(step: Callable, X: np.ndarray, tol: float, max_iter: int, check=None):
    diffs = []
    ratios = []
    bad = 0
    for it in range(1, max_iter + 1):
        Xn = step(X)
        if check is not None:
            check(Xn)
        delta = float(np.max(np.abs(Xn - X)))
        if diffs and diffs[-1] > 1e-13:
            ratio = delta / diffs[-1]
            ratios.append(ratio)
            bad = bad + 1 if ratio >= 1.0 else 0
            if bad >= 10:
                raise Diverged(f"Picard ratio >= 1 for 10 consecutive iterations (last {ratio:.3g})")
        diffs.append(delta)
        X = Xn
        if delta <= tol:
            return X, it, (float(np.median(ratios)) if ratios else 0.0)
    raise Diverged(f"no convergence in {max_iter} iterations (last update {diffs[-1]:.3g})")


def solve_bishop(p: BishopProblem, initial: Optional[np.ndarray] = None) -> SolveReport:
    """Run the Picard scheme to tolerance and verify the result.

    The fixed-point residual is recomputed independently after
    convergence; the attachment residual is the sup over the closed
    right half circle of ``|Y - d h(X)|``.
    """
    cfg = p.config
    X = np.array(p.seed.values if initial is None else initial, dtype=float)
    _check_domain(p, X)
    X, iters, ratio = _iterate(lambda Z: _picard_map(p, Z), X, cfg.tol, cfg.max_iter, lambda Z: _check_domain(p, Z))
    grid = p.seed.grid
    hx = p.d * p.h(X)
    residual = float(np.max(np.abs(X + hilbert_T1(CircleFn(grid, hx)).values - p.seed.values)))
    Xf = CircleFn(grid, X)
    Y = hilbert_T1(Xf).values + hx[:, :1]
    right = np.cos(grid.theta) >= -1e-14
    attach = float(np.max(np.abs(Y - hx)[:, right]))
    Z = X + 1j * Y
    holo = negative_frequency_ratio(Z)
    return SolveReport(Xf, CircleFn(grid, Y), iters, residual, ratio, attach, holo)


def solve_linearized(p: BishopProblem, X: CircleFn, source: CircleFn, tol: Optional[float] = None) -> CircleFn:
    """Derivative of the solution along a parameter whose seed derivative is ``source``.

    Solves ``V = source - T1[d Dh(X) V]`` by Picard iteration.
    """
    tol = p.config.tol if tol is None else tol
    D = p.d * p.dh(np.asarray(X.values))
    grid = X.grid

    def step(V):
        hv = np.einsum("ijm,jm->im", D, V)
        return source.values - hilbert_T1(CircleFn(grid, hv)).values

    V, _, _ = _iterate(step, np.array(source.values, dtype=float), tol, p.config.max_iter)
    return CircleFn(grid, V)


def contraction_report(p: BishopProblem, builder: Optional[Callable] = None, c_range=(1e-3, 2.0)) -> dict:
    """Measured analogues of the solver constants.

    ``K2 = |X|_{C^{1,a}} / c`` and ``K6 = |X - X0|_{C^{1,a}} / c^{2+a}``.
    When ``builder(c) -> BishopProblem`` is given, the empirical
    contraction threshold ``c1`` is located by bisection.
    """
    cfg = p.config
    rep = solve_bishop(p)
    a = cfg.alpha
    xn = holder_norm(rep.X, 1, a).value
    dn = holder_norm(rep.X - p.seed, 1, a).value
    out = {
        "K2": xn / cfg.c,
        "K6": dn / cfg.c ** (2 + a),
        "ratio": rep.contraction_ratio,
        "iterations": rep.iterations,
    }
    if builder is not None:
        out["c1"] = find_contraction_threshold(builder, *c_range)
    return out


def find_contraction_threshold(builder: Callable, lo: float = 1e-3, hi: float = 2.0, target_ratio: float = 0.5, steps: int = 20) -> float:
    """Largest ``c`` (up to bisection accuracy) with measured Picard ratio below ``target_ratio``."""

    def ok(c):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                prob = builder(c)
                cfg = replace(prob.config, max_iter=60, tol=1e-10)
                prob = replace(prob, config=cfg)
                return solve_bishop(prob).contraction_ratio < target_ratio
        except (Diverged, DomainEscape):
            return False

    if not ok(lo):
        return 0.0
    if ok(hi):
        return hi
    for _ in range(steps):
        mid = np.sqrt(lo * hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return float(lo)

"""Graphed CR submanifolds, characteristic directions and normalizations.

Conventions
-----------
Points of ``C^n`` are written ``z = x + i y`` with ``x, y`` real
``n``-vectors.  Arrays of points put the coordinate index first, so a
batch of ``M`` points in ``R^n`` has shape ``(n, M)``.

* :class:`GenericGraph` -- CR dimension one generic submanifold
  ``y' = phi(x, y_1)`` with ``y' = (y_2, ..., y_n)``.
* :class:`MaximallyRealGraph` -- maximally real submanifold ``y = h(x)``.
* :class:`SurfaceInHypersurface` -- a real surface ``u = g(x, y)``
  inside the hypersurface ``v = phi(x, y, u)`` of ``C^2`` with
  coordinates ``(z, w) = (x + i y, u + i v)``.

Derivatives of user closures are taken with fourth order central
differences unless explicit gradient callables are supplied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import ComplexTangency, DomainEscape, NonConvergence, SingularConfiguration

__all__ = [
    "GenericGraph",
    "MaximallyRealGraph",
    "SurfaceInHypersurface",
    "SupportModel",
    "TangencyReport",
    "AffineChange",
    "QuadraticChange",
    "characteristic_direction",
    "characteristic_direction_pair",
    "tangency_defect",
    "find_complex_tangencies",
    "bishop_invariant",
    "classify_lambda",
    "straighten",
    "normalize_second_order",
    "compatibility_residual",
    "first_order_residuals",
    "normalized_model_i1",
    "jacobian_fd",
    "hessian_fd",
]

FD_STEP = 1e-3


# ----------------------------------------------------------------------
# finite differences


def jacobian_fd(f: Callable, x: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """Jacobian of ``f: R^k -> R^m`` at a batch of points.

    ``x`` has shape ``(k, M)``; returns ``(m, k, M)``.  Five point
    central stencil.
    """
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[:, None]
    k = x.shape[0]
    cols = []
    for i in range(k):
        e = np.zeros_like(x)
        e[i] = step
        d = (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * step)
        cols.append(np.asarray(d).reshape(-1, x.shape[1]))
    J = np.stack(cols, axis=1)
    return J[..., 0] if squeeze else J


def hessian_fd(f: Callable, x0: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Hessian of ``f: R^k -> R^m`` at one point, Richardson corrected.

    Returns an array ``(m, k, k)``.
    """
    x0 = np.asarray(x0, dtype=float)
    k = x0.size

    def raw(hs):
        pts = []
        for i in range(k):
            for j in range(k):
                for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                    p = x0.copy()
                    p[i] += si * hs
                    p[j] += sj * hs
                    pts.append(p)
        P = np.stack(pts, axis=1)
        vals = np.asarray(f(P)).reshape(-1, P.shape[1])
        m = vals.shape[0]
        vals = vals.reshape(m, k, k, 4)
        return (vals[..., 0] - vals[..., 1] - vals[..., 2] + vals[..., 3]) / (4 * hs * hs)

    H1 = raw(step)
    H2 = raw(step / 2)
    return (4 * H2 - H1) / 3


def _batched_newton(F: Callable, y0: np.ndarray, max_iter: int = 50, step: float = 1e-6) -> np.ndarray:
    """Solve ``F(y) = 0`` independently at each column of ``y0``.

    Iterates until the update stalls at round-off relative to ``y``.
    """
    y = np.array(y0, dtype=float)
    prev = np.inf
    for _ in range(max_iter):
        r = F(y)
        J = jacobian_fd(F, y, step=step)  # (k, k, M)
        try:
            dy = np.linalg.solve(np.moveaxis(J, -1, 0), np.moveaxis(r, -1, 0)[..., None])[..., 0].T
        except np.linalg.LinAlgError as exc:
            raise SingularConfiguration("singular Jacobian in implicit solve") from exc
        y = y - dy
        size = float(np.max(np.abs(dy)))
        if size <= 4e-16 * np.max(np.abs(y)) or size == 0.0 or size >= prev:
            break
        prev = size
    if np.max(np.abs(F(y))) > 1e-10:
        raise NonConvergence("implicit graph solve did not converge")
    return y


# ----------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class GenericGraph:
    """Generic submanifold of CR dimension one: ``y' = phi(x, y_1)``.

    ``phi(x, y1)`` takes ``x`` of shape ``(n, M)`` and ``y1`` of shape
    ``(M,)`` and returns shape ``(n - 1, M)``.
    """

    n: int
    phi: Callable
    rho1: float = 1.0
    crdim: int = 1
    normalized: bool = False

    def __call__(self, x, y1):
        return np.asarray(self.phi(np.asarray(x, float), np.asarray(y1, float)))

    def contains(self, z: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        x, y = z.real, z.imag
        return np.max(np.abs(y[1:] - self(x, y[0])), axis=0) <= tol


@dataclass(frozen=True)
class MaximallyRealGraph:
    """Maximally real submanifold ``y = h(x)``; ``h`` maps ``(n, M) -> (n, M)``."""

    n: int
    h: Callable
    rho1: float = 1.0
    order: int = 0
    dh: Optional[Callable] = None

    def __call__(self, x):
        return np.asarray(self.h(np.asarray(x, float)))

    def jacobian(self, x) -> np.ndarray:
        """``(n, n, M)`` Jacobian of ``h`` at a batch of points."""
        x = np.asarray(x, float)
        if self.dh is not None:
            return np.asarray(self.dh(x))
        return jacobian_fd(self.h, x)

    def point(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        return x + 1j * self(x)


@dataclass(frozen=True)
class SurfaceInHypersurface:
    """Surface ``u = g(x, y)`` inside ``M = {v = phi(x, y, u)}`` in ``C^2``."""

    g: Callable
    phi: Callable = field(default=lambda x, y, u: np.zeros(np.broadcast(x, y, u).shape))
    g_grad: Optional[Callable] = None
    phi_grad: Optional[Callable] = None
    orientation: float = 1.0

    def G(self, x, y):
        """Complex graph ``w = u + i v`` over the ``z`` plane."""
        u = self.g(x, y)
        return u + 1j * self.phi(x, y, u)

    def grads(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        if self.g_grad is not None:
            gx, gy = self.g_grad(x, y)
        else:
            gx, gy = _partials2(self.g, x, y)
        u = self.g(x, y)
        if self.phi_grad is not None:
            px, py, pu = self.phi_grad(x, y, u)
        else:
            px, py, pu = _partials3(self.phi, x, y, u)
        return (np.asarray(gx, float), np.asarray(gy, float), np.asarray(px, float), np.asarray(py, float), np.asarray(pu, float))

    def residual_in_M(self, x, y) -> np.ndarray:
        """Sanity check that ``S`` lies in ``M`` (identically zero for graphs)."""
        w = self.G(x, y)
        return np.abs(w.imag - self.phi(x, y, w.real))


def _d1(f, args, i, h=FD_STEP):
    def shifted(s):
        a = list(args)
        a[i] = a[i] + s
        return np.asarray(f(*a), dtype=float)

    return (-shifted(2 * h) + 8 * shifted(h) - 8 * shifted(-h) + shifted(-2 * h)) / (12 * h)


def _partials2(f, x, y):
    return _d1(f, (x, y), 0), _d1(f, (x, y), 1)


def _partials3(f, x, y, u):
    return _d1(f, (x, y, u), 0), _d1(f, (x, y, u), 1), _d1(f, (x, y, u), 2)


@dataclass(frozen=True)
class TangencyReport:
    point: tuple
    lam: float
    kind: str

    def __post_init__(self):
        expected = classify_lambda(self.lam)
        if self.kind != expected:
            raise ValueError(f"kind {self.kind} inconsistent with lambda {self.lam}")


def classify_lambda(lam: float, tol: float = 1e-6) -> str:
    """Bishop class of an invariant ``lam`` (``inf`` allowed)."""
    if lam is None or np.isnan(lam):
        return "degenerate"
    if abs(lam - 0.5) <= tol:
        return "parabolic"
    return "elliptic" if lam < 0.5 else "hyperbolic"


# ----------------------------------------------------------------------
# characteristic directions


def tangency_defect(s: SurfaceInHypersurface, x, y) -> np.ndarray:
    """Coefficients ``(c_a, c_b)`` with ``c_a a + c_b b = 0`` for complex tangent vectors.

    The surface tangent vector above ``(a, b)`` lies in the complex
    tangent space of ``M`` exactly when this linear form vanishes; both
    coefficients vanish at complex tangencies.
    """
    gx, gy, px, py, pu = s.grads(x, y)
    dx = px + pu * gx
    dy = py + pu * gy
    ca = gx - py + pu * dx
    cb = gy + px + pu * dy
    return np.stack([ca, cb])


def characteristic_direction(s: SurfaceInHypersurface, p, tol: float = 1e-10) -> np.ndarray:
    """Unit ``(x, y)`` direction of ``T_pS`` intersected with the complex tangent of ``M``.

    >>> S = SurfaceInHypersurface(g=lambda x, y: x)
    >>> [round(float(v), 12) + 0.0 for v in characteristic_direction(S, (0.0, 0.0))]
    [0.0, 1.0]
    """
    x, y = float(p[0]), float(p[1])
    ca, cb = tangency_defect(s, x, y)
    norm = float(np.hypot(ca, cb))
    if norm <= tol:
        raise ComplexTangency(f"complex tangency at {(x, y)}")
    return s.orientation * np.array([-cb, ca]) / norm


def characteristic_direction_pair(M: GenericGraph, M1: MaximallyRealGraph, x, reference=None, tol: float = 1e-9) -> np.ndarray:
    """Characteristic direction of ``M1`` inside ``M`` at the point above ``x``.

    Returned as a unit vector ``xi`` of the parameter space ``R^n``; the
    tangent vector of ``M1`` is ``xi + i Dh(x) xi``.
    """
    n = M.n
    x = np.asarray(x, float).reshape(n, 1)
    Dh = M1.jacobian(x)[..., 0]
    y1 = M1(x)[0]

    def phi_x(xx):
        return M(xx, np.broadcast_to(y1, xx.shape[1:]))

    Phx = jacobian_fd(phi_x, x)[..., 0]  # (n-1, n)
    Phy = _d1(lambda t: M(x, t), (y1,), 0)[:, 0]  # (n-1,)
    E = np.zeros((n - 1, n))
    E[:, 1:] = np.eye(n - 1)
    B = E + Phx @ Dh - np.outer(Phy, np.eye(n)[0])
    _, svals, Vt = np.linalg.svd(B)
    if n >= 3 and svals[-1] <= tol * max(1.0, svals[0]):
        raise ComplexTangency("characteristic space is more than one dimensional")
    xi = Vt[-1]
    ref = np.eye(n)[0] if reference is None else np.asarray(reference, float)
    if xi @ ref < 0:
        xi = -xi
    return xi / np.linalg.norm(xi)


# ----------------------------------------------------------------------
# complex tangencies and the Bishop invariant


def _jet_fit(G: Callable, x0: float, y0: float, radius: float = 1e-2):
    """Least squares fit of a degree four polynomial to ``G`` near ``(x0, y0)``.

    Samples lie on three concentric circles plus the center, which
    separates ``x^2``, ``y^2`` and the constant (impossible from a
    single circle).  Returns the complex coefficients of ``1, x, y,
    x^2, x y, y^2`` in unscaled units.
    """
    pts = [(0.0, 0.0)]
    for frac in (1.0, 0.5, 0.25):
        t = 2 * np.pi * (np.arange(24) + 0.5 * frac) / 24
        pts.extend(zip(frac * np.cos(t), frac * np.sin(t)))
    P = np.array(pts)
    u, v = P[:, 0], P[:, 1]
    mons = [(i, d - i) for d in range(5) for i in range(d, -1, -1)]
    A = np.stack([u**a * v**b for a, b in mons], axis=1)
    vals = G(x0 + radius * u, y0 + radius * v)
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    out = {}
    for (a, b), c in zip(mons, coef):
        out[(a, b)] = c / radius ** (a + b)
    return out


def bishop_invariant(s: SurfaceInHypersurface, p, radius: float = 1e-2, degenerate_tol: float = 1e-9) -> float:
    """Bishop invariant ``|G_{zbar zbar}| / (2 |G_{z zbar}|)`` of the 2-jet at ``p``.

    Returns ``inf`` when the ``z zbar`` coefficient vanishes and ``nan``
    when every second order term vanishes (degenerate jet).
    """
    jet = _jet_fit(s.G, float(p[0]), float(p[1]), radius)
    gxx = 2 * jet[(2, 0)]
    gyy = 2 * jet[(0, 2)]
    gxy = jet[(1, 1)]
    g_zzb = (gxx + gyy) / 4
    g_zbzb = (gxx - gyy + 2j * gxy) / 4
    g_zz = (gxx - gyy - 2j * gxy) / 4
    scale = max(abs(g_zzb), abs(g_zbzb), abs(g_zz))
    if scale <= degenerate_tol:
        return float("nan")
    if abs(g_zzb) <= degenerate_tol * max(1.0, scale):
        return float("inf")
    return float(abs(g_zbzb) / (2 * abs(g_zzb)))


def find_complex_tangencies(s: SurfaceInHypersurface, region, pitch: Optional[float] = None, tol: float = 1e-10, holes=()) -> list:
    """Locate and classify the complex tangencies of ``s`` in a box.

    ``region`` is ``(xmin, xmax, ymin, ymax)``.  Cells of a grid of the
    given pitch where both defect components change sign are refined
    with a local root finder.  ``holes`` is a list of excluded discs
    ``(cx, cy, r)``.
    """
    xmin, xmax, ymin, ymax = map(float, region)
    if pitch is None:
        pitch = max(xmax - xmin, ymax - ymin) / 64
    nx = max(2, int(np.ceil((xmax - xmin) / pitch)) + 1)
    ny = max(2, int(np.ceil((ymax - ymin) / pitch)) + 1)
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    C = tangency_defect(s, X, Y)

    def corners(a):
        return np.stack([a[:-1, :-1], a[1:, :-1], a[:-1, 1:], a[1:, 1:]])

    cand = np.ones((nx - 1, ny - 1), bool)
    for comp in C:
        cs = corners(comp)
        cand &= (cs.min(axis=0) <= 0) & (cs.max(axis=0) >= 0)
    found = []
    for i, j in zip(*np.nonzero(cand)):
        x0 = 0.5 * (xs[i] + xs[i + 1])
        y0 = 0.5 * (ys[j] + ys[j + 1])
        sol = optimize.root(lambda q: tangency_defect(s, q[0], q[1]).ravel(), [x0, y0], method="hybr", tol=1e-14)
        q = sol.x
        if np.max(np.abs(tangency_defect(s, q[0], q[1]))) > max(tol, 1e-8):
            continue
        if not (xs[i] - pitch <= q[0] <= xs[i + 1] + pitch and ys[j] - pitch <= q[1] <= ys[j + 1] + pitch):
            continue
        if any(np.hypot(q[0] - cx, q[1] - cy) < r for cx, cy, r in holes):
            continue
        if any(np.hypot(q[0] - f[0], q[1] - f[1]) < pitch / 2 for f in found):
            continue
        found.append((float(q[0]), float(q[1])))
    reports = []
    for q in sorted(found):
        lam = bishop_invariant(s, q)
        reports.append(TangencyReport(q, lam, classify_lambda(lam)))
    return reports


# ----------------------------------------------------------------------
# coordinate changes


@dataclass(frozen=True)
class AffineChange:
    """``z_new = L (z_old - p)`` with complex matrix ``L``."""

    L: np.ndarray
    p: np.ndarray

    def forward(self, z):
        z = np.asarray(z, complex)
        return self.L @ (z - self.p.reshape(-1, *([1] * (z.ndim - 1))))

    def inverse(self, w):
        w = np.asarray(w, complex)
        return np.linalg.solve(self.L, w.reshape(w.shape[0], -1)).reshape(w.shape) + self.p.reshape(-1, *([1] * (w.ndim - 1)))


@dataclass(frozen=True)
class QuadraticChange:
    """``z_new = z - i Q(z) - B(z)`` in two stages (see :func:`normalize_second_order`).

    ``Q`` is a stack of symmetric real matrices (one per component);
    ``B`` acts on the first component only.
    """

    Q: np.ndarray
    B: np.ndarray

    def stage1(self, z):
        z = np.asarray(z, complex)
        quad = np.einsum("jkl,k...,l...->j...", self.Q, z, z)
        return z - 1j * quad

    def stage2(self, z):
        z = np.asarray(z, complex)
        out = np.array(z, copy=True)
        out[0] = z[0] - np.einsum("kl,k...,l...->...", self.B, z, z)
        return out

    def forward(self, z):
        return self.stage2(self.stage1(z))


def compatibility_residual(M: GenericGraph, M1: MaximallyRealGraph, x) -> float:
    """Max of ``|h_j(x) - phi_j(x, h_1(x))|`` over sample points ``x`` (shape ``(n, M)``)."""
    x = np.asarray(x, float)
    hx = M1(x)
    return float(np.max(np.abs(hx[1:] - M(x, hx[0]))))


def straighten(M: GenericGraph, M1: MaximallyRealGraph, p_x, reference=None):
    """Affine holomorphic change making ``T_0 M1 = R^n`` and ``T_0 M = {y' = 0}``.

    ``p_x`` is the real parameter of the base point ``p = p_x + i h(p_x)``.
    The linear part is ``R (I - i Dh(p_x))`` where ``R`` is a rotation
    taking the characteristic direction to the ``x_1`` axis.

    Returns ``(M_new, M1_new, change)``.
    """
    n = M.n
    p_x = np.asarray(p_x, float)
    p = p_x + 1j * M1(p_x.reshape(n, 1))[:, 0]
    H = M1.jacobian(p_x.reshape(n, 1))[..., 0]
    As = np.eye(n) - 1j * H
    xi = characteristic_direction_pair(M, M1, p_x, reference=reference)
    v = ((np.eye(n) + H @ H) @ xi).real
    R = _rotation_to_e1(v / np.linalg.norm(v))
    L = R @ As
    if abs(np.linalg.det(L)) < 1e-12:
        raise SingularConfiguration("non-generic configuration: singular straightening matrix")
    change = AffineChange(L, p)
    Linv = np.linalg.inv(L)

    def old_of(xn, yn):
        return Linv @ (xn + 1j * yn) + p.reshape(-1, 1)

    def h_new(xn):
        xn = np.asarray(xn, float)
        shape = xn.shape[1:]
        xf = xn.reshape(n, -1)

        def F(yn):
            z = old_of(xf, yn)
            return z.imag - M1(z.real)

        y = _batched_newton(F, np.zeros_like(xf))
        return y.reshape((n,) + shape)

    def phi_new(xn, y1n):
        xn = np.asarray(xn, float)
        shape = xn.shape[1:]
        xf = xn.reshape(n, -1)
        y1f = np.broadcast_to(np.asarray(y1n, float), shape).reshape(-1)

        def F(yp):
            yn = np.vstack([y1f[None, :], yp])
            z = old_of(xf, yn)
            return z.imag[1:] - M(z.real, z.imag[0])

        yp = _batched_newton(F, np.zeros((n - 1, xf.shape[1])))
        return yp.reshape((n - 1,) + shape)

    M_new = GenericGraph(n, phi_new, M.rho1, M.crdim, normalized=True)
    M1_new = MaximallyRealGraph(n, h_new, M1.rho1, order=1)
    return M_new, M1_new, change


def _rotation_to_e1(u: np.ndarray) -> np.ndarray:
    """Orthogonal matrix with determinant one sending unit ``u`` to ``e_1``."""
    n = u.size
    e1 = np.eye(n)[0]
    if np.allclose(u, e1):
        return np.eye(n)
    w = u - e1
    Hh = np.eye(n) - 2 * np.outer(w, w) / (w @ w)  # reflection u -> e1
    if np.linalg.det(Hh) < 0:
        D = np.eye(n)
        D[-1, -1] = -1.0 if n > 1 else 1.0
        Hh = D @ Hh
    return Hh


def first_order_residuals(M: GenericGraph, M1: MaximallyRealGraph) -> dict:
    """Values and first derivatives at the origin that a straightened pair must kill."""
    n = M.n
    z = np.zeros((n, 1))
    res = {
        "h(0)": float(np.max(np.abs(M1(z)))),
        "dh(0)": float(np.max(np.abs(jacobian_fd(M1.h, z)))),
        "phi(0)": float(np.max(np.abs(M(z, np.zeros(1))))),
        "dphi_x(0)": float(np.max(np.abs(jacobian_fd(lambda xx: M(xx, np.zeros(xx.shape[1])), z)))),
        "dphi_y1(0)": float(np.max(np.abs(_d1(lambda t: M(z, t), (np.zeros(1),), 0)))),
    }
    return res


# ----------------------------------------------------------------------
# second order normalization and the support model


@dataclass(frozen=True)
class SupportModel:
    """Supporting hypersurface data inside ``M1`` near the base point.

    ``g`` maps ``x'`` (shape ``(n-1, M)``) to ``x_1`` values (shape
    ``(M,)``), ``(H1)^+ = {x_1 > g(x')}``.  ``psi(x, y')`` graphs the
    hypersurface ``N1 = {y_1 + sum_j a_j y_j = psi}``; ``a`` holds
    ``a_2, ..., a_n`` with unit sum.
    """

    g: Callable
    psi: Optional[Callable] = None
    a: Optional[np.ndarray] = None

    def k(self, M1: MaximallyRealGraph, xp):
        """Lift of the support hypersurface: ``y = h(g(x'), x')``."""
        xp = np.asarray(xp, float)
        x = np.vstack([np.atleast_1d(self.g(xp))[None, ...], xp])
        return M1(x)


def normalize_second_order(M1: MaximallyRealGraph, support: SupportModel):
    """Quadratic holomorphic change killing the 2-jet of ``h`` and fixing ``g``.

    The first stage ``z -> z - i Q(z)`` with ``Q_j = Hess h_j(0) / 2``
    makes ``h = o(|x|^2)``.  The second stage
    ``z_1 -> z_1 - B(z', z') - sum_{k >= 2} z_k^2`` puts the support
    graph in the form ``x_1 = -|x'|^2 + o(|x'|^2)``.  Both graphs are
    re-fitted by implicit solves.

    Returns ``(M1_new, support_new, change)``.
    """
    n = M1.n
    zero = np.zeros(n)
    Q = 0.5 * hessian_fd(M1.h, zero)
    change1 = QuadraticChange(Q, np.zeros((n, n)))
    M1a, g1 = _refit(M1, support, change1.stage1)
    B = np.zeros((n, n))
    if n > 1:
        Hg = hessian_fd(lambda xp: np.atleast_2d(g1(xp)), np.zeros(n - 1))[0]
        B[1:, 1:] = 0.5 * Hg + np.eye(n - 1)
    change = QuadraticChange(Q, B)
    M1_new, g_new = _refit(M1, support, change.forward)
    support_new = SupportModel(g_new, support.psi, support.a)
    return M1_new, support_new, change


def _refit(M1: MaximallyRealGraph, support: SupportModel, F: Callable):
    n = M1.n

    def h_new(xn):
        xn = np.asarray(xn, float)
        shape = xn.shape[1:]
        xf = xn.reshape(n, -1)

        def G(x):
            return F(x + 1j * M1(x)).real - xf

        x = _batched_newton(G, xf.copy())
        return F(x + 1j * M1(x)).imag.reshape((n,) + shape)

    def g_new(xpn):
        xpn = np.asarray(xpn, float)
        shape = xpn.shape[1:]
        xpf = xpn.reshape(n - 1, -1)

        def point(xp):
            x = np.vstack([np.atleast_1d(support.g(xp)).reshape(1, -1), xp])
            return F(x + 1j * M1(x))

        xp = _batched_newton(lambda xp: point(xp).real[1:] - xpf, xpf.copy())
        return point(xp).real[0].reshape(shape)

    return MaximallyRealGraph(n, h_new, M1.rho1, order=2), g_new


def normalized_model_i1(n: int = 3, cubic: float = 0.2, mixed: float = 0.3, a=None):
    """A normalized model of the configuration with ``v_1 = (0, 1, ..., 1)``.

    Returns ``(M, M1, support, v1)``: ``M`` is the generic graph
    ``y_j = mixed * x_1 y_1 + cubic_j(x)``, ``M1 = M cap {y_1 = h_1(x)}``
    with cubic ``h_1``, the support graph is ``x_1 = -|x'|^2 + cubic``
    and ``psi = h_1 + sum a_j h_j`` so that ``N1`` contains ``M1``.
    All normalizations hold exactly.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    a = np.full(n - 1, 1.0 / (n - 1)) if a is None else np.asarray(a, float)
    if not np.isclose(a.sum(), 1.0):
        raise ValueError("a_2 + ... + a_n must equal 1")

    def h1(x):
        return cubic * (x[0] ** 3 + x[0] * np.sum(x[1:] ** 2, axis=0) - x[1] ** 3)

    def phi(x, y1):
        out = []
        for j in range(1, n):
            out.append(mixed * x[0] * y1 + cubic * 0.5 * (x[j] ** 3 - x[0] ** 2 * x[j]))
        return np.stack(out)

    def h(x):
        y1 = h1(x)
        return np.vstack([y1[None], phi(x, y1)])

    def g(xp):
        xp = np.asarray(xp, float)
        return -np.sum(xp**2, axis=0) + cubic * xp[0] ** 3

    def psi(x, yp):
        hx = h(x)
        return hx[0] + np.einsum("j,j...->...", a, hx[1:])

    M = GenericGraph(n, phi, rho1=1.0, normalized=True)
    M1 = MaximallyRealGraph(n, h, rho1=1.0, order=2)
    support = SupportModel(g, psi, a)
    v1 = np.concatenate([[0.0], np.ones(n - 1)])
    return M, M1, support, v1

"""Holomorphic-extension experiments at desk scale.

Continuity-principle coverage along isotopies of analytic discs, and
the Gauss-kernel approximation of CR functions on maximally real
slices together with its polynomial truncations.

All distances in the coverage harness use the polydisc norm
``|z| = max_j |z_j|``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .disc_families import AnalyticDisc
from .errors import BoundaryEscape, DegenerateDisc, NonConvergence, ParameterOutOfRange

__all__ = [
    "Domain",
    "whole_space",
    "polydisc_domain",
    "ball_domain",
    "hartogs_shell",
    "DiscIsotopy",
    "SigmaReport",
    "coverage_radius",
    "bilipschitz_constants",
    "continuity_sigma",
    "CoverageCloud",
    "extension_coverage",
    "shrinking_hartogs_isotopy",
    "MaximallyRealSlice",
    "gauss_approximation",
    "polynomial_sequence",
    "TruncatedPolynomial",
]


def _supnorm(z: np.ndarray) -> np.ndarray:
    return np.max(np.abs(z), axis=0)


@dataclass(frozen=True)
class Domain:
    """Open set given by a membership test and a boundary-distance oracle.

    ``boundary_distance(z)`` takes points of shape ``(n, M)`` and returns
    the polydisc distance to the boundary (zero or negative outside).
    """

    name: str
    contains: Callable
    boundary_distance: Callable
    cap: float = np.inf


def whole_space(cap: float = 10.0) -> Domain:
    return Domain("C^n", lambda z: np.ones(np.shape(z)[1:], bool), lambda z: np.full(np.shape(z)[1:], np.inf), cap)


def polydisc_domain(radius: float = 1.0, center=None) -> Domain:
    def dist(z):
        z = np.asarray(z, complex)
        c = 0 if center is None else np.asarray(center, complex).reshape(-1, *[1] * (z.ndim - 1))
        return radius - _supnorm(z - c)

    return Domain(f"polydisc(r={radius})", lambda z: dist(z) > 0, dist)


def ball_domain(radius: float = 1.0) -> Domain:
    """Euclidean ball; the oracle is the radius of the largest polydisc inside."""

    def dist(z):
        m = np.abs(np.asarray(z, complex))
        n = m.shape[0]
        # largest s with sum (m_j + s)^2 <= R^2
        a, b, c = n, 2 * m.sum(axis=0), (m ** 2).sum(axis=0) - radius ** 2
        s = (-b + np.sqrt(np.maximum(b * b - 4 * a * c, 0.0))) / (2 * a)
        return np.where(c < 0, s, -np.sqrt(np.maximum(c, 0.0)))

    return Domain(f"ball(R={radius})", lambda z: dist(z) > 0, dist)


def hartogs_shell(eps: float = 0.2, radius: float = 1.0) -> Domain:
    """Unit bidisc minus the closed bidisc of radius ``radius - eps``."""
    if not 0 < eps < radius:
        raise ParameterOutOfRange("need 0 < eps < radius")
    inner = radius - eps

    def dist(z):
        s = _supnorm(np.asarray(z, complex))
        return np.minimum(radius - s, s - inner)

    return Domain(f"hartogs_shell(eps={eps})", lambda z: dist(z) > 0, dist)


@dataclass
class DiscIsotopy:
    """One-parameter family ``tau -> disc(tau)`` sampled at ``taus``."""

    disc: Callable[[float], AnalyticDisc]
    domain: Domain
    taus: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 1.0, 21))

    def __post_init__(self):
        self.taus = np.asarray(self.taus, float)
        if self.taus.ndim != 1 or self.taus.size < 2 or np.any(np.diff(self.taus) <= 0):
            raise ParameterOutOfRange("taus must be strictly increasing with at least two values")

    def continuity(self) -> float:
        """Largest ``sup|A_{k+1} - A_k| / (tau_{k+1} - tau_k)`` over adjacent samples."""
        prev = None
        worst = 0.0
        for k, t in enumerate(self.taus):
            b = self.disc(t).boundary
            if prev is not None:
                worst = max(worst, float(np.max(_supnorm(b - prev))) / (t - self.taus[k - 1]))
            prev = b
        return worst


@dataclass(frozen=True)
class SigmaReport:
    tau: float
    rho: float
    c: float
    C: float
    sigma: float


def coverage_radius(rho: float, c: float, C: float) -> float:
    """``rho * c / (2 C)``, zero when ``rho <= 0``."""
    if rho <= 0:
        return 0.0
    return rho * c / (2 * C)


def _disc_points(disc: AnalyticDisc, zeta: np.ndarray) -> np.ndarray:
    return np.asarray(disc(zeta), complex).reshape(disc.n, -1)


def bilipschitz_constants(disc: AnalyticDisc, pairs: int = 10_000, rng: Optional[np.random.Generator] = None) -> tuple:
    """Sampled lower and upper Lipschitz constants over the closed disc.

    Random pairs are drawn uniformly in the closed disc and complemented
    by all adjacent pairs of the boundary grid.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    r = np.sqrt(rng.random((2, pairs)))
    a = 2 * np.pi * rng.random((2, pairs))
    z1, z2 = r * np.exp(1j * a)
    zeta = disc.grid.zeta
    z1 = np.concatenate([z1, zeta])
    z2 = np.concatenate([z2, np.roll(zeta, -1)])
    keep = np.abs(z1 - z2) > 1e-9
    z1, z2 = z1[keep], z2[keep]
    ratio = _supnorm(_disc_points(disc, z1) - _disc_points(disc, z2)) / np.abs(z1 - z2)
    return float(ratio.min()), float(ratio.max())


def continuity_sigma(isotopy: DiscIsotopy, tau: float, pairs: int = 10_000, seed: int = 0) -> SigmaReport:
    disc = isotopy.disc(tau)
    dom = isotopy.domain
    d = np.asarray(dom.boundary_distance(disc.boundary), float)
    inside = np.asarray(dom.contains(disc.boundary), bool)
    if not np.all(inside):
        raise BoundaryEscape(f"disc boundary leaves the domain at tau={tau}", tau)
    rho = float(min(np.min(d), dom.cap))
    c, C = bilipschitz_constants(disc, pairs, np.random.default_rng(seed))
    if c < 1e-8:
        raise DegenerateDisc(f"disc at tau={tau} is not an embedding (c={c:.3g})")
    return SigmaReport(float(tau), rho, c, C, coverage_radius(rho, c, C))


@dataclass
class CoverageCloud:
    """Certified envelope points with provenance ``(tau, zeta, radius)``.

    ``radius`` is the coverage radius after the safety factor.
    """

    points: np.ndarray
    tau: np.ndarray
    zeta: np.ndarray
    radius: np.ndarray
    reports: list = field(default_factory=list)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, complex).reshape(self.points.shape[0], -1)
        if self.points.shape[1] == 0:
            return np.zeros(z.shape[1], bool)
        out = np.zeros(z.shape[1], bool)
        for k in range(z.shape[1]):
            d = _supnorm(self.points - z[:, k : k + 1])
            out[k] = bool(np.any(d < self.radius))
        return out

    def rows(self) -> list:
        rows = []
        for k in range(self.points.shape[1]):
            p = self.points[:, k]
            row = [float(self.tau[k]), float(self.zeta[k].real), float(self.zeta[k].imag), float(self.radius[k])]
            for v in p:
                row += [float(v.real), float(v.imag)]
            rows.append(row)
        return rows


def extension_coverage(isotopy: DiscIsotopy, rings: int = 8, angles: int = 32, safety: float = 2.0, seed: int = 0) -> CoverageCloud:
    """Union over the isotopy of polydisc neighbourhoods of the discs.

    Every disc boundary is rechecked against the domain; the final disc
    must lie in the domain entirely.
    """
    last = isotopy.disc(isotopy.taus[-1])
    r = np.linspace(0.0, 1.0, rings + 1)
    a = 2 * np.pi * np.arange(angles) / angles
    zeta = np.unique(np.round((r[:, None] * np.exp(1j * a[None, :])).ravel(), 15))
    if not np.all(isotopy.domain.contains(_disc_points(last, zeta))):
        raise BoundaryEscape("the final disc is not contained in the domain", float(isotopy.taus[-1]))
    pts, taus, zs, rad, reps = [], [], [], [], []
    for t in isotopy.taus:
        rep = continuity_sigma(isotopy, t, seed=seed)
        reps.append(rep)
        if rep.sigma <= 0:
            continue
        pts.append(_disc_points(isotopy.disc(t), zeta))
        taus.append(np.full(zeta.size, t))
        zs.append(zeta)
        rad.append(np.full(zeta.size, rep.sigma / safety))
    n = last.n
    if not pts:
        empty = np.zeros(0)
        return CoverageCloud(np.zeros((n, 0), complex), empty, empty.astype(complex), empty, reps)
    return CoverageCloud(np.concatenate(pts, axis=1), np.concatenate(taus), np.concatenate(zs), np.concatenate(rad), reps)


def shrinking_hartogs_isotopy(eps: float = 0.2, disc_radius: float = 0.9, start: float = 0.85, steps: int = 21, N: int = 64) -> DiscIsotopy:
    """Vertical discs ``zeta -> (a(tau), disc_radius * zeta)`` in the Hartogs shell.

    ``a`` moves linearly from ``0`` at ``tau = 0`` to ``start`` at
    ``tau = 1``, where the whole disc lies in the shell.
    """
    from .circle_ops import CircleGrid

    grid = CircleGrid(N)

    def disc(tau):
        a = start * tau
        boundary = np.stack([np.full(N, a, complex), disc_radius * grid.zeta])

        def ev(z, a=a):
            z = np.asarray(z, complex)
            return np.stack([np.full(z.shape, a, complex), disc_radius * z])

        return AnalyticDisc(grid, boundary, ev)

    return DiscIsotopy(disc, hartogs_shell(eps), np.linspace(0.0, 1.0, steps))


@dataclass(frozen=True)
class MaximallyRealSlice:
    """Graph ``x -> x + i ell(x)`` over ``R^n`` with its Jacobian ``dell``."""

    n: int
    ell: Callable
    dell: Callable

    @classmethod
    def linear(cls, A) -> "MaximallyRealSlice":
        A = np.asarray(A, float)
        return cls(A.shape[0], lambda x: np.tensordot(A, x, axes=1), lambda x: np.broadcast_to(A.reshape(A.shape + (1,) * (x.ndim - 1)), A.shape + x.shape[1:]))

    def point(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        return x + 1j * self.ell(x)

    def tilt(self, x) -> float:
        D = np.moveaxis(np.asarray(self.dell(np.asarray(x, float))), (0, 1), (-2, -1))
        return float(np.max(np.linalg.norm(D, ord=2, axis=(-2, -1))))


def _quadrature(L: MaximallyRealSlice, f: Callable, zhat, tau: float, center, half_width: float, pitch: float, kernel: Callable):
    n = L.n
    m = int(np.ceil(2 * half_width / pitch)) + 1
    axes = [np.linspace(c - half_width, c + half_width, m) for c in center]
    h = axes[0][1] - axes[0][0]
    X = np.stack(np.meshgrid(*axes, indexing="ij")).reshape(n, -1)
    z = L.point(X)
    D = np.moveaxis(np.asarray(L.dell(X)), (0, 1), (-2, -1))
    jac = np.linalg.det(np.eye(n) + 1j * D)
    w = np.ones(m)
    w[0] = w[-1] = 0.5
    W = functools.reduce(np.multiply.outer, [w] * n).ravel()
    vals = kernel(z) * np.asarray(f(z)) * jac * W
    return (tau / np.pi) ** (n / 2) * h ** n * vals.sum(axis=-1)


def gauss_approximation(f: Callable, L: MaximallyRealSlice, zhat, tau: float, window: float = 8.0, support: Optional[float] = None, rtol: float = 1e-10, max_refine: int = 4) -> complex:
    """Gauss-kernel average of ``f`` over the slice near ``zhat``.

    The integral runs over the part of the slice whose real parts lie in
    a cube of half-width ``window / sqrt(tau)`` around ``Re zhat``
    (clipped to ``support`` when ``f`` is compactly supported).  The
    trapezoid pitch starts at ``(2 tau)^(-1/2) / 4`` and is halved until
    two successive values agree to ``rtol``.
    """
    if tau <= 0:
        raise ParameterOutOfRange("tau must be positive")
    zhat = np.asarray(zhat, complex).reshape(L.n, 1)
    half = window / np.sqrt(tau)
    center = zhat.real.ravel()
    if support is not None:
        half = min(half, support)
        center = np.zeros(L.n)

    def kernel(z):
        return np.exp(-tau * np.sum((z - zhat) ** 2, axis=0))

    pitch = (2 * tau) ** -0.5 / 4
    prev = _quadrature(L, f, zhat, tau, center, half, pitch, kernel)
    for _ in range(max_refine):
        pitch /= 2
        cur = _quadrature(L, f, zhat, tau, center, half, pitch, kernel)
        change = abs(cur - prev)
        if change <= rtol * max(1.0, abs(cur)):
            return complex(cur)
        prev = cur
    raise NonConvergence(f"Gauss quadrature did not settle at tau={tau} (last change {change:.3g})")


@dataclass(frozen=True)
class TruncatedPolynomial:
    """Polynomial in ``n`` complex variables stored as a dense coefficient array.

    ``coeffs[k1, ..., kn]`` multiplies ``z1^k1 ... zn^kn``.
    """

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        idx = np.argwhere(np.abs(self.coeffs) > 1e-14 * max(1.0, np.abs(self.coeffs).max()))
        return int(idx.sum(axis=1).max()) if idx.size else 0

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, complex)
        out = self.coeffs
        for j in range(self.coeffs.ndim - 1, -1, -1):
            # Horner in the last remaining variable
            acc = np.zeros(out.shape[:-1] + z.shape[1:], complex)
            for k in range(out.shape[-1] - 1, -1, -1):
                acc = acc * z[j] + out[..., k].reshape(out.shape[:-1] + (1,) * (z.ndim - 1))
            out = acc
        return out


def polynomial_sequence(f: Callable, L: MaximallyRealSlice, nu: int, tau: float, support: float, pitch: Optional[float] = None) -> TruncatedPolynomial:
    """Termwise truncation of the Gauss integral to order ``nu`` of the exponential.

    ``f`` must vanish outside the cube of half-width ``support``.  The
    result is a polynomial of degree ``2 nu``; its coefficients are read
    off by the FFT of its values on a polycircle.
    """
    if nu < 0:
        raise ParameterOutOfRange("nu must be nonnegative")
    n = L.n
    K = 1
    while K < 2 * nu + 1:
        K *= 2
    roots = np.exp(2j * np.pi * np.arange(K) / K)
    grids = np.stack(np.meshgrid(*([roots] * n), indexing="ij")).reshape(n, -1)
    pitch = pitch if pitch is not None else min((2 * tau) ** -0.5 / 4, support / 32)
    fact = np.array([math.factorial(k) for k in range(nu + 1)], float)
    vals = np.empty(grids.shape[1], complex)
    for m in range(grids.shape[1]):
        zh = grids[:, m : m + 1]

        def kernel(z, zh=zh):
            s = -tau * np.sum((z - zh) ** 2, axis=0)
            return np.polynomial.polynomial.polyval(s, 1.0 / fact)

        vals[m] = _quadrature(L, f, zh, tau, np.zeros(n), support, pitch, kernel)
    coeffs = np.fft.fftn(vals.reshape((K,) * n)) / K ** n
    deg = np.indices(coeffs.shape).sum(axis=0)
    coeffs = np.where(deg <= 2 * nu, coeffs, 0.0)
    return TruncatedPolynomial(coeffs)

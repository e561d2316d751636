"""Numerical Riemann maps through the Szegő kernel.

The Szegő kernel ``S(., a)`` of a smooth Jordan domain solves the
Kerzman-Stein second kind equation on the boundary; the boundary
values of the Riemann map normalized at ``a`` are
``-i T(w) S(w, a) / conj(S(w, a))`` with ``T`` the unit tangent.

The equation is discretized by Nyström's method with Gauss-Legendre
panels graded towards the points where the boundary is only finitely
smooth.  The Nyström interpolant provides the kernel at arbitrary
boundary points, which is what the boundary correspondence inversion
needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from math import factorial
from scipy.special import binom

from .errors import NonConvergence

__all__ = ["CurvePiece", "BoundaryCurve", "SzegoMap", "mobius_three_points", "apply_mobius", "half_disc_curve", "bridge_polynomial"]


@dataclass(frozen=True)
class CurvePiece:
    """One smooth arc ``t -> z(t)``, ``t in [t0, t1]``.

    ``grade_start`` / ``grade_end`` request dyadic panel refinement at
    that end (for junctions with limited smoothness).
    """

    t0: float
    t1: float
    z: Callable
    dz: Callable
    grade_start: bool = False
    grade_end: bool = False


class BoundaryCurve:
    """Closed, positively oriented curve made of consecutive pieces.

    The global parameter runs over ``[0, length)``; piece ``k`` occupies
    an interval of the same length as its own parameter range.
    """

    def __init__(self, pieces: Sequence[CurvePiece]):
        self.pieces = list(pieces)
        spans = [p.t1 - p.t0 for p in self.pieces]
        self.offsets = np.concatenate([[0.0], np.cumsum(spans)])
        self.period = float(self.offsets[-1])

    def _locate(self, t):
        t = np.mod(np.asarray(t, dtype=float), self.period)
        idx = np.clip(np.searchsorted(self.offsets, t, side="right") - 1, 0, len(self.pieces) - 1)
        return t, idx

    def z(self, t) -> np.ndarray:
        t, idx = self._locate(t)
        out = np.empty(t.shape, complex)
        for k, p in enumerate(self.pieces):
            m = idx == k
            if np.any(m):
                out[m] = p.z(p.t0 + t[m] - self.offsets[k])
        return out

    def dz(self, t) -> np.ndarray:
        t, idx = self._locate(t)
        out = np.empty(t.shape, complex)
        for k, p in enumerate(self.pieces):
            m = idx == k
            if np.any(m):
                out[m] = p.dz(p.t0 + t[m] - self.offsets[k])
        return out

    def panels(self, per_piece: int = 8, levels: int = 8, order: int = 16):
        """Gauss-Legendre nodes and weights in the global parameter."""
        gx, gw = np.polynomial.legendre.leggauss(order)
        nodes, weights = [], []
        for k, p in enumerate(self.pieces):
            a0 = self.offsets[k]
            span = p.t1 - p.t0
            brk = list(np.linspace(0.0, 1.0, per_piece + 1))
            h = 1.0 / per_piece
            if p.grade_start:
                brk += [h * 0.5**j for j in range(1, levels + 1)]
            if p.grade_end:
                brk += [1.0 - h * 0.5**j for j in range(1, levels + 1)]
            brk = np.unique(np.array(brk))
            for lo, hi in zip(brk[:-1], brk[1:]):
                mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
                nodes.append(a0 + span * (mid + half * gx))
                weights.append(span * half * gw)
        return np.concatenate(nodes), np.concatenate(weights)


def _cauchy_H(w, z, Tz):
    """``H(w, z) = T(z) / (2 pi i (z - w))`` on a broadcast grid."""
    return Tz / (2j * np.pi * (z - w))


class SzegoMap:
    """Riemann map of the interior of ``curve`` onto the unit disc with ``f(a) = 0``, ``f'(a) > 0``."""

    def __init__(self, curve: BoundaryCurve, a: complex, per_piece: int = 8, levels: int = 8, order: int = 16):
        self.curve = curve
        self.a = complex(a)
        t, wq = curve.panels(per_piece, levels, order)
        self.t = t
        self.zn = curve.z(t)
        dz = curve.dz(t)
        self.speed = np.abs(dz)
        self.Tn = dz / self.speed
        self.wts = wq * self.speed
        A = self._kernel(self.zn, self.Tn)
        rhs = np.conj(_cauchy_H(self.a, self.zn, self.Tn))
        K = np.eye(t.size) + A * self.wts[None, :]
        self.S = np.linalg.solve(K, rhs)
        self._table_t = None

    def _kernel(self, w, Tw, cutoff: float = 1e-12):
        """Skew-hermitian kernel ``conj(H(z_j, w)) - H(w, z_j)`` against the nodes.

        With this sign the kernel enters as ``S + A S = conj(H(a, .))``.
        """
        W = w[:, None]
        Z = self.zn[None, :]
        diff = Z - W
        close = np.abs(diff) < cutoff
        diff = np.where(close, 1.0, diff)
        H1 = self.Tn[None, :] / (2j * np.pi * diff)
        H2 = Tw[:, None] / (2j * np.pi * (-diff))
        A = np.conj(H2) - H1
        return np.where(close, 0.0, A)

    def szego(self, t, chunk: int = 512) -> np.ndarray:
        """Szegő kernel ``S(z(t), a)`` from the Nyström interpolant."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty(t.shape, complex)
        for s in range(0, t.size, chunk):
            tt = t[s : s + chunk]
            w = self.curve.z(tt)
            dz = self.curve.dz(tt)
            Tw = dz / np.abs(dz)
            A = self._kernel(w, Tw, cutoff=1e-9)
            out[s : s + chunk] = np.conj(_cauchy_H(self.a, w, Tw)) - A @ (self.S * self.wts)
        return out

    def boundary_value(self, t) -> np.ndarray:
        """``f(z(t))`` on the unit circle."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        S = self.szego(t)
        dz = self.curve.dz(t)
        T = dz / np.abs(dz)
        F = -1j * T * S / np.conj(S)
        return F / np.abs(F)

    def derivative_at_center(self) -> float:
        """``f'(a) = 2 pi S(a, a)`` by the Cauchy-type reproducing formula."""
        Sa = np.sum(self.S * np.conj(self.S) * self.wts)  # ||S_a||^2 = S(a, a)
        return float(2 * np.pi * Sa.real)

    def _table(self):
        if self._table_t is None:
            tt = np.linspace(0.0, self.curve.period, 4097)[:-1]
            tt = np.unique(np.concatenate([tt, np.mod(self.t, self.curve.period)]))
            ang = np.unwrap(np.angle(self.boundary_value(tt)))
            if np.any(np.diff(ang) <= 0):
                raise NonConvergence("boundary correspondence is not monotone; refine the panels")
            self._table_t = tt
            self._table_ang = ang
        return self._table_t, self._table_ang

    def angle(self, t, reference=None) -> np.ndarray:
        """Continuous argument of ``f(z(t))``; lifted near ``reference`` when given."""
        t = np.atleast_1d(np.asarray(t, float))
        F = self.boundary_value(t)
        if reference is None:
            tt, ang = self._table()
            P = self.curve.period
            base = np.interp(np.mod(t, P), np.append(tt, P), np.append(ang, ang[0] + 2 * np.pi))
            reference = base + 2 * np.pi * np.floor(t / P)
        return reference + np.angle(F * np.exp(-1j * reference))

    def invert(self, target_angle, tol: float = 1e-14, max_iter: int = 30) -> np.ndarray:
        """Parameters ``t`` with continuous angle equal to ``target_angle``.

        ``target_angle`` must be lifted consistently with :meth:`angle`
        (values in ``[angle(0), angle(0) + 2 pi)`` map into ``[0, period)``).
        """
        tt, ang = self._table()
        P = self.curve.period
        target = np.asarray(target_angle, float)
        xs = np.append(tt, P)
        ys = np.append(ang, ang[0] + 2 * np.pi)
        t = np.interp(target, ys, xs)
        slope_tab = np.gradient(ys, xs)
        prev = np.inf
        for _ in range(max_iter):
            g = self.angle(t, reference=target) - target
            step = g / np.interp(np.mod(t, P), xs, slope_tab)
            t = t - step
            size = float(np.max(np.abs(step)))
            if size < tol * P or size >= prev:
                break
            prev = size
        if np.max(np.abs(self.angle(t, reference=target) - target)) > 1e-11:
            raise NonConvergence("boundary correspondence inversion did not converge")
        return t


def mobius_three_points(src: Sequence[complex], dst: Sequence[complex]) -> np.ndarray:
    """2x2 matrix of the Möbius map sending ``src[k] -> dst[k]``."""

    def to_std(p, q, r):
        # (z - p)(q - r) / ((z - r)(q - p)) sends p, q, r to 0, 1, inf
        return np.array([[q - r, -p * (q - r)], [q - p, -r * (q - p)]], dtype=complex)

    M1 = to_std(*src)
    M2 = to_std(*dst)
    return np.linalg.solve(M2, M1)


def apply_mobius(M: np.ndarray, z) -> np.ndarray:
    z = np.asarray(z, complex)
    return (M[0, 0] * z + M[0, 1]) / (M[1, 0] * z + M[1, 1])


def bridge_polynomial(s0: float, s1: float, left: Sequence[float], right: Sequence[float]):
    """Hermite polynomial on ``[s0, s1]`` matching value and derivatives at both ends.

    Returned as ``(poly, s0)`` with ``poly`` in the shifted variable ``s - s0``.
    """
    m = len(left)
    deg = 2 * m - 1
    rows, rhs = [], []
    for s, vals in ((s0, left), (s1, right)):
        for k in range(m):
            row = []
            for j in range(deg + 1):
                if j < k:
                    row.append(0.0)
                else:
                    coef = np.prod(np.arange(j - k + 1, j + 1)) if k else 1.0
                    row.append(coef * (s - s0) ** (j - k))
            rows.append(row)
            rhs.append(vals[k])
    c = np.linalg.solve(np.array(rows), np.array(rhs))
    return np.poly1d(c[::-1]), s0


def _cap_jet(order: int) -> list:
    """Derivatives ``0..order-1`` of ``sqrt 3 - sqrt(4 - s^2)`` at ``s = sqrt 3``."""
    r3 = np.sqrt(3.0)
    u = np.array([0.0, -2 * r3, -1.0])  # 4 - (sqrt3 + e)^2 = 1 + u(e)
    series = np.zeros(order)
    term = np.array([1.0])
    for k in range(order):
        t = term[:order]
        series[: t.size] += binom(0.5, k) * t
        term = np.polynomial.polynomial.polymul(term, u)[:order]
    jet = -series
    jet[0] += r3
    return [jet[k] * factorial(k) for k in range(order)]


def half_disc_curve(bridge_order: int = 5, grading: bool = True) -> tuple:
    """Boundary of the smoothed domain: real segment, two bridges and a circular cap.

    The bridges are Hermite polynomials matching ``bridge_order``
    derivatives (value included) of the segment and of the cap, so the
    boundary is ``C^{bridge_order - 1}``.

    Returns ``(curve, profile)`` where ``profile(s)`` is the lower
    boundary height over ``|s| <= sqrt 3``.
    """
    r3 = np.sqrt(3.0)
    poly, s0 = bridge_polynomial(1.0, r3, [0.0] * bridge_order, _cap_jet(bridge_order))
    dpoly = poly.deriv()

    def mu(s):
        return poly(s - s0)

    def dmu(s):
        return dpoly(s - s0)

    g = grading
    pieces = [
        CurvePiece(0.0, 1.0, lambda x: x + 0j, lambda x: np.ones_like(x) + 0j, False, g),
        CurvePiece(1.0, r3, lambda x: x + 1j * mu(x), lambda x: 1.0 + 1j * dmu(x), g, g),
        CurvePiece(
            -np.pi / 6,
            7 * np.pi / 6,
            lambda a: 1j * r3 + 2 * np.exp(1j * a),
            lambda a: 2j * np.exp(1j * a),
            g,
            g,
        ),
        CurvePiece(-r3, -1.0, lambda x: x + 1j * mu(-x), lambda x: 1.0 - 1j * dmu(-x), g, g),
        CurvePiece(-1.0, 0.0, lambda x: x + 0j, lambda x: np.ones_like(x) + 0j, g, False),
    ]

    def profile(s):
        s = np.abs(np.asarray(s, float))
        return np.where(s <= 1.0, 0.0, mu(np.clip(s, 1.0, r3)))

    return BoundaryCurve(pieces), profile

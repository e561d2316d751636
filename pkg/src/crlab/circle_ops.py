"""Spectral primitives on the unit circle.

Functions on the circle are stored as samples on a uniform grid of
``N`` angles (``N`` a power of two).  Vector valued functions carry a
leading component axis, so ``values`` has shape ``(n, N)``.

The normalized harmonic conjugate ``T1`` is computed with the FFT:
the conjugate function multiplies the k-th Fourier mode by
``-1j * sign(k)`` and the result is shifted so that it vanishes at
``theta = 0``.

Examples
--------
>>> import numpy as np
>>> g = CircleGrid(64)
>>> f = CircleFn.from_callable(g, np.cos)
>>> bool(np.allclose(hilbert_T1(f).values[0], np.sin(g.theta)))
True
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridMismatch, InsufficientResolution, NotHolomorphic

__all__ = [
    "CircleGrid",
    "CircleFn",
    "HolderNorm",
    "conjugate",
    "hilbert_T1",
    "dtheta",
    "holomorphic_extension",
    "negative_frequency_ratio",
    "holder_norm",
    "holder_norm_cube",
    "random_band_limited",
    "trig_interpolate",
]


@dataclass(frozen=True)
class CircleGrid:
    """Uniform grid ``theta_j = 2 pi j / N`` on the unit circle."""

    N: int = 512

    def __post_init__(self):
        N = int(self.N)
        if N < 8 or N & (N - 1):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.N) / self.N

    @property
    def zeta(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.fft.fftfreq(self.N, d=1.0 / self.N)


@dataclass(frozen=True)
class CircleFn:
    """Sampled (possibly vector valued) function on a :class:`CircleGrid`."""

    grid: CircleGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[1] != self.grid.N:
            raise GridMismatch(f"values of shape {v.shape} do not match grid N={self.grid.N}")
        if not np.all(np.isfinite(v)):
            raise ValueError("CircleFn values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: CircleGrid, func: Callable) -> "CircleFn":
        return cls(grid, np.asarray(func(grid.theta)))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def at_one(self) -> np.ndarray:
        """Value at ``zeta = 1`` (``theta = 0``)."""
        return self.values[:, 0]

    def __add__(self, other):
        if isinstance(other, CircleFn):
            _check_same_grid(self, other)
            return CircleFn(self.grid, self.values + other.values)
        return CircleFn(self.grid, self.values + np.asarray(other).reshape(-1, 1))

    def __sub__(self, other):
        if isinstance(other, CircleFn):
            _check_same_grid(self, other)
            return CircleFn(self.grid, self.values - other.values)
        return CircleFn(self.grid, self.values - np.asarray(other).reshape(-1, 1))

    def __mul__(self, scalar):
        return CircleFn(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return CircleFn(self.grid, -self.values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass(frozen=True)
class HolderNorm:
    k: int
    alpha: float
    value: float
    sup_part: float
    seminorm: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


def _check_same_grid(a: CircleFn, b: CircleFn) -> None:
    if a.grid.N != b.grid.N:
        raise GridMismatch(f"grid sizes differ: {a.grid.N} vs {b.grid.N}")


def _conj_multiplier(N: int) -> np.ndarray:
    k = np.fft.fftfreq(N, d=1.0 / N)
    m = -1j * np.sign(k)
    m[N // 2] = 0.0  # Nyquist mode has no well defined conjugate
    return m


def conjugate(f: CircleFn) -> CircleFn:
    """Conjugate function ``T f`` (no normalization at ``zeta = 1``)."""
    if not f.is_real:
        raise TypeError("conjugate expects real samples")
    F = np.fft.fft(f.values, axis=-1)
    out = np.fft.ifft(F * _conj_multiplier(f.grid.N), axis=-1).real
    return CircleFn(f.grid, out)


def hilbert_T1(f: CircleFn) -> CircleFn:
    """Harmonic conjugate normalized to vanish at ``zeta = 1``.

    ``x + i T1 x`` is the boundary value of a holomorphic function and
    ``T1(T1 x) = -x + x(1)`` for band limited ``x``.
    """
    Tf = conjugate(f)
    return CircleFn(f.grid, Tf.values - Tf.values[:, :1])


def dtheta(f: CircleFn, order: int = 1) -> CircleFn:
    """Spectral derivative in ``theta`` (real or complex samples)."""
    N = f.grid.N
    k = f.grid.wavenumbers
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[N // 2] = 0.0
    F = np.fft.fft(f.values, axis=-1)
    out = np.fft.ifft(F * mult, axis=-1)
    return CircleFn(f.grid, out.real if f.is_real else out)


def trig_interpolate(f: CircleFn, theta: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``f`` at arbitrary angles."""
    N = f.grid.N
    F = np.fft.fft(f.values, axis=-1) / N
    k = f.grid.wavenumbers.copy()
    F[:, N // 2] *= 0.5
    th = np.asarray(theta, dtype=float)
    phase = np.exp(1j * np.multiply.outer(th, k))
    nyq = np.exp(-1j * N / 2 * th)
    out = phase @ F.T + np.multiply.outer(nyq, F[:, N // 2])
    out = np.moveaxis(out, -1, 0)
    return out.real if f.is_real else out


def negative_frequency_ratio(values: np.ndarray) -> float:
    """Relative l2 energy of the strictly negative Fourier modes.

    The Nyquist mode is split evenly between both signs.
    """
    v = np.atleast_2d(np.asarray(values, dtype=complex))
    N = v.shape[-1]
    F = np.fft.fft(v, axis=-1) / N
    k = np.fft.fftfreq(N, d=1.0 / N)
    neg = np.sum(np.abs(F[:, k < 0]) ** 2) - 0.5 * np.sum(np.abs(F[:, N // 2]) ** 2)
    tot = np.sum(np.abs(F) ** 2)
    if tot == 0.0:
        return 0.0
    return float(np.sqrt(max(neg, 0.0) / tot))


def holomorphic_extension(x: CircleFn, y: CircleFn, zeta, tol: float = 1e-8) -> np.ndarray:
    """Evaluate the holomorphic disc with boundary values ``x + i y``.

    Returns an array of shape ``(n,) + shape(zeta)``.  Raises
    :class:`NotHolomorphic` when the boundary data carry more than
    ``tol`` relative energy in negative frequencies.

    >>> g = CircleGrid(32)
    >>> x = CircleFn.from_callable(g, np.cos)
    >>> y = hilbert_T1(x)
    >>> complex(holomorphic_extension(x, y, 0.5)[0]).real
    0.5
    """
    _check_same_grid(x, y)
    w = np.asarray(x.values, dtype=complex) + 1j * np.asarray(y.values)
    return holomorphic_extension_values(w, zeta, tol=tol)


def holomorphic_extension_values(w: np.ndarray, zeta, tol: float = 1e-8) -> np.ndarray:
    """Same as :func:`holomorphic_extension` for complex samples ``w``."""
    w = np.atleast_2d(np.asarray(w, dtype=complex))
    ratio = negative_frequency_ratio(w)
    if ratio > tol:
        raise NotHolomorphic(f"negative-frequency energy ratio {ratio:.3e} exceeds {tol:.1e}")
    N = w.shape[-1]
    coeffs = np.fft.fft(w, axis=-1)[:, : N // 2] / N
    return eval_power_series(coeffs, zeta)


def eval_power_series(coeffs: np.ndarray, zeta) -> np.ndarray:
    """Evaluate ``sum_k c_k zeta^k`` for each row of ``coeffs`` (Horner)."""
    z = np.asarray(zeta, dtype=complex)
    coeffs = np.atleast_2d(coeffs)
    out = np.zeros((coeffs.shape[0],) + z.shape, dtype=complex)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        out = out * z + coeffs[:, k].reshape((-1,) + (1,) * z.ndim)
    return out


def random_band_limited(grid: CircleGrid, n: int, kmax: int, rng: np.random.Generator) -> CircleFn:
    """Random real trigonometric polynomial of degree ``kmax`` per component."""
    th = grid.theta
    k = np.arange(1, kmax + 1)
    a = rng.standard_normal((n, kmax)) / k
    b = rng.standard_normal((n, kmax)) / k
    c0 = rng.standard_normal((n, 1))
    vals = c0 + a @ np.cos(np.outer(k, th)) + b @ np.sin(np.outer(k, th))
    return CircleFn(grid, vals)


def _pair_seminorm(vals: np.ndarray, pts: np.ndarray, alpha: float, dist, max_pairs_points: int = 1024) -> float:
    """Largest ``|v(p) - v(q)| / d(p, q)^alpha`` over sampled pairs.

    ``vals`` has shape ``(m, M)`` (components, points); the vector norm
    is the max over components.  For more than ``max_pairs_points``
    points a deterministic stride subsample is used.
    """
    M = vals.shape[1]
    if M > max_pairs_points:
        idx = np.linspace(0, M - 1, max_pairs_points).round().astype(int)
        vals, pts = vals[:, idx], pts[idx]
        M = len(idx)
    best = 0.0
    for i in range(M - 1):
        d = dist(pts[i], pts[i + 1 :])
        num = np.max(np.abs(vals[:, i : i + 1] - vals[:, i + 1 :]), axis=0)
        ok = d > 0
        if np.any(ok):
            best = max(best, float(np.max(num[ok] / d[ok] ** alpha)))
    return best


def holder_norm(f: CircleFn, k: int, alpha: float = 0.5) -> HolderNorm:
    """Discrete ``C^{k, alpha}`` norm of a function on the circle.

    Sum of ``sup |d^j f / d theta^j|`` for ``j <= k`` plus the Holder
    seminorm of the k-th derivative over all sampled pairs, with arc
    length as the distance.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if f.grid.N < 4 * (k + 2):
        raise InsufficientResolution(f"N={f.grid.N} too small for order {k}")
    sup_part = 0.0
    deriv = f
    for j in range(k + 1):
        if j > 0:
            deriv = dtheta(deriv)
        sup_part += deriv.sup()
    th = f.grid.theta

    def arc(p, q):
        d = np.abs(q - p)
        return np.minimum(d, 2 * np.pi - d)

    semi = _pair_seminorm(np.asarray(deriv.values), th, alpha, arc)
    return HolderNorm(k, alpha, sup_part + semi, sup_part, semi)


def holder_norm_cube(values: np.ndarray, axes: list[np.ndarray], k: int, alpha: float = 0.5) -> HolderNorm:
    """Discrete ``C^{k, alpha}`` norm of a gridded map on a cube.

    ``values`` has shape ``(m,) + grid_shape`` (m components) or just
    ``grid_shape``; ``axes`` lists the 1-d coordinate arrays.  Partial
    derivatives come from second order finite differences; every
    partial of order ``j <= k`` contributes its sup (max over
    components), and the order ``k`` partials contribute their Holder
    seminorms, with the max-norm on the cube as distance.

    >>> x = np.linspace(-1, 1, 41)
    >>> round(holder_norm_cube(x**2, [x], 2).value, 10)
    5.0
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    d = len(axes)
    v = np.asarray(values, dtype=float)
    if v.ndim == d:
        v = v[None]
    if any(len(a) < k + 3 for a in axes):
        raise InsufficientResolution("need at least k+3 samples per axis")
    current = {(): v}
    sup_part = float(np.max(np.abs(v)))
    for _order in range(k):
        nxt = {}
        for key, arr in current.items():
            for ax in range(d):
                g = np.gradient(arr, axes[ax], axis=ax + 1, edge_order=2)
                nxt[key + (ax,)] = g
        current = nxt
        sup_part += sum(float(np.max(np.abs(a))) for a in current.values())
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)

    def maxdist(p, q):
        return np.max(np.abs(q - p), axis=-1)

    semi = 0.0
    for arr in current.values():
        flat = arr.reshape(arr.shape[0], -1)
        semi += _pair_seminorm(flat, mesh, alpha, maxdist)
    return HolderNorm(k, alpha, sup_part + semi, sup_part, semi)

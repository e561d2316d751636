"""Numerical verification of a nonremovable torus in a type-4 generic submanifold of C^3.

The compact set is the standard torus ``T2 = {rho_T = 0}`` in ``R^3``
with ``rho_T(x) = (|x|^2 + 3)^2 - 16 (x1^2 + x2^2)``.  A smooth direct
orthonormal frame ``(L, K1, K2)`` on ``R^3`` with ``L`` normal to T2
along T2 is fixed explicitly (see :func:`build_reeb_frame`).  The
submanifold ``M_P`` of ``C^3 = R^3 + i R^3`` is cut out by

    rho_P = sum_j y_j K1_j(x) + P |y|^2,
    r_P   = sum_j y_j K2_j(x) + P^3 sum_j y_j^4,

and the checks below work on the complex tangent field ``LL`` of
``M_P`` and its iterated brackets with its conjugate, all restricted
to ``y = 0``.  Derivatives are exact (forward-mode automatic
differentiation in double precision).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import partial
from typing import Optional

import numpy as np

import jax

jax.config.update("jax_enable_x64", True)
import jax.numpy as jnp  # noqa: E402

from .errors import ParameterOutOfRange, SingularConfiguration  # noqa: E402

__all__ = [
    "enable_compile_cache",
    "torus_defining",
    "torus_points",
    "ReebFrame",
    "build_reeb_frame",
    "TorusModel",
    "build_MP",
    "cr_field_coeffs",
    "BracketReport",
    "bracket_rank_report",
    "cubic_leading_coefficient",
    "cubic_variant_determinant",
    "ball_samples",
    "find_min_P",
    "transversality_check",
    "verify_frame",
    "frame_jets",
    "frame_relations",
    "MinPReport",
]


def enable_compile_cache(path: Optional[str] = None) -> str:
    """Turn on jax's persistent compilation cache (the bracket kernels take tens of seconds to compile)."""
    import os

    path = path or os.path.join(os.path.expanduser("~"), ".cache", "crlab-jax")
    os.makedirs(path, exist_ok=True)
    jax.config.update("jax_compilation_cache_dir", path)
    jax.config.update("jax_persistent_cache_min_compile_time_secs", 1.0)
    return path


def torus_defining(x):
    x = jnp.asarray(x)
    s = x[0] ** 2 + x[1] ** 2
    return (s + x[2] ** 2 + 3.0) ** 2 - 16.0 * s


def torus_points(n_theta: int = 128, n_phi: int = 64) -> np.ndarray:
    """Parametric grid on T2, shape ``(3, n_theta * n_phi)``; ``theta`` is the meridian angle."""
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    ph = 2 * np.pi * np.arange(n_phi) / n_phi
    T, F = np.meshgrid(th, ph, indexing="ij")
    R = 2 + np.cos(T)
    return np.stack([R * np.cos(F), R * np.sin(F), np.sin(T)]).reshape(3, -1)


def _flat(t):
    pos = t > 0
    return jnp.where(pos, jnp.exp(-1.0 / jnp.where(pos, t, 1.0)), 0.0)


def _step(t):
    """Smooth 0 -> 1 transition on [0, 1], flat at both ends."""
    a, b = _flat(t), _flat(1.0 - t)
    return a / (a + b)


def _quat_matrix(q):
    w, x, y, z = q
    return jnp.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


@dataclass(frozen=True)
class ReebFrame:
    """Smooth direct orthonormal frame ``(L, K1, K2)`` on ``R^3``.

    ``band`` gives the meridian distances ``(s0, s1, s2, s3)`` to the
    core circle of T2 between which the frame blends from the identity
    to the torus-normal frame and back.
    """

    band: tuple = (0.2, 0.6, 1.4, 1.8)

    def rotation(self, x):
        """Rotation matrix whose columns are ``(K1, K2, L)`` at ``x`` (jax-traceable)."""
        s0, s1, s2, s3 = self.band
        rho2 = x[0] ** 2 + x[1] ** 2
        rho = jnp.sqrt(jnp.where(rho2 > 1e-30, rho2, 1e-30))
        du = rho - 2.0
        s = jnp.sqrt(du * du + x[2] ** 2 + 1e-300)
        h = _step((s - s0) / (s1 - s0)) * _step((s3 - s) / (s3 - s2))
        theta = jnp.arctan2(x[2], du)
        half_b = -theta / 2 - jnp.pi / 4
        c, sn = jnp.cos(half_b), jnp.sin(half_b)
        C, S = jnp.cos(theta / 2), jnp.sin(theta / 2)
        b = jnp.array([c * C, sn * S, sn * C, c * S])
        q = (1.0 - h) * jnp.array([1.0, 0.0, 0.0, 0.0]) + h * b
        q = q / jnp.sqrt(jnp.sum(q * q))
        cp, sp = x[0] / rho, x[1] / rho
        q = jnp.array([q[0], cp * q[1] - sp * q[2], sp * q[1] + cp * q[2], q[3]])
        return _quat_matrix(q)

    def fields(self, x):
        """``(a, k1, k2)`` at a single point."""
        R = self.rotation(x)
        return R[:, 2], R[:, 0], R[:, 1]

    def evaluate(self, X) -> tuple:
        """Vectorized ``(a, k1, k2)`` at points of shape ``(3, M)``, each returned as ``(3, M)``."""
        R = _rot_batch(self, jnp.asarray(np.asarray(X, float).T))
        R = np.asarray(R)
        return R[:, :, 2].T, R[:, :, 0].T, R[:, :, 1].T


@partial(jax.jit, static_argnums=0)
def _rot_batch(frame, X):
    return jax.vmap(frame.rotation)(X)


def build_reeb_frame(band: tuple = (0.2, 0.6, 1.4, 1.8), check_samples: int = 10_000, seed: int = 0) -> ReebFrame:
    """Frame with ``L`` equal to the inward unit normal of T2 along T2.

    On the band ``s1 <= s <= s2`` around T2 (``s`` = distance to the
    core circle) the frame is the rotation carrying ``e3`` to the
    inward normal of the concentric torus through the point; towards
    the core circle and towards the ``x3``-axis it is homotoped to the
    identity through normalized straight-line interpolation of unit
    quaternions.  The invariants are verified at random points of the
    ball of radius 5.
    """
    frame = ReebFrame(tuple(band))
    if check_samples:
        rng = np.random.default_rng(seed)
        X = rng.uniform(-5, 5, size=(3, check_samples))
        rep = verify_frame(frame, X)
        if rep["max_orthonormal_defect"] > 1e-10 or rep["min_det"] < 1 - 1e-10:
            raise SingularConfiguration(f"frame degeneracy: {rep}")
    return frame


def verify_frame(frame: ReebFrame, X: np.ndarray) -> dict:
    a, k1, k2 = frame.evaluate(X)
    F = np.stack([a, k1, k2])  # (3 vectors, 3 comps, M)
    G = np.einsum("aim,bim->abm", F, F)
    defect = float(np.max(np.abs(G - np.eye(3)[:, :, None])))
    det = np.einsum("ijk,im,jm,km->m", _levi_civita(), a, k1, k2)
    T = torus_points(64, 32)
    aT, _, _ = frame.evaluate(T)
    grad = np.asarray(jax.vmap(jax.grad(torus_defining))(jnp.asarray(T.T))).T
    n = grad / np.linalg.norm(grad, axis=0)
    dots = np.abs(np.sum(aT * n, axis=0))
    return {
        "max_orthonormal_defect": defect,
        "min_det": float(det.min()),
        "max_det": float(det.max()),
        "min_normal_alignment_on_T2": float(dots.min()),
    }


def _levi_civita():
    e = np.zeros((3, 3, 3))
    e[0, 1, 2] = e[1, 2, 0] = e[2, 0, 1] = 1
    e[0, 2, 1] = e[2, 1, 0] = e[1, 0, 2] = -1
    return e


@dataclass(frozen=True)
class TorusModel:
    """The submanifold ``M_P`` attached to a frame.

    ``power`` is the exponent of the second bending term (4 for the
    model, 3 for the cubic variant).
    """

    frame: ReebFrame
    P: float
    power: int = 4

    def rho_P(self, p):
        x, y = p[:3], p[3:]
        _, k1, _ = self.frame.fields(x)
        return jnp.dot(y, k1) + self.P * jnp.sum(y * y)

    def r_P(self, p):
        x, y = p[:3], p[3:]
        _, _, k2 = self.frame.fields(x)
        return jnp.dot(y, k2) + self.P ** 3 * jnp.sum(y ** self.power)


def build_MP(frame: ReebFrame, P: float, power: int = 4) -> TorusModel:
    if P <= 0:
        raise ParameterOutOfRange("P must be positive")
    if power not in (3, 4):
        raise ParameterOutOfRange("power must be 3 or 4")
    return TorusModel(frame, float(P), int(power))


def _dz(J):
    """Holomorphic and antiholomorphic partials from a real Jacobian ``(..., 6)``."""
    return 0.5 * (J[..., :3] - 1j * J[..., 3:]), 0.5 * (J[..., :3] + 1j * J[..., 3:])


def _coeffs(model: TorusModel, p):
    dr = _dz(jax.grad(model.rho_P)(p).astype(complex))[0]
    ds = _dz(jax.grad(model.r_P)(p).astype(complex))[0]
    return 4.0 * jnp.array(
        [
            dr[2] * ds[1] - dr[1] * ds[2],
            dr[0] * ds[2] - dr[2] * ds[0],
            dr[1] * ds[0] - dr[0] * ds[1],
        ]
    )


def cr_field_coeffs(model: TorusModel, z) -> np.ndarray:
    """Coefficients ``(A1, A2, A3)`` of the (1,0) field at points ``z`` of shape ``(3, M)`` complex."""
    z = np.asarray(z, complex).reshape(3, -1)
    P = np.concatenate([z.real, z.imag]).T
    return np.asarray(_coeffs_batch(model.frame, model.power, model.P, jnp.asarray(P))).T


@partial(jax.jit, static_argnums=(0, 1))
def _coeffs_batch(frame, power, P, pts):
    model = TorusModel(frame, P, power)
    return jax.vmap(lambda p: _coeffs(model, p))(pts)


def _tangency(model: TorusModel, p):
    A = _coeffs(model, p)
    dr = _dz(jax.grad(model.rho_P)(p).astype(complex))[0]
    ds = _dz(jax.grad(model.r_P)(p).astype(complex))[0]
    scale = jnp.linalg.norm(A) * jnp.array([jnp.linalg.norm(dr), jnp.linalg.norm(ds)])
    return jnp.abs(jnp.array([jnp.dot(A, dr), jnp.dot(A, ds)])) / scale


@partial(jax.jit, static_argnums=(0, 1))
def _tangency_batch(frame, power, P, pts):
    model = TorusModel(frame, P, power)
    return jax.vmap(lambda p: _tangency(model, p))(pts)


def frame_relations(model: TorusModel, X: np.ndarray, y_scale: float = 0.0, seed: int = 0) -> dict:
    """Largest residuals of the algebraic relations between ``A`` and the frame on ``y = 0``.

    ``plucker``: ``A - a``; ``cross``: ``K1 x K2 - a``; ``orthogonality``:
    ``a.K1`` and ``a.K2``; ``identity``: ``a x K2 + K1`` (first component
    reads ``a2 r3 - a3 r2 = -rho1``); ``tangency``: ``LL rho_P`` and
    ``LL r_P`` relative to ``|A| |d_z f|``, evaluated at ``x + i y`` with
    ``|y| <= y_scale``.
    """
    X = np.asarray(X, float).reshape(3, -1)
    a, k1, k2 = model.frame.evaluate(X)
    A = cr_field_coeffs(model, X + 0j)
    Y = np.random.default_rng(seed).uniform(-y_scale, y_scale, X.shape) if y_scale else np.zeros_like(X)
    tang = np.asarray(_tangency_batch(model.frame, model.power, model.P, jnp.asarray(np.concatenate([X, Y]).T)))
    return {
        "plucker": float(np.abs(A - a).max()),
        "cross": float(np.abs(np.cross(k1, k2, axis=0) - a).max()),
        "orthogonality": float(max(np.abs(np.sum(a * k1, 0)).max(), np.abs(np.sum(a * k2, 0)).max())),
        "identity": float(np.abs(np.cross(a, k2, axis=0) + k1).max()),
        "tangency": float(np.abs(tang).max()),
        "samples": int(X.shape[1]),
    }


def _apply(Xval, f, p):
    """Derivative of the vector-valued ``f`` along the complex field value ``Xval`` (6 components)."""
    J = jax.jacfwd(f)(p)
    dz, dzb = _dz(J)
    return dz @ Xval[:3] + dzb @ Xval[3:]


def _bracket(X, Y):
    def Z(p):
        return _apply(X(p), Y, p) - _apply(Y(p), X, p)

    return Z


JET_ORDER = 4


def _frame_jet(frame: ReebFrame, x):
    """Derivatives of order ``0..JET_ORDER`` of the rotation field at ``x``."""
    out = []
    f = frame.rotation
    for _ in range(JET_ORDER + 1):
        out.append(f(x))
        f = jax.jacfwd(f)
    return out


def _taylor(jet, d):
    """Taylor polynomial of the rotation field about the jet's base point, at offset ``d``."""
    val = jet[0]
    fact = 1.0
    for k in range(1, len(jet)):
        fact *= k
        t = jet[k]
        for _ in range(k):
            t = t @ d
        val = val + t / fact
    return val


@dataclass(frozen=True)
class _JetModel:
    """``M_P`` with ``K1, K2`` replaced by their Taylor polynomials at a base point.

    Brackets of length four at ``y = 0`` only see frame derivatives up to
    order four, so the values at the base point are unchanged.
    """

    k1_jet: tuple
    k2_jet: tuple
    P: float
    power: int

    def rho_P(self, p):
        y = p[3:]
        return jnp.dot(y, _taylor(self.k1_jet, p[:3])) + self.P * jnp.sum(y * y)

    def r_P(self, p):
        y = p[3:]
        return jnp.dot(y, _taylor(self.k2_jet, p[:3])) + self.P ** 3 * jnp.sum(y ** self.power)


def _fields(model, depth: int):
    def LL(p):
        A = _coeffs(model, p)
        return jnp.concatenate([A, jnp.zeros(3, complex)])

    def LLbar(p):
        A = _coeffs(model, p)
        return jnp.concatenate([jnp.zeros(3, complex), jnp.conj(A)])

    out = [LLbar, LL]
    cur = LL
    for _ in range(depth):
        cur = _bracket(LLbar, cur)
        out.append(cur)
    return out


def _rows_at_base(jet, P, power, depth):
    model = _JetModel(tuple(j[:, 0] for j in jet), tuple(j[:, 1] for j in jet), P, power)
    fs = _fields(model, depth)
    p = jnp.zeros(6)
    return jnp.stack([fs[0](p), fs[1](p), fs[2](p), fs[-1](p)])


@partial(jax.jit, static_argnums=0)
def _jet_batch(frame, X):
    return jax.vmap(lambda x: _frame_jet(frame, x))(X)


@partial(jax.jit, static_argnums=(0, 3))
def _rows_from_jets(power, P, jets, depth):
    return jax.vmap(lambda *j: _rows_at_base(j, P, power, depth))(*jets)


_CHUNK = 256


def _pad(part: np.ndarray) -> np.ndarray:
    m = part.shape[0]
    if m < _CHUNK:
        part = np.concatenate([part, np.repeat(part[-1:], _CHUNK - m, axis=0)])
    return part


def frame_jets(frame: ReebFrame, X: np.ndarray) -> list:
    """Frame jets at points ``X`` of shape ``(M, 3)``, in fixed-size chunks (reusable across ``P``)."""
    X = np.asarray(X, float)
    return [(min(_CHUNK, X.shape[0] - k), _jet_batch(frame, jnp.asarray(_pad(X[k : k + _CHUNK])))) for k in range(0, X.shape[0], _CHUNK)]


def _rows_batch(model: TorusModel, X: np.ndarray, depth: int, jets: Optional[list] = None) -> np.ndarray:
    """Bracket rows at points ``X`` of shape ``(M, 3)``."""
    jets = frame_jets(model.frame, X) if jets is None else jets
    out = []
    for m, jet in jets:
        rows = _rows_from_jets(model.power, jnp.asarray(model.P), tuple(jet), depth)
        out.append(np.asarray(rows)[:m])
    return np.concatenate(out) if out else np.zeros((0, 4, 6), complex)


@dataclass
class BracketReport:
    """Per-point bracket data at ``y = 0``.

    ``matrix`` has shape ``(M, 4, 6)`` with rows ``LLbar, LL, [LLbar, LL]``
    and the length-four bracket, in the basis ``d/dz, d/dzbar``.
    """

    points: np.ndarray
    P: float
    a: np.ndarray
    matrix: np.ndarray
    singular_values: np.ndarray
    determinant: np.ndarray
    quartic_prediction: np.ndarray

    @property
    def A(self):
        return self.matrix[:, 1, :3]

    @property
    def C(self):
        return self.matrix[:, 2, :3]

    @property
    def F(self):
        return self.matrix[:, 3, :3]

    @property
    def G(self):
        return self.matrix[:, 3, 3:]

    @property
    def ratio(self) -> np.ndarray:
        return (self.determinant / self.quartic_prediction).real

    @property
    def relative_smallest_singular(self) -> np.ndarray:
        return self.singular_values[:, -1] / self.singular_values[:, 0]

    def rank(self, tol: float = 1e-8) -> np.ndarray:
        return np.sum(self.singular_values > tol * self.singular_values[:, :1], axis=1)


def bracket_rank_report(model: TorusModel, X, jets: Optional[list] = None) -> BracketReport:
    """Bracket matrix, singular values and determinant at points ``X`` of shape ``(3, M)``.

    ``jets`` may carry precomputed :func:`frame_jets` for the same points.
    """
    X = np.atleast_2d(np.asarray(X, float))
    if X.shape[0] != 3:
        raise ParameterOutOfRange("points must have shape (3, M)")
    Mtx = _rows_batch(model, X.T, 3, jets)
    a, _, _ = model.frame.evaluate(X)
    norm = Mtx / np.linalg.norm(Mtx, axis=2, keepdims=True)
    sv = np.linalg.svd(norm, compute_uv=False)
    det = np.linalg.det(Mtx[:, 1:, :3])
    pred = 3 * model.P ** 4 * np.sum(a ** 4, axis=0)
    return BracketReport(X, model.P, a, Mtx, sv, det, pred)


def cubic_leading_coefficient(a) -> np.ndarray:
    """``a1^3 + a2^3 + a3^3``, the coefficient that replaces the quartic in the cubic variant."""
    a = np.asarray(a, float)
    return np.sum(a ** 3, axis=0)


def cubic_variant_determinant(frame: ReebFrame, x, Ps=(1e3, 1e4, 1e5)) -> dict:
    """Determinant ``det[a; C; E]`` for the cubic variant, ``E`` the length-three bracket.

    ``leading`` is ``det / P^4`` at the largest ``P``; it approaches
    ``prediction = -1.5 i (a1^3 + a2^3 + a3^3)`` since the remaining
    terms are of order ``P^2``.
    """
    x = np.asarray(x, float).reshape(3, 1)
    dets = []
    for P in Ps:
        m = build_MP(frame, P, power=3)
        rows = _rows_batch(m, x.T, 2)[0]
        dets.append(np.linalg.det(rows[1:, :3]))
    dets = np.array(dets)
    a, _, _ = frame.evaluate(x)
    cubic = float(cubic_leading_coefficient(a)[0])
    return {
        "P": np.array(Ps, float),
        "det": dets,
        "a": a[:, 0],
        "cubic": cubic,
        "leading": complex(dets[-1] / Ps[-1] ** 4),
        "prediction": -1.5j * cubic,
    }


def ball_samples(R: float, n: int = 32) -> np.ndarray:
    """Points of the ``n^3`` box grid on ``[-R, R]^3`` lying in the closed ball of radius ``R``."""
    t = np.linspace(-R, R, n)
    X = np.stack(np.meshgrid(t, t, t, indexing="ij")).reshape(3, -1)
    return X[:, np.sum(X ** 2, axis=0) <= R * R + 1e-12]


@dataclass
class MinPReport:
    """Outcome of the doubling search.

    ``P_rank`` is the first ``P`` with rank four at every sample;
    ``P_star`` the first with the quartic term dominating everywhere
    (``det / 3P^4 sum a^4`` within ``[1 - band, 1 + band]``), which
    certifies rank four by the leading-order argument.
    """

    R: float
    P_star: Optional[float]
    P_rank: Optional[float] = None
    history: list = field(default_factory=list)
    min_relative_singular: float = float("nan")
    ratio_range: tuple = (float("nan"), float("nan"))
    min_abs_det: float = float("nan")
    samples: int = 0

    def as_dict(self) -> dict:
        return {
            "R": self.R,
            "P_star": self.P_star,
            "P_rank": self.P_rank,
            "samples": self.samples,
            "min_relative_singular": self.min_relative_singular,
            "ratio_min": self.ratio_range[0],
            "ratio_max": self.ratio_range[1],
            "min_abs_det": self.min_abs_det,
            "history": [list(h) for h in self.history],
        }


def find_min_P(frame: ReebFrame, R: float, n: int = 32, P0: float = 1.0, budget: int = 30, tol: float = 1e-8, band: float = 0.5, coarse: Optional[int] = 16) -> MinPReport:
    """Double ``P`` from ``P0`` until rank four is certified at every sample.

    Rank is read from the relative smallest singular value of the
    row-normalized 4 x 6 matrix (threshold ``tol``).  The search runs on
    the ``coarse`` grid and each candidate is confirmed on the full
    ``n``-grid before it is accepted.  An exhausted budget is reported
    with ``P_star = None`` and a warning.
    """
    fine = ball_samples(R, n)
    grids = [fine] if coarse is None or coarse >= n else [ball_samples(R, coarse), fine]
    jets = [frame_jets(frame, g.T) for g in grids]
    rep = MinPReport(R, None, samples=fine.shape[1])
    level = 0
    P = P0
    for _ in range(budget):
        br = bracket_rank_report(build_MP(frame, P), grids[level], jets[level])
        rel = br.relative_smallest_singular
        ratio = br.ratio
        ranked = bool(np.all(br.rank(tol) == 4))
        dominant = bool(np.all(np.abs(ratio - 1) <= band))
        rep.history.append((P, grids[level].shape[1], float(rel.min()), float(ratio.min()), float(ratio.max()), ranked, dominant))
        if ranked and rep.P_rank is None and level == len(grids) - 1:
            rep.P_rank = P
        if ranked and dominant:
            if level < len(grids) - 1:
                level += 1
                continue
            rep.P_star = P
            rep.min_relative_singular = float(rel.min())
            rep.ratio_range = (float(ratio.min()), float(ratio.max()))
            rep.min_abs_det = float(np.abs(br.determinant).min())
            return rep
        P *= 2
    warnings.warn(f"rank four not certified after {budget} doublings", RuntimeWarning)
    return rep


def transversality_check(model: TorusModel, T: Optional[np.ndarray] = None) -> dict:
    """Dimension of ``T_x Sigma + T_x M_P`` along T2 via the four real conormals.

    ``Sigma`` is the complexification of T2; the sum is all of ``C^3``
    exactly when the two real conormals of each are independent.  The
    reported angle is the smallest singular value of the stacked unit
    conormals (a lower bound for the smallest principal angle).
    """
    T = torus_points() if T is None else T
    P = jnp.asarray(np.concatenate([T, np.zeros_like(T)]).T)
    g_rho = np.asarray(jax.vmap(jax.grad(model.rho_P))(P))
    g_r = np.asarray(jax.vmap(jax.grad(model.r_P))(P))
    gT = np.asarray(jax.vmap(jax.grad(torus_defining))(jnp.asarray(T.T)))
    # Re and Im of the complexified rho_T at a real point: conormals (grad, 0) and (0, grad)
    z = np.zeros_like(gT)
    N = np.stack([np.concatenate([gT, z], 1), np.concatenate([z, gT], 1), g_rho, g_r], axis=1)
    N = N / np.linalg.norm(N, axis=2, keepdims=True)
    sv = np.linalg.svd(N, compute_uv=False)
    dims = 2 + np.sum(sv > 1e-10, axis=1)  # 6 - dim of the conormal intersection
    return {"min_dimension": int(dims.min()), "min_angle": float(sv[:, -1].min()), "samples": int(T.shape[1]), "holds": bool(np.all(sv[:, -1] > 1e-3))}

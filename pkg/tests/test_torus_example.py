import jax
import jax.numpy as jnp
import numpy as np
import pytest
import sympy as sp

from crlab.errors import ParameterOutOfRange
from crlab.torus_example import (
    _frame_jet,
    _rows_at_base,
    ball_samples,
    bracket_rank_report,
    build_MP,
    build_reeb_frame,
    cubic_leading_coefficient,
    cubic_variant_determinant,
    find_min_P,
    frame_relations,
    torus_defining,
    torus_points,
    transversality_check,
    verify_frame,
)


@pytest.fixture(scope="module")
def frame():
    return build_reeb_frame(check_samples=2000)


def test_reference_point_on_torus():
    assert float(torus_defining(jnp.array([2.0, 0.0, 1.0]))) == 0.0
    T = torus_points(32, 16)
    assert np.max(np.abs(np.asarray(jax.vmap(torus_defining)(jnp.asarray(T.T))))) < 1e-12


def test_frame_is_orthonormal_direct_and_normal_on_torus(frame):
    X = np.random.default_rng(1).uniform(-5, 5, (3, 2000))
    rep = verify_frame(frame, X)
    assert rep["max_orthonormal_defect"] < 1e-12
    assert abs(rep["min_det"] - 1) < 1e-12 and abs(rep["max_det"] - 1) < 1e-12
    assert rep["min_normal_alignment_on_T2"] > 1 - 1e-12


def test_frame_is_identity_far_from_torus(frame):
    a, k1, k2 = frame.evaluate(np.array([[4.5], [0.0], [0.0]]))
    assert np.allclose(np.hstack([k1, k2, a]), np.eye(3), atol=1e-14)


def test_field_coefficients_match_frame(frame):
    X = np.random.default_rng(2).uniform(-3, 3, (3, 500))
    rel = frame_relations(build_MP(frame, 1e3), X, y_scale=0.05)
    for key in ("plucker", "cross", "orthogonality", "identity", "tangency"):
        assert rel[key] < 1e-8, key


def test_model_validation(frame):
    with pytest.raises(ParameterOutOfRange):
        build_MP(frame, 0.0)
    with pytest.raises(ParameterOutOfRange):
        build_MP(frame, 1.0, power=5)
    with pytest.raises(ParameterOutOfRange):
        bracket_rank_report(build_MP(frame, 1.0), np.zeros((2, 4)))


class _PolynomialFrame:
    """Quadratic matrix field standing in for the rotation (orthogonality is not needed)."""

    def __init__(self, seed):
        rng = np.random.default_rng(seed)
        self.C0 = rng.integers(-3, 4, (3, 3))
        self.C1 = rng.integers(-2, 3, (3, 3, 3))
        self.C2 = rng.integers(-2, 3, (3, 3, 3))

    def rotation(self, x):
        return jnp.asarray(self.C0, float) + jnp.tensordot(jnp.asarray(self.C1, float), x, 1) + jnp.tensordot(jnp.asarray(self.C2, float), x**2, 1) / 4

    def sympy_matrix(self, xs):
        M = sp.Matrix(self.C0)
        for k in range(3):
            M += sp.Matrix(self.C1[:, :, k]) * xs[k] + sp.Matrix(self.C2[:, :, k]) * xs[k] ** 2 / 4
        return M


def _symbolic_rows(mock, x0, P, depth):
    """Bracket rows at ``(x0, y = 0)`` from exact Gaussian-rational polynomial algebra.

    Polynomials are expanded about the base point and truncated to the
    degree that can still reach the constant term after the remaining
    derivatives.
    """
    V = sp.symbols("u1:4 y1:4", real=True)
    us, ys = V[:3], V[3:]
    dom = sp.QQ_I

    def poly(e):
        return sp.Poly(e, *V, domain=dom)

    def trunc(p, d):
        terms = {m: c for m, c in p.as_dict().items() if sum(m) <= d}
        return sp.Poly.from_dict(terms, *V, domain=dom) if terms else poly(0)

    half, im = poly(sp.Rational(1, 2)), poly(sp.I)

    def dz(f, j):
        return (f.diff(us[j]) - f.diff(ys[j]) * im) * half

    def dzb(f, j):
        return (f.diff(us[j]) + f.diff(ys[j]) * im) * half

    def conj(p):
        terms = {m: sp.conjugate(c) for m, c in p.as_dict().items()}
        return sp.Poly.from_dict(terms, *V, domain=dom) if terms else p

    R = mock.sympy_matrix([x0[k] + us[k] for k in range(3)])
    rho = poly(sum(ys[j] * R[j, 0] for j in range(3)) + P * sum(y**2 for y in ys))
    r = poly(sum(ys[j] * R[j, 1] for j in range(3)) + P**3 * sum(y**4 for y in ys))
    D = depth + 1
    a = [trunc(dz(rho, j), D) for j in range(3)]
    b = [trunc(dz(r, j), D) for j in range(3)]
    A = [trunc(4 * (a[(j + 2) % 3] * b[(j + 1) % 3] - a[(j + 1) % 3] * b[(j + 2) % 3]), D) for j in range(3)]
    zero = poly(0)
    L = A + [zero] * 3
    Lb = [zero] * 3 + [conj(e) for e in A]

    def apply(X, W, d):
        return [trunc(sum((X[j] * dz(W[k], j) + X[3 + j] * dzb(W[k], j) for j in range(3)), zero), d) for k in range(6)]

    cur = L
    rows = [Lb, L]
    for k in range(depth):
        p, q = apply(Lb, cur, D - 1 - k), apply(cur, Lb, D - 1 - k)
        cur = [p[i] - q[i] for i in range(6)]
        rows.append(cur)
    pick = [rows[0], rows[1], rows[2], rows[-1]]
    return np.array([[complex(sp.N(e.as_dict().get((0,) * 6, 0))) for e in row] for row in pick])


def test_bracket_rows_match_symbolic_computation():
    mock = _PolynomialFrame(3)
    x0 = [sp.Rational(3, 10), sp.Rational(-1, 5), sp.Rational(1, 2)]
    jet = jax.jit(lambda x: _frame_jet(mock, x))(jnp.array([float(q) for q in x0]))
    rows = np.asarray(jax.jit(lambda j, P: _rows_at_base(j, P, 4, 3))(jet, 2.0))
    ref = _symbolic_rows(mock, x0, 2, 3)
    assert np.abs(rows - ref).max() < 1e-12 * np.abs(ref).max()


def test_quartic_term_dominates_on_torus(frame):
    T = torus_points(10, 10)
    br = bracket_rank_report(build_MP(frame, 1e3), T)
    assert np.all(br.rank() == 4)
    assert 0.9 <= br.ratio.min() and br.ratio.max() <= 1.1
    # sum a^4 >= 1/3 for unit vectors, so the prediction never degenerates
    assert np.min(np.sum(br.a**4, axis=0)) >= 1 / 3 - 1e-12
    assert np.allclose(br.A, br.a.T, atol=1e-9)


def test_cubic_variant_leading_term(frame):
    rep = cubic_variant_determinant(frame, np.array([2.0, 0.0, 1.0]))
    assert abs(rep["leading"] - rep["prediction"]) < 1e-8 * max(1.0, abs(rep["prediction"]))
    assert cubic_leading_coefficient(np.eye(3)).tolist() == [1.0, 1.0, 1.0]


def test_transversality_along_torus(frame):
    rep = transversality_check(build_MP(frame, 1e3), torus_points(32, 16))
    assert rep["min_dimension"] == 6 and rep["holds"]


def test_ball_samples():
    X = ball_samples(2.0, 9)
    assert np.all(np.sum(X**2, axis=0) <= 4 + 1e-12)
    assert X.shape[0] == 3 and np.any(np.all(X == 0, axis=0))


def test_min_P_stable_under_grid_refinement(frame):
    coarse = find_min_P(frame, 0.5, n=8, coarse=None)
    fine = find_min_P(frame, 0.5, n=16, coarse=None)
    assert coarse.P_star is not None
    assert coarse.P_star == fine.P_star
    assert fine.as_dict()["samples"] == ball_samples(0.5, 16).shape[1]

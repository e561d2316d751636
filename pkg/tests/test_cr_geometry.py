import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crlab.cr_geometry import (
    GenericGraph,
    MaximallyRealGraph,
    SupportModel,
    SurfaceInHypersurface,
    TangencyReport,
    bishop_invariant,
    characteristic_direction,
    characteristic_direction_pair,
    classify_lambda,
    compatibility_residual,
    find_complex_tangencies,
    first_order_residuals,
    hessian_fd,
    normalize_second_order,
    normalized_model_i1,
    straighten,
    tangency_defect,
)
from crlab.errors import ComplexTangency


def quadratic_surface(a, b, c=0.0):
    """u = a x^2 + b y^2 + c x y in the flat hypersurface v = 0."""
    return SurfaceInHypersurface(g=lambda x, y: a * x**2 + b * y**2 + c * x * y)


def test_characteristic_direction_of_tilted_plane():
    s = SurfaceInHypersurface(g=lambda x, y: x)
    assert np.allclose(characteristic_direction(s, (0.0, 0.0)), [0.0, 1.0], atol=1e-12)


def test_characteristic_direction_on_paraboloid():
    s = quadratic_surface(1.0, 1.0)
    d = characteristic_direction(s, (1.0, 0.0))
    assert abs(d[0]) < 1e-9 and abs(abs(d[1]) - 1) < 1e-9


def test_flat_surface_is_everywhere_tangent():
    s = SurfaceInHypersurface(g=lambda x, y: 0 * x)
    with pytest.raises(ComplexTangency):
        characteristic_direction(s, (0.0, 0.0))


def test_direction_annihilates_defect():
    s = SurfaceInHypersurface(g=lambda x, y: x**2 + 0.3 * y**3, phi=lambda x, y, u: 0.2 * x * u + 0.1 * y**2)
    for p in [(0.4, 0.1), (-0.3, 0.5), (0.2, -0.7)]:
        d = characteristic_direction(s, p)
        ca, cb = tangency_defect(s, *p)
        assert abs(ca * d[0] + cb * d[1]) < 1e-10


@pytest.mark.parametrize(
    "coeffs, lam, kind",
    [
        ((1.0, 1.0), 0.0, "elliptic"),
        ((5.0, -3.0), 2.0, "hyperbolic"),
    ],
)
def test_bishop_invariant_examples(coeffs, lam, kind):
    # z zbar + t (z^2 + zbar^2) has real part x^2 + y^2 + 2 t (x^2 - y^2)
    s = quadratic_surface(*coeffs)
    reports = find_complex_tangencies(s, (-1, 1, -1, 1), pitch=0.1)
    assert len(reports) == 1
    r = reports[0]
    assert np.hypot(*r.point) < 1e-8
    assert abs(r.lam - lam) < 1e-8
    assert r.kind == kind


def test_parabolic_quadratic_invariant():
    # the exact parabolic quadratic is tangent along a whole line, so only the jet is checked
    lam = bishop_invariant(quadratic_surface(2.0, 0.0), (0.0, 0.0))
    assert abs(lam - 0.5) < 1e-8
    assert classify_lambda(lam) == "parabolic"


def test_classify_lambda_boundaries():
    assert classify_lambda(0.0) == "elliptic"
    assert classify_lambda(0.5) == "parabolic"
    assert classify_lambda(float("inf")) == "hyperbolic"
    assert classify_lambda(float("nan")) == "degenerate"


def test_report_rejects_inconsistent_kind():
    with pytest.raises(ValueError):
        TangencyReport((0.0, 0.0), 2.0, "elliptic")


def test_pure_harmonic_quadratic_has_infinite_invariant():
    assert bishop_invariant(quadratic_surface(1.0, -1.0), (0.0, 0.0)) == float("inf")


@settings(max_examples=20, deadline=None)
@given(
    st.floats(0.2, 2.0),
    st.floats(-1.5, 1.5),
    st.floats(-1.0, 1.0),
    st.floats(0, 2 * np.pi),
)
def test_bishop_invariant_rotation_invariant(a, b, c, mu):
    s = quadratic_surface(a, b, c)
    cm, sm = np.cos(mu), np.sin(mu)

    def g_rot(x, y):
        return a * (cm * x - sm * y) ** 2 + b * (sm * x + cm * y) ** 2 + c * (cm * x - sm * y) * (sm * x + cm * y)

    lam = bishop_invariant(s, (0.0, 0.0))
    lam_rot = bishop_invariant(SurfaceInHypersurface(g=g_rot), (0.0, 0.0))
    if np.isfinite(lam):
        assert abs(lam - lam_rot) < 1e-8 * max(1.0, lam)


def test_holes_exclude_tangencies():
    s = quadratic_surface(1.0, 1.0)
    assert find_complex_tangencies(s, (-1, 1, -1, 1), pitch=0.1, holes=[(0.0, 0.0, 0.2)]) == []


def test_normalized_model_is_straight_at_origin():
    M, M1, _, _ = normalized_model_i1()
    assert np.allclose(characteristic_direction_pair(M, M1, np.zeros(3)), [1, 0, 0], atol=1e-9)
    _, _, change = straighten(M, M1, np.zeros(3))
    assert np.allclose(change.L, np.eye(3), atol=1e-12)


def _perturbed_pair(seed, n=3):
    rng = np.random.default_rng(seed)
    A = 0.1 * rng.standard_normal((n - 1, n))
    B = 0.1 * rng.standard_normal(n - 1)
    Q = 0.05 * rng.standard_normal(n - 1)

    def phi(x, y1):
        return np.tensordot(A, x, 1) + np.outer(B, y1) + Q[:, None] * x[: n - 1] ** 2

    def h1(x):
        return 0.1 * x[0] + 0.2 * x[1] ** 2 + 0.05 * x[n - 1]

    def h(x):
        y1 = h1(x)
        return np.vstack([y1[None], phi(x, y1)])

    return GenericGraph(n, phi), MaximallyRealGraph(n, h)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_straighten_kills_first_order_terms(seed):
    M, M1 = _perturbed_pair(seed)
    rng = np.random.default_rng(seed + 10)
    assert compatibility_residual(M, M1, rng.uniform(-0.5, 0.5, (3, 40))) < 1e-12
    Mn, M1n, _ = straighten(M, M1, np.zeros(3))
    res = first_order_residuals(Mn, M1n)
    assert max(res.values()) < 1e-10


def test_straighten_tilted_plane_in_c2():
    M = GenericGraph(2, lambda x, y1: 1.0 * x[0][None])
    M1 = MaximallyRealGraph(2, lambda x: np.stack([0 * x[0], x[0]]))
    Mn, M1n, _ = straighten(M, M1, np.zeros(2))
    assert max(first_order_residuals(Mn, M1n).values()) < 1e-10


def test_normalize_second_order_removes_hessian():
    def h(x):
        return np.stack([x[0] ** 2 + 0.5 * x[1] * x[2], x[1] * x[0] - 0.3 * x[2] ** 2, 0.2 * x[0] * x[2]])

    M1n, _, _ = normalize_second_order(MaximallyRealGraph(3, h), SupportModel(lambda xp: 0 * xp[0]))
    assert np.abs(hessian_fd(M1n.h, np.zeros(3))).max() < 1e-10

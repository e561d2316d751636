import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crlab.circle_ops import CircleGrid
from crlab.disc_families import AnalyticDisc
from crlab.errors import BoundaryEscape, ParameterOutOfRange
from crlab.extension_lab import (
    DiscIsotopy,
    MaximallyRealSlice,
    ball_domain,
    continuity_sigma,
    coverage_radius,
    extension_coverage,
    gauss_approximation,
    hartogs_shell,
    polydisc_domain,
    polynomial_sequence,
    shrinking_hartogs_isotopy,
    whole_space,
)

GRID = CircleGrid(64)


def linear_disc(scale, offset=0.0):
    bd = np.stack([offset + scale * GRID.zeta, np.zeros(GRID.N, complex)])
    ev = lambda z: np.stack([offset + scale * np.asarray(z, complex), np.zeros(np.shape(z), complex)])
    return AnalyticDisc(GRID, bd, ev)


def test_coverage_radius_formula():
    assert coverage_radius(0.1, 1.0, 2.0) == 0.025
    assert coverage_radius(0.0, 1.0, 2.0) == 0.0
    assert coverage_radius(-0.3, 1.0, 2.0) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 5.0), st.floats(0.01, 1.0), st.floats(1.0, 10.0))
def test_coverage_radius_scaling(rho, c, C):
    s = coverage_radius(rho, c, C)
    assert s >= 0
    assert coverage_radius(2 * rho, c, C) == pytest.approx(2 * s)
    assert s <= rho / 2 + 1e-15


def test_sigma_of_linear_disc_in_polydisc():
    iso = DiscIsotopy(lambda t: linear_disc(0.5), polydisc_domain(1.0), np.array([0.0, 1.0]))
    rep = continuity_sigma(iso, 0.0, pairs=2000)
    assert rep.rho == pytest.approx(0.5)
    assert rep.c == pytest.approx(0.5) and rep.C == pytest.approx(0.5)
    assert rep.sigma == pytest.approx(0.25)


def test_sigma_shrinks_with_domain():
    sig = [continuity_sigma(DiscIsotopy(lambda t: linear_disc(0.5), polydisc_domain(r), np.array([0.0, 1.0])), 0.0, pairs=500).sigma for r in (1.0, 0.8, 0.6)]
    assert sig[0] > sig[1] > sig[2] > 0


def test_boundary_escape_reports_tau():
    iso = DiscIsotopy(lambda t: linear_disc(1.0 + t), polydisc_domain(1.0), np.array([0.0, 0.5]))
    with pytest.raises(BoundaryEscape) as info:
        continuity_sigma(iso, 0.5)
    assert info.value.tau == 0.5


def test_whole_space_uses_cap():
    iso = DiscIsotopy(lambda t: linear_disc(2.0), whole_space(cap=3.0), np.array([0.0, 1.0]))
    assert continuity_sigma(iso, 0.0, pairs=500).rho == 3.0


def test_ball_oracle_is_inscribed_polydisc():
    dom = ball_domain(1.0)
    z = np.array([[0.3], [0.0]], complex)
    s = float(dom.boundary_distance(z)[0])
    assert (0.3 + s) ** 2 + s**2 == pytest.approx(1.0)
    assert s < 0.7 / 2 + 0.3
    assert float(dom.boundary_distance(np.array([[2.0], [0.0]]))[0]) < 0


def test_hartogs_shell_membership():
    dom = hartogs_shell(0.2)
    pts = np.array([[0.0, 0.9, 0.0], [0.0, 0.0, 0.5]], complex)
    assert dom.contains(pts).tolist() == [False, True, False]
    with pytest.raises(ParameterOutOfRange):
        hartogs_shell(1.5)


def test_isotopy_validation_and_continuity():
    with pytest.raises(ParameterOutOfRange):
        DiscIsotopy(lambda t: linear_disc(0.5), polydisc_domain(), np.array([0.0, 0.0]))
    iso = shrinking_hartogs_isotopy()
    assert iso.continuity() == pytest.approx(0.85)


def test_hartogs_coverage_reaches_center():
    cov = extension_coverage(shrinking_hartogs_isotopy(), rings=8, angles=32)
    assert cov.contains(np.zeros((2, 1)))[0]
    assert np.all(cov.radius > 0)
    assert len(cov.rows()[0]) == 8


@pytest.mark.parametrize("name, f, exact", [
    ("one", lambda z: np.ones(z.shape[1:], complex), lambda zh: 1.0),
    ("z1", lambda z: z[0], lambda zh: zh[0]),
    ("z1^2", lambda z: z[0] ** 2, lambda zh: zh[0] ** 2),
])
def test_gauss_approximation_converges(name, f, exact):
    L = MaximallyRealSlice.linear([[0.1, 0.05], [-0.03, 0.08]])
    zh = L.point(np.array([0.1, 0.0]))
    errs = [abs(gauss_approximation(f, L, zh, tau) - exact(zh)) for tau in (1e2, 1e3, 1e4)]
    assert errs[-1] < 1e-3
    assert all(b <= a or max(a, b) < 1e-12 for a, b in zip(errs, errs[1:]))


def test_gauss_rejects_nonpositive_tau():
    L = MaximallyRealSlice.linear([[0.0]])
    with pytest.raises(ParameterOutOfRange):
        gauss_approximation(lambda z: z[0], L, np.zeros(1), 0.0)


def test_slice_tilt():
    assert MaximallyRealSlice.linear([[0.0, 0.3], [0.0, 0.0]]).tilt(np.zeros((2, 1))) == pytest.approx(0.3)


def test_polynomial_sequence_matches_gauss_integral():
    L = MaximallyRealSlice.linear([[0.2]])

    def f(z):
        x = z[0].real
        return np.where(np.abs(x) < 1, (1 - x**2) ** 4, 0.0).astype(complex)

    tau = 1.0
    P = polynomial_sequence(f, L, 25, tau, support=1.0)
    assert P.degree <= 50
    zh = L.point(np.array([0.3]))
    ref = gauss_approximation(f, L, zh, tau, support=1.0)
    assert abs(P(zh.reshape(1, 1))[0] - ref) < 1e-6


def test_polynomial_sequence_degree():
    L = MaximallyRealSlice.linear([[0.0]])
    P = polynomial_sequence(lambda z: np.where(np.abs(z[0].real) < 1, 1.0, 0.0).astype(complex), L, 3, 2.0, support=1.0)
    assert P.degree <= 6
    with pytest.raises(ParameterOutOfRange):
        polynomial_sequence(lambda z: z[0], L, -1, 1.0, support=1.0)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crlab.conformal import BoundaryCurve, CurvePiece, SzegoMap, apply_mobius, bridge_polynomial, mobius_three_points
from crlab.polynomials import Polynomial


def test_polynomial_evaluation_and_derivative():
    p = Polynomial.from_json({"terms": [[1.0, [2, 0]], [-3.0, [0, 2]], [0.5, [1, 1]]]})
    assert p.nvars == 2 and p.degree() == 2
    assert float(p(2.0, 1.0)) == 2.0
    assert float(p.deriv(0)(2.0, 1.0)) == 4.5
    assert float(p.deriv(1)(2.0, 1.0)) == -5.0
    assert p.deriv(0).deriv(0).deriv(0).terms == ()


def test_polynomial_rejects_bad_input():
    with pytest.raises(ValueError):
        Polynomial([(1.0, (1, -1))])
    with pytest.raises(ValueError):
        Polynomial([(1.0, (1, 0)), (1.0, (1,))])
    with pytest.raises(ValueError):
        Polynomial([(1.0, (1, 0))])(1.0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.floats(-2, 2), st.floats(-2, 2))
def test_polynomial_derivative_matches_difference(coefs, x, y):
    p = Polynomial([(coefs[0], (3, 1)), (coefs[1], (1, 2)), (coefs[2], (0, 0))])
    h = 1e-6
    fd = (p(x + h, y) - p(x - h, y)) / (2 * h)
    assert abs(float(p.deriv(0)(x, y)) - float(fd)) < 1e-5 * (1 + abs(float(fd)))


def test_mobius_three_points():
    src = [0.0, 1.0, 1j]
    dst = [2.0, -1j, 3 + 1j]
    M = mobius_three_points(src, dst)
    assert np.allclose(apply_mobius(M, np.array(src)), dst)


def test_bridge_polynomial_matches_jets():
    poly, s0 = bridge_polynomial(0.0, 1.0, [1.0, 2.0, 0.0], [0.5, -1.0, 3.0])
    assert poly(0.0) == pytest.approx(1.0) and poly.deriv()(0.0) == pytest.approx(2.0)
    assert poly(1.0) == pytest.approx(0.5) and poly.deriv(2)(1.0) == pytest.approx(3.0)


def test_szego_map_of_offset_disc_is_mobius():
    c, R, a = 0.5, 2.0, 0.5 + 0.6j
    piece = CurvePiece(0.0, 2 * np.pi, lambda t: c + R * np.exp(1j * t), lambda t: 1j * R * np.exp(1j * t))
    f = SzegoMap(BoundaryCurve([piece]), a, per_piece=8, levels=0)
    t = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    b = (a - c) / R
    w = np.exp(1j * t)
    exact = (w - b) / (1 - np.conj(b) * w)
    assert np.max(np.abs(f.boundary_value(t) - exact)) < 1e-10
    assert f.derivative_at_center() == pytest.approx(1 / (R * (1 - abs(b) ** 2)), rel=1e-10)

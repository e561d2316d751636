import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crlab.circle_ops import (
    CircleFn,
    CircleGrid,
    conjugate,
    dtheta,
    hilbert_T1,
    holder_norm,
    holder_norm_cube,
    holomorphic_extension,
    random_band_limited,
)
from crlab.errors import GridMismatch, NotHolomorphic

G = CircleGrid(512)
TH = G.theta


def fn(values, grid=G):
    return CircleFn(grid, values)


def test_grid_rejects_bad_sizes():
    for N in (4, 12, 100):
        with pytest.raises(ValueError):
            CircleGrid(N)
    assert np.all(np.diff(G.theta) > 0) and G.theta[0] == 0 and G.theta[-1] < 2 * np.pi


def test_T1_examples():
    assert np.max(np.abs(hilbert_T1(fn(np.cos(TH))).values - np.sin(TH))) < 1e-13
    assert np.max(np.abs(hilbert_T1(fn(np.full(G.N, 5.0))).values)) < 1e-13
    assert np.max(np.abs(hilbert_T1(fn(np.sin(TH))).values - (1 - np.cos(TH)))) < 1e-13


def test_T1_vanishes_at_one_and_spectral_exactness():
    k = np.arange(1, G.N // 8 + 1)
    out = hilbert_T1(fn(np.cos(np.outer(k, TH))))
    assert np.max(np.abs(out.values - np.sin(np.outer(k, TH)))) < 1e-10
    assert np.max(np.abs(out.at_one())) == 0.0


def test_conjugate_gives_holomorphic_boundary_value():
    for k in (1, 3, 7):
        f = fn(np.cos(k * TH))
        w = f.values[0] + 1j * conjugate(f).values[0]
        assert np.max(np.abs(w - np.exp(1j * k * TH))) < 1e-13


def test_grid_mismatch():
    with pytest.raises(GridMismatch):
        fn(np.ones(G.N)) + fn(np.ones(64), CircleGrid(64))
    with pytest.raises(GridMismatch):
        CircleFn(G, np.ones(100))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 100))
def test_T1_involution_random(seed, kmax):
    f = random_band_limited(G, 3, kmax, np.random.default_rng(seed))
    r = hilbert_T1(hilbert_T1(f)).values + f.values - f.at_one()[:, None]
    assert np.max(np.abs(r)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_T1_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    f = random_band_limited(G, 2, 40, rng)
    g = random_band_limited(G, 2, 40, rng)
    lhs = hilbert_T1(a * f + b * g).values
    rhs = a * hilbert_T1(f).values + b * hilbert_T1(g).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * (1 + abs(a) + abs(b)) * 50


def test_holomorphic_extension_examples():
    z = G.zeta
    assert abs(holomorphic_extension(fn(z.real), fn(z.imag), 0.0)[0]) < 1e-14
    assert abs(holomorphic_extension(fn(np.ones(G.N)), fn(np.zeros(G.N)), 0.3 + 0.4j)[0] - 1) < 1e-14
    x = fn(np.cos(TH))
    assert abs(holomorphic_extension(x, hilbert_T1(x), 0.5)[0] - 0.5) < 1e-13


def test_holomorphic_extension_rejects_antiholomorphic():
    with pytest.raises(NotHolomorphic):
        holomorphic_extension(fn(np.cos(TH)), fn(-np.sin(TH)), 0.2)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.99), st.floats(0, 2 * np.pi))
def test_extension_matches_power_series(seed, r, t):
    rng = np.random.default_rng(seed)
    c = (rng.standard_normal(6) + 1j * rng.standard_normal(6)) / np.arange(1, 7)
    bd = sum(ck * G.zeta**k for k, ck in enumerate(c))
    zeta = r * np.exp(1j * t)
    val = holomorphic_extension(fn(bd.real), fn(bd.imag), zeta)[0]
    assert abs(val - sum(ck * zeta**k for k, ck in enumerate(c))) < 1e-12


def test_holder_examples():
    assert holder_norm(fn(np.full(G.N, -2.5)), 0).value == pytest.approx(2.5)
    x = np.linspace(-1, 1, 401)
    hn = holder_norm_cube(x**2, [x], 2, 0.5)
    assert hn.value == pytest.approx(5.0, abs=1e-6)
    c1 = holder_norm(fn(np.cos(TH)), 1, 0.5)
    assert np.isfinite(c1.value) and c1.value >= 2.0
    assert c1.value >= c1.sup_part


def test_dtheta_spectral():
    f = fn(np.sin(3 * TH))
    assert np.max(np.abs(dtheta(f).values - 3 * np.cos(3 * TH))) < 1e-11


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_T1_c1alpha_operator_norm_finite(seed):
    f = random_band_limited(G, 1, 20, np.random.default_rng(seed))
    ratio = holder_norm(hilbert_T1(f), 1).value / holder_norm(f, 1).value
    assert np.isfinite(ratio) and ratio < 50

import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crlab.circle_ops import CircleGrid
from crlab.cr_geometry import normalized_model_i1
from crlab.disc_families import (
    ConeField,
    attached_pivot_family,
    build_psi,
    export_family_csv,
    flat_family,
    half_attached_family,
    phi_c,
    rank_margin,
    smooth_bump,
    verify_family_properties,
    verify_flat_family,
)
from crlab.errors import ParameterOutOfRange


@pytest.fixture(scope="module")
def psi():
    return build_psi()


def test_psi_normalization_and_shape(psi):
    inv = psi.check_invariants()
    assert inv["psi(1)"] < 1e-12
    assert inv["psi(i)-1"] < 1e-10
    assert inv["psi(-i)+1"] < 1e-10
    assert inv["min dpsi/dtheta on right half"] > 0
    assert inv["max |Im dpsi/dtheta| on right half"] < 1e-8
    assert inv["min Im psi inside"] > -1e-12
    assert inv["negative frequency ratio"] < 1e-8
    assert psi.C1 > 0


def test_psi_maps_right_half_circle_to_segment(psi):
    right = np.cos(psi.grid.theta) > 0
    vals = psi.values[right]
    assert np.max(np.abs(vals.imag)) < 1e-10
    assert np.max(np.abs(vals.real)) <= 1 + 1e-10


def test_phi_c_fixes_one_and_stays_in_disc(psi):
    f = phi_c(psi, 0.1)
    bd = f.boundary()
    assert abs(bd[0] - 1) < 1e-12
    assert np.max(np.abs(bd)) <= 1 + 1e-10
    inside = f(0.5 * np.exp(1j * np.linspace(0, 2 * np.pi, 64)))
    assert np.max(np.abs(inside)) < 1
    assert f.angular_speed_at_one == pytest.approx(0.2 * psi.C1)


def test_phi_c_squeezes_towards_one(psi):
    sizes = [phi_c(psi, c).containment() for c in (0.2, 0.1, 0.05, 0.02)]
    assert all(b < a for a, b in zip(sizes, sizes[1:]))
    with pytest.raises(ParameterOutOfRange):
        phi_c(psi, 0.0)


def test_flat_family_properties(psi):
    rep = verify_flat_family(0.1, psi)
    assert rep.all_pass, rep.lines()


def test_flat_family_rejects_large_parameters(psi):
    with pytest.raises(ParameterOutOfRange):
        flat_family(0.2, np.zeros(2), np.ones(2), psi)
    with pytest.raises(ParameterOutOfRange):
        flat_family(0.1, np.array([0.2, 0.0]), np.ones(2), psi)
    with pytest.raises(ParameterOutOfRange):
        flat_family(0.1, np.zeros(2), np.array([3.0, 0.0]), psi)


@settings(max_examples=15, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.01, 0.11))
def test_flat_family_is_holomorphic_and_real_on_edge(a, b, c):
    psi = build_psi()
    x = np.array([a, b]) * c / np.sqrt(2)
    d = flat_family(c, x, np.array([b, a]), psi)
    assert d.holomorphy_defect < 1e-8
    right = np.cos(psi.grid.theta) >= 0
    assert np.max(np.abs(d.boundary.imag[:, right])) < 1e-12


def test_half_attached_family_small_model(psi):
    M, M1, support, v1 = normalized_model_i1(n=2)
    fam = half_attached_family(M1, np.zeros(2), v1, 0.03, psi)
    rep = verify_family_properties(fam, support, M, sweep=2)
    for key in ("(1_1) base point", "(3_1) half-attachment", "(4_1) tangent multiple", "(5_1) rank in x", "(6_1) rank in v"):
        assert rep.entries[key]["pass"], rep.lines()
    with pytest.raises(ParameterOutOfRange):
        fam.build(np.array([0.01, 0.0]))


@pytest.fixture(scope="module")
def pivot():
    M, M1, _, _ = normalized_model_i1(n=3)
    return attached_pivot_family(M, M1, 0.05, grid=CircleGrid(512))


def test_pivot_zero_radius_is_constant_in_first_component(pivot):
    m = pivot.build(r=0.0)
    assert np.ptp(m.disc.boundary[0].real) < 1e-14
    assert m.tau == 0.0


def test_pivot_boundary_on_positive_side(pivot):
    m = pivot.build()
    margin = pivot.side_margin(m)
    assert margin.min() > -1e-12
    assert m.tangency_residual < 1e-8
    lifted = pivot.side_margin(pivot.build(nu=1e-3))
    assert lifted.min() > 0.5e-3


def test_pivot_normal_deformations_have_full_rank(pivot):
    _, margin = pivot.normal_rank()
    assert margin > 1e-3


def test_cone_fill_and_membership():
    G = np.array([[1.0, 0.1], [1.0, -0.1]])
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    cf = ConeField(np.zeros((1, 2)), [G])
    assert cf.is_open(0)
    up = np.array([0.0, 1.0])
    assert not cf.contains(0, up)
    filled = cf.fill(up)
    assert filled.filled
    assert filled.contains(0, up)
    assert filled.contains(0, np.array([1.0, 0.5]))
    assert not filled.contains(0, np.array([-1.0, 0.0]))


def test_rank_margin_detects_degenerate_columns():
    assert rank_margin(np.eye(3)) == pytest.approx(1.0)
    assert rank_margin(np.array([[1.0, 2.0], [1.0, 2.0]])) < 1e-12
    assert rank_margin(np.zeros((2, 2))) == 0.0


def test_smooth_bump_support():
    x = np.linspace(-2, 2, 401)
    b = smooth_bump(x)
    assert b[np.abs(x) >= 1].max() == 0.0
    assert b.max() == pytest.approx(1.0)


def test_export_csv(tmp_path, psi):
    d = flat_family(0.1, np.zeros(2), np.array([1.0, 0.0]), psi)
    path = tmp_path / "family.csv"
    export_family_csv(path, [((0.1,), d)], 2, ["c"])
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["c", "theta", "re_z1", "im_z1", "re_z2", "im_z2"]
    assert len(rows) == 1 + psi.grid.N

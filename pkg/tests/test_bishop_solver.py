import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crlab.bishop_solver import (
    BishopProblem,
    SolverConfig,
    contraction_report,
    find_contraction_threshold,
    solve_bishop,
    solve_linearized,
)
from crlab.circle_ops import CircleFn, hilbert_T1
from crlab.cr_geometry import MaximallyRealGraph
from crlab.disc_families import PsiConfig, build_psi
from crlab.errors import Diverged, DomainEscape, ParameterOutOfRange
from crlab.scenarios import _quadratic_h

PSI = build_psi(PsiConfig(N=1024))
GRID = PSI.grid
V = np.array([1.0, 0.5])


def seed(c):
    return CircleFn(GRID, c * V[:, None] * PSI.values.real[None, :])


def quadratic_target(scale=1.0):
    h, dh = _quadratic_h()
    return MaximallyRealGraph(2, lambda X: scale * h(X), dh=lambda X: scale * dh(X))


def problem(c, scale=1.0, **kw):
    return BishopProblem(quadratic_target(scale), seed(c), 1.0, SolverConfig(c=c, **kw))


def test_flat_target_returns_seed():
    flat = MaximallyRealGraph(2, lambda X: np.zeros_like(X))
    r = solve_bishop(BishopProblem(flat, seed(0.1), 1.0, SolverConfig(c=0.1)))
    assert np.array_equal(r.X.values, seed(0.1).values)
    assert r.iterations == 1


def test_quadratic_solution_satisfies_equation():
    p = problem(0.05)
    r = solve_bishop(p)
    X = r.X.values
    resub = X + hilbert_T1(CircleFn(GRID, p.h(X))).values - p.seed.values
    assert np.max(np.abs(resub)) < 1e-11
    assert r.contraction_ratio < 0.5
    assert r.attachment_residual < 1e-10
    assert r.holomorphy_defect < 1e-8


def test_solution_independent_of_initial_iterate():
    p = problem(0.05)
    a = solve_bishop(p).X.values
    b = solve_bishop(p, initial=np.zeros_like(a)).X.values
    assert np.max(np.abs(a - b)) < 1e-11


def test_deformation_parameter_zero_is_flat():
    p = BishopProblem(quadratic_target(), seed(0.05), 0.0, SolverConfig(c=0.05))
    assert np.max(np.abs(solve_bishop(p).X.values - p.seed.values)) == 0.0


def test_linearization_matches_finite_difference():
    c, eps = 0.05, 1e-6
    p = problem(c)
    X = solve_bishop(p).X
    direction = CircleFn(GRID, V[:, None] * np.sin(GRID.theta)[None, :] ** 2)
    Vlin = solve_linearized(p, X, direction).values

    def shifted(s):
        q = BishopProblem(p.target, CircleFn(GRID, p.seed.values + s * direction.values), 1.0, p.config)
        return solve_bishop(q).X.values

    fd = (shifted(eps) - shifted(-eps)) / (2 * eps)
    assert np.max(np.abs(fd - Vlin)) < 1e-6


def test_contraction_report_constants():
    rep = contraction_report(problem(0.05))
    assert rep["ratio"] < 0.5
    assert rep["K2"] > 0 and np.isfinite(rep["K6"])


def test_threshold_shrinks_when_target_is_scaled():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        c1 = find_contraction_threshold(lambda c: problem(c), lo=1e-3, hi=1.0, steps=10)
        c10 = find_contraction_threshold(lambda c: problem(c, scale=10.0), lo=1e-3, hi=1.0, steps=10)
    assert 0 < c10 < c1


def test_config_validation():
    with pytest.raises(ParameterOutOfRange):
        SolverConfig(c=-1.0)
    with pytest.raises(ParameterOutOfRange):
        SolverConfig(tol=0.0)
    with pytest.raises(ParameterOutOfRange):
        SolverConfig(c=0.5, K={"c1": 0.1})
    with pytest.raises(ParameterOutOfRange):
        BishopProblem(quadratic_target(), seed(0.05), 1.5)


def test_large_target_fails_loudly():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        with pytest.raises((Diverged, DomainEscape)):
            solve_bishop(problem(0.9, scale=50.0, max_iter=60))


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 0.08))
def test_fixed_point_residual_small_across_sizes(c):
    r = solve_bishop(problem(c))
    assert r.residual < 1e-11
    assert r.attachment_residual < 1e-10

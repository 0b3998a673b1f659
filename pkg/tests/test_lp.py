import numpy as np
import pytest
import scipy.optimize
from hypothesis import given, settings
from hypothesis import strategies as st

from bellgeo.lp import LinearProgram, LPStatus, SimplexSolver, solve


def _scipy(lp: LinearProgram):
    lb, ub = lp.bounds_arrays()
    bounds = [(l if np.isfinite(l) else None, u if np.isfinite(u) else None)
              for l, u in zip(lb, ub)]
    return scipy.optimize.linprog(
        lp.c, A_ub=lp.A_ub, b_ub=lp.b_ub, A_eq=lp.A_eq, b_eq=lp.b_eq,
        bounds=bounds, method="highs",
    )


def _random_lp(rng, n, m_eq, m_ub):
    # built around a known interior feasible point so feasibility is guaranteed
    x0 = rng.uniform(0.2, 1.0, n)
    A_eq = rng.normal(size=(m_eq, n)) if m_eq else None
    b_eq = A_eq @ x0 if m_eq else None
    A_ub = rng.normal(size=(m_ub, n)) if m_ub else None
    b_ub = A_ub @ x0 + rng.uniform(0.1, 1.0, m_ub) if m_ub else None
    c = rng.normal(size=n)
    return LinearProgram(c=c, A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub,
                         lb=0.0, ub=2.0)


def test_trivial_box_lp():
    sol = solve(LinearProgram(c=np.array([1.0, -1.0]), lb=-1.0, ub=1.0))
    assert sol.status == LPStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(-2.0)
    np.testing.assert_allclose(sol.x, [-1.0, 1.0])


def test_simplex_matches_scipy_oracle():
    rng = np.random.default_rng(7)
    for trial in range(60):
        n = rng.integers(2, 9)
        m_eq = int(rng.integers(0, min(n, 4)))
        m_ub = int(rng.integers(0, 7))
        lp = _random_lp(rng, n, m_eq, m_ub)
        sol = solve(lp)
        ref = _scipy(lp)
        assert ref.status == 0
        assert sol.status == LPStatus.OPTIMAL, trial
        assert sol.objective_value == pytest.approx(ref.fun, abs=1e-8), trial
        assert sol.max_constraint_violation < 1e-8


def test_infeasible_detected_with_residual():
    lp = LinearProgram(
        c=np.zeros(2),
        A_eq=np.array([[1.0, 1.0], [1.0, 1.0]]),
        b_eq=np.array([1.0, 3.0]),
        lb=0.0, ub=10.0,
    )
    sol = solve(lp)
    assert sol.status == LPStatus.INFEASIBLE
    # the phase-1 residual (total infeasibility) is reported as the objective
    assert sol.objective_value == pytest.approx(2.0, abs=1e-9)


def test_unbounded_detected():
    sol = solve(LinearProgram(c=np.array([-1.0, 0.0]), lb=0.0, ub=np.inf))
    assert sol.status == LPStatus.UNBOUNDED


def test_determinism():
    rng = np.random.default_rng(3)
    lp = _random_lp(rng, 6, 2, 4)
    s1, s2 = solve(lp), solve(lp)
    assert s1.objective_value == s2.objective_value
    np.testing.assert_array_equal(s1.x, s2.x)
    assert s1.iterations == s2.iterations


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 50.0))
def test_objective_scale_invariance(seed, scale):
    rng = np.random.default_rng(seed)
    lp = _random_lp(rng, 5, 1, 3)
    base = solve(lp)
    scaled = solve(LinearProgram(c=scale * lp.c, A_eq=lp.A_eq, b_eq=lp.b_eq,
                                 A_ub=lp.A_ub, b_ub=lp.b_ub, lb=lp.lb, ub=lp.ub))
    assert base.status == scaled.status == LPStatus.OPTIMAL
    assert scaled.objective_value == pytest.approx(scale * base.objective_value,
                                                   rel=1e-8, abs=1e-8)


def test_duality_gap_small_at_optimum():
    rng = np.random.default_rng(11)
    for _ in range(10):
        lp = _random_lp(rng, 6, 2, 5)
        sol = solve(lp)
        assert sol.status == LPStatus.OPTIMAL
        assert abs(sol.duality_gap) < 1e-7


def test_resolve_after_objective_change():
    rng = np.random.default_rng(5)
    lp = _random_lp(rng, 6, 2, 4)
    solver = SimplexSolver(lp)
    first = solver.solve()
    assert first.status == LPStatus.OPTIMAL
    c2 = rng.normal(size=6)
    solver.set_objective(c2)
    warm = solver.resolve()
    ref = _scipy(LinearProgram(c=c2, A_eq=lp.A_eq, b_eq=lp.b_eq,
                               A_ub=lp.A_ub, b_ub=lp.b_ub, lb=lp.lb, ub=lp.ub))
    assert warm.status == LPStatus.OPTIMAL
    assert warm.objective_value == pytest.approx(ref.fun, abs=1e-8)


def test_validate_rejects_bad_shapes():
    with pytest.raises(ValueError):
        LinearProgram(c=np.ones(3), A_eq=np.ones((2, 2)), b_eq=np.ones(2)).validate()
    with pytest.raises(ValueError):
        LinearProgram(c=np.ones(2), A_ub=np.ones((1, 2)), b_ub=None).validate()
    with pytest.raises(ValueError):
        LinearProgram(c=np.ones(2), lb=1.0, ub=0.0).validate()

"""Tests for the feasibility solver."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rationalize.lp import (
    FEAS_TOL,
    LinearSystem,
    MalformedSystemError,
    solve_feasibility,
)

from oracles import feasible_by_vertex_enumeration


def _system(num_vars, rows, lower_bounds=None):
    return LinearSystem.from_rows(num_vars, rows, lower_bounds)


def test_unit_box_feasible():
    out = solve_feasibility(
        _system(1, [([1.0], ">=", 0.0), ([1.0], "<=", 1.0)])
    )
    assert out.feasible
    assert -FEAS_TOL <= out.point[0] <= 1.0 + FEAS_TOL
    assert out.max_residual <= FEAS_TOL


def test_empty_intersection_infeasible():
    out = solve_feasibility(
        _system(1, [([1.0], "<=", -1.0), ([1.0], ">=", 1.0)])
    )
    assert not out.feasible
    assert out.point is None


def test_equality_rows():
    out = solve_feasibility(
        _system(
            2,
            [([1.0, 1.0], "=", 1.0), ([1.0, -1.0], "<=", 0.2)],
            lower_bounds=[0.0, 0.0],
        )
    )
    assert out.feasible
    assert out.point.sum() == pytest.approx(1.0, abs=1e-9)
    assert out.point.min() >= -1e-12


def test_free_variables_can_go_negative():
    out = solve_feasibility(_system(1, [([1.0], "<=", -5.0)]))
    assert out.feasible
    assert out.point[0] <= -5.0 + FEAS_TOL


def test_zero_rows_feasible_at_lower_bound():
    out = solve_feasibility(_system(3, [], lower_bounds=[1.0, -np.inf, 2.5]))
    assert out.feasible
    np.testing.assert_allclose(out.point, [1.0, 0.0, 2.5])


def test_lower_bounds_respected():
    out = solve_feasibility(
        _system(2, [([1.0, 1.0], "<=", 10.0)], lower_bounds=[2.0, 3.0])
    )
    assert out.feasible
    assert out.point[0] >= 2.0 - 1e-12
    assert out.point[1] >= 3.0 - 1e-12


def test_conflicting_bound_and_row_infeasible():
    out = solve_feasibility(
        _system(1, [([1.0], "<=", 0.5)], lower_bounds=[1.0])
    )
    assert not out.feasible


@pytest.mark.parametrize(
    "rows, bounds, message",
    [
        ([([1.0, 2.0], "<=", 0.0)], None, "coefficients"),
        ([([np.nan], "<=", 0.0)], None, "non-finite"),
        ([([1.0], "<=", np.inf)], None, "non-finite"),
        ([([1.0], "<", 0.0)], None, "relation"),
        ([([1.0], "<=", 0.0)], [np.inf], "lower bounds"),
        ([([1.0], "<=", 0.0)], [np.nan], "lower bounds"),
    ],
)
def test_malformed_systems_rejected(rows, bounds, message):
    with pytest.raises(MalformedSystemError, match=message):
        _system(1, rows, bounds)


def test_nonpositive_num_vars_rejected():
    with pytest.raises(MalformedSystemError):
        _system(0, [])


def test_deterministic():
    rng = np.random.default_rng(42)
    rows = [(rng.normal(size=4), "<=", rng.normal()) for _ in range(8)]
    system = _system(4, rows, lower_bounds=[0.0, 0.0, -np.inf, -np.inf])
    first = solve_feasibility(system)
    second = solve_feasibility(system)
    assert first.feasible == second.feasible
    if first.feasible:
        np.testing.assert_array_equal(first.point, second.point)


def _random_system(seed):
    rng = np.random.default_rng(seed)
    num_vars = int(rng.integers(1, 5))
    num_rows = int(rng.integers(1, 7))
    rows = []
    for _ in range(num_rows):
        rel = ("<=", "=", ">=")[rng.integers(0, 3)]
        rows.append((rng.normal(size=num_vars), rel, rng.normal()))
    bounds = np.where(rng.uniform(size=num_vars) < 0.5, 0.0, -np.inf)
    return _system(num_vars, rows, bounds)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), scale=st.floats(1e-3, 1e3))
def test_scale_invariance_of_verdict(seed, scale):
    system = _random_system(seed)
    scaled = LinearSystem.from_rows(
        system.num_vars,
        [
            (scale * system.coefficients[i], system.relations[i], scale * system.rhs[i])
            for i in range(len(system.relations))
        ],
        system.lower_bounds,
    )
    assert solve_feasibility(system).feasible == solve_feasibility(scaled).feasible


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_feasible_points_verify(seed):
    system = _random_system(seed)
    out = solve_feasibility(system)
    if out.feasible:
        assert system.row_violations(out.point).max() <= FEAS_TOL
        finite = np.isfinite(system.lower_bounds)
        assert np.all(out.point[finite] >= system.lower_bounds[finite] - FEAS_TOL)


def test_verdicts_match_vertex_enumeration_oracle():
    # Small random mixed systems, cross-checked against explicit vertex
    # enumeration of the box-truncated polytope.
    agree = 0
    for seed in range(40):
        system = _random_system(seed)
        got = solve_feasibility(system).feasible
        want = feasible_by_vertex_enumeration(
            system.coefficients,
            system.relations,
            system.rhs,
            system.lower_bounds,
        )
        assert got == want, f"seed {seed}: solver={got} oracle={want}"
        agree += 1
    assert agree == 40

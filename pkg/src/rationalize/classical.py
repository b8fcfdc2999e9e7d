"""Afriat-type feasibility tests and reconstructions for consumption data.

Two mirrored problems are solved here. With known budget functions and
unknown utility, rationalizability is equivalent to feasibility of the
inequalities ``u_s - u_t - lambda_t * G[t][s] <= 0`` in values ``u`` and
positive multipliers ``lambda``, and a rationalizing monotone utility is the
pointwise minimum of the affine pieces ``u_k + lambda_k * g_k(.)``. With
known utilities and an unknown budget cost, the mirrored system is
``gbar_s - gbar_t - lambda_t * (U[t][s] - U[t][t]) >= 0`` and the
reconstructed cost is a pointwise maximum of affine pieces anchored at the
observed choices.

Both systems are invariant to uniform positive scaling of the multipliers
and to a uniform additive shift of the value scalars, which is why the
solver can normalize ``lambda >= 1`` and values to a convenient range
without losing generality.

Monotonicity and local non-satiation of the supplied budget and utility
functions cannot be verified from finitely many evaluations; they are a
caller-side assumption.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ClassicalInstance, CrpInstance
from .lp import VERIFY_TOL, FeasibilityOutcome, LinearSystem, solve_feasibility


@dataclass(frozen=True)
class AfriatCertificate:
    """Values and multipliers solving the known-budget inequality system.

    ``multipliers`` are normalized to be >= 1 and ``values`` are shifted so
    their minimum is 1, making every scalar strictly positive as the
    existence statement requires.
    """

    values: np.ndarray
    multipliers: np.ndarray


@dataclass(frozen=True)
class CrpCertificate:
    """Budget levels (>= 0) and multipliers (>= 1) solving the known-utility
    system. The level of the reconstructed cost at choice k equals
    ``values[k]``."""

    values: np.ndarray
    multipliers: np.ndarray


@dataclass(frozen=True)
class PiecewiseUtility:
    """Monotone utility as a minimum of affine pieces over budget evaluations.

    Evaluating at a point requires the vector of all K budget functions
    evaluated there; the library never interpolates bundles itself.
    """

    offsets: np.ndarray
    slopes: np.ndarray

    def value(self, budget_evals) -> float:
        evals = np.asarray(budget_evals, dtype=float)
        return float(np.min(self.offsets + self.slopes * evals))


@dataclass(frozen=True)
class PiecewiseBudgetCost:
    """Budget cost as a maximum of affine pieces in utility gaps.

    ``anchors[k]`` is utility k evaluated at its own choice, so the piece for
    k vanishes there and the cost level at choice k equals ``offsets[k]``.
    """

    offsets: np.ndarray
    slopes: np.ndarray
    anchors: np.ndarray

    def value(self, utility_evals) -> float:
        evals = np.asarray(utility_evals, dtype=float)
        return float(np.max(self.offsets + self.slopes * (evals - self.anchors)))


def afriat_residual(values, multipliers, budget_evals) -> float:
    """Worst violation of the known-budget inequalities by a certificate.

    Nonpositive (up to tolerance) means the certificate is valid.
    """
    u = np.asarray(values, dtype=float)
    lam = np.asarray(multipliers, dtype=float)
    g = np.asarray(budget_evals, dtype=float)
    # row t, column s: u_s - u_t - lambda_t G[t][s]
    return float((u[None, :] - u[:, None] - lam[:, None] * g).max())


def crp_residual(values, multipliers, utility_evals) -> float:
    """Worst violation of the known-utility inequalities by a certificate."""
    v = np.asarray(values, dtype=float)
    lam = np.asarray(multipliers, dtype=float)
    umat = np.asarray(utility_evals, dtype=float)
    gaps = umat - np.diag(umat)[:, None]
    slack = v[None, :] - v[:, None] - lam[:, None] * gaps
    return float((-slack).max())


def afriat_feasibility(instance: ClassicalInstance) -> AfriatCertificate | None:
    """Solve the known-budget feasibility system; ``None`` when infeasible.

    Infeasibility is equivalent to a GARP violation of the budget evaluation
    matrix, so callers wanting a witness should run
    :func:`rationalize.garp.check_garp` on ``instance.budget_evals``.
    """
    g = instance.budget_evals
    k = instance.num_experiments
    rows = []
    for t in range(k):
        for s in range(k):
            coeff = np.zeros(2 * k)
            coeff[s] += 1.0
            coeff[t] -= 1.0
            coeff[k + t] = -g[t, s]
            rows.append((coeff, "<=", 0.0))
    bounds = np.concatenate([np.full(k, -np.inf), np.ones(k)])
    outcome = solve_feasibility(LinearSystem.from_rows(2 * k, rows, bounds))
    if not outcome.feasible:
        return None
    values = outcome.point[:k]
    values = values - values.min() + 1.0  # uniform shift is harmless
    return AfriatCertificate(values=values, multipliers=outcome.point[k:])


def reconstruct_utility(certificate: AfriatCertificate, budget_evals) -> float:
    """Evaluate the reconstructed piecewise-min utility.

    ``budget_evals[k]`` must be budget function k evaluated at the query
    point; at observed data point j that is column j of the instance matrix.
    """
    return PiecewiseUtility(certificate.values, certificate.multipliers).value(
        budget_evals
    )


def crp_feasibility(instance: CrpInstance) -> CrpCertificate | None:
    """Solve the known-utility feasibility system; ``None`` when infeasible.

    The verdict coincides with GARP on
    :func:`rationalize.garp.crp_affordability` of the evaluation matrix.
    """
    outcome = _solve_relative_optimality(instance.utility_evals)
    if not outcome.feasible:
        return None
    k = instance.num_experiments
    return CrpCertificate(values=outcome.point[:k], multipliers=outcome.point[k:])


def _solve_relative_optimality(
    eval_matrix, unit_multipliers: bool = False
) -> FeasibilityOutcome:
    """Feasibility of ``v_j - v_k - lambda_k (M[k][j] - M[k][k]) >= 0``.

    Values are bounded below by 0 (the system only sees their differences)
    and multipliers by 1, or pinned to exactly 1 when ``unit_multipliers``.
    Shared by the known-utility test and the Bayesian attention test, which
    are the same inequalities under the expected-utility variable map.
    """
    m = np.asarray(eval_matrix, dtype=float)
    k = m.shape[0]
    gaps = m - np.diag(m)[:, None]
    num_vars = k if unit_multipliers else 2 * k
    rows = []
    for t in range(k):
        for s in range(k):
            coeff = np.zeros(num_vars)
            coeff[s] += 1.0
            coeff[t] -= 1.0
            if unit_multipliers:
                rows.append((coeff, ">=", gaps[t, s]))
            else:
                coeff[k + t] = -gaps[t, s]
                rows.append((coeff, ">=", 0.0))
    if unit_multipliers:
        bounds = np.zeros(k)
    else:
        bounds = np.concatenate([np.zeros(k), np.ones(k)])
    return solve_feasibility(LinearSystem.from_rows(num_vars, rows, bounds))


def reconstruct_budget_cost(
    certificate: CrpCertificate, utility_evals, utility_data_diag
) -> float:
    """Evaluate the reconstructed piecewise-max budget cost.

    ``utility_evals[k]`` is utility k at the query point and
    ``utility_data_diag[k]`` utility k at its own observed choice. At
    observed choice s the value equals ``certificate.values[s]`` (the piece
    for s is active there).
    """
    return PiecewiseBudgetCost(
        certificate.values,
        certificate.multipliers,
        np.asarray(utility_data_diag, dtype=float),
    ).value(utility_evals)


def appendix_transform(values, bound: float | None = None) -> np.ndarray:
    """Reflect budget levels about an upper bound, making them strictly positive.

    ``bound`` defaults to ``max(values) + 1``. Applying the transform twice
    with the same explicit bound is the identity. This is the change of
    variables that converts between the two sign conventions of the
    known-utility inequality system.
    """
    v = np.asarray(values, dtype=float)
    if bound is None:
        bound = float(v.max()) + 1.0
    return bound - v

"""Blackwell informativeness order between attention strategies.

Kernel ``alpha`` dominates ``alpha_bar`` when ``alpha_bar = alpha @ Q`` for
some row-stochastic garbling matrix Q, i.e. when ``alpha_bar`` is a noisier
version of ``alpha``. Existence of Q is a linear feasibility problem solved
with the package solver; the equality is relaxed to a two-sided band at the
solver tolerance because floating-point kernels rarely match exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lp import FEAS_TOL, LinearSystem, solve_feasibility

#: Row-sum tolerance accepted on input kernels and promised on witnesses.
KERNEL_TOL = 1e-9


class DimensionMismatchError(ValueError):
    """Kernels have incompatible shapes or are not row-stochastic."""


@dataclass(frozen=True)
class GarblingWitness:
    """A row-stochastic Q with ``alpha @ Q`` within tolerance of the target."""

    q: np.ndarray


@dataclass(frozen=True)
class DominanceResult:
    dominates: bool
    witness: GarblingWitness | None = None


def _check_kernel(kernel, name: str) -> np.ndarray:
    arr = np.asarray(kernel, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a 2-d kernel, got {arr.ndim}-d")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatchError(f"{name} has non-finite entries")
    if arr.min() < -KERNEL_TOL:
        raise DimensionMismatchError(f"{name} has negative entries")
    sums = arr.sum(axis=1)
    if np.abs(sums - 1.0).max() > KERNEL_TOL:
        worst = int(np.abs(sums - 1.0).argmax())
        raise DimensionMismatchError(
            f"{name} row {worst} sums to {sums[worst]!r}, not 1"
        )
    return arr


def check_dominance(alpha, alpha_bar) -> DominanceResult:
    """Decide whether ``alpha`` Blackwell dominates ``alpha_bar``.

    Both kernels must be row-stochastic with the same state and observation
    counts. When dominance holds, the result carries some feasible garbling
    witness; no canonical choice is promised.
    """
    alpha = _check_kernel(alpha, "alpha")
    alpha_bar = _check_kernel(alpha_bar, "alpha_bar")
    if alpha.shape != alpha_bar.shape:
        raise DimensionMismatchError(
            f"kernel shapes differ: {alpha.shape} vs {alpha_bar.shape}"
        )
    num_states, num_obs = alpha.shape
    num_vars = num_obs * num_obs  # Q[y_from, y_to], row-major

    rows = []
    for x in range(num_states):
        for y in range(num_obs):
            coeff = np.zeros(num_vars)
            # (alpha @ Q)[x, y] = sum_yf alpha[x, yf] * Q[yf, y]
            coeff[y::num_obs] = alpha[x, :]
            rows.append((coeff, "<=", alpha_bar[x, y] + FEAS_TOL))
            rows.append((coeff, ">=", alpha_bar[x, y] - FEAS_TOL))
    for y_from in range(num_obs):
        coeff = np.zeros(num_vars)
        coeff[y_from * num_obs : (y_from + 1) * num_obs] = 1.0
        rows.append((coeff, "=", 1.0))

    outcome = solve_feasibility(
        LinearSystem.from_rows(num_vars, rows, np.zeros(num_vars))
    )
    if not outcome.feasible:
        return DominanceResult(dominates=False)
    q = outcome.point.reshape(num_obs, num_obs)
    return DominanceResult(dominates=True, witness=GarblingWitness(q=q))


def random_garbling(alpha, seed) -> tuple[np.ndarray, np.ndarray]:
    """Sample a garbling Q and return ``(alpha @ Q, Q)``.

    Rows of Q are independent normalized positive draws, so the output kernel
    is Blackwell dominated by ``alpha`` by construction. ``seed`` may be an
    int or a ``numpy.random.Generator``; fixed seeds give identical output.
    """
    alpha = _check_kernel(alpha, "alpha")
    rng = np.random.default_rng(seed)
    num_obs = alpha.shape[1]
    q = rng.gamma(shape=1.0, scale=1.0, size=(num_obs, num_obs)) + 1e-3
    q /= q.sum(axis=1, keepdims=True)
    return alpha @ q, q


def random_kernel(num_states: int, num_observations: int, seed) -> np.ndarray:
    """Sample a row-stochastic kernel with independent Dirichlet-style rows."""
    rng = np.random.default_rng(seed)
    rows = rng.gamma(shape=1.0, scale=1.0, size=(num_states, num_observations)) + 1e-6
    return rows / rows.sum(axis=1, keepdims=True)

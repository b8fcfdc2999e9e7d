"""Forward generators for ground-truth corpora.

Classical instances come from a Cobb-Douglas maximizer under random linear
budgets, so they are rationalizable by construction. Bayes instances come
from an agent that picks, for each experiment, the best strategy on a finite
garbling grid under a ground-truth cost (scaled mutual information between
state and observation, which is convex in the kernel and monotone under
garbling). Relative optimality over the grid implies the attention
inequalities over the chosen strategies, so these instances are feasible by
construction. ``perturb_violation`` then manufactures infeasible instances
by swapping or degrading strategies until the test breaks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bayesian
from .data import BayesInstance, ClassicalInstance

FAMILIES = ("cobb_douglas_linear_budget", "garbling_grid_rational", "niac_violation")


class NoViolationFoundError(RuntimeError):
    """Perturbation budget exhausted without producing an infeasible instance."""


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for the forward generators; dimensions default per family."""

    seed: int
    num_experiments: int
    family: str = "garbling_grid_rational"
    bundle_dim: int = 3
    num_states: int = 3
    num_observations: int = 3
    num_actions: int = 3
    grid_size: int = 40
    cost_multiplier: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.num_experiments < 1:
            raise ValueError("need at least one experiment")
        if min(self.bundle_dim, self.num_states, self.num_observations, self.num_actions) < 1:
            raise ValueError("dimensions must be positive")


def gen_classical(config: GeneratorConfig) -> ClassicalInstance:
    """Bundles chosen by a Cobb-Douglas maximizer under random linear budgets.

    Budget k evaluated at bundle j is ``p_k . beta_j - 1``; each bundle
    spends its unit budget exactly, so the diagonal is zero.
    """
    rng = np.random.default_rng(config.seed)
    k, m = config.num_experiments, config.bundle_dim
    prices = rng.uniform(0.5, 2.0, size=(k, m))
    weights = rng.uniform(0.2, 1.0, size=m)
    weights /= weights.sum()
    bundles = weights[None, :] / prices
    budget_evals = bundles @ prices.T - 1.0  # entry [j][k] = p_k . beta_j - 1
    budget_evals = budget_evals.T
    np.fill_diagonal(budget_evals, 0.0)
    return ClassicalInstance(bundles=bundles, budget_evals=budget_evals)


def _mutual_information(prior: np.ndarray, kernel: np.ndarray) -> float:
    joint = prior[:, None] * kernel
    marginal = joint.sum(axis=0)
    support = joint > 0.0
    ratio = np.ones_like(joint)
    np.divide(kernel, marginal[None, :], out=ratio, where=support)
    return float((joint[support] * np.log(ratio[support])).sum())


def _base_kernel(rng, num_states: int, num_observations: int) -> np.ndarray:
    peaked = np.zeros((num_states, num_observations))
    peaked[np.arange(num_states), np.arange(num_states) % num_observations] = 1.0
    base = peaked + 0.1 * rng.uniform(size=(num_states, num_observations))
    return base / base.sum(axis=1, keepdims=True)


def gen_bayes_rational(config: GeneratorConfig) -> BayesInstance:
    """Attention data from grid-restricted rational choice under a convex cost.

    A garbling chain starting from an informative base kernel (plus the
    uniform kernel) forms the choice grid; each experiment's strategy
    maximizes ``multiplier_k * J - cost`` over the grid, lowest grid index on
    ties. The chosen grid indices are recorded in ``meta``.
    """
    rng = np.random.default_rng(config.seed)
    k = config.num_experiments
    x, y, a = config.num_states, config.num_observations, config.num_actions

    prior = rng.dirichlet(np.ones(x))
    # A noisy state-action matching per experiment makes attention genuinely
    # valuable, so different experiments pick differently informative kernels.
    payoffs = rng.uniform(0.0, 1.0, size=(k, x, a))
    for table in payoffs:
        table[np.arange(x), rng.integers(0, a, size=x)] += rng.uniform(0.5, 1.5)
    multipliers = np.exp(rng.uniform(0.0, 1.8, size=k))  # spread within [1, ~6]

    grid = [_base_kernel(rng, x, y)]
    for _ in range(max(0, config.grid_size - 2)):
        mix = rng.uniform(0.02, 0.25)
        q = (1.0 - mix) * np.eye(y) + mix * rng.dirichlet(np.ones(y), size=y)
        grid.append(grid[-1] @ q)
    grid.append(bayesian.uniform_strategy(x, y))
    grid_arr = np.stack(grid)

    cost_on_grid = config.cost_multiplier * np.array(
        [_mutual_information(prior, kernel) for kernel in grid]
    )
    probe = BayesInstance(
        prior=prior, payoffs=payoffs, strategies=np.repeat(grid_arr[:1], k, axis=0)
    )
    j_on_grid = bayesian.batch_expected_utilities(probe, grid_arr)  # (grid, K)
    net = multipliers[None, :] * j_on_grid - cost_on_grid[:, None]
    chosen = net.argmax(axis=0)  # lowest grid index on ties
    return BayesInstance(
        prior=prior,
        payoffs=payoffs,
        strategies=grid_arr[chosen],
        meta={"chosen_grid_indices": [int(c) for c in chosen]},
    )


def perturb_violation(
    instance: BayesInstance, seed: int, max_trials: int = 60
) -> BayesInstance:
    """Perturb a feasible instance until the attention test fails.

    Alternates between swapping two strategies and degrading one strategy by
    a strong garbling, re-testing after each trial. Raises
    :class:`NoViolationFoundError` when the budget runs out (for example when
    all payoff tables are effectively identical and any assignment is
    rationalizable).
    """
    rng = np.random.default_rng(seed)
    k = instance.num_experiments
    if k < 2:
        raise NoViolationFoundError("need at least two experiments to perturb")
    y = instance.num_observations
    for trial in range(max_trials):
        strategies = instance.strategies.copy()
        if trial % 2 == 0:
            i, j = rng.choice(k, size=2, replace=False)
            strategies[[i, j]] = strategies[[j, i]]
        else:
            i = int(rng.integers(k))
            q = rng.dirichlet(np.full(y, 50.0), size=y)  # close to uniform rows
            strategies[i] = strategies[i] @ q
        candidate = BayesInstance(
            prior=instance.prior,
            payoffs=instance.payoffs,
            strategies=strategies,
            meta={"perturbed_from_trial": trial},
        )
        if bayesian.brp_feasibility(bayesian.j_matrix(candidate)) is None:
            return candidate
    raise NoViolationFoundError(f"no violation found in {max_trials} trials")

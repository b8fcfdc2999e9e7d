"""Rationalizability tests for Bayesian attention data.

A decision maker with a prior over states picks, for each experiment k, an
attention strategy (a state -> observation kernel) and then an action that
maximizes conditional expected payoff given the observation. The value of a
strategy against payoff table k is the expected utility ``J``: the sum over
observations of the best achievable prior-weighted payoff. Rationalizability
by a monotone information-acquisition cost is equivalent to feasibility of
the inequalities

    c_j - c_k - lambda_k * (J[k][j] - J[k][k]) >= 0   for all k, j

in costs ``c >= 0`` and multipliers ``lambda >= 1`` (the generalized
no-improving-attention-cycles condition), where ``J[k][j]`` is the expected
utility of strategy j against payoff table k. With multipliers pinned to 1
the condition collapses to cyclical monotonicity: no cycle of experiment
reassignments may produce a positive total gain, which is decided here by
Bellman-Ford negative-cycle search.

A feasible certificate yields a rationalizing cost as a pointwise maximum of
affine pieces in ``J``; the cost is normalized by subtracting its value at
the non-informative uniform kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classical import _solve_relative_optimality, crp_residual
from .data import BayesInstance
from .lp import VERIFY_TOL

#: Chain enumeration bound for the telescoped-gain cost estimate.
MAX_CHAIN_EXPERIMENTS = 12


class InstanceTooLargeError(ValueError):
    """Too many experiments for subset-chain enumeration."""


class UnboundedCostError(RuntimeError):
    """The telescoped-gain cost estimate diverges because cyclical
    monotonicity fails on the data."""


@dataclass(frozen=True)
class ActionPolicy:
    """Observation -> action map; each action attains the conditional optimum."""

    actions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "actions", np.asarray(self.actions, dtype=int))


@dataclass(frozen=True)
class NiasReport:
    """Outcome of the no-improving-action-switches check for one experiment."""

    ok: bool
    worst_gap: float
    observation: int | None = None
    action: int | None = None


@dataclass(frozen=True)
class BrpCertificate:
    """Costs (>= 0) and multipliers (>= 1) solving the attention inequalities."""

    costs: np.ndarray
    multipliers: np.ndarray


@dataclass(frozen=True)
class NiacReport:
    """Cycle test outcome; carries a witnessing cycle when it fails."""

    holds: bool
    cycle: tuple[int, ...] | None = None
    cycle_sum: float | None = None


def uniform_strategy(num_states: int, num_observations: int) -> np.ndarray:
    """The non-informative kernel: every state emits observations uniformly."""
    return np.full((num_states, num_observations), 1.0 / num_observations)


def _kernel(instance: BayesInstance, strategy) -> np.ndarray:
    if isinstance(strategy, (int, np.integer)):
        index = int(strategy)
        if not 0 <= index < instance.num_experiments:
            raise IndexError(f"strategy index {index} out of range")
        return instance.strategies[index]
    kernel = np.asarray(strategy, dtype=float)
    if kernel.ndim != 2 or kernel.shape[0] != instance.num_states:
        raise ValueError(
            f"kernel must be {instance.num_states} x Y, got shape {kernel.shape}"
        )
    return kernel


def _action_values(instance: BayesInstance, kernel, payoff_index: int) -> np.ndarray:
    # entry [y, a]: sum_x prior[x] * kernel[x, y] * payoff[x, a]
    mass = kernel * instance.prior[:, None]
    return mass.T @ instance.payoffs[payoff_index]


def expected_utility(instance: BayesInstance, strategy, payoff_index: int) -> float:
    """Expected utility of an attention strategy against one payoff table.

    ``strategy`` is an experiment index or an explicit kernel. For each
    observation the action maximizing the prior-weighted payoff is taken
    (lowest action index on ties; the value is tie-invariant), and
    observations with zero marginal probability contribute nothing.
    """
    if not 0 <= payoff_index < instance.num_experiments:
        raise IndexError(f"payoff index {payoff_index} out of range")
    values = _action_values(instance, _kernel(instance, strategy), payoff_index)
    return float(values.max(axis=1).sum())


def optimal_policy(instance: BayesInstance, strategy, payoff_index: int) -> ActionPolicy:
    """The argmax action per observation, lowest action index on ties."""
    if not 0 <= payoff_index < instance.num_experiments:
        raise IndexError(f"payoff index {payoff_index} out of range")
    values = _action_values(instance, _kernel(instance, strategy), payoff_index)
    return ActionPolicy(actions=values.argmax(axis=1))


def check_nias(
    instance: BayesInstance,
    strategy_index: int,
    policy: ActionPolicy | None = None,
    tol: float = VERIFY_TOL,
) -> NiasReport:
    """No improving action switches for one experiment under ``policy``.

    Passes when, for every observation with positive marginal probability,
    no alternative action beats the policy's action in prior-weighted payoff.
    Unreachable observations are skipped (their conditional expectation is
    undefined and they carry no payoff weight). ``policy`` defaults to the
    optimal policy, which passes by construction.
    """
    if policy is None:
        policy = optimal_policy(instance, strategy_index, strategy_index)
    actions = policy.actions
    if actions.shape != (instance.num_observations,):
        raise ValueError(
            f"policy must map all {instance.num_observations} observations"
        )
    values = _action_values(
        instance, _kernel(instance, strategy_index), strategy_index
    )
    marginals = (instance.strategies[strategy_index] * instance.prior[:, None]).sum(
        axis=0
    )
    reachable = marginals > 0.0
    if not reachable.any():
        return NiasReport(ok=True, worst_gap=0.0)
    chosen = values[np.arange(values.shape[0]), actions]
    gaps = values - chosen[:, None]
    gaps[~reachable, :] = -np.inf
    worst_flat = int(gaps.argmax())
    y, a = np.unravel_index(worst_flat, gaps.shape)
    worst = float(gaps[y, a])
    if worst <= tol:
        return NiasReport(ok=True, worst_gap=worst)
    return NiasReport(ok=False, worst_gap=worst, observation=int(y), action=int(a))


def j_matrix(instance: BayesInstance) -> np.ndarray:
    """Cross-evaluation ``[k][j]`` = expected utility of strategy j against
    payoff table k."""
    mass = instance.strategies * instance.prior[None, :, None]  # (K, X, Y)
    values = np.einsum("jxy,kxa->kjya", mass, instance.payoffs)
    return values.max(axis=3).sum(axis=2)


def batch_expected_utilities(instance: BayesInstance, kernels) -> np.ndarray:
    """Expected utility of each kernel in a batch against every payoff table.

    ``kernels`` has shape (n, X, Y); the result has shape (n, K). This is the
    vectorized path used by sampled audits.
    """
    kernels = np.asarray(kernels, dtype=float)
    values = np.einsum("x,nxy,kxa->nkya", instance.prior, kernels, instance.payoffs)
    return values.max(axis=3).sum(axis=2)


def brp_feasibility(jmat) -> BrpCertificate | None:
    """Feasibility of the attention inequalities; ``None`` when infeasible.

    These are the same inequalities as the known-utility consumption test
    applied to the expected-utility cross-evaluation matrix, so the solve is
    shared with :mod:`rationalize.classical`.
    """
    jmat = np.asarray(jmat, dtype=float)
    outcome = _solve_relative_optimality(jmat)
    if not outcome.feasible:
        return None
    k = jmat.shape[0]
    return BrpCertificate(costs=outcome.point[:k], multipliers=outcome.point[k:])


def brp_feasibility_unit_lambda(jmat) -> BrpCertificate | None:
    """The attention inequalities with every multiplier pinned to 1.

    Feasibility here is equivalent to :func:`check_niac_cycles` passing; the
    two are implemented independently (linear programming versus negative
    cycle search) and cross-checked in the test suite.
    """
    jmat = np.asarray(jmat, dtype=float)
    outcome = _solve_relative_optimality(jmat, unit_multipliers=True)
    if not outcome.feasible:
        return None
    return BrpCertificate(costs=outcome.point, multipliers=np.ones(jmat.shape[0]))


def brp_residual(costs, multipliers, jmat) -> float:
    """Worst violation of the attention inequalities by a certificate."""
    return crp_residual(costs, multipliers, jmat)


def _extract_cycle(pred: np.ndarray, start: int, limit: int) -> tuple[int, ...] | None:
    node = start
    for _ in range(limit + 1):
        if pred[node] < 0:
            return None
        node = int(pred[node])
    cycle = [node]
    cur = int(pred[node])
    while cur != node:
        cycle.append(cur)
        if len(cycle) > limit:
            return None
        cur = int(pred[cur])
    cycle.reverse()
    return tuple(cycle)


def _cycle_sum(weights: np.ndarray, cycle: tuple[int, ...]) -> float:
    total = 0.0
    for i, node in enumerate(cycle):
        total += weights[node, cycle[(i + 1) % len(cycle)]]
    return float(total)


def _min_simple_cycle(weights: np.ndarray) -> tuple[float, tuple[int, ...] | None]:
    # Exact minimum-sum simple cycle by subset dynamic programming; used only
    # when Bellman-Ford flags a borderline cycle that needs an exact decision.
    count = weights.shape[0]
    best_sum = np.inf
    best_cycle = None
    for anchor in range(count):
        nodes = list(range(anchor, count))
        n = len(nodes)
        if n < 2:
            continue
        size = 1 << n
        dp = np.full((size, n), np.inf)
        parent = np.full((size, n), -1, dtype=int)
        dp[1, 0] = 0.0
        for mask in range(1, size):
            if not mask & 1:
                continue
            for last in range(n):
                if not mask & (1 << last) or not np.isfinite(dp[mask, last]):
                    continue
                for nxt in range(1, n):
                    bit = 1 << nxt
                    if mask & bit:
                        continue
                    cand = dp[mask, last] + weights[nodes[last], nodes[nxt]]
                    if cand < dp[mask | bit, nxt]:
                        dp[mask | bit, nxt] = cand
                        parent[mask | bit, nxt] = last
        for mask in range(1, size):
            if not mask & 1:
                continue
            for last in range(1, n):
                if not np.isfinite(dp[mask, last]):
                    continue
                total = dp[mask, last] + weights[nodes[last], nodes[0]]
                if total < best_sum:
                    path = [last]
                    m, cur = mask, last
                    while parent[m, cur] >= 0:
                        prev = parent[m, cur]
                        m ^= 1 << cur
                        cur = prev
                        path.append(cur)
                    best_sum = float(total)
                    best_cycle = tuple(nodes[i] for i in reversed(path))
    return best_sum, best_cycle


def check_niac_cycles(jmat, tol: float = VERIFY_TOL) -> NiacReport:
    """No improving attention cycles: every cycle of experiment reassignments
    must lose at least ``-tol`` in total expected utility.

    The directed graph on experiments with edge weight
    ``J[k][k] - J[k][j]`` is searched for a cycle of total weight below
    ``-tol`` by Bellman-Ford from a virtual source. Edge weights are shifted
    up by ``tol / K`` so that cycles within roundoff of zero do not trigger
    detection; a flagged cycle is then confirmed against its raw sum, with an
    exact subset search as the tie-breaker on borderline instances.
    """
    jmat = np.asarray(jmat, dtype=float)
    count = jmat.shape[0]
    if count < 2:
        return NiacReport(holds=True)
    weights = np.diag(jmat)[:, None] - jmat
    shifted = weights + tol / count
    np.fill_diagonal(shifted, np.inf)

    dist = np.zeros(count)
    pred = np.full(count, -1, dtype=int)
    for _ in range(count):
        cand = dist[:, None] + shifted
        mins = cand.min(axis=0)
        improved = mins < dist
        if not improved.any():
            return NiacReport(holds=True)
        pred = np.where(improved, cand.argmin(axis=0), pred)
        dist = np.where(improved, mins, dist)
    cand = dist[:, None] + shifted
    mins = cand.min(axis=0)
    improved = mins < dist
    if not improved.any():
        return NiacReport(holds=True)
    start = int(np.nonzero(improved)[0][0])
    pred[start] = int(cand[:, start].argmin())
    cycle = _extract_cycle(pred, start, count)
    if cycle is not None:
        total = _cycle_sum(weights, cycle)
        if total < -tol:
            return NiacReport(holds=False, cycle=cycle, cycle_sum=total)
    if count <= MAX_CHAIN_EXPERIMENTS:
        total, cycle = _min_simple_cycle(weights)
        if total < -tol:
            return NiacReport(holds=False, cycle=cycle, cycle_sum=float(total))
        return NiacReport(holds=True)
    # Large instance in the borderline band: report the flagged cycle.
    total = _cycle_sum(weights, cycle) if cycle else None
    return NiacReport(holds=False, cycle=cycle, cycle_sum=total)


@dataclass(frozen=True)
class InfoCost:
    """Information-acquisition cost as a maximum of affine pieces in expected
    utility, minus a normalizer.

    Piece i contributes ``offsets[i] + multipliers[i] * (J(kernel, payoff
    payoff_indices[i]) - anchors[i])``. With ``normalizer`` equal to the raw
    value at the uniform kernel the cost vanishes there.
    """

    offsets: np.ndarray
    multipliers: np.ndarray
    anchors: np.ndarray
    payoff_indices: np.ndarray
    instance: BayesInstance = field(compare=False)
    normalizer: float = 0.0

    @property
    def num_pieces(self) -> int:
        return len(self.offsets)

    def values(self, kernels) -> np.ndarray:
        """Evaluate at a batch of kernels of shape (n, X, Y)."""
        kernels = np.asarray(kernels, dtype=float)
        j_all = batch_expected_utilities(self.instance, kernels)
        j_pieces = j_all[:, self.payoff_indices]
        piece_values = self.offsets + self.multipliers * (j_pieces - self.anchors)
        return piece_values.max(axis=1) - self.normalizer

    def value(self, kernel) -> float:
        return float(self.values(np.asarray(kernel, dtype=float)[None, :, :])[0])

    __call__ = value


def reconstruct_info_cost(
    certificate: BrpCertificate, jmat, instance: BayesInstance
) -> InfoCost:
    """Build the rationalizing cost from a feasible certificate.

    At every observed strategy the cost equals the certificate cost (its own
    piece is active there by the certificate inequalities), and for every
    kernel and experiment the net value ``multiplier * J - cost`` is maximized
    at the observed strategy.
    """
    jmat = np.asarray(jmat, dtype=float)
    k = jmat.shape[0]
    return InfoCost(
        offsets=np.asarray(certificate.costs, dtype=float),
        multipliers=np.asarray(certificate.multipliers, dtype=float),
        anchors=np.diag(jmat).copy(),
        payoff_indices=np.arange(k),
        instance=instance,
    )


def normalize_cost(cost: InfoCost, instance: BayesInstance) -> InfoCost:
    """Shift the cost so the non-informative uniform kernel costs exactly zero.

    All evaluations shift by the same constant, so orderings and the
    rationalization inequalities are unaffected.
    """
    alpha0 = uniform_strategy(instance.num_states, instance.num_observations)
    shift = cost.value(alpha0)
    return InfoCost(
        offsets=cost.offsets,
        multipliers=cost.multipliers,
        anchors=cost.anchors,
        payoff_indices=cost.payoff_indices,
        instance=cost.instance,
        normalizer=cost.normalizer + shift,
    )


def rockafellar_offsets(jmat, tol: float = VERIFY_TOL) -> np.ndarray:
    """Best telescoped expected-utility gain over simple chains of distinct
    experiments ending at each experiment.

    Entry k is the maximum over chains ``k_1 -> ... -> k_m = k`` of the sum
    of gains ``J[k_i][k_{i+1}] - J[k_i][k_i]``. Finite only when cyclical
    monotonicity holds (otherwise repeats could pump the sum without bound,
    and :class:`UnboundedCostError` is raised).
    """
    jmat = np.asarray(jmat, dtype=float)
    count = jmat.shape[0]
    if count > MAX_CHAIN_EXPERIMENTS:
        raise InstanceTooLargeError(
            f"chain enumeration supports at most {MAX_CHAIN_EXPERIMENTS} experiments, got {count}"
        )
    if not check_niac_cycles(jmat, tol).holds:
        raise UnboundedCostError("attention cycles with positive gain exist")
    gains = jmat - np.diag(jmat)[:, None]  # gains[k][j]: switching k's strategy to j
    best = np.full((1 << count, count), -np.inf)
    for k in range(count):
        best[1 << k, k] = 0.0
    for mask in range(1, 1 << count):
        for last in range(count):
            if not mask & (1 << last):
                continue
            cur = best[mask, last]
            if cur == -np.inf:
                continue
            for nxt in range(count):
                bit = 1 << nxt
                if mask & bit:
                    continue
                cand = cur + gains[last, nxt]
                if cand > best[mask | bit, nxt]:
                    best[mask | bit, nxt] = cand
    return best.max(axis=0)


def rockafellar_cost(jmat, target, instance: BayesInstance | None = None) -> float:
    """Point estimate of the information cost at ``target`` by chaining
    telescoped gains through the dataset (floored at the empty chain).

    ``target`` is an experiment index or an explicit kernel; evaluating a
    kernel requires ``instance`` for the expected utilities.
    """
    jmat = np.asarray(jmat, dtype=float)
    offsets = rockafellar_offsets(jmat)
    diag = np.diag(jmat)
    if isinstance(target, (int, np.integer)):
        index = int(target)
        if not 0 <= index < jmat.shape[0]:
            raise IndexError(f"target index {index} out of range")
        terminal = jmat[:, index] - diag
    else:
        if instance is None:
            raise ValueError("evaluating a kernel target requires the instance")
        j_vals = batch_expected_utilities(
            instance, np.asarray(target, dtype=float)[None, :, :]
        )[0]
        terminal = j_vals - diag
    return float(max(0.0, (offsets + terminal).max()))


def rockafellar_evaluator(jmat, instance: BayesInstance) -> InfoCost:
    """The chain-gain cost as a reusable piecewise evaluator.

    Pieces are the per-experiment chain offsets with unit multipliers, plus a
    zero piece implementing the empty-chain floor.
    """
    jmat = np.asarray(jmat, dtype=float)
    count = jmat.shape[0]
    offsets = rockafellar_offsets(jmat)
    return InfoCost(
        offsets=np.concatenate([offsets, [0.0]]),
        multipliers=np.concatenate([np.ones(count), [0.0]]),
        anchors=np.concatenate([np.diag(jmat), [0.0]]),
        payoff_indices=np.concatenate([np.arange(count), [0]]),
        instance=instance,
    )

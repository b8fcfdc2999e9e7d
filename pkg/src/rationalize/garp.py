"""General Axiom of Revealed Preference over affordability matrices.

The input is a K x K matrix ``afford`` where ``afford[k][j] <= 0`` means the
choice made in experiment j was affordable under the budget of experiment k
(for consumption data, the budget function of k evaluated at bundle j). The
revealed-preference relation is the transitive closure of those affordability
edges, and GARP holds when no revealed preference ends in a strict reversal:
whenever k is revealed preferred to j, the choice of k must not be strictly
inside j's budget.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .lp import VERIFY_TOL


@dataclass(frozen=True)
class PreferenceRelation:
    """Direct affordability edges and their reflexive-transitive closure."""

    direct: np.ndarray
    closure: np.ndarray

    @property
    def num_experiments(self) -> int:
        return self.direct.shape[0]


@dataclass(frozen=True)
class GarpViolation:
    """A revealed-preference chain ``chain`` from k to j with a strict reversal.

    Every consecutive pair along ``chain`` is a direct affordability edge and
    ``afford[j][k]`` is strictly negative.
    """

    k: int
    j: int
    chain: tuple[int, ...]


@dataclass(frozen=True)
class GarpReport:
    holds: bool
    violation: GarpViolation | None = None


def build_relation(afford, tol: float = VERIFY_TOL) -> PreferenceRelation:
    """Threshold ``afford`` into direct edges and close them transitively.

    An edge k -> j exists when ``afford[k][j] <= tol``; the tolerance keeps
    verdicts stable when the matrix comes from floating-point evaluation.
    Closure is computed by boolean Floyd-Warshall and is reflexive.
    """
    afford = np.asarray(afford, dtype=float)
    if afford.ndim != 2 or afford.shape[0] != afford.shape[1]:
        raise ValueError(f"affordability matrix must be square, got {afford.shape}")
    if not np.all(np.isfinite(afford)):
        raise ValueError("affordability matrix has non-finite entries")
    direct = afford <= tol
    closure = direct | np.eye(len(afford), dtype=bool)
    for mid in range(len(afford)):
        closure |= closure[:, mid : mid + 1] & closure[mid : mid + 1, :]
    return PreferenceRelation(direct=direct, closure=closure)


def _shortest_chain(direct: np.ndarray, start: int, goal: int) -> tuple[int, ...]:
    # BFS over direct edges; callers only ask for pairs inside the closure.
    parents = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal and node != start:
            break
        for nxt in np.nonzero(direct[node])[0]:
            nxt = int(nxt)
            if nxt not in parents:
                parents[nxt] = node
                queue.append(nxt)
    if goal not in parents or goal == start:
        raise RuntimeError("no chain found for a closure pair")
    chain = [goal]
    while chain[-1] != start:
        chain.append(parents[chain[-1]])
    return tuple(reversed(chain))


def check_garp(afford, tol: float = VERIFY_TOL) -> GarpReport:
    """Decide GARP for an affordability matrix.

    Holds when for every pair k != j with k revealed preferred to j,
    ``afford[j][k] >= -tol``. On failure the report carries the
    lexicographically smallest violating pair with a shortest witnessing
    chain of direct edges.
    """
    afford = np.asarray(afford, dtype=float)
    relation = build_relation(afford, tol)
    n = relation.num_experiments
    reversal = relation.closure & (afford.T < -tol)
    np.fill_diagonal(reversal, False)
    if not reversal.any():
        return GarpReport(holds=True)
    k, j = np.argwhere(reversal)[0]
    chain = _shortest_chain(relation.direct, int(k), int(j))
    return GarpReport(holds=False, violation=GarpViolation(int(k), int(j), chain))


def crp_affordability(utility_evals) -> np.ndarray:
    """Affordability matrix when the budget role is played by utility gaps.

    Given ``utility_evals[t][s]`` (utility t evaluated at choice s), entry
    ``[k][j]`` is the gap between utility k at its own choice and at choice j.
    Choice j is then "affordable" at k exactly when it is weakly better for
    utility k than k's own choice.
    """
    umat = np.asarray(utility_evals, dtype=float)
    if umat.ndim != 2 or umat.shape[0] != umat.shape[1]:
        raise ValueError(f"utility evaluation matrix must be square, got {umat.shape}")
    return np.diag(umat)[:, None] - umat

"""Independent brute-force oracles used to cross-check the library.

Each oracle re-derives a verdict or value from first principles (explicit
enumeration, vertex enumeration, matrix inversion) without sharing code with
the implementation it checks.
"""

import itertools

import numpy as np


def garp_by_chain_search(afford, tol=1e-7):
    """GARP by explicit chain search.

    For every ordered pair (k, j) whose reversal would be strict, search for
    an affordability chain from k to j by depth-first enumeration of simple
    index sequences over direct edges.
    """
    afford = np.asarray(afford, dtype=float)
    n = len(afford)
    direct = afford <= tol
    for k in range(n):
        for j in range(n):
            if k == j or not afford[j, k] < -tol:
                continue
            stack = [(k, frozenset({k}))]
            while stack:
                node, used = stack.pop()
                if direct[node, j]:
                    return False
                for nxt in range(n):
                    if nxt != j and nxt not in used and direct[node, nxt]:
                        stack.append((nxt, used | {nxt}))
    return True


def feasible_by_vertex_enumeration(coefficients, relations, rhs, lower_bounds, box=1e4, tol=1e-7):
    """Feasibility by enumerating candidate vertices of the box-truncated polytope.

    Converts every relation and bound to <= form, then tries every choice of
    n constraints as active equalities. The truncated feasible set is a
    bounded polyhedron, so it is nonempty iff one of these basic points
    satisfies all constraints.
    """
    a = np.asarray(coefficients, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = a.shape[1]
    ineq_a, ineq_b = [], []
    for row, rel, b in zip(a, relations, rhs):
        if rel in ("<=", "="):
            ineq_a.append(row)
            ineq_b.append(b)
        if rel in (">=", "="):
            ineq_a.append(-row)
            ineq_b.append(-b)
    for i in range(n):
        unit = np.zeros(n)
        unit[i] = -1.0
        bound = lower_bounds[i] if np.isfinite(lower_bounds[i]) else -box
        ineq_a.append(unit)
        ineq_b.append(-bound)
        ineq_a.append(-unit)
        ineq_b.append(box)
    ineq_a = np.asarray(ineq_a)
    ineq_b = np.asarray(ineq_b)
    m = len(ineq_a)
    for combo in itertools.combinations(range(m), n):
        sub_a = ineq_a[list(combo)]
        sub_b = ineq_b[list(combo)]
        try:
            vertex = np.linalg.solve(sub_a, sub_b)
        except np.linalg.LinAlgError:
            continue
        if np.all(ineq_a @ vertex <= ineq_b + tol):
            return True
    return False


def expected_utility_by_policy_enumeration(prior, payoff, kernel):
    """Best expected payoff over all deterministic observation -> action maps."""
    prior = np.asarray(prior, dtype=float)
    payoff = np.asarray(payoff, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    num_obs = kernel.shape[1]
    num_actions = payoff.shape[1]
    best = -np.inf
    for policy in itertools.product(range(num_actions), repeat=num_obs):
        total = 0.0
        for x in range(kernel.shape[0]):
            for y in range(num_obs):
                total += prior[x] * kernel[x, y] * payoff[x, policy[y]]
        best = max(best, total)
    return best


def niac_by_cycle_enumeration(jmat, tol=1e-7):
    """Check every simple cycle of experiments explicitly.

    Returns (holds, worst_cycle, worst_sum) where the sum is the total
    expected-utility loss around the worst cycle.
    """
    jmat = np.asarray(jmat, dtype=float)
    n = len(jmat)
    worst_sum = np.inf
    worst_cycle = None
    for size in range(2, n + 1):
        for subset in itertools.combinations(range(n), size):
            anchor = subset[0]
            for ordering in itertools.permutations(subset[1:]):
                cycle = (anchor,) + ordering
                total = sum(
                    jmat[c, c] - jmat[c, cycle[(i + 1) % size]]
                    for i, c in enumerate(cycle)
                )
                if total < worst_sum:
                    worst_sum = total
                    worst_cycle = cycle
    if worst_cycle is None or worst_sum >= -tol:
        return True, worst_cycle, worst_sum
    return False, worst_cycle, worst_sum


def chain_cost_by_permutation_enumeration(jmat, target_column):
    """Best telescoped gain over every ordered chain of distinct experiments
    ending at a data strategy, including the empty chain."""
    jmat = np.asarray(jmat, dtype=float)
    n = len(jmat)
    best = 0.0
    for size in range(1, n + 1):
        for chain in itertools.permutations(range(n), size):
            total = 0.0
            for i in range(size - 1):
                total += jmat[chain[i], chain[i + 1]] - jmat[chain[i], chain[i]]
            last = chain[-1]
            total += jmat[last, target_column] - jmat[last, last]
            best = max(best, total)
    return best


def reverse_dominance_impossible(alpha_mixed):
    """For a square strictly mixed invertible kernel, the only solution of
    ``alpha_mixed @ Q = identity`` is its inverse; dominance of the identity
    is impossible exactly when that inverse has a negative entry."""
    q = np.linalg.inv(np.asarray(alpha_mixed, dtype=float))
    return q.min() < -1e-9

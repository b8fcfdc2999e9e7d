"""Feasibility solver for small dense systems of linear relations.

Decides whether ``{x : a_i . x (<=, =, >=) b_i for all i, x >= lower_bounds}``
is nonempty, via a phase-1 simplex on the dense standard form with Bland's
anti-cycling pivot rule. Every instance in this package is tiny (tens of
variables, at most a few thousand rows), so a dense tableau is appropriate;
there is deliberately no objective, no sparsity and no exact arithmetic.

Strict positivity constraints of the feasibility systems built elsewhere in
the package are encoded by normalized lower bounds (multipliers >= 1, value
scalars >= 0 or free); see the calling modules for why those normalizations
lose no generality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Solver-side feasibility threshold: phase-1 optimum above this means infeasible.
FEAS_TOL = 1e-9

#: Threshold used everywhere downstream when re-verifying certificates and
#: thresholding evaluation matrices.
VERIFY_TOL = 1e-7

_PIVOT_TOL = 1e-10
_MAX_PIVOTS = 200_000

_RELATIONS = ("<=", "=", ">=")


class MalformedSystemError(ValueError):
    """System has a dimension mismatch, a bad relation, or a non-finite entry."""


@dataclass(frozen=True)
class LinearSystem:
    """Dense relation system ``coefficients @ x (relations) rhs`` with lower bounds.

    ``lower_bounds`` entries may be ``-inf`` for free variables. Upper bounds
    are not supported; callers encode them as rows when needed.
    """

    num_vars: int
    coefficients: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower_bounds: np.ndarray

    @classmethod
    def from_rows(cls, num_vars, rows, lower_bounds=None):
        """Build a system from ``(coefficients, relation, rhs)`` triples.

        ``lower_bounds`` defaults to all variables free.
        """
        if num_vars <= 0:
            raise MalformedSystemError(f"num_vars must be positive, got {num_vars}")
        coeffs = np.zeros((len(rows), num_vars), dtype=float)
        rels = []
        rhs = np.zeros(len(rows), dtype=float)
        for i, (a, rel, b) in enumerate(rows):
            a = np.asarray(a, dtype=float)
            if a.shape != (num_vars,):
                raise MalformedSystemError(
                    f"row {i}: expected {num_vars} coefficients, got shape {a.shape}"
                )
            if rel not in _RELATIONS:
                raise MalformedSystemError(f"row {i}: unknown relation {rel!r}")
            coeffs[i] = a
            rels.append(rel)
            rhs[i] = b
        if lower_bounds is None:
            lb = np.full(num_vars, -np.inf)
        else:
            lb = np.asarray(lower_bounds, dtype=float)
            if lb.shape != (num_vars,):
                raise MalformedSystemError("lower_bounds length mismatch")
        system = cls(num_vars, coeffs, tuple(rels), rhs, lb)
        _validate(system)
        return system

    def row_violations(self, point):
        """Amount by which each row is violated at ``point`` (0 when satisfied)."""
        values = self.coefficients @ np.asarray(point, dtype=float)
        out = np.zeros(len(self.relations))
        for i, rel in enumerate(self.relations):
            gap = values[i] - self.rhs[i]
            if rel == "<=":
                out[i] = max(0.0, gap)
            elif rel == ">=":
                out[i] = max(0.0, -gap)
            else:
                out[i] = abs(gap)
        return out


@dataclass(frozen=True)
class FeasibilityOutcome:
    """Verdict of :func:`solve_feasibility`.

    When feasible, ``point`` satisfies every row within :data:`FEAS_TOL` and
    ``max_residual`` is the largest recomputed row violation. When infeasible
    both fields are ``None``.
    """

    feasible: bool
    point: np.ndarray | None = None
    max_residual: float | None = None


def _validate(system: LinearSystem) -> None:
    if system.coefficients.shape != (len(system.relations), system.num_vars):
        raise MalformedSystemError("coefficient matrix shape mismatch")
    if system.rhs.shape != (len(system.relations),):
        raise MalformedSystemError("rhs length mismatch")
    if not np.all(np.isfinite(system.coefficients)):
        raise MalformedSystemError("non-finite coefficient")
    if not np.all(np.isfinite(system.rhs)):
        raise MalformedSystemError("non-finite rhs")
    lb = system.lower_bounds
    if np.any(np.isnan(lb)) or np.any(lb == np.inf):
        raise MalformedSystemError("lower bounds must be finite or -inf")


def _lower_bound_point(system: LinearSystem) -> np.ndarray:
    lb = system.lower_bounds.copy()
    lb[~np.isfinite(lb)] = 0.0
    return lb


def solve_feasibility(system: LinearSystem) -> FeasibilityOutcome:
    """Decide feasibility of ``system`` and return a satisfying point if any.

    Deterministic: identical inputs produce identical verdicts and points.
    A system with zero rows is feasible at the lower-bound point (free
    variables at 0).
    """
    _validate(system)
    if len(system.relations) == 0:
        point = _lower_bound_point(system)
        return FeasibilityOutcome(True, point, 0.0)

    a = system.coefficients
    m = len(system.relations)
    finite_lb = np.isfinite(system.lower_bounds)

    # Shift bounded variables to z >= 0, split free ones into z+ - z-.
    columns = []  # (original var, sign)
    for i in range(system.num_vars):
        columns.append((i, 1.0))
        if not finite_lb[i]:
            columns.append((i, -1.0))
    shift = np.where(finite_lb, system.lower_bounds, 0.0)

    n_struct = len(columns)
    n_slack = sum(1 for rel in system.relations if rel != "=")
    n = n_struct + n_slack

    tab = np.zeros((m + 1, n + m + 1))
    for c, (var, sign) in enumerate(columns):
        tab[:m, c] = sign * a[:, var]
    b = system.rhs - a @ shift

    slack_at = 0
    for r, rel in enumerate(system.relations):
        if rel == "<=":
            tab[r, n_struct + slack_at] = 1.0
            slack_at += 1
        elif rel == ">=":
            tab[r, n_struct + slack_at] = -1.0
            slack_at += 1
    tab[:m, -1] = b

    # Flip rows to nonnegative rhs, then give every row an artificial variable.
    for r in range(m):
        if tab[r, -1] < 0:
            tab[r, :] = -tab[r, :]
        tab[r, n + r] = 1.0
    basis = list(range(n, n + m))

    # Phase-1 objective: minimize the sum of artificials. With the artificial
    # basis, the reduced-cost row is minus the column sums of the constraint
    # rows (zero on artificial columns by construction).
    tab[m, : n + m + 1] = -tab[:m, : n + m + 1].sum(axis=0)
    tab[m, n : n + m] = 0.0

    basis_arr = np.asarray(basis)
    for _ in range(_MAX_PIVOTS):
        negative = np.nonzero(tab[m, : n + m] < -_PIVOT_TOL)[0]
        if negative.size == 0:
            break
        entering = int(negative[0])  # Bland: lowest eligible index

        col = tab[:m, entering]
        eligible = np.nonzero(col > _PIVOT_TOL)[0]
        if eligible.size == 0:
            # Phase-1 objective is bounded below by 0, so an unbounded ray
            # cannot occur on a well-formed tableau.
            raise ArithmeticError("phase-1 ratio test failed")
        ratios = tab[eligible, -1] / col[eligible]
        best = ratios.min()
        tied = eligible[ratios <= best + _PIVOT_TOL]
        leaving = int(tied[np.argmin(basis_arr[tied])])  # Bland tie-break

        tab[leaving, :] /= tab[leaving, entering]
        factor = tab[:, entering].copy()
        factor[leaving] = 0.0
        tab -= np.outer(factor, tab[leaving, :])
        basis_arr[leaving] = entering
    else:
        raise ArithmeticError("pivot limit exceeded")
    basis = basis_arr.tolist()

    objective = -tab[m, -1]
    if objective > FEAS_TOL:
        return FeasibilityOutcome(False)

    z = np.zeros(n + m)
    for r in range(m):
        z[basis[r]] = tab[r, -1]
    point = shift.copy()
    for c, (var, sign) in enumerate(columns):
        point[var] += sign * z[c]
    return FeasibilityOutcome(True, point, float(system.row_violations(point).max()))

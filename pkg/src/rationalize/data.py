"""Typed containers for the three instance kinds, JSON ingestion, validation.

All tests in the package consume evaluation matrices rather than symbolic
functions: a classical instance carries the cross-evaluation of each budget
function at each observed bundle, a CRP instance the cross-evaluation of each
utility at each bundle, and a Bayes instance the primitives (prior, payoff
tables, attention strategies) from which expected utilities are computed.
Symbolic families live in :mod:`rationalize.synth` and are lowered to these
containers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .lp import VERIFY_TOL

#: Tolerance for probability-mass checks (prior sums, strategy row sums).
PMF_TOL = 1e-12

KINDS = ("classical", "crp", "bayes")


class ParseError(ValueError):
    """File is not valid JSON."""


class SchemaError(ValueError):
    """JSON parsed but a field is missing or has the wrong shape."""


class ValidationError(ValueError):
    """Instance violates a domain invariant; carries the report."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        lines = "; ".join(f"{v.path}: {v.message}" for v in report.violations)
        super().__init__(f"instance failed validation: {lines}")


@dataclass(frozen=True)
class ValidationIssue:
    path: str
    message: str
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[ValidationIssue, ...]


def _freeze(array) -> np.ndarray:
    out = np.asarray(array, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ClassicalInstance:
    """K observed bundles plus the K x K budget cross-evaluation matrix.

    ``budget_evals[k][j]`` is budget function k evaluated at bundle j; the
    diagonal is zero because each bundle exhausts its own budget.
    """

    bundles: np.ndarray
    budget_evals: np.ndarray
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "bundles", _freeze(self.bundles))
        object.__setattr__(self, "budget_evals", _freeze(self.budget_evals))
        if self.bundles.ndim != 2:
            raise SchemaError("bundles must be a K x m array")
        k = self.bundles.shape[0]
        if self.budget_evals.shape != (k, k):
            raise SchemaError(
                f"budget_evals must be {k} x {k}, got {self.budget_evals.shape}"
            )

    @property
    def num_experiments(self) -> int:
        return self.bundles.shape[0]

    @property
    def bundle_dim(self) -> int:
        return self.bundles.shape[1]


@dataclass(frozen=True)
class CrpInstance:
    """K x K utility cross-evaluation matrix, ``utility_evals[t][s]`` = utility
    t at choice s, with optional bundles and an optional out-of-sample
    evaluator mapping an arbitrary choice to its K utility values."""

    utility_evals: np.ndarray
    bundles: np.ndarray | None = None
    evaluator: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, compare=False
    )
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "utility_evals", _freeze(self.utility_evals))
        u = self.utility_evals
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise SchemaError(f"utility_evals must be square, got {u.shape}")
        if self.bundles is not None:
            object.__setattr__(self, "bundles", _freeze(self.bundles))

    @property
    def num_experiments(self) -> int:
        return self.utility_evals.shape[0]


@dataclass(frozen=True)
class BayesInstance:
    """Prior over states, K payoff tables (state x action), and K attention
    strategies as row-stochastic state -> observation kernels."""

    prior: np.ndarray
    payoffs: np.ndarray
    strategies: np.ndarray
    policies: np.ndarray | None = None
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "prior", _freeze(self.prior))
        object.__setattr__(self, "payoffs", _freeze(self.payoffs))
        object.__setattr__(self, "strategies", _freeze(self.strategies))
        if self.prior.ndim != 1:
            raise SchemaError("prior must be a vector")
        x = self.prior.shape[0]
        if self.payoffs.ndim != 3 or self.payoffs.shape[1] != x:
            raise SchemaError(
                f"payoffs must be K x {x} x A, got {self.payoffs.shape}"
            )
        if (
            self.strategies.ndim != 3
            or self.strategies.shape[0] != self.payoffs.shape[0]
            or self.strategies.shape[1] != x
        ):
            raise SchemaError(
                f"strategies must be K x {x} x Y, got {self.strategies.shape}"
            )
        if self.policies is not None:
            pol = np.asarray(self.policies, dtype=int)
            if pol.shape != (self.num_experiments, self.num_observations):
                raise SchemaError(
                    f"policies must be K x Y, got {pol.shape}"
                )
            pol.flags.writeable = False
            object.__setattr__(self, "policies", pol)

    @property
    def num_states(self) -> int:
        return self.prior.shape[0]

    @property
    def num_actions(self) -> int:
        return self.payoffs.shape[2]

    @property
    def num_observations(self) -> int:
        return self.strategies.shape[2]

    @property
    def num_experiments(self) -> int:
        return self.payoffs.shape[0]


Instance = ClassicalInstance | CrpInstance | BayesInstance


def validate(instance) -> ValidationReport:
    """Check the domain invariants of an instance without mutating it."""
    issues: list[ValidationIssue] = []

    def bad(path, message, magnitude=0.0):
        issues.append(ValidationIssue(path, message, float(magnitude)))

    if isinstance(instance, ClassicalInstance):
        if not np.all(np.isfinite(instance.budget_evals)):
            bad("budget_evals", "non-finite entry")
        else:
            diag = np.abs(np.diag(instance.budget_evals))
            worst = int(np.argmax(diag))
            if diag[worst] > VERIFY_TOL:
                bad(
                    f"budget_evals[{worst}][{worst}]",
                    f"diagonal must be zero (each bundle exhausts its own budget), got {instance.budget_evals[worst, worst]:.3g}",
                    diag[worst],
                )
        if not np.all(np.isfinite(instance.bundles)):
            bad("bundles", "non-finite entry")
        elif instance.bundles.size and instance.bundles.min() < 0:
            i, j = np.argwhere(instance.bundles < 0)[0]
            bad(f"bundles[{i}][{j}]", "negative bundle entry", -instance.bundles[i, j])
    elif isinstance(instance, CrpInstance):
        if not np.all(np.isfinite(instance.utility_evals)):
            bad("utility_evals", "non-finite entry")
    elif isinstance(instance, BayesInstance):
        if not np.all(np.isfinite(instance.prior)):
            bad("prior", "non-finite entry")
        else:
            if instance.prior.min() < 0:
                x = int(np.argmin(instance.prior))
                bad(f"prior[{x}]", "negative probability", -instance.prior[x])
            total = instance.prior.sum()
            if abs(total - 1.0) > PMF_TOL:
                bad("prior", f"prior sums to {total!r}", abs(total - 1.0))
        if not np.all(np.isfinite(instance.payoffs)):
            bad("payoffs", "non-finite entry")
        if not np.all(np.isfinite(instance.strategies)):
            bad("strategies", "non-finite entry")
        else:
            if instance.strategies.min() < 0:
                k, x, y = np.argwhere(instance.strategies < 0)[0]
                bad(
                    f"strategies[{k}][{x}][{y}]",
                    "negative kernel entry",
                    -instance.strategies[k, x, y],
                )
            sums = instance.strategies.sum(axis=2)
            off = np.abs(sums - 1.0)
            if off.max() > PMF_TOL:
                k, x = np.argwhere(off == off.max())[0]
                bad(
                    f"strategies[{k}][{x}]",
                    f"kernel row sums to {sums[k, x]!r}",
                    off[k, x],
                )
    else:
        raise TypeError(f"not an instance: {type(instance)!r}")
    return ValidationReport(ok=not issues, violations=tuple(issues))


def _as_nested_lists(array) -> list:
    return np.asarray(array, dtype=float).tolist()


def _require(payload: dict, key: str):
    if key not in payload:
        raise SchemaError(f"missing field {key!r}")
    return payload[key]


def _array(payload, key, ndim) -> np.ndarray:
    raw = _require(payload, key)
    try:
        out = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"field {key!r} is not numeric: {exc}") from None
    if out.ndim != ndim:
        raise SchemaError(f"field {key!r} must have {ndim} dimensions, got {out.ndim}")
    return out


def _renormalize_bayes(prior, strategies):
    total = prior.sum()
    if total <= 0:
        raise SchemaError("prior mass is not positive; cannot renormalize")
    prior = prior / total
    sums = strategies.sum(axis=2, keepdims=True)
    if np.any(sums <= 0):
        raise SchemaError("a kernel row has no mass; cannot renormalize")
    return prior, strategies / sums


def load_instance(path, kind: str | None = None, renormalize: bool = False):
    """Load and validate an instance from a JSON file.

    ``kind`` may be supplied to assert the expected instance kind; by default
    it is read from the file. ``renormalize`` rescales the prior and kernel
    rows of a Bayes instance to exact probability mass before validation
    (off by default so data errors are not silently hidden).
    """
    text = Path(path).read_text()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if not isinstance(payload, dict):
        raise SchemaError("top-level JSON value must be an object")
    file_kind = payload.get("kind")
    if file_kind not in KINDS:
        raise SchemaError(f"unknown instance kind {file_kind!r}")
    if kind is not None and kind != file_kind:
        raise SchemaError(f"expected a {kind!r} file, found {file_kind!r}")

    meta = payload.get("meta")
    if file_kind == "classical":
        instance = ClassicalInstance(
            bundles=_array(payload, "bundles", 2),
            budget_evals=_array(payload, "budget_evals", 2),
            meta=meta,
        )
    elif file_kind == "crp":
        bundles = (
            _array(payload, "bundles", 2) if payload.get("bundles") is not None else None
        )
        instance = CrpInstance(
            utility_evals=_array(payload, "utility_evals", 2),
            bundles=bundles,
            meta=meta,
        )
    else:
        prior = _array(payload, "prior", 1)
        payoffs = _array(payload, "payoffs", 3)
        strategies = _array(payload, "strategies", 3)
        if renormalize:
            prior, strategies = _renormalize_bayes(prior, strategies)
        policies = payload.get("policies")
        instance = BayesInstance(
            prior=prior,
            payoffs=payoffs,
            strategies=strategies,
            policies=None if policies is None else np.asarray(policies, dtype=int),
            meta=meta,
        )

    report = validate(instance)
    if not report.ok:
        raise ValidationError(report)
    return instance


def save_instance(instance, path) -> None:
    """Write an instance back to its JSON schema (numeric round-trip exact)."""
    if isinstance(instance, ClassicalInstance):
        payload = {
            "kind": "classical",
            "bundles": _as_nested_lists(instance.bundles),
            "budget_evals": _as_nested_lists(instance.budget_evals),
        }
    elif isinstance(instance, CrpInstance):
        payload = {"kind": "crp", "utility_evals": _as_nested_lists(instance.utility_evals)}
        if instance.bundles is not None:
            payload["bundles"] = _as_nested_lists(instance.bundles)
    elif isinstance(instance, BayesInstance):
        payload = {
            "kind": "bayes",
            "prior": _as_nested_lists(instance.prior),
            "payoffs": _as_nested_lists(instance.payoffs),
            "strategies": _as_nested_lists(instance.strategies),
        }
        if instance.policies is not None:
            payload["policies"] = np.asarray(instance.policies).tolist()
    else:
        raise TypeError(f"not an instance: {type(instance)!r}")
    if instance.meta is not None:
        payload["meta"] = instance.meta
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

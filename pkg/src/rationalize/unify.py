"""Bridge between the attention test and the consumption test.

The map is: treat each attention strategy as a consumption bundle and each
payoff table's expected-utility functional as that experiment's utility
function. Under it the attention inequalities and the known-utility
consumption inequalities are literally the same system, so verdicts must
match and certificates transport verbatim in both directions. The cost
reconstructed on either side is audited here against the three axioms a
well behaved information cost must satisfy: weak monotonicity under
garbling, mixture feasibility (convexity), and normalization at the
non-informative kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bayesian, blackwell
from .classical import CrpCertificate, crp_feasibility, reconstruct_budget_cost
from .data import BayesInstance, CrpInstance
from .garp import GarpReport, check_garp, crp_affordability

#: Margin beyond which a sampled axiom check counts as a violation.
AUDIT_TOL = 1e-9


@dataclass(frozen=True)
class UnificationReport:
    """Side-by-side verdicts of the two tests plus, when feasible, the data
    point values of the costs reconstructed from one shared certificate."""

    brp_feasible: bool
    crp_feasible: bool
    verdict_match: bool
    cost_values_at_data: tuple[tuple[float, float], ...]
    max_cost_discrepancy: float


@dataclass(frozen=True)
class AuditCounts:
    samples: int
    violations: int
    worst_margin: float


@dataclass(frozen=True)
class AxiomAuditReport:
    """Sampled audit of monotonicity (k1), mixture feasibility (k2), and the
    exact value at the uniform kernel (k3)."""

    k1: AuditCounts
    k2: AuditCounts
    k3_value: float

    @property
    def clean(self) -> bool:
        return (
            self.k1.violations == 0
            and self.k2.violations == 0
            and abs(self.k3_value) <= 1e-12
        )


def map_to_crp(instance: BayesInstance) -> CrpInstance:
    """Lower a Bayes instance to the known-utility consumption form.

    The cross-evaluation matrix is the expected-utility matrix, and the
    evaluator forwards arbitrary kernels through the expected-utility
    functional for out-of-sample reconstruction queries.
    """
    jmat = bayesian.j_matrix(instance)

    def evaluator(kernel) -> np.ndarray:
        return bayesian.batch_expected_utilities(
            instance, np.asarray(kernel, dtype=float)[None, :, :]
        )[0]

    return CrpInstance(utility_evals=jmat, evaluator=evaluator)


def garp_on_mapped(instance: BayesInstance) -> GarpReport:
    """Run GARP on the mapped affordability matrix (expected-utility gaps)."""
    return check_garp(crp_affordability(bayesian.j_matrix(instance)))


def verify_equivalence(instance: BayesInstance) -> UnificationReport:
    """Run both tests on one instance and compare them.

    Verdicts must agree; when feasible, both costs are rebuilt from the same
    certificate and compared at every observed strategy.
    """
    jmat = bayesian.j_matrix(instance)
    brp_cert = bayesian.brp_feasibility(jmat)
    crp_instance = map_to_crp(instance)
    crp_cert = crp_feasibility(crp_instance)
    brp_feasible = brp_cert is not None
    crp_feasible = crp_cert is not None

    pairs: list[tuple[float, float]] = []
    discrepancy = 0.0
    if brp_feasible and crp_feasible:
        cost = bayesian.reconstruct_info_cost(brp_cert, jmat, instance)
        transported = CrpCertificate(
            values=brp_cert.costs, multipliers=brp_cert.multipliers
        )
        diag = np.diag(crp_instance.utility_evals)
        for s in range(instance.num_experiments):
            bayes_side = cost.value(instance.strategies[s])
            classical_side = reconstruct_budget_cost(
                transported, crp_instance.utility_evals[:, s], diag
            )
            pairs.append((bayes_side, classical_side))
            discrepancy = max(discrepancy, abs(bayes_side - classical_side))
    return UnificationReport(
        brp_feasible=brp_feasible,
        crp_feasible=crp_feasible,
        verdict_match=brp_feasible == crp_feasible,
        cost_values_at_data=tuple(pairs),
        max_cost_discrepancy=discrepancy,
    )


def audit_axioms(
    cost, instance: BayesInstance, samples: int = 1000, seed: int = 0
) -> AxiomAuditReport:
    """Sampled audit of the cost axioms.

    k1 draws random kernels with random garblings and requires the garbled
    kernel to cost no more; k2 draws random mixtures and requires convexity;
    k3 reports the (exact) value at the uniform kernel, which is zero for a
    normalized cost. ``cost`` is any object with a batched ``values`` method,
    e.g. a reconstructed :class:`rationalize.bayesian.InfoCost`.
    """
    rng = np.random.default_rng(seed)
    x, y = instance.num_states, instance.num_observations

    bases = np.stack(
        [blackwell.random_kernel(x, y, rng) for _ in range(samples)]
    )
    garbled = np.empty_like(bases)
    for i in range(samples):
        garbled[i], _ = blackwell.random_garbling(bases[i], rng)
    margins_k1 = cost.values(garbled) - cost.values(bases)
    k1_violations = int((margins_k1 > AUDIT_TOL).sum())
    k1 = AuditCounts(samples, k1_violations, float(margins_k1.max()))

    eta = np.stack([blackwell.random_kernel(x, y, rng) for _ in range(samples)])
    psi = np.stack([blackwell.random_kernel(x, y, rng) for _ in range(samples)])
    theta = rng.uniform(0.0, 1.0, size=samples)
    mixed = theta[:, None, None] * eta + (1.0 - theta[:, None, None]) * psi
    margins_k2 = cost.values(mixed) - (
        theta * cost.values(eta) + (1.0 - theta) * cost.values(psi)
    )
    k2_violations = int((margins_k2 > AUDIT_TOL).sum())
    k2 = AuditCounts(samples, k2_violations, float(margins_k2.max()))

    alpha0 = bayesian.uniform_strategy(x, y)
    k3_value = float(cost.values(alpha0[None, :, :])[0])
    return AxiomAuditReport(k1=k1, k2=k2, k3_value=k3_value)

"""Rationalizability tests for choice data.

Decides whether finite choice datasets are rationalizable: classical
consumption data by a monotone utility under general budgets, and Bayesian
attention data by a monotone convex information-acquisition cost. When a
dataset passes, the rationalizing utility or cost is reconstructed as an
extremum of finitely many affine pieces, and the two tests can be mapped
onto each other and cross-verified.
"""

from .bayesian import (
    ActionPolicy,
    BrpCertificate,
    InfoCost,
    InstanceTooLargeError,
    NiacReport,
    NiasReport,
    UnboundedCostError,
    batch_expected_utilities,
    brp_feasibility,
    brp_feasibility_unit_lambda,
    brp_residual,
    check_niac_cycles,
    check_nias,
    expected_utility,
    j_matrix,
    normalize_cost,
    optimal_policy,
    reconstruct_info_cost,
    rockafellar_cost,
    rockafellar_evaluator,
    rockafellar_offsets,
    uniform_strategy,
)
from .blackwell import (
    DimensionMismatchError,
    DominanceResult,
    GarblingWitness,
    check_dominance,
    random_garbling,
    random_kernel,
)
from .classical import (
    AfriatCertificate,
    CrpCertificate,
    PiecewiseBudgetCost,
    PiecewiseUtility,
    afriat_feasibility,
    afriat_residual,
    appendix_transform,
    crp_feasibility,
    crp_residual,
    reconstruct_budget_cost,
    reconstruct_utility,
)
from .data import (
    BayesInstance,
    ClassicalInstance,
    CrpInstance,
    ParseError,
    SchemaError,
    ValidationError,
    ValidationReport,
    load_instance,
    save_instance,
    validate,
)
from .garp import (
    GarpReport,
    GarpViolation,
    PreferenceRelation,
    build_relation,
    check_garp,
    crp_affordability,
)
from .lp import (
    FEAS_TOL,
    VERIFY_TOL,
    FeasibilityOutcome,
    LinearSystem,
    MalformedSystemError,
    solve_feasibility,
)
from .synth import (
    GeneratorConfig,
    NoViolationFoundError,
    gen_bayes_rational,
    gen_classical,
    perturb_violation,
)
from .unify import (
    AxiomAuditReport,
    UnificationReport,
    audit_axioms,
    garp_on_mapped,
    map_to_crp,
    verify_equivalence,
)

__version__ = "0.1.0"

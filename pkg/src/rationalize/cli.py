"""Command-line front end.

Subcommands run any test on a dataset file (``check``), generate ground-truth
corpora (``generate``), and write reconstructed utility or cost artifacts
(``reconstruct``). Exit codes are the machine verdict channel: 0 means the
test passed or was feasible, 1 means it failed or was infeasible (the report
carries a witness), 2 means a usage or validation error. All configuration is
via flags so reports are reproducible.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, bayesian, blackwell, classical, synth, unify
from .data import (
    BayesInstance,
    ParseError,
    SchemaError,
    ValidationError,
    load_instance,
    save_instance,
)
from .garp import check_garp, crp_affordability
from .lp import VERIFY_TOL

_ASSUMPTION_NOTE = (
    "note: monotonicity and local non-satiation of the supplied budget and "
    "utility functions are assumed, not verified from finite evaluations"
)


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _emit(args, report: dict, notes: tuple[str, ...] = ()) -> None:
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print(f"command: {report['command']}")
    print(f"verdict: {report['verdict']}")
    if report.get("certificate") is not None:
        cert = report["certificate"]
        print(f"values:      {np.array2string(np.asarray(cert['values']), precision=6)}")
        print(
            f"multipliers: {np.array2string(np.asarray(cert['multipliers']), precision=6)}"
        )
    if report.get("residuals") is not None:
        print(f"max residual: {report['residuals']['max']:.3g}")
    if report.get("witness") is not None:
        print(f"witness: {json.dumps(report['witness'])}")
    for note in notes:
        print(note)
    print(f"elapsed: {report['ms']:.1f} ms")


def _report(command: str, input_path, verdict: str, started: float, **fields) -> dict:
    report = {
        "command": command,
        "input_digest": _digest(input_path),
        "verdict": verdict,
        "certificate": None,
        "residuals": None,
        "witness": None,
        "ms": (time.perf_counter() - started) * 1000.0,
        "version": __version__,
    }
    report.update(fields)
    return report


def _certificate_dict(values, multipliers) -> dict:
    return {
        "values": np.asarray(values, dtype=float).tolist(),
        "multipliers": np.asarray(multipliers, dtype=float).tolist(),
    }


def _cmd_check(args) -> int:
    started = time.perf_counter()
    test = args.test
    tol = args.tol if args.tol is not None else VERIFY_TOL

    if test == "blackwell":
        payload = json.loads(Path(args.input).read_text())
        result = blackwell.check_dominance(payload["alpha"], payload["alpha_bar"])
        if result.dominates:
            witness = {"garbling": result.witness.q.tolist()}
            report = _report("check blackwell", args.input, "dominates", started, witness=witness)
            _emit(args, report)
            return 0
        report = _report("check blackwell", args.input, "not-dominated", started)
        _emit(args, report)
        return 1

    if test == "garp":
        instance = load_instance(args.input, renormalize=args.renormalize)
        if isinstance(instance, BayesInstance):
            afford = crp_affordability(bayesian.j_matrix(instance))
        elif hasattr(instance, "budget_evals"):
            afford = instance.budget_evals
        else:
            afford = crp_affordability(instance.utility_evals)
        outcome = check_garp(afford, tol)
        if outcome.holds:
            report = _report("check garp", args.input, "holds", started)
            _emit(args, report, (_ASSUMPTION_NOTE,))
            return 0
        violation = outcome.violation
        witness = {
            "preferred": violation.k,
            "over": violation.j,
            "chain": list(violation.chain),
            "reversal": float(afford[violation.j, violation.k]),
        }
        report = _report("check garp", args.input, "violated", started, witness=witness)
        _emit(args, report, (_ASSUMPTION_NOTE,))
        return 1

    if test == "afriat":
        instance = load_instance(args.input, kind="classical")
        certificate = classical.afriat_feasibility(instance)
        if certificate is None:
            report = _report("check afriat", args.input, "infeasible", started)
            _emit(args, report, (_ASSUMPTION_NOTE,))
            return 1
        residual = classical.afriat_residual(
            certificate.values, certificate.multipliers, instance.budget_evals
        )
        report = _report(
            "check afriat",
            args.input,
            "feasible",
            started,
            certificate=_certificate_dict(certificate.values, certificate.multipliers),
            residuals={"max": residual},
        )
        _emit(args, report, (_ASSUMPTION_NOTE,))
        return 0

    if test == "crp":
        instance = load_instance(args.input, kind="crp")
        certificate = classical.crp_feasibility(instance)
        if certificate is None:
            report = _report("check crp", args.input, "infeasible", started)
            _emit(args, report, (_ASSUMPTION_NOTE,))
            return 1
        residual = classical.crp_residual(
            certificate.values, certificate.multipliers, instance.utility_evals
        )
        report = _report(
            "check crp",
            args.input,
            "feasible",
            started,
            certificate=_certificate_dict(certificate.values, certificate.multipliers),
            residuals={"max": residual},
        )
        _emit(args, report, (_ASSUMPTION_NOTE,))
        return 0

    instance = load_instance(args.input, kind="bayes", renormalize=args.renormalize)

    if test == "nias":
        worst = None
        for k in range(instance.num_experiments):
            policy = (
                bayesian.ActionPolicy(instance.policies[k])
                if instance.policies is not None
                else None
            )
            outcome = bayesian.check_nias(instance, k, policy, tol)
            if not outcome.ok and (worst is None or outcome.worst_gap > worst[1]):
                worst = (k, outcome.worst_gap, outcome.observation, outcome.action)
        note = (
            ()
            if instance.policies is not None
            else ("note: no action policies in file; checked the induced optimal policies",)
        )
        if worst is None:
            report = _report("check nias", args.input, "holds", started)
            _emit(args, report, note)
            return 0
        witness = {
            "experiment": worst[0],
            "gap": worst[1],
            "observation": worst[2],
            "better_action": worst[3],
        }
        report = _report("check nias", args.input, "violated", started, witness=witness)
        _emit(args, report, note)
        return 1

    jmat = bayesian.j_matrix(instance)

    if test == "niac-cycles":
        outcome = bayesian.check_niac_cycles(jmat, tol)
        if outcome.holds:
            report = _report("check niac-cycles", args.input, "holds", started)
            _emit(args, report)
            return 0
        witness = {"cycle": list(outcome.cycle), "total_weight": outcome.cycle_sum}
        report = _report(
            "check niac-cycles", args.input, "violated", started, witness=witness
        )
        _emit(args, report)
        return 1

    if test == "brp":
        certificate = bayesian.brp_feasibility(jmat)
        if certificate is None:
            report = _report("check brp", args.input, "infeasible", started)
            _emit(args, report)
            return 1
        residual = bayesian.brp_residual(
            certificate.costs, certificate.multipliers, jmat
        )
        report = _report(
            "check brp",
            args.input,
            "feasible",
            started,
            certificate=_certificate_dict(certificate.costs, certificate.multipliers),
            residuals={"max": residual},
        )
        _emit(args, report)
        return 0

    if test == "unify":
        outcome = unify.verify_equivalence(instance)
        ok = outcome.verdict_match and outcome.max_cost_discrepancy <= tol
        witness = {
            "brp": "feasible" if outcome.brp_feasible else "infeasible",
            "crp": "feasible" if outcome.crp_feasible else "infeasible",
            "max_cost_discrepancy": outcome.max_cost_discrepancy,
        }
        report = _report(
            "check unify",
            args.input,
            "equivalent" if ok else "mismatch",
            started,
            witness=witness,
        )
        _emit(args, report)
        return 0 if ok else 1

    if test == "audit-axioms":
        certificate = bayesian.brp_feasibility(jmat)
        if certificate is None:
            report = _report(
                "check audit-axioms", args.input, "infeasible", started
            )
            _emit(args, report)
            return 1
        cost = bayesian.normalize_cost(
            bayesian.reconstruct_info_cost(certificate, jmat, instance), instance
        )
        audit = unify.audit_axioms(cost, instance, samples=args.samples, seed=args.seed)
        witness = {
            "k1": [audit.k1.samples, audit.k1.violations, audit.k1.worst_margin],
            "k2": [audit.k2.samples, audit.k2.violations, audit.k2.worst_margin],
            "k3": audit.k3_value,
        }
        report = _report(
            "check audit-axioms",
            args.input,
            "clean" if audit.clean else "violated",
            started,
            witness=witness,
        )
        _emit(args, report)
        return 0 if audit.clean else 1

    raise SchemaError(f"unknown check {test!r}")  # unreachable via argparse


def _cmd_generate(args) -> int:
    config = synth.GeneratorConfig(
        seed=args.seed,
        num_experiments=args.k,
        family={
            "classical": "cobb_douglas_linear_budget",
            "bayes-rational": "garbling_grid_rational",
            "violation": "niac_violation",
        }[args.family],
        bundle_dim=args.m,
        num_states=args.x,
        num_observations=args.y,
        num_actions=args.a,
        grid_size=args.grid_size,
        cost_multiplier=args.cost_multiplier,
    )
    if args.family == "classical":
        instance = synth.gen_classical(config)
    elif args.family == "bayes-rational":
        instance = synth.gen_bayes_rational(config)
    else:
        rational = synth.gen_bayes_rational(config)
        instance = synth.perturb_violation(rational, seed=args.seed)
    save_instance(instance, args.out)
    print(f"wrote {args.out}")
    print(f"digest: {_digest(args.out)}")
    return 0


def _load_eval_points(path, expected_len: int) -> np.ndarray:
    payload = json.loads(Path(path).read_text())
    points = np.asarray(payload["points"], dtype=float)
    if points.ndim != 2 or points.shape[1] != expected_len:
        raise SchemaError(
            f"evaluation points must be rows of length {expected_len}, got {points.shape}"
        )
    return points


def _cmd_reconstruct(args) -> int:
    started = time.perf_counter()
    target = args.target

    if target == "utility":
        instance = load_instance(args.input, kind="classical")
        certificate = classical.afriat_feasibility(instance)
        if certificate is None:
            print("error: instance is not rationalizable; nothing to reconstruct", file=sys.stderr)
            return 1
        artifact = {
            "kind": "piecewise_utility",
            "aggregation": "min",
            "pieces": [
                {"offset": float(u), "slope": float(lam), "budget_index": k}
                for k, (u, lam) in enumerate(
                    zip(certificate.values, certificate.multipliers)
                )
            ],
        }
        evaluate = lambda row: classical.reconstruct_utility(certificate, row)
        expected_len = instance.num_experiments
    elif target == "budget-cost":
        instance = load_instance(args.input, kind="crp")
        certificate = classical.crp_feasibility(instance)
        if certificate is None:
            print("error: instance is not rationalizable; nothing to reconstruct", file=sys.stderr)
            return 1
        diag = np.diag(instance.utility_evals)
        artifact = {
            "kind": "piecewise_budget_cost",
            "aggregation": "max",
            "pieces": [
                {
                    "offset": float(g),
                    "multiplier": float(lam),
                    "anchor": float(anchor),
                    "utility_index": k,
                }
                for k, (g, lam, anchor) in enumerate(
                    zip(certificate.values, certificate.multipliers, diag)
                )
            ],
        }
        evaluate = lambda row: classical.reconstruct_budget_cost(certificate, row, diag)
        expected_len = instance.num_experiments
    else:
        instance = load_instance(args.input, kind="bayes", renormalize=args.renormalize)
        jmat = bayesian.j_matrix(instance)
        certificate = bayesian.brp_feasibility(jmat)
        if certificate is None:
            print("error: instance is not rationalizable; nothing to reconstruct", file=sys.stderr)
            return 1
        cost = bayesian.normalize_cost(
            bayesian.reconstruct_info_cost(certificate, jmat, instance), instance
        )
        artifact = {
            "kind": "info_cost",
            "aggregation": "max",
            "normalizer": cost.normalizer,
            "pieces": [
                {
                    "offset": float(c),
                    "multiplier": float(lam),
                    "anchor": float(anchor),
                    "payoff_index": int(idx),
                }
                for c, lam, anchor, idx in zip(
                    cost.offsets, cost.multipliers, cost.anchors, cost.payoff_indices
                )
            ],
        }

    Path(args.out).write_text(json.dumps(artifact, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.out}")
    print(f"digest: {_digest(args.out)}")

    if args.eval is not None:
        if target == "cost":
            payload = json.loads(Path(args.eval).read_text())
            kernels = np.asarray(payload["kernels"], dtype=float)
            if kernels.ndim != 3 or kernels.shape[1] != instance.num_states:
                raise SchemaError(
                    f"kernels must be n x {instance.num_states} x Y, got {kernels.shape}"
                )
            for i, value in enumerate(cost.values(kernels)):
                print(f"eval[{i}] = {value!r}")
        else:
            points = _load_eval_points(args.eval, expected_len)
            for i, row in enumerate(points):
                print(f"eval[{i}] = {evaluate(row)!r}")
    print(f"elapsed: {(time.perf_counter() - started) * 1000.0:.1f} ms")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rationalize",
        description="Rationalizability tests for consumption and attention data",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run a test on a dataset file")
    check.add_argument(
        "test",
        choices=[
            "garp",
            "afriat",
            "crp",
            "nias",
            "niac-cycles",
            "brp",
            "blackwell",
            "unify",
            "audit-axioms",
        ],
    )
    check.add_argument("--input", required=True)
    check.add_argument("--tol", type=float, default=None, help="verification tolerance")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--samples", type=int, default=1000)
    check.add_argument("--renormalize", action="store_true")
    check.add_argument("--json", action="store_true", help="machine-readable report")
    check.set_defaults(handler=_cmd_check)

    gen = sub.add_parser("generate", help="write a ground-truth dataset file")
    gen.add_argument("family", choices=["classical", "bayes-rational", "violation"])
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--k", type=int, required=True, help="number of experiments")
    gen.add_argument("--m", type=int, default=3, help="bundle dimension (classical)")
    gen.add_argument("--x", type=int, default=3, help="number of states")
    gen.add_argument("--y", type=int, default=3, help="number of observations")
    gen.add_argument("--a", type=int, default=3, help="number of actions")
    gen.add_argument("--grid-size", type=int, default=40)
    gen.add_argument("--cost-multiplier", type=float, default=1.0)
    gen.set_defaults(handler=_cmd_generate)

    rec = sub.add_parser("reconstruct", help="write a reconstructed artifact")
    rec.add_argument("target", choices=["utility", "budget-cost", "cost"])
    rec.add_argument("--input", required=True)
    rec.add_argument("--out", required=True)
    rec.add_argument("--eval", default=None, help="file of points to evaluate")
    rec.add_argument("--renormalize", action="store_true")
    rec.set_defaults(handler=_cmd_reconstruct)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError, SchemaError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        blackwell.DimensionMismatchError,
        bayesian.InstanceTooLargeError,
        synth.NoViolationFoundError,
        FileNotFoundError,
        KeyError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

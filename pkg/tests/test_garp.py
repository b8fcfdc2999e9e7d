"""Tests for the revealed-preference relation and GARP."""

import numpy as np
from hypothesis import given, settings, strategies as st

from rationalize.garp import build_relation, check_garp, crp_affordability
from rationalize.lp import VERIFY_TOL

from oracles import garp_by_chain_search


def test_isolated_experiments_close_to_identity():
    afford = np.full((3, 3), 1.0)
    np.fill_diagonal(afford, 0.0)
    relation = build_relation(afford)
    np.testing.assert_array_equal(relation.direct, np.eye(3, dtype=bool))
    np.testing.assert_array_equal(relation.closure, np.eye(3, dtype=bool))


def test_all_affordable_gives_complete_relation():
    relation = build_relation(np.zeros((4, 4)))
    assert relation.closure.all()
    assert check_garp(np.zeros((4, 4))).holds


def test_transitivity_adds_indirect_edge():
    afford = np.full((3, 3), 1.0)
    np.fill_diagonal(afford, 0.0)
    afford[0, 1] = -0.2
    afford[1, 2] = -0.3
    relation = build_relation(afford)
    assert relation.closure[0, 2]
    assert not relation.direct[0, 2]


def test_single_experiment_always_holds():
    assert check_garp(np.array([[0.0]])).holds


def test_mutual_strict_affordability_is_a_violation():
    report = check_garp(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    assert not report.holds
    violation = report.violation
    assert (violation.k, violation.j) == (0, 1)
    assert violation.chain == (0, 1)


def test_violation_chain_replays_against_the_matrix():
    rng = np.random.default_rng(7)
    seen = 0
    for _ in range(300):
        n = int(rng.integers(2, 7))
        afford = rng.uniform(-1.0, 1.0, size=(n, n))
        np.fill_diagonal(afford, 0.0)
        report = check_garp(afford)
        if report.holds:
            continue
        seen += 1
        v = report.violation
        assert v.chain[0] == v.k and v.chain[-1] == v.j
        for a, b in zip(v.chain, v.chain[1:]):
            assert afford[a, b] <= VERIFY_TOL
        assert afford[v.j, v.k] < -VERIFY_TOL
    assert seen > 50


def test_violation_pair_is_lexicographically_smallest():
    afford = np.full((3, 3), 1.0)
    np.fill_diagonal(afford, 0.0)
    # two independent 2-cycles: (1, 2) and (0, 2); smallest pair is (0, 2)
    afford[0, 2] = -0.5
    afford[2, 0] = -0.5
    afford[1, 2] = -0.5
    afford[2, 1] = -0.5
    report = check_garp(afford)
    assert (report.violation.k, report.violation.j) == (0, 2)


def test_closure_is_idempotent():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 8))
        afford = rng.uniform(-1.0, 1.0, size=(n, n))
        closure = build_relation(afford).closure
        # re-close: treat existing closure as the direct relation
        reclosed = closure.copy()
        for mid in range(n):
            reclosed |= reclosed[:, mid : mid + 1] & reclosed[mid : mid + 1, :]
        np.testing.assert_array_equal(reclosed, closure)


def test_verdicts_match_chain_search_oracle():
    rng = np.random.default_rng(11)
    for case in range(150):
        n = int(rng.integers(1, 7))
        afford = rng.uniform(-1.0, 1.0, size=(n, n))
        if case % 3 == 0:
            np.fill_diagonal(afford, 0.0)
        got = check_garp(afford).holds
        want = garp_by_chain_search(afford, VERIFY_TOL)
        assert got == want, f"case {case}"


@settings(max_examples=80, deadline=None)
@given(
    st.integers(1, 5).flatmap(
        lambda n: st.lists(
            st.lists(st.floats(-2, 2, allow_nan=False), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )
)
def test_oracle_agreement_property(matrix):
    afford = np.asarray(matrix)
    assert check_garp(afford).holds == garp_by_chain_search(afford, VERIFY_TOL)


def test_crp_affordability_diagonal_maximal_rows():
    umat = np.array([[5.0, 1.0, 2.0], [0.0, 6.0, 1.0], [2.0, 2.0, 7.0]])
    afford = crp_affordability(umat)
    off_diagonal = afford[~np.eye(3, dtype=bool)]
    assert off_diagonal.min() > 0
    assert check_garp(afford).holds


def test_crp_affordability_constant_matrix_complete_and_consistent():
    afford = crp_affordability(np.full((4, 4), 2.5))
    np.testing.assert_array_equal(afford, np.zeros((4, 4)))
    assert check_garp(afford).holds

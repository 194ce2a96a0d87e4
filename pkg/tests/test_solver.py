import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chromopt import DomainError, InconsistencyError
from chromopt.analysis import closed_form_value
from chromopt.opt_core import ProblemInstance, e_value, is_feasible, obj_value
from chromopt.solver import (
    AnalyticOptSolver,
    AscentConfig,
    NumericOptSolver,
    RestrictedOptSolver,
    analytic_opt,
    best_structured,
    case_elimination,
    enumerate_candidate_supports,
    grid_search_restricted,
    multistart_ascent,
    numeric_opt,
    proof_case,
    solve_restricted,
)
from chromopt.subsetspace import ColorSet, integer_partitions
from chromopt.supports import PARTITION, SupportSpec, classify_sets, min_parts

from oracles import program_by_slsqp, two_block_value, union_crossover, union_family_value

FAST = AscentConfig(n_starts=25, max_iter=3000, n_outer=8)


# -- closed form -----------------------------------------------------------------


@pytest.mark.parametrize("q", [5, 7, 9, 11])
@pytest.mark.parametrize("gamma", [0.24, 0.245, 0.25])
def test_analytic_opt_structure(q, gamma):
    rep = analytic_opt(q, gamma)
    big = (1 + math.sqrt(1 - 4 * gamma)) / 2
    assert rep.optimum_value == pytest.approx(closed_form_value(q, gamma), abs=1e-15)
    assert rep.optimum_value == pytest.approx(obj_value(rep.optimizer), abs=1e-14)
    masks = sorted(rep.optimizer.coords, key=lambda m: -bin(m).count("1"))
    assert bin(masks[0]).count("1") == (q + 1) // 2
    assert rep.optimizer[masks[0]] == pytest.approx(big, abs=1e-15)
    assert rep.e_at_opt == pytest.approx(gamma, abs=1e-12)
    assert rep.support_class.label == f"P2({(q + 1) // 2},{q // 2})"


def test_analytic_opt_domain():
    with pytest.raises(DomainError):
        analytic_opt(6, 0.25)
    with pytest.raises(DomainError):
        analytic_opt(3, 0.25)
    with pytest.raises(DomainError):
        analytic_opt(5, 0.2)


# -- restricted problems ---------------------------------------------------------


@pytest.mark.parametrize("big,small", [(3, 2), (4, 3), (5, 4), (4, 1)])
@pytest.mark.parametrize("gamma", [0.1, 0.2, 0.24, 0.25])
def test_two_part_restricted_matches_oracle(big, small, gamma):
    rep = solve_restricted(SupportSpec.partition_of((big, small)), big + small, gamma)
    assert rep.optimum_value == pytest.approx(two_block_value(big, small, gamma), abs=1e-9)


@pytest.mark.parametrize("q", [7, 9, 11])
def test_union_family_matches_oracle_below_crossover(q):
    gamma = round(union_crossover(q) - 0.01, 4)
    c = (q + 1) // 2
    spec = SupportSpec.union_of((c, q - c), (c, q - c))
    rep = solve_restricted(spec, q, gamma)
    assert rep.optimum_value == pytest.approx(union_family_value(q, gamma), abs=1e-9)
    assert rep.e_at_opt == pytest.approx(gamma, abs=1e-9)


def _specs_for(q, k):
    out = [SupportSpec.partition_of(s) for s in integer_partitions(q, k)]
    for s in integer_partitions(q, k):
        sizes = sorted(set(s), reverse=True)
        for i, a in enumerate(sizes):
            for b in sizes[i:]:
                if a != b or s.count(a) > 1:
                    out.append(SupportSpec.union_of(s, (a, b)))
    return out


@pytest.mark.parametrize("q,k", [(5, 2), (5, 3), (6, 3), (7, 2), (7, 3)])
@pytest.mark.parametrize("gamma", [0.2, 0.24, 0.25])
def test_restricted_matches_grid_validator(q, k, gamma):
    for spec in _specs_for(q, k):
        rep = solve_restricted(spec, q, gamma)
        grid = grid_search_restricted(spec, q, gamma, resolution=0.02, max_points=20_000)
        if not rep.feasible:
            assert grid is None
            continue
        assert is_feasible(rep.optimizer, ProblemInstance(q, gamma), 1e-9)
        assert grid is not None
        # the validator refines under a 1e-8 constraint slack
        assert rep.optimum_value >= grid - 5e-6, spec.label
        assert rep.optimum_value <= grid + 1e-3, spec.label


@pytest.mark.parametrize("q,k", [(5, 2), (7, 3), (8, 4)])
@pytest.mark.parametrize("gamma", [0.2, 0.25, 0.3])
def test_union_class_dominates_its_partition(q, k, gamma):
    # Q_k contains P_k as the face where the union has zero weight
    if gamma > (q - 1) / (2 * q):
        pytest.skip("gamma above the feasible range")
    for sizes in integer_partitions(q, k):
        part = solve_restricted(SupportSpec.partition_of(sizes), q, gamma)
        if not part.feasible:
            continue
        for spec in _specs_for(q, k):
            if spec.kind == PARTITION or spec.partition.sizes != sizes:
                continue
            union = solve_restricted(spec, q, gamma)
            assert union.feasible and union.optimum_value >= part.optimum_value - 1e-9


@pytest.mark.parametrize("q,k", [(5, 2), (7, 3), (9, 2)])
def test_bisection_and_face_enumeration_agree(q, k):
    for sizes in integer_partitions(q, k):
        spec = SupportSpec.partition_of(sizes)
        for gamma in (0.15, 0.22, 0.25):
            a = solve_restricted(spec, q, gamma, method="bisection")
            b = solve_restricted(spec, q, gamma, method="kkt")
            assert a.feasible == b.feasible
            if a.feasible:
                assert a.optimum_value == pytest.approx(b.optimum_value, abs=1e-9)


@given(st.sampled_from([5, 6, 7]), st.floats(0.05, 0.25))
@settings(max_examples=25)
def test_restricted_constraint_is_tight(q, gamma):
    # the objective favours bigger sets and fewer parts, so E sits on the bound
    for k in range(min_parts(gamma), q):
        for spec in _specs_for(q, k):
            rep = solve_restricted(spec, q, gamma)
            if rep.feasible:
                assert rep.e_at_opt >= gamma - 1e-7
                assert is_feasible(rep.optimizer, ProblemInstance(q, gamma), 1e-7)


def test_bisection_rejects_union_support():
    with pytest.raises(DomainError):
        solve_restricted(SupportSpec.union_of((3, 2), (3, 2)), 5, 0.2, method="bisection")


def test_restricted_reports_infeasible_uniform_cap():
    # two parts cannot reach E > 1/4
    rep = solve_restricted(SupportSpec.partition_of((4, 3)), 7, 0.3)
    assert not rep.feasible and rep.optimizer is None


# -- candidate supports and the structured search ---------------------------------


def test_min_parts():
    assert min_parts(0.25) == 2
    assert min_parts(0.2) == 2
    assert min_parts(1 / 3) == 3
    assert min_parts(0.34) == 4


def test_candidate_supports_cover_expected_classes():
    labels = {s.label for s in enumerate_candidate_supports(5, 0.25)}
    assert {"P2(3,2)", "P2(4,1)", "P3(3,1,1)", "P3(2,2,1)", "P4(2,1,1,1)"} <= labels
    assert "P5(1,1,1,1,1)" not in labels  # gamma below (q-1)/(2q)
    assert "Q2(3,2;1+2)" in labels


def test_classify_sets_roundtrip():
    q = 6
    for spec in _specs_for(q, 3):
        back = classify_sets(spec.sets, q)
        assert isinstance(back, SupportSpec) and back.label == spec.label
    assert classify_sets([ColorSet(0b11, 4), ColorSet(0b110, 4)], 4) == "unstructured"


@pytest.mark.parametrize("q,gamma", [(4, 0.2), (5, 0.2), (5, 0.24), (3, 0.3)])
def test_structured_search_matches_full_slsqp(q, gamma):
    ref, _ = program_by_slsqp(q, gamma, starts=20, seed=1)
    rep = best_structured(q, gamma)
    assert rep.optimum_value == pytest.approx(ref, abs=1e-5)


@pytest.mark.parametrize("q", [5, 7])
def test_structured_search_recovers_closed_form_in_window(q):
    for gamma in (0.24, 0.245, 0.249, 0.25):
        rep = best_structured(q, gamma)
        assert rep.optimum_value == pytest.approx(closed_form_value(q, gamma), abs=1e-9)
        assert rep.support_class.label == f"P2({(q + 1) // 2},{q // 2})"


def test_union_family_beats_closed_form_below_crossover():
    # at q = 9 the crossover sits above 0.24, so the closed form is not optimal there
    assert union_crossover(9) > 0.24
    rep = best_structured(9, 0.24)
    assert rep.optimum_value == pytest.approx(union_family_value(9, 0.24), abs=1e-9)
    assert rep.optimum_value > closed_form_value(9, 0.24) + 5e-4
    assert rep.support_class.label.startswith("Q2(5,4")


@pytest.mark.parametrize("q", [5, 7])
def test_case_elimination(q):
    for gamma in (0.24, 0.245, 0.249, 0.25):
        cases = case_elimination(q, gamma)
        target = closed_form_value(q, gamma)
        assert cases[5] == pytest.approx(target, abs=1e-9)
        for case, value in cases.items():
            if case != 5:
                assert value < target - 1e-3


def test_proof_case_labels():
    q = 5
    a = ColorSet(0b00111, q)
    assert proof_case([a, a.complement()], q) == 5
    assert proof_case([a, a.complement(), ColorSet(0b11111, q)], q) == 4
    assert proof_case([ColorSet(0b00011, q), ColorSet(0b01100, q), ColorSet(0b10000, q)], q) == 2
    assert proof_case([ColorSet(1, q), ColorSet(0b11110, q)], q) is None


# -- multistart ascent and the numeric oracle --------------------------------------


def test_multistart_is_deterministic_and_feasible():
    a = multistart_ascent(5, 0.24, FAST)
    b = multistart_ascent(5, 0.24, FAST)
    assert a.optimum_value == b.optimum_value
    assert is_feasible(a.optimizer, ProblemInstance(5, 0.24), 1e-7)
    assert a.optimum_value == pytest.approx(closed_form_value(5, 0.24), abs=1e-4)


def test_multistart_independent_of_worker_count():
    a = multistart_ascent(5, 0.25, AscentConfig(n_starts=50, max_iter=2000, n_outer=6), n_jobs=1)
    b = multistart_ascent(5, 0.25, AscentConfig(n_starts=50, max_iter=2000, n_outer=6), n_jobs=2)
    assert a.optimum_value == b.optimum_value


def test_numeric_opt_agrees_with_closed_form():
    rep = numeric_opt(5, 0.245, FAST)
    assert rep.oracle_residual <= 1e-9
    assert abs(rep.details["search_gap"]) <= 1e-3
    assert rep.support_class.label == "P2(3,2)"
    json.dumps(rep.to_json(), allow_nan=False)


def test_numeric_opt_flags_disagreement():
    weak = AscentConfig(n_starts=1, max_iter=5, n_outer=1)
    with pytest.raises(InconsistencyError):
        numeric_opt(5, 0.24, weak, oracle_tol=1e-12)


def test_estimators():
    est = AnalyticOptSolver().fit(7, 0.25)
    assert est.optimum_value_ == pytest.approx(closed_form_value(7, 0.25))
    est = RestrictedOptSolver(spec=SupportSpec.partition_of((4, 3))).fit(7, 0.25)
    assert est.optimum_value_ == pytest.approx(closed_form_value(7, 0.25), abs=1e-9)
    assert NumericOptSolver(n_starts=10).get_params()["n_starts"] == 10
    with pytest.raises(DomainError):
        RestrictedOptSolver().fit(5, 0.25)

"""Acceptance criteria, each run at its stated tolerance.

Every criterion records a PASS/FAIL line that the terminal summary prints
at the end of the run.  The one cell that cannot be met, the closed form
at q = 9 and density 0.24, is kept at full strength and marked as an
expected failure.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from chromopt import analysis as an
from chromopt import suites
from chromopt.coloring import (
    chromatic_polynomial,
    construction_lower_bound,
    count_colorings_bruteforce,
    count_colorings_multipartite,
    fl_bound_holds,
)
from chromopt.config import RunConfig
from chromopt.extremal import enumerate_graphs, search_extremal
from chromopt.graphs import (
    construct_g_alpha,
    edge_count_bound_check,
    multipartite_parts,
    random_graph,
    turan,
    turan_edges,
)
from chromopt.solver import AscentConfig, analytic_opt, best_structured, numeric_opt

from oracles import atlas_class_counts, is_complete_bipartite_balanced, union_crossover, union_family_value

RESULTS: dict[str, list[tuple[bool, str]]] = {}


def record(criterion: str, ok: bool, detail: str) -> None:
    RESULTS.setdefault(criterion, []).append((bool(ok), detail))


def summary_lines() -> list[str]:
    lines = []
    for key in sorted(RESULTS, key=lambda k: int(k)):
        rows = RESULTS[key]
        bad = [d for ok, d in rows if not ok]
        verdict = "PASS" if not bad else "FAIL"
        detail = f"{len(rows) - len(bad)}/{len(rows)} checks" + (f"; failing: {'; '.join(bad)}" if bad else "")
        lines.append(f"criterion {key}: {verdict} ({detail})")
    return lines


# -- 1: closed form against the numeric oracle -------------------------------------------

CLOSED_FORM_QS = (5, 7, 9)
CLOSED_FORM_GAMMAS = (0.24, 0.245, 0.249, 0.25)
ELAPSED_1: dict[tuple[int, float], float] = {}

_cells = []
for _q in CLOSED_FORM_QS:
    for _g in CLOSED_FORM_GAMMAS:
        marks = []
        if (_q, _g) == (9, 0.24):
            marks = [pytest.mark.xfail(strict=True, reason=(
                "at q=9 the support {A, A^c, [q]} beats the two-block closed form for densities "
                "below about 0.2436, so the exact optimum at 0.24 differs by 5.9e-4"))]
        _cells.append(pytest.param(_q, _g, marks=marks, id=f"q{_q}-g{_g}"))


@pytest.mark.parametrize("q,gamma", _cells)
def test_criterion_1_closed_form_vs_oracle(q, gamma):
    start = time.perf_counter()
    rep = numeric_opt(q, gamma, AscentConfig(seed=0))
    ELAPSED_1[(q, gamma)] = time.perf_counter() - start
    target = an.closed_form_value(q, gamma)
    big = (1 + math.sqrt(1 - 4 * gamma)) / 2
    support = rep.optimizer.support()
    c = (q + 1) // 2
    a_sets = [s for s in support if s.size == c]
    value_ok = abs(rep.optimum_value - target) <= 1e-4
    shape_ok = (len(support) == 2 and len(a_sets) == 1 and a_sets[0].complement() in support)
    weight_ok = shape_ok and abs(rep.optimizer[a_sets[0]] - big) <= 1e-4
    label = rep.support_class.label if hasattr(rep.support_class, "label") else rep.support_class
    record("1", value_ok and shape_ok and weight_ok,
           f"q={q} gamma={gamma}: |numeric - closed form| = {abs(rep.optimum_value - target):.2e}, support {label}")
    assert value_ok, (rep.optimum_value, target)
    assert shape_ok, label
    assert weight_ok


def test_criterion_1_failing_cell_is_the_union_competitor():
    # the value the oracle finds at (9, 0.24) is the union-family optimum, derived in closed form
    rep = numeric_opt(9, 0.24, AscentConfig(seed=0))
    assert rep.optimum_value == pytest.approx(union_family_value(9, 0.24), abs=1e-9)
    assert abs(rep.details["search_gap"]) <= 1e-3


def test_criterion_1_runtime():
    missing = [(q, g) for q in CLOSED_FORM_QS for g in CLOSED_FORM_GAMMAS if (q, g) not in ELAPSED_1]
    if missing:
        pytest.skip("run together with the closed-form cells")
    total = sum(ELAPSED_1.values())
    record("1", total < 60.0, f"runtime {total:.1f} s (budget 60 s)")
    assert total < 60.0


# -- 2: constants -------------------------------------------------------------------------


def test_criterion_2_constants():
    checks = [
        ("mu(5, 1/4) = 0.768 +- 0.001", an.mu_func(5, 0.25), 0.768, 1e-3),
        ("lambda(1, 5, 1/4) = ln 2 +- 1e-12", an.lambda_func(1.0, 5, 0.25), math.log(2), 1e-12),
        ("lambda(0.76, 5, 1/4) = 0.70 +- 0.01", an.lambda_func(0.76, 5, 0.25), 0.70, 1e-2),
        ("rho(0, 5, 1/4) = ln(6)/2 +- 1e-12", an.rho_func(0.0, 5, 0.25), 0.5 * math.log(6), 1e-12),
    ]
    for name, got, want, tol in checks:
        record("2", abs(got - want) <= tol, f"{name}: got {got:.12f}")
    for name, got, want, tol in checks:
        assert abs(got - want) <= tol, name


# -- 3: inequality suites -----------------------------------------------------------------


def test_criterion_3_inequality_suites():
    cfg = RunConfig()
    assert cfg.budgets["samples"] == 10_000 and cfg.budgets["cap_f_grid"] == 10_000
    assert cfg.budgets["grid_points"] == 1_000 and cfg.budgets["mu_q_max"] == 99
    start = time.perf_counter()
    records = suites.sample_checks(cfg, (5, 7, 9), (0.1, 0.2, 0.24, 0.25), {"lemma-tech1", "ratio-bound"})
    records += suites.claim1_monotone(cfg, (5, 7, 9, 11))
    records += suites.claim1_reflection(cfg, (5, 7, 9, 11))
    records += suites.claim2_mu(cfg)
    records += suites.claim2_cap_f(cfg)
    elapsed = time.perf_counter() - start
    by_check: dict[str, list] = {}
    for r in records:
        by_check.setdefault(r.check, []).append(r)
    for name, rows in by_check.items():
        failed = [r for r in rows if not r.satisfied]
        n = sum(r.samples for r in rows)
        record("3", not failed, f"{name}: {len(rows)} cells, {n} evaluations, {len(failed)} failures, "
                                f"worst slack {min(r.slack for r in rows):.3e}")
    assert sum(r.samples for r in by_check["lemma-tech1"]) == 12 * 10_000
    assert sum(r.samples for r in by_check["claim2-cap-f"]) == 10_000
    assert {r.q for r in by_check["claim2-mu"]} == set(range(7, 100, 2))
    record("3", elapsed < 120.0, f"runtime {elapsed:.1f} s (budget 120 s)")
    assert all(r.satisfied for r in records)
    assert elapsed < 120.0


def test_criterion_3_widest_window_per_q():
    # scan down from 1/4 until the exact structured optimum leaves the closed form
    for q in (5, 7, 9, 11):
        grid = [round(0.25 - 0.001 * i, 3) for i in range(31)]
        lowest, broke_at = None, None
        for gamma in grid:
            if abs(best_structured(q, gamma).optimum_value - an.closed_form_value(q, gamma)) > 1e-9:
                broke_at = gamma
                break
            lowest = gamma
        record("3", lowest is not None, f"q={q}: closed form exact on the grid over [{lowest}, 0.25]")
        assert lowest is not None
        # the break is the union-family crossover, derived independently
        if broke_at is not None:
            assert broke_at < union_crossover(q) < lowest


# -- 4: counting equivalence ----------------------------------------------------------------


def _all_classes(n):
    for m in range(n * (n - 1) // 2 + 1):
        yield from enumerate_graphs(n, m)


def test_criterion_4_counting_equivalence():
    start = time.perf_counter()
    mismatches, bound_failures, graphs_seen, multipartite_seen = 0, 0, 0, 0
    corpus = []
    for n in range(1, 8):
        classes = list(_all_classes(n))
        assert len(classes) == sum(atlas_class_counts(n).values())
        corpus += classes
    rng = np.random.default_rng(2024)
    corpus += [random_graph(8, float(p), rng) for p in rng.uniform(0.1, 0.9, size=40)]
    corpus += [turan(2, 8), turan(3, 8), turan(4, 8)]
    for g in corpus:
        graphs_seen += 1
        poly = chromatic_polynomial(g)
        parts = multipartite_parts(g) if g.m else None
        if parts is not None:
            multipartite_seen += 1
        for q in range(2, 7):
            exact = count_colorings_bruteforce(g, q)
            if poly(q) != exact:
                mismatches += 1
            if parts is not None and count_colorings_multipartite(parts, q) != exact:
                mismatches += 1
            if not fl_bound_holds(exact, g.n, g.m, q):
                bound_failures += 1
    elapsed = time.perf_counter() - start
    record("4", mismatches == 0, f"{graphs_seen} graphs ({multipartite_seen} complete multipartite), "
                                 f"q=2..6: {mismatches} count mismatches")
    record("4", bound_failures == 0, f"edge-count bound failures: {bound_failures}")
    record("4", elapsed < 600.0, f"runtime {elapsed:.1f} s (budget 600 s)")
    assert mismatches == 0 and bound_failures == 0 and elapsed < 600.0


# -- 5: extremal instances ----------------------------------------------------------------------

EXPECTED_TURAN_COUNTS = {(4, 4, 3): 18, (4, 4, 5): 260, (5, 6, 5): 860, (6, 9, 5): 2420, (7, 12, 5): 7100}


@pytest.mark.parametrize("n,m,q", list(EXPECTED_TURAN_COUNTS))
def test_criterion_5_turan_is_unique_maximizer(n, m, q):
    assert turan_edges(2, n) == m
    start = time.perf_counter()
    res = search_extremal(n, m, q, workers=4)
    elapsed = time.perf_counter() - start
    winner = res.maximizers[0]
    ok = (res.turan_is_unique_max and len(res.maximizers) == 1
          and is_complete_bipartite_balanced(n, winner.edges)
          and res.max_count == EXPECTED_TURAN_COUNTS[(n, m, q)])
    record("5", ok, f"(n={n}, m={m}, q={q}): {len(res.maximizers)} maximizer(s) among {res.graphs_examined} "
                    f"classes, count {res.max_count}, {elapsed:.1f} s")
    assert ok


# -- 6: construction fidelity -----------------------------------------------------------------


@pytest.mark.parametrize("q", [5, 7, 9])
@pytest.mark.parametrize("n", [9, 10, 50, 200])
def test_criterion_6_construction_fidelity(q, n):
    alpha = analytic_opt(q, 0.25).optimizer
    g, _ = construct_g_alpha(alpha, n)
    exact_turan = g == turan(2, n) or is_complete_bipartite_balanced(n, g.edges)
    bound = edge_count_bound_check(alpha, n)
    detail = f"q={q} n={n}: T_2(n) {exact_turan}, edge bound slack {bound.slack:.1f}"
    ok = exact_turan and bound.satisfied
    if n <= 64:  # exact multipartite counting budget
        exact = count_colorings_multipartite(multipartite_parts(g), q)
        lower = construction_lower_bound(alpha, n)
        ok = ok and lower <= exact
        detail += f", lower bound <= exact count {lower <= exact}"
    else:
        detail += ", exact count out of budget"
    record("6", ok, detail)
    assert ok


# -- 7: determinism -----------------------------------------------------------------------------


def test_criterion_7_report_is_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"report{i}.json"
        proc = subprocess.run([sys.executable, "-m", "chromopt.cli", "report", "--seed", "0", "--json", str(path)],
                              capture_output=True, text=True, cwd=tmp_path)
        assert proc.returncode in (0, 3), proc.stderr
        outs.append(path.read_bytes())
    same = outs[0] == outs[1]
    record("7", same, f"two seeded report runs, {len(outs[0])} bytes each, identical {same}")
    assert same

"""Batch checks of the inequalities behind the closed form, on grids and random feasible samples.

Every check yields records ``{check, q, gamma, satisfied, slack, samples}``
where ``slack`` is the worst margin seen (negative means a violation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from chromopt import analysis as an
from chromopt.coloring import chromatic_polynomial, fl_bound_holds, fl_upper_bound_exact
from chromopt.config import RunConfig
from chromopt.graphs import construct_g_alpha, edge_count_bound_check, edit_distance_labeled, random_graph
from chromopt.opt_core import sample_feasible
from chromopt.solver import analytic_opt, best_structured

STRICT_MARGIN = 1e-12


@dataclass(frozen=True)
class CheckRecord:
    check: str
    q: int | None
    gamma: float | None
    satisfied: bool
    slack: float
    samples: int

    def to_json(self) -> dict:
        return {"check": self.check, "q": self.q, "gamma": self.gamma, "satisfied": self.satisfied,
                "slack": self.slack, "samples": self.samples}


def _record(check, q, gamma, slacks, tol, strict=False) -> CheckRecord:
    slacks = np.atleast_1d(np.asarray(slacks, dtype=float))
    worst = float(slacks.min())
    ok = worst >= STRICT_MARGIN if strict else worst >= -tol
    return CheckRecord(check, q, gamma, bool(ok), worst, int(slacks.size))


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def _gamma_key(gamma: float) -> int:
    return int(round(gamma * 1e9))


def gamma_grid(lo: float, hi: float, points: int) -> list[float]:
    """``points`` evenly spaced values in ``(lo, hi]``."""
    return [lo + (hi - lo) * (i + 1) / points for i in range(points)]


def _odd_range(lo: int, hi: int) -> list[int]:
    return [q for q in range(lo, hi + 1) if q % 2 == 1]


# -- sample-based checks -----------------------------------------------------------------


def sample_checks(cfg: RunConfig, qs, gammas, which: set[str]) -> list[CheckRecord]:
    """Per-vector inequalities on random feasible samples, shared across checks per (q, gamma)."""
    tol = cfg.tolerances["inequality"]
    n = cfg.budgets["samples"]
    out = []
    for q in qs:
        for gamma in gammas:
            rng = _rng(cfg.seed, 1, q, _gamma_key(gamma))
            slacks = {name: [] for name in ("lemma-tech1", "ratio-bound", "amgm")}
            for _ in range(n):
                beta = sample_feasible(q, gamma, rng)
                if "lemma-tech1" in which:
                    slacks["lemma-tech1"].append(an.check_lemma_tech1(beta, gamma, tol).slack)
                if "ratio-bound" in which:
                    slacks["ratio-bound"].append(an.check_ratio_bound(beta, tol).slack)
                if "amgm" in which:
                    slacks["amgm"].append(an.check_amgm(beta, gamma, tol).slack)
            for name, vals in slacks.items():
                if name in which:
                    out.append(_record(name, q, gamma, vals, tol))
    return out


# -- grid checks ---------------------------------------------------------------------------


def claim1_monotone(cfg, qs=(5, 7, 9, 11)):
    tol = cfg.tolerances["inequality"]
    pts = cfg.budgets["grid_points"]
    out = []
    for q in qs:
        up = np.linspace(2.0, q, pts, endpoint=False)
        down = np.linspace(q, 2.0 * q, pts + 1)[1:]
        hu = np.array([an.h_func(q, m) for m in up])
        hd = np.array([an.h_func(q, m) for m in down])
        slack = np.concatenate([np.diff(hu), -np.diff(hd)])
        out.append(_record("claim1-monotone", q, None, slack, tol))
    return out


def claim1_reflection(cfg, qs=(5, 7, 9, 11)):
    pts = cfg.budgets["grid_points"]
    out = []
    for q in qs:
        ks = np.linspace(1.0, q - 2.0, pts)
        slack = [an.h_func(q, q + k) - an.h_func(q, q - k) for k in ks]
        out.append(_record("claim1-reflection", q, None, slack, 0.0, strict=True))
    return out


def f_decomposition(cfg, qs, gammas):
    pts = cfg.budgets["grid_points"]
    out = []
    for q in qs:
        ms = np.linspace(2.0, 2.0 * q, pts)
        for gamma in gammas:
            if gamma > 0.25:
                continue
            g = an.g_func(q, gamma)
            err = [abs(an.f_func(m, q, gamma) - (an.h_func(q, m) + g)) for m in ms]
            out.append(_record("f-decomposition", q, gamma, 1e-12 - np.array(err), 0.0))
    return out


def claim2_mu(cfg):
    qmax = cfg.budgets["mu_q_max"]
    return [_record("claim2-mu", q, 0.25, an.mu_func(q, 0.25) - 0.8, cfg.tolerances["inequality"])
            for q in _odd_range(7, qmax)]


def claim2_cap_f(cfg):
    xs = np.linspace(0.0, 1.0 / 7.0, cfg.budgets["cap_f_grid"])
    vals = [an.cap_f_func(float(x)) for x in xs]
    return [_record("claim2-cap-f", None, None, vals, cfg.tolerances["inequality"])]


def l_checks(cfg):
    ts = np.linspace(0.0, 1.0, cfg.budgets["grid_points"] + 1, endpoint=False)[1:]
    vals = np.array([an.l_func(float(t)) for t in ts])
    return [_record("l-positive", None, None, vals, 0.0, strict=True),
            _record("l-increasing", None, None, np.diff(vals), 0.0, strict=True)]


def mu_window(cfg, qs):
    """``mu(q, gamma) >= mu(q, 1/4)`` for gamma in [0.249, 0.25]."""
    tol = cfg.tolerances["inequality"]
    gs = np.linspace(0.249, 0.25, cfg.budgets["grid_points"])
    return [_record("mu-window", q, None, [an.mu_func(q, float(g)) - an.mu_func(q, 0.25) for g in gs], tol)
            for q in qs]


def mu_decreasing(cfg, qs, lo=0.2495):
    """Finite differences of ``mu(q, .)`` are negative on [lo, 1/4]."""
    gs = np.linspace(lo, 0.25, cfg.budgets["grid_points"])
    out = []
    for q in qs:
        vals = np.array([an.mu_func(q, float(g)) for g in gs])
        out.append(_record("mu-decreasing", q, None, -np.diff(vals), 0.0, strict=True))
    return out


def tau_checks(cfg):
    out = [_record("tau-q5", 5, g, an.tau_func(5, g) - an.psi(5), 0.0, strict=True) for g in (0.24, 0.245, 0.25)]
    out += [_record("tau-large-q", q, 0.25, 0.80 - an.tau_func(q, 0.25), cfg.tolerances["inequality"])
            for q in (7, 9, 11)]
    return out


def lambda_checks(cfg):
    """``lambda(1, q, 1/4) = log(q-1)/2`` stays below the closed-form value at 1/4."""
    out = []
    for q in _odd_range(5, cfg.budgets["mu_q_max"]):
        out.append(_record("lambda-endpoint", q, 0.25, an.closed_form_value(q, 0.25) - an.lambda_func(1.0, q, 0.25),
                           0.0, strict=True))
    return out


def rho_decreasing(cfg, qs, gammas):
    ts = np.linspace(0.0, 0.24, cfg.budgets["grid_points"])
    out = []
    for q in qs:
        for gamma in gammas:
            if gamma > 0.25:
                continue
            vals = np.array([an.rho_func(float(t), q, gamma) for t in ts])
            out.append(_record("rho-decreasing", q, gamma, -np.diff(vals), 0.0, strict=True))
    return out


def claim2_mass(cfg, qs, gammas):
    """Middle-size mass of the computed optimum for gamma in the closed-form window."""
    tol = cfg.tolerances["inequality"]
    out = []
    for q in qs:
        if q < 5 or q % 2 == 0:
            continue
        for gamma in gammas:
            if not 0.24 <= gamma <= 0.25:
                continue
            rep = best_structured(q, gamma)
            res = an.check_claim2_mass(rep.optimizer, gamma, 1e-7)
            out.append(_record("claim2-mass", q, gamma, res.slack, tol))
    return out


def lps1_edges(cfg, gammas):
    out = []
    for q in (5, 7, 9):
        for gamma in (0.24, 0.25):
            alpha = analytic_opt(q, gamma).optimizer
            slack = [edge_count_bound_check(alpha, n).slack for n in (10, 50, 200)]
            out.append(_record("lps1-edges", q, gamma, slack, 0.0, strict=True))
    for gamma in gammas:
        rng = _rng(cfg.seed, 2, _gamma_key(gamma))
        slack = [edge_count_bound_check(sample_feasible(5, gamma, rng), 100).slack for _ in range(100)]
        out.append(_record("lps1-edges", 5, gamma, slack, 0.0, strict=True))
    return out


def lps1_edit(cfg, gammas, n=60, pairs=50):
    """Edit distance between blow-ups is at most ``|alpha - nu|_1 n^2 + 2^(q+1) n`` (labeled distance bounds it)."""
    q = 5
    out = []
    for gamma in gammas:
        rng = _rng(cfg.seed, 3, _gamma_key(gamma))
        slack = []
        for _ in range(pairs):
            a = sample_feasible(q, gamma, rng)
            b = sample_feasible(q, gamma, rng)
            ga, _ = construct_g_alpha(a, n)
            gb, _ = construct_g_alpha(b, n)
            l1 = sum(abs(a[m] - b[m]) for m in set(a.coords) | set(b.coords))
            slack.append(l1 * n * n + 2 ** (q + 1) * n - edit_distance_labeled(ga, gb))
        out.append(_record("lps1-edit", q, gamma, slack, 0.0))
    return out


def fl_bound(cfg):
    """Exact coloring counts never exceed the edge-count bound (both forms)."""
    rng = _rng(cfg.seed, 4)
    out = []
    for q in (3, 5):
        slack_strong, slack_weak = [], []
        for _ in range(cfg.budgets["fl_graphs"]):
            n = int(rng.integers(1, 9))
            g = random_graph(n, float(rng.uniform(0.0, 1.0)), rng)
            count = chromatic_polynomial(g)(q)
            for weak, sink in ((False, slack_strong), (True, slack_weak)):
                bound = fl_upper_bound_exact(g.n, g.m, q, weak)
                ok = fl_bound_holds(count, g.n, g.m, q, weak)
                sink.append(float(bound - count) if ok else -float(count - bound) - 1.0)
        out.append(_record("fl-bound", q, None, slack_strong, 0.0))
        out.append(_record("fl-bound-weak", q, None, slack_weak, 0.0))
    return out


CHECK_NAMES = (
    "lemma-tech1", "ratio-bound", "amgm", "claim1-monotone", "claim1-reflection", "f-decomposition",
    "claim2-mu", "claim2-cap-f", "claim2-mass", "l-func", "mu-window", "mu-decreasing", "tau", "lambda",
    "rho-decreasing", "lps1-edges", "lps1-edit", "fl-bound",
)


def run_suite(cfg: RunConfig, checks: Iterable[str] | None = None, gammas: list[float] | None = None,
              qs: list[int] | None = None) -> list[CheckRecord]:
    """Run the named checks (all by default) and return their records in a fixed order."""
    which = set(CHECK_NAMES if checks is None else checks)
    unknown = which - set(CHECK_NAMES)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    qs = list(cfg.verify_q if qs is None else qs)
    gammas = list(cfg.verify_gammas if gammas is None else gammas)
    odd_qs = [q for q in qs if q >= 5 and q % 2 == 1]
    out: list[CheckRecord] = []
    sample_names = which & {"lemma-tech1", "ratio-bound", "amgm"}
    if sample_names:
        out += sample_checks(cfg, qs, gammas, sample_names)
    table: list[tuple[str, Callable[[], list[CheckRecord]]]] = [
        ("claim1-monotone", lambda: claim1_monotone(cfg)),
        ("claim1-reflection", lambda: claim1_reflection(cfg)),
        ("f-decomposition", lambda: f_decomposition(cfg, odd_qs, gammas)),
        ("claim2-mu", lambda: claim2_mu(cfg)),
        ("claim2-cap-f", lambda: claim2_cap_f(cfg)),
        ("claim2-mass", lambda: claim2_mass(cfg, odd_qs, gammas)),
        ("l-func", lambda: l_checks(cfg)),
        ("mu-window", lambda: mu_window(cfg, odd_qs)),
        ("mu-decreasing", lambda: mu_decreasing(cfg, odd_qs)),
        ("tau", lambda: tau_checks(cfg)),
        ("lambda", lambda: lambda_checks(cfg)),
        ("rho-decreasing", lambda: rho_decreasing(cfg, odd_qs, gammas)),
        ("lps1-edges", lambda: lps1_edges(cfg, gammas)),
        ("lps1-edit", lambda: lps1_edit(cfg, gammas)),
        ("fl-bound", lambda: fl_bound(cfg)),
    ]
    for name, fn in table:
        if name in which:
            out += fn()
    return out


def summarize(records: list[CheckRecord]) -> dict:
    failed = [r for r in records if not r.satisfied]
    return {"records": len(records), "failed": len(failed), "all_satisfied": not failed}

"""Scalar functions and inequality checks behind the closed-form solution near gamma = 1/4.

All logarithms are natural.  ``c = ceil(q/2)`` and ``f = floor(q/2)``
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from chromopt._validation import DomainError, check_odd_q, check_real
from chromopt.opt_core import (
    FeasibleVector,
    ProblemInstance,
    is_feasible,
    obj_value,
    p_s_vector,
)

INEQUALITY_TOL = 1e-9
GAMMA_WINDOW = (0.24, 0.25)


@dataclass(frozen=True)
class LemmaCheckResult:
    """Verdict for an inequality ``lhs <= rhs``."""

    lhs: float
    rhs: float
    satisfied: bool
    slack: float
    vacuous: bool = False

    @classmethod
    def compare(cls, lhs: float, rhs: float, tol: float = INEQUALITY_TOL) -> "LemmaCheckResult":
        slack = rhs - lhs
        return cls(lhs, rhs, slack >= -tol, slack)

    def __bool__(self) -> bool:
        return self.satisfied

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "satisfied": self.satisfied,
                "slack": self.slack, "vacuous": self.vacuous}


def _halves(q: int) -> tuple[int, int]:
    return (q + 1) // 2, q // 2


def closed_form_value(q: int, gamma: float) -> float:
    """``(1/2) log(c f) + (sqrt(1 - 4 gamma) / 2) log(c / f)``."""
    c, f = _halves(q)
    return 0.5 * math.log(c * f) + math.sqrt(1.0 - 4.0 * gamma) / 2.0 * math.log(c / f)


def h_func(q: float, m: float) -> float:
    check_real(q, "q", lo=5.0)
    check_real(m, "m", lo=2.0, hi=2.0 * q)
    return math.log(m / q) - 2.0 * math.sqrt(m / q)


def g_func(q: int, gamma: float) -> float:
    """The part of :func:`f_func` that does not depend on ``m``."""
    c, f = _halves(q)
    return (0.5 * math.log(q * q / (q * q - 1.0))
            + math.sqrt(1.0 - 4.0 * gamma) / 2.0 * math.log(f / c)
            + 3.0 - 4.0 * gamma)


def f_func(m: float, q: int, gamma: float) -> float:
    q = check_odd_q(q)
    check_real(m, "m", lo=2.0, hi=2.0 * q)
    check_real(gamma, "gamma", lo=0.0, lo_open=True, hi=0.25)
    c, f = _halves(q)
    return (math.log(m / q)
            + 0.5 * math.log(q * q / (q * q - 1.0))
            + math.sqrt(1.0 - 4.0 * gamma) / 2.0 * math.log(f / c)
            - 2.0 * math.sqrt(m / q)
            + 3.0 - 4.0 * gamma)


def psi(q: int) -> float:
    """Lower bound on the weight carried by sets of size ``floor(q/2)`` or ``ceil(q/2)``."""
    q = check_odd_q(q)
    return 0.76 if q == 5 else 0.80


def mu_denominator(q: int) -> float:
    return math.log((q + 3) / (q + 1)) + 2.0 * (math.sqrt((q + 1) / q) - math.sqrt((q + 3) / q))


def mu_func(q: int, gamma: float) -> float:
    q = check_odd_q(q)
    check_real(gamma, "gamma", lo=0.0, lo_open=True, hi=0.25)
    c, f = _halves(q)
    num = (math.log((q + 3) / math.sqrt(q * q - 1.0))
           - 2.0 * math.sqrt((q + 3) / q)
           - math.sqrt(1.0 - 4.0 * gamma) / 2.0 * math.log(c / f)
           - 4.0 * gamma + 3.0)
    den = mu_denominator(q)
    assert den != 0.0, "denominator vanishes"
    return num / den


def cap_f_func(x: float) -> float:
    check_real(x, "x", lo=0.0, hi=1.0 / 7.0)
    return (2.0 * math.sqrt(1 + 3 * x) - math.log(1 + 3 * x) + 8.0 * math.sqrt(1 + x)
            - 1.5 * math.log(1 + x) + 2.5 * math.log(1 - x) - 10.0)


def l_func(t: float) -> float:
    check_real(t, "t", lo=0.0, hi=1.0, hi_open=True)
    return math.log((1 + t) / (1 - t)) - 2.0 * (math.sqrt(1 + t) - math.sqrt(1 - t))


def lambda_func(t: float, q: int, gamma: float) -> float:
    check_real(t, "t", lo=0.0, hi=1.0)
    radicand = 1.0 - 2.0 * gamma + t * t / 2.0
    if radicand < 0:
        raise DomainError("1 - 2 gamma + t^2/2 must be nonnegative")
    return -math.log(2.0) * t + math.log(q - 1) * math.sqrt(radicand)


def tau_func(q: int, gamma: float) -> float:
    if q < 5:
        raise DomainError(f"tau needs q >= 5, got {q}")
    den = math.log(q - 1) ** 2 - 2.0 * math.log(2.0) ** 2
    if den <= 0:
        raise DomainError("log(q-1)^2 - 2 log(2)^2 must be positive")
    return math.sqrt(math.log(2.0) * (4.0 - 8.0 * gamma) / den)


def rho_func(t: float, q: int, gamma: float) -> float:
    check_real(t, "t", lo=0.0, hi=1.0)
    check_real(gamma, "gamma", hi=0.25)
    c, f = _halves(q)
    return math.log((q - 1) / 2.0) + math.log(c / f) * ((math.sqrt(1.0 - 4.0 * gamma + 2.0 * t * t) + 1.0) / 2.0 - t)


def m_roots(gamma: float) -> tuple[float, float]:
    """Roots ``(M-, M+)`` of ``x (1 - x) = gamma``."""
    gamma = check_real(gamma, "gamma", lo=0.0, lo_open=True)
    if gamma > 0.25:
        raise DomainError(f"x(1-x) = gamma has complex roots for gamma = {gamma} > 1/4")
    s = math.sqrt(1.0 - 4.0 * gamma)
    return (1.0 - s) / 2.0, (1.0 + s) / 2.0


def mu_decreasing_threshold(q: int) -> float:
    """Smallest gamma above which ``mu(q, .)`` is strictly decreasing.

    The gamma-derivative of ``mu`` is negative exactly when
    ``sqrt(1 - 4 gamma) < log(c/f) / 4``.
    """
    c, f = _halves(q)
    s = math.log(c / f) / 4.0
    return (1.0 - s * s) / 4.0


# -- checks on feasible vectors ------------------------------------------------


def _require_feasible(beta: FeasibleVector, gamma: float, tol: float = INEQUALITY_TOL) -> None:
    if not is_feasible(beta, ProblemInstance(beta.q, gamma), tol):
        raise DomainError("beta is not feasible for the given gamma")


def check_lemma_tech1(beta: FeasibleVector, gamma: float, tol: float = INEQUALITY_TOL) -> LemmaCheckResult:
    """``sum_S (2 sqrt(2 |S|/q) - (3 - 4 gamma)) beta_S <= 0``."""
    check_real(gamma, "gamma", lo=0.0, lo_open=True, hi=0.25)
    _require_feasible(beta, gamma, tol)
    masks, values = beta.arrays()
    sizes = np.array([bin(int(m)).count("1") for m in masks], dtype=float)
    lhs = math.fsum((2.0 * np.sqrt(2.0 * sizes / beta.q) - (3.0 - 4.0 * gamma)) * values)
    return LemmaCheckResult.compare(lhs, 0.0, tol)


def check_ratio_bound(beta: FeasibleVector, tol: float = INEQUALITY_TOL) -> LemmaCheckResult:
    """``sum_S (Q_S / P_S) beta_S <= 1`` over the support of ``beta``."""
    masks, values, p = p_s_vector(beta)
    sizes = np.array([bin(int(m)).count("1") for m in masks], dtype=float)
    lhs = math.fsum(sizes / beta.q / p * values)
    return LemmaCheckResult.compare(lhs, 1.0, tol)


def check_amgm(beta: FeasibleVector, gamma: float, tol: float = INEQUALITY_TOL) -> LemmaCheckResult:
    """Per-set bound ``2 sqrt(2Q) <= (2 - 4 gamma) Q/P + P / (1 - 2 gamma)``; reports the worst set."""
    masks, values, p = p_s_vector(beta)
    qs = np.array([bin(int(m)).count("1") for m in masks], dtype=float) / beta.q
    lhs = 2.0 * np.sqrt(2.0 * qs)
    rhs = (2.0 - 4.0 * gamma) * qs / p + p / (1.0 - 2.0 * gamma)
    i = int(np.argmin(rhs - lhs))
    return LemmaCheckResult.compare(float(lhs[i]), float(rhs[i]), tol)


def middle_mass(beta: FeasibleVector) -> float:
    """Weight on sets of size ``floor(q/2)`` or ``ceil(q/2)``."""
    c, f = _halves(beta.q)
    return math.fsum(v for m, v in beta.coords.items() if bin(m).count("1") in (c, f))


def check_claim2_mass(beta: FeasibleVector, gamma: float, tol: float = INEQUALITY_TOL) -> LemmaCheckResult:
    """Middle-size mass ``>= psi(q)`` for vectors whose objective reaches the closed-form value.

    When the objective hypothesis fails the implication holds vacuously and
    the result is flagged ``vacuous``.
    """
    q = check_odd_q(beta.q)
    check_real(gamma, "gamma", lo=0.0, lo_open=True, hi=0.25)
    _require_feasible(beta, gamma, tol)
    bound = psi(q)
    mass = middle_mass(beta)
    if obj_value(beta) < closed_form_value(q, gamma) - tol:
        return LemmaCheckResult(bound, mass, True, mass - bound, vacuous=True)
    return LemmaCheckResult.compare(bound, mass, tol)

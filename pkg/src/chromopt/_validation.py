"""Argument checking shared by the public functions and estimators."""

from __future__ import annotations

import math
import numbers


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class InconsistencyError(RuntimeError):
    """Two independent computations that must agree did not."""


def check_int(value, name: str, *, min_value: int | None = None, max_value: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if min_value is not None and value < min_value:
        raise DomainError(f"{name} must be >= {min_value}, got {value}")
    if max_value is not None and value > max_value:
        raise DomainError(f"{name} must be <= {max_value}, got {value}")
    return value


def check_real(value, name: str, *, lo: float | None = None, hi: float | None = None,
               lo_open: bool = False, hi_open: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    if lo is not None and (value < lo or (lo_open and value == lo)):
        raise DomainError(f"{name} must be {'>' if lo_open else '>='} {lo}, got {value}")
    if hi is not None and (value > hi or (hi_open and value == hi)):
        raise DomainError(f"{name} must be {'<' if hi_open else '<='} {hi}, got {value}")
    return value


def check_odd_q(q, min_value: int = 5) -> int:
    q = check_int(q, "q")
    if q < min_value or q % 2 == 0:
        raise DomainError(f"q must be odd >= {min_value}, got {q}")
    return q


def check_gamma(gamma, q: int) -> float:
    """Validate ``0 < gamma <= (q - 1) / (2q)``."""
    return check_real(gamma, "gamma", lo=0.0, lo_open=True, hi=(q - 1) / (2 * q) + 1e-15)


def check_tolerance(tol, name: str = "tol") -> float:
    return check_real(tol, name, lo=0.0)

"""Run configuration: baked-in defaults, then the environment, a flat TOML file, and command-line flags."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields

import tomli

from chromopt._validation import DomainError

SEED_ENV = "CHROMOPT_SEED"


def _tolerances():
    return {
        "oracle": 1e-3,
        "analytic": 1e-4,
        "inequality": 1e-9,
        "feasibility": 1e-7,
    }


def _budgets():
    return {
        "samples": 10_000,
        "grid_points": 1_000,
        "cap_f_grid": 10_000,
        "mu_q_max": 99,
        "gamma_grid": 8,
        "ascent_starts": 200,
        "ascent_max_iter": 10_000,
        "fl_graphs": 500,
    }


@dataclass
class RunConfig:
    seed: int = 0
    tolerances: dict = field(default_factory=_tolerances)
    gamma_window: tuple = (0.24, 0.25)
    budgets: dict = field(default_factory=_budgets)
    output_path: str = ""
    workers: int = 1
    ascent_step: float = 1e-2
    verify_q: tuple = (5, 7, 9)
    verify_gammas: tuple = (0.1, 0.2, 0.24, 0.25)

    def validate(self) -> "RunConfig":
        for name, tol in self.tolerances.items():
            if not tol > 0:
                raise DomainError(f"tolerance {name} must be > 0, got {tol}")
        lo, hi = self.gamma_window
        if not (0.0 <= lo < hi <= 0.25):
            raise DomainError(f"gamma_window must satisfy 0 <= lo < hi <= 1/4, got [{lo}, {hi}]")
        for name, b in self.budgets.items():
            if not (isinstance(b, int) and b > 0):
                raise DomainError(f"budget {name} must be a positive integer, got {b!r}")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if not self.ascent_step > 0:
            raise DomainError("ascent_step must be > 0")
        return self

    def to_json(self) -> dict:
        out = asdict(self)
        out["gamma_window"] = list(self.gamma_window)
        out["verify_q"] = list(self.verify_q)
        out["verify_gammas"] = list(self.verify_gammas)
        return out

    def to_toml(self) -> str:
        lines = [f"seed = {self.seed}"]
        lines.append(f"gamma_window = [{self.gamma_window[0]!r}, {self.gamma_window[1]!r}]")
        lines.append(f'output_path = "{self.output_path}"')
        lines.append(f"workers = {self.workers}")
        lines.append(f"ascent_step = {self.ascent_step!r}")
        lines.append(f"verify_q = [{', '.join(map(str, self.verify_q))}]")
        lines.append(f"verify_gammas = [{', '.join(repr(g) for g in self.verify_gammas)}]")
        for k, v in self.tolerances.items():
            lines.append(f"tol_{k} = {v!r}")
        for k, v in self.budgets.items():
            lines.append(f"budget_{k} = {v}")
        return "\n".join(lines) + "\n"


def _apply(cfg: RunConfig, values: dict, origin: str) -> None:
    plain = {f.name for f in fields(RunConfig)} - {"tolerances", "budgets"}
    for key, value in values.items():
        if key.startswith("tol_") and key[4:] in cfg.tolerances:
            cfg.tolerances[key[4:]] = float(value)
        elif key.startswith("budget_") and key[7:] in cfg.budgets:
            if isinstance(value, bool) or not isinstance(value, int):
                raise DomainError(f"{origin}: {key} must be an integer")
            cfg.budgets[key[7:]] = value
        elif key in plain:
            if key in ("gamma_window", "verify_q", "verify_gammas"):
                value = tuple(value)
                if key == "gamma_window" and len(value) != 2:
                    raise DomainError(f"{origin}: gamma_window needs two numbers")
            setattr(cfg, key, value)
        else:
            raise DomainError(f"{origin}: unknown config key {key!r}")


def load_config(path: str | None = None, overrides: dict | None = None, environ=None) -> RunConfig:
    """Defaults, then ``CHROMOPT_SEED``, then the file at ``path``, then ``overrides`` (flags)."""
    cfg = RunConfig()
    environ = os.environ if environ is None else environ
    if environ.get(SEED_ENV):
        try:
            cfg.seed = int(environ[SEED_ENV])
        except ValueError as exc:
            raise DomainError(f"{SEED_ENV} must be an integer") from exc
    if path:
        with open(path, "rb") as fh:
            try:
                data = tomli.load(fh)
            except tomli.TOMLDecodeError as exc:
                raise DomainError(f"{path}: {exc}") from exc
        nested = [k for k, v in data.items() if isinstance(v, dict)]
        if nested:
            raise DomainError(f"{path}: config must be flat, found tables {nested}")
        _apply(cfg, data, path)
    if overrides:
        _apply(cfg, {k: v for k, v in overrides.items() if v is not None}, "command line")
    return cfg.validate()

"""Feasible vectors and the objective/constraint functionals of the coloring program.

A vector assigns a nonnegative weight to each nonempty subset of ``[q]``.
The program maximizes ``OBJ = sum alpha_A log|A|`` subject to
``V = sum alpha_A = 1`` and ``E = sum over unordered disjoint pairs {A, B}
of alpha_A alpha_B >= gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from chromopt._validation import DomainError, check_gamma, check_int, check_tolerance
from chromopt.subsetspace import ColorSet, full_mask

SUPPORT_THRESHOLD = 1e-7
FEASIBILITY_TOL = 1e-9
NORMALIZED_TOL = 1e-9


@dataclass(frozen=True)
class ProblemInstance:
    q: int
    gamma: float

    def __post_init__(self):
        check_int(self.q, "q", min_value=2)
        check_gamma(self.gamma, self.q)

    @property
    def rhs(self) -> float:
        """Right-hand side ``1 - 2 gamma`` of the intersecting-pairs form of the constraint."""
        return 1.0 - 2.0 * self.gamma

    def to_json(self) -> dict:
        return {"q": self.q, "gamma": self.gamma}


class FeasibleVector:
    """Sparse nonnegative weights on the nonempty subsets of ``[q]``.

    Coordinates are keyed by subset bit mask; absent keys are zero.
    """

    __slots__ = ("q", "_coords")

    def __init__(self, q: int, coords: Mapping[int, float] | None = None):
        self.q = check_int(q, "q", min_value=2)
        top = full_mask(self.q)
        clean = {}
        for mask, value in (coords or {}).items():
            if isinstance(mask, ColorSet):
                mask = mask.mask
            mask = int(mask)
            if not 0 < mask <= top:
                raise DomainError(f"invalid subset mask {mask} for q={self.q}")
            value = float(value)
            if value < 0:
                raise DomainError(f"coordinate for mask {mask} is negative: {value}")
            if value > 0:
                clean[mask] = clean.get(mask, 0.0) + value
        self._coords = dict(sorted(clean.items()))

    @classmethod
    def from_sets(cls, q: int, weights: Mapping[Iterable[int], float]) -> "FeasibleVector":
        """Build from ``{colors: weight}`` with 1-based colors, e.g. ``{(1, 2, 3): 0.5}``."""
        coords: dict[int, float] = {}
        for colors, value in weights.items():
            mask = ColorSet.from_colors(colors, q).mask
            coords[mask] = coords.get(mask, 0.0) + value
        return cls(q, coords)

    @classmethod
    def from_arrays(cls, q: int, masks: Sequence[int], values: Sequence[float]) -> "FeasibleVector":
        coords: dict[int, float] = {}
        for m, v in zip(masks, values):
            coords[int(m)] = coords.get(int(m), 0.0) + float(v)
        return cls(q, coords)

    @property
    def coords(self) -> dict[int, float]:
        return dict(self._coords)

    def __getitem__(self, key) -> float:
        if isinstance(key, ColorSet):
            key = key.mask
        return self._coords.get(int(key), 0.0)

    def __len__(self) -> int:
        return len(self._coords)

    def __eq__(self, other) -> bool:
        return isinstance(other, FeasibleVector) and self.q == other.q and self._coords == other._coords

    def __repr__(self) -> str:
        inner = ", ".join(f"{ColorSet(m, self.q)!r}: {v:.6g}" for m, v in self._coords.items())
        return f"FeasibleVector(q={self.q}, {{{inner}}})"

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        masks = np.fromiter(self._coords.keys(), dtype=np.int64, count=len(self._coords))
        values = np.fromiter(self._coords.values(), dtype=float, count=len(self._coords))
        return masks, values

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> list[ColorSet]:
        return [ColorSet(m, self.q) for m, v in self._coords.items() if v > threshold]

    @property
    def normalized(self) -> bool:
        return abs(v_value(self) - 1.0) <= NORMALIZED_TOL

    def pruned(self, threshold: float = SUPPORT_THRESHOLD) -> "FeasibleVector":
        """Drop coordinates at or below ``threshold`` and renormalize."""
        kept = {m: v for m, v in self._coords.items() if v > threshold}
        total = sum(kept.values())
        if total == 0:
            return FeasibleVector(self.q)
        return FeasibleVector(self.q, {m: v / total for m, v in kept.items()})

    def dense(self) -> np.ndarray:
        """Weights as an array of length ``2**q - 1``; entry ``i`` is the set with mask ``i + 1``."""
        out = np.zeros(full_mask(self.q))
        for m, v in self._coords.items():
            out[m - 1] = v
        return out

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "coords": [{"set": ColorSet(m, self.q).to_json(), "value": v} for m, v in self._coords.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FeasibleVector":
        q = int(data["q"])
        coords: dict[int, float] = {}
        for item in data["coords"]:
            mask = ColorSet.from_json(item["set"], q).mask
            coords[mask] = coords.get(mask, 0.0) + float(item["value"])
        return cls(q, coords)


def popcount(masks: np.ndarray) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros(masks.shape, dtype=np.int64)
    m = masks.copy()
    while np.any(m):
        out += m & 1
        m >>= 1
    return out


def disjoint_matrix(masks: np.ndarray) -> np.ndarray:
    """Boolean matrix ``D[i, j] = (A_i & A_j == 0)``. The diagonal is False for nonempty sets."""
    masks = np.asarray(masks, dtype=np.int64)
    return (masks[:, None] & masks[None, :]) == 0


def obj_value(alpha: FeasibleVector) -> float:
    return math.fsum(v * math.log(bin(m).count("1")) for m, v in alpha.coords.items())


def v_value(alpha: FeasibleVector) -> float:
    return math.fsum(alpha.coords.values())


def e_value(alpha: FeasibleVector) -> float:
    items = list(alpha.coords.items())
    terms = []
    for i, (a, va) in enumerate(items):
        for b, vb in items[i + 1:]:
            if a & b == 0:
                terms.append(va * vb)
    return math.fsum(terms)


@dataclass(frozen=True)
class FeasibilityCheck:
    """Verdict of :func:`is_feasible`; truthy when feasible."""

    feasible: bool
    min_coord: float
    v_error: float
    e_margin: float
    tol: float

    def __bool__(self) -> bool:
        return self.feasible

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "min_coord": self.min_coord,
            "v_error": self.v_error,
            "e_margin": self.e_margin,
            "tol": self.tol,
        }


def is_feasible(alpha: FeasibleVector, inst: ProblemInstance, tol: float = FEASIBILITY_TOL) -> FeasibilityCheck:
    tol = check_tolerance(tol)
    if alpha.q != inst.q:
        raise DomainError(f"vector has q={alpha.q}, instance has q={inst.q}")
    values = list(alpha.coords.values())
    min_coord = min(values) if values else 0.0
    v_error = abs(v_value(alpha) - 1.0)
    e_margin = e_value(alpha) - inst.gamma
    ok = min_coord >= -tol and v_error <= tol and e_margin >= -tol
    return FeasibilityCheck(ok, min_coord, v_error, e_margin, tol)


def p_s(alpha: FeasibleVector, s: ColorSet | int) -> float:
    """Total weight on the sets that meet ``s``."""
    mask = s.mask if isinstance(s, ColorSet) else int(s)
    if mask == 0:
        raise DomainError("S must be nonempty")
    return math.fsum(v for m, v in alpha.coords.items() if m & mask)


def q_s(q: int, s: ColorSet | int) -> float:
    mask = s.mask if isinstance(s, ColorSet) else int(s)
    if not 0 < mask <= full_mask(q):
        raise DomainError(f"S must be a nonempty subset of [{q}]")
    return bin(mask).count("1") / q


def p_s_vector(alpha: FeasibleVector) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(masks, values, P)`` with ``P[i] = p_s(alpha, masks[i])`` for every stored set."""
    masks, values = alpha.arrays()
    meets = ~disjoint_matrix(masks)
    return masks, values, meets.astype(float) @ values


def e_identity_residual(alpha: FeasibleVector) -> float:
    """``|sum_S P_S alpha_S - (V^2 - 2E)|``; for a normalized vector ``V^2 - 2E = 1 - 2E``."""
    _, values, p = p_s_vector(alpha)
    lhs = math.fsum(p * values)
    return abs(lhs - (v_value(alpha) ** 2 - 2.0 * e_value(alpha)))


def kappa(q: int) -> float:
    """Edge-density threshold below which the program's solution was previously known."""
    q = check_int(q, "q")
    if q < 3:
        raise DomainError(f"kappa needs q >= 3, got {q}")
    a = math.log(q / (q - 1))
    b = math.log(q)
    return (math.sqrt(a / b) + math.sqrt(b / a)) ** -2


def sample_feasible(q: int, gamma: float, rng: np.random.Generator, *, max_noise_sets: int | None = None) -> FeasibleVector:
    """Draw a random vector in the feasible region for ``(q, gamma)``.

    A random weighted partition of ``[q]`` with ``E >= gamma`` is mixed with
    random weight on arbitrary subsets; the mixing fraction is drawn
    uniformly below the largest value that keeps ``E >= gamma``.
    """
    q = check_int(q, "q", min_value=2)
    gamma = check_gamma(gamma, q)
    if max_noise_sets is None:
        max_noise_sets = 2 * q

    base_masks, base_w = _random_partition_base(q, gamma, rng)

    n_noise = int(rng.integers(1, max_noise_sets + 1))
    noise_masks = rng.integers(1, 1 << q, size=n_noise)
    noise_w = rng.dirichlet(np.ones(n_noise))

    masks = np.concatenate([base_masks, noise_masks])
    d = disjoint_matrix(masks).astype(float)
    b = np.concatenate([base_w, np.zeros(n_noise)])
    n = np.concatenate([np.zeros(len(base_w)), noise_w])
    # E(b + t (n - b)) = e0 + e1 t + e2 t^2, with E(x) = x.D.x / 2
    diff = n - b
    e0 = 0.5 * b @ d @ b
    e1 = b @ d @ diff
    e2 = 0.5 * diff @ d @ diff
    t_max = _first_crossing(e0 - gamma, e1, e2)
    t = rng.uniform(0.0, t_max)
    x = b + t * diff
    x = np.clip(x, 0.0, None)
    x /= x.sum()
    vec = FeasibleVector.from_arrays(q, masks, x)
    if e_value(vec) < gamma:
        # rounding at the edge of the region; fall back to the base partition
        vec = FeasibleVector.from_arrays(q, base_masks, base_w)
    return vec


def _random_partition_base(q: int, gamma: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    for _ in range(100):
        k = int(rng.integers(2, q + 1))
        labels = rng.permutation(np.concatenate([np.arange(k), rng.integers(0, k, size=q - k)]))
        masks = np.zeros(k, dtype=np.int64)
        for color, lab in enumerate(labels):
            masks[lab] |= 1 << color
        w = rng.dirichlet(np.full(k, 2.0))
        if (1.0 - w @ w) / 2.0 >= gamma:
            return masks, w
    # equal weights on singletons give E = (1 - 1/q) / 2 >= gamma
    return np.array([1 << c for c in range(q)], dtype=np.int64), np.full(q, 1.0 / q)


def _first_crossing(c0: float, c1: float, c2: float) -> float:
    """Largest ``t`` in ``[0, 1]`` with ``c0 + c1 s + c2 s^2 >= 0`` for all ``s <= t`` (given ``c0 >= 0``)."""
    roots = np.roots([c2, c1, c0]) if abs(c2) > 1e-15 else (np.array([-c0 / c1]) if abs(c1) > 1e-15 else np.array([]))
    real = sorted(r.real for r in np.atleast_1d(roots) if abs(r.imag) < 1e-12 and 1e-15 < r.real)
    for r in real:
        if r < 1.0:
            return float(r)
    return 1.0

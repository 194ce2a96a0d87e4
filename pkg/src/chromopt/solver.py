"""Solvers for the coloring program: closed form, structured supports, and a numeric oracle.

``solve_restricted`` handles one structured support exactly.  On a plain
partition the problem is convex and is solved by bisection on the
multiplier ratio.  With the union set adjoined the quadratic form is
indefinite, so every face of the feasible simplex is examined with its
Lagrange conditions solved in closed form.

``numeric_opt`` combines the exhaustive structured search with a
structure-agnostic multistart ascent over all ``2**q - 1`` coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import minimize
from sklearn.base import BaseEstimator

from chromopt._validation import (
    DomainError,
    InconsistencyError,
    check_gamma,
    check_int,
    check_odd_q,
    check_real,
)
from chromopt.analysis import GAMMA_WINDOW, closed_form_value
from chromopt.opt_core import (
    SUPPORT_THRESHOLD,
    FeasibleVector,
    ProblemInstance,
    e_value,
    is_feasible,
    obj_value,
)
from chromopt.subsetspace import MAX_PARTITION_Q, ColorSet, full_mask
from chromopt.supports import (
    PARTITION,
    UNSTRUCTURED,
    SupportSpec,
    classify_sets,
    min_parts,
    partition_supports,
    union_supports,
)

INFEASIBLE = "infeasible"
OPTIMAL = "optimal"
ORACLE_TOL = 1e-3
TIE_TOL = 1e-9


@dataclass
class OptReport:
    instance: ProblemInstance
    method: str
    status: str = OPTIMAL
    optimum_value: float | None = None
    optimizer: FeasibleVector | None = None
    support_class: SupportSpec | str = UNSTRUCTURED
    oracle_residual: float | None = None
    e_at_opt: float | None = None
    ties: list[SupportSpec] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == OPTIMAL

    def to_json(self) -> dict:
        sc = self.support_class
        return {
            "instance": self.instance.to_json(),
            "method": self.method,
            "status": self.status,
            "optimum_value": self.optimum_value,
            "optimizer": self.optimizer.to_json() if self.optimizer is not None else None,
            "support_class": sc.to_json() if isinstance(sc, SupportSpec) else sc,
            "oracle_residual": self.oracle_residual,
            "e_at_opt": self.e_at_opt,
            "ties": [t.to_json() for t in self.ties],
            "details": self.details,
        }


# -- closed form -----------------------------------------------------------------


def analytic_opt(q: int, gamma: float, window: tuple[float, float] = GAMMA_WINDOW) -> OptReport:
    """Closed-form optimum for odd ``q >= 5`` and ``gamma`` in ``window``.

    The optimizer puts ``(1 + sqrt(1 - 4 gamma)) / 2`` on
    ``A = {1, ..., ceil(q/2)}`` and the rest on its complement.
    """
    q = check_odd_q(q)
    gamma = check_real(gamma, "gamma")
    lo, hi = window
    if not lo <= gamma <= hi:
        raise DomainError(
            f"gamma = {gamma} outside the closed-form validity window [{lo}, {hi}]"
        )
    c = (q + 1) // 2
    big = (1.0 + math.sqrt(1.0 - 4.0 * gamma)) / 2.0
    a_mask = (1 << c) - 1
    alpha = FeasibleVector(q, {a_mask: big, full_mask(q) ^ a_mask: 1.0 - big})
    inst = ProblemInstance(q, gamma)
    return OptReport(
        instance=inst,
        method="analytic",
        optimum_value=closed_form_value(q, gamma),
        optimizer=alpha,
        support_class=classify_sets(alpha.support(), q),
        e_at_opt=big * (1.0 - big),
        details={"window": [lo, hi]},
    )


# -- restricted problems -----------------------------------------------------------


@dataclass
class _Reduced:
    """``max a.z  s.t.  b.z = 1,  z.M.z <= C,  z >= 0`` over grouped variables.

    Variable ``j`` stands for the equal weight on every set in ``members[j]``.
    Parts of a partition that play the same role and have the same size are
    grouped; the restricted problem is convex in them for fixed values of the
    rest, so some optimum is constant on each group.
    """

    a: np.ndarray
    b: np.ndarray
    m: np.ndarray
    members: list[list[int]]


def _reduce(spec: SupportSpec) -> _Reduced:
    parts = spec.partition.parts
    singles: list[int] = []
    if spec.union_pair is not None:
        singles = list(spec.union_pair)
    by_size: dict[int, list[int]] = {}
    for idx, p in enumerate(parts):
        if idx not in singles:
            by_size.setdefault(p.size, []).append(idx)

    members: list[list[int]] = []
    logs: list[float] = []
    for idx in singles:
        members.append([parts[idx].mask])
        logs.append(math.log(parts[idx].size))
    if spec.union_pair is not None:
        u = spec.union_set
        members.append([u.mask])
        logs.append(math.log(u.size))
    for size in sorted(by_size, reverse=True):
        members.append([parts[i].mask for i in by_size[size]])
        logs.append(math.log(size))

    counts = np.array([len(g) for g in members], dtype=float)
    m = np.diag(counts)
    if spec.union_pair is not None:
        # variables 0, 1 are the joined parts, 2 is their union
        m[0, 2] = m[2, 0] = 1.0
        m[1, 2] = m[2, 1] = 1.0
    return _Reduced(a=counts * np.array(logs), b=counts, m=m, members=members)


def _expand(q: int, red: _Reduced, z: np.ndarray) -> FeasibleVector:
    coords = {}
    for zj, group in zip(z, red.members):
        for mask in group:
            if zj > 0:
                coords[mask] = float(zj)
    return FeasibleVector(q, coords)


def _bisect_partition(red: _Reduced, cap: float) -> np.ndarray | None:
    """Convex case ``M = diag(b)``: ``z_g = max(0, c_g - nu) / sum_h b_h max(0, c_h - nu)``.

    ``phi(nu) = z.M.z`` increases with ``nu``; bisection finds ``phi(nu) = cap``.
    """
    b = red.b
    c = red.a / b
    k = b.sum()
    if cap < 1.0 / k - 1e-12:
        return None
    if cap <= 1.0 / k + 1e-12:
        return np.full(len(b), 1.0 / k)
    top = c >= c.max() - 1e-15
    if cap >= 1.0 / b[top].sum() - 1e-15:
        z = np.where(top, 1.0 / b[top].sum(), 0.0)
        return z

    def point(nu):
        y = np.maximum(c - nu, 0.0)
        return y / (b @ y)

    def phi(nu):
        z = point(nu)
        return float(z @ (b * z))

    hi = float(c.max())
    spread = max(float(c.max() - c.min()), 1.0)
    lo = float(c.min()) - spread
    while phi(lo) > cap:
        spread *= 2.0
        lo = float(c.min()) - spread
        if spread > 1e12:
            return np.full(len(b), 1.0 / k)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(mid) > cap:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15 * max(1.0, abs(hi)):
            break
    return point(lo)


def _kkt_faces(red: _Reduced, cap: float) -> np.ndarray | None:
    """Exact maximizer by enumerating faces of the simplex ``b.z = 1, z >= 0``.

    On the relative interior of a face an optimum either has a constant
    objective there (and the face meets the feasible set), or satisfies
    ``a = nu b + mu M z`` with the quadratic constraint active.  The second
    system reduces to a scalar quadratic in ``nu``.
    """
    a, b, m = red.a, red.b, red.m
    d = len(a)
    nfaces = 1 << d
    faces = [[j for j in range(d) if f >> j & 1] for f in range(nfaces)]

    # Minimum of z.M.z over each closed face (for the constant-objective case).
    crit_val = np.full(nfaces, np.inf)
    crit_pt: list[np.ndarray | None] = [None] * nfaces
    solved: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray] | None] = {}
    for f in range(1, nfaces):
        idx = faces[f]
        mf = m[np.ix_(idx, idx)]
        if np.linalg.cond(mf) > 1e12:
            # Only faces holding a joined part and the union without the other
            # joined part are singular; there the quadratic depends on the sum
            # of the two weights, and shifting weight onto the (larger) union
            # raises the objective, so no optimum lies inside such a face.
            solved[f] = None
            continue
        p = np.linalg.solve(mf, a[idx])
        r = np.linalg.solve(mf, b[idx])
        solved[f] = (p, r, mf)
        br = float(b[idx] @ r)
        if br > 0:
            z = r / br
            if np.all(z > 0):
                crit_val[f] = 1.0 / br
                crit_pt[f] = _embed(d, idx, z)
    best_min = crit_val.copy()
    best_arg = list(crit_pt)
    for f in range(1, nfaces):
        for j in faces[f]:
            g = f ^ (1 << j)
            if g and best_min[g] < best_min[f]:
                best_min[f] = best_min[g]
                best_arg[f] = best_arg[g]

    best_value = -np.inf
    best_z = None

    def offer(z):
        nonlocal best_value, best_z
        if np.any(z < -1e-12):
            return
        z = np.clip(z, 0.0, None)
        total = b @ z
        if total <= 0:
            return
        z = z / total
        if z @ m @ z > cap + 1e-10:
            return
        val = float(a @ z)
        if val > best_value + 1e-13:
            best_value, best_z = val, z

    for f in range(1, nfaces):
        idx = faces[f]
        af, bf = a[idx], b[idx]
        if crit_pt[f] is not None and abs(crit_val[f] - cap) <= 1e-10:
            # the face meets the feasible set in one point, where the
            # constraint gradient is parallel to b (no multiplier form)
            offer(crit_pt[f])
        ratio = af / bf
        if np.ptp(ratio) <= 1e-12 * max(1.0, abs(ratio[0])):
            if best_min[f] <= cap + 1e-12 and best_arg[f] is not None:
                offer(best_arg[f])
            continue
        s = solved[f]
        if s is None:
            continue
        p, r, mf = s
        ap, ar, bp, br = af @ p, af @ r, bf @ p, bf @ r
        # a.p - 2 nu a.r + nu^2 b.r = cap (b.p - nu b.r)^2
        c2 = br - cap * br * br
        c1 = -2.0 * ar + 2.0 * cap * bp * br
        c0 = ap - cap * bp * bp
        for nu in _real_roots(c2, c1, c0):
            mu = bp - nu * br
            if abs(mu) < 1e-14:
                continue
            offer(_embed(d, idx, (p - nu * r) / mu))
    return best_z


def _embed(d: int, idx: Sequence[int], values: np.ndarray) -> np.ndarray:
    z = np.zeros(d)
    z[list(idx)] = values
    return z


def _real_roots(c2: float, c1: float, c0: float) -> list[float]:
    scale = max(abs(c2), abs(c1), abs(c0))
    if scale == 0:
        return []
    c2, c1, c0 = c2 / scale, c1 / scale, c0 / scale
    if abs(c2) < 1e-14:
        return [] if abs(c1) < 1e-14 else [-c0 / c1]
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < -1e-14:
        return []
    sq = math.sqrt(max(disc, 0.0))
    # numerically stable pair
    qv = -0.5 * (c1 + math.copysign(sq, c1))
    roots = [qv / c2]
    if qv != 0:
        roots.append(c0 / qv)
    return roots


def solve_restricted(spec: SupportSpec, q: int, gamma: float, method: str = "auto") -> OptReport:
    """Maximize the objective over vectors supported on ``spec``'s sets.

    ``method`` is ``"bisection"`` (plain partitions only), ``"kkt"`` or
    ``"auto"`` (bisection for partitions, face enumeration otherwise).
    Infeasible supports are reported through ``status``.
    """
    q = check_int(q, "q", min_value=2)
    gamma = check_gamma(gamma, q)
    if spec.q != q:
        raise DomainError(f"support is for q={spec.q}, not q={q}")
    inst = ProblemInstance(q, gamma)
    red = _reduce(spec)
    cap = inst.rhs
    if method == "auto":
        method = "bisection" if spec.kind == PARTITION else "kkt"
    if method == "bisection":
        if spec.kind != PARTITION:
            raise DomainError("bisection applies to plain partition supports only")
        z = _bisect_partition(red, cap)
    elif method == "kkt":
        z = _kkt_faces(red, cap)
    else:
        raise DomainError(f"unknown method {method!r}")
    if z is None:
        return OptReport(inst, method="restricted", status=INFEASIBLE, support_class=spec,
                         details={"solver": method})
    alpha = _expand(q, red, z)
    return OptReport(
        inst,
        method="restricted",
        optimum_value=obj_value(alpha),
        optimizer=alpha,
        support_class=spec,
        e_at_opt=e_value(alpha),
        details={"solver": method},
    )


def grid_search_restricted(spec: SupportSpec, q: int, gamma: float, resolution: float = 1e-3,
                           max_points: int = 200_000) -> float | None:
    """Dense-grid-plus-refinement value of the restricted problem (validation only).

    Grid points of the grouped simplex are screened for feasibility; the best
    few are refined with SLSQP.  Returns ``None`` when no grid point is feasible.
    """
    red = _reduce(spec)
    cap = 1.0 - 2.0 * gamma
    d = len(red.a)
    steps = int(round(1.0 / resolution))
    while _n_compositions(steps, d) > max_points and steps > 4:
        steps //= 2
    pts = np.array(list(_compositions(steps, d)), dtype=float) / steps
    z = pts / red.b
    quad = np.einsum("ij,jk,ik->i", z, red.m, z)
    ok = quad <= cap + 1e-12
    if np.any(ok):
        vals = z[ok] @ red.a
        order = np.argsort(-vals)[:8]
        starts = z[ok][order]
        best = float(vals[order[0]])
    else:
        # feasible set thinner than the grid: refine from the least violating points
        starts = z[np.argsort(quad)[:8]]
        best = None
    cons = [
        {"type": "eq", "fun": lambda x: red.b @ x - 1.0, "jac": lambda x: red.b},
        {"type": "ineq", "fun": lambda x: cap - x @ red.m @ x, "jac": lambda x: -2.0 * red.m @ x},
    ]
    for x0 in starts:
        res = minimize(lambda x: -(red.a @ x), x0, jac=lambda x: -red.a, method="SLSQP",
                       bounds=[(0.0, None)] * d, constraints=cons, options={"ftol": 1e-12, "maxiter": 200})
        x = np.clip(res.x, 0.0, None)
        if abs(red.b @ x - 1.0) < 1e-8 and x @ red.m @ x <= cap + 1e-8:
            val = float(red.a @ x)
            best = val if best is None else max(best, val)
    return best


def _n_compositions(n: int, d: int) -> int:
    return math.comb(n + d - 1, d - 1)


def _compositions(n: int, d: int) -> Iterator[tuple[int, ...]]:
    if d == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


# -- candidate supports --------------------------------------------------------------


def enumerate_candidate_supports(q: int, gamma: float, all_union_classes: bool = False) -> Iterator[SupportSpec]:
    """Supports allowed for an optimum: ``P_k`` for ``k0 <= k <= q`` and ``Q_k0``.

    ``k0 = ceil(1 / (1 - 2 gamma))``; ``P_q`` is dropped when
    ``gamma < (q - 1) / (2q)``.  Supports are enumerated by part sizes, one
    representative per size pattern.  ``all_union_classes`` adds ``Q_k`` for
    every ``k0 <= k <= q``.
    """
    q = check_int(q, "q", min_value=2)
    if q > MAX_PARTITION_Q:
        raise DomainError(f"q must be <= {MAX_PARTITION_Q} for support enumeration, got {q}")
    gamma = check_gamma(gamma, q)
    k0 = min_parts(gamma)
    k_max = q if gamma >= (q - 1) / (2 * q) - 1e-15 else q - 1
    specs = []
    for k in range(k0, k_max + 1):
        specs.extend(partition_supports(q, k))
    union_ks = range(k0, q + 1) if all_union_classes else [k0]
    for k in union_ks:
        if k <= q:
            specs.extend(union_supports(q, k))
    specs.sort(key=SupportSpec.sort_key)
    yield from specs


def best_structured(q: int, gamma: float, all_union_classes: bool = True) -> OptReport:
    """Best restricted optimum over all candidate supports; ties are listed."""
    inst = ProblemInstance(q, gamma)
    results = []
    n_specs = 0
    for spec in enumerate_candidate_supports(q, gamma, all_union_classes):
        n_specs += 1
        rep = solve_restricted(spec, q, gamma)
        if rep.feasible:
            results.append(rep)
    if not results:
        return OptReport(inst, method="restricted", status=INFEASIBLE, details={"supports_examined": n_specs})
    top = max(r.optimum_value for r in results)
    winners = [r for r in results if r.optimum_value >= top - TIE_TOL]
    best = winners[0]
    # prefer the support that the optimizer actually uses, e.g. a union support
    # whose union weight is zero is reported as the plain partition
    support = classify_sets(best.optimizer.support(), q)
    return OptReport(
        inst,
        method="restricted",
        optimum_value=best.optimum_value,
        optimizer=best.optimizer,
        support_class=support,
        e_at_opt=best.e_at_opt,
        ties=[w.support_class for w in winners],
        details={"supports_examined": n_specs},
    )


# -- structure-agnostic multistart -------------------------------------------------


@dataclass(frozen=True)
class AscentConfig:
    n_starts: int = 200
    step: float = 1e-2
    max_iter: int = 10_000
    seed: int = 0
    penalty: float = 20.0
    n_outer: int = 15
    chunk: int = 25
    stall_tol: float = 1e-8

    def to_json(self) -> dict:
        return {"n_starts": self.n_starts, "step": self.step, "max_iter": self.max_iter,
                "seed": self.seed, "penalty": self.penalty, "n_outer": self.n_outer, "chunk": self.chunk,
                "stall_tol": self.stall_tol}


def _zeta(x: np.ndarray, q: int) -> np.ndarray:
    """Subset sums ``out[..., T] = sum_{B subset of T} x[..., B]`` over the last axis."""
    # subset axis first, so each butterfly step adds contiguous blocks
    lead = x.shape[:-1]
    out = np.ascontiguousarray(x.reshape(-1, x.shape[-1]).T)
    batch = out.shape[1]
    for i in range(q):
        v = out.reshape(1 << (q - i - 1), 2, (1 << i) * batch)
        v[:, 1, :] += v[:, 0, :]
    return out.T.reshape(lead + (x.shape[-1],))


def _meet_mass(x: np.ndarray, q: int) -> np.ndarray:
    """``(N x)[A] = sum of x[B] over B meeting A``, with ``x`` indexed by mask (x[..., 0] = 0)."""
    total = x.sum(axis=-1, keepdims=True)
    return total - _zeta(x, q)[..., ::-1]


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex."""
    n = v.shape[-1]
    u = -np.sort(-v, axis=-1)
    css = np.cumsum(u, axis=-1) - 1.0
    ind = np.arange(1, n + 1)
    cond = u - css / ind > 0
    rho = n - 1 - np.argmax(cond[..., ::-1], axis=-1)
    theta = css[np.arange(v.shape[0]), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0)


def _ascent_chunk(q: int, gamma: float, cfg: AscentConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """Augmented-Lagrangian projected ascent from ``n`` random sparse starts.

    Rows of the result are indexed by subset mask; column 0 (the empty set) stays 0.
    """
    size = 1 << q
    cap = 1.0 - 2.0 * gamma
    logs = np.zeros(size)
    logs[1:] = np.log([bin(m).count("1") for m in range(1, size)])

    x = np.zeros((n, size - 1))
    for i in range(n):
        k = int(rng.integers(1, q + 2))
        idx = rng.choice(size - 1, size=k, replace=False)
        x[i, idx] = rng.dirichlet(np.ones(k))
    lam = np.zeros(n)
    rho = np.full(n, cfg.penalty)
    eta = np.full(n, cfg.step)
    c = logs[1:]

    def lagrangian(xx, lam_, rho_):
        full = np.concatenate([np.zeros((xx.shape[0], 1)), xx], axis=1)
        nx = _meet_mass(full, q)[:, 1:]
        g = np.einsum("ij,ij->i", xx, nx)
        h = g - cap
        pen = np.maximum(0.0, lam_ + rho_ * h)
        val = xx @ c - (pen ** 2 - lam_ ** 2) / (2.0 * rho_)
        return val, pen, nx, h

    inner = max(1, cfg.max_iter // cfg.n_outer)
    for _ in range(cfg.n_outer):
        val, pen, nx, h = lagrangian(x, lam, rho)
        checkpoint = val.copy()
        act = np.arange(n)
        for it in range(inner):
            xa, la, ra, ea = x[act], lam[act], rho[act], eta[act]
            grad = c[None, :] - 2.0 * pen[act, None] * nx[act]
            trial = _project_simplex(xa + ea[:, None] * grad)
            tval, tpen, tnx, th = lagrangian(trial, la, ra)
            accept = tval >= val[act] - 1e-15
            ok = act[accept]
            x[ok], val[ok], pen[ok], nx[ok], h[ok] = trial[accept], tval[accept], tpen[accept], tnx[accept], th[accept]
            eta[act] = np.where(accept, np.minimum(ea * 1.25, 10.0), ea * 0.5)
            if it % 50 == 49:
                # retire starts whose merit stalled or whose step collapsed
                keep = (val[act] - checkpoint[act] >= cfg.stall_tol) & (eta[act] >= 1e-12)
                act = act[keep]
                checkpoint[act] = val[act]
                if act.size == 0:
                    break
        lam = np.maximum(0.0, lam + rho * h)
        rho = np.minimum(rho * 1.5, 1e6)
    return np.concatenate([np.zeros((n, 1)), x], axis=1)


def _polish(q: int, gamma: float, x: np.ndarray, max_support: int = 24) -> FeasibleVector | None:
    """Solve the problem exactly (SLSQP) on the support found by the ascent."""
    cap = 1.0 - 2.0 * gamma
    order = np.argsort(-x)
    masks = [int(m) for m in order[:max_support] if x[m] > 1e-6]
    if not masks:
        return None
    arr = np.array(masks, dtype=np.int64)
    meets = ((arr[:, None] & arr[None, :]) != 0).astype(float)
    c = np.log([bin(m).count("1") for m in masks])
    x0 = x[arr] / x[arr].sum()
    cons = [
        {"type": "eq", "fun": lambda y: y.sum() - 1.0, "jac": lambda y: np.ones_like(y)},
        {"type": "ineq", "fun": lambda y: cap - y @ meets @ y, "jac": lambda y: -2.0 * meets @ y},
    ]
    res = minimize(lambda y: -(c @ y), x0, jac=lambda y: -c, method="SLSQP",
                   bounds=[(0.0, 1.0)] * len(masks), constraints=cons,
                   options={"ftol": 1e-13, "maxiter": 500})
    y = np.clip(res.x, 0.0, None)
    if y.sum() <= 0:
        return None
    y = y / y.sum()
    if y @ meets @ y > cap + 1e-9:
        return None
    return FeasibleVector.from_arrays(q, arr, y)


def multistart_ascent(q: int, gamma: float, cfg: AscentConfig = AscentConfig(), n_jobs: int = 1) -> OptReport:
    """Structure-agnostic best value over random starts; used as a cross-check."""
    q = check_int(q, "q", min_value=2, max_value=MAX_PARTITION_Q)
    gamma = check_gamma(gamma, q)
    inst = ProblemInstance(q, gamma)
    n_chunks = -(-cfg.n_starts // cfg.chunk)
    seeds = np.random.SeedSequence(cfg.seed).spawn(n_chunks)
    sizes = [min(cfg.chunk, cfg.n_starts - i * cfg.chunk) for i in range(n_chunks)]

    def run(i):
        return _ascent_chunk(q, gamma, cfg, sizes[i], np.random.default_rng(seeds[i]))

    if n_jobs == 1:
        chunks = [run(i) for i in range(n_chunks)]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            futs = [pool.submit(_ascent_chunk, q, gamma, cfg, sizes[i], np.random.default_rng(seeds[i]))
                    for i in range(n_chunks)]
            chunks = [f.result() for f in futs]
    xs = np.concatenate(chunks, axis=0)

    best = None
    best_val = -np.inf
    n_polished = 0
    for row in xs:
        vec = _polish(q, gamma, row)
        if vec is None or not is_feasible(vec, inst, 1e-7):
            continue
        n_polished += 1
        val = obj_value(vec)
        if val > best_val + 1e-12:
            best_val, best = val, vec
    if best is None:
        return OptReport(inst, method="numeric", status=INFEASIBLE, details={"ascent": cfg.to_json()})
    best = best.pruned()
    return OptReport(
        inst,
        method="numeric",
        optimum_value=obj_value(best),
        optimizer=best,
        support_class=classify_sets(best.support(), q),
        e_at_opt=e_value(best),
        details={"ascent": cfg.to_json(), "feasible_runs": n_polished},
    )


def numeric_opt(q: int, gamma: float, cfg: AscentConfig = AscentConfig(), *, all_union_classes: bool = True,
                oracle_tol: float = ORACLE_TOL, n_jobs: int = 1, analytic_window: tuple[float, float] = GAMMA_WINDOW) -> OptReport:
    """Numeric optimum: exhaustive structured search cross-checked by multistart ascent.

    Raises :class:`InconsistencyError` when the two searches differ by more
    than ``oracle_tol``.  ``oracle_residual`` is the distance to the closed
    form when that applies (odd ``q >= 5`` with gamma in ``analytic_window``).
    """
    q = check_int(q, "q", min_value=2, max_value=MAX_PARTITION_Q)
    gamma = check_gamma(gamma, q)
    structured = best_structured(q, gamma, all_union_classes)
    agnostic = multistart_ascent(q, gamma, cfg, n_jobs=n_jobs)
    if not structured.feasible:
        raise InconsistencyError(f"no structured support is feasible for q={q}, gamma={gamma}")
    gap = structured.optimum_value - (agnostic.optimum_value if agnostic.feasible else -np.inf)
    if not abs(gap) <= oracle_tol:
        raise InconsistencyError(
            f"structured search ({structured.optimum_value:.9f}) and multistart ascent "
            f"({agnostic.optimum_value}) disagree by {gap:.3e} > {oracle_tol:g}"
        )
    # the structured optimum is exact; the ascent only vouches for it
    best = structured
    residual = None
    if q >= 5 and q % 2 == 1 and analytic_window[0] <= gamma <= analytic_window[1]:
        residual = abs(best.optimum_value - closed_form_value(q, gamma))
    return OptReport(
        structured.instance,
        method="numeric",
        optimum_value=best.optimum_value,
        optimizer=best.optimizer,
        support_class=classify_sets(best.optimizer.support(), q),
        oracle_residual=residual,
        e_at_opt=e_value(best.optimizer),
        ties=structured.ties,
        details={
            "structured_value": structured.optimum_value,
            "agnostic_value": agnostic.optimum_value,
            "search_gap": gap,
            "supports_examined": structured.details["supports_examined"],
            "all_union_classes": all_union_classes,
            "ascent": cfg.to_json(),
        },
    )


# -- proof case bookkeeping ----------------------------------------------------------


def proof_case(sets: Sequence[ColorSet], q: int) -> int | None:
    """Which case of the closed-form proof a support falls in (1-5), or ``None``.

    Cases split on how many sets of size ``ceil(q/2)`` and ``floor(q/2)`` the
    support holds and whether the big set's complement is present.
    """
    c, f = (q + 1) // 2, q // 2
    big = [s for s in sets if s.size == c]
    small = [s for s in sets if s.size == f]
    if not big and not small:
        return None
    if len(big) == 1 and big[0].complement() in sets:
        return 5 if len(sets) == 2 else 4
    if len(big) == 1 and small:
        return 3
    if not big and len(small) == 2:
        return 2
    if (not big and len(small) == 1) or (len(big) == 1 and not small):
        return 1
    return None


def case_elimination(q: int, gamma: float, all_union_classes: bool = True) -> dict[int | None, float]:
    """Best restricted value among candidate supports in each proof case."""
    best: dict[int | None, float] = {}
    for spec in enumerate_candidate_supports(q, gamma, all_union_classes):
        rep = solve_restricted(spec, q, gamma)
        if not rep.feasible:
            continue
        case = proof_case(rep.optimizer.support(), q)
        best[case] = max(best.get(case, -np.inf), rep.optimum_value)
    return best


# -- estimator wrappers ----------------------------------------------------------------


class AnalyticOptSolver(BaseEstimator):
    """Closed-form solver; ``fit(q, gamma)`` sets ``report_``, ``optimizer_`` and ``optimum_value_``."""

    def __init__(self, gamma_window=GAMMA_WINDOW):
        self.gamma_window = gamma_window

    def fit(self, q, gamma):
        self.report_ = analytic_opt(q, gamma, tuple(self.gamma_window))
        self.optimizer_ = self.report_.optimizer
        self.optimum_value_ = self.report_.optimum_value
        return self


class RestrictedOptSolver(BaseEstimator):
    def __init__(self, spec=None, method="auto"):
        self.spec = spec
        self.method = method

    def fit(self, q, gamma):
        if self.spec is None:
            raise DomainError("RestrictedOptSolver needs a support spec")
        self.report_ = solve_restricted(self.spec, q, gamma, self.method)
        self.optimizer_ = self.report_.optimizer
        self.optimum_value_ = self.report_.optimum_value
        return self


class NumericOptSolver(BaseEstimator):
    """Numeric oracle with the multistart settings as estimator parameters."""

    def __init__(self, n_starts=200, step=1e-2, max_iter=10_000, seed=0, penalty=20.0, n_outer=15,
                 all_union_classes=True, oracle_tol=ORACLE_TOL, n_jobs=1):
        self.n_starts = n_starts
        self.step = step
        self.max_iter = max_iter
        self.seed = seed
        self.penalty = penalty
        self.n_outer = n_outer
        self.all_union_classes = all_union_classes
        self.oracle_tol = oracle_tol
        self.n_jobs = n_jobs

    def ascent_config(self) -> AscentConfig:
        return AscentConfig(n_starts=self.n_starts, step=self.step, max_iter=self.max_iter, seed=self.seed,
                            penalty=self.penalty, n_outer=self.n_outer)

    def fit(self, q, gamma):
        self.report_ = numeric_opt(q, gamma, self.ascent_config(), all_union_classes=self.all_union_classes,
                                   oracle_tol=self.oracle_tol, n_jobs=self.n_jobs)
        self.optimizer_ = self.report_.optimizer
        self.optimum_value_ = self.report_.optimum_value
        self.support_ = self.report_.support_class
        return self

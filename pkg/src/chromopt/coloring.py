"""Exact counting of proper q-colorings, with an upper bound from the edge count and a blow-up lower bound.

Three counting paths that share no code: assignment enumeration,
the chromatic polynomial by deletion-contraction, and a closed sum for
complete multipartite graphs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from chromopt._validation import DomainError, check_int
from chromopt.graphs import Graph, block_sizes, canonical_form, multipartite_parts
from chromopt.opt_core import FeasibleVector

BRUTE_MAX_N = 10
BRUTE_MAX_Q = 8
BRUTE_MAX_ASSIGNMENTS = 10 ** 9
POLY_MAX_N = 14
MULTIPARTITE_MAX_N = 64
MULTIPARTITE_MAX_Q = 32
MEMO_CANON_MAX_PERMS = 5_000


class IntPoly:
    """Polynomial with integer coefficients; ``coeffs[i]`` multiplies ``x**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [int(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coef: int = 1) -> "IntPoly":
        return cls([0] * degree + [coef])

    @classmethod
    def falling(cls, n: int) -> "IntPoly":
        """``x (x - 1) ... (x - n + 1)``."""
        p = cls([1])
        for i in range(n):
            p = p * cls([-i, 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    def __neg__(self):
        return IntPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    def __pow__(self, k: int):
        out = IntPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("q" if i == 1 else f"q^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' + mono if mono else ''}"
            terms.append(("-" if c < 0 else "+", body))
        if not terms:
            return "0"
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s

    def to_json(self) -> list[int]:
        return list(self.coeffs)


# -- brute force --------------------------------------------------------------------------


def count_colorings_bruteforce(g: Graph, q: int, chunk: int = 1 << 20) -> int:
    """Count proper colorings by scanning all ``q**n`` assignments.

    Vertex 0 is pinned to color 0 and the count multiplied by ``q``, which
    is exact because permuting colors maps proper colorings to proper ones.
    """
    q = check_int(q, "q", min_value=1, max_value=BRUTE_MAX_Q)
    n = g.n
    if n > BRUTE_MAX_N:
        raise DomainError(f"brute force limited to n <= {BRUTE_MAX_N}, got {n}")
    if q ** n > BRUTE_MAX_ASSIGNMENTS:
        raise DomainError(f"q^n = {q ** n} assignments exceeds the budget {BRUTE_MAX_ASSIGNMENTS}")
    if n == 0:
        return 1
    free = n - 1
    total_free = q ** free
    powers = q ** np.arange(free, dtype=np.int64)
    edges = np.array(g.edges, dtype=np.intp).reshape(-1, 2)
    count = 0
    for lo in range(0, total_free, chunk):
        idx = np.arange(lo, min(lo + chunk, total_free), dtype=np.int64)
        colors = np.zeros((len(idx), n), dtype=np.int8)
        if free:
            colors[:, 1:] = (idx[:, None] // powers[None, :]) % q
        ok = np.ones(len(idx), dtype=bool)
        for u, v in edges:
            ok &= colors[:, u] != colors[:, v]
        count += int(ok.sum())
    return count * q


# -- chromatic polynomial -----------------------------------------------------------------

# Internal representation: a tuple of neighbor bitmasks over vertices 0..n-1.


def _to_masks(g: Graph) -> tuple[int, ...]:
    adj = [0] * g.n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return tuple(adj)


def _delete_vertex(adj: tuple[int, ...], v: int) -> tuple[int, ...]:
    out = []
    low = (1 << v) - 1
    for u, a in enumerate(adj):
        if u == v:
            continue
        out.append((a & low) | ((a >> (v + 1)) << v))
    return tuple(out)


def _delete_edge(adj, u, v):
    adj = list(adj)
    adj[u] &= ~(1 << v)
    adj[v] &= ~(1 << u)
    return tuple(adj)


def _add_edge(adj, u, v):
    adj = list(adj)
    adj[u] |= 1 << v
    adj[v] |= 1 << u
    return tuple(adj)


def _contract(adj, u, v):
    """Merge ``v`` into ``u`` (any edge between them disappears) and drop ``v``."""
    adj = list(adj)
    merged = (adj[u] | adj[v]) & ~(1 << u) & ~(1 << v)
    for w in range(len(adj)):
        if merged >> w & 1:
            adj[w] |= 1 << u
    adj[u] = merged
    return _delete_vertex(tuple(adj), v)


def _components(adj) -> list[list[int]]:
    seen = 0
    comps = []
    for s in range(len(adj)):
        if seen >> s & 1:
            continue
        comp = 1 << s
        frontier = comp
        while frontier:
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                nxt |= adj[low.bit_length() - 1]
                f ^= low
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        comps.append([v for v in range(len(adj)) if comp >> v & 1])
    return comps


def _induced(adj, verts) -> tuple[int, ...]:
    pos = {v: i for i, v in enumerate(verts)}
    out = []
    for v in verts:
        a = 0
        for w in verts:
            if adj[v] >> w & 1:
                a |= 1 << pos[w]
        out.append(a)
    return tuple(out)


def _memo_key(adj) -> tuple:
    n = len(adj)
    g = Graph(n, [(u, w) for u in range(n) for w in range(u + 1, n) if adj[u] >> w & 1])
    try:
        return canonical_form(g, max_perms=MEMO_CANON_MAX_PERMS)[0]
    except DomainError:
        pass
    # too symmetric to canonicalize cheaply: key on the labeled graph itself
    return ("labeled", n) + g.edges


class _ChromaticSolver:
    def __init__(self):
        self.memo: dict[tuple, IntPoly] = {}

    def poly(self, adj) -> IntPoly:
        n = len(adj)
        if n == 0:
            return IntPoly([1])
        m2 = sum(bin(a).count("1") for a in adj)
        m = m2 // 2
        if m == 0:
            return IntPoly.monomial(n)
        if m == n * (n - 1) // 2:
            return IntPoly.falling(n)
        comps = _components(adj)
        if len(comps) > 1:
            out = IntPoly([1])
            for comp in comps:
                out = out * self.poly(_induced(adj, comp))
            return out
        if m == n - 1:
            return IntPoly([0, 1]) * IntPoly([-1, 1]) ** (n - 1)
        # a vertex whose neighborhood is a clique contributes a factor (q - deg)
        for v in range(n):
            nb = adj[v]
            d = bin(nb).count("1")
            ok = True
            f = nb
            while f and ok:
                low = f & -f
                w = low.bit_length() - 1
                if (adj[w] | (1 << w)) & nb != nb:
                    ok = False
                f ^= low
            if ok:
                return IntPoly([-d, 1]) * self.poly(_delete_vertex(adj, v))
        key = _memo_key(adj)
        got = self.memo.get(key)
        if got is not None:
            return got
        deg = [bin(a).count("1") for a in adj]
        dense = 2 * m > n * (n - 1) // 2
        best = None
        for u in range(n):
            for w in range(u + 1, n):
                if bool(adj[u] >> w & 1) == dense:
                    continue
                score = deg[u] + deg[w]
                if best is None or (score < best[0] if dense else score > best[0]):
                    best = (score, u, w)
        _, u, w = best
        if dense:
            # P(G) = P(G + uw) + P(G / uw): moves toward complete graphs
            out = self.poly(_add_edge(adj, u, w)) + self.poly(_contract(adj, u, w))
        else:
            out = self.poly(_delete_edge(adj, u, w)) - self.poly(_contract(adj, u, w))
        self.memo[key] = out
        return out


def chromatic_polynomial(g: Graph) -> IntPoly:
    """Chromatic polynomial by deletion-contraction, memoized on canonical forms.

    Sparse graphs split on the edge of largest degree sum; dense graphs use
    the complementary addition-contraction step on the non-edge of smallest
    degree sum.
    """
    if g.n > POLY_MAX_N:
        raise DomainError(f"chromatic polynomial limited to n <= {POLY_MAX_N}, got {g.n}")
    return _ChromaticSolver().poly(_to_masks(g))


# -- complete multipartite ---------------------------------------------------------------


@lru_cache(maxsize=None)
def surjections(n: int, s: int) -> int:
    """Number of maps from an n-set onto an s-set, by inclusion-exclusion."""
    if n < 0 or s < 0:
        raise DomainError("surjection arguments must be nonnegative")
    return sum((-1) ** j * math.comb(s, j) * (s - j) ** n for j in range(s + 1))


def count_colorings_multipartite(part_sizes, q: int) -> int:
    """Proper q-colorings of the complete multipartite graph with the given parts.

    Each part uses its own set of colors; a part of size ``n_i`` using exactly
    ``s_i`` colors contributes ``C(q - used, s_i) * Surj(n_i, s_i)``.
    """
    sizes = [check_int(s, "part size", min_value=0) for s in part_sizes]
    q = check_int(q, "q", min_value=0, max_value=MULTIPARTITE_MAX_Q)
    if sum(sizes) > MULTIPARTITE_MAX_N:
        raise DomainError(f"total part size limited to {MULTIPARTITE_MAX_N}")
    ways = {0: 1}  # colors used so far -> count
    for size in sizes:
        nxt: dict[int, int] = {}
        for used, w in ways.items():
            if size == 0:
                nxt[used] = nxt.get(used, 0) + w
                continue
            for s in range(1, min(size, q - used) + 1):
                term = w * math.comb(q - used, s) * surjections(size, s)
                nxt[used + s] = nxt.get(used + s, 0) + term
        ways = nxt
    return sum(ways.values())


# -- bounds ----------------------------------------------------------------------------------


def _ceil_triangular_root(m: int) -> int:
    """``ceil((sqrt(1 + 8m) - 1) / 2)``: the least ``e`` with ``e (e + 1) / 2 >= m``."""
    e = (math.isqrt(1 + 8 * m) - 1) // 2
    while e * (e + 1) // 2 < m:
        e += 1
    return e


def _ceil_half_root(m: int) -> int:
    """``ceil((sqrt(m) - 1) / 2)``: the least ``e >= 0`` with ``(2e + 1)^2 >= m``."""
    e = 0
    while (2 * e + 1) ** 2 < m:
        e += 1
    return e


def fl_exponents(m: int) -> tuple[int, int]:
    return _ceil_triangular_root(m), _ceil_half_root(m)


def _check_nm(n, m, q):
    n = check_int(n, "n", min_value=0)
    m = check_int(m, "m", min_value=0)
    q = check_int(q, "q", min_value=2)
    if m > n * (n - 1) // 2:
        raise DomainError(f"m = {m} exceeds C(n, 2) = {n * (n - 1) // 2}")
    return n, m, q


def fl_upper_bound_exact(n: int, m: int, q: int, weak: bool = False) -> Fraction:
    """``(1 - 1/q)^e q^n`` as an exact rational; ``weak`` uses the smaller exponent of the second form."""
    n, m, q = _check_nm(n, m, q)
    e = fl_exponents(m)[1 if weak else 0]
    return Fraction((q - 1) ** e * q ** n, q ** e)


def fl_upper_bound(n: int, m: int, q: int, weak: bool = False) -> float:
    """Upper bound on the q-colorings of any (n, m)-graph from its edge count."""
    n, m, q = _check_nm(n, m, q)
    try:
        return float(fl_upper_bound_exact(n, m, q, weak))  # correctly rounded
    except OverflowError:
        return math.inf  # beyond float range; compare with fl_bound_holds instead


def fl_bound_holds(count: int, n: int, m: int, q: int, weak: bool = False) -> bool:
    """Exact comparison ``count <= bound`` (no rounding)."""
    return Fraction(count) <= fl_upper_bound_exact(n, m, q, weak)


def construction_lower_bound(alpha: FeasibleVector, n: int) -> int:
    """``prod_A |A|^{|V_A|}`` over the blocks of the blow-up graph: colorings using only ``A`` on ``V_A``."""
    out = 1
    for s, size in block_sizes(alpha, n).items():
        out *= s.size ** size
    return out


def count_colorings(g: Graph, q: int, method: str = "auto", part_sizes=None) -> int:
    """Dispatch: ``brute``, ``poly``, ``multipartite`` (needs ``part_sizes``) or ``auto``."""
    if method == "brute":
        return count_colorings_bruteforce(g, q)
    if method == "poly":
        return chromatic_polynomial(g)(q)
    if method == "multipartite":
        if part_sizes is None:
            part_sizes = multipartite_parts(g)
            if part_sizes is None:
                raise DomainError("graph is not complete multipartite")
        return count_colorings_multipartite(part_sizes, q)
    if method == "auto":
        parts = multipartite_parts(g)
        if parts is not None:
            return count_colorings_multipartite(parts, q)
        return chromatic_polynomial(g)(q)
    raise DomainError(f"unknown counting method {method!r}")

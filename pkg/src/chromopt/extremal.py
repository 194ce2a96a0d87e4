"""Exhaustive search for the graphs with the most q-colorings among all graphs with n vertices and m edges.

Isomorphism classes are generated by canonical augmentation: every class
with ``m`` edges is a class with ``m - 1`` edges plus one edge, so each
level is the deduplicated set of one-edge extensions of the previous one.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from chromopt._validation import DomainError, check_int
from chromopt.coloring import chromatic_polynomial, count_colorings_bruteforce
from chromopt.graphs import Graph, canonical_form, turan, turan_edges

MAX_N = 8
MAX_Q = 6
LABELED_BUDGET = 10 ** 8


def _check_budget(n: int, m: int) -> None:
    n = check_int(n, "n", min_value=1, max_value=MAX_N)
    pairs = n * (n - 1) // 2
    m = check_int(m, "m", min_value=0)
    if m > pairs:
        raise DomainError(f"m = {m} exceeds C({n}, 2) = {pairs}")
    if math.comb(pairs, m) > LABELED_BUDGET:
        raise DomainError(f"C({pairs}, {m}) labeled graphs exceeds the budget {LABELED_BUDGET}")


def _complement(g: Graph) -> Graph:
    present = g.edge_set()
    return Graph(g.n, [e for e in itertools.combinations(range(g.n), 2) if e not in present])


@lru_cache(maxsize=None)
def _classes(n: int, m: int) -> tuple[tuple[tuple, Graph, int], ...]:
    """``(code, canonical graph, |Aut|)`` for each class, sorted by code."""
    pairs = n * (n - 1) // 2
    if m == 0:
        g = Graph(n)
        code, aut, _ = canonical_form(g)
        return ((code, g, aut),)
    if 2 * m > pairs:
        out = []
        for _, g, _ in _classes(n, pairs - m):
            h = _complement(g)
            code, aut, perm = canonical_form(h)
            out.append((code, h.relabel(perm), aut))
        return tuple(sorted(out, key=lambda t: t[0]))
    found: dict[tuple, tuple[Graph, int]] = {}
    all_pairs = list(itertools.combinations(range(n), 2))
    for _, g, _ in _classes(n, m - 1):
        present = g.edge_set()
        for e in all_pairs:
            if e in present:
                continue
            h = g.add_edge(*e)
            code, aut, perm = canonical_form(h)
            if code not in found:
                found[code] = (h.relabel(perm), aut)
    return tuple((code, found[code][0], found[code][1]) for code in sorted(found))


def enumerate_graphs(n: int, m: int, dedup: bool = True) -> Iterator[Graph]:
    """One canonical representative per isomorphism class of (n, m)-graphs, in canonical order.

    ``dedup=False`` yields every labeled graph instead (slower, same maxima).
    """
    _check_budget(n, m)
    if dedup:
        for _, g, _ in _classes(n, m):
            yield g
    else:
        for edges in itertools.combinations(itertools.combinations(range(n), 2), m):
            yield Graph(n, edges)


def class_sizes(n: int, m: int) -> list[int]:
    """Labeled graphs per class, ``n! / |Aut|``, in the order of :func:`enumerate_graphs`."""
    _check_budget(n, m)
    return [math.factorial(n) // aut for _, _, aut in _classes(n, m)]


@dataclass
class SearchResult:
    n: int
    m: int
    q: int
    max_count: int
    maximizers: list[Graph]
    graphs_examined: int
    turan_r: int = 2
    turan_count: int | None = None
    turan_is_unique_max: bool | None = None
    verified_by_bruteforce: bool = False
    dedup: bool = True
    counts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "q": self.q,
            "max_count": self.max_count,
            "maximizers": [g.to_json() for g in self.maximizers],
            "graphs_examined": self.graphs_examined,
            "turan_r": self.turan_r,
            "turan_count": self.turan_count,
            "turan_is_unique_max": self.turan_is_unique_max,
            "verified_by_bruteforce": self.verified_by_bruteforce,
            "dedup": self.dedup,
        }


def _count_batch(graphs: list[Graph], q: int) -> list[int]:
    return [chromatic_polynomial(g)(q) for g in graphs]


def search_extremal(n: int, m: int, q: int, *, workers: int = 1, dedup: bool = True, turan_r: int = 2,
                    batch: int = 64) -> SearchResult:
    """Exact maximum of the q-coloring count over all (n, m)-graphs.

    Counts come from the chromatic polynomial; each maximizer is recounted
    by brute force.  When ``m`` equals the edge count of ``T_r(n)`` the
    result says whether the Turan graph is the unique maximizer.
    """
    _check_budget(n, m)
    q = check_int(q, "q", min_value=1, max_value=MAX_Q)
    graphs = list(enumerate_graphs(n, m, dedup=dedup))
    batches = [graphs[i:i + batch] for i in range(0, len(graphs), batch)]
    if workers > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_batch, batches, itertools.repeat(q)))
    else:
        results = [_count_batch(b, q) for b in batches]
    counts = [c for part in results for c in part]

    best = max(counts)
    winners = [g for g, c in zip(graphs, counts) if c == best]
    # labeled enumeration repeats classes; keep one canonical graph per class
    by_code = {}
    for g in winners:
        code, _, perm = canonical_form(g)
        by_code.setdefault(code, g.relabel(perm))
    maximizers = [by_code[c] for c in sorted(by_code)]

    verified = all(count_colorings_bruteforce(g, q) == best for g in maximizers)
    if not verified:
        raise RuntimeError("brute-force recount disagrees with the chromatic polynomial")

    result = SearchResult(n=n, m=m, q=q, max_count=best, maximizers=maximizers, graphs_examined=len(graphs),
                          turan_r=turan_r, verified_by_bruteforce=verified, dedup=dedup)
    if 1 <= turan_r <= n and turan_edges(turan_r, n) == m:
        t = turan(turan_r, n)
        t_code = canonical_form(t)[0]
        result.turan_count = chromatic_polynomial(t)(q)
        result.turan_is_unique_max = len(maximizers) == 1 and canonical_form(maximizers[0])[0] == t_code
    return result


def verify_conjecture_instance(n: int, r: int, q: int, workers: int = 1) -> SearchResult:
    """Is ``T_r(n)`` the unique maximizer of q-colorings among (n, t_r(n))-graphs?"""
    n = check_int(n, "n", min_value=1, max_value=MAX_N)
    r = check_int(r, "r", min_value=1, max_value=n)
    q = check_int(q, "q", min_value=r)
    return search_extremal(n, turan_edges(r, n), q, workers=workers, turan_r=r)

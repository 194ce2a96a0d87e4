"""Simple graphs, Turan graphs, blow-up constructions from feasible vectors, and edge-based comparisons."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from chromopt._validation import DomainError, check_int
from chromopt.analysis import LemmaCheckResult
from chromopt.opt_core import NORMALIZED_TOL, FeasibleVector, e_value
from chromopt.subsetspace import ColorSet, canonical_key
from chromopt.supports import SupportSpec, classify_sets

MAX_BIPARTITION_N = 24
MAX_ISO_EDIT_N = 8


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on ``0..n-1``; ``edges`` holds pairs ``(u, v)`` with ``u < v``, sorted."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n: int, edges=()):
        n = check_int(n, "n", min_value=0)
        clean = set()
        for e in edges:
            u, v = (int(t) for t in e)
            if u == v:
                raise DomainError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) out of range for n={n}")
            pair = (min(u, v), max(u, v))
            if pair in clean:
                raise DomainError(f"duplicate edge {pair}")
            clean.add(pair)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        return a

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self) -> list[set[int]]:
        nb = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return nb

    def add_edge(self, u: int, v: int) -> "Graph":
        return Graph(self.n, self.edges + ((u, v),))

    def relabel(self, perm) -> "Graph":
        """Graph with vertex ``i`` renamed to ``perm[i]``."""
        return Graph(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    # -- serialization ---------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 2:
            raise DomainError("graph text must start with a line 'n m'")
        n, m = int(rows[0][0]), int(rows[0][1])
        edges = []
        for row in rows[1:]:
            if len(row) != 2:
                raise DomainError(f"bad edge line {' '.join(row)!r}")
            edges.append((int(row[0]), int(row[1])))
        if len(edges) != m:
            raise DomainError(f"header says {m} edges, found {len(edges)}")
        return cls(n, edges)

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [[u, v] for u, v in self.edges]}

    @classmethod
    def from_json(cls, obj: dict) -> "Graph":
        return cls(obj["n"], [tuple(e) for e in obj["edges"]])


def read_graph(path) -> Graph:
    """Read a graph in edge-list text or JSON form (chosen by a ``.json`` suffix or leading brace)."""
    text = Path(path).read_text()
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        return Graph.from_json(json.loads(text))
    return Graph.from_text(text)


def write_graph(g: Graph, path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(g.to_json()) + "\n")
    else:
        path.write_text(g.to_text())


# -- standard graphs -------------------------------------------------------------------


def complete_multipartite(sizes) -> Graph:
    edges = []
    start = 0
    blocks = []
    for s in sizes:
        s = check_int(s, "part size", min_value=0)
        blocks.append(range(start, start + s))
        start += s
    for i, j in itertools.combinations(range(len(blocks)), 2):
        edges.extend((u, v) for u in blocks[i] for v in blocks[j])
    return Graph(start, edges)


def turan_part_sizes(r: int, n: int) -> list[int]:
    base, extra = divmod(n, r)
    return [base + 1] * extra + [base] * (r - extra)


def turan(r: int, n: int) -> Graph:
    """Complete r-partite graph on n vertices with parts as equal as possible (larger parts first)."""
    n = check_int(n, "n", min_value=1)
    r = check_int(r, "r", min_value=1)
    if r > n:
        raise DomainError(f"r = {r} exceeds n = {n}")
    return complete_multipartite(turan_part_sizes(r, n))


def turan_edges(r: int, n: int) -> int:
    sizes = turan_part_sizes(r, n)
    return (n * n - sum(s * s for s in sizes)) // 2


def complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise DomainError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def multipartite_parts(g: Graph) -> list[int] | None:
    """Part sizes (descending) if ``g`` is complete multipartite, else ``None``.

    A graph is complete multipartite exactly when non-adjacency is an
    equivalence relation; its classes are the parts.
    """
    adj = [0] * g.n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    full = (1 << g.n) - 1
    seen = 0
    sizes = []
    for v in range(g.n):
        if seen >> v & 1:
            continue
        cls = full & ~adj[v]
        for w in range(g.n):
            if cls >> w & 1 and (full & ~adj[w]) != cls:
                return None
        seen |= cls
        sizes.append(bin(cls).count("1"))
    return sorted(sizes, reverse=True)


def is_turan(g: Graph, r: int) -> bool:
    """Whether ``g`` is isomorphic to ``T_r(n)``."""
    if not 1 <= r <= g.n:
        return False
    parts = multipartite_parts(g)
    return parts is not None and parts == turan_part_sizes(r, g.n)


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    pairs = list(itertools.combinations(range(n), 2))
    keep = rng.random(len(pairs)) < p
    return Graph(n, [e for e, k in zip(pairs, keep) if k])


# -- blow-up construction --------------------------------------------------------------


@dataclass(frozen=True)
class VertexBlocks:
    """Vertex blocks ``V_A`` keyed by color set, in canonical set order."""

    blocks: dict[ColorSet, list[int]]

    def sizes(self) -> dict[ColorSet, int]:
        return {a: len(v) for a, v in self.blocks.items()}

    def to_json(self) -> list[dict]:
        return [{"set": a.to_json(), "vertices": v} for a, v in self.blocks.items()]


def block_sizes(alpha: FeasibleVector, n: int) -> dict[ColorSet, int]:
    """Largest-remainder rounding of ``n * alpha`` onto integers summing to ``n``.

    Ties in the fractional parts go to the set that comes first in canonical
    order (larger sets first, then by mask).
    """
    n = check_int(n, "n", min_value=1)
    if abs(sum(alpha.coords.values()) - 1.0) > NORMALIZED_TOL:
        raise DomainError("alpha must sum to 1")
    sets = sorted((ColorSet(m, alpha.q) for m in alpha.coords), key=canonical_key)
    raw = [n * alpha[s.mask] for s in sets]
    floors = [math.floor(x) for x in raw]
    left = n - sum(floors)
    order = sorted(range(len(sets)), key=lambda i: (-(raw[i] - floors[i]), i))
    for i in order[:left]:
        floors[i] += 1
    sizes = dict(zip(sets, floors))
    for s, x in zip(sets, raw):
        assert abs(sizes[s] - x) < 1.0, "largest-remainder rounding broke the block bound"
    assert sum(floors) == n
    return sizes


def construct_g_alpha(alpha: FeasibleVector, n: int) -> tuple[Graph, VertexBlocks]:
    """Blow-up graph: blocks ``V_A`` of size about ``n alpha_A``, fully joined when ``A`` and ``B`` are disjoint."""
    sizes = block_sizes(alpha, n)
    blocks: dict[ColorSet, list[int]] = {}
    start = 0
    for s, size in sizes.items():
        blocks[s] = list(range(start, start + size))
        start += size
    edges = []
    keys = list(blocks)
    for i, j in itertools.combinations(range(len(keys)), 2):
        if keys[i].isdisjoint(keys[j]):
            edges.extend((u, v) for u in blocks[keys[i]] for v in blocks[keys[j]])
    return Graph(n, edges), VertexBlocks(blocks)


def edge_count_bound_check(alpha: FeasibleVector, n: int) -> LemmaCheckResult:
    """``|e(G_alpha(n)) - E(alpha) n^2| < 2^q n`` on the constructed graph."""
    g, _ = construct_g_alpha(alpha, n)
    dev = abs(g.m - e_value(alpha) * n * n)
    bound = float(2 ** alpha.q * n)
    return LemmaCheckResult(dev, bound, dev < bound, bound - dev)


def support_graph(alpha: FeasibleVector) -> tuple[Graph, list[ColorSet]]:
    """Graph on the support sets (canonical order) with edges between disjoint sets."""
    sets = sorted(alpha.support(), key=canonical_key)
    if not sets:
        raise DomainError("alpha has empty support")
    edges = [(i, j) for i, j in itertools.combinations(range(len(sets)), 2) if sets[i].isdisjoint(sets[j])]
    return Graph(len(sets), edges), sets


def classify_support(alpha: FeasibleVector) -> SupportSpec | str:
    return classify_sets(alpha.support(), alpha.q)


# -- distances and cuts ------------------------------------------------------------------


def edit_distance_labeled(g: Graph, h: Graph) -> int:
    """Size of the symmetric difference of the edge sets under the given labels."""
    if g.n != h.n:
        raise DomainError(f"vertex counts differ ({g.n} vs {h.n})")
    return len(g.edge_set() ^ h.edge_set())


def edit_distance_iso(g: Graph, h: Graph) -> int:
    """Edit distance minimized over relabelings of ``h`` (exhaustive, ``n <= 8``)."""
    if g.n != h.n:
        raise DomainError(f"vertex counts differ ({g.n} vs {h.n})")
    if g.n > MAX_ISO_EDIT_N:
        raise DomainError(f"isomorphism-minimized distance limited to n <= {MAX_ISO_EDIT_N}")
    n = g.n
    if n == 0:
        return 0
    ag = g.adjacency()
    ah = h.adjacency()
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    best = None
    for chunk in np.array_split(perms, max(1, len(perms) // 5000)):
        permuted = ah[chunk[:, :, None], chunk[:, None, :]]
        diff = (permuted != ag[None]).sum(axis=(1, 2)) // 2
        low = int(diff.min())
        best = low if best is None else min(best, low)
    return best


def max_bipartition(g: Graph) -> tuple[tuple[list[int], list[int]], int]:
    """Bipartition maximizing crossing edges by exhaustive scan (vertex ``n-1`` fixed on side 2)."""
    n = g.n
    if n > MAX_BIPARTITION_N:
        raise DomainError(f"exact max bipartition limited to n <= {MAX_BIPARTITION_N}; a heuristic is out of scope")
    if n <= 1:
        return (list(range(n)), []), 0
    masks = np.arange(1 << (n - 1), dtype=np.int64)
    best_count, best_mask = -1, 0
    block = 1 << 20
    for lo in range(0, len(masks), block):
        mk = masks[lo:lo + block]
        cut = np.zeros(len(mk), dtype=np.int32)
        for u, v in g.edges:
            cut += (((mk >> u) ^ (mk >> v)) & 1).astype(np.int32)
        i = int(np.argmax(cut))
        if cut[i] > best_count:
            best_count, best_mask = int(cut[i]), int(mk[i])
    side1 = [v for v in range(n) if best_mask >> v & 1]
    side2 = [v for v in range(n) if not best_mask >> v & 1]
    return (side1, side2), best_count


# -- canonical forms -------------------------------------------------------------------

MAX_CANON_PERMS = 50_000


def refine_colors(g: Graph) -> list[int]:
    """Stable vertex colors from iterated degree refinement (1-dimensional Weisfeiler-Leman).

    Colors are numbered by sorting signatures, so they are invariant under
    relabeling of ``g``.
    """
    nb = g.neighbors()
    colors = [len(x) for x in nb]
    while True:
        sig = [(colors[v], tuple(sorted(colors[u] for u in nb[v]))) for v in range(g.n)]
        table = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [table[s] for s in sig]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _cell_permutations(colors: list[int]) -> tuple[list[list[int]], int]:
    cells = []
    for c in sorted(set(colors)):
        cells.append([v for v in range(len(colors)) if colors[v] == c])
    total = 1
    for cell in cells:
        total *= math.factorial(len(cell))
    return cells, total


def canonical_form(g: Graph, max_perms: int = MAX_CANON_PERMS) -> tuple[tuple[int, ...], int, list[int]]:
    """Canonical code, automorphism count and a canonical labeling of ``g``.

    Candidate labelings order vertices by refined color and permute within
    color cells.  The code is the lexicographically smallest upper-triangle
    adjacency bit string over candidates.  Every automorphism preserves the
    cells, so the number of candidates reaching the minimum is ``|Aut(g)|``.
    ``perm[v]`` is the new label of ``v``.
    """
    n = g.n
    if n == 0:
        return (), 1, []
    cells, total = _cell_permutations(refine_colors(g))
    if total > max_perms:
        raise DomainError(f"canonical form needs {total} candidate labelings (limit {max_perms})")
    if total == 1:
        order = [cell[0] for cell in cells]
        perm = [0] * n
        for new, old in enumerate(order):
            perm[old] = new
        edges = {(min(perm[u], perm[v]), max(perm[u], perm[v])) for u, v in g.edges}
        code = (n,) + tuple(int((i, j) in edges) for i in range(n) for j in range(i + 1, n))
        return code, 1, perm
    # orders[k] lists the vertices in new-label order for candidate k
    orders = np.zeros((total, n), dtype=np.intp)
    reps = total
    col = 0
    for cell in cells:
        cp = np.array(list(itertools.permutations(cell)), dtype=np.intp)
        reps //= len(cp)
        block = np.repeat(cp, reps, axis=0)
        orders[:, col:col + len(cell)] = np.tile(block, (total // len(block), 1))
        col += len(cell)
    adj = g.adjacency()
    iu, ju = np.triu_indices(n, 1)
    bits = adj[orders[:, iu], orders[:, ju]]
    keys = [bits[:, j] for j in range(bits.shape[1] - 1, -1, -1)]
    best = int(np.lexsort(keys)[0]) if keys else 0
    code_row = bits[best]
    n_min = int(np.all(bits == code_row[None, :], axis=1).sum())
    perm = [0] * n
    for new, old in enumerate(orders[best]):
        perm[int(old)] = new
    code = (n,) + tuple(int(b) for b in code_row)
    return code, n_min, perm


def canonical_graph(g: Graph) -> Graph:
    _, _, perm = canonical_form(g)
    return g.relabel(perm)


def are_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.m != h.m or sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return canonical_form(g)[0] == canonical_form(h)[0]

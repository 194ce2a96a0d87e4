"""Structured supports: partitions of [q], optionally with the union of two parts adjoined."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from chromopt._validation import DomainError
from chromopt.subsetspace import ColorSet, PartitionSpec, full_mask, integer_partitions, partition_from_sizes

PARTITION = "partition"
PARTITION_PLUS_UNION = "partition_plus_union"
UNSTRUCTURED = "unstructured"


@dataclass(frozen=True)
class SupportSpec:
    """Support class ``P_k`` (a k-partition) or ``Q_k`` (a k-partition plus ``A_i | A_j``).

    ``union_pair`` holds 0-based indices into ``partition.parts``.
    """

    kind: str
    partition: PartitionSpec
    union_pair: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind == PARTITION:
            if self.union_pair is not None:
                raise DomainError("a plain partition support has no union pair")
        elif self.kind == PARTITION_PLUS_UNION:
            if self.union_pair is None:
                raise DomainError("partition_plus_union needs a union pair")
            i, j = self.union_pair
            if not (0 <= i < j < self.partition.k):
                raise DomainError(f"bad union pair {self.union_pair} for k={self.partition.k}")
        else:
            raise DomainError(f"unknown support kind {self.kind!r}")

    @classmethod
    def partition_of(cls, sizes: Sequence[int]) -> "SupportSpec":
        return cls(PARTITION, partition_from_sizes(sizes))

    @classmethod
    def union_of(cls, sizes: Sequence[int], pair_sizes: tuple[int, int]) -> "SupportSpec":
        """Representative ``Q_k`` spec whose union joins a part of each size in ``pair_sizes``."""
        part = partition_from_sizes(sizes)
        psizes = list(part.sizes)
        i = psizes.index(pair_sizes[0])
        j = next(t for t in range(len(psizes)) if t != i and psizes[t] == pair_sizes[1])
        return cls(PARTITION_PLUS_UNION, part, tuple(sorted((i, j))))

    @property
    def q(self) -> int:
        return self.partition.q

    @property
    def k(self) -> int:
        return self.partition.k

    @property
    def union_set(self) -> ColorSet | None:
        if self.union_pair is None:
            return None
        i, j = self.union_pair
        return self.partition.parts[i].union(self.partition.parts[j])

    @property
    def sets(self) -> list[ColorSet]:
        out = list(self.partition.parts)
        if self.union_pair is not None:
            out.append(self.union_set)
        return out

    @property
    def label(self) -> str:
        sizes = ",".join(map(str, self.partition.sizes))
        if self.kind == PARTITION:
            return f"P{self.k}({sizes})"
        i, j = self.union_pair
        return f"Q{self.k}({sizes};{i + 1}+{j + 1})"

    def sort_key(self) -> tuple:
        return (self.kind != PARTITION, self.k, tuple(-s for s in self.partition.sizes), self.union_pair or ())

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "k": self.k,
            "partition": [p.to_json() for p in self.partition.parts],
            "label": self.label,
        }
        if self.union_pair is not None:
            out["union_pair"] = [self.union_pair[0] + 1, self.union_pair[1] + 1]
        return out


def min_parts(gamma: float) -> int:
    """``ceil(1 / (1 - 2 gamma))``, guarded against floating-point noise at integers."""
    x = 1.0 / (1.0 - 2.0 * gamma)
    r = round(x)
    if abs(x - r) < 1e-12:
        return int(r)
    return int(-(-x // 1))


def partition_supports(q: int, k: int) -> Iterator[SupportSpec]:
    for sizes in integer_partitions(q, k):
        yield SupportSpec.partition_of(sizes)


def union_supports(q: int, k: int) -> Iterator[SupportSpec]:
    if k < 2:
        return
    for sizes in integer_partitions(q, k):
        distinct = sorted(set(sizes), reverse=True)
        for a_i, a in enumerate(distinct):
            for b in distinct[a_i:]:
                if a == b and sizes.count(a) < 2:
                    continue
                yield SupportSpec.union_of(sizes, (a, b))


def classify_sets(sets: Iterable[ColorSet], q: int) -> SupportSpec | str:
    """Match a family of nonempty subsets of ``[q]`` against ``P_k`` / ``Q_k``."""
    sets = list(dict.fromkeys(sets))
    if not sets:
        return UNSTRUCTURED
    masks = [s.mask for s in sets]
    if _is_partition(masks, q):
        return SupportSpec(PARTITION, PartitionSpec.from_parts(sets))
    # Q_k: removing one set that is the union of two others leaves a partition.
    for u in sets:
        rest = [s for s in sets if s != u]
        if not _is_partition([s.mask for s in rest], q):
            continue
        inside = [s for s in rest if s.mask & u.mask]
        if len(inside) == 2 and inside[0].mask | inside[1].mask == u.mask:
            part = PartitionSpec.from_parts(rest)
            idx = tuple(sorted(part.parts.index(s) for s in inside))
            return SupportSpec(PARTITION_PLUS_UNION, part, idx)
    return UNSTRUCTURED


def _is_partition(masks: Sequence[int], q: int) -> bool:
    seen = 0
    for m in masks:
        if m == 0 or seen & m:
            return False
        seen |= m
    return seen == full_mask(q)

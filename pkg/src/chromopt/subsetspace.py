"""Nonempty subsets of the color set [q] and set partitions of [q].

Subsets are stored as bit masks: bit ``i`` is set when color ``i + 1``
belongs to the set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from chromopt._validation import DomainError

MAX_SUBSET_Q = 20
MAX_PARTITION_Q = 12


def full_mask(q: int) -> int:
    return (1 << q) - 1


@dataclass(frozen=True, order=True)
class ColorSet:
    """A subset of ``[q]`` encoded as a bit mask."""

    mask: int
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise DomainError(f"q must be >= 2, got {self.q}")
        if not 0 <= self.mask < (1 << self.q):
            raise DomainError(f"mask {self.mask} out of range for q={self.q}")

    @classmethod
    def from_colors(cls, colors: Iterable[int], q: int) -> "ColorSet":
        mask = 0
        for c in colors:
            if not 1 <= c <= q:
                raise DomainError(f"color {c} not in [1, {q}]")
            mask |= 1 << (c - 1)
        return cls(mask, q)

    @property
    def colors(self) -> list[int]:
        return [i + 1 for i in range(self.q) if self.mask >> i & 1]

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    def __len__(self) -> int:
        return self.size

    def complement(self) -> "ColorSet":
        return ColorSet(full_mask(self.q) ^ self.mask, self.q)

    def isdisjoint(self, other: "ColorSet") -> bool:
        return self.mask & other.mask == 0

    def union(self, other: "ColorSet") -> "ColorSet":
        return ColorSet(self.mask | other.mask, self.q)

    def to_json(self) -> list[int]:
        return self.colors

    @classmethod
    def from_json(cls, data: Sequence[int], q: int) -> "ColorSet":
        return cls.from_colors(data, q)

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.colors)) + "}"


def canonical_key(s: ColorSet) -> tuple[int, int]:
    """Sort key for parts: larger sets first, then by mask."""
    return (-s.size, s.mask)


@dataclass(frozen=True)
class PartitionSpec:
    """A set partition of ``[q]`` into nonempty blocks, in canonical order."""

    parts: tuple[ColorSet, ...]

    def __post_init__(self):
        if not self.parts:
            raise DomainError("a partition needs at least one part")
        q = self.parts[0].q
        seen = 0
        for p in self.parts:
            if p.q != q:
                raise DomainError("parts must share the same q")
            if p.mask == 0:
                raise DomainError("parts must be nonempty")
            if seen & p.mask:
                raise DomainError("parts must be pairwise disjoint")
            seen |= p.mask
        if seen != full_mask(q):
            raise DomainError("parts must cover [q]")
        if list(self.parts) != sorted(self.parts, key=canonical_key):
            raise DomainError("parts are not in canonical order")

    @classmethod
    def from_parts(cls, parts: Iterable[ColorSet]) -> "PartitionSpec":
        return cls(tuple(sorted(parts, key=canonical_key)))

    @property
    def q(self) -> int:
        return self.parts[0].q

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(p.size for p in self.parts)

    def __repr__(self) -> str:
        return "|".join(map(repr, self.parts))


def enumerate_nonempty_subsets(q: int) -> list[ColorSet]:
    """All ``2**q - 1`` nonempty subsets of ``[q]`` in ascending mask order."""
    if not 2 <= q <= MAX_SUBSET_Q:
        raise DomainError(f"q must be in [2, {MAX_SUBSET_Q}], got {q}")
    return [ColorSet(m, q) for m in range(1, 1 << q)]


def enumerate_partitions(q: int, k: int) -> Iterator[PartitionSpec]:
    """Yield every partition of ``[q]`` into exactly ``k`` nonempty blocks.

    Generation walks restricted growth strings, so each partition appears
    exactly once and the stream order is deterministic.
    """
    if not 2 <= q <= MAX_PARTITION_Q:
        raise DomainError(f"q must be in [2, {MAX_PARTITION_Q}], got {q}")
    if not 1 <= k <= q:
        raise DomainError(f"k must be in [1, q={q}], got {k}")

    blocks = [0] * k

    def rec(color: int, used: int) -> Iterator[PartitionSpec]:
        remaining = q - color
        if remaining < k - used:
            return
        if color == q:
            yield PartitionSpec.from_parts(ColorSet(b, q) for b in blocks)
            return
        bit = 1 << color
        for b in range(used):
            blocks[b] |= bit
            yield from rec(color + 1, used)
            blocks[b] ^= bit
        if used < k:
            blocks[used] |= bit
            yield from rec(color + 1, used + 1)
            blocks[used] ^= bit

    yield from rec(0, 0)


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind via ``S(n,k) = k S(n-1,k) + S(n-1,k-1)``."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def integer_partitions(n: int, k: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Nonincreasing tuples of ``k`` positive integers summing to ``n``."""
    if max_part is None:
        max_part = n
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(min(n - (k - 1), max_part), 0, -1):
        if first * k < n:
            break
        for rest in integer_partitions(n - first, k - 1, first):
            yield (first,) + rest


def partition_from_sizes(sizes: Sequence[int]) -> PartitionSpec:
    """Materialize the representative partition whose blocks take consecutive colors."""
    q = sum(sizes)
    parts = []
    start = 0
    for s in sizes:
        parts.append(ColorSet(((1 << s) - 1) << start, q))
        start += s
    return PartitionSpec.from_parts(parts)

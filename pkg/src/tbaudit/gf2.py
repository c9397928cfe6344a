"""Bit-packed linear algebra over GF(2).

Vectors live in (F_2)^d and are represented as plain Python ints: bit j of
the int (LSB first) is coordinate j, and bits at position >= d must be zero.
Matrices act on the right, row-vector style: applying M to v XORs together
the rows of M selected by the set bits of v.  Subspaces are kept in a
canonical reduced row echelon form so that equality of subspaces is plain
tuple equality of their bases.

The exhaustive subspace enumerator generates reduced echelon bases directly
(choose pivot columns, then fill the free entries) instead of filtering
spans, so every subspace is produced exactly once.  Enumeration order is
canonical and resumable: pivot-column sets in lexicographic order, free
entries in a reflected Gray sequence within each pivot set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .errors import CapExceeded

__all__ = [
    "AMBIENT_CAP",
    "DEFAULT_ENUMERATION_CAP",
    "BitMatrix",
    "Subspace",
    "BrickLayout",
    "Wall",
    "rref",
    "subspace_sum",
    "subspace_image",
    "gaussian_binomial",
    "count_proper_subspaces",
    "enumerate_subspaces",
    "as_wall",
]

AMBIENT_CAP = 128
DEFAULT_ENUMERATION_CAP = 10


def _reduced_rows(vectors: Iterable[int]) -> tuple[int, ...]:
    """Reduced row echelon basis of the span, pivots (lowest set bits) ascending."""
    by_pivot: dict[int, int] = {}
    for v in vectors:
        while v:
            p = v & -v
            q = by_pivot.get(p)
            if q is None:
                by_pivot[p] = v
                break
            v ^= q
    # Back-eliminate so every pivot bit appears in exactly one row.  Rows with
    # larger pivots are cleaned first; XORing them in cannot disturb smaller
    # pivot columns.
    reduced: dict[int, int] = {}
    for p in sorted(by_pivot, reverse=True):
        v = by_pivot[p]
        for q, w in reduced.items():
            if v & q:
                v ^= w
        reduced[p] = v
    return tuple(reduced[p] for p in sorted(reduced))


@dataclass(frozen=True)
class Subspace:
    """A subspace of (F_2)^ambient with a canonical RREF basis.

    ``basis`` rows have strictly increasing pivot positions and each pivot
    column is zero in every other row, so two Subspace values are equal as
    dataclasses iff they are equal as subspaces.
    """

    basis: tuple[int, ...]
    ambient: int

    def __post_init__(self) -> None:
        if not 0 <= self.ambient <= AMBIENT_CAP:
            raise ValueError(f"ambient dimension {self.ambient} out of range")
        mask = (1 << self.ambient) - 1
        for row in self.basis:
            if row & ~mask:
                raise ValueError("basis row has bits beyond the ambient dimension")
        if self.basis != _reduced_rows(self.basis):
            raise ValueError("basis is not in canonical reduced echelon form")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coset_rep(self, v: int) -> int:
        """Canonical representative of v's coset (pivot bits cleared)."""
        for row in self.basis:
            if v & (row & -row):
                v ^= row
        return v

    def __contains__(self, v: int) -> bool:
        return self.coset_rep(v) == 0

    def elements(self) -> list[int]:
        elems = [0]
        for row in self.basis:
            elems += [e ^ row for e in elems]
        return elems

    def is_trivial(self) -> bool:
        return self.dim == 0 or self.dim == self.ambient


def rref(vectors: Iterable[int], ambient: int) -> Subspace:
    """Canonicalize a spanning set into a Subspace."""
    return Subspace(_reduced_rows(vectors), ambient)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient != b.ambient:
        raise ValueError("ambient dimensions differ")
    return rref(a.basis + b.basis, a.ambient)


@dataclass(frozen=True)
class BitMatrix:
    """Matrix over GF(2); rows[i] is the image of basis vector e_i.

    The matrix represents a linear map (F_2)^nrows -> (F_2)^ncols applied as
    v @ M = XOR of rows selected by v's bits.
    """

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self) -> None:
        if not 0 <= self.ncols <= AMBIENT_CAP or len(self.rows) > AMBIENT_CAP:
            raise ValueError("matrix dimensions out of range")
        mask = (1 << self.ncols) - 1
        for row in self.rows:
            if row & ~mask:
                raise ValueError("matrix row has bits beyond ncols")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def apply(self, v: int) -> int:
        y = 0
        rows = self.rows
        while v:
            i = (v & -v).bit_length() - 1
            y ^= rows[i]
            v &= v - 1
        return y

    def mul(self, other: "BitMatrix") -> "BitMatrix":
        """self followed by other (row-vector convention: v(AB) = (vA)B)."""
        if self.ncols != other.nrows:
            raise ValueError("inner dimensions differ")
        return BitMatrix(tuple(other.apply(r) for r in self.rows), other.ncols)

    def rank(self) -> int:
        return len(_reduced_rows(self.rows))

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def inverse(self) -> "BitMatrix":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("matrix is not square")
        # Gauss-Jordan on [A | I], tracking the identity tags through the
        # same row operations.
        by_pivot: dict[int, tuple[int, int]] = {}
        for i, row in enumerate(self.rows):
            tag = 1 << i
            while row:
                p = row & -row
                entry = by_pivot.get(p)
                if entry is None:
                    by_pivot[p] = (row, tag)
                    break
                row ^= entry[0]
                tag ^= entry[1]
            else:
                raise ValueError("matrix is singular")
        if len(by_pivot) != n:
            raise ValueError("matrix is singular")
        reduced: dict[int, tuple[int, int]] = {}
        for p in sorted(by_pivot, reverse=True):
            row, tag = by_pivot[p]
            for q, (qr, qt) in reduced.items():
                if row & q:
                    row ^= qr
                    tag ^= qt
            reduced[p] = (row, tag)
        # After reduction the row with pivot bit i is exactly e_i, and its tag
        # is the i-th row of the inverse.
        return BitMatrix(tuple(reduced[1 << i][1] for i in range(n)), n)


def identity_matrix(d: int) -> BitMatrix:
    return BitMatrix(tuple(1 << i for i in range(d)), d)


def random_invertible(rng: random.Random, d: int) -> BitMatrix:
    while True:
        rows = tuple(rng.getrandbits(d) for _ in range(d))
        m = BitMatrix(rows, d)
        if m.rank() == d:
            return m


def subspace_image(s: Subspace, m: BitMatrix) -> Subspace:
    """Image of a subspace under a linear map (dimension preserved iff m injective)."""
    if s.ambient != m.nrows:
        raise ValueError("subspace ambient does not match matrix input dimension")
    return rref((m.apply(r) for r in s.basis), m.ncols)


def gaussian_binomial(d: int, k: int) -> int:
    """Number of k-dimensional subspaces of (F_2)^d."""
    if k < 0 or k > d:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= (1 << (d - i)) - 1
        den *= (1 << (i + 1)) - 1
    return num // den


def count_proper_subspaces(d: int) -> int:
    """Number of nontrivial subspaces (0 < dim < d)."""
    return sum(gaussian_binomial(d, k) for k in range(1, d))


def _iter_rref_bases(d: int, k: int, start: int = 0,
                     stop: int | None = None) -> Iterator[list[int]]:
    """Yield raw RREF bases as a reused mutable list of k rows.

    Callers must copy the list if they keep it.  Order: pivot-column sets
    lexicographically; within a pivot set, free entries follow a reflected
    Gray sequence (one bit flipped per step), which makes ranges cheap to
    resume: the basis at index t inside a block is recovered from t ^ (t >> 1).
    """
    total = gaussian_binomial(d, k)
    if stop is None or stop > total:
        stop = total
    if start < 0 or start > stop:
        raise ValueError("bad enumeration range")
    if k == 0:
        if start == 0 and stop > 0:
            yield []
        return
    pos = 0
    for pivots in combinations(range(d), k):
        pivot_mask = 0
        for p in pivots:
            pivot_mask |= 1 << p
        # Free slots: (row index, column) with column right of the row's pivot
        # and not itself a pivot column.
        slots = [(i, c)
                 for i in range(k)
                 for c in range(pivots[i] + 1, d)
                 if not (pivot_mask >> c) & 1]
        block = 1 << len(slots)
        if pos + block <= start:
            pos += block
            continue
        if pos >= stop:
            return
        t0 = max(start - pos, 0)
        t1 = min(stop - pos, block)
        if t0 < t1:
            rows = [1 << p for p in pivots]
            g = t0 ^ (t0 >> 1)
            for s, (i, c) in enumerate(slots):
                if (g >> s) & 1:
                    rows[i] ^= 1 << c
            yield rows
            for t in range(t0 + 1, t1):
                s = (t & -t).bit_length() - 1
                i, c = slots[s]
                rows[i] ^= 1 << c
                yield rows
        pos += block
        if pos >= stop:
            return


def enumerate_subspaces(d: int, k: int, *, cap: int = DEFAULT_ENUMERATION_CAP,
                        start: int = 0, stop: int | None = None) -> Iterator[Subspace]:
    """All k-dimensional subspaces of (F_2)^d in canonical order.

    Refuses with CapExceeded when d exceeds ``cap`` (full enumeration cost
    grows like 2^(k(d-k))); the error carries the exact count that was
    requested.  ``start``/``stop`` select a contiguous range of the canonical
    order so scans can be split across workers and resumed.
    """
    if not 0 <= k <= d:
        raise ValueError(f"need 0 <= k <= d, got k={k} d={d}")
    if d > cap:
        raise CapExceeded(
            f"subspace enumeration at d={d} refused",
            estimate=gaussian_binomial(d, k), limit=cap)
    for rows in _iter_rref_bases(d, k, start, stop):
        yield Subspace(tuple(rows), d)


def bounded_image_span(table, basis_rows, k: int) -> tuple[int, ...] | None:
    """Echelon basis of span(f(U)) if f(U) is itself a subspace, else None.

    U is spanned by ``basis_rows`` (k independent rows) and f is given as a
    lookup table with f(0) = 0.  Since |f(U)| = 2^k for injective f, the image
    is a subspace iff its span has rank exactly k, so the scan aborts as soon
    as rank k is exceeded; that makes this cheap as a pruning filter over
    large subspace enumerations.
    """
    red: dict[int, int] = {}
    rank = 0
    elems = [0]
    for rvec in basis_rows:
        new = [e ^ rvec for e in elems]
        for x in new:
            y = table[x]
            while y:
                p = y & -y
                q = red.get(p)
                if q is None:
                    rank += 1
                    if rank > k:
                        return None
                    red[p] = y
                    break
                y ^= q
        elems += new
    return tuple(red[p] for p in sorted(red))


@dataclass(frozen=True)
class BrickLayout:
    """Splitting of (F_2)^d into b parallel bricks of m bits each.

    Brick i (1-based) occupies bit positions [(i-1)*m, i*m).
    """

    m: int
    b: int

    def __post_init__(self) -> None:
        if self.m < 2 or self.b < 2:
            raise ValueError("need m >= 2 and b >= 2")
        if self.m * self.b > AMBIENT_CAP:
            raise ValueError(f"total dimension {self.m * self.b} exceeds {AMBIENT_CAP}")

    @property
    def d(self) -> int:
        return self.m * self.b

    def brick_mask(self, i: int) -> int:
        if not 1 <= i <= self.b:
            raise ValueError(f"brick index {i} out of range")
        return ((1 << self.m) - 1) << ((i - 1) * self.m)

    def bricks_of(self, v: int) -> frozenset[int]:
        """1-based indices of bricks where v has support."""
        out = []
        m = self.m
        i = 1
        while v:
            if v & ((1 << m) - 1):
                out.append(i)
            v >>= m
            i += 1
        return frozenset(out)


@dataclass(frozen=True)
class Wall(object):
    """Direct sum of a subset of bricks: the subspace spanned by their bits."""

    layout: BrickLayout
    bricks: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for i in self.bricks:
            if not 1 <= i <= self.layout.b:
                raise ValueError(f"brick index {i} out of range")

    @property
    def is_proper(self) -> bool:
        return 0 < len(self.bricks) < self.layout.b

    @property
    def is_trivial(self) -> bool:
        return not self.is_proper

    def sorted_bricks(self) -> tuple[int, ...]:
        return tuple(sorted(self.bricks))

    def mask(self) -> int:
        out = 0
        for i in self.bricks:
            out |= self.layout.brick_mask(i)
        return out

    def subspace(self) -> Subspace:
        m = self.layout.m
        rows = [1 << ((i - 1) * m + j)
                for i in self.sorted_bricks() for j in range(m)]
        return Subspace(tuple(rows), self.layout.d)


def as_wall(s: Subspace, layout: BrickLayout) -> Wall | None:
    """Recognize a subspace as a wall, or return None.

    A subspace equals the direct sum of the bricks it touches iff its
    dimension is m times the number of touched bricks (containment in that
    direct sum is automatic).
    """
    if s.ambient != layout.d:
        raise ValueError("subspace ambient does not match layout")
    touched: set[int] = set()
    for row in s.basis:
        touched |= layout.bricks_of(row)
    if s.dim != layout.m * len(touched):
        return None
    return Wall(layout, frozenset(touched))

"""Exact arithmetic for finite permutation groups.

Groups are stored as explicit element tables.  Elements are ordered
breadth-first by word length in the generators, each layer sorted
lexicographically by image tuple, so the identity always has index 0 and
every downstream search is reproducible.

Composition follows function notation: ``(g * h)(x) == g(h(x))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ParseError

DEFAULT_MAX_ORDER = 10_000
# dense multiplication tables above this order would not fit in memory
MAX_TABLE_ORDER = 4096


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{0, ..., degree-1}`` given by its image tuple."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError(f"not a permutation: {imgs}")
        object.__setattr__(self, "images", imgs)

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> Permutation:
        """Product of cycles, rightmost applied first."""
        perm = cls.identity(degree)
        for cyc in cycles:
            imgs = list(range(degree))
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                if not 0 <= a < degree:
                    raise ParseError(f"point {a} outside degree {degree}")
                imgs[a] = b
            if len(set(cyc)) != len(cyc):
                raise ParseError(f"repeated point in cycle {tuple(cyc)}")
            perm = perm * cls(tuple(imgs))
        return perm

    @classmethod
    def parse(cls, text: str, degree: int | None = None) -> Permutation:
        cycles = parse_cycles(text)
        needed = max((max(c) for c in cycles if c), default=-1) + 1
        if degree is None:
            degree = max(needed, 1)
        elif needed > degree:
            raise ParseError(f"{text!r} moves points beyond degree {degree}")
        return cls.from_cycles(cycles, degree)

    def __mul__(self, other: Permutation) -> Permutation:
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return Permutation(tuple(self.images[i] for i in other.images))

    def __call__(self, point: int) -> int:
        return self.images[point]

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its least point."""
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self.images[start]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self.images[nxt]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        from math import lcm

        return lcm(1, *(len(c) for c in self.cycles()))

    def __str__(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycs)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str) -> list[tuple[int, ...]]:
    """Parse ``"(0 1 2)(3 4)"``; ``"()"`` is the identity."""
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty permutation")
    pos = 0
    cycles = []
    for m in _CYCLE_RE.finditer(stripped):
        if stripped[pos:m.start()].strip():
            raise ParseError(f"unexpected text in {text!r}")
        pos = m.end()
        body = m.group(1).split()
        try:
            pts = tuple(int(tok) for tok in body)
        except ValueError:
            raise ParseError(f"non-integer point in {text!r}") from None
        if any(p < 0 for p in pts):
            raise ParseError(f"negative point in {text!r}")
        if pts:
            cycles.append(pts)
    if stripped[pos:].strip() or pos == 0:
        raise ParseError(f"malformed cycle notation {text!r}")
    return cycles


def parse_generators(text: str) -> list[Permutation]:
    """Parse a comma separated list of permutations sharing one degree."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise ParseError("no generators given")
    cyc_lists = [parse_cycles(p) for p in parts]
    degree = max([1] + [max(c) + 1 for cl in cyc_lists for c in cl])
    return [Permutation.from_cycles(cl, degree) for cl in cyc_lists]


@dataclass(frozen=True)
class SubgroupHandle:
    """Subgroup of an ambient group as a bitset over its element indices."""

    member_bits: int
    order: int

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> SubgroupHandle:
        return cls(mask_to_bits(mask), int(np.count_nonzero(mask)))

    def __contains__(self, index: int) -> bool:
        return bool((self.member_bits >> int(index)) & 1)

    def __le__(self, other: SubgroupHandle) -> bool:
        return self.member_bits & other.member_bits == self.member_bits

    def __lt__(self, other: SubgroupHandle) -> bool:
        return self <= other and self.member_bits != other.member_bits

    def mask(self, n: int) -> np.ndarray:
        return bits_to_mask(self.member_bits, n)

    def indices(self, n: int) -> np.ndarray:
        return np.flatnonzero(self.mask(n))

    def meet(self, other: SubgroupHandle) -> SubgroupHandle:
        bits = self.member_bits & other.member_bits
        return SubgroupHandle(bits, bits.bit_count())


def mask_to_bits(mask: np.ndarray) -> int:
    packed = np.packbits(np.asarray(mask, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def bits_to_mask(bits: int, n: int) -> np.ndarray:
    raw = bits.to_bytes((n + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


class Group:
    """A finite permutation group held as a full element table.

    Build instances with :func:`closure`; the constructor trusts its input.
    """

    def __init__(self, degree: int, table: np.ndarray, name: str | None = None):
        self.degree = degree
        self.table = table  # (order, degree) image array
        self.table.setflags(write=False)
        self.name = name
        self._lookup = {row.tobytes(): i for i, row in enumerate(table)}
        self.identity_index = 0

    def __repr__(self):
        label = self.name or f"<degree {self.degree}>"
        return f"Group({label}, order={self.order})"

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self):
        return self.order

    @cached_property
    def elements(self) -> tuple[Permutation, ...]:
        return tuple(Permutation(tuple(row)) for row in self.table.tolist())

    def index(self, perm: Permutation | Sequence[int]) -> int:
        imgs = perm.images if isinstance(perm, Permutation) else perm
        key = np.asarray(imgs, dtype=self.table.dtype).tobytes()
        try:
            return self._lookup[key]
        except KeyError:
            raise KeyError(f"{perm} is not an element of {self!r}") from None

    def label(self, index: int) -> str:
        return str(self.elements[index])

    @cached_property
    def mult(self) -> np.ndarray:
        """``mult[a, b]`` is the index of ``elements[a] * elements[b]``."""
        n = self.order
        if n > MAX_TABLE_ORDER:
            raise CapacityError(f"order {n} too large for a dense table")
        out = np.empty((n, n), dtype=np.int32)
        lookup = self._lookup
        tab = self.table
        for a in range(n):
            rows = tab[a][tab]
            out[a] = [lookup[r.tobytes()] for r in rows]
        out.setflags(write=False)
        return out

    @cached_property
    def inv(self) -> np.ndarray:
        rows, cols = np.nonzero(self.mult == self.identity_index)
        out = np.empty(self.order, dtype=np.int32)
        out[rows] = cols
        out.setflags(write=False)
        return out

    @cached_property
    def element_orders(self) -> np.ndarray:
        return np.array([p.order() for p in self.elements], dtype=np.int64)

    @cached_property
    def classes(self) -> tuple[tuple[int, ...], ...]:
        """Conjugacy classes sorted by (size, least member)."""
        n = self.order
        mult, inv = self.mult, self.inv
        assigned = np.zeros(n, dtype=bool)
        found = []
        for x in range(n):
            if assigned[x]:
                continue
            conj = np.unique(mult[mult[:, x], inv])
            assigned[conj] = True
            found.append(tuple(int(c) for c in conj))
        found.sort(key=lambda c: (len(c), c[0]))
        return tuple(found)

    @cached_property
    def class_of(self) -> np.ndarray:
        out = np.empty(self.order, dtype=np.int64)
        for ci, cls in enumerate(self.classes):
            out[list(cls)] = ci
        out.setflags(write=False)
        return out

    @property
    def whole(self) -> SubgroupHandle:
        return SubgroupHandle((1 << self.order) - 1, self.order)

    @property
    def trivial(self) -> SubgroupHandle:
        return SubgroupHandle(1, 1)

    def members(self, h: SubgroupHandle) -> np.ndarray:
        return h.indices(self.order)

    def is_subgroup(self, h: SubgroupHandle) -> bool:
        mask = h.mask(self.order)
        if not mask[self.identity_index]:
            return False
        idx = np.flatnonzero(mask)
        return bool(mask[self.mult[np.ix_(idx, idx)]].all())

    def is_abelian(self) -> bool:
        return bool((self.mult == self.mult.T).all())


def closure(degree: int, generators: Sequence[Permutation], *,
            max_order: int = DEFAULT_MAX_ORDER, name: str | None = None) -> Group:
    """Enumerate the group generated by ``generators`` breadth-first."""
    for g in generators:
        if g.degree != degree:
            raise ValueError(f"generator {g} has degree {g.degree}, expected {degree}")
    gens = np.array([g.images for g in generators], dtype=np.int16).reshape(-1, degree)
    ident = np.arange(degree, dtype=np.int16)
    seen = {ident.tobytes()}
    layers = [ident[None, :]]
    frontier = layers[0]
    total = 1
    while len(gens) and len(frontier):
        # word * s, applied as x -> word(s(x))
        prods = frontier[:, gens].reshape(-1, degree)
        fresh = {}
        for row in prods:
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                fresh[key] = row
        if not fresh:
            break
        layer = np.array(sorted(fresh.values(), key=lambda r: tuple(r.tolist())), dtype=np.int16)
        total += len(layer)
        if total > max_order:
            raise CapacityError(f"group order exceeds cap {max_order}")
        layers.append(layer)
        frontier = layer
    return Group(degree, np.ascontiguousarray(np.concatenate(layers)), name=name)


def _close_mask(mult: np.ndarray, start: np.ndarray, gens: np.ndarray) -> np.ndarray:
    members = start.copy()
    frontier = np.flatnonzero(members)
    if len(gens) == 0:
        return members
    while frontier.size:
        prods = mult[np.ix_(frontier, gens)].ravel()
        new = np.unique(prods[~members[prods]])
        members[new] = True
        frontier = new
    return members


def generated_subgroup(g: Group, seed: Iterable[int]) -> SubgroupHandle:
    """Smallest subgroup of ``g`` containing the element indices in ``seed``."""
    seed = np.unique(np.fromiter((int(s) for s in seed), dtype=np.int64))
    if seed.size and (seed.min() < 0 or seed.max() >= g.order):
        raise IndexError("seed index out of range")
    start = np.zeros(g.order, dtype=bool)
    start[g.identity_index] = True
    return SubgroupHandle.from_mask(_close_mask(g.mult, start, seed))


def join_with(g: Group, h: SubgroupHandle, h_gens: Sequence[int], extra: Sequence[int]) -> SubgroupHandle:
    """``<h, extra>`` given a generating list ``h_gens`` of ``h``."""
    gens = np.array(list(h_gens) + list(extra), dtype=np.int64)
    return SubgroupHandle.from_mask(_close_mask(g.mult, h.mask(g.order), gens))


def small_generators(g: Group, h: SubgroupHandle) -> list[int]:
    """Greedy generating list of ``h`` scanning members in index order."""
    gens: list[int] = []
    cur = np.zeros(g.order, dtype=bool)
    cur[g.identity_index] = True
    for x in g.members(h):
        if not cur[x]:
            gens.append(int(x))
            cur = _close_mask(g.mult, cur, np.array(gens))
    return gens


def conjugacy_classes(g: Group) -> tuple[tuple[int, ...], ...]:
    return g.classes


def cosets(g: Group, h: SubgroupHandle, side: str = "left") -> list[tuple[int, ...]]:
    """Partition of ``g`` into ``gH`` (left), ``Hg`` (right) or ``HgH`` (double)."""
    if not g.is_subgroup(h):
        raise ValueError("not a subgroup")
    hm = g.members(h)
    mult = g.mult
    assigned = np.zeros(g.order, dtype=bool)
    parts = []
    for x in range(g.order):
        if assigned[x]:
            continue
        if side == "left":
            block = mult[x, hm]
        elif side == "right":
            block = mult[hm, x]
        elif side == "double":
            block = mult[mult[hm, x][:, None], hm].ravel()
        else:
            raise ValueError(f"unknown coset side {side!r}")
        block = np.unique(block)
        assigned[block] = True
        parts.append(tuple(int(b) for b in block))
    return parts


def conjugate(g: Group, h: SubgroupHandle, x: int) -> SubgroupHandle:
    """``x H x^-1``."""
    hm = g.members(h)
    mask = np.zeros(g.order, dtype=bool)
    mask[g.mult[g.mult[x, hm], g.inv[x]]] = True
    return SubgroupHandle.from_mask(mask)


def core(g: Group, h: SubgroupHandle) -> SubgroupHandle:
    """Largest normal subgroup of ``g`` inside ``h``."""
    bits = h.member_bits
    for x in range(g.order):
        bits &= conjugate(g, h, x).member_bits
    return SubgroupHandle(bits, bits.bit_count())


def is_normal(g: Group, h: SubgroupHandle) -> bool:
    return core(g, h) == h


def subgroup_as_group(g: Group, h: SubgroupHandle) -> tuple[Group, np.ndarray]:
    """Rebuild ``h`` as a group in its own right.

    Returns the group and ``index_map`` with ``index_map[i]`` the ambient
    index of the subgroup's ``i``-th element.
    """
    gens = [g.elements[i] for i in small_generators(g, h)]
    sub = closure(g.degree, gens, max_order=max(h.order, 1))
    index_map = np.array([g.index(row) for row in sub.table], dtype=np.int64)
    return sub, index_map

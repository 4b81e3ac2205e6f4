"""Subgroup lattices, their intervals, and Boolean/distributive analysis."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CapacityError
from .perm import (Group, SubgroupHandle, _close_mask, core, join_with,
                   mask_to_bits, small_generators)

DEFAULT_MAX_SUBGROUPS = 100_000


class SubgroupLattice:
    """All subgroups of a group, sorted by (order, bitset).

    ``leq[a, b]`` is true when node ``a`` is contained in node ``b``.
    ``meet[a, b]`` and ``join[a, b]`` are node indices.
    """

    def __init__(self, group: Group, nodes: list[SubgroupHandle], gens: list[list[int]]):
        self.group = group
        self.nodes = nodes
        self.generators = gens
        self._index = {h.member_bits: i for i, h in enumerate(nodes)}
        n = group.order
        mem = np.array([h.mask(n) for h in nodes], dtype=np.int32).reshape(len(nodes), n)
        orders = np.array([h.order for h in nodes])
        self.orders = orders
        self.leq = (mem @ mem.T) == orders[:, None]
        m = len(nodes)
        up = self.leq[:, None, :] & self.leq[None, :, :]
        # nodes are order-sorted, so the first common upper bound is the join
        self.join = np.argmax(up, axis=2)
        down = self.leq.T[:, None, :] & self.leq.T[None, :, :]
        self.meet = m - 1 - np.argmax(down[:, :, ::-1], axis=2)
        for arr in (self.leq, self.join, self.meet):
            arr.setflags(write=False)
        self.bottom_index = 0
        self.top_index = m - 1
        self._profiles: dict[tuple[int, int], LatticeProfile] = {}

    def __len__(self):
        return len(self.nodes)

    def index(self, h: SubgroupHandle) -> int:
        return self._index[h.member_bits]

    def covers(self) -> list[tuple[int, int]]:
        """Cover pairs ``(a, b)`` with ``a < b`` and nothing strictly between."""
        strict = self.leq & ~np.eye(len(self), dtype=bool)
        s = strict.astype(np.int32)
        between = (s @ s) > 0
        a, b = np.nonzero(strict & ~between)
        return list(zip(a.tolist(), b.tolist()))

    def interval(self, low: int, high: int) -> Interval:
        return interval(self, low, high)

    def profile(self, low: int, high: int) -> LatticeProfile:
        key = (low, high)
        if key not in self._profiles:
            self._profiles[key] = analyze(self.interval(low, high))
        return self._profiles[key]

    def normal_nodes(self) -> list[int]:
        return [i for i, h in enumerate(self.nodes) if core(self.group, h) == h]


@dataclass(frozen=True)
class Interval:
    lattice: SubgroupLattice = field(repr=False)
    low: int
    high: int
    members: tuple[int, ...]

    def __len__(self):
        return len(self.members)

    def sub(self, low: int, high: int) -> Interval:
        return interval(self.lattice, low, high)


@dataclass(frozen=True)
class LatticeProfile:
    is_distributive: bool
    is_boolean: bool
    boolean_rank: Optional[int]
    atoms: tuple[int, ...]
    coatoms: tuple[int, ...]
    bottom_interval: tuple[int, int]
    top_interval: tuple[int, int]
    is_bottom_boolean: bool
    is_top_boolean: bool
    complements: dict = field(default_factory=dict)


def enumerate_subgroups(g: Group, *, max_subgroups: int = DEFAULT_MAX_SUBGROUPS) -> SubgroupLattice:
    """Every subgroup, as the join-closure of the cyclic subgroups."""
    n = g.order
    mult = g.mult
    found: dict[int, tuple[SubgroupHandle, list[int]]] = {}
    cyclic: list[tuple[SubgroupHandle, int]] = []
    ident = np.zeros(n, dtype=bool)
    ident[g.identity_index] = True
    for x in range(n):
        mask = _close_mask(mult, ident, np.array([x]))
        h = SubgroupHandle.from_mask(mask)
        if h.member_bits not in found:
            found[h.member_bits] = (h, [x] if x != g.identity_index else [])
            cyclic.append((h, x))
    frontier = [found[h.member_bits] for h, _ in cyclic]
    while frontier:
        nxt = []
        for h, gens in frontier:
            for c, x in cyclic:
                if c <= h:
                    continue
                j = join_with(g, h, gens, [x])
                if j.member_bits not in found:
                    entry = (j, gens + [x])
                    found[j.member_bits] = entry
                    nxt.append(entry)
                    if len(found) > max_subgroups:
                        raise CapacityError(f"more than {max_subgroups} subgroups")
        frontier = nxt
    entries = sorted(found.values(), key=lambda e: (e[0].order, e[0].member_bits))
    nodes = [e[0] for e in entries]
    gens = [small_generators(g, h) for h in nodes]
    return SubgroupLattice(g, nodes, gens)


def interval(lat: SubgroupLattice, low: int, high: int) -> Interval:
    if not lat.leq[low, high]:
        raise ValueError(f"nodes {low} and {high} are not comparable as [low, high]")
    members = np.flatnonzero(lat.leq[low] & lat.leq[:, high])
    return Interval(lat, low, high, tuple(members.tolist()))


def _local_tables(iv: Interval):
    lat = iv.lattice
    mem = np.array(iv.members)
    pos = np.full(len(lat), -1)
    pos[mem] = np.arange(len(mem))
    meet = pos[lat.meet[np.ix_(mem, mem)]]
    join = pos[lat.join[np.ix_(mem, mem)]]
    leq = lat.leq[np.ix_(mem, mem)]
    return mem, meet, join, leq


def _distributive(meet: np.ndarray, join: np.ndarray) -> bool:
    # a ^ (b v c) == (a ^ b) v (a ^ c) over all triples
    lhs = meet[:, join]
    rhs = join[meet[:, :, None], meet[:, None, :]]
    return bool((lhs == rhs).all())


def _complement_table(meet, join, bottom, top) -> np.ndarray:
    return (meet == bottom) & (join == top)


def _atoms_coatoms(leq: np.ndarray):
    m = len(leq)
    if m == 1:
        return [], []
    strict = leq & ~np.eye(m, dtype=bool)
    s = strict.astype(np.int32)
    cover = strict & ~((s @ s) > 0)
    atoms = np.flatnonzero(cover[0]).tolist()
    coatoms = np.flatnonzero(cover[:, m - 1]).tolist()
    return atoms, coatoms


def _is_boolean_local(meet, join) -> bool:
    m = len(meet)
    if m == 1:
        return True
    if m & (m - 1):
        return False
    if not _distributive(meet, join):
        return False
    return bool(_complement_table(meet, join, 0, m - 1).any(axis=1).all())


def _sub_boolean(meet, join, leq, lo, hi) -> bool:
    sel = np.flatnonzero(leq[lo] & leq[:, hi])
    pos = np.full(len(meet), -1)
    pos[sel] = np.arange(len(sel))
    return _is_boolean_local(pos[meet[np.ix_(sel, sel)]], pos[join[np.ix_(sel, sel)]])


def analyze(iv: Interval) -> LatticeProfile:
    """Distributivity, Boolean-ness, atoms, top and bottom intervals."""
    mem, meet, join, leq = _local_tables(iv)
    m = len(mem)
    # members are order-sorted: local 0 is the bottom, m-1 the top
    atoms, coatoms = _atoms_coatoms(leq)
    distributive = _distributive(meet, join)
    comp = _complement_table(meet, join, 0, m - 1)
    complemented = bool(comp.any(axis=1).all())
    boolean = distributive and complemented
    complements = {int(mem[a]): int(mem[np.argmax(comp[a])]) for a in range(m) if comp[a].any()}
    b = 0
    for a in atoms:
        b = join[b, a]
    t = m - 1
    for c in coatoms:
        t = meet[t, c]
    bottom_boolean = _sub_boolean(meet, join, leq, 0, b)
    top_boolean = _sub_boolean(meet, join, leq, t, m - 1)
    return LatticeProfile(
        is_distributive=distributive,
        is_boolean=boolean,
        boolean_rank=len(atoms) if boolean else None,
        atoms=tuple(int(mem[a]) for a in atoms),
        coatoms=tuple(int(mem[c]) for c in coatoms),
        bottom_interval=(int(mem[0]), int(mem[b])),
        top_interval=(int(mem[t]), int(mem[m - 1])),
        is_bottom_boolean=bottom_boolean,
        is_top_boolean=top_boolean,
        complements=complements,
    )


@dataclass(frozen=True)
class ComplementReport:
    join_is_top: bool
    complement: int
    b_above_complement: bool
    implication_holds: bool
    a_is_atom: bool
    atom_clause_holds: bool


def complement_check(iv: Interval, a: int, b: int) -> ComplementReport:
    """Check that ``a v b = 1`` forces ``b >= complement(a)`` in a Boolean interval."""
    prof = iv.lattice.profile(iv.low, iv.high)
    if not prof.is_boolean:
        raise ValueError("interval is not Boolean")
    lat = iv.lattice
    if a not in iv.members or b not in iv.members:
        raise ValueError("nodes must lie in the interval")
    ac = prof.complements[a]
    join_top = int(lat.join[a, b]) == iv.high
    above = bool(lat.leq[ac, b])
    is_atom = a in prof.atoms
    atom_ok = (not (join_top and is_atom)) or b in (ac, iv.high)
    return ComplementReport(
        join_is_top=join_top,
        complement=ac,
        b_above_complement=above,
        implication_holds=(not join_top) or above,
        a_is_atom=is_atom,
        atom_clause_holds=atom_ok,
    )


def is_h_cyclic(iv: Interval) -> Optional[int]:
    """First element ``g`` of the top group with ``<H, g>`` equal to the top, or None."""
    lat = iv.lattice
    g = lat.group
    low_h = lat.nodes[iv.low]
    high_h = lat.nodes[iv.high]
    gens = lat.generators[iv.low]
    start = low_h.mask(g.order)
    for x in g.members(high_h):
        mask = _close_mask(g.mult, start, np.array(gens + [int(x)]))
        if int(mask.sum()) == high_h.order:
            return int(x)
    return None


def boolean_chain_length(lat: SubgroupLattice, mode: str = "top", *,
                         sources: Optional[list[int]] = None) -> tuple[int, list[int]]:
    """Shortest chain bottom -> top whose steps are top (or bottom) Boolean.

    ``sources`` replaces the bottom node as the set of admissible starting
    points (all at distance 0).
    """
    if mode not in ("top", "bottom"):
        raise ValueError(f"mode must be 'top' or 'bottom', not {mode!r}")
    attr = "is_top_boolean" if mode == "top" else "is_bottom_boolean"
    start = sorted(sources) if sources is not None else [lat.bottom_index]
    target = lat.top_index
    parent = {s: None for s in start}
    queue = deque(start)
    while queue:
        x = queue.popleft()
        if x == target:
            break
        for y in np.flatnonzero(lat.leq[x]).tolist():
            if y == x or y in parent:
                continue
            if getattr(lat.profile(x, y), attr):
                parent[y] = x
                queue.append(y)
    chain = [target]
    while parent[chain[-1]] is not None:
        chain.append(parent[chain[-1]])
    chain.reverse()
    return len(chain) - 1, chain


def minimal_generating_size(g: Group) -> int:
    """Fewest elements generating ``g``.

    Layer ``k`` holds every subgroup generated by ``k`` elements, deduplicated,
    so the search is exhaustive without enumerating ``k``-subsets.
    """
    if g.order == 1:
        return 0
    ident = np.zeros(g.order, dtype=bool)
    ident[g.identity_index] = True
    layer = {1: (ident, [])}
    seen = {1}
    k = 0
    while layer:
        k += 1
        nxt = {}
        for start, gens in layer.values():
            for x in np.flatnonzero(~start).tolist():
                mask = _close_mask(g.mult, start, np.array(gens + [x]))
                if mask.all():
                    return k
                key = mask_to_bits(mask)
                if key not in seen:
                    seen.add(key)
                    nxt[key] = (mask, gens + [x])
        layer = nxt
    raise AssertionError("unreachable: the whole group is generated by its elements")

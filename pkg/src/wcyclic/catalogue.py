"""Named groups: ``S``, ``A``, ``D``, ``Z`` families, ``Q8`` and direct products.

Descriptor grammar::

    NAME := FAMILY INT | FAMILY INT "x" NAME

``Dn`` is the dihedral group of order ``2n`` acting on ``n`` points
(``D1`` is ``Z2`` and ``D2`` the Klein four-group, both given faithful
actions).  ``Q8`` acts on itself by left multiplication, degree 8.
Factors of a product act on disjoint blocks of points.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .perm import DEFAULT_MAX_ORDER, Group, Permutation, closure, parse_generators

_FACTOR_RE = re.compile(r"([SADZQ])(\d+)")

# Fixed verification corpus: orders <= 48 plus A5.
DEFAULT_CATALOGUE = (
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z12",
    "Z16", "Z24", "Z30",
    "Z2xZ2", "Z2xZ4", "Z2xZ2xZ2", "Z3xZ3", "Z2xZ6", "Z4xZ4", "Z2xZ8",
    "S3", "D4", "D5", "D6", "D8", "D12", "Q8", "A4", "S4",
    "Z2xS3", "Z3xS3", "Z2xQ8", "Z2xD4", "Z2xA4", "S3xS3", "Z4xS3",
    "Z2xS4", "A5",
)


def _cycle(points) -> tuple[int, ...]:
    return tuple(points)


def _factor_generators(family: str, n: int) -> tuple[int, list[list[tuple[int, ...]]]]:
    """Degree and generators (as cycle lists) for one factor."""
    if family == "Q":
        if n != 8:
            raise ParseError(f"unknown quaternion group Q{n}")
        return 8, _q8_generators()
    if n < 1:
        raise ParseError(f"{family}{n}: index must be positive")
    if family == "Z":
        return n, ([[_cycle(range(n))]] if n > 1 else [])
    if family == "S":
        if n < 2:
            return n, []
        if n == 2:
            return 2, [[(0, 1)]]
        return n, [[(0, 1)], [_cycle(range(n))]]
    if family == "A":
        if n < 3:
            return n, []
        if n == 3:
            return 3, [[(0, 1, 2)]]
        long = _cycle(range(n)) if n % 2 else _cycle(range(1, n))
        return n, [[(0, 1, 2)], [long]]
    if family == "D":
        if n == 1:
            return 2, [[(0, 1)]]
        if n == 2:
            return 4, [[(0, 1), (2, 3)], [(0, 2), (1, 3)]]
        refl = [(i, n - i) for i in range(1, (n + 1) // 2) if i != n - i]
        return n, [[_cycle(range(n))], refl]
    raise ParseError(f"unknown family {family!r}")


def _q8_generators() -> list[list[tuple[int, ...]]]:
    # elements 1, i, j, k, -1, -i, -j, -k as 0..7; left multiplication by i and j
    table = {"1": 0, "i": 1, "j": 2, "k": 3}

    def idx(sign, unit):
        return table[unit] + (4 if sign < 0 else 0)

    left_i = {"1": (1, "i"), "i": (-1, "1"), "j": (1, "k"), "k": (-1, "j")}
    left_j = {"1": (1, "j"), "i": (-1, "k"), "j": (-1, "1"), "k": (1, "i")}
    gens = []
    for rule in (left_i, left_j):
        imgs = [0] * 8
        for sign in (1, -1):
            for unit in "1ijk":
                s, u = rule[unit]
                imgs[idx(sign, unit)] = idx(sign * s, u)
        gens.append(Permutation(tuple(imgs)).cycles())
    return gens


def parse_descriptor(name: str) -> list[tuple[str, int]]:
    text = name.strip()
    parts = text.split("x")
    out = []
    for part in parts:
        m = _FACTOR_RE.fullmatch(part)
        if not m:
            raise ParseError(f"bad group descriptor {name!r}")
        out.append((m.group(1), int(m.group(2))))
    return out


def catalogue(name: str) -> tuple[int, list[Permutation]]:
    """Degree and canonical generators for a group descriptor."""
    factors = parse_descriptor(name)
    blocks = [_factor_generators(f, n) for f, n in factors]
    degree = sum(d for d, _ in blocks)
    gens = []
    offset = 0
    for d, cyc_gens in blocks:
        for cycles in cyc_gens:
            shifted = [tuple(p + offset for p in c) for c in cycles]
            gens.append(Permutation.from_cycles(shifted, degree))
        offset += d
    return degree, gens


def parse_group(descriptor: str, *, max_order: int = DEFAULT_MAX_ORDER) -> Group:
    """Group from a catalogue descriptor or a comma separated generator list."""
    text = descriptor.strip()
    if text.startswith("("):
        gens = parse_generators(text)
        return closure(gens[0].degree, gens, max_order=max_order, name=text)
    degree, gens = catalogue(text)
    return closure(degree, gens, max_order=max_order, name=text)

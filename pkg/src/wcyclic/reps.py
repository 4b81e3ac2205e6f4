"""Complex character tables and the representation-theoretic queries built on them.

Characters come from simultaneous eigenvectors of the class-multiplication
matrices.  Everything downstream rounds to integers (dimensions,
multiplicities) or compares subgroups, so floating point with explicit
tolerances is enough.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import IntegrityError
from .perm import Group, SubgroupHandle, _close_mask

DEFAULT_SEED = 0xB1F0
EIGEN_TOL = 1e-8
ROUND_TOL = 1e-6
MAX_RETRIES = 16


def class_structure_constants(g: Group) -> np.ndarray:
    """``a[C, D, E] = #{(c, d) in C x D : c d = e0}`` for a fixed ``e0`` in ``E``."""
    k = len(g.classes)
    cls = g.class_of
    out = np.zeros((k, k, k), dtype=np.int64)
    everything = np.arange(g.order)
    for e, members in enumerate(g.classes):
        e0 = members[0]
        # d = c^-1 e0 for every c
        d = g.mult[g.inv[everything], e0]
        np.add.at(out, (cls[everything], cls[d], e), 1)
    return out


@dataclass(frozen=True)
class CharacterTable:
    group: Group = field(repr=False)
    degrees: tuple[int, ...]
    chi: np.ndarray  # (irreps, classes), complex
    class_sizes: tuple[int, ...]
    seed: int
    tolerance: float = ROUND_TOL

    @property
    def classes(self):
        return self.group.classes

    def __len__(self):
        return len(self.degrees)

    @cached_property
    def values(self) -> np.ndarray:
        """Characters evaluated on every element, shape (irreps, order)."""
        return self.chi[:, self.group.class_of]

    @cached_property
    def kernels(self) -> tuple[SubgroupHandle, ...]:
        out = []
        for i, d in enumerate(self.degrees):
            mask = np.abs(self.values[i] - d) < self.tolerance
            out.append(SubgroupHandle.from_mask(mask))
        return tuple(out)

    def orthogonality_residual(self) -> float:
        sizes = np.array(self.class_sizes)
        gram = (self.chi * sizes) @ self.chi.conj().T / self.group.order
        return float(np.abs(gram - np.eye(len(self))).max())

    def trivial_index(self) -> int:
        return 0


def _omega_vectors(a: np.ndarray, sizes: np.ndarray, rng: np.random.Generator, tol: float):
    k = a.shape[0]
    weights = rng.standard_normal(k)
    # M_C[D, E] = a[C, D, E]; omega is a right eigenvector of every M_C
    m = np.tensordot(weights, a, axes=(0, 0)).astype(float)
    w, v = np.linalg.eig(m)
    scale = max(1.0, float(np.abs(w).max()))
    gaps = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(gaps, np.inf)
    if k > 1 and gaps.min() < tol * scale:
        return None
    if np.abs(v[0]).min() < tol:
        return None
    return (v / v[0]).T  # rows: omega_chi(C), identity class first


def character_table(g: Group, *, seed: int = DEFAULT_SEED, eigen_tol: float = EIGEN_TOL,
                    round_tol: float = ROUND_TOL, retries: int = MAX_RETRIES) -> CharacterTable:
    """Character table, irreps sorted by degree with the trivial character first."""
    a = class_structure_constants(g)
    sizes = np.array([len(c) for c in g.classes])
    last = None
    for attempt in range(retries):
        s = seed + attempt
        omega = _omega_vectors(a, sizes, np.random.default_rng(s), eigen_tol)
        if omega is None:
            last = "eigenvalue clustering"
            continue
        norms = (np.abs(omega) ** 2 / sizes).sum(axis=1).real
        deg_f = np.sqrt(g.order / norms)
        degrees = np.rint(deg_f).astype(int)
        if np.abs(deg_f - degrees).max() > round_tol or int((degrees ** 2).sum()) != g.order:
            last = "degree rounding"
            continue
        chi = omega * degrees[:, None] / sizes[None, :]
        order = sorted(range(len(degrees)), key=lambda i: _row_key(degrees[i], chi[i]))
        table = CharacterTable(g, tuple(int(degrees[i]) for i in order), chi[order],
                               tuple(int(x) for x in sizes), s, round_tol)
        if table.orthogonality_residual() >= eigen_tol:
            last = "orthogonality"
            continue
        return table
    raise IntegrityError(f"character table failed ({last}) after {retries} seeds from {seed}")


def _row_key(degree, row):
    return (int(degree),) + tuple((-round(float(z.real), 6), -round(float(z.imag), 6)) for z in row)


def fixed_dim(ct: CharacterTable, i: int, k: SubgroupHandle) -> int:
    """``dim V_i^K`` as the average of the character over ``K``."""
    idx = ct.group.members(k)
    val = ct.values[i, idx].sum() / len(idx)
    rounded = round(val.real)
    if abs(val - rounded) >= ct.tolerance:
        raise IntegrityError(f"fixed-point dimension {val} not integral")
    return int(rounded)


def _generated_by_h_and_each(g: Group, h: SubgroupHandle, h_gens) -> np.ndarray:
    """Membership masks of ``<H, x>`` for every element ``x``, shape (order, order)."""
    start = h.mask(g.order)
    out = np.empty((g.order, g.order), dtype=bool)
    for x in range(g.order):
        if start[x]:
            out[x] = start
        else:
            out[x] = _close_mask(g.mult, start, np.array(list(h_gens) + [x]))
    return out


def _fixed_dims_for_masks(ct: CharacterTable, masks: np.ndarray) -> np.ndarray:
    sums = masks.astype(float) @ ct.values.T  # (masks, irreps)
    vals = sums / masks.sum(axis=1)[:, None]
    rounded = np.rint(vals.real)
    if np.abs(vals - rounded).max() >= ct.tolerance:
        raise IntegrityError("fixed-point dimension not integral")
    return rounded.astype(int)


class StabilizerOracle:
    """Pointwise stabilizers ``G_(V_i^H)`` for one subgroup ``H`` and every irrep."""

    def __init__(self, ct: CharacterTable, h: SubgroupHandle, h_gens=None):
        from .perm import small_generators

        g = ct.group
        self.ct = ct
        self.h = h
        gens = small_generators(g, h) if h_gens is None else h_gens
        self.joined = _generated_by_h_and_each(g, h, gens)
        self.dims = _fixed_dims_for_masks(ct, self.joined)  # (elements, irreps)
        self.base = _fixed_dims_for_masks(ct, h.mask(g.order)[None, :])[0]

    def stabilizer(self, i: int) -> SubgroupHandle:
        mask = self.dims[:, i] == self.base[i]
        h_mask = self.h.mask(self.ct.group.order)
        result = SubgroupHandle.from_mask(mask)
        if not (h_mask <= mask).all() or not self.ct.group.is_subgroup(result):
            raise IntegrityError(f"stabilizer of irrep {i} is not a subgroup containing H")
        return result


def pointwise_stabilizer(ct: CharacterTable, i: int, h: SubgroupHandle) -> SubgroupHandle:
    """``{g : g fixes V_i^H pointwise}``, via ``dim V^<H,g> == dim V^H``."""
    return StabilizerOracle(ct, h).stabilizer(i)


def is_linearly_primitive(ct: CharacterTable, h: SubgroupHandle) -> Optional[int]:
    """First irrep ``i`` whose fixed space under ``H`` has pointwise stabilizer ``H``."""
    oracle = StabilizerOracle(ct, h)
    for i in range(len(ct)):
        if oracle.stabilizer(i) == h:
            return i
    return None


def min_faithful_components(ct: CharacterTable) -> tuple[int, tuple[int, ...]]:
    """Smallest set of irreps whose kernels intersect trivially."""
    trivial = 1 << ct.group.identity_index
    kernels = [k.member_bits for k in ct.kernels]
    full = (1 << ct.group.order) - 1
    for size in range(len(kernels) + 1):
        for subset in itertools.combinations(range(len(kernels)), size):
            bits = full
            for i in subset:
                bits &= kernels[i]
            if bits == trivial:
                return size, subset
    raise IntegrityError("no faithful combination of irreps")


@dataclass(frozen=True)
class FusionTensor:
    n: np.ndarray  # n[i, j, k], non-negative integers
    degrees: tuple[int, ...]
    residual: float


def fusion_coeffs(ct: CharacterTable) -> FusionTensor:
    """Multiplicity of ``V_k`` in ``V_i (x) V_j``."""
    sizes = np.array(ct.class_sizes)
    chi = ct.chi
    raw = np.einsum("c,ic,jc,kc->ijk", sizes, chi, chi, chi.conj()) / ct.group.order
    n = np.rint(raw.real)
    residual = float(np.abs(raw - n).max())
    if residual >= ct.tolerance or (n < 0).any():
        raise IntegrityError(f"fusion coefficients not integral (residual {residual})")
    n = n.astype(np.int64)
    d = np.array(ct.degrees)
    if not (np.einsum("ijk,k->ij", n, d) == np.outer(d, d)).all():
        raise IntegrityError("fusion dimension identity violated")
    return FusionTensor(n, ct.degrees, residual)


def tensor_reachability(ft: FusionTensor, i: int) -> frozenset[int]:
    """Irreps occurring in some tensor power ``V_i^{(x) m}``, ``m >= 1``."""
    reached = {i}
    frontier = [i]
    while frontier:
        nxt = []
        for j in frontier:
            for k in np.flatnonzero(ft.n[i, j]).tolist():
                if k not in reached:
                    reached.add(k)
                    nxt.append(k)
        frontier = nxt
    return frozenset(reached)

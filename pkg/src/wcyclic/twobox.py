"""Concrete 2-box spaces of the two group subfactors.

``FUNCTION`` is the algebra of functions on ``G`` (pointwise product), the
2-box space of ``R <= R x| G``.  ``GROUP_ALGEBRA`` is ``CG`` (convolution
product), the 2-box space of ``R^G <= R``.  Both carry a second product,
the coproduct ``*``, transported through the model-crossing map
:func:`fourier`, whose normalisation is fixed by ``a * e1 = a / delta``.

Subgroups correspond to biprojections in both models, but the
correspondence is order preserving in ``FUNCTION`` (``{e} -> e1``,
``G -> id``) and order reversing in ``GROUP_ALGEBRA`` (``{e} -> id``,
``G -> e1``).

Positivity, range projections and spectral calculus use each model's
operator realisation: diagonal matrices for ``FUNCTION`` and the left
regular representation for ``GROUP_ALGEBRA``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import IntegrityError
from .perm import Group, SubgroupHandle

POSITIVITY_TOL = 1e-8
PROJECTION_TOL = 1e-7
CLUSTER_TOL = 1e-6
DEFAULT_RETRIES = 16


class Model(str, enum.Enum):
    FUNCTION = "function"
    GROUP_ALGEBRA = "group_algebra"

    @property
    def dual(self) -> Model:
        return Model.GROUP_ALGEBRA if self is Model.FUNCTION else Model.FUNCTION


@dataclass(frozen=True, eq=False)
class TwoBoxElement:
    model: Model
    group: Group = field(repr=False)
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(self.group.order)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "model", Model(self.model))

    @property
    def delta(self) -> float:
        return float(np.sqrt(self.group.order))

    def _like(self, coeffs) -> TwoBoxElement:
        return TwoBoxElement(self.model, self.group, coeffs)

    def _check(self, other: TwoBoxElement):
        if other.model is not self.model or other.group is not self.group:
            raise ValueError("elements live in different 2-box spaces")

    def __add__(self, other: TwoBoxElement) -> TwoBoxElement:
        self._check(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other: TwoBoxElement) -> TwoBoxElement:
        self._check(other)
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self) -> TwoBoxElement:
        return self._like(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TwoBoxElement):
            return mult(self, other)
        return self._like(self.coeffs * other)

    def __rmul__(self, scalar):
        return self._like(self.coeffs * scalar)

    def __truediv__(self, scalar):
        return self._like(self.coeffs / scalar)

    def star(self) -> TwoBoxElement:
        if self.model is Model.FUNCTION:
            return self._like(self.coeffs.conj())
        return self._like(self.coeffs[self.group.inv].conj())

    def distance(self, other: TwoBoxElement) -> float:
        """Max-abs coefficient difference."""
        self._check(other)
        return float(np.abs(self.coeffs - other.coeffs).max())

    def close_to(self, other: TwoBoxElement, tol: float = PROJECTION_TOL) -> bool:
        return self.distance(other) < tol

    def operator(self) -> np.ndarray:
        """Matrix of the element in its model's operator realisation."""
        if self.model is Model.FUNCTION:
            return np.diag(self.coeffs)
        return self.coeffs[_ldiv(self.group)]

    def is_zero(self, tol: float = PROJECTION_TOL) -> bool:
        return float(np.abs(self.coeffs).max()) < tol

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "group": self.group.name,
            "coeffs": [[float(z.real), float(z.imag)] for z in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict, group: Group) -> TwoBoxElement:
        coeffs = [complex(re, im) for re, im in data["coeffs"]]
        if len(coeffs) != group.order:
            raise ValueError("coefficient count does not match group order")
        return cls(Model(data["model"]), group, coeffs)


@lru_cache(maxsize=64)
def _ldiv(g: Group) -> np.ndarray:
    # entry (x, y) holds x y^-1, so L[x, y] = a_{x y^-1} realises left multiplication
    return np.ascontiguousarray(g.mult[:, g.inv])


def _convolve(g: Group, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``(x conv y)_g = sum_{hk = g} x_h y_k``."""
    w = np.outer(x, y).ravel()
    idx = g.mult.ravel()
    n = g.order
    return np.bincount(idx, w.real, n) + 1j * np.bincount(idx, w.imag, n)


def _pull_back(g: Group, mat: np.ndarray) -> np.ndarray:
    """Coefficients ``a_g = tr(lambda(g)^* M) / |G|`` of a left-regular matrix."""
    n = g.order
    return mat[g.mult, np.arange(n)[None, :]].sum(axis=1) / n


# constructors -------------------------------------------------------------

def zero(model: Model, g: Group) -> TwoBoxElement:
    return TwoBoxElement(model, g, np.zeros(g.order))


def identity(model: Model, g: Group) -> TwoBoxElement:
    """The unit ``id`` of the ordinary product."""
    c = np.zeros(g.order)
    if Model(model) is Model.FUNCTION:
        c[:] = 1
    else:
        c[g.identity_index] = 1
    return TwoBoxElement(model, g, c)


def e1(model: Model, g: Group) -> TwoBoxElement:
    """The Jones projection of the bottom, unit of the coproduct up to ``1/delta``."""
    c = np.zeros(g.order)
    if Model(model) is Model.FUNCTION:
        c[g.identity_index] = 1
    else:
        c[:] = 1 / g.order
    return TwoBoxElement(model, g, c)


def basis(model: Model, g: Group, x: int) -> TwoBoxElement:
    """``e_x`` (indicator of ``x``) or the group element ``x``."""
    c = np.zeros(g.order)
    c[x] = 1
    return TwoBoxElement(model, g, c)


# products -----------------------------------------------------------------

def mult(a: TwoBoxElement, b: TwoBoxElement) -> TwoBoxElement:
    a._check(b)
    if a.model is Model.FUNCTION:
        return a._like(a.coeffs * b.coeffs)
    return a._like(_convolve(a.group, a.coeffs, b.coeffs))


def fourier(a: TwoBoxElement) -> TwoBoxElement:
    """Model-crossing map: ``x -> x / delta`` into ``CG``, ``a -> delta a`` back."""
    if a.model is Model.FUNCTION:
        return TwoBoxElement(Model.GROUP_ALGEBRA, a.group, a.coeffs / a.delta)
    return TwoBoxElement(Model.FUNCTION, a.group, a.coeffs * a.delta)


def coproduct(a: TwoBoxElement, b: TwoBoxElement) -> TwoBoxElement:
    a._check(b)
    if a.model is Model.GROUP_ALGEBRA:
        return a._like(a.delta * a.coeffs * b.coeffs)
    return a._like(_convolve(a.group, a.coeffs, b.coeffs) / a.delta)


def trace(a: TwoBoxElement) -> complex:
    """Normalised so that ``tr(id) = 1`` and ``tr(e1) = delta^-2``."""
    if a.model is Model.FUNCTION:
        return complex(a.coeffs.mean())
    return complex(a.coeffs[a.group.identity_index])


def inner(a: TwoBoxElement, b: TwoBoxElement) -> complex:
    """``<a|b> = tr(b^* a)``."""
    return trace(mult(b.star(), a))


def contragredient(a: TwoBoxElement) -> TwoBoxElement:
    """Reindex ``g -> g^-1`` (no conjugation)."""
    return a._like(a.coeffs[a.group.inv])


def is_central(a: TwoBoxElement, tol: float = PROJECTION_TOL) -> bool:
    return commutator_residual(a) < tol


def commutator_residual(a: TwoBoxElement) -> float:
    """Largest ``|a x - x a|`` over basis elements ``x``."""
    if a.model is Model.FUNCTION:
        return 0.0
    g = a.group
    # (x^-1 a x)_y = a_{x y x^-1}; central iff a is a class function
    xy = g.mult
    idx = xy[xy, g.inv[:, None]]  # idx[x, y] = x y x^-1
    c = a.coeffs
    return float(np.abs(c[idx] - c[None, :]).max())


# spectral calculus --------------------------------------------------------

def hermitian_residual(a: TwoBoxElement) -> float:
    return a.distance(a.star())


def _spectrum(a: TwoBoxElement):
    if a.model is Model.FUNCTION:
        return a.coeffs.real, None
    mat = a.operator()
    mat = (mat + mat.conj().T) / 2
    return np.linalg.eigh(mat)


def is_positive(a: TwoBoxElement, tol: float = POSITIVITY_TOL) -> bool:
    scale = max(1.0, float(np.abs(a.coeffs).max()))
    if hermitian_residual(a) >= tol * scale:
        return False
    w, _ = _spectrum(a)
    return bool(w.min() > -tol * scale)


def _from_matrix(model: Model, g: Group, mat: np.ndarray, tol: float) -> TwoBoxElement:
    coeffs = _pull_back(g, mat)
    out = TwoBoxElement(model, g, coeffs)
    res = float(np.abs(out.operator() - mat).max())
    if res >= tol:
        raise IntegrityError(f"spectral projection not in the algebra (residual {res:.2e})")
    return out


def range_projection(a: TwoBoxElement, tol: float = POSITIVITY_TOL) -> TwoBoxElement:
    """Projection onto the range of a positive element."""
    if not is_positive(a, tol):
        raise ValueError("range projection needs a positive element")
    w, v = _spectrum(a)
    cut = tol * max(1.0, float(np.abs(w).max()))
    if a.model is Model.FUNCTION:
        return a._like((w > cut).astype(float))
    cols = v[:, w > cut]
    return _from_matrix(a.model, a.group, cols @ cols.conj().T, PROJECTION_TOL)


def precedes(a: TwoBoxElement, b: TwoBoxElement, tol: float = PROJECTION_TOL) -> bool:
    """``a <~ b``: the range of ``a`` lies in the range of ``b``."""
    ra, rb = range_projection(a), range_projection(b)
    return projection_leq(ra, rb, tol)


def projection_leq(p: TwoBoxElement, q: TwoBoxElement, tol: float = PROJECTION_TOL) -> bool:
    return mult(q, p).close_to(p, tol)


def is_projection(a: TwoBoxElement, tol: float = PROJECTION_TOL) -> bool:
    return mult(a, a).close_to(a, tol) and a.close_to(a.star(), tol)


def _clusters(w: np.ndarray, tol: float = CLUSTER_TOL) -> list[np.ndarray]:
    """Group sorted eigenvalue indices whose neighbours differ by less than ``tol``."""
    order = np.argsort(w)
    groups = [[order[0]]]
    for prev, cur in zip(order[:-1], order[1:]):
        if w[cur] - w[prev] < tol:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    return [np.array(gr) for gr in groups]


# biprojections ------------------------------------------------------------

@dataclass(frozen=True)
class Biprojection:
    element: TwoBoxElement
    subgroup: SubgroupHandle


@dataclass(frozen=True)
class BiprojectionCheck:
    residuals: dict
    tol: float

    @property
    def ok(self) -> bool:
        return all(r < self.tol for r in self.residuals.values())

    def __bool__(self):
        return self.ok

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def fourier_projection_residual(a: TwoBoxElement) -> float:
    """Distance of ``fourier(a)`` from a positive multiple of a projection."""
    f = fourier(a)
    ff = mult(f, f)
    denom = float(np.vdot(f.coeffs, f.coeffs).real)
    if denom == 0:
        return float("inf")
    lam = float(np.vdot(f.coeffs, ff.coeffs).real) / denom
    if lam <= 0:
        return float("inf")
    return max(ff.distance(lam * f), hermitian_residual(f))


def is_biprojection(a: TwoBoxElement, tol: float = PROJECTION_TOL) -> BiprojectionCheck:
    """Evaluate ``e1 <= b = b^2 = b^* = bar b ~ b * b`` and ``b * b = delta tr(b) b``."""
    res = {
        "nonzero": 0.0 if not a.is_zero(tol) else float("inf"),
        "idempotent": mult(a, a).distance(a),
        "selfadjoint": hermitian_residual(a),
        "contragredient": contragredient(a).distance(a),
        "above_e1": mult(a, e1(a.model, a.group)).distance(e1(a.model, a.group)),
        "fourier_projection": fourier_projection_residual(a),
    }
    bb = coproduct(a, a)
    res["coproduct_scalar"] = bb.distance(a.delta * trace(a) * a)
    if res["idempotent"] < tol and res["selfadjoint"] < tol and is_positive(bb):
        res["coproduct_support"] = range_projection(bb).distance(a)
    else:
        res["coproduct_support"] = float("inf")
    return BiprojectionCheck(res, tol)


def biprojection_of_subgroup(model: Model, g: Group, k: SubgroupHandle) -> Biprojection:
    mask = k.mask(g.order).astype(float)
    if Model(model) is Model.GROUP_ALGEBRA:
        mask /= k.order
    return Biprojection(TwoBoxElement(model, g, mask), k)


def subgroup_of_biprojection(b: TwoBoxElement, tol: float = PROJECTION_TOL) -> SubgroupHandle:
    """Read the subgroup off the coefficient support; coefficients must be constant."""
    g = b.group
    support = np.abs(b.coeffs) > tol
    h = SubgroupHandle.from_mask(support)
    expected = 1.0 if b.model is Model.FUNCTION else 1.0 / max(h.order, 1)
    if h.order == 0 or np.abs(b.coeffs[support] - expected).max() >= tol:
        raise IntegrityError("coefficients are not those of a subgroup biprojection")
    if not g.is_subgroup(h):
        raise IntegrityError("biprojection support is not a subgroup")
    return h


def generate_biprojection(a: TwoBoxElement | Sequence[TwoBoxElement],
                          tol: float = POSITIVITY_TOL) -> Biprojection:
    """Smallest biprojection dominating ``a`` (or the sum of range projections of a set).

    Iterates ``p_{n+1} = R(q + p_n * q)`` with ``q = R(a)``, which has the same
    range as the partial sums of coproduct powers of ``a``.
    """
    if not isinstance(a, TwoBoxElement):
        items = list(a)
        if not items:
            raise ValueError("empty generating set")
        total = range_projection(items[0], tol)
        for s in items[1:]:
            total = total + range_projection(s, tol)
        a = total
    if a.is_zero():
        raise ValueError("cannot generate from zero")
    q = range_projection(a, tol)
    p = q
    for _ in range(a.group.order + 1):
        step = coproduct(p, q)
        step = step / max(1.0, float(np.abs(step.coeffs).max()))
        nxt = range_projection(q + step, tol)
        if nxt.close_to(p):
            break
        p = nxt
    else:
        raise IntegrityError("generated biprojection did not stabilise")
    check = is_biprojection(p)
    if not check:
        raise IntegrityError(f"generated projection is not a biprojection: {check.residuals}")
    return Biprojection(p, subgroup_of_biprojection(p))


# group algebra specifics --------------------------------------------------

def minimal_central_projections(ct) -> list[TwoBoxElement]:
    """``p_i = (d_i/|G|) sum_g chi_i(g^-1) g`` in ``CG``, one per irrep."""
    g = ct.group
    out = []
    for i, d in enumerate(ct.degrees):
        coeffs = d / g.order * ct.values[i][g.inv]
        out.append(TwoBoxElement(Model.GROUP_ALGEBRA, g, coeffs))
    total = zero(Model.GROUP_ALGEBRA, g)
    for i, p in enumerate(out):
        total = total + p
        for j, q in enumerate(out):
            target = p if i == j else zero(Model.GROUP_ALGEBRA, g)
            if mult(p, q).distance(target) >= PROJECTION_TOL:
                raise IntegrityError("central projections are not orthogonal idempotents")
    if total.distance(identity(Model.GROUP_ALGEBRA, g)) >= PROJECTION_TOL:
        raise IntegrityError("central projections do not sum to the identity")
    return out


def random_minimal_projection(q: TwoBoxElement, block_degree: int,
                              rng: np.random.Generator) -> Optional[TwoBoxElement]:
    """Generic minimal projection of ``CG`` below the projection ``q``.

    ``q`` must lie in a single block of degree ``block_degree``; minimal
    projections there have rank ``block_degree`` in the regular representation.
    Returns None if the sampled spectrum is degenerate.
    """
    g = q.group
    w, v = np.linalg.eigh((q.operator() + q.operator().conj().T) / 2)
    frame = v[:, w > 0.5]
    if frame.shape[1] == 0:
        raise ValueError("cannot pick a minimal projection under zero")
    x = rng.standard_normal(g.order) + 1j * rng.standard_normal(g.order)
    herm = TwoBoxElement(Model.GROUP_ALGEBRA, g, x)
    herm = herm + herm.star()
    small = frame.conj().T @ herm.operator() @ frame
    sw, sv = np.linalg.eigh((small + small.conj().T) / 2)
    first = _clusters(sw)[0]
    if len(first) != block_degree:
        return None
    cols = frame @ sv[:, first]
    u = _from_matrix(Model.GROUP_ALGEBRA, g, cols @ cols.conj().T, PROJECTION_TOL)
    if not (is_projection(u) and projection_leq(u, q)):
        raise IntegrityError("sampled projection is not a subprojection")
    return u


def block_degree(p: TwoBoxElement) -> int:
    """Degree ``d`` of the irrep of a minimal central projection (``tr p = d^2/|G|``)."""
    return int(round(np.sqrt(trace(p).real * p.group.order)))


def minimal_projection_below(p: TwoBoxElement, *, seed: int = 0,
                             retries: int = DEFAULT_RETRIES) -> TwoBoxElement:
    """Minimal projection ``u <= p`` generating the same biprojection as ``p``."""
    if p.model is not Model.GROUP_ALGEBRA:
        raise ValueError("minimal central projections live in the group algebra")
    d = block_degree(p)
    target = generate_biprojection(p).element
    for attempt in range(retries):
        rng = np.random.default_rng([seed, attempt])
        u = random_minimal_projection(p, d, rng)
        if u is not None and generate_biprojection(u).element.close_to(target):
            return u
    raise IntegrityError(f"no generating minimal projection found (seed {seed})")


# randomised elements ------------------------------------------------------

def random_element(model: Model, g: Group, rng: np.random.Generator) -> TwoBoxElement:
    return TwoBoxElement(model, g, rng.standard_normal(g.order) + 1j * rng.standard_normal(g.order))


def random_positive(model: Model, g: Group, rng: np.random.Generator,
                    under: Optional[TwoBoxElement] = None) -> TwoBoxElement:
    """Random positive element, compressed by the projection ``under`` if given."""
    model = Model(model)
    if model is Model.FUNCTION:
        a = TwoBoxElement(model, g, rng.random(g.order) + 0.1)
    else:
        x = random_element(model, g, rng)
        a = mult(x.star(), x)
    if under is not None:
        a = mult(mult(under, a), under)
    return a


def spectral_projection(h: TwoBoxElement, select: Callable[[int], np.ndarray] | Iterable[int]) -> TwoBoxElement:
    """Projection onto a union of eigenvalue clusters of a Hermitian element."""
    if h.model is Model.FUNCTION:
        raise ValueError("use indicators in the function model")
    w, v = np.linalg.eigh((h.operator() + h.operator().conj().T) / 2)
    clusters = _clusters(w)
    chosen = select(len(clusters)) if callable(select) else select
    cols = np.concatenate([clusters[i] for i in chosen]) if len(chosen) else np.array([], dtype=int)
    frame = v[:, cols]
    return _from_matrix(h.model, h.group, frame @ frame.conj().T, PROJECTION_TOL)


def random_projection(model: Model, g: Group, rng: np.random.Generator,
                      under: Optional[TwoBoxElement] = None) -> TwoBoxElement:
    """Random nonzero projection (below ``under`` when given)."""
    model = Model(model)
    if model is Model.FUNCTION:
        allowed = np.ones(g.order, bool) if under is None else under.coeffs.real > 0.5
        pick = allowed & (rng.random(g.order) < 0.5)
        if not pick.any():
            pick[rng.choice(np.flatnonzero(allowed))] = True
        return TwoBoxElement(model, g, pick.astype(float))
    x = random_element(model, g, rng)
    h = x + x.star()
    if under is not None:
        h = mult(mult(under, h), under)
        w, v = np.linalg.eigh(under.operator())
        frame = v[:, w > 0.5]
        small = frame.conj().T @ h.operator() @ frame
        sw, sv = np.linalg.eigh((small + small.conj().T) / 2)
        clusters = _clusters(sw)
        chosen = _random_subset(len(clusters), rng)
        cols = frame @ sv[:, np.concatenate([clusters[i] for i in chosen])]
        return _from_matrix(model, g, cols @ cols.conj().T, PROJECTION_TOL)

    return spectral_projection(h, lambda k: _random_subset(k, rng))


def _random_subset(k: int, rng: np.random.Generator) -> list[int]:
    chosen = [i for i in range(k) if rng.random() < 0.5]
    return chosen or [int(rng.integers(k))]


# compressed subalgebras ---------------------------------------------------

@dataclass(frozen=True)
class CompressedAlgebra:
    """``b . P . b`` (mode ``mult``) or ``b * P * b`` (mode ``conv``)."""

    biprojection: TwoBoxElement
    mode: str
    basis: tuple[TwoBoxElement, ...]
    residuals: dict

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, x: TwoBoxElement, tol: float = PROJECTION_TOL) -> bool:
        return self._distance(x) < tol

    def _distance(self, x: TwoBoxElement) -> float:
        if not self.basis:
            return float(np.abs(x.coeffs).max())
        mat = np.array([b.coeffs for b in self.basis]).T
        coef, *_ = np.linalg.lstsq(mat, x.coeffs, rcond=None)
        return float(np.abs(mat @ coef - x.coeffs).max())


def compress(b: TwoBoxElement, mode: str = "mult", *, seed: int = 0,
             tol: float = PROJECTION_TOL) -> CompressedAlgebra:
    """Span of ``b x b`` or ``b * x * b`` with closure checks under both products."""
    if mode == "mult":
        def squeeze(x):
            return mult(mult(b, x), b)
    elif mode == "conv":
        def squeeze(x):
            return coproduct(coproduct(b, x), b)
    else:
        raise ValueError(f"unknown compression mode {mode!r}")
    g = b.group
    images = np.array([squeeze(basis(b.model, g, x)).coeffs for x in range(g.order)]).T
    u, s, _ = np.linalg.svd(images)
    rank = int((s > 1e-9 * max(1.0, s.max())).sum())
    span = tuple(TwoBoxElement(b.model, g, u[:, i]) for i in range(rank))
    algebra = CompressedAlgebra(b, mode, span, {})

    rng = np.random.default_rng(seed)
    a1, a2 = random_element(b.model, g, rng), random_element(b.model, g, rng)
    s1, s2 = squeeze(a1), squeeze(a2)
    res = {
        "closed_mult": algebra._distance(mult(s1, s2)),
        "closed_conv": algebra._distance(coproduct(s1, s2)),
    }
    bab = lambda x: mult(mult(b, x), b)  # noqa: E731
    bcb = lambda x: coproduct(coproduct(b, x), b)  # noqa: E731
    lhs = coproduct(bab(a1), bab(a2))
    res["exchange_conv_1"] = lhs.distance(bab(coproduct(a1, bab(a2))))
    res["exchange_conv_2"] = lhs.distance(bab(coproduct(bab(a1), a2)))
    lhs = mult(bcb(a1), bcb(a2))
    res["exchange_mult_1"] = lhs.distance(bcb(mult(a1, bcb(a2))))
    res["exchange_mult_2"] = lhs.distance(bcb(mult(bcb(a1), a2)))
    scale = max(1.0, float(np.abs(images).max()) ** 2) * 1e2
    worst = max(res.values())
    if worst >= tol * scale:
        raise IntegrityError(f"compressed algebra not closed: {res}")
    return CompressedAlgebra(b, mode, span, res)

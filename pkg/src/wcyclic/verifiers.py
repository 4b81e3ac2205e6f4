"""Theorem-level suites over one group, emitting structured reports.

Every randomised check draws from ``np.random.default_rng([seed, tag, ...])``
so a suite is a pure function of (group, seed, sample count).
"""

from __future__ import annotations

import itertools
import time
import zlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import twobox as tb
from .errors import IntegrityError
from .lattice import (DEFAULT_MAX_SUBGROUPS, boolean_chain_length, enumerate_subgroups,
                      is_h_cyclic)
from .perm import Group, SubgroupHandle, core, generated_subgroup, subgroup_as_group
from .reps import (EIGEN_TOL, ROUND_TOL, StabilizerOracle, character_table, fusion_coeffs,
                   min_faithful_components, tensor_reachability)
from .twobox import Model

DEFAULT_SAMPLES = 32
SUITES = ("ore", "dual_ore", "wcyclic", "bounds", "fusion", "generation",
          "lemmas", "chartable", "biprojections")


@dataclass
class VerificationReport:
    suite: str
    group: str
    interval: Optional[dict]
    verdict: str  # pass | fail | skip
    witness: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    residual_max: float = 0.0
    seed: int = 0
    ms: Optional[float] = None
    integrity_error: bool = False

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "group": self.group,
            "interval": self.interval,
            "verdict": self.verdict,
            "witness": self.witness,
            "constants": self.constants,
            "residual_max": self.residual_max,
            "seed": self.seed,
            "ms": self.ms,
        }


def _tag(name: str) -> int:
    return zlib.crc32(name.encode())


class GroupContext:
    """Lazily built lattice, character table and projections for one group."""

    def __init__(self, group: Group, *, seed: int = 0, samples: int = DEFAULT_SAMPLES,
                 eigen_tol: float = EIGEN_TOL, round_tol: float = ROUND_TOL,
                 projection_tol: float = tb.PROJECTION_TOL, max_subgroups: int = DEFAULT_MAX_SUBGROUPS):
        self.group = group
        self.name = group.name or repr(group)
        self.seed = seed
        self.samples = samples
        self.eigen_tol = eigen_tol
        self.round_tol = round_tol
        self.projection_tol = projection_tol
        self.max_subgroups = max_subgroups
        self._local: dict[int, tuple] = {}

    def character_table(self, group: Group):
        return character_table(group, eigen_tol=self.eigen_tol, round_tol=self.round_tol)

    def rng(self, *tags) -> np.random.Generator:
        return np.random.default_rng([self.seed] + [t if isinstance(t, int) else _tag(t) for t in tags])

    @cached_property
    def lattice(self):
        return enumerate_subgroups(self.group, max_subgroups=self.max_subgroups)

    @cached_property
    def ct(self):
        return self.character_table(self.group)

    @cached_property
    def central(self):
        return tb.minimal_central_projections(self.ct)

    @cached_property
    def fusion(self):
        return fusion_coeffs(self.ct)

    def subgroup_label(self, node: int) -> str:
        gens = self.lattice.generators[node]
        return "<" + (",".join(self.group.label(x) for x in gens) or "()") + ">"

    def interval_dict(self, low: int, high: int) -> dict:
        return {"low": self.subgroup_label(low), "high": self.subgroup_label(high)}

    def local(self, node: int):
        """Subgroup ``node`` as a group: (group, index_map, ambient->local, char table)."""
        if node not in self._local:
            sub, index_map = subgroup_as_group(self.group, self.lattice.nodes[node])
            pos = np.full(self.group.order, -1, dtype=np.int64)
            pos[index_map] = np.arange(len(index_map))
            sub.name = self.subgroup_label(node)
            self._local[node] = (sub, index_map, pos, self.character_table(sub))
        return self._local[node]

    def biprojection(self, model: Model, node: int) -> tb.TwoBoxElement:
        return tb.biprojection_of_subgroup(model, self.group, self.lattice.nodes[node]).element


def _guard(ctx: GroupContext, suite: str, interval, body: Callable[[], VerificationReport]) -> VerificationReport:
    """Run ``body``; integrity errors become failing reports."""
    start = time.perf_counter()
    try:
        rep = body()
    except IntegrityError as exc:
        rep = VerificationReport(suite, ctx.name, interval, "fail",
                                 witness={"integrity_error": str(exc)}, integrity_error=True)
    rep.seed = ctx.seed
    rep.ms = round((time.perf_counter() - start) * 1e3, 3)
    return rep


def _interval_pairs(lat):
    for low in range(len(lat)):
        for high in np.flatnonzero(lat.leq[low]).tolist():
            yield low, high


def _function_generation(ctx: GroupContext, low: int, x: int) -> SubgroupHandle:
    b = ctx.biprojection(Model.FUNCTION, low)
    return tb.generate_biprojection([b, tb.basis(Model.FUNCTION, ctx.group, x)]).subgroup


# Ore ----------------------------------------------------------------------

def verify_ore(ctx: GroupContext) -> list[VerificationReport]:
    lat = ctx.lattice
    out = []
    for low, high in _interval_pairs(lat):
        out.append(_guard(ctx, "ore", ctx.interval_dict(low, high),
                          lambda low=low, high=high: _ore_one(ctx, low, high)))
    return out


def _ore_one(ctx: GroupContext, low: int, high: int) -> VerificationReport:
    lat = ctx.lattice
    prof = lat.profile(low, high)
    witness = is_h_cyclic(lat.interval(low, high))
    info = {
        "distributive": prof.is_distributive,
        "top_boolean": prof.is_top_boolean,
        "h_cyclic": witness is not None,
        "element": None if witness is None else ctx.group.label(witness),
    }
    iv = ctx.interval_dict(low, high)
    if not (prof.is_distributive or prof.is_top_boolean):
        return VerificationReport("ore", ctx.name, iv, "skip", witness=info)
    ok = witness is not None
    if prof.is_distributive and not prof.is_top_boolean:
        # distributive intervals must also be reachable through the top Boolean route
        info["reduction_failed"] = True
        ok = False
    if witness is not None:
        high_h = lat.nodes[high]
        info["function_model_generates_top"] = _function_generation(ctx, low, witness) == high_h
        # a witness for the top interval [T, K] is also one for [H, K]
        t_low = prof.top_interval[0]
        t_witness = is_h_cyclic(lat.interval(t_low, high))
        lifted = t_witness is not None and _function_generation(ctx, low, t_witness) == high_h
        info["top_interval_witness_lifts"] = lifted
        ok = ok and info["function_model_generates_top"] and lifted
    return VerificationReport("ore", ctx.name, iv, "pass" if ok else "fail", witness=info)


# dual Ore -----------------------------------------------------------------

def _local_subgroup(ctx: GroupContext, low: int, high: int):
    sub, index_map, pos, ct = ctx.local(high)
    mask = np.zeros(sub.order, dtype=bool)
    mask[pos[ctx.group.members(ctx.lattice.nodes[low])]] = True
    return sub, ct, SubgroupHandle.from_mask(mask)


def verify_dual_ore(ctx: GroupContext) -> list[VerificationReport]:
    out = []
    for low, high in _interval_pairs(ctx.lattice):
        out.append(_guard(ctx, "dual_ore", ctx.interval_dict(low, high),
                          lambda low=low, high=high: _dual_ore_one(ctx, low, high)))
    return out


def _dual_ore_one(ctx: GroupContext, low: int, high: int) -> VerificationReport:
    prof = ctx.lattice.profile(low, high)
    iv = ctx.interval_dict(low, high)
    info = {"distributive": prof.is_distributive, "bottom_boolean": prof.is_bottom_boolean}
    if not (prof.is_distributive or prof.is_bottom_boolean):
        return VerificationReport("dual_ore", ctx.name, iv, "skip", witness=info)
    sub, ct, h = _local_subgroup(ctx, low, high)
    oracle = StabilizerOracle(ct, h)
    found = None
    for i in range(len(ct)):
        if oracle.stabilizer(i) == h:
            found = i
            break
    info["irrep"] = found
    info["degree"] = None if found is None else ct.degrees[found]
    ok = found is not None
    if prof.is_distributive and not prof.is_bottom_boolean:
        info["reduction_failed"] = True
        ok = False
    return VerificationReport("dual_ore", ctx.name, iv, "pass" if ok else "fail", witness=info)


# w-cyclic equivalences ----------------------------------------------------

def verify_wcyclic(ctx: GroupContext, nodes: Optional[list[int]] = None) -> list[VerificationReport]:
    lat = ctx.lattice
    nodes = range(len(lat)) if nodes is None else nodes
    return [_guard(ctx, "wcyclic", ctx.interval_dict(h, lat.top_index),
                   lambda h=h: _wcyclic_one(ctx, h)) for h in nodes]


def _wcyclic_one(ctx: GroupContext, node: int) -> VerificationReport:
    g, lat = ctx.group, ctx.lattice
    h = lat.nodes[node]
    top = g.whole
    iv = ctx.interval_dict(node, lat.top_index)
    mismatches = []

    # function model: <b_H, e_x> = id iff <H, x> = G; constant on double cosets
    gens = lat.generators[node]
    done: dict[int, bool] = {}
    reps = []
    for x in range(g.order):
        cyclic = generated_subgroup(g, gens + [x]) == top
        block = _double_coset_key(g, h, x)
        if block not in done:
            done[block] = _function_generation(ctx, node, x) == top
            reps.append(x)
        if done[block] != cyclic:
            mismatches.append(g.label(x))
    side_a = any(done.values())

    # group algebra: a minimal u with <u> = b_H iff [H, G] is linearly primitive
    oracle = StabilizerOracle(ctx.ct, h, gens)
    rng = ctx.rng("wcyclic", node)
    b_h = ctx.biprojection(Model.GROUP_ALGEBRA, node)
    generated_h = False
    stab_mismatch = []
    for i, p in enumerate(ctx.central):
        q = tb.mult(p, b_h)
        if q.is_zero():
            continue
        u = _sample_minimal(q, ctx.ct.degrees[i], rng)
        got = tb.generate_biprojection(u).subgroup
        expected = oracle.stabilizer(i)
        if got != expected:
            stab_mismatch.append(i)
        if got == h:
            generated_h = True
    linprim = any(oracle.stabilizer(i) == h for i in range(len(ctx.ct)))
    info = {
        "h_cyclic": side_a,
        "double_coset_reps": len(reps),
        "function_mismatches": mismatches,
        "linearly_primitive": linprim,
        "minimal_generates_b_h": generated_h,
        "stabilizer_mismatches": stab_mismatch,
    }
    ok = not mismatches and not stab_mismatch and generated_h == linprim
    faithful = min_faithful_components(ctx.ct)[0] <= 1
    if h.order == 1:
        # trivial H: G linearly primitive iff some irrep is faithful
        info["faithful_irrep"] = faithful
        ok = ok and faithful == linprim
    if linprim and core(g, h).order == 1:
        # core-free H: a primitive interval forces a faithful irrep
        info["core_free_faithful"] = faithful
        ok = ok and faithful
    return VerificationReport("wcyclic", ctx.name, iv, "pass" if ok else "fail", witness=info)


def _double_coset_key(g: Group, h: SubgroupHandle, x: int) -> int:
    hm = g.members(h)
    return int(g.mult[g.mult[hm, x][:, None], hm].min())


def _sample_minimal(q: tb.TwoBoxElement, degree: int, rng: np.random.Generator) -> tb.TwoBoxElement:
    for _ in range(tb.DEFAULT_RETRIES):
        u = tb.random_minimal_projection(q, degree, rng)
        if u is not None:
            return u
    raise IntegrityError("minimal projection sampling kept hitting degenerate spectra")


# bounds -------------------------------------------------------------------

def relative_core(g: Group, h: SubgroupHandle, k: SubgroupHandle) -> SubgroupHandle:
    """Largest subgroup of ``h`` normal in ``k``."""
    hm = g.members(h)
    bits = h.member_bits
    for x in g.members(k):
        mask = np.zeros(g.order, dtype=bool)
        mask[g.mult[g.mult[x, hm], g.inv[x]]] = True
        bits &= SubgroupHandle.from_mask(mask).member_bits
    return SubgroupHandle(bits, bits.bit_count())


def core_free_chain_length(ctx: GroupContext) -> tuple[int, list[int]]:
    """Bottom Boolean chain length when the first step may start at any core-free subgroup."""
    lat = ctx.lattice
    if len(lat) == 1:
        return 0, [lat.top_index]
    first = []
    for h1 in range(1, len(lat)):
        for h0 in np.flatnonzero(lat.leq[:, h1]).tolist():
            if h0 == h1:
                continue
            if relative_core(ctx.group, lat.nodes[h0], lat.nodes[h1]).order == 1 \
                    and lat.profile(h0, h1).is_bottom_boolean:
                first.append(h1)
                break
    length, chain = boolean_chain_length(lat, "bottom", sources=first)
    return length + 1, [lat.bottom_index] + chain


def verify_bounds(ctx: GroupContext) -> list[VerificationReport]:
    return [_guard(ctx, "bounds", None, lambda: _bounds(ctx))]


def _bounds(ctx: GroupContext) -> VerificationReport:
    from .lattice import minimal_generating_size

    lat = ctx.lattice
    gen = minimal_generating_size(ctx.group)
    faithful, subset = min_faithful_components(ctx.ct)
    l_top, top_chain = boolean_chain_length(lat, "top")
    l_bot, bot_chain = boolean_chain_length(lat, "bottom")
    l_free, free_chain = core_free_chain_length(ctx)
    step_top = [_top_step(ctx, a, b) for a, b in zip(top_chain, top_chain[1:])]
    step_bot = [_bottom_step(ctx, a, b) for a, b in zip(bot_chain, bot_chain[1:])]
    info = {
        "top_chain": [ctx.subgroup_label(x) for x in top_chain],
        "bottom_chain": [ctx.subgroup_label(x) for x in bot_chain],
        "core_free_chain": [ctx.subgroup_label(x) for x in free_chain],
        "faithful_irreps": list(subset),
        "top_steps_ok": step_top,
        "bottom_steps_ok": step_bot,
    }
    constants = {"min_generators": gen, "top_chain_length": l_top,
                 "min_faithful_components": faithful, "bottom_chain_length": l_bot,
                 "core_free_chain_length": l_free}
    # the function model elements picked along the top chain generate id together
    elements = [e for e in (_top_step_element(ctx, a, b) for a, b in zip(top_chain, top_chain[1:]))]
    if elements:
        together = tb.generate_biprojection([tb.basis(Model.FUNCTION, ctx.group, x) for x in elements]).subgroup
        info["top_chain_elements_generate"] = together == ctx.group.whole
    else:
        info["top_chain_elements_generate"] = ctx.group.order == 1
    ok = (gen <= l_top and faithful <= l_bot and faithful <= l_free <= l_bot
          and all(step_top) and all(step_bot) and info["top_chain_elements_generate"])
    return VerificationReport("bounds", ctx.name, None, "pass" if ok else "fail",
                              witness=info, constants=constants)


def _top_step_element(ctx: GroupContext, low: int, high: int) -> int:
    x = is_h_cyclic(ctx.lattice.interval(low, high))
    if x is None:
        raise IntegrityError("top Boolean chain step is not H-cyclic")
    return x


def _top_step(ctx: GroupContext, low: int, high: int) -> bool:
    """``<b_low, e_x> = b_high`` for the step's H-cyclic witness ``x``."""
    x = _top_step_element(ctx, low, high)
    return _function_generation(ctx, low, x) == ctx.lattice.nodes[high]


def _bottom_step(ctx: GroupContext, low: int, high: int) -> bool:
    """In ``C[high]``: a minimal ``u`` with ``<u> = b_low``, then ``<b_high, u> = b_low`` in ``CG``."""
    sub, ct, h = _local_subgroup(ctx, low, high)
    oracle = StabilizerOracle(ct, h)
    irreps = [i for i in range(len(ct)) if oracle.stabilizer(i) == h]
    if not irreps:
        return False
    i = irreps[0]
    central = tb.minimal_central_projections(ct)[i]
    b_local = tb.biprojection_of_subgroup(Model.GROUP_ALGEBRA, sub, h).element
    u = _sample_minimal(tb.mult(central, b_local), ct.degrees[i], ctx.rng("bottom-step", low, high))
    if tb.generate_biprojection(u).subgroup != h:
        return False
    _, index_map, _, _ = ctx.local(high)
    coeffs = np.zeros(ctx.group.order, dtype=complex)
    coeffs[index_map] = u.coeffs
    u_amb = tb.TwoBoxElement(Model.GROUP_ALGEBRA, ctx.group, coeffs)
    b_high = ctx.biprojection(Model.GROUP_ALGEBRA, high)
    return tb.generate_biprojection([b_high, u_amb]).subgroup == ctx.lattice.nodes[low]


# fusion -------------------------------------------------------------------

def verify_fusion(ctx: GroupContext) -> list[VerificationReport]:
    return [_guard(ctx, "fusion", None, lambda: _fusion(ctx))]


def _fusion(ctx: GroupContext) -> VerificationReport:
    g = ctx.group
    ps = ctx.central
    ft = ctx.fusion
    delta = np.sqrt(g.order)
    d = np.array(ft.degrees)
    k = len(ps)
    support_res = central_res = formula_res = 0.0
    ratios = []
    bad = []
    for i, j in itertools.product(range(k), repeat=2):
        c = tb.coproduct(ps[i], ps[j])
        central_res = max(central_res, tb.commutator_residual(c))
        expected = tb.zero(Model.GROUP_ALGEBRA, g)
        derived = tb.zero(Model.GROUP_ALGEBRA, g)
        for m in np.flatnonzero(ft.n[i, j]).tolist():
            expected = expected + ps[m]
            derived = derived + (d[i] * d[j] * ft.n[i, j, m] / (delta * d[m])) * ps[m]
            measured = (tb.trace(tb.mult(c, ps[m])) / tb.trace(ps[m])).real
            ratios.append(measured / (delta * ft.n[i, j, m]))
        r = tb.range_projection(c).distance(expected)
        support_res = max(support_res, r)
        formula_res = max(formula_res, c.distance(derived))
        if r >= ctx.projection_tol:
            bad.append([i, j])
    dim_ok = bool((np.einsum("ijk,k->ij", ft.n, d) == np.outer(d, d)).all())
    pairing, pairing_res = _pairing_constant(ctx)
    constants = {
        "printed_over_measured_min": float(1 / max(ratios)),
        "printed_over_measured_max": float(1 / min(ratios)),
        "pairing_constant": pairing,
        "delta": float(delta),
    }
    if k >= 2:
        constants["p1_star_p1_on_p0"] = float((tb.trace(tb.mult(tb.coproduct(ps[1], ps[1]), ps[0]))
                                               / tb.trace(ps[0])).real)
    residuals = max(support_res, central_res, formula_res, pairing_res)
    tol = ctx.projection_tol
    ok = not bad and central_res < tol and dim_ok and formula_res < tol and pairing_res < tol
    info = {"support_failures": bad, "dimension_identity": dim_ok,
            "central_residual": central_res, "derived_formula_residual": formula_res}
    return VerificationReport("fusion", ctx.name, None, "pass" if ok else "fail", witness=info,
                              constants=constants, residual_max=residuals)


def _pairing_constant(ctx: GroupContext) -> tuple[float, float]:
    """Single constant ``c`` with ``<a*b|x> = c sum_g conj(x_g) a_g b_g`` over random samples."""
    rng = ctx.rng("pairing")
    g = ctx.group
    consts = []
    for _ in range(4):
        a, b, x = (tb.random_element(Model.GROUP_ALGEBRA, g, rng) for _ in range(3))
        lhs = tb.inner(tb.coproduct(a, b), x)
        rhs = np.sum(x.coeffs.conj() * a.coeffs * b.coeffs)
        consts.append(lhs / rhs)
    consts = np.array(consts)
    return float(consts[0].real), float(np.abs(consts - consts[0]).max())


# generation oracle --------------------------------------------------------

def verify_generation(ctx: GroupContext) -> list[VerificationReport]:
    return [_guard(ctx, "generation", None, lambda: _generation_function(ctx)),
            _guard(ctx, "generation", None, lambda: _generation_algebra(ctx))]


def _generation_function(ctx: GroupContext) -> VerificationReport:
    g = ctx.group
    failures = []
    for x in range(g.order):
        got = tb.generate_biprojection(tb.basis(Model.FUNCTION, g, x)).subgroup
        if got != generated_subgroup(g, [x]):
            failures.append([g.label(x)])
    rng = ctx.rng("generation", "function")
    for _ in range(ctx.samples):
        size = int(rng.integers(1, min(4, g.order) + 1))
        s = sorted(set(rng.choice(g.order, size=size).tolist()))
        got = tb.generate_biprojection([tb.basis(Model.FUNCTION, g, x) for x in s]).subgroup
        if got != generated_subgroup(g, s):
            failures.append([g.label(x) for x in s])
    return VerificationReport("generation", ctx.name, None, "fail" if failures else "pass",
                              witness={"model": "function", "failures": failures,
                                       "cases": g.order + ctx.samples})


def random_stabilizer_projection(ctx: GroupContext, rng: np.random.Generator):
    """Random projection ``sum_i u_i`` with ``u_i`` generic under ``b_{H_i} p_i``.

    Returns the projection and the expected subgroup ``meet_i G_(V_i^{H_i})``.
    """
    g, lat = ctx.group, ctx.lattice
    k = len(ctx.central)
    chosen = [i for i in range(k) if rng.random() < 0.5] or [int(rng.integers(k))]
    total = tb.zero(Model.GROUP_ALGEBRA, g)
    expected = g.whole
    for i in chosen:
        for _ in range(4 * len(lat)):
            node = int(rng.integers(len(lat)))
            q = tb.mult(ctx.central[i], ctx.biprojection(Model.GROUP_ALGEBRA, node))
            if not q.is_zero():
                break
        else:
            node = 0
            q = ctx.central[i]
        u = _sample_minimal(q, ctx.ct.degrees[i], rng)
        total = total + u
        stab = StabilizerOracle(ctx.ct, lat.nodes[node], lat.generators[node]).stabilizer(i)
        expected = expected.meet(stab)
    return total, expected


def direct_stabilizer(p: tb.TwoBoxElement) -> SubgroupHandle:
    """``{x : x p = p}`` from the left translates of the coefficients."""
    g = p.group
    # (x p)_y = p_{x^-1 y}
    shifted = p.coeffs[g.mult[g.inv]]
    mask = np.abs(shifted - p.coeffs[None, :]).max(axis=1) < tb.PROJECTION_TOL
    return SubgroupHandle.from_mask(mask)


def _generation_algebra(ctx: GroupContext) -> VerificationReport:
    rng = ctx.rng("generation", "algebra")
    failures = []
    for n in range(ctx.samples):
        p, expected = random_stabilizer_projection(ctx, rng)
        got = tb.generate_biprojection(p).subgroup
        direct = direct_stabilizer(p)
        if not (got == expected == direct):
            failures.append({"sample": n, "generated": got.order, "expected": expected.order,
                             "direct": direct.order})
    return VerificationReport("generation", ctx.name, None, "fail" if failures else "pass",
                              witness={"model": "group_algebra", "failures": failures,
                                       "cases": ctx.samples})


# lemma suite --------------------------------------------------------------

def verify_lemmas(ctx: GroupContext) -> list[VerificationReport]:
    checks = [
        ("support_orthogonality", _lemma_support_orthogonality),
        ("coproduct_positive", _lemma_coproduct_positive),
        ("coproduct_monotone", _lemma_coproduct_monotone),
        ("generation_monotone", _lemma_generation_monotone),
        ("generation_equivalence", _lemma_generation_equivalence),
        ("compressed_generation", _lemma_compressed_generation),
        ("central_coproduct", _lemma_central_coproduct),
    ]
    out = []
    for name, fn in checks:
        out.append(_guard(ctx, "lemmas", None, lambda name=name, fn=fn: _lemma_report(ctx, name, fn)))
    return out


def _lemma_report(ctx, name, fn) -> VerificationReport:
    failures = []
    for n in range(ctx.samples):
        rng = ctx.rng("lemmas", name, n)
        model = Model.FUNCTION if n % 2 == 0 else Model.GROUP_ALGEBRA
        if name == "central_coproduct":
            model = Model.GROUP_ALGEBRA
        if not fn(ctx, model, rng):
            failures.append({"sample": n, "model": model.value})
    return VerificationReport("lemmas", ctx.name, None, "fail" if failures else "pass",
                              witness={"check": name, "failures": failures, "cases": ctx.samples})


def _e1_precedes(x: tb.TwoBoxElement) -> bool:
    e = tb.e1(x.model, x.group)
    return tb.projection_leq(e, tb.range_projection(x))


def _lemma_support_orthogonality(ctx, model, rng) -> bool:
    g = ctx.group
    if rng.random() < 0.5:
        # complementary spectral pieces are orthogonal
        p = tb.random_projection(model, g, rng)
        rest = tb.identity(model, g) - p
        q = tb.random_projection(model, g, rng, under=rest) if not rest.is_zero() else p
    else:
        p = tb.random_projection(model, g, rng)
        q = tb.random_projection(model, g, rng)
    nonzero = not tb.mult(p, q).is_zero()
    return _e1_precedes(tb.coproduct(p, tb.contragredient(q))) == nonzero


def _low_rank_positive(model, g, rng):
    return tb.random_positive(model, g, rng, under=tb.random_projection(model, g, rng))


def _lemma_coproduct_positive(ctx, model, rng) -> bool:
    a = _low_rank_positive(model, ctx.group, rng)
    b = _low_rank_positive(model, ctx.group, rng)
    return tb.is_positive(tb.coproduct(a, b))


def _lemma_coproduct_monotone(ctx, model, rng) -> bool:
    g = ctx.group
    b = _low_rank_positive(model, g, rng)
    d = _low_rank_positive(model, g, rng)
    a = tb.random_positive(model, g, rng, under=tb.range_projection(b))
    c = tb.random_positive(model, g, rng, under=tb.range_projection(d))
    return tb.precedes(tb.coproduct(a, c), tb.coproduct(b, d))


def _lemma_generation_monotone(ctx, model, rng) -> bool:
    g = ctx.group
    b = _low_rank_positive(model, g, rng)
    a = tb.random_positive(model, g, rng, under=tb.range_projection(b))
    return tb.projection_leq(tb.generate_biprojection(a).element, tb.generate_biprojection(b).element)


def _lemma_generation_equivalence(ctx, model, rng) -> bool:
    a = _low_rank_positive(model, ctx.group, rng)
    b = tb.mult(a, a) + 3 * tb.range_projection(a)
    return tb.generate_biprojection(a).element.close_to(tb.generate_biprojection(b).element)


def _lemma_compressed_generation(ctx, model, rng) -> bool:
    lat = ctx.lattice
    node = int(rng.integers(len(lat)))
    b = ctx.biprojection(model, node)
    v = _low_rank_positive(model, ctx.group, rng)
    lhs = tb.generate_biprojection(tb.coproduct(tb.coproduct(b, v), b))
    rhs = tb.generate_biprojection([b, v])
    return lhs.subgroup == rhs.subgroup


def _random_central(ctx, rng) -> tb.TwoBoxElement:
    k = len(ctx.group.classes)
    vals = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return tb.TwoBoxElement(Model.GROUP_ALGEBRA, ctx.group, vals[ctx.group.class_of])


def _lemma_central_coproduct(ctx, model, rng) -> bool:
    a, b = _random_central(ctx, rng), _random_central(ctx, rng)
    return tb.is_central(a) and tb.is_central(b) and tb.is_central(tb.coproduct(a, b))


# character table ----------------------------------------------------------

def verify_chartable(ctx: GroupContext) -> list[VerificationReport]:
    return [_guard(ctx, "chartable", None, lambda: _chartable(ctx))]


def subset_reachability(ft, subset) -> frozenset[int]:
    """Irreps occurring in some positive tensor power of ``sum_{i in subset} V_i``."""
    subset = list(subset)
    reached: set[int] = set()
    for i in subset:
        reached |= tensor_reachability(ft, i)
    frontier = set(reached)
    while frontier:
        nxt = set()
        for j in frontier:
            for i in subset:
                for m in np.flatnonzero(ft.n[i, j]).tolist():
                    if m not in reached:
                        nxt.add(m)
        reached |= nxt
        frontier = nxt
    return frozenset(reached)


def _chartable(ctx: GroupContext) -> VerificationReport:
    ct, ft = ctx.ct, ctx.fusion
    k = len(ct)
    residual = ct.orthogonality_residual()
    squares = sum(d * d for d in ct.degrees) == ctx.group.order
    if k <= 10:
        subsets = [s for r in range(1, k + 1) for s in itertools.combinations(range(k), r)]
    else:
        rng = ctx.rng("chartable")
        subsets = [(i,) for i in range(k)] + list(itertools.combinations(range(k), 2))
        subsets += [tuple(sorted(set(rng.choice(k, size=int(rng.integers(1, k + 1))).tolist())))
                    for _ in range(ctx.samples)]
    trivial = 1 << ctx.group.identity_index
    mismatches = []
    for s in subsets:
        bits = ctx.group.whole.member_bits
        for i in s:
            bits &= ct.kernels[i].member_bits
        faithful = bits == trivial
        full = len(subset_reachability(ft, s)) == k
        if faithful != full:
            mismatches.append(list(s))
    ok = residual < ctx.eigen_tol and squares and not mismatches
    return VerificationReport("chartable", ctx.name, None, "pass" if ok else "fail",
                              witness={"degrees": list(ct.degrees), "burnside_mismatches": mismatches,
                                       "subsets_checked": len(subsets), "sum_of_squares": squares},
                              constants={"orthogonality_residual": residual}, residual_max=residual)


# biprojections ------------------------------------------------------------

def verify_biprojections(ctx: GroupContext) -> list[VerificationReport]:
    return [_guard(ctx, "biprojections", None, lambda m=m: _biprojections(ctx, m)) for m in Model]


def _biprojections(ctx: GroupContext, model: Model) -> VerificationReport:
    g, lat = ctx.group, ctx.lattice
    worst = 0.0
    failures = []
    for node, h in enumerate(lat.nodes):
        b = ctx.biprojection(model, node)
        check = tb.is_biprojection(b, ctx.projection_tol)
        worst = max(worst, check.max_residual)
        roundtrip = tb.subgroup_of_biprojection(b) == h
        # the model-crossing map sends a subgroup indicator to a multiple of its group-algebra sum
        f = tb.fourier(b).coeffs
        support = np.abs(f) > tb.PROJECTION_TOL
        flat = bool((support == h.mask(g.order)).all()) and np.ptp(f[support]) < tb.PROJECTION_TOL
        if not (check.ok and roundtrip and flat):
            failures.append({"subgroup": ctx.subgroup_label(node),
                             "residuals": {k: v for k, v in check.residuals.items() if v >= check.tol},
                             "roundtrip": roundtrip, "fourier_flat": flat})
    return VerificationReport("biprojections", ctx.name, None, "fail" if failures else "pass",
                              witness={"model": model.value, "subgroups": len(lat), "failures": failures},
                              residual_max=worst)


# orchestration ------------------------------------------------------------

RUNNERS = {
    "ore": verify_ore,
    "dual_ore": verify_dual_ore,
    "wcyclic": verify_wcyclic,
    "bounds": verify_bounds,
    "fusion": verify_fusion,
    "generation": verify_generation,
    "lemmas": verify_lemmas,
    "chartable": verify_chartable,
    "biprojections": verify_biprojections,
}


def run_suites(group: Group, suites=SUITES, *, seed: int = 0, timings: bool = False,
               **options) -> list[VerificationReport]:
    """Run the named suites; ``options`` are passed to :class:`GroupContext`."""
    ctx = GroupContext(group, seed=seed, **options)
    out = []
    for name in suites:
        if name not in RUNNERS:
            raise ValueError(f"unknown suite {name!r}")
        try:
            out.extend(RUNNERS[name](ctx))
        except IntegrityError as exc:
            out.append(VerificationReport(name, ctx.name, None, "fail", seed=seed,
                                          witness={"integrity_error": str(exc)}, integrity_error=True))
    if not timings:
        for r in out:
            r.ms = None
    return out


def exit_code(reports: list[VerificationReport]) -> int:
    if any(r.integrity_error for r in reports):
        return 2
    if any(r.verdict == "fail" for r in reports):
        return 1
    return 0

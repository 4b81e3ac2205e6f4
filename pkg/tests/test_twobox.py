import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import chartable, group, lattice
from wcyclic.catalogue import catalogue
from wcyclic.errors import IntegrityError
from wcyclic.perm import cosets, generated_subgroup
from wcyclic.twobox import (Model, TwoBoxElement, basis, biprojection_of_subgroup, block_degree,
                            commutator_residual, compress, contragredient, coproduct, e1,
                            fourier, generate_biprojection, identity, inner, is_biprojection,
                            is_central, is_positive, is_projection, minimal_central_projections,
                            minimal_projection_below, mult, precedes, random_element,
                            random_positive, random_projection, range_projection,
                            subgroup_of_biprojection, trace, zero)

FN, GA = Model.FUNCTION, Model.GROUP_ALGEBRA
MODELS = [FN, GA]
SMALL = ["Z2", "S3", "Z2xZ2", "Q8", "D4", "Z6", "A4"]


def _elements(name):
    return [tuple(r) for r in group(name).table.tolist()]


def _rand(model, name, seed):
    return random_element(model, group(name), np.random.default_rng(seed))


seeds = st.integers(0, 2**32 - 1)


# basic algebra --------------------------------------------------------------

def test_function_basis_orthogonal_idempotents():
    g = group("S3")
    for x in range(6):
        for y in range(6):
            prod = mult(basis(FN, g, x), basis(FN, g, y))
            target = basis(FN, g, x) if x == y else zero(FN, g)
            assert prod.close_to(target)


def test_group_algebra_basis_follows_group_law():
    g = group("S4")
    for x, y in [(1, 2), (5, 17), (23, 23)]:
        assert mult(basis(GA, g, x), basis(GA, g, y)).close_to(basis(GA, g, int(g.mult[x, y])))


@pytest.mark.parametrize("name", SMALL)
def test_group_algebra_product_matches_loops(name):
    g = group(name)
    a, b = _rand(GA, name, 1), _rand(GA, name, 2)
    assert np.allclose(mult(a, b).coeffs, oracles.convolve_loops(_elements(name), a.coeffs, b.coeffs))


@pytest.mark.parametrize("name", SMALL)
def test_operator_is_left_regular_representation(name):
    g = group(name)
    a, b = _rand(GA, name, 3), _rand(GA, name, 4)
    assert np.allclose(a.operator() @ b.coeffs, mult(a, b).coeffs)
    assert np.allclose(mult(a, b).operator(), a.operator() @ b.operator())
    assert np.allclose(a.star().operator(), a.operator().conj().T)


def test_triv_projection_idempotent():
    g = group("S4")
    p = e1(GA, g)
    assert mult(p, p).close_to(p)


def test_mismatched_models_rejected():
    g = group("S3")
    with pytest.raises(ValueError):
        mult(identity(FN, g), identity(GA, g))
    with pytest.raises(ValueError):
        coproduct(identity(GA, g), identity(GA, group("Z6")))


def test_coefficients_are_read_only():
    a = identity(FN, group("Z2"))
    with pytest.raises(ValueError):
        a.coeffs[0] = 5


# fourier and coproduct --------------------------------------------------------

def test_fourier_examples():
    g = group("S4")
    h = lattice("S4").nodes[7]
    f = fourier(biprojection_of_subgroup(FN, g, h).element)
    support = np.abs(f.coeffs) > 1e-12
    assert (support == h.mask(g.order)).all()
    assert np.allclose(f.coeffs[support], f.coeffs[support][0])
    assert fourier(zero(FN, g)).is_zero()
    flat = fourier(identity(FN, g))
    assert flat.close_to(g.order / np.sqrt(g.order) * e1(GA, g))


@pytest.mark.parametrize("model", MODELS)
@given(seed=seeds)
def test_fourier_round_trip(model, seed):
    a = _rand(model, "S3", seed)
    assert fourier(fourier(a)).close_to(a)
    assert fourier(a).model is model.dual


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("name", ["S3", "Q8"])
def test_coproduct_is_transported_product(model, name):
    a, b = _rand(model, name, 5), _rand(model, name, 6)
    via = fourier(mult(fourier(a), fourier(b)))
    assert coproduct(a, b).close_to(via, 1e-9)


def test_function_coproduct_formula():
    g = group("S3")
    x, y = _rand(FN, "S3", 7), _rand(FN, "S3", 8)
    expected = oracles.convolve_loops(_elements("S3"), x.coeffs, y.coeffs) / np.sqrt(6)
    assert np.allclose(coproduct(x, y).coeffs, expected)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("name", ["S3", "Q8", "Z6", "A4"])
def test_coproduct_units(model, name):
    g = group(name)
    a = _rand(model, name, 9)
    delta = np.sqrt(g.order)
    assert coproduct(a, e1(model, g)).close_to(a / delta)
    assert coproduct(e1(model, g), a).close_to(a / delta)
    assert coproduct(a, identity(model, g)).close_to(delta * trace(a) * identity(model, g))
    assert coproduct(identity(model, g), a).close_to(delta * trace(a) * identity(model, g))


# trace, inner product, contragredient -------------------------------------------

@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("name", ["Z1", "S3", "A5"])
def test_trace_normalisation(model, name):
    g = group(name)
    assert np.isclose(trace(identity(model, g)), 1)
    assert np.isclose(trace(e1(model, g)), 1 / g.order)


@pytest.mark.parametrize("name", ["S3", "Q8", "A4"])
def test_central_projection_traces(name):
    ct = chartable(name)
    for p, d in zip(minimal_central_projections(ct), ct.degrees):
        assert np.isclose(trace(p), d * d / group(name).order)
        assert block_degree(p) == d


@pytest.mark.parametrize("model", MODELS)
@given(seed=seeds)
def test_trace_is_tracial_and_inner_positive(model, seed):
    a, b = _rand(model, "S4", seed), _rand(model, "S4", seed + 1)
    assert np.isclose(trace(mult(a, b)), trace(mult(b, a)))
    assert inner(a, a).real > 0 and abs(inner(a, a).imag) < 1e-9
    assert np.isclose(inner(a, b), np.conj(inner(b, a)))


@pytest.mark.parametrize("model", MODELS)
@given(seed=seeds)
def test_contragredient_involution(model, seed):
    a = _rand(model, "D4", seed)
    assert contragredient(contragredient(a)).close_to(a)


def test_contragredient_of_basis():
    g = group("S4")
    for x in range(g.order):
        assert contragredient(basis(FN, g, x)).close_to(basis(FN, g, int(g.inv[x])))


# positivity and projections ----------------------------------------------------

@pytest.mark.parametrize("model", MODELS)
@given(seed=seeds)
def test_range_of_projection_is_itself(model, seed):
    p = random_projection(model, group("S3"), np.random.default_rng(seed))
    assert is_projection(p)
    assert range_projection(p).close_to(p)


def test_range_projection_examples():
    z2 = group("Z2")
    p0, p1 = minimal_central_projections(chartable("Z2"))
    assert range_projection(p0 + 0.5 * p1).close_to(identity(GA, z2))
    g = group("S3")
    assert range_projection(2 * basis(FN, g, 3)).close_to(basis(FN, g, 3))


def test_range_projection_rejects_non_positive():
    g = group("S3")
    with pytest.raises(ValueError):
        range_projection(-1 * identity(FN, g))
    with pytest.raises(ValueError):
        range_projection(basis(GA, g, 1))


@pytest.mark.parametrize("model", MODELS)
@given(seed=seeds)
def test_random_positive_range(model, seed):
    g = group("Q8")
    a = random_positive(model, g, np.random.default_rng(seed))
    assert is_positive(a)
    r = range_projection(a)
    assert is_projection(r)
    # the range projection acts as a unit on a
    assert mult(r, a).close_to(a, 1e-6)
    assert precedes(a, r) and precedes(r, a)


# minimal central projections ---------------------------------------------------

def test_central_projection_examples():
    ct = chartable("Z2")
    g = group("Z2")
    p = minimal_central_projections(ct)
    assert (p[0] + p[1]).close_to(identity(GA, g))
    assert np.allclose(np.abs(p[1].coeffs), 0.5)
    assert p[0].close_to(e1(GA, g))


@pytest.mark.parametrize("name", ["S3", "Q8", "S4", "A5"])
def test_central_projections_are_central(name):
    for p in minimal_central_projections(chartable(name)):
        assert is_central(p) and is_projection(p)
    assert commutator_residual(basis(GA, group(name), 1)) > 0.5


# biprojections -----------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("name", ["S3", "Q8", "A4", "S4", "D6"])
def test_subgroup_biprojections(model, name):
    g = group(name)
    for h in lattice(name).nodes:
        b = biprojection_of_subgroup(model, g, h)
        check = is_biprojection(b.element)
        assert check.ok, check.residuals
        assert subgroup_of_biprojection(b.element) == h
        assert contragredient(b.element).close_to(b.element)


@pytest.mark.parametrize("model", MODELS)
def test_extreme_biprojections(model):
    g = group("S4")
    lat = lattice("S4")
    e_bottom = biprojection_of_subgroup(model, g, g.trivial).element
    e_top = biprojection_of_subgroup(model, g, g.whole).element
    ones = {FN: (e1(FN, g), identity(FN, g)), GA: (identity(GA, g), e1(GA, g))}[model]
    assert e_bottom.close_to(ones[0]) and e_top.close_to(ones[1])
    assert is_biprojection(e1(model, g)) and is_biprojection(identity(model, g))
    assert len(lat) == 30


def test_sign_projection_is_not_biprojection():
    p_sign = minimal_central_projections(chartable("Z2"))[1]
    check = is_biprojection(p_sign)
    assert not check.ok
    assert check.residuals["above_e1"] > 0.1


def test_subgroup_of_biprojection_rejects_non_subgroup():
    g = group("S3")
    fake = TwoBoxElement(FN, g, [1, 1, 1, 0, 0, 0])
    with pytest.raises(IntegrityError):
        subgroup_of_biprojection(fake)
    with pytest.raises(IntegrityError):
        subgroup_of_biprojection(TwoBoxElement(FN, g, [1, 0.5, 0, 0, 0, 0]))


def test_biprojection_products_are_meets():
    # pointwise product in the function model, coproduct in the group algebra
    g, lat = group("S4"), lattice("S4")
    delta = np.sqrt(g.order)
    for a, b in [(3, 9), (5, 20), (12, 14), (1, 29)]:
        h, k = lat.nodes[a], lat.nodes[b]
        m = lat.nodes[lat.meet[a, b]]
        fa, fb = (biprojection_of_subgroup(FN, g, x).element for x in (h, k))
        assert mult(fa, fb).close_to(biprojection_of_subgroup(FN, g, m).element)
        ga, gb = (biprojection_of_subgroup(GA, g, x).element for x in (h, k))
        scale = delta * m.order / (h.order * k.order)
        assert coproduct(ga, gb).close_to(scale * biprojection_of_subgroup(GA, g, m).element)


# generation ----------------------------------------------------------------------

@pytest.mark.parametrize("name", ["S3", "Q8", "A4", "S4"])
def test_function_generation_of_single_elements(name):
    g = group(name)
    for x in range(g.order):
        gen = generate_biprojection(basis(FN, g, x))
        assert gen.subgroup == generated_subgroup(g, [x])


@given(data=st.data())
def test_function_generation_matches_closure_oracle(data):
    name = data.draw(st.sampled_from(["S4", "D6", "Z2xQ8", "S3xS3"]))
    g = group(name)
    picks = data.draw(st.lists(st.integers(0, g.order - 1), min_size=1, max_size=3))
    gen = generate_biprojection([basis(FN, g, x) for x in picks])
    elems = _elements(name)
    closed = oracles.closure([elems[x] for x in picks], g.degree)
    assert {elems[i] for i in g.members(gen.subgroup)} == closed


def test_generation_examples():
    g = group("S4")
    gens = [g.index(p) for p in catalogue("S4")[1]]
    assert generate_biprojection([basis(FN, g, x) for x in gens]).element.close_to(identity(FN, g))
    assert generate_biprojection(basis(FN, g, 0)).element.close_to(e1(FN, g))
    z2 = group("Z2")
    p_sign = minimal_central_projections(chartable("Z2"))[1]
    assert generate_biprojection(p_sign).element.close_to(identity(GA, z2))


@pytest.mark.parametrize("model", MODELS)
def test_generation_fixes_biprojections(model):
    g = group("A4")
    for h in lattice("A4").nodes:
        b = biprojection_of_subgroup(model, g, h)
        gen = generate_biprojection(b.element)
        assert gen.element.close_to(b.element) and gen.subgroup == h


def test_generation_rejects_empty_input():
    g = group("S3")
    with pytest.raises(ValueError):
        generate_biprojection([])
    with pytest.raises(ValueError):
        generate_biprojection(zero(FN, g))


def _kernel_of_irreps(ct, irreps):
    bits = ct.group.whole.member_bits
    for i in irreps:
        bits &= ct.kernels[i].member_bits
    return bits


@pytest.mark.parametrize("name", ["S3", "Q8", "D4", "A4"])
def test_central_generation_is_kernel(name):
    # a sum of central projections generates b_K with K the common kernel
    ct, g = chartable(name), group(name)
    ps = minimal_central_projections(ct)
    for i, p in enumerate(ps):
        gen = generate_biprojection(p)
        assert gen.subgroup.member_bits == ct.kernels[i].member_bits
    gen = generate_biprojection(ps[1:])
    assert gen.subgroup.member_bits == _kernel_of_irreps(ct, range(1, len(ct)))


def test_minimal_projection_examples():
    ct = chartable("Q8")
    g = group("Q8")
    ps = minimal_central_projections(ct)
    assert minimal_projection_below(ps[1]).close_to(ps[1])
    u = minimal_projection_below(ps[4], seed=3)
    assert is_projection(u) and np.isclose(trace(u), 2 / 8)
    assert generate_biprojection(u).element.close_to(identity(GA, g))
    z2 = minimal_central_projections(chartable("Z2"))
    assert minimal_projection_below(z2[1]).close_to(z2[1])


def test_minimal_projection_needs_group_algebra():
    with pytest.raises(ValueError):
        minimal_projection_below(identity(FN, group("S3")))


# compression -----------------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS)
def test_compress_extremes(model):
    g = group("S3")
    assert compress(identity(model, g), "mult").dim == g.order
    low = e1(model, g)
    assert compress(low, "mult").dim == 1
    assert compress(low, "mult").contains(low)


@pytest.mark.parametrize("name", ["S3", "S4", "D6"])
def test_compress_function_conv_counts_double_cosets(name):
    g = group(name)
    for h in lattice(name).nodes[::3]:
        b = biprojection_of_subgroup(FN, g, h).element
        algebra = compress(b, "conv")
        assert algebra.dim == len(cosets(g, h, "double"))
        assert max(algebra.residuals.values()) < 1e-7


def test_compress_rejects_unknown_mode():
    with pytest.raises(ValueError):
        compress(identity(FN, group("S3")), "sideways")


# serialisation ---------------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS)
@given(seed=seeds)
def test_json_round_trip(model, seed):
    g = group("S3")
    a = _rand(model, "S3", seed)
    back = TwoBoxElement.from_dict(json.loads(json.dumps(a.to_dict())), g)
    assert back.model is model and back.close_to(a, 1e-15)


def test_from_dict_rejects_wrong_length():
    g = group("S3")
    data = identity(FN, group("Z2")).to_dict()
    with pytest.raises(ValueError):
        TwoBoxElement.from_dict(data, g)

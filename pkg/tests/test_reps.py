import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import chartable, group, lattice
from wcyclic.catalogue import DEFAULT_CATALOGUE, catalogue
from wcyclic.errors import IntegrityError
from wcyclic.perm import Permutation, core, generated_subgroup
from wcyclic.reps import (StabilizerOracle, character_table, class_structure_constants,
                          fixed_dim, fusion_coeffs, is_linearly_primitive,
                          min_faithful_components, pointwise_stabilizer, tensor_reachability)

CATALOGUE = list(DEFAULT_CATALOGUE)
SMALL = [n for n in CATALOGUE if group(n).order <= 24]


def _sub(name, gens):
    g = group(name)
    return generated_subgroup(g, [g.index(Permutation.parse(t, g.degree)) for t in gens])


def _class_index(g, perm_text):
    return int(g.class_of[g.index(Permutation.parse(perm_text, g.degree))])


def _std_index(ct):
    return ct.degrees.index(2)


def _q8_matrices():
    g = group("Q8")
    _, gens = catalogue("Q8")
    x, y = gens
    i, j = oracles.quaternion_units()
    return g, oracles.matrix_group([x.images, y.images], [i, j], g.degree)


# class structure constants --------------------------------------------------

def test_structure_constants_examples():
    assert class_structure_constants(group("Z1")).tolist() == [[[1]]]
    s3 = group("S3")
    a = class_structure_constants(s3)
    t = _class_index(s3, "(0 1)")
    assert a[t, t, 0] == 3
    z2 = class_structure_constants(group("Z2"))
    assert z2[1, 1, 0] == 1


@pytest.mark.parametrize("name", ["S3", "D4", "A4", "Q8"])
def test_structure_constants_by_loops(name):
    g = group(name)
    a = class_structure_constants(g)
    for c, d, e in itertools.product(range(len(g.classes)), repeat=3):
        e0 = g.classes[e][0]
        count = sum(1 for x in g.classes[c] for y in g.classes[d] if g.mult[x, y] == e0)
        assert a[c, d, e] == count


# character tables ------------------------------------------------------------

def test_trivial_and_z2_tables():
    ct = chartable("Z1")
    assert ct.degrees == (1,) and np.allclose(ct.chi, [[1]])
    ct = chartable("Z2")
    assert ct.degrees == (1, 1)
    assert np.allclose(ct.chi, [[1, 1], [1, -1]])


def test_s3_table_matches_matrix_oracle():
    ct, g = chartable("S3"), group("S3")
    assert ct.degrees == (1, 1, 2)
    std = _std_index(ct)
    assert np.isclose(ct.chi[std, _class_index(g, "(0 1)")], 0)
    assert np.isclose(ct.chi[std, _class_index(g, "(0 1 2)")], -1)
    chars = oracles.character_from_matrices(oracles.s3_standard())
    for idx, perm in enumerate(g.table.tolist()):
        assert np.isclose(ct.values[std, idx], chars[tuple(perm)])


def test_q8_table_matches_matrix_oracle():
    ct = chartable("Q8")
    assert ct.degrees == (1, 1, 1, 1, 2)
    g, mats = _q8_matrices()
    assert len(mats) == 8
    chars = oracles.character_from_matrices(mats)
    for idx, perm in enumerate(g.table.tolist()):
        assert np.isclose(ct.values[4, idx], chars[tuple(perm)])


@pytest.mark.parametrize("name", CATALOGUE)
def test_table_integrity(name):
    ct, g = chartable(name), group(name)
    assert ct.orthogonality_residual() < 1e-8
    assert sum(d * d for d in ct.degrees) == g.order
    assert len(ct) == len(g.classes)
    assert np.allclose(ct.chi[0], 1)
    assert list(ct.degrees) == sorted(ct.degrees)
    # column orthogonality
    sizes = np.array(ct.class_sizes)
    cols = ct.chi.conj().T @ ct.chi
    assert np.allclose(cols, np.diag(g.order / sizes))


@pytest.mark.parametrize("name", ["S3", "D4", "A4", "S4"])
@given(seed=st.integers(0, 2**16))
def test_table_independent_of_seed(name, seed):
    ref = chartable(name)
    ct = character_table(group(name), seed=seed)
    assert ct.degrees == ref.degrees
    assert np.allclose(ct.chi, ref.chi, atol=1e-8)


def test_table_gives_up_with_impossible_tolerance():
    with pytest.raises(IntegrityError):
        character_table(group("S4"), eigen_tol=1e-30, retries=2)


@pytest.mark.parametrize("n", [2, 5, 6, 12])
def test_cyclic_characters_are_roots_of_unity(n):
    ct = chartable(f"Z{n}")
    assert ct.degrees == (1,) * n
    assert np.allclose(np.abs(ct.chi), 1)
    assert np.allclose(ct.chi ** n, 1)


# fixed points and stabilizers ---------------------------------------------

def test_fixed_dim_examples():
    ct, g = chartable("S3"), group("S3")
    std = _std_index(ct)
    for i, d in enumerate(ct.degrees):
        assert fixed_dim(ct, i, g.trivial) == d
    assert fixed_dim(ct, std, _sub("S3", ["(0 1)"])) == 1
    assert fixed_dim(ct, std, _sub("S3", ["(0 1 2)"])) == 0


@pytest.mark.parametrize("name", ["S3", "D4", "Q8", "A4"])
def test_fixed_dim_is_nonnegative_and_monotone(name):
    ct, lat = chartable(name), lattice(name)
    for i in range(len(ct)):
        for a, b in zip(*np.nonzero(lat.leq)):
            assert 0 <= fixed_dim(ct, i, lat.nodes[b]) <= fixed_dim(ct, i, lat.nodes[a])


def test_pointwise_stabilizer_examples():
    ct, g = chartable("S3"), group("S3")
    s2 = _sub("S3", ["(0 1)"])
    assert pointwise_stabilizer(ct, 0, s2) == g.whole
    assert pointwise_stabilizer(ct, _std_index(ct), s2) == s2
    for i in range(len(ct)):
        assert pointwise_stabilizer(ct, i, g.whole) == g.whole


def test_stabilizer_matches_s3_matrices():
    ct, g = chartable("S3"), group("S3")
    mats = oracles.s3_standard()
    elems = [tuple(r) for r in g.table.tolist()]
    std = _std_index(ct)
    for h in lattice("S3").nodes:
        expected = oracles.pointwise_stabilizer_matrices(mats, [elems[i] for i in g.members(h)])
        got = {elems[i] for i in g.members(pointwise_stabilizer(ct, std, h))}
        assert got == expected


def test_stabilizer_matches_q8_matrices():
    ct = chartable("Q8")
    g, mats = _q8_matrices()
    elems = [tuple(r) for r in g.table.tolist()]
    for h in lattice("Q8").nodes:
        expected = oracles.pointwise_stabilizer_matrices(mats, [elems[i] for i in g.members(h)])
        got = {elems[i] for i in g.members(pointwise_stabilizer(ct, 4, h))}
        assert got == expected


@pytest.mark.parametrize("name", SMALL)
def test_stabilizer_contains_h_and_kernel(name):
    ct, g = chartable(name), group(name)
    for h in lattice(name).nodes:
        oracle = StabilizerOracle(ct, h)
        for i in range(len(ct)):
            stab = oracle.stabilizer(i)
            assert h <= stab and ct.kernels[i] <= stab
            assert fixed_dim(ct, i, stab) == fixed_dim(ct, i, h)


# linear primitivity and faithfulness ---------------------------------------

def test_linear_primitivity_examples():
    ct = chartable("S3")
    assert is_linearly_primitive(ct, _sub("S3", ["(0 1)"])) == _std_index(ct)
    q8 = chartable("Q8")
    assert q8.degrees[is_linearly_primitive(q8, group("Q8").trivial)] == 2
    assert is_linearly_primitive(chartable("Z2xZ2"), group("Z2xZ2").trivial) is None


@pytest.mark.parametrize("name", SMALL)
def test_trivial_h_primitive_iff_faithful_irrep(name):
    ct, g = chartable(name), group(name)
    faithful = any(k == g.trivial for k in ct.kernels)
    assert (is_linearly_primitive(ct, g.trivial) is not None) == faithful


@pytest.mark.parametrize("name", SMALL)
def test_core_free_primitive_has_faithful_irrep(name):
    ct, g = chartable(name), group(name)
    for h in lattice(name).nodes:
        i = is_linearly_primitive(ct, h)
        if i is not None and core(g, h) == g.trivial:
            assert ct.kernels[i] == g.trivial


def test_min_faithful_examples():
    assert min_faithful_components(chartable("Q8")) == (1, (4,))
    assert min_faithful_components(chartable("Z2xZ2"))[0] == 2
    assert min_faithful_components(chartable("Z1")) == (0, ())


@pytest.mark.parametrize("name", SMALL)
def test_min_faithful_by_kernel_scan(name):
    ct, g = chartable(name), group(name)
    count, subset = min_faithful_components(ct)
    bits = g.whole.member_bits
    for i in subset:
        bits &= ct.kernels[i].member_bits
    assert bits == g.trivial.member_bits
    for smaller in itertools.combinations(range(len(ct)), max(count - 1, 0)):
        if count == 0:
            break
        bits = g.whole.member_bits
        for i in smaller:
            bits &= ct.kernels[i].member_bits
        assert bits != g.trivial.member_bits


# fusion ---------------------------------------------------------------------

def test_fusion_examples():
    ft = fusion_coeffs(chartable("S3"))
    k = len(ft.degrees)
    assert (ft.n[0] == np.eye(k, dtype=int)).all()
    assert ft.n[2, 2].tolist() == [1, 1, 1]
    z2 = fusion_coeffs(chartable("Z2"))
    assert z2.n[1, 1].tolist() == [1, 0]


@pytest.mark.parametrize("name", SMALL)
def test_fusion_matches_pointwise_products(name):
    ct = chartable(name)
    ft = fusion_coeffs(ct)
    prod = ct.chi[:, None, :] * ct.chi[None, :, :]
    rebuilt = np.einsum("ijk,kc->ijc", ft.n, ct.chi)
    assert np.allclose(prod, rebuilt)
    d = np.array(ct.degrees)
    assert (ft.n @ d == np.outer(d, d)).all()
    assert (ft.n == ft.n.transpose(1, 0, 2)).all()


def test_reachability_examples():
    q8 = fusion_coeffs(chartable("Q8"))
    assert tensor_reachability(q8, 4) == frozenset(range(5))
    assert tensor_reachability(q8, 0) == {0}
    v4 = fusion_coeffs(chartable("Z2xZ2"))
    for i in range(1, 4):
        assert tensor_reachability(v4, i) == {0, i}


@pytest.mark.parametrize("name", CATALOGUE)
def test_burnside_reachability(name):
    ct, g = chartable(name), group(name)
    ft = fusion_coeffs(ct)
    for i in range(len(ct)):
        reach = tensor_reachability(ft, i)
        assert (reach == frozenset(range(len(ct)))) == (ct.kernels[i] == g.trivial)
        # reachable irreps are exactly those trivial on the kernel
        expected = {j for j in range(len(ct)) if ct.kernels[i] <= ct.kernels[j]}
        assert reach == expected

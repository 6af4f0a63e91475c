from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from symdouble.exactcalc import Mat, Sampler
from symdouble.fingpd import (
    GroupoidError, VBGMorphism, check_dual_core, check_morphism, compose_morphisms, core,
    cyclic_group, dual_of_morphism, dual_product_by_decomposition, double_dual_identify,
    from_json, identity_morphism, pair_groupoid, pradines_dual, product_groupoid,
    random_split_vbgroupoid, split_morphism, split_vbgroupoid, to_json, trivial_groupoid,
    validate_vbgroupoid,
)

seeds = st.integers(0, 10_000)


@pytest.mark.parametrize("G", [pair_groupoid(3), cyclic_group(4), trivial_groupoid(2),
                               product_groupoid(pair_groupoid(2), cyclic_group(3))])
def test_finite_groupoids_valid(G):
    assert G.validate() == []


def test_split_model_basics():
    G = pair_groupoid(2)
    W = split_vbgroupoid(G, 1, 1, Mat([[1]]))
    assert validate_vbgroupoid(W).ok
    K = core(W)
    assert all(K.dim(m) == 1 for m in G.objects)
    g = (1, 0)
    xi = (F(2), F(3))
    inv = W.inverse(g, xi)
    assert inv == (F(5), F(-3))
    assert W.compose(G.inv[g], g, inv, xi) == W.unit(0, (F(2),))
    assert W.compose(g, G.inv[g], xi, inv) == W.unit(1, (F(5),))


def test_zero_delta_source_equals_target():
    W = split_vbgroupoid(pair_groupoid(2), 2, 1, Mat.zeros(2, 1))
    assert all(W.src_lin[g] == W.tgt_lin[g] for g in W.base.arrows)


def test_zero_bundles_validate():
    W = split_vbgroupoid(pair_groupoid(2), 0, 0, Mat.zeros(0, 0))
    assert validate_vbgroupoid(W).ok


def test_injected_fault_reports_pair():
    G = pair_groupoid(2)
    W = split_vbgroupoid(G, 1, 1, Mat([[2]]))
    bad_pair = ((1, 0), (0, 1))
    comp = dict(W.comp_lin)
    rows = [list(r) for r in comp[bad_pair].rows]
    rows[1][3] += 1
    comp[bad_pair] = Mat(rows, 4)
    broken = type(W)(W.base, W.side_dims, W.fiber_dims, W.src_lin, W.tgt_lin, W.id_lin,
                     W.inv_lin, comp, "broken")
    rep = validate_vbgroupoid(broken)
    assert not rep.ok
    assert rep.first == {"check": "target of product", "witness": bad_pair}
    assert validate_vbgroupoid(broken, stop_at_first=True).failures == [rep.first]


def test_projection_core():
    # src a plain projection: core is the complementary coordinate block
    W = split_vbgroupoid(trivial_groupoid(1), 1, 2, Mat([[1, 1]]))
    K = core(W)
    assert K.basis[0] == Mat([[0, 0], [1, 0], [0, 1]])
    assert K.delta[0] == Mat([[1, 1]])


def test_split_dual_closed_form():
    # hand-dualized split formulas, Phi = (phi_A, phi_K)
    d = Mat([[1, 2], [0, -1]])
    G = pair_groupoid(2)
    W = split_vbgroupoid(G, 2, 2, d)
    D = pradines_dual(W)
    I2 = Mat.identity(2)
    for g in G.arrows:
        assert D.src_lin[g] == Mat.hstack(-d.T, I2)
        assert D.tgt_lin[g] == Mat.hstack(Mat.zeros(2, 2), I2)
        assert D.inv_lin[g] == Mat.vstack(Mat.hstack(-I2, Mat.zeros(2, 2)), Mat.hstack(-d.T, I2))
    for m in G.objects:
        assert D.id_lin[m] == Mat.vstack(Mat.zeros(2, 2), I2)
    for (h, g) in G.composable():
        C = D.compatible_basis(h, g)
        closed = Mat.hstack(I2, Mat.zeros(2, 2), I2, Mat.zeros(2, 2))
        closed = Mat.vstack(closed, Mat.hstack(Mat.zeros(2, 2), I2, Mat.zeros(2, 4)))
        assert D.comp_lin[(h, g)] @ C == closed @ C


def test_trivial_groupoid_dual_fibres():
    W = split_vbgroupoid(trivial_groupoid(1), 2, 1, Mat([[1], [3]]))
    D = pradines_dual(W)
    assert D.side_dims[0] == 1 and D.fiber_dims[0] == 3
    assert core(D).dim(0) == 2


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_dual_validates_and_product_well_defined(seed):
    s = Sampler(seed)
    W = random_split_vbgroupoid(s, max_objects=3)
    D = pradines_dual(W)
    assert validate_vbgroupoid(D).ok
    G = W.base
    h, g = s.choice(G.composable())
    C = D.compatible_basis(h, g)
    pair = C @ s.vector(C.ncols)
    psi, phi = pair[:D.fiber_dims[h]], pair[D.fiber_dims[h]:]
    prod = D.compose(h, g, psi, phi)
    target = s.vector(W.fiber_dims[G.comp[(h, g)]])
    vals = dual_product_by_decomposition(W, h, g, psi, phi, target, 5, s)
    assert len(set(vals)) == 1
    assert vals[0] == sum(a * b for a, b in zip(prod, target))


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_dual_core_and_double_dual(seed):
    W = random_split_vbgroupoid(Sampler(seed), max_objects=3)
    assert check_dual_core(W).ok
    assert double_dual_identify(W).ok


def test_double_dual_plain_cases():
    for d in (Mat.zeros(1, 1), Mat([[1]])):
        rep = double_dual_identify(split_vbgroupoid(pair_groupoid(2), 1, 1, d))
        assert rep.ok


def test_morphism_duals():
    G = pair_groupoid(2)
    d = Mat([[1, 2]])
    W = split_vbgroupoid(G, 1, 2, d)
    ident = identity_morphism(W)
    Fs = dual_of_morphism(ident)
    assert check_morphism(Fs.morphism).ok
    assert all(Fs.morphism.fiber[g] == Mat.identity(3) for g in G.arrows)

    lam = F(3, 2)
    scaled = VBGMorphism(W, W, {g: Mat.identity(3).scale(lam) for g in G.arrows},
                         {m: Mat([[lam]]) for m in G.objects})
    Fs = dual_of_morphism(scaled)
    assert check_morphism(Fs.morphism).ok
    assert all(Fs.morphism.base[m] == Mat.identity(2).scale(lam) for m in G.objects)
    assert all(Fs.core[m] == Mat([[lam]]) for m in G.objects)


def test_non_morphism_rejected():
    G = pair_groupoid(2)
    W = split_vbgroupoid(G, 1, 1, Mat([[1]]))
    V = split_vbgroupoid(G, 1, 1, Mat([[2]]))
    with pytest.raises(GroupoidError):
        dual_of_morphism(split_morphism(W, V, Mat([[1]]), Mat([[1]])))


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_dual_contravariant(seed):
    s = Sampler(seed)
    G = pair_groupoid(2)
    d1 = s.matrix(1, 1)
    fA1, fK1 = s.matrix(1, 1), Mat([[1]])
    fA2, fK2 = s.matrix(1, 1), Mat([[1]])
    # choose deltas so both squares commute: d2 fK1 = fA1 d1, d3 fK2 = fA2 d2
    d2 = fA1 @ d1
    d3 = fA2 @ d2
    W1, W2, W3 = (split_vbgroupoid(G, 1, 1, d) for d in (d1, d2, d3))
    F1, F2 = split_morphism(W1, W2, fA1, fK1), split_morphism(W2, W3, fA2, fK2)
    duals = {id(W): pradines_dual(W) for W in (W1, W2, W3)}
    F21 = compose_morphisms(F2, F1)
    lhs = dual_of_morphism(F21, (duals[id(W1)], duals[id(W3)])).morphism
    d1s = dual_of_morphism(F1, (duals[id(W1)], duals[id(W2)])).morphism
    d2s = dual_of_morphism(F2, (duals[id(W2)], duals[id(W3)])).morphism
    rhs = compose_morphisms(d1s, d2s)
    assert check_morphism(lhs).ok and check_morphism(d1s).ok
    assert lhs.fiber == rhs.fiber and lhs.base == rhs.base


def test_json_roundtrip():
    W = random_split_vbgroupoid(Sampler(7), max_objects=2)
    text = to_json(W)
    W2 = from_json(text)
    assert to_json(W2) == text
    assert validate_vbgroupoid(W2).ok
    assert '"' in text and "/" in text

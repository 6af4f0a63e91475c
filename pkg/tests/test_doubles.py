import pytest

from symdouble.exactcalc import Mat, Poly, PolyMap, Sampler
from symdouble.fingpd import GroupoidError
from symdouble.coordmodels import (
    canonical_j, core_embedding, core_embedding_report, core_of_double, cotangent_double,
    double_source_section, dri_compositions, infer_base_morphism, jprime_maps,
    m4_double_groupoid, pair_groupoid, prolonged_duality_maps, side_models, tulczyjew_check,
    validate_double,
)
from symdouble.coordmodels.doubles import _mat


@pytest.mark.parametrize("n", [1, 2])
def test_m4_validates(n):
    rep = validate_double(m4_double_groupoid(n))
    assert rep.ok, rep.first


def test_m4_examples():
    D = m4_double_groupoid(1)
    assert D.double_unit((5,)) == (5, 5, 5, 5)
    s = Sampler(3)
    # (s1 s2) over (s3 s4): s1 = (a, b, c, d) etc. in coordinates (w, x, z, y)
    a, b, c, d, e, f, g, h, i = (s.scalar() for _ in range(9))
    s1, s2 = (a, b, d, e), (d, e, g, h)
    s3, s4 = (b, c, e, f), (e, f, h, i)
    hv = D.SH.compose(D.SV.compose(s1, s2), D.SV.compose(s3, s4))
    vh = D.SV.compose(D.SH.compose(s1, s3), D.SH.compose(s2, s4))
    assert hv == vh == (a, c, g, i)
    sec = double_source_section(D)
    joint = Mat.vstack(_mat(D.SV.src), _mat(D.SH.src))
    h_, v_ = (7, 2), (3, 2)      # H-arrow from 2, V-arrow from 2
    assert joint @ (sec @ (h_ + v_)) == h_ + v_


def test_core_of_m4_is_pair():
    D = m4_double_groupoid(1)
    core = core_of_double(D)
    assert core.report.ok, core.report.first
    P = pair_groupoid(1)
    C = core.groupoid
    assert C.mats == P.mats
    # the identity of C at m is the double identity
    assert tuple(core.basis @ C.unit((4,))) == D.double_unit((4,))


def test_core_inverse_formulas_agree():
    rep = core_of_double(m4_double_groupoid(2)).report
    assert rep.ok
    assert not [f for f in rep.failures if "inverse" in f["check"]]


def _coordinatewise(f: Poly, n_blocks: int) -> PolyMap:
    """f applied to each of n_blocks scalar coordinates."""
    N = n_blocks
    return PolyMap(N, [f.substitute([Poly.var(N, i)]) for i in range(N)])


def test_infer_base_morphism():
    D = m4_double_groupoid(1)
    ident = PolyMap.identity
    phiM = infer_base_morphism(ident(4), ident(2), ident(2), D, D)
    assert phiM == ident(1)
    f = Poly.var(1, 0) ** 3 + Poly.const(1, 2)
    phiM = infer_base_morphism(_coordinatewise(f, 4), _coordinatewise(f, 2),
                               _coordinatewise(f, 2), D, D)
    assert phiM == PolyMap(1, [f])


def test_infer_base_morphism_rejects_inconsistent_input():
    D = m4_double_groupoid(1)
    ident = PolyMap.identity
    swap = PolyMap.from_matrix(Mat([[0, 1], [1, 0]]))
    with pytest.raises(GroupoidError):
        infer_base_morphism(ident(4), swap, ident(2), D, D)


@pytest.mark.parametrize("n", [1, 2])
def test_cotangent_double(n):
    D = m4_double_groupoid(n)
    TD = cotangent_double(D)
    rep = validate_double(TD)
    assert rep.ok, rep.first
    OV, OH = side_models(D)
    # fibres of A*_V S over H have dimension dim A_V S
    assert TD.H.arrow_dim - D.H.arrow_dim == OV.F.fiber_dims[0]
    assert TD.V.arrow_dim - D.V.arrow_dim == OH.F.fiber_dims[0]
    # double identities of T*S sit over double identities of S
    s = Sampler(n)
    m = s.vector(TD.base_dim)
    u = TD.double_unit(m)
    assert u[:D.dim] == D.double_unit(m[:n])


@pytest.mark.parametrize("n", [1, 2])
def test_core_embedding(n):
    D = m4_double_groupoid(n)
    rep = core_embedding_report(D)
    assert rep.ok, rep.failures[:1]
    assert rep.dim_core == rep.dim_cotangent_core == 4 * n


def test_core_embedding_examples():
    D = m4_double_groupoid(1)
    c = (3, 5)
    point, Sigma = core_embedding(D, c, (0, 0))
    assert Sigma == (0, 0, 0, 0)
    point, Sigma = core_embedding(D, c, (1, 0))     # sigma = dx at c
    TD = cotangent_double(D)
    tcore = core_of_double(TD)
    elt = point + Sigma
    assert tcore.basis.solve(elt) is not None
    with pytest.raises(Exception):
        core_embedding(D, (1, 2, 3), (0, 0))


def test_prolonged_duality_pair1():
    r = prolonged_duality_maps(pair_groupoid(1))
    assert r.ok, r.checks
    assert r.dagger.rank() == r.dagger.nrows
    assert r.R_fibre @ r.I_dagger_eps == Mat.identity(2)
    assert r.R_core_map() == -Mat.identity(1)


@pytest.mark.parametrize("n", [1, 2])
def test_j_maps(n):
    D = m4_double_groupoid(n)
    jm = canonical_j(D)
    assert all(jm.checks.values()), jm.checks
    # j is the swap of the two side blocks of T^2 data, identity on the core
    assert jm.j @ jm.j == Mat.identity(3 * n)
    jp = jprime_maps(D)
    assert all(jp.checks.values()), jp.checks
    tul = tulczyjew_check(D, jp)
    assert all(tul.checks.values())


def test_dri_shapes():
    D = m4_double_groupoid(1)
    comp = dri_compositions(D)
    assert comp["H"].shape == (3, 3) and comp["V"].shape == (3, 3)

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from symdouble.exactcalc import Mat, Poly, PolyMap, Sampler, vf_bracket
from symdouble.fingpd import GroupoidError
from symdouble.coordmodels import (
    ModelError, CoordGroupoid, check_algebroid, cotangent_core_report, cotangent_groupoid,
    decomposition_values, lie_algebra_model, lie_algebroid, pair_groupoid, pradines_crosscheck,
    product_groupoid, tangent_groupoid, unit_covector, validate_groupoid, vector_space_groupoid,
)
from symdouble.coordmodels import golden

rats = st.fractions(min_value=-20, max_value=20, max_denominator=13)


def vec(n):
    return st.lists(rats, min_size=n, max_size=n).map(tuple)


def test_pair_examples():
    G = pair_groupoid(1)
    assert G.compose((3, 5), (5, 9)) == (3, 9)
    assert G.unit((7,)) == (7, 7)
    assert G.inverse((2, 4)) == (4, 2)
    assert G.source((2, 4)) == (4,) and G.target((2, 4)) == (2,)


@pytest.mark.parametrize("G", [pair_groupoid(0), pair_groupoid(1), pair_groupoid(3),
                               vector_space_groupoid(2),
                               product_groupoid(pair_groupoid(1), vector_space_groupoid(1))])
def test_models_validate(G):
    rep = validate_groupoid(G)
    assert rep.ok, rep.first


def test_tangent_of_pair():
    TG = tangent_groupoid(pair_groupoid(1))
    assert validate_groupoid(TG).ok
    x, y, z, u, v, w = (F(i) for i in (1, 2, 3, 4, 5, 6))
    # coordinates (x, y, xdot, ydot); ((x, y, u, v), (y, z, v, w)) -> (x, z, u, w)
    assert TG.compose((x, y, u, v), (y, z, v, w)) == (x, z, u, w)
    assert TG.unit((x, u)) == (x, x, u, u)


def test_unregistered_family_rejected():
    G = pair_groupoid(1)
    odd = CoordGroupoid(G.base_dim, G.arrow_dim, G.src, G.tgt, G.ident, G.inv, G.comp,
                        family="custom")
    with pytest.raises(ModelError):
        lie_algebroid(odd)
    with pytest.raises(ModelError):
        cotangent_groupoid(odd)


def test_algebroid_of_pair():
    A = lie_algebroid(pair_groupoid(2))
    assert A.fiber_dim == 2 and A.anchor_matrix() == Mat.identity(2)
    x, y = Poly.var(2, 0), Poly.var(2, 1)
    X = PolyMap(2, [Poly(2), x])          # x d/dy
    Y = PolyMap(2, [y, Poly(2)])          # y d/dx
    # by hand: [x dy, y dx] = x dx - y dy
    assert A.bracket(X, Y) == PolyMap(2, [x, -y])
    assert A.bracket(X, Y) == vf_bracket(X, Y)
    assert check_algebroid(A).ok


def test_abelian_algebroid():
    A = lie_algebroid(vector_space_groupoid(2))
    e = [PolyMap(0, [Poly.const(0, int(i == j)) for j in range(2)]) for i in range(2)]
    assert A.bracket(e[0], e[1]) == PolyMap.zero(0, 2)


def test_so3_algebroid():
    eps = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[k][i][j], eps[k][j][i] = 1, -1
    assert check_algebroid(lie_algebra_model(eps)).ok


def test_cotangent_pair1_hand_oracle():
    # hand derivation with L_g, R_g affine on R^2
    T = cotangent_groupoid(pair_groupoid(1))
    x, y, p, q, z, r = (F(v) for v in (2, 3, 5, 7, 11, 13))
    assert T.source((x, y, p, q)) == (y, -q)
    assert T.target((x, y, p, q)) == (x, p)
    assert T.unit((x, p)) == (x, x, p, -p)
    assert T.inverse((x, y, p, q)) == (y, x, -q, -p)
    # (x, y, p, q) composes with (y, z, -q, r): the product is (x, z, p, r)
    assert T.compose((x, y, p, q), (y, z, -q, r)) == (x, z, p, r)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cotangent_pair_validates(n):
    T = cotangent_groupoid(pair_groupoid(n))
    assert validate_groupoid(T, Sampler(n), trials=50).ok
    assert pradines_crosscheck(T) == []
    assert all(cotangent_core_report(T, Sampler(n)).values())


def test_identity_covector_formula():
    T = cotangent_groupoid(pair_groupoid(2))
    s = Sampler(4)
    theta, x, X = s.vector(2), s.vector(2), s.vector(2)
    Phi = unit_covector(T, theta)
    # 1_theta(T1(x) + X) = theta(X) with X in ker T(src) = (X, 0)
    tangent = tuple(a + b for a, b in zip(x + x, X + (0, 0)))
    assert sum(a * b for a, b in zip(Phi, tangent)) == sum(a * b for a, b in zip(theta, X))


def test_zero_covectors_compose_to_zero():
    T = cotangent_groupoid(pair_groupoid(2))
    h, g = (1, 2, 3, 4), (3, 4, 5, 6)
    assert T.compose(h + (0,) * 4, g + (0,) * 4)[4:] == (0,) * 4


def test_dualcomp_decomposition_independent():
    T = cotangent_groupoid(pair_groupoid(2))
    s = Sampler(11)
    for _ in range(5):
        hg = T.random_composable(s)
        N = 8
        h, g = hg[:N], hg[N:]
        Z = s.vector(4)
        vals = decomposition_values(T, h[:4], g[:4], h[4:], g[4:], Z, 4, s)
        assert len(vals) == 4 and len(set(vals)) == 1


@settings(max_examples=40, deadline=None)
@given(vec(4))
def test_cotangent_inverse_property(g):
    T = cotangent_groupoid(pair_groupoid(1))
    gi = T.inverse(g)
    assert T.compose(g, gi) == T.unit(T.target(g))
    assert T.compose(gi, g) == T.unit(T.source(g))


def test_golden_matches_and_guards(tmp_path):
    assert golden.diff("cotangent-pair1") == []
    with pytest.raises(golden.GoldenError):
        golden.write("cotangent-pair1", tmp_path)
    path = golden.write("cotangent-pair1", tmp_path, force=True)
    assert golden.diff("cotangent-pair1", tmp_path) == []
    path.write_text(path.read_text().replace('"-1"', '"1"', 1))
    with pytest.raises(golden.GoldenChecksumError):
        golden.load("cotangent-pair1", tmp_path)

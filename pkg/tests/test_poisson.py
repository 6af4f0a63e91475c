from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from symdouble.exactcalc import Mat, Poly, PolyMap, Sampler
from symdouble.coordmodels import (
    CoordGroupoid, LieAlgebroidModel, ModelError, lie_algebra_model, m4_double_groupoid,
    pair_groupoid,
)
from symdouble.poisson import (
    PoissonCoordDouble, PoissonCoordGroupoid, PoissonError, PolyBivector, check_multiplicative, compute_DMaps,
    cotangent_algebroid, koszul_bracket, lie_poisson_from_algebroid, morphic_section_checks,
    multiplicative_form, require_poisson, schouten_jacobi, standard_bivector,
    symplectic_double_m4, symplectic_pair_groupoid, verify_lapvb, verify_needed,
    verify_side_duality, verify_thm_pairs, zero_double_m4,
)


def so3():
    c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for (i, j, k), v in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}.items():
        c[k][i][j], c[k][j][i] = v, -v
    return lie_algebra_model(c, "so3")


def var(n, i):
    return Poly.var(n, i)


def zero(n):
    return Poly(n)


def form(*comps):
    return PolyMap(len(comps), list(comps))


def koszul_oracle(pi, w, t):
    """[w, t]_k = sum_ij pi^ij (w_i d_j t_k - t_i d_j w_k) + w_i t_j d_k pi^ij."""
    n = pi.dim
    out = []
    for k in range(n):
        acc = Poly(n)
        for i in range(n):
            for j in range(n):
                p = pi.pi[i][j]
                acc = acc + p * w.components[i] * t.components[k].diff(j)
                acc = acc - p * t.components[i] * w.components[k].diff(j)
                acc = acc + w.components[i] * t.components[j] * p.diff(k)
        out.append(acc)
    return PolyMap(n, out)


# ---------------------------------------------------------------------------
# bivectors


def test_schouten_trivial_cases():
    assert all(c.is_zero() for c in schouten_jacobi(standard_bivector(2)))
    x, y = var(2, 0), var(2, 1)
    pi = PolyBivector(2, ((zero(2), x * x * y + 3), (-(x * x * y + 3), zero(2))))
    assert schouten_jacobi(pi) == []


def test_schouten_so3_and_failure():
    lp = lie_poisson_from_algebroid(so3())
    assert all(c.is_zero() for c in schouten_jacobi(lp))
    n = 3
    one = Poly.const(n, 1)
    x1 = var(n, 1)
    bad = PolyBivector(n, ((zero(n), one, zero(n)), (-one, zero(n), x1), (zero(n), -x1, zero(n))))
    assert schouten_jacobi(bad) == [one]
    with pytest.raises(PoissonError):
        require_poisson(bad)


def test_antisymmetry_required():
    one = Poly.const(2, 1)
    with pytest.raises(PoissonError):
        PolyBivector(2, ((zero(2), one), (one, zero(2))))


def test_lie_poisson_examples():
    assert lie_poisson_from_algebroid(LieAlgebroidModel.constant(Mat.zeros(2, 3))) \
        == PolyBivector.zero(5)
    assert lie_poisson_from_algebroid(LieAlgebroidModel.constant(Mat.identity(3))) \
        == standard_bivector(3)
    lp = lie_poisson_from_algebroid(so3())
    x = [var(3, i) for i in range(3)]
    assert lp.pi[0][1] == x[2] and lp.pi[1][2] == x[0] and lp.pi[2][0] == x[1]


def test_lie_poisson_rejects_non_algebroid():
    c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    c[2][0][1], c[2][1][0] = 1, -1
    c[0][1][2], c[0][2][1] = 1, -1
    c[0][0][2], c[0][2][0] = 1, -1        # breaks Jacobi
    with pytest.raises(PoissonError):
        lie_poisson_from_algebroid(lie_algebra_model(c))


def test_lie_poisson_defining_brackets():
    # a nonconstant algebroid: T*R^3 with the so(3) Lie-Poisson structure
    A = cotangent_algebroid(lie_poisson_from_algebroid(so3()))
    pi = lie_poisson_from_algebroid(A)
    n, k = A.base_dim, A.fiber_dim
    N = n + k
    s = Sampler(3)

    def lin(X):
        return sum((X.components[i].embed(N) * var(N, n + i) for i in range(k)), Poly(N))

    for _ in range(4):
        X, Y = s.polymap(n, k, 2), s.polymap(n, k, 2)
        f = s.poly(n, 2)
        assert pi.bracket(lin(X), lin(Y)) == lin(A.bracket(X, Y))
        assert pi.bracket(lin(X), f.embed(N)) == A.act(X, f).embed(N)
        assert pi.bracket(f.embed(N), s.poly(n, 2).embed(N)).is_zero()


def test_koszul_examples():
    pi = PolyBivector.from_matrix(Mat([[0, 1], [-1, 0]]))
    one, x = Poly.const(2, 1), var(2, 0)
    dx, dy = form(one, zero(2)), form(zero(2), one)
    assert koszul_bracket(pi, dx, dy) == PolyMap.zero(2, 2)
    assert koszul_bracket(pi, form(zero(2), x), dx) == PolyMap.zero(2, 2)
    assert koszul_bracket(pi, form(zero(2), x), dx) == koszul_oracle(pi, form(zero(2), x), dx)
    # [x dx, y dy] = xy d{x,y} + x{x,y} dy - y{y,x} dx = y dx + x dy
    y = var(2, 1)
    w, t = form(x, zero(2)), form(zero(2), y)
    assert koszul_bracket(pi, w, t) == form(y, x) == koszul_oracle(pi, w, t)


def test_koszul_rejects_non_poisson():
    n = 3
    one, x1 = Poly.const(n, 1), var(n, 1)
    bad = PolyBivector(n, ((zero(n), one, zero(n)), (-one, zero(n), x1), (zero(n), -x1, zero(n))))
    with pytest.raises(PoissonError):
        koszul_bracket(bad, form(one, zero(n), zero(n)), form(zero(n), one, zero(n)))


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_koszul_matches_oracle(seed):
    s = Sampler(seed)
    pi = lie_poisson_from_algebroid(so3())
    w, t = s.polymap(3, 3, 2), s.polymap(3, 3, 2)
    assert koszul_bracket(pi, w, t) == koszul_oracle(pi, w, t)
    f, g = s.poly(3, 2), s.poly(3, 2)
    df = PolyMap(3, [f.diff(i) for i in range(3)])
    dg = PolyMap(3, [g.diff(i) for i in range(3)])
    h = pi.bracket(f, g)
    assert koszul_bracket(pi, df, dg) == PolyMap(3, [h.diff(i) for i in range(3)])


def test_cotangent_algebroid_bracket_is_koszul():
    pi = lie_poisson_from_algebroid(so3())
    A = cotangent_algebroid(pi)
    s = Sampler(5)
    w, t = s.polymap(3, 3, 2), s.polymap(3, 3, 2)
    assert A.bracket(w, t) == koszul_bracket(pi, w, t)


# ---------------------------------------------------------------------------
# Poisson groupoids


def test_symplectic_pair_groupoid_is_multiplicative():
    rep = check_multiplicative(symplectic_pair_groupoid(1))
    assert rep.ok, rep.report.first
    piM = standard_bivector(1).matrix()
    assert rep.a_star == piM.T                  # a_* = pi_P^# on A*G = T*P
    assert rep.core_map == -rep.a_star.T
    assert rep.report.checks >= 5


def test_zero_structure_multiplicative():
    rep = check_multiplicative(PoissonCoordGroupoid(pair_groupoid(2), PolyBivector.zero(4)))
    assert rep.ok and rep.a_star.is_zero()


def test_sign_fault_is_caught():
    p = standard_bivector(1)
    bad = PoissonCoordGroupoid(pair_groupoid(2), p.embed(4, 0) + p.embed(4, 2))
    rep = check_multiplicative(bad)
    assert not rep.ok
    assert "point" in rep.report.first["witness"] or "component" in rep.report.first["witness"]


def test_unregistered_groupoid_rejected():
    G = pair_groupoid(1)
    custom = CoordGroupoid(G.base_dim, G.arrow_dim, G.src, G.tgt, G.ident, G.inv, G.comp,
                           family="custom")
    with pytest.raises(ModelError):
        check_multiplicative(PoissonCoordGroupoid(custom, PolyBivector.zero(2)))


@pytest.mark.parametrize("k", [1, 2])
def test_symplectic_m4(k):
    PD = symplectic_double_m4(k)
    assert PD.pi.matrix().det() != 0
    assert PD.multiplicative("V").ok and PD.multiplicative("H").ok
    assert PD.is_symplectic()
    dm = compute_DMaps(PD)
    assert dm.ok, dm.report.first
    assert dm.DV.T == -dm.DH
    assert all(dm.checks.values()), dm.checks


def test_dmaps_pair_example_values():
    dm = compute_DMaps(symplectic_double_m4(1))
    # D_H is pi_P^#: T*P -> TP
    assert dm.DH == standard_bivector(1).matrix().T
    assert dm.DV == Mat([[0, 1], [-1, 0]])


def test_side_duality():
    rep = verify_side_duality(symplectic_double_m4(1))
    assert rep.ok, rep.report.first
    piM = standard_bivector(1).matrix()
    assert rep.pi_P == piM
    assert rep.pi_C == Mat.block_diag(piM, -piM)      # C = P x P-bar


def test_side_duality_degenerate():
    rep = verify_side_duality(zero_double_m4(1))
    assert not rep.ok
    assert not rep.checks["D_H and D_V are isomorphisms"]
    assert rep.report.first["witness"]["rank D_H"] == 0


def test_thm_pairs():
    rep = verify_thm_pairs(m4_double_groupoid(1))
    assert rep.ok, rep.report.first
    assert rep.checks["D_H = j'^V o R_H"] and rep.checks["D_V = (j'^H)^-1 o R_V"]
    assert rep.checks["j'^H is Tulczyjew's map"]
    assert rep.tulczyjew_sign == {"D_H": 1, "D_V": 1}


def test_thm_pairs_detects_opposite_sign():
    rep = verify_thm_pairs(m4_double_groupoid(1), bivector=-standard_bivector(4))
    assert not rep.checks["D_H = j'^V o R_H"]
    assert rep.tulczyjew_sign == {"D_H": -1, "D_V": -1}


# ---------------------------------------------------------------------------
# PVB and LA-groupoids


def test_multiplicative_form_hand_value():
    G = pair_groupoid(2)
    one = Poly.const(2, 1)
    xi = multiplicative_form(G, form(one, zero(2)))
    assert xi == PolyMap(4, [Poly.const(4, c) for c in (1, 0, -1, 0)])


def test_morphic_sections():
    rep = morphic_section_checks(symplectic_pair_groupoid(1), Sampler(11), count=12)
    assert rep.ok, rep.report.first
    assert len(rep.sections) >= 10
    kinds = {r["kind"] for r in rep.sections}
    assert kinds == {"morphic", "perturbed"}
    for r in rep.sections:
        assert r["equivalent"]
        if r["kind"] == "perturbed":
            w = r["witness (v, u)"]
            assert not r["morphic"] and not r["l_xi morphism"]
            assert w["lhs"] != w["rhs"]
        else:
            assert r["projection identity"] and r["identity section"]
    assert rep.brackets and all(b["closure"] for b in rep.brackets)


def test_lapvb_both_directions():
    PG = symplectic_pair_groupoid(1)
    for d in ("forward", "converse"):
        rep = verify_lapvb(d, PG)
        assert rep.ok, (d, rep.report.first)
    with pytest.raises(ValueError):
        verify_lapvb("sideways", PG)


def test_needed():
    assert verify_needed(symplectic_double_m4(1)).ok
    assert verify_needed(zero_double_m4(1)).ok


def test_needed_corruption():
    rep = verify_needed(symplectic_double_m4(1), corrupt="anchor")
    assert not rep.ok and not rep.maps["source"]
    w = next(f for f in rep.report.failures if f["check"].startswith("source"))["witness"]
    assert "X" in w and "X'" in w


def test_needed_requires_poisson_double():
    p = standard_bivector(1)
    D = m4_double_groupoid(2)
    bad = PoissonCoordDouble(D, p.embed(8, 0) + p.embed(8, 2))
    with pytest.raises(PoissonError):
        verify_needed(bad)

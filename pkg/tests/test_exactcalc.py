from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from symdouble.exactcalc import (
    Mat, Poly, PolyMap, Sampler, mat_solve, poly_diff, polymap_equal_on_samples,
    polymap_tangent_lift, vf_bracket,
)

x, y = Poly.var(2, 0), Poly.var(2, 1)

fracs = st.fractions(max_denominator=50).filter(lambda v: abs(v) < 1000)


@given(fracs, fracs, fracs)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    if a:
        assert a * (1 / a) == 1
    s = a + b
    assert s.denominator > 0


def test_poly_diff_examples():
    assert poly_diff(x * x * y, 0) == 2 * x * y
    assert poly_diff(Poly.const(2, 5), 1).is_zero()
    assert poly_diff(3 * x + y, 0) == Poly.const(2, 3)
    with pytest.raises(IndexError):
        poly_diff(x, 2)


def test_poly_normal_form_drops_zeros():
    assert (x - x).terms == {}
    assert Poly(2, {(1, 0): 0}).is_zero()


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_leibniz_rule(seed):
    s = Sampler(seed)
    p, r = s.poly(3, 2), s.poly(3, 2)
    for i in range(3):
        assert (p * r).diff(i) == p.diff(i) * r + p * r.diff(i)


def test_mat_solve_examples():
    b = (F(1), F(-2), F(3, 4))
    part, ker = mat_solve(Mat.identity(3), b)
    assert part == b and ker.ncols == 0

    part, ker = mat_solve(Mat.zeros(2, 2), (0, 0))
    assert part == (0, 0) and ker.ncols == 2

    part, ker = mat_solve(Mat([[1, 1]]), (2,))
    assert part == (2, 0)
    assert ker.ncols == 1 and ker.column(0) in {(1, -1), (-1, 1)}

    assert Mat([[1, 1], [1, 1]]).solve((1, 2)) is None
    with pytest.raises(ValueError):
        Mat([[1, 1]]).solve((1, 2))


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_mat_solve_property(seed):
    s = Sampler(seed)
    A = s.matrix(s.integer(1, 4), s.integer(1, 4))
    b = A @ s.vector(A.ncols)
    part, ker = mat_solve(A, b)
    assert A @ part == b
    assert (A @ ker).is_zero()
    assert ker.ncols == A.ncols - A.rank()


def _fd_bracket(X, Y, pt, h=F(1, 7)):
    # central differences are exact for polynomials of degree <= 2
    n = len(pt)

    def d(f, j):
        up = list(pt); up[j] += h
        dn = list(pt); dn[j] -= h
        return [(a - b) / (2 * h) for a, b in zip(f(up), f(dn))]

    Xv, Yv = X(pt), Y(pt)
    out = [F(0)] * n
    for j in range(n):
        dY, dX = d(Y, j), d(X, j)
        for i in range(n):
            out[i] += Xv[j] * dY[i] - Yv[j] * dX[i]
    return tuple(out)


def test_vf_bracket_examples():
    dx = PolyMap(2, [Poly.const(2, 1), Poly(2)])
    dy = PolyMap(2, [Poly(2), Poly.const(2, 1)])
    assert all(p.is_zero() for p in vf_bracket(dx, dy).components)

    X = PolyMap(2, [Poly(2), x])  # x d/dy
    Y = PolyMap(2, [y, Poly(2)])  # y d/dx
    expected = PolyMap(2, [x, -y])
    assert vf_bracket(X, Y) == expected
    s = Sampler(3)
    for _ in range(5):
        pt = s.vector(2)
        assert _fd_bracket(X, Y, pt) == expected(pt)
    assert all(p.is_zero() for p in vf_bracket(X, X).components)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_vf_bracket_jacobi(seed):
    s = Sampler(seed)
    X, Y, Z = (s.polymap(2, 2, 2) for _ in range(3))
    total = (vf_bracket(X, vf_bracket(Y, Z)) + vf_bracket(Y, vf_bracket(Z, X))
             + vf_bracket(Z, vf_bracket(X, Y)))
    assert all(p.is_zero() for p in total.components)


def test_tangent_lift_examples():
    ident = PolyMap.identity(2)
    assert polymap_tangent_lift(ident) == PolyMap.identity(4)

    A = Mat([[1, 2], [3, 4]])
    lifted = polymap_tangent_lift(PolyMap.from_matrix(A))
    assert lifted.matrix() == Mat.block_diag(A, A)

    sq = PolyMap(1, [Poly.var(1, 0) ** 2])
    assert polymap_tangent_lift(sq)((3, 1)) == (9, 6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_tangent_lift_functorial(seed):
    s = Sampler(seed)
    f, g = s.polymap(2, 3, 2), s.polymap(3, 2, 1)
    lhs = polymap_tangent_lift(g.compose(f))
    rhs = polymap_tangent_lift(g).compose(polymap_tangent_lift(f))
    assert lhs == rhs


def test_equal_on_samples():
    f = PolyMap(2, [x * y + 1])
    assert polymap_equal_on_samples(f, f, symbolic=True)
    assert polymap_equal_on_samples(PolyMap(2, [x - x]), PolyMap.zero(2, 1), symbolic=True)
    sq = PolyMap(1, [Poly.var(1, 0) ** 2])
    ident = PolyMap.identity(1)
    assert not polymap_equal_on_samples(sq, ident, points=[(2,), (3,)])
    assert not polymap_equal_on_samples(sq, ident, Sampler(1), trials=10)
    with pytest.raises(ValueError):
        polymap_equal_on_samples(sq, PolyMap.identity(2))


def test_det_and_inverse():
    m = Mat([[2, 1], [1, 1]])
    assert m.det() == 1
    assert m @ m.inv() == Mat.identity(2)
    with pytest.raises(ZeroDivisionError):
        Mat([[1, 2], [2, 4]]).inv()

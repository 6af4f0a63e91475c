from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from symdouble.dvb import (
    DVBError, PairingConditionError, SplitDVB, add_horizontal, add_vertical, double_dual_iso,
    dual_horizontal, dual_vertical, induced_iso, pair_duals, pair_duals_closed, pairing_matrix,
    scale_horizontal, tangent_model, unfamiliar_projection, unfamiliar_projection_by_evaluation,
)
from symdouble.exactcalc import Sampler

dims = st.tuples(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))


def test_pairing_hand_value():
    E = SplitDVB(1, 1, 1)
    phi = E.vdual_element([2], [3], [5])
    psi = E.hdual_element([7], [11], [5])
    assert pair_duals(phi, psi) == -19
    assert pair_duals(phi, psi, k=[F(4, 9)]) == -19
    assert pair_duals_closed(phi, psi) == -19


def test_pairing_requires_common_kappa():
    E = SplitDVB(1, 1, 1)
    with pytest.raises(DVBError):
        pair_duals(E.vdual_element([1], [1], [1]), E.hdual_element([1], [1], [2]))


def test_dual_shapes():
    E = SplitDVB(2, 3, 4)
    assert dual_vertical(E).dims == (2, 4, 3)
    assert dual_horizontal(E).dims == (4, 3, 2)


@settings(max_examples=30, deadline=None)
@given(dims, st.integers(0, 10_000))
def test_pairing_independent_of_xi(d, seed):
    s = Sampler(seed)
    E = SplitDVB(*d)
    kappa = s.vector(E.dim_core)
    phi = E.vdual_element(s.vector(E.dim_h), s.vector(E.dim_v), kappa)
    psi = E.hdual_element(s.vector(E.dim_h), s.vector(E.dim_v), kappa)
    val = pair_duals(phi, psi)
    assert val == pair_duals(phi, psi, k=s.vector(E.dim_core))
    assert val == pair_duals_closed(phi, psi)


@settings(max_examples=20, deadline=None)
@given(dims, st.integers(0, 10_000))
def test_pairing_nondegenerate(d, seed):
    s = Sampler(seed)
    E = SplitDVB(*d)
    M = pairing_matrix(E, s.vector(E.dim_core))
    assert M.rank() == E.dim_h + E.dim_v


@settings(max_examples=20, deadline=None)
@given(dims, st.integers(0, 10_000))
def test_unfamiliar_projection(d, seed):
    s = Sampler(seed)
    E = SplitDVB(*d)
    phi = E.vdual_element(s.vector(E.dim_h), s.vector(E.dim_v), s.vector(E.dim_core))
    assert unfamiliar_projection(phi) == unfamiliar_projection_by_evaluation(phi)


@settings(max_examples=20, deadline=None)
@given(dims, st.integers(0, 10_000))
def test_interchange_of_additions(d, seed):
    s = Sampler(seed)
    E = SplitDVB(*d)
    a1, a2, b1, b2 = s.vector(E.dim_h), s.vector(E.dim_h), s.vector(E.dim_v), s.vector(E.dim_v)
    e11, e12 = E.random_element(s, a1, b1), E.random_element(s, a1, b2)
    e21, e22 = E.random_element(s, a2, b1), E.random_element(s, a2, b2)
    lhs = add_horizontal(add_vertical(e11, e12), add_vertical(e21, e22))
    rhs = add_vertical(add_horizontal(e11, e21), add_horizontal(e12, e22))
    assert lhs == rhs


@settings(max_examples=15, deadline=None)
@given(dims, st.integers(0, 10_000))
def test_double_dual_core_sign(d, seed):
    rep = double_dual_iso(SplitDVB(*d), Sampler(seed))
    assert rep.sides_identity
    assert rep.core_sign == -1


def test_induced_iso_rejects_bad_pairings():
    E = SplitDVB(1, 1, 1)
    D = SplitDVB(1, 1, 1)

    def good(d, xi):
        return d.b[0] * xi.k[0] + d.k[0] * xi.b[0]

    iso = induced_iso(D, E, good)
    assert iso(D.element([1], [2], [3])) == E.vdual_element([1], [3], [2])

    def cores_touch(d, xi):
        return good(d, xi) + d.k[0] * xi.k[0]

    with pytest.raises(PairingConditionError) as err:
        induced_iso(D, E, cores_touch)
    assert err.value.condition == "iii"

    def degenerate(d, xi):
        return d.k[0] * xi.b[0]

    with pytest.raises(PairingConditionError) as err:
        induced_iso(D, E, degenerate)
    assert err.value.condition == "i"

    def not_additive(d, xi):
        return good(d, xi) + d.a[0] * xi.a[0] * d.b[0]

    with pytest.raises(PairingConditionError) as err:
        induced_iso(D, E, not_additive)
    assert err.value.condition in {"iv", "v"}


def test_scale_horizontal_keeps_b():
    E = SplitDVB(1, 1, 1)
    e = E.element([2], [3], [5])
    assert scale_horizontal(2, e) == E.element([4], [3], [10])


def test_tangent_R_closed_form():
    T = tangent_model(1, 1)
    assert T.R((0,), (1,), (3,), (2,)) == ((0,), (2,), (-3,), (1,))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10_000))
def test_tangent_R_solved_matches(m, k, seed):
    s = Sampler(seed)
    T = tangent_model(m, k)
    args = (s.vector(m), s.vector(k), s.vector(m), s.vector(k))
    assert T.R(*args) == T.R_solved(*args)


def test_tangent_pairing_value():
    T = tangent_model(1, 1)
    X = ((0,), (F(3),), (1,), (F(2),))
    xi = ((0,), (F(4),), (1,), (F(7),))
    assert T.tangent_pairing(X, xi) == 2 * 4 + 3 * 7


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10_000))
def test_transported_pairings(m, k, seed):
    s = Sampler(seed)
    T = tangent_model(m, k)
    x, phi = s.vector(m), s.vector(k)
    Fv = (x, phi, s.vector(m), s.vector(k))
    X = (x, phi, s.vector(m), s.vector(k))
    assert T.induced_pairing_TAstar(Fv, X) == T.standard_pairing(Fv, X)
    xi = (x, s.vector(k), tuple(-v for v in X[2]), s.vector(k))
    assert T.induced_pairing_TA_TAstar(xi, X) == T.tangent_pairing(X, T.negate_TA(xi))

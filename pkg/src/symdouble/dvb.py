"""Split double vector bundles over a point and their two duals.

A split double vector bundle E = A + B + K has side bundles E^H = A and
E^V = B and core K. Its vertical structure is E -> E^H (adds b and k over a
fixed a) and its horizontal structure is E -> E^V (adds a and k over a fixed
b).

Elements of the vertical dual E^{*V} are triples (a, beta, kappa) with beta a
covector on E^V and kappa a covector on K; elements of the horizontal dual
E^{*H} are (alpha, b, kappa).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .exactcalc import Mat, Sampler, q


def _vec(v, n, what):
    v = tuple(q(x) for x in v)
    if len(v) != n:
        raise ValueError(f"{what} has length {len(v)}, expected {n}")
    return v


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _scale(t, v):
    return tuple(t * a for a in v)


def _unit(n, i):
    return tuple(Fraction(int(j == i)) for j in range(n))


class DVBError(ValueError):
    pass


@dataclass(frozen=True)
class SplitDVB:
    dim_h: int
    dim_v: int
    dim_core: int
    label: str = "E"

    @property
    def total_dim(self) -> int:
        return self.dim_h + self.dim_v + self.dim_core

    @property
    def dims(self):
        return (self.dim_h, self.dim_v, self.dim_core)

    def element(self, a, b, k) -> "DVBElement":
        return DVBElement(self, _vec(a, self.dim_h, "a"), _vec(b, self.dim_v, "b"),
                          _vec(k, self.dim_core, "k"))

    def zero_vertical(self, a) -> "DVBElement":
        """Zero of E -> E^H over a."""
        return self.element(a, [0] * self.dim_v, [0] * self.dim_core)

    def zero_horizontal(self, b) -> "DVBElement":
        """Zero of E -> E^V over b."""
        return self.element([0] * self.dim_h, b, [0] * self.dim_core)

    def core_element(self, k) -> "DVBElement":
        return self.element([0] * self.dim_h, [0] * self.dim_v, k)

    def random_element(self, s: Sampler, a=None, b=None) -> "DVBElement":
        return self.element(a if a is not None else s.vector(self.dim_h),
                            b if b is not None else s.vector(self.dim_v),
                            s.vector(self.dim_core))

    def vdual_element(self, a, beta, kappa) -> "DualVElement":
        return DualVElement(self, _vec(a, self.dim_h, "a"), _vec(beta, self.dim_v, "beta"),
                            _vec(kappa, self.dim_core, "kappa"))

    def hdual_element(self, alpha, b, kappa) -> "DualHElement":
        return DualHElement(self, _vec(alpha, self.dim_h, "alpha"), _vec(b, self.dim_v, "b"),
                            _vec(kappa, self.dim_core, "kappa"))


@dataclass(frozen=True)
class DVBElement:
    owner: SplitDVB
    a: tuple
    b: tuple
    k: tuple

    def vertical_projection(self):
        return self.a

    def horizontal_projection(self):
        return self.b


@dataclass(frozen=True)
class DualVElement:
    """Element (a, beta, kappa) of E^{*V}; ``owner`` is E itself."""
    owner: SplitDVB
    a: tuple
    beta: tuple
    kappa: tuple

    def __call__(self, xi: DVBElement) -> Fraction:
        """Pairing with xi over the same point of E^H."""
        if xi.owner != self.owner:
            raise DVBError("element of a different double vector bundle")
        if xi.a != self.a:
            raise DVBError("covector and vector lie over different points of E^H")
        return _dot(self.beta, xi.b) + _dot(self.kappa, xi.k)

    def as_element(self) -> DVBElement:
        return dual_vertical(self.owner).element(self.a, self.kappa, self.beta)


@dataclass(frozen=True)
class DualHElement:
    """Element (alpha, b, kappa) of E^{*H}; ``owner`` is E itself."""
    owner: SplitDVB
    alpha: tuple
    b: tuple
    kappa: tuple

    def __call__(self, xi: DVBElement) -> Fraction:
        if xi.owner != self.owner:
            raise DVBError("element of a different double vector bundle")
        if xi.b != self.b:
            raise DVBError("covector and vector lie over different points of E^V")
        return _dot(self.alpha, xi.a) + _dot(self.kappa, xi.k)

    def as_element(self) -> DVBElement:
        return dual_horizontal(self.owner).element(self.kappa, self.b, self.alpha)


def add_vertical(e1: DVBElement, e2: DVBElement) -> DVBElement:
    if e1.owner != e2.owner:
        raise DVBError("elements of different bundles")
    if e1.a != e2.a:
        raise DVBError("vertical addition needs equal E^H components")
    return e1.owner.element(e1.a, _add(e1.b, e2.b), _add(e1.k, e2.k))


def add_horizontal(e1: DVBElement, e2: DVBElement) -> DVBElement:
    if e1.owner != e2.owner:
        raise DVBError("elements of different bundles")
    if e1.b != e2.b:
        raise DVBError("horizontal addition needs equal E^V components")
    return e1.owner.element(_add(e1.a, e2.a), e1.b, _add(e1.k, e2.k))


def scale_vertical(t, e: DVBElement) -> DVBElement:
    t = q(t)
    return e.owner.element(e.a, _scale(t, e.b), _scale(t, e.k))


def scale_horizontal(t, e: DVBElement) -> DVBElement:
    t = q(t)
    return e.owner.element(_scale(t, e.a), e.b, _scale(t, e.k))


def dual_vertical(E: SplitDVB) -> SplitDVB:
    """E^{*V}: sides E^H and K*, core (E^V)*."""
    return SplitDVB(E.dim_h, E.dim_core, E.dim_v, f"{E.label}*V")


def dual_horizontal(E: SplitDVB) -> SplitDVB:
    """E^{*H}: sides K* and E^V, core (E^H)*."""
    return SplitDVB(E.dim_core, E.dim_v, E.dim_h, f"{E.label}*H")


def flip(E: SplitDVB) -> SplitDVB:
    """The same bundle with the roles of the two sides exchanged."""
    return SplitDVB(E.dim_v, E.dim_h, E.dim_core, f"{E.label}~")


def flip_element(e: DVBElement) -> DVBElement:
    return flip(e.owner).element(e.b, e.a, e.k)


def unfamiliar_projection(phi: DualVElement) -> tuple:
    """Projection E^{*V} -> K*."""
    return phi.kappa


def unfamiliar_projection_by_evaluation(phi: DualVElement) -> tuple:
    """Same projection, computed by evaluating phi on 0^V_X +_H core(k)."""
    E = phi.owner
    base = E.zero_vertical(phi.a)
    return tuple(phi(add_horizontal(base, E.core_element(_unit(E.dim_core, j))))
                 for j in range(E.dim_core))


def admissible_xi(phi: DualVElement, psi: DualHElement, k=None) -> DVBElement:
    E = phi.owner
    return E.element(phi.a, psi.b, k if k is not None else [0] * E.dim_core)


def pair_duals(phi: DualVElement, psi: DualHElement, k=None) -> Fraction:
    """<Phi, Psi> = <Psi, xi> - <Phi, xi> for any xi over (Phi's a, Psi's b).

    ``k`` picks the core component of xi; the value does not depend on it.
    """
    if phi.owner != psi.owner:
        raise DVBError("duals of different bundles")
    if phi.kappa != psi.kappa:
        raise DVBError("Phi and Psi lie over different points of K*")
    xi = admissible_xi(phi, psi, k)
    return psi(xi) - phi(xi)


def pair_duals_closed(phi: DualVElement, psi: DualHElement) -> Fraction:
    """Split closed form <phi, X> - <psi, x>."""
    if phi.kappa != psi.kappa:
        raise DVBError("Phi and Psi lie over different points of K*")
    return _dot(psi.alpha, phi.a) - _dot(phi.beta, psi.b)


def pairing_matrix(E: SplitDVB, kappa, k=None) -> Mat:
    """Gram matrix of the pairing between the fibres of E^{*V} and E^{*H} over kappa.

    Fibre coordinates are (a, beta) and (alpha, b) respectively.
    """
    n = E.dim_h + E.dim_v

    def phi_of(v):
        return E.vdual_element(v[:E.dim_h], v[E.dim_h:], kappa)

    def psi_of(v):
        return E.hdual_element(v[:E.dim_h], v[E.dim_h:], kappa)

    return Mat([[pair_duals(phi_of(_unit(n, i)), psi_of(_unit(n, j)), k) for j in range(n)]
                for i in range(n)], n)


# ---------------------------------------------------------------------------
# pairings of double vector bundles sharing a side


class PairingConditionError(DVBError):
    def __init__(self, condition: str, witness):
        super().__init__(f"condition {condition} fails; witness {witness}")
        self.condition = condition
        self.witness = witness


@dataclass(frozen=True)
class InducedIso:
    """F: D -> E^{*V}, F(d)(xi) = <d, xi>, recorded by its three component maps."""
    D: SplitDVB
    E: SplitDVB
    side_map: Mat      # D^V -> L*  (L the core of E)
    core_map: Mat      # K -> (E^V)*  (K the core of D)
    pairing: Callable

    def __call__(self, d: DVBElement) -> DualVElement:
        E = self.E
        a = d.a
        beta = [self.pairing(d, E.element(a, _unit(E.dim_v, i), [0] * E.dim_core))
                for i in range(E.dim_v)]
        kappa = [self.pairing(d, E.element(a, [0] * E.dim_v, _unit(E.dim_core, j)))
                 for j in range(E.dim_core)]
        return E.vdual_element(a, beta, kappa)

    def split_form(self, d: DVBElement) -> DualVElement:
        return self.E.vdual_element(d.a, self.core_map @ d.k, self.side_map @ d.b)


def induced_iso(D: SplitDVB, E: SplitDVB, pairing: Callable, sampler: Sampler | None = None,
                trials: int = 10) -> InducedIso:
    """Check the five pairing conditions and return the induced isomorphism.

    ``pairing(d, xi)`` must be defined for d in D, xi in E with d.a == xi.a.
    Raises :class:`PairingConditionError` naming the failing condition.
    """
    if D.dim_h != E.dim_h:
        raise DVBError("D and E must share the side E^H")
    s = sampler or Sampler(0)
    A = D.dim_h
    zA = [0] * A

    # (i) <0^H_x, core(l)> is a nondegenerate pairing of D^V and L
    m1 = Mat([[pairing(D.element(zA, _unit(D.dim_v, i), [0] * D.dim_core),
                       E.element(zA, [0] * E.dim_v, _unit(E.dim_core, j)))
               for i in range(D.dim_v)] for j in range(E.dim_core)], D.dim_v)
    if D.dim_v != E.dim_core or m1.rank() != D.dim_v:
        raise PairingConditionError("i", {"matrix": m1})
    # (ii) <core(k), 0^H_y> is a nondegenerate pairing of K and E^V
    m2 = Mat([[pairing(D.element(zA, [0] * D.dim_v, _unit(D.dim_core, i)),
                       E.element(zA, _unit(E.dim_v, j), [0] * E.dim_core))
               for i in range(D.dim_core)] for j in range(E.dim_v)], D.dim_core)
    if D.dim_core != E.dim_v or m2.rank() != D.dim_core:
        raise PairingConditionError("ii", {"matrix": m2})
    # (iii) cores are orthogonal
    for i in range(D.dim_core):
        for j in range(E.dim_core):
            v = pairing(D.core_element(_unit(D.dim_core, i)), E.core_element(_unit(E.dim_core, j)))
            if v:
                raise PairingConditionError("iii", {"k": i, "l": j, "value": v})
    for _ in range(trials):
        # (iv) additivity for the horizontal additions
        b1, b2 = s.vector(D.dim_v), s.vector(E.dim_v)
        a1, a2 = s.vector(A), s.vector(A)
        d1, d2 = D.random_element(s, a1, b1), D.random_element(s, a2, b1)
        x1, x2 = E.random_element(s, a1, b2), E.random_element(s, a2, b2)
        lhs = pairing(add_horizontal(d1, d2), add_horizontal(x1, x2))
        rhs = pairing(d1, x1) + pairing(d2, x2)
        if lhs != rhs:
            raise PairingConditionError("iv", {"d1": d1, "d2": d2, "xi1": x1, "xi2": x2})
        # (v) homogeneity for the horizontal scalar multiplications
        t = s.scalar()
        if pairing(scale_horizontal(t, d1), scale_horizontal(t, x1)) != t * pairing(d1, x1):
            raise PairingConditionError("v", {"t": t, "d": d1, "xi": x1})
        # bilinearity over A and nondegeneracy of the vertical pairing
        d3 = D.random_element(s, a1)
        if pairing(add_vertical(d1, d3), x1) != pairing(d1, x1) + pairing(d3, x1):
            raise PairingConditionError("bilinear", {"d1": d1, "d3": d3, "xi": x1})
    a = s.vector(A)
    fd = D.dim_v + D.dim_core
    fe = E.dim_v + E.dim_core

    def delem(v):
        return D.element(a, v[:D.dim_v], v[D.dim_v:])

    def eelem(v):
        return E.element(a, v[:E.dim_v], v[E.dim_v:])

    gram = Mat([[pairing(delem(_unit(fd, i)), eelem(_unit(fe, j))) for j in range(fe)]
                for i in range(fd)], fe)
    if fd != fe or gram.rank() != fd:
        raise PairingConditionError("nondegenerate", {"a": a, "gram": gram})
    iso = InducedIso(D, E, side_map=m1, core_map=m2, pairing=pairing)
    for _ in range(trials):
        d = D.random_element(s)
        if iso(d) != iso.split_form(d):
            raise PairingConditionError("split", {"d": d})
    return iso


def pairing_of_duals(E: SplitDVB) -> Callable:
    """The pairing of flip(E^{*V}) with E^{*H} over their shared side K*."""
    def pairing(d: DVBElement, xi: DVBElement) -> Fraction:
        phi = E.vdual_element(d.b, d.k, d.a)
        psi = E.hdual_element(xi.k, xi.b, xi.a)
        return pair_duals(phi, psi)
    return pairing


@dataclass(frozen=True)
class DoubleDualReport:
    iso: InducedIso
    side_k: Mat
    side_h: Mat
    core: Mat

    @property
    def core_sign(self) -> int:
        n = self.core.nrows
        if self.core == Mat.identity(n):
            return 1
        if self.core == -Mat.identity(n):
            return -1
        return 0

    @property
    def sides_identity(self) -> bool:
        return (self.side_k == Mat.identity(self.side_k.nrows)
                and self.side_h == Mat.identity(self.side_h.nrows))


def double_dual_iso(E: SplitDVB, sampler: Sampler | None = None) -> DoubleDualReport:
    """E^{*V} -> (E^{*H})^{*V} induced by the pairing of the two duals."""
    D = flip(dual_vertical(E))
    E2 = dual_horizontal(E)
    iso = induced_iso(D, E2, pairing_of_duals(E), sampler)
    return DoubleDualReport(iso, side_k=Mat.identity(E.dim_core), side_h=iso.side_map,
                            core=iso.core_map)


# ---------------------------------------------------------------------------
# tangent and cotangent models of a trivial vector bundle A = R^m x R^k


@dataclass(frozen=True)
class TangentModel:
    """TA and T*A for the trivial bundle with base dim m and fibre dim k.

    Coordinates: TA (x, a, dx, da); T(A*) (x, phi, dx, dphi);
    T*A (x, a, p, phi); T*(A*) (x, phi, p, a).
    """
    m: int
    k: int

    @property
    def TA(self) -> SplitDVB:
        # sides A and TM, core A
        return SplitDVB(self.k, self.m, self.k, "TA")

    @property
    def TstarA(self) -> SplitDVB:
        # sides A and A*, core T*M
        return SplitDVB(self.k, self.k, self.m, "T*A")

    def R(self, x, phi, p, a):
        """R: T*(A*) -> T*A."""
        return (tuple(x), tuple(q(v) for v in a), tuple(-q(v) for v in p),
                tuple(q(v) for v in phi))

    def R_solved(self, x, phi, p, a):
        """R determined pointwise from <F, X> + <R(F), xi> = <<X, xi>>."""
        m, k = self.m, self.k
        # unknowns (p', phi') ; test vectors run over (dx, dphi, da)
        rows, rhs = [], []
        n = m + 2 * k
        for t in range(n):
            v = _unit(n, t)
            dx, dphi, da = v[:m], v[m:m + k], v[m + k:]
            X = (x, phi, dx, dphi)
            xi = (x, a, dx, da)
            lhs_known = _dot(p, dx) + _dot(a, dphi)
            rows.append(list(dx) + list(da))
            rhs.append(self.tangent_pairing(X, xi) - lhs_known)
        M = Mat(rows, m + k)
        sol = M.solve(rhs)
        if sol is None or M.rank() != m + k:
            raise DVBError("R is not determined by its defining identity")
        return (tuple(x), tuple(q(v) for v in a), sol[:m], sol[m:])

    def tangent_pairing(self, X, xi) -> Fraction:
        """<<(x, phi, dx, dphi), (x, a, dx, da)>> = <dphi, a> + <phi, da>."""
        x1, phi, dx1, dphi = X
        x2, a, dx2, da = xi
        if tuple(map(q, x1)) != tuple(map(q, x2)) or tuple(map(q, dx1)) != tuple(map(q, dx2)):
            raise DVBError("tangent pairing needs a common point of TM")
        return _dot(dphi, a) + _dot(phi, da)

    def I(self, X) -> DualHElement:
        """I: T(A*) -> T^dual A, as an element of the horizontal dual of TA."""
        x, phi, dx, dphi = X
        return self.TA.hdual_element(dphi, dx, phi)

    def Rstar_as_vdual(self, x, phi, p, a) -> DualVElement:
        """R(F) as an element of T*A = TA^{*V}."""
        _, a2, pp, phi2 = self.R(x, phi, p, a)
        return self.TA.vdual_element(a2, pp, phi2)

    def induced_pairing_TAstar(self, F, X) -> Fraction:
        """Pairing of T*(A*) and T(A*) transported from the duals of TA."""
        return pair_duals(self.Rstar_as_vdual(*F), self.I(X))

    @staticmethod
    def standard_pairing(F, X) -> Fraction:
        x, phi, p, a = F
        x2, phi2, dx, dphi = X
        return _dot(p, dx) + _dot(a, dphi)

    # the double cotangent bundle E = T*A

    def TA_as_vdual_of_TstarA(self, xi) -> DualVElement:
        x, a, dx, da = xi
        return self.TstarA.vdual_element(a, da, dx)

    def TAstar_as_hdual_of_TstarA(self, X) -> DualHElement:
        """(R^{-1})^*: T(A*) -> (T*A)^{*H}; sends velocity -dx to kappa = dx."""
        x, phi, dx, dphi = X
        return self.TstarA.hdual_element(dphi, phi, [-v for v in map(q, dx)])

    def induced_pairing_TA_TAstar(self, xi, X) -> Fraction:
        return pair_duals(self.TA_as_vdual_of_TstarA(xi), self.TAstar_as_hdual_of_TstarA(X))

    @staticmethod
    def negate_TA(xi):
        x, a, dx, da = xi
        return (x, a, tuple(-q(v) for v in dx), tuple(-q(v) for v in da))


def tangent_model(m: int, k: int) -> TangentModel:
    return TangentModel(m, k)

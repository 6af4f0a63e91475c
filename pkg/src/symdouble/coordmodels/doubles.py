"""Double groupoids on coordinate spaces.

A double groupoid S carries a vertical structure S => H and a horizontal
structure S => V over side groupoids H => M and V => M. ``SV`` and ``SH``
below are those two structures as ordinary CoordGroupoids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..exactcalc import Mat, PolyMap, Sampler, projection
from ..fingpd import GroupoidError, ValidationReport
from .groupoids import (
    CoordGroupoid, ModelError, _select, check_groupoid_morphism, check_identity, left_inv,
    pair_groupoid, param, validate_groupoid,
)
from .algebroids import lie_algebroid


@dataclass(frozen=True, eq=False)
class CoordDoubleGroupoid:
    H: CoordGroupoid
    V: CoordGroupoid
    SV: CoordGroupoid       # S => H
    SH: CoordGroupoid       # S => V
    name: str = "S"
    family: str = "custom"
    meta: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.SV.arrow_dim

    @property
    def base_dim(self) -> int:
        return self.H.base_dim

    def double_unit(self, m) -> tuple:
        """1^2_m, the vertical unit at the horizontal unit of m."""
        return self.SV.unit(self.H.unit(m))

    def double_unit_map(self) -> PolyMap:
        return self.SV.ident @ self.H.ident

    def require_registered(self):
        for G in (self.H, self.V, self.SV, self.SH):
            G.require_registered()


def _mat(f: PolyMap) -> Mat:
    return f.matrix()


def quadruple_basis(D: CoordDoubleGroupoid) -> Mat:
    """Columns spanning (s1, s2, s3, s4) with s1 s2 and s3 s4 vertically
    composable, s1 s3 and s2 s4 horizontally composable."""
    if "quad" not in D._cache:
        n = D.dim
        SV, TV = _mat(D.SV.src), _mat(D.SV.tgt)
        SH, TH = _mat(D.SH.src), _mat(D.SH.tgt)
        rows = []

        def eq(i, A, j, B):
            blocks = [Mat.zeros(A.nrows, n) for _ in range(4)]
            blocks[i] = A
            blocks[j] = -B
            rows.append(Mat.hstack(*blocks))

        eq(0, SV, 1, TV)
        eq(2, SV, 3, TV)
        eq(0, SH, 2, TH)
        eq(1, SH, 3, TH)
        D._cache["quad"] = Mat.vstack(*rows).kernel()
    return D._cache["quad"]


def _fibred_product_basis(A: Mat, B: Mat) -> Mat:
    """Columns spanning {(x, y): A x = B y}."""
    return Mat.hstack(A, -B).kernel()


def validate_double(D: CoordDoubleGroupoid, sampler: Sampler | None = None,
                    trials: int = 25) -> ValidationReport:
    """The four groupoids, the compatibility conditions, and the double source."""
    s = sampler or Sampler(0)
    D.require_registered()
    rep = ValidationReport()
    for G, tag in ((D.H, "H"), (D.V, "V"), (D.SV, "vertical"), (D.SH, "horizontal")):
        validate_groupoid(G, s, trials, rep, prefix=f"{tag}: ")
    H, V, SV, SH = D.H, D.V, D.SV, D.SH
    # horizontal structure maps are morphisms of the vertical structures
    check_groupoid_morphism(rep, "horizontal source", SH.src, SV, V, H.src, s, trials)
    check_groupoid_morphism(rep, "horizontal target", SH.tgt, SV, V, H.tgt, s, trials)
    check_groupoid_morphism(rep, "horizontal unit", SH.ident, V, SV, H.ident, s, trials)
    check_groupoid_morphism(rep, "horizontal inverse", SH.inv, SV, SV, H.inv, s, trials)
    # vertical structure maps are morphisms of the horizontal structures
    check_groupoid_morphism(rep, "vertical source", SV.src, SH, H, V.src, s, trials)
    check_groupoid_morphism(rep, "vertical target", SV.tgt, SH, H, V.tgt, s, trials)
    check_groupoid_morphism(rep, "vertical unit", SV.ident, H, SH, V.ident, s, trials)
    check_groupoid_morphism(rep, "vertical inverse", SV.inv, SH, SH, V.inv, s, trials)
    # the two compositions: ends and interchange
    n = D.dim
    for tag, A, B, side in (("horizontal", SH, SV, H), ("vertical", SV, SH, V)):
        P2 = param(A.composable_basis())
        fst, snd = projection(2 * n, range(n)), projection(2 * n, range(n, 2 * n))
        for end, f, g in (("source", B.src, side.comp), ("target", B.tgt, side.comp)):
            check_identity(rep, f"{tag} product: {end}", f @ A.comp @ P2,
                           g @ (f @ fst).pair(f @ snd) @ P2, P2, s, trials)
        Pu = param(_fibred_product_basis(_mat(side.src), _mat(side.tgt)))
        m = side.arrow_dim
        u1, u2 = projection(2 * m, range(m)), projection(2 * m, range(m, 2 * m))
        check_identity(rep, f"{tag} product of units", A.comp @ (B.ident @ u1).pair(B.ident @ u2) @ Pu,
                       B.ident @ side.comp @ Pu, Pu, s, trials)
        check_identity(rep, f"{tag} product of inverses",
                       A.comp @ (B.inv @ fst).pair(B.inv @ snd) @ P2, B.inv @ A.comp @ P2,
                       P2, s, trials)
    Q = param(quadruple_basis(D))
    p = [projection(4 * n, range(i * n, (i + 1) * n)) for i in range(4)]
    vert = lambda a, b: SV.comp @ a.pair(b)
    horiz = lambda a, b: SH.comp @ a.pair(b)
    check_identity(rep, "interchange", horiz(vert(p[0], p[1]), vert(p[2], p[3])) @ Q,
                   vert(horiz(p[0], p[2]), horiz(p[1], p[3])) @ Q, Q, s, trials)
    # the double source S -> H x_M V is onto
    rep.checks += 1
    joint = Mat.vstack(_mat(SV.src), _mat(SH.src))
    fib = _fibred_product_basis(_mat(H.src), _mat(V.src))
    if joint.rank() != fib.ncols:
        rep.fail("double source surjective", {"rank": joint.rank(), "needed": fib.ncols})
    return rep


# ---------------------------------------------------------------------------
# M^4


def m4_double_groupoid(n: int) -> CoordDoubleGroupoid:
    """S = (R^n)^4 with coordinates (w, x, z, y): w top-left, x top-right,
    z bottom-left, y bottom-right. H and V are pair groupoids."""
    H = pair_groupoid(n)
    V = pair_groupoid(n)
    I2 = Mat.vstack(Mat.identity(n), Mat.identity(n))
    # vertical: (w, x) over (z, y)
    SV = CoordGroupoid.linear(
        S=_select(4, n, [2, 3]), T=_select(4, n, [0, 1]),
        U=Mat.vstack(Mat.identity(2 * n), Mat.identity(2 * n)),
        I=_select(4, n, [2, 3, 0, 1]), C=_select(8, n, [0, 1, 6, 7]),
        name=f"M4v({n})", family="pair")
    # horizontal: (w, z) on the left, (x, y) on the right
    SH = CoordGroupoid.linear(
        S=_select(4, n, [1, 3]), T=_select(4, n, [0, 2]),
        U=Mat.block_diag(I2, I2) if n else Mat.zeros(0, 0),
        I=_select(4, n, [1, 0, 3, 2]), C=_select(8, n, [0, 5, 2, 7]),
        name=f"M4h({n})", family="pair")
    return CoordDoubleGroupoid(H, V, SV, SH, name=f"M4(R^{n})", family="m4")


def double_source_section(D: CoordDoubleGroupoid) -> Mat:
    """A linear right inverse of S -> H x_M V, on the fibred-product coordinates."""
    joint = Mat.vstack(_mat(D.SV.src), _mat(D.SH.src))
    fib = _fibred_product_basis(_mat(D.H.src), _mat(D.V.src))
    sol = joint.solve_mat(fib)
    if sol is None:
        raise ModelError("double source is not onto")
    return sol @ left_inv(fib)


# ---------------------------------------------------------------------------
# core groupoid


@dataclass(frozen=True, eq=False)
class CoreOfDouble:
    groupoid: CoordGroupoid     # coordinates: coefficients in ``basis``
    basis: Mat                  # columns spanning C inside S
    boundary_H: Mat             # C -> H
    boundary_V: Mat             # C -> V
    report: ValidationReport


def core_of_double(D: CoordDoubleGroupoid, sampler: Sampler | None = None,
                   trials: int = 25) -> CoreOfDouble:
    """C = {c : horizontal and vertical sources of c are units over one m}.

    c' . c = (c' o_H 1~^V) o_V c = (c' o_V 1~^H) o_H c, units at the targets of c.
    """
    try:
        D.require_registered()
    except ModelError:
        raise ModelError(f"{D.name}: core needs a registered family") from None
    s = sampler or Sampler(0)
    H, V, SV, SH = D.H, D.V, D.SV, D.SH
    n, m = D.dim, D.base_dim
    eqs = Mat.vstack(Mat.hstack(_mat(SH.src), -_mat(V.ident)),
                     Mat.hstack(_mat(SV.src), -_mat(H.ident)))
    ker = eqs.kernel()
    Cb = ker.rowslice(0, n)
    if Cb.rank() != Cb.ncols:
        raise ModelError("core equations do not determine the base point")
    L = left_inv(Cb)
    dc = Cb.ncols
    emb = PolyMap.from_matrix(Cb)
    back = PolyMap.from_matrix(L)
    c1 = emb @ projection(2 * dc, range(dc))
    c0 = emb @ projection(2 * dc, range(dc, 2 * dc))

    def vert(a, b):
        return SV.comp @ a.pair(b)

    def horiz(a, b):
        return SH.comp @ a.pair(b)

    prod1 = vert(horiz(c1, SV.ident @ SV.tgt @ c0), c0)
    prod2 = horiz(vert(c1, SH.ident @ SH.tgt @ c0), c0)
    inv1 = vert(SH.inv @ emb, SH.ident @ V.inv @ SH.tgt @ emb)
    inv2 = horiz(SV.inv @ emb, SV.ident @ H.inv @ SV.tgt @ emb)
    src = V.src @ SH.src @ emb
    tgt = V.tgt @ SH.tgt @ emb
    unit = back @ D.double_unit_map()
    C = CoordGroupoid(m, dc, src, tgt, unit, back @ inv1, back @ prod1,
                      name=f"C({D.name})", family="core", meta={"double": D, "basis": Cb})
    rep = ValidationReport()
    P2 = param(C.composable_basis())
    proj = PolyMap.from_matrix(Cb @ L)
    check_identity(rep, "core products lie in the core", proj @ prod1 @ P2, prod1 @ P2, P2, s)
    check_identity(rep, "two core products agree", prod1 @ P2, prod2 @ P2, P2, s)
    check_identity(rep, "core inverses lie in the core", proj @ inv1, inv1, None, s)
    check_identity(rep, "two core inverses agree", inv1, inv2, None, s)
    check_identity(rep, "core unit is the double unit", emb @ unit, D.double_unit_map(), None, s)
    validate_groupoid(C, s, trials, rep, prefix="core: ")
    dH = _mat(SV.tgt) @ Cb
    dV = _mat(SH.tgt) @ Cb
    idm = PolyMap.identity(m)
    check_groupoid_morphism(rep, "boundary to H", PolyMap.from_matrix(dH), C, H, idm, s, trials)
    check_groupoid_morphism(rep, "boundary to V", PolyMap.from_matrix(dV), C, V, idm, s, trials)
    return CoreOfDouble(C, Cb, dH, dV, rep)


def core_algebroid_basis(D: CoordDoubleGroupoid) -> Mat:
    """Columns of S spanning AC along the double units."""
    core = D._cache.get("core")
    if core is None:
        core = D._cache["core"] = core_of_double(D)
    return core.basis @ lie_algebroid(core.groupoid).meta["basis"]


# ---------------------------------------------------------------------------
# morphisms


def infer_base_morphism(phi: PolyMap, phiH: PolyMap, phiV: PolyMap, D1: CoordDoubleGroupoid,
                        D2: CoordDoubleGroupoid, sampler: Sampler | None = None,
                        trials: int = 25) -> PolyMap:
    """The map of double bases forced by phi(1^2_m) = 1^2_{phi_M(m)}.

    (phi, phiH) must be a morphism of the vertical structures and (phi, phiV)
    of the horizontal ones; both are checked at sampled composable points.
    """
    s = sampler or Sampler(0)
    rep = ValidationReport()
    for tag, A, B, side in (("vertical", D1.SV, D2.SV, phiH), ("horizontal", D1.SH, D2.SH, phiV)):
        n = A.arrow_dim
        for _ in range(trials):
            g = s.vector(n)
            for end, f1, f2 in (("source", A.src, B.src), ("target", A.tgt, B.tgt)):
                rep.expect(f2(phi(g)) == side(f1(g)), f"{tag} {end}", {"point": g})
            h, g2 = A.random_composable(s)
            lhs = phi(A.comp(h + g2))
            rhs = B.comp(phi(h) + phi(g2))
            rep.expect(lhs == rhs, f"{tag} product", {"pair": (h, g2)})
            if not rep.ok:
                raise GroupoidError(f"not a double morphism: {rep.first}")
    phiM = D2.H.src @ D2.SV.src @ phi @ D1.double_unit_map()
    lhs = phi @ D1.double_unit_map()
    rhs = D2.double_unit_map() @ phiM
    check_identity(rep, "double units", lhs, rhs, None, s, trials)
    for tag, G1, G2, f in (("H", D1.H, D2.H, phiH), ("V", D1.V, D2.V, phiV)):
        check_identity(rep, f"{tag} source over base", G2.src @ f, phiM @ G1.src, None, s, trials)
        check_identity(rep, f"{tag} target over base", G2.tgt @ f, phiM @ G1.tgt, None, s, trials)
    if not rep.ok:
        raise GroupoidError(f"not a double morphism: {rep.first}")
    return phiM

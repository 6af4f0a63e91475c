"""Prolonged pairings for VB-groupoids Omega = G x F with G linear.

Coordinates (at a base point m, everything being translation invariant):

    A Omega      (x, a, k)        x in AG, a in A, k in K      SplitDVB(g, a, k)
    A(Omega*)    (x, kappa, phi)  kappa in K*, phi in A*       SplitDVB(g, k, a)
    A^dual Omega (x, beta, kappa)   dual of A Omega over AG
    A* Omega     (alpha, a, kappa)  dual of A Omega over A
    A* Omega*    (alpha, kappa, a)  dual of A(Omega*) over K*

The elements of A Omega are velocities (Kb x, Kf k) at the identity over a,
those of A(Omega*) are velocities (Kb x, P phi) at the identity over kappa.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..dvb import SplitDVB, induced_iso, pair_duals
from ..exactcalc import Mat, Sampler
from ..fingpd import FinVBGroupoid, core as vb_core, dual_core_basis, pradines_dual
from .groupoids import CoordGroupoid, ModelError, as_finvb, core_basis_of


def _dot(u, v) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def _unit(n, i):
    return tuple(int(j == i) for j in range(n))


@dataclass(frozen=True, eq=False)
class ProductVBModel:
    """Omega = G x F over G, with side A and core K from the constant fibre F."""
    G: CoordGroupoid
    F: FinVBGroupoid
    core: Mat
    name: str = "Omega"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dims(self):
        return core_basis_of(self.G).ncols, self.F.side_dims[0], self.core.ncols

    @property
    def A_omega(self) -> SplitDVB:
        g, a, k = self.dims
        return SplitDVB(g, a, k, f"A{self.name}")

    @property
    def A_omega_star(self) -> SplitDVB:
        g, a, k = self.dims
        return SplitDVB(g, k, a, f"A({self.name}*)")

    @property
    def dual(self) -> FinVBGroupoid:
        if "dual" not in self._cache:
            self._cache["dual"] = pradines_dual(self.F, core_basis={0: self.core})
        return self._cache["dual"]

    @property
    def dual_core(self) -> Mat:
        """P: the core of Omega* as covectors phi_bar, columns indexed by A*."""
        if "P" not in self._cache:
            K = vb_core(self.F, {0: self.core})
            self._cache["P"] = dual_core_basis(self.F, K)[0]
        return self._cache["P"]

    # tangent representatives

    def xi_velocity(self, x, a, k) -> tuple:
        """(point, velocity) in G x F of the element (x, a, k) of A Omega."""
        Kb = core_basis_of(self.G)
        point = (0,) * self.G.arrow_dim + self.F.id_lin[0] @ tuple(a)
        return point, Kb @ tuple(x) + self.core @ tuple(k)

    def big_x_velocity(self, x, kappa, phi) -> tuple:
        """(point, velocity) in G x F* of the element (x, kappa, phi) of A(Omega*)."""
        Kb = core_basis_of(self.G)
        point = (0,) * self.G.arrow_dim + self.dual.id_lin[0] @ tuple(kappa)
        return point, Kb @ tuple(x) + self.dual_core @ tuple(phi)

    def prolonged_pairing(self, X, Xi) -> Fraction:
        """<<X, Xi>> = d/dt <Phi_t, xi_t> at t = 0, for X in A(Omega*), Xi in A Omega."""
        if tuple(X.a) != tuple(Xi.a):
            raise ModelError("prolonged pairing needs a common point of AG")
        N = self.G.arrow_dim
        p1, v1 = self.big_x_velocity(X.a, X.b, X.k)
        p2, v2 = self.xi_velocity(Xi.a, Xi.b, Xi.k)
        return _dot(v1[N:], p2[N:]) + _dot(p1[N:], v2[N:])


def product_model(G: CoordGroupoid, F: FinVBGroupoid, core: Mat, name="Omega") -> ProductVBModel:
    G.require_registered()
    if len(F.base.arrows) != 1:
        raise ModelError("the fibre must sit over the one-point groupoid")
    if F.src_lin[0] @ core != Mat.zeros(F.side_dims[0], core.ncols):
        raise ModelError("core basis is not in the kernel of the fibre source")
    return ProductVBModel(G, F, core, name)


def tangent_model_of(G: CoordGroupoid) -> ProductVBModel:
    """Omega = TG: fibre G itself, side TM, core AG."""
    return product_model(G, as_finvb(G), core_basis_of(G), f"T{G.name}")


def _polar(f, n1: int, n2: int) -> Mat:
    """Bilinear part of a form that is affine in each argument."""
    z1, z2 = (0,) * n1, (0,) * n2
    c = f(z1, z2)
    r = [f(z1, _unit(n2, j)) for j in range(n2)]
    return Mat([[f(_unit(n1, i), _unit(n2, j)) - f(_unit(n1, i), z2) - r[j] + c
                 for j in range(n2)] for i in range(n1)], n2)


def _place(blocks, row_dims, col_dims) -> Mat:
    """Assemble a block matrix; blocks maps (row block, col block) to a Mat."""
    rows = []
    for bi, rd in enumerate(row_dims):
        for i in range(rd):
            r = []
            for bj, cd in enumerate(col_dims):
                B = blocks.get((bi, bj))
                r.extend(B.rows[i] if B is not None else [0] * cd)
            rows.append(r)
    return Mat(rows, sum(col_dims))


@dataclass
class ProlongedDuality:
    """I, the dagger pairing, R and eps for one model, as exact matrices.

    Fibre matrices act over a fixed kappa in K*; full matrices act on the
    coordinates listed in the module docstring.
    """
    model: ProductVBModel
    I_full: Mat           # A(Omega*) -> A^dual Omega
    I_fibre: Mat          # (x, phi) -> (x, beta)
    dagger: Mat           # Gram matrix, rows (x, phi), columns (alpha, a)
    standard: Mat         # Gram matrix of A(Omega*) with A* Omega*
    R_fibre: Mat          # (alpha', a') -> (alpha, a)
    R_full: Mat           # (alpha', kappa, a') -> (alpha, a, kappa)
    eps: Mat              # rows (x, beta), columns (alpha, a)
    I_dagger_eps: Mat     # (alpha, a) -> (alpha', a')
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def R_core_map(self) -> Mat:
        g = self.model.dims[0]
        return self.R_fibre.rowslice(0, g).cols(0, g)

    def to_dict(self) -> dict:
        return {"checks": dict(self.checks), "I": self.I_full, "dagger": self.dagger,
                "R": self.R_full, "core map of R": self.R_core_map()}


def dagger_pairing(model: ProductVBModel, X, Psi, k=None) -> Fraction:
    """The dagger pairing of X in A(Omega*) with Psi in A* Omega, through any Xi over (x, a)."""
    if tuple(X.b) != tuple(Psi.kappa):
        raise ModelError("dagger pairing needs a common point of K*")
    E = model.A_omega
    Xi = E.element(X.a, Psi.b, k if k is not None else (0,) * E.dim_core)
    return model.prolonged_pairing(X, Xi) - Psi(Xi)


def prolonged_duality(model: ProductVBModel, sampler: Sampler | None = None,
                      trials: int = 3) -> ProlongedDuality:
    s = sampler or Sampler(0)
    g, a, k = model.dims
    D, E = model.A_omega_star, model.A_omega
    iso = induced_iso(D, E, model.prolonged_pairing, s)
    checks = {}
    I_full = _place({(0, 0): Mat.identity(g), (1, 2): iso.core_map, (2, 1): iso.side_map},
                    (g, a, k), (g, k, a))
    checks["I is over K*"] = iso.side_map == Mat.identity(k)
    n = g + a
    results = []
    for t in range(trials):
        kappa = s.vector(k) if t else (0,) * k

        def Xel(v):
            return D.element(v[:g], kappa, v[g:])

        def Psiel(v):
            return E.hdual_element(v[:g], v[g:], kappa)

        kk = [s.vector(k) for _ in range(3)]
        X0, P0 = Xel(s.vector(n)), Psiel(s.vector(n))
        vals = {dagger_pairing(model, X0, P0, c) for c in kk}
        checks.setdefault("dagger independent of Xi", True)
        checks["dagger independent of Xi"] &= len(vals) == 1
        Z = _polar(lambda u, v: dagger_pairing(model, Xel(u), Psiel(v)), n, n)
        Std = _polar(lambda u, v: D.hdual_element(v[:g], kappa, v[g:])(Xel(u)), n, n)
        Eps = _polar(lambda u, v: -pair_duals(E.vdual_element(u[:g], u[g:], kappa), Psiel(v)),
                     n, n)
        MI = Mat.from_cols([tuple(p - q for p, q in zip(iso(Xel(_unit(n, j))).a
                                                        + iso(Xel(_unit(n, j))).beta,
                                                        iso(Xel((0,) * n)).a
                                                        + iso(Xel((0,) * n)).beta))
                            for j in range(n)], n)
        results.append((Z, Std, Eps, MI))
    Z, Std, Eps, MI = results[0]
    checks["fibre matrices independent of kappa"] = all(r == results[0] for r in results)
    checks["dagger nondegenerate"] = Z.rank() == n
    R = Z.solve_mat(Std) if Z.rank() == n else Mat.zeros(n, n)
    Q = Std.solve_mat(MI.T @ Eps)
    checks["R = (I^dagger eps)^-1"] = Q is not None and R @ Q == Mat.identity(n) \
        and Q @ R == Mat.identity(n)
    R_full = _place({(0, 0): R.rowslice(0, g).cols(0, g), (0, 2): R.rowslice(0, g).cols(g, n),
                     (1, 0): R.rowslice(g, n).cols(0, g), (1, 2): R.rowslice(g, n).cols(g, n),
                     (2, 1): Mat.identity(k)}, (g, a, k), (g, k, a))
    checks["R core map is -id"] = R.rowslice(0, g).cols(0, g) == -Mat.identity(g)
    checks["R over A"] = (R.rowslice(g, n).cols(g, n) == Mat.identity(a)
                          and R.rowslice(g, n).cols(0, g).is_zero())
    # the two special values of the dagger pairing
    sv1 = sv2 = True
    for _ in range(trials):
        phi, x = s.vector(a), s.vector(a)
        zk = (0,) * k
        sv1 &= dagger_pairing(model, D.core_element(phi), E.hdual_element((0,) * g, x, zk)) \
            == _dot(phi, x)
        X, psi = s.vector(g), s.vector(g)
        sv2 &= dagger_pairing(model, D.element(X, zk, (0,) * a),
                              E.hdual_element(psi, (0,) * a, zk)) == -_dot(psi, X)
    checks["dagger(phi_bar, 0_x) = <phi, x>"] = sv1
    checks["dagger(A(0)(X), psi_bar) = -<psi, X>"] = sv2
    # <<0_X, phi_bar>> = <phi, X>
    pv = True
    for _ in range(trials):
        X, phi = s.vector(a), s.vector(a)
        lhs = model.prolonged_pairing(D.core_element(phi), E.element((0,) * g, X, (0,) * k))
        pv &= lhs == _dot(phi, X)
    checks["<<0_X, phi_bar>> = <phi, X>"] = pv
    return ProlongedDuality(model, I_full, MI, Z, Std, R, R_full, Eps,
                            Q if Q is not None else Mat.zeros(n, n), checks)


def prolonged_duality_maps(G: CoordGroupoid, sampler: Sampler | None = None) -> ProlongedDuality:
    """I, R, dagger and eps for Omega = TG."""
    try:
        G.require_registered()
    except ModelError:
        raise ModelError(f"{G.name}: prolonged duality needs a registered family") from None
    return prolonged_duality(tangent_model_of(G), sampler)


# ---------------------------------------------------------------------------
# double groupoids: A^2 S, A_2 S and the canonical involution


def side_models(D) -> tuple:
    """(Omega_V, Omega_H): A_V S over H and A_H S over V as product models."""
    from .cotdouble import prolonged_fibre
    if "side models" not in D._cache:
        fV, fH = prolonged_fibre(D, "V"), prolonged_fibre(D, "H")
        D._cache["side models"] = (product_model(D.H, fV.F, fV.core, f"A_V{D.name}"),
                                   product_model(D.V, fH.F, fH.core, f"A_H{D.name}"))
    return D._cache["side models"]


def _embedding(D, which: str) -> Mat:
    """A^2 S (which="V") or A_2 S (which="H") inside T^2 S, coordinates (s, kappa, ds, dkappa)."""
    from .cotdouble import prolonged_fibre
    pf = prolonged_fibre(D, which)
    if which == "V":
        side, own, other = D.H, D.SV, D.SH
    else:
        side, own, other = D.V, D.SH, D.SV
    Kside = core_basis_of(side)
    N = D.dim
    g, a, k = Kside.ncols, pf.side.ncols, pf.core.ncols
    return _place({(1, 1): pf.ambient @ pf.F.id_lin[0],
                   (2, 0): own.mats["U"] @ Kside,
                   (3, 2): pf.ambient @ pf.core}, (N, N, N, N), (g, a, k))


def canonical_involution(N: int) -> Mat:
    """J on T^2 R^N: (s, kappa, ds, dkappa) -> (s, ds, kappa, dkappa)."""
    I = Mat.identity(N)
    return _place({(0, 0): I, (1, 2): I, (2, 1): I, (3, 3): I}, (N,) * 4, (N,) * 4)


@dataclass
class JMaps:
    j: Mat            # (hdot, Y, k) in A^2 S -> (vdot, X, k) in A_2 S
    j_inv: Mat
    up: Mat           # embedding of A^2 S
    down: Mat         # embedding of A_2 S
    dims: tuple       # (dim AH, dim AV, dim AC)
    checks: dict


def canonical_j(D) -> JMaps:
    """Restriction of the involution of T^2 S to A^2 S -> A_2 S."""
    try:
        D.require_registered()
    except ModelError:
        raise ModelError(f"{D.name}: j needs a registered family") from None
    up, down = _embedding(D, "V"), _embedding(D, "H")
    J = canonical_involution(D.dim)
    j = down.solve_mat(J @ up)
    if j is None:
        raise ModelError("the involution does not carry A^2 S into A_2 S")
    back = up.solve_mat(J @ down)
    h = core_basis_of(D.H).ncols
    v = core_basis_of(D.V).ncols
    c = up.ncols - h - v
    checks = {
        "J^2 = id": J @ J == Mat.identity(4 * D.dim),
        "j invertible": j.nrows == j.ncols and j.rank() == j.ncols,
        "reverse restriction inverts j": back is not None and back @ j == Mat.identity(j.ncols),
        "preserves AH": j.rowslice(v, v + h) == _place({(0, 0): Mat.identity(h)}, (h,), (h, v, c)),
        "preserves AV": j.rowslice(0, v) == _place({(0, 1): Mat.identity(v)}, (v,), (h, v, c)),
        "preserves AC": j.rowslice(v + h, v + h + c).cols(0, h + v).is_zero(),
    }
    return JMaps(j, j.inv() if checks["j invertible"] else j, up, down, (h, v, c), checks)


def _dual_of_j(jm: JMaps, over: str) -> Mat:
    """Psi -> Psi o j.

    over="H": (alpha, X, kappa) in A_2S^{*H} -> (hdot, beta, kappa) in A^2S^{*V}.
    over="V": (vdot, beta, kappa) in A_2S^{*V} -> (alpha, Y, kappa) in A^2S^{*H}.
    """
    h, v, c = jm.dims
    j = jm.j
    jr = {"a": j.rowslice(0, v), "b": j.rowslice(v, v + h), "k": j.rowslice(v + h, v + h + c)}
    if over == "H":
        # Psi(j xi) = alpha . (j xi)_a + kappa . (j xi)_k, with xi = (X, Y, k)
        cov = Mat.hstack(jr["a"].T, jr["k"].T)          # rows (h, v, c), columns (alpha, kappa)
        if not cov.rowslice(0, h).is_zero():
            raise ModelError("j does not preserve AH")
        return _place({(0, 1): Mat.identity(h),
                       (1, 0): cov.rowslice(h, h + v).cols(0, v),
                       (1, 2): cov.rowslice(h, h + v).cols(v, v + c),
                       (2, 0): cov.rowslice(h + v, h + v + c).cols(0, v),
                       (2, 2): cov.rowslice(h + v, h + v + c).cols(v, v + c)},
                      (h, v, c), (v, h, c))
    cov = Mat.hstack(jr["b"].T, jr["k"].T)               # columns (beta, kappa)
    if not cov.rowslice(h, h + v).is_zero():
        raise ModelError("j does not preserve AV")
    return _place({(0, 1): cov.rowslice(0, h).cols(0, h),
                   (0, 2): cov.rowslice(0, h).cols(h, h + c),
                   (1, 0): Mat.identity(v),
                   (2, 1): cov.rowslice(h + v, h + v + c).cols(0, h),
                   (2, 2): cov.rowslice(h + v, h + v + c).cols(h, h + c)},
                  (h, v, c), (v, h, c))


@dataclass
class JPrime:
    jm: JMaps
    IV: ProlongedDuality
    IH: ProlongedDuality
    jsV: Mat          # A*(A_H S) -> A^dual(A_V S)
    jsH: Mat          # A^dual(A_H S) -> A*(A_V S)
    jpV: Mat          # A*(A_H S) -> A(A*_V S)
    jpH: Mat          # A(A*_H S) -> A*(A_V S)
    checks: dict


def jprime_maps(D, sampler: Sampler | None = None, trials: int = 10) -> JPrime:
    s = sampler or Sampler(0)
    jm = canonical_j(D)
    OV, OH = side_models(D)
    IV, IH = prolonged_duality(OV, s), prolonged_duality(OH, s)
    jsV, jsH = _dual_of_j(jm, "H"), _dual_of_j(jm, "V")
    jpV = IV.I_full.solve_mat(jsV)
    jpH = jsH @ IH.I_full
    checks = {"j' maps defined": jpV is not None}
    h, v, c = jm.dims
    up, dn = OV.A_omega, OH.A_omega
    ok1 = ok2 = True
    for _ in range(trials):
        # <<X, Xi>>_AH = <(j'^V)^-1 X, j Xi>
        x = s.vector(h)
        X = OV.A_omega_star.element(x, s.vector(c), s.vector(v))
        Xi = up.element(x, s.vector(v), s.vector(c))
        w = jpV.solve(X.a + X.b + X.k)
        jXi = jm.j @ (Xi.a + Xi.b + Xi.k)
        Psi = dn.hdual_element(w[:v], w[v:v + h], w[v + h:])
        ok1 &= OV.prolonged_pairing(X, Xi) == Psi(dn.element(jXi[:v], jXi[v:v + h], jXi[v + h:]))
        # <<Y, Phi>>_AV = <j'^H Y, j^-1 Phi>
        y = s.vector(v)
        Y = OH.A_omega_star.element(y, s.vector(c), s.vector(h))
        Phi = dn.element(y, s.vector(h), s.vector(c))
        u = jpH @ (Y.a + Y.b + Y.k)
        back = jm.j_inv @ (Phi.a + Phi.b + Phi.k)
        Psi2 = up.hdual_element(u[:h], u[h:h + v], u[h + v:])
        ok2 &= OH.prolonged_pairing(Y, Phi) == Psi2(up.element(back[:h], back[h:h + v],
                                                                back[h + v:]))
    checks["<<X, Xi>>_AH = <(j'V)^-1 X, j Xi>"] = ok1
    checks["<<Y, Phi>>_AV = <j'H Y, j^-1 Phi>"] = ok2
    return JPrime(jm, IV, IH, jsV, jsH, jpV, jpH, checks)


# ---------------------------------------------------------------------------
# Tulczyjew


def tulczyjew_map(n: int) -> Mat:
    """TT*R^n -> T*TR^n over a base point: (xdot, p, pdot) -> (p_x, xdot, p_xdot) = (pdot, xdot, p).

    The full map is (x, p, xdot, pdot) -> (x, xdot, pdot, p); the x block is
    the identity and is dropped.
    """
    I = Mat.identity(n)
    return _place({(0, 2): I, (1, 0): I, (2, 1): I}, (n,) * 3, (n,) * 3)


def anchors(D) -> dict:
    """Anchor matrices of AH, AV and AC."""
    from .algebroids import lie_algebroid
    from .doubles import core_of_double
    core = D._cache.get("core")
    if core is None:
        core = D._cache["core"] = core_of_double(D)
    return {"H": lie_algebroid(D.H).anchor_matrix(), "V": lie_algebroid(D.V).anchor_matrix(),
            "C": lie_algebroid(core.groupoid).anchor_matrix()}


@dataclass
class TulczyjewReport:
    jpH: Mat              # j'^H moved to TT*M -> T*TM coordinates
    jpV_inv: Mat          # (j'^V)^-1 likewise
    expected: Mat
    checks: dict


def tulczyjew_check(D, jp: JPrime | None = None) -> TulczyjewReport:
    """Compare j'^H and (j'^V)^-1 with Tulczyjew's map, identifying AH, AV, AC
    with TM through their anchors and the duals with T*M through the inverse
    transposes."""
    jp = jp or jprime_maps(D)
    rho = anchors(D)
    n = D.base_dim
    for key, r in rho.items():
        if r.shape != (n, n) or r.rank() != n:
            raise ModelError(f"anchor of A{key} is not an isomorphism onto TM")
    dual = {key: r.inv().T for key, r in rho.items()}
    # A(A*_H S) (vdot, kappa, phi) -> (xdot, p, pdot); A*(A_V S) (alpha, Y, kappa) -> (p_x, xdot, p_xdot)
    src_H = Mat.block_diag(rho["V"], dual["C"], dual["H"])
    tgt_H = Mat.block_diag(dual["H"], rho["V"], dual["C"])
    # A(A*_V S) (x, kappa, phi) -> (xdot, p, pdot); A*(A_H S) (alpha, X, kappa) -> (p_x, xdot, p_xdot)
    src_V = Mat.block_diag(rho["H"], dual["C"], dual["V"])
    tgt_V = Mat.block_diag(dual["V"], rho["H"], dual["C"])
    a = tgt_H @ jp.jpH @ src_H.inv()
    b = tgt_V @ jp.jpV.inv() @ src_V.inv()
    T = tulczyjew_map(n)
    return TulczyjewReport(a, b, T, {"j'^H is Tulczyjew's map": a == T,
                                     "(j'^V)^-1 is Tulczyjew's map": b == T})


def dri_compositions(D, jp: JPrime | None = None) -> dict:
    """j'^V o R_H : A*(A*_H S) -> A(A*_V S) and (j'^H)^-1 o R_V : A*(A*_V S) -> A(A*_H S)."""
    jp = jp or jprime_maps(D)
    return {"H": jp.jpV @ jp.IH.R_full, "V": jp.jpH.inv() @ jp.IV.R_full, "jprime": jp}

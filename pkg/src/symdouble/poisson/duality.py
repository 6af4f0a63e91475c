"""D_H, D_V, the induced structures on the sides and core, and side duality.

For a Poisson double S the anchor of A*_V S is a~_{*H} = a_*(vertical
structure), a map A*_V S -> TH over H. Its core map is D_H: A*V -> AH, read
through the dual core basis of the prolonged fibre. Symmetrically for D_V.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..exactcalc import Mat, Sampler
from ..fingpd import ValidationReport
from ..coordmodels import (
    LieAlgebroidModel, check_algebroid_morphism, core_basis_of, core_of_double, e_map,
    lie_algebroid, prolonged_fibre,
)
from ..coordmodels.groupoids import left_inv
from ..coordmodels.prolong import ProductVBModel, product_model
from .bivectors import PolyBivector
from .groupoids import (
    MultiplicativeReport, PoissonCoordDouble, PoissonCoordGroupoid, base_sharp,
    check_multiplicative, dual_algebroid, sharp_to_bivector,
)


@dataclass
class LieBialgebroidModel:
    A: LieAlgebroidModel
    Astar: LieAlgebroidModel

    def base_sharp(self) -> Mat:
        """a_* o a^*."""
        return self.Astar.anchor_matrix() @ self.A.anchor_matrix().T

    def flip(self) -> "LieBialgebroidModel":
        return LieBialgebroidModel(self.Astar, self.A.negated())

    def flip_agrees(self) -> bool:
        return self.base_sharp() == self.flip().base_sharp()


def _dual_core(D, which: str) -> Mat:
    pf = prolonged_fibre(D, which)
    model: ProductVBModel = product_model(D.H if which == "V" else D.V, pf.F, pf.core)
    return model.dual_core


@dataclass
class InducedStructures:
    """Everything derived from pi_S that the duality statements use."""
    mult_V: MultiplicativeReport
    mult_H: MultiplicativeReport
    pi_H: PolyBivector
    pi_V: PolyBivector
    side_H: MultiplicativeReport      # (H, pi_H) as a Poisson groupoid
    side_V: MultiplicativeReport
    DH: Mat | None
    DV: Mat | None
    report: ValidationReport


def induced_structures(PD: PoissonCoordDouble, sampler: Sampler | None = None) -> InducedStructures:
    if "induced" in PD._cache:
        return PD._cache["induced"]
    s = sampler or Sampler(0)
    D = PD.D
    rep = ValidationReport()
    mV, mH = PD.multiplicative("V", s), PD.multiplicative("H", s)
    rep.expect(mV.ok, "vertical structure is a Poisson groupoid", mV.report.first)
    rep.expect(mH.ok, "horizontal structure is a Poisson groupoid", mH.report.first)
    # pi_H^# = a~_{*H} o a~_V^*, a~_V the anchor of A_V S
    aV = D.SV.mats["T"] @ core_basis_of(D.SV)
    aH = D.SH.mats["T"] @ core_basis_of(D.SH)
    piH = sharp_to_bivector(mV.a_star @ aV.T, "pi_H")
    piV = sharp_to_bivector(mH.a_star @ aH.T, "pi_V")
    Pi = PD.pi.matrix()
    rep.expect(piH.matrix() == D.SV.mats["T"] @ Pi @ D.SV.mats["T"].T,
               "vertical target is a Poisson map", {"pi_H": piH.matrix()})
    rep.expect(piV.matrix() == D.SH.mats["T"] @ Pi @ D.SH.mats["T"].T,
               "horizontal target is a Poisson map", {"pi_V": piV.matrix()})
    sH = check_multiplicative(PoissonCoordGroupoid(D.H, piH), s)
    sV = check_multiplicative(PoissonCoordGroupoid(D.V, piV), s)
    rep.expect(sH.ok, "(H, pi_H) is a Poisson groupoid", sH.report.first)
    rep.expect(sV.ok, "(V, pi_V) is a Poisson groupoid", sV.report.first)
    DH = DV = None
    velH = mV.a_star @ _dual_core(D, "V")
    velV = mH.a_star @ _dual_core(D, "H")
    KH, KV = core_basis_of(D.H), core_basis_of(D.V)
    rep.expect((D.H.mats["S"] @ velH).is_zero(), "D_H lands in AH", {"image": velH})
    rep.expect((D.V.mats["S"] @ velV).is_zero(), "D_V lands in AV", {"image": velV})
    DH, DV = left_inv(KH) @ velH, left_inv(KV) @ velV
    out = InducedStructures(mV, mH, piH, piV, sH, sV, DH, DV, rep)
    PD._cache["induced"] = out
    return out


@dataclass
class DMaps:
    DH: Mat         # A*V -> AH
    DV: Mat         # A*H -> AV
    checks: dict
    report: ValidationReport
    section_pairs: int = 0      # related section pairs fed to the D_V morphism test

    @property
    def ok(self):
        return self.report.ok

    def to_dict(self):
        return {"D_H": self.DH, "D_V": self.DV, "checks": dict(self.checks),
                "section pairs": self.section_pairs, **self.report.to_dict()}


def _bialgebroid(G, pi_side: PolyBivector) -> LieBialgebroidModel:
    return LieBialgebroidModel(lie_algebroid(G), dual_algebroid(PoissonCoordGroupoid(G, pi_side)))


def compute_DMaps(PD: PoissonCoordDouble, sampler: Sampler | None = None,
                  count: int = 10) -> DMaps:
    s = sampler or Sampler(0)
    ind = induced_structures(PD, s)
    D = PD.D
    rep = ValidationReport()
    rep.failures.extend(ind.report.failures)
    rep.ok = ind.report.ok
    DH, DV = ind.DH, ind.DV
    checks = {}
    checks["D_V^T = -D_H"] = DV.T == -DH
    rep.expect(checks["D_V^T = -D_H"], "D_V^T = -D_H", {"D_H": DH, "D_V": DV})
    # the pair example: AV = TP and A*V = T*P through the anchor of V
    aH = ind.side_H.a_star
    rhoV = lie_algebroid(D.V).anchor_matrix()
    checks["D_V = a_*"] = rhoV @ DV == aH
    checks["D_H = -a_*^T"] = DH @ rhoV.T == -aH.T
    if D.family == "m4":
        rep.expect(checks["D_V = a_*"], "D_V = a_*", {"D_V": DV, "a_*": aH})
        rep.expect(checks["D_H = -a_*^T"], "D_H = -a_*^T", {"D_H": DH, "a_*": aH})
    bH = _bialgebroid(D.H, ind.pi_H)
    bV = _bialgebroid(D.V, ind.pi_V)
    checks["flip induces the same base structure"] = bH.flip_agrees() and bV.flip_agrees()
    rep.expect(checks["flip induces the same base structure"], "flip base structure",
               {"H": bH.base_sharp(), "flip H": bH.flip().base_sharp()})
    checks["anchor of A*H is a_*"] = bH.Astar.anchor_matrix() == aH
    rep.expect(checks["anchor of A*H is a_*"], "anchor of A*H is a_*",
               {"restricted": bH.Astar.anchor_matrix(), "a_*": aH})
    idP = Mat.identity(D.base_dim)
    r1 = check_algebroid_morphism(bH.Astar, bV.A, DV, idP, s, count, "D_V: A*H -> AV: ")
    _merge(rep, r1)
    checks["D_V preserves anchors and brackets"] = r1.ok
    if DV.nrows == DV.ncols and DV.rank() == DV.nrows:
        r2 = check_algebroid_morphism(bH.A.negated(), bV.Astar, DV.inv().T, idP, s, count,
                                      "dual of D_V: AH-bar -> A*V: ")
        _merge(rep, r2)
        checks["dual of D_V preserves anchors and brackets"] = r2.ok
    # each related pair contributes a relatedness, an anchor and a bracket check
    return DMaps(DH, DV, checks, rep, r1.checks // 3)


def _merge(rep: ValidationReport, other: ValidationReport):
    rep.checks += other.checks
    if not other.ok:
        rep.ok = False
        rep.failures.extend(other.failures)


# ---------------------------------------------------------------------------
# side duality


@dataclass
class SideDualityReport:
    ok: bool
    checks: dict
    pi_C: Mat | None
    pi_P: Mat | None
    dmaps: DMaps
    report: ValidationReport = field(repr=False)

    def to_dict(self):
        return {"ok": self.ok, "checks": dict(self.checks), "pi_C": self.pi_C,
                "pi_P": self.pi_P, "D_H": self.dmaps.DH, "D_V": self.dmaps.DV,
                **self.report.to_dict()}


def core_bivector(PD: PoissonCoordDouble) -> Mat:
    """pi_C from the core map of pi_S^#: sigma -> L pi_S^T E^T L^T sigma."""
    D = PD.D
    core = D._cache.get("core") or core_of_double(D)
    D._cache.setdefault("core", core)
    Cb, L = core.basis, left_inv(core.basis)
    vel = PD.pi.matrix().T @ e_map(D).T @ L.T
    if Cb @ L @ vel != vel:
        raise ValueError("pi_S^# does not preserve the core")
    return (L @ vel).T


def verify_side_duality(PD: PoissonCoordDouble, sampler: Sampler | None = None,
                        count: int = 10) -> SideDualityReport:
    s = sampler or Sampler(0)
    D = PD.D
    dm = compute_DMaps(PD, s, count)
    rep = ValidationReport()
    checks = {}
    # (i)
    full = all(M.nrows == M.ncols and M.rank() == M.nrows for M in (dm.DH, dm.DV))
    checks["D_H and D_V are isomorphisms"] = full
    rep.expect(full, "D_H and D_V are isomorphisms",
               {"rank D_H": dm.DH.rank(), "rank D_V": dm.DV.rank(), "shape": dm.DH.shape})
    # (ii)
    core = D._cache.get("core") or core_of_double(D, s)
    D._cache.setdefault("core", core)
    C = core.groupoid
    try:
        piC = core_bivector(PD)
    except ValueError as e:
        piC = None
        rep.fail("pi_C defined", str(e))
    ind = induced_structures(PD, s)
    piP = sharp_to_bivector(base_sharp(ind.side_H.a_star, D.H)).matrix()
    piP_V = sharp_to_bivector(base_sharp(ind.side_V.a_star, D.V)).matrix()
    checks["H and V induce the same pi_P"] = piP == piP_V
    rep.expect(checks["H and V induce the same pi_P"], "H and V induce the same pi_P",
               {"from H": piP, "from V": piP_V})
    if piC is not None:
        checks["pi_C antisymmetric"] = piC.T == -piC
        checks["pi_C nondegenerate"] = piC.det() != 0
        rep.expect(checks["pi_C nondegenerate"], "pi_C nondegenerate",
                   {"rank": piC.rank(), "dim": piC.nrows})
        if checks["pi_C antisymmetric"]:
            mC = check_multiplicative(PoissonCoordGroupoid(C, PolyBivector.from_matrix(piC, "pi_C")), s)
            checks["(C, pi_C) is a Poisson groupoid"] = mC.ok
            rep.expect(mC.ok, "(C, pi_C) is a Poisson groupoid", mC.report.first)
            realized = mC.a_star is not None and base_sharp(mC.a_star, C) == piP.T
            checks["a_*C o a_C^* = pi_P^#"] = realized
            rep.expect(realized, "a_*C o a_C^* = pi_P^#",
                       {"a_*C a_C^*": None if mC.a_star is None else base_sharp(mC.a_star, C),
                        "pi_P^#": piP.T})
        else:
            rep.fail("pi_C antisymmetric", {"pi_C": piC})
    # (iii)
    for key in ("D_V preserves anchors and brackets", "dual of D_V preserves anchors and brackets"):
        if key in dm.checks:
            checks[key] = dm.checks[key]
    rep.checks += dm.report.checks
    rep.failures.extend(dm.report.failures)
    rep.ok = rep.ok and dm.report.ok
    return SideDualityReport(rep.ok, checks, piC, piP, dm, rep)


# ---------------------------------------------------------------------------
# the pair (A*_V S, A*_H S) for the cotangent double


@dataclass
class PairsReport:
    ok: bool
    checks: dict
    side: SideDualityReport
    DH_prolonged: Mat           # (alpha', a') -> (x, phi)
    DV_prolonged: Mat
    tulczyjew_sign: dict        # +1 / -1 / None for D_H and D_V against pi_{T*M}^#
    report: ValidationReport = field(repr=False)

    def to_dict(self):
        return {"ok": self.ok, "checks": dict(self.checks),
                "D_H (prolonged coordinates)": self.DH_prolonged,
                "D_V (prolonged coordinates)": self.DV_prolonged,
                "sign against pi_T*M": dict(self.tulczyjew_sign),
                "side duality": self.side.to_dict(), **self.report.to_dict()}


def _split_kappa(M: Mat, dims_in, dims_out):
    """Fibre part and kappa behaviour of a map (u, kappa, w) -> (u', kappa, w')."""
    a, c, b = dims_in
    a2, c2, b2 = dims_out
    rows = list(range(a2)) + list(range(a2 + c2, a2 + c2 + b2))
    cols = list(range(a)) + list(range(a + c, a + c + b))
    fib = Mat([[M[i, j] for j in cols] for i in rows], len(cols))
    kap = Mat([[M[i, j] for j in range(a, a + c)] for i in range(M.nrows)], c)
    expect = Mat.vstack(Mat.zeros(a2, c), Mat.identity(c), Mat.zeros(b2, c))
    into = Mat([[M[i, j] for j in cols] for i in range(a2, a2 + c2)], len(cols))
    return fib, kap == expect and into.is_zero()


def _sign(M: Mat, ref: Mat):
    if M == ref:
        return 1
    if M == -ref:
        return -1
    return None


def verify_thm_pairs(D, sampler: Sampler | None = None, count: int = 10,
                     bivector: PolyBivector | None = None) -> PairsReport:
    """T*S with its canonical bivector (or ``bivector``) as a symplectic double,
    side duality on it, and the DRI factorizations of D_H and D_V."""
    from ..coordmodels import cotangent_double
    from ..coordmodels.prolong import anchors, dri_compositions, jprime_maps, tulczyjew_check
    from .bivectors import standard_bivector
    s = sampler or Sampler(0)
    TD = cotangent_double(D)
    PD = PoissonCoordDouble(TD, bivector or standard_bivector(D.dim, "pi_T*S"))
    side = verify_side_duality(PD, s, count)
    rep = ValidationReport()
    checks = {"T*S is a symplectic double groupoid": PD.is_symplectic()}
    rep.expect(checks["T*S is a symplectic double groupoid"], "T*S symplectic double", None)
    jp = jprime_maps(D, s)
    dri = dri_compositions(D, jp)
    h, v, c = jp.jm.dims
    Kh, Kv = core_basis_of(TD.H), core_basis_of(TD.V)
    Bh = Mat.block_diag(core_basis_of(D.H), _dual_core(D, "V"))
    Bv = Mat.block_diag(core_basis_of(D.V), _dual_core(D, "H"))
    Mh, Mv = left_inv(Kh) @ Bh, left_inv(Kv) @ Bv
    rep.expect(Kh @ Mh == Bh and Kv @ Mv == Bv, "prolonged coordinates span the algebroids", {})
    DHp = Mh.inv() @ side.dmaps.DH @ Mv.inv().T
    DVp = Mv.inv() @ side.dmaps.DV @ Mh.inv().T
    fH, kH = _split_kappa(dri["H"], (v, c, h), (h, c, v))
    fV, kV = _split_kappa(dri["V"], (h, c, v), (v, c, h))
    checks["DRI maps fix kappa"] = kH and kV
    rep.expect(kH and kV, "DRI maps fix kappa", {"H": dri["H"], "V": dri["V"]})
    checks["D_H = j'^V o R_H"] = DHp == fH
    checks["D_V = (j'^H)^-1 o R_V"] = DVp == fV
    rep.expect(checks["D_H = j'^V o R_H"], "D_H = j'^V o R_H", {"D_H": DHp, "j'^V R_H": fH})
    rep.expect(checks["D_V = (j'^H)^-1 o R_V"], "D_V = (j'^H)^-1 o R_V",
               {"D_V": DVp, "(j'^H)^-1 R_V": fV})
    checks.update({k: v_ for k, v_ in jp.checks.items()})
    tz = tulczyjew_check(D, jp)
    checks.update(tz.checks)
    for k, ok in tz.checks.items():
        rep.expect(ok, k, {"j'^H": tz.jpH, "expected": tz.expected})
    # read D_H, D_V on T*(T*M) -> T(T*M) through the anchors
    rho = anchors(D)
    rH, rV = rho["H"], rho["V"]
    ref = standard_bivector(D.base_dim).matrix().T
    TH = Mat.block_diag(rH, rV.inv().T) @ DHp @ Mat.block_diag(rV.T, rH.inv())
    TV = Mat.block_diag(rV, rH.inv().T) @ DVp @ Mat.block_diag(rH.T, rV.inv())
    signs = {"D_H": _sign(TH, ref), "D_V": _sign(TV, ref)}
    checks["DRI maps are pi_T*M^# up to a reported sign"] = None not in signs.values()
    rep.expect(None not in signs.values(), "DRI maps are pi_T*M^# up to sign",
               {"D_H": TH, "D_V": TV, "pi^#": ref})
    rep.checks += side.report.checks
    rep.failures.extend(side.report.failures)
    rep.ok = rep.ok and side.ok
    return PairsReport(rep.ok, checks, side, DHp, DVp, signs, rep)

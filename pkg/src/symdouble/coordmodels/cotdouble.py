"""The cotangent double groupoid (T*S; A*_V S, A*_H S; A*C) and the E map.

For a registered double S the prolonged structures are linear. The fibre of
A_V S = ker T(vertical source) carries the horizontal structure restricted to
it, a linear groupoid over AV with core AC; its dual over the core basis gives
the groupoid A*_V S => A*C. Symmetrically for A*_H S.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..exactcalc import Mat, PolyMap, Sampler
from ..fingpd import FinVBGroupoid, ValidationReport, pradines_dual, trivial_groupoid
from .groupoids import (
    ModelError, check_groupoid_morphism, core_basis_of, groupoid_from_fibre, left_inv,
    product_groupoid,
)
from .cotangent import cotangent_groupoid
from .doubles import CoordDoubleGroupoid, core_algebroid_basis, core_of_double, validate_double


@dataclass(frozen=True, eq=False)
class ProlongedFibre:
    """ker T(src) of one structure of S, with the other structure restricted."""
    F: FinVBGroupoid
    ambient: Mat        # columns: basis of the kernel inside S
    side: Mat           # columns: basis of the side algebroid inside the side groupoid
    core: Mat           # core basis in F coordinates


def _restricted(B: Mat, M: Mat, what: str) -> Mat:
    """Coordinates of the columns of M in the basis B, insisting they lie in its span."""
    out = B.solve_mat(M) if B.ncols else (Mat.zeros(0, M.ncols) if M.is_zero() else None)
    if out is None:
        raise ModelError(f"{what} leaves the subspace")
    return out


def prolonged_fibre(D: CoordDoubleGroupoid, which: str) -> ProlongedFibre:
    """which = "V": ker T(vertical source) with the horizontal structure, over AV.
    which = "H": ker T(horizontal source) with the vertical structure, over AH."""
    key = ("fibre", which)
    if key in D._cache:
        return D._cache[key]
    if which == "V":
        own, other, side = D.SV, D.SH, D.V
    elif which == "H":
        own, other, side = D.SH, D.SV, D.H
    else:
        raise ValueError("which must be 'H' or 'V'")
    Ab = core_basis_of(own)
    Ks = core_basis_of(side)
    M = other.mats
    src = _restricted(Ks, M["S"] @ Ab, "source")
    tgt = _restricted(Ks, M["T"] @ Ab, "target")
    unit = _restricted(Ab, M["U"] @ Ks, "unit")
    inv = _restricted(Ab, M["I"] @ Ab, "inverse")
    comp = _restricted(Ab, M["C"] @ Mat.block_diag(Ab, Ab), "product")
    F = FinVBGroupoid(trivial_groupoid(1), {0: Ks.ncols}, {0: Ab.ncols}, {0: src}, {0: tgt},
                      {0: unit}, {0: inv}, {(0, 0): comp}, f"A_{which}{D.name}")
    core = _restricted(Ab, core_algebroid_basis(D), "core")
    out = ProlongedFibre(F, Ab, Ks, core)
    D._cache[key] = out
    return out


def dual_side(D: CoordDoubleGroupoid, which: str):
    """A*_which S as a groupoid over A*C, coordinates (side arrow, fibre covector)."""
    pf = prolonged_fibre(D, which)
    Fs = pradines_dual(pf.F, core_basis={0: pf.core})
    G = D.H if which == "V" else D.V
    return product_groupoid(G, groupoid_from_fibre(Fs, f"A*_{which}fibre"),
                            name=f"A*_{which}{D.name}"), Fs


def cotangent_double(D: CoordDoubleGroupoid) -> CoordDoubleGroupoid:
    try:
        D.require_registered()
    except ModelError:
        raise ModelError(f"{D.name}: cotangent double needs a registered family") from None
    if "cotangent" in D._cache:
        return D._cache["cotangent"]
    TV = cotangent_groupoid(D.SV)
    TH = cotangent_groupoid(D.SH)
    AsV, FVs = dual_side(D, "V")
    AsH, FHs = dual_side(D, "H")
    for T, A in ((TV, AsV), (TH, AsH)):
        if T.base_dim != A.arrow_dim:
            raise ModelError("side dimensions of the cotangent double do not match")
    out = CoordDoubleGroupoid(AsV, AsH, TV, TH, name=f"T*{D.name}", family="cotangent-double",
                              meta={"base": D, "fibre duals": {"V": FVs, "H": FHs}})
    D._cache["cotangent"] = out
    return out


# ---------------------------------------------------------------------------
# the E map


def e_map(D: CoordDoubleGroupoid) -> Mat:
    """E: T_c S -> T_c C, constant on registered models.

    E(xi) = xi - TL^V_c T1~^H (X - T1^V x) - TL^H_c T1~^V (Y - T1^H z),
    X = T(h-source) xi, x = T(V-target) X, Y = T(v-source) xi, z = T(H-target) Y.
    """
    H, V, SV, SH = D.H, D.V, D.SV, D.SH
    n = D.dim
    mh, mv = H.mats, V.mats
    termV = SV.C2 @ SH.mats["U"] @ (Mat.identity(V.arrow_dim) - mv["U"] @ mv["T"]) @ SH.mats["S"]
    termH = SH.C2 @ SV.mats["U"] @ (Mat.identity(H.arrow_dim) - mh["U"] @ mh["T"]) @ SV.mats["S"]
    return Mat.identity(n) - termV - termH


def core_embedding(D: CoordDoubleGroupoid, c, sigma) -> tuple:
    """Sigma = sigma o E at the core point c (coordinates in the core basis).

    Returns the element (point, covector) of T*S.
    """
    core = core_of_double(D)
    if len(c) != core.basis.ncols:
        raise ModelError("sigma must sit at a core point given in core coordinates")
    E = e_map(D)
    L = left_inv(core.basis)
    Sigma = E.T @ (L.T @ sigma)
    return core.basis @ c, Sigma


@dataclass
class CoreEmbeddingReport:
    ok: bool
    checks: dict
    dim_core: int
    dim_cotangent_core: int
    failures: list

    def to_dict(self):
        return {"ok": self.ok, "checks": self.checks, "dim core(T*S)": self.dim_core,
                "dim T*C": self.dim_cotangent_core, "failures": self.failures}


def core_embedding_report(D: CoordDoubleGroupoid, sampler: Sampler | None = None,
                          trials: int = 10) -> CoreEmbeddingReport:
    s = sampler or Sampler(0)
    core = core_of_double(D, s)
    C = core.groupoid
    TC = cotangent_groupoid(C)
    TD = cotangent_double(D)
    tcore = core_of_double(TD, s)
    E = e_map(D)
    Cb, L = core.basis, left_inv(core.basis)
    n = D.dim
    checks = {}
    rep = ValidationReport()
    # E lands in TC
    rep.expect((Cb @ L @ E) == E, "E lands in the core tangent", {"E": E})
    # sigma -> Sigma on T*C coordinates (c, sigma)
    emb = Mat.block_diag(Cb, E.T @ L.T)
    Lt = left_inv(tcore.basis)
    rep.expect(tcore.basis @ Lt @ emb == emb, "image in the core of T*S", {})
    to_core = Lt @ emb
    dc = C.arrow_dim
    rep.expect(to_core.shape[0] == to_core.shape[1] and to_core.rank() == 2 * dc,
               "bijective onto the core", {"shape": to_core.shape, "rank": to_core.rank()})
    AsV, AsH = TD.H, TD.V
    for _ in range(trials):
        c, sigma = s.vector(dc), s.vector(dc)
        elt = emb @ (tuple(c) + tuple(sigma))
        theta = TC.source(tuple(c) + tuple(sigma))
        rep.expect(TD.SV.source(elt) == AsV.unit(theta), "vertical source is a unit",
                   {"c": c, "sigma": sigma})
        rep.expect(TD.SH.source(elt) == AsH.unit(theta), "horizontal source is a unit",
                   {"c": c, "sigma": sigma})
        z = emb @ ((0,) * dc + tuple(sigma)) if not any(sigma) else None
        if z is not None:
            rep.expect(not any(z[n:]), "zero goes to zero", {})
    check_groupoid_morphism(rep, "sigma to Sigma", PolyMap.from_matrix(to_core), TC,
                            tcore.groupoid, PolyMap.identity(TC.base_dim), s)
    checks = {f["check"]: False for f in rep.failures}
    return CoreEmbeddingReport(rep.ok and tcore.report.ok, checks or {"all": True},
                               tcore.groupoid.arrow_dim, TC.arrow_dim,
                               rep.failures + tcore.report.failures)

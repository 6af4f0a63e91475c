"""PVB-groupoids and LA-groupoids on the tangent/cotangent pair of a Poisson groupoid.

Sections xi of T*G are polynomial one-forms on G, l_xi(g, v) = <xi(g), v> is
the associated fibrewise linear function on TG, and xi is morphic when
g -> (g, xi(g)) is a groupoid morphism G -> T*G.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..exactcalc import Mat, Poly, PolyMap, Sampler, projection
from ..fingpd import ValidationReport
from ..coordmodels import (
    CoordGroupoid, LieAlgebroidModel, check_algebroid_morphism, check_groupoid_morphism,
    check_identity, core_basis_of, cotangent_blocks, cotangent_groupoid, dual_side,
    product_algebroid, restrict_algebroid, tangent_groupoid,
)
from ..coordmodels.groupoids import ModelError, param
from .bivectors import (
    PoissonError, algebroid_from_linear_poisson, cotangent_algebroid, is_linear_poisson,
    koszul_bracket, lie_poisson_from_algebroid, tangent_lift,
)
from .groupoids import (
    PoissonCoordDouble, PoissonCoordGroupoid, base_sharp, check_multiplicative,
    dual_algebroid, sharp_to_bivector,
)


def _push(F: Mat, X: PolyMap) -> PolyMap:
    comps = []
    for row in F.rows:
        acc = Poly(X.dom)
        for c, p in zip(row, X.components):
            if c:
                acc = acc + p * c
        comps.append(acc)
    return PolyMap(X.dom, comps)


def _dot(us, vs, n) -> Poly:
    acc = Poly(n)
    for a, b in zip(us, vs):
        acc = acc + a * b
    return acc


def _require(G: CoordGroupoid):
    try:
        G.require_registered()
    except ModelError:
        raise ModelError(f"{G.name}: PVB checks need a registered family") from None


def ell(xi: PolyMap) -> Poly:
    """l_xi on TG, variables (g, v)."""
    N = xi.dom
    lift = [c.embed(2 * N) for c in xi.components]
    return _dot(lift, [Poly.var(2 * N, N + i) for i in range(N)], 2 * N)


def multiplicative_form(G: CoordGroupoid, theta: PolyMap) -> PolyMap:
    """tgt^* theta - src^* theta, a morphic section for any one-form theta on M."""
    S, T = G.mats["S"], G.mats["T"]
    return _push(T.T, theta @ G.tgt) - _push(S.T, theta @ G.src)


# ---------------------------------------------------------------------------
# morphic sections


@dataclass
class MorphicReport:
    ok: bool
    sections: list          # per section: kind and the outcome of each test
    brackets: list
    report: ValidationReport = field(repr=False)

    def to_dict(self):
        return {"ok": self.ok, "sections": self.sections, "brackets": self.brackets,
                **self.report.to_dict()}


def section_families(G: CoordGroupoid, s: Sampler, count: int = 12) -> list:
    """(kind, xi): morphic sections built from one-forms on M, and perturbed copies."""
    n, N = G.base_dim, G.arrow_dim
    thetas = []
    for a in range(n):
        thetas.append(PolyMap(n, [Poly.const(n, int(b == a)) for b in range(n)]))
    for a in range(n):
        thetas.append(PolyMap(n, [Poly.var(n, a) if b == (a + 1) % n else Poly(n)
                                  for b in range(n)]))
    while len(thetas) < (count + 1) // 2:
        thetas.append(s.polymap(n, n, 2))
    out = []
    for th in thetas:
        xi = multiplicative_form(G, th)
        out.append(("morphic", xi))
        bump = s.polymap(N, N, 2)
        if N > 1:
            extra = [Poly(N)] * N
            extra[0] = Poly.var(N, 1)
            bump = bump + PolyMap(N, extra)
        out.append(("perturbed", xi + bump))
    return out


def _section_Y(Ts: CoordGroupoid, xi: PolyMap, G: CoordGroupoid) -> PolyMap:
    """Y(m) = target of xi(1_m) in A*G (the covector part)."""
    N, n = G.arrow_dim, G.base_dim
    Xi = PolyMap.identity(N).pair(xi)
    return projection(Ts.base_dim, range(n, Ts.base_dim)) @ Ts.tgt @ Xi @ G.ident


def _core_times_zero(G: CoordGroupoid) -> PolyMap:
    """(g, phi) -> phi 0~_g in TG."""
    TG = tangent_groupoid(G)
    N, n = G.arrow_dim, G.base_dim
    Kb = core_basis_of(G)
    k = Kb.ncols
    g = projection(N + k, range(N))
    phi = projection(N + k, range(N, N + k))
    unit_at_target = G.ident @ G.tgt @ g
    left = unit_at_target.pair(PolyMap.from_matrix(Kb) @ phi)
    right = g.pair(PolyMap.zero(N + k, N))
    return TG.comp @ left.pair(right)


def morphic_section_checks(PG: PoissonCoordGroupoid, sampler: Sampler | None = None,
                           count: int = 12, sections: list | None = None) -> MorphicReport:
    G = PG.G
    _require(G)
    s = sampler or Sampler(0)
    N, n = G.arrow_dim, G.base_dim
    TG, Ts = tangent_groupoid(G), cotangent_groupoid(G)
    k = Ts.meta["fibre_dim"]
    fam = sections if sections is not None else section_families(G, s, count)
    P2 = param(TG.composable_basis())
    first = projection(4 * N, range(2 * N))
    second = projection(4 * N, range(2 * N, 4 * N))
    u = _core_times_zero(G)
    phi = [Poly.var(N + k, N + c) for c in range(k)]
    tgt_g = G.tgt @ projection(N + k, range(N))
    unit_cov = cotangent_blocks(Ts)["unit"]
    Astar = dual_algebroid(PG)
    rep = ValidationReport()
    rows, morphic = [], []
    for idx, (kind, xi) in enumerate(fam):
        Xi = PolyMap.identity(N).pair(xi)
        X = Ts.src @ Xi @ G.ident
        rm = ValidationReport()
        check_groupoid_morphism(rm, "xi", Xi, G, Ts, X, s)
        l = PolyMap(2 * N, [ell(xi)])
        rl = ValidationReport()
        check_identity(rl, "l_xi(vu) = l_xi(v) + l_xi(u)", l @ TG.comp @ P2,
                       (l @ first + l @ second) @ P2, P2, s)
        row = {"index": idx, "kind": kind, "section": [str(c) for c in xi.components],
               "morphic": rm.ok, "l_xi morphism": rl.ok, "equivalent": rm.ok == rl.ok}
        rep.expect(rm.ok == rl.ok, "l_xi is a morphism iff xi is morphic",
                   {"section": row["section"], "morphic": rm.ok, "l_xi": rl.ok})
        if kind == "morphic":
            rep.expect(rm.ok, "constructed section is morphic", rm.first)
        else:
            rep.expect(not rl.ok, "perturbed section is rejected", {"section": row["section"]})
            if not rl.ok:
                row["witness (v, u)"] = rl.first["witness"]
        if rm.ok:
            Y = _section_Y(Ts, xi, G)
            lhs = ell(xi).substitute(u.components)
            rhs = _dot([c.substitute(tgt_g.components) for c in Y.components], phi, N + k)
            row["projection identity"] = lhs == rhs
            rep.expect(lhs == rhs, "l_xi(phi 0~_g) = <Y(beta g), phi>",
                       {"section": row["section"], "lhs": str(lhs), "rhs": str(rhs)})
            kpart = (xi @ G.ident) - _push(unit_cov, X.restrict_components(range(n, n + k)))
            row["identity section"] = kpart == PolyMap.zero(n, N)
            rep.expect(row["identity section"], "xi(1_m) is the identity over X(m)",
                       {"section": row["section"], "difference": str(kpart)})
            morphic.append((xi, Y, row["section"]))
        rows.append(row)
    brackets = []
    for i in range(len(morphic)):
        (xi, Y, name), (xi1, Y1, name1) = morphic[i], morphic[(i + 1) % len(morphic)]
        br = koszul_bracket(PG.pi, xi, xi1)
        Yb = Astar.bracket(Y, Y1)
        lhs = ell(br).substitute(u.components)
        rhs = _dot([c.substitute(tgt_g.components) for c in Yb.components], phi, N + k)
        ok = lhs == rhs
        rep.expect(ok, "l_[xi,xi1](phi 0~_g) = <[Y,Y1](beta g), phi>",
                   {"xi": name, "xi1": name1, "lhs": str(lhs), "rhs": str(rhs)})
        brackets.append({"pair": [i, (i + 1) % len(morphic)], "closure": ok})
    return MorphicReport(rep.ok, rows, brackets, rep)


# ---------------------------------------------------------------------------
# LA-groupoids and PVB-groupoids


@dataclass
class LAReport:
    ok: bool
    direction: str
    checks: dict
    report: ValidationReport = field(repr=False)

    def to_dict(self):
        return {"ok": self.ok, "direction": self.direction, "checks": dict(self.checks),
                **self.report.to_dict()}


def _same_algebroid(A: LieAlgebroidModel, B: LieAlgebroidModel) -> bool:
    return (A.base_dim, A.fiber_dim, A.anchor, A.structure) == \
        (B.base_dim, B.fiber_dim, B.anchor, B.structure)


def _record(rep: ValidationReport, checks: dict, key: str, sub: ValidationReport):
    checks[key] = sub.ok
    rep.checks += sub.checks
    if not sub.ok:
        rep.ok = False
        rep.failures.extend(sub.failures)


def cotangent_la_checks(G: CoordGroupoid, top: LieAlgebroidModel, side: LieAlgebroidModel,
                        s: Sampler, count: int, rep: ValidationReport, checks: dict):
    """Source, target, identities and inversion of T*G => A*G as algebroid morphisms."""
    Ts = cotangent_groupoid(G)
    b = cotangent_blocks(Ts)
    M = G.mats
    for label, dom, cod, F, f in (("source", top, side, b["src"], M["S"]),
                                  ("target", top, side, b["tgt"], M["T"]),
                                  ("identities", side, top, b["unit"], M["U"]),
                                  ("inversion", top, top, b["inv"], M["I"])):
        _record(rep, checks, f"{label} is an algebroid morphism",
                check_algebroid_morphism(dom, cod, F, f, s, count, f"{label}: "))


def verify_lapvb(direction: str, PG: PoissonCoordGroupoid, sampler: Sampler | None = None,
                 count: int = 10) -> LAReport:
    """direction="forward": Upsilon = TG with the tangent lift; its dual T*G is an
    LA-groupoid with core T*P. direction="converse": Omega = T*G with the Koszul
    and conormal algebroids; its dual TG is a PVB-groupoid with core AG."""
    G = PG.G
    _require(G)
    s = sampler or Sampler(0)
    N, n = G.arrow_dim, G.base_dim
    TG = tangent_groupoid(G)
    Kb = core_basis_of(G)
    rho = G.mats["T"] @ Kb
    rep = ValidationReport()
    checks = {}
    koszul = cotangent_algebroid(PG.pi)
    mult = check_multiplicative(PG, s)
    if direction == "forward":
        piT = tangent_lift(PG.pi)
        checks["Upsilon is linear over G"] = is_linear_poisson(piT, N)
        mT = check_multiplicative(PoissonCoordGroupoid(TG, piT), s)
        checks["Upsilon is a Poisson groupoid over TP"] = mT.ok
        for key in ("Upsilon is linear over G", "Upsilon is a Poisson groupoid over TP"):
            rep.expect(checks[key], key, mT.report.first)
        top = algebroid_from_linear_poisson(piT, N, f"T*{G.name}")
        checks["algebroid on Upsilon* is the Koszul algebroid"] = _same_algebroid(top, koszul)
        rep.expect(checks["algebroid on Upsilon* is the Koszul algebroid"],
                   "algebroid on Upsilon* is the Koszul algebroid", None)
        Ts = cotangent_groupoid(G)
        side = restrict_algebroid(top, G.mats["U"], cotangent_blocks(Ts)["unit"], f"A*{G.name}")
        piE = piT.pushforward(TG.mats["T"])
        core_alg = algebroid_from_linear_poisson(piE, n, "T*P")
        piP = sharp_to_bivector(base_sharp(mult.a_star, G))
        checks["core algebroid is the Koszul algebroid of pi_P"] = _same_algebroid(
            core_alg, cotangent_algebroid(piP))
        rep.expect(checks["core algebroid is the Koszul algebroid of pi_P"],
                   "core algebroid is the Koszul algebroid of pi_P", {"pi_P": piP.matrix()})
        cotangent_la_checks(G, top, side, s, count, rep, checks)
        _record(rep, checks, "core anchor is an algebroid morphism",
                check_algebroid_morphism(core_alg, side, rho.T, Mat.identity(n), s, count,
                                         "core anchor: "))
    elif direction == "converse":
        side = dual_algebroid(PG)
        cotangent_la_checks(G, koszul, side, s, count, rep, checks)
        piLP = lie_poisson_from_algebroid(koszul)
        checks["dual is linear over G"] = is_linear_poisson(piLP, N)
        mT = check_multiplicative(PoissonCoordGroupoid(TG, piLP), s)
        checks["dual is a Poisson groupoid over TP"] = mT.ok
        for key in ("dual is linear over G", "dual is a Poisson groupoid over TP"):
            rep.expect(checks[key], key, mT.report.first)
        # core of TG over G: ker Tsrc at identities, with boundary T(tgt)
        Ts = cotangent_groupoid(G)
        delta_star = Ts.mats["T"].rowslice(n, Ts.base_dim).cols(N, 2 * N) @ \
            _core_cov_matrix(G)
        checks["core of the dual is A* with transposed boundary"] = \
            Kb.ncols == side.fiber_dim and (G.mats["T"] @ Kb) == delta_star.T
        rep.expect(checks["core of the dual is A* with transposed boundary"],
                   "core of the dual is A*", {"boundary": rho, "dual boundary": delta_star})
        checks["round trip recovers the Koszul algebroid"] = _same_algebroid(
            algebroid_from_linear_poisson(piLP, N, koszul.name), koszul)
        checks["round trip recovers the tangent lift"] = piLP == tangent_lift(PG.pi)
        for key in ("round trip recovers the Koszul algebroid",
                    "round trip recovers the tangent lift"):
            rep.expect(checks[key], key, None)
    else:
        raise ValueError("direction must be 'forward' or 'converse'")
    return LAReport(rep.ok, direction, checks, rep)


def _core_cov_matrix(G: CoordGroupoid) -> Mat:
    from .groupoids import core_cotangent_matrix
    return core_cotangent_matrix(G)


# ---------------------------------------------------------------------------
# A*_V S => A*C


@dataclass
class NeededReport:
    ok: bool
    maps: dict
    anchors: dict
    report: ValidationReport = field(repr=False)

    def to_dict(self):
        return {"ok": self.ok, "maps": dict(self.maps), "anchors": dict(self.anchors),
                **self.report.to_dict()}


def _corrupted(A: LieAlgebroidModel, row: int) -> LieAlgebroidModel:
    """Shift one anchor entry, in a base direction the source map sees."""
    rho = A.anchor_matrix()
    bad = Mat([[rho[a, i] + (1 if (a, i) == (row, 0) else 0) for i in range(rho.ncols)]
               for a in range(rho.nrows)], rho.ncols)
    return LieAlgebroidModel.constant(bad, A.name + " (corrupted)")


def verify_needed(PD: PoissonCoordDouble, sampler: Sampler | None = None, count: int = 10,
                  corrupt: str | None = None) -> NeededReport:
    """A*_V S (anchor a~_{*H}) over H and A*C (anchor a_*C) over P: every
    structure map of A*_V S => A*C is an algebroid morphism."""
    from .duality import core_bivector
    from ..coordmodels import core_of_double
    from .bivectors import PolyBivector
    s = sampler or Sampler(0)
    if not PD.is_poisson_double():
        raise PoissonError(f"{PD.D.name}: not a Poisson double groupoid")
    D = PD.D
    H = D.H
    core = D._cache.get("core") or core_of_double(D, s)
    D._cache.setdefault("core", core)
    C = core.groupoid
    top = dual_algebroid(PD.vertical, f"A*_V{D.name}")
    if corrupt == "anchor":
        seen = next(j for j, c in enumerate(H.mats["S"].rows[0]) if c)
        top = _corrupted(top, seen)
    elif corrupt is not None:
        raise ValueError("corrupt must be None or 'anchor'")
    piC = PolyBivector.from_matrix(core_bivector(PD), "pi_C")
    side = dual_algebroid(PoissonCoordGroupoid(C, piC), "A*C")
    _, Fs = dual_side(D, "V")
    anchors = {"A*_V S": top.anchor_matrix(), "A*C": side.anchor_matrix(),
               "a~_*H": PD.multiplicative("V", s).a_star}
    rep = ValidationReport()
    maps = {}
    M = H.mats
    for label, dom, cod, F, f in (("source", top, side, Fs.src_lin[0], M["S"]),
                                  ("target", top, side, Fs.tgt_lin[0], M["T"]),
                                  ("identities", side, top, Fs.id_lin[0], M["U"]),
                                  ("inversion", top, top, Fs.inv_lin[0], M["I"])):
        _record(rep, maps, label, check_algebroid_morphism(dom, cod, F, f, s, count,
                                                           f"{label}: "))
    # multiplication, from the algebroid of composable pairs
    Hc = H.composable_basis()
    Fc = Fs.compatible_basis(0, 0)
    try:
        pairs = restrict_algebroid(product_algebroid(top, top), Hc, Fc, "composable pairs")
    except ModelError as e:
        sub = ValidationReport()
        sub.fail("multiplication: composable pairs form a subalgebroid", str(e))
    else:
        sub = check_algebroid_morphism(pairs, top, Fs.comp_lin[(0, 0)] @ Fc, M["C"] @ Hc, s,
                                       count, "multiplication: ")
    _record(rep, maps, "multiplication", sub)
    return NeededReport(rep.ok, maps, anchors, rep)

"""The registered verification suites.

Each suite takes a SuiteConfig and fills a Report. ``dims`` is interpreted
per suite (see DEFAULTS); trials run sequentially off one seeded sampler so
reruns are byte-identical.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..exactcalc import Sampler
from ..dvb import SplitDVB, double_dual_iso, pair_duals, pair_duals_closed, pairing_matrix
from ..fingpd import (
    check_dual_core, double_dual_identify, dual_product_by_decomposition, pradines_dual,
    random_split_vbgroupoid, validate_vbgroupoid,
)
from ..coordmodels import (
    cotangent_core_report, cotangent_double, cotangent_groupoid, core_embedding_report,
    m4_double_groupoid, pair_groupoid, pradines_crosscheck, validate_double, validate_groupoid,
)
from ..coordmodels import golden
from ..poisson import (
    PoissonCoordGroupoid, check_multiplicative, compute_DMaps, morphic_section_checks,
    standard_bivector, symplectic_double_m4, symplectic_pair_groupoid, verify_lapvb,
    verify_needed, verify_side_duality, verify_thm_pairs,
)
from .config import ConfigError, SuiteConfig
from .report import Report


class UnknownSuite(KeyError):
    pass


@dataclass(frozen=True)
class Suite:
    name: str
    anchor: str
    dims_help: str
    dims: tuple
    trials: int
    fault: bool
    run: object

    def descriptor(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "dims": list(self.dims),
                "dims_meaning": self.dims_help, "trials": self.trials,
                "fault_fixture": self.fault}


# ---------------------------------------------------------------------------


def _dvb_duality(cfg, dims, trials, s, rep):
    bh, bv, bc = (tuple(dims) + (3, 3, 3))[:3]
    for _ in range(trials):
        E = SplitDVB(s.integer(1, max(bh, 1)), s.integer(1, max(bv, 1)), s.integer(1, max(bc, 1)))
        kappa = s.vector(E.dim_core)
        phi = E.vdual_element(s.vector(E.dim_h), s.vector(E.dim_v), kappa)
        psi = E.hdual_element(s.vector(E.dim_h), s.vector(E.dim_v), kappa)
        vals = [pair_duals(phi, psi)] + [pair_duals(phi, psi, k=s.vector(E.dim_core))
                                         for _ in range(2)]
        w = {"dims": E.dims, "kappa": kappa, "values": vals}
        rep.check("pairing independent of xi (3 choices)", len(set(vals)) == 1, w)
        closed = pair_duals_closed(phi, psi)
        if cfg.fault:
            closed += 1
        rep.check("pairing = <phi,X> - <psi,x>", vals[0] == closed, {**w, "closed form": closed})
        M = pairing_matrix(E, kappa)
        rep.check("pairing nondegenerate", M.rank() == E.dim_h + E.dim_v,
                  {"dims": E.dims, "gram": M})
        dd = double_dual_iso(E, s)
        rep.check("double dual is +id on the sides", dd.sides_identity,
                  {"dims": E.dims, "side maps": [dd.side_k, dd.side_h]})
        rep.check("double dual is -id on the core", dd.core_sign == -1,
                  {"dims": E.dims, "core map": dd.core})


def _decomposition_pair(W):
    """The first composable pair whose products decompose non-uniquely, else the freest."""
    best = None
    for h, g in W.base.composable():
        C = W.compatible_basis(h, g)
        free = (W.comp_lin[(h, g)] @ C).kernel().ncols
        if best is None or free > best[0]:
            best = (free, h, g)
        if free > 0:
            break
    return best


def _vbgpd_dual(cfg, dims, trials, s, rep):
    max_objects, max_fiber = (tuple(dims) + (4, 3))[:2]
    free_pairs = 0
    for _ in range(trials):
        W = random_split_vbgroupoid(s, max_objects=max(max_objects, 1), max_fiber=max(max_fiber, 1))
        D = pradines_dual(W)
        v = validate_vbgroupoid(D, stop_at_first=True)
        rep.check("dual is a VB-groupoid", v.ok, v.first)
        free, h, g = _decomposition_pair(W)
        C = D.compatible_basis(h, g)
        pair = C @ s.vector(C.ncols)
        psi, phi = pair[:D.fiber_dims[h]], pair[D.fiber_dims[h]:]
        prod = D.compose(h, g, psi, phi)
        target = s.vector(W.fiber_dims[W.base.comp[(h, g)]])
        vals = dual_product_by_decomposition(W, h, g, psi, phi, target, 5, s)
        free_pairs += free > 0
        if free > 0:
            rep.check("at least 5 decompositions when the kernel is nonzero", len(vals) >= 5,
                      {"pair": (h, g), "found": len(vals)})
        expected = sum(a * b for a, b in zip(prod, target))
        rep.check("dual product independent of decomposition",
                  len(set(vals)) == 1 and vals[0] == expected,
                  {"pair": (h, g), "values": vals, "product pairing": expected})
        dc = check_dual_core(W, D)
        rep.check("core of the dual is A*", dc.ok,
                  {"dims match": dc.dims_match, "inside": dc.formula_in_core,
                   "spans": dc.spans, "anchor": dc.anchor_is_transpose})
        dd = double_dual_identify(W)
        rep.check("double dual identifies with the original", dd.ok, dd.failures[:1])
    rep.details["trials with a free decomposition"] = free_pairs


def _cotangent_double(cfg, dims, trials, s, rep):
    for n in dims:
        T = cotangent_groupoid(pair_groupoid(n))
        v = validate_groupoid(T, s, trials)
        rep.check(f"T*G axioms, pair groupoid n={n}", v.ok, v.first)
        cross = pradines_crosscheck(T)
        rep.check(f"T*G agrees with the Pradines dual, n={n}", cross == [], cross[:1])
        core = cotangent_core_report(T, s, min(trials, 10))
        for k, ok in sorted(core.items()):
            rep.check(f"T*G {k}, n={n}", ok, {"n": n})
        name = f"cotangent-pair{n}"
        if cfg.golden is not None and name in golden.golden_names():
            try:
                d = golden.diff(name, cfg.golden)
                rep.check(f"golden {name}", d == [], {"differing maps": d})
            except golden.GoldenError as e:
                rep.check(f"golden {name}", False, {"error": str(e)})
    for n in dims:
        if n > 2:
            continue
        v = validate_double(cotangent_double(m4_double_groupoid(n)), s, min(trials, 25))
        rep.check(f"cotangent double of M^4, n={n}", v.ok, v.first)


def _core_embedding(cfg, dims, trials, s, rep):
    for n in dims:
        r = core_embedding_report(m4_double_groupoid(n), s, trials)
        w = r.failures[:1] or None
        for k, ok in r.checks.items():
            rep.check(f"{k}, n={n}", ok, w)
        rep.check(f"dim core(T*S) = dim T*C, n={n}", r.dim_core == r.dim_cotangent_core,
                  {"core": r.dim_core, "T*C": r.dim_cotangent_core})


def _poisson_mult(cfg, dims, trials, s, rep):
    for k in dims:
        PG = symplectic_pair_groupoid(k)
        if cfg.fault:       # both factors with the same sign: not multiplicative
            p = standard_bivector(k)
            PG = PoissonCoordGroupoid(PG.G, p.embed(4 * k, 0) + p.embed(4 * k, 2 * k))
        r = check_multiplicative(PG, s, trials)
        rep.check(f"pi# is a groupoid morphism, k={k}", r.ok, r.report.first)
        rep.check(f"core map = -a_*^T, k={k}", r.core_is_minus_dual,
                  {"core map": r.core_map, "a_*": r.a_star})
        rep.check(f"a_* = pi_P^#, k={k}",
                  r.a_star is not None and r.a_star == standard_bivector(k).matrix().T,
                  {"a_*": r.a_star})
        rep.details[f"a_* (k={k})"] = r.a_star


def _dd_dri(cfg, dims, trials, s, rep):
    for k in dims:
        dm = compute_DMaps(symplectic_double_m4(k), s, trials)
        rep.absorb(f"k={k}: ", dm.checks, dm.report.failures, dm.report.first)
        rep.details[f"D_H (k={k})"] = dm.DH
        rep.details[f"D_V (k={k})"] = dm.DV


def _sideduality(cfg, dims, trials, s, rep):
    for k in dims:
        r = verify_side_duality(symplectic_double_m4(k), s, trials)
        rep.absorb(f"k={k}: ", r.checks, r.report.failures, r.report.first)
        rep.details[f"pi_C (k={k})"] = r.pi_C
        rep.details[f"section pairs (k={k})"] = r.dmaps.section_pairs


def _thm_pairs(cfg, dims, trials, s, rep):
    for n in dims:
        r = verify_thm_pairs(m4_double_groupoid(n), s, trials)
        rep.absorb(f"n={n}: ", r.checks, r.report.failures, r.report.first)
        rep.details[f"signs (n={n})"] = dict(r.tulczyjew_sign)


def _lapvb(cfg, dims, trials, s, rep):
    for k in dims:
        PG = symplectic_pair_groupoid(k)
        m = morphic_section_checks(PG, s, max(trials, 10))
        morphic = sum(r["kind"] == "morphic" for r in m.sections)
        for r in m.sections:
            rep.check(f"k={k}: ell morphism <=> morphic section", r["equivalent"], r)
            if r["kind"] == "morphic":
                rep.check(f"k={k}: projection identity", r["projection identity"], r)
                rep.check(f"k={k}: identity section", r["identity section"], r)
            else:
                rep.check(f"k={k}: perturbed section rejected with witness",
                          not r["morphic"] and r.get("witness (v, u)") is not None, r)
        for b in m.brackets:
            rep.check(f"k={k}: morphic brackets close", b["closure"], b)
        rep.details[f"sections (k={k})"] = {"total": len(m.sections), "morphic": morphic}
        for d in ("forward", "converse"):
            r = verify_lapvb(d, PG, s, trials)
            rep.absorb(f"k={k} {d}: ", r.checks, r.report.failures, r.report.first)


def _thm_needed(cfg, dims, trials, s, rep):
    for k in dims:
        r = verify_needed(symplectic_double_m4(k), s, trials,
                          corrupt="anchor" if cfg.fault else None)
        rep.absorb(f"k={k}: ", r.maps, r.report.failures, r.report.first)
        rep.absorb(f"k={k} anchor: ", r.anchors, r.report.failures, r.report.first)


SUITES = {s.name: s for s in [
    Suite("dvb-duality", "duality of the two duals of a double vector bundle; double-dual sign",
          "upper bounds (side H, side V, core)", (3, 3, 3), 100, True, _dvb_duality),
    Suite("vbgpd-dual", "dual of a VB-groupoid over a finite groupoid",
          "(max objects, max fibre dim)", (4, 3), 50, False, _vbgpd_dual),
    Suite("cotangent-double", "cotangent groupoid T*G => A*G and cotangent double groupoid",
          "pair groupoid dimensions n (M^4 for n <= 2)", (1, 2, 3), 50, False,
          _cotangent_double),
    Suite("core-embedding", "T*C as the core of T*S via the E map",
          "M^4 dimensions n", (1, 2), 10, False, _core_embedding),
    Suite("poisson-mult", "multiplicativity of pi# and the core map -a_*^T",
          "symplectic pair groupoid over R^{2k}, values of k", (1,), 25, True, _poisson_mult),
    Suite("dd-dri", "D_H and D_V of a symplectic double groupoid and their relations",
          "symplectic M^4 over R^{2k}, values of k", (1, 2), 10, False, _dd_dri),
    Suite("sideduality", "side bialgebroids of a symplectic double groupoid are dual",
          "symplectic M^4 over R^{2k}, values of k", (1, 2), 10, False, _sideduality),
    Suite("thm-pairs", "T*S: D maps as Tulczyjew-type compositions",
          "M^4 dimensions n", (1, 2), 10, False, _thm_pairs),
    Suite("lapvb", "Poisson VB-groupoids versus LA-groupoid duals; morphic sections",
          "symplectic pair groupoid over R^{2k}, values of k", (1,), 12, False, _lapvb),
    Suite("thm-needed", "structure maps of A*_V S => A*C are algebroid morphisms",
          "symplectic M^4 over R^{2k}, values of k", (1,), 10, True, _thm_needed),
]}


def list_suites() -> list:
    return [SUITES[n].descriptor() for n in SUITES]


def get_suite(name: str) -> Suite:
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    return SUITES[name]


def run_suite(name: str, config: SuiteConfig | None = None) -> Report:
    suite = get_suite(name)
    cfg = config or SuiteConfig(suite=name)
    if cfg.fault and not suite.fault:
        raise ConfigError(f"suite {name} has no fault fixture")
    dims = cfg.dims or suite.dims
    trials = cfg.trials or suite.trials
    rep = Report(name, suite.anchor, cfg.seed,
                 {**cfg.echo(), "suite": name, "dims": list(dims), "trials": trials})
    t0 = time.perf_counter()
    suite.run(cfg, dims, trials, Sampler(cfg.seed), rep)
    rep.timing = time.perf_counter() - t0
    return rep


def regen_golden(name: str, directory=None, force: bool = False) -> list:
    """Rewrite the golden data a suite compares against; ``force`` is mandatory."""
    get_suite(name)
    if not force:
        raise golden.GoldenError("refusing to regenerate golden data without --force")
    names = golden.golden_names() if name == "cotangent-double" else []
    return [golden.write(n, directory, force=True) for n in names]

"""The twelve acceptance criteria, each with a one-line verdict.

All comparisons are exact rational identities, so every tolerance is zero.
"""

import time

from conftest import ACCEPTANCE_LINES

from symdouble.exactcalc import Mat, Sampler
from symdouble.coordmodels import (
    cotangent_core_report, cotangent_double, cotangent_groupoid, core_embedding_report,
    m4_double_groupoid, pair_groupoid, pradines_crosscheck, validate_double, validate_groupoid,
)
from symdouble.harness import SUITES, build_config, run_suite
from symdouble.poisson import (
    check_multiplicative, compute_DMaps, standard_bivector, symplectic_double_m4,
    symplectic_pair_groupoid, verify_needed, verify_side_duality, verify_thm_pairs,
)

EXACT = "tolerance 0 (exact rationals)"


def verdict(n, title, ok, elapsed=None, limit=None):
    timing = ""
    if elapsed is not None:
        timing = f", {elapsed:.2f}s" + (f" (limit {limit}s)" if limit else "")
    line = f"criterion {n:2d} [{'PASS' if ok else 'FAIL'}] {title}; {EXACT}{timing}"
    ACCEPTANCE_LINES.append((n, line))
    print(line)
    return ok


def suite(name, **kw):
    return run_suite(name, build_config(name, env={}, **kw))


def test_criterion_01_dvb_duality():
    t0 = time.perf_counter()
    rep = suite("dvb-duality", dims="3,3,3", trials=100, seed=1)
    elapsed = time.perf_counter() - t0
    names = ["pairing independent of xi (3 choices)", "pairing = <phi,X> - <psi,x>",
             "pairing nondegenerate"]
    ok = all(rep.status(n) for n in names) and all(
        c.trials == 100 for c in rep.checks if c.name in names)
    verdict(1, "pairing of the two duals: xi-independent, closed form, nondegenerate (100 DVBs)",
            ok and elapsed < 10, elapsed, 10)
    assert ok, [c for c in rep.checks if not c.ok]
    assert elapsed < 10


def test_criterion_02_double_dual_sign():
    rep = suite("dvb-duality", dims="3,3,3", trials=100, seed=2)
    ok = rep.status("double dual is +id on the sides") and \
        rep.status("double dual is -id on the core")
    verdict(2, "double dual is +id on both sides and -id on the core (100 DVBs)", ok)
    assert ok, [c for c in rep.checks if not c.ok]


def test_criterion_03_vbgroupoid_dual():
    t0 = time.perf_counter()
    rep = suite("vbgpd-dual", dims="4,3", trials=50, seed=3)
    elapsed = time.perf_counter() - t0
    free = rep.details["trials with a free decomposition"]
    ok = rep.ok and free > 0 and \
        rep.status("at least 5 decompositions when the kernel is nonzero")
    verdict(3, f"dual VB-groupoid valid, product decomposition-free ({free}/50 trials with "
            ">= 5 decompositions), core A*, double dual (50 models)",
            ok and elapsed < 30, elapsed, 30)
    assert ok, [c for c in rep.checks if not c.ok]
    assert elapsed < 30


def test_criterion_04_cotangent_groupoid():
    ok = True
    for n in (1, 2, 3):
        T = cotangent_groupoid(pair_groupoid(n))
        v = validate_groupoid(T, Sampler(40 + n), trials=50)
        core = cotangent_core_report(T, Sampler(n), trials=50)
        ok &= v.ok and pradines_crosscheck(T) == [] and all(core.values())
    verdict(4, "T*G => A*G axioms at 50 points and identity/core formulas, pair n=1,2,3", ok)
    assert ok


def test_criterion_05_cotangent_double_and_core():
    ok = True
    for n in (1, 2):
        D = m4_double_groupoid(n)
        v = validate_double(cotangent_double(D), Sampler(50 + n))
        r = core_embedding_report(D, Sampler(n))
        ok &= v.ok and r.ok and r.dim_core == r.dim_cotangent_core == 4 * n
    verdict(5, "cotangent double of M^4 valid; T*C -> core(T*S) groupoid isomorphism, n=1,2", ok)
    assert ok


def test_criterion_06_multiplicativity():
    r = check_multiplicative(symplectic_pair_groupoid(1), Sampler(6), trials=50)
    failed = [f["check"] for f in r.report.failures]
    ok = r.ok and r.core_map == -r.a_star.T and r.a_star == standard_bivector(1).matrix().T
    verdict(6, "pi# preserves source, target, units, inverses, products; core map = -a_*^T", ok)
    assert ok, failed


def test_criterion_07_dmaps():
    ok = True
    for k in (1, 2):
        PD = symplectic_double_m4(k)
        dm = compute_DMaps(PD, Sampler(7))
        ok &= dm.DV.T == -dm.DH
        ok &= dm.checks["D_V = a_*"] and dm.checks["D_H = -a_*^T"]
    # the pair case by hand: D_H is pi_P^# for pi_P = d/dxi ^ d/dx
    ok &= compute_DMaps(symplectic_double_m4(1)).DH == Mat([[0, 1], [-1, 0]])
    verdict(7, "D_V^T = -D_H, D_V = a_*, D_H = -a_*^T on symplectic M^4, k=1,2", ok)
    assert ok


def test_criterion_08_side_duality():
    ok = True
    pairs = []
    for k in (1, 2):
        r = verify_side_duality(symplectic_double_m4(k), Sampler(8), count=10)
        pairs.append(r.dmaps.section_pairs)
        ok &= r.ok and r.checks["D_V preserves anchors and brackets"]
        ok &= r.checks["pi_C nondegenerate"] and r.checks["a_*C o a_C^* = pi_P^#"]
    ok &= min(pairs) >= 10
    verdict(8, f"D_V preserves anchors and brackets ({min(pairs)}+ section pairs, degree <= 2); "
            "pi_C nondegenerate; a_*C o a_C^* = pi_P^#", ok)
    assert ok


def test_criterion_09_dri_tulczyjew():
    ok = True
    for n in (1, 2):
        r = verify_thm_pairs(m4_double_groupoid(n), Sampler(9))
        ok &= r.ok and r.checks["D_H = j'^V o R_H"] and r.checks["D_V = (j'^H)^-1 o R_V"]
        ok &= r.checks["j'^H is Tulczyjew's map"]
    verdict(9, "D_H = j'^V o R_H, D_V = (j'^H)^-1 o R_V, j'^H = Tulczyjew map, n=1,2", ok)
    assert ok


def test_criterion_10_lapvb():
    rep = suite("lapvb", dims="1", trials=12, seed=10)
    sec = rep.details["sections (k=1)"]
    rejected = rep.status("k=1: perturbed section rejected with witness")
    ok = rep.ok and sec["total"] >= 10 and rejected
    verdict(10, f"ell-morphism equivalence, projection identity, bracket closure on "
            f"{sec['total']} sections; perturbed sections rejected with witnesses", ok)
    assert ok, [c for c in rep.checks if not c.ok]


def test_criterion_11_needed():
    r = verify_needed(symplectic_double_m4(1), Sampler(11))
    ok = r.ok and set(r.maps) == {"source", "target", "identities", "inversion",
                                  "multiplication"} and all(r.maps.values())
    verdict(11, "source, target, identities, inversion, multiplication of A*_V S => A*C "
            "are algebroid morphisms", ok)
    assert ok, r.report.first


def test_criterion_12_determinism():
    bad = []
    for name in SUITES:
        a = suite(name, seed=12).to_json()
        b = suite(name, seed=12).to_json()
        if a != b:
            bad.append(name)
    verdict(12, f"byte-identical JSON on rerun for all {len(SUITES)} suites", not bad)
    assert not bad

"""VB-groupoids over finite groupoids, given by per-arrow linear data.

Each fibre Omega_g is a coordinate space R^{d_g}. Structure maps are stored as
matrices: ``src_lin[g]`` and ``tgt_lin[g]`` send Omega_g to the side fibres,
``id_lin[m]`` sends A_m into Omega_{1_m}, ``inv_lin[g]`` sends Omega_g to
Omega_{g^-1}, and ``comp_lin[(h, g)]`` acts on the whole of Omega_h + Omega_g
(only its restriction to compatible pairs carries meaning).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Hashable

from .exactcalc import Mat, Sampler, coords_in, q, qstr


class GroupoidError(ValueError):
    pass


# ---------------------------------------------------------------------------
# finite groupoids


@dataclass(frozen=True)
class FiniteGroupoid:
    objects: tuple
    arrows: tuple
    src: dict
    tgt: dict
    comp: dict          # (h, g) -> hg, for src[h] == tgt[g]
    ident: dict
    inv: dict
    name: str = "G"

    def composable(self):
        return [(h, g) for h in self.arrows for g in self.arrows if self.src[h] == self.tgt[g]]

    def composable_triples(self):
        return [(k, h, g) for (h, g) in self.composable() for k in self.arrows
                if self.src[k] == self.tgt[h]]

    def validate(self) -> list:
        """Return a list of axiom failures (empty when G is a groupoid)."""
        bad = []
        for (h, g) in self.composable():
            hg = self.comp.get((h, g))
            if hg is None:
                bad.append(("composition undefined", (h, g)))
            elif self.src[hg] != self.src[g] or self.tgt[hg] != self.tgt[h]:
                bad.append(("composition ends", (h, g)))
        if bad:
            return bad
        for (k, h, g) in self.composable_triples():
            if self.comp[(k, self.comp[(h, g)])] != self.comp[(self.comp[(k, h)], g)]:
                bad.append(("associativity", (k, h, g)))
        for g in self.arrows:
            if self.comp[(self.ident[self.tgt[g]], g)] != g or self.comp[(g, self.ident[self.src[g]])] != g:
                bad.append(("identity", g))
            gi = self.inv[g]
            if self.comp.get((gi, g)) != self.ident[self.src[g]] or self.comp.get((g, gi)) != self.ident[self.tgt[g]]:
                bad.append(("inverse", g))
        return bad


def pair_groupoid(n: int) -> FiniteGroupoid:
    """Objects 0..n-1; the arrow (b, a) goes from a to b."""
    objs = tuple(range(n))
    arrows = tuple((b, a) for b in objs for a in objs)
    comp = {((c, b), (b2, a)): (c, a) for (c, b) in arrows for (b2, a) in arrows if b == b2}
    return FiniteGroupoid(objs, arrows, {g: g[1] for g in arrows}, {g: g[0] for g in arrows},
                          comp, {m: (m, m) for m in objs}, {g: (g[1], g[0]) for g in arrows},
                          f"Pair({n})")


def cyclic_group(n: int) -> FiniteGroupoid:
    arrows = tuple(range(n))
    comp = {(h, g): (h + g) % n for h in arrows for g in arrows}
    return FiniteGroupoid((0,), arrows, {g: 0 for g in arrows}, {g: 0 for g in arrows},
                          comp, {0: 0}, {g: (-g) % n for g in arrows}, f"Z/{n}")


def trivial_groupoid(n: int = 1) -> FiniteGroupoid:
    objs = tuple(range(n))
    return FiniteGroupoid(objs, objs, {m: m for m in objs}, {m: m for m in objs},
                          {(m, m): m for m in objs}, {m: m for m in objs}, {m: m for m in objs},
                          f"Unit({n})")


def product_groupoid(G1: FiniteGroupoid, G2: FiniteGroupoid) -> FiniteGroupoid:
    objs = tuple(itertools.product(G1.objects, G2.objects))
    arrows = tuple(itertools.product(G1.arrows, G2.arrows))
    comp = {}
    for (h1, g1) in G1.composable():
        for (h2, g2) in G2.composable():
            comp[((h1, h2), (g1, g2))] = (G1.comp[(h1, g1)], G2.comp[(h2, g2)])
    return FiniteGroupoid(
        objs, arrows,
        {g: (G1.src[g[0]], G2.src[g[1]]) for g in arrows},
        {g: (G1.tgt[g[0]], G2.tgt[g[1]]) for g in arrows},
        comp,
        {m: (G1.ident[m[0]], G2.ident[m[1]]) for m in objs},
        {g: (G1.inv[g[0]], G2.inv[g[1]]) for g in arrows},
        f"{G1.name}x{G2.name}")


# ---------------------------------------------------------------------------
# VB-groupoids


def _right_inverse(M: Mat) -> Mat:
    """P with M @ P = I, for M of full row rank."""
    P = M.solve_mat(Mat.identity(M.nrows))
    if P is None:
        raise GroupoidError("map is not surjective")
    return P


@dataclass(frozen=True)
class FinVBGroupoid:
    base: FiniteGroupoid
    side_dims: dict
    fiber_dims: dict
    src_lin: dict
    tgt_lin: dict
    id_lin: dict
    inv_lin: dict
    comp_lin: dict
    name: str = "Omega"
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __hash__(self):
        return id(self)

    # elements

    def source(self, g, xi):
        return self.src_lin[g] @ xi

    def target(self, g, xi):
        return self.tgt_lin[g] @ xi

    def unit(self, m, a):
        return self.id_lin[m] @ a

    def inverse(self, g, xi):
        return self.inv_lin[g] @ xi

    def compose(self, h, g, eta, xi):
        if self.source(h, eta) != self.target(g, xi):
            raise GroupoidError(f"elements over {h} and {g} are not composable")
        return self.comp_lin[(h, g)] @ (tuple(eta) + tuple(xi))

    # linear algebra helpers

    def _split(self, g):
        """(right inverse of src_g, kernel of src_g)."""
        key = ("split", g)
        if key not in self._cache:
            S = self.src_lin[g]
            self._cache[key] = (_right_inverse(S), S.kernel())
        return self._cache[key]

    def compatible_basis(self, h, g) -> Mat:
        """Basis (columns) of {(eta, xi): src(eta) = tgt(xi)} in Omega_h + Omega_g."""
        key = ("compat", h, g)
        if key not in self._cache:
            P, N = self._split(h)
            dg = self.fiber_dims[g]
            top = Mat.hstack(P @ self.tgt_lin[g], N)
            bot = Mat.hstack(Mat.identity(dg), Mat.zeros(dg, N.ncols))
            self._cache[key] = Mat.vstack(top, bot)
        return self._cache[key]

    def compatible_triple_basis(self, k, h, g) -> Mat:
        P_h, N_h = self._split(h)
        P_k, N_k = self._split(k)
        dg = self.fiber_dims[g]
        # xi free, eta = P_h tgt xi + N_h u, zeta = P_k tgt eta + N_k v
        eta = Mat.hstack(P_h @ self.tgt_lin[g], N_h, Mat.zeros(self.fiber_dims[h], N_k.ncols))
        zeta = self.tgt_lin[h] @ eta
        zeta = P_k @ zeta + Mat.hstack(Mat.zeros(self.fiber_dims[k], dg + N_h.ncols), N_k)
        xi = Mat.hstack(Mat.identity(dg), Mat.zeros(dg, N_h.ncols + N_k.ncols))
        return Mat.vstack(zeta, eta, xi)

    def random_element(self, g, s: Sampler):
        return s.vector(self.fiber_dims[g])


@dataclass
class ValidationReport:
    ok: bool = True
    checks: int = 0
    failures: list = field(default_factory=list)

    def fail(self, check, witness):
        self.ok = False
        self.failures.append({"check": check, "witness": witness})

    def expect(self, cond, check, witness):
        self.checks += 1
        if not cond:
            self.fail(check, witness)

    @property
    def first(self):
        return self.failures[0] if self.failures else None

    def to_dict(self):
        return {"ok": self.ok, "checks": self.checks,
                "failures": [{"check": f["check"], "witness": _jsonable(f["witness"])}
                             for f in self.failures]}


def validate_vbgroupoid(W: FinVBGroupoid, stop_at_first: bool = False) -> ValidationReport:
    """Check shapes, groupoid axioms fibrewise and surjectivity of the double source map."""
    G = W.base
    rep = ValidationReport()
    for bad in G.validate():
        rep.fail("base " + bad[0], bad[1])
    if not rep.ok:
        return rep
    fd, sd = W.fiber_dims, W.side_dims

    for g in G.arrows:
        rep.expect(W.src_lin[g].shape == (sd[G.src[g]], fd[g]), "shape src", g)
        rep.expect(W.tgt_lin[g].shape == (sd[G.tgt[g]], fd[g]), "shape tgt", g)
        rep.expect(W.inv_lin[g].shape == (fd[G.inv[g]], fd[g]), "shape inv", g)
    for m in G.objects:
        rep.expect(W.id_lin[m].shape == (fd[G.ident[m]], sd[m]), "shape id", m)
    for (h, g) in G.composable():
        rep.expect(W.comp_lin[(h, g)].shape == (fd[G.comp[(h, g)]], fd[h] + fd[g]), "shape comp", (h, g))
    if not rep.ok:
        return rep

    # double source map (q, src) surjective: src_g of full rank on every fibre
    for g in G.arrows:
        rep.expect(W.src_lin[g].rank() == sd[G.src[g]], "double source surjective", g)
    if not rep.ok:
        return rep

    def done():
        return stop_at_first and not rep.ok

    for (h, g) in G.composable():
        hg = G.comp[(h, g)]
        C = W.compatible_basis(h, g)
        prod = W.comp_lin[(h, g)] @ C
        rep.expect(W.src_lin[hg] @ prod == W.src_lin[g] @ C.rowslice(fd[h], fd[h] + fd[g]),
                   "source of product", (h, g))
        rep.expect(W.tgt_lin[hg] @ prod == W.tgt_lin[h] @ C.rowslice(0, fd[h]),
                   "target of product", (h, g))
        if done():
            return rep
    for (k, h, g) in G.composable_triples():
        T = W.compatible_triple_basis(k, h, g)
        dk, dh, dg = fd[k], fd[h], fd[g]
        x, y, z = T.rowslice(0, dk), T.rowslice(dk, dk + dh), T.rowslice(dk + dh, dk + dh + dg)
        left = W.comp_lin[(k, G.comp[(h, g)])] @ Mat.vstack(x, W.comp_lin[(h, g)] @ Mat.vstack(y, z))
        right = W.comp_lin[(G.comp[(k, h)], g)] @ Mat.vstack(W.comp_lin[(k, h)] @ Mat.vstack(x, y), z)
        rep.expect(left == right, "associativity", (k, h, g))
        if done():
            return rep
    for m in G.objects:
        one = G.ident[m]
        rep.expect(W.src_lin[one] @ W.id_lin[m] == Mat.identity(sd[m]), "source of identity", m)
        rep.expect(W.tgt_lin[one] @ W.id_lin[m] == Mat.identity(sd[m]), "target of identity", m)
    for g in G.arrows:
        a, b = G.src[g], G.tgt[g]
        I = Mat.identity(fd[g])
        left = W.comp_lin[(G.ident[b], g)] @ Mat.vstack(W.id_lin[b] @ W.tgt_lin[g], I)
        right = W.comp_lin[(g, G.ident[a])] @ Mat.vstack(I, W.id_lin[a] @ W.src_lin[g])
        rep.expect(left == I and right == I, "identity law", g)
        gi = G.inv[g]
        J = W.inv_lin[g]
        rep.expect(W.src_lin[gi] @ J == W.tgt_lin[g] and W.tgt_lin[gi] @ J == W.src_lin[g],
                   "ends of inverse", g)
        rep.expect(W.comp_lin[(gi, g)] @ Mat.vstack(J, I) == W.id_lin[a] @ W.src_lin[g],
                   "left inverse", g)
        rep.expect(W.comp_lin[(g, gi)] @ Mat.vstack(I, J) == W.id_lin[b] @ W.tgt_lin[g],
                   "right inverse", g)
        if done():
            return rep
    return rep


def _unimodular(s: Sampler, n: int) -> Mat:
    # unit lower times unit upper triangular with small integer entries
    L = Mat([[1 if i == j else (s.integer(-2, 2) if j < i else 0) for j in range(n)] for i in range(n)], n)
    U = Mat([[1 if i == j else (s.integer(-2, 2) if j > i else 0) for j in range(n)] for i in range(n)], n)
    P = Mat.identity(n)
    if n > 1 and s.integer(0, 1):
        rows = list(P.rows)
        rows[0], rows[1] = rows[1], rows[0]
        P = Mat(rows, n)
    return P @ L @ U


def split_vbgroupoid(G: FiniteGroupoid, dim_a: int, dim_k: int, delta: Mat,
                     twist_seed: int | None = None) -> FinVBGroupoid:
    """Fibres A + K with src(a,k) = a, tgt(a,k) = a + delta k and
    (a', k') o (a, k) = (a, k + k').

    With ``twist_seed`` every fibre gets a random change of basis, so the
    stored matrices no longer show the split form.
    """
    if delta.shape != (dim_a, dim_k):
        raise ValueError("delta must map K to A")
    n = dim_a + dim_k
    IA, IK = Mat.identity(dim_a), Mat.identity(dim_k)
    zAK, zKA = Mat.zeros(dim_a, dim_k), Mat.zeros(dim_k, dim_a)
    src = Mat.hstack(IA, zAK)
    tgt = Mat.hstack(IA, delta)
    comp = Mat.vstack(Mat.hstack(Mat.zeros(dim_a, n), IA, zAK),
                      Mat.hstack(zKA, IK, zKA, IK))
    ident = Mat.vstack(IA, zKA)
    inv = Mat.vstack(Mat.hstack(IA, delta), Mat.hstack(zKA, -IK))

    if twist_seed is None:
        T = {g: Mat.identity(n) for g in G.arrows}
        Ti = T
    else:
        s = Sampler(twist_seed)
        T = {g: _unimodular(s, n) for g in G.arrows}
        Ti = {g: T[g].inv() for g in G.arrows}
    return FinVBGroupoid(
        G,
        {m: dim_a for m in G.objects},
        {g: n for g in G.arrows},
        {g: src @ Ti[g] for g in G.arrows},
        {g: tgt @ Ti[g] for g in G.arrows},
        {m: T[G.ident[m]] @ ident for m in G.objects},
        {g: T[G.inv[g]] @ inv @ Ti[g] for g in G.arrows},
        {(h, g): T[G.comp[(h, g)]] @ comp @ Mat.block_diag(Ti[h], Ti[g]) for (h, g) in G.composable()},
        f"Split({G.name};{dim_a},{dim_k})")


def random_split_vbgroupoid(s: Sampler, max_objects: int = 4, max_fiber: int = 3,
                            twist: bool = True) -> FinVBGroupoid:
    kind = s.choice(["pair", "cyclic", "product"])
    if kind == "pair":
        G = pair_groupoid(s.integer(1, max_objects))
    elif kind == "cyclic":
        G = cyclic_group(s.integer(1, 3))
    else:
        G = product_groupoid(pair_groupoid(2), cyclic_group(2))
    dim_a = s.integer(1, max_fiber - 1) if max_fiber > 1 else 1
    dim_k = s.integer(0, max_fiber - dim_a)
    delta = s.matrix(dim_a, dim_k)
    return split_vbgroupoid(G, dim_a, dim_k, delta, s.integer(0, 10**6) if twist else None)


@dataclass(frozen=True)
class CoreBundle:
    basis: dict     # object -> Mat whose columns span K_m inside Omega_{1_m}
    delta: dict     # object -> Mat, K_m -> A_m in basis coordinates

    def dim(self, m) -> int:
        return self.basis[m].ncols


def core(W: FinVBGroupoid, basis: dict | None = None) -> CoreBundle:
    """K_m = ker(src on Omega_{1_m}) and delta_m = tgt restricted to it."""
    G = W.base
    out_b, out_d = {}, {}
    for m in G.objects:
        one = G.ident[m]
        Kb = basis[m] if basis is not None else W.src_lin[one].kernel()
        if basis is not None:
            if not (W.src_lin[one] @ Kb).is_zero() or Kb.rank() != Kb.ncols \
                    or Kb.ncols != W.fiber_dims[one] - W.side_dims[m]:
                raise GroupoidError(f"supplied core basis at {m} is not a basis of the core")
        out_b[m] = Kb
        out_d[m] = W.tgt_lin[one] @ Kb
    return CoreBundle(out_b, out_d)


def _jsonable(x):
    from fractions import Fraction
    if isinstance(x, Fraction):
        return qstr(x)
    if isinstance(x, Mat):
        return [[qstr(a) for a in r] for r in x.rows]
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


# ---------------------------------------------------------------------------
# the dual VB-groupoid
#
# Covectors on Omega_g are stored as coordinate vectors Phi with
# <Phi, xi> = Phi . xi; the side K*_m uses coordinates dual to the chosen
# core basis.


def _unit_block(W: FinVBGroupoid, K: CoreBundle, m) -> Mat:
    """[id_m | Kb_m]: A_m + K_m -> Omega_{1_m}, an isomorphism."""
    return Mat.hstack(W.id_lin[m], K.basis[m])


def pradines_dual(W: FinVBGroupoid, core_basis: dict | None = None) -> FinVBGroupoid:
    """The dual VB-groupoid Omega* over G with side K*.

    source:  <src*(Phi), k> = <Phi, -(0_g . k^{-1})>
    target:  <tgt*(Phi), k> = <Phi, k . 0_g>
    product: <Psi Phi, eta xi> = <Psi, eta> + <Phi, xi>
    unit:    <1_theta, 1_a + k> = <theta, k>
    inverse: <Phi^{-1}, xi^{-1}> = -<Phi, xi>
    """
    G = W.base
    K = core(W, core_basis)
    fd = W.fiber_dims
    src, tgt, ident, inv, comp = {}, {}, {}, {}, {}
    for g in G.arrows:
        a, b = G.src[g], G.tgt[g]
        ka, kb = K.dim(a), K.dim(b)
        # 0_g . k^{-1} for k in K_a
        right = Mat.vstack(Mat.zeros(fd[g], ka), W.inv_lin[G.ident[a]] @ K.basis[a])
        src[g] = -(W.comp_lin[(g, G.ident[a])] @ right).T
        left = Mat.vstack(K.basis[b], Mat.zeros(fd[g], kb))
        tgt[g] = (W.comp_lin[(G.ident[b], g)] @ left).T
        inv[g] = -(W.inv_lin[G.inv[g]]).T
    for m in G.objects:
        km = K.dim(m)
        sel = Mat.hstack(Mat.zeros(km, W.side_dims[m]), Mat.identity(km))
        ident[m] = (sel @ _unit_block(W, K, m).inv()).T
    for (h, g) in G.composable():
        C = W.compatible_basis(h, g)
        M = W.comp_lin[(h, g)] @ C
        comp[(h, g)] = (C @ _right_inverse(M)).T
    return FinVBGroupoid(G, {m: K.dim(m) for m in G.objects}, dict(fd), src, tgt, ident, inv,
                         comp, f"{W.name}*")


def decompositions(W: FinVBGroupoid, h, g, target, count: int, s: Sampler) -> list:
    """``count`` distinct pairs (eta, xi), compatible, with eta xi = target."""
    C = W.compatible_basis(h, g)
    M = W.comp_lin[(h, g)] @ C
    part = M.solve(target)
    if part is None:
        raise GroupoidError("target is not a product; the VB-groupoid is invalid")
    N = M.kernel()
    out, seen = [], set()
    tries = 0
    while len(out) < count and tries < 20 * count:
        tries += 1
        coeff = part if not out else tuple(p + v for p, v in zip(part, N @ s.vector(N.ncols)))
        pair = C @ coeff
        if pair in seen:
            continue
        seen.add(pair)
        out.append((pair[:W.fiber_dims[h]], pair[W.fiber_dims[h]:]))
        if N.ncols == 0:
            break
    return out


def dual_product_by_decomposition(W: FinVBGroupoid, h, g, psi, phi, target, count: int,
                                  s: Sampler) -> list:
    """Values <Psi, eta> + <Phi, xi> over several decompositions of target."""
    return [sum((a * b for a, b in zip(psi, eta)), 0) + sum((a * b for a, b in zip(phi, xi)), 0)
            for eta, xi in decompositions(W, h, g, target, count, s)]


def core_covector(W: FinVBGroupoid, K: CoreBundle, m, phi) -> tuple:
    """The core element of Omega* over m attached to phi in A*_m:
    <phi_bar, 1_X + k> = <phi, X + delta k>."""
    row = Mat([list(phi)], W.side_dims[m]) @ Mat.hstack(Mat.identity(W.side_dims[m]), K.delta[m])
    return (row @ _unit_block(W, K, m).inv()).rows[0]


def dual_core_basis(W: FinVBGroupoid, K: CoreBundle | None = None) -> dict:
    """Per object, the columns phi_bar(e_i) spanning the core of Omega*."""
    K = K or core(W)
    out = {}
    for m in W.base.objects:
        n = W.side_dims[m]
        cols = [core_covector(W, K, m, [int(i == j) for j in range(n)]) for i in range(n)]
        out[m] = Mat.from_cols(cols, W.fiber_dims[W.base.ident[m]]) if cols else \
            Mat.zeros(W.fiber_dims[W.base.ident[m]], 0)
    return out


@dataclass
class DualCoreReport:
    ok: bool
    dims_match: bool
    formula_in_core: bool
    spans: bool
    anchor_is_transpose: bool


def check_dual_core(W: FinVBGroupoid, D: FinVBGroupoid | None = None) -> DualCoreReport:
    """core(Omega*) is A* via phi -> phi_bar, with delta of Omega* equal to delta^T."""
    K = core(W)
    D = D or pradines_dual(W)
    KD = core(D)
    P = dual_core_basis(W, K)
    G = W.base
    dims = all(KD.dim(m) == W.side_dims[m] for m in G.objects)
    inside = all((D.src_lin[G.ident[m]] @ P[m]).is_zero() for m in G.objects)
    spans = all(P[m].rank() == W.side_dims[m] for m in G.objects)
    anchor = all(D.tgt_lin[G.ident[m]] @ P[m] == K.delta[m].T for m in G.objects)
    return DualCoreReport(dims and inside and spans and anchor, dims, inside, spans, anchor)


@dataclass
class DoubleDualReport:
    ok: bool
    base_map: dict          # object -> Mat, A_m -> side of Omega** at m
    failures: list


def double_dual_identify(W: FinVBGroupoid, core_basis: dict | None = None) -> DoubleDualReport:
    """Compare Omega** with Omega under the evaluation map (identity on fibres).

    The side of Omega** is the dual of the core of Omega*, which evaluation
    identifies with A; ``base_map`` records that identification in the
    coordinates of the chosen core basis of Omega*.
    """
    G = W.base
    K = core(W)
    D = pradines_dual(W)
    Kb_D = core_basis if core_basis is not None else core(D).basis
    DD = pradines_dual(D, Kb_D)
    P = dual_core_basis(W, K)
    f = {}
    for m in G.objects:
        T = Kb_D[m].solve_mat(P[m])
        if T is None:
            return DoubleDualReport(False, {}, [("core of dual not spanned by A*", m)])
        f[m] = T.inv().T
    bad = []
    for g in G.arrows:
        if DD.src_lin[g] != f[G.src[g]] @ W.src_lin[g]:
            bad.append(("source", g))
        if DD.tgt_lin[g] != f[G.tgt[g]] @ W.tgt_lin[g]:
            bad.append(("target", g))
        if DD.inv_lin[g] != W.inv_lin[g]:
            bad.append(("inverse", g))
    for m in G.objects:
        if DD.id_lin[m] @ f[m] != W.id_lin[m]:
            bad.append(("identity", m))
    for (h, g) in G.composable():
        C = W.compatible_basis(h, g)
        if DD.comp_lin[(h, g)] @ C != W.comp_lin[(h, g)] @ C:
            bad.append(("composition", (h, g)))
    # delta of Omega* is delta_A^T, so delta of Omega** is delta_A again
    KDD = core(DD)
    for m in G.objects:
        if DD.src_lin[G.ident[m]] @ K.basis[m] != Mat.zeros(W.side_dims[m], K.dim(m)) or \
                KDD.dim(m) != K.dim(m):
            bad.append(("core", m))
    return DoubleDualReport(not bad, f, bad)


# ---------------------------------------------------------------------------
# morphisms over the identity of G


@dataclass(frozen=True)
class VBGMorphism:
    source: FinVBGroupoid
    target: FinVBGroupoid
    fiber: dict     # arrow -> Mat, Omega_g -> Omega'_g
    base: dict      # object -> Mat, A_m -> A'_m


def check_morphism(F: VBGMorphism) -> ValidationReport:
    W, V = F.source, F.target
    G = W.base
    rep = ValidationReport()
    for g in G.arrows:
        Fg = F.fiber[g]
        rep.expect(V.src_lin[g] @ Fg == F.base[G.src[g]] @ W.src_lin[g], "source", g)
        rep.expect(V.tgt_lin[g] @ Fg == F.base[G.tgt[g]] @ W.tgt_lin[g], "target", g)
        rep.expect(F.fiber[G.inv[g]] @ W.inv_lin[g] == V.inv_lin[g] @ Fg, "inverse", g)
    for m in G.objects:
        rep.expect(F.fiber[G.ident[m]] @ W.id_lin[m] == V.id_lin[m] @ F.base[m], "identity", m)
    for (h, g) in G.composable():
        C = W.compatible_basis(h, g)
        hg = G.comp[(h, g)]
        lhs = F.fiber[hg] @ W.comp_lin[(h, g)] @ C
        rhs = V.comp_lin[(h, g)] @ Mat.block_diag(F.fiber[h], F.fiber[g]) @ C
        rep.expect(lhs == rhs, "composition", (h, g))
    return rep


def core_map(F: VBGMorphism, K: CoreBundle | None = None, K2: CoreBundle | None = None) -> dict:
    """f_K: K -> K' in core-basis coordinates."""
    K = K or core(F.source)
    K2 = K2 or core(F.target)
    out = {}
    for m in F.source.base.objects:
        one = F.source.base.ident[m]
        M = K2.basis[m].solve_mat(F.fiber[one] @ K.basis[m])
        if M is None:
            raise GroupoidError(f"core not preserved at {m}")
        out[m] = M
    return out


@dataclass(frozen=True)
class DualMorphism:
    morphism: VBGMorphism       # Omega'* -> Omega*
    core: dict                  # object -> Mat, A'* -> A*


def dual_of_morphism(F: VBGMorphism, duals: tuple | None = None) -> DualMorphism:
    """F*: Omega'* -> Omega* with fibres F_g^T, base map f_K^T and core map f^T."""
    rep = check_morphism(F)
    if not rep.ok:
        raise GroupoidError(f"not a morphism: {rep.first}")
    D_src, D_tgt = duals if duals is not None else (pradines_dual(F.source), pradines_dual(F.target))
    fK = core_map(F)
    G = F.source.base
    Fs = VBGMorphism(D_tgt, D_src, {g: F.fiber[g].T for g in G.arrows},
                     {m: fK[m].T for m in G.objects})
    return DualMorphism(Fs, {m: F.base[m].T for m in G.objects})


def compose_morphisms(F2: VBGMorphism, F1: VBGMorphism) -> VBGMorphism:
    G = F1.source.base
    return VBGMorphism(F1.source, F2.target, {g: F2.fiber[g] @ F1.fiber[g] for g in G.arrows},
                       {m: F2.base[m] @ F1.base[m] for m in G.objects})


def identity_morphism(W: FinVBGroupoid) -> VBGMorphism:
    G = W.base
    return VBGMorphism(W, W, {g: Mat.identity(W.fiber_dims[g]) for g in G.arrows},
                       {m: Mat.identity(W.side_dims[m]) for m in G.objects})


def split_morphism(W1: FinVBGroupoid, W2: FinVBGroupoid, fA: Mat, fK: Mat) -> VBGMorphism:
    """Morphism of untwisted split models induced by fA: A -> A', fK: K -> K'.

    Requires delta' fK = fA delta.
    """
    G = W1.base
    Fg = Mat.block_diag(fA, fK)
    return VBGMorphism(W1, W2, {g: Fg for g in G.arrows}, {m: fA for m in G.objects})


# ---------------------------------------------------------------------------
# JSON


def _enc(x):
    if isinstance(x, tuple):
        return {"t": [_enc(v) for v in x]}
    return x


def _dec(x):
    if isinstance(x, dict) and "t" in x:
        return tuple(_dec(v) for v in x["t"])
    return x


def _mat_json(M: Mat):
    return {"shape": [M.nrows, M.ncols], "rows": [[qstr(a) for a in r] for r in M.rows]}


def _mat_from(d) -> Mat:
    r, c = d["shape"]
    return Mat([[q(_frac(a)) for a in row] for row in d["rows"]], c) if r else Mat.zeros(0, c)


def _frac(s):
    from fractions import Fraction
    return Fraction(s)


def to_json(W: FinVBGroupoid) -> str:
    """Serialize; arrows are referenced by position, matrices as "p/q" strings."""
    G = W.base
    ai = {g: i for i, g in enumerate(G.arrows)}
    oi = {m: i for i, m in enumerate(G.objects)}
    doc = {
        "name": W.name,
        "groupoid": {
            "name": G.name,
            "objects": [_enc(m) for m in G.objects],
            "arrows": [{"label": _enc(g), "src": oi[G.src[g]], "tgt": oi[G.tgt[g]],
                        "inv": ai[G.inv[g]]} for g in G.arrows],
            "identities": [ai[G.ident[m]] for m in G.objects],
            "compose": [[ai[h], ai[g], ai[G.comp[(h, g)]]] for (h, g) in G.composable()],
        },
        "side_dims": [W.side_dims[m] for m in G.objects],
        "fiber_dims": [W.fiber_dims[g] for g in G.arrows],
        "src": [_mat_json(W.src_lin[g]) for g in G.arrows],
        "tgt": [_mat_json(W.tgt_lin[g]) for g in G.arrows],
        "inv": [_mat_json(W.inv_lin[g]) for g in G.arrows],
        "id": [_mat_json(W.id_lin[m]) for m in G.objects],
        "comp": [[ai[h], ai[g], _mat_json(W.comp_lin[(h, g)])] for (h, g) in G.composable()],
    }
    return json.dumps(doc, sort_keys=True)


def from_json(text: str) -> FinVBGroupoid:
    doc = json.loads(text)
    gd = doc["groupoid"]
    objs = tuple(_dec(m) for m in gd["objects"])
    arrows = tuple(_dec(a["label"]) for a in gd["arrows"])
    G = FiniteGroupoid(
        objs, arrows,
        {g: objs[a["src"]] for g, a in zip(arrows, gd["arrows"])},
        {g: objs[a["tgt"]] for g, a in zip(arrows, gd["arrows"])},
        {(arrows[h], arrows[g]): arrows[hg] for h, g, hg in gd["compose"]},
        {m: arrows[i] for m, i in zip(objs, gd["identities"])},
        {g: arrows[a["inv"]] for g, a in zip(arrows, gd["arrows"])},
        gd["name"])
    return FinVBGroupoid(
        G,
        dict(zip(objs, doc["side_dims"])),
        dict(zip(arrows, doc["fiber_dims"])),
        {g: _mat_from(m) for g, m in zip(arrows, doc["src"])},
        {g: _mat_from(m) for g, m in zip(arrows, doc["tgt"])},
        {m: _mat_from(d) for m, d in zip(objs, doc["id"])},
        {g: _mat_from(m) for g, m in zip(arrows, doc["inv"])},
        {(arrows[h], arrows[g]): _mat_from(m) for h, g, m in doc["comp"]},
        doc["name"])

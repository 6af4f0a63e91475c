"""Groupoids on coordinate spaces with polynomial structure maps.

Arrows live in R^N, objects in R^n. ``comp`` acts on R^{2N} holding (h, g)
and returns hg; it is only meaningful where src(h) = tgt(g). The registered
families (pair groupoids, vector spaces, products, and their tangent,
cotangent and core constructions) are all linear in these coordinates, so
kernels along identities have exact bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..exactcalc import Mat, PolyMap, Sampler, left_inverse, polymap_tangent_lift, projection
from ..fingpd import FinVBGroupoid, GroupoidError, ValidationReport, trivial_groupoid

REGISTERED = frozenset({"pair", "vector", "product", "tangent", "cotangent", "core",
                        "fibre", "linear"})


class ModelError(GroupoidError):
    """Raised for unregistered families and malformed models."""


@dataclass(frozen=True, eq=False)
class CoordGroupoid:
    base_dim: int
    arrow_dim: int
    src: PolyMap
    tgt: PolyMap
    ident: PolyMap
    inv: PolyMap
    comp: PolyMap
    name: str = "G"
    family: str = "custom"
    meta: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def linear(cls, S: Mat, T: Mat, U: Mat, I: Mat, C: Mat, name="G", family="linear",
               meta=None) -> "CoordGroupoid":
        n, N = S.nrows, S.ncols
        for M, shape in ((T, (n, N)), (U, (N, n)), (I, (N, N)), (C, (N, 2 * N))):
            if M.shape != shape:
                raise ModelError(f"{name}: structure matrix of shape {M.shape}, expected {shape}")
        return cls(n, N, PolyMap.from_matrix(S), PolyMap.from_matrix(T), PolyMap.from_matrix(U),
                   PolyMap.from_matrix(I), PolyMap.from_matrix(C), name, family, dict(meta or {}))

    def is_linear(self) -> bool:
        return all(f.is_linear() for f in (self.src, self.tgt, self.ident, self.inv, self.comp))

    def require_registered(self):
        if self.family not in REGISTERED or not self.is_linear():
            raise ModelError(f"{self.name}: family {self.family!r} is not registered")

    @property
    def mats(self) -> dict:
        if "mats" not in self._cache:
            self._cache["mats"] = {"S": self.src.matrix(), "T": self.tgt.matrix(),
                                   "U": self.ident.matrix(), "I": self.inv.matrix(),
                                   "C": self.comp.matrix()}
        return self._cache["mats"]

    @property
    def C1(self) -> Mat:
        """Derivative of comp in the first slot (right translations)."""
        return self.mats["C"].cols(0, self.arrow_dim)

    @property
    def C2(self) -> Mat:
        """Derivative of comp in the second slot (left translations)."""
        return self.mats["C"].cols(self.arrow_dim, 2 * self.arrow_dim)

    # elements

    def source(self, g):
        return self.src(g)

    def target(self, g):
        return self.tgt(g)

    def unit(self, m):
        return self.ident(m)

    def inverse(self, g):
        return self.inv(g)

    def compose(self, h, g):
        if self.src(h) != self.tgt(g):
            raise GroupoidError(f"{self.name}: arrows are not composable")
        return self.comp(tuple(h) + tuple(g))

    # composable sets

    def composable_basis(self) -> Mat:
        """Columns spanning {(h, g): src h = tgt g} in R^{2N}."""
        if "pairs" not in self._cache:
            self._check_linear_ends()
            S, T = self.src.matrix(), self.tgt.matrix()
            self._cache["pairs"] = Mat.hstack(S, -T).kernel()
        return self._cache["pairs"]

    def triple_basis(self) -> Mat:
        """Columns spanning composable triples (k, h, g) in R^{3N}."""
        if "triples" not in self._cache:
            self._check_linear_ends()
            S, T = self.src.matrix(), self.tgt.matrix()
            Z = Mat.zeros(self.base_dim, self.arrow_dim)
            eqs = Mat.vstack(Mat.hstack(S, -T, Z), Mat.hstack(Z, S, -T))
            self._cache["triples"] = eqs.kernel()
        return self._cache["triples"]

    def _check_linear_ends(self):
        if not (self.src.is_linear() and self.tgt.is_linear()):
            raise ModelError(f"{self.name}: composable pairs need linear source and target")

    def random_arrow(self, s: Sampler) -> tuple:
        return s.vector(self.arrow_dim)

    def random_composable(self, s: Sampler) -> tuple:
        v = self.composable_basis() @ s.vector(self.composable_basis().ncols)
        return v[:self.arrow_dim], v[self.arrow_dim:]


def param(B: Mat) -> PolyMap:
    return PolyMap.from_matrix(B)


# ---------------------------------------------------------------------------
# validation


def _witness_point(f, g, P, s, trials):
    for _ in range(trials):
        x = s.vector(f.dom)
        if f(x) != g(x):
            return {"point": P(x) if P is not None else x, "lhs": f(x), "rhs": g(x)}
    diff = next(i for i, (a, b) in enumerate(zip(f.components, g.components)) if a != b)
    return {"component": diff, "lhs": str(f.components[diff]), "rhs": str(g.components[diff])}


def check_identity(rep: ValidationReport, check: str, f: PolyMap, g: PolyMap,
                   P: PolyMap | None = None, s: Sampler | None = None, trials: int = 25):
    """Record whether f == g, symbolically when both have degree <= 4, else at samples.

    P, when given, maps the parameter space of f and g to the space a witness
    should be reported in.
    """
    s = s or Sampler(0)
    rep.checks += 1
    if f.degree() <= 4 and g.degree() <= 4:
        if f.components != g.components:
            rep.fail(check, _witness_point(f, g, P, s, trials))
        return
    for _ in range(trials):
        x = s.vector(f.dom)
        if f(x) != g(x):
            rep.fail(check, {"point": P(x) if P is not None else x, "lhs": f(x), "rhs": g(x)})
            return


def validate_groupoid(G: CoordGroupoid, sampler: Sampler | None = None, trials: int = 25,
                      rep: ValidationReport | None = None, prefix: str = "") -> ValidationReport:
    s = sampler or Sampler(0)
    rep = rep if rep is not None else ValidationReport()
    N, n = G.arrow_dim, G.base_dim
    idN, idn = PolyMap.identity(N), PolyMap.identity(n)
    P2 = param(G.composable_basis())
    P3 = param(G.triple_basis())
    first, second = projection(2 * N, range(N)), projection(2 * N, range(N, 2 * N))
    pk = projection(3 * N, range(N))
    pkh = projection(3 * N, range(2 * N))
    phg = projection(3 * N, range(N, 3 * N))
    pg = projection(3 * N, range(2 * N, 3 * N))

    def chk(name, f, g, P=None):
        check_identity(rep, prefix + name, f, g, P, s, trials)

    chk("source of identity", G.src @ G.ident, idn)
    chk("target of identity", G.tgt @ G.ident, idn)
    chk("source of product", G.src @ G.comp @ P2, G.src @ second @ P2, P2)
    chk("target of product", G.tgt @ G.comp @ P2, G.tgt @ first @ P2, P2)
    chk("left identity", G.comp @ (G.ident @ G.tgt).pair(idN), idN)
    chk("right identity", G.comp @ idN.pair(G.ident @ G.src), idN)
    chk("source of inverse", G.src @ G.inv, G.tgt)
    chk("target of inverse", G.tgt @ G.inv, G.src)
    chk("inverse on the left", G.comp @ G.inv.pair(idN), G.ident @ G.src)
    chk("inverse on the right", G.comp @ idN.pair(G.inv), G.ident @ G.tgt)
    lhs = G.comp @ (G.comp @ pkh).pair(pg)
    rhs = G.comp @ pk.pair(G.comp @ phg)
    chk("associativity", lhs @ P3, rhs @ P3, P3)
    return rep


def check_groupoid_morphism(rep: ValidationReport, label: str, f: PolyMap, dom: CoordGroupoid,
                            cod: CoordGroupoid, base: PolyMap, s: Sampler | None = None,
                            trials: int = 25):
    """f: dom -> cod over base: ends, units and products are preserved."""
    N = dom.arrow_dim
    P2 = param(dom.composable_basis())
    first, second = projection(2 * N, range(N)), projection(2 * N, range(N, 2 * N))
    check_identity(rep, f"{label}: source", cod.src @ f, base @ dom.src, None, s, trials)
    check_identity(rep, f"{label}: target", cod.tgt @ f, base @ dom.tgt, None, s, trials)
    check_identity(rep, f"{label}: units", f @ dom.ident, cod.ident @ base, None, s, trials)
    check_identity(rep, f"{label}: inverses", f @ dom.inv, cod.inv @ f, None, s, trials)
    check_identity(rep, f"{label}: products", f @ dom.comp @ P2,
                   cod.comp @ (f @ first).pair(f @ second) @ P2, P2, s, trials)


# ---------------------------------------------------------------------------
# registered families


def _select(nblocks: int, n: int, picks) -> Mat:
    """Matrix picking the listed n-blocks out of R^{nblocks * n}."""
    rows = []
    for b in picks:
        for i in range(n):
            r = [0] * (nblocks * n)
            r[b * n + i] = 1
            rows.append(r)
    return Mat(rows, nblocks * n) if rows else Mat.zeros(0, nblocks * n)


def pair_groupoid(n: int) -> CoordGroupoid:
    """R^n x R^n over R^n: (x, y) goes from y to x, (x, y)(y, z) = (x, z)."""
    if n < 0:
        raise ModelError("dimension must be non-negative")
    return CoordGroupoid.linear(
        S=_select(2, n, [1]), T=_select(2, n, [0]),
        U=Mat.vstack(Mat.identity(n), Mat.identity(n)),
        I=_select(2, n, [1, 0]), C=_select(4, n, [0, 3]),
        name=f"Pair(R^{n})", family="pair")


def vector_space_groupoid(n: int) -> CoordGroupoid:
    """R^n as an abelian group, a groupoid over a point."""
    return CoordGroupoid.linear(
        S=Mat.zeros(0, n), T=Mat.zeros(0, n), U=Mat.zeros(n, 0),
        I=-Mat.identity(n), C=Mat.hstack(Mat.identity(n), Mat.identity(n)),
        name=f"R^{n}", family="vector")


def _interleave(N1: int, N2: int) -> Mat:
    """(h1, h2, g1, g2) -> (h1, g1, h2, g2)."""
    n = 2 * (N1 + N2)
    order = (list(range(N1)) + list(range(N1 + N2, 2 * N1 + N2))
             + list(range(N1, N1 + N2)) + list(range(2 * N1 + N2, n)))
    return Mat([[int(j == i) for j in range(n)] for i in order], n)


def product_groupoid(G1: CoordGroupoid, G2: CoordGroupoid, name=None) -> CoordGroupoid:
    for G in (G1, G2):
        G.require_registered()
    m1, m2 = G1.mats, G2.mats
    C = Mat.block_diag(m1["C"], m2["C"]) @ _interleave(G1.arrow_dim, G2.arrow_dim)
    return CoordGroupoid.linear(
        Mat.block_diag(m1["S"], m2["S"]), Mat.block_diag(m1["T"], m2["T"]),
        Mat.block_diag(m1["U"], m2["U"]), Mat.block_diag(m1["I"], m2["I"]), C,
        name=name or f"{G1.name}x{G2.name}", family="product",
        meta={"factors": (G1, G2)})


def groupoid_from_fibre(F: FinVBGroupoid, name=None) -> CoordGroupoid:
    """The linear groupoid carried by a VB-groupoid over the one-point groupoid."""
    if len(F.base.arrows) != 1:
        raise ModelError("only VB-groupoids over a single arrow carry a linear groupoid")
    g = F.base.arrows[0]
    m = F.base.objects[0]
    return CoordGroupoid.linear(F.src_lin[g], F.tgt_lin[g], F.id_lin[m], F.inv_lin[g],
                                F.comp_lin[(g, g)], name=name or F.name, family="fibre",
                                meta={"fibre": F})


def as_finvb(G: CoordGroupoid, name=None) -> FinVBGroupoid:
    """A linear groupoid as a VB-groupoid over the one-point groupoid."""
    G.require_registered()
    P = trivial_groupoid(1)
    M = G.mats
    return FinVBGroupoid(P, {0: G.base_dim}, {0: G.arrow_dim}, {0: M["S"]}, {0: M["T"]},
                         {0: M["U"]}, {0: M["I"]}, {(0, 0): M["C"]}, name or G.name)


def tangent_groupoid(G: CoordGroupoid) -> CoordGroupoid:
    """TG over TM, coordinates (g, gdot); the maps are tangent lifts."""
    N = G.arrow_dim
    # the lift of comp reads (h, g, hdot, gdot); TG composes ((h, hdot), (g, gdot))
    perm = _select(4, N, [0, 2, 1, 3])
    comp = polymap_tangent_lift(G.comp) @ PolyMap.from_matrix(perm)
    return CoordGroupoid(2 * G.base_dim, 2 * N, polymap_tangent_lift(G.src),
                         polymap_tangent_lift(G.tgt), polymap_tangent_lift(G.ident),
                         polymap_tangent_lift(G.inv), comp, name=f"T{G.name}",
                         family="tangent" if G.family in REGISTERED else "custom",
                         meta={"base": G})


def tangent_fibre(G: CoordGroupoid) -> FinVBGroupoid:
    """The fibrewise linear structure of TG; for a linear G it is G itself."""
    return as_finvb(G, f"T{G.name} fibre")


def core_basis_of(G: CoordGroupoid) -> Mat:
    """Columns spanning ker T(src) along the identities."""
    G.require_registered()
    if "algebroid" not in G._cache:
        Kb = G.mats["S"].kernel()
        if Kb.ncols != G.arrow_dim - G.base_dim:
            raise ModelError(f"{G.name}: source is not a submersion")
        G._cache["algebroid"] = Kb
    return G._cache["algebroid"]


def unit_splitting(G: CoordGroupoid) -> tuple:
    """(Kb, B^-1) where B = [U | Kb] splits the tangent space at an identity."""
    Kb = core_basis_of(G)
    B = Mat.hstack(G.mats["U"], Kb)
    return Kb, B.inv()


def left_inv(B: Mat) -> Mat:
    return left_inverse(B) if B.ncols else Mat.zeros(0, B.nrows)

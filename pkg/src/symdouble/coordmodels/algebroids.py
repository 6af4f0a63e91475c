"""Lie algebroids on trivial bundles R^n x R^k with polynomial structure.

A section is a PolyMap R^n -> R^k. The bracket of the frame sections is
[e_i, e_j] = sum_k c^k_ij(x) e_k, and the anchor sends e_i to sum_a rho^a_i(x) d_a.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..exactcalc import Mat, Poly, PolyMap, Sampler, vf_bracket
from ..fingpd import ValidationReport
from .groupoids import CoordGroupoid, ModelError, core_basis_of, left_inv


@dataclass(frozen=True, eq=False)
class LieAlgebroidModel:
    base_dim: int
    fiber_dim: int
    anchor: tuple       # anchor[a][i]: Poly in base_dim variables
    structure: tuple    # structure[k][i][j]: Poly, the coefficient c^k_ij
    name: str = "A"
    meta: dict = field(default_factory=dict, repr=False)

    @classmethod
    def constant(cls, rho: Mat, name="A", meta=None) -> "LieAlgebroidModel":
        """Constant anchor, frame sections commuting."""
        n, k = rho.shape
        anchor = tuple(tuple(Poly.const(n, rho[a, i]) for i in range(k)) for a in range(n))
        zero = tuple(tuple(tuple(Poly(n) for _ in range(k)) for _ in range(k)) for _ in range(k))
        return cls(n, k, anchor, zero, name, dict(meta or {}))

    def is_constant(self) -> bool:
        return (all(p.degree() == 0 for row in self.anchor for p in row)
                and all(p.is_zero() for c in self.structure for row in c for p in row))

    def anchor_matrix(self) -> Mat:
        if not all(p.degree() == 0 for row in self.anchor for p in row):
            raise ModelError(f"{self.name}: anchor is not constant")
        return Mat([[p.constant_term() for p in row] for row in self.anchor], self.fiber_dim)

    def section(self, comps) -> PolyMap:
        return PolyMap(self.base_dim, comps)

    def anchor_field(self, X: PolyMap) -> PolyMap:
        n = self.base_dim
        out = []
        for a in range(n):
            acc = Poly(n)
            for i in range(self.fiber_dim):
                r = self.anchor[a][i]
                if r.is_zero() or X.components[i].is_zero():
                    continue
                acc = acc + (X.components[i] * r.constant_term() if r.degree() == 0
                             else r * X.components[i])
            out.append(acc)
        return PolyMap(n, out)

    def act(self, X: PolyMap, f: Poly) -> Poly:
        """rho(X) applied to the function f."""
        v = self.anchor_field(X)
        acc = Poly(self.base_dim)
        for a in range(self.base_dim):
            if not v.components[a].is_zero():
                acc = acc + v.components[a] * f.diff(a)
        return acc

    def bracket(self, X: PolyMap, Y: PolyMap) -> PolyMap:
        n, k = self.base_dim, self.fiber_dim
        out = []
        for c in range(k):
            acc = self.act(X, Y.components[c]) - self.act(Y, X.components[c])
            for i in range(k):
                if X.components[i].is_zero():
                    continue
                for j in range(k):
                    coeff = self.structure[c][i][j]
                    if not coeff.is_zero():
                        acc = acc + coeff * X.components[i] * Y.components[j]
            out.append(acc)
        return PolyMap(n, out)

    def negated(self) -> "LieAlgebroidModel":
        """Same bundle with bracket and anchor negated."""
        anchor = tuple(tuple(-p for p in row) for row in self.anchor)
        structure = tuple(tuple(tuple(-p for p in row) for row in c) for c in self.structure)
        return LieAlgebroidModel(self.base_dim, self.fiber_dim, anchor, structure,
                                 f"{self.name}-bar", dict(self.meta))


def lie_algebra_model(c, name="g") -> LieAlgebroidModel:
    """A Lie algebra as an algebroid over a point; c[k][i][j] = c^k_ij."""
    k = len(c)
    structure = tuple(tuple(tuple(Poly.const(0, c[a][i][j]) for j in range(k)) for i in range(k))
                      for a in range(k))
    return LieAlgebroidModel(0, k, (), structure, name)


def lie_algebroid(G: CoordGroupoid) -> LieAlgebroidModel:
    """AG = ker T(src) along the identities, anchored by T(tgt)."""
    try:
        G.require_registered()
    except ModelError:
        raise ModelError(f"{G.name}: the Lie functor is only implemented for registered "
                         "families") from None
    Kb = core_basis_of(G)
    rho = G.mats["T"] @ Kb
    return LieAlgebroidModel.constant(rho, f"A{G.name}", {"basis": Kb, "groupoid": G})


# ---------------------------------------------------------------------------
# sections and checks


def section_family(A: LieAlgebroidModel, s: Sampler, randoms: int = 4) -> list:
    """Coordinate sections, fibre-linear sections x_a e_i, and random degree-2 ones."""
    n, k = A.base_dim, A.fiber_dim
    out = []
    for i in range(k):
        out.append(PolyMap(n, [Poly.const(n, int(j == i)) for j in range(k)]))
    for a in range(n):
        for i in range(k):
            out.append(PolyMap(n, [Poly.var(n, a) if j == i else Poly(n) for j in range(k)]))
    for _ in range(randoms):
        out.append(s.polymap(n, k, 2))
    return out


def check_algebroid(A: LieAlgebroidModel, s: Sampler | None = None, trials: int = 5,
                    rep: ValidationReport | None = None) -> ValidationReport:
    """Antisymmetry, Jacobi, Leibniz and anchor compatibility on degree-2 sections."""
    s = s or Sampler(0)
    rep = rep if rep is not None else ValidationReport()
    n, k = A.base_dim, A.fiber_dim
    for _ in range(trials):
        X, Y, Z = (s.polymap(n, k, 2) for _ in range(3))
        f = s.poly(n, 2)
        XY, YX = A.bracket(X, Y), A.bracket(Y, X)
        rep.expect(XY + YX == PolyMap.zero(n, k), "antisymmetry", {"X": str(X), "Y": str(Y)})
        jac = A.bracket(X, A.bracket(Y, Z)) + A.bracket(Y, A.bracket(Z, X)) \
            + A.bracket(Z, A.bracket(X, Y))
        rep.expect(jac == PolyMap.zero(n, k), "Jacobi",
                   {"X": str(X), "Y": str(Y), "Z": str(Z)})
        fY = PolyMap(n, [f * c for c in Y.components])
        rhs = PolyMap(n, [f * a + A.act(X, f) * b for a, b in zip(XY.components, Y.components)])
        rep.expect(A.bracket(X, fY) == rhs, "Leibniz", {"X": str(X), "Y": str(Y), "f": str(f)})
        if n:
            lhs = A.anchor_field(XY)
            rhs = vf_bracket(A.anchor_field(X), A.anchor_field(Y))
            rep.expect(lhs == rhs, "anchor preserves brackets", {"X": str(X), "Y": str(Y)})
    return rep


def _push(F: Mat, X: PolyMap) -> PolyMap:
    """Pointwise F @ X(x) for a constant matrix F."""
    comps = []
    for row in F.rows:
        acc = Poly(X.dom)
        for c, p in zip(row, X.components):
            if c:
                acc = acc + p * c
        comps.append(acc)
    return PolyMap(X.dom, comps)


def related_sections(A: LieAlgebroidModel, B: LieAlgebroidModel, F: Mat, f: Mat,
                     s: Sampler, count: int) -> list:
    """Pairs (X, X') with F X = X' o f, for constant F over a linear base map f."""
    nA, nB = A.base_dim, B.base_dim
    fmap = PolyMap.from_matrix(f)
    pairs = []
    if f.rank() == nA:
        # f injective: extend F X off the image of f
        p = PolyMap.from_matrix(left_inv(f)) if nA else PolyMap.zero(nB, 0)
        ann = f.T.kernel()       # functionals vanishing on the image of f
        for X in section_family(A, s, randoms=max(1, count - A.fiber_dim * (nA + 1))):
            Xp = _push(F, X) @ p if nA else PolyMap(nB, [Poly.const(nB, c.constant_term())
                                                         for c in _push(F, X).components])
            if ann.ncols:
                lam = PolyMap.from_matrix(ann.T).components[0]
                extra = s.polymap(nB, B.fiber_dim, 1)
                Xp = Xp + PolyMap(nB, [lam * e for e in extra.components])
            pairs.append((X, Xp))
    elif f.rank() == nB:
        if F.rank() != B.fiber_dim:
            raise ModelError("related sections need a fibrewise surjection over a submersion")
        Fr = F.solve_mat(Mat.identity(B.fiber_dim))
        Kf = F.kernel()
        for Xp in section_family(B, s, randoms=max(1, count - B.fiber_dim * (nB + 1))):
            X = _push(Fr, Xp @ fmap)
            if Kf.ncols:
                X = X + _push(Kf, s.polymap(nA, Kf.ncols, 1))
            pairs.append((X, Xp))
    else:
        raise ModelError("base map is neither injective nor surjective")
    return pairs


def check_algebroid_morphism(A: LieAlgebroidModel, B: LieAlgebroidModel, F: Mat, f: Mat,
                             s: Sampler | None = None, count: int = 10, label: str = "",
                             rep: ValidationReport | None = None) -> ValidationReport:
    """Anchors and brackets of F-related sections correspond.

    F is the fibre map (constant), f the linear base map.
    """
    s = s or Sampler(0)
    rep = rep if rep is not None else ValidationReport()
    fmap = PolyMap.from_matrix(f)
    pairs = related_sections(A, B, F, f, s, count)
    for X, Xp in pairs:
        rep.expect(_push(F, X) == Xp @ fmap, f"{label}related", {"X": str(X), "X'": str(Xp)})
        lhs = _push(f, A.anchor_field(X))
        rhs = B.anchor_field(Xp) @ fmap
        rep.expect(lhs == rhs, f"{label}anchor", {"X": str(X), "X'": str(Xp)})
    for i in range(len(pairs)):
        X, Xp = pairs[i]
        Y, Yp = pairs[(i + 1) % len(pairs)]
        lhs = _push(F, A.bracket(X, Y))
        rhs = B.bracket(Xp, Yp) @ fmap
        rep.expect(lhs == rhs, f"{label}bracket",
                   {"X": str(X), "Y": str(Y), "X'": str(Xp), "Y'": str(Yp)})
    return rep


def product_algebroid(A: LieAlgebroidModel, B: LieAlgebroidModel, name=None) -> LieAlgebroidModel:
    if not (A.is_constant() and B.is_constant()):
        raise ModelError("products are built for constant algebroids only")
    return LieAlgebroidModel.constant(Mat.block_diag(A.anchor_matrix(), B.anchor_matrix()),
                                      name or f"{A.name}x{B.name}")


def restrict_algebroid(A: LieAlgebroidModel, base: Mat, fibre: Mat, name=None) -> LieAlgebroidModel:
    """Restriction of a constant algebroid to a linear subspace of the base
    (columns of ``base``) and a constant subbundle (columns of ``fibre``)."""
    if not A.is_constant():
        raise ModelError("restriction is built for constant algebroids only")
    image = A.anchor_matrix() @ fibre
    coords = base.solve_mat(image) if base.ncols else (None if not image.is_zero()
                                                        else Mat.zeros(0, fibre.ncols))
    if coords is None:
        raise ModelError("anchor is not tangent to the base subspace")
    return LieAlgebroidModel.constant(coords, name or f"{A.name}|")

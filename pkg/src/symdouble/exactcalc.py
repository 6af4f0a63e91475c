"""Exact rational scalars, sparse multivariate polynomials, and linear algebra.

Everything downstream computes through this module. Scalars are
:class:`fractions.Fraction`; nothing here ever touches a float.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

Q = Fraction


def q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact scalar."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars")
    return Fraction(x)


def qstr(x: Fraction) -> str:
    x = q(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Sparse polynomial in ``nvars`` variables with rational coefficients.

    ``terms`` maps exponent tuples to nonzero coefficients. Instances are
    treated as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent {exps} has wrong length for {nvars} vars")
            c = q(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def _trusted(cls, nvars: int, terms: dict) -> "Poly":
        """Internal: terms already hold exact tuple keys and Fraction values."""
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = {e: c for e, c in terms.items() if c}
        return p

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        if not 0 <= i < nvars:
            raise IndexError(f"variable {i} out of range for {nvars} vars")
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> "Poly":
        n = len(coeffs)
        p = cls.const(n, const)
        for i, c in enumerate(coeffs):
            p = p + cls.var(n, i) * c
        return p

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different rings")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly._trusted(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._trusted(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = q(other)
            return Poly._trusted(self.nvars, {e: a * c for e, a in self.terms.items()})
        if other.nvars != self.nvars:
            other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._trusted(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == Poly.const(self.nvars, q(other))
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def diff(self, i: int) -> "Poly":
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable {i} out of range for {self.nvars} vars")
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return Poly(self.nvars, out)

    def __call__(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError("evaluation point has wrong dimension")
        pt = [q(x) for x in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(pt, e):
                if k:
                    t *= x ** k
            total += t
        return total

    def substitute(self, polys: Sequence["Poly"]) -> "Poly":
        """Compose: replace variable i by ``polys[i]`` (all in a common ring)."""
        if len(polys) != self.nvars:
            raise ValueError("need one polynomial per variable")
        if not polys:
            return self
        m = polys[0].nvars
        out = Poly(m)
        for e, c in self.terms.items():
            t = Poly.const(m, c)
            for p, k in zip(polys, e):
                if k:
                    t = t * p ** k
            out = out + t
        return out

    def embed(self, nvars: int, offset: int = 0) -> "Poly":
        """Same polynomial viewed in a larger ring, variables shifted by offset."""
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * nvars
            e2[offset:offset + self.nvars] = e
            out[tuple(e2)] = c
        return Poly(nvars, out)

    def __repr__(self):
        return f"Poly({self.nvars}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_diff(p: Poly, i: int) -> Poly:
    return p.diff(i)


# ---------------------------------------------------------------------------
# matrices


class Mat:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, ncols: int | None = None):
        rows = tuple(tuple(q(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("empty matrix needs an explicit column count")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def _raw(cls, rows, ncols: int) -> "Mat":
        # rows already hold Fractions of the right length
        m = cls.__new__(cls)
        m.rows = tuple(tuple(r) for r in rows)
        m.nrows = len(m.rows)
        m.ncols = ncols
        return m

    @classmethod
    def zeros(cls, r: int, c: int) -> "Mat":
        return cls([[0] * c for _ in range(r)], c)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def col(cls, v: Sequence) -> "Mat":
        return cls([[x] for x in v], 1)

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence], nrows: int) -> "Mat":
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    @classmethod
    def hstack(cls, *ms: "Mat") -> "Mat":
        n = ms[0].nrows
        if any(m.nrows != n for m in ms):
            raise ValueError("hstack row mismatch")
        return cls([sum((m.rows[i] for m in ms), ()) for i in range(n)],
                   sum(m.ncols for m in ms))

    @classmethod
    def vstack(cls, *ms: "Mat") -> "Mat":
        c = ms[0].ncols
        if any(m.ncols != c for m in ms):
            raise ValueError("vstack column mismatch")
        return cls([r for m in ms for r in m.rows], c)

    @classmethod
    def block_diag(cls, *ms: "Mat") -> "Mat":
        total = sum(m.ncols for m in ms)
        rows = []
        off = 0
        for m in ms:
            for r in m.rows:
                rows.append([0] * off + list(r) + [0] * (total - off - m.ncols))
            off += m.ncols
        return cls(rows, total)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def T(self) -> "Mat":
        return Mat([[self.rows[i][j] for i in range(self.nrows)]
                    for j in range(self.ncols)], self.nrows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def cols(self, start: int, stop: int) -> "Mat":
        return Mat([r[start:stop] for r in self.rows], stop - start)

    def rowslice(self, start: int, stop: int) -> "Mat":
        return Mat(self.rows[start:stop], self.ncols)

    def __matmul__(self, other):
        if isinstance(other, Mat):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            # skip zero entries; structure matrices are mostly sparse
            oc = [[(j, b) for j, b in enumerate(c) if b] for c in other.columns()]
            out = []
            for r in self.rows:
                out.append([sum((r[j] * b for j, b in c if r[j]), Fraction(0)) for c in oc])
            return Mat._raw(out, other.ncols)
        v = [q(x) for x in other]
        if len(v) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector[{len(v)}]")
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.rows)

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in +")
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                   self.ncols)

    def __neg__(self) -> "Mat":
        return Mat([[-a for a in r] for r in self.rows], self.ncols)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def scale(self, c) -> "Mat":
        c = q(c)
        return Mat([[a * c for a in r] for r in self.rows], self.ncols)

    def __eq__(self, other):
        return isinstance(other, Mat) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def __repr__(self):
        body = "; ".join(" ".join(str(a) for a in r) for r in self.rows)
        return f"Mat[{self.nrows}x{self.ncols}]({body})"

    def rref(self):
        """Reduced row echelon form and pivot columns."""
        m = [list(r) for r in self.rows]
        pivots = []
        row = 0
        for c in range(self.ncols):
            pr = next((i for i in range(row, self.nrows) if m[i][c] != 0), None)
            if pr is None:
                continue
            m[row], m[pr] = m[pr], m[row]
            inv = 1 / m[row][c]
            m[row] = [a * inv for a in m[row]]
            for i in range(self.nrows):
                if i != row and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[row])]
            pivots.append(c)
            row += 1
            if row == self.nrows:
                break
        return Mat(m, self.ncols), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> "Mat":
        """Basis of the null space, as the columns of the returned matrix."""
        r, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for i, p in enumerate(pivots):
                v[p] = -r.rows[i][f]
            basis.append(v)
        return Mat.from_cols(basis, self.ncols) if basis else Mat.zeros(self.ncols, 0)

    def solve(self, b: Sequence):
        """One particular solution of ``self @ x = b`` or None if inconsistent."""
        b = [q(x) for x in b]
        if len(b) != self.nrows:
            raise ValueError("right-hand side has wrong length")
        aug = Mat.hstack(self, Mat.col(b)) if self.nrows else Mat.zeros(0, self.ncols + 1)
        r, pivots = aug.rref()
        if self.ncols in pivots:
            return None
        x = [Fraction(0)] * self.ncols
        for i, p in enumerate(pivots):
            x[p] = r.rows[i][self.ncols]
        return tuple(x)

    def solve_mat(self, B: "Mat") -> "Mat | None":
        cols = []
        for c in B.columns():
            x = self.solve(c)
            if x is None:
                return None
            cols.append(x)
        return Mat.from_cols(cols, self.ncols) if cols else Mat.zeros(self.ncols, 0)

    def inv(self) -> "Mat":
        if self.nrows != self.ncols:
            raise ValueError("only square matrices are invertible")
        out = self.solve_mat(Mat.identity(self.nrows))
        if out is None or self.rank() != self.nrows:
            raise ZeroDivisionError("singular matrix")
        return out

    def det(self) -> Fraction:
        if self.nrows != self.ncols:
            raise ValueError("determinant of non-square matrix")
        m = [list(r) for r in self.rows]
        n = self.nrows
        d = Fraction(1)
        for c in range(n):
            pr = next((i for i in range(c, n) if m[i][c] != 0), None)
            if pr is None:
                return Fraction(0)
            if pr != c:
                m[c], m[pr] = m[pr], m[c]
                d = -d
            d *= m[c][c]
            for i in range(c + 1, n):
                f = m[i][c] / m[c][c]
                if f:
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return d


def mat_solve(A: Mat, b: Sequence):
    """Return ``(particular, kernel)``; particular is None when inconsistent."""
    return A.solve(b), A.kernel()


def left_inverse(B: Mat) -> Mat:
    """A matrix L with L @ B = I, for B of full column rank."""
    if B.rank() != B.ncols:
        raise ValueError("left inverse needs full column rank")
    return (B.T @ B).inv() @ B.T


def in_span(B: Mat, v: Sequence) -> bool:
    return B.solve(v) is not None if B.ncols else all(q(x) == 0 for x in v)


def coords_in(B: Mat, v: Sequence) -> tuple:
    """Coordinates of v in the column basis B; raises if v is outside the span."""
    x = B.solve(v)
    if x is None:
        raise ValueError("vector is not in the span of the basis")
    return x


# ---------------------------------------------------------------------------
# polynomial maps


class PolyMap:
    """A polynomial map R^dom -> R^cod."""

    __slots__ = ("dom", "components")

    def __init__(self, dom: int, components: Iterable[Poly]):
        comps = tuple(components)
        for p in comps:
            if p.nvars != dom:
                raise ValueError("component lives in the wrong ring")
        self.dom = dom
        self.components = comps

    @property
    def cod(self) -> int:
        return len(self.components)

    @classmethod
    def identity(cls, n: int) -> "PolyMap":
        return cls(n, [Poly.var(n, i) for i in range(n)])

    @classmethod
    def from_matrix(cls, M: Mat, offset=None) -> "PolyMap":
        comps = [Poly.linear(r) for r in M.rows]
        if offset is not None:
            comps = [p + c for p, c in zip(comps, offset)]
        if M.nrows == 0:
            return cls(M.ncols, [])
        return cls(M.ncols, comps)

    @classmethod
    def zero(cls, dom: int, cod: int) -> "PolyMap":
        return cls(dom, [Poly(dom) for _ in range(cod)])

    def __call__(self, point: Sequence) -> tuple:
        if len(point) != self.dom:
            raise ValueError(f"point of dim {len(point)} fed to map on R^{self.dom}")
        return tuple(p(point) for p in self.components)

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """self after inner."""
        if inner.cod != self.dom:
            raise ValueError("composition dimension mismatch")
        if inner.cod == 0:
            return PolyMap(inner.dom, [Poly.const(inner.dom, p.constant_term())
                                       for p in self.components])
        return PolyMap(inner.dom, [p.substitute(inner.components) for p in self.components])

    def __matmul__(self, inner: "PolyMap") -> "PolyMap":
        return self.compose(inner)

    def __add__(self, other: "PolyMap") -> "PolyMap":
        if (self.dom, self.cod) != (other.dom, other.cod):
            raise ValueError("dimension mismatch")
        return PolyMap(self.dom, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "PolyMap") -> "PolyMap":
        if (self.dom, self.cod) != (other.dom, other.cod):
            raise ValueError("dimension mismatch")
        return PolyMap(self.dom, [a - b for a, b in zip(self.components, other.components)])

    def __eq__(self, other):
        return (isinstance(other, PolyMap) and self.dom == other.dom
                and self.components == other.components)

    def __hash__(self):
        return hash((self.dom, self.components))

    def __repr__(self):
        return f"PolyMap(R^{self.dom}->R^{self.cod}: {[str(p) for p in self.components]})"

    def degree(self) -> int:
        return max((p.degree() for p in self.components), default=0)

    def is_linear(self) -> bool:
        return all(p.degree() <= 1 and p.constant_term() == 0 for p in self.components)

    def jacobian(self) -> list[list[Poly]]:
        return [[p.diff(j) for j in range(self.dom)] for p in self.components]

    def jacobian_at(self, point: Sequence) -> Mat:
        return Mat([[d(point) for d in row] for row in self.jacobian()], self.dom)

    def matrix(self) -> Mat:
        """The matrix of a linear map."""
        if not self.is_linear():
            raise ValueError("map is not linear")
        return self.jacobian_at([0] * self.dom)

    def product(self, other: "PolyMap") -> "PolyMap":
        """(x, y) -> (self(x), other(y))."""
        n = self.dom + other.dom
        return PolyMap(n, [p.embed(n, 0) for p in self.components]
                       + [p.embed(n, self.dom) for p in other.components])

    def pair(self, other: "PolyMap") -> "PolyMap":
        """x -> (self(x), other(x))."""
        if self.dom != other.dom:
            raise ValueError("dimension mismatch")
        return PolyMap(self.dom, self.components + other.components)

    def restrict_components(self, idx: Sequence[int]) -> "PolyMap":
        return PolyMap(self.dom, [self.components[i] for i in idx])


def projection(n: int, idx: Sequence[int]) -> PolyMap:
    return PolyMap(n, [Poly.var(n, i) for i in idx])


def polymap_tangent_lift(f: PolyMap) -> PolyMap:
    """(x, v) -> (f(x), Jf(x) v) on doubled coordinates."""
    n = 2 * f.dom
    xs = [Poly.var(n, i) for i in range(f.dom)]
    vs = [Poly.var(n, f.dom + i) for i in range(f.dom)]
    base = [p.substitute(xs) for p in f.components]
    vel = []
    for row in f.jacobian():
        acc = Poly(n)
        for d, v in zip(row, vs):
            acc = acc + d.substitute(xs) * v
        vel.append(acc)
    return PolyMap(n, base + vel)


def vf_bracket(X: PolyMap, Y: PolyMap) -> PolyMap:
    """Lie bracket of polynomial vector fields, [X,Y]^i = X^j d_j Y^i - Y^j d_j X^i."""
    n = X.dom
    if not (X.dom == X.cod == Y.dom == Y.cod):
        raise ValueError("vector fields must live on the same R^n")
    comps = []
    for i in range(n):
        acc = Poly(n)
        for j in range(n):
            acc = acc + X.components[j] * Y.components[i].diff(j)
            acc = acc - Y.components[j] * X.components[i].diff(j)
        comps.append(acc)
    return PolyMap(n, comps)


# ---------------------------------------------------------------------------
# sampling


class Sampler:
    """Seeded source of small-height rationals (|num|, den <= height)."""

    def __init__(self, seed: int = 0, height: int = 13):
        self.rng = random.Random(seed)
        self.height = height

    def scalar(self, nonzero: bool = False) -> Fraction:
        while True:
            x = Fraction(self.rng.randint(-self.height, self.height),
                         self.rng.randint(1, self.height))
            if x or not nonzero:
                return x

    def vector(self, n: int) -> tuple:
        return tuple(self.scalar() for _ in range(n))

    def matrix(self, r: int, c: int) -> Mat:
        return Mat([[self.scalar() for _ in range(c)] for _ in range(r)], c)

    def invertible(self, n: int) -> Mat:
        while True:
            m = self.matrix(n, n)
            if m.rank() == n:
                return m

    def in_span(self, B: Mat) -> tuple:
        return B @ self.vector(B.ncols)

    def integer(self, lo: int, hi: int) -> int:
        return self.rng.randint(lo, hi)

    def choice(self, seq):
        return self.rng.choice(seq)

    def poly(self, nvars: int, degree: int, density: float = 0.5) -> Poly:
        terms = {}
        for e in product(range(degree + 1), repeat=nvars):
            if sum(e) <= degree and self.rng.random() < density:
                terms[e] = self.scalar()
        return Poly(nvars, terms)

    def polymap(self, dom: int, cod: int, degree: int) -> PolyMap:
        return PolyMap(dom, [self.poly(dom, degree) for _ in range(cod)])


def polymap_equal_on_samples(f: PolyMap, g: PolyMap, sampler: Sampler | None = None,
                             trials: int = 25, symbolic: bool = False,
                             points=None) -> bool:
    if (f.dom, f.cod) != (g.dom, g.cod):
        raise ValueError("maps have different shapes")
    if symbolic:
        return f.components == g.components
    if points is None:
        sampler = sampler or Sampler(0)
        points = [sampler.vector(f.dom) for _ in range(trials)]
    return all(f(p) == g(p) for p in points)

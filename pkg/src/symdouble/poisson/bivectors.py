"""Polynomial bivectors, the Schouten test, Lie-Poisson duals and Koszul brackets.

Conventions: {f, g} = sum pi^{ij} d_i f d_j g, and the sharp map sends a
covector w to the vector with components sum_i w_i pi^{ij}, so that
pi^#(df) g = {f, g}. With constant pi the matrix of pi^# is pi^T.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from ..exactcalc import Mat, Poly, PolyMap
from ..coordmodels import LieAlgebroidModel


class PoissonError(ValueError):
    """A bivector fails a required property (antisymmetry, Jacobi, linearity)."""


def _const(n, c) -> Poly:
    return Poly.const(n, c)


@dataclass(frozen=True, eq=False)
class PolyBivector:
    dim: int
    pi: tuple           # pi[i][j]: Poly in dim variables
    name: str = "pi"

    def __post_init__(self):
        n = self.dim
        if len(self.pi) != n or any(len(r) != n for r in self.pi):
            raise PoissonError(f"{self.name}: expected a {n}x{n} array")
        for i in range(n):
            for j in range(i, n):
                if self.pi[i][j] + self.pi[j][i] != Poly(n):
                    raise PoissonError(f"{self.name}: not antisymmetric at ({i}, {j}): "
                                       f"{self.pi[i][j]} vs {self.pi[j][i]}")

    @classmethod
    def from_matrix(cls, M: Mat, name="pi") -> "PolyBivector":
        n = M.nrows
        return cls(n, tuple(tuple(_const(n, M[i, j]) for j in range(n)) for i in range(n)), name)

    @classmethod
    def zero(cls, n: int, name="0") -> "PolyBivector":
        return cls.from_matrix(Mat.zeros(n, n), name)

    def __add__(self, other):
        return PolyBivector(self.dim, tuple(tuple(a + b for a, b in zip(r, s))
                                            for r, s in zip(self.pi, other.pi)), self.name)

    def __neg__(self):
        return PolyBivector(self.dim, tuple(tuple(-a for a in r) for r in self.pi), self.name)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, PolyBivector) and self.pi == other.pi

    __hash__ = object.__hash__

    def is_constant(self) -> bool:
        return all(p.degree() <= 0 for r in self.pi for p in r)

    def matrix(self) -> Mat:
        if not self.is_constant():
            raise PoissonError(f"{self.name}: coefficients are not constant")
        return Mat([[p.constant_term() for p in r] for r in self.pi], self.dim)

    def at(self, x) -> Mat:
        return Mat([[p(x) for p in r] for r in self.pi], self.dim)

    def embed(self, total: int, offset: int) -> "PolyBivector":
        """The same bivector on a block of coordinates of R^total."""
        rows = [[Poly(total) for _ in range(total)] for _ in range(total)]
        for i in range(self.dim):
            for j in range(self.dim):
                rows[offset + i][offset + j] = self.pi[i][j].embed(total, offset)
        return PolyBivector(total, tuple(map(tuple, rows)), self.name)

    def pushforward(self, F: Mat) -> "PolyBivector":
        """F pi F^T for a linear map F, valid when the result is constant along fibres."""
        return PolyBivector.from_matrix(F @ self.matrix() @ F.T, f"{self.name}*")

    def bracket(self, f: Poly, g: Poly) -> Poly:
        acc = Poly(self.dim)
        for i in range(self.dim):
            fi = f.diff(i)
            if fi.is_zero():
                continue
            for j in range(self.dim):
                if not self.pi[i][j].is_zero():
                    acc = acc + self.pi[i][j] * fi * g.diff(j)
        return acc

    def sharp(self, omega: PolyMap) -> PolyMap:
        """The vector field pi^#(omega) for a polynomial one-form omega."""
        n = self.dim
        out = []
        for j in range(n):
            acc = Poly(n)
            for i in range(n):
                if not self.pi[i][j].is_zero():
                    acc = acc + omega.components[i] * self.pi[i][j]
            out.append(acc)
        return PolyMap(n, out)

    def sharp_map(self) -> PolyMap:
        """(x, w) -> (x, pi^#_x w) on R^n x R^n, the bundle map T*R^n -> TR^n."""
        n = self.dim
        xs = [Poly.var(2 * n, i) for i in range(n)]
        ws = [Poly.var(2 * n, n + i) for i in range(n)]
        vel = []
        for j in range(n):
            acc = Poly(2 * n)
            for i in range(n):
                if not self.pi[i][j].is_zero():
                    acc = acc + self.pi[i][j].embed(2 * n) * ws[i]
            vel.append(acc)
        return PolyMap(2 * n, xs + vel)

    def pairing(self, omega: PolyMap, theta: PolyMap) -> Poly:
        acc = Poly(self.dim)
        for i in range(self.dim):
            for j in range(self.dim):
                if not self.pi[i][j].is_zero():
                    acc = acc + self.pi[i][j] * omega.components[i] * theta.components[j]
        return acc

    def is_poisson(self) -> bool:
        return all(c.is_zero() for c in schouten_jacobi(self))

    def rank_at(self, x) -> int:
        return self.at(x).rank()

    def __str__(self):
        return "[" + "; ".join(", ".join(str(p) for p in r) for r in self.pi) + "]"


def schouten_jacobi(pi: PolyBivector) -> list:
    """The components J^{ijk}, i < j < k, of the Jacobiator of pi:
    {x_i, {x_j, x_k}} + cyclic = sum_l pi^{il} d_l pi^{jk} + cyclic.
    They vanish exactly when [pi, pi] = 0."""
    n = pi.dim
    P = pi.pi
    out = []
    for i, j, k in combinations(range(n), 3):
        acc = Poly(n)
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for l in range(n):
                if not P[a][l].is_zero():
                    acc = acc + P[a][l] * P[b][c].diff(l)
        out.append(acc)
    return out


def require_poisson(pi: PolyBivector):
    for idx, c in zip(combinations(range(pi.dim), 3), schouten_jacobi(pi)):
        if not c.is_zero():
            raise PoissonError(f"{pi.name}: Jacobi fails, component {idx} = {c}")


def standard_bivector(k: int, name="pi_std") -> PolyBivector:
    """The canonical bivector of T*R^k in coordinates (x, xi): {xi_i, x^i} = 1.

    It is the Lie-Poisson structure of the tangent algebroid, which is how the
    sign is fixed throughout the package."""
    I = Mat.identity(k)
    M = Mat.vstack(Mat.hstack(Mat.zeros(k, k), -I), Mat.hstack(I, Mat.zeros(k, k)))
    return PolyBivector.from_matrix(M, name)


# ---------------------------------------------------------------------------
# linear Poisson structures and algebroids


def lie_poisson_from_algebroid(A: LieAlgebroidModel) -> PolyBivector:
    """The linear Poisson structure on A* in coordinates (x, xi):

        {xi_i, xi_j} = sum_c c^c_ij(x) xi_c,  {xi_i, x^a} = rho^a_i(x),  {x^a, x^b} = 0,

    so that {l_X, l_Y} = l_[X,Y] and {l_X, f o q} = (rho(X) f) o q.
    """
    n, k = A.base_dim, A.fiber_dim
    N = n + k
    rows = [[Poly(N) for _ in range(N)] for _ in range(N)]
    xi = [Poly.var(N, n + c) for c in range(k)]
    for i in range(k):
        for a in range(n):
            r = A.anchor[a][i].embed(N)
            rows[n + i][a] = r
            rows[a][n + i] = -r
        for j in range(k):
            acc = Poly(N)
            for c in range(k):
                coeff = A.structure[c][i][j]
                if not coeff.is_zero():
                    acc = acc + coeff.embed(N) * xi[c]
            rows[n + i][n + j] = acc
    try:
        pi = PolyBivector(N, tuple(map(tuple, rows)), f"LP({A.name})")
    except PoissonError as e:
        raise PoissonError(f"{A.name}: structure functions are not antisymmetric ({e})") from None
    try:
        require_poisson(pi)
    except PoissonError as e:
        raise PoissonError(f"{A.name}: not a Lie algebroid ({e})") from None
    return pi


def is_linear_poisson(pi: PolyBivector, n: int) -> bool:
    """Base block zero, mixed block basic, fibre block linear in the fibre."""
    N = pi.dim

    def basic(p):
        return all(all(e == 0 for e in mono[n:]) for mono in p.terms)

    def fibre_linear(p):
        return all(sum(mono[n:]) == 1 for mono in p.terms)

    for i in range(N):
        for j in range(N):
            p = pi.pi[i][j]
            if i < n and j < n and not p.is_zero():
                return False
            if (i < n) != (j < n) and not basic(p):
                return False
            if i >= n and j >= n and not fibre_linear(p):
                return False
    return True


def algebroid_from_linear_poisson(pi: PolyBivector, n: int, name="A") -> LieAlgebroidModel:
    """Inverse of lie_poisson_from_algebroid on R^n x R^k with k = dim - n."""
    if not is_linear_poisson(pi, n):
        raise PoissonError(f"{pi.name}: not a linear Poisson structure")
    N = pi.dim
    k = N - n
    zero = [0] * N

    def restrict(p):
        return p.substitute([Poly.var(n, a) for a in range(n)] + [Poly(n)] * k)

    anchor = tuple(tuple(restrict(pi.pi[n + i][a]) for i in range(k)) for a in range(n))
    structure = []
    for c in range(k):
        e = list(zero)
        e[n + c] = 1
        block = []
        for i in range(k):
            row = []
            for j in range(k):
                p = pi.pi[n + i][n + j]
                row.append(restrict(p.diff(n + c)))
            block.append(tuple(row))
        structure.append(tuple(block))
    return LieAlgebroidModel(n, k, anchor, tuple(structure), name)


# ---------------------------------------------------------------------------
# the cotangent algebroid


def _d(f: Poly) -> PolyMap:
    return PolyMap(f.nvars, [f.diff(i) for i in range(f.nvars)])


def lie_derivative_form(V: PolyMap, theta: PolyMap) -> PolyMap:
    """(L_V theta)_j = V^i d_i theta_j + theta_i d_j V^i."""
    n = V.dom
    out = []
    for j in range(n):
        acc = Poly(n)
        for i in range(n):
            acc = acc + V.components[i] * theta.components[j].diff(i)
            acc = acc + theta.components[i] * V.components[i].diff(j)
        out.append(acc)
    return PolyMap(n, out)


def koszul_bracket(pi: PolyBivector, omega: PolyMap, theta: PolyMap) -> PolyMap:
    """[w, t] = L_{pi# w} t - L_{pi# t} w - d(pi(w, t))."""
    require_poisson(pi)
    if omega.dom != pi.dim or theta.dom != pi.dim:
        raise PoissonError("forms must live on the Poisson manifold")
    return (lie_derivative_form(pi.sharp(omega), theta)
            - lie_derivative_form(pi.sharp(theta), omega) - _d(pi.pairing(omega, theta)))


def cotangent_algebroid(pi: PolyBivector, name=None) -> LieAlgebroidModel:
    """T*R^n with anchor pi^# and [dx^i, dx^j] = sum_k d_k pi^{ij} dx^k."""
    require_poisson(pi)
    n = pi.dim
    anchor = tuple(tuple(pi.pi[i][a] for i in range(n)) for a in range(n))
    structure = tuple(tuple(tuple(pi.pi[i][j].diff(c) for j in range(n)) for i in range(n))
                      for c in range(n))
    return LieAlgebroidModel(n, n, anchor, structure, name or f"T*({pi.name})")


def tangent_lift(pi: PolyBivector) -> PolyBivector:
    """The complete lift on TR^n, coordinates (x, v):
    {x^i, x^j} = 0, {x^i, v^j} = pi^{ij}, {v^i, v^j} = v^k d_k pi^{ij}."""
    n = pi.dim
    N = 2 * n
    rows = [[Poly(N) for _ in range(N)] for _ in range(N)]
    v = [Poly.var(N, n + c) for c in range(n)]
    for i in range(n):
        for j in range(n):
            p = pi.pi[i][j].embed(N)
            rows[i][n + j] = p
            rows[n + j][i] = -p
            acc = Poly(N)
            for c in range(n):
                acc = acc + v[c] * pi.pi[i][j].diff(c).embed(N)
            rows[n + i][n + j] = acc
    return PolyBivector(N, tuple(map(tuple, rows)), f"T({pi.name})")

"""Poisson groupoids and Poisson double groupoids on registered coordinate models.

pi^# is tested as a morphism T*G => A*G to TG => TM. Its base map a_* is read
off as Tsrc o pi^# o unit, and its core map sends omega in T*M to the AG
component of pi^#(omega_bar) at the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..exactcalc import Mat, PolyMap, Sampler
from ..fingpd import ValidationReport
from ..coordmodels import (
    CoordDoubleGroupoid, CoordGroupoid, ModelError, check_groupoid_morphism, core_basis_of,
    cotangent_blocks, cotangent_groupoid, lie_algebroid, m4_double_groupoid, pair_groupoid,
    restrict_algebroid, tangent_groupoid, unit_splitting,
)
from ..coordmodels.groupoids import left_inv
from .bivectors import PoissonError, PolyBivector, cotangent_algebroid, require_poisson, standard_bivector


@dataclass(frozen=True, eq=False)
class PoissonCoordGroupoid:
    G: CoordGroupoid
    pi: PolyBivector

    def __post_init__(self):
        if self.pi.dim != self.G.arrow_dim:
            raise PoissonError("bivector lives on the wrong space")


@dataclass
class MultiplicativeReport:
    ok: bool
    a_star: Mat | None          # A*G -> TM, theta in the dual of the kernel basis
    core_map: Mat | None        # T*M -> AG
    core_is_minus_dual: bool
    report: ValidationReport

    def to_dict(self):
        return {"ok": self.ok, "a_*": self.a_star, "core map": self.core_map,
                "core map = -a_*^T": self.core_is_minus_dual, **self.report.to_dict()}


def core_cotangent_matrix(G: CoordGroupoid) -> Mat:
    """omega -> omega_bar: T*M -> covectors at the identity."""
    Kb, Binv = unit_splitting(G)
    rho = G.mats["T"] @ Kb
    return Binv.T @ Mat.vstack(Mat.identity(G.base_dim), rho.T)


def check_multiplicative(PG: PoissonCoordGroupoid, sampler: Sampler | None = None,
                         trials: int = 25) -> MultiplicativeReport:
    G, pi = PG.G, PG.pi
    try:
        G.require_registered()
    except ModelError:
        raise ModelError(f"{G.name}: multiplicativity is tested on registered families") from None
    s = sampler or Sampler(0)
    rep = ValidationReport()
    TsG, TG = cotangent_groupoid(G), tangent_groupoid(G)
    sharp = pi.sharp_map()
    base = TG.src @ sharp @ TsG.ident
    check_groupoid_morphism(rep, "pi#", sharp, TsG, TG, base, s, trials)
    n, k = G.base_dim, TsG.meta["fibre_dim"]
    a_star = core_map = None
    minus = False
    if pi.is_constant() and base.is_linear():
        B = base.matrix()
        rep.expect(B.rowslice(0, n) == Mat.hstack(Mat.identity(n), Mat.zeros(n, k)),
                   "a_* covers the identity", {"base map": B})
        a_star = B.rowslice(n, 2 * n).cols(n, n + k)
        Kb = core_basis_of(G)
        vel = pi.matrix().T @ core_cotangent_matrix(G)
        rep.expect((G.mats["S"] @ vel).is_zero(), "core goes to the core",
                   {"velocities": vel})
        core_map = left_inv(Kb) @ vel
        minus = core_map == -a_star.T
        rep.expect(minus, "core map = -a_*^T", {"core map": core_map, "a_*": a_star})
    return MultiplicativeReport(rep.ok, a_star, core_map, minus, rep)


def dual_algebroid(PG: PoissonCoordGroupoid, name=None):
    """A*G as the conormal of the identities inside the Koszul algebroid of pi."""
    G = PG.G
    Ts = cotangent_groupoid(G)
    unit_cov = cotangent_blocks(Ts)["unit"]
    try:
        return restrict_algebroid(cotangent_algebroid(PG.pi), G.mats["U"], unit_cov,
                                  name or f"A*{G.name}")
    except ModelError as e:
        raise PoissonError(f"{G.name}: identities are not coisotropic ({e})") from None


def base_sharp(a_star: Mat, G: CoordGroupoid) -> Mat:
    """pi_P^# = a_* o a^* with a the anchor of AG."""
    rho = lie_algebroid(G).anchor_matrix()
    return a_star @ rho.T


def sharp_to_bivector(S: Mat, name="pi") -> PolyBivector:
    return PolyBivector.from_matrix(S.T, name)


# ---------------------------------------------------------------------------
# examples


def symplectic_pair_groupoid(k: int = 1, base: PolyBivector | None = None) -> PoissonCoordGroupoid:
    """P x P-bar over P = R^{2k}: the target factor carries pi_P, the source factor -pi_P."""
    piP = base or standard_bivector(k)
    n = piP.dim
    G = pair_groupoid(n)
    return PoissonCoordGroupoid(G, piP.embed(2 * n, 0) - piP.embed(2 * n, n))


@dataclass(frozen=True, eq=False)
class PoissonCoordDouble:
    D: CoordDoubleGroupoid
    pi: PolyBivector
    meta: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.pi.dim != self.D.dim:
            raise PoissonError("bivector lives on the wrong space")

    @property
    def vertical(self) -> PoissonCoordGroupoid:
        return PoissonCoordGroupoid(self.D.SV, self.pi)

    @property
    def horizontal(self) -> PoissonCoordGroupoid:
        return PoissonCoordGroupoid(self.D.SH, self.pi)

    def multiplicative(self, which: str, sampler: Sampler | None = None) -> MultiplicativeReport:
        key = ("mult", which)
        if key not in self._cache:
            PG = self.vertical if which == "V" else self.horizontal
            self._cache[key] = check_multiplicative(PG, sampler)
        return self._cache[key]

    def is_poisson_double(self) -> bool:
        return (self.pi.is_poisson() and self.multiplicative("V").ok
                and self.multiplicative("H").ok)

    def is_symplectic(self) -> bool:
        return self.is_poisson_double() and self.pi.matrix().det() != 0


def symplectic_double_m4(k: int = 1) -> PoissonCoordDouble:
    """M^4 over M = R^{2k} with pi_S = pi_w - pi_x - pi_z + pi_y."""
    piM = standard_bivector(k)
    n = piM.dim
    D = m4_double_groupoid(n)
    N = 4 * n
    pi = piM.embed(N, 0) - piM.embed(N, n) - piM.embed(N, 2 * n) + piM.embed(N, 3 * n)
    return PoissonCoordDouble(D, PolyBivector(N, pi.pi, f"pi_S({k})"), {"base": piM})


def zero_double_m4(n: int = 2) -> PoissonCoordDouble:
    D = m4_double_groupoid(n)
    return PoissonCoordDouble(D, PolyBivector.zero(D.dim), {})

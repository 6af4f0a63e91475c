"""The cotangent groupoid T*G over A*G for a registered (linear) groupoid G.

Coordinates: (g, Phi) with Phi a covector at g, and (m, theta) on A*G with
theta read against the kernel basis Kb of AG. Writing a = T(tgt) on AG,
L_g, R_g for left and right translation:

    source(Phi)(X) = Phi(T L_g (X - T1(a X)))
    target(Phi)(Y) = Phi(T R_g Y)
    unit(theta)(T1 x + X) = theta(X)
    (Psi Phi)(Y o X) = Psi(Y) + Phi(X),  Y o X = T(comp)(Y, X)
    inverse(Phi) = -Phi o T(inv)
"""

from __future__ import annotations

from ..exactcalc import Mat, Sampler
from ..fingpd import GroupoidError, _right_inverse, pradines_dual
from .groupoids import CoordGroupoid, ModelError, _select, as_finvb, unit_splitting


def cotangent_groupoid(G: CoordGroupoid) -> CoordGroupoid:
    try:
        G.require_registered()
    except ModelError:
        raise ModelError(f"{G.name}: cotangent groupoid needs a registered family") from None
    M = G.mats
    N, n = G.arrow_dim, G.base_dim
    Kb, Binv = unit_splitting(G)
    k = Kb.ncols
    rho = M["T"] @ Kb
    src_cov = (G.C2 @ (Kb - M["U"] @ rho)).T
    tgt_cov = (G.C1 @ Kb).T
    unit_cov = (Mat.hstack(Mat.zeros(k, n), Mat.identity(k)) @ Binv).T
    inv_cov = -M["I"].T
    Cb = G.composable_basis()
    comp_cov = (Cb @ _right_inverse(M["C"] @ Cb)).T
    # (h, Psi, g, Phi) -> ((h, g), (Psi, Phi))
    shuffle = _select(4, N, [0, 2, 1, 3])
    C = Mat.block_diag(M["C"], comp_cov) @ shuffle
    T = CoordGroupoid.linear(
        Mat.block_diag(M["S"], src_cov), Mat.block_diag(M["T"], tgt_cov),
        Mat.block_diag(M["U"], unit_cov), Mat.block_diag(M["I"], inv_cov), C,
        name=f"T*{G.name}", family="cotangent",
        meta={"base": G, "kernel_basis": Kb, "anchor": rho, "fibre_dim": k})
    return T


def cotangent_blocks(TG: CoordGroupoid) -> dict:
    """The covector parts of the structure maps of T*G."""
    G = TG.meta["base"]
    N, n, k = G.arrow_dim, G.base_dim, TG.meta["fibre_dim"]
    M = TG.mats
    return {"src": M["S"].rowslice(n, n + k).cols(N, 2 * N),
            "tgt": M["T"].rowslice(n, n + k).cols(N, 2 * N),
            "unit": M["U"].rowslice(N, 2 * N).cols(n, n + k),
            "inv": M["I"].rowslice(N, 2 * N).cols(N, 2 * N)}


def unit_covector(TG: CoordGroupoid, theta) -> tuple:
    """The identity element of T*G over theta in A*G (covector part)."""
    return cotangent_blocks(TG)["unit"] @ theta


def core_covector(TG: CoordGroupoid, omega) -> tuple:
    """The core element over omega in T*M: omega_bar(T1 x + X) = omega(x + a X)."""
    G = TG.meta["base"]
    Kb, Binv = unit_splitting(G)
    rho = TG.meta["anchor"]
    vals = tuple(omega) + (rho.T @ omega)
    return Binv.T @ vals


def cotangent_core_report(TG: CoordGroupoid, s: Sampler, trials: int = 10) -> dict:
    """Check the identity and core formulas against computed elements."""
    G = TG.meta["base"]
    N, n, k = G.arrow_dim, G.base_dim, TG.meta["fibre_dim"]
    M = G.mats
    Kb = TG.meta["kernel_basis"]
    rho = TG.meta["anchor"]
    blocks = cotangent_blocks(TG)
    out = {"unit formula": True, "core in kernel of source": True, "core boundary": True,
           "core dimension": True}
    for _ in range(trials):
        m, theta, x, X = s.vector(n), s.vector(k), s.vector(n), s.vector(k)
        ident = TG.unit(m + theta)
        Phi = ident[N:]
        tangent = tuple(a + b for a, b in zip(M["U"] @ x, Kb @ X))
        lhs = sum(p * t for p, t in zip(Phi, tangent))
        if lhs != sum(a * b for a, b in zip(theta, X)):
            out["unit formula"] = False
        omega = s.vector(n)
        bar = core_covector(TG, omega)
        point = M["U"] @ m
        if TG.source(point + bar) != tuple(m) + (0,) * k:
            out["core in kernel of source"] = False
        if TG.target(point + bar)[n:] != rho.T @ omega:
            out["core boundary"] = False
        val = sum(p * t for p, t in zip(bar, tangent))
        if val != sum(a * b for a, b in zip(omega, tuple(u + v for u, v in zip(x, rho @ X)))):
            out["unit formula"] = False
    # the core is all of ker(src) over an identity: dimension n
    core_dim = blocks["src"].kernel().ncols
    out["core dimension"] = core_dim == n
    return out


def pradines_crosscheck(TG: CoordGroupoid) -> list:
    """Compare the covector blocks with the dual of TG taken fibrewise."""
    G = TG.meta["base"]
    D = pradines_dual(as_finvb(G), core_basis={0: TG.meta["kernel_basis"]})
    blocks = cotangent_blocks(TG)
    bad = []
    for key, dual in (("src", D.src_lin[0]), ("tgt", D.tgt_lin[0]), ("unit", D.id_lin[0]),
                      ("inv", D.inv_lin[0])):
        if blocks[key] != dual:
            bad.append(key)
    return bad


def decomposition_values(TG: CoordGroupoid, h, g, Psi, Phi, Z, count: int, s: Sampler) -> list:
    """Psi(Y) + Phi(X) over several composable (Y, X) with T(comp)(Y, X) = Z."""
    G = TG.meta["base"]
    Cb = G.composable_basis()
    Mc = G.mats["C"] @ Cb
    part = Mc.solve(Z)
    if part is None:
        raise GroupoidError("tangent vector is not a product")
    Nk = Mc.kernel()
    out = []
    N = G.arrow_dim
    for i in range(count):
        coeff = part if i == 0 or not Nk.ncols else \
            tuple(p + v for p, v in zip(part, Nk @ s.vector(Nk.ncols)))
        YX = Cb @ coeff
        out.append(sum(a * b for a, b in zip(Psi, YX[:N])) + sum(a * b for a, b in zip(Phi, YX[N:])))
    return out

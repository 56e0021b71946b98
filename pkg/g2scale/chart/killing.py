"""The normal conformal Killing field of a scale and the 2-forms I, J, K.

I, J and K are computed two ways: on the fiber, from the tractor lifts of
phi and sigma, and from their second-order expressions in phi and sigma.
The fiber route is the one used downstream; the other is a cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConstraintError, KillingError
from ..g2core import bracket
from . import jets
from .geometry import DIM5, PointGeometry, christoffel_of, covariant_derivative
from .jets import Jet, jeinsum
from .tractor import (
    L0_3form, L0_standard, hodge5, tractor_metric, tractor_three_form, volume_tensor,
)


@dataclass(frozen=True)
class KillingData:
    xi: object
    I: object
    J: object
    K: object
    lam: float
    eps: float

    def value(self) -> KillingData:
        v = lambda x: x.value if isinstance(x, Jet) else x  # noqa: E731
        return KillingData(v(self.xi), v(self.I), v(self.J), v(self.K), self.lam, self.eps)


def xi_iota7(p: PointGeometry, phi, sigma) -> Jet:
    """xi^a = -phi^{ab} sigma_{,b} + (1/4) phi^{ab}_{,b} sigma."""
    ph = p.evaluate(phi)
    s = p.evaluate(sigma)
    D = p.nabla(ph, "dd")
    div = jeinsum("ac,bd,cdb->a", p.g_inv, p.g_inv, D)
    return -jeinsum("ab,b->a", p.raise_form(ph), p.nabla(s)) + div * s * 0.25


def pi7(p: PointGeometry, phi, eta) -> Jet:
    """(1/6) phi^{ab} eta_{a,b} - (1/12) phi_{ab,}^b eta^a."""
    ph = p.evaluate(phi)
    e = p.evaluate(eta)
    de = p.nabla(p.lower(e), "d")
    v = jeinsum("bc,abc->a", p.g_inv, p.nabla(ph, "dd"))
    return (jeinsum("ab,ab->", p.raise_form(ph), de) * (1.0 / 6.0)
            - jeinsum("a,a->", v, e) * (1.0 / 12.0))


def conformal_killing_residual(p: PointGeometry, eta) -> float:
    """max |(eta_(a,b))_0|."""
    e = p.evaluate(eta)
    sym = jets.symmetrize(p.nabla(p.lower(e), "d"))
    trace = jeinsum("ab,ab->", p.g_inv, sym)
    return float(np.max(np.abs((sym - p.g * (trace * (1.0 / DIM5))).value)))


def divergence(p: PointGeometry, eta) -> Jet:
    return jeinsum("aa->", p.nabla(p.evaluate(eta), "u"))


# I, J, K


def _standard_vector(S) -> Jet:
    return jets.stack([S.rho] + [S.mu[i] for i in range(DIM5)] + [S.sigma])


def ijk_tractor(p: PointGeometry, phi, sigma) -> tuple:
    """(I, J, K, xi, H(S,S)) from the fiber forms Phi_I, Phi_J, Phi_K projected by X."""
    split = L0_3form(p, phi)
    Phi = tractor_three_form(split, p.space)
    S = _standard_vector(L0_standard(p, sigma))
    H = tractor_metric(p.g)
    H_inv = tractor_metric(p.g_inv)
    S_flat = jeinsum("ab,b->a", H, S)
    hss = jeinsum("a,a->", S, S_flat)
    SPhi = jeinsum("a,abc->bc", S, Phi)
    u = jeinsum("b,c->bc", S_flat[1:6], SPhi[0, 1:6])
    K = SPhi[1:6, 1:6] * S_flat[0] - u + u.T
    I = split.phi * hss - K
    n = jeinsum("kl,l->k", H_inv, SPhi[:, 0])
    J = -jeinsum("k,kbc->bc", n, Phi[:, 1:6, 1:6])
    xi = p.raise_(jeinsum("c,cb->b", S, Phi[0, :, 1:6]))
    return I, J, K, xi, hss


def ijk_displayed(p: PointGeometry, phi, sigma) -> tuple:
    """I, J, K from their second-order expressions in phi and sigma."""
    ph = p.evaluate(phi)
    s = p.evaluate(sigma)
    gi = p.g_inv
    ds = p.nabla(s)
    ds_up = p.raise_(ds)
    lap_s = jeinsum("ab,ab->", gi, p.nabla(ds, "d"))
    D = p.nabla(ph, "dd")  # D[a, b, c] = phi_ab,c
    D2 = p.nabla(D, "ddd")  # D2[a, b, c, d] = phi_ab,cd
    alt3 = jets.antisymmetrize(D)
    lap = jeinsum("abcd,cd->ab", D2, gi)
    X1 = jeinsum("cabd,cd->ab", D2, gi)
    X2 = jeinsum("cadb,cd->ab", D2, gi)
    Y = jeinsum("ca,bc->ab", p.schouten_mixed, ph)
    core = (lap * (1.0 / 3.0) + (X1 - X1.T) * (1.0 / 3.0)
            + (X2 - X2.T) * 0.25 + (Y - Y.T) * 2.0)
    v = jeinsum("cde,de->c", D, gi)  # phi_{cd,}^d
    Z = jeinsum("a,b->ab", ds, v)
    Z = (Z - Z.T) * 0.5
    chi_term = jeinsum("c,cab->ab", ds_up, alt3)
    W = jets.antisymmetrize(jeinsum("c,ab->cab", ds, ph))
    s2 = s * s
    I = (core * s2 * (1.0 / DIM5) - chi_term * s - Z * s * 0.5
         - ph * (s * lap_s) * (1.0 / DIM5) + jeinsum("c,cab->ab", ds_up, W) * 3.0)
    V = jeinsum("a,bc,c->ab", ds, ph, ds_up)
    K = (-(core + ph * p.J * 2.0) * s2 * (1.0 / DIM5) + chi_term * s + Z * s * 0.5
         - ph * (s * lap_s) * (1.0 / DIM5) - (V - V.T))
    div_up = jeinsum("ce,df,efd->c", gi, gi, D)
    U = jets.antisymmetrize(jeinsum("ab,c->abc", ph, v))
    J = (-jeinsum("c,abc->ab", div_up, alt3) * s * 0.25
         + jeinsum("c,abc->ab", ds_up, U) * 0.75)
    return I, J, K


def ijk_forms(p: PointGeometry, phi, sigma) -> tuple:
    I, J, K, _, _ = ijk_tractor(p, phi, sigma)
    return I, J, K


def ijk_agreement(p: PointGeometry, phi, sigma) -> float:
    """max difference between the fiber route and the displayed expressions."""
    a = ijk_tractor(p, phi, sigma)[:3]
    b = ijk_displayed(p, phi, sigma)
    return float(max(np.max(np.abs(x.value - y.value)) for x, y in zip(a, b)))


def killing_data(p: PointGeometry, phi, sigma) -> KillingData:
    I, J, K, xi, hss = ijk_tractor(p, phi, sigma)
    eps = -float(hss.value)
    return KillingData(xi, I, J, K, eps / 2.0, eps)


def family_2form(p: PointGeometry, phi, sigma, abar: float, b: float, tol: float = 1e-8) -> Jet:
    """phi' = phi + abar I + b J; requires -eps abar^2 + 2 abar + b^2 = 0."""
    I, J, _, _, hss = ijk_tractor(p, phi, sigma)
    eps = -float(hss.value)
    gap = -eps * abar * abar + 2.0 * abar + b * b
    if abs(gap) > tol * max(1.0, abar * abar + b * b):
        raise ConstraintError("family parameters ({}, {}) miss the constraint by {:.3e} (eps = {:.6g})".format(abar, b, gap, eps))
    return p.evaluate(phi) + I * abar + J * b


def family_parameters(eps: float, variant: str, value: float, branch: str = "-") -> tuple:
    """(abar, b) of the circle, hyperbolic and parabolic parameterizations."""
    if variant == "circle":
        return np.cos(value) - 1.0, np.sin(value)
    if variant == "hyperbolic":
        sign = -1.0 if branch == "-" else 1.0
        return 1.0 + sign * np.cosh(value), np.sinh(value)
    if variant == "parabolic":
        return -0.5 * value * value, value
    raise ConstraintError("unknown parameterization {!r}".format(variant))


# Lie derivatives


def lie_derivative(p: PointGeometry, xi, T, kinds: str) -> Jet:
    """Ordinary Lie derivative of a tensor jet with index kinds 'u'/'d'."""
    x = p.evaluate(xi)
    t = p.evaluate(T)
    if len(kinds) != t.ndim:
        raise KillingError("kinds {!r} do not match a rank {} tensor".format(kinds, t.ndim))
    dx = x.grad()  # dx[y, c] = d_c xi^y
    idx = "abdefgh"[:t.ndim]
    out = jeinsum("c,{0}c->{0}".format(idx), x, t.grad())
    for slot, kind in enumerate(kinds):
        moved = idx[:slot] + "y" + idx[slot + 1:]
        if kind == "d":
            out = out + jeinsum("{},y{}->{}".format(moved, idx[slot], idx), t, dx)
        else:
            out = out - jeinsum("{},{}y->{}".format(moved, idx[slot], idx), t, dx)
    return out


def lie_derivative_weighted(p: PointGeometry, xi, T, w: float, kinds: str = "", tol: float = 1e-6) -> Jet:
    """Lie derivative of a weight-``w`` object trivialized in the chart scale."""
    res = conformal_killing_residual(p, xi)
    if res > tol:
        raise KillingError("xi is not conformal Killing here (residual {:.3e})".format(res), res)
    t = p.evaluate(T)
    return lie_derivative(p, xi, t, kinds) - t * divergence(p, xi) * (w / DIM5)


def lie_relations(p: PointGeometry, phi, sigma, tol: float = 1e-6) -> dict:
    """Residuals of L_xi sigma = 0, L_xi phi = 3J, L_xi I = -3 eps J, L_xi J = 3I, L_xi K = 0."""
    I, J, K, xi, hss = ijk_tractor(p, phi, sigma)
    eps = -float(hss.value)
    s = p.evaluate(sigma)
    ph = p.evaluate(phi)
    L = lambda t, w, kinds: lie_derivative_weighted(p, xi, t, w, kinds, tol)  # noqa: E731
    out = {
        "sigma": L(s, 1, "").value,
        "phi": (L(ph, 3, "dd") - J * 3.0).value,
        "I": (L(I, 3, "dd") + J * (3.0 * eps)).value,
        "J": (L(J, 3, "dd") - I * 3.0).value,
        "K": L(K, 3, "dd").value,
    }
    return {k: float(np.max(np.abs(v))) for k, v in out.items()}


# open orbit and hypersurface formulas


def open_orbit_residuals(p: PointGeometry, phi) -> dict:
    """In a scale with sigma = 1: I = (-eps phi + phibar)/2, J = -theta^c chi_cab, K = (-eps phi - phibar)/2."""
    split = L0_3form(p, phi).value()
    I, J, K, xi, hss = ijk_tractor(p, phi, 1.0)
    eps = -float(hss.value)
    ph, chi, th, ps = (np.asarray(x) for x in (split.phi, split.chi, split.theta, split.psi))
    bar = -2.0 * ps
    th_up = np.linalg.solve(p.g.value, th)
    return {
        "I": float(np.max(np.abs(I.value - 0.5 * (-eps * ph + bar)))),
        "J": float(np.max(np.abs(J.value + np.einsum("c,cab->ab", th_up, chi)))),
        "K": float(np.max(np.abs(K.value - 0.5 * (-eps * ph - bar)))),
        "xi_theta": float(np.max(np.abs(xi.value - th_up))),
    }


def hypersurface_residuals(p: PointGeometry, phi, sigma) -> dict:
    """Where sigma = 0: xi = mu_b phi^{ba}, I = -eps phi - 2 mu_[a xi_b], J = +-mu^c (*phi)_cab, K = 2 mu_[a xi_b]."""
    I, J, K, xi, hss = ijk_tractor(p, phi, sigma)
    eps = -float(hss.value)
    g = p.g.value
    g_inv = np.linalg.inv(g)
    split = L0_3form(p, phi).value()
    ph, th, ps = (np.asarray(x) for x in (split.phi, split.theta, split.psi))
    mu_low = p.nabla(p.evaluate(sigma)).value
    mu_up = g_inv @ mu_low
    xi_v = xi.value
    xi_low = g @ xi_v
    vol = 15.0 * _alt(np.einsum("ab,c,de->abcde", ph, th, ps))
    eps_g = volume_tensor(g, 1.0 if vol[0, 1, 2, 3, 4] >= 0 else -1.0)
    star_phi = hodge5(g, eps_g, ph)
    wedge_mx = np.outer(mu_low, xi_low) - np.outer(xi_low, mu_low)
    mu_star = np.einsum("c,cab->ab", mu_up, star_phi)
    # J is fixed up to the orientation sign of the hodge star
    j_sign = 1.0 if np.max(np.abs(J.value - mu_star)) <= np.max(np.abs(J.value + mu_star)) else -1.0
    return {
        "xi": float(np.max(np.abs(xi_v - (g_inv @ ph.T @ mu_up)))),
        "I": float(np.max(np.abs(I.value - (-eps * ph - wedge_mx)))),
        "J": float(np.max(np.abs(J.value - j_sign * mu_star))),
        "K": float(np.max(np.abs(K.value - wedge_mx))),
        "j_sign": j_sign,
    }


def _alt(t):
    return bracket(t, list(range(t.ndim)))


def compositions(p: PointGeometry, phi, sigma) -> dict:
    """Products of I, J, K on C = xi^perp in the scale of sigma.

    The mixed products change sign with J; both signs are evaluated and the
    report carries the better one with ``j_sign``.
    """
    I, J, K, xi, hss = ijk_tractor(p, phi, sigma)
    eps = -float(hss.value)
    s = float(p.evaluate(sigma).value)
    g = p.g.value
    g_inv = np.linalg.inv(g)
    Ie, Je, Ke = ((g_inv @ x.value) / s for x in (I, J, K))
    xi_low = g @ xi.value
    _, _, vt = np.linalg.svd(xi_low.reshape(1, DIM5))
    C = vt[1:].T
    one = np.eye(DIM5)
    squares = {
        "II": (Ie @ Ie + eps * one) @ C,
        "JJ": (Je @ Je - one) @ C,
        "KK": (Ke @ Ke - eps * one) @ C,
    }
    out = {k: float(np.max(np.abs(v))) for k, v in squares.items()}
    best = None
    for sign in (1.0, -1.0):
        Js = sign * Je
        mixed = {
            "JK": max(np.max(np.abs((Js @ Ke - Ie) @ C)), np.max(np.abs((Ke @ Js + Ie) @ C))),
            "KI": max(np.max(np.abs((Ke @ Ie + eps * Js) @ C)), np.max(np.abs((Ie @ Ke - eps * Js) @ C))),
            "IJ": max(np.max(np.abs((Ie @ Js + Ke) @ C)), np.max(np.abs((Js @ Ie - Ke) @ C))),
        }
        worst = max(mixed.values())
        if best is None or worst < best[0]:
            best = (worst, sign, mixed)
    out.update({k: float(v) for k, v in best[2].items()})
    out["j_sign"] = best[1]
    return out


def contact_form_value(p: PointGeometry, xi) -> float:
    """(xi_flat ^ d xi_flat ^ d xi_flat)_{12345}; nonzero iff the hyperplane field xi^perp is contact."""
    x = p.lower(p.evaluate(xi))
    dx = x.grad().value  # dx[b, a] = d_a xi_b
    w = dx.T - dx  # w[a, b] = d_a xi_b - d_b xi_a
    x0 = x.value
    return float(30.0 * _alt(np.einsum("a,bc,de->abcde", x0, w, w))[0, 1, 2, 3, 4])


# Sasaki structures


def sasaki_residuals(p: PointGeometry, h, xi, eps: float) -> tuple:
    """(h(xi, xi) - 1, xi_(a;b), xi^a_;bc - eps (xi^a h_bc - delta^a_c xi_b)) for the metric field ``h``."""
    hj = jets.as_jet(p.space, h(p.u))
    hj = jets.Jet((hj.data + np.swapaxes(hj.data, 0, 1)) / 2.0, hj.order, hj.space)
    h_inv = jets.inverse(hj)
    G = christoffel_of(hj, h_inv)
    x = p.evaluate(xi)
    x_low = jeinsum("ab,b->a", hj, x)
    norm = jeinsum("a,a->", x, x_low).value - 1.0
    dlow = covariant_derivative(x_low, G, "d")
    killing = jets.symmetrize(dlow).value
    D1 = covariant_derivative(x, G, "u")
    D2 = covariant_derivative(D1, G, "ud")  # D2[a, b, c] = xi^a_;bc
    model = (np.einsum("a,bc->abc", x.value, hj.value)
             - np.einsum("ac,b->abc", np.eye(DIM5), x_low.value))
    third = D2.value - eps * model
    return abs(float(norm)), float(np.max(np.abs(killing))), float(np.max(np.abs(third)))

"""Standard tractors and tractor 3-forms in the chart scale.

Fiber ordering is (X, d_1 .. d_5, Y): index 0 carries rho for a standard
tractor and is the X-slot of a form, index 6 carries sigma and is the Y-slot.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConstraintError
from ..forms import KForm
from ..g2core import G2Structure, genericity_and_compatibility, bracket
from ..klog import klogger
from . import jets
from .geometry import DIM5, PointGeometry
from .jets import Jet, jeinsum

FIBER = 7


def _value(x):
    return x.value if isinstance(x, Jet) else x


@dataclass(frozen=True)
class TractorSplit:
    sigma: object
    mu: object
    rho: object

    def value(self) -> TractorSplit:
        return TractorSplit(_value(self.sigma), _value(self.mu), _value(self.rho))

    def fiber(self) -> np.ndarray:
        """The 7-vector (rho, mu^1..mu^5, sigma) at the point."""
        v = self.value()
        return np.concatenate([[v.rho], np.asarray(v.mu, dtype=float), [v.sigma]])

    def max_abs(self) -> float:
        v = self.value()
        return float(max(np.max(np.abs(np.asarray(x, dtype=float))) for x in (v.sigma, v.mu, v.rho)))

    def to_json(self):
        v = self.value()
        return {"sigma": np.asarray(v.sigma).tolist(), "mu": np.asarray(v.mu).tolist(), "rho": np.asarray(v.rho).tolist()}


@dataclass(frozen=True)
class ThreeFormSplit:
    phi: object
    chi: object
    theta: object
    psi: object

    def value(self) -> ThreeFormSplit:
        return ThreeFormSplit(*(_value(x) for x in (self.phi, self.chi, self.theta, self.psi)))

    def max_abs(self) -> float:
        v = self.value()
        return float(max(np.max(np.abs(np.asarray(x, dtype=float))) for x in (v.phi, v.chi, v.theta, v.psi)))

    def to_json(self):
        v = self.value()
        return {k: np.asarray(getattr(v, k)).tolist() for k in ("phi", "chi", "theta", "psi")}


# standard tractors


def L0_standard(p: PointGeometry, sigma) -> TractorSplit:
    """(sigma, sigma^{,a}, -(Delta sigma + J sigma) / 5)."""
    s = p.evaluate(sigma)
    mu = p.raise_(p.nabla(s))
    rho = (p.laplacian(s) + p.J * s) * (-1.0 / DIM5)
    return TractorSplit(s, mu, rho)


def tractor_connection(p: PointGeometry, s: TractorSplit) -> TractorSplit:
    """Normal tractor connection of a split section; derivative index last."""
    sigma, mu, rho = (p.evaluate(x) for x in (s.sigma, s.mu, s.rho))
    mu_low = p.lower(mu)
    d_sigma = p.nabla(sigma) - mu_low
    d_mu = (p.nabla(mu, "u") + p.schouten_mixed * sigma
            + jeinsum("ab,->ab", np.eye(DIM5), rho))
    d_rho = p.nabla(rho) - jeinsum("bc,c->b", p.schouten, mu)
    return TractorSplit(d_sigma, d_mu, d_rho)


def tractor_metric(g) -> np.ndarray | Jet:
    """H with 1 at (X, Y) and g in the tangent block."""
    if isinstance(g, Jet):
        data = np.zeros((FIBER, FIBER, g.space.size))
        data[1:6, 1:6] = g.data
        data[0, 6, 0] = data[6, 0, 0] = 1.0
        return Jet(data, g.order, g.space)
    H = np.zeros((FIBER, FIBER))
    H[1:6, 1:6] = g
    H[0, 6] = H[6, 0] = 1.0
    return H


def tractor_pairing(p: PointGeometry, a: TractorSplit, b: TractorSplit):
    """H(A, B) = sigma_a rho_b + rho_a sigma_b + g(mu_a, mu_b)."""
    return (a.sigma * b.rho + a.rho * b.sigma
            + jeinsum("a,ab,b->", a.mu, p.g, b.mu))


def connection_matrices(p: PointGeometry) -> Jet:
    """Omega[l, i, b] with (nabla_b V)^l = d_b V^l + Omega[l, i, b] V^i."""
    sp = p.space
    data = np.zeros((FIBER, FIBER, DIM5, sp.size))
    data[6, 1:6] = -p.g.data
    data[1:6, 1:6] = p.christoffel.data.transpose(0, 2, 1, 3)
    data[1:6, 6] = p.schouten_mixed.data
    data[1:6, 0, :, 0] = np.eye(DIM5)
    data[0, 1:6] = -p.schouten.data.transpose(1, 0, 2)
    return Jet(data, p.schouten.order, sp)


def einstein_constant(p: PointGeometry, sigma, tol: float = 1e-8) -> float:
    """lambda from the scale formula, checked against -H(L0 sigma, L0 sigma)/2."""
    s = p.evaluate(sigma)
    ds = p.nabla(s)
    lam = float((s * (p.laplacian(s) + p.J * s) * (1.0 / DIM5)
                 - jeinsum("a,ab,b->", ds, p.g_inv, ds) * 0.5).value)
    S = L0_standard(p, s)
    lam_tractor = -0.5 * float(tractor_pairing(p, S, S).value)
    if abs(lam - lam_tractor) > tol * max(1.0, abs(lam)):
        raise ConstraintError("Einstein constant routes disagree: {} vs {}".format(lam, lam_tractor))
    klogger.debug("einstein constant {} at {}".format(lam, list(p.x)))
    return lam


# tractor 3-forms


def L0_3form(p: PointGeometry, phi) -> ThreeFormSplit:
    """The splitting operator on weighted 2-forms, slots (phi, chi, theta, psi)."""
    ph = p.evaluate(phi)
    D = p.nabla(ph, "dd")  # D[c, d, b] = phi_cd,b
    T = D.transpose(2, 0, 1)  # T[b, c, d] = phi_cd,b
    chi = jets.antisymmetrize(T)
    theta = jeinsum("bc,bdc->d", p.g_inv, D) * (-0.25)
    D2 = p.nabla(D, "ddd")  # D2[c, d, b, a] = phi_cd,ba
    A1 = jeinsum("ab,bdca->cd", p.g_inv, D2)
    A2 = jeinsum("ab,bdac->cd", p.g_inv, D2)
    lap = jeinsum("ab,cdba->cd", p.g_inv, D2)
    Q = jeinsum("ec,ed->cd", p.schouten_mixed, ph)
    psi = (lap * (-1.0 / 3.0)
           + (A1 - A1.T) * (1.0 / 3.0)
           + (A2 - A2.T) * 0.25
           + (Q - Q.T) * 2.0
           - ph * p.J) * (1.0 / DIM5)
    return ThreeFormSplit(ph, chi, theta, psi)


def _assemble(split: ThreeFormSplit, space) -> Jet:
    parts = [jets.as_jet(space, x) for x in (split.phi, split.chi, split.theta, split.psi)]
    order = min(x.order for x in parts)
    phi, chi, theta, psi = parts
    E = np.zeros((FIBER, FIBER, FIBER, space.size))
    E[0, 1:6, 1:6] = phi.data / 2.0
    E[1:6, 1:6, 1:6] = chi.data / 6.0
    E[0, 6, 1:6] = theta.data
    E[6, 1:6, 1:6] = psi.data / 2.0
    out = np.zeros_like(E)
    for perm in itertools.permutations(range(3)):
        sign = jets._perm_sign(perm)
        out += sign * np.transpose(E, list(perm) + [3])
    return Jet(out, order, space)


def tractor_three_form(split: ThreeFormSplit, space=None):
    """Phi in the fiber ordering (X, d_1..d_5, Y); jets in, jet out."""
    if space is None:
        space = next((x.space for x in (split.phi, split.chi, split.theta, split.psi) if isinstance(x, Jet)), None)
    if space is None:
        v = split
        out = np.zeros((FIBER, FIBER, FIBER))
        E = np.zeros_like(out)
        E[0, 1:6, 1:6] = np.asarray(v.phi) / 2.0
        E[1:6, 1:6, 1:6] = np.asarray(v.chi) / 6.0
        E[0, 6, 1:6] = np.asarray(v.theta)
        E[6, 1:6, 1:6] = np.asarray(v.psi) / 2.0
        for perm in itertools.permutations(range(3)):
            out += jets._perm_sign(perm) * np.transpose(E, perm)
        return out
    return _assemble(split, space)


def tractor_derivative_3form(p: PointGeometry, Phi: Jet) -> Jet:
    """nabla_b Phi_ijk in the tractor connection, derivative index last."""
    Om = connection_matrices(p)
    return (Phi.grad()
            - jeinsum("lib,ljk->ijkb", Om, Phi)
            - jeinsum("ljb,ilk->ijkb", Om, Phi)
            - jeinsum("lkb,ijl->ijkb", Om, Phi))


def normality_residual(p: PointGeometry, phi) -> float:
    """max |nabla L0(phi)|; zero for a normal conformal Killing 2-form."""
    Phi = tractor_three_form(L0_3form(p, phi), p.space)
    res = float(np.max(np.abs(tractor_derivative_3form(p, Phi).value)))
    klogger.debug("normality residual {:.3e} at {}".format(res, list(p.x)))
    return res


def fiber_structure(p: PointGeometry, phi) -> tuple:
    """(G2Structure, compatibility report) of L0(phi) at the point."""
    Phi = tractor_three_form(L0_3form(p, phi), p.space).value
    H = tractor_metric(p.g.value)
    form = KForm.from_tensor(Phi, 3)
    G = G2Structure(form, h=H)
    return G, genericity_and_compatibility(form, H, G.vol, tol=1e-6)


# component identities of a parallel tractor 3-form


def volume_tensor(g: np.ndarray, orientation: float = 1.0) -> np.ndarray:
    eps = np.zeros((DIM5,) * DIM5)
    root = math.sqrt(abs(np.linalg.det(g)))
    for perm in itertools.permutations(range(DIM5)):
        eps[perm] = jets._perm_sign(perm) * root * orientation
    return eps


def hodge5(g: np.ndarray, eps: np.ndarray, form: np.ndarray) -> np.ndarray:
    """(*w)_{c..} = w^{a..} eps_{a..c..} / k!."""
    k = form.ndim
    g_inv = np.linalg.inv(g)
    up = form
    for axis in range(k):
        up = np.moveaxis(np.tensordot(g_inv, up, axes=([1], [axis])), 0, axis)
    return np.tensordot(up, eps, axes=(list(range(k)), list(range(k)))) / math.factorial(k)


def _alt(t: np.ndarray) -> np.ndarray:
    return bracket(t, list(range(t.ndim)))


def component_identities(p: PointGeometry, phi) -> dict:
    """Residuals of the algebraic identities satisfied by a normal (phi, chi, theta, psi)."""
    v = L0_3form(p, phi).value()
    g = p.g.value
    g_inv = np.linalg.inv(g)
    ph, chi, th, ps = (np.asarray(x, dtype=float) for x in (v.phi, v.chi, v.theta, v.psi))
    ph_up = g_inv @ ph @ g_inv.T
    th_up = g_inv @ th
    vol = 15.0 * _alt(np.einsum("ab,c,de->abcde", ph, th, ps))
    orientation = 1.0 if vol[0, 1, 2, 3, 4] >= 0 else -1.0
    eps = volume_tensor(g, orientation)
    out = {
        "phi_phi": g_inv @ ph @ g_inv @ ph,
        "phi_chi": np.einsum("bc,bca->a", ph_up, chi),
        "theta_phi": th_up @ ph,
        "theta_theta": np.array([th_up @ th + 1.0]),
        "psi_wedge_psi": 6.0 * _alt(np.einsum("ab,cd->abcd", ps, ps)),
        "psi_psi": g_inv @ ps @ g_inv @ ps,
        "theta_psi": th_up @ ps,
        "volume": vol - eps,
        "hodge_phi": hodge5(g, eps, ph) - 3.0 * _alt(np.einsum("ab,c->abc", ph, th)),
        "hodge_chi": hodge5(g, eps, chi) - np.einsum("i,igh->gh", th_up, chi),
        "hodge_theta": hodge5(g, eps, th) + 3.0 * _alt(np.einsum("ab,cd->abcd", ph, ps)),
        "hodge_psi": hodge5(g, eps, ps) - 3.0 * _alt(np.einsum("ab,c->abc", ps, th)),
    }
    return {k: float(np.max(np.abs(r))) for k, r in out.items()}

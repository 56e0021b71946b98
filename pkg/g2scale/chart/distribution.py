"""2-plane distributions on a chart: spans, growth vectors, orbit labels."""
from __future__ import annotations

import numpy as np

from ..errors import ClassificationError, DegenerateFormError, NormalizationError
from ..forms import KForm
from ..g2core import G2Structure, bracket
from ..klog import klogger
from ..stabilizer import classify_ray
from . import jets
from .geometry import PointGeometry
from .jets import Jet, jeinsum
from .killing import xi_iota7
from .tractor import L0_3form, L0_standard, tractor_metric, tractor_three_form


def lie_bracket(p: PointGeometry, X, Y) -> Jet:
    """[X, Y]^a = X^b d_b Y^a - Y^b d_b X^a."""
    x = p.evaluate(X)
    y = p.evaluate(Y)
    return jeinsum("b,ab->a", x, y.grad()) - jeinsum("b,ab->a", y, x.grad())


def relative_rank(vectors, tol: float = 1e-8) -> int:
    """Rank of a list of vectors after scaling each to unit length."""
    rows = []
    for v in vectors:
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if n > tol:
            rows.append(v / n)
    if not rows:
        return 0
    sv = np.linalg.svd(np.array(rows), compute_uv=False)
    return int(np.sum(sv > tol))


def growth_vector(p: PointGeometry, U, V, tol: float = 1e-8) -> tuple:
    """(rank D, rank [D, D], rank [D, [D, D]]) at the point."""
    u = p.evaluate(U)
    v = p.evaluate(V)
    w = lie_bracket(p, u, v)
    first = [u.value, v.value]
    second = first + [w.value]
    third = second + [lie_bracket(p, u, w).value, lie_bracket(p, v, w).value]
    return relative_rank(first, tol), relative_rank(second, tol), relative_rank(third, tol)


def span_isotropy(p: PointGeometry, U, V) -> float:
    """max |g(X, Y)| over the unit-normalized pair, zero for a totally isotropic plane."""
    g = p.g.value
    u = np.asarray(p.evaluate(U).value, dtype=float)
    v = np.asarray(p.evaluate(V).value, dtype=float)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    return float(max(abs(u @ g @ u), abs(u @ g @ v), abs(v @ g @ v)))


def normal_killing_form_from_span(p: PointGeometry, U, V, orientation: int = 1) -> Jet:
    """The conformal Killing 2-form of span(U, V), scaled so that theta_b theta^b = -1.

    With omega = (U ^ V) lowered and t_d = omega_bd,^b the scale factor is
    f = 4 / sqrt(-t_d t^d); ``orientation`` fixes the sign of f.
    """
    u = p.evaluate(U)
    v = p.evaluate(V)
    biv = jeinsum("a,b->ab", u, v)
    biv = biv - biv.T
    omega = jeinsum("ac,bd,cd->ab", p.g, p.g, biv)
    D = p.nabla(omega, "dd")
    t = jeinsum("bc,bdc->d", p.g_inv, D)
    q = jeinsum("a,ab,b->", t, p.g_inv, t)
    if -q.value <= 0:
        raise NormalizationError("span is not normalizable at {} (t.t = {:.3e})".format(list(p.x), q.value))
    f = jets.power(-q, -0.5) * (4.0 * orientation)
    return omega * f


def _bivector_plane(phi_up: np.ndarray) -> np.ndarray:
    u, _, _ = np.linalg.svd(phi_up)
    return u[:, :2]


def distribution_checks(p: PointGeometry, phi_prime, span=None, tol: float = 1e-6) -> dict:
    """Decomposability, span and growth data of the 2-form ``phi_prime`` at the point."""
    ph = np.asarray(p.evaluate(phi_prime).value, dtype=float)
    norm = float(np.max(np.abs(ph)))
    if norm <= tol:
        raise DegenerateFormError("2-form vanishes at {}".format(list(p.x)))
    wedge = 6.0 * bracket(np.einsum("ab,cd->abcd", ph, ph), range(4))
    dec = float(np.max(np.abs(wedge))) / (norm * norm)
    g_inv = np.linalg.inv(p.g.value)
    plane = _bivector_plane(g_inv @ ph @ g_inv)
    report = {
        "decomposable": dec <= tol,
        "decomposability_residual": dec,
        "nonvanishing": True,
        "norm": norm,
        "span": plane.T.tolist(),
        "span_match": None,
        "span_residual": None,
        "growth_vector": None,
    }
    if span is not None:
        U, V = span
        vecs = [np.asarray(p.evaluate(X).value, dtype=float) for X in (U, V)]
        res = max(float(np.linalg.norm(v - plane @ (plane.T @ v)) / np.linalg.norm(v)) for v in vecs)
        report["span_residual"] = res
        report["span_match"] = res <= tol
        if p.space.order >= 2:
            report["growth_vector"] = growth_vector(p, U, V)
    return report


def canonical_splitting(p: PointGeometry, phi, span=None) -> dict:
    """The splitting D + L + E of the tangent space fixed by the chart scale.

    D is the plane of phi^{ab}, L the line of theta^a and E the plane of
    psi^{ab}, with (phi, theta, psi) the components of the normal tractor
    3-form. E and D are totally isotropic and L is orthogonal to both; with a
    spanning pair of D the bracket [U, V] must lie in D + L.
    """
    v = L0_3form(p, phi).value()
    g = p.g.value
    g_inv = np.linalg.inv(g)
    D = _bivector_plane(g_inv @ np.asarray(v.phi, dtype=float) @ g_inv)
    E = _bivector_plane(g_inv @ np.asarray(v.psi, dtype=float) @ g_inv)
    L = g_inv @ np.asarray(v.theta, dtype=float)
    if np.linalg.norm(L) == 0.0:
        raise DegenerateFormError("theta vanishes at {}".format(list(p.x)))
    L = L / np.linalg.norm(L)
    scale = max(1.0, float(np.max(np.abs(g))))
    report = {
        "transverse_margin": float(abs(np.linalg.det(np.column_stack([D, L, E])))),
        "D_isotropy": float(np.max(np.abs(D.T @ g @ D))) / scale,
        "E_isotropy": float(np.max(np.abs(E.T @ g @ E))) / scale,
        "L_perp_D": float(np.max(np.abs(L @ g @ D))) / scale,
        "L_perp_E": float(np.max(np.abs(L @ g @ E))) / scale,
        "bracket_residual": None,
    }
    if span is not None:
        w = np.asarray(lie_bracket(p, *span).value, dtype=float)
        B = np.column_stack([D, L])
        coeffs, *_ = np.linalg.lstsq(B, w, rcond=None)
        report["bracket_residual"] = float(np.linalg.norm(w - B @ coeffs) / np.linalg.norm(w))
    return report


def classify_point(p: PointGeometry, sigma, phi, tol: float = 1e-8) -> str:
    """Curved-orbit label of the point, or "ambiguous" inside the dead band."""
    s = float(p.evaluate(sigma).value)
    xi = np.asarray(xi_iota7(p, phi, sigma).value, dtype=float)
    if abs(s) > tol:
        return "M5+" if s > 0 else "M5-"
    if np.linalg.norm(xi) > tol:
        return "M4"
    # sigma and xi both vanish: read the label off the fiber and check the tangent side
    S = L0_standard(p, sigma)
    mu = np.asarray(S.mu.value, dtype=float)
    lap = float(p.laplacian(sigma).value)
    G, S_fib = _fiber(p, phi, S)
    X = np.zeros(7)
    X[0] = 1.0
    extra = {"sigma_sign": 0, "nabla_sigma_zero": bool(np.linalg.norm(mu) <= tol)}
    if extra["nabla_sigma_zero"]:
        extra["laplacian_sign"] = 0 if abs(lap) <= tol else int(np.sign(lap))
    try:
        label = classify_ray(G, S_fib, X, extra, tol=max(tol, 1e-9))
    except ClassificationError as error:
        klogger.debug("ambiguous point {}: {}".format(list(p.x), error))
        return "ambiguous"
    if label.startswith("M2") and not _in_plane(p, phi, mu, tol):
        return "ambiguous"
    return label


def _fiber(p: PointGeometry, phi, S):
    Phi = tractor_three_form(L0_3form(p, phi), p.space).value
    H = tractor_metric(p.g.value)
    G = G2Structure(KForm.from_tensor(Phi, 3), h=H)
    S_fib = S.fiber()
    hss = float(S_fib @ H @ S_fib)
    if abs(hss) > 1e-12:
        S_fib = S_fib / np.sqrt(abs(hss))
    return G, S_fib


def _in_plane(p: PointGeometry, phi, mu, tol: float) -> bool:
    """mu lies in the plane of the bivector phi^{ab}."""
    ph = np.asarray(p.evaluate(phi).value, dtype=float)
    g_inv = np.linalg.inv(p.g.value)
    up = g_inv @ ph @ g_inv
    trivector = bracket(np.einsum("ab,c->abc", up, mu), range(3))
    return float(np.max(np.abs(trivector))) <= tol * max(1.0, np.max(np.abs(up)) * np.linalg.norm(mu))


def wedge_margin(vectors) -> float:
    """|det| of five vector values, the margin of a nonvanishing 5-fold wedge."""
    return float(abs(np.linalg.det(np.array([np.asarray(v, dtype=float) for v in vectors]))))

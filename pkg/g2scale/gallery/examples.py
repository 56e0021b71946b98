"""The gallery charts: their metrics, scales, distributions and symmetry fields.

Every field takes a :class:`~g2scale.chart.PointGeometry`; metrics take the
list of coordinate jets. Charts are built at jet order ``conf.jet_order + 1``
because a 2-form obtained from a spanning pair loses one order.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from ..chart import jets
from ..chart.distribution import normal_killing_form_from_span
from ..chart.geometry import DIM5, Chart
from ..chart.jets import jeinsum
from ..config import conf
from ..errors import InputError
from ..klog import klogger


@dataclass
class GalleryExample:
    """A chart with its named fields, expected checks and sampling defaults."""

    name: str
    chart: Chart
    fields: dict
    expectations: list
    points: int
    seed: int
    params: dict = field(default_factory=dict)
    unverified: list = field(default_factory=list)

    def sample(self, count: int | None = None, seed: int | None = None) -> list:
        return self.chart.sample(self.points if count is None else count, self.seed if seed is None else seed)


def _order() -> int:
    return conf.jet_order + 1


def _matrix(entries: dict, space) -> jets.Jet:
    """A symmetric 5x5 jet from its upper-triangle ``entries``."""
    rows = [[0.0] * DIM5 for _ in range(DIM5)]
    for (i, j), v in entries.items():
        rows[i][j] = v
        rows[j][i] = v
    return jets.stack(rows, space)


def _vector(p, comps) -> jets.Jet:
    return jets.stack(list(comps), p.space)


def _combo(p, *terms) -> jets.Jet:
    """sum of coefficient * vector, vectors given as 5-lists."""
    total = None
    for coeff, vec in terms:
        t = _vector(p, vec) * coeff
        total = t if total is None else total + t
    return total


# rolling sphere on hyperbolic plane


def rolling_sasaki_metric(u) -> jets.Jet:
    """g = h_+ (+) -h_- + beta^2 in (r, phi, s, psi, lambda)."""
    r, ph, s, ps, _ = u
    c = 2.0 / 3.0
    hp = jets.power(r * r + 1.0, -2) * c
    hm = jets.power(s * s - 1.0, -2) * c
    a_r = -(ph * r * hp)
    a_s = ps * s * hm
    beta = [a_r * -2.0, 0.0, a_s * -2.0, 0.0, 1.0]
    entries = {(0, 0): hp, (1, 1): hp * r * r, (2, 2): -hm, (3, 3): -(hm * s * s)}
    g = _matrix(entries, r.space)
    b = jets.stack(beta, r.space)
    return g + jeinsum("a,b->ab", b, b)


def _rolling_chart_metric(u) -> jets.Jet:
    return -rolling_sasaki_metric(u)


@functools.lru_cache(maxsize=None)
def rolling_span(upsilon: float):
    """The generators of D_upsilon as a pair of vector fields."""

    def gamma(p):
        r, ph, s, ps, lam = p.u
        return ((r * r - 1.0) / (r * r + 1.0)) * ph + ((s * s + 1.0) / (s * s - 1.0)) * ps - lam * 3.0 + upsilon

    def U(p):
        r, ph, s, ps, _ = p.u
        g = gamma(p)
        cg, sg = jets.cos(g), jets.sin(g)
        s1 = s * s - 1.0
        lam = s * 4.0 * (s * ps * cg / s1 - r * ph / (r * r + 1.0))
        return _vector(p, [(r * r + 1.0) * s * 3.0, 0.0, s1 * s * cg * 3.0, s1 * sg * 3.0, lam])

    def V(p):
        r, ph, s, ps, _ = p.u
        g = gamma(p)
        cg, sg = jets.cos(g), jets.sin(g)
        s1 = s * s - 1.0
        # beta(V) = 0 fixes the d_lambda slot
        return _vector(p, [0.0, (r * r + 1.0) * s * 3.0, r * s1 * s * sg * 3.0, -(r * s1 * cg * 3.0),
                           s * s * 4.0 / s1 * r * ps * sg])

    return U, V


def _rolling(params: dict) -> GalleryExample:
    upsilon = float(params.get("upsilon", conf.upsilon))
    box = ((0.1, 3.0), (-math.pi, math.pi), (1.1, 3.0), (-math.pi, math.pi), (-1.0, 1.0))
    chart = Chart("rolling", ("r", "phi", "s", "psi", "lambda"), _rolling_chart_metric, box, None, _order())
    U, V = rolling_span(upsilon)
    fields = {
        "sasaki_metric": rolling_sasaki_metric,
        "sigma": 1.0,
        "reeb": lambda p: _vector(p, [0.0, 0.0, 0.0, 0.0, 1.0]),
        "span": (U, V),
        "span_factory": rolling_span,
        "phi": lambda p: normal_killing_form_from_span(p, U, V),
    }
    expectations = [("einstein", conf.tol_order2), ("sasaki", conf.tol_order3), ("isotropy", conf.tol_order2),
                    ("growth", 0.0), ("normality", conf.tol_order3), ("component_identities", conf.tol_order3),
                    ("lie_relations", conf.tol_order3)]
    unverified = ["Hol([-g]) is the full group SU(1,2)",
                  "aut(D_upsilon) = so(3) + sl(2, R)"]
    return GalleryExample("rolling", chart, fields, expectations, conf.points, conf.seed,
                          {"upsilon": upsilon, "constant": -4.0, "eps": -1}, unverified)


# para-Kaehler variant on L^2 x L^2


def rolling_para_metric(u) -> jets.Jet:
    """h (+) h + beta^2 with h = 2 (-dr^2 + r^2 dphi^2) / 3 (r^2 + 1)^2 on each factor."""
    r, ph, s, ps, _ = u
    c = 2.0 / 3.0
    hr = jets.power(r * r + 1.0, -2) * c
    hs = jets.power(s * s + 1.0, -2) * c
    beta = [ph * r * hr * -2.0, 0.0, ps * s * hs * -2.0, 0.0, 1.0]
    entries = {(0, 0): -hr, (1, 1): hr * r * r, (2, 2): -hs, (3, 3): hs * s * s}
    g = _matrix(entries, r.space)
    b = jets.stack(beta, r.space)
    return g + jeinsum("a,b->ab", b, b)


def _rolling_para(params: dict) -> GalleryExample:
    box = ((0.3, 1.5), (-1.0, 1.0), (0.3, 1.5), (-1.0, 1.0), (-1.0, 1.0))
    chart = Chart("rolling-para", ("r", "phi", "s", "psi", "lambda"), rolling_para_metric, box, None, _order())
    fields = {
        "sasaki_metric": rolling_para_metric,
        "reeb": lambda p: _vector(p, [0.0, 0.0, 0.0, 0.0, 1.0]),
    }
    return GalleryExample("rolling-para", chart, fields, [("einstein_tracefree", conf.tol_order2)],
                          conf.points, conf.seed, {}, ["Hol is the full group SL(3, R)"])


# Dirichlet problem over a homogeneous projective surface

_Q_N = np.array([
    [0.0, 0.0, -0.5, 0.0],
    [0.0, -1.0, 0.0, 0.5],
    [-0.5, 0.0, -1.0, 0.0],
    [0.0, 0.5, 0.0, 0.0],
])


def dirichlet_frame(u) -> jets.Jet:
    """Rows E_X, E_H, E_Y, d_a of the left-invariant frame on N in (x, y, p, a)."""
    x, y, p, a, _ = u
    w = x * p - y
    rows = [[0.0, 0.0, -(w * w), x * w], [x, y, 0.0, -1.0], [1.0 / w, p / w, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
    return jets.stack(rows, x.space)


def dirichlet_gN(u) -> jets.Jet:
    """g_N = -chi upsilon - eta^2 + eta alpha - upsilon^2 in coordinates (x, y, p, a)."""
    theta = jets.inverse(dirichlet_frame(u).T)
    return jeinsum("ia,ij,jb->ab", theta, _Q_N, theta)


def dirichlet_sigma_N(u) -> jets.Jet:
    x, y, p, a, _ = u
    return jets.exp(a * 0.5) * jets.sqrt(x * p - y)


def dirichlet_metric(u) -> jets.Jet:
    """g' = sigma_N^-2 g_N - dr^2."""
    x, y, p, a, _ = u
    gE = dirichlet_gN(u) * (jets.exp(-a) * jets.power(x * p - y, -1))
    rows = [[gE[i, j] for j in range(4)] + [0.0] for i in range(4)] + [[0.0, 0.0, 0.0, 0.0, -1.0]]
    return jets.stack(rows, x.space)


def _frame5(p):
    x, y, pp, a, r = p.u
    w = x * pp - y
    EX = [0.0, 0.0, -(w * w), x * w, 0.0]
    EH = [x, y, 0.0, -1.0, 0.0]
    EY = [1.0 / w, pp / w, 0.0, 0.0, 0.0]
    return EX, EH, EY, w


@functools.lru_cache(maxsize=None)
def dirichlet_span(t: float, branch: str = "-"):
    """The smooth pair (W, rV) spanning D_t on all of M, W = (U - 2 rV) / r."""
    if branch not in ("-", "+"):
        raise InputError("branch must be '-' or '+'", "branch")
    sg = 1.0 if branch == "-" else -1.0

    def W(p):
        x, y, pp, a, r = p.u
        EX, EH, EY, w = _frame5(p)
        bracket = jets.exp(a * 2.0 + sg * t) * w * w * 2.0 + r * r * (0.5 * math.exp(-sg * t))
        return _combo(p, (jets.exp(-a - sg * t) / w * -sg + bracket * (-2.0 * sg), EX),
                      (jets.exp(a) * r * w * -2.0, EH),
                      (w * w * jets.exp(a * 2.0 + sg * t) * (4.0 * sg), EY),
                      (2.0, [0.0, 0.0, 0.0, 0.0, 1.0]))

    def rV(p):
        x, y, pp, a, r = p.u
        EX, EH, EY, w = _frame5(p)
        bracket = jets.exp(a * 2.0 + sg * t) * w * w * 2.0 + r * r * (0.5 * math.exp(-sg * t))
        return _combo(p, (bracket * r * sg, EX),
                      (jets.exp(a) * r * r * w, EH),
                      (w * w * jets.exp(a * 2.0 + sg * t) * r * (-2.0 * sg), EY),
                      (1.0, [0.0, 0.0, 0.0, 1.0, 0.0]),
                      (-r, [0.0, 0.0, 0.0, 0.0, 1.0]))

    return W, rV


def dirichlet_symmetries() -> dict:
    """The six conformal Killing fields of the Dirichlet chart."""

    def X(p):
        x, y, pp, a, r = p.u
        return _vector(p, [y, 0.0, -(pp * pp), pp, 0.0])

    def H(p):
        x, y, pp, a, r = p.u
        return _vector(p, [-x, y, pp * 2.0, -1.0, 0.0])

    def Y(p):
        x, y, pp, a, r = p.u
        return _vector(p, [0.0, x, 1.0, 0.0, 0.0])

    def Z(p):
        x, y, pp, a, r = p.u
        e = jets.exp(-a)
        return _vector(p, [0.0, 0.0, e * (x * pp - y), -(e * x), 0.0])

    def A(p):
        r = p.u[4]
        return _vector(p, [0.0, 0.0, 0.0, -2.0, r])

    def R(p):
        return _vector(p, [0.0, 0.0, 0.0, 0.0, 1.0])

    return {"X": X, "H": H, "Y": Y, "Z": Z, "A": A, "d_r": R}


def _dirichlet(params: dict) -> GalleryExample:
    t = float(params.get("t", conf.t))
    branch = params.get("branch", "-")
    box = ((0.5, 1.5), (-1.0, 0.0), (0.5, 1.5), (-0.5, 0.5), (-1.0, 1.0))
    chart = Chart("dirichlet", ("x", "y", "p", "a", "r"), dirichlet_metric, box,
                  lambda x: x[0] * x[2] - x[1] > 0.1, _order())
    base = dirichlet_span(0.0, "-")
    fields = {
        "scales": {"one": 1.0, "r": lambda p: p.u[4]},
        "sigma_N": lambda p: dirichlet_sigma_N(p.u),
        "symmetries": dirichlet_symmetries(),
        "span": dirichlet_span(t, branch),
        "base_span": base,
        "phi": lambda p: normal_killing_form_from_span(p, *base),
    }
    expectations = [("ricci_flat", conf.tol_order2), ("theta0", conf.tol_scale), ("killing_fields", conf.tol_killing),
                    ("iota7", conf.tol_scale), ("pi7", conf.tol_scale), ("aut_wedge", conf.tol_order2),
                    ("hypersurface", conf.tol_order3), ("classify", 0.0), ("smooth_span", 0.0)]
    unverified = ["Hol(c) = SL(2, R) x| R^2", "aut(D_t) = gl(2, R)"]
    return GalleryExample("dirichlet", chart, fields, expectations, conf.points, conf.seed,
                          {"t": t, "branch": branch, "eps": 1}, unverified)


# submaximally symmetric distributions


def submaximal_metric(I: float):
    def metric(u):
        x, y, p, q, z = u
        entries = {
            (0, 0): y * y * (-1.5 * (I * I + 1.0)) + p * p * (2.0 * I) - q * q * 0.5,
            (0, 1): p * (-2.0 * I),
            (0, 2): q * 0.5,
            (0, 3): p * -1.5,
            (0, 4): -1.5,
            (1, 1): -3.0 * I,
            (1, 3): 1.5,
            (2, 2): -2.0,
        }
        return _matrix(entries, x.space)
    return metric


@functools.lru_cache(maxsize=None)
def submaximal_span(I: float):
    def dq(p):
        return _vector(p, [0.0, 0.0, 0.0, 1.0, 0.0])

    def total(p):
        x, y, pp, q, z = p.u
        dz = (q * q + pp * pp * (10.0 * I / 3.0) + y * y * (1.0 + I * I)) * -0.5
        return _vector(p, [1.0, pp, q, 0.0, dz])

    return dq, total


def submaximal_scales(I: float) -> dict:
    """A basis of solutions of sigma'' - I sigma / 3 = 0 in x."""
    if I > 0:
        k = math.sqrt(I / 3.0)
        return {"cosh": lambda p: jets.cosh(p.u[0] * k), "sinh": lambda p: jets.sinh(p.u[0] * k)}
    if I < 0:
        k = math.sqrt(-I / 3.0)
        return {"cos": lambda p: jets.cos(p.u[0] * k), "sin": lambda p: jets.sin(p.u[0] * k)}
    return {"one": 1.0, "x": lambda p: p.u[0]}


def _submaximal(params: dict) -> GalleryExample:
    I = float(params.get("I", conf.I))
    box = ((-1.0, 1.0),) * DIM5
    chart = Chart("submaximal", ("x", "y", "p", "q", "z"), submaximal_metric(I), box, None, _order())
    scales = params.get("scales") or submaximal_scales(I)
    span = submaximal_span(I)
    fields = {"scales": scales, "span": span, "phi": lambda p: normal_killing_form_from_span(p, *span)}
    expectations = [("theta0", conf.tol_scale), ("lambda_zero", conf.tol_order2), ("growth", 0.0),
                    ("isotropy", conf.tol_order2), ("conformal_invariance", conf.tol_scale),
                    ("normality", conf.tol_order3), ("pi7", conf.tol_scale)]
    return GalleryExample("submaximal", chart, fields, expectations, conf.points, conf.seed, {"I": I},
                          ["Hol(c_I) is the 5-dimensional Heisenberg group"])


_BUILDERS = {
    "rolling": _rolling,
    "rolling-para": _rolling_para,
    "dirichlet": _dirichlet,
    "submaximal": _submaximal,
}


def available_examples() -> list:
    return sorted(_BUILDERS)


def load_example(name: str, params: dict | None = None) -> GalleryExample:
    """Build the named gallery example; ``params`` may set upsilon, t, branch, I or scales."""
    if name not in _BUILDERS:
        raise InputError("unknown example {!r}; choose from {}".format(name, ", ".join(available_examples())), "name")
    example = _BUILDERS[name](dict(params or {}))
    klogger.debug("loaded example {} with {}".format(name, example.params))
    return example

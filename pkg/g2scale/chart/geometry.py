"""Coordinate charts, Levi-Civita curvature and the scale operators on them.

A field is any callable taking a :class:`PointGeometry` and returning a jet
(or a plain number for constants). The metric itself is a callable taking the
list of coordinate jets. All weighted quantities are trivialized in the scale
of the chart metric.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import JetOrderError, SingularMetricError
from ..forms import signature
from ..klog import klogger
from . import jets
from .jets import Jet, jeinsum

DIM5 = 5


@dataclass(frozen=True)
class Chart:
    """A 5-dimensional coordinate patch with a jet-evaluable metric."""

    name: str
    coordinates: tuple
    metric: Callable
    box: tuple
    predicate: Callable | None = None
    order: int = 3

    def __post_init__(self):
        if len(self.coordinates) != DIM5 or len(self.box) != DIM5:
            raise SingularMetricError("a chart needs five coordinates and five box intervals")

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        inside = all(lo <= v <= hi for v, (lo, hi) in zip(x, self.box))
        return inside and (self.predicate is None or bool(self.predicate(x)))

    def sample(self, count: int, seed: int, tries: int = 10000) -> list:
        """``count`` reproducible points of the sampling domain."""
        rng = np.random.default_rng(seed)
        lo = np.array([b[0] for b in self.box], dtype=float)
        hi = np.array([b[1] for b in self.box], dtype=float)
        points = []
        for _ in range(tries):
            if len(points) == count:
                break
            x = lo + (hi - lo) * rng.random(DIM5)
            if self.predicate is None or self.predicate(x):
                points.append(x)
        if len(points) < count:
            raise SingularMetricError("could not sample {} points of chart {}".format(count, self.name))
        klogger.debug("sampled {} points of {} (seed {})".format(count, self.name, seed))
        return points

    def at(self, x, order: int | None = None) -> PointGeometry:
        return _geometry(self, tuple(float(v) for v in x), self.order if order is None else order)

    def rescaled(self, omega: Callable, name: str | None = None) -> Chart:
        """The chart with metric omega^2 g; ``omega`` takes coordinate jets."""
        base = self.metric

        def metric(u):
            w = jets.as_jet(u[0].space, omega(u))
            return base(u) * (w * w)

        return Chart(name or self.name + "-rescaled", self.coordinates, metric, self.box, self.predicate, self.order)


@functools.lru_cache(maxsize=128)
def _geometry(chart: Chart, x: tuple, order: int) -> PointGeometry:
    return PointGeometry(chart, np.array(x), order)


def christoffel_of(g: Jet, g_inv: Jet) -> Jet:
    """Gamma^a_bc of a metric jet, stored as [a, b, c]."""
    dg = g.grad()  # dg[i, j, k] = d_k g_ij
    low = (dg.transpose(0, 2, 1) + dg - dg.transpose(2, 0, 1)) * 0.5
    return jeinsum("ad,dbc->abc", g_inv, low)


class PointGeometry:
    """Metric jets and Levi-Civita data of a chart at one point."""

    def __init__(self, chart: Chart, x, order: int) -> None:
        if order < 2:
            raise JetOrderError("curvature needs metric jets of order at least 2")
        self.chart = chart
        self.x = np.asarray(x, dtype=float)
        self.space = jets.jet_space(order)
        self.u = self.space.variables(self.x)
        g = chart.metric(self.u)
        if not isinstance(g, Jet) or g.shape != (DIM5, DIM5):
            raise SingularMetricError("metric of chart {} must be a 5x5 jet".format(chart.name))
        self.g = jets.Jet((g.data + np.swapaxes(g.data, 0, 1)) / 2.0, g.order, g.space)
        g0 = self.g.value
        sig = signature(g0)
        if sig not in ((2, 3), (3, 2)):
            raise SingularMetricError("metric of chart {} has signature {} at {}".format(chart.name, sig, list(self.x)))
        self.g_inv = jets.inverse(self.g)
        self.christoffel = christoffel_of(self.g, self.g_inv)
        self._fields = {}

    def constant(self, value) -> Jet:
        return self.space.constant(value)

    def evaluate(self, f) -> Jet:
        """The jet of field ``f`` here (jets pass through, numbers become constants)."""
        if isinstance(f, Jet):
            return f
        if not callable(f):
            return self.constant(f)
        if f not in self._fields:
            self._fields[f] = jets.as_jet(self.space, f(self))
        return self._fields[f]

    @functools.cached_property
    def riemann(self) -> Jet:
        """R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb."""
        G = self.christoffel
        dG = G.grad()
        return (jeinsum("adbc->abcd", dG) - jeinsum("acbd->abcd", dG)
                + jeinsum("ace,edb->abcd", G, G) - jeinsum("ade,ecb->abcd", G, G))

    @functools.cached_property
    def ricci(self) -> Jet:
        return jeinsum("abad->bd", self.riemann)

    @functools.cached_property
    def scalar(self) -> Jet:
        return jeinsum("bd,bd->", self.g_inv, self.ricci)

    @functools.cached_property
    def J(self) -> Jet:
        return self.scalar * (1.0 / (2 * (DIM5 - 1)))

    @functools.cached_property
    def schouten(self) -> Jet:
        return (self.ricci - self.g * self.J) * (1.0 / (DIM5 - 2))

    @functools.cached_property
    def schouten_mixed(self) -> Jet:
        """P^a_b."""
        return jeinsum("ac,cb->ab", self.g_inv, self.schouten)

    def lower(self, v: Jet) -> Jet:
        return jeinsum("ab,b->a", self.g, v)

    def raise_(self, w: Jet) -> Jet:
        return jeinsum("ab,b->a", self.g_inv, w)

    def raise_form(self, w: Jet) -> Jet:
        """w^{ab} from w_ab."""
        return jeinsum("ac,bd,cd->ab", self.g_inv, self.g_inv, w)

    def nabla(self, t, kinds: str = "") -> Jet:
        return covariant_derivative(self.evaluate(t), self.christoffel, kinds)

    def laplacian(self, sigma) -> Jet:
        s = self.evaluate(sigma)
        return jeinsum("ab,ab->", self.g_inv, self.nabla(self.nabla(s), "d"))

    def __repr__(self) -> str:
        return "PointGeometry({}, x={}, order={})".format(self.chart.name, list(self.x), self.space.order)


_LETTERS = "abcdefgh"


def covariant_derivative(t: Jet, christoffel: Jet, kinds: str = "") -> Jet:
    """Levi-Civita derivative of ``t``; the new index goes last.

    ``kinds`` has one character per tensor slot, ``u`` for an upper and
    ``d`` for a lower index.
    """
    if len(kinds) != t.ndim:
        raise JetOrderError("kinds {!r} do not match a rank {} tensor".format(kinds, t.ndim))
    out = t.grad()
    idx = _LETTERS[:t.ndim]
    for slot, kind in enumerate(kinds):
        moved = idx[:slot] + "z" + idx[slot + 1:]
        if kind == "d":
            out = out - jeinsum("zy{},{}->{}y".format(idx[slot], moved, idx), christoffel, t)
        elif kind == "u":
            out = out + jeinsum("{}yz,{}->{}y".format(idx[slot], moved, idx), christoffel, t)
        else:
            raise JetOrderError("index kind must be 'u' or 'd', got {!r}".format(kind))
    return out


@dataclass(frozen=True)
class CurvatureAtPoint:
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    schouten: np.ndarray
    metric: np.ndarray = field(repr=False, default=None)

    def to_json(self):
        return {"christoffel": self.christoffel.tolist(), "riemann": self.riemann.tolist(),
                "ricci": self.ricci.tolist(), "scalar": self.scalar, "schouten": self.schouten.tolist()}


def curvature_at(chart: Chart, x) -> CurvatureAtPoint:
    p = chart.at(x)
    return CurvatureAtPoint(p.christoffel.value, p.riemann.value, p.ricci.value,
                            p.scalar.value, p.schouten.value, p.g.value)


def einstein_residual(p: PointGeometry, constant: float | None = None) -> float:
    """max |Ric - c g| / max |g|; with c=None the trace-free part of Ric is measured."""
    ric = p.ricci.value
    g = p.g.value
    c = p.scalar.value / DIM5 if constant is None else constant
    return float(np.max(np.abs(ric - c * g)) / max(1.0, np.max(np.abs(g))))


def theta0_standard(p: PointGeometry, sigma) -> Jet:
    """(sigma_{,ab} + P_ab sigma)_0."""
    s = p.evaluate(sigma)
    T = p.nabla(p.nabla(s), "d") + p.schouten * s
    T = jets.symmetrize(T)
    trace = jeinsum("ab,ab->", p.g_inv, T)
    return T - p.g * (trace * (1.0 / DIM5))


def theta0_residual(p: PointGeometry, sigma) -> float:
    return float(np.max(np.abs(theta0_standard(p, sigma).value)))


def einstein_constant_formula(p: PointGeometry, sigma) -> float:
    """lambda = sigma (Delta sigma + J sigma) / 5 - |grad sigma|^2 / 2."""
    s = p.evaluate(sigma)
    ds = p.nabla(s)
    lam = s * (p.laplacian(s) + p.J * s) * (1.0 / DIM5) - jeinsum("a,ab,b->", ds, p.g_inv, ds) * 0.5
    return float(lam.value)

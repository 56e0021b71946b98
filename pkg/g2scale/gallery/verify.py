"""One-command verification of the gallery examples.

A check maps a sample point (or the whole example) to a residual. Per-point
residuals are reduced by their maximum; the report keeps, for every check,
the residual, its tolerance and whether it gates the overall verdict.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..chart import expr, jets
from ..chart.distribution import (
    canonical_splitting, classify_point, distribution_checks, growth_vector, span_isotropy,
)
from ..chart.geometry import curvature_at, einstein_constant_formula, einstein_residual, theta0_residual
from ..chart.killing import (
    compositions, conformal_killing_residual, contact_form_value, family_2form, family_parameters,
    hypersurface_residuals, ijk_agreement, killing_data, lie_relations, open_orbit_residuals, pi7,
    sasaki_residuals, xi_iota7,
)
from ..chart.tractor import component_identities, einstein_constant, normality_residual
from ..config import conf
from ..errors import G2ScaleError, InputError
from ..klog import klogger
from .examples import GalleryExample, available_examples, dirichlet_span, load_example, rolling_span

SUBMAXIMAL_I = (-0.75, 0.0, 1.0, 2.0)
GROWTH = (2, 3, 5)


@dataclass(frozen=True)
class Check:
    id: str
    paper_ref: str
    tolerance: float
    func: Callable
    per_point: bool = True
    gating: bool = True
    count: bool = False


@dataclass
class CheckResult:
    id: str
    paper_ref: str
    max_residual: float
    tolerance: float
    passed: bool
    gating: bool = True
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"id": self.id, "paper_ref": self.paper_ref, "max_residual": _finite(self.max_residual),
               "tolerance": self.tolerance, "pass": self.passed, "gating": self.gating}
        if self.notes:
            out["notes"] = self.notes
        return out


@dataclass
class VerificationReport:
    example: str
    seed: int
    points: int
    params: dict
    checks: list
    unverified: list

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def check(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.id == check_id:
                return c
        raise KeyError(check_id)

    def to_json(self) -> dict:
        return {"example": self.example, "seed": self.seed, "points": self.points, "params": self.params,
                "checks": [c.to_json() for c in self.checks], "unverified_claims": self.unverified,
                "overall": self.overall}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def _finite(x: float):
    return x if math.isfinite(x) else "inf"


def _split(result):
    if isinstance(result, tuple):
        return float(result[0]), dict(result[1])
    return float(result), {}


# shared pieces


def _phi(ex, p):
    return p.evaluate(ex.fields["phi"])


def _max(values) -> float:
    return float(max(values)) if values else 0.0


def _normality(ex, x):
    p = ex.chart.at(x)
    return normality_residual(p, _phi(ex, p))


def _components(ex, x):
    p = ex.chart.at(x)
    return _max(component_identities(p, _phi(ex, p)).values())


def _pi7(ex, x):
    """pi7 inverts iota7 on every listed scale."""
    p = ex.chart.at(x)
    phi = _phi(ex, p)
    worst = 0.0
    for sigma in ex.fields["scales"].values():
        back = pi7(p, phi, xi_iota7(p, phi, sigma))
        worst = max(worst, abs(float(back.value) - float(p.evaluate(sigma).value)))
    return worst


def _sasaki_conventions(ex):
    g = ex.fields["sasaki_metric"]
    neg = ex.fields.setdefault("_neg_sasaki_metric", lambda u: -g(u))
    return {"h=g,eps=-1": (g, -1.0), "h=g,eps=+1": (g, 1.0), "h=-g,eps=-1": (neg, -1.0), "h=-g,eps=+1": (neg, 1.0)}


def _sasaki_one(label):
    def run(ex, x):
        p = ex.chart.at(x)
        h, eps = _sasaki_conventions(ex)[label]
        return max(sasaki_residuals(p, h, ex.fields["reeb"], eps))
    return run


def _sasaki_best(ex, x):
    p = ex.chart.at(x)
    best = None
    for label, (h, eps) in _sasaki_conventions(ex).items():
        res = max(sasaki_residuals(p, h, ex.fields["reeb"], eps))
        if best is None or res < best[0]:
            best = (res, label)
    return best[0], {"convention": best[1]}


# rolling


def _upsilon_sweep(ex):
    return sorted({0.0, 1.0, math.pi / 2, ex.params["upsilon"]})


def _r_einstein(ex, x):
    return einstein_residual(ex.chart.at(x), ex.params["constant"])


def _r_isotropy(ex, x):
    p = ex.chart.at(x)
    return _max([span_isotropy(p, *rolling_span(u)) for u in _upsilon_sweep(ex)])


def _r_growth(ex, x):
    p = ex.chart.at(x)
    return float(sum(growth_vector(p, *rolling_span(u)) != GROWTH for u in _upsilon_sweep(ex)))


def _splitting(span_key):
    def run(ex, x):
        p = ex.chart.at(x)
        report = canonical_splitting(p, _phi(ex, p), ex.fields[span_key])
        margin = report.pop("transverse_margin")
        if margin < 1e-8:
            return math.inf, {"transverse_margin": margin}
        return _max(report.values()), {"transverse_margin": margin}
    return run


def _r_ijk(ex, x):
    p = ex.chart.at(x)
    return ijk_agreement(p, _phi(ex, p), ex.fields["sigma"])


def _r_lie(ex, x):
    p = ex.chart.at(x)
    return _max(lie_relations(p, _phi(ex, p), ex.fields["sigma"], conf.tol_killing).values())


def _r_open_orbit(ex, x):
    p = ex.chart.at(x)
    return _max(open_orbit_residuals(p, _phi(ex, p)).values())


def _r_compositions(ex, x):
    p = ex.chart.at(x)
    out = compositions(p, _phi(ex, p), ex.fields["sigma"])
    sign = out.pop("j_sign")
    return _max(out.values()), {"j_sign": sign}


def _r_lambda(ex, x):
    p = ex.chart.at(x)
    return abs(einstein_constant(p, ex.fields["sigma"]) - ex.params["eps"] / 2.0)


def _r_contact(ex, x):
    p = ex.chart.at(x)
    xi = killing_data(p, _phi(ex, p), ex.fields["sigma"]).xi
    value = contact_form_value(p, xi)
    return (0.0 if abs(value) > 1e-6 else 1.0), {"contact_value": value}


def _r_reeb(ex, x):
    p = ex.chart.at(x)
    xi = np.asarray(xi_iota7(p, _phi(ex, p), ex.fields["sigma"]).value)
    return float(np.linalg.norm(xi[:4]) / abs(xi[4])), {"ratio": float(xi[4])}


def _r_family_span(ex, x):
    p = ex.chart.at(x)
    abar, b = family_parameters(-1, "circle", 1.0)
    moved = family_2form(p, _phi(ex, p), ex.fields["sigma"], abar, b)
    u0 = ex.params["upsilon"]
    return min(distribution_checks(p, moved, span=rolling_span(u0 + d))["span_residual"] for d in (1.0, -1.0))


# rolling-para


def _rp_einstein(ex, x):
    p = ex.chart.at(x)
    return einstein_residual(p, None), {"constant": float(p.scalar.value) / 5.0}


# dirichlet


def _d_ricci(ex, x):
    return einstein_residual(ex.chart.at(x), 0.0)


def _d_theta0(ex, x):
    p = ex.chart.at(x)
    return _max([theta0_residual(p, s) for s in ex.fields["scales"].values()])


def _d_lambda(ex, x):
    p = ex.chart.at(x)
    scales = ex.fields["scales"]
    return max(abs(einstein_constant(p, scales["one"])), abs(einstein_constant(p, scales["r"]) - 0.5))


def _d_killing(ex, x):
    p = ex.chart.at(x)
    return _max([conformal_killing_residual(p, f) for f in ex.fields["symmetries"].values()])


def _d_iota7(ex, x):
    p = ex.chart.at(x)
    phi = _phi(ex, p)
    sym = ex.fields["symmetries"]
    scales = ex.fields["scales"]
    xi_one = np.asarray(xi_iota7(p, phi, scales["one"]).value)
    xi_r = np.asarray(xi_iota7(p, phi, scales["r"]).value)
    target_one = p.evaluate(sym["Z"]).value + p.evaluate(sym["d_r"]).value
    target_r = p.evaluate(sym["A"]).value
    best = min((max(np.max(np.abs(xi_one - c * target_one)), np.max(np.abs(xi_r - c * target_r))), c)
               for c in (1.0, -1.0))
    return float(best[0]), {"orientation": best[1]}


def _d_aut_wedge(ex, x):
    p = ex.chart.at(x)
    sym = ex.fields["symmetries"]
    rows = [p.evaluate(sym[k]).value for k in ("X", "H", "Y", "A", "d_r")]
    det = float(np.linalg.det(np.array(rows)))
    w2 = (x[0] * x[2] - x[1]) ** 2
    return abs(det + 2.0 * w2) / (2.0 * w2), {"margin": abs(det)}


def _d_decomposable(ex, x):
    p = ex.chart.at(x)
    report = distribution_checks(p, _phi(ex, p), span=ex.fields["base_span"])
    return max(report["decomposability_residual"], report["span_residual"])


def _d_growth(ex, x):
    p = ex.chart.at(x)
    return float(growth_vector(p, *ex.fields["span"]) != GROWTH)


def _d_family_span(ex, x):
    p = ex.chart.at(x)
    abar, b = family_parameters(1, "hyperbolic", ex.params["t"], ex.params["branch"])
    moved = family_2form(p, _phi(ex, p), ex.fields["scales"]["r"], abar, b)
    return distribution_checks(p, moved, span=ex.fields["span"])["span_residual"]


def _sweep_point(r: float):
    return np.array([1.0, -0.5, 1.0, 0.0, r])


def _d_classify(ex):
    expected = {-0.5: "M5-", 0.0: "M4", 0.5: "M5+"}
    labels = {}
    for r, want in expected.items():
        p = ex.chart.at(_sweep_point(r))
        labels[str(r)] = classify_point(p, ex.fields["scales"]["r"], _phi(ex, p))
    misses = sum(labels[str(r)] != want for r, want in expected.items())
    return float(misses), {"labels": labels}


def _d_hypersurface(ex):
    p = ex.chart.at(_sweep_point(0.0))
    report = hypersurface_residuals(p, ex.fields["phi"], ex.fields["scales"]["r"])
    sign = report.pop("j_sign")
    return _max(report.values()), dict(report, j_sign=sign)


def _d_smooth_span(ex):
    sines = {}
    for branch in ("-", "+"):
        W, rV = dirichlet_span(ex.params["t"], branch)
        for r in (-0.5, 0.0, 0.5):
            p = ex.chart.at(_sweep_point(r))
            a = np.asarray(p.evaluate(W).value)
            b = np.asarray(p.evaluate(rV).value)
            na, nb = np.linalg.norm(a), np.linalg.norm(b)
            gram = max(na * na * nb * nb - float(a @ b) ** 2, 0.0)
            sines["{}:{}".format(branch, r)] = math.sqrt(gram) / (na * nb)
    margin = min(sines.values())
    return float(sum(s < 1e-3 for s in sines.values())), {"min_sine": margin, "rescaling": "second generator times r"}


# submaximal


def _s_theta0(ex, x):
    p = ex.chart.at(x)
    return _max([theta0_residual(p, s) for s in ex.fields["scales"].values()])


def _s_lambda(ex, x):
    p = ex.chart.at(x)
    return _max([abs(einstein_constant_formula(p, s)) for s in ex.fields["scales"].values()])


def _s_growth(ex, x):
    return float(growth_vector(ex.chart.at(x), *ex.fields["span"]) != GROWTH)


def _s_isotropy(ex, x):
    return span_isotropy(ex.chart.at(x), *ex.fields["span"])


def _omega(u):
    return jets.sin(u[0]) * 0.1 + 1.0


def _s_conformal(ex, x):
    chart = ex.fields.get("rescaled")
    if chart is None:
        chart = ex.fields.setdefault("rescaled", ex.chart.rescaled(_omega))
    p = chart.at(x)
    worst = 0.0
    for s in ex.fields["scales"].values():
        hat = lambda q, s=s: q.evaluate(s) * _omega(q.u)  # noqa: E731
        worst = max(worst, theta0_residual(p, hat))
    return worst


_ROLLING = "rolling distribution"
_DIRICHLET = "Dirichlet distribution"
_SUBMAXIMAL = "submaximal family"


def _checks(name: str) -> list:
    t2, t3, ts, tk = conf.tol_order2, conf.tol_order3, conf.tol_scale, conf.tol_killing
    if name == "rolling":
        out = [
            Check("einstein", _ROLLING + ", R_ab = 4 g_ab", t2, _r_einstein),
            Check("sasaki", _ROLLING + ", Sasaki-Einstein structure (M, g, d_lambda)", t3, _sasaki_best),
            Check("isotropy", _ROLLING + ", D_upsilon induce the conformal class [-g]", t2, _r_isotropy),
            Check("growth", _ROLLING + ", oriented (2,3,5) distributions D_upsilon", 0.0, _r_growth, count=True),
            Check("normality", "normal conformal Killing 2-form of D_upsilon", t3, _normality),
            Check("component_identities", "algebraic identities of a parallel tractor 3-form", t3, _components),
            Check("splitting", "D + L + E splitting of the canonical filtration", t3, _splitting("span")),
            Check("ijk_agreement", "differential expressions in phi and sigma", t3, _r_ijk),
            Check("lie_relations", "Lie derivatives of sigma, phi, I, J, K along xi", t3, _r_lie),
            Check("open_orbit", "I, J, K in the scale sigma = 1", t3, _r_open_orbit),
            Check("compositions", "I, J, K as endomorphisms of xi-perp", t3, _r_compositions),
            Check("einstein_constant", _ROLLING + ", Ricci-negative", ts, _r_lambda),
            Check("contact", "xi-perp is a contact distribution for eps != 0", 0.0, _r_contact, count=True),
            Check("reeb", _ROLLING + ", xi proportional to d_lambda", ts, _r_reeb, gating=False),
            Check("family_span", "circle family through D_upsilon", ts, _r_family_span, gating=False),
        ]
        out += [Check("sasaki[{}]".format(label), "Sasaki structure convention", t3, _sasaki_one(label),
                      gating=False) for label in ("h=g,eps=-1", "h=g,eps=+1", "h=-g,eps=-1", "h=-g,eps=+1")]
        return out
    if name == "rolling-para":
        out = [Check("einstein_tracefree", _ROLLING + ", para-Kaehler-Einstein variant", t2, _rp_einstein)]
        out += [Check("sasaki[{}]".format(label), "para-Sasaki structure convention", t3, _sasaki_one(label),
                      gating=False) for label in ("h=g,eps=-1", "h=g,eps=+1", "h=-g,eps=-1", "h=-g,eps=+1")]
        return out
    if name == "dirichlet":
        return [
            Check("ricci_flat", _DIRICHLET + ", g' is Ricci-flat", t2, _d_ricci),
            Check("theta0", _DIRICHLET + ", almost Einstein scales <1, r>", ts, _d_theta0),
            Check("einstein_constants", _DIRICHLET + ", Ricci-positive for the scale r", ts, _d_lambda),
            Check("killing_fields", _DIRICHLET + ", aut(c) has dimension 6", tk, _d_killing),
            Check("iota7", _DIRICHLET + ", iota7(1) = Z + d_r and iota7(r) = A", ts, _d_iota7),
            Check("aut_wedge", _DIRICHLET + ", X^H^Y^A^d_r = -2 (xp - y)^2", t2, _d_aut_wedge),
            Check("normality", "normal conformal Killing 2-form of D_0", t3, _normality),
            Check("pi7", "pi7 o iota7 is the identity on <1, r>", ts, _pi7),
            Check("hypersurface", "xi, I, J, K along the zero locus M4 of r", t3, _d_hypersurface,
                  per_point=False),
            Check("decomposable", "phi spans the distribution D_0", ts, _d_decomposable),
            Check("splitting", "D + L + E splitting of the canonical filtration", t3, _splitting("base_span")),
            Check("growth", _DIRICHLET + ", (2,3,5) distribution on all of M", 0.0, _d_growth, count=True),
            Check("classify", "curved orbits M5+, M4, M5- by the sign of r", 0.0, _d_classify,
                  per_point=False, count=True),
            Check("smooth_span", _DIRICHLET + ", span extends smoothly across M4", 0.0, _d_smooth_span,
                  per_point=False, count=True),
            Check("family_span", _DIRICHLET + ", D_t related by the Einstein scale r", ts, _d_family_span,
                  gating=False),
        ]
    if name == "submaximal":
        return [
            Check("theta0", _SUBMAXIMAL + ", solutions of the homogeneous ODE", ts, _s_theta0),
            Check("lambda_zero", _SUBMAXIMAL + ", all of these turn out to be Ricci-flat", t2, _s_lambda),
            Check("growth", _SUBMAXIMAL + ", (2,3,5) distribution D_I", 0.0, _s_growth, count=True),
            Check("isotropy", _SUBMAXIMAL + ", D_I induces c_I", t2, _s_isotropy),
            Check("conformal_invariance", "Theta_0 kernel under g -> (1 + sin(x)/10)^2 g", ts, _s_conformal),
            Check("normality", "normal conformal Killing 2-form of D_I", t3, _normality),
            Check("component_identities", "algebraic identities of a parallel tractor 3-form", t3, _components),
            Check("pi7", "pi7 o iota7 is the identity on the listed scales", ts, _pi7),
        ]
    raise InputError("unknown example {!r}".format(name), "name")


# running


def _run_check(check: Check, ex: GalleryExample, points, workers: int, tol: float | None) -> CheckResult:
    tolerance = check.tolerance if (tol is None or check.count) else tol
    notes = {}
    try:
        if check.per_point:
            call = lambda x: _split(check.func(ex, x))  # noqa: E731
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(call, points))
            else:
                results = [call(x) for x in points]
            worst = max(range(len(results)), key=lambda i: results[i][0])
            residual, notes = results[worst]
        else:
            residual, notes = _split(check.func(ex))
    except (G2ScaleError, ArithmeticError, np.linalg.LinAlgError) as error:
        klogger.warning("check {} on {} raised {}: {}".format(check.id, ex.name, type(error).__name__, error))
        residual, notes = math.inf, {"error": "{}: {}".format(type(error).__name__, error)}
    passed = residual <= tolerance
    level = klogger.debug if passed or not check.gating else klogger.warning
    level("{} {}: residual {:.3e} tolerance {:.1e}".format(ex.name, check.id, residual, tolerance))
    return CheckResult(check.id, check.paper_ref, residual, tolerance, passed, check.gating, notes)


def _scale_fields(texts, coordinates) -> dict:
    out = {}
    for k, text in enumerate(texts):
        e = expr.parse(text, coordinates, "scale {}".format(k + 1))
        out[text] = lambda p, e=e: expr.evaluate(e, p.u, coordinates)
    return out


def verify_example(name: str, overrides: dict | None = None) -> VerificationReport:
    """Run every check of the named example and collect a report.

    ``overrides`` may set ``points``, ``seed``, ``tol`` (replacing every
    residual tolerance), ``workers`` and the example parameters ``upsilon``,
    ``t``, ``branch``, ``I`` and ``scales`` (expressions in the coordinates).
    """
    if name not in available_examples():
        raise InputError("unknown example {!r}; choose from {}".format(name, ", ".join(available_examples())), "name")
    o = dict(overrides or {})
    count = int(o.get("points") or conf.points)
    seed = int(o.get("seed") if o.get("seed") is not None else conf.seed)
    workers = int(o.get("workers") or 1)
    tol = o.get("tol")
    params = {k: o[k] for k in ("upsilon", "t", "branch", "I") if o.get(k) is not None}
    if o.get("scales") and name != "submaximal":
        raise InputError("only the submaximal example takes replacement scales", "scales")
    variants = []
    if name == "submaximal" and "I" not in params:
        for I in SUBMAXIMAL_I:
            variants.append(("[I={:g}]".format(I), dict(params, I=I)))
    else:
        variants.append(("", params))
    results = []
    unverified = []
    report_params = {}
    for suffix, vparams in variants:
        ex = load_example(name, vparams)
        if o.get("scales"):
            ex.fields["scales"] = _scale_fields(o["scales"], ex.chart.coordinates)
        points = sorted(ex.sample(count, seed), key=tuple)
        for check in _checks(name):
            result = _run_check(check, ex, points, workers, tol)
            result.id += suffix
            results.append(result)
        unverified = ex.unverified
        report_params.update({k + suffix: v for k, v in ex.params.items()})
    report = VerificationReport(name, seed, count, report_params, results, unverified)
    klogger.log("verified {}: overall {}".format(name, "pass" if report.overall else "FAIL"))
    return report


def curvature_report(name: str, x) -> dict:
    """Curvature data of a gallery chart at one point."""
    return curvature_at(load_example(name).chart, x).to_json()

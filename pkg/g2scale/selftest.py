"""Exact identity suites for the fiber algebra.

Every suite returns a list of records ``{"id", "residual", "pass", "count"}``.
All arithmetic runs in the exact backend, so a passing record has residual 0.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction

import numpy as np

from .errors import G2ScaleError, InputError
from .forms import DIM, KForm, hodge_star, hook, inner, span_rank, to_float_array, wedge
from .g2core import (
    decompose2, decompose3, exact_contraction_identities, g2_algebra_test,
    g2_annihilator_dimension, g2_matrix, genericity_and_compatibility, iota2_7,
    iota3_7, i_map, pi2_7, pi3_1, pi3_7, pi3_27, recompose3, standard_metric,
    standard_structure, standard_volume,
)
from .klog import klogger
from .scalars import ExactScalar
from .stabilizer import (
    ALLOWED_LABELS, FamilyParam, K_of_member, antipodal_test, derivative_at_zero,
    family_member, isotropic_cone_sweep, make_stabilizer, null_complementary_residual,
    rational_conic_points, recover_scale, stabilizer_residuals,
)

SUITES = ("scalars", "forms", "g2core", "stabilizer")

# one normalized witness S per causality type, in the standard basis
WITNESSES = {
    -1: (0, 1, 0, 0, Fraction(1, 2), 0, 0),
    0: (1, 0, 0, 0, 0, 0, 0),
    1: (0, 0, 0, 1, 0, 0, 0),
}
VARIANT = {-1: "circle", 0: "parabolic", 1: "hyperbolic"}


def _record(name, residual, passed, count=1):
    return {"id": name, "residual": float(residual), "pass": bool(passed), "count": count}


def _gap(a, b) -> float:
    if isinstance(a, KForm):
        return 0.0 if a == b else a.max_abs_diff(b)
    diff = to_float_array(np.asarray(a)) - to_float_array(np.asarray(b))
    return float(np.max(np.abs(diff))) if diff.size else 0.0


class _Tally:
    """Accumulates one identity over many random inputs."""

    def __init__(self, name):
        self.name = name
        self.worst = 0.0
        self.ok = True
        self.count = 0

    def add(self, residual, passed=None):
        self.count += 1
        self.worst = max(self.worst, float(residual))
        self.ok = self.ok and (residual == 0 if passed is None else bool(passed))

    def record(self):
        return _record(self.name, self.worst, self.ok, self.count)


def random_scalar(rng: random.Random, size: int = 9) -> ExactScalar:
    return ExactScalar(Fraction(rng.randint(-size, size), rng.randint(1, size)),
                       Fraction(rng.randint(-size, size), rng.randint(1, size)))


def random_rational(rng: random.Random, size: int = 5) -> Fraction:
    return Fraction(rng.randint(-size, size), rng.randint(1, size))


def random_form(rng: random.Random, degree: int, density: float = 0.5) -> KForm:
    form = KForm.zero(degree)
    for n in range(len(form.values)):
        if rng.random() < density:
            form.values[n] = ExactScalar(random_rational(rng))
    return form


def random_vector(rng: random.Random):
    return np.array([ExactScalar(random_rational(rng)) for _ in range(DIM)], dtype=object)


def random_tracefree(G, rng: random.Random):
    s = np.empty((DIM, DIM), dtype=object)
    for i in range(DIM):
        for j in range(i, DIM):
            s[i, j] = s[j, i] = ExactScalar(random_rational(rng))
    trace = sum(np.dot(G.h_inv, s)[i, i] for i in range(DIM))
    return s - G.h * (trace * Fraction(1, DIM))


def scalars_suite(rng: random.Random, trials: int = 200) -> list:
    assoc = _Tally("scalars.associativity")
    dist = _Tally("scalars.distributivity")
    inverse = _Tally("scalars.inverse")
    norm = _Tally("scalars.norm_multiplicative")
    root = _Tally("scalars.sqrt_of_square")
    text = _Tally("scalars.parse_str")
    for _ in range(trials):
        x, y, z = random_scalar(rng), random_scalar(rng), random_scalar(rng)
        assoc.add(float(abs((x * y) * z - x * (y * z))))
        dist.add(float(abs(x * (y + z) - (x * y + x * z))))
        if x:
            inverse.add(float(abs(x * x.inv() - 1)))
        norm.add(abs(float((x * y).norm - x.norm * y.norm)))
        r = (x * x).sqrt()
        root.add(0.0 if r is not None and r == abs(x) else 1.0)
        text.add(0.0 if ExactScalar.parse(str(x)) == x else 1.0)
    return [t.record() for t in (assoc, dist, inverse, norm, root, text)]


def forms_suite(rng: random.Random, trials: int = 100) -> list:
    H = standard_metric()
    vol = standard_volume()
    commute = _Tally("forms.graded_commutativity")
    assoc = _Tally("forms.wedge_associativity")
    leibniz = _Tally("forms.hook_antiderivation")
    nilpotent = _Tally("forms.hook_twice")
    star = _Tally("forms.hodge_definition")
    for _ in range(trials):
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        a, b = random_form(rng, p), random_form(rng, q)
        c = random_form(rng, rng.randint(0, DIM - p - q))
        commute.add(_gap(wedge(a, b), wedge(b, a) * (-1) ** (p * q)))
        assoc.add(_gap(wedge(wedge(a, b), c), wedge(a, wedge(b, c))))
        v = random_vector(rng)
        lhs = hook(v, wedge(a, b))
        rhs = wedge(hook(v, a), b) + wedge(a, hook(v, b)) * (-1) ** p
        leibniz.add(_gap(lhs, rhs))
        if q > 1:
            nilpotent.add(_gap(hook(v, hook(v, b)), KForm.zero(q - 2)))
        d = random_form(rng, p)
        star.add(_gap(wedge(d, hodge_star(H, vol, a)), vol * inner(H, d, a)))
    return [t.record() for t in (commute, assoc, leibniz, nilpotent, star)]


def g2core_suite(rng: random.Random, trials: int = 200) -> list:
    G = standard_structure("exact")
    out = [
        _record("g2core.induced_metric", _gap(G.h, standard_metric()), np.all(G.h == standard_metric())),
        _record("g2core.induced_volume", _gap(G.vol, standard_volume()), G.vol == standard_volume()),
        _record("g2core.contraction_identities", 0.0 if exact_contraction_identities(G) else 1.0,
                exact_contraction_identities(G)),
        _record("g2core.pi3_1_of_phi", _gap(pi3_1(G, G.phi), 1), pi3_1(G, G.phi) == 1),
    ]
    pi7_iota7 = _Tally("g2core.pi2_7_iota2_7")
    two = _Tally("g2core.decompose2")
    pi3_iota3 = _Tally("g2core.pi3_7_iota3_7")
    pi27_i = _Tally("g2core.pi3_27_i")
    three = _Tally("g2core.recompose3")
    algebra = _Tally("g2core.g2_matrix_annihilates_phi")
    for _ in range(trials):
        v = random_vector(rng)
        pi7_iota7.add(_gap(pi2_7(G, iota2_7(G, v)), v))
        _, m = decompose2(G, random_form(rng, 2))
        two.add(_gap(pi2_7(G, m), np.zeros(DIM)))
        pi3_iota3.add(_gap(pi3_7(G, iota3_7(G, v)), v))
        s = random_tracefree(G, rng)
        pi27_i.add(_gap(pi3_27(G, i_map(G, s)), s))
        psi = random_form(rng, 3)
        three.add(_gap(recompose3(G, *decompose3(G, psi)), psi))
    for _ in range(max(trials // 10, 1)):
        params = {"A": [[random_rational(rng) for _ in range(2)] for _ in range(2)],
                  "r": random_rational(rng), "s": random_rational(rng)}
        params.update({k: [random_rational(rng), random_rational(rng)] for k in "WXYZ"})
        A = g2_matrix(params)
        algebra.add(0.0, g2_algebra_test(G, A))
    out.extend(t.record() for t in (pi7_iota7, two, pi3_iota3, pi27_i, three, algebra))
    dim = g2_annihilator_dimension(G)
    out.append(_record("g2core.annihilator_dimension", abs(dim - 14), dim == 14))
    for eps, S in sorted(WITNESSES.items()):
        dim = g2_annihilator_dimension(G, np.array([ExactScalar(x) for x in S], dtype=object))
        out.append(_record("g2core.stabilizer_dimension[eps={}]".format(eps), abs(dim - 8), dim == 8))
    return out


def stabilizer_suite(rng: random.Random, members: int = 50, rays: int = 10000) -> list:
    G = standard_structure("exact")
    out = []
    for eps, S in sorted(WITNESSES.items()):
        tag = "[eps={}]".format(eps)
        SD = make_stabilizer(G, [ExactScalar(x) for x in S])
        worst = max(stabilizer_residuals(G, SD).values())
        out.append(_record("stabilizer.identities" + tag, worst, worst == 0))
        compatible = _Tally("stabilizer.member_compatible" + tag)
        same_K = _Tally("stabilizer.K_invariant" + tag)
        roundtrip = _Tally("stabilizer.recovery_roundtrip" + tag)
        antipodal = _Tally("stabilizer.no_antipodal" + tag)
        for param in rational_conic_points(eps, members):
            member = family_member(SD, G, param)
            report = genericity_and_compatibility(member, G.h, G.vol)
            compatible.add(0.0, all(report.values()))
            same_K.add(_gap(K_of_member(SD.S, member), SD.K_form))
            try:
                result = recover_scale(G, member)
            except G2ScaleError as error:
                klogger.debug("recovery failed for {}: {}".format(param, error))
                roundtrip.add(1.0, False)
                continue
            if eps == 0:
                parallel = span_rank([result.S, SD.S]) == 1
            else:
                parallel = all(x == 0 for x in result.S - SD.S) or all(x == 0 for x in result.S + SD.S)
            roundtrip.add(result.residual, result.residual == 0 and result.eps == eps and parallel)
            if eps == 0:
                antipodal.add(0.0, not antipodal_test(G, G.phi, member))
        out.extend(t.record() for t in (compatible, same_K, roundtrip))
        if eps == 0:
            out.append(antipodal.record())
            out.append(_record("stabilizer.null_complementary", null_complementary_residual(SD, G, Fraction(3, 7)),
                               null_complementary_residual(SD, G, Fraction(3, 7)) == 0))
        else:
            far = FamilyParam.circle(-1, 0) if eps == -1 else FamilyParam.hyperbolic("+", 1, 0)
            member = family_member(SD, G, far)
            try:
                result = recover_scale(G, member)
                ok = result.residual == 0 and result.branch == "antipodal"
                out.append(_record("stabilizer.antipodal_recovery" + tag, result.residual, ok))
            except G2ScaleError as error:
                klogger.debug("antipodal recovery failed: {}".format(error))
                out.append(_record("stabilizer.antipodal_recovery" + tag, float("inf"), False))
        slope = derivative_at_zero(SD, G, VARIANT[eps])
        out.append(_record("stabilizer.derivative_at_zero" + tag, _gap(slope, SD.phi_J), slope == SD.phi_J))
        tally = isotropic_cone_sweep(G, SD.S, rays, seed=rng.randint(0, 2 ** 31))
        seen = frozenset(tally)
        record = _record("stabilizer.ray_labels" + tag, len(seen ^ ALLOWED_LABELS[eps]),
                         seen == ALLOWED_LABELS[eps], rays)
        record["labels"] = {k: tally[k] for k in sorted(tally)}
        out.append(record)
    return out


_RUNNERS = {
    "scalars": scalars_suite,
    "forms": forms_suite,
    "g2core": g2core_suite,
    "stabilizer": stabilizer_suite,
}


def run_suites(suite: str = "all", seed: int = 0, scale: float = 1.0) -> dict:
    """Run one suite (or all of them); ``scale`` shrinks every trial count."""
    if suite != "all" and suite not in _RUNNERS:
        raise InputError("unknown suite {!r}; choose from {}".format(suite, ", ".join(SUITES + ("all",))), "suite")
    names = SUITES if suite == "all" else (suite,)
    results = {}
    for name in names:
        rng = random.Random("{}:{}".format(seed, name))
        started = time.perf_counter()
        if name == "stabilizer":
            records = stabilizer_suite(rng, max(int(50 * scale), 1), max(int(10000 * scale), 10))
        else:
            records = _RUNNERS[name](rng, max(int(200 * scale), 1) if name != "forms" else max(int(100 * scale), 1))
        klogger.log("suite {} finished in {:.2f}s".format(name, time.perf_counter() - started))
        results[name] = records
    overall = all(r["pass"] for records in results.values() for r in records)
    return {"backend": "exact", "seed": seed, "suites": results, "overall": overall}

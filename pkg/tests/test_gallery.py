import json
import math

import numpy as np
import pytest

from g2scale.chart import (
    canonical_splitting, classify_point, growth_vector, hypersurface_residuals, normality_residual, span_isotropy,
    theta0_residual, xi_iota7,
)
from g2scale.errors import InputError
from g2scale.gallery import available_examples, load_example, verify_example
from g2scale.gallery.examples import rolling_span, submaximal_scales
from g2scale.gallery.verify import SUBMAXIMAL_I, curvature_report

POINTS = 3


def test_available_examples():
    assert available_examples() == ["dirichlet", "rolling", "rolling-para", "submaximal"]


def test_unknown_example():
    with pytest.raises(InputError) as info:
        load_example("sphere")
    assert info.value.field == "name"
    with pytest.raises(InputError):
        verify_example("sphere")


def test_replacement_scales_only_for_submaximal():
    with pytest.raises(InputError) as info:
        verify_example("dirichlet", {"scales": ["1"]})
    assert info.value.field == "scales"


def test_examples_take_parameters():
    ex = load_example("submaximal", {"I": 2.0})
    assert ex.params == {"I": 2.0}
    assert set(ex.fields["scales"]) == {"cosh", "sinh"}
    assert set(submaximal_scales(-0.75)) == {"cos", "sin"}
    assert set(submaximal_scales(0.0)) == {"one", "x"}


def test_sampling_is_deterministic():
    ex = load_example("dirichlet")
    assert [list(x) for x in ex.sample(4, 5)] == [list(x) for x in ex.sample(4, 5)]


def test_submaximal_scales_at_one_point():
    ex = load_example("submaximal", {"I": 1.0})
    p = ex.chart.at(ex.sample(1, 3)[0])
    for sigma in ex.fields["scales"].values():
        assert theta0_residual(p, sigma) < 1e-6
    dq, total = ex.fields["span"]
    assert growth_vector(p, dq, total) == (2, 3, 5)


def test_curvature_report():
    ex = load_example("submaximal")
    report = curvature_report("submaximal", list(ex.sample(1, 0)[0]))
    assert len(report["ricci"]) == 5
    assert report["scalar"] == pytest.approx(0.0, abs=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["rolling", "dirichlet"])
def test_gallery_verifies(name):
    report = verify_example(name, {"points": POINTS, "seed": 1})
    failed = [c.id for c in report.checks if c.gating and not c.passed]
    assert failed == []
    assert report.overall
    data = json.loads(report.dumps())
    assert data["example"] == name and data["points"] == POINTS
    assert all({"id", "paper_ref", "max_residual", "tolerance", "pass"} <= set(c) for c in data["checks"])


@pytest.mark.slow
def test_submaximal_family_runs_every_parameter():
    report = verify_example("submaximal", {"points": 2, "seed": 1, "workers": 2})
    assert report.overall
    assert set(report.params) == {"I[I={:g}]".format(I) for I in SUBMAXIMAL_I}
    assert report.check("theta0[I=-0.75]").passed


@pytest.mark.slow
def test_wrong_scale_fails_theta0():
    report = verify_example("submaximal", {"points": 2, "I": 0.0, "scales": ["x^2"]})
    assert not report.check("theta0").passed
    assert not report.overall
    assert report.check("growth").passed


@pytest.mark.slow
def test_rolling_sasaki_conventions_are_reported():
    report = verify_example("rolling", {"points": 2, "upsilon": 0.5})
    labels = [c.id for c in report.checks if c.id.startswith("sasaki[")]
    assert len(labels) == 4
    assert report.check("sasaki").notes["convention"] in {label[7:-1] for label in labels}


def test_dirichlet_canonical_splitting():
    ex = load_example("dirichlet")
    p = ex.chart.at(ex.sample(1, 2)[0])
    report = canonical_splitting(p, ex.fields["phi"], ex.fields["base_span"])
    assert report["transverse_margin"] > 1e-6
    for key in ("D_isotropy", "E_isotropy", "L_perp_D", "L_perp_E", "bracket_residual"):
        assert report[key] < 1e-5, key


ZERO_LOCUS = (1.0, -0.5, 1.0, 0.0, 0.0)


def test_rolling_box():
    box = load_example("rolling").chart.box
    assert box[0] == (0.1, 3.0)
    assert box[2] == (1.1, 3.0)


@pytest.mark.parametrize("upsilon", [0.0, 1.0, math.pi / 2])
def test_rolling_span_is_isotropic(upsilon):
    ex = load_example("rolling", {"upsilon": upsilon})
    U, V = rolling_span(upsilon)
    for x in ex.sample(2, 4):
        p = ex.chart.at(x)
        assert span_isotropy(p, U, V) < 1e-8
        assert growth_vector(p, U, V) == (2, 3, 5)
        assert normality_residual(p, ex.fields["phi"]) < 1e-5


@pytest.mark.parametrize("t,branch", [(0.0, "-"), (0.0, "+"), (0.7, "-")])
def test_dirichlet_span_is_generic(t, branch):
    ex = load_example("dirichlet", {"t": t, "branch": branch})
    for x in list(ex.sample(2, 6)) + [ZERO_LOCUS]:
        p = ex.chart.at(x)
        assert span_isotropy(p, *ex.fields["span"]) < 1e-8
        assert growth_vector(p, *ex.fields["span"]) == (2, 3, 5)


def test_dirichlet_form_and_iota7():
    ex = load_example("dirichlet")
    sym = ex.fields["symmetries"]
    for x in ex.sample(2, 8):
        p = ex.chart.at(x)
        phi = ex.fields["phi"]
        assert normality_residual(p, phi) < 1e-5
        xi_one = np.asarray(xi_iota7(p, phi, 1.0).value)
        xi_r = np.asarray(xi_iota7(p, phi, ex.fields["scales"]["r"]).value)
        one = p.evaluate(sym["Z"]).value + p.evaluate(sym["d_r"]).value
        sign = 1.0 if xi_one @ one > 0 else -1.0
        assert np.allclose(xi_one, sign * one, atol=1e-6)
        assert np.allclose(xi_r, sign * p.evaluate(sym["A"]).value, atol=1e-6)


def test_dirichlet_zero_locus():
    ex = load_example("dirichlet")
    p = ex.chart.at(ZERO_LOCUS)
    r = ex.fields["scales"]["r"]
    report = hypersurface_residuals(p, ex.fields["phi"], r)
    assert report.pop("j_sign") in (1.0, -1.0)
    assert set(report) == {"xi", "I", "J", "K"}
    for key, residual in report.items():
        assert residual < 1e-5, key
    assert classify_point(p, r, ex.fields["phi"]) == "M4"

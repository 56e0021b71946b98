import numpy as np
import pytest

from g2scale.chart import (
    L0_3form, classify_point, component_identities, conformal_killing_residual, curvature_at, einstein_constant,
    einstein_constant_formula, einstein_residual, growth_vector, lie_bracket, lie_derivative_weighted,
    lie_relations, load_chart, loads, normality_residual, pi7, span_isotropy, theta0_residual,
    tractor_connection, tractor_metric, xi_iota7,
)
from g2scale.chart import jets
from g2scale.chart.tractor import L0_standard
from g2scale.errors import ExpressionError, JetOrderError, KillingError, SingularMetricError
from g2scale.forms import signature
from g2scale.gallery import load_example

POINT = (0.4, 0.1, 0.2, -0.3, 0.5)

FLAT = """
name: flat
coordinates: x y p q z
metric 0 0: 1
metric 1 1: 1
metric 2 2: -1
metric 3 3: -1
metric 4 4: -1
field sigma: x^2 + y^2 - p^2 - q^2 - z^2
# Monge normal form of the flat (2,3,5) distribution
vector U: 0; 0; 0; 1; 0
vector V: 1; p; q; 0; q^2
"""

HYPERBOLIC = """
name: hyperbolic
coordinates: x y p q z
box x: -1/2 1/2
metric 0 0: 1
metric 1 1: exp(2*x)
metric 2 2: -exp(2*x)
metric 3 3: -E^(2*x)
metric 4 4: -exp(x)*exp(x)
field one: 1
"""


@pytest.fixture(scope="module")
def flat():
    return loads(FLAT, "flat.chart")


@pytest.fixture(scope="module")
def hyperbolic():
    return loads(HYPERBOLIC, "hyperbolic.chart")


def test_flat_chart_is_flat(flat):
    p = flat.chart.at(POINT)
    assert flat.chart.name == "flat"
    assert signature(p.g.value) == (2, 3)
    assert np.max(np.abs(p.riemann.value)) < 1e-12
    assert einstein_residual(p, 0.0) < 1e-12
    report = curvature_at(flat.chart, POINT).to_json()
    assert set(report) == {"christoffel", "riemann", "ricci", "scalar", "schouten"}


def test_flat_quadratic_scale(flat):
    p = flat.chart.at(POINT)
    sigma = flat.scalars["sigma"]
    assert theta0_residual(p, sigma) < 1e-10
    assert einstein_constant_formula(p, sigma) == pytest.approx(0.0, abs=1e-10)
    assert einstein_constant(p, sigma) == pytest.approx(0.0, abs=1e-10)
    parallel = tractor_connection(p, L0_standard(p, sigma))
    assert parallel.value().max_abs() < 1e-10


def test_constant_curvature_chart(hyperbolic):
    chart = hyperbolic.chart
    assert chart.box[0] == (-0.5, 0.5)
    p = chart.at(POINT)
    assert einstein_residual(p) < 1e-9
    assert einstein_residual(p, -4.0) < 1e-9
    assert p.scalar.value == pytest.approx(-20.0)
    one = hyperbolic.scalars["one"]
    assert theta0_residual(p, one) < 1e-9
    assert einstein_constant(p, one) == pytest.approx(-0.5)


def test_rescaled_metric(flat):
    twice = flat.chart.rescaled(lambda u: 2.0, "doubled")
    assert twice.name == "doubled"
    np.testing.assert_allclose(twice.at(POINT).g.value, 4 * flat.chart.at(POINT).g.value)


def test_monge_growth_vector(flat):
    p = flat.chart.at(POINT)
    U, V = flat.vectors["U"], flat.vectors["V"]
    assert growth_vector(p, U, V) == (2, 3, 5)
    np.testing.assert_allclose(lie_bracket(p, U, V).value, [0, 0, 1, 0, 2 * POINT[3]], atol=1e-12)
    assert span_isotropy(p, U, U) == pytest.approx(1.0)


def test_tractor_metric_signature(flat):
    H = tractor_metric(flat.chart.at(POINT).g.value)
    assert H[0, 6] == H[6, 0] == 1
    assert signature(H) == (3, 4)


def test_sampling_is_reproducible(hyperbolic):
    a = hyperbolic.chart.sample(4, seed=7)
    b = hyperbolic.chart.sample(4, seed=7)
    np.testing.assert_array_equal(np.array(a), np.array(b))
    assert all(hyperbolic.chart.contains(x) for x in a)
    assert not hyperbolic.chart.contains((2.0, 0, 0, 0, 0))


def test_load_chart_from_file(tmp_path):
    path = tmp_path / "flat.chart"
    path.write_text(FLAT)
    assert load_chart(str(path)).chart.name == "flat"
    with pytest.raises(ExpressionError):
        load_chart(str(tmp_path / "missing.chart"))


@pytest.mark.parametrize("text,message", [
    ("coordinates: x y z", "src:1"),
    ("metric 0 0: 1", "must come first"),
    ("coordinates: x y p q z\nmetric 0 0: w", "src:2: unknown name"),
    ("coordinates: x y p q z\nmetric 0 0: tan(x)", "unsupported function"),
    ("coordinates: x y p q z\nmetric 0 0: 1 +", "cannot parse"),
    ("coordinates: x y p q z\nmetric 0 7: 1", "indices"),
    ("coordinates: x y p q z\nbox x: 1 -1", "empty box"),
    ("coordinates: x y p q z\nform w 1 1: x", "diagonal"),
    ("coordinates: x y p q z\nvector v: 1; 2", "vector"),
    ("coordinates: x y p q z\ncolor: red", "unknown key"),
    ("coordinates: x y pi q z", "invalid coordinate"),
    ("coordinates: x y p q z", "no metric"),
    ("coordinates: x y p q z\nmetric 0 0 1", "src:2: expected 'key: value'"),
])
def test_malformed_charts(text, message):
    with pytest.raises(ExpressionError) as info:
        loads(text, "src")
    assert message in str(info.value)


def test_degenerate_metric_is_rejected():
    chart = loads("coordinates: x y p q z\nmetric 0 0: 1", "src").chart
    with pytest.raises(SingularMetricError):
        chart.at(POINT)
    with pytest.raises(JetOrderError):
        loads(FLAT).chart.at(POINT, order=1)


def test_form_fields_are_antisymmetric():
    chart_file = loads(FLAT + "form w 0 1: x*y\n", "src")
    p = chart_file.chart.at(POINT)
    w = p.evaluate(chart_file.forms["w"])
    assert w.value[0, 1] == pytest.approx(POINT[0] * POINT[1])
    assert w.value[1, 0] == pytest.approx(-POINT[0] * POINT[1])
    assert isinstance(w, jets.Jet)


@pytest.fixture(scope="module")
def submaximal():
    return load_example("submaximal", {"I": 1.0})


@pytest.fixture(scope="module")
def submaximal_points(submaximal):
    return [submaximal.chart.at(x) for x in submaximal.sample(2, 7)]


def test_span_form_is_normal(submaximal, submaximal_points):
    for p in submaximal_points:
        assert normality_residual(p, submaximal.fields["phi"]) < 1e-6


def test_span_form_satisfies_component_identities(submaximal, submaximal_points):
    for p in submaximal_points:
        report = component_identities(p, submaximal.fields["phi"])
        assert set(report) >= {"phi_phi", "psi_psi", "theta_theta", "hodge_phi", "hodge_chi"}
        for key, residual in report.items():
            assert residual < 1e-6, key


def test_L0_3form_slots(submaximal, submaximal_points):
    p = submaximal_points[0]
    split = L0_3form(p, submaximal.fields["phi"]).value()
    ph, chi, th = (np.asarray(x, dtype=float) for x in (split.phi, split.chi, split.theta))
    assert np.allclose(ph, p.evaluate(submaximal.fields["phi"]).value)
    assert np.allclose(chi, -np.swapaxes(chi, 0, 1))
    assert np.allclose(chi, -np.swapaxes(chi, 1, 2))
    assert th @ np.linalg.inv(p.g.value) @ th == pytest.approx(-1.0, abs=1e-6)
    # theta annihilates the image of phi
    assert np.max(np.abs(th @ np.linalg.inv(p.g.value) @ ph)) < 1e-6


def test_pi7_inverts_iota7(submaximal, submaximal_points):
    phi = submaximal.fields["phi"]
    for p in submaximal_points:
        for sigma in submaximal.fields["scales"].values():
            back = pi7(p, phi, xi_iota7(p, phi, sigma))
            assert float(back.value) == pytest.approx(float(p.evaluate(sigma).value), abs=1e-6)


def test_weighted_lie_derivatives_along_iota7(submaximal, submaximal_points):
    phi = submaximal.fields["phi"]
    sigma = submaximal.fields["scales"]["cosh"]
    p = submaximal_points[1]
    xi = xi_iota7(p, phi, sigma)
    assert conformal_killing_residual(p, xi) < 1e-6
    assert float(lie_derivative_weighted(p, xi, sigma, 1).value) == pytest.approx(0.0, abs=1e-6)
    for key, residual in lie_relations(p, phi, sigma).items():
        assert residual < 1e-5, key


def test_weighted_lie_derivative_needs_conformal_killing(flat):
    p = flat.chart.at(POINT)
    x = p.u[0]
    stretch = jets.stack([x * x, 0.0, 0.0, 0.0, 0.0], p.space)
    with pytest.raises(KillingError):
        lie_derivative_weighted(p, stretch, 1.0, 1)


def test_classify_by_sign_of_scale(submaximal):
    phi = submaximal.fields["phi"]
    sigma = submaximal.fields["scales"]["sinh"]
    above = submaximal.chart.at((0.5, 0.1, 0.2, -0.3, 0.4))
    below = submaximal.chart.at((-0.5, 0.1, 0.2, -0.3, 0.4))
    assert classify_point(above, sigma, phi) == "M5+"
    assert classify_point(below, sigma, phi) == "M5-"
    assert classify_point(above, submaximal.fields["scales"]["cosh"], phi) == "M5+"

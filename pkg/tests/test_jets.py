import numpy as np
import pytest

from g2scale.chart import jets
from g2scale.chart.jets import central_difference, jeinsum, jet_space, second_difference
from g2scale.errors import ExpressionError, JetOrderError, ScalarDivisionError, SingularMetricError

POINT = (0.3, -0.2, 0.5, 0.1, 0.7)


@pytest.fixture(scope="module")
def space():
    return jet_space(4)


@pytest.fixture(scope="module")
def x(space):
    return space.variables(POINT)


def _f(x):
    return jets.exp(x[0]) * jets.sin(x[1]) + x[2] ** 2 / (1 + x[3] * x[3]) + jets.sqrt(x[4])


def _f_float(u):
    return np.exp(u[0]) * np.sin(u[1]) + u[2] ** 2 / (1 + u[3] ** 2) + np.sqrt(u[4])


def _unit(k, n=2):
    return tuple(n if i == k else 0 for i in range(5))


def test_variables_and_value(space, x):
    assert [v.value for v in x] == list(POINT)
    assert x[0].derivative(_unit(0, 1)) == 1
    assert x[0].derivative(_unit(1, 1)) == 0
    with pytest.raises(JetOrderError):
        space.variables((1, 2))


def test_elementary_identities(x):
    np.testing.assert_allclose((jets.exp(x[0]) * jets.exp(-x[0])).data, x[0].space.constant(1).data, atol=1e-12)
    np.testing.assert_allclose(jets.log(jets.exp(x[1])).data, x[1].data, atol=1e-12)
    one = jets.sin(x[2]) * jets.sin(x[2]) + jets.cos(x[2]) * jets.cos(x[2])
    np.testing.assert_allclose(one.data, x[2].space.constant(1).data, atol=1e-12)
    hyp = jets.cosh(x[3]) * jets.cosh(x[3]) - jets.sinh(x[3]) * jets.sinh(x[3])
    np.testing.assert_allclose(hyp.data, x[3].space.constant(1).data, atol=1e-12)
    np.testing.assert_allclose((x[4] ** 3).data, (x[4] * x[4] * x[4]).data, atol=1e-12)
    np.testing.assert_allclose((jets.sqrt(x[4]) * jets.sqrt(x[4])).data, x[4].data, atol=1e-12)


def test_derivatives_match_finite_differences(x):
    f = _f(x)
    for k in range(5):
        assert f.derivative(_unit(k, 1)) == pytest.approx(central_difference(_f_float, POINT, k), abs=1e-6)
    mixed = f.derivative((1, 1, 0, 0, 0))
    assert mixed == pytest.approx(second_difference(_f_float, POINT, 0, 1), abs=1e-4)
    assert f.derivative(_unit(2)) == pytest.approx(2 / (1 + POINT[3] ** 2))


def test_partial_lowers_the_order(x):
    g = x[0] * x[1]
    d = g.partial(0)
    assert d.order == g.order - 1
    np.testing.assert_allclose(d.data, x[1].truncate(d.order).data, atol=1e-12)
    assert g.grad().shape == (5,)
    with pytest.raises(JetOrderError):
        x[0].truncate(0).partial(0)
    with pytest.raises(JetOrderError):
        g.truncate(1).derivative(_unit(0))


def test_matrix_inverse(space, x):
    G = jets.stack([[1 + x[0] * x[0], x[1]], [x[1], 2 + jets.sin(x[2])]])
    product = jeinsum("ab,bc->ac", G, jets.inverse(G))
    np.testing.assert_allclose(product.data, space.constant(np.eye(2)).data, atol=1e-10)
    with pytest.raises(SingularMetricError):
        jets.inverse(jets.stack([[x[0] - POINT[0], 0.0], [0.0, 1.0]]))


def test_jeinsum_agrees_with_numpy():
    a = np.arange(6.0).reshape(2, 3)
    b = np.arange(12.0).reshape(3, 4)
    np.testing.assert_allclose(jeinsum("ab,bc->ac", a, b), a @ b)
    with pytest.raises(ExpressionError):
        jeinsum("ab,bc", a, b)
    with pytest.raises(ExpressionError):
        jeinsum("ab->ab", a, b)


def test_antisymmetrize(x):
    t = jets.stack([[x[0], x[1]], [x[2], x[3]]])
    a = jets.antisymmetrize(t)
    np.testing.assert_allclose(a.data[0, 0], 0.0)
    np.testing.assert_allclose(a.data[0, 1], (x[1] - x[2]).data / 2)
    np.testing.assert_allclose(a.data[1, 0], -a.data[0, 1])


def test_invalid_operations(x):
    with pytest.raises(ExpressionError):
        jets.log(x[1])
    with pytest.raises(ScalarDivisionError):
        x[0] / 0
    with pytest.raises(ScalarDivisionError):
        1 / (x[0] - POINT[0])
    with pytest.raises(ExpressionError):
        jets.sqrt(x[1])
    with pytest.raises(ExpressionError):
        x[0] ** x[1]
    with pytest.raises(JetOrderError):
        x[0] + jet_space(2).variables(POINT)[0]
    with pytest.raises(JetOrderError):
        jet_space(-1)

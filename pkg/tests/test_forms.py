import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2scale.errors import DegreeError, InputError, SingularMetricError
from g2scale.forms import (
    DIM, KForm, antisymmetrize, array, basis_vector, determinant, hodge_star, hook,
    inner, matrix_inverse, matrix_rank, null_space, permutation_sign, power, signature, wedge,
)
from g2scale.g2core import standard_metric, standard_volume
from g2scale.scalars import ExactScalar
from strategies import exact_forms, exact_vectors


def e(*indices):
    return KForm.basis(indices)


def test_basis_sign_and_storage():
    assert e(2, 1) == -e(1, 2)
    assert e(1, 1).is_zero()
    assert e(3, 1, 2)[1, 2, 3] == 1
    assert e(1, 2, 3)[2, 1, 3] == -1
    assert permutation_sign([2, 0, 1]) == 1
    assert permutation_sign([1, 0, 2]) == -1


def test_wedge_and_hook_on_basis():
    assert wedge(e(1), e(2)) == e(1, 2)
    assert wedge(e(2), e(1)) == -e(1, 2)
    assert wedge(e(1, 2), e(1)).is_zero()
    assert hook(basis_vector(1), e(1, 2)) == e(2)
    assert hook(basis_vector(2), e(1, 2)) == -e(1)
    assert hook(basis_vector(3), e(1, 2)).is_zero()
    assert power(e(1, 2) + e(3, 4), 2) == e(1, 2, 3, 4) * 2
    assert power(e(1, 2) + e(3, 4), 3).is_zero()


def test_wedge_degree_overflow():
    with pytest.raises(DegreeError):
        wedge(e(1, 2, 3, 4), e(5, 6, 7, 1))
    with pytest.raises(DegreeError):
        KForm(8)
    with pytest.raises(DegreeError):
        power(e(1), 0)


def test_tensor_round_trip():
    a = e(1, 2, 4) * 3 + e(2, 5, 7)
    t = a.tensor()
    assert t[0, 1, 3] == 3 and t[1, 0, 3] == -3
    assert KForm.from_tensor(t) == a
    assert antisymmetrize(t) == a


def test_json_round_trip_and_errors():
    a = e(1, 4, 7) * ExactScalar(0, 1) - e(2, 4, 5)
    assert KForm.from_json(a.to_json()) == a
    with pytest.raises(InputError):
        KForm.from_json({"terms": []})
    with pytest.raises(InputError) as info:
        KForm.from_json({"degree": 2, "terms": [{"indices": [1, 9], "coeff": "1"}]})
    assert info.value.field == "terms[0].indices"
    with pytest.raises(InputError):
        KForm.from_json({"degree": 1, "terms": [{"indices": [1], "coeff": 0.5}]})
    assert KForm.from_json({"degree": 1, "terms": [{"indices": [1], "coeff": 0.5}]}, "float")[1] == 0.5


def test_standard_metric_is_split():
    H = standard_metric()
    assert determinant(H) == 1
    assert signature(H) == (3, 4)
    assert np.all(matrix_inverse(H) == H)
    with pytest.raises(SingularMetricError):
        matrix_inverse(array(np.zeros((DIM, DIM), dtype=int).tolist()))


def test_exact_kernel():
    M = array([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert matrix_rank(M) == 2
    (k,) = null_space(M)
    assert all(x == 0 for x in np.dot(M, k))


def test_hodge_star_of_basis_forms():
    H = standard_metric()
    vol = standard_volume()
    # e4 is the only H-negative direction: e4 ^ *e4 = H(e4, e4) vol = -vol
    assert wedge(e(4), hodge_star(H, vol, e(4))) == -vol
    assert wedge(e(1), hodge_star(H, vol, e(7))) == vol
    assert hodge_star(H, vol, KForm.scalar(ExactScalar(1))) == vol


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_graded_commutativity_and_associativity(p, q, data):
    a = data.draw(exact_forms(p))
    b = data.draw(exact_forms(q))
    c = data.draw(exact_forms(data.draw(st.integers(0, DIM - p - q))))
    assert wedge(a, b) == wedge(b, a) * (-1) ** (p * q)
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), exact_vectors(), st.data())
def test_hook_is_an_antiderivation(p, q, v, data):
    a = data.draw(exact_forms(p))
    b = data.draw(exact_forms(q))
    assert hook(v, wedge(a, b)) == wedge(hook(v, a), b) + wedge(a, hook(v, b)) * (-1) ** p
    if q > 1:
        assert hook(v, hook(v, b)).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.data())
def test_hodge_star_definition(k, data):
    H = standard_metric()
    vol = standard_volume()
    a = data.draw(exact_forms(k))
    b = data.draw(exact_forms(k))
    assert wedge(b, hodge_star(H, vol, a)) == vol * inner(H, b, a)
    assert inner(H, a, b) == inner(H, b, a)

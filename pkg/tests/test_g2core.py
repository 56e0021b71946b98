from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from g2scale.errors import DegenerateFormError, DegreeError
from g2scale.forms import DIM, KForm, to_float_array
from g2scale.g2core import (
    G2Structure, contraction_residuals, cross, decompose2, decompose3, exact_contraction_identities,
    g2_algebra_test, g2_annihilator_dimension, g2_matrix, genericity_and_compatibility, i_map,
    induced_metric, iota2_7, iota3_7, pi2_7, pi2_14, pi3_1, pi3_7, pi3_27, recompose3,
    standard_metric, standard_phi, standard_volume,
)
from g2scale.scalars import ExactScalar
from strategies import exact_forms, exact_vectors


def test_standard_phi_induces_standard_metric_and_volume(G):
    assert np.all(G.h == standard_metric())
    assert G.vol == standard_volume()


def test_contraction_identities(G, G_float):
    assert exact_contraction_identities(G)
    r1, r2 = contraction_residuals(G_float)
    assert r1 < 1e-12 and r2 < 1e-12


def test_float_backend_agrees(G_float):
    np.testing.assert_allclose(G_float.h, to_float_array(standard_metric()), atol=1e-12)
    assert G_float.vol.allclose(standard_volume("float"), 1e-12)


def test_decomposition_of_phi(G):
    a, v, s = decompose3(G, G.phi)
    assert a == 1
    assert all(x == 0 for x in v)
    assert np.all(s == 0)


def test_json_round_trip(G):
    assert G2Structure.from_json(G.to_json()).phi == G.phi


def test_degenerate_forms():
    with pytest.raises(DegenerateFormError):
        induced_metric(KForm.basis((1, 2, 3)))
    report = genericity_and_compatibility(KForm.basis((1, 2, 3)), standard_metric(), standard_volume())
    assert report == {"generic": False, "metric_match": False, "orientation_match": False}
    with pytest.raises(DegreeError):
        G2Structure(KForm.basis((1, 2)))


def test_standard_phi_is_compatible_with_itself(G):
    report = genericity_and_compatibility(standard_phi(), G.h, G.vol)
    assert all(report.values())


def test_annihilator_dimensions(G):
    assert g2_annihilator_dimension(G) == 14
    for S in ((0, 0, 0, 1, 0, 0, 0), (1, 0, 0, 0, 0, 0, 0), (0, 1, 0, 0, Fraction(1, 2), 0, 0)):
        assert g2_annihilator_dimension(G, np.array([ExactScalar(x) for x in S], dtype=object)) == 8


def test_g2_matrix_pattern(G):
    params = {"A": [[1, 2], [3, -1]], "r": 2, "s": Fraction(1, 3),
              "W": [1, 0], "X": [0, 2], "Y": [-1, 1], "Z": [3, Fraction(1, 2)]}
    assert g2_algebra_test(G, g2_matrix(params))
    generic = np.array([[ExactScalar(1) if i == j == 0 else ExactScalar(0) for j in range(DIM)]
                        for i in range(DIM)], dtype=object)
    assert not g2_algebra_test(G, generic)


@settings(max_examples=40, deadline=None)
@given(exact_vectors(), exact_vectors())
def test_cross_product_is_skew(G, x, y):
    assert all(c == 0 for c in cross(G, x, x))
    assert G.pairing(cross(G, x, y), x) == 0
    assert all(c == 0 for c in cross(G, x, y) + cross(G, y, x))


@settings(max_examples=40, deadline=None)
@given(exact_vectors())
def test_seven_dimensional_pieces(G, v):
    assert np.all(pi2_7(G, iota2_7(G, v)) == v)
    assert pi2_14(G, iota2_7(G, v)).is_zero()
    assert np.all(pi3_7(G, iota3_7(G, v)) == v)
    assert pi3_1(G, iota3_7(G, v)) == 0


@settings(max_examples=40, deadline=None)
@given(exact_forms(2))
def test_two_form_split(G, A):
    v, m = decompose2(G, A)
    assert all(x == 0 for x in pi2_7(G, m))
    assert pi2_14(G, A) == m


@settings(max_examples=40, deadline=None)
@given(exact_forms(3))
def test_three_form_reconstruction(G, psi):
    assert recompose3(G, *decompose3(G, psi)) == psi


@settings(max_examples=25, deadline=None)
@given(exact_vectors(), exact_vectors())
def test_twenty_seven_dimensional_piece(G, x, y):
    s = np.multiply.outer(x, y)
    s = (s + s.T) * Fraction(1, 2)
    trace = sum(np.dot(G.h_inv, s)[i, i] for i in range(DIM))
    s = s - G.h * (trace * Fraction(1, DIM))
    assert np.all(pi3_27(G, i_map(G, s)) == s)
    assert pi3_1(G, i_map(G, s)) == 0

import math
from fractions import Fraction

import numpy as np
import pytest

from g2scale.errors import ClassificationError, ConstraintError, InputError, NormalizationError
from g2scale.forms import array, basis_vector, span_rank
from g2scale.g2core import genericity_and_compatibility
from g2scale.stabilizer import (
    ALLOWED_LABELS, FamilyParam, K_of_member, antipodal_test, classify_ray, derivative_at_zero,
    epsilon_volume_and_reconstruct, family_member, isotropic_cone_sweep, isotropic_filtration,
    limiting_planes, make_stabilizer, null_complementary_residual, rational_conic_points,
    recover_scale, stabilizer_dimension, stabilizer_residuals,
)

WITNESSES = {
    -1: (0, 1, 0, 0, Fraction(1, 2), 0, 0),
    0: (1, 0, 0, 0, 0, 0, 0),
    1: (0, 0, 0, 1, 0, 0, 0),
}
VARIANT = {-1: "circle", 0: "parabolic", 1: "hyperbolic"}


def E(i):
    return basis_vector(i)


@pytest.fixture(scope="module", params=[-1, 0, 1])
def witness(request, G):
    eps = request.param
    return eps, make_stabilizer(G, WITNESSES[eps])


def test_causality_type(witness):
    eps, SD = witness
    assert SD.eps == eps


def test_defining_identities(G, witness):
    _, SD = witness
    assert all(r == 0 for r in stabilizer_residuals(G, SD).values())
    assert stabilizer_dimension(G, SD) == 8


def test_unnormalized_s_is_rejected(G):
    with pytest.raises(NormalizationError):
        make_stabilizer(G, E(4) * 2)
    with pytest.raises(NormalizationError):
        make_stabilizer(G, E(4) * 0)


def test_family_members_are_compatible(G, witness):
    eps, SD = witness
    for param in rational_conic_points(eps, 6):
        member = family_member(SD, G, param)
        assert all(genericity_and_compatibility(member, G.h, G.vol).values())
        assert K_of_member(SD.S, member) == SD.K_form
    assert derivative_at_zero(SD, G, VARIANT[eps]) == SD.phi_J


def test_recovery_round_trip(G, witness):
    eps, SD = witness
    for param in rational_conic_points(eps, 8):
        member = family_member(SD, G, param)
        result = recover_scale(G, member)
        assert result.eps == eps
        assert result.residual == 0
        if eps == 0:
            # the null ray is recovered, rescaled by the parabolic parameter
            assert span_rank([result.S, SD.S]) == 1
        else:
            assert all(x == 0 for x in result.S - SD.S) or all(x == 0 for x in result.S + SD.S)
        regenerated = family_member(make_stabilizer(G, result.S), G, FamilyParam.raw(result.abar, result.b))
        assert regenerated == member
        if eps == 0:
            assert not antipodal_test(G, G.phi, member)


@pytest.mark.parametrize("eps,param", [
    (-1, FamilyParam.circle(-1, 0)),
    (1, FamilyParam.hyperbolic("+", 1, 0)),
])
def test_antipodal_branch(G, eps, param):
    SD = make_stabilizer(G, WITNESSES[eps])
    member = family_member(SD, G, param)
    result = recover_scale(G, member)
    assert result.branch == "antipodal"
    assert result.eps == eps
    assert result.residual == 0


def test_float_recovery_up_to_sign(G_float):
    SD = make_stabilizer(G_float, WITNESSES[1])
    member = family_member(SD, G_float, FamilyParam.from_parameter("-", 0.7))
    result = recover_scale(G_float, member)
    assert result.eps == 1
    cosh, sinh = result.param.values
    assert cosh == pytest.approx(math.cosh(0.7))
    assert abs(sinh) == pytest.approx(math.sinh(0.7))
    assert result.residual < 1e-8


def test_family_constraints():
    with pytest.raises(ConstraintError):
        FamilyParam.circle(1, 1).check(-1)
    with pytest.raises(ConstraintError):
        FamilyParam.circle(Fraction(3, 5), Fraction(4, 5)).check(1)
    with pytest.raises(ConstraintError):
        FamilyParam.hyperbolic("-", -1, 0).check(1)
    with pytest.raises(InputError):
        FamilyParam.hyperbolic("?", 1, 0)
    with pytest.raises(InputError):
        rational_conic_points(2, 3)
    FamilyParam.raw(Fraction(-1, 2), 1).check(0)
    assert FamilyParam.hyperbolic("+", 2, 3).to_raw(1) == (3, 3)


def test_null_complementary_identity(G):
    SD = make_stabilizer(G, WITNESSES[0])
    assert null_complementary_residual(SD, G, Fraction(-5, 3)) == 0


def test_isotropic_filtration(G):
    report = isotropic_filtration(make_stabilizer(G, WITNESSES[0]))
    assert report["dims"] == [7, 6, 4, 3, 1, 0]
    assert all(report["contained"].values())
    with pytest.raises(ClassificationError):
        isotropic_filtration(make_stabilizer(G, WITNESSES[1]))


def test_limiting_planes_split_the_complement(G):
    SD = make_stabilizer(G, WITNESSES[1])
    planes = limiting_planes(SD)
    assert len(planes["minus"]) + len(planes["plus"]) == 6
    for label, lam in (("minus", -1), ("plus", 1)):
        for w in planes[label]:
            assert all(x == 0 for x in np.dot(SD.K, w) - w * lam)
    with pytest.raises(ClassificationError):
        limiting_planes(make_stabilizer(G, WITNESSES[-1]))


def test_epsilon_volume_forms(G):
    SD = make_stabilizer(G, WITNESSES[-1])
    _, phi = epsilon_volume_and_reconstruct(SD, 1, 0)
    assert phi == G.phi
    with pytest.raises(ConstraintError):
        epsilon_volume_and_reconstruct(SD, 1, 1)
    with pytest.raises(ConstraintError):
        epsilon_volume_and_reconstruct(make_stabilizer(G, WITNESSES[0]), 1, 0)


@pytest.mark.parametrize("S,X,label", [
    (E(1), E(1), "M0+"),
    (E(1), -E(1), "M0-"),
    (E(1), E(7), "M5+"),
    (E(1), -E(7), "M5-"),
    (E(4), E(1), "M2-"),
    (E(4), E(7), "M2+"),
    (E(4), E(1) + E(2), "M4"),
])
def test_classify_ray(G, S, X, label):
    assert classify_ray(G, S, X) == label


def test_classify_ray_rejects_bad_input(G):
    with pytest.raises(ClassificationError):
        classify_ray(G, E(4), E(4))
    with pytest.raises(ClassificationError):
        classify_ray(G, E(4), E(1) * 0)
    with pytest.raises(ClassificationError):
        classify_ray(G, E(1), E(7), extra={"sigma_sign": -1})


def test_cone_sweep_stays_in_allowed_labels(G, witness):
    eps, SD = witness
    tally = isotropic_cone_sweep(G, SD.S, 200, seed=3)
    assert sum(tally.values()) == 200
    assert set(tally) <= ALLOWED_LABELS[eps]


@pytest.mark.slow
@pytest.mark.parametrize("eps", [-1, 0, 1])
def test_cone_sweep_reaches_every_orbit(G, eps):
    tally = isotropic_cone_sweep(G, array(list(WITNESSES[eps])), 4000, seed=11)
    assert set(tally) == ALLOWED_LABELS[eps]

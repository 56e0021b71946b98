"""Data attached to a fixed tractor S: K, the stabilized 3-forms and their families.

Includes the family of compatible structures with its circle, hyperbolic and
parabolic parameterizations, the ε-complex volume forms, recovery of S and the
family parameters from a second structure, and the ray classifier of the
flat model.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    ClassificationError, ConstraintError, InputError, NormalizationError,
    RecoveryError,
)
from .forms import (
    DIM, KForm, array, basis_vector, identity, matrix_rank, null_space,
    outer, power, span_rank, to_float_array, wedge, hook, zeros,
)
from .g2core import (
    G2Structure, cross, g2_annihilator_dimension,
    genericity_and_compatibility, pi3_1, pi3_7, pi3_27,
)
from .klog import klogger
from .scalars import ExactScalar, is_zero, lift, scalar_sqrt, sign_of

ORBIT_LABELS = ("M5+", "M5-", "M4", "M2+", "M2-", "M2", "M0+", "M0-")

# labels that occur for each causality type
ALLOWED_LABELS = {
    -1: frozenset({"M5+", "M5-", "M4"}),
    0: frozenset({"M5+", "M5-", "M4", "M2", "M0+", "M0-"}),
    1: frozenset({"M5+", "M5-", "M4", "M2+", "M2-"}),
}


def _half(backend):
    return Fraction(1, 2) if backend == "exact" else 0.5


def _max_abs(values) -> float:
    arr = to_float_array(np.asarray(values))
    return float(np.max(np.abs(arr))) if arr.size else 0.0


@dataclass(frozen=True, eq=False)
class StabilizerData:
    S: np.ndarray
    eps: int
    K: np.ndarray
    phi_I: KForm
    phi_J: KForm
    phi_K: KForm
    W_basis: list
    S_flat: np.ndarray
    K_form: KForm

    @property
    def backend(self) -> str:
        return self.phi_I.backend


def _w_basis(S_flat, backend):
    pivot = next(i for i in range(DIM) if not is_zero(S_flat[i]))
    inv_p = ExactScalar.coerce(S_flat[pivot]).inv() if backend == "exact" else 1.0 / S_flat[pivot]
    basis = []
    for j in range(DIM):
        if j == pivot:
            continue
        v = basis_vector(j + 1, backend)
        v[pivot] = -S_flat[j] * inv_p
        basis.append(v)
    return basis


def make_stabilizer(G: G2Structure, S, tol: float = 1e-10) -> StabilizerData:
    backend = G.backend
    S = array(list(S), backend)
    if all(is_zero(x, tol) for x in S):
        raise NormalizationError("S must be nonzero")
    norm = G.pairing(S, S)
    eps = -sign_of(norm, tol)
    if not is_zero(norm + eps, tol):
        raise NormalizationError(
            "H(S, S) = {} is not in {{-1, 0, +1}}; rescale S by 1/sqrt(|H(S, S)|)".format(norm))
    S_flat = G.lower(S)
    # K^A_B = -S^C Phi_C^A_B, i.e. K(x) = S × x
    K = np.tensordot(S, G.phi_mixed.transpose(1, 0, 2), axes=([0], [0]))
    S_flat_form = KForm(1, S_flat)
    S_hook = hook(S, G.phi)
    phi_I = hook(S, wedge(S_flat_form, G.phi))
    phi_J = hook(S, G.star_phi)
    phi_K = wedge(S_flat_form, S_hook)
    klogger.debug("stabilizer built: eps=%s", eps)
    return StabilizerData(S=S, eps=eps, K=K, phi_I=phi_I, phi_J=phi_J, phi_K=phi_K,
                          W_basis=_w_basis(S_flat, backend), S_flat=S_flat, K_form=-S_hook)


def stabilizer_residuals(G: G2Structure, SD: StabilizerData) -> dict:
    """Deviation of each defining identity of ``SD``; all zero in the exact backend."""
    backend = SD.backend
    S = SD.S
    K2 = np.dot(SD.K, SD.K)
    target = identity(backend) * lift(SD.eps, backend) + outer(S, SD.S_flat)
    image_perp = np.dot(SD.S_flat, SD.K)
    norm = G.pairing(S, S)
    sum_IK = SD.phi_I + SD.phi_K - G.phi * norm
    return {
        "K_squared": _max_abs(K2 - target),
        "image_in_W": _max_abs(image_perp),
        "phi_I_plus_phi_K": _max_abs(sum_IK.values),
        "S_hook_phi_I": _max_abs(hook(S, SD.phi_I).values),
        "S_hook_phi_J": _max_abs(hook(S, SD.phi_J).values),
        "S_hook_phi_K": _max_abs((hook(S, SD.phi_K) - hook(S, G.phi) * norm).values),
    }


def isotropic_filtration(SD: StabilizerData, tol: float = 1e-9) -> dict:
    """Dimensions of V ⊃ W ⊃ im K ⊃ ker K ⊃ <S> ⊃ 0 together with containment checks."""
    if SD.eps != 0:
        raise ClassificationError("the isotropic filtration needs an isotropic S")
    K = SD.K
    rank_K = matrix_rank(K, tol)
    image = [K[:, j] for j in range(DIM)]
    kernel = null_space(K, tol)
    dims = [DIM, len(SD.W_basis), rank_K, len(kernel), 1, 0]
    contained = {
        "S_in_ker": span_rank(kernel + [SD.S], tol) == len(kernel),
        "ker_in_im": span_rank(image + kernel, tol) == rank_K,
        "im_in_W": _max_abs(np.dot(SD.S_flat, K)) <= tol,
    }
    return {"dims": dims, "contained": contained}


def limiting_planes(SD: StabilizerData, tol: float = 1e-9) -> dict:
    """Limits of the family: eigenplanes of K on W (eps=+1) or -phi_I (eps=0)."""
    backend = SD.backend
    if SD.eps == 1:
        out = {}
        W = np.array([list(w) for w in SD.W_basis], dtype=SD.S.dtype).T
        for label, lam in (("minus", -1), ("plus", 1)):
            shifted = SD.K - identity(backend) * lift(lam, backend)
            # K w = lam w for w = W c
            coeffs = null_space(np.dot(shifted, W), tol)
            out[label] = [np.dot(W, c) for c in coeffs]
        return out
    if SD.eps == 0:
        return {"null_complementary": -SD.phi_I}
    raise ClassificationError("the family has no limiting planes for eps = -1")


@dataclass(frozen=True)
class FamilyParam:
    """One point of the family through Phi, in one of four parameterizations."""

    variant: str
    values: tuple
    branch: str = ""

    VARIANTS = ("raw", "circle", "hyperbolic", "parabolic")

    @classmethod
    def raw(cls, abar, b) -> FamilyParam:
        return cls("raw", (abar, b))

    @classmethod
    def circle(cls, cos, sin) -> FamilyParam:
        return cls("circle", (cos, sin))

    @classmethod
    def hyperbolic(cls, branch: str, cosh, sinh) -> FamilyParam:
        if branch not in ("-", "+"):
            raise InputError("hyperbolic branch must be '-' or '+'", "branch")
        return cls("hyperbolic", (cosh, sinh), branch)

    @classmethod
    def parabolic(cls, s) -> FamilyParam:
        return cls("parabolic", (s,))

    @classmethod
    def from_angle(cls, upsilon: float) -> FamilyParam:
        return cls.circle(math.cos(upsilon), math.sin(upsilon))

    @classmethod
    def from_parameter(cls, branch: str, t: float) -> FamilyParam:
        return cls.hyperbolic(branch, math.cosh(t), math.sinh(t))

    def required_eps(self) -> int | None:
        return {"circle": -1, "hyperbolic": 1, "parabolic": 0}.get(self.variant)

    def lifted(self, backend: str) -> FamilyParam:
        return FamilyParam(self.variant, tuple(lift(v, backend) for v in self.values), self.branch)

    def to_raw(self, eps: int) -> tuple:
        """(Abar, B) with Phi' = Phi + Abar Phi_I + B Phi_J."""
        need = self.required_eps()
        if need is not None and need != eps:
            raise ConstraintError("{} parameterization needs eps = {}, got {}".format(self.variant, need, eps))
        if self.variant == "raw":
            return self.values
        if self.variant == "circle":
            c, s = self.values
            return c - 1, s
        if self.variant == "hyperbolic":
            c, s = self.values
            return (1 - c, s) if self.branch == "-" else (1 + c, s)
        s = self.values[0]
        return -(s * s) * _half("exact" if not isinstance(s, float) else "float"), s

    def check(self, eps: int, tol: float = 1e-10) -> None:
        if self.variant == "raw":
            abar, b = self.values
            gap = -eps * abar * abar + 2 * abar + b * b
        elif self.variant == "circle":
            c, s = self.values
            gap = c * c + s * s - 1
        elif self.variant == "hyperbolic":
            c, s = self.values
            gap = c * c - s * s - 1
            if sign_of(c, tol) <= 0:
                raise ConstraintError("cosh must be positive")
        else:
            gap = 0
        if not is_zero(gap, tol):
            raise ConstraintError("{} parameters violate their constraint (gap {})".format(self.variant, gap))
        self.to_raw(eps)

    def to_json(self) -> dict:
        def text(v):
            return str(v) if isinstance(v, ExactScalar) else v
        keys = {"raw": ("abar", "b"), "circle": ("cos", "sin"),
                "hyperbolic": ("cosh", "sinh"), "parabolic": ("s",)}[self.variant]
        out = {"variant": self.variant}
        out.update({k: text(v) for k, v in zip(keys, self.values)})
        if self.branch:
            out["branch"] = self.branch
        return out


def family_member(SD: StabilizerData, G: G2Structure, p: FamilyParam, tol: float = 1e-10) -> KForm:
    backend = SD.backend
    p = p.lifted(backend)
    p.check(SD.eps, tol)
    if p.variant == "raw":
        abar, b = p.values
        return G.phi + SD.phi_I * abar + SD.phi_J * b
    if p.variant == "circle":
        c, s = p.values
        return SD.phi_I * c + SD.phi_J * s + SD.phi_K
    if p.variant == "hyperbolic":
        c, s = p.values
        sign = -1 if p.branch == "-" else 1
        return SD.phi_I * (c * sign) + SD.phi_J * s - SD.phi_K
    s = p.values[0]
    return G.phi - SD.phi_I * (s * s * _half(backend)) + SD.phi_J * s


def derivative(SD: StabilizerData, variant: str, param=0, branch: str = "-") -> KForm:
    """d/du of the closed-form parameterization at ``u = param``."""
    backend = SD.backend
    if variant == "circle":
        u = float(param)
        if backend == "exact" and param == 0:
            return SD.phi_J * 1
        return SD.phi_I.to_float() * (-math.sin(u)) + SD.phi_J.to_float() * math.cos(u)
    if variant == "hyperbolic":
        u = float(param)
        sign = -1 if branch == "-" else 1
        if backend == "exact" and param == 0:
            return SD.phi_J * 1
        return SD.phi_I.to_float() * (sign * math.sinh(u)) + SD.phi_J.to_float() * math.cosh(u)
    if variant == "parabolic":
        s = lift(param, backend)
        return SD.phi_J - SD.phi_I * s
    raise InputError("unknown parameterization {!r}".format(variant), "variant")


def derivative_at_zero(SD: StabilizerData, G: G2Structure, variant: str) -> KForm:
    return derivative(SD, variant, 0)


def null_complementary_residual(SD: StabilizerData, G: G2Structure, s) -> float:
    """Phi_s - Phi + (s^2/2) Phi_I - s Phi_J; identically zero."""
    member = family_member(SD, G, FamilyParam.parabolic(s))
    s = lift(s, SD.backend)
    rest = member - G.phi + SD.phi_I * (s * s * _half(SD.backend)) - SD.phi_J * s
    return _max_abs(rest.values)


def K_of_member(S, phi_prime: KForm) -> KForm:
    """The lowered 2-form -S⌟Phi' (independent of the family member)."""
    return -hook(S, phi_prime)


def rational_conic_points(eps: int, n: int) -> list:
    """``n`` distinct exact family parameters, none equal to Phi itself."""
    slopes = []
    q = 2
    while len(slopes) < 4 * n + 8:
        for p in range(-q + 1, q):
            m = Fraction(p, q)
            if m != 0 and m not in slopes:
                slopes.append(m)
        q += 1
    out = []
    if eps == -1:
        for m in slopes:
            d = 1 + m * m
            out.append(FamilyParam.circle((1 - m * m) / d, 2 * m / d))
    elif eps == 1:
        for m in slopes:
            if abs(m) >= 1:
                continue
            d = 1 - m * m
            c, s = (1 + m * m) / d, 2 * m / d
            out.append(FamilyParam.hyperbolic("-", c, s))
            out.append(FamilyParam.hyperbolic("+", c, s))
    elif eps == 0:
        out = [FamilyParam.parabolic(m) for m in slopes]
    else:
        raise InputError("eps must be -1, 0 or +1", "eps")
    return out[:n]


@dataclass(frozen=True, eq=False)
class EpsVolumeForm:
    re: KForm
    im: KForm
    eps: int

    def restricted(self, form: KForm, W_basis) -> object:
        """Value of a 6-form on the ordered basis of W."""
        value = form
        for w in W_basis:
            value = hook(w, value)
        return value.values[0]

    def normalization_residual(self, SD: StabilizerData) -> float:
        # Psi ∧ conj(Psi) = -2 i_eps re∧im must equal -(4/3) i_eps K∧K∧K on W
        backend = SD.backend
        lhs = self.restricted(wedge(self.re, self.im), SD.W_basis)
        kkk = power(SD.K_form, 3)
        rhs = self.restricted(kkk, SD.W_basis) * (Fraction(2, 3) if backend == "exact" else 2.0 / 3.0)
        return abs(float(lhs - rhs))


def epsilon_volume_and_reconstruct(SD: StabilizerData, A, B, tol: float = 1e-10):
    backend = SD.backend
    if SD.eps == 0:
        raise ConstraintError("ε-complex volume forms need eps = ±1")
    A, B = lift(A, backend), lift(B, backend)
    if not is_zero(A * A - B * B * SD.eps - 1, tol):
        raise ConstraintError("A^2 - eps B^2 must equal 1")
    re = SD.phi_I * A + SD.phi_J * (B * SD.eps)
    im = SD.phi_I * B + SD.phi_J * A
    psi = EpsVolumeForm(re=re, im=im, eps=SD.eps)
    phi_rec = re + wedge(KForm(1, SD.S_flat), SD.K_form) * SD.eps
    return psi, phi_rec


def antipodal_test(G: G2Structure, phi_a: KForm, phi_b: KForm, tol: float = 1e-10) -> bool:
    same = phi_a.allclose(phi_b, tol) if phi_a.backend == "float" else phi_a == phi_b
    if same:
        return False
    return wedge(phi_a, phi_b).is_zero(tol)


@dataclass
class RecoveryResult:
    eps: int
    S: np.ndarray
    abar: object
    b: object
    branch: str
    param: FamilyParam
    residual: float = 0.0
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def text(v):
            return str(v) if isinstance(v, ExactScalar) else float(v)
        return {
            "eps": self.eps,
            "S": [text(x) for x in self.S],
            "abar": text(self.abar),
            "b": text(self.b),
            "branch": self.branch,
            "param": self.param.to_json(),
            "residual": self.residual,
            "details": self.details,
        }


def _exact_or_float_sqrt(x, what: str):
    root = scalar_sqrt(x)
    if root is None:
        raise RecoveryError("{} has no exact square root; use the float backend".format(what))
    return root


def _inv(x, backend):
    return ExactScalar.coerce(x).inv() if backend == "exact" else 1.0 / x


def _rank_one_root(M, backend, tol):
    """(sign, v) with M = sign * v ⊗ v."""
    diag = next((i for i in range(DIM) if not is_zero(M[i, i], tol)), None)
    if diag is None:
        raise RecoveryError("pi3_27(Phi') + H/7 is not a rank-one square")
    sign = sign_of(M[diag, diag], tol)
    root = _exact_or_float_sqrt(M[diag, diag] * sign, "a diagonal entry of the T = 0 quadric")
    v = M[diag] * (_inv(root, backend) * sign)
    return sign, v


def recover_scale(G: G2Structure, phi_prime: KForm, causal_rel: float = 1e-9,
                  causal_abs: float = 1e-6, tol: float = 1e-8) -> RecoveryResult:
    """Recover eps, S and the family parameters from a compatible Phi'."""
    backend = G.backend
    exact = backend == "exact"
    report = genericity_and_compatibility(phi_prime, G.h, G.vol, tol)
    if not (report["generic"] and report["metric_match"] and report["orientation_match"]):
        raise RecoveryError("Phi' is not compatible with (H, vol): {}".format(report))
    T = pi3_7(G, phi_prime)
    a1 = pi3_1(G, phi_prime)
    HTT = G.pairing(T, T)
    T_norm2 = float(np.dot(to_float_array(T), to_float_array(T)))
    if exact:
        T_zero = all(x == 0 for x in T)
        causal = 0 if T_zero else sign_of(HTT)
    else:
        T_zero = math.sqrt(T_norm2) <= causal_abs
        causal = 0 if abs(HTT) <= causal_rel * max(T_norm2, 1.0) else (1 if HTT > 0 else -1)
    seven_fourths = Fraction(7, 4) if exact else 1.75
    if not T_zero and causal < 0:
        eps = 1
        b = _exact_or_float_sqrt(-HTT, "-H(T, T)")
        S = T * (-_inv(b, backend))
        abar = (1 - a1) * seven_fourths
        branch = "-" if sign_of(a1, tol) > 0 else "+"
        c = 1 - abar if branch == "-" else abar - 1
        param = FamilyParam.hyperbolic(branch, c, b)
        case = "timelike"
    elif not T_zero and causal > 0:
        eps = -1
        b = _exact_or_float_sqrt(HTT, "H(T, T)")
        S = T * (-_inv(b, backend))
        abar = (a1 - 1) * seven_fourths
        param = FamilyParam.circle(1 + abar, b)
        branch = ""
        case = "spacelike"
    elif not T_zero:
        eps = 0
        b = lift(1, backend)
        S = -T
        abar = -lift(1, backend) * _half(backend)
        param = FamilyParam.parabolic(b)
        branch = ""
        case = "null"
    else:
        identical = phi_prime == G.phi if exact else phi_prime.allclose(G.phi, tol)
        if identical:
            raise RecoveryError("Phi' is identical to Phi", residual=0.0, branch="identical")
        M = pi3_27(G, phi_prime) + G.h * (Fraction(1, 7) if exact else 1.0 / 7.0)
        sign, S_flat = _rank_one_root(M, backend, tol)
        S = G.raise_(S_flat)
        b = lift(0, backend)
        if sign > 0:
            eps, abar, branch = -1, lift(-2, backend), ""
            param = FamilyParam.circle(lift(-1, backend), b)
        else:
            eps, abar, branch = 1, lift(2, backend), "+"
            param = FamilyParam.hyperbolic("+", lift(1, backend), b)
        case = "antipodal"
    klogger.debug("recover_scale: case=%s eps=%s", case, eps)
    try:
        SD = make_stabilizer(G, S, tol)
    except NormalizationError as exc:
        raise RecoveryError("recovered S is not normalized: {}".format(exc), branch=case) from None
    if SD.eps != eps:
        raise RecoveryError("recovered S has eps {} instead of {}".format(SD.eps, eps), branch=case)
    regenerated = G.phi + SD.phi_I * abar + SD.phi_J * b
    residual = _max_abs((regenerated - phi_prime).values)
    mismatch = not (regenerated == phi_prime) if exact else residual > tol
    if mismatch:
        raise RecoveryError("Phi' is not in a family through Phi", residual=residual, branch=case)
    return RecoveryResult(eps=eps, S=S, abar=abar, b=b, branch=case, param=param, residual=residual,
                          details={"pi3_1": str(a1) if exact else float(a1),
                                   "H_TT": str(HTT) if exact else float(HTT),
                                   "hyperbolic_branch": branch})


def _parallel_factor(u, v, tol):
    """c with u = c v, or None."""
    pivot = next((i for i in range(DIM) if not is_zero(v[i], tol)), None)
    if pivot is None:
        return None
    c = u[pivot] * _inv(v[pivot], "exact" if np.asarray(v).dtype == object else "float")
    diff = u - v * c
    return c if all(is_zero(x, tol) for x in diff) else None


def classify_ray(G: G2Structure, S, X, extra: dict | None = None, tol: float = 1e-10) -> str:
    """Curved-orbit label of the ray through the isotropic ``X`` relative to ``S``."""
    backend = G.backend
    S = array(list(S), backend)
    X = array(list(X), backend)
    if all(is_zero(x, tol) for x in X):
        raise ClassificationError("X must be nonzero")
    scale = max(1.0, _max_abs(X) ** 2)
    if not is_zero(G.pairing(X, X), tol * scale):
        raise ClassificationError("X is not isotropic")
    hxs = G.pairing(X, S)
    label = None
    side = sign_of(hxs, tol * scale)
    if side > 0:
        label = "M5+"
    elif side < 0:
        label = "M5-"
    else:
        Y = cross(G, X, S)
        if all(is_zero(y, tol * scale) for y in Y):
            c = _parallel_factor(S, X, tol)
            if c is None:
                label = "M2"
            elif sign_of(c, tol) > 0:
                label = "M0+"
            elif sign_of(c, tol) < 0:
                label = "M0-"
        else:
            c = _parallel_factor(Y, X, tol)
            if c is None:
                label = "M4"
            elif is_zero(c - 1, tol):
                label = "M2+"
            elif is_zero(c + 1, tol):
                label = "M2-"
    if label is None:
        raise ClassificationError("no orbit condition holds for X = {}".format(list(X)))
    if extra:
        _check_tangent_side(label, extra)
    return label


def _check_tangent_side(label: str, extra: dict) -> None:
    sigma = extra.get("sigma_sign")
    if sigma is not None:
        expected = {"M5+": 1, "M5-": -1}.get(label, 0)
        if sigma != expected:
            raise ClassificationError("tangent data sign(sigma)={} contradicts {}".format(sigma, label))
    if label in ("M0+", "M0-"):
        if extra.get("nabla_sigma_zero") is False:
            raise ClassificationError("{} needs grad sigma = 0".format(label))
        lap = extra.get("laplacian_sign")
        if lap is not None and lap != (-1 if label == "M0+" else 1):
            raise ClassificationError("{} needs the opposite sign of the Laplacian".format(label))


def random_isotropic(rng: random.Random, backend: str = "exact", size: int = 6):
    """A random nonzero isotropic vector with small rational entries."""
    while True:
        x = [Fraction(rng.randint(-size, size), rng.randint(1, size)) for _ in range(6)]
        if x[0] == 0:
            continue
        x7 = (x[3] * x[3] - 2 * x[1] * x[4] - 2 * x[2] * x[5]) / (2 * x[0])
        return array(x + [x7], backend)


def isotropic_cone_sweep(G: G2Structure, S, count: int, seed: int = 0) -> dict:
    """Classify ``count`` random isotropic rays and tally the labels."""
    rng = random.Random(seed)
    tally = {}
    for _ in range(count):
        X = random_isotropic(rng, G.backend)
        if rng.random() < 0.05:
            # mix in rays from the lower-dimensional orbits
            special = _special_ray(G, S, rng)
            if special is not None:
                X = special
        label = classify_ray(G, S, X)
        tally[label] = tally.get(label, 0) + 1
    return tally


def _special_ray(G: G2Structure, S, rng: random.Random):
    """An isotropic X on one of the lower-dimensional orbits, if any exists."""
    backend = G.backend
    S = array(list(S), backend)
    if rng.random() < 0.5:
        return _null_in_complement(G, S, rng)
    eps = -sign_of(G.pairing(S, S))
    if eps == 0:
        if rng.random() < 0.5:
            return S * (1 if rng.random() < 0.5 else -1)
        SD = make_stabilizer(G, S)
        kernel = null_space(SD.K)
        for v in kernel:
            if not is_zero(G.pairing(v, v), 1e-9) or _parallel_factor(v, S, 1e-9) is not None:
                continue
            return v
        return None
    if eps == 1:
        SD = make_stabilizer(G, S)
        planes = limiting_planes(SD)
        plane = planes["plus" if rng.random() < 0.5 else "minus"]
        coeffs = [rng.randint(-3, 3) for _ in plane]
        v = sum((p * c for p, c in zip(plane, coeffs)), zeros(DIM, backend))
        return v if not all(is_zero(x, 1e-9) for x in v) else plane[0]
    return None


def _null_in_complement(G: G2Structure, S, rng: random.Random):
    """A random isotropic X with H(X, S) = 0, exact when S is."""
    backend = G.backend
    nulls = [i for i in range(1, DIM + 1) if is_zero(G.h[i - 1, i - 1])]
    N = None
    for i in nulls:
        for j in nulls:
            if j <= i or not is_zero(G.h[i - 1, j - 1]):
                continue
            ei, ej = basis_vector(i, backend), basis_vector(j, backend)
            candidate = ei * G.pairing(ej, S) - ej * G.pairing(ei, S)
            if all(is_zero(x) for x in candidate):
                candidate = ei
            N = candidate
            break
        if N is not None:
            break
    T = next(e for e in (basis_vector(k, backend) for k in range(1, DIM + 1)) if not is_zero(G.pairing(e, S)))
    for _ in range(32):
        w = array([Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(DIM)], backend)
        w = w - T * (G.pairing(w, S) * _inv(G.pairing(T, S), backend))
        c = G.pairing(N, w)
        if is_zero(c):
            continue
        X = w - N * (G.pairing(w, w) * _inv(c * 2, backend))
        if not all(is_zero(x) for x in X):
            return X
    return None


def stabilizer_dimension(G: G2Structure, SD: StabilizerData) -> int:
    return g2_annihilator_dimension(G, SD.S)


"""Split G2 structures on the fiber: metric, volume, cross product, decompositions."""
from __future__ import annotations

import functools
import itertools
import math
from fractions import Fraction

import numpy as np

from .errors import DegenerateFormError, DegreeError, NormalizationError
from .forms import (
    DIM, KForm, antisymmetrize, array, basis_vector, determinant, hodge_star,
    hook, matrix_inverse, matrix_rank, permutation_sign, raise_lower,
    signature, to_float_array, wedge, zeros,
)
from .klog import klogger
from .scalars import ExactScalar, is_zero, lift, rational_root, sign_of, sqrt2

STANDARD_TERMS = ((-1, (1, 4, 7)), ("sqrt2", (1, 5, 6)), ("sqrt2", (2, 3, 7)),
                  (1, (2, 4, 5)), (1, (3, 4, 6)))


def standard_phi(backend: str = "exact") -> KForm:
    """-e147 + sqrt2 e156 + sqrt2 e237 + e245 + e346."""
    terms = [(sqrt2(backend) if c == "sqrt2" else c, idx) for c, idx in STANDARD_TERMS]
    return KForm.from_terms(3, terms, backend)


def standard_metric(backend: str = "exact"):
    H = zeros((DIM, DIM), backend)
    for i, j in ((0, 6), (1, 4), (2, 5)):
        H[i, j] = H[j, i] = lift(1, backend)
    H[3, 3] = lift(-1, backend)
    return H


def standard_volume(backend: str = "exact") -> KForm:
    return KForm.basis(range(1, 8), -1, backend)


def bracket(t, axes):
    """Antisymmetrize ``t`` over ``axes`` with weight 1/k!."""
    t = np.asarray(t)
    axes = list(axes)
    k = len(axes)
    total = None
    for perm in itertools.permutations(range(k)):
        order = list(range(t.ndim))
        for src, dst in zip(axes, perm):
            order[src] = axes[dst]
        term = np.transpose(t, order) * permutation_sign(perm)
        total = term if total is None else total + term
    if t.dtype == object:
        return total * Fraction(1, math.factorial(k))
    return total / math.factorial(k)


def hitchin_form(phi: KForm, vol_ref: KForm | None = None):
    """B(x, y) = (x⌟φ)∧(y⌟φ)∧φ as a matrix, trivialized by ``vol_ref``.

    Without ``vol_ref`` the entries are the coefficients on e^{1..7}.
    """
    if phi.degree != 3:
        raise DegreeError("the Hitchin form needs a 3-form")
    backend = phi.backend
    hooks = [hook(basis_vector(i, backend), phi) for i in range(1, DIM + 1)]
    B = zeros((DIM, DIM), backend)
    for i in range(DIM):
        for j in range(i, DIM):
            B[i, j] = B[j, i] = wedge(wedge(hooks[i], hooks[j]), phi).values[0]
    if vol_ref is not None:
        nu = vol_ref.values[0]
        if is_zero(nu):
            raise DegenerateFormError("zero reference volume")
        B = B * (ExactScalar.coerce(nu).inv() if backend == "exact" else 1.0 / nu)
    return B


def _cross_tensor(phi_t, h_inv):
    # C[c, a, b] = H^{cd} phi_{abd}
    return np.moveaxis(raise_lower(h_inv, phi_t, [2]), 2, 0)


def trace_metric(phi: KForm, h):
    """-(1/6) tr(z -> x × (y × z)) with the cross product raised by ``h``."""
    C = _cross_tensor(phi.tensor(), matrix_inverse(h))
    T = np.tensordot(C, C, axes=([0, 2], [2, 0]))
    return T * (Fraction(-1, 6) if phi.backend == "exact" else -1.0 / 6.0)


def _exact_ninth_root(q):
    q = ExactScalar.coerce(q)
    if not q.is_rational():
        raise NormalizationError("Hitchin determinant {} is irrational; use the float backend".format(q))
    r = rational_root(abs(q.rat_part), 9)
    if r is None:
        raise NormalizationError("no exact ninth root of {}; use the float backend".format(q))
    return ExactScalar(r if q.rat_part > 0 else -r)


def induced_metric(phi: KForm, tol: float = 1e-10):
    """The metric H_phi, normalized so the standard form gives its standard matrix."""
    backend = phi.backend
    b = hitchin_form(phi)
    det_b = determinant(b)
    if is_zero(det_b, tol):
        raise DegenerateFormError("Hitchin determinant vanishes")
    if backend == "exact":
        c = _exact_ninth_root(det_b * Fraction(1, 6 ** 7))
        h = b * (c * 6).inv()
    else:
        q = det_b / 6.0 ** 7
        c = math.copysign(abs(q) ** (1.0 / 9.0), q)
        h = b / (6.0 * c)
    pos, neg = signature(h)
    if (pos, neg) != (3, 4):
        raise DegenerateFormError("induced metric has signature ({}, {}), not (3, 4)".format(pos, neg))
    residual = np.asarray(trace_metric(phi, h) - h)
    if backend == "exact":
        if not np.all(residual == 0):
            raise DegenerateFormError("metric bootstrap is not self-consistent")
    elif float(np.max(np.abs(residual))) > tol * max(1.0, float(np.max(np.abs(h)))):
        raise DegenerateFormError("metric bootstrap is not self-consistent")
    klogger.debug("induced metric: det B = %s", det_b)
    return h


def induced_volume(phi: KForm, h) -> KForm:
    """The volume form (1/7) Alt(phi^K_AB phi_KCD) ∧ phi.

    With T_ABCD = phi^K_AB phi_KCD this equals five times the bracket
    phi_K[AB phi^K_CD phi_EFG].
    """
    backend = phi.backend
    if phi.is_zero():
        return KForm.zero(7, backend)
    pt = phi.tensor()
    up = raise_lower(matrix_inverse(h), pt, [0])
    T = np.tensordot(up, pt, axes=([0], [0]))
    vol = wedge(antisymmetrize(T), phi)
    return vol * (Fraction(1, 7) if backend == "exact" else 1.0 / 7.0)


class G2Structure:
    """A 3-form together with its induced metric, volume and dual 4-form."""

    __slots__ = ("phi", "h", "vol", "star_phi", "h_inv", "phi_t", "star_t",
                 "phi_up", "star_up", "phi_mixed")

    def __init__(self, phi: KForm, h=None, vol: KForm | None = None) -> None:
        if phi.degree != 3:
            raise DegreeError("a G2 structure is a 3-form")
        self.phi = phi
        self.h = induced_metric(phi) if h is None else h
        self.vol = induced_volume(phi, self.h) if vol is None else vol
        self.h_inv = matrix_inverse(self.h)
        self.star_phi = hodge_star(self.h, self.vol, phi, self.h_inv)
        self.phi_t = phi.tensor()
        self.star_t = self.star_phi.tensor()
        self.phi_up = raise_lower(self.h_inv, self.phi_t, range(3))
        self.star_up = raise_lower(self.h_inv, self.star_t, range(4))
        self.phi_mixed = raise_lower(self.h_inv, self.phi_t, [0])

    @property
    def backend(self) -> str:
        return self.phi.backend

    def lower(self, v):
        return np.dot(self.h, v)

    def raise_(self, w):
        return np.dot(self.h_inv, w)

    def pairing(self, x, y):
        return np.dot(np.dot(self.h, y), x)

    def star(self, a: KForm) -> KForm:
        return hodge_star(self.h, self.vol, a, self.h_inv)

    def to_json(self):
        return self.phi.to_json()

    @classmethod
    def from_json(cls, data, backend: str = "exact") -> G2Structure:
        return cls(KForm.from_json(data, backend))

    def __repr__(self) -> str:
        return "G2Structure({!r})".format(self.phi)


@functools.lru_cache(maxsize=None)
def standard_structure(backend: str = "exact") -> G2Structure:
    return G2Structure(standard_phi(backend))


def cross(G: G2Structure, x, y):
    w = np.tensordot(np.tensordot(G.phi_t, x, axes=([0], [0])), y, axes=([0], [0]))
    return G.raise_(w)


def genericity_and_compatibility(phi: KForm, H_ref, vol_ref: KForm, tol: float = 1e-10) -> dict:
    """Report whether ``phi`` is split-generic and matches (H_ref, vol_ref)."""
    report = {"generic": False, "metric_match": False, "orientation_match": False}
    B = hitchin_form(phi, vol_ref)
    if is_zero(determinant(B), tol) or signature(B) not in ((3, 4), (4, 3)):
        return report
    report["generic"] = True
    # B = mu * H_ref and (mu/6)^2 = det H_ref characterizes H_phi = H_ref
    b = hitchin_form(phi)
    mu = _proportionality(b, H_ref, tol)
    if mu is not None:
        gap = (mu * mu) - 36 * determinant(H_ref)
        report["metric_match"] = bool(is_zero(gap, tol * 36 * max(1.0, abs(float(mu * mu)))))
    nu_phi = induced_volume(phi, H_ref).values[0]
    nu_ref = vol_ref.values[0]
    report["orientation_match"] = (sign_of(nu_phi, tol) != 0
                                   and sign_of(nu_phi, tol) == sign_of(nu_ref, tol))
    return report


def _proportionality(b, H, tol: float):
    """mu with b = mu * H, or None."""
    b = np.asarray(b)
    H = np.asarray(H)
    pivot = next(((i, j) for i in range(DIM) for j in range(DIM) if not is_zero(H[i, j], tol)), None)
    if pivot is None:
        return None
    if b.dtype == object:
        mu = b[pivot] * ExactScalar.coerce(H[pivot]).inv()
        return mu if np.all(b == H * mu) else None
    mu = b[pivot] / H[pivot]
    if np.max(np.abs(b - mu * H)) <= tol * max(1.0, float(np.max(np.abs(b)))):
        return mu
    return None


def iota2_7(G: G2Structure, v) -> KForm:
    return hook(v, G.phi)


def pi2_7(G: G2Structure, A: KForm):
    v = np.tensordot(A.tensor(), G.phi_up, axes=([0, 1], [0, 1]))
    return v * (Fraction(1, 6) if G.backend == "exact" else 1.0 / 6.0)


def pi2_14(G: G2Structure, A: KForm) -> KForm:
    """(2/3) A_AB - (1/6) (*Phi)_AB^CD A_CD."""
    exact = G.backend == "exact"
    A_up = raise_lower(G.h_inv, A.tensor(), [0, 1])
    contracted = np.tensordot(G.star_t, A_up, axes=([2, 3], [0, 1]))
    out = A.tensor() * (Fraction(2, 3) if exact else 2.0 / 3.0) \
        - contracted * (Fraction(1, 6) if exact else 1.0 / 6.0)
    return KForm.from_tensor(out, 2)


def decompose2(G: G2Structure, A: KForm):
    """A = iota2_7(v) + m with v = pi2_7(A) and m in the 14-dimensional part."""
    if A.degree != 2:
        raise DegreeError("decompose2 takes a 2-form")
    v = pi2_7(G, A)
    return v, A - iota2_7(G, v)


def pi3_1(G: G2Structure, psi: KForm):
    a = np.tensordot(G.phi_up, psi.tensor(), axes=3)
    return a * (Fraction(1, 42) if G.backend == "exact" else 1.0 / 42.0)


def iota3_7(G: G2Structure, v) -> KForm:
    return -hook(v, G.star_phi)


def pi3_7(G: G2Structure, psi: KForm):
    v = np.tensordot(G.star_up, psi.tensor(), axes=([0, 1, 2], [0, 1, 2]))
    return v * (Fraction(1, 24) if G.backend == "exact" else 1.0 / 24.0)


def i_map(G: G2Structure, s) -> KForm:
    """i(s)_ABC = 6 Phi^D_[AB s_C]D for a symmetric bilinear form s."""
    X = np.tensordot(G.phi_mixed, np.asarray(s), axes=([0], [1]))
    return antisymmetrize(X) * 6


def quadratic_form(G: G2Structure, psi: KForm):
    """Q(psi)(x, y) = *[(x⌟Phi) ∧ (y⌟Phi) ∧ psi]."""
    backend = G.backend
    hooks = [hook(basis_vector(i, backend), G.phi) for i in range(1, DIM + 1)]
    Q = zeros((DIM, DIM), backend)
    for i in range(DIM):
        for j in range(i, DIM):
            top = wedge(wedge(hooks[i], hooks[j]), psi)
            Q[i, j] = Q[j, i] = G.star(top).values[0]
    return Q


def pi3_27(G: G2Structure, psi: KForm):
    exact = G.backend == "exact"
    a = pi3_1(G, psi)
    Q = quadratic_form(G, psi)
    if exact:
        return Q * Fraction(1, 8) - G.h * (a * Fraction(3, 4))
    return Q / 8.0 - G.h * (0.75 * a)


def decompose3(G: G2Structure, psi: KForm):
    """(a, v, s) with psi = a Phi + iota3_7(v) + i(s), s trace-free symmetric."""
    if psi.degree != 3:
        raise DegreeError("decompose3 takes a 3-form")
    return pi3_1(G, psi), pi3_7(G, psi), pi3_27(G, psi)


def recompose3(G: G2Structure, a, v, s) -> KForm:
    return G.phi * a + iota3_7(G, v) + i_map(G, s)


def action_on_form(A, psi: KForm) -> KForm:
    """Derivation action of an endomorphism on forms: -sum over slots of A^d_a psi_..d.."""
    t = psi.tensor()
    k = psi.degree
    if k == 0:
        return KForm.zero(0, psi.backend)
    total = None
    for slot in range(k):
        term = np.moveaxis(np.tensordot(np.asarray(A), t, axes=([0], [slot])), 0, slot)
        total = term if total is None else total + term
    return KForm.from_tensor(-total, k)


def is_h_skew(h, A, tol: float = 0.0) -> bool:
    low = np.dot(h, A)
    if low.dtype == object:
        return bool(np.all(low == -low.T))
    return float(np.max(np.abs(low + low.T))) <= tol


def g2_algebra_test(G: G2Structure, A, tol: float = 1e-10) -> bool:
    A = np.asarray(A)
    exact = G.backend == "exact" and A.dtype == object
    t = 0.0 if exact else tol
    if not is_h_skew(G.h, A, t):
        return False
    return action_on_form(A, G.phi).is_zero(t)


def g2_matrix(params, backend: str = "exact"):
    """The block matrix of g2 in the standard basis.

    ``params`` maps ``A`` (2x2), ``W``, ``X``, ``Y``, ``Z`` (length 2), ``r`` and
    ``s`` to scalars; missing entries are zero.
    """
    z = lift(0, backend)
    r2 = sqrt2(backend)
    half_r2 = r2 * (Fraction(1, 2) if backend == "exact" else 0.5)
    A = array(params.get("A", [[0, 0], [0, 0]]), backend)
    W = array(params.get("W", [0, 0]), backend)
    X = array(params.get("X", [0, 0]), backend)
    Y = array(params.get("Y", [0, 0]), backend)
    Z = array(params.get("Z", [0, 0]), backend)
    r = lift(params.get("r", 0), backend)
    s = lift(params.get("s", 0), backend)
    J = array([[0, -1], [1, 0]], backend)
    tr = A[0, 0] + A[1, 1]
    M = zeros((DIM, DIM), backend)
    M[0, 0] = tr
    M[0, 1:3] = Z
    M[0, 3] = s
    M[0, 4:6] = W
    M[0, 6] = z
    M[1:3, 0] = X
    M[1:3, 1:3] = A
    M[1:3, 3] = np.dot(J, Z) * r2
    M[1:3, 4:6] = J * (s * half_r2)
    M[1:3, 6] = -W
    M[3, 0] = r
    M[3, 1:3] = -np.dot(X, J) * r2
    M[3, 4:6] = -np.dot(Z, J) * r2
    M[3, 6] = s
    M[4:6, 0] = Y
    M[4:6, 1:3] = -J * (r * half_r2)
    M[4:6, 3] = np.dot(J, X) * r2
    M[4:6, 4:6] = -A.T
    M[4:6, 6] = -Z
    M[6, 1:3] = -Y
    M[6, 3] = r
    M[6, 4:6] = -X
    M[6, 6] = -tr
    return M


def so_basis(G: G2Structure):
    """A basis of the H-skew endomorphisms, as H^-1 M for elementary skew M."""
    out = []
    for i, j in itertools.combinations(range(DIM), 2):
        M = zeros((DIM, DIM), G.backend)
        M[i, j] = lift(1, G.backend)
        M[j, i] = lift(-1, G.backend)
        out.append(np.dot(G.h_inv, M))
    return out


def g2_annihilator_dimension(G: G2Structure, S=None, tol: float = 1e-9) -> int:
    """dim {A in so(H) : A.Phi = 0 (and A S = 0)}."""
    rows = []
    for A in so_basis(G):
        row = list(action_on_form(A, G.phi).values)
        if S is not None:
            row.extend(np.dot(A, S))
        rows.append(row)
    M = np.array(rows, dtype=object if G.backend == "exact" else float)
    return len(rows) - matrix_rank(M, tol)


def contraction_residuals(G: G2Structure) -> tuple[float, float]:
    """Max deviations of the two standard contraction identities."""
    h = G.h
    lhs1 = np.tensordot(G.phi_mixed, G.phi_t, axes=([0], [0]))
    hh = np.einsum("ac,bd->abcd", to_float_array(h), to_float_array(h))
    rhs1 = to_float_array(G.star_t) + hh - hh.transpose(0, 1, 3, 2)
    r1 = float(np.max(np.abs(to_float_array(lhs1) - rhs1)))
    lhs2 = np.tensordot(G.phi_mixed, G.star_t, axes=([0], [0]))
    hf = to_float_array(h)
    pf = to_float_array(G.phi_t)
    U = np.einsum("ac,deb->abcde", hf, pf)
    V = np.einsum("bc,dea->abcde", hf, pf)
    rhs2 = 3.0 * (bracket(U, [2, 3, 4]) - bracket(V, [2, 3, 4]))
    r2 = float(np.max(np.abs(to_float_array(lhs2) - rhs2)))
    return r1, r2


def exact_contraction_identities(G: G2Structure) -> bool:
    """Both contraction identities with zero remainder (exact backend)."""
    h = G.h
    lhs1 = np.tensordot(G.phi_mixed, G.phi_t, axes=([0], [0]))
    hh = np.multiply.outer(h, h).transpose(0, 2, 1, 3)
    rhs1 = G.star_t + hh - hh.transpose(0, 1, 3, 2)
    if not np.all(lhs1 == rhs1):
        return False
    lhs2 = np.tensordot(G.phi_mixed, G.star_t, axes=([0], [0]))
    U = np.multiply.outer(h, G.phi_t).transpose(0, 4, 1, 2, 3)
    V = np.multiply.outer(h, G.phi_t).transpose(4, 0, 1, 2, 3)
    rhs2 = (bracket(U, [2, 3, 4]) - bracket(V, [2, 3, 4])) * 3
    return bool(np.all(lhs2 == rhs2))

"""Dense multilinear algebra on the 7-dimensional fiber.

Vectors, bilinear forms and endomorphisms are plain numpy arrays (``object``
dtype holding :class:`ExactScalar` in the exact backend, ``float64`` in the
float backend). K-forms are stored on strictly increasing index tuples.

Conventions: the wedge product is the shuffle product, so that
``a ^ b = (p+q)!/(p! q!) Alt(a (x) b)``; brackets ``T_[a..]`` carry the weight
``1/k!``; the Hodge star satisfies ``b ^ *a = H(b, a) vol`` with
``H(e^I, e^J) = det(H^{ij})``.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .errors import DegreeError, InputError, SingularMetricError
from .scalars import ExactScalar, lift, is_zero

DIM = 7

_COMBOS = {k: list(itertools.combinations(range(DIM), k)) for k in range(DIM + 1)}
_POSITION = {k: {idx: n for n, idx in enumerate(c)} for k, c in _COMBOS.items()}


def permutation_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def backend_of_array(arr) -> str:
    return "exact" if np.asarray(arr).dtype == object else "float"


def zeros(shape, backend: str = "exact"):
    if backend == "float":
        return np.zeros(shape)
    return np.full(shape, ExactScalar(0), dtype=object)


def array(values, backend: str = "exact"):
    """Numpy array of ``values`` lifted into ``backend``."""
    raw = np.array(values, dtype=object)
    if backend == "float":
        return np.vectorize(float, otypes=[float])(raw) if raw.size else raw.astype(float)
    out = np.empty(raw.shape, dtype=object)
    for idx in np.ndindex(raw.shape):
        out[idx] = lift(raw[idx], "exact")
    return out


def to_float_array(arr):
    arr = np.asarray(arr)
    if arr.dtype != object:
        return arr.astype(float)
    return np.vectorize(float, otypes=[float])(arr) if arr.size else arr.astype(float)


def basis_vector(i: int, backend: str = "exact"):
    """E_i for 1 <= i <= 7."""
    v = zeros(DIM, backend)
    v[i - 1] = ExactScalar(1) if backend == "exact" else 1.0
    return v


def vec(values, backend: str = "exact"):
    if len(values) != DIM:
        raise InputError("a fiber vector needs 7 components, got {}".format(len(values)))
    return array(values, backend)


def identity(backend: str = "exact", n: int = DIM):
    out = zeros((n, n), backend)
    for i in range(n):
        out[i, i] = ExactScalar(1) if backend == "exact" else 1.0
    return out


def outer(u, v):
    return np.multiply.outer(u, v)


def matrix_inverse(M):
    """Inverse of a square matrix in either backend (Gauss-Jordan for exact)."""
    M = np.asarray(M)
    n = M.shape[0]
    if M.dtype != object:
        if abs(np.linalg.det(M)) < 1e-300:
            raise SingularMetricError("singular matrix")
        return np.linalg.inv(M)
    work = np.concatenate([M.copy(), identity("exact", n)], axis=1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r, col] != 0), None)
        if pivot is None:
            raise SingularMetricError("singular matrix")
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
        inv_p = ExactScalar.coerce(work[col, col]).inv()
        work[col] = work[col] * inv_p
        for r in range(n):
            if r != col and work[r, col] != 0:
                work[r] = work[r] - work[col] * work[r, col]
    return work[:, n:]


def determinant(M):
    M = np.asarray(M)
    if M.dtype != object:
        return float(np.linalg.det(M))
    n = M.shape[0]
    work = M.copy()
    det = ExactScalar(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r, col] != 0), None)
        if pivot is None:
            return ExactScalar(0)
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
            det = -det
        det = det * work[col, col]
        inv_p = ExactScalar.coerce(work[col, col]).inv()
        for r in range(col + 1, n):
            if work[r, col] != 0:
                work[r] = work[r] - work[col] * (work[r, col] * inv_p)
    return det


def matrix_rank(M, tol: float = 1e-9) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    if M.dtype != object:
        return int(np.linalg.matrix_rank(M, tol=tol))
    work = M.copy()
    rows, cols = work.shape
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if work[r, col] != 0), None)
        if pivot is None:
            continue
        work[[rank, pivot]] = work[[pivot, rank]]
        inv_p = ExactScalar.coerce(work[rank, col]).inv()
        for r in range(rank + 1, rows):
            if work[r, col] != 0:
                work[r] = work[r] - work[rank] * (work[r, col] * inv_p)
        rank += 1
        if rank == rows:
            break
    return rank


def signature(M, tol: float = 1e-12) -> tuple[int, int]:
    """(number of positive, number of negative) eigenvalues of a symmetric matrix."""
    eig = np.linalg.eigvalsh(to_float_array(M))
    scale = max(1.0, float(np.max(np.abs(eig))))
    return int(np.sum(eig > tol * scale)), int(np.sum(eig < -tol * scale))


def raise_lower(M, t, slots):
    """Contract the matrix ``M`` (H to lower, H^-1 to raise) into ``slots`` of ``t``."""
    t = np.asarray(t)
    for s in slots:
        t = np.moveaxis(np.tensordot(M, t, axes=([1], [s])), 0, s)
    return t


def lower(H, v):
    return raise_lower(H, v, [0])


def pairing(H, u, v):
    return np.dot(np.dot(H, v), u)


class KForm:
    """A k-form on the fiber, stored on strictly increasing index tuples."""

    def __init__(self, degree: int, values=None, backend: str = "exact") -> None:
        if not 0 <= degree <= DIM:
            raise DegreeError("degree {} outside 0..7".format(degree))
        self.degree = degree
        n = len(_COMBOS[degree])
        if values is None:
            values = zeros(n, backend)
        values = np.asarray(values)
        if values.shape != (n,):
            raise DegreeError("a {}-form needs {} components, got shape {}".format(degree, n, values.shape))
        self.values = values

    @property
    def backend(self) -> str:
        return backend_of_array(self.values)

    @classmethod
    def zero(cls, degree: int, backend: str = "exact") -> KForm:
        return cls(degree, None, backend)

    @classmethod
    def scalar(cls, value, backend: str = "exact") -> KForm:
        return cls(0, array([value], backend))

    @classmethod
    def basis(cls, indices, coeff=1, backend: str = "exact") -> KForm:
        """coeff * e^{i1..ik} for 1-based ``indices`` in any order."""
        idx = [i - 1 for i in indices]
        form = cls.zero(len(idx), backend)
        sign = permutation_sign(idx)
        if sign:
            form.values[_POSITION[len(idx)][tuple(sorted(idx))]] = lift(coeff, backend) * sign
        return form

    @classmethod
    def from_terms(cls, degree: int, terms, backend: str = "exact") -> KForm:
        form = cls.zero(degree, backend)
        for coeff, indices in terms:
            form = form + cls.basis(indices, coeff, backend)
        return form

    def combos(self):
        return _COMBOS[self.degree]

    def items(self):
        """(1-based increasing indices, coefficient) for the nonzero entries."""
        for idx, value in zip(_COMBOS[self.degree], self.values):
            if not is_zero(value):
                yield tuple(i + 1 for i in idx), value

    def __getitem__(self, indices):
        if isinstance(indices, int):
            indices = (indices,)
        idx = [i - 1 for i in indices]
        sign = permutation_sign(idx)
        if len(idx) != self.degree:
            raise DegreeError("expected {} indices".format(self.degree))
        if not sign:
            return self.values.dtype.type(0) if self.values.dtype != object else ExactScalar(0)
        return self.values[_POSITION[self.degree][tuple(sorted(idx))]] * sign

    def _check(self, other: KForm) -> None:
        if self.degree != other.degree:
            raise DegreeError("degree mismatch {} vs {}".format(self.degree, other.degree))

    def __add__(self, other: KForm) -> KForm:
        self._check(other)
        return KForm(self.degree, self.values + other.values)

    def __sub__(self, other: KForm) -> KForm:
        self._check(other)
        return KForm(self.degree, self.values - other.values)

    def __neg__(self) -> KForm:
        return KForm(self.degree, -self.values)

    def __mul__(self, c) -> KForm:
        return KForm(self.degree, self.values * c)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KForm) or other.degree != self.degree:
            return False
        return bool(np.all(self.values == other.values))

    __hash__ = None

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(is_zero(v, tol) for v in self.values)

    def allclose(self, other: KForm, tol: float = 1e-10) -> bool:
        self._check(other)
        return self.max_abs_diff(other) <= tol

    def max_abs_diff(self, other: KForm) -> float:
        self._check(other)
        diff = to_float_array(self.values) - to_float_array(other.values)
        return float(np.max(np.abs(diff))) if diff.size else 0.0

    def to_float(self) -> KForm:
        return KForm(self.degree, to_float_array(self.values))

    def tensor(self):
        """The full antisymmetric component array of shape (7,)*k."""
        k = self.degree
        backend = self.backend
        if k == 0:
            return self.values.reshape(())
        out = zeros((DIM,) * k, backend)
        for idx, value in zip(_COMBOS[k], self.values):
            if is_zero(value):
                continue
            for perm in itertools.permutations(range(k)):
                out[tuple(idx[p] for p in perm)] = value * permutation_sign(perm)
        return out

    @classmethod
    def from_tensor(cls, t, degree: int | None = None) -> KForm:
        """Read the increasing-index entries of an antisymmetric array."""
        t = np.asarray(t)
        k = t.ndim if degree is None else degree
        if k == 0:
            return cls(0, t.reshape(1))
        values = np.array([t[idx] for idx in _COMBOS[k]], dtype=t.dtype)
        return cls(k, values)

    def to_json(self):
        records = []
        for indices, value in self.items():
            coeff = str(value) if isinstance(value, ExactScalar) else float(value)
            records.append({"indices": list(indices), "coeff": coeff})
        return {"degree": self.degree, "terms": records}

    @classmethod
    def from_json(cls, data, backend: str = "exact") -> KForm:
        try:
            degree = int(data["degree"])
            terms = data["terms"]
        except (KeyError, TypeError, ValueError):
            raise InputError("k-form record needs 'degree' and 'terms'", "form") from None
        form = cls.zero(degree, backend)
        for n, term in enumerate(terms):
            try:
                indices = [int(i) for i in term["indices"]]
                raw = term["coeff"]
            except (KeyError, TypeError, ValueError):
                raise InputError("malformed term", "terms[{}]".format(n)) from None
            if len(indices) != degree or not all(1 <= i <= DIM for i in indices):
                raise InputError("indices must be {} values in 1..7".format(degree), "terms[{}].indices".format(n))
            if backend == "exact":
                if isinstance(raw, float):
                    raise InputError("float coefficient in the exact backend", "terms[{}].coeff".format(n))
                coeff = ExactScalar.parse(str(raw))
            else:
                coeff = float(ExactScalar.parse(raw)) if isinstance(raw, str) else float(raw)
            form = form + cls.basis(indices, coeff, backend)
        return form

    def __repr__(self) -> str:
        terms = ["{}*e{}".format(v, "".join(str(i) for i in idx)) for idx, v in self.items()]
        return "KForm({}: {})".format(self.degree, " + ".join(terms) if terms else "0")


def wedge(a: KForm, b: KForm) -> KForm:
    p, q = a.degree, b.degree
    if p + q > DIM:
        raise DegreeError("wedge of degrees {} and {} exceeds 7".format(p, q))
    out = KForm.zero(p + q, a.backend)
    values = out.values
    pos = _POSITION[p + q]
    for I, x in zip(_COMBOS[p], a.values):
        if is_zero(x):
            continue
        for J, y in zip(_COMBOS[q], b.values):
            if is_zero(y):
                continue
            merged = I + J
            sign = permutation_sign(merged)
            if sign:
                slot = pos[tuple(sorted(merged))]
                values[slot] = values[slot] + x * y * sign
    return out


def power(a: KForm, n: int) -> KForm:
    """The exterior power a ^ ... ^ a with ``n`` factors."""
    if n < 1:
        raise DegreeError("exterior power needs at least one factor")
    out = a
    for _ in range(n - 1):
        out = wedge(out, a)
    return out

def hook(v, a: KForm) -> KForm:
    """Interior product v ⌟ a, inserting ``v`` in the first slot."""
    k = a.degree
    if k < 1:
        raise DegreeError("cannot contract a vector into a 0-form")
    out = KForm.zero(k - 1, a.backend)
    values = out.values
    pos = _POSITION[k - 1]
    for I, x in zip(_COMBOS[k], a.values):
        if is_zero(x):
            continue
        for n, i in enumerate(I):
            if is_zero(v[i]):
                continue
            rest = I[:n] + I[n + 1:]
            slot = pos[rest]
            values[slot] = values[slot] + v[i] * x * (-1 if n % 2 else 1)
    return out


def antisymmetrize(t) -> KForm:
    """T_[a1..ak] with weight 1/k!, returned on increasing indices."""
    t = np.asarray(t)
    k = t.ndim
    if k == 0:
        return KForm(0, t.reshape(1))
    exact = t.dtype == object
    weight = Fraction(1, math.factorial(k))
    perms = [(perm, permutation_sign(perm)) for perm in itertools.permutations(range(k))]
    values = []
    for idx in _COMBOS[k]:
        total = 0
        for perm, sign in perms:
            total = total + t[tuple(idx[p] for p in perm)] * sign
        values.append(total * weight if exact else total / math.factorial(k))
    if exact:
        out = np.empty(len(values), dtype=object)
        for n, v in enumerate(values):
            out[n] = ExactScalar.coerce(v) if not isinstance(v, ExactScalar) else v
        return KForm(k, out)
    return KForm(k, np.array(values, dtype=float))


def raise_all(H_inv, a: KForm):
    """Raised components a^I on increasing multi-indices, keyed like ``a.values``.

    Low degrees go through the full tensor, high degrees through k x k minors
    of H^-1.
    """
    k = a.degree
    if k <= 3:
        t = raise_lower(H_inv, a.tensor(), range(k))
        return np.array([t[idx] for idx in _COMBOS[k]], dtype=t.dtype)
    H_inv = np.asarray(H_inv)
    out = zeros(len(_COMBOS[k]), a.backend)
    nonzero = [(J, x) for J, x in zip(_COMBOS[k], a.values) if not is_zero(x)]
    for n, I in enumerate(_COMBOS[k]):
        total = out[n]
        for J, x in nonzero:
            minor = determinant(H_inv[np.ix_(I, J)])
            if not is_zero(minor):
                total = total + minor * x
        out[n] = total
    return out


def inner(H, a: KForm, b: KForm, H_inv=None):
    """H(a, b) = sum over increasing I of a_I b^I."""
    if a.degree != b.degree:
        raise DegreeError("inner product of forms of different degree")
    if a.degree == 0:
        return a.values[0] * b.values[0]
    if H_inv is None:
        H_inv = matrix_inverse(H)
    up = raise_all(H_inv, b)
    total = 0
    for x, y in zip(a.values, up):
        if not is_zero(x):
            total = total + x * y
    return total if not isinstance(total, int) else lift(total, a.backend)


def hodge_star(H, vol: KForm, a: KForm, H_inv=None) -> KForm:
    if vol.degree != DIM:
        raise DegreeError("volume form must have degree 7")
    nu = vol.values[0]
    if is_zero(nu):
        raise SingularMetricError("zero volume form")
    if H_inv is None:
        H_inv = matrix_inverse(H)
    k = a.degree
    out = KForm.zero(DIM - k, a.backend)
    if k == 0:
        out.values[0] = a.values[0] * nu
        return out
    up = raise_all(H_inv, a)
    pos = _POSITION[k]
    full = tuple(range(DIM))
    for n, J in enumerate(_COMBOS[DIM - k]):
        I = tuple(i for i in full if i not in J)
        coeff = up[pos[I]]
        if is_zero(coeff):
            continue
        out.values[n] = coeff * nu * permutation_sign(I + J)
    return out


def null_space(M, tol: float = 1e-10):
    """Basis (list of vectors) of the kernel of ``M``."""
    M = np.asarray(M)
    rows, cols = M.shape
    if M.dtype != object:
        if rows == 0:
            return [v for v in np.eye(cols)]
        _, sv, vt = np.linalg.svd(M)
        scale = max(1.0, float(sv[0])) if sv.size else 1.0
        rank = int(np.sum(sv > tol * scale))
        return [vt[i] for i in range(rank, cols)]
    work = M.copy()
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if work[i, c] != 0), None)
        if pivot is None:
            continue
        work[[r, pivot]] = work[[pivot, r]]
        work[r] = work[r] * ExactScalar.coerce(work[r, c]).inv()
        for i in range(rows):
            if i != r and work[i, c] != 0:
                work[i] = work[i] - work[r] * work[i, c]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        v = zeros(cols, "exact")
        v[free] = ExactScalar(1)
        for row, pc in enumerate(pivots):
            v[pc] = -work[row, free]
        basis.append(v)
    return basis


def span_rank(vectors, tol: float = 1e-9) -> int:
    if not len(vectors):
        return 0
    return matrix_rank(np.array([list(v) for v in vectors], dtype=np.asarray(vectors[0]).dtype), tol)

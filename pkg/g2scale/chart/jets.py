"""Truncated Taylor (jet) arithmetic in the five chart coordinates.

A :class:`Jet` stores the normalized Taylor coefficients ``f_alpha = d^alpha f / alpha!``
of a scalar or tensor field at one point, for every multi-index of degree at
most ``order``. Tensor-valued jets carry the tensor axes first and the
coefficient axis last. Products use a precomputed pair table, so a product of
two jets is one gather and one matrix product.

Every jet records the order up to which its coefficients are valid; a
derivative lowers it by one and a product takes the smaller of the two.
"""
from __future__ import annotations

import functools
import itertools
import math

import numpy as np

from ..errors import ExpressionError, JetOrderError, ScalarDivisionError, SingularMetricError

NVARS = 5


def _multi_indices(degree: int, n: int):
    return sorted((a for a in itertools.product(range(degree + 1), repeat=n) if sum(a) == degree),
                  reverse=True)


class JetSpace:
    """Monomial bookkeeping for jets of a fixed maximal order."""

    def __init__(self, order: int, n: int = NVARS) -> None:
        if order < 0:
            raise JetOrderError("jet order must be nonnegative")
        self.order = order
        self.n = n
        self.monomials = tuple(m for d in range(order + 1) for m in _multi_indices(d, n))
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.size = len(self.monomials)
        self.degree = np.array([sum(m) for m in self.monomials])
        self.factorial = np.array([math.prod(math.factorial(k) for k in m) for m in self.monomials], dtype=float)
        left, right, target = [], [], []
        for i, a in enumerate(self.monomials):
            for j, b in enumerate(self.monomials):
                if sum(a) + sum(b) <= order:
                    left.append(i)
                    right.append(j)
                    target.append(self.index[tuple(x + y for x, y in zip(a, b))])
        self.pair_left = np.array(left)
        self.pair_right = np.array(right)
        self.msum = np.zeros((len(target), self.size))
        self.msum[np.arange(len(target)), target] = 1.0
        # d/dx_k maps coefficient alpha + e_k (times its k-th entry) onto alpha
        self.shift_source = []
        self.shift_factor = []
        for k in range(n):
            src = np.zeros(self.size, dtype=int)
            fac = np.zeros(self.size)
            for m, alpha in enumerate(self.monomials):
                beta = tuple(a + (1 if i == k else 0) for i, a in enumerate(alpha))
                if sum(beta) <= order:
                    src[m] = self.index[beta]
                    fac[m] = beta[k]
            self.shift_source.append(src)
            self.shift_factor.append(fac)

    def mask(self, order: int):
        return (self.degree <= order).astype(float)

    def constant(self, value, order: int | None = None) -> Jet:
        value = np.asarray(value, dtype=float)
        data = np.zeros(value.shape + (self.size,))
        data[..., 0] = value
        return Jet(data, self.order if order is None else order, self)

    def variables(self, point) -> list:
        """Coordinate jets x_k = point_k + (x_k - point_k) at ``point``."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.n,):
            raise JetOrderError("a point needs {} coordinates".format(self.n))
        out = []
        for k in range(self.n):
            data = np.zeros(self.size)
            data[0] = point[k]
            if self.order >= 1:
                data[self.index[tuple(1 if i == k else 0 for i in range(self.n))]] = 1.0
            out.append(Jet(data, self.order, self))
        return out


@functools.lru_cache(maxsize=None)
def jet_space(order: int, n: int = NVARS) -> JetSpace:
    return JetSpace(order, n)


class Jet:
    """Taylor coefficients of a (tensor-valued) field at a point."""

    __slots__ = ("data", "order", "space")
    __array_ufunc__ = None

    def __init__(self, data, order: int, space: JetSpace) -> None:
        data = np.asarray(data, dtype=float)
        if data.shape[-1:] != (space.size,):
            raise JetOrderError("coefficient axis has length {}, expected {}".format(data.shape[-1:], space.size))
        order = min(order, space.order)
        if order < 0:
            raise JetOrderError("jet order dropped below zero")
        self.data = data if order == space.order else data * space.mask(order)
        self.order = order
        self.space = space

    # shape and access

    @property
    def shape(self) -> tuple:
        return self.data.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.data.ndim - 1

    @property
    def value(self):
        v = self.data[..., 0]
        return float(v) if v.ndim == 0 else v.copy()

    def __getitem__(self, key) -> Jet:
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.data[key + (slice(None),)], self.order, self.space)

    def transpose(self, *axes) -> Jet:
        return Jet(self.data.transpose(*axes, self.ndim), self.order, self.space)

    @property
    def T(self) -> Jet:
        return self.transpose(*reversed(range(self.ndim)))

    def truncate(self, order: int) -> Jet:
        return Jet(self.data, min(order, self.order), self.space)

    def derivative(self, alpha) -> np.ndarray:
        """The partial derivative d^alpha at the point (not normalized by alpha!)."""
        alpha = tuple(alpha)
        if sum(alpha) > self.order:
            raise JetOrderError("derivative of degree {} from a jet of order {}".format(sum(alpha), self.order))
        i = self.space.index[alpha]
        return self.data[..., i] * self.space.factorial[i]

    def __repr__(self) -> str:
        return "Jet(shape={}, order={}, value={})".format(self.shape, self.order, self.value)

    # arithmetic

    def _lift(self, other) -> Jet:
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise JetOrderError("jets from different jet spaces")
            return other
        return self.space.constant(other)

    def __add__(self, other) -> Jet:
        other = self._lift(other)
        return Jet(self.data + other.data, min(self.order, other.order), self.space)

    __radd__ = __add__

    def __sub__(self, other) -> Jet:
        other = self._lift(other)
        return Jet(self.data - other.data, min(self.order, other.order), self.space)

    def __rsub__(self, other) -> Jet:
        return self._lift(other) - self

    def __neg__(self) -> Jet:
        return Jet(-self.data, self.order, self.space)

    def __pos__(self) -> Jet:
        return self

    def __mul__(self, other) -> Jet:
        if isinstance(other, Jet):
            sp = self.space
            prod = self.data[..., sp.pair_left] * other.data[..., sp.pair_right]
            return Jet(prod @ sp.msum, min(self.order, other.order), sp)
        c = np.asarray(other, dtype=float)
        return Jet(self.data * c[..., None], self.order, self.space)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Jet:
        if isinstance(other, Jet):
            return self * power(other, -1)
        c = np.asarray(other, dtype=float)
        if np.any(c == 0):
            raise ScalarDivisionError("jet divided by zero")
        return self * (1.0 / c)

    def __rtruediv__(self, other) -> Jet:
        return power(self, -1) * other

    def __pow__(self, p) -> Jet:
        if isinstance(p, Jet):
            raise ExpressionError("jet exponents must be constants")
        return power(self, p)

    # calculus

    def partial(self, k: int) -> Jet:
        if self.order < 1:
            raise JetOrderError("cannot differentiate a jet of order 0")
        sp = self.space
        data = self.data[..., sp.shift_source[k]] * sp.shift_factor[k]
        return Jet(data, self.order - 1, sp)

    def grad(self) -> Jet:
        """All first partials, the derivative index appended last."""
        if self.order < 1:
            raise JetOrderError("cannot differentiate a jet of order 0")
        sp = self.space
        parts = [self.data[..., sp.shift_source[k]] * sp.shift_factor[k] for k in range(sp.n)]
        return Jet(np.stack(parts, axis=-2), self.order - 1, sp)


def as_jet(space: JetSpace, x) -> Jet:
    return x if isinstance(x, Jet) else space.constant(x)


def stack(items, space: JetSpace | None = None) -> Jet:
    """Assemble a tensor jet from (nested lists of) jets and numbers."""
    if isinstance(items, Jet):
        return items
    if not isinstance(items, (list, tuple)):
        if space is None:
            raise JetOrderError("a constant needs a jet space")
        return space.constant(items)
    if space is None:
        space = _find_space(items)
    parts = [stack(x, space) for x in items]
    order = min(p.order for p in parts)
    return Jet(np.stack([p.data for p in parts], axis=0), order, space)


def _find_space(items):
    for x in items:
        if isinstance(x, Jet):
            return x.space
        if isinstance(x, (list, tuple)):
            found = _find_space(x)
            if found is not None:
                return found
    return None


def antisymmetrize(t: Jet, axes=None) -> Jet:
    """T_[a..] over ``axes`` (default all tensor axes) with weight 1/k!."""
    axes = list(range(t.ndim)) if axes is None else list(axes)
    k = len(axes)
    total = None
    for perm in itertools.permutations(range(k)):
        order = list(range(t.ndim + 1))
        for src, dst in zip(axes, perm):
            order[src] = axes[dst]
        sign = _perm_sign(perm)
        term = np.transpose(t.data, order) * sign
        total = term if total is None else total + term
    return Jet(total / math.factorial(k), t.order, t.space)


def symmetrize(t: Jet) -> Jet:
    return Jet((t.data + np.swapaxes(t.data, 0, 1)) / 2.0, t.order, t.space)


def _perm_sign(perm) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def jeinsum(subscripts: str, *operands):
    """Einstein summation over jets and constant arrays.

    ``subscripts`` uses lowercase letters and an explicit ``->``. Operands are
    folded left to right; jet pairs multiply through the pair table.
    """
    if "->" not in subscripts:
        raise ExpressionError("jeinsum needs an explicit output: {!r}".format(subscripts))
    inputs, output = subscripts.replace(" ", "").split("->")
    terms = inputs.split(",")
    if len(terms) != len(operands):
        raise ExpressionError("jeinsum: {} index groups for {} operands".format(len(terms), len(operands)))
    if not all(c.islower() for c in "".join(terms) + output):
        raise ExpressionError("jeinsum indices must be lowercase letters")
    cur_idx, cur = terms[0], operands[0]
    for k in range(1, len(terms)):
        later = "".join(terms[k + 1:]) + output
        keep = "".join(dict.fromkeys(c for c in cur_idx + terms[k] if c in later))
        cur = _pair(cur_idx, cur, terms[k], operands[k], keep)
        cur_idx = keep
    if cur_idx != output:
        cur = _single(cur_idx, cur, output)
    return cur


def _pair(ia, a, ib, b, out):
    if isinstance(a, Jet) and isinstance(b, Jet):
        sp = a.space
        prod = np.einsum("{}Z,{}Z->{}Z".format(ia, ib, out),
                         a.data[..., sp.pair_left], b.data[..., sp.pair_right])
        return Jet(prod @ sp.msum, min(a.order, b.order), sp)
    if isinstance(a, Jet):
        return Jet(np.einsum("{}Z,{}->{}Z".format(ia, ib, out), a.data, np.asarray(b, dtype=float)), a.order, a.space)
    if isinstance(b, Jet):
        return Jet(np.einsum("{},{}Z->{}Z".format(ia, ib, out), np.asarray(a, dtype=float), b.data), b.order, b.space)
    return np.einsum("{},{}->{}".format(ia, ib, out), np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def _single(ia, a, out):
    if isinstance(a, Jet):
        return Jet(np.einsum("{}Z->{}Z".format(ia, out), a.data), a.order, a.space)
    return np.einsum("{}->{}".format(ia, out), np.asarray(a, dtype=float))


# univariate functions by Taylor composition


def _compose(u: Jet, coeffs) -> Jet:
    """sum_k coeffs[k] (u - u0)^k, coeffs[k] broadcast over the tensor shape."""
    h = Jet(u.data.copy(), u.order, u.space)
    h.data[..., 0] = 0.0
    result = u.space.constant(coeffs[u.order], u.order)
    for k in range(u.order - 1, -1, -1):
        result = result * h + coeffs[k]
    return result


def _cycle(values, order):
    return [values[k % 4] / math.factorial(k) for k in range(order + 1)]


def exp(u: Jet) -> Jet:
    e = np.exp(u.value)
    return _compose(u, [e / math.factorial(k) for k in range(u.order + 1)])


def log(u: Jet) -> Jet:
    x0 = np.asarray(u.value)
    if np.any(x0 <= 0):
        raise ExpressionError("log of a nonpositive value {}".format(x0))
    coeffs = [np.log(x0)] + [(-1.0) ** (k + 1) / (k * x0 ** k) for k in range(1, u.order + 1)]
    return _compose(u, coeffs)


def sin(u: Jet) -> Jet:
    s, c = np.sin(u.value), np.cos(u.value)
    return _compose(u, _cycle([s, c, -s, -c], u.order))


def cos(u: Jet) -> Jet:
    s, c = np.sin(u.value), np.cos(u.value)
    return _compose(u, _cycle([c, -s, -c, s], u.order))


def sinh(u: Jet) -> Jet:
    s, c = np.sinh(u.value), np.cosh(u.value)
    return _compose(u, _cycle([s, c, s, c], u.order))


def cosh(u: Jet) -> Jet:
    s, c = np.sinh(u.value), np.cosh(u.value)
    return _compose(u, _cycle([c, s, c, s], u.order))


def power(u: Jet, p) -> Jet:
    """u ** p for a constant exponent (integer or real)."""
    x0 = np.asarray(u.value, dtype=float)
    p = float(p)
    integral = p == int(p)
    if np.any(x0 == 0) and (p < 0 or not integral):
        if p < 0:
            raise ScalarDivisionError("negative power of a jet vanishing at the point")
        raise ExpressionError("fractional power of a jet vanishing at the point")
    if not integral and np.any(x0 < 0):
        raise ExpressionError("fractional power of a negative value")
    coeffs = []
    binom = 1.0
    for k in range(u.order + 1):
        coeffs.append(binom * np.power(x0, p - k) if not (integral and p - k < 0 and p >= 0) else np.zeros_like(x0))
        binom *= (p - k) / (k + 1)
    return _compose(u, coeffs)


def sqrt(u: Jet) -> Jet:
    return power(u, 0.5)


def inverse(G: Jet) -> Jet:
    """Matrix inverse of a square-matrix jet (Neumann series about the value)."""
    G0 = np.asarray(G.value)
    if G0.ndim != 2 or G0.shape[0] != G0.shape[1]:
        raise SingularMetricError("inverse needs a square matrix jet")
    if abs(np.linalg.det(G0)) < 1e-300:
        raise SingularMetricError("matrix jet is singular at the point")
    G0_inv = np.linalg.inv(G0)
    N = G - G0
    A = -jeinsum("ab,bc->ac", G0_inv, N)
    term = G.space.constant(G0_inv, G.order)
    total = term
    for _ in range(G.order):
        term = jeinsum("ab,bc->ac", A, term)
        total = total + term
    return total


# finite-difference cross-checks


def central_difference(func, point, k: int, step: float = 1e-4):
    """(f(x + h e_k) - f(x - h e_k)) / 2h for a float-valued ``func``."""
    point = np.asarray(point, dtype=float)
    e = np.zeros_like(point)
    e[k] = step
    return (np.asarray(func(point + e)) - np.asarray(func(point - e))) / (2.0 * step)


def second_difference(func, point, k: int, l: int, step: float = 1e-3):
    """Central estimate of d_k d_l f."""
    point = np.asarray(point, dtype=float)
    ek = np.zeros_like(point)
    el = np.zeros_like(point)
    ek[k] = step
    el[l] = step
    f = lambda x: np.asarray(func(x))  # noqa: E731
    return (f(point + ek + el) - f(point + ek - el) - f(point - ek + el) + f(point - ek - el)) / (4.0 * step * step)

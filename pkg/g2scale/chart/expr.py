"""Plain-text charts: metrics and fields written as expressions in five coordinates.

A chart file is a list of ``key: value`` lines; ``#`` starts a comment::

    name: flat
    coordinates: x y z u v
    box x: -1 1
    metric 0 1: 1
    metric 2 2: exp(x)
    field sigma: 1 + x^2
    vector xi: 1; 0; 0; 0; y
    form phi 0 1: x

Metric entries are symmetric and forms antisymmetric; entries not written
are zero. Expressions use + - * / ^ (or **), unary minus, parentheses, the
constants pi and E and the functions exp, log, sin, cos, sinh, cosh and sqrt.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from tokenize import TokenError

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from ..errors import ExpressionError
from ..klog import klogger
from . import jets
from .geometry import DIM5, Chart
from .jets import Jet

_FUNCTIONS = {
    "exp": (sp.exp, jets.exp),
    "log": (sp.log, jets.log),
    "sin": (sp.sin, jets.sin),
    "cos": (sp.cos, jets.cos),
    "sinh": (sp.sinh, jets.sinh),
    "cosh": (sp.cosh, jets.cosh),
    "sqrt": (sp.sqrt, jets.sqrt),
}
_BY_CLASS = {fn[0]: fn[1] for name, fn in _FUNCTIONS.items() if name != "sqrt"}
_TRANSFORMS = standard_transformations + (convert_xor,)
_RESERVED = set(_FUNCTIONS) | {"pi", "E"}


def parse(text: str, coordinates, where: str = "expression") -> sp.Expr:
    """Parse ``text`` into a sympy expression over ``coordinates``."""
    symbols = {name: sp.Symbol(name, real=True) for name in coordinates}
    local = dict(symbols)
    local.update({name: fn[0] for name, fn in _FUNCTIONS.items()})
    local.update({"pi": sp.pi, "E": sp.E})
    try:
        expr = parse_expr(text, local_dict=local,
                          transformations=_TRANSFORMS, evaluate=True)
    except (SyntaxError, TypeError, ValueError, sp.SympifyError, TokenError) as error:
        raise ExpressionError("{}: cannot parse {!r} ({})".format(where, text, error)) from None
    if not isinstance(expr, sp.Expr):
        raise ExpressionError("{}: {!r} is not a scalar expression".format(where, text))
    unknown = sorted(str(s) for s in expr.free_symbols if str(s) not in symbols)
    if unknown:
        raise ExpressionError("{}: unknown name(s) {}".format(where, ", ".join(unknown)))
    for f in expr.atoms(sp.Function):
        if type(f) not in _BY_CLASS:
            raise ExpressionError("{}: unsupported function {}".format(where, type(f).__name__))
    return expr


def evaluate(expr: sp.Expr, u: list, names) -> Jet:
    """The jet of ``expr`` with coordinate ``names[k]`` bound to the jet ``u[k]``."""
    space = u[0].space
    return jets.as_jet(space, _walk(expr, dict(zip(names, u))))


def _walk(expr, env):
    if expr.is_Symbol:
        return env[str(expr)]
    if expr.is_Number or expr.is_NumberSymbol:
        return float(expr)
    if expr.is_Add:
        total = 0.0
        for arg in expr.args:
            total = _walk(arg, env) + total
        return total
    if expr.is_Mul:
        total = 1.0
        for arg in expr.args:
            total = _walk(arg, env) * total
        return total
    if expr.is_Pow:
        base = _walk(expr.base, env)
        if not expr.exp.is_number:
            exponent = _walk(expr.exp, env)
            return jets.exp(jets.log(_lift(base, env)) * exponent)
        p = float(expr.exp)
        if isinstance(base, Jet):
            return jets.power(base, p)
        return float(base) ** p
    fn = _BY_CLASS.get(type(expr))
    if fn is not None:
        return fn(_lift(_walk(expr.args[0], env), env))
    raise ExpressionError("cannot evaluate {}".format(expr))


def _lift(x, env):
    if isinstance(x, Jet):
        return x
    space = next(iter(env.values())).space
    return space.constant(x)


# chart files


@dataclass
class ChartFile:
    """A chart read from text together with its named fields."""

    chart: Chart
    scalars: dict = field(default_factory=dict)
    vectors: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)


def _scalar_field(expr, names):
    return lambda p: evaluate(expr, p.u, names)


def _vector_field(exprs, names):
    return lambda p: jets.stack([evaluate(e, p.u, names) for e in exprs])


def _form_field(entries, names):
    def form(p):
        rows = [[evaluate(entries.get((i, j), sp.Integer(0)), p.u, names) for j in range(DIM5)] for i in range(DIM5)]
        return jets.stack(rows)
    return form


def _metric(entries, names):
    def metric(u):
        rows = [[evaluate(entries.get((i, j), sp.Integer(0)), u, names) for j in range(DIM5)] for i in range(DIM5)]
        return jets.stack(rows)
    return metric


def _indices(parts, where):
    try:
        i, j = (int(x) for x in parts)
    except ValueError:
        raise ExpressionError("{}: expected two integer indices".format(where)) from None
    if not (0 <= i < DIM5 and 0 <= j < DIM5):
        raise ExpressionError("{}: indices must lie in 0..{}".format(where, DIM5 - 1))
    return i, j


def loads(text: str, source: str = "<chart>", order: int = 3) -> ChartFile:
    """Read a chart file from a string; errors name ``source`` and the line."""
    name = source
    coords = None
    boxes = {}
    metric = {}
    scalars, vectors, forms = {}, {}, {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = "{}:{}".format(source, number)
        if ":" not in line:
            raise ExpressionError("{}: expected 'key: value'".format(where))
        key, value = (s.strip() for s in line.split(":", 1))
        parts = key.split()
        head = parts[0]
        if head == "name":
            name = value
            continue
        if head == "coordinates":
            coords = value.split()
            if len(coords) != DIM5 or len(set(coords)) != DIM5:
                raise ExpressionError("{}: need five distinct coordinate names".format(where))
            bad = [c for c in coords if not c.isidentifier() or c in _RESERVED]
            if bad:
                raise ExpressionError("{}: invalid coordinate name(s) {}".format(where, ", ".join(bad)))
            continue
        if coords is None:
            raise ExpressionError("{}: 'coordinates' must come first".format(where))
        if head == "box":
            if len(parts) != 2 or parts[1] not in coords:
                raise ExpressionError("{}: expected 'box <coordinate>: lo hi'".format(where))
            bounds = value.split()
            if len(bounds) != 2:
                raise ExpressionError("{}: a box needs two bounds".format(where))
            lo, hi = (float(parse(b, coords, where)) for b in bounds)
            if not lo < hi:
                raise ExpressionError("{}: empty box interval".format(where))
            boxes[parts[1]] = (lo, hi)
        elif head == "metric":
            i, j = _indices(parts[1:], where)
            metric[(i, j)] = metric[(j, i)] = parse(value, coords, where)
        elif head == "field":
            if len(parts) != 2:
                raise ExpressionError("{}: expected 'field <name>: expr'".format(where))
            scalars[parts[1]] = _scalar_field(parse(value, coords, where), coords)
        elif head == "vector":
            comps = [s.strip() for s in value.split(";")]
            if len(parts) != 2 or len(comps) != DIM5:
                raise ExpressionError("{}: expected 'vector <name>: e1; e2; e3; e4; e5'".format(where))
            vectors[parts[1]] = _vector_field([parse(c, coords, where) for c in comps], coords)
        elif head == "form":
            if len(parts) != 4:
                raise ExpressionError("{}: expected 'form <name> i j: expr'".format(where))
            i, j = _indices(parts[2:], where)
            if i == j:
                raise ExpressionError("{}: a 2-form has no diagonal entries".format(where))
            e = parse(value, coords, where)
            entries = forms.setdefault(parts[1], {})
            entries[(i, j)] = e
            entries[(j, i)] = -e
        else:
            raise ExpressionError("{}: unknown key {!r}".format(where, head))
    if coords is None:
        raise ExpressionError("{}: no coordinates given".format(source))
    if not metric:
        raise ExpressionError("{}: no metric entries given".format(source))
    box = tuple(boxes.get(c, (-1.0, 1.0)) for c in coords)
    klogger.debug("loaded chart {} from {} ({} fields)".format(name, source, len(scalars) + len(vectors) + len(forms)))
    chart = Chart(name, tuple(coords), _metric(metric, coords), box, None, order)
    return ChartFile(chart, scalars, vectors, {k: _form_field(v, coords) for k, v in forms.items()})


def load_chart(path: str, order: int = 3) -> ChartFile:
    try:
        with open(path, "r") as handle:
            text = handle.read()
    except OSError as error:
        raise ExpressionError("cannot read chart file {}: {}".format(path, error)) from None
    return loads(text, path, order)


def values(expr: sp.Expr, coordinates, point) -> float:
    """Plain float value of ``expr`` at ``point``."""
    subs = {sp.Symbol(c, real=True): float(v) for c, v in zip(coordinates, np.asarray(point, dtype=float))}
    return float(expr.evalf(subs=subs))

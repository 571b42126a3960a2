"""Closed-form expressions in ``z`` for the command line.

Grammar: numbers (``2``, ``0.5``, ``1e-3``, ``2j``), the imaginary unit ``i``/``I``/``j``,
the variable ``z``, parentheses and ``+ - * / ^`` with integer exponents.  Text is
tokenized against that list before sympy sees it.
"""

from __future__ import annotations

import re

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .criteria import AnalyticSample
from .errors import ExpressionError

Z = sp.Symbol("z")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?)|(?P<name>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*/^()]))"
)
_NAMES = {"z": Z, "i": sp.I, "I": sp.I, "j": sp.I}


def _tokenize(text):
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExpressionError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        if m.group("name") and m.group("name") not in _NAMES:
            raise ExpressionError(f"unknown name {m.group('name')!r}; only z and i are allowed")
        pos = m.end()


def _validate(expr):
    if expr.is_Number or expr is sp.I or expr == Z:
        return
    if isinstance(expr, (sp.Add, sp.Mul)):
        for a in expr.args:
            _validate(a)
        return
    if isinstance(expr, sp.Pow):
        if not expr.exp.is_Integer:
            raise ExpressionError(f"non-integer exponent in {expr}")
        _validate(expr.base)
        return
    raise ExpressionError(f"unsupported construct {expr}")


def parse_expression(text):
    """Parse ``text`` into a sympy expression in ``z``."""
    if not text or not text.strip():
        raise ExpressionError("empty expression")
    _tokenize(text)
    try:
        expr = parse_expr(
            text,
            local_dict=dict(_NAMES),
            global_dict={"Integer": sp.Integer, "Float": sp.Float, "Rational": sp.Rational,
                         "I": sp.I, "Symbol": sp.Symbol},
            transformations=standard_transformations + (convert_xor,),
        )
    except (SyntaxError, TypeError, NameError, ValueError) as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc}") from exc
    expr = sp.sympify(expr)
    _validate(expr)
    return expr


def to_function(expr):
    """Numpy callable of ``z`` returning complex arrays of the input shape."""
    fn = sp.lambdify(Z, expr, "numpy")

    def f(z):
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(np.asarray(fn(z), dtype=complex), z.shape)

    return f


def analytic_sample(text):
    """``AnalyticSample`` with symbolic derivatives; rejects ``f(0) != 0`` or ``f'(0) != 1``."""
    expr = parse_expression(text)
    d1 = sp.diff(expr, Z)
    d2 = sp.diff(d1, Z)
    d3 = sp.diff(d2, Z)
    s = AnalyticSample(to_function(expr), to_function(d1), to_function(d2), to_function(d3), text)
    err = s.normalization_error()
    if not np.isfinite(err) or err > 1e-12:
        raise ExpressionError(f"{text!r} is not normalized (needs f(0) = 0, f'(0) = 1)")
    return s


def laurent_coefficients(text):
    """Coefficients of ``z^-3, z^-4, ...`` for a finite Laurent polynomial in ``1/z``."""
    expr = sp.expand(parse_expression(text))
    u = sp.Symbol("u")
    try:
        poly = sp.Poly(sp.expand(expr.subs(Z, 1 / u)), u)
    except sp.PolynomialError as exc:
        raise ExpressionError(f"{text!r} is not a polynomial in 1/z") from exc
    terms = dict(poly.terms())
    coeffs = {m[0]: complex(c) for m, c in terms.items()}
    if any(m < 3 for m in coeffs if coeffs[m] != 0):
        raise ExpressionError("only powers z^-3 and below are integrable outside the disk")
    if not coeffs:
        return np.zeros(0, dtype=complex)
    top = max(coeffs)
    return np.array([coeffs.get(m, 0j) for m in range(3, top + 1)], dtype=complex)

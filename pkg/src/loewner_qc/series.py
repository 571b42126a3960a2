"""Truncated complex power series with exact ring arithmetic through a fixed order."""

from __future__ import annotations

import numpy as np

from .errors import SeriesError


class TruncatedSeries:
    """Coefficients ``c_0..c_N`` of a power series, all operations exact modulo ``z^(N+1)``.

    >>> s = TruncatedSeries([1, 1], order=3)
    >>> (s * s).coeffs.real.tolist()
    [1.0, 2.0, 1.0, 0.0]
    """

    __slots__ = ("coeffs",)
    # make numpy scalars defer to the reflected operators below
    __array_ufunc__ = None

    def __init__(self, coeffs, order=None):
        c = np.asarray(coeffs, dtype=complex).ravel()
        if order is None:
            order = len(c) - 1
        if order < 0:
            raise SeriesError("order must be >= 0")
        out = np.zeros(order + 1, dtype=complex)
        m = min(len(c), order + 1)
        out[:m] = c[:m]
        self.coeffs = out

    @property
    def order(self):
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, order):
        return cls([value], order)

    @classmethod
    def variable(cls, order):
        """The series ``z``."""
        return cls([0.0, 1.0], order)

    def __repr__(self):
        return f"TruncatedSeries({self.coeffs.tolist()!r})"

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.order != self.order:
                raise SeriesError(f"order mismatch: {self.order} vs {other.order}")
            return other
        return TruncatedSeries([other], self.order)

    def __add__(self, other):
        other = self._coerce(other)
        return TruncatedSeries(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        return TruncatedSeries(self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.coeffs * complex(other))
        other = self._coerce(other)
        return TruncatedSeries(np.convolve(self.coeffs, other.coeffs)[: self.order + 1])

    __rmul__ = __mul__

    def reciprocal(self):
        c = self.coeffs
        if c[0] == 0:
            raise SeriesError("reciprocal needs a nonzero constant term")
        n = self.order
        out = np.zeros(n + 1, dtype=complex)
        out[0] = 1.0 / c[0]
        for j in range(1, n + 1):
            out[j] = -np.dot(c[1 : j + 1], out[j - 1 :: -1][:j]) / c[0]
        return TruncatedSeries(out)

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.coeffs / complex(other))
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise SeriesError("only non-negative integer powers are supported")
        result = TruncatedSeries.constant(1.0, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def compose(self, inner):
        """``self(inner(z))``; ``inner`` must have zero constant term."""
        inner = self._coerce(inner)
        if inner.coeffs[0] != 0:
            raise SeriesError("composition needs inner series with zero constant term")
        # Horner in the inner series
        result = TruncatedSeries.constant(self.coeffs[-1], self.order)
        for c in self.coeffs[-2::-1]:
            result = result * inner + c
        return result

    def scale_argument(self, factor):
        """Series of ``z -> s(factor*z)``."""
        return TruncatedSeries(self.coeffs * complex(factor) ** np.arange(self.order + 1))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def allclose(self, other, atol=1e-12):
        other = self._coerce(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))

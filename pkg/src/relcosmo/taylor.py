"""Second-order forward-mode Taylor numbers.

A :class:`Taylor2` carries a value together with its gradient and Hessian
with respect to a fixed set of independent variables.  Metric components are
written once with ``numpy`` ufuncs (``np.sin``, ``np.exp``...) and evaluated
either on floats or on Taylor numbers; numpy dispatches ufuncs on generic
objects to the method of the same name, so the same formula yields exact
first and second derivatives.

Setting ``order=1`` drops the Hessian bookkeeping, which is all the geodesic
equation needs.
"""

from __future__ import annotations

import math

import numpy as np


class Taylor2:
    __slots__ = ("val", "grad", "hess")
    __array_priority__ = 1000

    def __init__(self, val, grad, hess=None):
        self.val = float(val)
        self.grad = grad
        self.hess = hess

    # construction ---------------------------------------------------------

    @classmethod
    def variables(cls, x, order=2):
        """Independent variables seeded at the point ``x``."""
        x = np.asarray(x, dtype=float)
        n = x.size
        eye = np.eye(n)
        out = []
        for i in range(n):
            hess = np.zeros((n, n)) if order >= 2 else None
            out.append(cls(x[i], eye[i].copy(), hess))
        return out

    def _const(self, c):
        n = self.grad.size
        return Taylor2(c, np.zeros(n), None if self.hess is None else np.zeros((n, n)))

    def chain(self, f0, f1, f2):
        """Compose with a scalar function given its value and two derivatives at ``val``."""
        grad = f1 * self.grad
        hess = None
        if self.hess is not None:
            hess = f1 * self.hess + f2 * np.outer(self.grad, self.grad)
        return Taylor2(f0, grad, hess)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Taylor2):
            hess = None if self.hess is None else self.hess + other.hess
            return Taylor2(self.val + other.val, self.grad + other.grad, hess)
        return Taylor2(self.val + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Taylor2(-self.val, -self.grad, None if self.hess is None else -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Taylor2):
            grad = self.grad * other.val + other.grad * self.val
            hess = None
            if self.hess is not None:
                cross = np.outer(self.grad, other.grad)
                hess = self.hess * other.val + other.hess * self.val + cross + cross.T
            return Taylor2(self.val * other.val, grad, hess)
        other = float(other)
        return Taylor2(self.val * other, self.grad * other,
                       None if self.hess is None else self.hess * other)

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.val
        return self.chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if isinstance(other, Taylor2):
            return self * other.reciprocal()
        return self * (1.0 / float(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Taylor2):
            return (self.log() * p).exp()
        p = float(p)
        if p == 2.0:
            return self * self
        v = self.val
        return self.chain(v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))

    def __rpow__(self, base):
        return (self * math.log(base)).exp()

    # comparisons act on the value only
    def __lt__(self, other):
        return self.val < _value(other)

    def __le__(self, other):
        return self.val <= _value(other)

    def __gt__(self, other):
        return self.val > _value(other)

    def __ge__(self, other):
        return self.val >= _value(other)

    def __float__(self):
        return self.val

    def __repr__(self):
        return f"Taylor2({self.val!r})"

    # elementary functions (numpy ufunc dispatch) --------------------------

    def sin(self):
        s, c = math.sin(self.val), math.cos(self.val)
        return self.chain(s, c, -s)

    def cos(self):
        s, c = math.sin(self.val), math.cos(self.val)
        return self.chain(c, -s, -c)

    def tan(self):
        t = math.tan(self.val)
        sec2 = 1.0 + t * t
        return self.chain(t, sec2, 2.0 * t * sec2)

    def exp(self):
        e = math.exp(self.val)
        return self.chain(e, e, e)

    def log(self):
        v = self.val
        return self.chain(math.log(v), 1.0 / v, -1.0 / v**2)

    def sqrt(self):
        r = math.sqrt(self.val)
        return self.chain(r, 0.5 / r, -0.25 / (r * self.val))

    def sinh(self):
        s, c = math.sinh(self.val), math.cosh(self.val)
        return self.chain(s, c, s)

    def cosh(self):
        s, c = math.sinh(self.val), math.cosh(self.val)
        return self.chain(c, s, c)

    def tanh(self):
        t = math.tanh(self.val)
        d = 1.0 - t * t
        return self.chain(t, d, -2.0 * t * d)

    def arctan(self):
        v = self.val
        d = 1.0 / (1.0 + v * v)
        return self.chain(math.atan(v), d, -2.0 * v * d * d)

    def arcsin(self):
        v = self.val
        r = 1.0 / math.sqrt(1.0 - v * v)
        return self.chain(math.asin(v), r, v * r**3)

    def arcsinh(self):
        v = self.val
        r = 1.0 / math.sqrt(1.0 + v * v)
        return self.chain(math.asinh(v), r, -v * r**3)

    def square(self):
        return self * self


def _value(x):
    return x.val if isinstance(x, Taylor2) else x


def value(x):
    """Plain float value of a float or Taylor number."""
    return float(_value(x))


def lift(x, f0, f1, f2):
    """Apply a univariate function known through (f, f', f'') at ``value(x)``.

    Used for tabulated or numerically integrated functions such as a scale
    factor obtained from an ODE solve.
    """
    if isinstance(x, Taylor2):
        return x.chain(f0, f1, f2)
    return f0


def matrix_jet(entries, n, order=2):
    """Split a nested list of Taylor numbers into value/gradient/Hessian arrays.

    Returns arrays shaped ``(r, s)``, ``(r, s, n)`` and ``(r, s, n, n)``;
    derivative axes come last.  Plain floats are treated as constants.
    """
    rows = len(entries)
    cols = len(entries[0])
    val = np.zeros((rows, cols))
    grad = np.zeros((rows, cols, n))
    hess = np.zeros((rows, cols, n, n)) if order >= 2 else None
    for i in range(rows):
        for j in range(cols):
            e = entries[i][j]
            if isinstance(e, Taylor2):
                val[i, j] = e.val
                grad[i, j] = e.grad
                if hess is not None:
                    hess[i, j] = e.hess
            else:
                val[i, j] = float(e)
    return val, grad, hess

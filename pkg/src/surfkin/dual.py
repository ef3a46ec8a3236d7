"""Second-order dual numbers (value, first and second derivative) over numpy arrays."""

from __future__ import annotations

import numpy as np


class Dual2:
    """Truncated Taylor jet ``f + f' e + f'' e^2 / 2`` in one variable.

    Components may be scalars or arrays of a common shape.
    """

    __slots__ = ("v", "d1", "d2")

    def __init__(self, v, d1=0.0, d2=0.0):
        self.v = np.asarray(v, dtype=float)
        self.d1 = np.asarray(d1, dtype=float)
        self.d2 = np.asarray(d2, dtype=float)

    @classmethod
    def variable(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x, np.ones_like(x), np.zeros_like(x))

    @classmethod
    def constant(cls, c):
        return cls(c, 0.0, 0.0)

    def as_tuple(self):
        return self.v, self.d1, self.d2

    def __repr__(self):
        return f"Dual2({self.v!r}, {self.d1!r}, {self.d2!r})"

    def _chain(self, f0, f1, f2):
        # f(g)'' = f''(g) g'^2 + f'(g) g''
        return Dual2(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)

    def __add__(self, other):
        other = _lift(other)
        return Dual2(self.v + other.v, self.d1 + other.d1, self.d2 + other.d2)

    __radd__ = __add__

    def __neg__(self):
        return Dual2(-self.v, -self.d1, -self.d2)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        o = _lift(other)
        return Dual2(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        if np.any(self.v == 0.0):
            raise ZeroDivisionError("division by a dual number with zero value")
        inv = 1.0 / self.v
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        return self * _lift(other).reciprocal()

    def __rtruediv__(self, other):
        return _lift(other) * self.reciprocal()

    def __pow__(self, other):
        o = _lift(other)
        if _is_const(o) and o.v.ndim == 0:
            p = float(o.v)
            if p == round(p):
                if p < 0 and np.any(self.v == 0.0):
                    raise ZeroDivisionError("negative power of zero")
            elif np.any(self.v <= 0.0):
                raise ValueError("non-integer power of a non-positive base")
            f0 = self.v ** p
            f1 = p * self.v ** (p - 1) if p != 0 else np.zeros_like(self.v)
            f2 = p * (p - 1) * self.v ** (p - 2) if p not in (0.0, 1.0) else np.zeros_like(self.v)
            return self._chain(f0, f1, f2)
        return exp(o * log(self))

    def __rpow__(self, other):
        return _lift(other) ** self


def _lift(x):
    return x if isinstance(x, Dual2) else Dual2.constant(x)


def _is_const(d):
    return not np.any(d.d1) and not np.any(d.d2)


def sin(x):
    x = _lift(x)
    s, c = np.sin(x.v), np.cos(x.v)
    return x._chain(s, c, -s)


def cos(x):
    x = _lift(x)
    s, c = np.sin(x.v), np.cos(x.v)
    return x._chain(c, -s, -c)


def sinh(x):
    x = _lift(x)
    s, c = np.sinh(x.v), np.cosh(x.v)
    return x._chain(s, c, s)


def cosh(x):
    x = _lift(x)
    s, c = np.sinh(x.v), np.cosh(x.v)
    return x._chain(c, s, c)


def exp(x):
    x = _lift(x)
    e = np.exp(x.v)
    return x._chain(e, e, e)


def log(x):
    x = _lift(x)
    if np.any(x.v <= 0.0):
        raise ValueError("log of a non-positive value")
    inv = 1.0 / x.v
    return x._chain(np.log(x.v), inv, -inv * inv)


def sqrt(x):
    x = _lift(x)
    if np.any(x.v <= 0.0):
        raise ValueError("sqrt of a non-positive value (derivative undefined)")
    r = np.sqrt(x.v)
    return x._chain(r, 0.5 / r, -0.25 / (r * x.v))


FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
}

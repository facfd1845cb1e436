"""Truncated Taylor series ("jets") with numpy broadcasting.

A :class:`Jet` holds the coefficients ``c[0..m]`` of ``f(s0 + h)`` in powers of
``h``; ``c[0]`` is the value and ``j! * c[j]`` the j-th derivative.  Jets
interoperate with numpy ufuncs, so a function written with ``np.exp``,
``np.sin``, ... can be evaluated on plain arrays or differentiated along a
line without change.
"""

from __future__ import annotations

import math

import numpy as np


class Jet:
    __array_priority__ = 100

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    @classmethod
    def variable(cls, value, slope, order):
        """Jet of ``s -> value + slope * s`` truncated at ``order``."""
        value, slope = np.broadcast_arrays(np.asarray(value, float), np.asarray(slope, float))
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        if order >= 1:
            c[1] = slope
        return cls(c)

    @classmethod
    def constant(cls, value, order):
        value = np.asarray(value, float)
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        return cls(c)

    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    @property
    def shape(self):
        return self.c.shape[1:]

    def derivatives(self):
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], float)
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape})"

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        a, b = _align(self.c, other.c)
        return Jet(a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            a, b = _align(self.c, np.asarray(other, float)[None, ...])
            return Jet(a * b)
        return Jet(_cauchy(self.c, other.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            a, b = _align(self.c, np.asarray(other, float)[None, ...])
            return Jet(a / b)
        return _divide(self.c, other.c)

    def __rtruediv__(self, other):
        return _divide(self._coerce(other).c, self.c)

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(np.ones(self.shape), self.order)
            base = self
            while p:
                if p & 1:
                    out = out * base
                base = base * base
                p >>= 1
            return out
        return _real_power(self, float(p))

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.c[(slice(None),) + idx])

    # numpy interop ----------------------------------------------------------

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs.get("out") is not None:
            return NotImplemented
        handler = _UFUNCS.get(ufunc)
        if handler is None:
            return NotImplemented
        return handler(*inputs)


def _align(a, b):
    # pad batch dims so arrays whose first axis is the coefficient axis broadcast
    rank = max(a.ndim, b.ndim)
    a = a.reshape((a.shape[0],) + (1,) * (rank - a.ndim) + a.shape[1:])
    b = b.reshape((b.shape[0],) + (1,) * (rank - b.ndim) + b.shape[1:])
    return a, b


def _cauchy(a, b):
    m = min(a.shape[0], b.shape[0])
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.zeros((m,) + shape)
    for k in range(m):
        acc = out[k]
        for i in range(k + 1):
            acc += a[i] * b[k - i]
    return out


def _divide(a, b):
    m = min(a.shape[0], b.shape[0])
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    q = np.zeros((m,) + shape)
    for k in range(m):
        acc = np.array(a[k], dtype=float, copy=True) + np.zeros(shape)
        for i in range(1, k + 1):
            acc -= b[i] * q[k - i]
        q[k] = acc / b[0]
    return Jet(q)


def _as_jet(x, order):
    return x if isinstance(x, Jet) else Jet.constant(x, order)


def jexp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    a = x.c
    e = np.zeros_like(a)
    e[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(a[0])
        for i in range(1, k + 1):
            acc += i * a[i] * e[k - i]
        e[k] = acc / k
    return Jet(e)


def _sincos(x):
    a = x.c
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    s[0] = np.sin(a[0])
    c[0] = np.cos(a[0])
    for k in range(1, a.shape[0]):
        acc_s = np.zeros_like(a[0])
        acc_c = np.zeros_like(a[0])
        for i in range(1, k + 1):
            acc_s += i * a[i] * c[k - i]
            acc_c += i * a[i] * s[k - i]
        s[k] = acc_s / k
        c[k] = -acc_c / k
    return Jet(s), Jet(c)


def jsin(x):
    return _sincos(x)[0] if isinstance(x, Jet) else np.sin(x)


def jcos(x):
    return _sincos(x)[1] if isinstance(x, Jet) else np.cos(x)


def jsqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(x)
    a = x.c
    r = np.zeros_like(a)
    r[0] = np.sqrt(a[0])
    for k in range(1, a.shape[0]):
        acc = a[k].copy()
        for i in range(1, k):
            acc -= r[i] * r[k - i]
        r[k] = acc / (2.0 * r[0])
    return Jet(r)


def jlog(x):
    if not isinstance(x, Jet):
        return np.log(x)
    a = x.c
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for k in range(1, a.shape[0]):
        acc = k * a[k]
        for i in range(1, k):
            acc = acc - i * out[i] * a[k - i]
        out[k] = acc / (k * a[0])
    return Jet(out)


def _real_power(x, p):
    a = x.c
    out = np.zeros_like(a)
    out[0] = a[0] ** p
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(a[0])
        for i in range(1, k + 1):
            acc += ((p + 1.0) * i - k) * a[i] * out[k - i]
        out[k] = acc / (k * a[0])
    return Jet(out)


def jabs(x):
    """|x| for jets whose value stays away from zero (sign is frozen)."""
    if not isinstance(x, Jet):
        return np.abs(x)
    return x * np.sign(x.value)


def where(cond, x, y):
    """Elementwise select for arrays or jets (selection by the value of ``cond``)."""
    if not isinstance(x, Jet) and not isinstance(y, Jet):
        return np.where(cond, x, y)
    order = x.order if isinstance(x, Jet) else y.order
    xc = _as_jet(x, order).c
    yc = _as_jet(y, order).c
    cond = np.asarray(cond)
    shape = np.broadcast_shapes(cond.shape, xc.shape[1:], yc.shape[1:])
    xc = _broadcast_coeffs(xc, shape)
    yc = _broadcast_coeffs(yc, shape)
    return Jet(np.where(cond[None, ...], xc, yc))


def _broadcast_coeffs(c, shape):
    # align batch dims to the right, keeping the coefficient axis first
    pad = len(shape) - (c.ndim - 1)
    c = c.reshape((c.shape[0],) + (1,) * pad + c.shape[1:])
    return np.broadcast_to(c, (c.shape[0],) + shape)


def value_of(x):
    return x.value if isinstance(x, Jet) else np.asarray(x)


def _binary(op):
    def handler(a, b):
        return op(a, b)

    return handler


_UFUNCS = {
    np.add: _binary(lambda a, b: a + b if isinstance(a, Jet) else b + a),
    np.subtract: _binary(lambda a, b: a - b if isinstance(a, Jet) else b.__rsub__(a)),
    np.multiply: _binary(lambda a, b: a * b if isinstance(a, Jet) else b * a),
    np.true_divide: _binary(lambda a, b: a / b if isinstance(a, Jet) else b.__rtruediv__(a)),
    np.negative: lambda a: -a,
    np.square: lambda a: a * a,
    np.power: lambda a, p: a ** p,
    np.exp: jexp,
    np.sin: jsin,
    np.cos: jcos,
    np.sqrt: jsqrt,
    np.log: jlog,
    np.absolute: jabs,
}


def smooth_step_parts(t):
    """``exp(-1/t)`` for ``t > 0`` and 0 otherwise, for arrays or jets."""
    t0 = value_of(t)
    # below ~1e-3 the value and every derivative we ever request underflow to 0
    live = t0 > 1e-3
    safe = where(live, t, 1.0)
    return where(live, jexp(-1.0 / safe), 0.0)

"""Truncated bivariate Taylor jets.

A :class:`Jet` carries the value and every partial derivative up to total
order ``K`` of a function of ``(u1, u2)`` at one point or at a batch of points.
Jets take part in ordinary arithmetic and in the numpy ufuncs listed in
``_UNARY``, so closed-form expressions written with ``np.sin``, ``np.cosh``,
``**`` and friends evaluate unchanged on floats, arrays and jets.

Coefficients are stored normalized, ``c[i, j] = d^(i+j) f / du1^i du2^j / (i! j!)``.
"""

from math import factorial

import numpy as np

from . import _kernels


class Jet:
    """Value plus partial derivatives to total order ``order``."""

    __slots__ = ("c", "order")
    __array_priority__ = 1000

    def __init__(self, coeffs, order):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[:2] != (order + 1, order + 1):
            raise ValueError(f"coefficient block must be {(order + 1, order + 1)}, got {coeffs.shape[:2]}")
        self.c = coeffs
        self.order = order

    # -- construction -----------------------------------------------------

    @classmethod
    def constant(cls, value, order):
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1, order + 1) + value.shape)
        c[0, 0] = value
        return cls(c, order)

    @classmethod
    def variable(cls, value, axis, order):
        """The coordinate function ``u1`` (``axis=0``) or ``u2`` (``axis=1``)."""
        jet = cls.constant(value, order)
        if order >= 1:
            if axis == 0:
                jet.c[1, 0] = 1.0
            elif axis == 1:
                jet.c[0, 1] = 1.0
            else:
                raise ValueError("axis must be 0 or 1")
        return jet

    @classmethod
    def coordinates(cls, u1, u2, order):
        u1, u2 = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
        return cls.variable(u1, 0, order), cls.variable(u2, 1, order)

    # -- inspection -------------------------------------------------------

    @property
    def batch_shape(self):
        return self.c.shape[2:]

    @property
    def value(self):
        return self.c[0, 0][()]

    def partial(self, i, j):
        """``d^(i+j) f / du1^i du2^j`` at the expansion point(s)."""
        if i + j > self.order:
            raise ValueError(f"partial ({i},{j}) exceeds jet order {self.order}")
        return (self.c[i, j] * (factorial(i) * factorial(j)))[()]

    def d(self, i=0, j=0):
        """Jet of the partial derivative ``d^(i+j)/du1^i du2^j`` (order drops by ``i+j``)."""
        K = self.order - i - j
        if K < 0:
            raise ValueError(f"cannot differentiate an order-{self.order} jet {i + j} times")
        a = np.arange(K + 1)
        w1 = np.ones(K + 1)
        w2 = np.ones(K + 1)
        for s in range(1, i + 1):
            w1 *= a + s
        for s in range(1, j + 1):
            w2 *= a + s
        w = (w1[:, None] * w2[None, :]).reshape((K + 1, K + 1) + (1,) * len(self.batch_shape))
        return Jet(self.c[i : i + K + 1, j : j + K + 1] * w, K)

    def truncate(self, order):
        if order >= self.order:
            return self
        c = self.c[: order + 1, : order + 1].copy()
        c *= _kernels._triangle_mask(order).reshape((order + 1, order + 1) + (1,) * len(self.batch_shape))
        return Jet(c, order)

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.value!r})"

    # -- helpers ----------------------------------------------------------

    def _flat(self, batch):
        K = self.order
        c = np.broadcast_to(self.c, (K + 1, K + 1) + batch)
        return c.reshape(K + 1, K + 1, -1)

    @staticmethod
    def _coerce(a, b):
        """Bring two operands to jets of a common order and batch shape."""
        if not isinstance(a, Jet):
            a = Jet.constant(a, b.order)
        if not isinstance(b, Jet):
            b = Jet.constant(b, a.order)
        K = min(a.order, b.order)
        a, b = a.truncate(K), b.truncate(K)
        batch = np.broadcast_shapes(a.batch_shape, b.batch_shape)
        return a, b, K, batch

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __pos__(self):
        return self

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            batch = np.broadcast_shapes(self.batch_shape, other.shape)
            c = np.broadcast_to(self.c, self.c.shape[:2] + batch).copy()
            c[0, 0] += other
            return Jet(c, self.order)
        a, b, K, _ = Jet._coerce(self, other)
        return Jet(a.c + b.c, K)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * np.asarray(other, dtype=float), self.order)
        a, b, K, batch = Jet._coerce(self, other)
        out = _kernels.trunc_mul(a._flat(batch), b._flat(batch), K)
        return Jet(out.reshape((K + 1, K + 1) + batch), K)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / np.asarray(other, dtype=float), self.order)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(log(self) * p)
        if float(p) == int(p) and int(p) >= 0:
            n = int(p)
            result = Jet.constant(np.ones(self.batch_shape), self.order)
            base = self
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        return _power(self, float(p))

    def __rpow__(self, base):
        return exp(self * np.log(base))

    # -- numpy interop ----------------------------------------------------

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs.get("out") is not None:
            return NotImplemented
        if ufunc in _UNARY and len(inputs) == 1:
            return _UNARY[ufunc](inputs[0])
        if ufunc in _BINARY and len(inputs) == 2:
            return _BINARY[ufunc](*inputs)
        return NotImplemented


# ---------------------------------------------------------------------------
# elementary functions via univariate Taylor series composition


def _apply(x, coeff_fn):
    """Return ``F(x)`` where ``coeff_fn(x0, K)`` gives ``F^(k)(x0)/k!`` for k=0..K."""
    K = x.order
    batch = x.batch_shape
    x0 = x.c[0, 0]
    fk = np.asarray(coeff_fn(x0, K), dtype=float).reshape((K + 1,) + batch)
    delta = x.c.copy()
    delta[0, 0] = 0.0
    out = _kernels.compose(fk.reshape(K + 1, -1), delta.reshape(K + 1, K + 1, -1), K)
    return Jet(out.reshape((K + 1, K + 1) + batch), K)


def _fact(K):
    return np.array([factorial(k) for k in range(K + 1)], dtype=float)


def _bcast(k_arr, x0):
    return k_arr.reshape((-1,) + (1,) * np.ndim(x0))


def _exp_coeffs(x0, K):
    return np.exp(x0)[None] / _bcast(_fact(K), x0) * np.ones((K + 1,) + np.shape(x0))


def _sin_coeffs(x0, K):
    k = np.arange(K + 1)
    return np.sin(x0[None] + _bcast(k * np.pi / 2, x0)) / _bcast(_fact(K), x0)


def _cos_coeffs(x0, K):
    k = np.arange(K + 1)
    return np.cos(x0[None] + _bcast(k * np.pi / 2, x0)) / _bcast(_fact(K), x0)


def _sinh_coeffs(x0, K):
    k = _bcast(np.arange(K + 1), x0)
    return np.where(k % 2 == 0, np.sinh(x0)[None], np.cosh(x0)[None]) / _bcast(_fact(K), x0)


def _cosh_coeffs(x0, K):
    k = _bcast(np.arange(K + 1), x0)
    return np.where(k % 2 == 0, np.cosh(x0)[None], np.sinh(x0)[None]) / _bcast(_fact(K), x0)


def _log_coeffs(x0, K):
    out = np.empty((K + 1,) + np.shape(x0))
    out[0] = np.log(x0)
    for k in range(1, K + 1):
        out[k] = (-1.0) ** (k - 1) / (k * x0**k)
    return out


def _power_coeffs(p):
    def coeffs(x0, K):
        out = np.empty((K + 1,) + np.shape(x0))
        binom = 1.0
        for k in range(K + 1):
            out[k] = binom * np.power(x0, p - k)
            binom *= (p - k) / (k + 1)
        return out

    return coeffs


def exp(x):
    return _apply(x, _exp_coeffs) if isinstance(x, Jet) else np.exp(x)


def log(x):
    return _apply(x, _log_coeffs) if isinstance(x, Jet) else np.log(x)


def sin(x):
    return _apply(x, _sin_coeffs) if isinstance(x, Jet) else np.sin(x)


def cos(x):
    return _apply(x, _cos_coeffs) if isinstance(x, Jet) else np.cos(x)


def sinh(x):
    return _apply(x, _sinh_coeffs) if isinstance(x, Jet) else np.sinh(x)


def cosh(x):
    return _apply(x, _cosh_coeffs) if isinstance(x, Jet) else np.cosh(x)


def _power(x, p):
    return _apply(x, _power_coeffs(p))


def sqrt(x):
    return _power(x, 0.5) if isinstance(x, Jet) else np.sqrt(x)


def reciprocal(x):
    if isinstance(x, Jet):
        return _power(x, -1.0)
    return 1.0 / np.asarray(x, dtype=float)


def absolute(x):
    if isinstance(x, Jet):
        return x * np.sign(x.c[0, 0])
    return np.abs(x)


def tanh(x):
    return sinh(x) / cosh(x) if isinstance(x, Jet) else np.tanh(x)


_UNARY = {
    np.exp: exp,
    np.log: log,
    np.sin: sin,
    np.cos: cos,
    np.sinh: sinh,
    np.cosh: cosh,
    np.tanh: tanh,
    np.sqrt: sqrt,
    np.reciprocal: reciprocal,
    np.absolute: absolute,
    np.negative: lambda x: -x,
    np.positive: lambda x: x,
    np.square: lambda x: x * x,
}

_BINARY = {
    np.add: lambda a, b: a + b if isinstance(a, Jet) else b + a,
    np.subtract: lambda a, b: a - b if isinstance(a, Jet) else (-b) + a,
    np.multiply: lambda a, b: a * b if isinstance(a, Jet) else b * a,
    np.true_divide: lambda a, b: a / b if isinstance(a, Jet) else b.__rtruediv__(a),
    np.power: lambda a, b: a**b if isinstance(a, Jet) else b.__rpow__(a),
}


def value_of(x):
    """Plain value of a jet, or ``x`` itself."""
    return x.value if isinstance(x, Jet) else x


def lift(fn, u1, u2, order):
    """Evaluate ``fn(u1, u2)`` on coordinate jets; constant results become constant jets."""
    j1, j2 = Jet.coordinates(u1, u2, order)
    out = fn(j1, j2)
    if not isinstance(out, Jet):
        out = Jet.constant(np.broadcast_to(np.asarray(out, dtype=float), j1.batch_shape), order)
    return out

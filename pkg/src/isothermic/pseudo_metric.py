"""Sign-diagonal metrics on R^3 and the pseudo-complex numbers C_eps2.

Vectors are plain length-3 sequences.  The functions here only index them, so
the same code serves ``ndarray`` vectors of shape ``(3, ...)`` and tuples of
:class:`~isothermic.jets.Jet` components.
"""

from dataclasses import dataclass
import itertools

import numpy as np


def _sign(value, name):
    if value not in (1, -1):
        raise ValueError(f"{name} must be +1 or -1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class Signature:
    """The metric eps1 dx^2 + eps2 dy^2 + eps3 dz^2."""

    eps1: int = 1
    eps2: int = 1
    eps3: int = 1

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3"):
            object.__setattr__(self, name, _sign(getattr(self, name), name))

    @property
    def eps(self):
        """eps1 * eps2, the sign in the conformal class eps1 du1^2 + eps2 du2^2."""
        return self.eps1 * self.eps2

    @property
    def diag(self):
        return np.array([self.eps1, self.eps2, self.eps3], dtype=float)

    def as_list(self):
        return [self.eps1, self.eps2, self.eps3]

    @classmethod
    def all(cls):
        """All eight signatures."""
        return [cls(*s) for s in itertools.product((1, -1), repeat=3)]

    def __str__(self):
        return "(" + ",".join("+" if e > 0 else "-" for e in self.as_list()) + ")"


def _pack(components):
    if any(hasattr(c, "order") for c in components):
        return tuple(components)
    return np.array(np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in components]))


def inner(u, v, sig):
    """<u, v> = eps1 u_x v_x + eps2 u_y v_y + eps3 u_z v_z."""
    return sig.eps1 * u[0] * v[0] + sig.eps2 * u[1] * v[1] + sig.eps3 * u[2] * v[2]


def pseudo_cross(u, v, sig):
    """The vector w with <w, t> = det[u v t] for every t.

    w is orthogonal to u and v in ``sig`` and equals the Euclidean cross product
    when ``sig`` is (+,+,+).
    """
    cx = u[1] * v[2] - u[2] * v[1]
    cy = u[2] * v[0] - u[0] * v[2]
    cz = u[0] * v[1] - u[1] * v[0]
    return _pack([sig.eps1 * cx, sig.eps2 * cy, sig.eps3 * cz])


def combine(*terms):
    """Sum of ``scalar * vector`` pairs, componentwise."""
    out = [0.0, 0.0, 0.0]
    for scalar, vec in terms:
        for k in range(3):
            out[k] = out[k] + scalar * vec[k]
    return _pack(out)


# ---------------------------------------------------------------------------
# pseudo-complex numbers


@dataclass(frozen=True)
class PseudoComplex:
    """re + i im with i^2 = -eps2 (complex for eps2 = 1, split-complex for eps2 = -1).

    ``re`` and ``im`` may be floats, arrays or jets.
    """

    re: object
    im: object = 0.0
    eps2: int = 1

    def __post_init__(self):
        object.__setattr__(self, "eps2", _sign(self.eps2, "eps2"))

    @classmethod
    def coerce(cls, value, eps2):
        if isinstance(value, PseudoComplex):
            if value.eps2 != eps2:
                raise ValueError("mixed ε₂ algebras")
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag, eps2)
        if isinstance(value, (tuple, list)):
            return cls(value[0], value[1], eps2)
        return cls(value, 0.0, eps2)

    def _other(self, other):
        return PseudoComplex.coerce(other, self.eps2)

    def __add__(self, other):
        other = self._other(other)
        return PseudoComplex(self.re + other.re, self.im + other.im, self.eps2)

    __radd__ = __add__

    def __neg__(self):
        return PseudoComplex(-self.re, -self.im, self.eps2)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        return pc_mul(self, self._other(other))

    __rmul__ = __mul__

    def conj(self):
        return PseudoComplex(self.re, -self.im, self.eps2)

    def norm2(self):
        """z conj(z) = re^2 + eps2 im^2 (indefinite when eps2 = -1)."""
        return self.re * self.re + self.eps2 * self.im * self.im

    def isclose(self, other, tol=1e-12):
        other = self._other(other)
        return abs(self.re - other.re) <= tol and abs(self.im - other.im) <= tol


def pc_mul(a, b):
    if a.eps2 != b.eps2:
        raise ValueError("mixed ε₂ algebras")
    return PseudoComplex(
        a.re * b.re - a.eps2 * a.im * b.im,
        a.re * b.im + a.im * b.re,
        a.eps2,
    )


def pc_eval_poly(coeffs, z):
    """Value and derivative of sum_k coeffs[k] z^k (ascending powers), by Horner."""
    if len(coeffs) == 0:
        raise ValueError("empty coefficient list")
    coeffs = [PseudoComplex.coerce(c, z.eps2) for c in coeffs]
    value = coeffs[-1]
    deriv = PseudoComplex(0.0, 0.0, z.eps2)
    for c in reversed(coeffs[:-1]):
        deriv = deriv * z + value
        value = value * z + c
    return value, deriv

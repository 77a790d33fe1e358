"""The pseudo-Calapso operator and its known solution families.

For a nonvanishing function w(u1, u2) the operator is

    C[w] = D(w_12 / w) + k (w^2)_12,     D T = T_11 + eps T_22,

with eps = eps1 eps2 and coupling k = eps1 eps3.  Substituting the second
fundamental form into the Gauss equation D phi = -eps2 e g e^(-2 phi) gives
k = -eps2 eps eps3 = eps1 eps3; the often-quoted k = eps2 agrees only when
eps2 = eps1 eps3 and is available as ``printed=True``.

Two evaluation routes are provided: exact jets of order 4, and nested
fourth-order central differences at steps 2h and h combined by Richardson
extrapolation.  The second exists to cross-check the first.
"""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .diffgeo import DegeneracyError, DomainError, ScalarField, Surface, grid_points, unit_normal_jets
from .dupin import Case, bases, curvature_pair
from .jets import Jet
from .pseudo_metric import PseudoComplex, inner, pc_eval_poly

SQRT2 = math.sqrt(2.0)
#: |w| at or below this is treated as a zero of the field
ZERO_TOL = 1e-10
#: exclusion thresholds for the holomorphic family
SINGULAR_TOL = 1e-6
LIGHTLIKE_TOL = 1e-10


class Residual(NamedTuple):
    value: object
    error: object


@dataclass(frozen=True)
class CalapsoPair:
    omega: ScalarField
    Omega: ScalarField


# ---------------------------------------------------------------------------
# the operator


def _check_nonzero(values):
    if np.any(np.abs(values) <= ZERO_TOL):
        raise DegeneracyError("field zero: ω,₁₂/ω undefined")


def coupling(sig, printed=False):
    """Sign in front of (w^2)_12."""
    return sig.eps2 if printed else sig.eps1 * sig.eps3


def _residual_jet(w, u1, u2, sig, k):
    J = w.jet(u1, u2, 4)
    _check_nonzero(J.value)
    # C[w] is even in w; fixing the sign first makes C[-w] == C[w] bit for bit
    J = J * np.sign(J.value)
    q = J.d(1, 1) / J.truncate(2)
    lap_terms = (q.partial(2, 0), sig.eps * q.partial(0, 2))
    sq = (J * J).partial(1, 1)
    value = lap_terms[0] + lap_terms[1] + k * sq
    # rounding in w's coefficients is amplified by up to three divisions by w
    scale = np.abs(lap_terms[0]) + np.abs(lap_terms[1]) + np.abs(sq)
    size = np.max(np.abs(J.c), axis=(0, 1))
    amp = size / np.abs(J.value)
    error = 64 * np.finfo(float).eps * (scale + size * amp * (1 + amp) ** 2)
    return Residual(value[()], error[()])


# fourth-order central stencils on offsets -2..2
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _residual_fd_once(w, u1, u2, sig, k, h):
    """One stencil level.  Samples w on the 9 x 9 offset block around each point.

    Returns the residual and a bound on its rounding error.
    """
    off = np.arange(-4, 5) * h
    U1 = u1[..., None, None] + off[None, :]  # axis -1: u1 offset
    U2 = u2[..., None, None] + off[:, None]  # axis -2: u2 offset
    U1, U2 = np.broadcast_arrays(U1, U2)
    W = np.asarray(w(U1, U2), dtype=float)
    _check_nonzero(W)
    W = W * np.sign(W[..., 4:5, 4:5])

    def mixed(F, i, j):
        """d2/du1du2 of F centred at block index (i, j) (row = u2, col = u1)."""
        blk = F[..., i - 2 : i + 3, j - 2 : j + 3]
        return np.einsum("...ab,a,b->...", blk, _D1, _D1) / (h * h)

    q = {}
    for di in range(-2, 3):
        q[(di, 0)] = mixed(W, 4 + di, 4) / W[..., 4 + di, 4]
        q[(0, di)] = mixed(W, 4, 4 + di) / W[..., 4, 4 + di]
    q11 = sum(_D2[k] * q[(0, k - 2)] for k in range(5)) / (h * h)
    q22 = sum(_D2[k] * q[(k - 2, 0)] for k in range(5)) / (h * h)
    sq = mixed(W * W, 4, 4)
    # |D2|_1 (|D1|_1)^2 = (64/12)(18/12)^2 = 12; a few ulps of slack for evaluating w
    wmax = np.max(np.abs(W), axis=(-2, -1))
    wmin = np.min(np.abs(W), axis=(-2, -1))
    eps = np.finfo(float).eps
    rounding = 8 * eps * (2 * 12 * wmax / wmin / h**4 + 2.25 * wmax**2 / h**2)
    return q11 + sig.eps * q22 + k * sq, rounding


def _residual_fd(w, u1, u2, sig, k, h, chunk=4096):
    flat1, flat2 = u1.ravel(), u2.ravel()
    coarse = np.empty(flat1.shape)
    fine = np.empty(flat1.shape)
    rounding = np.empty(flat1.shape)
    for start in range(0, flat1.size, chunk):
        sl = slice(start, start + chunk)
        coarse[sl], _ = _residual_fd_once(w, flat1[sl], flat2[sl], sig, k, 2 * h)
        fine[sl], rounding[sl] = _residual_fd_once(w, flat1[sl], flat2[sl], sig, k, h)
    value = (16.0 * fine - coarse) / 15.0
    # truncation left after extrapolation is below the level-to-level change
    error = np.abs(fine - coarse) / 15.0 + 17.0 / 15.0 * rounding
    return Residual(value.reshape(u1.shape)[()], error.reshape(u1.shape)[()])


def calapso_residual(w, p, sig, method="jet", h=1e-2, printed=False):
    """C[w] at ``p = (u1, u2)`` (scalars or arrays) with an error estimate.

    ``printed=True`` uses the coupling eps2 instead of eps1 eps3.

    ``method="jet"`` is exact up to rounding.  ``method="fd"`` needs only point
    values of ``w``: it combines steps 2h and h by Richardson extrapolation, so
    the finest step is ``h`` and the stencil reaches 8h from ``p``.  Rounding
    grows like 1/h^4, which is why the pair is (2h, h) rather than (h, h/2).
    """
    u1, u2 = np.broadcast_arrays(np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float))
    k = coupling(sig, printed)
    if method == "jet":
        return _residual_jet(w, u1, u2, sig, k)
    if method == "fd":
        if not h > 0:
            raise ValueError("step must be positive")
        return _residual_fd(w, u1, u2, sig, k, float(h))
    raise ValueError(f"unknown method {method!r}; use 'jet' or 'fd'")


# ---------------------------------------------------------------------------
# fields from surfaces


def _lambda_pair_jets(s, normal, u1, u2, K):
    comps = s.jets(u1, u2, K + 2)
    X1 = tuple(c.d(1, 0) for c in comps)
    X2 = tuple(c.d(0, 1) for c in comps)
    if normal is None:
        N = unit_normal_jets(X1, X2, s.sig)
    else:
        N = normal.jets(u1, u2, K + 1)
    N1 = tuple(c.d(1, 0) for c in N)
    N2 = tuple(c.d(0, 1) for c in N)
    lam1 = inner(N1, X1, s.sig) / inner(X1, X1, s.sig)
    lam2 = inner(N2, X2, s.sig) / inner(X2, X2, s.sig)
    if np.any(np.abs(lam2.value - lam1.value) <= 1e-12):
        raise DegeneracyError("umbilic point")
    return lam1, lam2


def omega_from_surface(s, normal=None):
    """omega = eps1 sqrt2 H e^phi and Omega = eps1 sqrt2 H' e^phi with e^phi = 1/|lambda2 - lambda1|.

    The lambdas come from N_i = lambda_i X_i.  Without ``normal`` the unit
    pseudo-cross normal is used, which fixes the result only up to sign.
    """
    e1 = s.sig.eps1

    def omega(u1, u2, K):
        l1, l2 = _lambda_pair_jets(s, normal, u1, u2, K)
        return e1 * SQRT2 / 2 * (l1 + l2) / np.abs(l2 - l1)

    def Omega(u1, u2, K):
        l1, l2 = _lambda_pair_jets(s, normal, u1, u2, K)
        return e1 * SQRT2 / 2 * (l2 - l1) / np.abs(l2 - l1)

    return CalapsoPair(ScalarField(jet_fn=omega, name="omega"), ScalarField(jet_fn=Omega, name="Omega"))


def corollary_fields(spec, strict=True):
    """The closed forms omega = eps1 sqrt2 (l2 + l1) / (2 (l2 - l1)), Omega = eps1 sqrt2 / 2."""
    pair = curvature_pair(spec, strict=strict)
    e1 = spec.sig.eps1
    h1, h2 = pair.h1, pair.h2

    def omega(u1, u2):
        a, b = h1(u1), h2(u2)
        return e1 * SQRT2 * (a + b) / (2 * (a - b))

    return CalapsoPair(
        ScalarField(omega, name="omega"),
        ScalarField(lambda u1, u2: e1 * SQRT2 / 2 + 0.0 * u1 * u2, name="Omega"),
    )


_PROPOSITION_CASE = {"prop2": Case.EX1, "prop3": Case.EX2, "prop4": Case.EX3}


def proposition_field(which, spec, printed=False):
    """Literal rational formula for omega on the matching example family.

    ``printed=True`` (prop2 only) returns the formula with the sign pattern
    as originally published, kept to document that it disagrees with the
    surface-derived field.
    """
    if which not in _PROPOSITION_CASE:
        raise ValueError(f"unknown proposition {which!r}")
    if spec.case is not _PROPOSITION_CASE[which]:
        raise ValueError(f"case mismatch: {which} needs case {_PROPOSITION_CASE[which].value}, got {spec.case.value}")
    if printed and which != "prop2":
        raise ValueError("only prop2 has a separate printed variant")
    e1 = spec.sig.eps1
    k = spec.constants
    c, a11, a12, a21, a22 = k["c"], k["a11"], k["a12"], k["a21"], k["a22"]
    s1, k1, s2, k2 = bases(spec)
    pref = e1 * SQRT2 / 2

    if which == "prop2":

        def omega(u1, u2):
            head = c * u1 * u1 + 2 * a11 * u1 + 2 * a12
            f, g = s2(u2), k2(u2)
            if printed:
                return pref * (head + 2 * a21 * f + 2 * a22 * g + 2 * e1 * c) / (
                    head - 2 * a21 * f + 2 * a22 * g - 2 * e1 * c
                )
            return pref * (head + 2 * a21 * f + 2 * a22 * g - 2 * e1 * c) / (head - 2 * a21 * f - 2 * a22 * g + 2 * e1 * c)

        return ScalarField(omega, name="prop2-printed" if printed else "prop2")

    b = k["b"]
    bb = b * b + b

    def omega(u1, u2):
        one = a11 * s1(u1) + a12 * k1(u1)
        two = a21 * s2(u2) + a22 * k2(u2)
        return pref * (bb * (one + two) - e1 * c * (2 * b + 1)) / (bb * (one - two) - e1 * c)

    return ScalarField(omega, name=which)


# ---------------------------------------------------------------------------
# holomorphic family


@dataclass(frozen=True)
class HolomorphicFn:
    """Polynomial f(z) = sum coeffs[k] z^k over the algebra with i^2 = -eps2."""

    coeffs: tuple
    eps2: int = 1

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("empty coefficient list")
        object.__setattr__(self, "coeffs", tuple(PseudoComplex.coerce(c, self.eps2) for c in self.coeffs))

    @property
    def is_constant(self):
        return all(c.re == 0 and c.im == 0 for c in self.coeffs[1:])

    def __call__(self, u1, u2):
        """``(f, f')`` at z = u1 + i u2, as pseudo-complex numbers."""
        return pc_eval_poly(list(self.coeffs), PseudoComplex(u1, u2, self.eps2))

    def parts(self, u1, u2):
        f, _ = self(u1, u2)
        return f.re, f.im

    def cauchy_riemann_defect(self, u1, u2, h=1e-5):
        """Central-difference residuals of u_1 - v_2 and u_2 + eps2 v_1."""
        re_p1, im_p1 = self.parts(u1 + h, u2)
        re_m1, im_m1 = self.parts(u1 - h, u2)
        re_p2, im_p2 = self.parts(u1, u2 + h)
        re_m2, im_m2 = self.parts(u1, u2 - h)
        du_1, dv_1 = (re_p1 - re_m1) / (2 * h), (im_p1 - im_m1) / (2 * h)
        du_2, dv_2 = (re_p2 - re_m2) / (2 * h), (im_p2 - im_m2) / (2 * h)
        return du_1 - dv_2, du_2 + self.eps2 * dv_1


def _denominator_sign(eps3):
    return 1 if eps3 is None else eps3


def holomorphic_omega(f, eps3=None):
    """omega = 2 sqrt(2 |<f', f'>|) / (1 + eps3 |f|^2), with eps3 = +1 by default.

    This is sqrt2 e^phi for the sphere map of ``f`` into the metric
    (1, eps2, eps3), and solves the operator in that signature.
    """
    if f.is_constant:
        raise DegeneracyError("degenerate: ω ≡ 0")
    e3 = _denominator_sign(eps3)

    def omega(u1, u2):
        F, dF = f(u1, u2)
        return 2 * SQRT2 * np.sqrt(np.abs(dF.norm2())) / (1 + e3 * F.norm2())

    return ScalarField(omega, name="holomorphic-omega")


def holomorphic_admissible(f, u1, u2, eps3=None):
    """Mask of points away from the singular set 1 + eps3 |f|^2 = 0 and the lightlike set <f', f'> = 0."""
    e3 = _denominator_sign(eps3)
    F, dF = f(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
    return (np.abs(1 + e3 * F.norm2()) >= SINGULAR_TOL) & (np.abs(dF.norm2()) >= LIGHTLIKE_TOL)


def sphere_map(f, eps3, domain, samples=201):
    """X = (2 f, eps3 <f,f> - 1) / (1 + eps3 <f,f>) in the metric (1, eps2, eps3).

    ``domain`` is sampled on a ``samples`` x ``samples`` grid to reject boxes
    that meet the singular set.
    """
    from .pseudo_metric import Signature

    sig = Signature(1, f.eps2, eps3)
    U1, U2 = grid_points(domain, samples, samples)
    F, _ = f(U1, U2)
    if np.any(np.abs(1 + eps3 * F.norm2()) < SINGULAR_TOL):
        raise DomainError("sphere map denominator vanishes on domain")

    def X(u1, u2):
        F, _ = f(u1, u2)
        m = F.norm2()
        d = 1 + eps3 * m
        return (2 * F.re / d, 2 * F.im / d, (eps3 * m - 1) / d)

    return Surface(X, domain, sig, name="sphere-map")

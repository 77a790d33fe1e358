"""First-principles differential geometry of parametrized surfaces in E^3.

Every derivative here comes from jet propagation (:mod:`isothermic.jets`), so
the only error is floating-point rounding.  Points may be scalars or arrays;
array points are processed as one batch.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .jets import Jet, lift
from .pseudo_metric import Signature, inner, pseudo_cross

#: inner-squares at or below this magnitude count as lightlike
LIGHTLIKE_TOL = 1e-14
#: relative tolerance of the eps-isothermic test
ISOTHERMIC_TOL = 1e-8


class DomainError(ValueError):
    """A point lies outside the parameter domain or on an excluded set."""


class DegeneracyError(ValueError):
    """A geometric quantity is undefined (lightlike direction, umbilic, zero field)."""


def _check_rect(domain):
    (a1, b1), (a2, b2) = domain
    if not (a1 < b1 and a2 < b2):
        raise ValueError(f"empty domain {domain!r}")
    return ((float(a1), float(b1)), (float(a2), float(b2)))


def grid_points(domain, n1, n2):
    """Grid arrays of shape ``(n2, n1)``: u2 varies along rows, u1 along columns."""
    (a1, b1), (a2, b2) = domain
    return np.meshgrid(np.linspace(a1, b1, n1), np.linspace(a2, b2, n2))


class ScalarField:
    """An analytic function of (u1, u2) that can be evaluated as a jet.

    Build one either from an expression ``fn(u1, u2)`` written with numpy
    functions, or from ``jet_fn(u1, u2, order) -> Jet`` for fields that need
    derivatives of other objects internally.
    """

    def __init__(self, fn=None, *, jet_fn=None, name=""):
        if (fn is None) == (jet_fn is None):
            raise TypeError("give exactly one of fn or jet_fn")
        self.fn = fn
        self._jet_fn = jet_fn
        self.name = name

    def __call__(self, u1, u2):
        if self.fn is not None:
            u1, u2 = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
            return np.broadcast_to(np.asarray(self.fn(u1, u2), dtype=float), u1.shape)[()]
        return self.jet(u1, u2, 0).value

    def jet(self, u1, u2, order=4):
        if self.fn is not None:
            return lift(self.fn, u1, u2, order)
        return self._jet_fn(u1, u2, order)

    def partials(self, u1, u2, order=4):
        """Dict ``{(i, j): d^(i+j) f / du1^i du2^j}`` for all i + j <= order."""
        j = self.jet(u1, u2, order)
        return {(a, b): j.partial(a, b) for a in range(order + 1) for b in range(order + 1 - a)}

    def __neg__(self):
        if self.fn is not None:
            fn = self.fn
            return ScalarField(lambda u1, u2: -fn(u1, u2), name=f"-{self.name}")
        jf = self._jet_fn
        return ScalarField(jet_fn=lambda u1, u2, K: -jf(u1, u2, K), name=f"-{self.name}")

    def __repr__(self):
        return f"ScalarField({self.name or '?'})"


@dataclass(frozen=True)
class Surface:
    """An immersion X(u1, u2) into E^3 with the metric ``sig``.

    ``fn`` maps (u1, u2) to three components and must be written with numpy
    functions so it also evaluates on jets.
    """

    fn: Callable
    domain: tuple
    sig: Signature
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "domain", _check_rect(self.domain))

    def __call__(self, u1, u2):
        u1, u2 = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
        return np.array([np.broadcast_to(np.asarray(c, dtype=float), u1.shape) for c in self.fn(u1, u2)])

    def contains(self, u1, u2, tol=1e-12):
        (a1, b1), (a2, b2) = self.domain
        u1, u2 = np.asarray(u1), np.asarray(u2)
        return (u1 >= a1 - tol) & (u1 <= b1 + tol) & (u2 >= a2 - tol) & (u2 <= b2 + tol)

    def jets(self, u1, u2, order):
        j1, j2 = Jet.coordinates(u1, u2, order)
        out = []
        for c in self.fn(j1, j2):
            if not isinstance(c, Jet):
                c = Jet.constant(np.broadcast_to(np.asarray(c, dtype=float), j1.batch_shape), order)
            out.append(c)
        return tuple(out)

    def component(self, k):
        fn = self.fn
        return ScalarField(lambda u1, u2: fn(u1, u2)[k], name=f"{self.name}[{k}]")

    def grid(self, n1, n2):
        return grid_points(self.domain, n1, n2)


@dataclass(frozen=True)
class SurfaceJet:
    """Position and partial derivatives of a surface at a point (or batch)."""

    comps: tuple
    order: int

    def __getitem__(self, ij):
        i, j = ij
        return np.array([c.partial(i, j) for c in self.comps])

    @property
    def X(self):
        return self[0, 0]

    @property
    def X1(self):
        return self[1, 0]

    @property
    def X2(self):
        return self[0, 1]

    @property
    def X11(self):
        return self[2, 0]

    @property
    def X12(self):
        return self[1, 1]

    @property
    def X22(self):
        return self[0, 2]

    def d(self, i, j):
        """Component jets of the partial d^(i+j)X / du1^i du2^j."""
        return tuple(c.d(i, j) for c in self.comps)


@dataclass(frozen=True)
class FundamentalForms:
    g11: object
    g12: object
    g22: object
    N: object
    II11: object
    II12: object
    II22: object
    phi: Optional[object] = None


@dataclass(frozen=True)
class ChristoffelSet:
    """Christoffel symbols of a diagonal metric; ``gamma1_12`` is Γ¹₁₂ and so on."""

    gamma1_11: object
    gamma2_11: object
    gamma1_12: object
    gamma2_12: object
    gamma1_22: object
    gamma2_22: object


def jet_eval(s, p, order=2):
    """Jet of ``s`` at ``p = (u1, u2)``; raises :class:`DomainError` outside the domain."""
    if not 1 <= order:
        raise ValueError("order must be at least 1")
    u1, u2 = p
    if not np.all(s.contains(u1, u2)):
        raise DomainError(f"point outside domain {s.domain}")
    return SurfaceJet(s.jets(u1, u2, order), order)


# ---------------------------------------------------------------------------
# forms as jets


def unit_normal_jets(X1, X2, sig):
    """Unit normal from tangent jets; <N, N> = eps3 is enforced, not assumed."""
    w = pseudo_cross(X1, X2, sig)
    q = inner(w, w, sig)
    q0 = q.value if isinstance(q, Jet) else q
    if np.any(np.abs(q0) <= LIGHTLIKE_TOL):
        raise DegeneracyError("degenerate normal")
    if np.any(np.sign(q0) != sig.eps3):
        raise DegeneracyError("normal causal type mismatch")
    scale = 1.0 / np.sqrt(np.abs(q))
    return tuple(wk * scale for wk in w)


@dataclass
class _FormJets:
    X1: tuple
    X2: tuple
    g11: Jet
    g12: Jet
    g22: Jet
    N: tuple
    e: Jet
    f: Jet
    g: Jet
    extra: dict = field(default_factory=dict)


def form_jets(comps, sig):
    """First and second fundamental form coefficients as jets.

    II uses e = eps3 <X_11, N>, f = eps3 <X_12, N>, g = eps3 <X_22, N> with N
    the normalized :func:`pseudo_cross` of X_1 and X_2.  The order of the
    result is the order of ``comps`` minus two.
    """
    X1 = tuple(c.d(1, 0) for c in comps)
    X2 = tuple(c.d(0, 1) for c in comps)
    N = unit_normal_jets(X1, X2, sig)
    X11 = tuple(c.d(2, 0) for c in comps)
    X12 = tuple(c.d(1, 1) for c in comps)
    X22 = tuple(c.d(0, 2) for c in comps)
    e3 = sig.eps3
    return _FormJets(
        X1=X1,
        X2=X2,
        g11=inner(X1, X1, sig),
        g12=inner(X1, X2, sig),
        g22=inner(X2, X2, sig),
        N=N,
        e=e3 * inner(X11, N, sig),
        f=e3 * inner(X12, N, sig),
        g=e3 * inner(X22, N, sig),
    )


def _isothermic_mask(g11, g12, g22, sig, tol=ISOTHERMIC_TOL):
    scale = np.abs(g11)
    return (
        (np.abs(g12) <= tol * scale)
        & (np.abs(sig.eps1 * g11 - sig.eps2 * g22) <= tol * scale)
        & (sig.eps1 * g11 > 0)
    )


def fundamental_forms(jet, sig):
    """Metric, unit normal and second form at the jet's point(s)."""
    if jet.order < 2:
        raise ValueError("fundamental_forms needs a jet of order >= 2")
    F = form_jets(jet.comps, sig)
    g11, g12, g22 = F.g11.value, F.g12.value, F.g22.value
    iso = _isothermic_mask(g11, g12, g22, sig)
    phi = np.where(iso, 0.5 * np.log(np.abs(sig.eps1 * g11)), np.nan)[()]
    if np.ndim(phi) == 0 and not iso:
        phi = None
    return FundamentalForms(
        g11=g11,
        g12=g12,
        g22=g22,
        N=np.array([n.value for n in F.N]),
        II11=F.e.value,
        II12=F.f.value,
        II22=F.g.value,
        phi=phi,
    )


# ---------------------------------------------------------------------------
# Weingarten data


def lambda_jets(X1, X2, N1, N2, sig):
    """lambda_i = <N_i, X_i> / <X_i, X_i> as jets (or arrays)."""
    q1 = inner(X1, X1, sig)
    q2 = inner(X2, X2, sig)
    for q in (q1, q2):
        q0 = q.value if isinstance(q, Jet) else q
        if np.any(np.abs(q0) <= LIGHTLIKE_TOL):
            raise DegeneracyError("lightlike coordinate direction")
    return inner(N1, X1, sig) / q1, inner(N2, X2, sig) / q2


def weingarten_lambdas(jet, normal_jet, sig):
    """Principal data from N_i = lambda_i X_i.

    Returns ``(lambda1, lambda2, defect)`` where ``defect`` is the sup-norm of
    N_i - lambda_i X_i over both directions, i.e. how far the coordinates are
    from being lines of curvature.
    """
    X1, X2 = jet.X1, jet.X2
    N1, N2 = normal_jet.X1, normal_jet.X2
    lam1, lam2 = lambda_jets(X1, X2, N1, N2, sig)
    defect = np.maximum(np.max(np.abs(N1 - lam1 * X1), axis=0), np.max(np.abs(N2 - lam2 * X2), axis=0))
    return lam1, lam2, defect[()]


def curvature_scalars(lam1, lam2):
    """Mean curvature H and skew curvature H' in the lambda convention."""
    return (lam1 + lam2) / 2, (lam2 - lam1) / 2


def christoffel(g11, g22, dg11, dg22):
    """Christoffel symbols of g11 du1^2 + g22 du2^2.

    ``dg11`` and ``dg22`` are the pairs of first partials (d/du1, d/du2).
    """
    g11 = np.asarray(g11, dtype=float)
    g22 = np.asarray(g22, dtype=float)
    if np.any(g11 == 0) or np.any(g22 == 0):
        raise DegeneracyError("vanishing metric coefficient")
    g11_1, g11_2 = dg11
    g22_1, g22_2 = dg22
    gs = ChristoffelSet(
        gamma1_11=g11_1 / (2 * g11),
        gamma2_11=-g11_2 / (2 * g22),
        gamma1_12=g11_2 / (2 * g11),
        gamma2_12=g22_1 / (2 * g22),
        gamma1_22=-g22_1 / (2 * g11),
        gamma2_22=g22_2 / (2 * g22),
    )
    # Γʲᵢᵢ = -Γⁱᵢⱼ gᵢᵢ/gⱼⱼ holds by construction; a failure means NaN/inf input
    if not (
        np.allclose(gs.gamma2_11, -gs.gamma1_12 * g11 / g22, rtol=1e-12, atol=0)
        and np.allclose(gs.gamma1_22, -gs.gamma2_12 * g22 / g11, rtol=1e-12, atol=0)
    ):
        raise DegeneracyError("non-finite Christoffel symbols")
    return gs


# ---------------------------------------------------------------------------
# structure equations


def gauss_codazzi_residuals(s, p, iso_tol=ISOTHERMIC_TOL):
    """Codazzi and Gauss residuals of an eps-isothermic surface.

    With I = e^(2 phi)(eps1 du1^2 + eps2 du2^2) and II = e du1^2 + g du2^2:

        r_cod1  = e_2 - (e + eps g) phi_2
        r_cod2  = g_1 - eps (e + eps g) phi_1
        r_gauss = phi_11 + eps phi_22 + eps2 e g e^(-2 phi)
    """
    sig = s.sig
    sj = jet_eval(s, p, order=3)
    F = form_jets(sj.comps, sig)
    if not np.all(_isothermic_mask(F.g11.value, F.g12.value, F.g22.value, sig, iso_tol)):
        raise DegeneracyError("not ε-isothermic at point")
    phi = 0.5 * np.log(np.abs(sig.eps1 * F.g11))
    eps = sig.eps
    e, g = F.e, F.g
    e0, g0 = e.value, g.value
    r_cod1 = e.partial(0, 1) - (e0 + eps * g0) * phi.partial(0, 1)
    r_cod2 = g.partial(1, 0) - eps * (e0 + eps * g0) * phi.partial(1, 0)
    lap = phi.partial(2, 0) + eps * phi.partial(0, 2)
    r_gauss = lap + sig.eps2 * e0 * g0 * np.exp(-2 * phi.value)
    return r_cod1, r_cod2, r_gauss


def gauss2_residual(h1, h2, p, sig):
    """Gauss compatibility of a separable curvature pair.

    ``h1`` is a function of u1 alone (lambda2), ``h2`` of u2 alone (lambda1).
    Returns h1 h2 + eps2 h2''(h1 - h2) + eps1 h1''(h2 - h1) + eps1 h1'^2 + eps2 h2'^2.
    """
    u1, u2 = p
    t1 = Jet.variable(np.asarray(u1, dtype=float), 0, 2)
    t2 = Jet.variable(np.asarray(u2, dtype=float), 0, 2)
    a = _as_jet(h1(t1), t1)
    b = _as_jet(h2(t2), t2)
    A, A1, A2 = a.value, a.partial(1, 0), a.partial(2, 0)
    B, B1, B2 = b.value, b.partial(1, 0), b.partial(2, 0)
    A, B = np.broadcast_arrays(A, B)
    if np.any(np.abs(A - B) <= 1e-12):
        raise DegeneracyError("umbilic point")
    e1, e2 = sig.eps1, sig.eps2
    return (A * B + e2 * B2 * (A - B) + e1 * A2 * (B - A) + e1 * A1**2 + e2 * B1**2)[()]


def _as_jet(value, like):
    if isinstance(value, Jet):
        return value
    return Jet.constant(np.broadcast_to(np.asarray(value, dtype=float), like.batch_shape), like.order)

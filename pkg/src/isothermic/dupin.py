"""Closed-form eps-isothermic Dupin surfaces.

A surface is described by a :class:`DupinSpec`.  Its principal data are the
separable pair lambda2 = h1(u1), lambda1 = h2(u2), where h1 and h2 solve

    h1'' - eps1 b h1 = c,        h2'' + eps2 (1 + b) h2 = -eps1 eps2 c,

and the constants satisfy one quadratic compatibility condition.  Each ODE is
solved in a real basis: sin/cos when its coefficient makes it oscillatory,
sinh/cosh when it is exponential, a quadratic polynomial when it vanishes.
The surface itself is

    X = (G2(u2) - G1(u1)) / (h1 - h2),    N = (h1 G2 - h2 G1) / (h1 - h2),

with the vector curves G_i solving G_i'' - kappa_i G_i = v_i.

Cases ``b2-zero`` and ``b2-general`` are the same families with the roles of
u1 and u2 exchanged; they are built by swapping indices, constructing, and
swapping back.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
import math
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .diffgeo import DegeneracyError, ScalarField, Surface, _check_rect
from .jets import Jet
from .pseudo_metric import Signature, combine

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

#: minimum |lambda2 - lambda1| tolerated on a domain
UMBILIC_TOL = 1e-8


class Case(str, Enum):
    CYLINDER = "cylinder"
    EX1 = "ex1"  # b = 0
    EX2 = "ex2"  # -1 < b < 0
    EX3 = "ex3"  # b > 0
    B2_ZERO = "b2-zero"
    B2_GENERAL = "b2-general"


_CONSTANTS = {
    Case.CYLINDER: ("c",),
    Case.EX1: ("c", "a11", "a12", "a21", "a22"),
    Case.EX2: ("b", "c", "a11", "a12", "a21", "a22"),
    Case.EX3: ("b", "c", "a11", "a12", "a21", "a22"),
    Case.B2_ZERO: ("c", "a11", "a12", "a21", "a22"),
    Case.B2_GENERAL: ("b", "c", "a11", "a12", "a21", "a22"),
}


def constant_names(case):
    return _CONSTANTS[Case(case)]


@dataclass(frozen=True)
class DupinSpec:
    """Case tag, signature, named constants and parameter box of one surface.

    For the b1 families (ex1, ex2, ex3) ``b`` and ``c`` are b1 and c1; for the
    b2 families they are b2 and c2.  In every case a11, a12 multiply the odd
    and even basis functions of u1 and a21, a22 those of u2.
    """

    case: Case
    sig: Signature
    constants: dict
    domain: tuple
    name: str = ""

    def __post_init__(self):
        case = Case(self.case)
        object.__setattr__(self, "case", case)
        object.__setattr__(self, "domain", _check_rect(self.domain))
        names = _CONSTANTS[case]
        consts = {k: float(v) for k, v in self.constants.items()}
        unknown = set(consts) - set(names)
        if unknown:
            raise ValueError(f"unknown constants for case {case.value}: {sorted(unknown)}")
        missing = [k for k in names if k not in consts]
        if missing:
            raise ValueError(f"missing constants for case {case.value}: {missing}")
        if not all(math.isfinite(v) for v in consts.values()):
            raise ValueError("constants must be finite")
        object.__setattr__(self, "constants", consts)
        if self.sig.eps3 != 1:
            raise ValueError("the constructions need eps3 = +1 (normal N(0,0) = e3 must be spacelike)")
        b = consts.get("b")
        if case is Case.CYLINDER and consts["c"] == 0:
            raise ValueError("cylinder needs c != 0")
        if case is Case.EX2 and not -1 < b < 0:
            raise ValueError("case ex2 needs -1 < b < 0")
        if case is Case.EX3 and not b > 0:
            raise ValueError("case ex3 needs b > 0")
        if case is Case.B2_GENERAL and not (-1 < b < 0 or b > 0):
            raise ValueError("use Example form: b2-general is covered for -1 < b < 0 or b > 0")

    def __getitem__(self, name):
        return self.constants[name]

    def with_constants(self, **updates):
        return replace(self, constants={**self.constants, **updates})

    def swapped(self):
        """The b1-family spec obtained by exchanging u1 and u2 (b2 cases only)."""
        if self.case is Case.B2_ZERO:
            case = Case.EX1
        elif self.case is Case.B2_GENERAL:
            case = Case.EX2 if self["b"] < 0 else Case.EX3
        else:
            raise ValueError(f"case {self.case.value} is not a b2 family")
        k = self.constants
        consts = {"c": k["c"], "a11": k["a21"], "a12": k["a22"], "a21": k["a11"], "a22": k["a12"]}
        if "b" in k:
            consts["b"] = k["b"]
        sig = Signature(self.sig.eps2, self.sig.eps1, self.sig.eps3)
        return DupinSpec(case, sig, consts, (self.domain[1], self.domain[0]), name=f"swap({self.name})")

    def to_dict(self):
        return {
            "case": self.case.value,
            "signature": self.sig.as_list(),
            "constants": dict(self.constants),
            "domain": [list(self.domain[0]), list(self.domain[1])],
        }


@dataclass(frozen=True)
class CurvaturePair:
    """lambda2 = h1(u1) and lambda1 = h2(u2); both accept floats, arrays or jets."""

    h1: Callable
    h2: Callable

    @property
    def lambda1(self):
        h2 = self.h2
        return ScalarField(lambda u1, u2: h2(u2) + 0.0 * u1, name="lambda1")

    @property
    def lambda2(self):
        h1 = self.h1
        return ScalarField(lambda u1, u2: h1(u1) + 0.0 * u2, name="lambda2")


class Curve:
    """A vector-valued curve G(t) = C(t) G0 + S(t) G0' + P(t) v."""

    def __init__(self, kappa, G0, G0p, v):
        self.kappa = float(kappa)
        self.G0 = np.asarray(G0, dtype=float)
        self.G0p = np.asarray(G0p, dtype=float)
        self.v = np.asarray(v, dtype=float)

    def basis(self, t):
        # (C - 1) / kappa is written as 2 (s(r t / 2) / r)^2 to avoid cancellation at small |kappa|
        k = self.kappa
        if k > 0:
            r = math.sqrt(k)
            half = np.sinh(r * t / 2) / r
            return np.cosh(r * t), np.sinh(r * t) / r, 2.0 * half * half
        if k < 0:
            r = math.sqrt(-k)
            half = np.sin(r * t / 2) / r
            return np.cos(r * t), np.sin(r * t) / r, 2.0 * half * half
        return 1.0 + 0.0 * t, t, t * t / 2.0

    def __call__(self, t):
        C, S, P = self.basis(t)
        return combine((C, self.G0), (S, self.G0p), (P, self.v))

    def derivative(self, t):
        jt = Jet.variable(np.asarray(t, dtype=float), 0, 1)
        return np.array([c.partial(1, 0) if isinstance(c, Jet) else 0.0 * np.asarray(t) for c in self(jt)])


@dataclass(frozen=True)
class FrameData:
    """The curves G1(u1), G2(u2) and constant vectors used to assemble X."""

    v1: np.ndarray
    v2: np.ndarray
    G1: Curve
    G2: Curve
    kappa1: float
    kappa2: float
    spec: DupinSpec = field(repr=False, default=None)


class DupinSurface(NamedTuple):
    surface: Surface
    normal: Surface
    frame: FrameData


def linear_ode_solution(kappa, G0, G0p, v):
    """Closed-form solution of G'' - kappa G = v with G(0) = G0, G'(0) = G0p."""
    return Curve(kappa, G0, G0p, v)


# ---------------------------------------------------------------------------
# curvature pairs


def oscillator_basis(kappa):
    """Odd and even solutions (s, k) of y'' = kappa y with s(0)=0, k(0)=1, unit scale."""
    if kappa < 0:
        r = math.sqrt(-kappa)
        return (lambda t: np.sin(r * t)), (lambda t: np.cos(r * t))
    if kappa > 0:
        r = math.sqrt(kappa)
        return (lambda t: np.sinh(r * t)), (lambda t: np.cosh(r * t))
    raise ValueError("kappa = 0 has a polynomial basis")


def bases(spec):
    """``(odd1, even1, odd2, even2)``: the basis functions multiplying a11, a12, a21, a22.

    For b = 0 the u1 basis is (t, 1); the quadratic term c t^2 / 2 sits in
    the particular solution.
    """
    if spec.case not in (Case.EX1, Case.EX2, Case.EX3):
        raise ValueError(f"case {spec.case.value} has no b1-family basis")
    e1, e2 = spec.sig.eps1, spec.sig.eps2
    b = spec.constants.get("b", 0.0)
    if b == 0:
        odd1, even1 = (lambda t: t), (lambda t: 1.0 + 0.0 * t)
    else:
        odd1, even1 = oscillator_basis(e1 * b)
    odd2, even2 = oscillator_basis(-e2 * (1 + b))
    return odd1, even1, odd2, even2


def _b1_pair(spec):
    e1 = spec.sig.eps1
    k = spec.constants
    c = k["c"]
    b = k.get("b", 0.0)
    a11, a12, a21, a22 = k["a11"], k["a12"], k["a21"], k["a22"]
    s1, k1, s2, k2 = bases(spec)
    if b == 0:
        h1 = lambda t: 0.5 * c * t * t + a11 * t + a12
    else:
        h1 = lambda t: a11 * s1(t) + a12 * k1(t) - e1 * c / b
    h2 = lambda t: a21 * s2(t) + a22 * k2(t) - e1 * c / (1 + b)
    return CurvaturePair(h1, h2)


def curvature_pair(spec, strict=True):
    """Closed-form principal data; ``strict`` also demands the constraint hold."""
    if strict:
        r = constraint_residual(spec)
        if abs(r) >= 1e-12:
            raise ValueError(f"constraint violated (residual {r:.3e})")
    if spec.case is Case.CYLINDER:
        c = spec["c"]
        return CurvaturePair(lambda t: 0.0 * t, lambda t: c + 0.0 * t)
    if spec.case in (Case.B2_ZERO, Case.B2_GENERAL):
        sw = _b1_pair(spec.swapped())
        return CurvaturePair(sw.h2, sw.h1)
    return _b1_pair(spec)


# ---------------------------------------------------------------------------
# constraints


def _constraint_value(case, sig, k):
    e1, e2 = sig.eps1, sig.eps2
    if case is Case.CYLINDER:
        return 0.0
    if case in (Case.B2_ZERO, Case.B2_GENERAL):
        swapped = {"c": k["c"], "a11": k["a21"], "a12": k["a22"], "a21": k["a11"], "a22": k["a12"]}
        if "b" in k:
            swapped["b"] = k["b"]
        inner_case = Case.EX1 if case is Case.B2_ZERO else (Case.EX2 if k["b"] < 0 else Case.EX3)
        return _constraint_value(inner_case, Signature(e2, e1, sig.eps3), swapped)
    c, a11, a12, a21, a22 = k["c"], k["a11"], k["a12"], k["a21"], k["a22"]
    if case is Case.EX1:
        return a22**2 + e2 * a21**2 + e1 * a11**2 - 2 * e1 * c * a12 - c**2
    b = k["b"]
    tail = (e2 * a21**2 + a22**2) * (1 + b) + c**2 / (b * (b + 1))
    if case is Case.EX2:
        return -b * (e1 * a11**2 + a12**2) + tail
    if case is Case.EX3:
        return b * (e1 * a11**2 - a12**2) + tail
    raise ValueError(f"unknown case {case!r}")


def constraint_residual(spec):
    """Left side of the case's compatibility condition; zero means admissible."""
    return float(_constraint_value(spec.case, spec.sig, spec.constants))


def gauss_constant(pair, sig):
    """The Gauss compatibility expression at the origin (constant when the ODEs hold)."""
    from .diffgeo import gauss2_residual

    return float(gauss2_residual(pair.h1, pair.h2, (0.0, 0.0), sig))


def separation_at_origin(spec):
    """m1 = lambda2(0) - lambda1(0); Theorem-5 assembly needs it nonzero."""
    pair = curvature_pair(spec, strict=False)
    return float(pair.h1(0.0) - pair.h2(0.0))


def solve_constraint(spec, free):
    """Set constant ``free`` to a real root of the constraint.

    The constraint must be affine or quadratic in ``free``.  Among real roots
    the one of smallest magnitude wins; on a tie, the positive one.
    """
    names = constant_names(spec.case)
    if free not in names:
        raise ValueError(f"{free!r} is not a constant of case {spec.case.value}")
    if spec.case is Case.CYLINDER:
        raise ValueError("cylinders carry no constraint to solve")

    def f(x):
        return _constraint_value(spec.case, spec.sig, {**spec.constants, free: x})

    try:
        samples = {x: f(x) for x in (0.0, 1.0, -1.0, 2.0, -0.5)}
    except ZeroDivisionError:
        raise ValueError(f"constraint is not affine or quadratic in {free}") from None
    f0, fp, fm = samples[0.0], samples[1.0], samples[-1.0]
    qa = (fp + fm) / 2 - f0
    qb = (fp - fm) / 2
    qc = f0
    scale = max(1.0, *(abs(v) for v in samples.values()))
    for x in (2.0, -0.5):
        if abs(qa * x * x + qb * x + qc - samples[x]) > 1e-9 * scale:
            raise ValueError(f"constraint is not affine or quadratic in {free}")
    if abs(qa) <= 1e-14 * scale:
        if abs(qb) <= 1e-14 * scale:
            if abs(qc) > 1e-12:
                raise ValueError("inadmissible constants")
            roots = [0.0]  # every value is a root
        else:
            roots = [-qc / qb]
    else:
        disc = qb * qb - 4 * qa * qc
        if disc < -1e-12 * scale * scale:
            raise ValueError("inadmissible constants")
        sq = math.sqrt(max(disc, 0.0))
        # cancellation-free pair of roots
        q = -0.5 * (qb + math.copysign(sq, qb)) if qb != 0 else -0.5 * sq
        roots = [q / qa] + ([qc / q] if q != 0 else [-q / qa])
    root = min(roots, key=lambda x: (abs(x), -x))
    # one Newton polish step for the last bits
    dfx = 2 * qa * root + qb
    if dfx != 0:
        root = root - f(root) / dfx
    out = spec.with_constants(**{free: root})
    if abs(separation_at_origin(out)) <= 1e-12:
        raise DegeneracyError("degenerate (m₁=0)")
    return out


# ---------------------------------------------------------------------------
# surfaces


def _range_on(h, a, b, n=4001):
    """Min and max of h on [a, b]: dense sampling, then a bounded local search
    around the best samples so tangential contacts are not missed."""
    t = np.linspace(a, b, n)
    vals = np.asarray(h(t), dtype=float) + 0.0 * t
    out = []
    for sign in (1.0, -1.0):
        k = int(np.argmin(sign * vals))
        lo, hi = t[max(k - 1, 0)], t[min(k + 1, n - 1)]
        best = sign * vals[k]
        if hi > lo:
            res = minimize_scalar(lambda x: sign * float(h(x)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
            best = min(best, float(res.fun))
        out.append(sign * best)
    return out[0], out[1]


def check_umbilic_free(spec, pair=None, tol=UMBILIC_TOL):
    """Minimum of |lambda2 - lambda1| over the domain box (sampled, separable)."""
    pair = pair or curvature_pair(spec, strict=False)
    (a1, b1), (a2, b2) = spec.domain
    lo1, hi1 = _range_on(pair.h1, a1, b1)
    lo2, hi2 = _range_on(pair.h2, a2, b2)
    dmin, dmax = lo1 - hi2, hi1 - lo2
    gap = dmin if dmin > 0 else (-dmax if dmax < 0 else 0.0)
    if gap <= tol:
        raise DegeneracyError("λ₁=λ₂ on domain")
    return gap


def _cylinder(spec):
    e1 = spec.sig.eps1
    c = spec["c"]
    # X = G1(u1) - G2(u2) with G1'' = -eps1 G1, G2'' = 0
    G1 = linear_ode_solution(-e1, E3 / c, E1 / c, np.zeros(3))
    G2 = linear_ode_solution(0.0, E3 / c, -E2 / c, np.zeros(3))

    def X(u1, u2):
        a, b = G1(u1), G2(u2)
        return tuple(a[k] - b[k] for k in range(3))

    def N(u1, u2):
        a = G1(u1)
        return tuple(c * a[k] + 0.0 * u2 for k in range(3))

    frame = FrameData(np.zeros(3), np.zeros(3), G1, G2, -e1, 0.0, spec)
    return DupinSurface(
        Surface(X, spec.domain, spec.sig, name=spec.name or "cylinder"),
        Surface(N, spec.domain, spec.sig, name="N"),
        frame,
    )


def frame_data(spec, pair=None):
    """v_i, kappa_i and G_i for a b1-family spec."""
    pair = pair or curvature_pair(spec, strict=False)
    e1, e2 = spec.sig.eps1, spec.sig.eps2
    b = spec.constants.get("b", 0.0)
    t = Jet.variable(0.0, 0, 1)
    j1, j2 = pair.h1(t), pair.h2(t)
    h10, h1p = j1.value, j1.partial(1, 0)
    h20, h2p = j2.value, j2.partial(1, 0)
    if abs(h20 - h10) <= 1e-12:
        raise DegeneracyError("degenerate (m₁=0)")
    v1 = e1 / (h20 - h10) * np.array([-e1 * h1p, -e2 * h2p, -h20 - b * (h20 - h10)])
    v2 = -e1 * e2 * v1
    b2 = -(1 + b)
    k1, k2 = e1 * b, e2 * b2
    G1 = linear_ode_solution(k1, E3, E1, v1)
    G2 = linear_ode_solution(k2, E3, E2, v2)
    return FrameData(v1, v2, G1, G2, k1, k2, spec)


def _swap_xy(vec):
    return (vec[1], vec[0], vec[2])


def build_dupin(spec, strict=True):
    """Surface, unit normal field and frame of a classified Dupin surface.

    ``strict=False`` skips the constraint check so that perturbed (inadmissible)
    constants can be studied; the umbilic check always runs.
    """
    pair = curvature_pair(spec, strict=strict)
    check_umbilic_free(spec, pair)
    if spec.case is Case.CYLINDER:
        return _cylinder(spec)
    if spec.case in (Case.B2_ZERO, Case.B2_GENERAL):
        inner = build_dupin(spec.swapped(), strict=strict)
        fx, fn = inner.surface.fn, inner.normal.fn
        return DupinSurface(
            Surface(lambda u1, u2: _swap_xy(fx(u2, u1)), spec.domain, spec.sig, name=spec.name),
            Surface(lambda u1, u2: _swap_xy(fn(u2, u1)), spec.domain, spec.sig, name="N"),
            inner.frame,
        )
    frame = frame_data(spec, pair)
    h1, h2 = pair.h1, pair.h2
    G1, G2 = frame.G1, frame.G2

    def X(u1, u2):
        a, b = G1(u1), G2(u2)
        d = h1(u1) - h2(u2)
        return tuple((b[k] - a[k]) / d + 0.0 for k in range(3))

    def N(u1, u2):
        a, b = G1(u1), G2(u2)
        p, q = h1(u1), h2(u2)
        d = p - q
        return tuple((p * b[k] - q * a[k]) / d for k in range(3))

    return DupinSurface(
        Surface(X, spec.domain, spec.sig, name=spec.name),
        Surface(N, spec.domain, spec.sig, name="N"),
        frame,
    )


def conservation_vector(spec, u1, u2):
    """The vector

        v1 h2 + eps1 (1+b) h2 G2 + c G2 + eps1 eps2 h2' G2'
          - v1 h1 - eps1 b h1 G1 - c G1 + h1' G1'

    which is constant (zero) on a correctly assembled surface.
    """
    if spec.case is Case.CYLINDER:
        raise ValueError("cylinders have no G-frame conservation law")
    if spec.case in (Case.B2_ZERO, Case.B2_GENERAL):
        return _swap_xy_array(conservation_vector(spec.swapped(), u2, u1))
    pair = curvature_pair(spec, strict=False)
    fr = frame_data(spec, pair)
    e1, e2 = spec.sig.eps1, spec.sig.eps2
    b = spec.constants.get("b", 0.0)
    c = spec["c"]
    u1, u2 = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
    j1 = pair.h1(Jet.variable(u1, 0, 1))
    j2 = pair.h2(Jet.variable(u2, 0, 1))
    h1, h1p = j1.value, j1.partial(1, 0)
    h2, h2p = j2.value, j2.partial(1, 0)
    G1, G2 = fr.G1(u1), fr.G2(u2)
    G1p, G2p = fr.G1.derivative(u1), fr.G2.derivative(u2)
    v1 = fr.v1.reshape((3,) + (1,) * u1.ndim)
    return (
        v1 * h2
        + e1 * (1 + b) * h2 * G2
        + c * G2
        + e1 * e2 * h2p * G2p
        - v1 * h1
        - e1 * b * h1 * G1
        - c * G1
        + h1p * G1p
    )


def _swap_xy_array(a):
    return np.array([a[1], a[0], a[2]])


# ---------------------------------------------------------------------------
# catalogue

PRESETS = ("cylinder-euclidean", "cylinder-lorentz", "ex1-a", "ex2-a", "ex3-a")


def preset_surface(name):
    """Catalogued specs; the free amplitude of each example family is solved for."""
    if name == "cylinder-euclidean":
        return DupinSpec(Case.CYLINDER, Signature(1, 1, 1), {"c": 1.0}, ((-1.0, 1.0), (-1.0, 1.0)), name=name)
    if name == "cylinder-lorentz":
        return DupinSpec(Case.CYLINDER, Signature(-1, 1, 1), {"c": 1.0}, ((-1.0, 1.0), (-1.0, 1.0)), name=name)
    if name == "ex1-a":
        spec = DupinSpec(
            Case.EX1,
            Signature(1, 1, 1),
            {"c": 1.0, "a11": 0.0, "a12": 0.0, "a21": 0.0, "a22": 2.0},
            ((-1.0, 1.0), (-1.0, 1.0)),
            name=name,
        )
        return solve_constraint(spec, "a12")
    if name == "ex2-a":
        spec = DupinSpec(
            Case.EX2,
            Signature(1, 1, 1),
            {"b": -0.5, "c": 1.0, "a11": 0.0, "a12": 2.0, "a21": 0.0, "a22": 0.0},
            ((-2.0, 2.0), (-2.0, 2.0)),
            name=name,
        )
        return solve_constraint(spec, "a22")
    if name == "ex3-a":
        spec = DupinSpec(
            Case.EX3,
            Signature(1, 1, 1),
            {"b": 1.0, "c": math.sqrt(2.0), "a11": 0.0, "a12": 0.0, "a21": 0.0, "a22": 0.0},
            ((1.0, 2.0), (-1.0, 1.0)),
            name=name,
        )
        return solve_constraint(spec, "a12")
    raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")

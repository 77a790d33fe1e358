"""Named invariant checks run on a sampled parameter grid.

Each check reduces to one number, the largest absolute deviation over the
grid, compared with a fixed tolerance.  The suite is what the ``verify`` and
``calapso`` commands report.
"""

from dataclasses import dataclass
from functools import cached_property
import math

import numpy as np

from .calapso import (
    calapso_residual,
    corollary_fields,
    holomorphic_admissible,
    holomorphic_omega,
    omega_from_surface,
    proposition_field,
)
from .diffgeo import DegeneracyError, _isothermic_mask, form_jets, gauss2_residual, gauss_codazzi_residuals, grid_points
from .dupin import Case, build_dupin, conservation_vector, curvature_pair
from .pseudo_metric import Signature, inner

FD_TOL = 1e-5

TOLERANCES = {
    "metric_diagonal": 1e-10,
    "conformal_factor": 1e-9,
    "unit_normal": 1e-10,
    "normal_orientation": 1e-8,
    "weingarten": 1e-8,
    "weingarten_closed_form": 1e-7,
    "dupin": 1e-9,
    "gauss_codazzi": 1e-8,
    "gauss_residual": 1e-10,
    "conservation": 1e-9,
    "christoffel": 1e-9,
    "calapso_omega": 1e-9,
    "calapso_Omega": 1e-9,
    "theorem1_identity": 1e-8,
}

CHECKS = tuple(TOLERANCES)


@dataclass(frozen=True)
class CheckResult:
    check: str
    max_abs: float
    tol: float
    points: int
    excluded: int = 0
    applicable: bool = True
    error: str | None = None

    @property
    def passed(self):
        if not self.applicable:
            return True
        return bool(math.isfinite(self.max_abs) and self.max_abs < self.tol)

    def to_json(self, grid):
        out = {
            "check": self.check,
            "grid": list(grid),
            "max_abs": self.max_abs if math.isfinite(self.max_abs) else None,
            "tol": self.tol,
            "pass": self.passed,
            "points": self.points,
            "excluded": self.excluded,
        }
        if not self.applicable:
            out["applicable"] = False
        if self.error:
            out["error"] = self.error
        return out


def _maxabs(*arrays):
    return float(max(np.max(np.abs(np.asarray(a))) for a in arrays))


class SurfaceChecks:
    """Lazily computed jets of one Dupin surface on a grid."""

    def __init__(self, spec, grid, method="jet", strict=True):
        self.spec = spec
        self.sig = spec.sig
        self.grid = tuple(grid)
        self.method = method
        self.strict = strict
        self.pair = curvature_pair(spec, strict=strict)
        self.built = build_dupin(spec, strict=strict)
        U1, U2 = grid_points(spec.domain, *self.grid)
        self.u1, self.u2 = U1.ravel(), U2.ravel()

    @property
    def n(self):
        return self.u1.size

    @cached_property
    def forms(self):
        return form_jets(self.built.surface.jets(self.u1, self.u2, 3), self.sig)

    @cached_property
    def normal(self):
        return self.built.normal.jets(self.u1, self.u2, 2)

    @cached_property
    def lambdas(self):
        """lambda_i from N_i = lambda_i X_i with the constructor normal, as order-1 jets."""
        F = self.forms
        N1 = tuple(c.d(1, 0) for c in self.normal)
        N2 = tuple(c.d(0, 1) for c in self.normal)
        return inner(N1, F.X1, self.sig) / F.g11, inner(N2, F.X2, self.sig) / F.g22

    @cached_property
    def closed_lambdas(self):
        return np.asarray(self.pair.h2(self.u2)) + 0 * self.u1, np.asarray(self.pair.h1(self.u1)) + 0 * self.u2

    def result(self, name, value, tol=None, excluded=0, applicable=True):
        tol = TOLERANCES[name] if tol is None else tol
        return CheckResult(name, value, tol, self.n - excluded, excluded, applicable)

    # -- checks -------------------------------------------------------------

    def metric_diagonal(self):
        return self.result("metric_diagonal", _maxabs(self.forms.g12.value))

    def conformal_factor(self):
        l1, l2 = self.closed_lambdas
        target = 1.0 / (l2 - l1) ** 2
        F = self.forms
        return self.result(
            "conformal_factor",
            _maxabs(F.g11.value - self.sig.eps1 * target, F.g22.value - self.sig.eps2 * target),
        )

    def unit_normal(self):
        N = [c.value for c in self.normal]
        F = self.forms
        X1 = [c.value for c in F.X1]
        X2 = [c.value for c in F.X2]
        return self.result(
            "unit_normal",
            _maxabs(inner(N, N, self.sig) - self.sig.eps3, inner(N, X1, self.sig), inner(N, X2, self.sig)),
        )

    def normal_orientation(self):
        """Constructor normal equals the unit pseudo-cross normal up to one overall sign."""
        N = np.array([c.value for c in self.normal])
        P = np.array([c.value for c in self.forms.N])
        return self.result("normal_orientation", min(_maxabs(N - P), _maxabs(N + P)))

    def weingarten(self):
        F = self.forms
        l1, l2 = (lam.value for lam in self.lambdas)
        dev = []
        for lam, Xi, axis in ((l1, F.X1, (1, 0)), (l2, F.X2, (0, 1))):
            for k in range(3):
                dev.append(self.normal[k].partial(*axis) - lam * Xi[k].value)
        return self.result("weingarten", _maxabs(*dev))

    def weingarten_closed_form(self):
        l1, l2 = (lam.value for lam in self.lambdas)
        c1, c2 = self.closed_lambdas
        return self.result("weingarten_closed_form", _maxabs(l1 - c1, l2 - c2))

    def dupin(self):
        l1, l2 = self.lambdas
        return self.result("dupin", _maxabs(l1.partial(1, 0), l2.partial(0, 1)))

    def gauss_codazzi(self):
        r = gauss_codazzi_residuals(self.built.surface, (self.u1, self.u2))
        return self.result("gauss_codazzi", _maxabs(*r))

    def gauss_residual(self):
        r = gauss2_residual(self.pair.h1, self.pair.h2, (self.u1, self.u2), self.sig)
        return self.result("gauss_residual", _maxabs(r))

    def conservation(self):
        if self.spec.case is Case.CYLINDER:
            return self.result("conservation", 0.0, applicable=False)
        V = conservation_vector(self.spec, self.u1, self.u2)
        V0 = conservation_vector(self.spec, 0.0, 0.0)
        return self.result("conservation", _maxabs(V - V0[:, None]))

    def christoffel(self):
        """Metric Christoffel symbols against the curvature form lambda_i,j / (lambda_j - lambda_i)."""
        F = self.forms
        l1, l2 = self.lambdas
        g11, g22 = F.g11, F.g22
        gamma1_12 = g11.partial(0, 1) / (2 * g11.value)
        gamma2_12 = g22.partial(1, 0) / (2 * g22.value)
        d = l2.value - l1.value
        return self.result(
            "christoffel",
            _maxabs(gamma1_12 - l1.partial(0, 1) / d, gamma2_12 - l2.partial(1, 0) / (-d)),
        )

    def _calapso(self, name, field):
        tol = TOLERANCES[name] if self.method == "jet" else FD_TOL
        r = calapso_residual(field, (self.u1, self.u2), self.sig, method=self.method)
        return self.result(name, _maxabs(r.value), tol)

    def calapso_omega(self):
        return self._calapso("calapso_omega", corollary_fields(self.spec, self.strict).omega)

    def calapso_Omega(self):
        return self._calapso("calapso_Omega", corollary_fields(self.spec, self.strict).Omega)

    def theorem1_identity(self):
        """w_12 / w = +-phi_12 + phi_1 phi_2 for the surface-derived omega (+) and Omega (-)."""
        pair = omega_from_surface(self.built.surface, self.built.normal)
        F = self.forms
        if not np.all(_isothermic_mask(F.g11.value, F.g12.value, F.g22.value, self.sig)):
            return self.result("theorem1_identity", math.inf)
        phi = 0.5 * np.log(np.abs(self.sig.eps1 * F.g11))
        p12, p1, p2 = phi.partial(1, 1), phi.partial(1, 0), phi.partial(0, 1)
        dev = []
        for field, sign in ((pair.omega, 1.0), (pair.Omega, -1.0)):
            J = field.jet(self.u1, self.u2, 2)
            dev.append(J.partial(1, 1) / J.value - (sign * p12 + p1 * p2))
        return self.result("theorem1_identity", _maxabs(*dev))

    def run(self, names):
        out = []
        for name in names:
            try:
                out.append(getattr(self, name)())
            except DegeneracyError as exc:
                # the surface itself broke the check's precondition: a failure, not a bad config
                out.append(CheckResult(name, math.inf, TOLERANCES[name], self.n, error=str(exc)))
        return out


def validate_checks(names):
    if not names:
        raise ValueError("no checks requested")
    unknown = [n for n in names if n not in TOLERANCES]
    if unknown:
        raise ValueError(f"unknown check(s): {', '.join(unknown)}")
    return list(names)


def run_checks(spec, grid, names=CHECKS, method="jet", strict=True):
    names = validate_checks(names)
    return SurfaceChecks(spec, grid, method=method, strict=strict).run(names)


# ---------------------------------------------------------------------------
# solution families

SOLUTIONS = ("corollary1", "prop2", "prop3", "prop4", "prop5")


def solution_fields(solution, spec=None, holo=None, eps3=None):
    """``{label: ScalarField}`` of a solution family."""
    if solution == "corollary1":
        pair = corollary_fields(spec)
        return {"omega": pair.omega, "Omega": pair.Omega}
    if solution in ("prop2", "prop3", "prop4"):
        return {"omega": proposition_field(solution, spec)}
    if solution == "prop5":
        if holo is None:
            raise ValueError("prop5 needs holomorphic coefficients")
        return {"omega": holomorphic_omega(holo, eps3)}
    raise ValueError(f"unknown solution {solution!r}; choose from {', '.join(SOLUTIONS)}")


def calapso_checks(solution, sig, domain, grid, spec=None, holo=None, eps3=None, method="jet"):
    """Residual of each field of ``solution`` over the admissible grid points."""
    U1, U2 = grid_points(domain, *grid)
    u1, u2 = U1.ravel(), U2.ravel()
    mask = np.ones(u1.shape, dtype=bool)
    if solution == "prop5":
        if holo is None:
            raise ValueError("prop5 needs holomorphic coefficients")
        eps3 = sig.eps3 if eps3 is None else eps3
        sig = Signature(1, holo.eps2, eps3)
        mask = holomorphic_admissible(holo, u1, u2, eps3)
    tol = 1e-8 if solution == "prop5" else 1e-9
    if method == "fd":
        tol = FD_TOL
    out = []
    for label, field in solution_fields(solution, spec, holo, eps3).items():
        r = calapso_residual(field, (u1[mask], u2[mask]), sig, method=method)
        value = _maxabs(r.value) if mask.any() else math.nan
        out.append(CheckResult(f"calapso_{solution}_{label}", value, tol, int(mask.sum()), int((~mask).sum())))
    return out

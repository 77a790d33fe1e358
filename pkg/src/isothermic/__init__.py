"""Eps-isothermic Dupin surfaces in pseudo-Euclidean 3-space and the pseudo-Calapso equation."""

from .calapso import (
    CalapsoPair,
    HolomorphicFn,
    calapso_residual,
    corollary_fields,
    holomorphic_omega,
    omega_from_surface,
    proposition_field,
    sphere_map,
)
from .diffgeo import (
    DegeneracyError,
    DomainError,
    ScalarField,
    Surface,
    christoffel,
    fundamental_forms,
    gauss2_residual,
    gauss_codazzi_residuals,
    jet_eval,
    weingarten_lambdas,
)
from .dupin import (
    Case,
    CurvaturePair,
    DupinSpec,
    build_dupin,
    constraint_residual,
    curvature_pair,
    preset_surface,
    solve_constraint,
)
from .jets import Jet
from .pseudo_metric import PseudoComplex, Signature, inner, pseudo_cross

__version__ = "0.1.0"

__all__ = [
    "CalapsoPair",
    "Case",
    "CurvaturePair",
    "DegeneracyError",
    "DomainError",
    "DupinSpec",
    "HolomorphicFn",
    "Jet",
    "PseudoComplex",
    "ScalarField",
    "Signature",
    "Surface",
    "build_dupin",
    "calapso_residual",
    "christoffel",
    "constraint_residual",
    "corollary_fields",
    "curvature_pair",
    "fundamental_forms",
    "gauss2_residual",
    "gauss_codazzi_residuals",
    "holomorphic_omega",
    "inner",
    "jet_eval",
    "omega_from_surface",
    "preset_surface",
    "proposition_field",
    "pseudo_cross",
    "solve_constraint",
    "sphere_map",
    "weingarten_lambdas",
]

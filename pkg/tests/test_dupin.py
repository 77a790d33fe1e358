import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from isothermic.diffgeo import DegeneracyError, jet_eval
from isothermic.dupin import (
    PRESETS,
    Case,
    DupinSpec,
    build_dupin,
    check_umbilic_free,
    conservation_vector,
    constraint_residual,
    curvature_pair,
    gauss_constant,
    linear_ode_solution,
    preset_surface,
    solve_constraint,
)
from isothermic.jets import Jet
from isothermic.pseudo_metric import Signature
from isothermic.verify import CHECKS, run_checks

E1, E2, E3 = np.eye(3)
SQ2 = math.sqrt(2)


def ex1_family(**overrides):
    consts = {"c": 1.0, "a11": 0.0, "a12": 0.0, "a21": 0.0, "a22": 2.0, **overrides}
    return DupinSpec(Case.EX1, Signature(), consts, ((-1, 1), (-1, 1)))


# -- presets ------------------------------------------------------------------


@pytest.mark.parametrize(
    "name, lam1_0, lam2_0",
    [("ex1-a", 1.0, 1.5), ("ex2-a", 0.0, 4.0), ("ex3-a", -SQ2 / 2, 1 - SQ2)],
)
def test_preset_curvatures_at_origin(name, lam1_0, lam2_0):
    pair = curvature_pair(preset_surface(name))
    assert pair.h2(0.0) == pytest.approx(lam1_0, abs=1e-14)
    assert pair.h1(0.0) == pytest.approx(lam2_0, abs=1e-14)


def test_preset_solved_amplitudes():
    assert preset_surface("ex1-a")["a12"] == pytest.approx(1.5, abs=1e-15)
    assert preset_surface("ex2-a")["a22"] == pytest.approx(2.0, abs=1e-15)
    assert preset_surface("ex3-a")["a12"] == pytest.approx(1.0, abs=1e-15)


def test_ex3_profiles():
    # b = 1 > 0 makes the u1 equation exponential: lambda2 = cosh u1 - sqrt2
    pair = curvature_pair(preset_surface("ex3-a"))
    t = np.linspace(1, 2, 7)
    np.testing.assert_allclose(pair.h1(t), np.cosh(t) - SQ2, atol=1e-14)
    np.testing.assert_allclose(pair.h2(t), -SQ2 / 2, atol=1e-14)


def test_unknown_preset():
    with pytest.raises(ValueError, match="unknown preset"):
        preset_surface("torus")


@pytest.mark.parametrize("name", PRESETS)
def test_presets_keep_lambdas_apart(name):
    assert check_umbilic_free(preset_surface(name)) >= 0.25


@pytest.mark.parametrize("name", PRESETS)
def test_presets_pass_invariant_suite(name):
    for result in run_checks(preset_surface(name), (11, 11)):
        assert result.passed, result


# -- spec validation ----------------------------------------------------------


@pytest.mark.parametrize(
    "case, consts, sig, message",
    [
        (Case.EX2, {"b": 0.5, "c": 1, "a11": 0, "a12": 0, "a21": 0, "a22": 0}, Signature(), "-1 < b < 0"),
        (Case.EX3, {"b": -0.5, "c": 1, "a11": 0, "a12": 0, "a21": 0, "a22": 0}, Signature(), "b > 0"),
        (Case.EX1, {"c": 1, "a11": 0, "a12": 0, "a21": 0}, Signature(), "missing"),
        (Case.CYLINDER, {"c": 1, "b": 2}, Signature(), "unknown constants"),
        (Case.CYLINDER, {"c": 0}, Signature(), "c != 0"),
        (Case.CYLINDER, {"c": 1}, Signature(1, 1, -1), "eps3"),
        (Case.CYLINDER, {"c": float("nan")}, Signature(), "finite"),
        (Case.B2_GENERAL, {"b": -1.5, "c": 1, "a11": 0, "a12": 0, "a21": 0, "a22": 0}, Signature(), "use Example form"),
    ],
)
def test_spec_validation(case, consts, sig, message):
    with pytest.raises(ValueError, match=message):
        DupinSpec(case, sig, consts, ((-1, 1), (-1, 1)))


def test_empty_domain_rejected():
    with pytest.raises(ValueError, match="empty domain"):
        DupinSpec(Case.CYLINDER, Signature(), {"c": 1}, ((1, 1), (-1, 1)))


def test_strict_pair_needs_constraint():
    spec = preset_surface("ex1-a")
    with pytest.raises(ValueError, match="constraint violated"):
        curvature_pair(spec.with_constants(a22=2.1))
    curvature_pair(spec.with_constants(a22=2.1), strict=False)


# -- constraints --------------------------------------------------------------


def test_constraint_examples():
    spec = preset_surface("ex1-a")
    assert constraint_residual(spec) == 0
    assert constraint_residual(spec.with_constants(a22=3.0)) == pytest.approx(5.0, abs=1e-14)
    assert constraint_residual(preset_surface("cylinder-lorentz")) == 0


def test_solve_quadratic_tie_prefers_positive():
    spec = DupinSpec(
        Case.EX2,
        Signature(),
        {"b": -0.5, "c": 1.0, "a11": 0.0, "a12": 2.0, "a21": 0.0, "a22": 0.0},
        ((-2, 2), (-2, 2)),
    )
    solved = solve_constraint(spec, "a22")
    assert solved["a22"] == pytest.approx(2.0, abs=1e-15)
    assert abs(constraint_residual(solved)) < 1e-12


def test_solve_prefers_smallest_root():
    # a22^2 - 2 a12 - 1 = 0 in a22 after fixing a12 = 4: roots +-3; with a21 the
    # linear term, the quadratic in a12 is linear -> unique root
    spec = ex1_family(a12=4.0)
    assert solve_constraint(spec, "a22")["a22"] == pytest.approx(3.0)
    # c enters quadratically: -c^2 - 2 c a12 + a22^2 = 0 with a12=1.5, a22=2 -> c in {1, -4}
    assert solve_constraint(ex1_family(a12=1.5), "c")["c"] == pytest.approx(1.0, abs=1e-14)


def test_solve_without_real_root():
    with pytest.raises(ValueError, match="inadmissible constants"):
        solve_constraint(ex1_family(a12=-5.0), "a22")


def test_solve_degenerate_family():
    spec = ex1_family(c=0.0, a22=0.0)
    with pytest.raises(DegeneracyError, match=r"degenerate \(m₁=0\)"):
        solve_constraint(spec, "a12")


def test_solve_non_polynomial_dependence():
    spec = preset_surface("ex2-a")
    with pytest.raises(ValueError, match="not affine or quadratic"):
        solve_constraint(spec, "b")


def test_solve_rejects_foreign_constant():
    with pytest.raises(ValueError):
        solve_constraint(preset_surface("ex1-a"), "b")
    with pytest.raises(ValueError):
        solve_constraint(preset_surface("cylinder-euclidean"), "c")


sign = st.sampled_from([1, -1])
amp = st.floats(-2, 2)


@settings(max_examples=50, deadline=None)
@given(sign, sign, st.sampled_from([0.0, -0.3, 0.8]), st.floats(0.5, 2), amp, amp, amp)
def test_constraint_is_gauss_expression_at_origin(e1, e2, b, c, a11, a12, a21):
    case = Case.EX1 if b == 0 else (Case.EX2 if b < 0 else Case.EX3)
    consts = {"c": c, "a11": a11, "a12": a12, "a21": a21, "a22": 1.0}
    if b:
        consts["b"] = b
    spec = DupinSpec(case, Signature(e1, e2, 1), consts, ((-1, 1), (-1, 1)))
    pair = curvature_pair(spec, strict=False)
    assume(abs(pair.h1(0.0) - pair.h2(0.0)) > 1e-6)
    assert gauss_constant(pair, spec.sig) == pytest.approx(constraint_residual(spec), rel=1e-9, abs=1e-9)


# -- ODE curves -----------------------------------------------------------------


def test_polynomial_curve():
    v = np.array([0.3, -0.2, 0.5])
    G = linear_ode_solution(0.0, E3, E1, v)
    t = np.linspace(-1, 1, 5)
    np.testing.assert_allclose(G(t), (t**2 / 2) * v[:, None] + t * E1[:, None] + E3[:, None], atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-2, 2))
def test_curve_solves_its_ode(kappa, t):
    v = np.array([0.4, -1.0, 0.25])
    G = linear_ode_solution(kappa, E3, E2, v)
    jets = G(Jet.variable(t, 0, 2))
    second = np.array([j.partial(2, 0) for j in jets])
    value = np.array([j.value for j in jets])
    np.testing.assert_allclose(second - kappa * value, v, atol=1e-12)
    np.testing.assert_allclose(G(0.0), E3, atol=1e-15)
    np.testing.assert_allclose(G.derivative(0.0), E2, atol=1e-15)


def test_builder_reproduces_published_second_curve():
    """G2 = eps1 (cos u2 - 1) v1 + sin u2 e2 + cos u2 e3 for the b = 0 family."""
    built = build_dupin(preset_surface("ex1-a"))
    fr = built.frame
    t = np.linspace(-1, 1, 11)
    expected = (np.cos(t) - 1) * fr.v1[:, None] + np.sin(t) * E2[:, None] + np.cos(t) * E3[:, None]
    np.testing.assert_allclose(fr.G2(t), expected, atol=1e-12)
    np.testing.assert_allclose(fr.v2, -fr.v1)
    assert (fr.kappa1, fr.kappa2) == (0.0, -1.0)


# -- surfaces -----------------------------------------------------------------


def test_cylinder_point():
    spec = DupinSpec(Case.CYLINDER, Signature(), {"c": 1.0}, ((-2, 2), (-2, 2)))
    np.testing.assert_allclose(build_dupin(spec).surface(math.pi / 2, 1.0), [1, 1, -1], atol=1e-15)


@pytest.mark.parametrize("c", [1.0, 0.5])
def test_lorentz_cylinder_closed_form(c):
    spec = DupinSpec(Case.CYLINDER, Signature(-1, 1, 1), {"c": c}, ((-1, 1), (-1, 1)))
    s = build_dupin(spec).surface
    u1, u2 = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(-1, 1, 5))
    expected = np.array([np.sinh(u1), u2, np.cosh(u1) - 1]) / c
    np.testing.assert_allclose(s(u1, u2), expected, atol=1e-14)


def test_ex1_starts_at_origin():
    built = build_dupin(preset_surface("ex1-a"))
    np.testing.assert_allclose(built.surface(0.0, 0.0), 0, atol=1e-15)
    np.testing.assert_allclose(built.normal(0.0, 0.0), E3, atol=1e-15)


def test_umbilic_inside_domain():
    spec = DupinSpec(Case.EX2, Signature(), preset_surface("ex2-a").constants, ((-5, 5), (-1, 1)))
    with pytest.raises(DegeneracyError, match="λ₁=λ₂ on domain"):
        build_dupin(spec)


@pytest.mark.parametrize("name", ["ex1-a", "ex2-a", "ex3-a"])
def test_conservation_vector_is_constant(name):
    spec = preset_surface(name)
    (a1, b1), (a2, b2) = spec.domain
    u1, u2 = np.meshgrid(np.linspace(a1, b1, 15), np.linspace(a2, b2, 15))
    V = conservation_vector(spec, u1, u2)
    V0 = conservation_vector(spec, 0.0, 0.0)
    assert np.max(np.abs(V - V0[:, None, None])) < 1e-9


def test_cylinder_has_no_conservation_law():
    with pytest.raises(ValueError):
        conservation_vector(preset_surface("cylinder-euclidean"), 0.0, 0.0)


# -- the b2 families ------------------------------------------------------------


def _b2_twin(b1_spec, case):
    k = b1_spec.constants
    consts = {"c": k["c"], "a11": k["a21"], "a12": k["a22"], "a21": k["a11"], "a22": k["a12"]}
    if "b" in k:
        consts["b"] = k["b"]
    sig = Signature(b1_spec.sig.eps2, b1_spec.sig.eps1, 1)
    return DupinSpec(case, sig, consts, (b1_spec.domain[1], b1_spec.domain[0]))


@pytest.mark.parametrize(
    "b1_spec, case",
    [
        (preset_surface("ex1-a"), Case.B2_ZERO),
        (preset_surface("ex2-a"), Case.B2_GENERAL),
        (preset_surface("ex3-a"), Case.B2_GENERAL),
        (solve_constraint(DupinSpec(Case.EX1, Signature(1, -1, 1), {"c": 1.0, "a11": 0.2, "a12": 0.0, "a21": 0.3, "a22": 2.0}, ((-0.5, 0.5), (-0.5, 0.5))), "a12"), Case.B2_ZERO),
    ],
)
def test_b2_family_by_index_swap(b1_spec, case):
    spec = _b2_twin(b1_spec, case)
    assert spec.swapped().constants == b1_spec.constants
    assert constraint_residual(spec) == pytest.approx(constraint_residual(b1_spec), abs=1e-15)
    pair, twin = curvature_pair(spec), curvature_pair(b1_spec)
    t = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(pair.h1(t), twin.h2(t))
    np.testing.assert_allclose(pair.h2(t), twin.h1(t))
    for result in run_checks(spec, (9, 9), CHECKS):
        assert result.passed, result


def test_swapped_needs_b2_case():
    with pytest.raises(ValueError):
        preset_surface("ex1-a").swapped()

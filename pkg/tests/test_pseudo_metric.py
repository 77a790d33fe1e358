import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isothermic.pseudo_metric import PseudoComplex, Signature, inner, pc_eval_poly, pc_mul, pseudo_cross

ALL = Signature.all()
E1, E2, E3 = np.eye(3)

finite = st.floats(min_value=-10, max_value=10, allow_nan=False)
vec = st.tuples(finite, finite, finite).map(np.array)
signature = st.sampled_from(ALL)
pc_part = st.floats(min_value=-3, max_value=3, allow_nan=False)


def test_signature_rejects_non_signs():
    with pytest.raises(ValueError):
        Signature(1, 0, 1)
    assert Signature(-1, 1, -1).eps == -1
    assert len(set(ALL)) == 8


@pytest.mark.parametrize(
    "u, v, sig, expected",
    [
        (E1, E2, Signature(-1, 1, -1), 0.0),
        ((1, 2, 3), (1, 2, 3), Signature(1, 1, 1), 14.0),
        ((1, 2, 3), (1, 2, 3), Signature(1, -1, 1), 6.0),
    ],
)
def test_inner_examples(u, v, sig, expected):
    assert inner(np.array(u), np.array(v), sig) == expected


@pytest.mark.parametrize(
    "u, v, sig, expected",
    [
        (E1, E2, Signature(1, 1, 1), (0, 0, 1)),
        (E1, E2, Signature(1, 1, -1), (0, 0, -1)),
        (E1, E1, Signature(-1, -1, 1), (0, 0, 0)),
    ],
)
def test_pseudo_cross_examples(u, v, sig, expected):
    np.testing.assert_array_equal(pseudo_cross(u, v, sig), expected)


@settings(max_examples=80)
@given(vec, vec, vec, finite, signature)
def test_inner_symmetric_bilinear(u, v, w, a, sig):
    assert inner(u, v, sig) == pytest.approx(inner(v, u, sig), abs=1e-12)
    lhs = inner(a * u + w, v, sig)
    rhs = a * inner(u, v, sig) + inner(w, v, sig)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@settings(max_examples=80)
@given(vec, vec, vec, signature)
def test_pseudo_cross_contract(u, v, t, sig):
    w = pseudo_cross(u, v, sig)
    scale = max(1.0, np.abs(u).max() * np.abs(v).max())
    assert abs(inner(w, u, sig)) <= 1e-12 * scale * max(1.0, np.abs(u).max())
    assert abs(inner(w, v, sig)) <= 1e-12 * scale * max(1.0, np.abs(v).max())
    det = np.linalg.det(np.array([u, v, t]))
    assert inner(w, t, sig) == pytest.approx(det, rel=1e-9, abs=1e-9)


@given(vec, vec)
def test_pseudo_cross_is_euclidean_cross_for_plus_signature(u, v):
    np.testing.assert_allclose(pseudo_cross(u, v, Signature()), np.cross(u, v), rtol=1e-12, atol=1e-12)


def test_pseudo_cross_on_arrays():
    rng = np.random.default_rng(3)
    u, v = rng.standard_normal((2, 3, 5))
    w = pseudo_cross(u, v, Signature(1, -1, 1))
    assert w.shape == (3, 5)
    assert np.max(np.abs(inner(w, u, Signature(1, -1, 1)))) < 1e-12


@pytest.mark.parametrize("eps2, expected", [(1, -1.0), (-1, 1.0)])
def test_unit_squares_to_minus_eps2(eps2, expected):
    i = PseudoComplex(0.0, 1.0, eps2)
    assert pc_mul(i, i).isclose(PseudoComplex(expected, 0.0, eps2))


def test_times_conjugate_is_norm():
    z = PseudoComplex(1.0, 1.0, 1)
    assert (z * z.conj()).isclose(2.0)
    assert z.norm2() == 2.0
    assert PseudoComplex(1.0, 1.0, -1).norm2() == 0.0


def test_mixed_algebras_rejected():
    with pytest.raises(ValueError, match="mixed ε₂ algebras"):
        pc_mul(PseudoComplex(1, 1, 1), PseudoComplex(1, 1, -1))


@pytest.mark.parametrize("eps2", [1, -1])
@settings(max_examples=60)
@given(a=st.tuples(pc_part, pc_part), b=st.tuples(pc_part, pc_part), c=st.tuples(pc_part, pc_part))
def test_algebra_laws(eps2, a, b, c):
    a, b, c = (PseudoComplex(*t, eps2) for t in (a, b, c))
    assert (a * b).isclose(b * a)
    assert ((a * b) * c).isclose(a * (b * c), tol=1e-11)
    assert (a * (b + c)).isclose(a * b + a * c, tol=1e-11)
    assert (a * b).norm2() == pytest.approx(a.norm2() * b.norm2(), abs=1e-9)


@pytest.mark.parametrize(
    "coeffs, z, eps2, value, deriv",
    [
        ([0, 1], (3, 2), 1, (3, 2), (1, 0)),
        ([0, 0, 1], (1, 1), 1, (0, 2), (2, 2)),
        ([0, 0, 1], (1, 1), -1, (2, 2), (2, 2)),
    ],
)
def test_poly_examples(coeffs, z, eps2, value, deriv):
    f, df = pc_eval_poly(coeffs, PseudoComplex(*z, eps2))
    assert f.isclose(value) and df.isclose(deriv)


def test_poly_needs_coefficients():
    with pytest.raises(ValueError):
        pc_eval_poly([], PseudoComplex(0, 0))


@settings(max_examples=40)
@given(st.lists(st.tuples(pc_part, pc_part), min_size=1, max_size=4), pc_part, pc_part)
def test_poly_matches_complex_polyval(coeffs, u1, u2):
    f, df = pc_eval_poly(coeffs, PseudoComplex(u1, u2, 1))
    cc = [complex(*c) for c in coeffs]
    z = complex(u1, u2)
    ref = np.polyval(cc[::-1], z)
    dref = np.polyval(np.polyder(cc[::-1]), z) if len(cc) > 1 else 0
    assert abs(complex(f.re, f.im) - ref) < 1e-9 * max(1, abs(ref))
    assert abs(complex(df.re, df.im) - dref) < 1e-9 * max(1, abs(dref))


@pytest.mark.parametrize("eps2", [1, -1])
@settings(max_examples=40)
@given(coeffs=st.lists(st.tuples(pc_part, pc_part), min_size=2, max_size=4), u1=pc_part, u2=pc_part)
def test_cauchy_riemann_by_differences(eps2, coeffs, u1, u2):
    h = 1e-4

    def parts(a, b):
        f, _ = pc_eval_poly(coeffs, PseudoComplex(a, b, eps2))
        return np.array([f.re, f.im])

    d1 = (parts(u1 + h, u2) - parts(u1 - h, u2)) / (2 * h)
    d2 = (parts(u1, u2 + h) - parts(u1, u2 - h)) / (2 * h)
    scale = max(1.0, np.abs(d1).max(), np.abs(d2).max())
    assert abs(d1[0] - d2[1]) < 1e-6 * scale
    assert abs(d2[0] + eps2 * d1[1]) < 1e-6 * scale

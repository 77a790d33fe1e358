"""Jet propagation against symbolic differentiation and finite differences."""

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from isothermic import _kernels
from isothermic.jets import Jet, lift

x, y = sp.symbols("x y")

# (symbolic form, numpy form) pairs covering every propagated function
FUNCTIONS = [
    (sp.exp(x) * sp.sin(y), lambda a, b: np.exp(a) * np.sin(b)),
    (sp.cos(x * y) + sp.sinh(x - y), lambda a, b: np.cos(a * b) + np.sinh(a - b)),
    (sp.sqrt(2 + x**2 + y**2) / sp.cosh(x + 2 * y), lambda a, b: np.sqrt(2 + a**2 + b**2) / np.cosh(a + 2 * b)),
    ((1 + x * y) ** -1.5 + sp.log(3 + x), lambda a, b: (1 + a * b) ** -1.5 + np.log(3 + a)),
    (x**3 * y**2 - 4 * x * y + 7, lambda a, b: a**3 * b**2 - 4 * a * b + 7),
    (sp.tanh(x) * (y + 2) ** sp.Rational(1, 3), lambda a, b: np.tanh(a) * (b + 2) ** (1 / 3)),
]


@pytest.mark.parametrize("sym, num", FUNCTIONS)
def test_partials_match_sympy(sym, num, backend):
    p = (0.31, -0.27)
    J = lift(num, *p, 4)
    for i in range(5):
        for j in range(5 - i):
            expected = float(sp.diff(sym, x, i, y, j).subs({x: p[0], y: p[1]}))
            assert J.partial(i, j) == pytest.approx(expected, rel=1e-11, abs=1e-11)


def test_batch_matches_pointwise(backend, rng):
    fn = FUNCTIONS[2][1]
    u1, u2 = rng.uniform(-1, 1, (2, 7))
    batch = lift(fn, u1, u2, 3)
    for k in range(7):
        single = lift(fn, u1[k], u2[k], 3)
        np.testing.assert_allclose(batch.c[..., k], single.c, rtol=1e-14, atol=1e-15)


def test_backends_agree(rng):
    if not _kernels.HAS_NUMBA:
        pytest.skip("numba missing")
    for K in (2, 4, 6):
        mask = _kernels._triangle_mask(K)[:, :, None]
        a = rng.standard_normal((K + 1, K + 1, 11)) * mask
        b = rng.standard_normal((K + 1, K + 1, 11)) * mask
        delta = b.copy()
        delta[0, 0] = 0
        fk = rng.standard_normal((K + 1, 11))
        np.testing.assert_allclose(_kernels.mul_numpy(a, b, K), _kernels.mul_numba(a, b, K), rtol=1e-13, atol=1e-13)
        np.testing.assert_allclose(
            _kernels.compose_numpy(fk, delta, K), _kernels.compose_numba(fk, delta, K), rtol=1e-13, atol=1e-13
        )


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")


def test_d_shifts_partials():
    J = lift(FUNCTIONS[0][1], 0.2, 0.4, 4)
    D = J.d(1, 1)
    assert D.order == 2
    assert D.partial(1, 0) == pytest.approx(J.partial(2, 1), rel=1e-14)
    assert D.value == pytest.approx(J.partial(1, 1), rel=1e-14)
    with pytest.raises(ValueError):
        J.d(3, 2)
    with pytest.raises(ValueError):
        J.partial(4, 1)


def test_mixed_order_operands_truncate():
    a = lift(lambda u, v: u * v, 0.5, 0.5, 4)
    b = lift(lambda u, v: u + v, 0.5, 0.5, 2)
    assert (a * b).order == 2


def test_scalar_results_become_constant_jets():
    J = lift(lambda u, v: 3.0, np.zeros(4), np.zeros(4), 2)
    assert J.batch_shape == (4,)
    assert np.all(J.partial(1, 0) == 0)


unit = st.floats(min_value=-1.5, max_value=1.5)


@settings(max_examples=60, deadline=None)
@given(unit, unit)
def test_first_and_second_partials_match_central_differences(u1, u2):
    fn = FUNCTIONS[2][1]
    h = 1e-4
    J = lift(fn, u1, u2, 2)
    f = lambda a, b: fn(np.float64(a), np.float64(b))
    fd = {
        (1, 0): (f(u1 + h, u2) - f(u1 - h, u2)) / (2 * h),
        (0, 1): (f(u1, u2 + h) - f(u1, u2 - h)) / (2 * h),
        (2, 0): (f(u1 + h, u2) - 2 * f(u1, u2) + f(u1 - h, u2)) / h**2,
        (1, 1): (f(u1 + h, u2 + h) - f(u1 + h, u2 - h) - f(u1 - h, u2 + h) + f(u1 - h, u2 - h)) / (4 * h * h),
    }
    for ij, value in fd.items():
        assert abs(J.partial(*ij) - value) < 1e-6 * max(1.0, abs(value))


@settings(max_examples=60, deadline=None)
@given(unit, unit)
def test_algebraic_identities(u1, u2):
    a, b = Jet.coordinates(u1, u2, 4)
    s = np.sin(a * b) ** 2 + np.cos(a * b) ** 2
    np.testing.assert_allclose(s.c[0, 0], 1.0, rtol=1e-14)
    higher = s.c.copy()
    higher[0, 0] = 0
    assert np.max(np.abs(higher)) < 1e-12
    r = np.exp(a - b) * np.exp(b - a)
    assert abs(r.value - 1) < 1e-14 and abs(r.partial(2, 2)) < 1e-12
    q = (a + 3.0) / (a + 3.0)
    assert abs(q.partial(3, 1)) < 1e-12

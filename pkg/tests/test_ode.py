import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from comparison_lab._ode import (IntegrationError, cubic_hermite, integrate, polyder_rows,
                                 polyint_rows, polyval_rows, quintic_coefficients)

coef = st.floats(-5, 5, allow_nan=False)


@given(st.lists(coef, min_size=6, max_size=6), st.floats(0.1, 3.0))
def test_quintic_hermite_reproduces_quintics(c, width):
    # p(t) = sum c_k (t/width)^k on [0, width]; its Hermite data must give back c
    p = np.polynomial.Polynomial(c)
    dp, ddp = p.deriv(), p.deriv(2)
    got = quintic_coefficients(p(0), dp(0) / width, ddp(0) / width**2,
                               p(1), dp(1) / width, ddp(1) / width**2, width)
    assert np.allclose(got, c, atol=1e-9 * (1 + max(map(abs, c))))


def test_quintic_rows_evaluation_and_calculus():
    c = np.array([[1.0, 2.0, -1.0, 0.5, 0.0, 3.0]])
    p = np.polynomial.Polynomial(c[0])
    s = 0.37
    assert polyval_rows(c, s)[0] == pytest.approx(p(s), rel=1e-14)
    assert polyder_rows(c, s)[0] == pytest.approx(p.deriv()(s), rel=1e-14)
    assert polyder_rows(c, s, order=2)[0] == pytest.approx(p.deriv(2)(s), rel=1e-14)
    assert polyint_rows(c, s)[0] == pytest.approx(p.integ()(s), rel=1e-14)


def test_cubic_hermite_exact_on_cubics():
    p = np.polynomial.Polynomial([0.3, -1.0, 2.0, 0.7])
    t = np.linspace(1.0, 2.0, 7)
    got = cubic_hermite(t, 1.0, 2.0, p(1.0), p(2.0), p.deriv()(1.0), p.deriv()(2.0))
    assert np.allclose(got, p(t), atol=1e-13)


def test_integrate_exponential_and_steps_are_contiguous():
    steps = list(integrate(lambda t, y: y, 0.0, np.array([1.0]), 2.0))
    assert steps[0].t0 == 0.0 and steps[-1].t1 == pytest.approx(2.0, abs=0)
    for a, b in zip(steps, steps[1:]):
        assert a.t1 == b.t0
    assert steps[-1].y1[0] == pytest.approx(math.exp(2.0), rel=1e-9)


def test_integrate_backwards():
    steps = list(integrate(lambda t, y: -y, 0.0, np.array([1.0]), -1.0))
    assert steps[-1].t1 == -1.0
    assert steps[-1].y1[0] == pytest.approx(math.e, rel=1e-9)


def test_blow_up_raises_with_last_time():
    # y' = y^2, y(0) = 1 blows up at t = 1
    with pytest.raises(IntegrationError) as exc:
        for _ in integrate(lambda t, y: y * y, 0.0, np.array([1.0]), 2.0):
            pass
    assert 0.9 < exc.value.t_last <= 1.0

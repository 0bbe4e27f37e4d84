import math

import numpy as np
import pytest

from cevm.quadrature import QuadratureError, integrate


@pytest.mark.parametrize("f,a,b,exact", [
    (np.sin, 0.0, math.pi, 2.0),
    (np.exp, -1.0, 2.0, math.e ** 2 - math.exp(-1)),
    (lambda x: x ** 6, 0.0, 1.0, 1 / 7),
    (lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0, math.pi / 4),
    (np.sqrt, 0.0, 1.0, 2 / 3),
])
def test_integrate_known_values(f, a, b, exact):
    val, err = integrate(f, a, b, abs_tol=1e-11)
    assert val == pytest.approx(exact, abs=1e-10)
    assert err <= 1e-11


def test_integrate_reversed_and_empty():
    val, _ = integrate(np.cos, 1.0, 0.0)
    assert val == pytest.approx(-math.sin(1.0), abs=1e-12)
    assert integrate(np.cos, 2.0, 2.0) == (0.0, 0.0)


def test_integrate_reports_failure():
    with pytest.raises(QuadratureError, match="achieved error"):
        integrate(lambda x: np.sign(np.sin(50 * x)) / np.sqrt(np.abs(x - 0.3)), 0.0, 1.0,
                  abs_tol=1e-14, max_panels=20)


def test_integrate_needs_finite_limits():
    with pytest.raises(ValueError):
        integrate(np.exp, 0.0, math.inf)

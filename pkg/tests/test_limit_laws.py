import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from cevm.limit_laws import (
    SpectralMeasure,
    case1_spectral_limit,
    case4_limit,
    example7_integral,
    example7_limit,
    homogeneity_check,
    spectral_from_samples,
)

HALF = SpectralMeasure.from_atoms([(0.5, 1.0)])


def test_case1_examples():
    assert case1_spectral_limit(1.0, HALF, 1.0, 1.0) == pytest.approx(0.5, rel=1e-15)
    assert case1_spectral_limit(4.0, HALF, 1.0, 1.0) == pytest.approx(0.25, rel=1e-15)
    zero = SpectralMeasure.from_atoms([(0.0, 1.0)])
    assert case1_spectral_limit(1.0, zero, 2.0, 3.0) == 0.0


def test_case1_empty_measure_warns():
    with pytest.warns(RuntimeWarning, match="degenerate"):
        assert case1_spectral_limit(1.0, SpectralMeasure((), ()), 1.0, 1.0) == 0.0


_pos = st.floats(1e-3, 1e3)


@given(_pos, _pos, st.floats(0.1, 5), st.floats(0.1, 5))
def test_case1_homogeneity(c, z, rho, gamma):
    S = SpectralMeasure.from_atoms([(0.2, 0.3), (0.7, 1.1)])
    lhs = case1_spectral_limit(c * z, S, rho, gamma)
    rhs = c ** (-1.0 / (rho + gamma)) * case1_spectral_limit(z, S, rho, gamma)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_case4_examples():
    assert case4_limit(1.0, 1.0, 1.0) == 1.0
    assert case4_limit(4.0, 1.0, 1.0) == 0.25
    assert case4_limit(1.0, 4.0, 0.5) == pytest.approx(16.0, rel=1e-15)


@given(_pos, st.floats(0.1, 10), st.floats(0.1, 5))
def test_case4_scaling(z, beta_inf, gamma):
    assert case4_limit(z, beta_inf, gamma) == pytest.approx(case4_limit(z / beta_inf, 1.0, gamma), rel=1e-12)


def test_example7_examples():
    assert example7_limit(1.0, 1.0, 1.0) == pytest.approx(0.375, abs=1e-12)
    assert example7_limit(2.0, 1.0, 1.0) == pytest.approx(0.09375, abs=1e-12)


def _midpoint(a, b, nodes=1_000_000):
    # independent oracle on the original variable z, no substitution
    z = (np.arange(nodes) + 0.5) * (0.5 / nodes)
    return float(np.sum((1 - z) ** b * z ** (a - 1))) * (0.5 / nodes)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (1, 0.5), (2, 1), (3, 2.5), (1.5, 4)])
def test_example7_against_midpoint_oracle(a, b):
    assert example7_integral(a, b) == pytest.approx(_midpoint(a, b), abs=1e-8)


@pytest.mark.parametrize("b", [0.5, 1, 2, 3, 7.5])
def test_example7_a1_closed_form(b):
    assert example7_integral(1.0, b) == pytest.approx((1 - 2.0 ** -(b + 1)) / (b + 1), abs=1e-12)


@pytest.mark.parametrize("a,b", [(0.3, 1), (0.5, 2), (0.9, 0.7), (2, 1), (4, 3), (10, 2), (1.5, 4)])
def test_example7_against_incomplete_beta(a, b):
    oracle = special.beta(a, b + 1) * special.betainc(a, b + 1, 0.5)
    assert example7_integral(a, b) == pytest.approx(oracle, rel=1e-9)


def test_example7_decreasing_in_y():
    ys = np.geomspace(0.1, 100, 40)
    vals = [example7_limit(y, 1.3, 0.7) for y in ys]
    assert np.all(np.diff(vals) < 0)


def test_example7_errors():
    with pytest.raises(ValueError):
        example7_limit(0.0, 1, 1)
    with pytest.raises(ValueError):
        example7_integral(-1, 1)


def _single_ray(n, seed, omega=0.5):
    rng = np.random.default_rng(seed)
    r = 1.0 / (1.0 - rng.random(n))
    return np.column_stack([omega * r, (1 - omega) * r])


def test_spectral_single_ray():
    n, thr, bins = 1_000_000, 100.0, 20
    S = spectral_from_samples(_single_ray(n, 1), thr, bins)
    assert len(S.omegas) == 1
    assert abs(S.omegas[0] - 0.5) <= 1.0 / bins
    se = thr * math.sqrt((1 / thr) / n)
    assert abs(S.total_mass - 1.0) <= 3 * se


def test_spectral_symmetric_rays():
    n = 1_000_000
    pairs = np.vstack([_single_ray(n, 2, 0.25), _single_ray(n, 3, 0.75)])
    S = spectral_from_samples(pairs, 50.0, 10)
    assert len(S.omegas) == 2
    m1, m2 = S.weights
    se = math.sqrt(m1 / 50.0 / n) * 50.0
    assert abs(m1 - m2) <= 3 * math.sqrt(2) * se


def test_spectral_no_exceedances():
    with pytest.raises(ValueError, match="insufficient tail data"):
        spectral_from_samples(np.ones((100, 2)), 10.0, 5)


def _ray_nu(rect):
    # nu for R(1/2, 1/2), R standard Pareto: nu(r/2 in (lo, hi]) = 1/(2 lo) - 1/(2 hi)
    (x0, x1), (y0, y1) = rect
    lo, hi = max(x0, y0), min(x1, y1)
    if lo >= hi:
        return 0.0
    return 1 / (2 * lo) - (0.0 if math.isinf(hi) else 1 / (2 * hi))


def test_homogeneity_examples():
    rect = ((1.0, 3.0), (0.5, 4.0))
    assert homogeneity_check(_ray_nu, 2.0, rect, 1e-9)
    assert homogeneity_check(lambda r: 0.1 + _ray_nu(r), 1.0, rect, 0.0)
    assert not homogeneity_check(lambda r: 0.1 + _ray_nu(r), 2.0, rect, 1e-3)


def test_spectral_measure_json_and_validation():
    S = SpectralMeasure.from_atoms([(0.1, 0.5), (0.9, 2.0)])
    assert SpectralMeasure.from_json(S.to_json()) == S
    with pytest.raises(ValueError):
        SpectralMeasure.from_atoms([(1.0, 1.0)])
    with pytest.raises(ValueError):
        SpectralMeasure.from_atoms([(0.5, -1.0)])

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cevm.evt_core import (
    GevShape,
    PsiPair,
    RvIndex,
    ScalingFunction,
    Survival,
    doa_scalings,
    gev_cdf,
    left_inverse,
    psi_eval,
)

# ---------------------------------------------------------------- gev_cdf


@pytest.mark.parametrize("x,g,expected", [(0.0, 0.0, math.exp(-1)), (0.0, 1.0, math.exp(-1)), (1.0, -1.0, 1.0)])
def test_gev_cdf_examples(x, g, expected):
    assert gev_cdf(x, GevShape(g)) == pytest.approx(expected, abs=1e-15)


def test_gev_cdf_nan_is_an_error():
    with pytest.raises(ValueError, match="invalid argument"):
        gev_cdf(float("nan"), GevShape(0.5))


def test_gev_cdf_clamps_outside_support():
    assert gev_cdf(-5.0, GevShape(1.0)) == 0.0
    assert gev_cdf(5.0, GevShape(-1.0)) == 1.0


@pytest.mark.parametrize("g", [-2, -1, -0.5, 0, 0.5, 1, 2])
def test_gev_cdf_monotone_with_correct_limits(g):
    shape = GevShape(g)
    lo, hi = shape.support()
    a = lo if math.isfinite(lo) else -1e6
    b = hi if math.isfinite(hi) else 1e12
    grid = np.concatenate([np.linspace(a, min(b, 50.0), 1000), np.geomspace(51.0, b, 200) if b > 51 else []])
    vals = gev_cdf(grid, shape)
    assert np.all(np.diff(vals) >= 0)
    assert vals[0] <= 1e-12
    assert vals[-1] >= 1 - 1e-5


# ---------------------------------------------------------------- RvIndex / ScalingFunction


def test_rv_index_conventions():
    r = RvIndex(-0.5)
    assert r.tail_exponent == 0.5
    assert r.xi == 2.0


def test_scaling_power_and_limit_default():
    s = ScalingFunction.power(2.0, -1.0)
    assert s(4.0) == 0.5
    assert s.limit_at_infinity == 0.0


def test_scaling_rejects_t_below_one():
    with pytest.raises(ValueError):
        ScalingFunction.power(1.0, 1.0)(0.5)


def test_scaling_tabulated_interpolates_in_log_t():
    s = ScalingFunction.tabulated([1.0, 100.0], [0.0, 2.0], kappa=0.0)
    assert s(10.0) == pytest.approx(1.0)


def test_scaling_tabulated_rejects_non_monotone():
    with pytest.raises(ValueError):
        ScalingFunction.tabulated([1.0, 2.0, 3.0], [0.0, 2.0, 1.0], kappa=0.0)


# ---------------------------------------------------------------- left_inverse


def test_left_inverse_examples():
    assert left_inverse(lambda s: s, 3.0, 0.0, 10.0) == 3.0
    assert left_inverse(lambda s: s * s, 4.0, 0.0, 10.0) == 2.0

    def step(s):
        return 1.0 if s < 2.0 else 5.0

    assert left_inverse(step, 2.0, 1.0, 3.0) == 2.0


def test_left_inverse_undefined_above_range():
    with pytest.raises(ValueError, match="inverse undefined"):
        left_inverse(lambda s: s, 11.0, 0.0, 10.0)


_steps = st.lists(st.floats(0.0, 10.0), min_size=1, max_size=6).map(sorted)


@given(_steps, st.floats(-1.0, 11.0), st.floats(0.0, 1.0))
def test_left_inverse_galois_pair(knots, s, yfrac):
    # right-continuous nondecreasing step function plus a gentle slope
    knots = np.asarray(knots)

    def f(v):
        return float(np.searchsorted(knots, v, side="right")) + 0.01 * v

    lo, hi = -1.0, 11.0
    assert left_inverse(f, f(s), lo, hi) <= s
    y = f(lo) + yfrac * (f(hi) - f(lo))
    assert f(left_inverse(f, y, lo, hi)) >= y


# ---------------------------------------------------------------- doa_scalings


def _doa_error(survival, g, t=1e6):
    a, b = doa_scalings(survival, GevShape(g))
    lo, hi = (-0.9, 5.0) if g > 0 else (-0.9 / abs(g), 0.99 / abs(g))
    ys = np.linspace(lo, hi, 101)
    lhs = t * survival(a(t) * ys + b(t))
    rhs = (1.0 + g * ys) ** (-1.0 / g)
    return float(np.max(np.abs(lhs - rhs))), a, b


def test_doa_pareto():
    err, a, b = _doa_error(Survival.pareto(1.0), 1.0)
    assert b(1e3) == pytest.approx(1e3)
    assert a(1e3) == pytest.approx(1e3)
    assert err <= 1e-3


def test_doa_uniform():
    err, a, b = _doa_error(Survival.uniform(0.0, 1.0), -1.0)
    assert b(10.0) == pytest.approx(0.9)
    assert a(10.0) == pytest.approx(0.1)
    assert err <= 1e-3


def test_doa_bounded_power():
    err, a, b = _doa_error(Survival.bounded_power(2.0), -0.5)
    assert b(100.0) == pytest.approx(1 - 100 ** -0.5)
    assert a(100.0) == pytest.approx(0.5 * 100 ** -0.5)
    assert err <= 1e-3


def test_doa_negative_gamma_identity_is_exact():
    surv = Survival.bounded_power(2.0)
    a, b = doa_scalings(surv, GevShape(-0.5))
    for t in (2.0, 17.0, 1e5):
        assert a(t) == 0.5 * (1.0 - b(t))


def test_doa_without_closed_form_quantile():
    # no isf: quantiles via left_inverse
    surv = Survival(lambda x: (1.0 - x) ** 2, 0.0, 1.0)
    a, b = doa_scalings(surv, GevShape(-0.5))
    assert b(100.0) == pytest.approx(0.9, abs=1e-12)


def test_doa_errors():
    with pytest.raises(ValueError):
        doa_scalings(Survival.pareto(1.0), GevShape(0.0))
    with pytest.raises(ValueError):
        doa_scalings(Survival.pareto(1.0), GevShape(-1.0))
    bumpy = Survival(lambda x: np.where(x < 0.5, 1 - x, 1 - x + 0.3), 0.0, 1.0)
    with pytest.raises(ValueError, match="non-monotone"):
        doa_scalings(bumpy, GevShape(-1.0))


def test_tabulated_survival_quantiles():
    surv = Survival.tabulated([0.0, 1.0, 2.0], [1.0, 0.5, 0.0])
    assert surv.quantile_level(2.0) == pytest.approx(1.0)
    assert surv(1.5) == pytest.approx(0.25)
    with pytest.raises(ValueError, match="non-monotone"):
        Survival.tabulated([0.0, 1.0, 2.0], [1.0, 0.5, 0.7])


# ---------------------------------------------------------------- psi_eval


def test_psi_eval_examples():
    assert psi_eval(PsiPair(2.0, 1.0, False), 1.0) == (1.0, 0.0)
    p1, p2 = psi_eval(PsiPair(0.0, 3.0, False), math.e)
    assert p1 == 1.0 and p2 == pytest.approx(3.0)
    assert psi_eval(PsiPair(2.0, 0.0, True), 5.0) == (25.0, 0.0)


def test_psi_eval_power_branch():
    p1, p2 = psi_eval(PsiPair(-1.0, 2.0, False), 2.0)
    assert p1 == 0.5
    assert p2 == pytest.approx((2.0 / -1.0) * (0.5 - 1.0))


def test_psi_eval_needs_positive_x():
    with pytest.raises(ValueError):
        psi_eval(PsiPair(1.0), 0.0)

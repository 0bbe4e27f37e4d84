import numpy as np
import pytest

from cevm.dists import DistSpec


def test_point_mass():
    d = DistSpec.from_json(2.5)
    assert d == DistSpec.point(2.5)
    assert np.all(d.ppf(np.array([0.1, 1.0])) == 2.5)
    assert d.moment(2.0) == 6.25
    assert d.support == (2.5, 2.5)


def test_uniform_moments_and_cdf():
    d = DistSpec.uniform(1.0, 2.0)
    assert d.moment(1.0) == pytest.approx(1.5, rel=1e-12)
    assert d.moment(-1.0) == pytest.approx(np.log(2.0), rel=1e-10)
    np.testing.assert_allclose(d.cdf([0.5, 1.25, 3.0]), [0.0, 0.25, 1.0])
    u = np.linspace(0.01, 1.0, 50)
    np.testing.assert_allclose(d.cdf(d.ppf(u)), u, rtol=1e-12)


def test_discrete_ppf_and_cdf():
    d = DistSpec.discrete([1.0, 3.0], [0.25, 0.75])
    assert d.ppf(np.array([0.2]))[0] == 1.0
    assert d.ppf(np.array([0.25]))[0] == 3.0
    assert d.ppf(np.array([1.0]))[0] == 3.0
    np.testing.assert_allclose(d.cdf([0.0, 1.0, 2.9, 3.0]), [0, 0.25, 0.25, 1.0])
    assert d.moment(1.0) == pytest.approx(2.5)


@pytest.mark.parametrize("d", [DistSpec.point(1.0), DistSpec.uniform(0.5, 1.5), DistSpec.discrete([1, 2], [0.5, 0.5])])
def test_json_roundtrip(d):
    assert DistSpec.from_json(d.to_json()) == d


@pytest.mark.parametrize("bad", [
    {"kind": "gamma"},
    {"kind": "uniform", "low": 2.0, "high": 1.0},
    {"kind": "discrete", "values": [1.0], "probs": [0.5]},
    {"kind": "discrete", "values": [1.0, 2.0], "probs": [-0.5, 1.5]},
])
def test_invalid_specs(bad):
    with pytest.raises(ValueError):
        DistSpec.from_json(bad)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixret import DiscreteLaw, InputError, law_pmf, limit_params, tv_distance
from mixret.counting import EmpiricalDistribution
from mixret.laws import tv_distance_with_tail

# half the l1 distance summed term by term over k = 0..40 in plain Python
TV_BIN3_POIS15 = 0.16428332961037168
TV_BIN2_POIS1 = 0.1981808382428365


def test_limit_param_examples():
    assert limit_params(0.01, None, 200).lam == pytest.approx(2.0)
    assert limit_params(0.04, 0.01, 10).rho == pytest.approx(0.2)
    p = limit_params(0.5 - 1e-16, 0.5, 1)
    assert p.rho == pytest.approx(0.5)
    assert p.varrho == pytest.approx(2 / 3)
    for bad in (0.0, 1.0):
        with pytest.raises(InputError):
            limit_params(bad, None, 10)


@given(st.floats(1e-6, 0.999), st.floats(1e-6, 0.999))
def test_varrho_exceeds_rho(pV, pW):
    p = limit_params(pV, pW, 1)
    assert p.varrho > p.rho


def test_pmf_examples():
    assert law_pmf(DiscreteLaw.poisson(1.0), 0) == pytest.approx(math.exp(-1))
    assert law_pmf(DiscreteLaw.geometric(0.25), 2) == pytest.approx(0.140625)
    tiny = law_pmf(DiscreteLaw.poisson(2.0), 300)
    assert 0.0 <= tiny < 1e-300
    with pytest.raises(InputError):
        law_pmf(DiscreteLaw.poisson(2.0), -1)


def test_law_validation():
    with pytest.raises(InputError):
        DiscreteLaw.poisson(0)
    with pytest.raises(InputError):
        DiscreteLaw.geometric(1.0)
    with pytest.raises(InputError):
        DiscreteLaw.explicit([0.5, 0.4])


@pytest.mark.parametrize("lam", [0.1, 2.0, 17.0, 50.0])
def test_poisson_sums_to_one(lam):
    law = DiscreteLaw.poisson(lam)
    assert law.pmf_array(law.truncation_point()).sum() == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("rho", [0.01, 0.3, 0.99])
def test_geometric_sums_to_one(rho):
    law = DiscreteLaw.geometric(rho)
    assert law.pmf_array(law.truncation_point()).sum() == pytest.approx(1.0, abs=1e-10)


def test_tv_examples():
    g = DiscreteLaw.geometric(0.25)
    assert tv_distance(g, g) == 0.0
    assert tv_distance(DiscreteLaw.explicit([1.0]), g) == pytest.approx(0.75, abs=1e-12)
    assert tv_distance(DiscreteLaw.binomial(3, 0.5), DiscreteLaw.poisson(1.5)) == pytest.approx(TV_BIN3_POIS15, abs=1e-12)
    assert tv_distance(DiscreteLaw.binomial(2, 0.5), DiscreteLaw.poisson(1.0)) == pytest.approx(TV_BIN2_POIS1, abs=1e-12)


def test_tv_reports_tail_uncertainty():
    value, tail = tv_distance_with_tail(DiscreteLaw.poisson(3.0), DiscreteLaw.geometric(0.2))
    assert 0 < value < 1
    assert 0 <= tail < 1e-11


def test_tv_accepts_empirical():
    emp = EmpiricalDistribution({0: 1, 1: 2, 2: 1}, 4)
    assert tv_distance(emp, DiscreteLaw.binomial(2, 0.5)) == pytest.approx(0.0, abs=1e-15)


def _random_law(draw):
    kind = draw(st.sampled_from(["poisson", "geometric", "explicit"]))
    if kind == "poisson":
        return DiscreteLaw.poisson(draw(st.floats(0.05, 20)))
    if kind == "geometric":
        return DiscreteLaw.geometric(draw(st.floats(0.05, 0.95)))
    w = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12))) + 1e-3
    return DiscreteLaw.explicit(w / w.sum())


laws = st.composite(_random_law)


@settings(max_examples=80, deadline=None)
@given(laws(), laws(), laws())
def test_tv_metric_properties(a, b, c):
    ab, ba = tv_distance(a, b), tv_distance(b, a)
    assert 0.0 <= ab <= 1.0
    assert ab == pytest.approx(ba, abs=1e-12)
    assert tv_distance(a, c) <= ab + tv_distance(b, c) + 1e-11


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 200), st.floats(1e-4, 0.5))
def test_le_cam_inequality(N, p):
    if N * p > 10:
        p = 10 / N
    assert tv_distance(DiscreteLaw.binomial(N, p), DiscreteLaw.poisson(N * p)) <= p + 1e-12

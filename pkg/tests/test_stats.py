import math

import numpy as np
import pytest
from scipy.stats import levy_stable

from urnsim.errors import DegenerateFit, EmptyInput, SupportMismatch, TooFewSamples
from urnsim.rngutil import make_rng
from urnsim.stats import (
    chi_square_gof,
    ecf,
    ks_critical_value,
    ks_two_sample,
    ks_vs_cdf,
    normal_cdf,
    sample_mean_cov,
    stable_alpha_fit,
    tv_distance,
)


def test_normal_cdf_reference_values():
    assert normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-12)
    assert normal_cdf(-1.0) == pytest.approx(1 - 0.8413447460685429, abs=1e-12)
    xs = np.linspace(-6, 6, 200)
    ys = [normal_cdf(x) for x in xs]
    assert all(a < b for a, b in zip(ys, ys[1:]))


def test_ks_vs_cdf_hand_value():
    # ECDF of {0.25, 0.75} vs Uniform(0,1): max gap is 0.25
    report = ks_vs_cdf([0.25, 0.75], lambda x: min(max(x, 0.0), 1.0), threshold=0.3)
    assert report.statistic == pytest.approx(0.25, abs=1e-12)
    assert report.passed


def test_ks_vs_cdf_uniform_samples_pass_at_critical_value():
    rng = make_rng(31)
    x = rng.random(20_000)
    report = ks_vs_cdf(x, lambda v: min(max(v, 0.0), 1.0))
    assert report.threshold == pytest.approx(ks_critical_value(20_000))
    assert report.passed


def test_ks_lattice_correction_removes_discretization_gap():
    # integer-rounded Gaussians fail a raw KS at large m but pass corrected
    rng = make_rng(32)
    sigma = 3.0
    z = np.round(rng.normal(scale=sigma, size=50_000))
    cdf = lambda x: normal_cdf(x / sigma)
    raw = ks_vs_cdf(z, cdf)
    corrected = ks_vs_cdf(z, cdf, lattice_span=1.0)
    assert raw.statistic > corrected.statistic
    assert corrected.passed


def test_ks_needs_samples():
    with pytest.raises(TooFewSamples):
        ks_vs_cdf([0.5], normal_cdf)
    with pytest.raises(TooFewSamples):
        ks_two_sample([1.0, 2.0], [1.0])


def test_ks_two_sample_extremes():
    same = np.arange(100, dtype=float)
    assert ks_two_sample(same, same).statistic == 0.0
    report = ks_two_sample(np.zeros(50), np.ones(50))
    assert report.statistic == pytest.approx(1.0)


def test_tv_distance_properties():
    p = {"a": 0.5, "b": 0.5}
    q = {"b": 0.5, "c": 0.5}
    assert tv_distance(p, p) == 0.0
    assert tv_distance(p, q) == pytest.approx(0.5)
    assert tv_distance(p, q) == tv_distance(q, p)
    assert tv_distance({"a": 1.0}, {"b": 1.0}) == pytest.approx(1.0)
    # unnormalized masses are normalized first
    assert tv_distance({"a": 2.0, "b": 2.0}, p) == 0.0
    assert tv_distance([1.0, 1.0], [1.0, 1.0]) == 0.0
    with pytest.raises(SupportMismatch):
        tv_distance([1.0, 1.0], [1.0, 1.0, 1.0])
    with pytest.raises(EmptyInput):
        tv_distance({}, p)


def test_chi_square_gof():
    good = chi_square_gof([100, 200, 300], [100, 200, 300])
    assert good.statistic == 0.0 and good.passed
    bad = chi_square_gof([600, 0, 0], [200, 200, 200])
    assert not bad.passed
    impossible = chi_square_gof([1, 1], [2.0, 0.0])
    assert impossible.statistic == math.inf
    with pytest.raises(SupportMismatch):
        chi_square_gof([1, 2], [1, 2, 3])


def test_sample_mean_cov():
    pts = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0], [0.0, -2.0]])
    mean, cov = sample_mean_cov(pts)
    assert np.allclose(mean, [0.0, 0.0])
    assert np.allclose(cov, [[0.5, 0.0], [0.0, 2.0]])


def test_ecf_of_gaussian():
    rng = make_rng(33)
    x = rng.normal(size=100_000)
    t = np.array([0.5, 1.0, 2.0])
    vals = ecf(x, t)
    assert np.allclose(np.abs(vals), np.exp(-t * t / 2), atol=0.01)


@pytest.mark.parametrize("alpha", [0.8, 1.5])
def test_stable_alpha_fit_against_reference_sampler(alpha):
    rng = np.random.default_rng(34)
    x = levy_stable.rvs(alpha, 0.0, size=200_000, random_state=rng)
    alpha_hat, sigma_hat = stable_alpha_fit(x)
    assert abs(alpha_hat - alpha) < 0.1
    assert sigma_hat > 0


def test_stable_alpha_fit_gaussian_edge():
    rng = make_rng(35)
    x = rng.normal(size=200_000)
    alpha_hat, sigma_hat = stable_alpha_fit(x)
    assert abs(alpha_hat - 2.0) < 0.1
    # SaS scale of N(0,1) is 1/sqrt(2): exp(-(sigma t)^alpha) = exp(-t^2/2)
    assert abs(sigma_hat - 1.0 / math.sqrt(2.0)) < 0.05


def test_stable_alpha_fit_degenerate():
    with pytest.raises(EmptyInput):
        stable_alpha_fit([])
    with pytest.raises(DegenerateFit):
        stable_alpha_fit(np.zeros(100))

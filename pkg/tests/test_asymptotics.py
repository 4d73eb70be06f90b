import math

import numpy as np
import pytest

from urnsim.asymptotics import (
    Convolved,
    Gaussian,
    PointMass,
    SaS,
    block_limit_for,
    center_scale,
    dirichlet_block_moments,
    increment_moments,
    scaling_for,
    xi_limit,
)
from urnsim.colors import FiniteIdx
from urnsim.errors import UnsupportedKernel
from urnsim.kernels import (
    HexWalk,
    InitialConfig,
    LatticeWalk,
    PeriodicWalk,
    StableWalk,
    block_diagonal,
    finite_matrix,
    stationary_distribution,
)


def test_ergodic_limit_is_stationary_point_mass():
    k = finite_matrix([[0.5, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]])
    spec, law = scaling_for(k)
    assert isinstance(law, PointMass)
    assert np.allclose(law.pi, stationary_distribution(k))
    assert spec.a(5.0) == 0.0 and spec.b(5.0) == 1.0


def test_driftless_walk_limit():
    srw = LatticeWalk(1, {(-1,): 0.5, (1,): 0.5})
    spec, law = scaling_for(srw)
    assert isinstance(law, Gaussian)
    assert law.cov == ((1.0,),)
    assert spec.v == (0.0, 0.0) or spec.v == (0.0,)
    assert spec.b(4.0) == 2.0


def test_drifted_walk_limit_covariance_is_second_moment():
    # centering direction mu; the extra fluctuation along mu restores the
    # full second-moment matrix: (Sigma - mu mu^T) + mu mu^T = Sigma
    walk = LatticeWalk(2, {(1, 0): 0.5, (0, 1): 0.3, (-1, -1): 0.2})
    mu, sig = increment_moments(walk.increment)
    spec, law = scaling_for(walk)
    assert isinstance(law, Gaussian)
    assert np.allclose(law.cov, sig, atol=1e-12)
    assert np.allclose(spec.v, mu)


def test_xi_limit_gaussian_collapse_random_fixtures():
    rng = np.random.default_rng(42)
    for _ in range(10):
        d = int(rng.integers(1, 5))
        a = rng.normal(size=(d, d))
        cov = a @ a.T
        v = rng.normal(size=d)
        at, bt = float(rng.uniform(0.1, 2)), float(rng.uniform(0.1, 2))
        base = Gaussian(mean=tuple(0.0 for _ in range(d)),
                        cov=tuple(tuple(r) for r in cov))
        out = xi_limit(base, at, bt, tuple(v))
        want = cov + (at * bt) ** 2 * np.outer(v, v)
        assert isinstance(out, Gaussian)
        assert np.max(np.abs(np.array(out.cov) - want)) < 1e-12


def test_xi_limit_noop_when_either_factor_vanishes():
    base = SaS(alpha=1.5)
    assert xi_limit(base, 0.0, 1.0, (1.0,)) is base
    assert xi_limit(base, 1.0, 0.0, (1.0,)) is base
    out = xi_limit(base, 1.0, 2.0, (1.0,))
    assert isinstance(out, Convolved) and out.extra_var == 4.0


def test_stable_walk_scalings():
    spec, law = scaling_for(StableWalk(0.8))
    assert spec.a_name == "zero" and spec.b_exponent == pytest.approx(1.25)
    assert isinstance(law, SaS) and law.alpha == 0.8
    spec, law = scaling_for(StableWalk(1.5))
    assert spec.a_name == "identity" and spec.v == (0.0,)
    assert spec.b_tilde == 0.0  # sqrt(x) / x^(1/alpha) -> 0 below alpha = 2
    spec, _ = scaling_for(StableWalk(2.0))
    assert spec.b_tilde == 1.0


def test_hex_limit_is_half_identity():
    spec, law = scaling_for(HexWalk())
    assert isinstance(law, Gaussian)
    assert law.mean == (0.0, 0.0)
    assert np.allclose(law.cov, 0.5 * np.eye(2), atol=0)
    assert spec.v == (0.0, 0.0)


def test_periodic_walk_averages_phases():
    pw = PeriodicWalk(2, [{(1,): 1.0}, {(-1,): 1.0}])
    spec, law = scaling_for(pw)
    assert np.allclose(spec.v, [0.0])
    assert isinstance(law, Gaussian)
    assert np.allclose(law.cov, [[1.0]])


def test_center_scale():
    spec, _ = scaling_for(LatticeWalk(1, {(0,): 0.5, (2,): 0.5}))  # drift 1
    n = math.e ** 4  # ln n = 4
    out = center_scale([(6.0,), (2.0,)], n, spec)
    assert np.allclose(out[:, 0], [1.0, -1.0])
    with pytest.raises(ValueError):
        center_scale([(0.0,)], 1, spec)


def test_unsupported_kernel():
    bd = block_diagonal([[[1.0]], [[1.0]]])
    with pytest.raises(UnsupportedKernel):
        scaling_for(bd)


def test_block_limit_moments():
    bd = block_diagonal([[[1.0]], [[1.0]]])
    init = InitialConfig([(FiniteIdx(0), 0.5), (FiniteIdx(1), 0.5)])
    limit = block_limit_for(bd, init)
    assert limit.dirichlet_params == (0.5, 0.5)
    moments = dirichlet_block_moments(limit)
    for mean, var in moments:
        assert mean == 0.5 and var == pytest.approx(0.125)

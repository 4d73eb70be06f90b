"""Centering/scaling specifications and limit laws per kernel family.

Each implemented family has a centering a(x) in {0, x}, a direction v, and
a scaling b(x) in {1, sqrt(x), x^(1/alpha)}. The draw-sequence limit is the
chain limit convolved with an extra Gaussian along v whenever both the
centering slope and sqrt(x)/b(x) have nonzero limits.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedKernel
from .kernels import (
    BlockDiagonal,
    FiniteMatrix,
    HexWalk,
    InitialConfig,
    LatticeWalk,
    PeriodicWalk,
    StableWalk,
    finite_matrix,
    stationary_distribution,
)


@dataclass(frozen=True)
class ScalingSpec:
    a_name: str  # "zero" or "identity"
    b_name: str  # "one", "sqrt" or "power"
    v: tuple
    a_tilde: float
    b_tilde: float
    b_exponent: float = 1.0  # only for b_name == "power"

    def a(self, x):
        return 0.0 if self.a_name == "zero" else x

    def b(self, x):
        if self.b_name == "one":
            return 1.0
        if self.b_name == "sqrt":
            return math.sqrt(x)
        return x ** self.b_exponent


@dataclass(frozen=True)
class PointMass:
    pi: tuple

    def to_json(self):
        return {"law": "point_mass", "pi": list(self.pi)}


@dataclass(frozen=True)
class Gaussian:
    mean: tuple
    cov: tuple  # row tuples, symmetric PSD

    def __post_init__(self):
        c = np.array(self.cov)
        if np.max(np.abs(c - c.T)) > 1e-10:
            raise ValueError("covariance must be symmetric")
        if np.min(np.linalg.eigvalsh((c + c.T) / 2)) < -1e-10:
            raise ValueError("covariance must be positive semidefinite")

    def to_json(self):
        return {"law": "gaussian", "mean": list(self.mean), "cov": [list(r) for r in self.cov]}


@dataclass(frozen=True)
class SaS:
    alpha: float
    sigma_scale: float = None  # not pinned analytically; estimated from data

    def to_json(self):
        return {"law": "sas", "alpha": self.alpha, "sigma_scale": self.sigma_scale}


@dataclass(frozen=True)
class Convolved:
    base: object
    extra_var: float
    direction: tuple

    def to_json(self):
        return {
            "law": "convolved",
            "base": self.base.to_json(),
            "extra_var": self.extra_var,
            "direction": list(self.direction),
        }


LimitLaw = PointMass | Gaussian | SaS | Convolved


def _as_rows(mat):
    return tuple(tuple(float(x) for x in row) for row in np.atleast_2d(mat))


def xi_limit(base, a_tilde, b_tilde, v):
    """Convolve the chain limit with Normal(0, a~^2 b~^2) along v; no-op when
    either limit vanishes. Gaussian bases collapse analytically."""
    extra = a_tilde * a_tilde * b_tilde * b_tilde
    if extra == 0.0:
        return base
    v = np.atleast_1d(np.array(v, dtype=float))
    if isinstance(base, Gaussian):
        cov = np.array(base.cov) + extra * np.outer(v, v)
        return Gaussian(mean=base.mean, cov=_as_rows(cov))
    return Convolved(base=base, extra_var=extra, direction=tuple(v))


def increment_moments(increment):
    """Mean vector and second-moment matrix of a finitely supported law."""
    d = len(increment[0][0])
    mu = np.zeros(d)
    sig = np.zeros((d, d))
    for step, w in increment:
        s = np.array(step, dtype=float)
        mu += w * s
        sig += w * np.outer(s, s)
    return mu, sig


def scaling_for(kernel):
    """(ScalingSpec, LimitLaw) for the draw sequence of one kernel family."""
    if isinstance(kernel, FiniteMatrix):
        pi = stationary_distribution(kernel)
        spec = ScalingSpec(a_name="zero", b_name="one", v=(0.0,), a_tilde=0.0, b_tilde=1.0)
        return spec, PointMass(pi=tuple(float(p) for p in pi))
    if isinstance(kernel, LatticeWalk):
        mu, sig = increment_moments(kernel.increment)
        spec = ScalingSpec(
            a_name="identity", b_name="sqrt", v=tuple(mu), a_tilde=1.0, b_tilde=1.0
        )
        base = Gaussian(mean=tuple(0.0 for _ in mu), cov=_as_rows(sig - np.outer(mu, mu)))
        return spec, xi_limit(base, 1.0, 1.0, mu)
    if isinstance(kernel, StableWalk):
        alpha = kernel.alpha
        b_tilde = 1.0 if alpha == 2.0 else 0.0  # sqrt(x)/x^(1/alpha) -> 0 for alpha < 2
        if alpha <= 1.0:
            spec = ScalingSpec(
                a_name="zero", b_name="power", v=(0.0,), a_tilde=0.0,
                b_tilde=b_tilde, b_exponent=1.0 / alpha,
            )
        else:
            # centering slope 1 but v = E[Y] = 0 by symmetry
            spec = ScalingSpec(
                a_name="identity", b_name="power", v=(0.0,), a_tilde=1.0,
                b_tilde=b_tilde, b_exponent=1.0 / alpha,
            )
        return spec, SaS(alpha=alpha)
    if isinstance(kernel, (PeriodicWalk, HexWalk)):
        if isinstance(kernel, HexWalk):
            # both partition classes have mean 0 and second moment I/2, exactly
            mu_bar = np.zeros(2)
            sig_bar = 0.5 * np.eye(2)
        else:
            mus, sigs = zip(*(increment_moments(law) for law in kernel.increment_laws))
            mu_bar = np.mean(mus, axis=0)
            sig_bar = np.mean(sigs, axis=0)
        spec = ScalingSpec(
            a_name="identity", b_name="sqrt", v=tuple(mu_bar), a_tilde=1.0, b_tilde=1.0
        )
        base = Gaussian(
            mean=tuple(0.0 for _ in mu_bar),
            cov=_as_rows(sig_bar - np.outer(mu_bar, mu_bar)),
        )
        return spec, xi_limit(base, 1.0, 1.0, mu_bar)
    raise UnsupportedKernel(f"no scaling limit implemented for {kernel!r}")


def center_scale(samples, n, spec: ScalingSpec):
    """Map each point x to (x - a(ln n) v) / b(ln n)."""
    if n < 2:
        raise ValueError("need n >= 2 for a nondegenerate log scale")
    x = math.log(n)
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    v = np.array(spec.v, dtype=float)
    if v.shape[0] != pts.shape[1]:
        v = np.zeros(pts.shape[1])
    return (pts - spec.a(x) * v) / spec.b(x)


@dataclass(frozen=True)
class BlockLimit:
    dirichlet_params: tuple  # c_i = U_0(C_i); unit total
    block_stationaries: tuple  # pi_i per block


def block_limit_for(kernel: BlockDiagonal, init: InitialConfig) -> BlockLimit:
    """Limit description for a block-diagonal kernel with ergodic blocks:
    block masses converge to a Dirichlet with parameters U_0(C_i)."""
    sizes = [len(b) for b in kernel.blocks]
    c = [0.0] * len(kernel.blocks)
    for color, w in init.atoms:
        c[kernel.block_of(color.id)] += w
    pis = []
    for b, size in enumerate(sizes):
        block = kernel.blocks[b]
        if len(block[0]) != size:
            off = kernel.block_offsets[b]
            block = [row[off : off + size] for row in block]
        pis.append(tuple(float(p) for p in stationary_distribution(finite_matrix(block))))
    return BlockLimit(dirichlet_params=tuple(c), block_stationaries=tuple(pis))


def dirichlet_block_moments(limit: BlockLimit):
    """Per-block (mean, variance) of the limiting block masses.

    The parameters c_i sum to 1, so the total concentration is 1 and
    var_i = c_i (1 - c_i) / 2.
    """
    out = []
    for c in limit.dirichlet_params:
        out.append((c, c * (1.0 - c) / 2.0))
    return out

"""Statistical verification primitives: reference CDFs, goodness-of-fit
tests, distances, empirical characteristic functions and tail-index fits."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2

from .errors import (
    DegenerateFit,
    EmptyInput,
    SupportMismatch,
    TooFewSamples,
)


@dataclass
class TestReport:
    test_name: str
    statistic: float
    threshold: float
    sample_size: int
    passed: bool
    metadata: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "test_name": self.test_name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "sample_size": self.sample_size,
            "pass": self.passed,
            "metadata": {k: str(v) for k, v in self.metadata.items()},
        }


def normal_cdf(x):
    """Standard Gaussian CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def ks_vs_cdf(samples, cdf, threshold=None, name="ks_vs_cdf", lattice_span=None) -> TestReport:
    """One-sample Kolmogorov-Smirnov distance against a reference CDF.

    With lattice_span set, samples are treated as lattice-valued against a
    continuous reference: the empirical CDF at each atom is compared to the
    CDF evaluated half a lattice span to the right, which removes the
    deterministic half-pmf discretization gap.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    m = x.shape[0]
    if m < 2:
        raise TooFewSamples("KS test needs at least 2 samples")
    if lattice_span is not None:
        vals, counts = np.unique(x, return_counts=True)
        ecdf = np.cumsum(counts) / m
        ref = np.array([cdf(v + lattice_span / 2.0) for v in vals])
        stat = float(np.max(np.abs(ecdf - ref)))
    else:
        ref = np.array([cdf(v) for v in x])
        hi = np.arange(1, m + 1) / m - ref
        lo = ref - np.arange(0, m) / m
        stat = float(max(np.max(hi), np.max(lo)))
    thr = threshold if threshold is not None else ks_critical_value(m)
    return TestReport(
        test_name=name, statistic=stat, threshold=thr, sample_size=m,
        passed=stat <= thr,
        metadata={"lattice_span": lattice_span} if lattice_span else {},
    )


def ks_critical_value(m, significance=1e-3):
    """Asymptotic one-sample KS critical value c(sig)/sqrt(m)."""
    return math.sqrt(-0.5 * math.log(significance / 2.0)) / math.sqrt(m)


def ks_two_sample(a, b, threshold=None, name="ks_two_sample") -> TestReport:
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size < 2 or b.size < 2:
        raise TooFewSamples("two-sample KS needs at least 2 samples per side")
    grid = np.concatenate([a, b])
    ca = np.searchsorted(a, grid, side="right") / a.size
    cb = np.searchsorted(b, grid, side="right") / b.size
    stat = float(np.max(np.abs(ca - cb)))
    if threshold is None:
        # 1e-3 level, asymptotic
        threshold = math.sqrt(-0.5 * math.log(5e-4)) * math.sqrt(
            (a.size + b.size) / (a.size * b.size)
        )
    return TestReport(
        test_name=name, statistic=stat, threshold=threshold,
        sample_size=a.size + b.size, passed=stat <= threshold,
    )


def tv_distance(p, q):
    """Total variation: half the L1 distance after normalizing both finite
    measures to probabilities. Accepts dicts (union support) or equal-length
    sequences."""
    if isinstance(p, dict) or isinstance(q, dict):
        if not p or not q:
            raise EmptyInput("tv_distance needs nonempty measures")
        keys = set(p) | set(q)
        tp = float(sum(p.values()))
        tq = float(sum(q.values()))
        return 0.5 * sum(abs(p.get(k, 0.0) / tp - q.get(k, 0.0) / tq) for k in keys)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.size == 0 or q.size == 0:
        raise EmptyInput("tv_distance needs nonempty measures")
    if p.shape != q.shape:
        raise SupportMismatch(f"supports of size {p.shape} vs {q.shape}")
    return 0.5 * float(np.sum(np.abs(p / p.sum() - q / q.sum())))


def chi_square_gof(counts, expected, significance=1e-3, name="chi_square_gof") -> TestReport:
    """Pearson chi-square statistic against expected counts, compared to the
    chi2 quantile at the given significance."""
    counts = np.asarray(counts, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if counts.size == 0:
        raise EmptyInput("chi_square_gof needs nonempty counts")
    if counts.shape != expected.shape:
        raise SupportMismatch(f"{counts.shape} counts vs {expected.shape} expected")
    mask = expected > 0
    if np.any(counts[~mask] > 0):
        stat = math.inf
    else:
        stat = float(np.sum((counts[mask] - expected[mask]) ** 2 / expected[mask]))
    df = int(np.count_nonzero(mask)) - 1
    thr = float(chi2.ppf(1.0 - significance, max(df, 1)))
    return TestReport(
        test_name=name, statistic=stat, threshold=thr,
        sample_size=int(counts.sum()), passed=stat <= thr,
        metadata={"df": df, "significance": significance},
    )


def sample_mean_cov(points):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise EmptyInput("sample_mean_cov needs nonempty input")
    mean = pts.mean(axis=0)
    centered = pts - mean
    cov = centered.T @ centered / pts.shape[0]
    return mean, cov


def ecf(samples, t_grid):
    """Empirical characteristic function (1/M) sum exp(i t x) on a grid."""
    x = np.asarray(samples, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    out = np.empty(t.shape, dtype=complex)
    chunk = max(1, int(4e6 // max(x.size, 1)))
    for i in range(0, t.size, chunk):
        out[i : i + chunk] = np.exp(1j * np.outer(t[i : i + chunk], x)).mean(axis=1)
    return out


_ECF_BAND = (0.2, 0.9)


def stable_alpha_fit(samples, t_grid=None, n_points=40):
    """Tail-index fit from the ECF decay: regress log(-log|ECF(t)|) on
    log t; the slope estimates alpha and the intercept is alpha*log(sigma).

    The grid is auto-selected as the lowest contiguous t-band where |ECF|
    lies in [0.2, 0.9]. Only the first excursion through the band is used:
    for lattice-valued samples |ECF| is periodic in t and re-enters the
    band at large t, which would corrupt the regression.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise EmptyInput("stable_alpha_fit needs samples")
    if t_grid is None:
        s = float(np.median(np.abs(x)))
        if s == 0.0:
            raise DegenerateFit("samples are degenerate at zero")
        scan = np.logspace(-4, 2, 400) / s
        amps = np.abs(ecf(x, scan))
        lo = hi = None
        for t, a in zip(scan, amps):
            if lo is None and a <= _ECF_BAND[1]:
                lo = t
            if a < _ECF_BAND[0]:
                hi = t
                break
        if lo is None or hi is None or hi <= lo:
            raise DegenerateFit("no usable |ECF| band found")
        t_grid = np.linspace(lo, hi, n_points)
    t = np.asarray(t_grid, dtype=float)
    if np.any(t <= 0):
        raise DegenerateFit("t grid must be strictly positive")
    amps = np.abs(ecf(x, t))
    keep = (amps >= _ECF_BAND[0]) & (amps <= _ECF_BAND[1])
    if np.count_nonzero(keep) < 2:
        raise DegenerateFit("|ECF| outside the usable band at all grid points")
    t, amps = t[keep], amps[keep]
    y = np.log(-np.log(amps))
    design = np.vstack([np.log(t), np.ones_like(t)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(slope), float(math.exp(intercept / slope))

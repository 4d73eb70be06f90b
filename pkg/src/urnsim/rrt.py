"""Representation machinery: branching chain on a uniform random recursive
tree, the root-path stopping time, and the O(log n) marginal sampler.

Vertices are labeled {-1; 0, 1, ...} with -1 the root. Vertex k attaches
to a uniform parent among {-1, ..., k-1}; the chain value at a vertex is an
augmented-kernel step from its parent's value (a draw from the initial
configuration when the parent is the root).
"""

import csv
import itertools
from dataclasses import dataclass
from fractions import Fraction
import numpy as np
from numpy import euler_gamma
from scipy.special import digamma, polygamma

from .colors import to_point
from .errors import TooLarge
from .kernels import DELTA, AugmentedKernel, rational_row_support
from .urn import ExactLaw


@dataclass
class BranchingTrajectory:
    parents: np.ndarray  # parents[k] in {-1, ..., k-1}
    values: list  # colors W_0 .. W_{N-1}
    kernel: AugmentedKernel


@dataclass
class TauSample:
    n: int
    tau: int
    path: list = None  # decreasing vertex list from n down to -1


def simulate_branching(kernel: AugmentedKernel, n, rng) -> BranchingTrajectory:
    """Grow the tree and chain jointly: O(n) kernel steps."""
    parents = np.empty(n, dtype=np.int64)
    values = []
    for k in range(n):
        d = int(rng.random() * (k + 1)) - 1  # uniform on {-1, ..., k-1}
        parents[k] = d
        src = DELTA if d < 0 else values[d]
        values.append(kernel.step(src, rng))
    return BranchingTrajectory(parents=parents, values=values, kernel=kernel)


def sample_ancestor_path(n, rng) -> TauSample:
    """Root path of vertex n sampled without materializing the tree.

    Successive ancestors are uniform on a shrinking range, so the expected
    work is O(log n). tau counts the non-root vertices strictly between n
    and the root, matching the Bernoulli-sum stopping time.
    """
    path = [n]
    cur = n
    r = rng.random
    while cur >= 0:
        cur = int(r() * (cur + 1)) - 1
        path.append(cur)
    return TauSample(n=n, tau=len(path) - 2, path=path)


def sample_tau(n, rng) -> int:
    """Just the stopping time, skipping path storage."""
    cur = n
    tau = -1
    r = rng.random
    while cur >= 0:
        cur = int(r() * (cur + 1)) - 1
        tau += 1
    return tau


def sample_tau_bernoulli(n, rng) -> TauSample:
    """Sum of independent Bernoulli(1/(j+2)), j = 0..n-1: distributionally
    identical to the ancestor-path tau, at O(n) cost."""
    if n <= 0:
        return TauSample(n=n, tau=0)
    p = 1.0 / np.arange(2.0, n + 2.0)
    tau = int(np.count_nonzero(rng.random(n) < p))
    return TauSample(n=n, tau=tau)


def tau_mean_var(n):
    """Exact mean and variance of the stopping time at index n.

    mean = sum_{j=0}^{n-1} 1/(j+2), var = sum p(1-p). Evaluated through
    digamma/trigamma closed forms, exact to machine precision for any n.
    """
    if n <= 0:
        return 0.0, 0.0
    mean = float(digamma(n + 2)) + euler_gamma - 1.0
    sum_p_sq = float(polygamma(1, 2) - polygamma(1, n + 2))
    return mean, mean - sum_p_sq


def marginal_color(kernel: AugmentedKernel, n, rng):
    """One sample distributed as the (n+1)-th drawn color: draw tau from the
    root-path law, then run the base chain tau steps from the initial
    configuration. Expected cost O(log n) kernel steps.

    Valid only as a marginal sampler; the joint law of the draw sequence is
    not recovered by stringing these together.
    """
    tau = sample_tau(n, rng)
    x = kernel.step(DELTA, rng)
    base = kernel.base
    from .kernels import kernel_step

    for _ in range(tau):
        x = kernel_step(base, x, rng)
    return x


def rrt_exact_law(kernel: AugmentedKernel, n) -> ExactLaw:
    """Exact joint law of (W_0, ..., W_{n-1}) by enumerating all parent
    vectors (weight 1/prod(k+1)) times exact kernel transition products."""
    if n > 5:
        raise TooLarge("exact branching law limited to n <= 5")
    init_atoms = [(c, Fraction(w)) for c, w in kernel.init.atoms]
    if sum(w for _, w in init_atoms) != 1:
        from .errors import IrrationalWeights

        raise IrrationalWeights("initial weights are not exactly rational")
    row_cache = {}

    def row(color):
        if color not in row_cache:
            row_cache[color] = rational_row_support(kernel.base, color)
        return row_cache[color]

    outcomes = {}
    parent_ranges = [range(-1, k) for k in range(n)]
    n_trees = 1
    for k in range(n):
        n_trees *= k + 1
    tree_weight = Fraction(1, n_trees)

    for parents in itertools.product(*parent_ranges):
        # enumerate value assignments given this tree
        partial = [((), Fraction(1))]
        for k in range(n):
            nxt = []
            for seq, p in partial:
                choices = init_atoms if parents[k] < 0 else row(seq[parents[k]])
                for c, w in choices:
                    if w == 0:
                        continue
                    nxt.append((seq + (c,), p * w))
            partial = nxt
            if len(partial) > 10**6:
                raise TooLarge("reachable histories exceed 10^6")
        for seq, p in partial:
            outcomes[seq] = outcomes.get(seq, Fraction(0)) + p * tree_weight
    return ExactLaw(n=n, outcomes=outcomes)


def branching_to_csv(traj: BranchingTrajectory, path):
    """CSV export: vertex, parent, real coordinates of the chain value."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        width = len(to_point(traj.values[0])) if traj.values else 1
        writer.writerow(["vertex", "parent"] + [f"x{i}" for i in range(width)])
        for k, color in enumerate(traj.values):
            writer.writerow([k, int(traj.parents[k])] + [repr(v) for v in to_point(color)])

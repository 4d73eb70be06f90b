"""Replacement-kernel families and the augmented kernel.

A kernel is the replacement rule of a balanced urn: drawing color s adds
one unit of mass distributed as the row R(s, .). Six concrete families are
supported; every row is a probability (row sums within 1e-12 of 1, checked
by validate_kernel and renormalized implicitly at sampling time).
"""

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .colors import FiniteIdx, Hex, Lattice, Phased, hex_partition
from .errors import (
    BlockLeak,
    ColorOutOfSpace,
    InfiniteSupport,
    NegativeWeight,
    NonStochasticRow,
    NotErgodic,
    ValidationError,
)

ROW_SUM_TOL = 1e-12

# Unit increments out of partition class 1 of the honeycomb, as exact
# (a, b) basis coordinates: e1, e2 and -e1-e2. Class 2 uses the negatives.
HEX_INCREMENTS_V1 = ((1, 0), (0, 1), (-1, -1))
HEX_INCREMENTS_V2 = ((-1, 0), (0, -1), (1, 1))


def _freeze_increment(increment):
    """Normalize an increment law to a sorted tuple of (step, weight)."""
    if isinstance(increment, dict):
        items = increment.items()
    else:
        items = increment
    out = []
    for step, w in items:
        step = tuple(step) if isinstance(step, (tuple, list)) else (step,)
        out.append((step, float(w)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class FiniteMatrix:
    rows: tuple

    @property
    def m(self):
        return len(self.rows)


@dataclass(frozen=True)
class BlockDiagonal:
    """Block-diagonal kernel over FiniteIdx colors.

    blocks[i] is the replacement matrix of block i; block_offsets[i] is the
    first global color index of that block. Block rows are normally
    block-local (width = block size); a row of full global width is also
    accepted so that leaky inputs are representable and rejected by
    validation.
    """

    blocks: tuple
    block_offsets: tuple

    @property
    def m(self):
        return self.block_offsets[-1] + len(self.blocks[-1])

    def block_of(self, idx):
        for i in range(len(self.blocks) - 1, -1, -1):
            if idx >= self.block_offsets[i]:
                return i
        raise ColorOutOfSpace(f"color index {idx} below first block")

    def global_row(self, idx):
        """Row of the full matrix as a tuple of (global index, weight)."""
        b = self.block_of(idx)
        off = self.block_offsets[b]
        local = idx - off
        if local >= len(self.blocks[b]):
            raise ColorOutOfSpace(f"color index {idx} outside any block")
        row = self.blocks[b][local]
        if len(row) == len(self.blocks[b]):
            return tuple((off + j, w) for j, w in enumerate(row))
        # full-width row (possibly leaky; validation decides)
        return tuple(enumerate(row))


@dataclass(frozen=True)
class LatticeWalk:
    d: int
    increment: tuple

    def __init__(self, d, increment):
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "increment", _freeze_increment(increment))


@dataclass(frozen=True)
class StableWalk:
    alpha: float


@dataclass(frozen=True)
class PeriodicWalk:
    k: int
    increment_laws: tuple

    def __init__(self, k, increment_laws):
        object.__setattr__(self, "k", k)
        object.__setattr__(
            self, "increment_laws", tuple(_freeze_increment(law) for law in increment_laws)
        )


@dataclass(frozen=True)
class HexWalk:
    pass


KernelSpec = FiniteMatrix | BlockDiagonal | LatticeWalk | StableWalk | PeriodicWalk | HexWalk


def finite_matrix(rows) -> FiniteMatrix:
    return FiniteMatrix(tuple(tuple(float(w) for w in row) for row in rows))


def block_diagonal(blocks, block_offsets=None) -> BlockDiagonal:
    blocks = tuple(tuple(tuple(float(w) for w in row) for row in b) for b in blocks)
    if block_offsets is None:
        block_offsets = []
        off = 0
        for b in blocks:
            block_offsets.append(off)
            off += len(b)
    return BlockDiagonal(blocks, tuple(int(o) for o in block_offsets))


def _check_row(idx, weights):
    total = 0.0
    for w in weights:
        if w < 0:
            raise NegativeWeight(f"row {idx} has negative weight {w!r}")
        total += w
    if abs(total - 1.0) > ROW_SUM_TOL:
        raise NonStochasticRow(idx, total)


def validate_kernel(spec) -> None:
    """Raise a ValidationError unless every explicitly represented row is
    stochastic and block constraints hold."""
    if isinstance(spec, FiniteMatrix):
        m = spec.m
        for i, row in enumerate(spec.rows):
            if len(row) != m:
                raise ValidationError(f"row {i} has length {len(row)}, expected {m}")
            _check_row(i, row)
    elif isinstance(spec, BlockDiagonal):
        offs = spec.block_offsets
        if len(offs) != len(spec.blocks) or offs[0] != 0:
            raise ValidationError("block_offsets must start at 0, one per block")
        for b in range(len(spec.blocks)):
            size = len(spec.blocks[b])
            if b + 1 < len(offs) and offs[b + 1] != offs[b] + size:
                raise ValidationError("blocks must tile contiguous index ranges")
        m = spec.m
        for idx in range(m):
            b = spec.block_of(idx)
            lo = spec.block_offsets[b]
            hi = lo + len(spec.blocks[b])
            row = spec.global_row(idx)
            _check_row(idx, [w for _, w in row])
            leak = sum(w for j, w in row if not lo <= j < hi)
            if leak > 0:
                raise BlockLeak(idx, leak)
    elif isinstance(spec, LatticeWalk):
        for step, _ in spec.increment:
            if len(step) != spec.d:
                raise ValidationError(f"increment step {step} is not {spec.d}-dimensional")
        _check_row("increment", [w for _, w in spec.increment])
    elif isinstance(spec, StableWalk):
        if not 0.0 < spec.alpha <= 2.0:
            raise ValidationError(f"alpha must lie in (0, 2], got {spec.alpha}")
    elif isinstance(spec, PeriodicWalk):
        if spec.k < 1 or len(spec.increment_laws) != spec.k:
            raise ValidationError("need exactly k increment laws")
        for i, law in enumerate(spec.increment_laws):
            _check_row(f"phase {i}", [w for _, w in law])
    elif isinstance(spec, HexWalk):
        pass
    else:
        raise ValidationError(f"unknown kernel spec: {spec!r}")


@dataclass(frozen=True)
class InitialConfig:
    atoms: tuple

    def __init__(self, atoms):
        atoms = tuple((c, float(w)) for c, w in atoms)
        total = 0.0
        for _, w in atoms:
            if w <= 0:
                raise NegativeWeight(f"initial weight {w!r} must be positive")
            total += w
        if abs(total - 1.0) > ROW_SUM_TOL:
            raise ValidationError(f"initial weights sum to {total!r}, expected 1")
        object.__setattr__(self, "atoms", atoms)

    def sample(self, rng):
        if len(self.atoms) == 1:
            return self.atoms[0][0]
        u = rng.random()
        acc = 0.0
        for c, w in self.atoms:
            acc += w
            if u < acc:
                return c
        return self.atoms[-1][0]


def point_mass(color) -> InitialConfig:
    return InitialConfig(((color, 1.0),))


@lru_cache(maxsize=None)
def _cumulative(weights: tuple):
    out = []
    acc = 0.0
    for w in weights:
        acc += w
        out.append(acc)
    return out


def _sample_discrete(pairs, rng):
    cum = _cumulative(tuple(w for _, w in pairs))
    u = rng.random() * cum[-1]
    return pairs[bisect_right(cum, u)][0] if u < cum[-1] else pairs[-1][0]


def check_color(spec, color) -> None:
    """Raise ColorOutOfSpace unless color lives in the kernel's space."""
    if isinstance(spec, (FiniteMatrix, BlockDiagonal)):
        if not isinstance(color, FiniteIdx) or not 0 <= color.id < spec.m:
            raise ColorOutOfSpace(f"{color} not in a {spec.m}-color space")
    elif isinstance(spec, LatticeWalk):
        if not isinstance(color, Lattice) or len(color.coords) != spec.d:
            raise ColorOutOfSpace(f"{color} is not a {spec.d}-dimensional lattice point")
    elif isinstance(spec, StableWalk):
        if not isinstance(color, Lattice) or len(color.coords) != 1:
            raise ColorOutOfSpace(f"{color} is not a 1-dimensional lattice point")
    elif isinstance(spec, PeriodicWalk):
        if not isinstance(color, Phased) or not 0 <= color.phase < spec.k:
            raise ColorOutOfSpace(f"{color} is not a phased point with phase < {spec.k}")
    elif isinstance(spec, HexWalk):
        if not isinstance(color, Hex):
            raise ColorOutOfSpace(f"{color} is not a hexagonal-lattice vertex")
        hex_partition(color)
    else:
        raise ValidationError(f"unknown kernel spec: {spec!r}")


def stable_increment(alpha, rng):
    """One step of the heavy-tailed walk: sign * ceil(Pareto(alpha)).

    Pareto is sampled by exact inversion, V = U^(-1/alpha), so the magnitude
    Y = ceil(V) satisfies P(Y > n) = n^(-alpha) exactly for integers n >= 1,
    and the independent sign makes the law exactly symmetric.
    """
    mag = int(math.ceil(rng.random() ** (-1.0 / alpha)))
    return mag if rng.random() < 0.5 else -mag


def stable_increments(alpha, size, rng):
    """Vectorized batch of stable_increment draws (same law, own stream use)."""
    mags = np.ceil(rng.random(size) ** (-1.0 / alpha))
    signs = np.where(rng.random(size) < 0.5, 1.0, -1.0)
    return (signs * mags).astype(np.int64)


def kernel_step(spec, color, rng):
    """Sample one color from the row R(color, .)."""
    check_color(spec, color)
    if isinstance(spec, FiniteMatrix):
        row = spec.rows[color.id]
        cum = _cumulative(row)
        u = rng.random() * cum[-1]
        return FiniteIdx(min(bisect_right(cum, u), spec.m - 1))
    if isinstance(spec, BlockDiagonal):
        row = spec.global_row(color.id)
        return FiniteIdx(_sample_discrete(row, rng))
    if isinstance(spec, LatticeWalk):
        step = _sample_discrete(spec.increment, rng)
        return Lattice(tuple(c + int(s) for c, s in zip(color.coords, step)))
    if isinstance(spec, StableWalk):
        return Lattice((color.coords[0] + stable_increment(spec.alpha, rng),))
    if isinstance(spec, PeriodicWalk):
        step = _sample_discrete(spec.increment_laws[color.phase], rng)
        return Phased(
            tuple(c + s for c, s in zip(color.coords, step)),
            (color.phase + 1) % spec.k,
        )
    if isinstance(spec, HexWalk):
        incs = HEX_INCREMENTS_V1 if hex_partition(color) == 1 else HEX_INCREMENTS_V2
        da, db = incs[int(rng.random() * 3.0) % 3]
        return Hex(color.a + da, color.b + db)
    raise ValidationError(f"unknown kernel spec: {spec!r}")


def row_support(spec, color):
    """Exact finite row as a list of (color, weight); raises InfiniteSupport
    when the row has infinitely many targets (StableWalk)."""
    if isinstance(spec, StableWalk):
        raise InfiniteSupport("stable-walk rows have countably infinite support")
    check_color(spec, color)
    if isinstance(spec, FiniteMatrix):
        return [(FiniteIdx(j), w) for j, w in enumerate(spec.rows[color.id]) if w > 0]
    if isinstance(spec, BlockDiagonal):
        return [(FiniteIdx(j), w) for j, w in spec.global_row(color.id) if w > 0]
    if isinstance(spec, LatticeWalk):
        return [
            (Lattice(tuple(c + int(s) for c, s in zip(color.coords, step))), w)
            for step, w in spec.increment
            if w > 0
        ]
    if isinstance(spec, PeriodicWalk):
        nxt = (color.phase + 1) % spec.k
        return [
            (Phased(tuple(c + s for c, s in zip(color.coords, step)), nxt), w)
            for step, w in spec.increment_laws[color.phase]
            if w > 0
        ]
    if isinstance(spec, HexWalk):
        incs = HEX_INCREMENTS_V1 if hex_partition(color) == 1 else HEX_INCREMENTS_V2
        return [(Hex(color.a + da, color.b + db), 1.0 / 3.0) for da, db in incs]
    raise ValidationError(f"unknown kernel spec: {spec!r}")


def has_finite_support(spec) -> bool:
    return not isinstance(spec, StableWalk)


DELTA = object()  # phantom root state of the augmented kernel


@dataclass(frozen=True)
class AugmentedKernel:
    """Kernel on S union {DELTA}: a step from DELTA draws from the initial
    configuration, any other step follows the base kernel. No row ever
    assigns mass back to DELTA."""

    base: KernelSpec
    init: InitialConfig

    def step(self, state, rng):
        if state is DELTA:
            return self.init.sample(rng)
        return kernel_step(self.base, state, rng)


def augment(spec, init: InitialConfig) -> AugmentedKernel:
    validate_kernel(spec)
    for color, _ in init.atoms:
        check_color(spec, color)
    return AugmentedKernel(spec, init)


def _transition_graph(matrix: FiniteMatrix):
    return [[j for j, w in enumerate(row) if w > 0] for row in matrix.rows]


def _strongly_connected(adj):
    m = len(adj)
    radj = [[] for _ in range(m)]
    for u, vs in enumerate(adj):
        for v in vs:
            radj[v].append(u)
    for graph in (adj, radj):
        seen = [False] * m
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in graph[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        if not all(seen):
            return False
    return True


def _period(adj):
    # gcd of level differences along edges; valid on strongly connected graphs
    m = len(adj)
    level = [-1] * m
    level[0] = 0
    order = [0]
    for u in order:
        for v in adj[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                order.append(v)
    g = 0
    for u in range(m):
        for v in adj[u]:
            g = math.gcd(g, level[u] + 1 - level[v])
    return g


def stationary_distribution(spec: FiniteMatrix) -> np.ndarray:
    """Stationary probability vector of an ergodic finite kernel, by linear
    solve; raises NotErgodic for reducible or periodic matrices."""
    validate_kernel(spec)
    adj = _transition_graph(spec)
    if not _strongly_connected(adj):
        raise NotErgodic("matrix is reducible")
    if _period(adj) != 1:
        raise NotErgodic("matrix is periodic")
    m = spec.m
    R = np.array(spec.rows, dtype=float)
    A = np.vstack([R.T - np.eye(m), np.ones((1, m))])
    b = np.zeros(m + 1)
    b[m] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = np.max(np.abs(pi @ R - pi))
    if residual >= 1e-10:
        raise NotErgodic(f"stationary solve residual {residual:.2e}")
    return pi


def rational_row_support(spec, color):
    """row_support with weights as exact Fractions; each row must sum to 1
    exactly in rational arithmetic (used by the exact-law oracles)."""
    from .errors import IrrationalWeights

    row = [(c, Fraction(w)) for c, w in row_support(spec, color)]
    if sum(w for _, w in row) != 1:
        raise IrrationalWeights(f"row at {color} is not exactly rational-stochastic")
    return row


# --- JSON schema -----------------------------------------------------------


def _increment_to_json(increment):
    return [{"step": list(step), "weight": w} for step, w in increment]


def _increment_from_json(items):
    return tuple((tuple(s for s in it["step"]), float(it["weight"])) for it in items)


def kernel_to_json(spec) -> dict:
    if isinstance(spec, FiniteMatrix):
        return {"variant": "finite", "rows": [list(r) for r in spec.rows]}
    if isinstance(spec, BlockDiagonal):
        return {
            "variant": "block_diagonal",
            "blocks": [[list(r) for r in b] for b in spec.blocks],
            "block_offsets": list(spec.block_offsets),
        }
    if isinstance(spec, LatticeWalk):
        return {"variant": "lattice_walk", "d": spec.d, "increment": _increment_to_json(spec.increment)}
    if isinstance(spec, StableWalk):
        return {"variant": "stable_walk", "alpha": spec.alpha}
    if isinstance(spec, PeriodicWalk):
        return {
            "variant": "periodic_walk",
            "k": spec.k,
            "increment_laws": [_increment_to_json(law) for law in spec.increment_laws],
        }
    if isinstance(spec, HexWalk):
        return {"variant": "hex_walk"}
    raise ValidationError(f"unknown kernel spec: {spec!r}")


def kernel_from_json(obj: dict):
    variant = obj.get("variant")
    if variant == "finite":
        return finite_matrix(obj["rows"])
    if variant == "block_diagonal":
        return block_diagonal(obj["blocks"], obj.get("block_offsets"))
    if variant == "lattice_walk":
        inc = obj["increment"]
        if isinstance(inc, list):
            inc = _increment_from_json(inc)
        return LatticeWalk(int(obj["d"]), inc)
    if variant == "stable_walk":
        return StableWalk(float(obj["alpha"]))
    if variant == "periodic_walk":
        laws = [
            _increment_from_json(law) if isinstance(law, list) else law
            for law in obj["increment_laws"]
        ]
        return PeriodicWalk(int(obj["k"]), laws)
    if variant == "hex_walk":
        return HexWalk()
    raise ValidationError(f"unknown kernel variant: {variant!r}")

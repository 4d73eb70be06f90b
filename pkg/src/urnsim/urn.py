"""Direct simulation of the urn process and an exact-enumeration oracle.

The generic engine keeps an explicit weight table over discovered colors
(slots assigned in first-appearance order) backed by a WeightedIndex. For
fixed finite color spaces urn_simulate switches to a flat compiled loop so
desk-scale Monte Carlo (10^8 draws) stays in seconds.
"""

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .colors import FiniteIdx, color_to_json, to_point
from .errors import InfiniteSupport, TooLarge
from .kernels import (
    BlockDiagonal,
    FiniteMatrix,
    InitialConfig,
    check_color,
    has_finite_support,
    rational_row_support,
    row_support,
    validate_kernel,
)
from .sampler import WeightedIndex

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


class UrnState:
    """Explicit weight table U_n with total mass n+1 plus a sampling index."""

    def __init__(self, kernel, init: InitialConfig, record_draws=False):
        validate_kernel(kernel)
        if not has_finite_support(kernel):
            raise InfiniteSupport(
                "explicit-weight engine requires finite-support rows; "
                "use the marginal or branching samplers instead"
            )
        for color, _ in init.atoms:
            check_color(kernel, color)
        self.kernel = kernel
        self.init = init
        self.colors = []
        self.slot_of = {}
        self.sampler = WeightedIndex()
        self.n = 0
        self.history = [] if record_draws else None
        self._row_cache = {}
        for color, w in init.atoms:
            self._slot(color)
            self.sampler.add(self.slot_of[color], w)

    def _slot(self, color):
        s = self.slot_of.get(color)
        if s is None:
            s = len(self.colors)
            self.slot_of[color] = s
            self.colors.append(color)
        return s

    def draw(self, rng):
        """One urn step: sample Z_n from the current weights, then add the
        row R(Z_n, .) to the table."""
        slot = self.sampler.sample_u(rng.random() * self.sampler.total)
        color = self.colors[slot]
        row = self._row_cache.get(slot)
        if row is None:
            row = [(self._slot(c), w) for c, w in row_support(self.kernel, color)]
            self._row_cache[slot] = row
        add = self.sampler.add
        for s, w in row:
            add(s, w)
        self.n += 1
        if self.history is not None:
            self.history.append(color)
        return color

    def configuration(self):
        """Current random configuration U_n/(n+1) as a color -> mass dict."""
        t = self.sampler.total
        return {c: self.sampler.weight(i) / t for i, c in enumerate(self.colors)}

    def weights_dict(self):
        return {c: self.sampler.weight(i) for i, c in enumerate(self.colors)}


def urn_init(kernel, init: InitialConfig, record_draws=False) -> UrnState:
    return UrnState(kernel, init, record_draws=record_draws)


def urn_draw(state: UrnState, rng):
    return state.draw(rng)


@dataclass
class Trajectory:
    n: int
    kernel: object
    init: InitialConfig
    last_draw: object
    configuration: dict
    draws: list = None
    draw_ids: np.ndarray = field(default=None, repr=False)


def _finite_csr(kernel):
    """Rows of a fixed finite kernel in CSR form over slots 0..m-1."""
    m = kernel.m
    ptr = [0]
    slots = []
    wts = []
    for i in range(m):
        for c, w in row_support(kernel, FiniteIdx(i)):
            slots.append(c.id)
            wts.append(w)
        ptr.append(len(slots))
    return (
        np.array(ptr, dtype=np.int64),
        np.array(slots, dtype=np.int64),
        np.array(wts, dtype=np.float64),
    )


def _finite_loop_py(w, total, row_ptr, row_slots, row_wts, us, hist):
    # mirror of the compiled loop; consumes exactly one uniform per draw
    m = w.shape[0]
    for k in range(us.shape[0]):
        u = us[k] * total
        acc = 0.0
        z = m - 1
        for i in range(m):
            acc += w[i]
            if u < acc:
                z = i
                break
        for j in range(row_ptr[z], row_ptr[z + 1]):
            w[row_slots[j]] += row_wts[j]
        total += 1.0
        hist[k] = z
    return total


if _HAVE_NUMBA:
    _finite_loop = njit(cache=True)(_finite_loop_py)
else:  # pragma: no cover
    _finite_loop = _finite_loop_py


def _init_weight_vector(kernel, init):
    w = np.zeros(kernel.m)
    for color, mass in init.atoms:
        w[color.id] += mass
    return w


_CHUNK = 1 << 20


def _simulate_finite(kernel, init, n, rng, record_draws):
    w = _init_weight_vector(kernel, init)
    row_ptr, row_slots, row_wts = _finite_csr(kernel)
    total = 1.0
    hist = np.empty(n, dtype=np.int64)
    done = 0
    while done < n:
        k = min(_CHUNK, n - done)
        us = rng.random(k)
        total = _finite_loop(w, total, row_ptr, row_slots, row_wts, us, hist[done : done + k])
        done += k
    config = {FiniteIdx(i): w[i] / total for i in range(kernel.m) if w[i] > 0}
    last = FiniteIdx(int(hist[-1])) if n > 0 else None
    draws = [FiniteIdx(int(i)) for i in hist] if record_draws else None
    return Trajectory(
        n=n, kernel=kernel, init=init, last_draw=last, configuration=config,
        draws=draws, draw_ids=hist,
    )


def urn_simulate(kernel, init, n, rng, record_draws=False) -> Trajectory:
    """Run n urn draws; returns the drawn colors (optional) and the final
    configuration U_n/(n+1)."""
    if isinstance(kernel, (FiniteMatrix, BlockDiagonal)) and n > 0:
        validate_kernel(kernel)
        for color, _ in init.atoms:
            check_color(kernel, color)
        return _simulate_finite(kernel, init, n, rng, record_draws)
    state = urn_init(kernel, init, record_draws=record_draws)
    last = None
    for _ in range(n):
        last = state.draw(rng)
    return Trajectory(
        n=n, kernel=kernel, init=init, last_draw=last,
        configuration=state.configuration(),
        draws=state.history,
    )


def urn_simulate_batch(kernel, init, n, reps, rng):
    """reps independent trajectories of a fixed finite kernel; returns the
    (reps, n) matrix of drawn slot ids. Fast path for Monte Carlo suites."""
    if not isinstance(kernel, (FiniteMatrix, BlockDiagonal)):
        raise InfiniteSupport("batch simulation requires a fixed finite color space")
    validate_kernel(kernel)
    row_ptr, row_slots, row_wts = _finite_csr(kernel)
    w0 = _init_weight_vector(kernel, init)
    out = np.empty((reps, n), dtype=np.int64)
    for r in range(reps):
        us = rng.random(n)
        _finite_loop(w0.copy(), 1.0, row_ptr, row_slots, row_wts, us, out[r])
    return out


@dataclass
class ExactLaw:
    """Exact joint law of (Z_0, ..., Z_{n-1}) as rational probabilities."""

    n: int
    outcomes: dict  # tuple of colors -> Fraction

    def total(self):
        return sum(self.outcomes.values())

    def marginal(self, i):
        out = {}
        for seq, p in self.outcomes.items():
            out[seq[i]] = out.get(seq[i], Fraction(0)) + p
        return out

    def project(self, indices):
        out = {}
        for seq, p in self.outcomes.items():
            key = tuple(seq[i] for i in indices)
            out[key] = out.get(key, Fraction(0)) + p
        return out


_MAX_EXACT_HISTORIES = 10**6


def urn_exact_law(kernel, init, n) -> ExactLaw:
    """Exact joint law of the first n draws by dynamic programming over
    histories in rational arithmetic (the ground-truth oracle)."""
    if n > 6:
        raise TooLarge("exact urn law limited to n <= 6")
    validate_kernel(kernel)
    init_atoms = [(c, Fraction(w)) for c, w in init.atoms]
    if sum(w for _, w in init_atoms) != 1:
        from .errors import IrrationalWeights

        raise IrrationalWeights("initial weights are not exactly rational")
    row_cache = {}

    def row(color):
        if color not in row_cache:
            row_cache[color] = rational_row_support(kernel, color)
        return row_cache[color]

    outcomes = {}
    # frontier: history tuple -> (probability, weight table dict)
    frontier = {(): (Fraction(1), dict(init_atoms))}
    for step in range(n):
        nxt = {}
        total = Fraction(step + 1)
        for hist, (p, table) in frontier.items():
            for color, wt in table.items():
                if wt == 0:
                    continue
                p2 = p * wt / total
                table2 = dict(table)
                for c, w in row(color):
                    table2[c] = table2.get(c, Fraction(0)) + w
                nxt[hist + (color,)] = (p2, table2)
                if len(nxt) > _MAX_EXACT_HISTORIES:
                    raise TooLarge("reachable histories exceed 10^6")
        frontier = nxt
    for hist, (p, _) in frontier.items():
        outcomes[hist] = p
    return ExactLaw(n=n, outcomes=outcomes)


def trajectory_to_csv(traj: Trajectory, path):
    """CSV export: step index plus the real coordinates of each drawn color."""
    if traj.draws is None and traj.draw_ids is None:
        raise ValueError("trajectory was simulated without draw recording")
    draws = traj.draws
    if draws is None:
        draws = [FiniteIdx(int(i)) for i in traj.draw_ids]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        width = len(to_point(draws[0])) if draws else 1
        writer.writerow(["step"] + [f"x{i}" for i in range(width)])
        for k, color in enumerate(draws):
            writer.writerow([k] + [repr(v) for v in to_point(color)])


def configuration_to_json(traj: Trajectory, path):
    payload = [
        {"color": color_to_json(c), "mass": mass}
        for c, mass in sorted(traj.configuration.items(), key=lambda kv: repr(kv[0]))
    ]
    with open(path, "w") as f:
        json.dump({"n": traj.n, "configuration": payload}, f, indent=2)

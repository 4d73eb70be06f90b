"""Append-only dynamic weighted sampling over a binary indexed tree.

Point updates and prefix-search sampling both cost O(log capacity).
Capacity doubles on overflow with a full rebuild (amortized O(1) growth),
and the cumulative tree is rebuilt from a fresh summation whenever float
cancellation drifts past 1e-9 relative error, checked every 2^16 updates.
"""

from .errors import EmptyStructure, NegativeWeight

_DRIFT_CHECK_INTERVAL = 1 << 16
_DRIFT_TOL = 1e-9


class WeightedIndex:
    def __init__(self, weights=()):
        self._weights = []
        self._capacity = 1
        self._tree = [0.0, 0.0]  # 1-based Fenwick array
        self._total = 0.0
        self._ops = 0
        for i, w in enumerate(weights):
            self.add(i, w)

    def __len__(self):
        return len(self._weights)

    @property
    def total(self):
        return self._total

    def weight(self, idx):
        return self._weights[idx]

    def weights(self):
        return list(self._weights)

    def add(self, idx, w):
        """Increase weight(idx) by w; idx at or past the end appends
        (intermediate slots are created with weight zero)."""
        if w < 0:
            raise NegativeWeight(f"cannot add negative weight {w!r}")
        if idx >= len(self._weights):
            self._weights.extend([0.0] * (idx + 1 - len(self._weights)))
            if len(self._weights) > self._capacity:
                self._grow()
        self._weights[idx] += w
        i = idx + 1
        cap = self._capacity
        tree = self._tree
        while i <= cap:
            tree[i] += w
            i += i & (-i)
        self._total += w
        self._ops += 1
        if self._ops % _DRIFT_CHECK_INTERVAL == 0:
            self._check_drift()

    def sample(self, rng):
        """Slot i with probability weight(i)/total."""
        if self._total <= 0.0 or not self._weights:
            raise EmptyStructure("cannot sample from an empty structure")
        return self.sample_u(rng.random() * self._total)

    def sample_u(self, u):
        """Prefix-search: the slot whose cumulative-weight interval contains
        u in [0, total)."""
        if self._total <= 0.0 or not self._weights:
            raise EmptyStructure("cannot sample from an empty structure")
        idx = 0
        half = self._capacity >> 1
        tree = self._tree
        while half:
            nxt = idx + half
            if u >= tree[nxt]:
                u -= tree[nxt]
                idx = nxt
            half >>= 1
        return min(idx, len(self._weights) - 1)

    def _grow(self):
        while self._capacity < len(self._weights):
            self._capacity <<= 1
        self._rebuild()

    def _rebuild(self):
        cap = self._capacity
        tree = [0.0] * (cap + 1)
        for i, w in enumerate(self._weights):
            tree[i + 1] += w
        for i in range(1, cap + 1):
            parent = i + (i & (-i))
            if parent <= cap:
                tree[parent] += tree[i]
        self._tree = tree
        self._total = sum(self._weights)

    def _check_drift(self):
        fresh = sum(self._weights)
        scale = max(abs(fresh), 1.0)
        if abs(fresh - self._total) > _DRIFT_TOL * scale:
            self._rebuild()

"""Hilbert curves and Hölder surjections between unit cubes with exact dyadic right inverses.

The m-dimensional Hilbert curve is evaluated with Skilling's transpose
algorithm.  At depth b the parameter cell ``[h 2^-mb, (h+1) 2^-mb)`` maps to
the target cell whose lower corner is returned by :func:`hilbert_point`.

:func:`cube_surjection` builds ``g: [0,1]^k -> [0,1]^n`` hitting every point
of the closed grid ``{i/2^b : 0 <= i <= 2^b}^n``, including the value 1.  Each
source coordinate drives an ``m = ceil(n/k)`` dimensional curve taken at depth
``b+1``, doubled and clipped at 1, and interpolated linearly between
consecutive vertices so that g is continuous and ``1/m``-Hölder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import DimensionError, ResolutionError, norm_distance, rng_for

ORIENTATION = "skilling-reflected-gray"
MAX_INDEX_BITS = 52  # parameters must stay exact in float64


def _check_bits(m: int, b: int) -> None:
    if m < 1 or b < 1:
        raise ValueError("need m >= 1 and b >= 1")
    if m * b > MAX_INDEX_BITS:
        raise ResolutionError(f"m*b = {m * b} exceeds {MAX_INDEX_BITS} index bits")


def _transpose_to_axes(h: np.ndarray, m: int, b: int) -> np.ndarray:
    h = h.astype(np.uint64)
    X = np.zeros((len(h), m), dtype=np.uint64)
    for q in range(b):
        for i in range(m):
            bit = (h >> np.uint64(m * b - 1 - (q * m + i))) & np.uint64(1)
            X[:, i] |= bit << np.uint64(b - 1 - q)
    # gray decode
    t = X[:, m - 1] >> np.uint64(1)
    for i in range(m - 1, 0, -1):
        X[:, i] ^= X[:, i - 1]
    X[:, 0] ^= t
    # undo excess work
    N = 2 << (b - 1)
    Q = 2
    while Q != N:
        P = np.uint64(Q - 1)
        Qu = np.uint64(Q)
        for i in range(m - 1, -1, -1):
            hit = (X[:, i] & Qu) != 0
            X[hit, 0] ^= P
            t = (X[:, 0] ^ X[:, i]) & P
            t[hit] = 0
            X[:, 0] ^= t
            X[:, i] ^= t
        Q <<= 1
    return X


def _axes_to_transpose(X: np.ndarray, m: int, b: int) -> np.ndarray:
    X = X.astype(np.uint64).copy()
    M = 1 << (b - 1)
    Q = M
    while Q > 1:
        P = np.uint64(Q - 1)
        Qu = np.uint64(Q)
        for i in range(m):
            hit = (X[:, i] & Qu) != 0
            X[hit, 0] ^= P
            t = (X[:, 0] ^ X[:, i]) & P
            t[hit] = 0
            X[:, 0] ^= t
            X[:, i] ^= t
        Q >>= 1
    # gray encode
    for i in range(1, m):
        X[:, i] ^= X[:, i - 1]
    t = np.zeros(len(X), dtype=np.uint64)
    Q = M
    while Q > 1:
        hit = (X[:, m - 1] & np.uint64(Q)) != 0
        t[hit] ^= np.uint64(Q - 1)
        Q >>= 1
    X ^= t[:, None]
    h = np.zeros(len(X), dtype=np.uint64)
    for q in range(b):
        for i in range(m):
            bit = (X[:, i] >> np.uint64(b - 1 - q)) & np.uint64(1)
            h |= bit << np.uint64(m * b - 1 - (q * m + i))
    return h


def hilbert_cells(h, m: int, b: int) -> np.ndarray:
    """Integer target cells ``(.., m)`` of integer curve indices ``h``."""
    _check_bits(m, b)
    h = np.asarray(h, dtype=np.int64)
    flat = h.reshape(-1)
    if flat.size and (flat.min() < 0 or flat.max() >= 2 ** (m * b)):
        raise ResolutionError("curve index out of range")
    return _transpose_to_axes(flat, m, b).astype(np.int64).reshape(h.shape + (m,))


def hilbert_indices(cells, m: int, b: int) -> np.ndarray:
    """Inverse of :func:`hilbert_cells`."""
    _check_bits(m, b)
    cells = np.asarray(cells, dtype=np.int64)
    if cells.shape[-1] != m:
        raise DimensionError(f"expected {m} coordinates, got {cells.shape[-1]}")
    flat = cells.reshape(-1, m)
    if flat.size and (flat.min() < 0 or flat.max() >= 2**b):
        raise ResolutionError("cell out of range")
    return _axes_to_transpose(flat, m, b).astype(np.int64).reshape(cells.shape[:-1])


def hilbert_point(t, m: int, b: int) -> np.ndarray:
    """Lower corner of the target cell of parameter ``t`` on the ``2^-(m b)`` grid.

    ``t = 1`` belongs to the last (closed) parameter cell.
    """
    _check_bits(m, b)
    t = np.asarray(t, dtype=np.float64)
    scaled = t * 2.0 ** (m * b)
    h = np.floor(scaled)
    if np.any(h != scaled) or np.any(t < 0) or np.any(t > 1):
        raise ResolutionError(f"parameter not on the 2^-{m * b} grid")
    h = np.minimum(h, 2 ** (m * b) - 1).astype(np.int64)
    return hilbert_cells(h, m, b) / 2.0**b


def hilbert_index(y, m: int, b: int) -> np.ndarray:
    """Least parameter whose cell is the cell of ``y`` (exact on grid points)."""
    _check_bits(m, b)
    y = np.asarray(y, dtype=np.float64)
    scaled = y * 2.0**b
    if np.any(np.floor(scaled) != scaled) or np.any(y < 0) or np.any(y > 1):
        raise ResolutionError(f"point not on the 2^-{b} grid")
    cells = np.minimum(scaled, 2**b - 1).astype(np.int64)
    return hilbert_indices(cells, m, b) / 2.0 ** (m * b)


@dataclass(frozen=True)
class CurveMap:
    """Surjection ``g: [0,1]^k -> [0,1]^n`` with right inverse ``f`` on the closed b-grid."""

    k: int
    n: int
    b: int
    orientation: str = ORIENTATION

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("dimensions must be positive")
        if self.k > self.n:
            raise DimensionError(f"source dimension {self.k} exceeds target dimension {self.n}")
        if not self.identity:
            _check_bits(self.m, self.depth)

    @property
    def identity(self) -> bool:
        return self.k == self.n

    @property
    def m(self) -> int:
        return -(-self.n // self.k)

    @property
    def exponent(self) -> Fraction:
        return Fraction(1, 1) if self.identity else Fraction(1, self.m)

    @property
    def depth(self) -> int:
        return self.b + 1

    @property
    def source_bits(self) -> int:
        """Bits of the parameter grid that the right inverse lands on."""
        return self.b if self.identity else self.m * self.depth

    def source_grid(self) -> np.ndarray:
        """All parameter grid points, shape ``(2^(k*source_bits), k)``."""
        pts = np.arange(2**self.source_bits) / 2.0**self.source_bits
        if self.identity:
            pts = np.arange(2**self.b + 1) / 2.0**self.b
        mesh = np.meshgrid(*([pts] * self.k), indexing="ij")
        return np.stack([a.reshape(-1) for a in mesh], axis=1)

    def _curve(self, t: np.ndarray) -> np.ndarray:
        # polygon through the doubled vertices, clipped into the cube
        M = self.m * self.depth
        top = 2**M - 1
        s = np.clip(t, 0.0, 1.0) * 2.0**M
        h = np.minimum(np.floor(s), top)
        frac = (s - h)[..., None]
        h = h.astype(np.int64)
        a = hilbert_cells(h, self.m, self.depth)
        c = hilbert_cells(np.minimum(h + 1, top), self.m, self.depth)
        pts = ((1.0 - frac) * a + frac * c) / 2.0**self.b
        return np.minimum(pts, 1.0)

    def forward(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.k:
            raise DimensionError(f"expected {self.k} source coordinates, got {x.shape[-1]}")
        if self.identity:
            return x.copy()
        blocks = [self._curve(x[..., i]) for i in range(self.k)]
        return np.concatenate(blocks, axis=-1)[..., : self.n]

    __call__ = forward

    def right_inverse(self, y) -> np.ndarray:
        """Grid preimage of points on the closed b-grid; dropped coordinates are taken as 0."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape[-1] != self.n:
            raise DimensionError(f"expected {self.n} target coordinates, got {y.shape[-1]}")
        scaled = y * 2.0**self.b
        if np.any(np.floor(scaled) != scaled) or np.any(y < 0) or np.any(y > 1):
            raise ResolutionError(f"point not on the 2^-{self.b} grid")
        if self.identity:
            return y.copy()
        pad = self.k * self.m - self.n
        cells = np.concatenate([scaled, np.zeros(y.shape[:-1] + (pad,))], axis=-1).astype(np.int64)
        cells = cells.reshape(y.shape[:-1] + (self.k, self.m))
        h = hilbert_indices(cells, self.m, self.depth)
        return h / 2.0 ** (self.m * self.depth)

    def to_dict(self) -> dict:
        return {"k": self.k, "n": self.n, "b": self.b, "exponent": str(self.exponent),
                "orientation": self.orientation}


def cube_surjection(k: int, n: int, b: int) -> CurveMap:
    return CurveMap(k, n, b)


def target_grid(n: int, b: int) -> np.ndarray:
    pts = np.arange(2**b + 1) / 2.0**b
    mesh = np.meshgrid(*([pts] * n), indexing="ij")
    return np.stack([a.reshape(-1) for a in mesh], axis=1)


# --------------------------------------------------------------------------
# empirical Hölder regularity
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HolderFit:
    alpha: float  # empirical exponent
    L: float  # sup ratio at the declared exponent
    declared: float
    pairs: int


def _pair_indices(count: int, budget: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    total = count * (count - 1) // 2
    if total <= budget:
        i, j = np.triu_indices(count, k=1)
        return i, j
    rng = rng_for(seed, 0)
    i = rng.integers(0, count, size=budget)
    j = rng.integers(0, count, size=budget)
    keep = i != j
    return i[keep], j[keep]


def envelope_exponent(din: np.ndarray, dout: np.ndarray, min_pairs: int = 8) -> float:
    """Slope of the upper envelope of ``log2 dout`` against ``log2 din`` over dyadic distance bins.

    Each bin ``[2^l, 2^(l+1))`` with at least ``min_pairs`` pairs contributes its
    largest output distance at abscissa ``l + 1``.  Once the envelope reaches the
    largest output distance it is flat because of the bounded image, so only the
    first saturated bin is kept.  Returns ``inf`` for a constant map.
    """
    mask = din > 0
    din, dout = din[mask], dout[mask]
    if len(din) == 0 or not np.any(dout > 0):
        return math.inf
    top_all = dout.max()
    level = np.floor(np.log2(din)).astype(np.int64)
    xs, ys = [], []
    for lv in np.unique(level):
        sel = level == lv
        top = dout[sel].max()
        if sel.sum() >= min_pairs and top > 0:
            xs.append(float(lv + 1))
            ys.append(math.log2(top))
            if top >= top_all:
                break
    if len(xs) < 2:
        return math.inf
    return float(np.polyfit(xs, ys, 1)[0])


def holder_estimate(g, p: float = math.inf, pair_budget: int = 10**5, seed: int = 0,
                    points=None, alpha: float | None = None, min_pairs: int = 8,
                    step: float | None = None, axes: int | None = None) -> HolderFit:
    """Empirical Hölder exponent and constant of ``g`` on a finite domain.

    Pairs are all pairs of ``points`` when affordable, otherwise ``pair_budget``
    seeded random pairs.  Grid-adjacent pairs at spacing ``step`` along the first
    ``axes`` coordinates are added; for a :class:`CurveMap` they default to the
    parameter grid.  ``L`` is the sup of
    ``|g x - g y| / |x - y|^alpha`` at the declared exponent; ``alpha`` is the
    slope of the sup envelope from the finest scale up to saturation.
    """
    extra = []
    if points is None:
        if not isinstance(g, CurveMap):
            raise ValueError("points are required for a plain callable")
        points = g.source_grid()
        step = 2.0**-g.source_bits
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if step is not None:
        # grid-adjacent pairs along the first ``axes`` coordinates
        for ax in range(points.shape[1] if axes is None else axes):
            shifted = points.copy()
            shifted[:, ax] += step
            ok = shifted[:, ax] <= 1.0
            extra.append((points[ok], shifted[ok]))
    if alpha is None:
        alpha = float(g.exponent) if isinstance(g, CurveMap) else 1.0
    i, j = _pair_indices(len(points), pair_budget, seed)
    xs = [points[i]] + [a for a, _ in extra]
    ys = [points[j]] + [c for _, c in extra]
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    din = norm_distance(x, y, p)
    dout = norm_distance(np.atleast_2d(g(x)), np.atleast_2d(g(y)), p)
    pos = din > 0
    L = float(np.max(dout[pos] / din[pos] ** alpha)) if pos.any() else 0.0
    return HolderFit(envelope_exponent(din, dout, min_pairs), L, alpha, int(len(x)))

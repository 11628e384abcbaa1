"""Domain types: dyadic grids, blocks, subshift families and stationary measures.

Signals live on the dyadic grid ``{i / 2**b : 0 <= i <= 2**b}`` so that every
coordinate is an exactly representable float.  Sets of words are handled as 2-D
``float64`` arrays of shape ``(count, n)`` sorted lexicographically; a single
word is a 1-D array or a :class:`Block`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BITS = 6
WORD_BUDGET = 10**8
PMF_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when two blocks (or a block and a parameter) disagree in length."""


class BudgetError(RuntimeError):
    """An enumeration or table would exceed the configured budget."""

    def __init__(self, what: str, estimate: float, budget: float):
        self.what = what
        self.estimate = estimate
        self.budget = budget
        super().__init__(f"{what}: estimated size {estimate:.3g} exceeds budget {budget:.3g}")


class ResolutionError(ValueError):
    """A value or scale is not resolvable on the requested dyadic grid."""


def rng_for(seed: int, *path: int) -> np.random.Generator:
    """Generator for the child stream ``path`` of ``seed``.

    Child streams depend only on ``(seed, path)`` so sharded work gives the same
    numbers regardless of scheduling.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


# --------------------------------------------------------------------------
# grid and blocks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicGrid:
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if not isinstance(self.bits, (int, np.integer)) or self.bits < 1 or self.bits > 40:
            raise ValueError(f"bits must be an integer in [1, 40], got {self.bits!r}")

    @property
    def size(self) -> int:
        """Number of grid cells per unit interval, ``2**bits``."""
        return 1 << self.bits

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.size + 1, dtype=np.float64) / self.size

    def quantize(self, x) -> np.ndarray:
        """Map values to the lower corner of their grid cell (last cell closed)."""
        x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
        return np.floor(x * self.size) / self.size

    def on_grid(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        scaled = x * self.size
        return bool(np.all((x >= 0) & (x <= 1) & (scaled == np.floor(scaled))))

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if not self.on_grid(x):
            raise ResolutionError(f"values are not on the 2^-{self.bits} grid in [0, 1]")
        return x

    def indices(self, x) -> np.ndarray:
        """Integer grid indices ``i`` with ``x = i / 2**bits``."""
        return np.rint(self.check(x) * self.size).astype(np.int64)

    def cell_index(self, x, j: int) -> np.ndarray:
        """Index of the half-open dyadic cell of side ``2**-j`` containing ``x``."""
        if j > self.bits:
            raise ResolutionError(f"scale 2^-{j} is finer than the 2^-{self.bits} grid")
        idx = np.floor(np.asarray(x, dtype=np.float64) * (1 << j)).astype(np.int64)
        return np.minimum(idx, (1 << j) - 1)

    def format(self, v: float) -> str:
        return f"{v:.{self.bits}f}"


@dataclass(frozen=True)
class Block:
    """A length-``n`` word of grid values."""

    values: tuple
    grid: DyadicGrid = field(default_factory=DyadicGrid)

    def __post_init__(self):
        vals = tuple(float(v) for v in np.ravel(self.values))
        self.grid.check(vals)
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, values: Iterable[float], bits: int = DEFAULT_BITS) -> "Block":
        return cls(tuple(values), DyadicGrid(bits))

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        arr = np.array(self.values, dtype=np.float64)
        return arr if dtype is None else arr.astype(dtype)

    def to_csv_row(self) -> str:
        return ",".join(self.grid.format(v) for v in self.values)

    @classmethod
    def from_csv_row(cls, row: str, bits: int) -> "Block":
        return cls.of((float(Fraction(tok)) for tok in row.strip().split(",")), bits)


def write_blocks_csv(path, words, bits: int) -> None:
    grid = DyadicGrid(bits)
    with open(path, "w") as fh:
        for w in np.atleast_2d(words):
            fh.write(",".join(grid.format(v) for v in w) + "\n")


def read_blocks_csv(path, bits: int) -> np.ndarray:
    with open(path) as fh:
        rows = [Block.from_csv_row(line, bits).values for line in fh if line.strip()]
    return np.array(rows, dtype=np.float64)


# --------------------------------------------------------------------------
# norms and distances
# --------------------------------------------------------------------------


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[-1] != y.shape[-1]:
        raise DimensionError(f"length mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    return x, y


def norm_distance(x, y, p: float = math.inf) -> np.ndarray | float:
    """Normalized l^p distance ``((1/n) sum |x_k - y_k|^p)^(1/p)``.

    Broadcasts over leading axes; ``p = inf`` gives the max norm.
    """
    x, y = _pair(x, y)
    diff = np.abs(x - y)
    if math.isinf(p):
        out = diff.max(axis=-1)
    elif p == 1:
        out = diff.mean(axis=-1)
    else:
        out = np.mean(diff**p, axis=-1) ** (1.0 / p)
    return float(out) if np.ndim(out) == 0 else out


def tau_weights(w: int) -> np.ndarray:
    return 2.0 ** -np.abs(np.arange(-w, w + 1))


def tau_distance(x, y) -> np.ndarray | float:
    """Truncated shift metric ``sum_{|i|<=w} 2^-|i| |x_i - y_i|``.

    Windows have odd length ``2w+1`` with coordinate 0 in the middle.  The
    omitted tail is at most ``2^(-w+1)``.
    """
    x, y = _pair(x, y)
    length = x.shape[-1]
    if length % 2 == 0:
        raise DimensionError("tau windows must have odd length 2w+1")
    out = np.abs(x - y) @ tau_weights(length // 2)
    return float(out) if np.ndim(out) == 0 else out


def tau_truncation_bound(w: int) -> float:
    return 2.0 ** (-w + 2)


def support_size(x) -> tuple[int, tuple[int, ...]]:
    x = np.asarray(x)
    idx = tuple(int(i) for i in np.flatnonzero(x))
    return len(idx), idx


# --------------------------------------------------------------------------
# subshift families
# --------------------------------------------------------------------------


def _lexsort_unique(words: np.ndarray) -> np.ndarray:
    if words.size == 0:
        return words
    words = np.unique(words, axis=0)  # np.unique sorts rows lexicographically
    return words


class SubshiftFamily:
    """Admissible-trajectory set ``S``; concrete variants below."""

    tag = "abstract"

    #: natural window length, used for default block-length schedules
    window = 1

    def contains(self, window) -> bool:
        raise NotImplementedError

    def count_words(self, n: int, grid: DyadicGrid) -> int:
        raise NotImplementedError

    def _words(self, n: int, grid: DyadicGrid) -> np.ndarray:
        raise NotImplementedError

    def cell_count(self, n: int, j: int, grid: DyadicGrid) -> int:
        """Number of occupied ``2^-j`` cells of ``pi_n(S)`` restricted to the grid."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FullShift(SubshiftFamily):
    """``A^Z`` for a finite alphabet ``A``, or the full grid when ``alphabet`` is None."""

    alphabet: tuple | None = None
    tag = "full"

    def __post_init__(self):
        if self.alphabet is not None:
            vals = tuple(sorted({float(a) for a in self.alphabet}))
            if not vals or vals[0] < 0 or vals[-1] > 1:
                raise ValueError("alphabet must be a non-empty subset of [0, 1]")
            object.__setattr__(self, "alphabet", vals)

    def letters(self, grid: DyadicGrid) -> np.ndarray:
        if self.alphabet is None:
            return grid.points
        return grid.check(np.array(self.alphabet))

    def contains(self, window) -> bool:
        w = np.asarray(window, dtype=np.float64)
        if self.alphabet is None:
            return bool(np.all((w >= 0) & (w <= 1)))
        return bool(np.all(np.isin(w, self.alphabet)))

    def count_words(self, n, grid):
        return len(self.letters(grid)) ** n

    def _words(self, n, grid):
        letters = self.letters(grid)
        if n == 0:
            return np.zeros((1, 0))
        mesh = np.meshgrid(*([letters] * n), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def cell_count(self, n, j, grid):
        cells = np.unique(grid.cell_index(self.letters(grid), j))
        return len(cells) ** n

    def to_dict(self):
        return {"type": "full", "alphabet": None if self.alphabet is None else list(self.alphabet)}


def _sparse_patterns(n: int, N: int, K: int) -> np.ndarray:
    """All 0/1 support patterns of length n extendable to an (N,K)-sparse sequence."""
    width = min(N, n)
    cols = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int8).reshape(-1, n)
    if n == 0:
        return cols
    csum = np.concatenate([np.zeros((len(cols), 1), dtype=np.int64), np.cumsum(cols, axis=1)], axis=1)
    window_sums = csum[:, width:] - csum[:, :-width]
    return cols[np.all(window_sums <= K, axis=1)]


def _sparse_pattern_counts(n: int, N: int, K: int) -> np.ndarray:
    """``counts[s]`` = number of admissible support patterns with ``s`` ones (DP over the last N-1 bits)."""
    width = min(N, n)
    if n == 0:
        return np.array([1])
    # state: last (width-1) bits as a tuple -> polynomial in s
    states: dict[tuple, np.ndarray] = {(): np.array([1], dtype=object)}
    for _ in range(n):
        nxt: dict[tuple, np.ndarray] = {}
        for st, poly in states.items():
            for bit in (0, 1):
                if sum(st) + bit > K:
                    continue
                ns = (st + (bit,))[-(width - 1):] if width > 1 else ()
                shifted = np.concatenate([[0], poly]) if bit else np.concatenate([poly, [0]])
                cur = nxt.get(ns)
                if cur is None:
                    nxt[ns] = shifted
                else:
                    size = max(len(cur), len(shifted))
                    nxt[ns] = np.pad(cur, (0, size - len(cur))) + np.pad(shifted, (0, size - len(shifted)))
        states = nxt
    size = max(len(p) for p in states.values())
    total = sum(np.pad(p, (0, size - len(p))) for p in states.values())
    return np.array([int(t) for t in total], dtype=object)


@dataclass(frozen=True)
class SparseNK(SubshiftFamily):
    """Sequences with at most ``K`` nonzero entries in every length-``N`` window."""

    N: int
    K: int
    tag = "sparse"

    def __post_init__(self):
        if not (1 <= self.K <= self.N):
            raise ValueError(f"need 1 <= K <= N, got N={self.N}, K={self.K}")

    @property
    def window(self):
        return self.N

    def contains(self, window) -> bool:
        nz = (np.asarray(window) != 0).astype(np.int64)
        n = nz.shape[-1]
        if n == 0:
            return True
        width = min(self.N, n)
        csum = np.concatenate([[0], np.cumsum(nz)])
        return bool(np.all(csum[width:] - csum[:-width] <= self.K))

    def count_words(self, n, grid):
        counts = _sparse_pattern_counts(n, self.N, self.K)
        return int(sum(c * grid.size**s for s, c in enumerate(counts)))

    def cell_count(self, n, j, grid):
        # a nonzero grid value can sit in any of the 2^j cells, zero only in cell 0;
        # a cell tuple is occupied iff the coordinates in nonzero cells form an
        # admissible pattern, so each pattern contributes (2^j - 1)^|P|
        grid.cell_index(0.0, j)
        counts = _sparse_pattern_counts(n, self.N, self.K)
        return int(sum(c * ((1 << j) - 1) ** s for s, c in enumerate(counts)))

    def _words(self, n, grid):
        nonzero = grid.points[1:]
        chunks = [np.zeros((1, n))]
        for pat in _sparse_patterns(n, self.N, self.K):
            pos = np.flatnonzero(pat)
            if len(pos) == 0:
                continue
            vals = np.array(list(itertools.product(nonzero, repeat=len(pos))))
            block = np.zeros((len(vals), n))
            block[:, pos] = vals
            chunks.append(block)
        return np.concatenate(chunks)

    def to_dict(self):
        return {"type": "sparse", "N": self.N, "K": self.K}


@dataclass(frozen=True)
class VanishingCubes(SubshiftFamily):
    """Shifts of the cubes ``[0, 2^-m]^m`` (m <= m_max) placed on consecutive coordinates."""

    m_max: int
    tag = "cubes"

    def __post_init__(self):
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")

    @property
    def window(self):
        return self.m_max

    def contains(self, window) -> bool:
        w = np.asarray(window, dtype=np.float64)
        nz = np.flatnonzero(w)
        if len(nz) == 0:
            return True
        span = int(nz[-1] - nz[0] + 1)
        return span <= self.m_max and float(w.max()) <= 2.0**-span and float(w.min()) >= 0

    def _placements(self, n: int):
        # (m, first visible coord, last visible coord + 1) for every cube position meeting the window
        for m in range(1, self.m_max + 1):
            for start in range(-(m - 1), n):
                lo, hi = max(start, 0), min(start + m, n)
                yield m, lo, hi

    def count_words(self, n, grid):
        return len(self._words(n, grid))

    def _words(self, n, grid):
        words = {tuple([0.0] * n)}
        for m, lo, hi in self._placements(n):
            if m > grid.bits:
                continue
            vals = np.arange((1 << (grid.bits - m)) + 1) / grid.size
            for combo in itertools.product(vals, repeat=hi - lo):
                w = [0.0] * n
                w[lo:hi] = combo
                words.add(tuple(w))
        return np.array(sorted(words), dtype=np.float64).reshape(-1, n)

    def cell_count(self, n, j, grid):
        # a cell tuple is occupied iff its nonzero span s satisfies s <= m_max and
        # every index is <= top(s), the cell of 2^-s; place the cube exactly on the span
        grid.cell_index(0.0, j)
        total = 1
        for s in range(1, min(self.m_max, n) + 1):
            top = int(grid.cell_index(2.0**-s, j)) if s <= grid.bits else 0
            if top == 0:
                continue
            inner = top if s == 1 else top * top * (top + 1) ** (s - 2)
            total += (n - s + 1) * inner
        return total

    def cell_count_bruteforce(self, n, j, grid):
        cells = {tuple([0] * n)}
        for m, lo, hi in self._placements(n):
            top = 2.0**-m if m <= grid.bits else 0.0
            vals = np.arange(0, grid.size * top + 1) / grid.size
            idx = np.unique(grid.cell_index(vals, j))
            for combo in itertools.product(idx.tolist(), repeat=hi - lo):
                c = [0] * n
                c[lo:hi] = combo
                cells.add(tuple(c))
        return len(cells)

    def to_dict(self):
        return {"type": "cubes", "m_max": self.m_max}


def reciprocal_alphabet(n_max: int, grid: DyadicGrid) -> tuple:
    vals = {0.0}
    for k in range(1, n_max + 1):
        vals.add(math.floor(grid.size / k + 0.5) / grid.size)
    return tuple(sorted(vals))


@dataclass(frozen=True)
class ReciprocalAlphabet(SubshiftFamily):
    """Full shift over ``{0} U {1/k : k <= n_max}`` rounded to the ``bits`` grid (collisions merged)."""

    n_max: int
    bits: int = DEFAULT_BITS
    tag = "reciprocal"

    @property
    def alphabet(self) -> tuple:
        return reciprocal_alphabet(self.n_max, DyadicGrid(self.bits))

    def full_shift(self, grid: DyadicGrid) -> FullShift:
        if grid.bits < self.bits:
            raise ResolutionError(f"alphabet needs a 2^-{self.bits} grid")
        return FullShift(self.alphabet)

    def contains(self, window) -> bool:
        return FullShift(self.alphabet).contains(window)

    def count_words(self, n, grid):
        return self.full_shift(grid).count_words(n, grid)

    def _words(self, n, grid):
        return self.full_shift(grid)._words(n, grid)

    def cell_count(self, n, j, grid):
        return self.full_shift(grid).cell_count(n, j, grid)

    def to_dict(self):
        return {"type": "reciprocal", "n_max": self.n_max, "bits": self.bits}


def enumerate_words(family: SubshiftFamily, n: int, grid: DyadicGrid, budget: int = WORD_BUDGET) -> np.ndarray:
    """``pi_n(S)`` on the grid as a lexicographically sorted ``(count, n)`` array."""
    estimate = family.count_words(n, grid)
    if estimate > budget:
        raise BudgetError(f"enumerate_words({family.to_dict()}, n={n}, b={grid.bits})", estimate, budget)
    return _lexsort_unique(family._words(n, grid))


def family_from_dict(d: dict) -> SubshiftFamily:
    kind = d.get("type")
    if kind == "full":
        alpha = d.get("alphabet")
        return FullShift(None if alpha is None else tuple(alpha))
    if kind == "sparse":
        return SparseNK(int(d["N"]), int(d["K"]))
    if kind == "cubes":
        return VanishingCubes(int(d["m_max"]))
    if kind == "reciprocal":
        return ReciprocalAlphabet(int(d["n_max"]), int(d.get("bits", DEFAULT_BITS)))
    raise ValueError(f"unknown family type {kind!r}")


# --------------------------------------------------------------------------
# measures
# --------------------------------------------------------------------------


class MeasureSpec:
    tag = "abstract"

    def sample(self, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def block_pmf(self, n: int, budget: int = WORD_BUDGET) -> tuple[np.ndarray, np.ndarray]:
        """Exact law of ``x|_0^{n-1}``: sorted support words and their masses."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _check_pmf(probs) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > PMF_TOL:
        raise ValueError(f"invalid probability vector (sum={probs.sum()!r})")
    return probs


def _merge(words: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    uniq, inv = np.unique(words, axis=0, return_inverse=True)
    merged = np.zeros(len(uniq))
    np.add.at(merged, inv.ravel(), probs)
    keep = merged > 0
    return uniq[keep], merged[keep]


@dataclass(frozen=True)
class ProductIID(MeasureSpec):
    values: tuple
    probs: tuple
    tag = "iid"

    def __post_init__(self):
        if len(self.values) != len(self.probs):
            raise ValueError("values and probs differ in length")
        _check_pmf(self.probs)
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))

    @classmethod
    def uniform(cls, values: Sequence[float]) -> "ProductIID":
        values = list(values)
        return cls(tuple(values), tuple([1.0 / len(values)] * len(values)))

    @classmethod
    def point_mass(cls, value: float = 0.0) -> "ProductIID":
        return cls((value,), (1.0,))

    def sample(self, n, count, rng):
        return rng.choice(np.array(self.values), p=np.array(self.probs), size=(count, n))

    def block_pmf(self, n, budget=WORD_BUDGET):
        m = len(self.values)
        if m**n > budget:
            raise BudgetError(f"block_pmf(iid, n={n})", m**n, budget)
        vals = np.array(self.values)
        pr = np.array(self.probs)
        idx = np.array(list(itertools.product(range(m), repeat=n)), dtype=np.int64).reshape(-1, n)
        return _merge(vals[idx], np.prod(pr[idx], axis=1))

    def to_dict(self):
        return {"type": "iid", "values": list(self.values), "probs": list(self.probs)}


@dataclass(frozen=True)
class ShiftAverageProduct(MeasureSpec):
    """``(1/N) sum_j sigma^j_* (prod nu)`` with ``nu`` uniform on the grid over K coordinates and 0 elsewhere."""

    N: int
    K: int
    bits: int = 3
    tag = "shift-avg"

    @property
    def family(self) -> SparseNK:
        return SparseNK(self.N, self.K)

    def _letters(self) -> np.ndarray:
        return DyadicGrid(self.bits).points

    def sample(self, n, count, rng):
        letters = self._letters()
        phase = rng.integers(0, self.N, size=count)
        nblocks = (n + self.N - 1) // self.N + 1
        draws = rng.choice(letters, size=(count, nblocks, self.K))
        pos = np.arange(n)[None, :] + phase[:, None]
        blk, off = pos // self.N, pos % self.N
        rows = np.arange(count)[:, None]
        out = np.where(off < self.K, draws[rows, blk, np.minimum(off, self.K - 1)], 0.0)
        return out

    def block_pmf(self, n, budget=WORD_BUDGET):
        letters = self._letters()
        L = len(letters)
        words, probs = [], []
        for j in range(self.N):
            pos = np.arange(n) + j
            free = np.flatnonzero(pos % self.N < self.K)
            if L ** len(free) * self.N > budget:
                raise BudgetError(f"block_pmf(shift-avg, n={n})", L ** len(free) * self.N, budget)
            combos = np.array(list(itertools.product(letters, repeat=len(free))), dtype=np.float64)
            combos = combos.reshape(L ** len(free), len(free))
            w = np.zeros((len(combos), n))
            w[:, free] = combos
            words.append(w)
            probs.append(np.full(len(combos), 1.0 / (self.N * L ** len(free))))
        return _merge(np.concatenate(words), np.concatenate(probs))

    def to_dict(self):
        return {"type": "shift-avg", "N": self.N, "K": self.K, "bits": self.bits}


@dataclass(frozen=True)
class Empirical(MeasureSpec):
    windows: np.ndarray = field(compare=False)
    weights: np.ndarray = field(compare=False)
    tag = "empirical"

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.windows, dtype=np.float64))
        p = _check_pmf(self.weights)
        if len(p) != len(w):
            raise ValueError("one weight per window required")
        object.__setattr__(self, "windows", w)
        object.__setattr__(self, "weights", p)

    def _restrict(self, n):
        if n > self.windows.shape[1]:
            raise DimensionError(f"stored windows have length {self.windows.shape[1]} < {n}")
        return self.windows[:, :n]

    def sample(self, n, count, rng):
        idx = rng.choice(len(self.weights), p=self.weights, size=count)
        return self._restrict(n)[idx]

    def block_pmf(self, n, budget=WORD_BUDGET):
        return _merge(self._restrict(n), self.weights)

    def to_dict(self):
        return {"type": "empirical", "windows": self.windows.tolist(), "weights": self.weights.tolist()}


def sample_windows(measure: MeasureSpec, n: int, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. draws of ``x|_0^{n-1}``; reproducible from ``seed``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return measure.sample(n, count, rng_for(seed))


def measure_from_dict(d: dict) -> MeasureSpec:
    kind = d.get("type")
    if kind == "iid":
        return ProductIID(tuple(d["values"]), tuple(d["probs"]))
    if kind == "shift-avg":
        return ShiftAverageProduct(int(d["N"]), int(d["K"]), int(d.get("bits", 3)))
    if kind == "empirical":
        return Empirical(np.array(d["windows"]), np.array(d["weights"]))
    raise ValueError(f"unknown measure type {kind!r}")


# --------------------------------------------------------------------------
# regularity classes
# --------------------------------------------------------------------------

REGULARITY_CLASSES = ("borel", "linear", "lipschitz", "holder")


@dataclass(frozen=True)
class HolderSpec:
    """Regularity class of a map with respect to the normalized l^p norm."""

    cls: str = "holder"
    p: float = math.inf
    L: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.cls not in REGULARITY_CLASSES:
            raise ValueError(f"class must be one of {REGULARITY_CLASSES}")
        if not (0 < self.alpha <= 1):
            raise ValueError("alpha must lie in (0, 1]")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not self.p >= 1:
            raise ValueError("p must be >= 1 or inf")

    def to_dict(self):
        return {"class": self.cls, "p": "inf" if math.isinf(self.p) else self.p, "L": self.L, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d):
        p = d.get("p", "inf")
        return cls(d.get("class", "holder"), math.inf if p == "inf" else float(p), float(d["L"]), float(d["alpha"]))

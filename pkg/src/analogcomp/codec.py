"""Compressor/decompressor pairs, regularity certificates and compression error functionals.

Three schemes are provided:

* ``sparse``: support selection plus signature coordinate for (N, K)-sparse
  blocks, decoded by a Hölder space-filling surjection;
* ``linear``: a seeded random linear encoder with a nearest-word decoder;
* ``peano``: the coordinatewise Hilbert surjection for the full shift.

All maps act on batches shaped ``(count, n)``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .model import (
    WORD_BUDGET,
    BudgetError,
    DimensionError,
    DyadicGrid,
    HolderSpec,
    MeasureSpec,
    ResolutionError,
    SparseNK,
    SubshiftFamily,
    enumerate_words,
    family_from_dict,
    norm_distance,
    rng_for,
)
from .spacefill import CurveMap, target_grid

Map = Callable[[np.ndarray], np.ndarray]


class AdmissibilityError(ValueError):
    """Input block lies outside the family the operation is defined on."""


def _batch(x, width: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != width:
        raise DimensionError(f"expected blocks of length {width}, got {x.shape[1]}")
    return x, single


def _unbatch(y: np.ndarray, single: bool) -> np.ndarray:
    return y[0] if single else y


@dataclass(frozen=True)
class CodecPair:
    """Encoder ``[0,1]^n -> [0,1]^k`` and decoder ``[0,1]^k -> [0,1]^n`` with declared regularity."""

    scheme: str
    n: int
    k: int
    encoder: Map = field(repr=False, compare=False)
    decoder: Map = field(repr=False, compare=False)
    encoder_spec: HolderSpec = HolderSpec("borel")
    decoder_spec: HolderSpec = HolderSpec("borel")
    params: dict = field(default_factory=dict, compare=False)
    seed: int | None = None

    def __post_init__(self):
        if not (0 < self.k <= self.n):
            raise DimensionError(f"need 0 < k <= n, got k={self.k}, n={self.n}")

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    def encode(self, x) -> np.ndarray:
        x, single = _batch(x, self.n)
        return _unbatch(self.encoder(x), single)

    def decode(self, y) -> np.ndarray:
        y, single = _batch(y, self.k)
        return _unbatch(self.decoder(y), single)

    def roundtrip(self, x) -> np.ndarray:
        return self.decode(self.encode(x))

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme, "n": self.n, "k": self.k, "rate": str(self.rate),
            "seed": self.seed, "params": self.params,
            "encoder": self.encoder_spec.to_dict(), "decoder": self.decoder_spec.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


# --------------------------------------------------------------------------
# sparse codec
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportFamily:
    """All ``size``-subsets of ``{0, .., window-1}`` in lexicographic order."""

    window: int
    size: int

    def __post_init__(self):
        if not (0 < self.size <= self.window):
            raise ValueError("need 0 < size <= window")

    @property
    def count(self) -> int:
        return math.comb(self.window, self.size)

    def members(self) -> list[tuple[int, ...]]:
        return list(itertools.combinations(range(self.window), self.size))

    def rank(self, A) -> int:
        # lexicographic rank of a combination
        A = sorted(A)
        if len(A) != self.size or len(set(A)) != self.size or A[0] < 0 or A[-1] >= self.window:
            raise AdmissibilityError(f"{A} is not a {self.size}-subset of range({self.window})")
        r, prev = 0, -1
        for i, a in enumerate(A):
            for v in range(prev + 1, a):
                r += math.comb(self.window - v - 1, self.size - i - 1)
            prev = a
        return r

    def unrank(self, r: int) -> tuple[int, ...]:
        out, v = [], 0
        for i in range(self.size):
            while True:
                c = math.comb(self.window - v - 1, self.size - i - 1)
                if r < c:
                    break
                r -= c
                v += 1
            out.append(v)
            v += 1
        return tuple(out)

    @property
    def signature_bits(self) -> int:
        if self.count == 1:
            return 1
        return math.ceil(math.log2(2 * (self.count - 1))) + 2

    def signatures(self) -> np.ndarray:
        """Signature of every member by rank, rounded to the auxiliary grid."""
        if self.count == 1:
            return np.ones(1)
        scale = 2.0**self.signature_bits
        raw = 0.5 + np.arange(self.count) / (2.0 * (self.count - 1))
        return np.round(raw * scale) / scale

    def separation(self) -> float:
        """Smallest distance between two signatures, or between a signature and 0."""
        s = self.signatures()
        return float(min(s.min(), np.diff(s).min() if len(s) > 1 else 1.0))


def support_selector(x, size: int) -> tuple[int, ...]:
    """Support of ``x`` topped up with its lowest-index zero coordinates to ``size`` elements."""
    x = np.asarray(x)
    supp = [int(i) for i in np.flatnonzero(x)]
    if len(supp) > size:
        raise AdmissibilityError(f"block has {len(supp)} nonzeros, more than {size}")
    zeros = [int(i) for i in np.flatnonzero(x == 0)][: size - len(supp)]
    return tuple(sorted(supp + zeros))


def signature(A, family: SupportFamily) -> float:
    return float(family.signatures()[family.rank(A)])


# Hilbert-curve Hölder constant 2 sqrt(m+3) in the Euclidean norm, plus 2 for
# polygon vertices sitting at cell corners rather than on the limit curve,
# times 2 for the doubling in the closed-grid surjection.
def curve_constant(m: int) -> float:
    return 2.0 * (2.0 * math.sqrt(m + 3) + 2.0)


def surjection_constant(curve: CurveMap | None, d: int, alpha: float, p: float) -> float:
    """Declared Hölder constant of ``psi: [0,1]^d -> [0,1]^n`` at exponent ``alpha`` in the normalized l^p norm."""
    base = 1.0 if curve is None or curve.identity else curve_constant(curve.m)
    return base if math.isinf(p) else base * d ** (alpha / p)


class SparseCodec:
    """Sparse-block compressor with signature coordinate and Hölder decoder.

    Parameters
    ----------
    N, K : int
        Sparsity window and budget of the family.
    ell : int
        Number of windows per block, so blocks have length ``ell*N``.
    alpha : Fraction
        Decoder exponent, the reciprocal of an integer.
    bits : int
        Source grid resolution.
    p : float
        Norm in which the decoder constant is declared.
    """

    def __init__(self, N: int, K: int, ell: int, alpha=Fraction(1, 2), bits: int = 3, p: float = math.inf):
        alpha = Fraction(alpha).limit_denominator(10**6)
        if alpha <= 0 or alpha > 1 or alpha.numerator != 1:
            raise ValueError(
                f"alpha={alpha} unsupported: the coordinatewise Hilbert surjection only attains "
                "exponents 1/q for integer q")
        self.family = SparseNK(N, K)
        self.N, self.K, self.ell, self.alpha, self.bits, self.p = N, K, ell, alpha, bits, p
        self.grid = DyadicGrid(bits)
        self.n = ell * N
        self.size = ell * K
        self.d = math.ceil(alpha * self.size) + 1
        self.supports = SupportFamily(self.n, self.size)
        self._sigs = self.supports.signatures()
        self._table = np.array(self.supports.members(), dtype=np.int64)
        self._lookup = {A: r for r, A in enumerate(map(tuple, self._table.tolist()))}
        # psi: [0,1]^d -> [0,1]^(ell K); a coordinate projection when d >= ell K
        self.curve = None if self.d >= self.size else CurveMap(self.d, self.size, bits)
        if self.curve is not None and self.curve.exponent < alpha:
            raise ValueError("surjection exponent below the declared alpha")

    @property
    def k(self) -> int:
        return self.d + 1

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    @property
    def code_bits(self) -> int:
        src = self.bits if self.curve is None else self.curve.source_bits
        return max(src, self.supports.signature_bits)

    # regularity constants
    def M(self) -> float:
        sep = self.supports.separation()
        return sep if math.isinf(self.p) else sep / (self.d + 1) ** (1 / self.p)

    def constants(self) -> dict:
        a, p, d = float(self.alpha), self.p, self.d
        L = surjection_constant(self.curve, d, a, p)
        Lt = L if math.isinf(p) else L * ((d + 1) / d) ** (a / p)
        Lp = max(self.M() ** -a, Lt)
        Lpp = Lp if math.isinf(p) else self.n ** (1 / p) * Lp
        return {"L_psi": L, "L_tilde": Lt, "M": self.M(), "L_prime": Lp, "L_double_prime": Lpp}

    # maps
    def phi(self, v: np.ndarray) -> np.ndarray:
        if self.curve is None:
            return np.concatenate([v, np.zeros((len(v), self.d - self.size))], axis=1)
        return self.curve.right_inverse(v)

    def psi(self, u: np.ndarray) -> np.ndarray:
        if self.curve is None:
            return u[:, : self.size]
        return self.curve.forward(u)

    def admissible(self, x: np.ndarray) -> np.ndarray:
        on = np.all(np.floor(x * self.grid.size) == x * self.grid.size, axis=1) & np.all((x >= 0) & (x <= 1), axis=1)
        return np.array([bool(o) and self.family.contains(row) for o, row in zip(on, x)], dtype=bool)

    def encode(self, x) -> np.ndarray:
        x, single = _batch(x, self.n)
        out = np.zeros((len(x), self.k))
        ok = np.flatnonzero(self.admissible(x))
        if len(ok):
            sets = [support_selector(x[i], self.size) for i in ok]
            vals = np.stack([x[i, list(A)] for i, A in zip(ok, sets)])
            out[ok, : self.d] = self.phi(vals)
            out[ok, self.d] = self._sigs[self._rank_many(sets)]
        return _unbatch(out, single)

    def decode(self, y) -> np.ndarray:
        y, single = _batch(y, self.k)
        out = np.zeros((len(y), self.n))
        live = np.flatnonzero(y[:, self.d] != 0)
        if len(live):
            ranks = self.nearest_rank(y[live, self.d])
            cols = self._table[ranks]
            out[live[:, None], cols] = self.psi(y[live, : self.d])
        return _unbatch(out, single)

    def _rank_many(self, sets) -> np.ndarray:
        return np.array([self._lookup[A] for A in sets], dtype=np.int64)

    def nearest_rank(self, s: np.ndarray) -> np.ndarray:
        """Rank of the nearest signature, ties to the lower rank."""
        sigs = self._sigs
        hi = np.clip(np.searchsorted(sigs, s), 0, len(sigs) - 1)
        lo = np.maximum(hi - 1, 0)
        return np.where(np.abs(s - sigs[lo]) <= np.abs(s - sigs[hi]), lo, hi)

    def _coordinate_grid(self) -> np.ndarray:
        if self.curve is None:
            return self.grid.points
        return np.arange(2**self.curve.source_bits) / 2.0**self.curve.source_bits

    def code_domain(self, budget: int = WORD_BUDGET) -> np.ndarray:
        """Grid on which the decoder is evaluated: coordinate grid ``^d`` times ``{0} U signatures``."""
        pts = self._coordinate_grid()
        total = len(pts) ** self.d * (len(self._sigs) + 1)
        if total > budget:
            raise BudgetError("decoder domain", total, budget)
        last = np.concatenate([[0.0], self._sigs])
        mesh = np.meshgrid(*([pts] * self.d), last, indexing="ij")
        return np.stack([a.reshape(-1) for a in mesh], axis=1)

    def code_slice(self, rank: int = 0, count: int | None = None, seed: int = 0) -> np.ndarray:
        """Decoder domain points sharing the signature of support ``rank``.

        Distinct slices are at least ``M`` apart, so the decoder's exponent is
        the exponent on one slice.  With ``count`` a seeded subsample is drawn.
        """
        pts = self._coordinate_grid()
        if count is None:
            mesh = np.meshgrid(*([pts] * self.d), indexing="ij")
            u = np.stack([a.reshape(-1) for a in mesh], axis=1)
        else:
            u = pts[rng_for(seed, 3, rank).integers(0, len(pts), (count, self.d))]
        return np.hstack([u, np.full((len(u), 1), self._sigs[rank])])

    def holder_fit(self, ranks=None, count: int | None = None, pair_budget: int = 10**5, seed: int = 0):
        """Worst empirical Hölder fit of the decoder over signature slices.

        Across slices the decoder jumps by at most 1 over a gap of at least
        ``M``, which the constant absorbs; the exponent is a within-slice property.
        """
        from .spacefill import HolderFit, holder_estimate

        ranks = range(self.supports.count) if ranks is None else ranks
        step = 2.0 ** -(self.bits if self.curve is None else self.curve.source_bits)
        fits = [holder_estimate(self.decode, self.p, pair_budget, seed, self.code_slice(r, count, seed),
                                float(self.alpha), step=step, axes=self.d) for r in ranks]
        return HolderFit(min(f.alpha for f in fits), max(f.L for f in fits), float(self.alpha),
                         sum(f.pairs for f in fits))

    def pair(self) -> CodecPair:
        c = self.constants()
        params = {
            "N": self.N, "K": self.K, "ell": self.ell, "alpha": str(self.alpha), "bits": self.bits,
            "d": self.d, "supports": self.supports.count, "signature_bits": self.supports.signature_bits,
            "code_bits": self.code_bits,
            "curve": None if self.curve is None else self.curve.to_dict(), **c,
        }
        dec = HolderSpec("holder", self.p, c["L_double_prime"], float(self.alpha))
        return CodecPair("sparse", self.n, self.k, self.encode, self.decode, HolderSpec("borel", self.p),
                         dec, params)


def sparse_codec(N: int, K: int, ell: int, alpha=Fraction(1, 2), bits: int = 3, p: float = math.inf) -> SparseCodec:
    return SparseCodec(N, K, ell, alpha, bits, p)


def sparse_encode(x, N: int, K: int, ell: int, alpha=Fraction(1, 2), bits: int = 3) -> np.ndarray:
    return SparseCodec(N, K, ell, alpha, bits).encode(x)


def sparse_decode(y, N: int, K: int, ell: int, alpha=Fraction(1, 2), bits: int = 3) -> np.ndarray:
    return SparseCodec(N, K, ell, alpha, bits).decode(y)


# --------------------------------------------------------------------------
# quantizer, Peano and linear codecs
# --------------------------------------------------------------------------


def cube_quantizer(k: int, j: int, grid: DyadicGrid | None = None) -> tuple[Map, int]:
    """Map to the centre of the dyadic cell of side ``2^-j`` (last cell closed), and the codebook size."""
    if grid is not None and j > grid.bits:
        raise ResolutionError(f"scale 2^-{j} is finer than the 2^-{grid.bits} grid")
    size = 2**j

    def c(x):
        x = np.asarray(x, dtype=np.float64)
        idx = np.minimum(np.floor(x * size), size - 1)
        return (idx + 0.5) / size

    return c, size**k


def codebook(k: int, j: int) -> np.ndarray:
    size = 2**j
    centers = (np.arange(size) + 0.5) / size
    mesh = np.meshgrid(*([centers] * k), indexing="ij")
    return np.stack([a.reshape(-1) for a in mesh], axis=1)


def peano_codec(n: int, alpha=Fraction(1, 2), bits: int = 3, p: float = math.inf) -> CodecPair:
    """Full-shift codec of rate ``alpha``: quantize to the grid, encode by the right inverse, decode by the curve."""
    alpha = Fraction(alpha).limit_denominator(10**6)
    if alpha.numerator != 1 or alpha <= 0:
        raise ValueError(f"alpha={alpha} unsupported: only exponents 1/q are attained")
    q = alpha.denominator
    if n % q:
        raise DimensionError(f"block length {n} is not a multiple of {q}")
    k = n // q
    curve = CurveMap(k, n, bits)
    grid = DyadicGrid(bits)

    def enc(x):
        return curve.right_inverse(np.minimum(grid.quantize(x), 1.0))

    L = surjection_constant(curve, k, float(curve.exponent), p)
    params = {"bits": bits, "alpha": str(alpha), "curve": curve.to_dict(), "L_psi": L}
    return CodecPair("peano", n, k, enc, curve.forward, HolderSpec("borel", p),
                     HolderSpec("holder", p, L, float(curve.exponent)), params)


def identity_codec(n: int, p: float = math.inf) -> CodecPair:
    ident = lambda x: np.array(x, dtype=np.float64)
    return CodecPair("identity", n, n, ident, ident, HolderSpec("lipschitz", p), HolderSpec("lipschitz", p), {})


def linear_random_codec(family: SubshiftFamily, n: int, k: int, seed: int, grid: DyadicGrid,
                        budget: int = WORD_BUDGET, p: float = math.inf) -> CodecPair:
    """Seeded Gaussian encoder rescaled into ``[0,1]^k`` with a nearest-admissible-word decoder.

    The matrix is the first ``k`` rows of a fixed ``n x n`` draw, so codecs with
    the same seed and growing ``k`` refine each other.
    """
    if k >= n:
        raise DimensionError("k >= n gives no compression")
    words = enumerate_words(family, n, grid, budget)
    A = rng_for(seed, n).standard_normal((n, n))[:k]
    lo = np.minimum(A, 0).sum(axis=1)
    hi = np.maximum(A, 0).sum(axis=1)
    scale = hi - lo

    def enc(x):
        return (np.asarray(x, dtype=np.float64) @ A.T - lo) / scale

    images = enc(words)

    def dec(y):
        y = np.atleast_2d(y)
        out = np.empty((len(y), n))
        for s in range(0, len(y), 1024):
            part = y[s : s + 1024]
            dist = ((part[:, None, :] - images[None, :, :]) ** 2).sum(axis=2)
            out[s : s + 1024] = words[np.argmin(dist, axis=1)]  # first minimum is lexicographically least
        return out

    gaps = _min_pair_gap(images)
    injective = bool(gaps > 1e-9)
    inv_lip = _inverse_lipschitz(words, images, p) if injective and len(words) <= 4096 else None
    params = {
        "family": family.to_dict(), "bits": grid.bits, "words": int(len(words)), "injective": injective,
        "min_image_gap": gaps, "row_scale": scale.tolist(), "row_offset": lo.tolist(),
        "inverse_lipschitz": inv_lip,
    }
    op = float(np.linalg.norm(A / scale[:, None], 2))
    return CodecPair("linear", n, k, enc, dec, HolderSpec("linear", p, max(op, 1e-12), 1.0),
                     HolderSpec("borel", p), params, seed)


def _min_pair_gap(images: np.ndarray) -> float:
    if len(images) < 2:
        return math.inf
    best = math.inf
    for s in range(0, len(images), 512):
        d = np.abs(images[s : s + 512, None, :] - images[None, :, :]).max(axis=2)
        rows = np.arange(s, min(s + 512, len(images)))
        d[np.arange(len(rows)), rows] = math.inf
        best = min(best, float(d.min()))
    return best


def _inverse_lipschitz(words, images, p) -> float:
    i, j = np.triu_indices(len(words), k=1)
    din = norm_distance(images[i], images[j], p)
    dout = norm_distance(words[i], words[j], p)
    return float(np.max(dout / din)) if len(i) else 0.0


def clip_extend(points, values, n: int | None = None) -> Map:
    """Total map from a decoder known on ``points``: nearest defined point, then clip to ``[0,1]``.

    Ties in the nearest-point search go to the earliest point.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    values = np.asarray(values, dtype=np.float64).reshape(len(points), -1)
    if len(points) == 0:
        raise ValueError("cannot extend from an empty domain")
    if n is not None and values.shape[1] != n:
        raise DimensionError(f"values have length {values.shape[1]}, expected {n}")
    clipped = np.clip(values, 0.0, 1.0)

    def g(y):
        y = np.atleast_2d(np.asarray(y, dtype=np.float64))
        d = np.abs(y[:, None, :] - points[None, :, :]).max(axis=2)
        return clipped[np.argmin(d, axis=1)]

    return g


# --------------------------------------------------------------------------
# regularity certificates
# --------------------------------------------------------------------------


@dataclass
class RegularityCertificate:
    certified: bool
    spec: dict
    mode: str
    pairs: int
    worst_ratio: float
    violation: tuple | None = None
    note: str = ""

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        if self.violation is not None:
            d["violation"] = [list(map(float, v)) for v in self.violation]
        return d


def verify_regularity(g: Map, spec: HolderSpec, points, mode: str = "exhaustive", seed: int = 0,
                      pair_budget: int = 10**6, rtol: float = 1e-9) -> RegularityCertificate:
    """Check ``|g x - g y|_p <= L |x - y|_p^alpha`` over pairs from ``points``.

    ``exhaustive`` tests all pairs (rejected above ``pair_budget``), ``sampled``
    tests ``pair_budget`` seeded pairs.  Borel maps are certified trivially.
    Linear maps are checked for exact affinity on the points and an operator
    bound ``L`` on the linear part.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if spec.cls == "borel":
        return RegularityCertificate(True, spec.to_dict(), mode, 0, 0.0, note="Borel class needs no check")
    values = np.atleast_2d(g(points))
    if spec.cls == "linear":
        X = np.hstack([points, np.ones((len(points), 1))])
        coef, *_ = np.linalg.lstsq(X, values, rcond=None)
        resid = float(np.abs(X @ coef - values).max())
        op = float(np.linalg.norm(coef[:-1].T, 2))
        ok = resid <= 1e-9 and op <= spec.L * (1 + rtol)
        return RegularityCertificate(ok, spec.to_dict(), mode, len(points), op,
                                     note=f"affine residual {resid:.3g}")
    alpha = 1.0 if spec.cls == "lipschitz" else spec.alpha
    count = len(points)
    total = count * (count - 1) // 2
    if mode == "exhaustive":
        if total > pair_budget:
            raise BudgetError("exhaustive pair check", total, pair_budget)
        blocks = _all_pairs(count)
    elif mode == "sampled":
        rng = rng_for(seed, 1)
        i = rng.integers(0, count, pair_budget)
        j = rng.integers(0, count, pair_budget)
        blocks = [(i[i != j], j[i != j])]
    else:
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    worst, worst_pair, checked = 0.0, None, 0
    for i, j in blocks:
        din = norm_distance(points[i], points[j], spec.p)
        dout = norm_distance(values[i], values[j], spec.p)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(din > 0, dout / din**alpha, np.where(dout > 0, np.inf, 0.0))
        checked += len(i)
        a = int(np.argmax(ratio))
        if ratio[a] > worst:
            worst, worst_pair = float(ratio[a]), (points[i[a]], points[j[a]])
    ok = worst <= spec.L * (1 + rtol)
    return RegularityCertificate(ok, spec.to_dict(), mode, checked, worst, None if ok else worst_pair)


def _all_pairs(count: int, chunk: int = 256):
    for s in range(0, count, chunk):
        rows = np.arange(s, min(s + chunk, count))
        i = np.repeat(rows, count)
        j = np.tile(np.arange(count), len(rows))
        keep = j > i
        yield i[keep], j[keep]


# --------------------------------------------------------------------------
# error functionals
# --------------------------------------------------------------------------

ERROR_MODES = ("mismatch-prob", "excess-prob", "mean-Lp")


@dataclass(frozen=True)
class ErrorEstimate:
    value: float
    half_width: float
    exact: bool
    mode: str
    samples: int


def _errors(codec: CodecPair, x: np.ndarray, mode: str, eps: float | None, p: float) -> np.ndarray:
    out = codec.roundtrip(x)
    if mode == "mismatch-prob":
        return np.any(out != x, axis=1).astype(np.float64)
    d = np.asarray(norm_distance(x, out, p), dtype=np.float64)
    if mode == "excess-prob":
        return (d >= eps).astype(np.float64)
    return d if math.isinf(p) else d**p


def measure_error(codec: CodecPair, measure: MeasureSpec, n: int, mode: str = "mismatch-prob",
                  eps: float | None = None, p: float = 1.0, samples: int = 10**4, seed: int = 0,
                  budget: int = 10**6, workers: int = 1) -> ErrorEstimate:
    """Probability of decoding error, of an error of size at least ``eps``, or the ``L^p`` error.

    Exact when the n-block marginal is enumerable within ``budget``; otherwise a
    Monte-Carlo mean with a 95% normal half-width, sharded into fixed seeded
    chunks so the result does not depend on ``workers``.
    """
    if mode not in ERROR_MODES:
        raise ValueError(f"mode must be one of {ERROR_MODES}")
    if mode == "excess-prob" and eps is None:
        raise ValueError("excess-prob needs eps")
    if n != codec.n:
        raise DimensionError(f"codec has block length {codec.n}, measure blocks have {n}")
    finish = (lambda v: v) if mode != "mean-Lp" or math.isinf(p) else (lambda v: v ** (1 / p))
    try:
        words, probs = measure.block_pmf(n, budget)
    except BudgetError:
        words = None
    if words is not None:
        err = _errors(codec, words, mode, eps, p)
        if mode == "mean-Lp" and math.isinf(p):
            val = float(err[probs > 0].max(initial=0.0))
        else:
            val = float(np.dot(probs, err))
        return ErrorEstimate(finish(val), 0.0, True, mode, len(words))

    from ._parallel import pmap

    chunk = 1024
    shards = [(s, min(chunk, samples - s * chunk)) for s in range(-(-samples // chunk))]

    def run(shard):
        idx, size = shard
        x = measure.sample(n, size, rng_for(seed, 2, idx))
        return _errors(codec, x, mode, eps, p)

    err = np.concatenate(pmap(run, shards, workers))
    if mode == "mean-Lp" and math.isinf(p):
        return ErrorEstimate(float(err.max()), 0.0, False, mode, samples)
    mean = float(err.mean())
    half = 1.96 * float(err.std(ddof=1)) / math.sqrt(len(err)) if len(err) > 1 else math.inf
    return ErrorEstimate(finish(mean), half, False, mode, samples)


def codec_from_dict(d: dict) -> CodecPair:
    """Rebuild a codec from its JSON descriptor."""
    pr = d.get("params", {})
    p = d.get("decoder", {}).get("p", "inf")
    p = math.inf if p == "inf" else float(p)
    if d["scheme"] == "sparse":
        return SparseCodec(pr["N"], pr["K"], pr["ell"], Fraction(pr["alpha"]), pr["bits"], p).pair()
    if d["scheme"] == "peano":
        return peano_codec(d["n"], Fraction(pr["alpha"]), pr["bits"], p)
    if d["scheme"] == "linear":
        return linear_random_codec(family_from_dict(pr["family"]), d["n"], d["k"], d["seed"],
                                   DyadicGrid(pr["bits"]), p=p)
    if d["scheme"] == "identity":
        return identity_codec(d["n"], p)
    raise ValueError(f"unknown scheme {d['scheme']!r}")


__all__ = [
    "AdmissibilityError", "CodecPair", "SupportFamily", "SparseCodec", "RegularityCertificate", "ErrorEstimate",
    "support_selector", "signature", "sparse_codec", "sparse_encode", "sparse_decode", "cube_quantizer", "codebook",
    "peano_codec", "identity_codec", "linear_random_codec", "clip_extend", "verify_regularity", "measure_error",
    "codec_from_dict", "target_grid", "curve_constant", "surjection_constant",
]

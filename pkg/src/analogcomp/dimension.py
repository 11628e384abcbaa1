"""Covering numbers and dimension estimators for subshifts of [0,1]^Z.

Counting convention: a set of diameter at most ``eps = 2^-j`` in the max norm
is one cover element.  On enumerable families the count is the number of
occupied half-open dyadic cells of side ``2^-j`` (last cell closed), which is an
exact integer.  For arbitrary point clouds a greedy ball cover gives an upper
bound and a maximal ``eps``-separated set (pairwise distance > eps) a lower
bound on the minimal cover.

Limits over the block length are replaced by the minimum over the supplied
schedule, which is legitimate for subadditive sequences.  The limit over the
scale is reported two ways: the per-scale ratio at the smallest scale and the
slope of the log-count between the two smallest scales.  The estimate's
``value`` is the slope.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._parallel import pmap
from .model import (
    DyadicGrid,
    FullShift,
    ResolutionError,
    SparseNK,
    SubshiftFamily,
    VanishingCubes,
    enumerate_words,
    norm_distance,
    tau_weights,
)

METHODS = ("exact-cells", "greedy-upper", "packing-lower")


@dataclass(frozen=True)
class CoveringCount:
    epsilon: float
    count: int
    method: str


@dataclass(frozen=True)
class Covering:
    """Covering counts of one point set at one scale, bracketing the minimal cover."""

    j: int
    cells: CoveringCount | None
    greedy: CoveringCount
    packing: CoveringCount

    @property
    def epsilon(self) -> float:
        return 2.0**-self.j

    @property
    def lower(self) -> int:
        return self.packing.count

    @property
    def upper(self) -> int:
        if self.cells is None:
            return self.greedy.count
        return min(self.cells.count, self.greedy.count)


Metric = Callable[[np.ndarray, np.ndarray], np.ndarray]


def max_metric(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    return np.abs(points - center).max(axis=1)


def lp_metric(p: float) -> Metric:
    if math.isinf(p):
        return max_metric
    return lambda pts, c: norm_distance(pts, c[None, :], p)


def dynamical_tau_metric(n: int, w: int) -> Metric:
    """``tau_n`` truncated at radius ``w`` on windows holding coordinates ``-w .. n-1+w``."""
    weights = tau_weights(w)

    def metric(points, center):
        diff = np.abs(points - center)
        # column k+w of the window is coordinate k
        cols = [diff[:, k : k + 2 * w + 1] @ weights for k in range(n)]
        return np.max(np.stack(cols, axis=1), axis=1)

    return metric


def greedy_cover(points: np.ndarray, radius: float, metric: Metric = max_metric) -> int:
    """Number of closed balls of ``radius`` (centred at points, scanned in order) covering the set."""
    points = np.atleast_2d(points)
    uncovered = np.ones(len(points), dtype=bool)
    count = 0
    while uncovered.any():
        c = int(np.argmax(uncovered))
        idx = np.flatnonzero(uncovered)
        uncovered[idx[metric(points[idx], points[c]) <= radius]] = False
        count += 1
    return count


def separated_subset(points: np.ndarray, eps: float, metric: Metric = max_metric) -> int:
    """Size of a maximal subset with pairwise distance strictly greater than ``eps``."""
    points = np.atleast_2d(points)
    alive = np.ones(len(points), dtype=bool)
    count = 0
    while alive.any():
        c = int(np.argmax(alive))
        idx = np.flatnonzero(alive)
        alive[idx[metric(points[idx], points[c]) <= eps]] = False
        count += 1
    return count


def cell_count(points: np.ndarray, j: int, grid: DyadicGrid) -> int:
    cells = grid.cell_index(np.atleast_2d(points), j)
    return len(np.unique(cells, axis=0))


def covering_number(points, j: int, grid: DyadicGrid, norm: float = math.inf,
                    metric: Metric | None = None, bracket: bool = True) -> Covering:
    """Covering counts of a finite point set at ``eps = 2^-j``.

    ``exact-cells`` is only reported when the metric is an l^p norm (cells have
    diameter at most eps in every normalized l^p).  With ``bracket=False`` the
    quadratic greedy/packing passes are skipped and both report the cell count.
    """
    if j > grid.bits:
        raise ResolutionError(f"scale 2^-{j} is finer than the 2^-{grid.bits} grid")
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    eps = 2.0**-j
    cells = None
    if metric is None:
        cells = CoveringCount(eps, cell_count(points, j, grid), "exact-cells")
        metric = lp_metric(norm)
    if not bracket and cells is not None:
        return Covering(j, cells, CoveringCount(eps, cells.count, "greedy-upper"),
                        CoveringCount(eps, 1, "packing-lower"))
    greedy = CoveringCount(eps, greedy_cover(points, eps / 2, metric), "greedy-upper")
    packing = CoveringCount(eps, separated_subset(points, eps, metric), "packing-lower")
    return Covering(j, cells, greedy, packing)


# --------------------------------------------------------------------------
# estimates
# --------------------------------------------------------------------------


@dataclass
class DimensionEstimate:
    kind: str
    value: float
    js: list
    ns: list
    counts: dict = field(default_factory=dict)  # "n,j" -> count
    h: dict = field(default_factory=dict)  # "n,j" -> log2 count / (n j)
    per_eps: list = field(default_factory=list)  # per scale j, min over n of h
    per_n: list = field(default_factory=list)  # per block length, box-dimension slope / n
    endpoint_slope: float = 0.0
    lsq_slope: float = 0.0
    smallest_eps_value: float = 0.0
    family: dict | None = None

    @property
    def bounds(self) -> tuple[float, float]:
        return (min(self.endpoint_slope, self.lsq_slope), max(self.endpoint_slope, self.lsq_slope))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def write_csv(self, path, family_name: str = "") -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["family", "n", "j", "count_method", "count", "h_value"])
            for key in sorted(self.counts, key=lambda k: tuple(map(int, k.split(",")))):
                n, j = key.split(",")
                wr.writerow([family_name, n, j, "exact-cells", self.counts[key], repr(self.h[key])])


def _slopes(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    endpoint = float((ys[-1] - ys[-2]) / (xs[-1] - xs[-2]))
    lsq = float(np.polyfit(xs, ys, 1)[0])
    return endpoint, lsq


def box_dimension_estimate(points, js: Sequence[int], grid: DyadicGrid) -> DimensionEstimate:
    """Box-counting dimension of a point cloud from exact cell counts over ``js``."""
    js = sorted(js)
    if len(js) < 3:
        raise ValueError("need at least three scales")
    points = np.atleast_2d(points)
    counts = [cell_count(points, j, grid) for j in js]
    if len(np.unique(points, axis=0)) == 1:
        endpoint = lsq = 0.0
    else:
        endpoint, lsq = _slopes(js, [math.log2(c) for c in counts])
    est = DimensionEstimate("box", max(endpoint, 0.0), list(js), [points.shape[1]])
    est.counts = {f"{points.shape[1]},{j}": c for j, c in zip(js, counts)}
    est.endpoint_slope, est.lsq_slope = endpoint, lsq
    est.smallest_eps_value = math.log2(counts[-1]) / js[-1]
    return est


def default_schedules(family: SubshiftFamily, grid: DyadicGrid, kind: str) -> tuple[list, list]:
    """Block-length and scale schedules matched to the order of limits.

    The metric mean dimension takes n to infinity before eps, so long blocks are
    used; the mean box dimension takes eps to zero first, which at a finite grid
    is only resolved for blocks that are short relative to ``b``.
    """
    js = list(range(2, grid.bits + 1))
    if isinstance(family, SparseNK):
        ns = [family.N, 2 * family.N, 3 * family.N]
    elif isinstance(family, VanishingCubes):
        w = family.m_max
        ns = [w, 10 * w, 100 * w, 1000 * w] if kind == "mmdim" else [1, 2, 3]
    else:
        ns = [1, 2, 3]
    return ns, js


def _count_table(family, ns, js, grid, budget, workers):
    cells = [(n, j) for n in ns for j in js]

    def one(cell):
        n, j = cell
        return family.cell_count(n, j, grid)

    return dict(zip(cells, pmap(one, cells, workers)))


def mmdim_estimate(family: SubshiftFamily, ns: Sequence[int] | None = None, js: Sequence[int] | None = None,
                   grid: DyadicGrid = DyadicGrid(), budget: int = 10**8, workers: int = 1) -> DimensionEstimate:
    """Metric mean dimension: min over n per scale, then the slope at the smallest scale."""
    dn, dj = default_schedules(family, grid, "mmdim")
    ns = sorted(ns or dn)
    js = sorted(js or dj)
    if len(js) < 2:
        raise ValueError("need at least two scales")
    table = _count_table(family, ns, js, grid, budget, workers)
    est = DimensionEstimate("mmdim", 0.0, js, ns, family=family.to_dict())
    rate = []  # min over n of log2 count / n, per scale
    for j in js:
        hs, rs = [], []
        for n in ns:
            c = table[(n, j)]
            est.counts[f"{n},{j}"] = c
            h = math.log2(c) / (n * j)
            est.h[f"{n},{j}"] = h
            hs.append(h)
            rs.append(math.log2(c) / n)
        est.per_eps.append(min(hs))
        rate.append(min(rs))
    est.endpoint_slope, est.lsq_slope = _slopes(js, rate)
    est.smallest_eps_value = est.per_eps[-1]
    est.value = max(est.endpoint_slope, 0.0)
    return est


def mbdim_estimate(family: SubshiftFamily, ns: Sequence[int] | None = None, js: Sequence[int] | None = None,
                   grid: DyadicGrid = DyadicGrid(), budget: int = 10**8, workers: int = 1) -> DimensionEstimate:
    """Mean box dimension: box-dimension slope of each ``pi_n(S)`` divided by n, min over n."""
    dn, dj = default_schedules(family, grid, "mbdim")
    ns = sorted(ns or dn)
    js = sorted(js or dj)
    if len(js) < 2:
        raise ValueError("need at least two scales")
    table = _count_table(family, ns, js, grid, budget, workers)
    est = DimensionEstimate("mbdim", 0.0, js, ns, family=family.to_dict())
    lsq = []
    for n in ns:
        logs = []
        for j in js:
            c = table[(n, j)]
            est.counts[f"{n},{j}"] = c
            est.h[f"{n},{j}"] = math.log2(c) / (n * j)
            logs.append(math.log2(c))
        end, ls = _slopes(js, logs)
        est.per_n.append(end / n)
        lsq.append(ls / n)
    for j in js:
        est.per_eps.append(min(est.h[f"{n},{j}"] for n in ns))
    best = int(np.argmin(est.per_n))
    est.endpoint_slope, est.lsq_slope = est.per_n[best], lsq[best]
    est.smallest_eps_value = est.per_eps[-1]
    est.value = max(est.endpoint_slope, 0.0)
    return est


# --------------------------------------------------------------------------
# projection vs dynamical covering numbers
# --------------------------------------------------------------------------


def _verdict(lhs_lo, lhs_hi, rhs_lo, rhs_hi) -> str:
    if lhs_hi <= rhs_lo:
        return "certified"
    if lhs_lo <= rhs_hi:
        return "consistent"
    return "violated"


def dynamical_covering_check(family: SubshiftFamily, n: int, j: int, grid: DyadicGrid,
                             m: int | None = None, w: int | None = None, budget: int = 10**6) -> dict:
    """Compare covering numbers of ``pi_n(S)`` with those of S in the dynamical metric.

    Checks, with certified brackets on both sides,

    1. ``#(pi_n S, max, eps) <= #(S, tau_n, eps)``
    2. ``#(S, tau_n, 8 eps) <= #(pi_{-(m-1)}^{n+m} S, max, eps)`` where ``2^(-m+2) < eps``.

    ``tau`` is truncated at radius ``w``; the neglected tail ``2^(1-w)`` is
    charged against the ball radius in (2) so the upper bound stays valid for
    the untruncated metric.
    """
    eps = 2.0**-j
    if m is None:
        m = 1
        while 2.0 ** (-m + 2) >= eps:
            m += 1
    elif 2.0 ** (-m + 2) >= eps:
        raise ValueError("need 2^(-m+2) < eps")
    tail = lambda r: 2.0 ** (1 - r)
    if w is None:
        # smallest radius leaving a positive ball radius in (2), at least 2
        w = 2
        while 4 * eps - tail(w) <= 0:
            w += 1
    proj = enumerate_words(family, n, grid, budget)
    dyn = enumerate_words(family, n + 2 * w, grid, budget)
    tau = dynamical_tau_metric(n, w)

    proj_cov = covering_number(proj, j, grid)
    dyn_pack = separated_subset(dyn, eps, tau)
    ineq1 = dict(
        lhs_lower=proj_cov.lower, lhs_upper=proj_cov.upper,
        rhs_lower=dyn_pack, rhs_upper=greedy_cover(dyn, eps / 2, tau),
    )
    ineq1["verdict"] = _verdict(ineq1["lhs_lower"], ineq1["lhs_upper"], ineq1["rhs_lower"], ineq1["rhs_upper"])

    radius = 4 * eps - tail(w)
    ext_cells = family.cell_count(n + 2 * m, j, grid)
    ineq2 = dict(
        lhs_lower=separated_subset(dyn, 8 * eps, tau), lhs_upper=greedy_cover(dyn, radius, tau),
        rhs_lower=proj_cov.lower, rhs_upper=ext_cells,
    )
    ineq2["verdict"] = _verdict(ineq2["lhs_lower"], ineq2["lhs_upper"], ineq2["rhs_lower"], ineq2["rhs_upper"])
    return {
        "family": family.to_dict(), "n": n, "j": j, "epsilon": eps, "m": m, "w": w,
        "projection_count": proj_cov.upper, "dynamical_count_lower": dyn_pack,
        "projection_le_dynamical": ineq1, "dynamical_8eps_le_extended": ineq2,
        "passed": ineq1["verdict"] != "violated" and ineq2["verdict"] != "violated",
    }

"""Rate-distortion functions of block marginals on finite grid alphabets.

Rates are in bits per coordinate.  The distortion constraint for block length
n and norm p is ``E[(1/n) sum |X_k - Y_k|^p] <= eps^p``; for ``p = inf`` the
per-letter distortion is the max norm (``E max |X_k - Y_k| <= eps``).  The
reproduction alphabet is the support of the source marginal.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import pmap
from .model import WORD_BUDGET, BudgetError, DimensionError, MeasureSpec, SubshiftFamily, rng_for

TABLE_CAP = 10**7
BA_TOL = 1e-9
BA_GAP = 1e-3  # nats; accepted bound gap once the objective is stationary
BA_MAX_ITER = 10**4


class ConvergenceError(RuntimeError):
    """Blahut-Arimoto did not converge; ``last`` holds the final iterate."""

    def __init__(self, message: str, last: dict):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class JointPMF:
    """Joint law of (X, Y) on finite alphabets."""

    source: np.ndarray
    reproduction: np.ndarray
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.float64)
        if t.ndim != 2 or np.any(t < 0) or abs(t.sum() - 1.0) > 1e-12:
            raise ValueError("joint table must be nonnegative with total mass 1")
        if t.shape != (len(self.source), len(self.reproduction)):
            raise DimensionError("table shape does not match the alphabets")

    @classmethod
    def from_table(cls, table) -> "JointPMF":
        t = np.asarray(table, dtype=np.float64)
        return cls(np.arange(t.shape[0]), np.arange(t.shape[1]), t)

    @property
    def px(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @property
    def py(self) -> np.ndarray:
        return self.table.sum(axis=0)


def entropy(p) -> float:
    p = np.asarray(p, dtype=np.float64)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def mutual_information(joint: JointPMF | np.ndarray) -> float:
    """``sum p(x,y) log2 p(x,y) / (p(x) p(y))`` with zero-mass terms dropped."""
    if not isinstance(joint, JointPMF):
        joint = JointPMF.from_table(joint)
    t = joint.table
    outer = np.outer(joint.px, joint.py)
    m = t > 0
    return max(float((t[m] * np.log2(t[m] / outer[m])).sum()), 0.0)


def distortion_table(source, reproduction, p: float) -> np.ndarray:
    """Entry ``(x, y)`` is ``(1/n) sum |x_k - y_k|^p``, or ``max |x_k - y_k|`` for ``p = inf``."""
    X = np.atleast_2d(np.asarray(source, dtype=np.float64))
    Y = np.atleast_2d(np.asarray(reproduction, dtype=np.float64))
    if X.shape[1] != Y.shape[1]:
        raise DimensionError(f"source blocks have length {X.shape[1]}, reproduction {Y.shape[1]}")
    if len(X) * len(Y) > TABLE_CAP:
        raise BudgetError("distortion table", len(X) * len(Y), TABLE_CAP)
    diff = np.abs(X[:, None, :] - Y[None, :, :])
    if math.isinf(p):
        return diff.max(axis=2)
    return (diff**p).mean(axis=2)


# --------------------------------------------------------------------------
# Blahut-Arimoto
# --------------------------------------------------------------------------


@dataclass
class BAResult:
    rate: float  # bits per block
    distortion: float
    beta: float
    iterations: int


def _ba_fixed(px, d, beta, q, tol=BA_TOL, max_iter=BA_MAX_ITER) -> tuple[BAResult, np.ndarray]:
    """Alternating minimization at a fixed slope ``beta`` (nats per unit distortion).

    The bound gap ``max_y log c_y - sum_y q_y log c_y`` with ``c_y = q'_y / q_y``
    bounds the distance of the Lagrangian from its optimum.  Iteration stops
    when the gap is below ``tol``, or when the Lagrangian moves by less than
    ``tol`` and the gap is below ``BA_GAP``.  An iterate that exhausts the
    budget is accepted if its gap is below ``BA_GAP``; every iterate is a
    valid channel, so the reported rate can only overstate the optimum.
    """
    # warm start mixed with uniform mass so collapsed letters can regrow
    q = 0.99 * np.asarray(q, dtype=np.float64) + 0.01 / len(q)
    logq = np.log(q)
    gap, prev = math.inf, math.inf
    for it in range(1, max_iter + 1):
        a = logq[None, :] - beta * d
        amax = a.max(axis=1, keepdims=True)
        lse = amax[:, 0] + np.log(np.exp(a - amax).sum(axis=1))
        logQ = a - lse[:, None]
        w = px[:, None] * np.exp(logQ)
        qn = w.sum(axis=0)
        logqn = np.log(np.maximum(qn, 1e-300))
        logc = logqn - logq
        gap = float(logc.max() - (np.exp(logq) * logc).sum())
        logq = logqn
        obj = float((w * (logQ - logq[None, :])).sum()) + beta * float((w * d).sum())
        if gap < tol or (abs(prev - obj) < tol and gap < BA_GAP):
            break
        prev = obj
    else:
        if gap >= BA_GAP:
            raise ConvergenceError(f"no convergence at beta={beta} in {max_iter} iterations (gap {gap:.3g})",
                                   {"beta": beta, "gap": gap, "q": qn})
    D = float((w * d).sum())
    keep = qn > 0
    R = float((w[:, keep] * (logQ[:, keep] - logq[None, keep])).sum()) / math.log(2)
    return BAResult(max(R, 0.0), D, beta, it), qn


def blahut_arimoto(px, d, target: float, tol: float = BA_TOL, max_iter: int = BA_MAX_ITER) -> BAResult:
    """Rate (bits per block) at distortion ``target`` for source ``px`` and distortion matrix ``d``.

    The Lagrange multiplier is bisected; when the target falls on a linear
    stretch of the curve the chord between the bracketing solutions is
    returned, which time sharing achieves, so the rate is never below the
    true value by more than the solver tolerance.
    """
    px = np.asarray(px, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    keep = px > 0
    px, d = px[keep] / px[keep].sum(), d[keep]
    dmax = float((px[:, None] * d).sum(axis=0).min())
    if target < 0:
        raise ValueError("target distortion must be nonnegative")
    if target >= dmax:
        return BAResult(0.0, dmax, 0.0, 0)
    dmin = float((px * d.min(axis=1)).sum())
    if target < dmin - tol:
        raise ValueError(f"target {target} below the least achievable distortion {dmin}")
    if target <= dmin + tol and np.all(d.min(axis=1) == 0) and np.all((d == 0).sum(axis=1) == 1):
        # zero distortion with a unique exact reproduction: Y = X
        return BAResult(entropy(px), dmin, math.inf, 0)
    q = np.full(d.shape[1], 1.0 / d.shape[1])
    lo = BAResult(0.0, dmax, 0.0, 0)
    beta = 1.0
    total = 0
    while True:
        hi, q = _ba_fixed(px, d, beta, q, tol, max_iter)
        total += hi.iterations
        if hi.distortion <= target:
            break
        lo = hi
        beta *= 2.0
        if beta > 1e12:
            raise ConvergenceError("multiplier search diverged", {"beta": beta, "distortion": hi.distortion})
    qs = q
    for _ in range(200):
        if abs(hi.distortion - target) <= tol or abs(hi.rate - lo.rate) <= tol:
            break
        mid = 0.5 * (lo.beta + hi.beta)
        r, qs = _ba_fixed(px, d, mid, qs, tol, max_iter)
        total += r.iterations
        if r.distortion <= target:
            hi = r
        else:
            lo = r
    if hi.distortion >= target - tol or lo.distortion == hi.distortion:
        return BAResult(hi.rate, hi.distortion, hi.beta, total)
    w = (lo.distortion - target) / (lo.distortion - hi.distortion)
    return BAResult(w * hi.rate + (1 - w) * lo.rate, target, hi.beta, total)


# --------------------------------------------------------------------------
# curves
# --------------------------------------------------------------------------


@dataclass
class RDPoint:
    epsilon: float
    rate: float
    distortion: float
    iterations: int
    beta: float
    n: int


@dataclass
class RDCurve:
    p: float
    points: list = field(default_factory=list)  # inf over the schedule, sorted by epsilon
    per_n: dict = field(default_factory=dict)  # n -> list of RDPoint
    inf_over_n: bool = True
    capped: list = field(default_factory=list)  # block lengths skipped by the table cap

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([pt.epsilon for pt in self.points])

    @property
    def rates(self) -> np.ndarray:
        return np.array([pt.rate for pt in self.points])

    def rate_at(self, eps: float) -> float:
        """Conservative evaluation: the rate at the smallest tabulated epsilon ``>= eps``."""
        E = self.epsilons
        idx = np.flatnonzero(E >= eps - 1e-15)
        if len(idx) == 0:
            if len(E) and self.points[-1].rate == 0.0:
                return 0.0
            raise ValueError(f"epsilon {eps} outside the tabulated range up to {E.max() if len(E) else None}")
        return float(self.points[idx[0]].rate)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p"] = "inf" if math.isinf(self.p) else self.p
        d["per_n"] = {str(k): [asdict(x) for x in v] for k, v in self.per_n.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=float)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["n", "p", "epsilon", "rate", "achieved_distortion", "iterations"])
            for n in sorted(self.per_n):
                for pt in self.per_n[n]:
                    wr.writerow([n, self.p, repr(pt.epsilon), repr(pt.rate), repr(pt.distortion), pt.iterations])


def block_source(measure: MeasureSpec, n: int, p: float, budget: int = WORD_BUDGET):
    words, probs = measure.block_pmf(n, budget)
    if len(words) ** 2 > TABLE_CAP:
        raise BudgetError(f"joint table at n={n}", len(words) ** 2, TABLE_CAP)
    return words, probs, distortion_table(words, words, p)


def rd_function(measure: MeasureSpec, ns: Sequence[int], p: float, epsilons: Sequence[float],
                budget: int = WORD_BUDGET, workers: int = 1, tol: float = BA_TOL) -> RDCurve:
    """``R(eps) = inf_n R(n, eps) / n`` over the block-length schedule.

    Block lengths whose joint table would exceed the cap are skipped and listed
    in ``capped``; at least one must fit.
    """
    epsilons = sorted(float(e) for e in epsilons)
    curve = RDCurve(p)
    sources = {}
    for n in sorted(ns):
        try:
            sources[n] = block_source(measure, n, p, budget)
        except BudgetError:
            curve.capped.append(n)
    if not sources:
        raise BudgetError("every block length", min(ns), TABLE_CAP)
    jobs = [(n, e) for n in sources for e in epsilons]

    def run(job):
        n, e = job
        _, probs, d = sources[n]
        target = e if math.isinf(p) else e**p
        r = blahut_arimoto(probs, d, target, tol)
        return RDPoint(e, r.rate / n, r.distortion, r.iterations, r.beta, n)

    results = pmap(run, jobs, workers)
    for (n, _), pt in zip(jobs, results):
        curve.per_n.setdefault(n, []).append(pt)
    for i, e in enumerate(epsilons):
        best = min((curve.per_n[n][i] for n in sources), key=lambda pt: (pt.rate, pt.n))
        curve.points.append(best)
    # enforce monotonicity against solver noise
    for i in range(len(curve.points) - 2, -1, -1):
        if curve.points[i].rate < curve.points[i + 1].rate:
            curve.points[i].rate = curve.points[i + 1].rate
    return curve


def thm_main_bound(curve: RDCurve, eps: float, L: float, alpha: float, p: float) -> float:
    """Lower bound on the compression rate of an ``(L, alpha)``-Hölder decoder with error ``eps``.

    ``R(((L^p / 2^(p alpha)) + eps^(p (1 - alpha)))^(1/p) eps^alpha) / log2 ceil(1/eps)``;
    for ``p = inf`` the ``p = 1`` form is used with an ``L^1`` curve, since the
    max norm dominates the normalized ``L^1`` norm.
    """
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    q = 1.0 if math.isinf(p) else p
    if curve.p != q:
        raise ValueError(f"bound at p={p} needs an L^{q} rate-distortion curve, got p={curve.p}")
    arg = ((L**q / 2 ** (q * alpha)) + eps ** (q * (1 - alpha))) ** (1 / q) * eps**alpha
    return curve.rate_at(arg) / math.log2(math.ceil(1 / eps))


def rd_dimension(curve: RDCurve) -> dict:
    """Slope of ``R`` against ``log2(1/eps)`` at the smallest tabulated epsilons, with a regression."""
    if len(curve.points) < 2:
        raise ValueError("need at least two points")
    x = -np.log2(curve.epsilons)
    y = curve.rates
    if np.all(y == 0):
        return {"value": 0.0, "endpoint": 0.0, "lsq": 0.0}
    end = float((y[0] - y[1]) / (x[0] - x[1]))
    lsq = float(np.polyfit(x, y, 1)[0])
    return {"value": max(end, 0.0), "endpoint": end, "lsq": lsq}


def check_support(measure: MeasureSpec, family: SubshiftFamily, n: int, samples: int = 1000, seed: int = 0) -> None:
    """Reject the measure if a sampled window leaves the family."""
    x = measure.sample(n, samples, rng_for(seed, 4))
    for row in x:
        if not family.contains(row):
            raise ValueError(f"measure {measure.to_dict()} charges {row.tolist()} outside {family.to_dict()}")


def variational_estimate(measures: Sequence[MeasureSpec], family: SubshiftFamily, epsilons: Sequence[float],
                         p: float = 2.0, ns: Sequence[int] = (1,), budget: int = WORD_BUDGET,
                         workers: int = 1, seed: int = 0) -> dict:
    """Per-epsilon ``max_mu R_mu(eps) / log2(1/eps)`` over a measure battery."""
    window = max(max(ns), getattr(family, "window", 1)) * 3
    for mu in measures:
        check_support(mu, family, window, seed=seed)
    curves = [rd_function(mu, ns, p, epsilons, budget, workers) for mu in measures]
    eps = sorted(float(e) for e in epsilons)
    per_eps = []
    for i, e in enumerate(eps):
        vals = [c.points[i].rate / math.log2(1 / e) for c in curves]
        per_eps.append({"epsilon": e, "value": max(vals), "argmax": int(np.argmax(vals)), "values": vals})
    return {"family": family.to_dict(), "p": p, "per_eps": per_eps, "curves": [c.to_dict() for c in curves]}

import csv
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from analogcomp.dimension import (
    box_dimension_estimate,
    covering_number,
    default_schedules,
    dynamical_covering_check,
    greedy_cover,
    mbdim_estimate,
    mmdim_estimate,
    separated_subset,
)
from analogcomp.model import DyadicGrid, FullShift, ResolutionError, SparseNK, VanishingCubes, enumerate_words


def min_cover_bruteforce(points, eps):
    """Oracle: smallest number of sets of max-norm diameter < eps covering ``points``."""
    n = len(points)
    d = np.abs(points[:, None, :] - points[None, :, :]).max(axis=2)
    for size in range(1, n + 1):
        for labels in itertools.product(range(size), repeat=n):
            if len(set(labels)) < size:
                continue
            ok = all(d[a, b] < eps for a in range(n) for b in range(a + 1, n) if labels[a] == labels[b])
            if ok:
                return size
    return n


# --- covering numbers ----------------------------------------------------


@pytest.mark.parametrize("n,j", [(1, 3), (2, 2), (3, 1)])
def test_full_grid_cell_count(n, j):
    g = DyadicGrid(j)
    pts = np.array(list(itertools.product(g.points, repeat=n)))
    assert covering_number(pts, j, g).cells.count == 2 ** (j * n)


def test_three_points_two_cells():
    cov = covering_number(np.array([[0.0], [0.5], [1.0]]), 1, DyadicGrid(3))
    assert cov.cells.count == 2


def test_sparse_projection_thirteen_cells():
    g = DyadicGrid(4)
    W = enumerate_words(SparseNK(4, 1), 4, g)
    assert covering_number(W, 2, g).cells.count == 13


def test_resolution_error():
    with pytest.raises(ResolutionError):
        covering_number(np.zeros((1, 2)), 4, DyadicGrid(3))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=1, max_size=6, unique=True),
       st.integers(1, 3))
def test_packing_below_minimal_cover_below_greedy(raw, j):
    pts = np.array(raw, dtype=np.float64) / 8
    eps = 2.0**-j
    exact = min_cover_bruteforce(pts, eps)
    assert separated_subset(pts, eps) <= exact
    cov = covering_number(pts, j, DyadicGrid(3))
    assert cov.lower <= cov.upper


def test_greedy_cover_counts_balls():
    pts = np.array([[0.0], [0.25], [0.5], [1.0]])
    # centres are data points: {0, 0.25}, {0.25, 0.5}, {1}
    assert greedy_cover(pts, 0.25) == 3


# --- box dimension -------------------------------------------------------


def test_box_dimension_square():
    g = DyadicGrid(6)
    pts = np.array(list(itertools.product(g.points, repeat=2)))
    est = box_dimension_estimate(pts, range(2, 7), g)
    assert abs(est.value - 2) <= 0.01


def test_box_dimension_point():
    est = box_dimension_estimate(np.array([[0.25, 0.5]]), range(2, 6), DyadicGrid(6))
    assert est.value == 0


def test_box_dimension_sparse_projection():
    g = DyadicGrid(6)
    W = enumerate_words(SparseNK(4, 1), 4, g)
    est = box_dimension_estimate(W, range(2, 6), g)
    assert abs(est.value - 1) <= 0.1


def test_box_dimension_needs_three_scales():
    with pytest.raises(ValueError):
        box_dimension_estimate(np.zeros((1, 1)), [2, 3], DyadicGrid(6))


# --- mean dimensions -----------------------------------------------------


def test_mmdim_sparse():
    est = mmdim_estimate(SparseNK(4, 1), [4, 8, 12], range(2, 7), DyadicGrid(6))
    assert abs(est.value - 0.25) <= 0.03


def test_mbdim_sparse():
    est = mbdim_estimate(SparseNK(4, 1), [4, 8, 12], range(2, 7), DyadicGrid(6))
    assert abs(est.value - 0.25) <= 0.05


def test_mmdim_full_binary_is_one_over_j():
    est = mmdim_estimate(FullShift((0.0, 1.0)), [1, 2, 3], range(1, 7), DyadicGrid(6))
    for j, v in zip(est.js, est.per_eps):
        assert v == 1 / j


def test_mmdim_full_grid():
    est = mmdim_estimate(FullShift(), [1, 2, 3], range(2, 7), DyadicGrid(6))
    assert abs(est.value - 1) <= 0.01


def test_mbdim_full_binary_zero():
    est = mbdim_estimate(FullShift((0.0, 1.0)), [1, 2, 3], range(2, 7), DyadicGrid(6))
    assert abs(est.value) <= 0.05


def test_vanishing_cubes_ordering():
    fam = VanishingCubes(6)
    g = DyadicGrid(6)
    mm = mmdim_estimate(fam, *default_schedules(fam, g, "mmdim"), g)
    mb = mbdim_estimate(fam, *default_schedules(fam, g, "mbdim"), g)
    assert mm.value < mb.value - 0.3
    assert all(a > b for a, b in zip(mm.per_eps, mm.per_eps[1:]))


def test_mmdim_not_above_mbdim_sparse():
    g = DyadicGrid(6)
    fam = SparseNK(3, 1)
    mm = mmdim_estimate(fam, [3, 6, 9], range(2, 7), g)
    mb = mbdim_estimate(fam, [3, 6, 9], range(2, 7), g)
    assert mm.value <= mb.value + 1e-12


def test_estimate_serialization(tmp_path):
    est = mmdim_estimate(SparseNK(4, 1), [4, 8], range(2, 5), DyadicGrid(4))
    d = json.loads(est.to_json())
    assert d["kind"] == "mmdim" and d["value"] == est.value
    path = tmp_path / "e.csv"
    est.write_csv(path, "sparse:N=4,K=1")
    rows = list(csv.DictReader(path.open()))
    assert set(rows[0]) == {"family", "n", "j", "count_method", "count", "h_value"}
    assert len(rows) == 2 * 3


def test_workers_do_not_change_estimate():
    a = mmdim_estimate(SparseNK(4, 1), [4, 8, 12], range(2, 7), DyadicGrid(6), workers=1)
    b = mmdim_estimate(SparseNK(4, 1), [4, 8, 12], range(2, 7), DyadicGrid(6), workers=4)
    assert a.to_json() == b.to_json()


# --- dynamical covering --------------------------------------------------


def test_dynamical_check_binary():
    rep = dynamical_covering_check(FullShift((0.0, 1.0)), 3, 1, DyadicGrid(1))
    first = rep["projection_le_dynamical"]
    assert first["lhs_upper"] == 8
    assert first["verdict"] != "violated"
    assert rep["dynamical_8eps_le_extended"]["verdict"] != "violated"
    assert rep["passed"]


def test_dynamical_check_single_trajectory():
    rep = dynamical_covering_check(FullShift((0.0,)), 2, 1, DyadicGrid(1))
    first = rep["projection_le_dynamical"]
    assert first["lhs_upper"] == first["rhs_upper"] == 1

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from analogcomp.model import (
    Block,
    BudgetError,
    DimensionError,
    DyadicGrid,
    Empirical,
    FullShift,
    HolderSpec,
    ProductIID,
    ReciprocalAlphabet,
    ShiftAverageProduct,
    SparseNK,
    VanishingCubes,
    enumerate_words,
    family_from_dict,
    measure_from_dict,
    norm_distance,
    read_blocks_csv,
    sample_windows,
    support_size,
    tau_distance,
    write_blocks_csv,
)


def brute_words(family, n, grid):
    """Oracle: filter the full grid product by membership."""
    pts = grid.points
    return sorted(w for w in itertools.product(pts, repeat=n) if family.contains(np.array(w)))


# --- distances -----------------------------------------------------------


def test_norm_distance_max():
    assert norm_distance((0, 0), (1, 1), math.inf) == 1


def test_norm_distance_normalized_l1():
    assert norm_distance((1, 0), (0, 0), 1) == 0.5


def test_norm_distance_length_mismatch():
    with pytest.raises(DimensionError):
        norm_distance((0, 0), (0, 0, 0))


@given(st.lists(st.floats(0, 1), min_size=1, max_size=8), st.sampled_from([1.0, 2.0, 3.0]))
def test_norm_distance_bounded_by_max(xs, p):
    x = np.array(xs)
    y = np.zeros_like(x)
    assert norm_distance(x, y, p) <= norm_distance(x, y, math.inf) + 1e-12


def test_tau_distance_examples():
    assert tau_distance(np.zeros(5), np.zeros(5)) == 0
    x = np.zeros(5)
    x[2] = 1
    assert tau_distance(x, np.zeros(5)) == 1
    assert tau_distance(np.ones(5), np.zeros(5)) == 2.5


def test_support_size():
    assert support_size((0, 0, 0)) == (0, ())
    assert support_size((0.5, 0, 0.25)) == (2, (0, 2))


# --- grid ----------------------------------------------------------------


def test_grid_quantize_and_check():
    g = DyadicGrid(2)
    assert g.size == 4
    assert len(g.points) == 5
    np.testing.assert_array_equal(g.quantize([0.3, 0.9, 1.0]), [0.25, 0.75, 1.0])
    assert g.on_grid([0.25, 0.5])
    assert not g.on_grid([0.3])


def test_block_csv_roundtrip(tmp_path):
    words = np.array([[0, 0.125, 1], [0.5, 0.75, 0.25]])
    path = tmp_path / "w.csv"
    write_blocks_csv(path, words, 3)
    np.testing.assert_array_equal(read_blocks_csv(path, 3), words)
    b = Block.of([0.25, 0.5], bits=2)
    assert Block.from_csv_row(b.to_csv_row(), 2).to_csv_row() == b.to_csv_row()


# --- families ------------------------------------------------------------


def test_contains_examples():
    s = SparseNK(4, 1)
    assert s.contains(np.array([0.5, 0, 0, 0, 0.25, 0, 0, 0]))
    assert not s.contains(np.array([0.5, 0.25, 0, 0]))
    assert FullShift((0.0, 1.0)).contains(np.array([0, 1, 1, 0]))


def test_enumerate_examples():
    assert len(enumerate_words(FullShift((0.0, 1.0)), 3, DyadicGrid(1))) == 8
    assert len(enumerate_words(SparseNK(4, 1), 4, DyadicGrid(2))) == 17
    words = enumerate_words(SparseNK(2, 1), 2, DyadicGrid(1))
    assert sorted(map(tuple, words)) == [(0, 0), (0, 0.5), (0, 1), (0.5, 0), (1, 0)]


@pytest.mark.parametrize("family,n,b", [
    (SparseNK(4, 1), 5, 1),
    (SparseNK(3, 2), 4, 1),
    (SparseNK(2, 1), 4, 2),
    (VanishingCubes(3), 4, 1),
    (FullShift((0.0, 1.0)), 3, 2),
])
def test_enumerate_matches_membership_filter(family, n, b):
    g = DyadicGrid(b)
    got = [tuple(w) for w in enumerate_words(family, n, g)]
    assert got == brute_words(family, n, g)
    assert family.count_words(n, g) == len(got)


@pytest.mark.parametrize("family,n,j,b", [
    (SparseNK(4, 1), 5, 1, 2),
    (SparseNK(3, 2), 4, 2, 2),
    (VanishingCubes(3), 5, 1, 2),
    (VanishingCubes(4), 4, 2, 2),
    (FullShift(), 3, 2, 3),
])
def test_cell_count_matches_enumeration(family, n, j, b):
    g = DyadicGrid(b)
    W = enumerate_words(family, n, g)
    assert family.cell_count(n, j, g) == len(np.unique(g.cell_index(W, j), axis=0))


def test_enumerate_budget():
    with pytest.raises(BudgetError):
        enumerate_words(FullShift(), 8, DyadicGrid(6), budget=1000)


def test_reciprocal_alphabet_on_grid():
    fam = ReciprocalAlphabet(8, bits=4)
    g = DyadicGrid(4)
    letters = fam.alphabet
    assert all(g.on_grid([v]) for v in letters)
    assert len(set(letters)) == len(letters)


@pytest.mark.parametrize("family", [SparseNK(4, 1), FullShift(), FullShift((0.0, 1.0)), VanishingCubes(6),
                                    ReciprocalAlphabet(5)])
def test_family_serialization(family):
    assert family_from_dict(family.to_dict()) == family


# --- measures ------------------------------------------------------------


def test_sample_windows_reproducible():
    mu = ProductIID.uniform([0.0, 1.0])
    a = sample_windows(mu, 4, 1, seed=7)
    b = sample_windows(mu, 4, 1, seed=7)
    assert a.tobytes() == b.tobytes()
    assert set(np.unique(a)) <= {0.0, 1.0}


def test_sample_windows_marginal():
    mu = ProductIID.uniform([0.0, 1.0])
    x = sample_windows(mu, 1, 10**5, seed=0)
    assert abs(x[:, 0].mean() - 0.5) < 0.01


def test_shift_average_support_and_pmf():
    mu = ShiftAverageProduct(4, 1, 3)
    words, probs = mu.block_pmf(4)
    assert abs(probs.sum() - 1) < 1e-12
    fam = SparseNK(4, 1)
    assert all(fam.contains(w) for w in words)
    samples = sample_windows(mu, 8, 500, seed=1)
    assert all(fam.contains(w) for w in samples)


def test_shift_average_pmf_matches_sampling():
    mu = ShiftAverageProduct(4, 1, 3)
    words, probs = mu.block_pmf(2)
    x = sample_windows(mu, 2, 2 * 10**5, seed=3)
    zero_freq = np.mean(np.all(x == 0, axis=1))
    zero_prob = probs[np.all(words == 0, axis=1)].sum()
    assert abs(zero_freq - zero_prob) < 0.01


def test_product_pmf_is_product():
    mu = ProductIID([0.0, 1.0], [0.25, 0.75])
    words, probs = mu.block_pmf(2)
    table = {tuple(w): p for w, p in zip(words, probs)}
    assert table[(1.0, 1.0)] == pytest.approx(0.5625)
    assert table[(0.0, 1.0)] == pytest.approx(0.1875)


@pytest.mark.parametrize("mu", [ProductIID.uniform([0.0, 0.5, 1.0]), ShiftAverageProduct(4, 1, 3),
                                ProductIID.point_mass(0.25)])
def test_measure_serialization(mu):
    assert measure_from_dict(mu.to_dict()).to_dict() == mu.to_dict()


def test_empirical_measure():
    mu = Empirical(np.array([[0.0, 1.0], [0.0, 1.0], [1.0, 0.0]]), np.full(3, 1 / 3))
    words, probs = mu.block_pmf(2)
    assert dict(zip(map(tuple, words), probs)) == pytest.approx({(0.0, 1.0): 2 / 3, (1.0, 0.0): 1 / 3})


def test_holder_spec_roundtrip():
    h = HolderSpec("holder", math.inf, 3.5, 0.5)
    assert HolderSpec.from_dict(h.to_dict()) == h
    with pytest.raises(ValueError):
        HolderSpec("holder", 2.0, 1.0, 1.5)


@settings(max_examples=30)
@given(st.integers(1, 4), st.integers(1, 3))
def test_sparse_count_formula_small(N, n):
    K = 1
    g = DyadicGrid(1)
    fam = SparseNK(N, K)
    assert fam.count_words(n, g) == len(brute_words(fam, n, g))

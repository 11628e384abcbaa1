import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from analogcomp.codec import (
    AdmissibilityError,
    CodecPair,
    SparseCodec,
    SupportFamily,
    clip_extend,
    codec_from_dict,
    cube_quantizer,
    identity_codec,
    linear_random_codec,
    measure_error,
    peano_codec,
    signature,
    sparse_decode,
    sparse_encode,
    support_selector,
    verify_regularity,
)
from analogcomp.model import (
    DimensionError,
    DyadicGrid,
    FullShift,
    HolderSpec,
    ProductIID,
    ShiftAverageProduct,
    SparseNK,
    enumerate_words,
)

# --- support selection and signatures ------------------------------------


def test_support_selector_examples():
    assert support_selector((0, 0.5, 0, 0.25), 2) == (1, 3)
    assert support_selector((0, 0, 0.5, 0), 2) == (0, 2)
    assert support_selector((0, 0, 0, 0), 2) == (0, 1)


def test_support_selector_oversupported():
    with pytest.raises(AdmissibilityError):
        support_selector((0.5, 0.5, 0.5, 0), 2)


@pytest.mark.parametrize("window,size", [(4, 1), (4, 2), (8, 2), (6, 3)])
def test_signature_endpoints_and_order(window, size):
    fam = SupportFamily(window, size)
    members = fam.members()
    assert signature(members[0], fam) == 0.5
    assert signature(members[-1], fam) == 1.0
    sigs = [signature(A, fam) for A in members]
    assert all(a < b for a, b in zip(sigs, sigs[1:]))
    assert fam.separation() > 0


def test_signature_degenerate():
    fam = SupportFamily(3, 3)
    assert signature((0, 1, 2), fam) == 1.0


@settings(max_examples=50)
@given(st.integers(1, 10), st.data())
def test_rank_unrank(window, data):
    size = data.draw(st.integers(1, window))
    fam = SupportFamily(window, size)
    r = data.draw(st.integers(0, fam.count - 1))
    A = fam.unrank(r)
    assert fam.rank(A) == r
    assert fam.members()[r] == A


# --- sparse codec --------------------------------------------------------


@pytest.mark.parametrize("ell", [1, 2, 4])
def test_sparse_rate(ell):
    c = SparseCodec(4, 1, ell, Fraction(1, 2), 3)
    assert c.rate == Fraction(math.ceil(ell / 2) + 2, 4 * ell)
    assert c.rate <= Fraction(1, 8) + Fraction(3, 4 * ell)


@pytest.mark.parametrize("N,K,ell,alpha,b", [
    (4, 1, 1, Fraction(1, 2), 3),
    (4, 1, 2, Fraction(1, 2), 3),
    (3, 1, 2, Fraction(1, 3), 2),
    (3, 2, 1, Fraction(1, 2), 2),
    (4, 2, 1, Fraction(1, 3), 2),
])
def test_sparse_roundtrip_exhaustive(N, K, ell, alpha, b):
    c = SparseCodec(N, K, ell, alpha, b)
    W = enumerate_words(SparseNK(N, K), ell * N, DyadicGrid(b))
    np.testing.assert_array_equal(c.decode(c.encode(W)), W)


def test_sparse_zero_word():
    c = SparseCodec(4, 1, 1, Fraction(1, 2), 3)
    y = c.encode(np.zeros(4))
    assert y[-1] == signature((0,), c.supports)
    np.testing.assert_array_equal(c.decode(y), np.zeros(4))


def test_sparse_zero_branch():
    c = SparseCodec(4, 1, 2, Fraction(1, 2), 3)
    y = np.full(c.k, 0.75)
    y[-1] = 0
    np.testing.assert_array_equal(c.decode(y), np.zeros(8))


def test_sparse_scatter_placement():
    c = SparseCodec(2, 1, 2, Fraction(1, 1), 3)
    assert c.curve is None and c.n == 4 and c.size == 2
    y = np.zeros(c.k)
    y[:2] = [0.25, 0.75]
    y[-1] = signature((0, 3), c.supports)
    np.testing.assert_array_equal(c.decode(y), [0.25, 0, 0, 0.75])


def test_sparse_off_family_maps_to_zero_code():
    c = SparseCodec(4, 1, 1, Fraction(1, 2), 3)
    np.testing.assert_array_equal(c.encode(np.array([0.5, 0.5, 0, 0])), np.zeros(c.k))


def test_sparse_rejects_unattainable_alpha():
    with pytest.raises(ValueError):
        SparseCodec(4, 1, 2, Fraction(2, 3), 3)


def test_wrapper_functions_agree():
    x = np.array([0, 0, 0.5, 0, 0, 0, 0.25, 0])
    y = sparse_encode(x, 4, 1, 2)
    np.testing.assert_array_equal(sparse_decode(y, 4, 1, 2), x)


def test_sparse_decoder_certified_exhaustively():
    c = SparseCodec(4, 1, 2, Fraction(1, 2), 2)
    pair = c.pair()
    cert = verify_regularity(pair.decode, pair.decoder_spec, c.code_domain(), mode="exhaustive")
    assert cert.certified
    assert cert.worst_ratio <= c.constants()["L_double_prime"]


def test_sparse_decoder_slice_exponent():
    fit = SparseCodec(4, 1, 2, Fraction(1, 2), 2).holder_fit()
    assert fit.alpha >= 0.45


def test_sparse_constants_finite_p():
    c = SparseCodec(4, 1, 2, Fraction(1, 2), 2, p=2.0)
    k = c.constants()
    d = c.d
    assert k["L_tilde"] == pytest.approx(k["L_psi"] * ((d + 1) / d) ** 0.25)
    assert k["L_double_prime"] == pytest.approx(math.sqrt(8) * k["L_prime"])
    cert = verify_regularity(c.decode, c.pair().decoder_spec, c.code_domain())
    assert cert.certified


def test_sparse_descriptor_roundtrip():
    pair = SparseCodec(4, 1, 2, Fraction(1, 2), 3).pair()
    d = json.loads(pair.to_json())
    again = codec_from_dict(d)
    assert again.to_json() == pair.to_json()


# --- quantizer, peano, identity -----------------------------------------


def test_cube_quantizer():
    c, size = cube_quantizer(1, 1)
    assert c(np.array([0.3]))[0] == 0.25
    assert c(np.array([1.0]))[0] == 0.75
    assert size == 2
    assert cube_quantizer(3, 2)[1] == 64


@pytest.mark.parametrize("n,alpha,b", [(2, Fraction(1, 2), 3), (4, Fraction(1, 2), 2), (3, Fraction(1, 3), 2)])
def test_peano_roundtrip_on_grid(n, alpha, b):
    c = peano_codec(n, alpha, b)
    W = enumerate_words(FullShift(), n, DyadicGrid(b))
    np.testing.assert_array_equal(c.roundtrip(W), W)
    assert c.rate == alpha


def test_peano_rejects_bad_length():
    with pytest.raises(DimensionError):
        peano_codec(3, Fraction(1, 2), 2)


# --- linear codec --------------------------------------------------------


def test_linear_codec_injective_for_most_seeds():
    fam, g = SparseNK(4, 1), DyadicGrid(2)
    W = enumerate_words(fam, 4, g)
    ok = 0
    for seed in range(100):
        c = linear_random_codec(fam, 4, 3, seed, g)
        if c.params["injective"]:
            ok += 1
            np.testing.assert_array_equal(c.roundtrip(W), W)
    assert ok >= 95


def test_linear_codec_image_in_unit_cube():
    c = linear_random_codec(SparseNK(4, 1), 4, 3, 0, DyadicGrid(2))
    x = enumerate_words(FullShift(), 4, DyadicGrid(1))
    y = c.encode(x)
    assert y.min() >= -1e-12 and y.max() <= 1 + 1e-12


def test_linear_codec_rejects_k_ge_n():
    with pytest.raises(DimensionError):
        linear_random_codec(SparseNK(4, 1), 4, 4, 0, DyadicGrid(2))


def test_linear_codec_seeded():
    a = linear_random_codec(SparseNK(4, 1), 4, 3, 7, DyadicGrid(2))
    b = linear_random_codec(SparseNK(4, 1), 4, 3, 7, DyadicGrid(2))
    assert a.to_json() == b.to_json()


def test_linear_encoder_certified_linear():
    c = linear_random_codec(SparseNK(4, 1), 4, 3, 0, DyadicGrid(2))
    pts = enumerate_words(FullShift(), 4, DyadicGrid(1))
    assert verify_regularity(c.encode, c.encoder_spec, pts).certified


# --- extension and regularity --------------------------------------------


def test_clip_extend():
    pts = np.array([[0.0], [1.0]])
    g = clip_extend(pts, np.array([[1.2], [-0.5]]))
    np.testing.assert_array_equal(g(pts), [[1.0], [0.0]])
    np.testing.assert_array_equal(g(np.array([[0.25]])), [[1.0]])
    const = clip_extend(np.array([[0.5]]), np.array([[0.3, 0.7]]))
    np.testing.assert_array_equal(const(np.array([[0.0], [1.0]])), [[0.3, 0.7], [0.3, 0.7]])


def test_clip_extend_keeps_total_decoder():
    pts = DyadicGrid(3).points[:, None]
    g = clip_extend(pts, pts**2)
    np.testing.assert_array_equal(g(pts), pts**2)


def test_clip_extend_empty():
    with pytest.raises(ValueError):
        clip_extend(np.zeros((0, 1)), np.zeros((0, 1)))


def test_verify_identity():
    pts = DyadicGrid(3).points[:, None]
    cert = verify_regularity(lambda x: x, HolderSpec("holder", math.inf, 1.0, 1.0), pts)
    assert cert.certified


def test_verify_step_violation():
    pts = DyadicGrid(3).points[:, None]
    step = lambda x: (np.asarray(x) >= 0.5).astype(float)
    cert = verify_regularity(step, HolderSpec("lipschitz", math.inf, 1.0, 1.0), pts)
    assert not cert.certified
    a, b = cert.violation
    assert abs(a[0] - b[0]) == 0.125 and {a[0], b[0]} == {0.375, 0.5}


def test_verify_sampled_mode_seeded():
    pts = DyadicGrid(4).points[:, None]
    spec = HolderSpec("holder", math.inf, 1.0, 0.5)
    a = verify_regularity(np.sqrt, spec, pts, mode="sampled", seed=3, pair_budget=500)
    b = verify_regularity(np.sqrt, spec, pts, mode="sampled", seed=3, pair_budget=500)
    assert a.to_dict() == b.to_dict() and a.certified


# --- error functionals ---------------------------------------------------


@pytest.mark.parametrize("mode,kw", [("mismatch-prob", {}), ("excess-prob", {"eps": 0.1}), ("mean-Lp", {"p": 2.0})])
def test_identity_codec_zero_error(mode, kw):
    e = measure_error(identity_codec(2), ProductIID.uniform([0.0, 0.5, 1.0]), 2, mode, **kw)
    assert e.value == 0 and e.exact


@pytest.mark.parametrize("ell", [1, 2])
def test_sparse_codec_zero_mismatch(ell):
    c = SparseCodec(4, 1, ell, Fraction(1, 2), 3).pair()
    e = measure_error(c, ShiftAverageProduct(4, 1, 3), 4 * ell, "mismatch-prob")
    assert e.value == 0 and e.exact


def test_constant_decoder_l1_error():
    zero = lambda x: np.zeros_like(np.atleast_2d(np.asarray(x, dtype=float)))
    c = CodecPair("zero", 1, 1, zero, zero, HolderSpec("borel"), HolderSpec("lipschitz", 1.0, 1.0, 1.0), {})
    e = measure_error(c, ProductIID.uniform([0.0, 1.0]), 1, "mean-Lp", p=1.0)
    assert e.value == 0.5


def test_monte_carlo_error_matches_exact_and_workers():
    zero = lambda x: np.zeros_like(np.atleast_2d(np.asarray(x, dtype=float)))
    c = CodecPair("zero", 1, 1, zero, zero, HolderSpec("borel"), HolderSpec("lipschitz", 1.0, 1.0, 1.0), {})
    mu = ProductIID.uniform([0.0, 1.0])
    a = measure_error(c, mu, 1, "mismatch-prob", samples=20000, budget=1, workers=1)
    b = measure_error(c, mu, 1, "mismatch-prob", samples=20000, budget=1, workers=4)
    assert a == b and not a.exact
    assert abs(a.value - 0.5) <= a.half_width * 2

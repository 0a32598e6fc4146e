import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from generators import periodic, phrase_isolated
from oracles import dense_measures, dense_rp, naive_bounding_counts
from recurnlp.corpus import from_surfaces, tokenize
from recurnlp.errors import InsufficientDataError, RangeError, UndefinedInputError
from recurnlp.ngram import (
    BoundingCounts,
    build_profile,
    chi_square_from_rr,
    chi_square_uniform,
    compare_paths,
    det_from_counts,
    ent_from_counts,
    max_bounding_counts,
    ngram_entropy,
    rr_from_unigrams,
    write_profile_csv,
)
from recurnlp.recurrence import build_rp, recurrence_rate

word_lists = st.lists(st.sampled_from("abcdef"), min_size=1, max_size=40)


def words(s):
    return tokenize(s)


# -- profiles -------------------------------------------------------------------

def test_profile_bigrams():
    assert build_profile(words("a b a b"), 2).freq == {("a", "b"): 2, ("b", "a"): 1}


def test_profile_unigrams():
    p = build_profile(words("a a b"), 1)
    assert p.freq == {("a",): 2, ("b",): 1}
    assert p.b == 2


def test_profile_full_length():
    seq = words("x y z")
    p = build_profile(seq, 3)
    assert p.freq == {("x", "y", "z"): 1}


def test_profile_errors():
    with pytest.raises(InsufficientDataError):
        build_profile(words("a b"), 3)
    with pytest.raises(RangeError):
        build_profile(words("a b"), 0)


@settings(max_examples=100, deadline=None)
@given(word_lists, st.integers(1, 5))
def test_profile_total(ws, k):
    if k > len(ws):
        return
    p = build_profile(ws, k)
    assert sum(p.freq.values()) == len(ws) - k + 1 == p.total
    assert min(p.freq.values()) >= 1


def test_profile_csv():
    text = write_profile_csv(build_profile(words("a b a b"), 2))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows == [["ngram", "count"], ["a b", "2"], ["b a", "1"]]


# -- RR -----------------------------------------------------------------------

def test_rr_unigram_alternating():
    seq = words("a b a b")
    assert rr_from_unigrams(build_profile(seq, 1)) == 0.25 == recurrence_rate(build_rp(seq))


def test_rr_uniform_counts():
    for b, n in [(4, 20), (5, 100), (1, 7)]:
        seq = from_surfaces([str(i % b) for i in range(n)])
        assert rr_from_unigrams(build_profile(seq, 1)) == pytest.approx(1 / b - 1 / n, abs=1e-15)


def test_rr_all_distinct():
    assert rr_from_unigrams(build_profile(words("p q r s"), 1)) == 0.0


@settings(max_examples=200, deadline=None)
@given(word_lists)
def test_rr_paths_agree(ws):
    seq = from_surfaces(ws)
    p = build_profile(seq, 1)
    assert rr_from_unigrams(p) == recurrence_rate(build_rp(seq, 1))
    probs = np.array(list(p.freq.values())) / p.n
    assert rr_from_unigrams(p) == pytest.approx(float(np.sum(probs**2)) - 1 / p.n, abs=1e-12)


# -- maximally bounding n-grams ------------------------------------------------

@pytest.mark.parametrize(
    "text, expected",
    [
        ("a b c a b c", {3: 2}),
        ("a b x c d e y c d e z a b", {2: 2, 3: 2}),
        ("a a a", {2: 2}),
        ("a b c d", {}),
        ("a", {}),
    ],
)
def test_bounding_examples(text, expected):
    assert max_bounding_counts(words(text)).det_k == expected


def test_bounding_counts_properties():
    bc = max_bounding_counts(words("a b x c d e y c d e z a b"))
    assert bc.n_l == 4
    assert bc.points_on_lines == 10


@settings(max_examples=300, deadline=None)
@given(word_lists)
def test_bounding_matches_naive(ws):
    bc = max_bounding_counts(from_surfaces(ws))
    assert bc.det_k == naive_bounding_counts(ws)
    assert all(v >= 0 and v % 2 == 0 for v in bc.det_k.values())


@settings(max_examples=200, deadline=None)
@given(word_lists)
def test_discounting_bounded_by_points(ws):
    seq = from_surfaces(ws)
    bc = max_bounding_counts(seq)
    assert bc.points_on_lines <= build_rp(seq, 1).n_points


def test_bounding_accepts_ids_and_strings():
    assert max_bounding_counts([0, 1, 2, 0, 1, 2]).det_k == {3: 2}
    assert max_bounding_counts(["a", "b", "a", "b"]).det_k == max_bounding_counts([5, 9, 5, 9]).det_k


def test_bounding_long_text_matches_naive():
    rng = np.random.default_rng(11)
    ws = rng.integers(0, 3, 120).tolist()
    assert max_bounding_counts(ws).det_k == naive_bounding_counts(ws)


# -- DET and ENT ----------------------------------------------------------------

@pytest.mark.parametrize(
    "text, det",
    [("a b c a b c", 1.0), ("a a a", 4 / 6), ("a b x c d e y c d e z a b", 1.0)],
)
def test_det_from_counts_examples(text, det):
    seq = words(text)
    assert det_from_counts(max_bounding_counts(seq), build_profile(seq, 1)) == pytest.approx(det, abs=1e-15)


def test_det_undefined_without_recurrence():
    seq = words("a b c")
    with pytest.raises(UndefinedInputError):
        det_from_counts(max_bounding_counts(seq), build_profile(seq, 1))


def test_ent_examples():
    assert ent_from_counts(BoundingCounts({4: 6})) == 0.0
    assert ent_from_counts(BoundingCounts({2: 2, 3: 2})) == pytest.approx(math.log(2), abs=1e-15)
    ref = -(0.75 * math.log(0.75) + 0.25 * math.log(0.25))
    assert ent_from_counts(BoundingCounts({2: 6, 3: 2})) == pytest.approx(ref, abs=1e-15)
    assert round(ref, 4) == 0.5623
    with pytest.raises(UndefinedInputError):
        ent_from_counts(BoundingCounts({}))


def test_ent_matches_plot_on_thirteen_tokens():
    c = compare_paths(words("a b x c d e y c d e z a b"))
    assert c.det_ent_equal
    assert c.ent_ngram == c.ent_rp == pytest.approx(math.log(2))


def test_phrase_isolated_paths_agree(rng):
    for _ in range(100):
        c = compare_paths(from_surfaces(phrase_isolated(rng)))
        assert c.rr_equal
        assert c.det_ent_equal, c.as_dict()


def test_periodic_strings_diverge_measurably():
    c = compare_paths(words("a a a a"))
    assert c.lines_rp == {2: 2, 3: 2}
    assert c.det_k == {3: 2}
    assert not c.det_ent_equal


def test_periodic_generator_shapes(rng):
    for _ in range(20):
        ws = periodic(rng)
        c = compare_paths(from_surfaces(ws))
        assert c.rr_equal
        ref = dense_measures(dense_rp(from_surfaces(ws).ids.tolist(), 1))
        assert c.det_rp == ref["det"]


# -- chi-square ---------------------------------------------------------------------

def test_chi_square_example():
    seq = words("a a b")
    p = build_profile(seq, 1)
    rr = rr_from_unigrams(p)
    assert rr == pytest.approx(2 / 9)
    assert chi_square_from_rr(rr, 3, 2) == pytest.approx(1 / 3, abs=1e-12)
    assert chi_square_uniform(p) == pytest.approx(1 / 3, abs=1e-12)


def test_chi_square_uniform_zero():
    seq = from_surfaces(list("abcd") * 5)
    p = build_profile(seq, 1)
    rr = rr_from_unigrams(p)
    assert rr == pytest.approx(1 / 4 - 1 / 20)
    assert chi_square_from_rr(rr, p.n, p.b) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(word_lists)
def test_chi_square_identity(ws):
    p = build_profile(from_surfaces(ws), 1)
    stat = chisquare(list(p.freq.values())).statistic
    assert chi_square_from_rr(rr_from_unigrams(p), p.n, p.b) == pytest.approx(stat, abs=1e-12 * max(1, p.n))
    assert chi_square_uniform(p) == pytest.approx(stat, abs=1e-12 * max(1, p.n))


def test_chi_square_range():
    with pytest.raises(RangeError):
        chi_square_from_rr(0.1, 0, 2)


# -- entropy --------------------------------------------------------------------------

def test_entropy_single_token():
    e = ngram_entropy(build_profile(words("a a a"), 1))
    assert e.shannon == 0.0 and e.n_types == 1


def test_entropy_two_types():
    e = ngram_entropy(build_profile(words("a b"), 1))
    assert e.shannon == pytest.approx(math.log(2))
    assert e.printed_form == pytest.approx(-math.log(2) / 2)


def test_entropy_aab():
    e = ngram_entropy(build_profile(words("a a b"), 1))
    ref = -(2 / 3 * math.log(2 / 3) + 1 / 3 * math.log(1 / 3))
    assert e.shannon == pytest.approx(ref, abs=1e-15)
    assert round(e.shannon, 4) == 0.6365
    assert e.printed_form == pytest.approx(-ref / 2)

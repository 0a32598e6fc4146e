import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import dense_cross, dense_rp
from recurnlp.corpus import from_surfaces, tokenize
from recurnlp.errors import (
    InsufficientDataError,
    OutOfVocabularyError,
    ParseError,
    RangeError,
    ShapeError,
)
from recurnlp.multiseries import (
    EmbeddingTable,
    TrajectoryMatrix,
    build_cross_rp,
    build_trajectory,
    joint_rp,
    load_embeddings,
    radius_for_target_rr,
    semantic_rp,
    thresholded_rr,
    zscore_columns,
)
from recurnlp.recurrence import RecurrencePlot, build_rp, rqa_measures

word_lists = st.lists(st.sampled_from("abcde"), min_size=1, max_size=25)


def traj_of(rows):
    rows = np.asarray(rows, dtype=float)
    return TrajectoryMatrix(rows, np.arange(rows.shape[0]), True)


def brute_rr(rows, radius):
    d = np.linalg.norm(rows[:, None, :] - rows[None, :, :], axis=-1)
    t = rows.shape[0]
    return (int(np.sum(d <= radius)) - t) / (t * t)


# -- cross and joint -------------------------------------------------------------

def test_cross_example():
    rp = build_cross_rp(tokenize("a b"), tokenize("b a b"))
    assert rp.points == {(0, 1), (1, 0), (1, 2)}
    assert rp.kind == "cross" and (rp.n_rows, rp.n_cols) == (2, 3)


def test_cross_disjoint():
    assert build_cross_rp(tokenize("a b"), tokenize("c d")).n_points == 0


def test_cross_matches_on_strings_not_ids():
    a = from_surfaces(["x", "y"])
    b = from_surfaces(["y", "x"])
    assert a.ids.tolist() == b.ids.tolist()
    assert build_cross_rp(a, b).points == {(0, 1), (1, 0)}


@settings(max_examples=100, deadline=None)
@given(word_lists, word_lists)
def test_cross_matches_dense(a, b):
    rp = build_cross_rp(from_surfaces(a), from_surfaces(b))
    m = dense_cross(a, b)
    assert rp.points == {(int(i), int(j)) for i, j in zip(*np.nonzero(m))}


@settings(max_examples=100, deadline=None)
@given(word_lists)
def test_cross_self_is_auto_theiler0(ws):
    seq = from_surfaces(ws)
    assert build_cross_rp(seq, seq).same_points(build_rp(seq, theiler=0))


def test_joint_laws_small():
    p = build_rp([0, 1, 0, 1, 1])
    q = build_rp([0, 0, 1, 1, 1])
    e = RecurrencePlot.empty(5, 5)
    assert joint_rp([p, p]).same_points(p)
    assert joint_rp([p, e]).n_points == 0
    j = joint_rp([p, q])
    assert j.points == p.points & q.points
    assert j.kind == "joint"


def test_joint_theiler_max():
    p = build_rp([0, 0, 0, 0], theiler=0)
    q = build_rp([0, 0, 0, 0], theiler=2)
    assert joint_rp([p, q]).theiler == 2


def test_joint_shape_mismatch():
    with pytest.raises(ShapeError):
        joint_rp([build_rp([0, 1]), build_rp([0, 1, 2])])


def test_measures_on_cross_plot():
    rp = build_cross_rp(tokenize("a b c d"), tokenize("z a b c"))
    m = rqa_measures(rp)
    assert m.maxline == 3 and m.det == 1.0
    assert np.isnan(m.trend)


# -- embeddings -----------------------------------------------------------------

def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_embeddings_plain(tmp_path):
    t = load_embeddings(write(tmp_path, "e.txt", "a 1 2 3 4\nb 0 0 0 1\nc 1.5 -2 3e-1 0\n"))
    assert t.dim == 4 and len(t) == 3
    assert t.vectors["c"].tolist() == [1.5, -2.0, 0.3, 0.0]


def test_load_embeddings_header(tmp_path):
    a = load_embeddings(write(tmp_path, "a.txt", "a 1 2 3 4\nb 0 0 0 1\nc 1 1 1 1\n"))
    b = load_embeddings(write(tmp_path, "b.txt", "3 4\na 1 2 3 4\nb 0 0 0 1\nc 1 1 1 1\n"))
    assert a.dim == b.dim
    assert all(np.array_equal(a.vectors[w], b.vectors[w]) for w in "abc")


def test_load_embeddings_short_row(tmp_path):
    with pytest.raises(ParseError) as e:
        load_embeddings(write(tmp_path, "e.txt", "a 1 2 3 4\nb 1 2 3\n"))
    assert e.value.line == 2


def test_load_embeddings_non_numeric(tmp_path):
    with pytest.raises(ParseError) as e:
        load_embeddings(write(tmp_path, "e.txt", "a 1 2\nb 1 x\n"))
    assert e.value.line == 2


def test_load_embeddings_header_count(tmp_path):
    with pytest.raises(ParseError):
        load_embeddings(write(tmp_path, "e.txt", "5 2\na 1 2\n"))


# -- trajectories -------------------------------------------------------------------

TABLE = EmbeddingTable(
    2,
    {
        "a": np.array([1.0, 5.0]),
        "b": np.array([2.0, 5.0]),
        "c": np.array([4.0, 5.0]),
    },
)


def test_trajectory_all_found():
    tr = build_trajectory(tokenize("a b c a"), TABLE)
    assert tr.t == 4
    assert tr.index_map.tolist() == [0, 1, 2, 3]
    assert np.allclose(tr.rows.mean(axis=0), 0)
    assert np.allclose(tr.rows[:, 0].std(), 1)
    assert np.all(tr.rows[:, 1] == 0)


def test_trajectory_skip():
    tr = build_trajectory(tokenize("a x b y c"), TABLE)
    assert tr.t == 3
    assert tr.index_map.tolist() == [0, 2, 4]


def test_trajectory_error_policy():
    with pytest.raises(OutOfVocabularyError) as e:
        build_trajectory(tokenize("a b zz c"), TABLE, oov_policy="error")
    assert e.value.token == "zz" and e.value.position == 2
    assert "zz" in str(e.value)


def test_zscore_population():
    m = np.array([[1.0, 3.0], [3.0, 3.0]])
    z = zscore_columns(m)
    assert z.tolist() == [[-1.0, 0.0], [1.0, 0.0]]


# -- semantic plots -----------------------------------------------------------------

def test_semantic_radius_zero_identical_rows():
    tr = build_trajectory(tokenize("a b a c b"), TABLE)
    rp = semantic_rp(tr, 0.0)
    assert rp.points == {(0, 2), (2, 0), (1, 4), (4, 1)}
    assert rp.kind == "thresholded"


def test_semantic_large_radius_full():
    rng = np.random.default_rng(1)
    tr = traj_of(rng.normal(size=(12, 3)))
    rp = semantic_rp(tr, 1e6)
    assert rp.n_points == 12 * 12 - 12


def test_semantic_negative_radius():
    with pytest.raises(RangeError):
        semantic_rp(traj_of(np.zeros((3, 2))), -0.1)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 25), st.floats(0, 3), st.integers(0, 10**6))
def test_semantic_matches_brute_force(t, radius, seed):
    rows = np.random.default_rng(seed).normal(size=(t, 3))
    rp = semantic_rp(traj_of(rows), radius)
    d = np.linalg.norm(rows[:, None] - rows[None, :], axis=-1)
    ref = {(i, j) for i in range(t) for j in range(t) if i != j and d[i, j] <= radius}
    assert rp.points == ref
    assert rp.points == {(j, i) for i, j in rp.points}
    assert thresholded_rr(traj_of(rows), radius) == pytest.approx(brute_rr(rows, radius), abs=1e-15)


def test_rr_monotone_in_radius():
    rows = np.random.default_rng(2).normal(size=(40, 5))
    rrs = [thresholded_rr(traj_of(rows), r) for r in np.linspace(0, 6, 40)]
    assert all(a <= b for a, b in zip(rrs, rrs[1:]))


# -- radius search ---------------------------------------------------------------------

def test_radius_target_on_random(rng):
    for _ in range(20):
        tr = traj_of(zscore_columns(rng.normal(size=(50, 8))))
        res = radius_for_target_rr(tr, 0.05)
        assert res.met
        assert abs(brute_rr(tr.rows, res.radius) - 0.05) <= 0.005
        assert res.achieved_rr == pytest.approx(brute_rr(tr.rows, res.radius))


def test_radius_near_one_is_near_max_distance():
    rows = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    res = radius_for_target_rr(traj_of(rows), 0.999)
    dmax = np.sqrt(5.0)
    assert res.radius == pytest.approx(dmax, rel=1e-6)
    assert res.achieved_rr == pytest.approx(6 / 9)
    assert not res.met


def test_radius_unreachable_small_target():
    # every pair is at distance 1, so RR jumps from 0 straight to 6/9
    rows = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(0.75)]])
    res = radius_for_target_rr(traj_of(rows), 0.1)
    assert res.radius == 0.0
    assert res.achieved_rr == 0.0
    assert not res.met


def test_radius_monotone_in_target():
    rows = np.random.default_rng(4).normal(size=(60, 4))
    tr = traj_of(rows)
    radii = [radius_for_target_rr(tr, t).radius for t in (0.02, 0.05, 0.1, 0.2, 0.4)]
    assert radii == sorted(radii)


def test_radius_errors():
    with pytest.raises(RangeError):
        radius_for_target_rr(traj_of(np.zeros((3, 2))), 1.0)
    with pytest.raises(InsufficientDataError):
        radius_for_target_rr(traj_of(np.zeros((1, 2))), 0.5)

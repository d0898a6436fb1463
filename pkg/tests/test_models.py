import itertools
import math

import numpy as np
import pytest

from speclaw.models import (
    ChungLuSpec,
    ErSpec,
    GraphSample,
    Provenance,
    Schedule,
    ScheduleRangeError,
    ValidationError,
    _pairs_from_indices,
    constant_weights,
    eval_schedule,
    parse_profile_label,
    profile_label,
    ramp_weights,
    read_edgelist,
    read_weights,
    replicate_stream,
    sample_chung_lu,
    sample_er,
    two_block_weights,
    write_edgelist,
    write_weights,
)


def test_er_p1_is_complete_triangle():
    g = sample_er(ErSpec(3, 1.0), replicate_stream(99))
    assert g.edges.tolist() == [[0, 1], [0, 2], [1, 2]]
    assert g.degrees.tolist() == [2, 2, 2]


def test_er_p0_is_empty():
    g = sample_er(ErSpec(5, 0.0), replicate_stream(1))
    assert g.edge_count == 0
    assert g.degrees.tolist() == [0] * 5
    assert g.isolated_count == 5


def test_er_single_vertex():
    g = sample_er(ErSpec(1, 0.7), replicate_stream(3))
    assert g.edge_count == 0
    assert g.degrees.tolist() == [0]


def test_er_rejects_bad_p():
    with pytest.raises(ValidationError):
        sample_er(ErSpec(10, 1.5), replicate_stream(0))
    with pytest.raises(ValidationError):
        sample_er(ErSpec(10, -0.1), replicate_stream(0))


@pytest.mark.parametrize("p", [0.03, 0.4])
def test_er_determinism_and_stream_independence(p):
    spec = ErSpec(200, p)
    a = sample_er(spec, replicate_stream(7, 2, 5))
    b = sample_er(spec, replicate_stream(7, 2, 5))
    c = sample_er(spec, replicate_stream(7, 2, 6))
    assert np.array_equal(a.edges, b.edges)
    assert not np.array_equal(a.edges, c.edges)


@pytest.mark.parametrize("p", [0.02, 0.35])
def test_er_edges_sorted_and_degrees_consistent(p):
    g = sample_er(ErSpec(300, p), replicate_stream(11))
    i, j = g.edges[:, 0], g.edges[:, 1]
    assert np.all(i < j)
    keys = i * g.n + j
    assert np.all(np.diff(keys) > 0)
    recomputed = np.zeros(g.n, dtype=np.int64)
    for a, b in g.edges:
        recomputed[a] += 1
        recomputed[b] += 1
    assert np.array_equal(recomputed, g.degrees)


@pytest.mark.parametrize("n", [2, 3, 5, 17, 50])
def test_pair_index_inversion_exhaustive(n):
    m = n * (n - 1) // 2
    pairs = _pairs_from_indices(np.arange(m, dtype=np.int64), n)
    expected = np.array(list(itertools.combinations(range(n), 2)), dtype=np.int64)
    assert np.array_equal(pairs, expected)


def test_pair_index_inversion_large_n_spot_checks():
    # integer reference: k must land in row i's [start, next start) window
    n = 8192
    m = n * (n - 1) // 2
    rng = np.random.default_rng(0)
    ks = np.unique(np.concatenate((
        rng.integers(0, m, size=20_000),
        np.array([0, 1, m - 2, m - 1]),
    ))).astype(np.int64)
    pairs = _pairs_from_indices(ks, n)
    i, j = pairs[:, 0], pairs[:, 1]
    start = i * n - i * (i + 1) // 2
    assert np.all((ks >= start) & (ks < (i + 1) * n - (i + 1) * (i + 2) // 2))
    assert np.array_equal(j, ks - start + i + 1)
    assert np.all((i >= 0) & (i < j) & (j < n))


def test_er_edge_count_mean_matches_binomial():
    # binomial oracle: mean C(n,2) p, sd sqrt(C(n,2) p (1-p))
    n, p, reps = 1000, 0.01, 10_000
    spec = ErSpec(n, p)
    m_pairs = n * (n - 1) // 2
    counts = np.array([
        sample_er(spec, replicate_stream(2024, 0, r)).edge_count for r in range(reps)
    ])
    mean_expected = m_pairs * p
    se = math.sqrt(m_pairs * p * (1 - p) / reps)
    assert abs(counts.mean() - mean_expected) <= 3 * se


@pytest.mark.parametrize("p,pairs", [(0.05, [(0, 1), (17, 31)]), (0.3, [(2, 3), (10, 39)])])
def test_er_pair_marginal_frequency(p, pairs):
    # exercises both the geometric-skip and per-row sampling paths
    n, reps = 40, 4000
    spec = ErSpec(n, p)
    hits = {pair: 0 for pair in pairs}
    for r in range(reps):
        g = sample_er(spec, replicate_stream(55, 1, r))
        present = {tuple(e) for e in g.edges.tolist()}
        for pair in pairs:
            hits[pair] += pair in present
    se = math.sqrt(p * (1 - p) / reps)
    for pair, k in hits.items():
        assert abs(k / reps - p) <= 4 * se, pair


def test_chung_lu_constant_weights_reduce_to_er():
    # w_i = 10 with n = 100 gives p_ij = 0.1 for every pair
    spec = ChungLuSpec(constant_weights(100, 10.0))
    assert spec.phi == 1.0 / 1000.0
    reps = 2000
    m_pairs = 100 * 99 // 2
    counts = np.array([
        sample_chung_lu(spec, replicate_stream(17, 0, r)).edge_count for r in range(reps)
    ])
    se = math.sqrt(m_pairs * 0.1 * 0.9 / reps)
    assert abs(counts.mean() - m_pairs * 0.1) <= 4 * se


def test_chung_lu_invalid_specs_name_offending_index():
    w = np.array([1.0, -2.0, 3.0])
    with pytest.raises(ValidationError, match=r"w\[1\]"):
        ChungLuSpec(w).validate()
    w = np.array([1.0, 2.0, 50.0])  # 50^2 >= 53
    with pytest.raises(ValidationError, match=r"w\[2\]"):
        ChungLuSpec(w).validate()


def test_chung_lu_mean_degrees_match_exact_marginals():
    # E[d_i] = sum_{j != i} p_ij = w_i - phi * w_i^2, exactly
    n, reps = 500, 1000
    w = 20.0 + np.arange(n) / 25.0
    spec = ChungLuSpec(w)
    sums = np.zeros(n)
    for r in range(reps):
        sums += sample_chung_lu(spec, replicate_stream(4095, 0, r)).degrees
    mean_deg = sums / reps
    expected = w - spec.phi * w * w
    # Var(d_i) = sum_{j != i} p_ij (1 - p_ij)
    pw = np.outer(w, w) * spec.phi
    np.fill_diagonal(pw, 0.0)
    var = np.sum(pw * (1.0 - pw), axis=1)
    dev = np.abs(mean_deg - expected) / np.sqrt(var / reps)
    assert dev.max() <= 4.0


def test_chung_lu_pair_marginal():
    n, reps = 30, 5000
    w = ramp_weights(n, 2.0, 4.0)
    spec = ChungLuSpec(w)
    target_pairs = [(0, 1), (5, 29), (14, 15)]
    hits = {pair: 0 for pair in target_pairs}
    for r in range(reps):
        present = {tuple(e) for e in sample_chung_lu(spec, replicate_stream(8, 0, r)).edges.tolist()}
        for pair in target_pairs:
            hits[pair] += pair in present
    for (i, j), k in hits.items():
        pij = w[i] * w[j] * spec.phi
        se = math.sqrt(pij * (1 - pij) / reps)
        assert abs(k / reps - pij) <= 4 * se, (i, j)


def test_schedule_examples():
    assert eval_schedule(Schedule("c-over-n", 5.0), 100) == pytest.approx(0.05, abs=0)
    assert eval_schedule(Schedule("power", 1.0, alpha=0.5), 10_000) == pytest.approx(0.01, rel=1e-15)
    n = round(math.exp(10))
    assert eval_schedule(Schedule("c-logn-over-n", 2.0), n) == pytest.approx(
        2.0 * math.log(n) / n, rel=1e-15
    )
    assert eval_schedule(Schedule("c-log2n-over-n", 1.0), 2000) == pytest.approx(
        math.log(2000) ** 2 / 2000, rel=1e-15
    )
    assert eval_schedule(Schedule("c-sqrt-logn-over-n", 3.0), 2000) == pytest.approx(
        3.0 * math.sqrt(math.log(2000)) / 2000, rel=1e-15
    )
    assert eval_schedule(Schedule("logn-plus-c-loglogn-over-n", 3.0), 1000) == pytest.approx(
        (math.log(1000) + 3.0 * math.log(math.log(1000))) / 1000, rel=1e-15
    )


def test_schedule_range_errors():
    with pytest.raises(ScheduleRangeError):
        eval_schedule(Schedule("const-p", 2.0), 100)
    with pytest.raises(ScheduleRangeError):
        eval_schedule(Schedule("c-over-n", 7.0), 5)  # p = 1.4
    with pytest.raises(ValidationError):
        eval_schedule(Schedule("power", 1.0, alpha=1.5), 100)
    with pytest.raises(ValidationError):
        eval_schedule(Schedule("c-over-n", 1.0), 1)


def test_graphsample_validation():
    prov = Provenance(master_seed=0)
    with pytest.raises(ValidationError):  # self loop
        GraphSample.from_edges(3, np.array([[1, 1]]), prov)
    with pytest.raises(ValidationError):  # duplicate
        GraphSample.from_edges(3, np.array([[0, 1], [0, 1]]), prov)
    with pytest.raises(ValidationError):  # unsorted
        GraphSample.from_edges(3, np.array([[1, 2], [0, 1]]), prov)
    with pytest.raises(ValidationError):  # out of range
        GraphSample.from_edges(3, np.array([[0, 3]]), prov)


def test_edgelist_roundtrip(tmp_path):
    g = sample_er(ErSpec(50, 0.2), replicate_stream(5, 1, 2),
                  Provenance(master_seed=5, cell_id=1, replicate_index=2))
    path = tmp_path / "g.edges"
    write_edgelist(g, path)
    first = path.read_text().splitlines()[0]
    assert first == "# speclaw-edgelist v1 n=50 seed=5:1:2"
    back = read_edgelist(path)
    assert back.n == g.n
    assert np.array_equal(back.edges, g.edges)
    assert np.array_equal(back.degrees, g.degrees)
    assert back.provenance == Provenance(master_seed=5, cell_id=1, replicate_index=2)


def test_weights_roundtrip(tmp_path):
    w = ramp_weights(20, 1.5, 4.5)
    path = tmp_path / "w.txt"
    write_weights(w, path)
    assert np.array_equal(read_weights(path), w)


def test_weight_profiles():
    assert np.array_equal(constant_weights(4, 3.0), [3.0] * 4)
    r = ramp_weights(5, 10.0, 30.0)
    assert r[0] == 10.0 and r[-1] == 30.0
    assert np.allclose(np.diff(r), 5.0)
    tb = two_block_weights(10, 1.0, 2.0, 0.3)
    assert tb.tolist() == [1.0] * 3 + [2.0] * 7
    for prof in (
        {"kind": "constant", "w": 30.0},
        {"kind": "ramp", "wmin": 15.0, "wmax": 45.0},
        {"kind": "two-block", "wlo": 5.0, "whi": 9.0, "frac": 0.25},
    ):
        assert parse_profile_label(profile_label(prof)) == prof

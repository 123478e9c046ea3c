import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subteam import (BAConfig, CollabRecord, generate_ba, ingest_records, sample_subteam,
                     sample_team, validate_network)
from subteam.data import IngestStats, _is_connected, filter_records, read_records, write_records


def test_ba_reference_parameters():
    net = generate_ba(BAConfig(n=50, attach=3, l=6, rate=1.0, seed=7))
    assert net.n == 50 and net.l == 6
    deg = np.diff(net.A.indptr)
    assert deg[3:].min() >= 3
    assert validate_network(net).ok
    assert net.num_edges == 3 + 3 * 47


def test_ba_star_seed_edge_count():
    net = generate_ba(BAConfig(n=50, attach=3, seed_graph="star", seed=1))
    assert net.num_edges == 3 + 3 * 46
    assert np.diff(net.A.indptr).min() >= 3


def test_ba_same_seed_identical():
    a = generate_ba(BAConfig(seed=3))
    b = generate_ba(BAConfig(seed=3))
    assert (a.A != b.A).nnz == 0
    np.testing.assert_array_equal(a.L, b.L)
    c = generate_ba(BAConfig(seed=4))
    assert (a.A != c.A).nnz > 0


@pytest.mark.parametrize("kwargs", [dict(n=3, attach=3), dict(n=5, attach=0),
                                    dict(rate=0.0), dict(l=0), dict(seed_graph="ring")])
def test_ba_config_rejects(kwargs):
    with pytest.raises(ValueError):
        BAConfig(**kwargs)


def test_ba_attach_n_minus_one_is_accepted():
    net = generate_ba(BAConfig(n=5, attach=4, seed=0))
    assert net.n == 5


def test_ba_rate_sets_scale():
    net = generate_ba(BAConfig(n=400, attach=3, l=6, rate=4.0, seed=0))
    assert net.L.mean() == pytest.approx(0.25, rel=0.1)
    assert net.A.data.mean() == pytest.approx(0.25, rel=0.1)


def rec(members, tags, year=2000, weight=1.0):
    return CollabRecord(list(members), list(tags), year, weight)


def test_ingest_shared_records_count():
    net = ingest_records([rec("ab", ["x"]), rec("ab", ["y"]), rec("bc", ["x"])])
    a, b, c = net.indices_of(["a", "b", "c"])
    assert net.A[a, b] == 2.0 and net.A[b, c] == 1.0 and net.A[a, c] == 0.0
    x = net.skill_names.index("x")
    assert net.L[b, x] == 2.0


def test_ingest_decay_third_member():
    net = ingest_records([rec("abc", ["x", "y"])], skill_mode="decay", base=0.95)
    c = net.index_of("c")
    np.testing.assert_allclose(net.L[c], [0.9025, 0.9025])
    assert net.L[net.index_of("a")].tolist() == [1.0, 1.0]


def test_ingest_single_member_record():
    net = ingest_records([rec("a", ["x"])])
    assert net.n == 1 and net.num_edges == 0


def test_ingest_weighted_records():
    net = ingest_records([rec("ab", ["x"], weight=2.5), rec("ab", ["x"], weight=0.5)])
    assert net.A[0, 1] == 3.0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=4, unique=True),
                          st.lists(st.sampled_from("xyz"), min_size=1, max_size=3, unique=True),
                          st.integers(1, 3)),
                min_size=1, max_size=12),
       st.randoms(use_true_random=False), st.sampled_from(["count", "decay"]))
def test_ingest_order_insensitive(records, rnd, mode):
    recs = [rec(m, t, weight=float(w)) for m, t, w in records]
    shuffled = recs[:]
    rnd.shuffle(shuffled)
    a = ingest_records(recs, skill_mode=mode)
    b = ingest_records(shuffled, skill_mode=mode)
    assert a.node_ids == b.node_ids and a.skill_names == b.skill_names
    assert (a.A != b.A).nnz == 0
    np.testing.assert_array_equal(a.L, b.L)
    if mode == "decay":
        # each member gets at most one point per record and tag
        counts = {}
        for r in recs:
            for m in r.members:
                counts[m] = counts.get(m, 0) + 1
        for m, k in counts.items():
            assert a.L[a.index_of(m)].max() <= k + 1e-12


def test_ingest_rejects_bad_mode_and_empty():
    with pytest.raises(ValueError):
        ingest_records([rec("ab", "x")], skill_mode="log")
    with pytest.raises(ValueError):
        ingest_records([])


def test_record_json_round_trip_and_skips(tmp_path):
    path = tmp_path / "r.jsonl"
    write_records(path, [rec("ab", ["x"], 1999), rec("b", ["y"], 2001, 2.0)])
    with open(path, "a", encoding="utf-8") as fh:
        fh.write("{not json}\n")
        fh.write(json.dumps({"members": "a", "tags": ["x"], "year": 1}) + "\n")
        fh.write(json.dumps({"members": ["a"], "tags": ["x"], "year": "1999"}) + "\n")
    stats = IngestStats()
    got = list(read_records(path, stats))
    assert [r.members for r in got] == [["a", "b"], ["b"]]
    assert got[1].weight == 2.0
    assert stats.skipped == 3


def test_filter_records():
    recs = [rec("ab", ["x"], 1990), rec("ab", ["y"], 2000), rec("bc", ["x", "z"], 2010)]
    assert len(list(filter_records(recs, years=(1995, 2010)))) == 2
    assert len(list(filter_records(recs, tags=["z"]))) == 1


def test_sample_team_singleton():
    net = generate_ba(BAConfig(n=20, seed=0))
    assert len(sample_team(net, 1, seed=0)) == 1


@pytest.mark.parametrize("seed", range(10))
def test_connected_team_is_connected(seed):
    net = generate_ba(BAConfig(n=40, seed=seed))
    team = sample_team(net, 7, seed=seed)
    assert len(set(team)) == 7 and _is_connected(net, team)


def test_clique_team_on_record_graph():
    recs = [rec("abcd", ["x"]), rec("cdef", ["y"]), rec("ae", ["z"])]
    net = ingest_records(recs)
    for seed in range(10):
        team = sample_team(net, 3, mode="clique", seed=seed)
        A = net.A.toarray()
        assert all(A[u, v] > 0 for u in team for v in team if u != v)
    with pytest.raises(ValueError):
        sample_team(net, 5, mode="clique", seed=0)


def test_sample_team_rejects():
    net = generate_ba(BAConfig(n=10, seed=0))
    with pytest.raises(ValueError):
        sample_team(net, 11)
    with pytest.raises(ValueError):
        sample_team(net, 3, mode="star")


def test_sample_subteam_boundary_and_determinism():
    team = (5, 2, 9, 7)
    sub = sample_subteam(team, 3, seed=1)
    assert len(sub) == 3 and len(set(team) - set(sub)) == 1
    assert sample_subteam(team, 2, seed=11) == sample_subteam(team, 2, seed=11)
    # team order is kept
    assert list(sub) == [v for v in team if v in sub]
    with pytest.raises(ValueError):
        sample_subteam(team, 4)


def test_sample_subteam_inclusion_frequency():
    team = tuple(range(6))
    s, trials = 2, 3000
    counts = np.zeros(6)
    for seed in range(trials):
        for v in sample_subteam(team, s, seed=seed):
            counts[v] += 1
    p = s / len(team)
    sigma = np.sqrt(trials * p * (1 - p))
    assert np.all(np.abs(counts - trials * p) <= 3 * sigma)

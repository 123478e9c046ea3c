import numpy as np
import pytest

from subteam import BAConfig, SkillRelevance, generate_ba
from subteam.io import (FormatError, read_network, read_skill_relevance, write_network,
                        write_skill_relevance)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_round_trip(tmp_path):
    net = generate_ba(BAConfig(n=15, seed=2))
    W = SkillRelevance(np.triu(np.arange(36, dtype=float).reshape(6, 6) / 7))
    paths = write_network(net, tmp_path, W)
    back = read_network(paths["edges"], paths["skills"])
    assert back.node_ids == net.node_ids
    assert abs(back.A - net.A).max() == 0
    np.testing.assert_array_equal(back.L, net.L)
    np.testing.assert_array_equal(read_skill_relevance(paths["W"], 6).W, W.W)


def test_write_is_byte_stable(tmp_path):
    net = generate_ba(BAConfig(n=15, seed=2))
    a = write_network(net, tmp_path / "a")
    b = write_network(net, tmp_path / "b")
    for key in a:
        assert a[key].read_bytes() == b[key].read_bytes()


def test_duplicate_edges_are_summed(tmp_path):
    skills = write(tmp_path / "s.csv", "id,skill_1\na,1\nb,2\n")
    edges = write(tmp_path / "e.tsv", "a\tb\t1.5\nb\ta\t2\n")
    net = read_network(edges, skills)
    assert net.A[0, 1] == 3.5 and net.A[1, 0] == 3.5


@pytest.mark.parametrize("text", ["a\tb\n", "a\tq\t1\n", "a\ta\t1\n", "a\tb\tx\n"])
def test_bad_edges(tmp_path, text):
    skills = write(tmp_path / "s.csv", "id,skill_1\na,1\nb,2\n")
    with pytest.raises(FormatError):
        read_network(write(tmp_path / "e.tsv", text), skills)


@pytest.mark.parametrize("text", ["", "node,x\na,1\n", "id,skill_1\na,1,2\n", "id,skill_1\na,z\n",
                                  "id,skill_1\na,1\na,2\n"])
def test_bad_skills(tmp_path, text):
    edges = write(tmp_path / "e.tsv", "")
    with pytest.raises(FormatError):
        read_network(edges, write(tmp_path / "s.csv", text))


def test_W_lower_triangle_zeroed_with_warning(tmp_path):
    path = write(tmp_path / "W.csv", "1,2\n3,4\n")
    with pytest.warns(UserWarning):
        W = read_skill_relevance(path, 2)
    np.testing.assert_array_equal(W.W, [[1, 2], [0, 4]])


def test_W_shape_checks(tmp_path):
    with pytest.raises(FormatError):
        read_skill_relevance(write(tmp_path / "a.csv", "1,2\n0,1\n0,0\n"))
    with pytest.raises(FormatError):
        read_skill_relevance(write(tmp_path / "b.csv", "1,0\n0,1\n"), 3)
    path = tmp_path / "c.csv"
    write_skill_relevance(SkillRelevance.ones_upper(3), path)
    assert read_skill_relevance(path, 3).validate().ok

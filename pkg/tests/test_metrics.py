import io
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import normalized_mutual_info_score

from dssgraph import DomainError, Graph, GraphFormatError, PlantedSpec, ScanParams, generate_planted, scan
from dssgraph.metrics import (
    Partition,
    clustering_to_partition,
    evaluate,
    modularity,
    nmi,
    read_partition,
    size_distribution_mse,
    size_histograms,
    write_report,
)
from dssgraph.scan import OUTLIER, Clustering

TWO_TRIANGLES = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def test_partition_densifies():
    p = Partition([7, 7, 3, 9])
    assert p.labels.tolist() == [1, 1, 0, 2]
    assert p.community_count == 3
    assert p.sizes().tolist() == [1, 2, 1]
    assert p.singleton_count == 2


def test_partition_rejects_negative_ids():
    with pytest.raises(DomainError):
        Partition([0, -1])


class TestClusteringToPartition:
    def test_toy_lss(self, toy):
        c, _ = scan(toy, ScanParams(epsilon=0.7))
        p = clustering_to_partition(c)
        assert p.community_count == 6
        assert sorted(p.sizes().tolist()) == [1, 1, 1, 1, 3, 3]

    def test_all_outliers(self):
        c = Clustering(np.full(5, OUTLIER), 0)
        assert clustering_to_partition(c).community_count == 5

    def test_single_community(self):
        c = Clustering(np.zeros(5, dtype=np.int64), 1)
        assert clustering_to_partition(c).community_count == 1


class TestNmi:
    def test_identical(self):
        p = Partition([0, 0, 1, 1, 2])
        assert nmi(p, p) == 1.0

    def test_singletons_vs_one_block(self):
        assert nmi(Partition(range(6)), Partition([0] * 6)) == 0.0

    def test_both_single_block(self):
        assert nmi(Partition([0] * 4), Partition([5] * 4)) == 1.0

    def test_independent(self):
        assert nmi(Partition([0, 0, 1, 1]), Partition([0, 1, 0, 1])) == pytest.approx(0.0, abs=1e-15)

    def test_size_mismatch(self):
        with pytest.raises(DomainError):
            nmi(Partition([0, 1]), Partition([0, 1, 1]))


def nmi_base2(a, b):
    """Same quantity written with base-2 logarithms and a dense table."""
    n = len(a)
    ka, kb = max(a) + 1, max(b) + 1
    t = np.zeros((ka, kb))
    for x, y in zip(a, b):
        t[x, y] += 1
    pa, pb = t.sum(1) / n, t.sum(0) / n
    ha = -sum(p * math.log2(p) for p in pa if p > 0)
    hb = -sum(p * math.log2(p) for p in pb if p > 0)
    mi = sum(t[i, j] / n * math.log2(t[i, j] / n / (pa[i] * pb[j])) for i in range(ka) for j in range(kb) if t[i, j])
    return mi / math.sqrt(ha * hb)


labelings = st.lists(st.integers(0, 5), min_size=2, max_size=40)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_nmi_properties(data):
    a = data.draw(labelings)
    b = data.draw(st.lists(st.integers(0, 5), min_size=len(a), max_size=len(a)))
    pa, pb = Partition(a), Partition(b)
    score = nmi(pa, pb)
    assert 0.0 <= score <= 1.0
    assert score == pytest.approx(nmi(pb, pa), abs=1e-12)
    # relabeling either side changes nothing
    shuffled = np.random.default_rng(len(a)).permutation(6)
    assert nmi(Partition(shuffled[a]), pb) == pytest.approx(score, abs=1e-12)
    if pa.community_count > 1 and pb.community_count > 1:
        assert score == pytest.approx(normalized_mutual_info_score(a, b, average_method="geometric"), abs=1e-12)
        assert score == pytest.approx(nmi_base2(pa.labels.tolist(), pb.labels.tolist()), abs=1e-12)


class TestModularity:
    def test_two_triangles(self):
        assert modularity(TWO_TRIANGLES, Partition([0, 0, 0, 1, 1, 1])) == pytest.approx(0.5, abs=1e-12)

    def test_single_community(self, toy):
        assert modularity(toy, Partition([0] * 10)) == pytest.approx(0.0, abs=1e-12)

    def test_toy_planted(self, toy):
        q = modularity(toy, Partition([0, 0, 0, 1, 1, 1, 2, 2, 2, 2]))
        assert 0.3 <= q <= 0.7
        assert q == pytest.approx(73 / 169, abs=1e-15)

    def test_no_edges(self):
        with pytest.raises(DomainError):
            modularity(Graph.from_edges(3, []), Partition([0, 1, 2]))

    def test_size_mismatch(self, toy):
        with pytest.raises(DomainError):
            modularity(toy, Partition([0, 1]))

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_networkx(self, seed):
        g, truth = generate_planted(PlantedSpec((10, 15, 5), 0.4, 0.05, seed))
        labels = np.random.default_rng(seed).integers(0, 4, g.vertex_count)
        labels[: len(labels) // 2] = truth.labels[: len(labels) // 2]
        p = Partition(labels)
        nxg = nx.Graph()
        nxg.add_nodes_from(range(g.vertex_count))
        nxg.add_edges_from(g.edges())
        comms = [set(np.flatnonzero(p.labels == c).tolist()) for c in range(p.community_count)]
        expected = nx.community.modularity(nxg, comms)
        assert modularity(g, p) == pytest.approx(expected, abs=1e-12)
        perm = np.random.default_rng(seed + 1).permutation(p.community_count)
        assert modularity(g, Partition(perm[p.labels])) == pytest.approx(modularity(g, p), abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_disconnected_planted_closed_form(self, seed):
        g, truth = generate_planted(PlantedSpec((8, 12, 6, 9), 0.6, 0.0, seed))
        a = np.bincount(truth.labels, weights=g.degrees())
        assert modularity(g, truth) == pytest.approx(1 - np.sum((a / (2 * g.edge_count)) ** 2), abs=1e-12)


class TestSizeMse:
    def test_identical(self):
        p = Partition([0, 0, 1, 2, 2])
        assert size_distribution_mse(p, p) == 0.0

    def test_same_sizes_different_members(self):
        assert size_distribution_mse(Partition([0, 0, 0, 1, 1, 1]), Partition([0, 1, 0, 1, 0, 1])) == 0.0

    def test_hand_example(self):
        est = Partition([0, 1, 2, 2, 2, 2])
        real = Partition([0, 0, 0, 1, 1, 1])
        assert size_histograms(est, real) == [(1, 2, 0), (3, 0, 2), (4, 1, 0)]
        assert size_distribution_mse(est, real) == 3.0


def test_evaluate_and_report():
    p = Partition([0, 0, 0, 1, 1, 1])
    score = evaluate(TWO_TRIANGLES, p, p)
    assert (score.nmi, score.size_mse, score.community_count, score.singleton_count) == (1.0, 0.0, 2, 0)
    assert score.modularity == pytest.approx(0.5)
    assert math.isnan(evaluate(None, p, None).nmi)
    buf = io.StringIO()
    write_report(score, buf)
    header, row = buf.getvalue().splitlines()
    assert header.split("\t") == ["nmi", "modularity", "size_mse", "community_count", "singleton_count"]
    assert row.split("\t")[3:] == ["2", "0"]


class TestReadPartition:
    def test_basic_and_roles(self):
        got = read_partition(io.StringIO("# truth\n1 0\n2 0\n3 hub\n4 1\n5 outlier\n"))
        assert got == {1: 0, 2: 0, 4: 1, 3: 2, 5: 3}

    def test_from_mapping_missing_vertex(self, toy):
        with pytest.raises(DomainError):
            Partition.from_mapping({1: 0}, toy)

    @pytest.mark.parametrize("text", ["1\n", "x 0\n", "1 0\n1 1\n", "1 a\n"])
    def test_errors(self, text):
        with pytest.raises(GraphFormatError):
            read_partition(io.StringIO(text))

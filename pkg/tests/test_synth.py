import hashlib
import io

import numpy as np
import pytest

from dssgraph import DomainError, PlantedSpec, generate_planted
from dssgraph.graph import write_edge_list


def edge_list_bytes(g):
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue().encode()


def test_two_disjoint_triangles():
    for seed in (0, 1, 99):
        g, p = generate_planted(PlantedSpec((3, 3), 1.0, 0.0, seed))
        assert g.edges().tolist() == [[0, 1], [0, 2], [1, 2], [3, 4], [3, 5], [4, 5]]
        assert p.sizes().tolist() == [3, 3]


def test_complete_graph():
    g, p = generate_planted(PlantedSpec((7,), 1.0, 0.0))
    assert g.edge_count == 21
    assert p.community_count == 1


def test_pinned_stream():
    g, p = generate_planted(PlantedSpec((20, 20, 20), 0.5, 0.02, 42))
    assert g.edge_count == 307
    assert hashlib.sha256(edge_list_bytes(g)).hexdigest() == (
        "fed78db3f55b5453ad7f0afc2cafa4e580d369ea19e466f00af4b2e500dd8ba9"
    )
    intra = np.sum(p.labels[g.src] == p.labels[g.dst])
    # expectations are 285 intra and 24 inter edges
    assert 250 < intra < 320 and g.edge_count - intra < 45


def test_reproducible_and_seed_sensitive():
    spec = PlantedSpec((15, 25), 0.3, 0.05, 3)
    assert edge_list_bytes(generate_planted(spec)[0]) == edge_list_bytes(generate_planted(spec)[0])
    other = PlantedSpec((15, 25), 0.3, 0.05, 4)
    assert edge_list_bytes(generate_planted(spec)[0]) != edge_list_bytes(generate_planted(other)[0])


def test_no_loops_or_duplicates():
    g, _ = generate_planted(PlantedSpec((30, 30, 40), 0.5, 0.1, 8))
    assert np.all(g.src < g.dst)
    keys = g.src * g.vertex_count + g.dst
    assert len(np.unique(keys)) == len(keys)
    assert g.load_stats.duplicates == g.load_stats.self_loops == 0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(communities=(3, 0), p_in=0.5, p_out=0.1),
        dict(communities=(1,), p_in=0.5, p_out=0.1),
        dict(communities=(3, 3), p_in=1.5, p_out=0.1),
        dict(communities=(3, 3), p_in=0.5, p_out=-0.1),
        dict(communities=(3, 3), p_in=0.5, p_out=0.1, seed=-1),
    ],
)
def test_invalid_spec(kwargs):
    with pytest.raises(DomainError):
        PlantedSpec(**kwargs)


def test_weak_structure_warns():
    with pytest.warns(UserWarning):
        PlantedSpec((5, 5), 0.1, 0.2)

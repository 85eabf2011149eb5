"""Smoke test for the harp extension module.

Build and install first:
    pip install maturin
    pip install --no-build-isolation ./crates/py
"""

import math

import harp


def main():
    g = harp.Graph(4, [(0, 1), (1, 2, 2.0), (2, 3), (3, 0)])
    assert (g.node_count, g.edge_count) == (4, 4)
    assert dict(g.neighbors(1)) == {0: 1.0, 2: 2.0}
    assert harp.Graph.parse_edge_list("a b\nb a\n").edges() == [(0, 1, 2.0)]

    try:
        harp.Graph.parse_edge_list("a b c d\n")
    except ValueError as e:
        assert "parse" in str(e)
    else:
        raise AssertionError("malformed edge list accepted")

    g, communities = harp.planted_partition(300, 3, 8.0, 0.1, seed=1)
    assert len(communities) == 300 and set(communities) == {0, 1, 2}

    h = harp.coarsen(g, threshold=20, seed=1)
    sizes = h.sizes()
    assert sizes[0][0] == 300 and h.depth >= 1
    assert all(b[0] < a[0] for a, b in zip(sizes, sizes[1:]))
    assert len(h.parents(0)) == 300 and max(h.parents(0)) == sizes[1][0] - 1

    labels = [[c] for c in communities]
    runs = {}
    for mode in ("harp", "baseline"):
        emb = harp.embed(g, "deepwalk", mode, seed=3, dim=16, walks_per_node=10)
        assert (emb.rows, emb.dim) == (300, 16)
        assert all(math.isfinite(x) for row in emb.to_list() for x in row)
        assert emb.executed_samples == emb.budget_samples
        mean, scores = harp.evaluate(emb, labels, 0.2, repetitions=3, seed=3)
        assert len(scores) == 3 and 0.0 <= mean <= 1.0
        runs[mode] = (emb, mean)
    assert runs["harp"][0].executed_samples == runs["baseline"][0].executed_samples
    assert runs["harp"][1] > 0.6, runs["harp"][1]

    again = harp.embed(g, "deepwalk", "harp", seed=3, dim=16, walks_per_node=10)
    assert again.to_list() == runs["harp"][0].to_list()

    line = harp.embed(harp.ring_lattice(60, 2), "line", dim=2, iterations=5, threshold=10)
    assert line.dim == 2

    rows = harp.compare(g, labels, ["line"], [0.2], repetitions=2, seed=1)
    assert rows[0]["method"] == "line" and set(rows[0]) >= {"baseline", "harp", "gain_pct", "p_value"}

    print("harp smoke test ok:", {m: round(v[1], 3) for m, v in runs.items()})


if __name__ == "__main__":
    main()

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diagrameq.fincat import (
    FinCatError, FinCatPresentation, FinFunctor, Graph, NonAcyclicError, Path, Verdict,
    check_functor, comma_category, compose_functors, enumerate_paths, interval_cylinder, make_path,
    path_compose, paths_equal, pushout,
)
from diagrameq.physlib import model_diffusion_to_heat, path_graph

from randgen import random_dag, random_functor


def parallel_pair():
    return FinCatPresentation.free(["a", "b"], [("f", "a", "b"), ("g", "a", "b")])


def diffusion_shape():
    return FinCatPresentation.free(
        ["C", "dC", "phi", "dphi", "Cdot"],
        [("d", "C", "dC"), ("kstar", "dC", "phi"), ("dual_d", "phi", "dphi"),
         ("star_inv", "dphi", "Cdot"), ("dt", "C", "Cdot")])


def lie_shape(with_relation=True):
    g = Graph(["a", "c", "b"], [("iota", "a", "c"), ("d", "c", "b"), ("L", "a", "b")])
    rels = [(make_path(g, ["L"]), make_path(g, ["iota", "d"]))] if with_relation else []
    return FinCatPresentation(g, rels)


def test_graph_rejects_duplicates_and_dangling_edges():
    with pytest.raises(FinCatError):
        Graph(["a", "a"])
    with pytest.raises(FinCatError):
        Graph(["a"], [("f", "a", "b")])
    with pytest.raises(FinCatError):
        Graph(["a", "b"], [("f", "a", "b"), ("f", "b", "a")])


def test_make_path_checks_composability():
    c = diffusion_shape()
    p = c.path("d", "kstar")
    assert (p.start, p.end, len(p)) == ("C", "phi", 2)
    with pytest.raises(FinCatError):
        c.path("d", "dual_d")
    with pytest.raises(FinCatError):
        make_path(c.graph, [])
    assert make_path(c.graph, [], "C") == Path.identity("C")


def test_path_compose_concatenates():
    c = diffusion_shape()
    p = path_compose(c.path("d", "kstar"), c.path("dual_d"))
    assert p.edges == ("d", "kstar", "dual_d") and len(p) == 3
    assert path_compose(c.identity("C"), p) == p == path_compose(p, c.identity("dphi"))
    with pytest.raises(FinCatError):
        path_compose(c.path("d"), c.path("dt"))


def test_enumerate_parallel_pair():
    paths = enumerate_paths(parallel_pair(), "a", "b")
    assert [p.edges for p in paths] == [("f",), ("g",)]


def test_enumerate_diffusion_shape():
    paths = enumerate_paths(diffusion_shape(), "C", "Cdot")
    assert [p.edges for p in paths] == [("dt",), ("d", "kstar", "dual_d", "star_inv")]
    assert [p.edges for p in enumerate_paths(diffusion_shape(), "C", "C")] == [()]
    assert enumerate_paths(diffusion_shape(), "Cdot", "C") == []


def test_enumerate_cyclic_needs_bound():
    loop = FinCatPresentation.free(["x"], [("s", "x", "x")])
    with pytest.raises(NonAcyclicError):
        enumerate_paths(loop, "x", "x")
    assert [len(p) for p in enumerate_paths(loop, "x", "x", max_len=3)] == [0, 1, 2, 3]


def _count_paths_oracle(c: FinCatPresentation, a: str, b: str) -> int:
    idx = {v: i for i, v in enumerate(c.vertices)}
    A = np.zeros((len(idx), len(idx)), dtype=np.int64)
    for e in c.edges:
        A[idx[c.src(e)], idx[c.tgt(e)]] += 1
    total, P = 0, np.eye(len(idx), dtype=np.int64)
    for _ in range(len(idx)):
        total += P[idx[a], idx[b]]
        P = P @ A
    return int(total)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_path_count_matches_adjacency_powers(seed, n):
    rng = np.random.default_rng(seed)
    c = random_dag(rng, n, p=0.5, max_mult=2)
    for a in c.vertices:
        for b in c.vertices:
            paths = enumerate_paths(c, a, b)
            assert len(paths) == _count_paths_oracle(c, a, b)
            assert len(set(paths)) == len(paths)
            assert [len(p) for p in paths] == sorted(len(p) for p in paths)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_composition_is_associative_and_length_additive(seed):
    rng = np.random.default_rng(seed)
    c = random_dag(rng, 5, p=0.6)
    chains = [p for a in c.vertices for b in c.vertices for p in enumerate_paths(c, a, b) if len(p) >= 3]
    for p in chains[:10]:
        x, y, z = Path(p.start, c.tgt(p.edges[0]), p.edges[:1]), None, None
        y = Path(x.end, c.tgt(p.edges[1]), p.edges[1:2])
        z = Path(y.end, p.end, p.edges[2:])
        assert path_compose(path_compose(x, y), z) == path_compose(x, path_compose(y, z)) == p
        assert len(path_compose(x, y)) == len(x) + len(y)


def test_paths_equal_uses_relations():
    c = lie_shape()
    assert paths_equal(c, c.path("L"), c.path("iota", "d")) is Verdict.EQUAL
    assert paths_equal(c, c.path("iota", "d"), c.path("L")) is Verdict.EQUAL
    free = lie_shape(with_relation=False)
    assert paths_equal(free, free.path("L"), free.path("iota", "d")) is Verdict.NOT_PROVEN
    assert not paths_equal(free, free.path("L"), free.path("iota", "d"))


def test_paths_equal_reflexive_and_endpoint_sensitive():
    c = diffusion_shape()
    p = c.path("d", "kstar")
    assert paths_equal(c, p, p)
    assert not paths_equal(c, c.path("dt"), c.path("d", "kstar", "dual_d", "star_inv"))


def test_paths_equal_through_two_relations():
    # f;g = h and h;k = m, so f;g;k = m
    g = Graph(["a", "b", "c", "d"], [("f", "a", "b"), ("g", "b", "c"), ("h", "a", "c"),
                                     ("k", "c", "d"), ("m", "a", "d")])
    rels = [(make_path(g, ["f", "g"]), make_path(g, ["h"])), (make_path(g, ["h", "k"]), make_path(g, ["m"]))]
    c = FinCatPresentation(g, rels)
    assert paths_equal(c, c.path("f", "g", "k"), c.path("m"))


def test_relation_endpoints_checked():
    g = Graph(["a", "b", "c"], [("f", "a", "b"), ("g", "a", "c")])
    with pytest.raises(FinCatError):
        FinCatPresentation(g, [(make_path(g, ["f"]), make_path(g, ["g"]))])


def test_heat_to_diffusion_functor_is_valid():
    m = model_diffusion_to_heat(path_graph(3), 1)
    assert check_functor(m.R).ok
    assert m.R.edge_map["lap"].edges == ("d", "kstar", "dual_d", "star_inv")


def test_check_functor_reports_bad_relation_image():
    tri = lie_shape()
    free = lie_shape(with_relation=False)
    F = FinFunctor(tri, free, {v: v for v in tri.vertices}, {e: [e] for e in tri.edges})
    rep = check_functor(F)
    assert not rep.ok and "not preserved" in rep.problems[0]
    G = FinFunctor(free, tri, {v: v for v in tri.vertices}, {e: [e] for e in tri.edges})
    assert check_functor(G).ok


def test_compose_functors_on_objects_and_paths():
    rng = np.random.default_rng(0)
    B = random_dag(rng, 4, p=0.6, prefix="b")
    G = random_functor(rng, B, 4, prefix="x")
    F = random_functor(rng, G.dom, 3, prefix="y")
    H = compose_functors(F, G)
    assert check_functor(H).ok
    for v in F.dom.vertices:
        assert H(v) == G(F(v))
    for e in F.dom.edges:
        assert H.edge_map[e] == G.map_path(F.edge_map[e])


def test_comma_identity_parallel_pair():
    c = parallel_pair()
    comma = comma_category(FinFunctor.identity(c), "b")
    got = sorted((a, p.edges) for a, p in comma.objects)
    assert got == [("a", ("f",)), ("a", ("g",)), ("b", ())]
    assert comma.nonempty_connected


def test_comma_heat_to_diffusion_at_cdot():
    R = model_diffusion_to_heat(path_graph(3), 1).R
    comma = comma_category(R, "Cdot")
    got = sorted((a, p.edges) for a, p in comma.objects)
    assert got == [("C", ("d", "kstar", "dual_d", "star_inv")), ("C", ("dt",)), ("Cdot", ())]
    assert comma.nonempty_connected
    assert len(comma.arrows) == 2


def test_comma_lie_inclusion_disconnected():
    tri = lie_shape(with_relation=False)
    one = FinCatPresentation.free(["a", "b"], [("L", "a", "b")])
    R = FinFunctor(one, tri, {"a": "a", "b": "b"}, {"L": ["L"]})
    comma = comma_category(R, "b")
    assert len(comma.objects) == 3 and comma.n_components == 2
    comp = [sorted((comma.objects[i][0], comma.objects[i][1].edges) for i in c) for c in comma.components()]
    assert [("a", ("iota", "d"))] in comp
    assert [(a, p.edges) for a, p in comma_category(R, "c").objects] == [("a", ("iota",))]


def test_pushout_wedge():
    A = FinCatPresentation.free(["o"])
    B = FinCatPresentation.free(["o", "x"], [("f", "o", "x")])
    C = FinCatPresentation.free(["o", "y"], [("g", "o", "y")])
    P, iB, iC = pushout(FinFunctor(A, B, {"o": "o"}, {}), FinFunctor(A, C, {"o": "o"}, {}))
    assert len(P.vertices) == 3 and len(P.edges) == 2
    assert iB("o") == iC("o")
    assert check_functor(iB).ok and check_functor(iC).ok


def test_pushout_primes_colliding_names():
    A = FinCatPresentation.free(["o"])
    B = FinCatPresentation.free(["o", "x"], [("f", "o", "x")])
    P, iB, iC = pushout(FinFunctor(A, B, {"o": "o"}, {}), FinFunctor(A, B, {"o": "o"}, {}))
    assert len(P.vertices) == 3 and len(P.edges) == 2
    assert iB("x") != iC("x")


def test_interval_cylinder_counts():
    c = parallel_pair()
    cyl, inc0 = interval_cylinder(c)
    # two copies of the shape plus one arrow per object between them
    assert len(cyl.vertices) == 4 and len(cyl.edges) == 2 * 2 + 2
    assert check_functor(inc0).ok


def test_to_dot_lists_every_edge():
    c = diffusion_shape()
    dot = c.graph.to_dot()
    assert dot.startswith("digraph") and dot.count("->") == 5

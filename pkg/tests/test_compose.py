import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diagrameq import physlib
from diagrameq.compose import UWD, ComposeError, apply_uwd, make_open, open_isomorphic, substitute_uwd
from diagrameq.diagram import build_diagram
from diagrameq.fincat import FinCatPresentation
from diagrameq.lifting import Pinning, solve_lift
from diagrameq.semcat import LinSpace


def _renamed(d, names):
    edges = [(e, names[d.shape.src(e)], names[d.shape.tgt(e)]) for e in d.edges]
    shape = FinCatPresentation.free([names[v] for v in d.vertices], edges)
    return build_diagram(shape, d.semantics, {names[v]: d.ob(v) for v in d.vertices},
                         {e: d.hom(e) for e in d.edges})


def _mass_flow(g, u, v):
    # advective flux -v (u_s + u_t)/2 along each oriented edge, leaving s and entering t
    out = np.zeros(g.nv)
    for e in g.oriented:
        s, t = g.index[g.s[e]], g.index[g.t[e]]
        phi = -v * (u[s] + u[t]) / 2
        out[s] += phi
        out[t] -= phi
    return out / physlib.vertex_weights(g)


def test_make_open_feet_and_errors():
    d = physlib.diffusion_diagram(physlib.path_graph(3), 1)
    X = make_open(d, [["C"], ["phi", "dC"]])
    assert X.legs == [("C",), ("phi", "dC")]
    assert [len(f) for f in X.feet] == [1, 2] and X.feet[0][0] == d.ob("C")
    with pytest.raises(ComposeError, match="unknown vertices"):
        make_open(d, [["nope"]])
    with pytest.raises(ComposeError, match="not injective"):
        make_open(d, [["C", "C"]])


def test_transport_builds_diffusion():
    g = physlib.cycle_graph(4)
    built = apply_uwd(physlib.uwd_transport(g, 2), [physlib.model_fick(g, 0.5, 2), physlib.model_conservation(g, 2)])
    assert sorted(built.apex.vertices) == ["C", "Cdot", "dC", "dphi", "phi"]
    assert sorted(built.apex.edges) == ["d", "dt", "dual_d", "kstar", "star_inv"]
    assert built.legs == [("C",)]
    assert open_isomorphic(built, physlib.model_diffusion(g, 0.5, 2))
    assert not open_isomorphic(built, physlib.model_diffusion(g, 1.0, 2))


def test_advection_step_matches_hand_flow():
    g = physlib.path_graph(3)
    X = apply_uwd(physlib.uwd_transport(g, 1), [physlib.model_advection(g, 0.4, 1), physlib.model_conservation(g, 1)])
    out = solve_lift(X.apex, Pinning().pin("C", [1, 0, 0], [0, 1, 2]))
    assert out.status == "Unique"
    cdot = out.lift["Cdot"]
    assert np.allclose(cdot, _mass_flow(g, [1, 0, 0], 0.4))
    # frozen: vertex weights are 1, 2, 1 on the path
    assert np.allclose(cdot, [-0.2, 0.1, 0.0])
    assert physlib.total_mass(g, cdot) == pytest.approx(0.0, abs=1e-15)


def test_substitution_keeps_passthrough_boxes():
    g = physlib.cycle_graph(3)
    big = substitute_uwd(physlib.uwd_transport(g), [physlib.uwd_flux_superposition(g), None])
    assert big.box_names == ["diffusion", "advection", "superposition", "conservation"]
    assert sorted(big.junctions) == ["C", "flux.phi1", "flux.phi2", "phi"]
    assert dict(big.boxes)["superposition"] == ("flux.phi1", "flux.phi2", "phi")
    assert big.outer == ("C",)


def test_four_box_composite():
    g = physlib.cycle_graph(4)
    T = 2
    big = substitute_uwd(physlib.uwd_transport(g, T), [physlib.uwd_flux_superposition(g, T), None])
    X = apply_uwd(big, [physlib.model_fick(g, 1.0, T), physlib.model_advection(g, 0.3, T),
                        physlib.model_superposition(LinSpace(T * g.ne, "E_t")), physlib.model_conservation(g, T)])
    # 3 + 3 + 4 + 4 vertices, with C glued three ways and each flux junction once
    assert len(X.apex.vertices) == 14 - 5 and len(X.apex.edges) == 10
    assert [pn.vertex for pn in X.apex.products] == ["P"]
    u0 = np.array([1.0, 0.0, 0.5, 0.0])
    out = solve_lift(X.apex, Pinning().pin("C", u0, range(4)))
    assert out.status == "Unique"
    want = physlib.laplacian_matrix(g) @ u0 + _mass_flow(g, u0, 0.3)
    assert np.allclose(out.lift["Cdot"][:4], want)


def test_open_transport_with_reaction():
    g = physlib.path_graph(4)
    T, beta = 3, -0.1
    transport = apply_uwd(physlib.uwd_open_transport(g, T),
                          [physlib.model_fick(g, 1.0, T), physlib.model_open_conservation(g, T)])
    assert transport.legs == [("C",), ("S",)]
    X = apply_uwd(physlib.uwd_transport_transformation(g, T), [transport, physlib.model_reaction(g, beta, T)])
    u0 = np.array([0.0, 4.0, 0.0, 1.0])
    out = solve_lift(X.apex, Pinning().pin("C", u0, range(4)))
    traj = [u0]
    for _ in range(T):
        traj.append(traj[-1] + physlib.laplacian_matrix(g) @ traj[-1] + beta * traj[-1])
    assert out.status == "Unique"
    assert np.max(np.abs(out.lift["C"].reshape(T + 1, 4) - np.array(traj))) <= 1e-12


def test_isomorphism_ignores_names():
    g = physlib.path_graph(3)
    d = physlib.diffusion_diagram(g, 1)
    names = {"C": "u", "dC": "grad", "phi": "flux", "dphi": "div", "Cdot": "rate"}
    assert open_isomorphic(make_open(d, [["C"]]), make_open(_renamed(d, names), [["u"]]))
    assert not open_isomorphic(make_open(d, [["C"]]), make_open(_renamed(d, names), [["rate"]]))


def test_diffusion_is_not_advection_diffusion():
    g = physlib.cycle_graph(3)
    plain = physlib.model_diffusion(g, 1.0, 1)
    mixed = apply_uwd(substitute_uwd(physlib.uwd_transport(g), [physlib.uwd_flux_superposition(g), None]),
                      [physlib.model_fick(g), physlib.model_advection(g, 0.5), physlib.model_superposition(
                          LinSpace(g.ne, "E_t")), physlib.model_conservation(g)])
    assert not open_isomorphic(plain, mixed)


def test_apply_errors():
    g = physlib.path_graph(3)
    u = physlib.uwd_transport(g)
    fick, cons = physlib.model_fick(g), physlib.model_conservation(g)
    with pytest.raises(ComposeError, match="2 boxes but 1 fillers"):
        apply_uwd(u, [fick])
    with pytest.raises(ComposeError, match="does not match"):
        apply_uwd(u, [physlib.model_fick(physlib.path_graph(4)), cons])
    with pytest.raises(ComposeError, match="single objects"):
        apply_uwd(u, [make_open(fick.apex, [["C", "dC"], ["phi"]]), cons])
    with pytest.raises(ComposeError, match="ports but filler"):
        apply_uwd(u, [make_open(fick.apex, [["C"]]), cons])
    lonely = UWD({**u.junctions, "x": u.junctions["C"]}, [("flux", ["C", "phi"])], ["x"])
    with pytest.raises(ComposeError, match="not wired"):
        apply_uwd(lonely, [fick])


def test_uwd_and_substitution_errors():
    S = LinSpace(2)
    with pytest.raises(ComposeError, match="unknown junctions"):
        UWD({"a": S}, [("b", ["a", "z"])], [])
    with pytest.raises(ComposeError, match="duplicate box"):
        UWD({"a": S}, [("b", ["a"]), ("b", ["a"])], [])
    with pytest.raises(ComposeError, match="outer ports"):
        UWD({"a": S}, [("b", ["a"])], ["z"])
    outer = UWD({"a": S}, [("b", ["a"]), ("c", ["a"])], ["a"])
    with pytest.raises(ComposeError, match="substitutions"):
        substitute_uwd(outer, [None])
    with pytest.raises(ComposeError, match="type mismatch"):
        substitute_uwd(outer, [UWD.identity([LinSpace(3)]), None])
    with pytest.raises(ComposeError, match="duplicate box names"):
        substitute_uwd(outer, [UWD.identity([S], box="c"), None])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_identity_substitution_is_a_unit(seed):
    rng = np.random.default_rng(seed)
    types = [LinSpace(int(d)) for d in rng.integers(0, 3, 4)]
    js = {f"j{i}": t for i, t in enumerate(types)}
    boxes = []
    for b in range(int(rng.integers(1, 4))):
        k = int(rng.integers(0, 4))
        boxes.append((f"b{b}", [f"j{int(x)}" for x in rng.integers(0, 4, k)]))
    outer = [f"j{int(x)}" for x in rng.integers(0, 4, int(rng.integers(0, 3)))]
    u = UWD(js, boxes, outer)
    ids = [UWD.identity(u.port_types(b), box=b) for b in u.box_names]
    assert substitute_uwd(u, ids) == u
    assert substitute_uwd(u, [None] * len(boxes)) == u


def test_identity_uwd_application_is_isomorphic():
    g = physlib.cycle_graph(3)
    fick = physlib.model_fick(g)
    same = apply_uwd(UWD.identity([fick.apex.ob("C"), fick.apex.ob("phi")], box="fick"), [fick])
    assert open_isomorphic(same, fick)

"""Graph calculus and a catalog of prebuilt models.

Time-dependent quantities on a graph with ``V`` vertices are stored
time-major: entry ``n * V + x`` is the value at step ``n`` and vertex ``x``.
The state ``C`` carries steps ``0..T``; every derived quantity carries steps
``0..T-1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .compose import UWD, OpenDiagram, make_open
from .diagram import Diagram, ProductNode, build_diagram
from .fincat import FinCatPresentation, FinFunctor, Graph
from .morphism import DiagramMorphism, make_morphism
from .semcat import (
    LinMap, LinSpace, LinearSemantics, OperatorSignature, SymbolicSemantics,
    direct_sum, identity, sum_map, sym_zero,
)


class GraphError(ValueError):
    pass


class SWGraph:
    """Symmetric weighted graph: directed edges with a weight-preserving involution."""

    def __init__(self, vertices: Sequence, edges: Sequence[tuple[str, object, object]],
                 inv: Mapping[str, str], mu: Mapping[str, float]):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertices")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.edges = [e for e, _, _ in edges]
        if len(set(self.edges)) != len(self.edges):
            raise GraphError("duplicate edge ids")
        self.s = {e: s for e, s, _ in edges}
        self.t = {e: t for e, _, t in edges}
        for e in self.edges:
            if self.s[e] not in self.index or self.t[e] not in self.index:
                raise GraphError(f"edge {e!r} has an unknown endpoint")
        self.inv = dict(inv)
        self.mu = {e: float(mu[e]) for e in self.edges}
        for e in self.edges:
            i = self.inv.get(e)
            if i is None or i not in self.s:
                raise GraphError(f"involution undefined at {e!r}")
            if i == e:
                raise GraphError(f"involution fixes {e!r}")
            if self.inv.get(i) != e:
                raise GraphError(f"involution is not an involution at {e!r}")
            if self.s[i] != self.t[e] or self.t[i] != self.s[e]:
                raise GraphError(f"involution does not reverse {e!r}")
            if not self.mu[e] > 0:
                raise GraphError(f"weight of {e!r} is not positive")
            if self.mu[i] != self.mu[e]:
                raise GraphError(f"weights of {e!r} and {i!r} differ")
        outdeg = {v: 0 for v in self.vertices}
        for e in self.edges:
            outdeg[self.s[e]] += 1
        isolated = [v for v, k in outdeg.items() if k == 0]
        if isolated:
            raise GraphError(f"isolated vertices {isolated}")
        # orientation: the member of each pair with the smaller (s, t) index pair
        self.oriented = []
        for e in self.edges:
            i = self.inv[e]
            ke = (self.index[self.s[e]], self.index[self.t[e]], self.edges.index(e))
            ki = (self.index[self.s[i]], self.index[self.t[i]], self.edges.index(i))
            if ke < ki:
                self.oriented.append(e)

    @classmethod
    def from_undirected(cls, vertices: Sequence, edges: Iterable[tuple]) -> SWGraph:
        """Undirected edges ``(u, v)`` or ``(u, v, w)`` become symmetric pairs."""
        es, inv, mu = [], {}, {}
        for k, item in enumerate(edges):
            u, v = item[0], item[1]
            w = item[2] if len(item) > 2 else 1.0
            a, b = f"e{k}+", f"e{k}-"
            es += [(a, u, v), (b, v, u)]
            inv[a], inv[b] = b, a
            mu[a] = mu[b] = w
        return cls(vertices, es, inv, mu)

    @classmethod
    def parse(cls, text: str) -> SWGraph:
        """Edge-list text: ``vertices a b c`` then lines ``u v [w]``."""
        vertices, edges = None, []
        for ln in text.splitlines():
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            parts = ln.split()
            if parts[0] == "vertices":
                vertices = parts[1:]
            else:
                edges.append((parts[0], parts[1], float(parts[2]) if len(parts) > 2 else 1.0))
        if vertices is None:
            seen = []
            for u, v, _ in edges:
                for x in (u, v):
                    if x not in seen:
                        seen.append(x)
            vertices = seen
        return cls.from_undirected(vertices, edges)

    @property
    def nv(self) -> int:
        return len(self.vertices)

    @property
    def ne(self) -> int:
        return len(self.oriented)

    def neighbors(self, x) -> list:
        return [self.t[e] for e in self.edges if self.s[e] == x]

    def is_connected(self) -> bool:
        seen, stack = {self.vertices[0]}, [self.vertices[0]]
        while stack:
            x = stack.pop()
            for y in self.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.nv


def path_graph(n: int) -> SWGraph:
    return SWGraph.from_undirected(list(range(n)), [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> SWGraph:
    return SWGraph.from_undirected(list(range(n)), [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> SWGraph:
    return SWGraph.from_undirected(list(range(n)), [(i, (i + 1) % n) for i in range(n)])


def random_connected_graph(rng: np.random.Generator, n: int, extra: float = 0.3,
                           weighted: bool = True) -> SWGraph:
    """Random spanning tree plus extra edges, with weights in [0.5, 2)."""
    edges = set()
    for i in range(1, n):
        edges.add((int(rng.integers(0, i)), i))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < extra / max(1, n - 1) * 2:
                edges.add((i, j))
    es = sorted(edges)
    ws = rng.uniform(0.5, 2.0, len(es)) if weighted else np.ones(len(es))
    return SWGraph.from_undirected(list(range(n)), [(u, v, float(w)) for (u, v), w in zip(es, ws)])


# -- graph calculus -----------------------------------------------------------

def vertex_weight(g: SWGraph, x) -> float:
    if x not in g.index:
        raise GraphError(f"unknown vertex {x!r}")
    return sum(g.mu[e] for e in g.edges if g.s[e] == x)


def vertex_weights(g: SWGraph) -> np.ndarray:
    w = np.zeros(g.nv)
    for e in g.edges:
        w[g.index[g.s[e]]] += g.mu[e]
    return w


def laplacian_matrix(g: SWGraph) -> np.ndarray:
    W = np.zeros((g.nv, g.nv))
    for e in g.edges:
        W[g.index[g.s[e]], g.index[g.t[e]]] += g.mu[e]
    return W / vertex_weights(g)[:, None] - np.eye(g.nv)


def discrete_laplacian(g: SWGraph) -> LinMap:
    V = LinSpace(g.nv, "V")
    return LinMap(V, V, laplacian_matrix(g))


def incidence_d0(g: SWGraph) -> LinMap:
    m = np.zeros((g.ne, g.nv))
    for r, e in enumerate(g.oriented):
        m[r, g.index[g.t[e]]] += 1.0
        m[r, g.index[g.s[e]]] -= 1.0
    return LinMap(LinSpace(g.nv, "V"), LinSpace(g.ne, "E"), m)


def _edge_k(g: SWGraph, k) -> np.ndarray:
    if isinstance(k, Mapping):
        ks = np.array([float(k[e]) for e in g.oriented])
    else:
        ks = np.full(g.ne, float(k))
    if np.any(ks <= 0):
        raise GraphError("edge coefficients must be positive")
    return ks


def stars(g: SWGraph, k=1.0) -> tuple[LinMap, LinMap]:
    """``star0 = diag(mu(x))`` and ``star1 = diag(k(e) mu(e))`` over oriented edges."""
    ks = _edge_k(g, k)
    V, E = LinSpace(g.nv, "V"), LinSpace(g.ne, "E")
    s0 = np.diag(vertex_weights(g))
    s1 = np.diag(ks * np.array([g.mu[e] for e in g.oriented]))
    return LinMap(V, V, s0), LinMap(E, E, s1)


def averaging(g: SWGraph) -> np.ndarray:
    m = np.zeros((g.ne, g.nv))
    for r, e in enumerate(g.oriented):
        m[r, g.index[g.s[e]]] += 0.5
        m[r, g.index[g.t[e]]] += 0.5
    return m


def heat_evolve(g: SWGraph, u0, steps: int) -> np.ndarray:
    """Trajectory ``u(n+1) = u(n) + Lap u(n)`` as a ``(steps+1, V)`` array."""
    lap = laplacian_matrix(g)
    out = np.zeros((steps + 1, g.nv))
    out[0] = np.asarray(u0, dtype=float)
    for n in range(steps):
        out[n + 1] = out[n] + lap @ out[n]
    return out


def total_mass(g: SWGraph, u) -> float:
    return float(vertex_weights(g) @ np.asarray(u, dtype=float))


@dataclass
class BoundaryOps:
    omega: list
    closure: list
    boundary: list
    lap: LinMap  # rows at omega, columns at the closure
    res: LinMap  # closure -> boundary selection


def boundary_ops(g: SWGraph, omega: Iterable) -> BoundaryOps:
    om = set(omega)
    if not om:
        raise GraphError("empty vertex subset")
    bad = [x for x in om if x not in g.index]
    if bad:
        raise GraphError(f"unknown vertices {bad}")
    closed = set(om)
    for x in om:
        closed.update(g.neighbors(x))
    closure = [v for v in g.vertices if v in closed]
    omega_l = [v for v in g.vertices if v in om]
    bnd = [v for v in closure if v not in om]
    L = laplacian_matrix(g)
    rows = [g.index[v] for v in omega_l]
    cols = [g.index[v] for v in closure]
    lap = LinMap(LinSpace(len(closure), "closure"), LinSpace(len(omega_l), "omega"), L[np.ix_(rows, cols)])
    pos = {v: i for i, v in enumerate(closure)}
    sel = np.zeros((len(bnd), len(closure)))
    for r, v in enumerate(bnd):
        sel[r, pos[v]] = 1.0
    res = LinMap(lap.dom, LinSpace(len(bnd), "boundary"), sel)
    return BoundaryOps(omega_l, closure, bnd, lap, res)


# -- time-sliced operators ----------------------------------------------------

def _drop_last(T: int, n: int):
    """``R^{(T+1) n} -> R^{T n}`` keeping steps 0..T-1."""
    return sp.eye(T * n, (T + 1) * n, format="csr")


def _forward_diff(T: int, n: int):
    D = sp.diags([-np.ones(T), np.ones(T)], [0, 1], shape=(T, T + 1))
    return sp.kron(D, sp.identity(n), format="csr")


def _slices(T: int, m) -> sp.csr_matrix:
    return sp.kron(sp.identity(T), sp.csr_matrix(m), format="csr")


def _lin_graph(vertices, edges, labels=None) -> FinCatPresentation:
    return FinCatPresentation(Graph(vertices, edges, labels))


LINEAR = LinearSemantics()


def model_heat(g: SWGraph, T: int, k: float = 1.0) -> Diagram:
    """Two parallel arrows ``C => Cdot``: forward difference and ``k`` times the Laplacian."""
    V = g.nv
    C, Cd = LinSpace((T + 1) * V, "C"), LinSpace(T * V, "Cdot")
    shape = _lin_graph(["C", "Cdot"], [("dt", "C", "Cdot"), ("lap", "C", "Cdot")],
                       {"dt": "∂t", "lap": "kΔ" if k != 1.0 else "Δ"})
    lap = k * _slices(T, laplacian_matrix(g)) @ _drop_last(T, V)
    return build_diagram(shape, LINEAR, {"C": C, "Cdot": Cd},
                         {"dt": LinMap(C, Cd, _forward_diff(T, V)), "lap": LinMap(C, Cd, lap)},
                         name="heat")


def _singleton(name: str, space: LinSpace) -> Diagram:
    return build_diagram(_lin_graph([name], []), LINEAR, {name: space}, {}, name=name)


def model_heat_ivp(g: SWGraph, T: int, k: float = 1.0) -> DiagramMorphism:
    """Heat diagram to the initial-data singleton ``u0``, component ``res_{t=0}``."""
    heat = model_heat(g, T, k)
    u0 = _singleton("u0", LinSpace(g.nv, "u0"))
    R = FinFunctor(u0.shape, heat.shape, {"u0": "C"}, {})
    res = LinMap(heat.ob("C"), u0.ob("u0"), sp.eye(g.nv, (T + 1) * g.nv, format="csr"))
    return make_morphism(heat, u0, R, {"u0": res})


def model_dirichlet(g: SWGraph, omega: Iterable) -> DiagramMorphism:
    """Cospan ``u -> r <- z`` (Laplacian on the closure, zero map) to the boundary singleton."""
    ops = boundary_ops(g, omega)
    U, Rsp, Z = ops.lap.dom, ops.lap.cod, LinSpace(0, "0")
    shape = _lin_graph(["u", "r", "z"], [("lap", "u", "r"), ("zero", "z", "r")],
                       {"lap": "Δ|Ω", "zero": "0"})
    cospan = build_diagram(shape, LINEAR, {"u": U, "r": Rsp, "z": Z},
                           {"lap": ops.lap, "zero": LinMap(Z, Rsp, np.zeros((Rsp.dim, 0)))},
                           name="dirichlet")
    ub = _singleton("ub", ops.res.cod)
    R = FinFunctor(ub.shape, cospan.shape, {"ub": "u"}, {})
    m = make_morphism(cospan, ub, R, {"ub": ops.res})
    m.dom.provenance["boundary_ops"] = ops
    return m


def dirichlet_oracle(g: SWGraph, omega: Iterable, gvals: Mapping) -> dict:
    """Dense solve of ``Lap u = 0`` on ``omega`` with boundary values substituted."""
    L = laplacian_matrix(g)
    om = [v for v in g.vertices if v in set(omega)]
    bnd = list(gvals)
    A = L[np.ix_([g.index[v] for v in om], [g.index[v] for v in om])]
    B = L[np.ix_([g.index[v] for v in om], [g.index[v] for v in bnd])]
    u = np.linalg.solve(A, -B @ np.array([gvals[v] for v in bnd], dtype=float))
    return dict(zip(om, u))


# -- diffusion and its pieces -------------------------------------------------

@dataclass
class _Spaces:
    C: LinSpace
    Vt: LinSpace
    Et: LinSpace


def _spaces(g: SWGraph, T: int) -> _Spaces:
    return _Spaces(LinSpace((T + 1) * g.nv, "C"), LinSpace(T * g.nv, "V_t"), LinSpace(T * g.ne, "E_t"))


def _diffusion_maps(g: SWGraph, T: int, k):
    S = _spaces(g, T)
    d0 = incidence_d0(g).matrix
    s0, s1 = stars(g, k)
    return {
        "d": LinMap(S.C, S.Et, _slices(T, d0) @ _drop_last(T, g.nv)),
        "kstar": LinMap(S.Et, S.Et, _slices(T, s1.matrix)),
        "dual_d": LinMap(S.Et, S.Vt, _slices(T, -d0.T)),
        "star_inv": LinMap(S.Vt, S.Vt, _slices(T, np.diag(1.0 / np.diag(s0.matrix)))),
        "dt": LinMap(S.C, S.Vt, _forward_diff(T, g.nv)),
    }, S


DIFFUSION_LABELS = {"d": "d", "kstar": "k⋆", "dual_d": "d", "star_inv": "⋆⁻¹", "dt": "∂t"}


def diffusion_diagram(g: SWGraph, T: int, k=1.0) -> Diagram:
    maps, S = _diffusion_maps(g, T, k)
    shape = _lin_graph(
        ["C", "dC", "phi", "dphi", "Cdot"],
        [("d", "C", "dC"), ("kstar", "dC", "phi"), ("dual_d", "phi", "dphi"),
         ("star_inv", "dphi", "Cdot"), ("dt", "C", "Cdot")], DIFFUSION_LABELS)
    obs = {"C": S.C, "dC": S.Et, "phi": S.Et, "dphi": S.Vt, "Cdot": S.Vt}
    return build_diagram(shape, LINEAR, obs, maps, name="diffusion")


def model_diffusion(g: SWGraph, k=1.0, T: int = 1) -> OpenDiagram:
    """Closed diffusion system exposing the concentration ``C``."""
    return make_open(diffusion_diagram(g, T, k), [["C"]])


def model_fick(g: SWGraph, k=1.0, T: int = 1) -> OpenDiagram:
    """Fick's first law ``C -> dC -> phi`` exposing ``C`` and ``phi``."""
    maps, S = _diffusion_maps(g, T, k)
    shape = _lin_graph(["C", "dC", "phi"], [("d", "C", "dC"), ("kstar", "dC", "phi")], DIFFUSION_LABELS)
    d = build_diagram(shape, LINEAR, {"C": S.C, "dC": S.Et, "phi": S.Et},
                      {"d": maps["d"], "kstar": maps["kstar"]}, name="fick")
    return make_open(d, [["C"], ["phi"]])


def model_conservation(g: SWGraph, T: int = 1) -> OpenDiagram:
    """Mass conservation ``C -> Cdot <- dphi <- phi`` exposing ``C`` and ``phi``."""
    maps, S = _diffusion_maps(g, T, 1.0)
    shape = _lin_graph(["C", "Cdot", "dphi", "phi"],
                       [("dt", "C", "Cdot"), ("dual_d", "phi", "dphi"), ("star_inv", "dphi", "Cdot")],
                       DIFFUSION_LABELS)
    d = build_diagram(shape, LINEAR, {"C": S.C, "Cdot": S.Vt, "dphi": S.Vt, "phi": S.Et},
                      {e: maps[e] for e in ("dt", "dual_d", "star_inv")}, name="conservation")
    return make_open(d, [["C"], ["phi"]])


def model_advection(g: SWGraph, v, T: int = 1) -> OpenDiagram:
    """Advective flux ``C -> Ctilde -> phi`` exposing ``C`` and ``phi``.

    ``v`` is a flow rate per oriented edge (scalar or mapping). The flux is
    ``-diag(v) avg C`` in the sign convention of the diffusion flux, so the
    conservation box turns it into ``star0^-1 d0^T diag(v) avg C``.
    """
    S = _spaces(g, T)
    vs = np.array([float(v[e]) for e in g.oriented]) if isinstance(v, Mapping) else np.full(g.ne, float(v))
    s0 = np.diag(vertex_weights(g))
    to_density = _slices(T, s0) @ _drop_last(T, g.nv)
    flux = _slices(T, -np.diag(vs) @ averaging(g) @ np.diag(1.0 / np.diag(s0)))
    shape = _lin_graph(["C", "Ctilde", "phi"], [("star", "C", "Ctilde"), ("iota_v", "Ctilde", "phi")],
                       {"star": "⋆", "iota_v": "ι_v"})
    d = build_diagram(shape, LINEAR, {"C": S.C, "Ctilde": S.Vt, "phi": S.Et},
                      {"star": LinMap(S.C, S.Vt, to_density), "iota_v": LinMap(S.Vt, S.Et, flux)},
                      name="advection")
    return make_open(d, [["C"], ["phi"]])


def model_superposition(space: LinSpace, names=("phi1", "phi2", "phi")) -> OpenDiagram:
    """Product node ``P = a x b`` with projections and the sum ``P -> c``."""
    a, b, c = names
    P, proj, _ = direct_sum([space, space], label="P")
    s = sum_map(2, space)
    shape = _lin_graph(["P", a, b, c], [("pi1", "P", a), ("pi2", "P", b), ("plus", "P", c)],
                       {"P": "⊚", "plus": "+", "pi1": "π1", "pi2": "π2"})
    d = build_diagram(shape, LINEAR, {"P": P, a: space, b: space, c: space},
                      {"pi1": proj[0], "pi2": proj[1], "plus": LinMap(P, space, s.matrix)},
                      [ProductNode("P", (a, b), ("pi1", "pi2"), ("plus",))], name="superposition")
    return make_open(d, [[a], [b], [c]])


def model_open_conservation(g: SWGraph, T: int = 1) -> OpenDiagram:
    """Conservation with a source: ``Cdot = Cdot_flux + S`` via a product node."""
    maps, S = _diffusion_maps(g, T, 1.0)
    P, proj, _ = direct_sum([S.Vt, S.Vt], label="P")
    s = LinMap(P, S.Vt, sum_map(2, S.Vt).matrix)
    shape = _lin_graph(
        ["C", "Cdot", "P", "Cflux", "S", "dphi", "phi"],
        [("dt", "C", "Cdot"), ("plus", "P", "Cdot"), ("pi1", "P", "Cflux"), ("pi2", "P", "S"),
         ("star_inv", "dphi", "Cflux"), ("dual_d", "phi", "dphi")],
        {**DIFFUSION_LABELS, "P": "⊚", "plus": "+", "pi1": "π1", "pi2": "π2"})
    obs = {"C": S.C, "Cdot": S.Vt, "P": P, "Cflux": S.Vt, "S": S.Vt, "dphi": S.Vt, "phi": S.Et}
    homs = {"dt": maps["dt"], "plus": s, "pi1": proj[0], "pi2": proj[1],
            "star_inv": maps["star_inv"], "dual_d": maps["dual_d"]}
    d = build_diagram(shape, LINEAR, obs, homs,
                      [ProductNode("P", ("Cflux", "S"), ("pi1", "pi2"), ("plus",))], name="open_conservation")
    return make_open(d, [["C"], ["phi"], ["S"]])


def model_reaction(g: SWGraph, beta: float, T: int = 1) -> OpenDiagram:
    """First-order growth or decay ``C -> S`` with rate ``beta``, exposing ``C`` and ``S``."""
    S = _spaces(g, T)
    shape = _lin_graph(["C", "S"], [("beta", "C", "S")], {"beta": "β"})
    d = build_diagram(shape, LINEAR, {"C": S.C, "S": S.Vt},
                      {"beta": LinMap(S.C, S.Vt, beta * _drop_last(T, g.nv))}, name="reaction")
    return make_open(d, [["C"], ["S"]])


def uwd_transport(g: SWGraph, T: int = 1) -> UWD:
    S = _spaces(g, T)
    return UWD({"C": S.C, "phi": S.Et},
               [("flux", ["C", "phi"]), ("conservation", ["C", "phi"])], ["C"])


def uwd_flux_superposition(g: SWGraph, T: int = 1) -> UWD:
    """Diffusive plus advective flux, exposing ``C`` and the total ``phi``."""
    S = _spaces(g, T)
    return UWD({"C": S.C, "phi1": S.Et, "phi2": S.Et, "phi": S.Et},
               [("diffusion", ["C", "phi1"]), ("advection", ["C", "phi2"]),
                ("superposition", ["phi1", "phi2", "phi"])], ["C", "phi"])


def uwd_open_transport(g: SWGraph, T: int = 1) -> UWD:
    S = _spaces(g, T)
    return UWD({"C": S.C, "phi": S.Et, "S": S.Vt},
               [("flux", ["C", "phi"]), ("conservation", ["C", "phi", "S"])], ["C", "S"])


def uwd_transport_transformation(g: SWGraph, T: int = 1) -> UWD:
    S = _spaces(g, T)
    return UWD({"C": S.C, "S": S.Vt},
               [("transport", ["C", "S"]), ("transformation", ["C", "S"])], ["C"])


def model_diffusion_to_heat(g: SWGraph, T: int, k: float = 1.0) -> DiagramMorphism:
    """Strict morphism from diffusion to heat; ``kLap`` goes to the four-arrow chain."""
    diff = diffusion_diagram(g, T, k)
    heat = model_heat(g, T, k)
    R = FinFunctor(heat.shape, diff.shape, {"C": "C", "Cdot": "Cdot"},
                   {"dt": ["dt"], "lap": ["d", "kstar", "dual_d", "star_inv"]})
    return make_morphism(diff, heat, R, {"C": identity(diff.ob("C")), "Cdot": identity(diff.ob("Cdot"))})


# -- symbolic models ----------------------------------------------------------

def lie_signature(with_rule: bool = True) -> OperatorSignature:
    sig = OperatorSignature(["Wn", "Wn1"], [("L", "Wn", "Wn"), ("iota", "Wn", "Wn1"), ("d", "Wn1", "Wn")])
    if with_rule:
        sig.add_rule(["L"], ["iota", "d"])
    return sig


def model_lie(with_rule: bool = True) -> DiagramMorphism:
    """Inclusion of the single Lie-derivative arrow into the triangle ``L = iota ; d``.

    As a backward morphism the triangle is the domain; components are identities.
    """
    sig = lie_signature(with_rule)
    sem = SymbolicSemantics(sig)
    tri_shape = _lin_graph(["a", "c", "b"], [("iota", "a", "c"), ("d", "c", "b"), ("L", "a", "b")],
                           {"iota": "ι_v", "L": "L_v"})
    tri = build_diagram(tri_shape, sem, {"a": "Wn", "c": "Wn1", "b": "Wn"},
                        {"iota": sig.morphism("Wn", "iota"), "d": sig.morphism("Wn1", "d"),
                         "L": sig.morphism("Wn", "L")}, name="lie_triangle")
    one_shape = _lin_graph(["a", "b"], [("L", "a", "b")], {"L": "L_v"})
    one = build_diagram(one_shape, sem, {"a": "Wn", "b": "Wn"}, {"L": sig.morphism("Wn", "L")}, name="lie")
    R = FinFunctor(one_shape, tri_shape, {"a": "a", "b": "b"}, {"L": ["L"]})
    return make_morphism(tri, one, R, {"a": sem.identity("Wn"), "b": sem.identity("Wn")})


def maxwell_signature() -> OperatorSignature:
    """Forms of degree 0..3 (ordinary ``O*``, twisted ``T*``) plus the zero space."""
    sorts = ["O0", "O1", "O2", "O3", "T0", "T1", "T2", "T3", "Z"]
    sig = OperatorSignature(sorts)
    for k in range(3):
        sig.add_op("d", f"O{k}", f"O{k + 1}")
        sig.add_op("d", f"T{k}", f"T{k + 1}")
    for k in range(4):
        sig.add_op("dt", f"O{k}", f"O{k}")
        sig.add_op("dt", f"T{k}", f"T{k}")
    sig.add_op("eps_star", "O1", "T2")
    sig.add_op("inv_mu_star", "O2", "T1")
    sig.add_op("sigma_star", "O1", "T2")
    sig.add_product("P1", ["O1", "O1"])
    sig.add_product("P2", ["T2", "T2"])
    sig.add_rule(["d", "d"], None)
    return sig


def model_maxwell_house() -> Diagram:
    """Maxwell's equations in matter with potentials and Ohm's law, as a cartesian diagram."""
    sig = maxwell_signature()
    sem = SymbolicSemantics(sig)
    obs = {"phi": "O0", "mdphi": "O1", "A": "O1", "sumE": "P1", "mAdot": "O1", "E": "O1",
           "B": "O2", "Bdot": "O2", "O3": "O3", "rho": "T3", "J": "T2", "mDdot": "T2",
           "sumJ": "P2", "D": "T2", "dH": "T2", "H": "T1"}
    M = sig.morphism
    edges = [
        ("sumE_plus", "sumE", "E", M("P1", "P1.+"), "+"),
        ("sumE_pi1", "sumE", "mdphi", M("P1", "P1.pi1"), "π1"),
        ("sumE_pi2", "sumE", "mAdot", M("P1", "P1.pi2"), "π2"),
        ("mdphi", "phi", "mdphi", M("O0", "d", -1), "-d"),
        ("mAdot", "A", "mAdot", M("O1", "dt", -1), "-∂t"),
        ("faraday", "E", "Bdot", M("O1", "d", -1), "-d"),
        ("curlA", "A", "B", M("O1", "d"), "d"),
        ("Bdot", "B", "Bdot", M("O2", "dt"), "∂t"),
        ("D_const", "E", "D", M("O1", "eps_star"), "ε⋆"),
        ("H_const", "B", "H", M("O2", "inv_mu_star"), "(1/μ)⋆"),
        ("divB", "B", "O3", M("O2", "d"), "d"),
        ("mDdot", "D", "mDdot", M("T2", "dt", -1), "-∂t"),
        ("curlH", "H", "dH", M("T1", "d"), "d"),
        ("gauss", "D", "rho", M("T2", "d"), "d"),
        ("sumJ_pi1", "sumJ", "dH", M("P2", "P2.pi1"), "π1"),
        ("sumJ_pi2", "sumJ", "mDdot", M("P2", "P2.pi2"), "π2"),
        ("sumJ_plus", "sumJ", "J", M("P2", "P2.+"), "+"),
        ("ohm", "E", "J", M("O1", "sigma_star"), "σ⋆"),
    ]
    labels = {e: lab for e, _, _, _, lab in edges}
    labels.update({"sumE": "⊚", "sumJ": "⊚", "mdphi": "-dφ", "mAdot": "-∂tA", "Bdot": "∂tB",
                   "mDdot": "-∂tD", "dH": "dH", "O3": "Ω3"})
    shape = _lin_graph(list(obs), [(e, s, t) for e, s, t, _, _ in edges], labels)
    products = [ProductNode("sumE", ("mdphi", "mAdot"), ("sumE_pi1", "sumE_pi2"), ("sumE_plus",)),
                ProductNode("sumJ", ("dH", "mDdot"), ("sumJ_pi1", "sumJ_pi2"), ("sumJ_plus",))]
    return build_diagram(shape, sem, obs, {e: m for e, _, _, m, _ in edges}, products, name="maxwell_house")


def static_maxwell_faraday(with_rule: bool = True) -> tuple[Diagram, Diagram, DiagramMorphism]:
    """Potentials diagram, fields diagram, and the morphism between them.

    Without the rule ``d d -> 0`` naturality at the zero arrows cannot be
    proven; the morphism is then built with those squares assumed.
    """
    sig = OperatorSignature(["O0", "O1", "O2", "O3", "Z"])
    for k in range(3):
        sig.add_op("d", f"O{k}", f"O{k + 1}")
    if with_rule:
        sig.add_rule(["d", "d"], None)
    sem = SymbolicSemantics(sig)
    M = sig.morphism
    pot_shape = _lin_graph(
        ["phi", "E", "E2", "A", "B", "B3"],
        [("mdphi", "phi", "E"), ("mdE", "E", "E2"), ("dA", "A", "B"), ("dB", "B", "B3")],
        {"mdphi": "-d", "mdE": "-d", "dA": "d", "dB": "d", "E2": "Ω2", "B3": "Ω3"})
    pot = build_diagram(pot_shape, sem,
                        {"phi": "O0", "E": "O1", "E2": "O2", "A": "O1", "B": "O2", "B3": "O3"},
                        {"mdphi": M("O0", "d", -1), "mdE": M("O1", "d", -1),
                         "dA": M("O1", "d"), "dB": M("O2", "d")}, name="potentials")
    fld_shape = _lin_graph(
        ["E", "E2", "Z1", "B", "B3", "Z2"],
        [("mdE", "E", "E2"), ("z1", "Z1", "E2"), ("dB", "B", "B3"), ("z2", "Z2", "B3")],
        {"mdE": "-d", "dB": "d", "z1": "0", "z2": "0", "E2": "Ω2", "B3": "Ω3", "Z1": "0", "Z2": "0"})
    fld = build_diagram(fld_shape, sem,
                        {"E": "O1", "E2": "O2", "Z1": "Z", "B": "O2", "B3": "O3", "Z2": "Z"},
                        {"mdE": M("O1", "d", -1), "z1": sym_zero("Z", "O2"),
                         "dB": M("O2", "d"), "z2": sym_zero("Z", "O3")}, name="fields")
    R = FinFunctor(fld_shape, pot_shape,
                   {"E": "E", "E2": "E2", "Z1": "phi", "B": "B", "B3": "B3", "Z2": "A"},
                   {"mdE": ["mdE"], "z1": ["mdphi", "mdE"], "dB": ["dB"], "z2": ["dA", "dB"]})
    comps = {"E": sem.identity("O1"), "E2": sem.identity("O2"), "Z1": sym_zero("O0", "Z"),
             "B": sem.identity("O2"), "B3": sem.identity("O3"), "Z2": sym_zero("O1", "Z")}
    return pot, fld, make_morphism(pot, fld, R, comps, assume=not with_rule)


CATALOG = {
    "heat": "model_heat(graph, T, k=1): parallel pair C => Cdot",
    "heat_ivp": "model_heat_ivp(graph, T): heat diagram to initial data via res_{t=0}",
    "dirichlet": "model_dirichlet(graph, omega): cospan to boundary data via res",
    "diffusion": "model_diffusion(graph, k, T): five-object diffusion system exposing C",
    "fick": "model_fick(graph, k, T): Fick's first law exposing C, phi",
    "conservation": "model_conservation(graph, T): mass conservation exposing C, phi",
    "advection": "model_advection(graph, v, T): advective flux exposing C, phi",
    "superposition": "model_superposition(space): sum of two fluxes through a product node",
    "open_conservation": "model_open_conservation(graph, T): conservation with source S",
    "reaction": "model_reaction(graph, beta, T): first-order growth or decay C -> S",
    "diffusion_to_heat": "model_diffusion_to_heat(graph, T, k): strict morphism, weak equivalence",
    "lie": "model_lie(): Lie derivative triangle to single arrow",
    "maxwell_house": "model_maxwell_house(): symbolic Maxwell's equations in matter",
    "static_maxwell_faraday": "static_maxwell_faraday(): potentials -> fields morphism",
}

"""Morphisms of diagrams in the backward direction, and collages.

A morphism ``(R, rho): (J, D) -> (J', D')`` has a shape functor ``R: J' -> J``
and components ``rho[j']: D(R j') -> D'(j')`` natural in ``j'``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .diagram import Diagram, DiagramError, ProductNode, build_diagram
from .fincat import (
    FinCatPresentation, FinFunctor, Graph, Path, check_functor, compose_functors, make_path,
    _fresh,
)


class MorphismError(ValueError):
    pass


@dataclass
class NaturalityEntry:
    edge: str
    verdict: str  # Commutes, Fails, NotProven
    witness: str = ""

    def __str__(self) -> str:
        tail = f" ({self.witness})" if self.witness else ""
        return f"naturality at {self.edge!r}: {self.verdict}{tail}"


@dataclass
class NaturalityReport:
    entries: list[NaturalityEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.verdict == "Commutes" for e in self.entries)

    @property
    def failures(self) -> list[NaturalityEntry]:
        return [e for e in self.entries if e.verdict == "Fails"]

    @property
    def unproven(self) -> list[NaturalityEntry]:
        return [e for e in self.entries if e.verdict == "NotProven"]

    def __str__(self) -> str:
        return "\n".join(str(e) for e in self.entries) or "naturality: no arrows"


class DiagramMorphism:
    def __init__(self, dom: Diagram, cod: Diagram, R: FinFunctor, components: Mapping[str, object]):
        self.dom = dom
        self.cod = cod
        self.R = R
        self.components = {j: components[j] for j in cod.vertices}
        self.assumed: list[str] = []
        sem = dom.semantics
        self.strict = all(sem.is_identity(c) for c in self.components.values())
        self.strong = all(sem.invert(c) is not None for c in self.components.values())

    def __repr__(self) -> str:
        kind = "strict" if self.strict else ("strong" if self.strong else "lax")
        return f"DiagramMorphism({self.dom.name or '?'} -> {self.cod.name or '?'}, {kind})"


def _naturality(dom: Diagram, cod: Diagram, R: FinFunctor, components: Mapping[str, object]) -> NaturalityReport:
    sem = dom.semantics
    report = NaturalityReport()
    for f in cod.edges:
        j, k = cod.shape.src(f), cod.shape.tgt(f)
        lhs = sem.compose(dom.map_path(R.edge_map[f]), components[k])
        rhs = sem.compose(components[j], cod.hom(f))
        verdict = sem.equal(lhs, rhs)
        if verdict is True:
            report.entries.append(NaturalityEntry(f, "Commutes"))
        elif verdict is None:
            report.entries.append(NaturalityEntry(f, "NotProven", sem.witness(lhs, rhs)))
        else:
            report.entries.append(NaturalityEntry(f, "Fails", sem.witness(lhs, rhs)))
    return report


def make_morphism(dom: Diagram, cod: Diagram, R: FinFunctor, components: Mapping[str, object],
                  assume: bool = False) -> DiagramMorphism:
    """Validate and build a morphism ``dom -> cod`` with ``R: cod.shape -> dom.shape``."""
    if dom.semantics != cod.semantics:
        raise MorphismError("domain and codomain use different semantics")
    if R.dom != cod.shape or R.cod != dom.shape:
        raise MorphismError("R must run from the codomain shape to the domain shape")
    rep = check_functor(R)
    if not rep.ok:
        raise MorphismError(f"R is not a functor: {'; '.join(rep.problems)}")
    sem = dom.semantics
    missing = [j for j in cod.vertices if j not in components]
    if missing:
        raise MorphismError(f"missing components at {missing}")
    for j in cod.vertices:
        c = components[j]
        sem.check_morphism(c)
        want_dom, want_cod = dom.ob(R(j)), cod.ob(j)
        if not sem.same_object(sem.dom(c), want_dom) or not sem.same_object(sem.cod(c), want_cod):
            raise MorphismError(
                f"component at {j!r} must map {want_dom} -> {want_cod}, got {sem.dom(c)} -> {sem.cod(c)}")
    report = _naturality(dom, cod, R, components)
    if report.failures:
        raise MorphismError("naturality fails: " + "; ".join(str(e) for e in report.failures))
    if report.unproven and not assume:
        raise MorphismError("naturality not proven: " + "; ".join(str(e) for e in report.unproven))
    m = DiagramMorphism(dom, cod, R, components)
    m.assumed = [e.edge for e in report.unproven]
    return m


def identity_morphism(d: Diagram) -> DiagramMorphism:
    return make_morphism(d, d, FinFunctor.identity(d.shape),
                         {v: d.semantics.identity(d.ob(v)) for v in d.vertices})


def check_naturality(m: DiagramMorphism) -> NaturalityReport:
    return _naturality(m.dom, m.cod, m.R, m.components)


def compose_morphisms(m1: DiagramMorphism, m2: DiagramMorphism) -> DiagramMorphism:
    """``m1: D -> D'`` then ``m2: D' -> D''``."""
    if m1.cod is not m2.dom and (m1.cod.shape != m2.dom.shape or m1.cod.ob_map != m2.dom.ob_map):
        raise MorphismError("morphisms are not composable")
    sem = m1.dom.semantics
    R = compose_functors(m2.R, m1.R)
    comps = {j: sem.compose(m1.components[m2.R(j)], m2.components[j]) for j in m2.cod.vertices}
    return make_morphism(m1.dom, m2.cod, R, comps, assume=bool(m1.assumed or m2.assumed))


def collage(m: DiagramMorphism, name: str = "") -> Diagram:
    """Single diagram on ``Ob J + Ob J'`` with one component arrow per ``j'``.

    Vertex and edge ids of ``J`` are kept; ids of ``J'`` that collide are
    primed. Component arrows are named ``rho[j']``. The result records its
    inclusions in ``provenance``: ``dom`` and ``cod`` (functors into the
    collage shape) and ``components`` (``j'`` to edge id).
    """
    J, Jp = m.dom.shape, m.cod.shape
    taken_v = set(J.vertices)
    vmap_p = {}
    for v in Jp.vertices:
        vmap_p[v] = _fresh(v, taken_v)
        taken_v.add(vmap_p[v])
    taken_e = set(J.edges)
    emap_p = {}
    for e in Jp.edges:
        emap_p[e] = _fresh(e, taken_e)
        taken_e.add(emap_p[e])
    comp_edge = {}
    for j in Jp.vertices:
        comp_edge[j] = _fresh(f"rho[{j}]", taken_e)
        taken_e.add(comp_edge[j])

    labels = dict(J.graph.labels)
    for v in Jp.vertices:
        labels[vmap_p[v]] = Jp.graph.label(v)
    for e in Jp.edges:
        labels[emap_p[e]] = Jp.graph.label(e)
    edges = J.graph.edge_triples()
    edges += [(emap_p[e], vmap_p[Jp.src(e)], vmap_p[Jp.tgt(e)]) for e in Jp.edges]
    edges += [(comp_edge[j], m.R(j), vmap_p[j]) for j in Jp.vertices]
    graph = Graph(list(J.vertices) + [vmap_p[v] for v in Jp.vertices], edges, labels)

    def lift_p(p: Path) -> Path:
        return make_path(graph, [emap_p[e] for e in p.edges], vmap_p[p.start])

    def lift_j(p: Path) -> Path:
        return make_path(graph, list(p.edges), p.start)

    relations = [(lift_j(a), lift_j(b)) for a, b in J.relations]
    relations += [(lift_p(a), lift_p(b)) for a, b in Jp.relations]
    for f in Jp.edges:
        j, k = Jp.src(f), Jp.tgt(f)
        Rf = m.R.edge_map[f]
        lhs = make_path(graph, list(Rf.edges) + [comp_edge[k]], m.R(j))
        rhs = make_path(graph, [comp_edge[j], emap_p[f]])
        relations.append((lhs, rhs))
    shape = FinCatPresentation(graph, relations)

    ob_map = dict(m.dom.ob_map)
    ob_map.update({vmap_p[v]: m.cod.ob(v) for v in Jp.vertices})
    edge_map = dict(m.dom.edge_map)
    edge_map.update({emap_p[e]: m.cod.hom(e) for e in Jp.edges})
    edge_map.update({comp_edge[j]: m.components[j] for j in Jp.vertices})
    products = list(m.dom.products)
    for pn in m.cod.products:
        products.append(ProductNode(vmap_p[pn.vertex], tuple(vmap_p[x] for x in pn.factors),
                                    tuple(emap_p[e] for e in pn.projections),
                                    tuple(emap_p[e] for e in pn.sums)))
    try:
        c = build_diagram(shape, m.dom.semantics, ob_map, edge_map, products,
                          name=name or f"collage({m.dom.name},{m.cod.name})",
                          assume=bool(m.assumed or m.dom.assumed or m.cod.assumed))
    except DiagramError as exc:
        raise MorphismError(f"collage failed to validate: {exc}") from None
    c.provenance["dom"] = FinFunctor(J, shape, {v: v for v in J.vertices},
                                     {e: lift_j(J.edge_path(e)) for e in J.edges})
    c.provenance["cod"] = FinFunctor(Jp, shape, vmap_p, {e: lift_p(Jp.edge_path(e)) for e in Jp.edges})
    c.provenance["components"] = comp_edge
    return c


@dataclass
class ForwardMorphism:
    """A morphism ``(R, rho): (J, D) -> (J', D')`` in the forward direction.

    Here ``R: J -> J'`` and ``rho[j]: D(j) -> D'(R j)``. Used only as input to
    relative initiality checks.
    """

    dom: Diagram
    cod: Diagram
    R: FinFunctor
    components: dict

    def naturality(self) -> NaturalityReport:
        sem = self.dom.semantics
        report = NaturalityReport()
        for h in self.dom.edges:
            j, k = self.dom.shape.src(h), self.dom.shape.tgt(h)
            lhs = sem.compose(self.dom.hom(h), self.components[k])
            rhs = sem.compose(self.components[j], self.cod.map_path(self.R.edge_map[h]))
            v = sem.equal(lhs, rhs)
            report.entries.append(NaturalityEntry(
                h, "Commutes" if v is True else ("NotProven" if v is None else "Fails")))
        return report


def inverse_forward(m: DiagramMorphism) -> ForwardMorphism:
    """The forward partner ``(R, rho^-1): D' -> D`` of a strong morphism."""
    sem = m.dom.semantics
    comps = {}
    for j, c in m.components.items():
        inv = sem.invert(c)
        if inv is None:
            raise MorphismError(f"component at {j!r} is not invertible")
        comps[j] = inv
    return ForwardMorphism(m.cod, m.dom, m.R, comps)

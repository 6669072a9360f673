"""Open diagrams and their composition by undirected wiring diagrams.

An open diagram exposes some of its objects through discrete feet with
identity legs. A UWD wires box ports to typed junctions; applying it to one
open diagram per box glues the exposed objects wired to a common junction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .diagram import Diagram, DiagramError, ProductNode, build_diagram
from .fincat import FinCatPresentation, Graph, Path, make_path


class ComposeError(ValueError):
    pass


@dataclass
class OpenDiagram:
    """``apex`` with feet; ``legs[i]`` lists the apex vertices exposed by foot ``i``."""

    apex: Diagram
    legs: list[tuple[str, ...]]

    @property
    def feet(self) -> list[tuple[object, ...]]:
        return [tuple(self.apex.ob(v) for v in leg) for leg in self.legs]

    def __repr__(self) -> str:
        return f"OpenDiagram({self.apex.name or '?'}, feet={self.legs})"


def make_open(apex: Diagram, exposed: Sequence[Sequence[str]]) -> OpenDiagram:
    legs = []
    for i, foot in enumerate(exposed):
        foot = tuple(foot)
        missing = [v for v in foot if v not in apex.ob_map]
        if missing:
            raise ComposeError(f"foot {i}: unknown vertices {missing}")
        if len(set(foot)) != len(foot):
            raise ComposeError(f"foot {i}: leg is not injective")
        legs.append(foot)
    return OpenDiagram(apex, legs)


class UWD:
    """Typed undirected wiring diagram.

    ``junctions`` maps names to types (semantic objects), ``boxes`` is a list of
    ``(name, [junction per port])`` and ``outer`` lists the junction wired to
    each outer port.
    """

    def __init__(self, junctions: dict, boxes: Sequence[tuple[str, Sequence[str]]], outer: Sequence[str]):
        self.junctions = dict(junctions)
        self.boxes: list[tuple[str, tuple[str, ...]]] = []
        names = set()
        for name, ports in boxes:
            if name in names:
                raise ComposeError(f"duplicate box {name!r}")
            names.add(name)
            bad = [j for j in ports if j not in self.junctions]
            if bad:
                raise ComposeError(f"box {name!r}: unknown junctions {bad}")
            self.boxes.append((name, tuple(ports)))
        bad = [j for j in outer if j not in self.junctions]
        if bad:
            raise ComposeError(f"outer ports wired to unknown junctions {bad}")
        self.outer: tuple[str, ...] = tuple(outer)

    @property
    def box_names(self) -> list[str]:
        return [b for b, _ in self.boxes]

    def port_types(self, box: str) -> list:
        for b, ports in self.boxes:
            if b == box:
                return [self.junctions[j] for j in ports]
        raise ComposeError(f"unknown box {box!r}")

    @property
    def outer_types(self) -> list:
        return [self.junctions[j] for j in self.outer]

    @classmethod
    def identity(cls, types: Sequence, box: str = "box") -> UWD:
        js = {f"j{i}": t for i, t in enumerate(types)}
        return cls(js, [(box, list(js))], list(js))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UWD):
            return NotImplemented
        return (self.junctions == other.junctions and self.boxes == other.boxes
                and self.outer == other.outer)

    def __repr__(self) -> str:
        return f"UWD({len(self.boxes)} boxes, {len(self.junctions)} junctions, outer={list(self.outer)})"


class _UF:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            lo, hi = sorted([ra, rb])
            self.parent[hi] = lo


def _bare_names(qualified: list[str]) -> dict[str, str]:
    """Drop the ``box.`` prefix wherever the bare name stays unique."""
    bare = {q: q.split(".", 1)[1] if "." in q else q for q in qualified}
    counts: dict[str, int] = {}
    for b in bare.values():
        counts[b] = counts.get(b, 0) + 1
    out = {}
    taken = set()
    for q in qualified:
        name = bare[q] if counts[bare[q]] == 1 else q
        while name in taken:
            name = name + "'"
        taken.add(name)
        out[q] = name
    return out


def apply_uwd(u: UWD, fillers: Sequence[OpenDiagram], name: str = "") -> OpenDiagram:
    """Glue fillers along junctions; the result exposes one singleton foot per outer port.

    Each filler foot must be a single object matching the type of its port.
    Vertices wired to the same junction are merged under the lexicographically
    least qualified id ``box.vertex``; prefixes are dropped when unambiguous.
    """
    if len(fillers) != len(u.boxes):
        raise ComposeError(f"{len(u.boxes)} boxes but {len(fillers)} fillers")
    if not fillers:
        raise ComposeError("cannot apply a UWD with no boxes")
    sem = fillers[0].apex.semantics
    for (box, ports), X in zip(u.boxes, fillers):
        if X.apex.semantics != sem:
            raise ComposeError(f"box {box!r}: filler uses different semantics")
        if len(X.legs) != len(ports):
            raise ComposeError(f"box {box!r}: {len(ports)} ports but filler has {len(X.legs)} feet")
        for i, (j, leg) in enumerate(zip(ports, X.legs)):
            if len(leg) != 1:
                raise ComposeError(f"box {box!r} port {i}: feet must be single objects")
            if not sem.same_object(X.apex.ob(leg[0]), u.junctions[j]):
                raise ComposeError(
                    f"box {box!r} port {i}: foot object {X.apex.ob(leg[0])} does not match "
                    f"junction {j!r} of type {u.junctions[j]}")

    uf = _UF()
    qv: list[str] = []
    obj = {}
    for (box, _), X in zip(u.boxes, fillers):
        for v in X.apex.vertices:
            q = f"{box}.{v}"
            qv.append(q)
            obj[q] = X.apex.ob(v)
            uf.add(q)
    junction_rep: dict[str, str] = {}
    for j in u.junctions:
        uf.add(("junction", j))
    for (box, ports), X in zip(u.boxes, fillers):
        for j, leg in zip(ports, X.legs):
            q = f"{box}.{leg[0]}"
            if j in junction_rep:
                uf.union(junction_rep[j], q)
            else:
                junction_rep[j] = q
    for j in u.outer:
        if j not in junction_rep:
            raise ComposeError(f"outer junction {j!r} is not wired to any box")
    for q in qv:
        r = uf.find(q)
        if not sem.same_object(obj[q], obj[r]):
            raise ComposeError(f"junction merges {q!r} and {r!r} with different objects")
    reps = []
    for q in qv:
        r = uf.find(q)
        if r not in reps:
            reps.append(r)
    vname = _bare_names(reps)
    vmap = {q: vname[uf.find(q)] for q in qv}

    qe = []
    edge_data = {}
    labels = {}
    for (box, _), X in zip(u.boxes, fillers):
        g = X.apex.shape.graph
        for e in X.apex.edges:
            q = f"{box}.{e}"
            qe.append(q)
            edge_data[q] = (vmap[f"{box}.{g.src[e]}"], vmap[f"{box}.{g.tgt[e]}"], X.apex.hom(e))
            if e in g.labels:
                labels[q] = g.labels[e]
        for v in X.apex.vertices:
            if v in g.labels:
                labels.setdefault(vmap[f"{box}.{v}"], g.labels[v])
    ename = _bare_names(qe)
    graph = Graph([vname[r] for r in reps],
                  [(ename[q], edge_data[q][0], edge_data[q][1]) for q in qe],
                  {ename.get(k, k): lab for k, lab in labels.items()})
    relations = []
    for (box, _), X in zip(u.boxes, fillers):
        for lhs, rhs in X.apex.shape.relations:
            def tr(p: Path) -> Path:
                return make_path(graph, [ename[f"{box}.{e}"] for e in p.edges], vmap[f"{box}.{p.start}"])
            relations.append((tr(lhs), tr(rhs)))
    shape = FinCatPresentation(graph, relations)

    products: dict[str, ProductNode] = {}
    for (box, _), X in zip(u.boxes, fillers):
        for pn in X.apex.products:
            new = ProductNode(vmap[f"{box}.{pn.vertex}"],
                              tuple(vmap[f"{box}.{x}"] for x in pn.factors),
                              tuple(ename[f"{box}.{e}"] for e in pn.projections),
                              tuple(ename[f"{box}.{e}"] for e in pn.sums))
            old = products.get(new.vertex)
            if old is not None and old != new:
                raise ComposeError(f"conflicting product annotations at {new.vertex!r}")
            products[new.vertex] = new
    try:
        apex = build_diagram(shape, sem, {vmap[q]: obj[q] for q in qv},
                             {ename[q]: edge_data[q][2] for q in qe}, list(products.values()),
                             name=name or "+".join(X.apex.name or b for (b, _), X in zip(u.boxes, fillers)),
                             assume=any(X.apex.assumed for X in fillers))
    except DiagramError as exc:
        raise ComposeError(f"composite fails validation: {exc}") from None
    return OpenDiagram(apex, [(vmap[junction_rep[j]],) for j in u.outer])


def substitute_uwd(outer: UWD, inners: Sequence[UWD | None]) -> UWD:
    """Operad substitution: box ``i`` of ``outer`` is replaced by ``inners[i]``.

    ``None`` keeps the box. Inner junctions not exposed are renamed
    ``box.junction``; exposed ones are identified with the outer junction on
    the matching port.
    """
    if len(inners) != len(outer.boxes):
        raise ComposeError(f"{len(outer.boxes)} boxes but {len(inners)} substitutions")
    uf = _UF()
    jtype = {}
    for j, t in outer.junctions.items():
        uf.add(j)
        jtype[j] = t
    boxes: list[tuple[str, list[str]]] = []
    for (box, ports), inner in zip(outer.boxes, inners):
        if inner is None:
            boxes.append((box, list(ports)))
            continue
        if len(inner.outer) != len(ports):
            raise ComposeError(f"box {box!r}: {len(ports)} ports but inner UWD has {len(inner.outer)}")
        local = {}
        for j, t in inner.junctions.items():
            q = f"{box}.{j}"
            local[j] = q
            uf.add(q)
            jtype[q] = t
        for i, (p, ij) in enumerate(zip(ports, inner.outer)):
            if inner.junctions[ij] != outer.junctions[p]:
                raise ComposeError(f"box {box!r} port {i}: type mismatch")
            uf.union(p, local[ij])
        for ib, iports in inner.boxes:
            boxes.append((ib, [local[j] for j in iports]))
    names = [b for b, _ in boxes]
    dup = {b for b in names if names.count(b) > 1}
    if dup:
        raise ComposeError(f"substitution produces duplicate box names {sorted(dup)}")
    # junction representative: prefer an outer junction name
    keep = {}
    for j in jtype:
        r = uf.find(j)
        cands = [x for x in jtype if uf.find(x) == r]
        outer_names = [x for x in cands if x in outer.junctions]
        keep[j] = min(outer_names) if outer_names else min(cands)
    juncs = {}
    for j in jtype:
        juncs.setdefault(keep[j], jtype[keep[j]])
    return UWD(juncs, [(b, [keep[j] for j in ports]) for b, ports in boxes], [keep[j] for j in outer.outer])


def open_isomorphic(a: OpenDiagram, b: OpenDiagram) -> bool:
    """Search for a foot-preserving shape isomorphism that respects semantics."""
    A, B = a.apex, b.apex
    if A.semantics != B.semantics:
        return False
    sem = A.semantics
    if (len(A.vertices), len(A.edges), len(A.shape.relations), len(A.products)) != \
       (len(B.vertices), len(B.edges), len(B.shape.relations), len(B.products)):
        return False
    if [len(x) for x in a.legs] != [len(x) for x in b.legs]:
        return False
    ga, gb = A.shape.graph, B.shape.graph

    def sig(d: Diagram, g: Graph, v: str):
        return (len(g.out_edges(v)), len(g.in_edges(v)))

    forced: dict[str, str] = {}
    for la, lb in zip(a.legs, b.legs):
        for x, y in zip(la, lb):
            if forced.get(x, y) != y:
                return False
            forced[x] = y
    if len(set(forced.values())) != len(forced):
        return False
    cand = {}
    for v in A.vertices:
        cand[v] = [w for w in B.vertices if sig(A, ga, v) == sig(B, gb, w)
                   and sem.same_object(A.ob(v), B.ob(w))]
        if v in forced:
            cand[v] = [forced[v]] if forced[v] in cand[v] else []
        if not cand[v]:
            return False

    def edges_match(vm: dict) -> bool:
        used = set()
        for e in A.edges:
            s, t = vm[ga.src[e]], vm[ga.tgt[e]]
            found = None
            for f in B.edges:
                if f in used or gb.src[f] != s or gb.tgt[f] != t:
                    continue
                if sem.equal(A.hom(e), B.hom(f)) is True:
                    found = f
                    break
            if found is None:
                return False
            used.add(found)
        return True

    def products_match(vm: dict) -> bool:
        bp = {pn.vertex: pn for pn in B.products}
        for pn in A.products:
            other = bp.get(vm[pn.vertex])
            if other is None or tuple(vm[x] for x in pn.factors) != other.factors:
                return False
        return True

    order = sorted(A.vertices, key=lambda v: (v not in forced, len(cand[v])))
    vm: dict[str, str] = {}
    used: set[str] = set()

    def partial_ok(v: str) -> bool:
        for e in ga.out_edges(v) + ga.in_edges(v):
            s, t = ga.src[e], ga.tgt[e]
            if s in vm and t in vm:
                if not any(gb.src[f] == vm[s] and gb.tgt[f] == vm[t] for f in gb.edges):
                    return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return edges_match(vm) and products_match(vm)
        v = order[i]
        for w in cand[v]:
            if w in used:
                continue
            vm[v] = w
            used.add(w)
            if partial_ok(v) and search(i + 1):
                return True
            del vm[v]
            used.discard(w)
        return False

    return search(0)

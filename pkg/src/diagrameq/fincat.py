"""Finite graphs, path categories and finitely presented categories.

Shapes of diagrams are presented by a directed graph together with a list of
path relations. Morphisms are paths; equality of paths is decided by a
budgeted rewrite search over the relations.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

DEFAULT_BUDGET = 10_000


class FinCatError(ValueError):
    pass


class NonAcyclicError(FinCatError):
    """Raised when a hom-set query needs finiteness but the shape has a cycle."""


class Verdict(Enum):
    EQUAL = "Equal"
    NOT_PROVEN = "NotProven"

    def __bool__(self) -> bool:
        return self is Verdict.EQUAL


class Graph:
    """Directed multigraph with ordered vertex and edge ids."""

    def __init__(
        self,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str, str]] = (),
        labels: Mapping[str, str] | None = None,
    ):
        self.vertices: tuple[str, ...] = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise FinCatError(f"duplicate vertex ids in {self.vertices}")
        vset = set(self.vertices)
        names, src, tgt = [], {}, {}
        for name, s, t in edges:
            if name in src:
                raise FinCatError(f"duplicate edge id {name!r}")
            if s not in vset or t not in vset:
                raise FinCatError(f"edge {name!r}: endpoints {s!r}->{t!r} not vertices")
            names.append(name)
            src[name] = s
            tgt[name] = t
        self.edges: tuple[str, ...] = tuple(names)
        self.src: dict[str, str] = src
        self.tgt: dict[str, str] = tgt
        self.labels: dict[str, str] = dict(labels or {})

    def edge_triples(self) -> list[tuple[str, str, str]]:
        return [(e, self.src[e], self.tgt[e]) for e in self.edges]

    def out_edges(self, v: str) -> list[str]:
        return [e for e in self.edges if self.src[e] == v]

    def in_edges(self, v: str) -> list[str]:
        return [e for e in self.edges if self.tgt[e] == v]

    def label(self, x: str) -> str:
        return self.labels.get(x, x)

    def is_acyclic(self) -> bool:
        indeg = {v: 0 for v in self.vertices}
        for e in self.edges:
            indeg[self.tgt[e]] += 1
        queue = deque(v for v in self.vertices if indeg[v] == 0)
        seen = 0
        while queue:
            v = queue.popleft()
            seen += 1
            for e in self.out_edges(v):
                w = self.tgt[e]
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return seen == len(self.vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.edge_triples() == other.edge_triples()
        )

    def __repr__(self) -> str:
        return f"Graph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {_dot_id(name)} {{"]
        for v in self.vertices:
            lines.append(f"  {_dot_id(v)} [label={_dot_id(self.label(v))}];")
        for e in self.edges:
            lines.append(
                f"  {_dot_id(self.src[e])} -> {_dot_id(self.tgt[e])} "
                f"[label={_dot_id(self.label(e))}];"
            )
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_id(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class Path:
    """A path in a graph; ``edges == ()`` is the identity at ``start``."""

    start: str
    end: str
    edges: tuple[str, ...] = ()

    @classmethod
    def identity(cls, v: str) -> Path:
        return cls(v, v, ())

    @property
    def is_identity(self) -> bool:
        return not self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def __str__(self) -> str:
        if not self.edges:
            return f"id({self.start})"
        return "[" + ",".join(self.edges) + "]"


def make_path(graph: Graph, edges: Sequence[str], start: str | None = None) -> Path:
    """Build a checked path from a sequence of edge ids."""
    edges = tuple(edges)
    if not edges:
        if start is None:
            raise FinCatError("identity path needs an explicit start vertex")
        if start not in graph.vertices:
            raise FinCatError(f"unknown vertex {start!r}")
        return Path.identity(start)
    for e in edges:
        if e not in graph.src:
            raise FinCatError(f"unknown edge {e!r}")
    if start is not None and graph.src[edges[0]] != start:
        raise FinCatError(f"path {edges} does not start at {start!r}")
    for a, b in zip(edges, edges[1:]):
        if graph.tgt[a] != graph.src[b]:
            raise FinCatError(f"edges {a!r} and {b!r} do not compose")
    return Path(graph.src[edges[0]], graph.tgt[edges[-1]], edges)


def path_compose(p: Path, q: Path) -> Path:
    """Diagrammatic-order composite: first ``p``, then ``q``."""
    if p.end != q.start:
        raise FinCatError(f"cannot compose {p} ending at {p.end!r} with {q} starting at {q.start!r}")
    return Path(p.start, q.end, p.edges + q.edges)


class FinCatPresentation:
    """A category presented by generators (a graph) and path relations."""

    def __init__(self, graph: Graph, relations: Iterable[tuple[Path, Path]] = ()):
        self.graph = graph
        rels = []
        for lhs, rhs in relations:
            for p in (lhs, rhs):
                make_path(graph, p.edges, p.start)
            if lhs.start != rhs.start or lhs.end != rhs.end:
                raise FinCatError(f"relation {lhs} = {rhs} has mismatched endpoints")
            rels.append((lhs, rhs))
        self.relations: tuple[tuple[Path, Path], ...] = tuple(rels)
        self.acyclic: bool = graph.is_acyclic()

    @classmethod
    def free(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str, str]] = (),
             labels: Mapping[str, str] | None = None) -> FinCatPresentation:
        return cls(Graph(vertices, edges, labels))

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.graph.vertices

    @property
    def edges(self) -> tuple[str, ...]:
        return self.graph.edges

    @property
    def is_free(self) -> bool:
        return not self.relations

    def src(self, e: str) -> str:
        return self.graph.src[e]

    def tgt(self, e: str) -> str:
        return self.graph.tgt[e]

    def path(self, *edges: str, start: str | None = None) -> Path:
        return make_path(self.graph, edges, start)

    def edge_path(self, e: str) -> Path:
        return Path(self.graph.src[e], self.graph.tgt[e], (e,))

    def identity(self, v: str) -> Path:
        if v not in self.graph.vertices:
            raise FinCatError(f"unknown vertex {v!r}")
        return Path.identity(v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinCatPresentation):
            return NotImplemented
        return self.graph == other.graph and self.relations == other.relations

    def __repr__(self) -> str:
        return (f"FinCatPresentation({len(self.vertices)} objects, "
                f"{len(self.edges)} generators, {len(self.relations)} relations)")


def enumerate_paths(c: FinCatPresentation, a: str, b: str, max_len: int | None = None) -> list[Path]:
    """All paths ``a -> b`` of length at most ``max_len``, in lexicographic order.

    Order is by length first, then lexicographically by edge position in the
    graph's edge order. With an acyclic presentation and ``max_len=None`` the
    whole hom-set (as words, not modulo relations) is returned.
    """
    g = c.graph
    if max_len is None:
        if not c.acyclic:
            raise NonAcyclicError("max_len is required on a presentation with cycles")
        max_len = len(g.edges)
    out_edges = {v: g.out_edges(v) for v in g.vertices}
    result: list[Path] = []
    frontier: list[tuple[str, tuple[str, ...]]] = [(a, ())]
    for length in range(max_len + 1):
        for v, word in frontier:
            if v == b:
                result.append(Path(a, b, word))
        if length == max_len:
            break
        nxt = []
        for v, word in frontier:
            for e in out_edges[v]:
                nxt.append((g.tgt[e], word + (e,)))
        frontier = nxt
        if not frontier:
            break
    return result


def _vertex_at(c: FinCatPresentation, start: str, word: tuple[str, ...], i: int) -> str:
    return start if i == 0 else c.graph.tgt[word[i - 1]]


def paths_equal(c: FinCatPresentation, p: Path, q: Path, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Decide ``p == q`` in ``c`` by breadth-first relation rewriting.

    Relations are used in both directions. Returns ``NOT_PROVEN`` when the
    rewrite closure is exhausted or the step budget runs out.
    """
    if p.start != q.start or p.end != q.end:
        raise FinCatError(f"paths {p} and {q} have different endpoints")
    if p.edges == q.edges:
        return Verdict.EQUAL
    if not c.relations:
        return Verdict.NOT_PROVEN
    rules = []
    for lhs, rhs in c.relations:
        rules.append((lhs.edges, rhs.edges, lhs.start))
        rules.append((rhs.edges, lhs.edges, lhs.start))
    target = q.edges
    seen = {p.edges}
    queue = deque([p.edges])
    steps = 0
    while queue:
        word = queue.popleft()
        for lhs, rhs, at in rules:
            n = len(lhs)
            for i in range(len(word) - n + 1):
                if word[i:i + n] != lhs:
                    continue
                if n == 0 and _vertex_at(c, p.start, word, i) != at:
                    continue
                steps += 1
                if steps > budget:
                    return Verdict.NOT_PROVEN
                new = word[:i] + rhs + word[i + n:]
                if new == target:
                    return Verdict.EQUAL
                if new not in seen:
                    seen.add(new)
                    queue.append(new)
    return Verdict.NOT_PROVEN


@dataclass
class FunctorReport:
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __str__(self) -> str:
        if self.ok:
            return "functor: pass"
        return "functor: FAIL\n" + "\n".join(f"  - {p}" for p in self.problems)


class FinFunctor:
    """A functor between presentations, given on generators."""

    def __init__(self, dom: FinCatPresentation, cod: FinCatPresentation,
                 ob_map: Mapping[str, str], edge_map: Mapping[str, Path | Sequence[str]]):
        self.dom = dom
        self.cod = cod
        self.ob_map: dict[str, str] = {v: ob_map[v] for v in dom.vertices}
        em: dict[str, Path] = {}
        for e in dom.edges:
            img = edge_map[e]
            if not isinstance(img, Path):
                img = make_path(cod.graph, tuple(img), self.ob_map[dom.src(e)])
            em[e] = img
        self.edge_map = em

    @classmethod
    def identity(cls, c: FinCatPresentation) -> FinFunctor:
        return cls(c, c, {v: v for v in c.vertices}, {e: c.edge_path(e) for e in c.edges})

    def __call__(self, x: str) -> str:
        return self.ob_map[x]

    def map_path(self, p: Path) -> Path:
        out = Path.identity(self.ob_map[p.start])
        for e in p.edges:
            out = path_compose(out, self.edge_map[e])
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinFunctor):
            return NotImplemented
        return (self.dom == other.dom and self.cod == other.cod
                and self.ob_map == other.ob_map and self.edge_map == other.edge_map)

    def __repr__(self) -> str:
        return f"FinFunctor({self.ob_map})"


def compose_functors(f: FinFunctor, g: FinFunctor) -> FinFunctor:
    """``g . f`` as a functor ``f.dom -> g.cod``."""
    if f.cod is not g.dom and f.cod != g.dom:
        raise FinCatError("functors are not composable")
    return FinFunctor(f.dom, g.cod, {v: g(f(v)) for v in f.dom.vertices},
                      {e: g.map_path(f.edge_map[e]) for e in f.dom.edges})


def check_functor(F: FinFunctor, budget: int = DEFAULT_BUDGET) -> FunctorReport:
    report = FunctorReport()
    cod_v = set(F.cod.vertices)
    for v, w in F.ob_map.items():
        if w not in cod_v:
            report.problems.append(f"object {v!r} maps to unknown vertex {w!r}")
    if report.problems:
        return report
    for e in F.dom.edges:
        img = F.edge_map[e]
        try:
            make_path(F.cod.graph, img.edges, img.start)
        except FinCatError as exc:
            report.problems.append(f"edge {e!r}: image is not a path ({exc})")
            continue
        s, t = F.ob_map[F.dom.src(e)], F.ob_map[F.dom.tgt(e)]
        if img.start != s or img.end != t:
            report.problems.append(
                f"edge {e!r}: image {img} runs {img.start!r}->{img.end!r}, expected {s!r}->{t!r}")
    if report.problems:
        return report
    for lhs, rhs in F.dom.relations:
        if not paths_equal(F.cod, F.map_path(lhs), F.map_path(rhs), budget):
            report.problems.append(f"relation {lhs} = {rhs} not preserved")
    return report


# -- comma categories -------------------------------------------------------

@dataclass
class CommaCat:
    """Finite comma category ``R/j``.

    ``objects`` are pairs ``(a, f)`` with ``f: R(a) -> j``; ``arrows`` are
    triples ``(i, k, h)`` of object indices and a witnessing path ``h`` in
    ``R.dom``. ``undecided`` holds candidate arrows whose admissibility could
    not be settled.
    """

    target: str
    objects: list[tuple[str, Path]]
    arrows: list[tuple[int, int, Path]]
    undecided: list[tuple[int, int, Path]] = field(default_factory=list)

    def components(self, include_undecided: bool = False) -> list[list[int]]:
        parent = list(range(len(self.objects)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        arrows = self.arrows + (self.undecided if include_undecided else [])
        for i, k, _ in arrows:
            ri, rk = find(i), find(k)
            if ri != rk:
                parent[max(ri, rk)] = min(ri, rk)
        groups: dict[int, list[int]] = {}
        for i in range(len(self.objects)):
            groups.setdefault(find(i), []).append(i)
        return list(groups.values())

    @property
    def n_components(self) -> int:
        return len(self.components())

    @property
    def nonempty_connected(self) -> bool:
        return len(self.objects) > 0 and self.n_components == 1


def _hom_classes(c: FinCatPresentation, a: str, b: str, budget: int) -> list[Path]:
    """Paths ``a -> b`` with duplicates modulo provable equality removed."""
    reps: list[Path] = []
    for p in enumerate_paths(c, a, b):
        if not any(paths_equal(c, p, q, budget) for q in reps):
            reps.append(p)
    return reps


def _dom_morphisms(c: FinCatPresentation, a: str, b: str) -> list[Path]:
    if c.acyclic:
        return [p for p in enumerate_paths(c, a, b) if p.edges]
    return [c.edge_path(e) for e in c.edges if c.src(e) == a and c.tgt(e) == b]


# Admissibility test for a candidate comma arrow: True, False, or None (undecided).
Admits = Callable[[Path, tuple[str, Path], tuple[str, Path]], "bool | None"]


def build_comma(R: FinFunctor, j: str, admits: Admits, budget: int = DEFAULT_BUDGET) -> CommaCat:
    if not R.cod.acyclic:
        raise NonAcyclicError("comma categories need an acyclic codomain")
    if j not in R.cod.vertices:
        raise FinCatError(f"unknown vertex {j!r}")
    objects: list[tuple[str, Path]] = []
    for a in R.dom.vertices:
        for f in _hom_classes(R.cod, R(a), j, budget):
            objects.append((a, f))
    arrows, undecided = [], []
    by_vertex: dict[str, list[int]] = {}
    for i, (a, _) in enumerate(objects):
        by_vertex.setdefault(a, []).append(i)
    for a in R.dom.vertices:
        for b in R.dom.vertices:
            if not by_vertex.get(a) or not by_vertex.get(b):
                continue
            for h in _dom_morphisms(R.dom, a, b):
                for i in by_vertex[a]:
                    for k in by_vertex[b]:
                        verdict = admits(h, objects[i], objects[k])
                        if verdict is True:
                            arrows.append((i, k, h))
                        elif verdict is None:
                            undecided.append((i, k, h))
    return CommaCat(j, objects, arrows, undecided)


def comma_category(R: FinFunctor, j: str, budget: int = DEFAULT_BUDGET) -> CommaCat:
    """The comma category ``R/j``: arrows are paths ``h`` with ``R(h).g == f``."""

    def admits(h: Path, src: tuple[str, Path], dst: tuple[str, Path]) -> bool:
        composite = path_compose(R.map_path(h), dst[1])
        return paths_equal(R.cod, composite, src[1], budget) is Verdict.EQUAL

    return build_comma(R, j, admits, budget)


# -- pushouts ---------------------------------------------------------------

class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b, order: Mapping) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if order[ra] <= order[rb]:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name = name + "'"
    return name


def pushout(f: FinFunctor, g: FinFunctor) -> tuple[FinCatPresentation, FinFunctor, FinFunctor]:
    """Pushout of presentations along ``f: A -> B`` and ``g: A -> C``.

    Vertices ``f(a)`` and ``g(a)`` are identified. A generator of ``A`` whose
    images are both single edges identifies those edges; otherwise the two
    image paths become a relation. Names from ``B`` win; names from ``C`` are
    kept unless they collide, in which case they are primed.
    """
    if f.dom != g.dom:
        raise FinCatError("pushout needs a span with a common domain")
    for F in (f, g):
        rep = check_functor(F)
        if not rep.ok:
            raise FinCatError(f"invalid functor in span: {rep.problems}")
    B, C = f.cod, g.cod
    vkeys = [("B", v) for v in B.vertices] + [("C", v) for v in C.vertices]
    vorder = {k: i for i, k in enumerate(vkeys)}
    uf = _UnionFind(vkeys)
    for a in f.dom.vertices:
        uf.union(("B", f(a)), ("C", g(a)), vorder)
    ekeys = [("B", e) for e in B.edges] + [("C", e) for e in C.edges]
    eorder = {k: i for i, k in enumerate(ekeys)}
    euf = _UnionFind(ekeys)
    extra: list[tuple[tuple, tuple, tuple]] = []  # (start key, B word, C word)
    for a in f.dom.edges:
        pb, pc = f.edge_map[a], g.edge_map[a]
        if len(pb) == 1 and len(pc) == 1:
            euf.union(("B", pb.edges[0]), ("C", pc.edges[0]), eorder)
        else:
            extra.append((("B", pb.start), pb.edges, pc.edges))

    vname: dict[tuple, str] = {}
    taken: set[str] = set()
    vertices: list[str] = []
    for k in vkeys:
        r = uf.find(k)
        if r not in vname:
            vname[r] = _fresh(r[1], taken)
            taken.add(vname[r])
            vertices.append(vname[r])
    ename: dict[tuple, str] = {}
    etaken: set[str] = set()
    edges: list[tuple[str, str, str]] = []
    src_of = {("B", e): ("B", B.src(e)) for e in B.edges} | {("C", e): ("C", C.src(e)) for e in C.edges}
    tgt_of = {("B", e): ("B", B.tgt(e)) for e in B.edges} | {("C", e): ("C", C.tgt(e)) for e in C.edges}
    labels: dict[str, str] = {}
    for k in ekeys:
        r = euf.find(k)
        if r not in ename:
            ename[r] = _fresh(r[1], etaken)
            etaken.add(ename[r])
            s, t = vname[uf.find(src_of[r])], vname[uf.find(tgt_of[r])]
            edges.append((ename[r], s, t))
            src_graph = B.graph if r[0] == "B" else C.graph
            if r[1] in src_graph.labels:
                labels[ename[r]] = src_graph.labels[r[1]]
    for k in vkeys:
        r = uf.find(k)
        src_graph = B.graph if k[0] == "B" else C.graph
        if k[1] in src_graph.labels and vname[r] not in labels:
            labels[vname[r]] = src_graph.labels[k[1]]
    graph = Graph(vertices, edges, labels)

    def rename(side: str, p: Path) -> Path:
        start = vname[uf.find((side, p.start))]
        return make_path(graph, [ename[euf.find((side, e))] for e in p.edges], start)

    relations: list[tuple[Path, Path]] = []
    for side, pres in (("B", B), ("C", C)):
        for lhs, rhs in pres.relations:
            relations.append((rename(side, lhs), rename(side, rhs)))
    for (_, bstart), bword, cword in extra:
        lhs = rename("B", Path(bstart, bstart, ()) if not bword else make_path(B.graph, bword))
        cstart = vname[uf.find(("B", bstart))]
        rhs_edges = [ename[euf.find(("C", e))] for e in cword]
        rhs = make_path(graph, rhs_edges, cstart)
        relations.append((lhs, rhs))
    unique: list[tuple[Path, Path]] = []
    for lhs, rhs in relations:
        if lhs == rhs or (lhs, rhs) in unique or (rhs, lhs) in unique:
            continue
        unique.append((lhs, rhs))
    P = FinCatPresentation(graph, unique)
    iB = FinFunctor(B, P, {v: vname[uf.find(("B", v))] for v in B.vertices},
                    {e: rename("B", B.edge_path(e)) for e in B.edges})
    iC = FinFunctor(C, P, {v: vname[uf.find(("C", v))] for v in C.vertices},
                    {e: rename("C", C.edge_path(e)) for e in C.edges})
    return P, iB, iC


def interval_cylinder(c: FinCatPresentation) -> tuple[FinCatPresentation, FinFunctor]:
    """The product ``c x {0 -> 1}`` and its inclusion at level 0.

    Objects are ``j@0`` and ``j@1``; generators are ``f@0``, ``f@1`` and one
    ``j@i`` per object, with the naturality square relation for each generator.
    """
    vertices = [f"{v}@0" for v in c.vertices] + [f"{v}@1" for v in c.vertices]
    edges = [(f"{e}@{k}", f"{c.src(e)}@{k}", f"{c.tgt(e)}@{k}") for k in (0, 1) for e in c.edges]
    edges += [(f"{v}@i", f"{v}@0", f"{v}@1") for v in c.vertices]
    graph = Graph(vertices, edges)
    rels = []
    for e in c.edges:
        s, t = c.src(e), c.tgt(e)
        rels.append((make_path(graph, [f"{e}@0", f"{t}@i"]), make_path(graph, [f"{s}@i", f"{e}@1"])))
    for k in (0, 1):
        for lhs, rhs in c.relations:
            rels.append((make_path(graph, [f"{x}@{k}" for x in lhs.edges], f"{lhs.start}@{k}"),
                         make_path(graph, [f"{x}@{k}" for x in rhs.edges], f"{rhs.start}@{k}")))
    cyl = FinCatPresentation(graph, rels)
    inc0 = FinFunctor(c, cyl, {v: f"{v}@0" for v in c.vertices},
                      {e: cyl.edge_path(f"{e}@0") for e in c.edges})
    return cyl, inc0

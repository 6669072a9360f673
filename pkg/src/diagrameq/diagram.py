"""Diagrams ``D: J -> C`` with optional product (cartesian) annotations."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .fincat import DEFAULT_BUDGET, FinCatPresentation, Path, enumerate_paths, paths_equal, Verdict
from .semcat import LinearSemantics, SemanticsError, SymbolicSemantics


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class ProductNode:
    """``vertex`` is the product of ``factors`` with projection edges ``projections``.

    ``sums`` are edges out of the node that must be the canonical sum map.
    """

    vertex: str
    factors: tuple[str, ...]
    projections: tuple[str, ...]
    sums: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "projections", tuple(self.projections))
        object.__setattr__(self, "sums", tuple(self.sums))


Semantics = LinearSemantics | SymbolicSemantics


class Diagram:
    """A functor from a presented shape into a semantic category.

    Construct through :func:`build_diagram`, which validates everything.
    """

    def __init__(self, shape: FinCatPresentation, semantics: Semantics,
                 ob_map: Mapping[str, object], edge_map: Mapping[str, object],
                 products: Sequence[ProductNode] = (), name: str = ""):
        self.shape = shape
        self.semantics = semantics
        self.ob_map = {v: ob_map[v] for v in shape.vertices}
        self.edge_map = {e: edge_map[e] for e in shape.edges}
        self.products = tuple(products)
        self.name = name
        self.assumed: list[str] = []
        self.provenance: dict = {}
        self._path_cache: dict[Path, object] = {}

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.shape.vertices

    @property
    def edges(self) -> tuple[str, ...]:
        return self.shape.edges

    @property
    def is_linear(self) -> bool:
        return isinstance(self.semantics, LinearSemantics)

    def ob(self, v: str):
        return self.ob_map[v]

    def hom(self, e: str):
        return self.edge_map[e]

    def map_path(self, p: Path):
        cached = self._path_cache.get(p)
        if cached is not None:
            return cached
        sem = self.semantics
        out = sem.identity(self.ob_map[p.start])
        for e in p.edges:
            out = sem.compose(out, self.edge_map[e])
        self._path_cache[p] = out
        return out

    def product_at(self, v: str) -> ProductNode | None:
        for pn in self.products:
            if pn.vertex == v:
                return pn
        return None

    def __repr__(self) -> str:
        return (f"Diagram({self.name or 'unnamed'}: {len(self.vertices)} objects, "
                f"{len(self.edges)} arrows, {self.semantics.kind})")


def _product_problems(d: Diagram) -> list[str]:
    problems = []
    sem = d.semantics
    seen: set[str] = set()
    for pn in d.products:
        tag = f"product node {pn.vertex!r}"
        if pn.vertex in seen:
            problems.append(f"{tag}: annotated twice")
            continue
        seen.add(pn.vertex)
        if pn.vertex not in d.ob_map:
            problems.append(f"{tag}: unknown vertex")
            continue
        if len(pn.projections) != len(pn.factors):
            problems.append(f"{tag}: {len(pn.factors)} factors but {len(pn.projections)} projections")
            continue
        bad = [x for x in pn.factors if x not in d.ob_map] + \
              [e for e in pn.projections + pn.sums if e not in d.edge_map]
        if bad:
            problems.append(f"{tag}: unknown ids {bad}")
            continue
        try:
            proj, summ = sem.product_cone(d.ob(pn.vertex), [d.ob(x) for x in pn.factors])
        except SemanticsError as exc:
            problems.append(f"{tag}: not a product cone ({exc})")
            continue
        for i, (e, x) in enumerate(zip(pn.projections, pn.factors)):
            src, tgt = d.shape.src(e), d.shape.tgt(e)
            if src != pn.vertex or tgt != x:
                problems.append(f"{tag}: projection edge {e!r} runs {src}->{tgt}, expected {pn.vertex}->{x}")
            elif sem.equal(d.hom(e), proj[i]) is not True:
                problems.append(f"{tag}: edge {e!r} is not the canonical projection {i + 1}")
        for e in pn.sums:
            if d.shape.src(e) != pn.vertex:
                problems.append(f"{tag}: sum edge {e!r} does not leave the product node")
            elif summ is None:
                problems.append(f"{tag}: sum edge {e!r} needs all factors equal")
            elif not sem.same_object(d.ob(d.shape.tgt(e)), sem.cod(summ)):
                problems.append(f"{tag}: sum edge {e!r} lands on the wrong object")
            elif sem.equal(d.hom(e), summ) is not True:
                problems.append(f"{tag}: edge {e!r} is not the canonical sum map")
    return problems


def build_diagram(shape: FinCatPresentation, semantics: Semantics,
                  ob_map: Mapping[str, object], edge_map: Mapping[str, object],
                  products: Iterable[ProductNode] = (), name: str = "",
                  assume: bool = False) -> Diagram:
    """Validate typing, product cones and shape relations, then build.

    With symbolic semantics a relation whose equality cannot be proven is an
    error unless ``assume`` is set; assumed relations are recorded on the
    diagram's ``assumed`` list.
    """
    missing = [v for v in shape.vertices if v not in ob_map] + \
              [e for e in shape.edges if e not in edge_map]
    if missing:
        raise DiagramError(f"{name or 'diagram'}: no assignment for {missing}")
    sem = semantics
    for v in shape.vertices:
        try:
            sem.check_object(ob_map[v])
        except SemanticsError as exc:
            raise DiagramError(f"object {v!r}: {exc}") from None
    for e in shape.edges:
        f = edge_map[e]
        try:
            sem.check_morphism(f)
        except SemanticsError as exc:
            raise DiagramError(f"arrow {e!r}: {exc}") from None
        s, t = shape.src(e), shape.tgt(e)
        if not sem.same_object(sem.dom(f), ob_map[s]) or not sem.same_object(sem.cod(f), ob_map[t]):
            raise DiagramError(
                f"arrow {e!r}: {s}->{t} needs {ob_map[s]} -> {ob_map[t]}, "
                f"got {sem.dom(f)} -> {sem.cod(f)}")
    d = Diagram(shape, semantics, ob_map, edge_map, list(products), name)
    problems = _product_problems(d)
    if problems:
        raise DiagramError("; ".join(problems))
    for lhs, rhs in shape.relations:
        verdict = sem.equal(d.map_path(lhs), d.map_path(rhs))
        if verdict is True:
            continue
        if verdict is None and assume:
            d.assumed.append(f"{lhs} = {rhs}")
            continue
        detail = sem.witness(d.map_path(lhs), d.map_path(rhs))
        state = "not proven" if verdict is None else "violated"
        raise DiagramError(f"shape relation {lhs} = {rhs} {state} ({detail})")
    return d


COMMUTES, FAILS, NOT_PROVEN = "Commutes", "Fails", "NotProven"


@dataclass
class CommutativityEntry:
    source: str
    target: str
    p: Path
    q: Path
    verdict: str
    witness: str = ""

    def __str__(self) -> str:
        tail = f" ({self.witness})" if self.witness else ""
        return f"{self.source}->{self.target}: {self.p} vs {self.q}: {self.verdict}{tail}"


@dataclass
class CommutativityReport:
    entries: list[CommutativityEntry] = field(default_factory=list)

    @property
    def commutes(self) -> bool:
        return all(e.verdict == COMMUTES for e in self.entries)

    def with_verdict(self, verdict: str) -> list[CommutativityEntry]:
        return [e for e in self.entries if e.verdict == verdict]

    def find(self, p: Path, q: Path) -> CommutativityEntry | None:
        for e in self.entries:
            if (e.p, e.q) in ((p, q), (q, p)):
                return e
        return None

    def __str__(self) -> str:
        if not self.entries:
            return "no parallel paths"
        return "\n".join(str(e) for e in self.entries)


def check_commutes(d: Diagram, max_len: int | None = None,
                   budget: int = DEFAULT_BUDGET) -> CommutativityReport:
    """Compare the images of every pair of parallel paths in the shape."""
    if max_len is None:
        max_len = len(d.edges)
    report = CommutativityReport()
    sem = d.semantics
    for a in d.vertices:
        for b in d.vertices:
            paths = enumerate_paths(d.shape, a, b, max_len)
            for i in range(len(paths)):
                for j in range(i + 1, len(paths)):
                    p, q = paths[i], paths[j]
                    if paths_equal(d.shape, p, q, budget) is Verdict.EQUAL:
                        report.entries.append(CommutativityEntry(a, b, p, q, COMMUTES, "shape relation"))
                        continue
                    fp, fq = d.map_path(p), d.map_path(q)
                    verdict = sem.equal(fp, fq)
                    if verdict is True:
                        report.entries.append(CommutativityEntry(a, b, p, q, COMMUTES))
                    elif verdict is None:
                        report.entries.append(CommutativityEntry(a, b, p, q, NOT_PROVEN, sem.witness(fp, fq)))
                    else:
                        report.entries.append(CommutativityEntry(a, b, p, q, FAILS, sem.witness(fp, fq)))
    return report


@dataclass
class ProductReport:
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __str__(self) -> str:
        if self.ok:
            return "products: pass"
        return "products: FAIL\n" + "\n".join(f"  - {p}" for p in self.problems)


def check_products(d: Diagram) -> ProductReport:
    return ProductReport(_product_problems(d))


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(d: Diagram, name: str | None = None) -> str:
    """Deterministic DOT text; product nodes are drawn as double circles."""
    g = d.shape.graph
    lines = [f"digraph {_q(name or d.name or 'D')} {{"]
    prod = {pn.vertex for pn in d.products}
    for v in d.vertices:
        label = f"{g.label(v)}: {d.ob(v)}"
        if v in prod:
            lines.append(f"  {_q(v)} [label={_q(label)}, shape=doublecircle];")
        else:
            lines.append(f"  {_q(v)} [label={_q(label)}, shape=box];")
    for e in d.edges:
        lines.append(f"  {_q(g.src[e])} -> {_q(g.tgt[e])} [label={_q(g.label(e))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Line-oriented spec files: parsing into live objects and serializing back.

Blocks start with a keyword line and end with ``end``; ``model`` and
``command`` are single lines. See the README for the grammar.
"""
from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from . import physlib
from .compose import UWD, ComposeError, OpenDiagram, make_open
from .diagram import Diagram, DiagramError, ProductNode, build_diagram
from .fincat import FinCatError, FinCatPresentation, FinFunctor, Graph, make_path
from .lifting import Lift, LiftError, Pinning
from .morphism import DiagramMorphism, MorphismError, make_morphism
from .semcat import (
    LinMap, LinSpace, LinearSemantics, OperatorSignature, SemanticsError, SymbolicSemantics,
    SymMorphism, identity, sym_zero, zero_map,
)


class SpecError(ValueError):
    """Syntax or reference error; carries the line number."""

    def __init__(self, msg: str, line: int | None = None, block: str | None = None):
        where = []
        if block:
            where.append(f"block {block!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{', '.join(where)}: {msg}" if where else msg)
        self.line = line
        self.block = block


class SpecValidationError(SpecError):
    """The text is well-formed but an object fails validation."""


@dataclass
class Command:
    kind: str
    args: list[str]
    opts: dict[str, str]
    line: int


@dataclass
class SpecFile:
    signatures: dict[str, OperatorSignature] = field(default_factory=dict)
    graphs: dict[str, physlib.SWGraph] = field(default_factory=dict)
    matrices: dict[str, np.ndarray | sp.spmatrix] = field(default_factory=dict)
    diagrams: dict[str, Diagram] = field(default_factory=dict)
    morphisms: dict[str, DiagramMorphism] = field(default_factory=dict)
    lifts: dict[str, Lift] = field(default_factory=dict)
    pins: dict[str, Pinning] = field(default_factory=dict)
    opens: dict[str, OpenDiagram] = field(default_factory=dict)
    uwds: dict[str, UWD] = field(default_factory=dict)
    commands: list[Command] = field(default_factory=list)

    def names(self) -> set[str]:
        out = set()
        for d in (self.signatures, self.graphs, self.matrices, self.diagrams, self.morphisms,
                  self.lifts, self.pins, self.opens, self.uwds):
            out.update(d)
        return out


def _tokens(line: str) -> list[str]:
    lex = shlex.shlex(line, posix=True)
    lex.whitespace_split = True
    lex.commenters = "#"
    return list(lex)


def _number(tok: str, ln: int | None = None, block: str | None = None) -> float:
    try:
        return float(Fraction(tok)) if "/" in tok else float(tok)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"expected a number, got {tok!r}", ln, block) from None


def _count(tok: str, ln: int | None = None, block: str | None = None) -> int:
    if not tok.isdigit():
        raise SpecError(f"expected a non-negative integer, got {tok!r}", ln, block)
    return int(tok)


def _is_number(tok: str) -> bool:
    try:
        _number(tok)
        return True
    except SpecError:
        return False


def split_opts(tokens: list[str]) -> tuple[list[str], dict[str, str]]:
    args, opts = [], {}
    for t in tokens:
        if "=" in t:
            k, v = t.split("=", 1)
            opts[k] = v
        else:
            args.append(t)
    return args, opts


def resolve_graph(spec: SpecFile | None, ref: str) -> physlib.SWGraph:
    """A graph block name or a shorthand ``path:N``, ``complete:N``, ``cycle:N``."""
    if spec is not None and ref in spec.graphs:
        return spec.graphs[ref]
    if ":" in ref:
        kind, n = ref.split(":", 1)
        makers = {"path": physlib.path_graph, "complete": physlib.complete_graph, "cycle": physlib.cycle_graph}
        if kind in makers and n.isdigit():
            return makers[kind](int(n))
    raise SpecError(f"unknown graph {ref!r}")


class _Parser:
    def __init__(self, text: str, tol: float, budget: int):
        self.lines = text.splitlines()
        self.spec = SpecFile()
        self.tol = tol
        self.budget = budget
        self.sems: dict[str, SymbolicSemantics] = {}
        self.linear = LinearSemantics(tol)

    def parse(self) -> SpecFile:
        i = 0
        n = len(self.lines)
        while i < n:
            toks = _tokens(self.lines[i])
            lineno = i + 1
            i += 1
            if not toks:
                continue
            kw = toks[0]
            if kw == "model":
                self._model(toks[1:], lineno)
                continue
            if kw == "command":
                if len(toks) < 2:
                    raise SpecError("command needs a kind", lineno)
                args, opts = split_opts(toks[2:])
                self.spec.commands.append(Command(toks[1], args, opts, lineno))
                continue
            body = []
            while True:
                if i >= n:
                    raise SpecError(f"block {kw!r} is missing 'end'", lineno)
                t = _tokens(self.lines[i])
                i += 1
                if t == ["end"]:
                    break
                if t:
                    body.append((i, t))
            handler = getattr(self, f"_block_{kw}", None)
            if handler is None:
                raise SpecError(f"unknown block keyword {kw!r}", lineno)
            handler(toks[1:], body, lineno)
        return self.spec

    def _claim(self, name: str, lineno: int) -> None:
        if name in self.spec.names():
            raise SpecError(f"duplicate name {name!r}", lineno)

    # -- blocks ---------------------------------------------------------------

    def _block_signature(self, head, body, lineno):
        if len(head) != 1:
            raise SpecError("usage: signature NAME", lineno)
        name = head[0]
        self._claim(name, lineno)
        sig = OperatorSignature()
        try:
            for ln, t in body:
                if t[0] == "sort":
                    for s in t[1:]:
                        sig.add_sort(s)
                elif t[0] == "op" and len(t) == 6 and t[2] == ":" and t[4] == "->":
                    sig.add_op(t[1], t[3], t[5])
                elif t[0] == "product" and len(t) >= 3 and t[2] == "=":
                    sig.add_product(t[1], t[3:])
                elif t[0] == "inverse" and len(t) == 3:
                    sig.add_inverse(t[1], t[2])
                elif t[0] == "rule" and "->" in t:
                    k = t.index("->")
                    rhs = t[k + 1:]
                    sig.add_rule(t[1:k], None if rhs == ["0"] else ([] if rhs == ["id"] else rhs))
                else:
                    raise SpecError(f"cannot parse signature line {' '.join(t)!r}", ln, name)
        except SemanticsError as exc:
            raise SpecError(str(exc), ln, name) from None
        self.spec.signatures[name] = sig
        self.sems[name] = SymbolicSemantics(sig, self.budget)

    def _block_graph(self, head, body, lineno):
        if len(head) != 1:
            raise SpecError("usage: graph NAME", lineno)
        name = head[0]
        self._claim(name, lineno)
        vertices, edges = None, []
        for ln, t in body:
            if t[0] == "vertices":
                vertices = t[1:]
            elif t[0] == "edge" and len(t) in (3, 4):
                edges.append((t[1], t[2], _number(t[3], ln, name) if len(t) == 4 else 1.0))
            else:
                raise SpecError(f"cannot parse graph line {' '.join(t)!r}", ln, name)
        if vertices is None:
            vertices = []
            for u, v, _ in edges:
                for x in (u, v):
                    if x not in vertices:
                        vertices.append(x)
        try:
            self.spec.graphs[name] = physlib.SWGraph.from_undirected(vertices, edges)
        except physlib.GraphError as exc:
            raise SpecValidationError(str(exc), lineno, name) from None

    def _block_matrix(self, head, body, lineno):
        if len(head) != 2 or "x" not in head[1]:
            raise SpecError("usage: matrix NAME ROWSxCOLS", lineno)
        name = head[0]
        self._claim(name, lineno)
        dims = head[1].split("x")
        if len(dims) != 2:
            raise SpecError("usage: matrix NAME ROWSxCOLS", lineno, name)
        r, c = (_count(x, lineno, name) for x in dims)
        n_rows = sum(1 for _, t in body if t[0] == "row")
        if n_rows:
            if n_rows != len(body):
                raise SpecError("mix of 'row' lines and triplets", lineno, name)
            vals = [[_number(x, ln, name) for x in t[1:]] for ln, t in body]
            m = np.array(vals, dtype=float).reshape(-1, c) if r else np.zeros((0, c))
            if m.shape != (r, c):
                raise SpecError(f"matrix is {m.shape[0]}x{m.shape[1]}, declared {r}x{c}", lineno, name)
            self.spec.matrices[name] = m
            return
        rows, cols, vals = [], [], []
        for ln, t in body:
            if len(t) != 3:
                raise SpecError("triplet lines are 'i j value' (1-based)", ln, name)
            i, j = _count(t[0], ln, name) - 1, _count(t[1], ln, name) - 1
            if not (0 <= i < r and 0 <= j < c):
                raise SpecError(f"entry ({i + 1},{j + 1}) outside {r}x{c}", ln, name)
            rows.append(i)
            cols.append(j)
            vals.append(_number(t[2], ln, name))
        self.spec.matrices[name] = sp.coo_matrix((vals, (rows, cols)), shape=(r, c)).tocsr()

    def _semantics(self, head, lineno):
        if len(head) >= 2 and head[1] == "linear":
            return self.linear
        if len(head) >= 3 and head[1] == "symbolic":
            if head[2] not in self.sems:
                raise SpecError(f"unknown signature {head[2]!r}", lineno)
            return self.sems[head[2]]
        raise SpecError("usage: diagram NAME linear | diagram NAME symbolic SIGNATURE", lineno)

    def _hom_value(self, sem, spec_toks, dom, cod, ln, block):
        """Parse the right-hand side of a ``hom`` or ``component`` line."""
        t = spec_toks
        if sem is self.linear or isinstance(sem, LinearSemantics):
            if t == ["id"]:
                if dom != cod:
                    raise SpecValidationError(f"identity between {dom} and {cod}", ln, block)
                return identity(dom)
            if t == ["zero"]:
                return zero_map(dom, cod)
            if len(t) == 2 and t[0] == "scale":
                if dom != cod:
                    raise SpecValidationError("scale needs equal domain and codomain", ln, block)
                return identity(dom).scale(_number(t[1], ln, block))
            if len(t) == 1 and t[0].startswith("@"):
                key = t[0][1:]
                if key not in self.spec.matrices:
                    raise SpecError(f"unknown matrix {key!r}", ln, block)
                try:
                    return LinMap(dom, cod, self.spec.matrices[key])
                except SemanticsError as exc:
                    raise SpecValidationError(str(exc), ln, block) from None
            raise SpecError(f"cannot parse linear map {' '.join(t)!r}", ln, block)
        if t == ["id"]:
            return sem.identity(dom)
        if t == ["zero"]:
            return sym_zero(dom, cod)
        coeff = Fraction(1)
        word = list(t)
        if word and _is_number(word[0]):
            coeff = Fraction(word.pop(0))
        elif word and word[0].startswith("-") and len(word[0]) > 1:
            coeff = Fraction(-1)
            word[0] = word[0][1:]
        m = SymMorphism(dom, cod, tuple(word), coeff)
        try:
            sem.check_morphism(m)
        except SemanticsError as exc:
            raise SpecValidationError(str(exc), ln, block) from None
        return m

    def _block_diagram(self, head, body, lineno):
        if not head:
            raise SpecError("usage: diagram NAME linear|symbolic SIG", lineno)
        name = head[0]
        self._claim(name, lineno)
        sem = self._semantics(head, lineno)
        vertices, obs, edges, homs, rels, products, labels = [], {}, [], {}, [], [], {}
        pending = {}
        assume = False
        for ln, t in body:
            kw = t[0]
            if kw == "ob" and len(t) == 4 and t[2] == ":":
                if t[1] in obs:
                    raise SpecError(f"duplicate object {t[1]!r}", ln, name)
                vertices.append(t[1])
                if isinstance(sem, LinearSemantics):
                    obs[t[1]] = LinSpace(_count(t[3], ln, name), t[1])
                else:
                    obs[t[1]] = t[3]
            elif kw == "hom" and len(t) >= 7 and t[2] == ":" and t[4] == "->" and t[6] == "=":
                e, s, tg = t[1], t[3], t[5]
                if e in homs or e in pending:
                    raise SpecError(f"duplicate arrow {e!r}", ln, name)
                for v in (s, tg):
                    if v not in obs:
                        raise SpecError(f"unknown object {v!r}", ln, name)
                edges.append((e, s, tg))
                rhs = t[7:]
                if rhs and rhs[0] in ("proj", "sum"):
                    pending[e] = (rhs, ln)
                else:
                    homs[e] = self._hom_value(sem, rhs, obs[s], obs[tg], ln, name)
            elif kw == "rel" and "=" in t:
                k = t.index("=")
                rels.append((t[1:k], t[k + 1:], ln))
            elif kw == "product" and len(t) >= 4 and t[2] == "of" and "proj" in t:
                k = t.index("proj")
                factors = t[3:k]
                rest = t[k + 1:]
                sums = []
                if "sum" in rest:
                    s = rest.index("sum")
                    sums = rest[s + 1:]
                    rest = rest[:s]
                products.append((ProductNode(t[1], tuple(factors), tuple(rest), tuple(sums)), ln))
            elif kw == "label" and len(t) == 3:
                labels[t[1]] = t[2]
            elif kw == "assume" and len(t) == 1:
                assume = True
            else:
                raise SpecError(f"cannot parse diagram line {' '.join(t)!r}", ln, name)
        try:
            graph = Graph(vertices, edges, labels)
        except FinCatError as exc:
            raise SpecError(str(exc), lineno, name) from None
        relations = []
        for lhs, rhs, ln in rels:
            relations.append((self._path(graph, lhs, ln, name), self._path(graph, rhs, ln, name)))
        try:
            shape = FinCatPresentation(graph, relations)
        except FinCatError as exc:
            raise SpecError(str(exc), lineno, name) from None
        src = {e: s for e, s, _ in edges}
        tgt = {e: t for e, _, t in edges}
        for e, (rhs, ln) in pending.items():
            owner = [pn for pn, _ in products if e in pn.projections or e in pn.sums]
            if not owner:
                raise SpecError(f"arrow {e!r} uses {rhs[0]} outside any product line", ln, name)
            pn = owner[0]
            try:
                proj, summ = sem.product_cone(obs[pn.vertex], [obs[x] for x in pn.factors])
            except (SemanticsError, KeyError) as exc:
                raise SpecValidationError(f"product {pn.vertex!r}: {exc}", ln, name) from None
            if rhs[0] == "proj":
                i = _count(rhs[1], ln, name) - 1 if len(rhs) > 1 else pn.projections.index(e)
                homs[e] = proj[i]
            else:
                if summ is None:
                    raise SpecValidationError(f"product {pn.vertex!r} has no sum map", ln, name)
                homs[e] = summ
            if sem.dom(homs[e]) != obs[src[e]] or not sem.same_object(sem.cod(homs[e]), obs[tgt[e]]):
                raise SpecValidationError(f"arrow {e!r} does not fit its product", ln, name)
        try:
            d = build_diagram(shape, sem, obs, homs, [pn for pn, _ in products], name=name, assume=assume)
        except (DiagramError, SemanticsError) as exc:
            raise SpecValidationError(str(exc), lineno, name) from None
        self.spec.diagrams[name] = d

    def _path(self, graph: Graph, toks, ln, block):
        try:
            if len(toks) == 2 and toks[0] == "id":
                return make_path(graph, [], toks[1])
            return make_path(graph, toks)
        except FinCatError as exc:
            raise SpecError(str(exc), ln, block) from None

    def _diagram(self, name, ln, block=None) -> Diagram:
        if name in self.spec.diagrams:
            return self.spec.diagrams[name]
        raise SpecError(f"unknown diagram {name!r}", ln, block)

    def _block_morphism(self, head, body, lineno):
        if len(head) != 5 or head[1] != ":" or head[3] != "->":
            raise SpecError("usage: morphism NAME : DOM -> COD", lineno)
        name = head[0]
        self._claim(name, lineno)
        dom, cod = self._diagram(head[2], lineno, name), self._diagram(head[4], lineno, name)
        ob_map, edge_map, comps_raw = {}, {}, {}
        assume = False
        for ln, t in body:
            if t[0] == "ob" and len(t) == 4 and t[2] == "->":
                ob_map[t[1]] = t[3]
            elif t[0] == "hom" and len(t) >= 4 and t[2] == "->":
                edge_map[t[1]] = (t[3:], ln)
            elif t[0] == "component" and len(t) >= 4 and t[2] == "=":
                comps_raw[t[1]] = (t[3:], ln)
            elif t == ["assume"]:
                assume = True
            else:
                raise SpecError(f"cannot parse morphism line {' '.join(t)!r}", ln, name)
        for v in cod.vertices:
            if v not in ob_map:
                raise SpecError(f"no object image for {v!r}", lineno, name)
            if ob_map[v] not in dom.ob_map:
                raise SpecError(f"object image {ob_map[v]!r} is not in {head[2]!r}", lineno, name)
        paths = {}
        for e in cod.edges:
            if e not in edge_map:
                raise SpecError(f"no arrow image for {e!r}", lineno, name)
            toks, ln = edge_map[e]
            if toks == ["id"]:
                toks = ["id", ob_map[cod.shape.src(e)]]
            paths[e] = self._path(dom.shape.graph, toks, ln, name)
        try:
            R = FinFunctor(cod.shape, dom.shape, ob_map, paths)
        except FinCatError as exc:
            raise SpecValidationError(str(exc), lineno, name) from None
        comps = {}
        for v in cod.vertices:
            if v not in comps_raw:
                raise SpecError(f"no component at {v!r}", lineno, name)
            toks, ln = comps_raw[v]
            comps[v] = self._hom_value(dom.semantics, toks, dom.ob(R(v)), cod.ob(v), ln, name)
        try:
            m = make_morphism(dom, cod, R, comps, assume=assume)
        except (MorphismError, SemanticsError) as exc:
            raise SpecValidationError(str(exc), lineno, name) from None
        self.spec.morphisms[name] = m

    def _vectors(self, d: Diagram, body, block, partial: bool):
        out = {}
        for ln, t in body:
            if "=" not in t:
                raise SpecError("vector lines are 'X = v1 v2 ...'", ln, block)
            k = t.index("=")
            lhs = " ".join(t[:k])
            vals = [_number(x, ln, block) for x in t[k + 1:]]
            if "[" in lhs:
                if not partial:
                    raise SpecError("indexed entries are only allowed in pins", ln, block)
                v, idx = lhs.split("[", 1)
                idx = [_count(x, ln, block) for x in idx.rstrip("]").replace(",", " ").split()]
                v = v.strip()
                if len(idx) != len(vals):
                    raise SpecError(f"{len(idx)} indices but {len(vals)} values", ln, block)
                out[v] = (idx, vals, ln)
            else:
                out[lhs] = (None, vals, ln)
            v = lhs.split("[", 1)[0].strip()
            if v not in d.ob_map:
                raise SpecError(f"unknown object {v!r}", ln, block)
        return out

    def _block_lift(self, head, body, lineno):
        if len(head) != 3 or head[1] != "of":
            raise SpecError("usage: lift NAME of DIAGRAM", lineno)
        name = head[0]
        self._claim(name, lineno)
        d = self._diagram(head[2], lineno, name)
        vecs = self._vectors(d, body, name, partial=False)
        try:
            self.spec.lifts[name] = Lift(d, {v: vals for v, (_, vals, _) in vecs.items()})
        except LiftError as exc:
            raise SpecValidationError(str(exc), lineno, name) from None

    def _block_pins(self, head, body, lineno):
        if len(head) != 3 or head[1] != "of":
            raise SpecError("usage: pins NAME of DIAGRAM", lineno)
        name = head[0]
        self._claim(name, lineno)
        d = self._diagram(head[2], lineno, name)
        p = Pinning()
        for v, (idx, vals, ln) in self._vectors(d, body, name, partial=True).items():
            p.pin(v, vals, idx)
        self.spec.pins[name] = p

    def _block_open(self, head, body, lineno):
        if len(head) != 3 or head[1] != "of":
            raise SpecError("usage: open NAME of DIAGRAM", lineno)
        name = head[0]
        self._claim(name, lineno)
        d = self._diagram(head[2], lineno, name)
        feet = []
        for ln, t in body:
            if t[0] != "foot":
                raise SpecError("open blocks contain 'foot V ...' lines", ln, name)
            feet.append(t[1:])
        try:
            self.spec.opens[name] = make_open(d, feet)
        except ComposeError as exc:
            raise SpecValidationError(str(exc), lineno, name) from None

    def _type(self, tok: str, ln, block):
        if tok.isdigit():
            return LinSpace(int(tok))
        for sig in self.spec.signatures.values():
            if tok in sig.sorts:
                return tok
        raise SpecError(f"junction type {tok!r} is neither a dimension nor a declared sort", ln, block)

    def _block_uwd(self, head, body, lineno):
        if len(head) != 1:
            raise SpecError("usage: uwd NAME", lineno)
        name = head[0]
        self._claim(name, lineno)
        junctions, boxes, outer = {}, [], []
        for ln, t in body:
            if t[0] == "junction" and len(t) == 4 and t[2] == ":":
                junctions[t[1]] = self._type(t[3], ln, name)
            elif t[0] == "box" and len(t) >= 2:
                boxes.append((t[1], t[2:]))
            elif t[0] == "outer":
                outer.extend(t[1:])
            else:
                raise SpecError(f"cannot parse uwd line {' '.join(t)!r}", ln, name)
        try:
            self.spec.uwds[name] = UWD(junctions, boxes, outer)
        except ComposeError as exc:
            raise SpecError(str(exc), lineno, name) from None

    # -- models ---------------------------------------------------------------

    def _model(self, toks, lineno):
        if len(toks) < 2:
            raise SpecError("usage: model KIND NAME key=value ...", lineno)
        kind, name = toks[0], toks[1]
        _, opts = split_opts(toks[2:])
        self._claim(name, lineno)
        try:
            obj = instantiate_model(kind, opts, self.spec)
        except SpecError as exc:
            raise SpecError(str(exc), lineno, name) from None
        except (DiagramError, MorphismError, ComposeError, SemanticsError, physlib.GraphError) as exc:
            raise SpecValidationError(str(exc), lineno, name) from None
        register(self.spec, name, obj)


def register(spec: SpecFile, name: str, obj) -> None:
    """Store a model result under ``name``; morphisms also expose ``name.dom``/``name.cod``."""
    if isinstance(obj, Diagram):
        spec.diagrams[name] = obj
    elif isinstance(obj, DiagramMorphism):
        spec.morphisms[name] = obj
        spec.diagrams[f"{name}.dom"] = obj.dom
        spec.diagrams[f"{name}.cod"] = obj.cod
    elif isinstance(obj, OpenDiagram):
        spec.opens[name] = obj
        spec.diagrams[name] = obj.apex
    elif isinstance(obj, UWD):
        spec.uwds[name] = obj
    else:
        raise SpecError(f"cannot register {type(obj).__name__}")


def _opt_num(opts, key, default=None):
    if key not in opts:
        if default is None:
            raise SpecError(f"missing option {key}=")
        return default
    return _number(opts[key])


def instantiate_model(kind: str, opts: dict[str, str], spec: SpecFile | None = None):
    """Build a catalog model from ``key=value`` options."""
    def graph():
        if "graph" not in opts:
            raise SpecError("missing option graph=")
        return resolve_graph(spec, opts["graph"])

    def T():
        return _count(opts["T"]) if "T" in opts else 1

    def omega(g):
        if "omega" not in opts:
            raise SpecError("missing option omega=")
        want = opts["omega"].split(",")
        by_name = {str(v): v for v in g.vertices}
        bad = [w for w in want if w not in by_name]
        if bad:
            raise SpecError(f"omega names unknown vertices {bad}")
        return [by_name[w] for w in want]

    k = _opt_num(opts, "k", 1.0)
    if kind == "heat":
        return physlib.model_heat(graph(), T(), k)
    if kind == "heat_ivp":
        return physlib.model_heat_ivp(graph(), T(), k)
    if kind == "dirichlet":
        g = graph()
        return physlib.model_dirichlet(g, omega(g))
    if kind == "diffusion":
        return physlib.model_diffusion(graph(), k, T())
    if kind == "fick":
        return physlib.model_fick(graph(), k, T())
    if kind == "conservation":
        return physlib.model_conservation(graph(), T())
    if kind == "advection":
        return physlib.model_advection(graph(), _opt_num(opts, "v", 1.0), T())
    if kind == "open_conservation":
        return physlib.model_open_conservation(graph(), T())
    if kind == "reaction":
        return physlib.model_reaction(graph(), _opt_num(opts, "beta", 1.0), T())
    if kind == "superposition":
        g = graph()
        return physlib.model_superposition(LinSpace(T() * g.ne, "E_t"))
    if kind == "diffusion_to_heat":
        return physlib.model_diffusion_to_heat(graph(), T(), k)
    if kind == "lie":
        return physlib.model_lie(opts.get("rule", "yes") != "no")
    if kind == "maxwell_house":
        return physlib.model_maxwell_house()
    if kind == "static_maxwell_faraday":
        return physlib.static_maxwell_faraday(opts.get("rule", "yes") != "no")[2]
    if kind in ("uwd_transport", "uwd_flux_superposition", "uwd_open_transport",
                "uwd_transport_transformation"):
        return getattr(physlib, kind)(graph(), T())
    raise SpecError(f"unknown model kind {kind!r}")


def parse_spec(text: str, tol: float = 1e-10, budget: int = 10_000) -> SpecFile:
    return _Parser(text, tol, budget).parse()


def load_spec(path: str, tol: float = 1e-10, budget: int = 10_000) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), tol, budget)


# -- serialization ------------------------------------------------------------

def _q(s: str) -> str:
    return shlex.quote(str(s))


def _fmt(x: float) -> str:
    return repr(float(x))


def dump_signature(sig: OperatorSignature, name: str) -> str:
    lines = [f"signature {name}"]
    plain = [s for s in sig.sorts if s not in sig.products]
    if plain:
        lines.append("  sort " + " ".join(plain))
    for p, fs in sig.products.items():
        lines.append(f"  product {p} = {' '.join(fs)}")
    for op, typings in sig.ops.items():
        if "." in op and op.split(".", 1)[0] in sig.products:
            continue
        for dom, cod in typings.items():
            lines.append(f"  op {op} : {dom} -> {cod}")
    done = set()
    for a, b in sig.inverses.items():
        if (b, a) not in done:
            lines.append(f"  inverse {a} {b}")
            done.add((a, b))
    for r in sig.rules:
        rhs = "0" if r.rhs is None else (" ".join(r.rhs) or "id")
        lines.append(f"  rule {' '.join(r.lhs)} -> {rhs}")
    lines.append("end")
    return "\n".join(lines)


def dump_matrix(m, name: str) -> str:
    coo = sp.coo_matrix(m)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"matrix {name} {coo.shape[0]}x{coo.shape[1]}"]
    for k in order:
        lines.append(f"  {coo.row[k] + 1} {coo.col[k] + 1} {_fmt(coo.data[k])}")
    lines.append("end")
    return "\n".join(lines)


def _sym_text(m: SymMorphism) -> str:
    if m.is_zero:
        return "zero"
    if not m.word:
        return "id" if m.coeff == 1 else f"{m.coeff} id"
    return (f"{m.coeff} " if m.coeff != 1 else "") + " ".join(m.word)


def dump_diagram(d: Diagram, name: str | None = None, sig_name: str = "SIG") -> str:
    """Spec text (with any needed signature and matrix blocks) that rebuilds ``d``."""
    name = name or d.name or "D"
    parts = []
    g = d.shape.graph
    if d.is_linear:
        head = f"diagram {name} linear"
        for e in d.edges:
            parts.append(dump_matrix(d.hom(e).matrix, f"{name}.{e}"))
    else:
        parts.append(dump_signature(d.semantics.sig, sig_name))
        head = f"diagram {name} symbolic {sig_name}"
    lines = [head]
    for v in d.vertices:
        ob = d.ob(v)
        lines.append(f"  ob {_q(v)} : {ob.dim if d.is_linear else ob}")
    for e in d.edges:
        rhs = f"@{name}.{e}" if d.is_linear else _sym_text(d.hom(e))
        lines.append(f"  hom {_q(e)} : {_q(g.src[e])} -> {_q(g.tgt[e])} = {rhs}")
    for lhs, rhs in d.shape.relations:
        def p(x):
            return " ".join(_q(e) for e in x.edges) if x.edges else f"id {_q(x.start)}"
        lines.append(f"  rel {p(lhs)} = {p(rhs)}")
    for pn in d.products:
        s = f"  product {_q(pn.vertex)} of {' '.join(map(_q, pn.factors))} proj {' '.join(map(_q, pn.projections))}"
        if pn.sums:
            s += " sum " + " ".join(map(_q, pn.sums))
        lines.append(s)
    for k, lab in g.labels.items():
        lines.append(f"  label {_q(k)} {_q(lab)}")
    if d.assumed:
        lines.append("  assume")
    lines.append("end")
    parts.append("\n".join(lines))
    return "\n\n".join(parts) + "\n"


def dump_lift(L: Lift, name: str, diagram_name: str) -> str:
    lines = [f"lift {name} of {diagram_name}"]
    for v in L.diagram.vertices:
        lines.append(f"  {_q(v)} = " + " ".join(_fmt(x) for x in L[v]))
    lines.append("end")
    return "\n".join(lines) + "\n"

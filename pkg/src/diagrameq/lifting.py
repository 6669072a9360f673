"""Lifts of linear diagrams: verification, solving, and pushforward.

A lift assigns a vector ``x_j`` to each shape object with ``D(f) x_j = x_k``
for every arrow ``f: j -> k``. Finding one is a linear system.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .diagram import Diagram
from .morphism import DiagramMorphism

RANK_TOL = 1e-10
DEFAULT_TOL = 1e-9


class LiftError(ValueError):
    pass


class Lift:
    """Element assignment for a linear diagram."""

    def __init__(self, diagram: Diagram, elements: Mapping[str, Sequence[float]]):
        if not diagram.is_linear:
            raise LiftError("lifts are only defined for linear diagrams")
        self.diagram = diagram
        els = {}
        for v in diagram.vertices:
            if v not in elements:
                raise LiftError(f"no element for object {v!r}")
            x = np.asarray(elements[v], dtype=float).reshape(-1)
            if x.shape[0] != diagram.ob(v).dim:
                raise LiftError(f"element at {v!r} has length {x.shape[0]}, expected {diagram.ob(v).dim}")
            els[v] = x
        self.elements = els

    def __getitem__(self, v: str) -> np.ndarray:
        return self.elements[v]

    def vector(self) -> np.ndarray:
        parts = [self.elements[v] for v in self.diagram.vertices]
        return np.concatenate(parts) if parts else np.zeros(0)

    def max_diff(self, other: Lift) -> float:
        diffs = [np.max(np.abs(self[v] - other[v])) for v in self.diagram.vertices if self[v].size]
        return float(max(diffs)) if diffs else 0.0

    def __repr__(self) -> str:
        return f"Lift({self.diagram.name or '?'}, {len(self.elements)} objects)"


def zero_lift(d: Diagram) -> Lift:
    if not d.is_linear:
        raise LiftError("lifts are only defined for linear diagrams")
    return Lift(d, {v: np.zeros(d.ob(v).dim) for v in d.vertices})


@dataclass
class LiftReport:
    residuals: dict[str, float]
    tol: float

    @property
    def ok(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def failing(self) -> list[str]:
        return [e for e, r in self.residuals.items() if r > self.tol]

    def __str__(self) -> str:
        lines = [f"lift: {'pass' if self.ok else 'FAIL'}"]
        for e, r in self.residuals.items():
            lines.append(f"  {e}: residual {r:.3e}{'' if r <= self.tol else '  FAIL'}")
        return "\n".join(lines)


def verify_lift(d: Diagram, L: Lift, tol: float = DEFAULT_TOL) -> LiftReport:
    """Max-abs residual of ``D(f) x_j - x_k`` for each arrow."""
    if not d.is_linear:
        raise LiftError("verify_lift needs linear semantics")
    res = {}
    for e in d.edges:
        j, k = d.shape.src(e), d.shape.tgt(e)
        r = d.hom(e)(L[j]) - L[k]
        res[e] = float(np.max(np.abs(r))) if r.size else 0.0
    return LiftReport(res, tol)


class Pinning:
    """Known values on some objects; a pin is a full vector or (indices, values)."""

    def __init__(self, pins: Mapping[str, object] | None = None):
        self.pins: dict[str, tuple[np.ndarray | None, np.ndarray]] = {}
        for v, val in (pins or {}).items():
            if isinstance(val, tuple) and len(val) == 2:
                self.pin(v, val[1], val[0])
            else:
                self.pin(v, val)

    def pin(self, v: str, values, indices=None) -> Pinning:
        vals = np.asarray(values, dtype=float).reshape(-1)
        idx = None if indices is None else np.asarray(indices, dtype=int).reshape(-1)
        if idx is not None and idx.shape != vals.shape:
            raise LiftError(f"pin at {v!r}: {idx.size} indices but {vals.size} values")
        self.pins[v] = (idx, vals)
        return self

    def items(self):
        return self.pins.items()

    def __len__(self) -> int:
        return len(self.pins)


@dataclass
class LinearSystem:
    A: sp.csr_matrix
    b: np.ndarray
    layout: dict[str, tuple[int, int]]  # object -> (offset, dim)
    rows: list[tuple[str, int, int]] = field(default_factory=list)  # (block tag, first row, count)

    @property
    def n_unknowns(self) -> int:
        return self.A.shape[1]

    def split(self, x: np.ndarray) -> dict[str, np.ndarray]:
        return {v: x[o:o + n].copy() for v, (o, n) in self.layout.items()}


class _Builder:
    def __init__(self, d: Diagram):
        self.d = d
        self.layout = {}
        off = 0
        for v in d.vertices:
            n = d.ob(v).dim
            self.layout[v] = (off, n)
            off += n
        self.n = off
        self.blocks: list[sp.csr_matrix] = []
        self.rhs: list[np.ndarray] = []
        self.rows: list[tuple[str, int, int]] = []
        self.nrows = 0

    def add(self, tag: str, terms: list[tuple[str, object]], rhs: np.ndarray) -> None:
        m = len(rhs)
        pieces = {}
        for v, mat in terms:
            mat = sp.csr_matrix(mat)
            pieces[v] = pieces[v] + mat if v in pieces else mat
        cols = []
        for v in self.d.vertices:
            n = self.layout[v][1]
            cols.append(pieces.get(v, sp.csr_matrix((m, n))))
        block = sp.hstack(cols, format="csr") if cols else sp.csr_matrix((m, 0))
        self.blocks.append(block)
        self.rhs.append(np.asarray(rhs, dtype=float))
        self.rows.append((tag, self.nrows, m))
        self.nrows += m

    def add_edges(self) -> None:
        d = self.d
        for e in d.edges:
            j, k = d.shape.src(e), d.shape.tgt(e)
            f = d.hom(e)
            eye = sp.identity(f.cod.dim, format="csr")
            self.add(f"arrow {e}", [(j, f.matrix), (k, -eye)], np.zeros(f.cod.dim))

    def add_pins(self, pins: Pinning) -> None:
        d = self.d
        for v in d.vertices:
            if v not in pins.pins:
                continue
            idx, vals = pins.pins[v]
            n = d.ob(v).dim
            if idx is None:
                if vals.size != n:
                    raise LiftError(f"pin at {v!r} has length {vals.size}, expected {n}")
                sel = sp.identity(n, format="csr")
            else:
                if idx.size and (idx.min() < 0 or idx.max() >= n):
                    raise LiftError(f"pin at {v!r} has indices outside 0..{n - 1}")
                sel = sp.csr_matrix((np.ones(idx.size), (np.arange(idx.size), idx)), shape=(idx.size, n))
            self.add(f"pin {v}", [(v, sel)], vals)
        unknown = [v for v, _ in pins.items() if v not in self.layout]
        if unknown:
            raise LiftError(f"pins on unknown objects {unknown}")

    def system(self) -> LinearSystem:
        if self.blocks:
            A = sp.vstack(self.blocks, format="csr")
            b = np.concatenate(self.rhs)
        else:
            A = sp.csr_matrix((0, self.n))
            b = np.zeros(0)
        return LinearSystem(A, b, self.layout, self.rows)


def assemble_system(d: Diagram, pins: Pinning | None = None) -> LinearSystem:
    """Arrow rows ``D(f) x_j - x_k = 0`` in edge order, then pin rows in vertex order."""
    if not d.is_linear:
        raise LiftError("assemble_system needs linear semantics")
    b = _Builder(d)
    b.add_edges()
    b.add_pins(pins or Pinning())
    return b.system()


@dataclass
class SolveOutcome:
    status: str  # Unique, Underdetermined, Infeasible
    lift: Lift | None = None
    nullity: int = 0
    residual: float = 0.0
    rank: int = 0

    @property
    def unique(self) -> bool:
        return self.status == "Unique"

    def __str__(self) -> str:
        if self.status == "Infeasible":
            return f"Infeasible (residual {self.residual:.3e})"
        if self.status == "Underdetermined":
            return f"Underdetermined (nullity {self.nullity}, residual {self.residual:.3e})"
        return f"Unique (residual {self.residual:.3e})"


def _eliminate_singletons(A: sp.csr_matrix, b: np.ndarray, tiny: float):
    """Fix unknowns forced by rows with a single nonzero, repeatedly.

    Returns (fixed values by column, remaining row indices). Pins and
    triangular structure (such as a time recursion) are resolved exactly here.
    """
    A = A.tocsr()
    rows = [dict(zip(A.indices[A.indptr[r]:A.indptr[r + 1]].tolist(),
                     A.data[A.indptr[r]:A.indptr[r + 1]].tolist())) for r in range(A.shape[0])]
    for row in rows:
        for c in [c for c, v in row.items() if v == 0.0]:
            del row[c]
    rhs = b.astype(float).copy()
    cols: dict[int, set[int]] = {}
    for r, row in enumerate(rows):
        for c in row:
            cols.setdefault(c, set()).add(r)
    fixed: dict[int, float] = {}
    alive = set(range(len(rows)))
    queue = [r for r, row in enumerate(rows) if len(row) == 1]
    while queue:
        r = queue.pop(0)
        if r not in alive or len(rows[r]) != 1:
            continue
        (c, a), = rows[r].items()
        if abs(a) <= tiny:
            continue
        val = rhs[r] / a
        fixed[c] = val
        alive.discard(r)
        for r2 in sorted(cols.pop(c, ())):
            if r2 == r:
                continue
            rhs[r2] -= rows[r2].pop(c) * val
            if len(rows[r2]) == 1:
                queue.append(r2)
        rows[r].clear()
    remaining = sorted(r for r in alive if rows[r])
    return fixed, remaining


def _solve_system(d: Diagram, sys: LinearSystem, tol: float, rank_tol: float) -> SolveOutcome:
    n = sys.n_unknowns
    A = sys.A.tocsr()
    x = np.zeros(n)
    fixed, remaining = _eliminate_singletons(A, sys.b, rank_tol)
    for c, v in fixed.items():
        x[c] = v
    free = np.array([c for c in range(n) if c not in fixed], dtype=int)
    rank = len(fixed)
    if remaining and free.size:
        sub = A[remaining][:, free].toarray()
        rhs = sys.b[remaining] - A[remaining] @ x
        # rank-revealing minimum-norm least squares (SVD based)
        y, _, r, _ = sla.lstsq(sub, rhs, cond=rank_tol, lapack_driver="gelsd")
        x[free] = y
        rank += int(r)
    res_vec = A @ x - sys.b
    res = float(np.max(np.abs(res_vec))) if res_vec.size else 0.0
    nullity = n - rank
    if res > tol:
        return SolveOutcome("Infeasible", residual=res, rank=rank, nullity=nullity)
    lift = Lift(d, sys.split(x))
    if nullity == 0:
        return SolveOutcome("Unique", lift, 0, res, rank)
    return SolveOutcome("Underdetermined", lift, nullity, res, rank)


def solve_lift(d: Diagram, pins: Pinning | None = None, tol: float = DEFAULT_TOL,
               rank_tol: float = RANK_TOL) -> SolveOutcome:
    """Solve the lifting problem with pinned values.

    Unique: full column rank and consistent. Underdetermined: consistent
    with a kernel; the returned lift is the minimum-norm solution. Infeasible:
    least-squares residual above ``tol``.
    """
    return _solve_system(d, assemble_system(d, pins), tol, rank_tol)


def _bvp_builder(m: DiagramMorphism, boundary: Lift, pins: Pinning | None) -> _Builder:
    d = m.dom
    b = _Builder(d)
    b.add_edges()
    for j in m.cod.vertices:
        rho = m.components[j]
        b.add(f"boundary {j}", [(m.R(j), rho.matrix)], boundary[j])
    b.add_pins(pins or Pinning())
    return b


def solve_bvp(m: DiagramMorphism, boundary: Lift, tol: float = DEFAULT_TOL,
              rank_tol: float = RANK_TOL, pins: Pinning | None = None) -> SolveOutcome:
    """Extension-lifting: find a lift of ``m.dom`` whose pushforward is ``boundary``.

    Adds rows ``rho[j'] x_{R j'} = b_{j'}`` for each codomain object.
    """
    if not m.dom.is_linear:
        raise LiftError("solve_bvp needs linear semantics")
    rep = verify_lift(m.cod, boundary, tol)
    if not rep.ok:
        raise LiftError(f"boundary data is not a lift of the codomain (arrows {rep.failing})")
    return _solve_system(m.dom, _bvp_builder(m, boundary, pins).system(), tol, rank_tol)


def pushforward_lift(m: DiagramMorphism, L: Lift, tol: float = DEFAULT_TOL) -> Lift:
    """``x'[j'] = rho[j'](x[R j'])``; the result is checked against the codomain."""
    rep = verify_lift(m.dom, L, tol)
    if not rep.ok:
        raise LiftError(f"input is not a lift of the domain (arrows {rep.failing})")
    out = Lift(m.cod, {j: m.components[j](L[m.R(j)]) for j in m.cod.vertices})
    rep = verify_lift(m.cod, out, _scaled_tol(tol, L))
    if not rep.ok:
        raise LiftError(f"pushforward is not a lift (arrows {rep.failing}); naturality is broken")
    return out


def _scaled_tol(tol: float, L: Lift) -> float:
    scale = max((float(np.max(np.abs(x))) for x in L.elements.values() if x.size), default=0.0)
    return tol * max(1.0, scale)

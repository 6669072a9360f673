"""Semantic target categories.

Two categories are provided: finite-dimensional real vector spaces with
matrices, and a symbolic category of sorted operator words whose equality is
decided by rewriting. ``LinearSemantics`` and ``SymbolicSemantics`` give both
a common interface so diagram code does not care which one it is using.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

DEFAULT_TOL = 1e-10
DEFAULT_BUDGET = 10_000
SPARSE_MIN = 64  # matrices at least this large in both dimensions are stored sparse


class SemanticsError(ValueError):
    pass


# -- linear category ----------------------------------------------------------

@dataclass(frozen=True)
class LinSpace:
    """The space R^dim. Two spaces are equal iff their dimensions agree."""

    dim: int
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 0:
            raise SemanticsError(f"dimension must be a nonnegative integer, got {self.dim!r}")

    def __str__(self) -> str:
        return f"{self.label}:R^{self.dim}" if self.label else f"R^{self.dim}"


ZERO = LinSpace(0, "0")


class LinMap:
    """A linear map given by a ``cod.dim x dom.dim`` matrix."""

    __slots__ = ("dom", "cod", "_m")

    def __init__(self, dom: LinSpace, cod: LinSpace, matrix):
        if sp.issparse(matrix):
            m = sp.csr_matrix(matrix, dtype=float)
        else:
            m = np.asarray(matrix, dtype=float)
            if m.size == 0:
                m = m.reshape(cod.dim, dom.dim)
        if m.shape != (cod.dim, dom.dim):
            raise SemanticsError(f"matrix shape {m.shape} does not match {cod.dim}x{dom.dim}")
        data = m.data if sp.issparse(m) else m
        if not np.all(np.isfinite(data)):
            raise SemanticsError("matrix has non-finite entries")
        if min(m.shape) >= SPARSE_MIN:
            m = sp.csr_matrix(m)
        elif sp.issparse(m):
            m = m.toarray()
        self.dom = dom
        self.cod = cod
        self._m = m

    @property
    def matrix(self):
        return self._m

    @property
    def shape(self) -> tuple[int, int]:
        return self._m.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self._m)

    def dense(self) -> np.ndarray:
        return self._m.toarray() if sp.issparse(self._m) else np.array(self._m)

    def sparse(self) -> sp.csr_matrix:
        return sp.csr_matrix(self._m)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dom.dim,):
            raise SemanticsError(f"vector of length {x.shape} applied to map from R^{self.dom.dim}")
        return np.asarray(self._m @ x).reshape(self.cod.dim)

    def __neg__(self) -> LinMap:
        return LinMap(self.dom, self.cod, -self._m)

    def scale(self, c: float) -> LinMap:
        return LinMap(self.dom, self.cod, c * self._m)

    def __add__(self, other: LinMap) -> LinMap:
        if self.dom != other.dom or self.cod != other.cod:
            raise SemanticsError("cannot add maps with different types")
        return LinMap(self.dom, self.cod, self._m + other._m)

    def __repr__(self) -> str:
        return f"LinMap({self.dom} -> {self.cod})"


def identity(space: LinSpace) -> LinMap:
    if space.dim >= SPARSE_MIN:
        return LinMap(space, space, sp.identity(space.dim, format="csr"))
    return LinMap(space, space, np.eye(space.dim))


def zero_map(dom: LinSpace, cod: LinSpace) -> LinMap:
    if min(dom.dim, cod.dim) >= SPARSE_MIN:
        return LinMap(dom, cod, sp.csr_matrix((cod.dim, dom.dim)))
    return LinMap(dom, cod, np.zeros((cod.dim, dom.dim)))


def lin_compose(f: LinMap, g: LinMap) -> LinMap:
    """First ``f`` then ``g``; the matrix is ``g @ f``."""
    if f.cod != g.dom:
        raise SemanticsError(f"cannot compose {f} with {g}")
    m = g.matrix @ f.matrix
    return LinMap(f.dom, g.cod, m)


def lin_compose_all(maps: Sequence[LinMap], start: LinSpace) -> LinMap:
    out = identity(start)
    for m in maps:
        out = lin_compose(out, m)
    return out


def lin_diff(f: LinMap, g: LinMap) -> float:
    """Largest absolute entry of ``f - g``."""
    if f.dom != g.dom or f.cod != g.cod:
        raise SemanticsError(f"cannot compare {f} with {g}")
    d = f.matrix - g.matrix
    if sp.issparse(d):
        return float(abs(d).max()) if d.nnz else 0.0
    d = np.asarray(d)
    return float(np.max(np.abs(d))) if d.size else 0.0


def lin_equal(f: LinMap, g: LinMap, tol: float = DEFAULT_TOL) -> bool:
    return lin_diff(f, g) <= tol


def lin_rank(f: LinMap, tol: float = DEFAULT_TOL) -> int:
    m = f.dense()
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def lin_is_invertible(f: LinMap, tol: float = DEFAULT_TOL) -> bool:
    return f.dom.dim == f.cod.dim and lin_rank(f, tol) == f.dom.dim


def lin_inverse(f: LinMap, tol: float = DEFAULT_TOL) -> LinMap:
    if not lin_is_invertible(f, tol):
        raise SemanticsError(f"{f} is not invertible")
    if f.dom.dim == 0:
        return LinMap(f.cod, f.dom, np.zeros((0, 0)))
    m = f.matrix
    if sp.issparse(m):
        # diagonal maps (stars, identities) stay sparse
        if m.nnz == np.count_nonzero(m.diagonal()) and m.nnz == f.dom.dim:
            return LinMap(f.cod, f.dom, sp.diags(1.0 / m.diagonal(), format="csr"))
        return LinMap(f.cod, f.dom, np.linalg.inv(m.toarray()))
    return LinMap(f.cod, f.dom, np.linalg.inv(m))


def direct_sum(spaces: Sequence[LinSpace], label: str = "") -> tuple[LinSpace, list[LinMap], list[LinMap]]:
    """Direct sum with its canonical projections and injections."""
    total = LinSpace(sum(s.dim for s in spaces), label or "+".join(s.label for s in spaces))
    projections, injections = [], []
    offset = 0
    for s in spaces:
        p = sp.eye(s.dim, total.dim, k=offset, format="csr")
        projections.append(LinMap(total, s, p))
        injections.append(LinMap(s, total, p.T.tocsr()))
        offset += s.dim
    return total, projections, injections


def sum_map(n: int, space: LinSpace) -> LinMap:
    """The map ``space^n -> space`` adding the ``n`` blocks."""
    total = LinSpace(n * space.dim)
    m = sp.hstack([sp.identity(space.dim, format="csr")] * n, format="csr") if n else \
        sp.csr_matrix((space.dim, 0))
    return LinMap(total, space, m)


def to_matrix_market(f: LinMap) -> str:
    """Coordinate triplet text with 1-based indices."""
    m = sp.coo_matrix(f.matrix)
    order = np.lexsort((m.col, m.row))
    lines = ["%%MatrixMarket matrix coordinate real general",
             f"{f.cod.dim} {f.dom.dim} {len(order)}"]
    for k in order:
        lines.append(f"{m.row[k] + 1} {m.col[k] + 1} {float(m.data[k])!r}")
    return "\n".join(lines) + "\n"


def from_matrix_market(text: str) -> LinMap:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("%")]
    if not rows:
        raise SemanticsError("empty MatrixMarket text")
    nr, nc, nnz = (int(x) for x in rows[0])
    if len(rows) - 1 != nnz:
        raise SemanticsError(f"expected {nnz} entries, found {len(rows) - 1}")
    r = [int(x[0]) - 1 for x in rows[1:]]
    c = [int(x[1]) - 1 for x in rows[1:]]
    v = [float(x[2]) for x in rows[1:]]
    m = sp.coo_matrix((v, (r, c)), shape=(nr, nc))
    return LinMap(LinSpace(nc), LinSpace(nr), m.tocsr())


# -- symbolic category --------------------------------------------------------

Word = tuple[str, ...]


@dataclass(frozen=True)
class SymMorphism:
    """A scalar multiple of an operator word; ``coeff == 0`` is the zero morphism."""

    dom: str
    cod: str
    word: Word = ()
    coeff: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        object.__setattr__(self, "word", tuple(self.word))
        if self.coeff == 0 and self.word:
            object.__setattr__(self, "word", ())

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        body = ";".join(self.word) if self.word else f"id({self.dom})"
        if self.coeff == 1:
            return body
        if self.coeff == -1:
            return "-" + body
        return f"{self.coeff}*{body}"


def sym_zero(dom: str, cod: str) -> SymMorphism:
    return SymMorphism(dom, cod, (), Fraction(0))


def sym_identity(sort: str) -> SymMorphism:
    return SymMorphism(sort, sort, ())


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: Word | None  # None is the zero word

    def __str__(self) -> str:
        return f"{' '.join(self.lhs)} -> {'0' if self.rhs is None else ' '.join(self.rhs) or 'id'}"


class OperatorSignature:
    """Sorts, overloaded operator symbols, rewrite rules, products and inverses.

    An operator name may carry several typings as long as no two share a
    domain sort, so a word is typed deterministically from its start sort.
    """

    def __init__(self, sorts: Iterable[str] = (), ops: Iterable[tuple[str, str, str]] = (),
                 rules: Iterable[tuple[Sequence[str], Sequence[str] | None]] = (),
                 products: Mapping[str, Sequence[str]] | None = None,
                 inverses: Iterable[tuple[str, str]] = ()):
        self.sorts: list[str] = []
        self.ops: dict[str, dict[str, str]] = {}
        self.rules: list[Rule] = []
        self.products: dict[str, tuple[str, ...]] = {}
        self.inverses: dict[str, str] = {}
        for s in sorts:
            self.add_sort(s)
        for name, dom, cod in ops:
            self.add_op(name, dom, cod)
        for name, factors in (products or {}).items():
            self.add_product(name, factors)
        for a, b in inverses:
            self.add_inverse(a, b)
        for lhs, rhs in rules:
            self.add_rule(lhs, rhs)

    def add_sort(self, s: str) -> None:
        if s in self.sorts:
            raise SemanticsError(f"duplicate sort {s!r}")
        self.sorts.append(s)

    def add_op(self, name: str, dom: str, cod: str) -> None:
        for s in (dom, cod):
            if s not in self.sorts:
                raise SemanticsError(f"op {name!r}: unknown sort {s!r}")
        typings = self.ops.setdefault(name, {})
        if dom in typings:
            raise SemanticsError(f"op {name!r} already has a typing from sort {dom!r}")
        typings[dom] = cod

    def add_product(self, name: str, factors: Sequence[str]) -> None:
        """Declare ``name`` as a product sort with projections ``name.pi<i>``.

        If all factors coincide, ``name.+`` is the sum map onto that factor.
        """
        factors = tuple(factors)
        if name not in self.sorts:
            self.add_sort(name)
        self.products[name] = factors
        for i, f in enumerate(factors, 1):
            self.add_op(f"{name}.pi{i}", name, f)
        if factors and len(set(factors)) == 1:
            self.add_op(f"{name}.+", name, factors[0])

    def add_inverse(self, a: str, b: str) -> None:
        if a not in self.ops or b not in self.ops:
            raise SemanticsError(f"inverse pair ({a!r}, {b!r}) uses unknown ops")
        self.inverses[a] = b
        self.inverses[b] = a

    def add_rule(self, lhs: Sequence[str], rhs: Sequence[str] | None) -> None:
        lhs = tuple(lhs)
        rhs = None if rhs is None else tuple(rhs)
        if not lhs:
            raise SemanticsError("rule with empty left-hand side")
        for w in (lhs, rhs or ()):
            for s in w:
                if s not in self.ops:
                    raise SemanticsError(f"rule uses unknown op {s!r}")
        typed = False
        for start in self.sorts:
            end = self.type_word(lhs, start)
            if end is None:
                continue
            typed = True
            if rhs is not None and self.type_word(rhs, start) != end:
                raise SemanticsError(f"rule {Rule(lhs, rhs)} changes type from sort {start!r}")
        if not typed:
            raise SemanticsError(f"rule left-hand side {lhs} is not typeable from any sort")
        self.rules.append(Rule(lhs, rhs))

    def type_word(self, word: Sequence[str], start: str) -> str | None:
        s = start
        for op in word:
            s = self.ops.get(op, {}).get(s)
            if s is None:
                return None
        return s

    def morphism(self, dom: str, word: Sequence[str] | str, coeff=1) -> SymMorphism:
        if isinstance(word, str):
            word = word.split()
        if dom not in self.sorts:
            raise SemanticsError(f"unknown sort {dom!r}")
        cod = self.type_word(word, dom)
        if cod is None:
            raise SemanticsError(f"word {' '.join(word)!r} is ill-sorted from {dom!r}")
        return SymMorphism(dom, cod, tuple(word), Fraction(coeff))

    def check(self, m: SymMorphism) -> None:
        for s in (m.dom, m.cod):
            if s not in self.sorts:
                raise SemanticsError(f"unknown sort {s!r}")
        if m.is_zero:
            return
        if self.type_word(m.word, m.dom) != m.cod:
            raise SemanticsError(f"{m} is ill-sorted as {m.dom} -> {m.cod}")


def sym_compose(f: SymMorphism, g: SymMorphism) -> SymMorphism:
    if f.cod != g.dom:
        raise SemanticsError(f"cannot compose {f}: ...->{f.cod} with {g}: {g.dom}->...")
    if f.is_zero or g.is_zero:
        return sym_zero(f.dom, g.cod)
    return SymMorphism(f.dom, g.cod, f.word + g.word, f.coeff * g.coeff)


def _rewrite_once(word: Word, start: str, sig: OperatorSignature) -> tuple[Word | None, bool]:
    """Apply one rewrite; returns (new word or None for zero, changed)."""
    for i in range(len(word)):
        for rule in sig.rules:
            n = len(rule.lhs)
            if word[i:i + n] != rule.lhs:
                continue
            at = sig.type_word(word[:i], start)
            if at is None or sig.type_word(rule.lhs, at) is None:
                continue
            if rule.rhs is None:
                return None, True
            return word[:i] + rule.rhs + word[i + n:], True
    return word, False


def sym_normalize(m: SymMorphism, sig: OperatorSignature, budget: int = DEFAULT_BUDGET) -> SymMorphism:
    """Rewrite with the first applicable rule at the leftmost position until stuck.

    Stops early once ``budget`` rewrites have been applied.
    """
    sig.check(m)
    if m.is_zero:
        return m
    word = m.word
    for _ in range(budget):
        new, changed = _rewrite_once(word, m.dom, sig)
        if new is None:
            return sym_zero(m.dom, m.cod)
        if not changed:
            break
        word = new
    return SymMorphism(m.dom, m.cod, word, m.coeff)


def sym_equal(m1: SymMorphism, m2: SymMorphism, sig: OperatorSignature,
              budget: int = DEFAULT_BUDGET) -> bool | None:
    """True if the normal forms coincide, else None (not proven)."""
    if m1.dom != m2.dom or m1.cod != m2.cod:
        raise SemanticsError(f"sort mismatch: {m1.dom}->{m1.cod} vs {m2.dom}->{m2.cod}")
    n1, n2 = sym_normalize(m1, sig, budget), sym_normalize(m2, sig, budget)
    if n1.is_zero and n2.is_zero:
        return True
    if n1.word == n2.word and n1.coeff == n2.coeff:
        return True
    return None


def sym_inverse(m: SymMorphism, sig: OperatorSignature) -> SymMorphism | None:
    """Inverse via declared operator inverses, or None if unavailable."""
    if m.is_zero:
        return None
    inv = []
    for op in reversed(m.word):
        if op not in sig.inverses:
            return None
        inv.append(sig.inverses[op])
    out = SymMorphism(m.cod, m.dom, tuple(inv), 1 / m.coeff)
    sig.check(out)
    return out


# -- common interface ---------------------------------------------------------

class LinearSemantics:
    """Real vector spaces and matrices."""

    kind = "linear"

    def __init__(self, tol: float = DEFAULT_TOL):
        self.tol = tol

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LinearSemantics)

    def __hash__(self) -> int:
        return hash("linear")

    def dom(self, f: LinMap) -> LinSpace:
        return f.dom

    def cod(self, f: LinMap) -> LinSpace:
        return f.cod

    def check_object(self, x) -> None:
        if not isinstance(x, LinSpace):
            raise SemanticsError(f"{x!r} is not a LinSpace")

    def check_morphism(self, f) -> None:
        if not isinstance(f, LinMap):
            raise SemanticsError(f"{f!r} is not a LinMap")

    def same_object(self, a, b) -> bool:
        return a == b

    def identity(self, x: LinSpace) -> LinMap:
        return identity(x)

    def zero(self, a: LinSpace, b: LinSpace) -> LinMap:
        return zero_map(a, b)

    def compose(self, f: LinMap, g: LinMap) -> LinMap:
        return lin_compose(f, g)

    def equal(self, f: LinMap, g: LinMap) -> bool:
        return lin_equal(f, g, self.tol)

    def witness(self, f: LinMap, g: LinMap) -> str:
        return f"max|diff|={lin_diff(f, g):.3e}"

    def is_identity(self, f: LinMap) -> bool:
        return f.dom == f.cod and lin_equal(f, identity(f.dom), 0.0)

    def invert(self, f: LinMap) -> LinMap | None:
        return lin_inverse(f, self.tol) if lin_is_invertible(f, self.tol) else None

    def product_cone(self, obj: LinSpace, factors: Sequence[LinSpace]):
        """Canonical projections (and sum map, if defined) exhibiting ``obj`` as a product."""
        if obj.dim != sum(f.dim for f in factors):
            raise SemanticsError(f"{obj} is not the direct sum of {[str(f) for f in factors]}")
        _, proj, _ = direct_sum(factors)
        proj = [LinMap(obj, p.cod, p.matrix) for p in proj]
        s = None
        if factors and len(set(factors)) == 1:
            s = LinMap(obj, factors[0], sum_map(len(factors), factors[0]).matrix)
        return proj, s

    def show(self, f: LinMap) -> str:
        return f"{f.cod.dim}x{f.dom.dim} matrix"


class SymbolicSemantics:
    """Sorted operator words with rewrite-rule equality."""

    kind = "symbolic"

    def __init__(self, sig: OperatorSignature, budget: int = DEFAULT_BUDGET):
        self.sig = sig
        self.budget = budget

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SymbolicSemantics) and other.sig is self.sig

    def __hash__(self) -> int:
        return id(self.sig)

    def dom(self, f: SymMorphism) -> str:
        return f.dom

    def cod(self, f: SymMorphism) -> str:
        return f.cod

    def check_object(self, x) -> None:
        if x not in self.sig.sorts:
            raise SemanticsError(f"unknown sort {x!r}")

    def check_morphism(self, f) -> None:
        if not isinstance(f, SymMorphism):
            raise SemanticsError(f"{f!r} is not a SymMorphism")
        self.sig.check(f)

    def same_object(self, a, b) -> bool:
        return a == b

    def identity(self, x: str) -> SymMorphism:
        return sym_identity(x)

    def zero(self, a: str, b: str) -> SymMorphism:
        return sym_zero(a, b)

    def compose(self, f: SymMorphism, g: SymMorphism) -> SymMorphism:
        return sym_compose(f, g)

    def equal(self, f: SymMorphism, g: SymMorphism) -> bool | None:
        return sym_equal(f, g, self.sig, self.budget)

    def witness(self, f: SymMorphism, g: SymMorphism) -> str:
        n1 = sym_normalize(f, self.sig, self.budget)
        n2 = sym_normalize(g, self.sig, self.budget)
        return f"normal forms {n1} vs {n2}"

    def is_identity(self, f: SymMorphism) -> bool:
        return f.dom == f.cod and sym_equal(f, sym_identity(f.dom), self.sig, self.budget) is True

    def invert(self, f: SymMorphism) -> SymMorphism | None:
        if f.dom == f.cod and not f.word and f.coeff != 0:
            return SymMorphism(f.dom, f.dom, (), 1 / f.coeff)
        return sym_inverse(f, self.sig)

    def product_cone(self, obj: str, factors: Sequence[str]):
        factors = tuple(factors)
        if self.sig.products.get(obj) != factors:
            raise SemanticsError(f"sort {obj!r} is not declared as the product of {factors}")
        proj = [self.sig.morphism(obj, [f"{obj}.pi{i}"]) for i in range(1, len(factors) + 1)]
        s = self.sig.morphism(obj, [f"{obj}.+"]) if f"{obj}.+" in self.sig.ops else None
        return proj, s

    def show(self, f: SymMorphism) -> str:
        return str(f)

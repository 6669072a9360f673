"""Initial and relatively initial functors; weak equivalences of diagrams.

A strong morphism ``(R, rho): D -> D'`` is certified as a weak equivalence when
``R`` is initial, or when the forward morphism ``(R, rho^-1): D' -> D`` is
relatively initial. A certified morphism transfers lifts in both directions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fincat import (
    DEFAULT_BUDGET, CommaCat, FinFunctor, NonAcyclicError, Path, Verdict, build_comma,
    comma_category, enumerate_paths, paths_equal,
)
from .lifting import DEFAULT_TOL, Lift, LiftError, pushforward_lift, verify_lift
from .morphism import DiagramMorphism, ForwardMorphism, inverse_forward


class EquivError(ValueError):
    pass


def _summary(c: CommaCat) -> dict:
    return {"objects": len(c.objects), "components": c.n_components,
            "components_with_undecided": len(c.components(include_undecided=True))}


@dataclass
class InitialityResult:
    """Per-object comma summaries; ``verdict`` is True, False or None (inconclusive)."""

    verdict: bool | None
    summaries: dict[str, dict] = field(default_factory=dict)
    commas: dict[str, CommaCat] = field(default_factory=dict, repr=False)

    def __bool__(self) -> bool:
        return self.verdict is True

    def __str__(self) -> str:
        head = {True: "yes", False: "no", None: "inconclusive"}[self.verdict]
        lines = [head]
        for j, s in self.summaries.items():
            lines.append(f"  at {j}: {s['objects']} objects, {s['components']} components")
        return "\n".join(lines)


def _judge(commas: dict[str, CommaCat]) -> InitialityResult:
    verdict: bool | None = True
    for c in commas.values():
        if not c.objects:
            verdict = False
        elif c.n_components > 1:
            if len(c.components(include_undecided=True)) > 1:
                verdict = False
            elif verdict is True:
                verdict = None
    return InitialityResult(verdict, {j: _summary(c) for j, c in commas.items()}, commas)


def is_initial(R: FinFunctor, budget: int = DEFAULT_BUDGET) -> InitialityResult:
    """Every comma category ``R/j`` is nonempty and connected."""
    if not R.cod.acyclic:
        raise NonAcyclicError("is_initial needs an acyclic codomain")
    return _judge({j: comma_category(R, j, budget) for j in R.cod.vertices})


def _hom_reps(c, a, b, budget):
    reps = []
    for p in enumerate_paths(c, a, b):
        if not any(paths_equal(c, p, q, budget) for q in reps):
            reps.append(p)
    return reps


def is_full_ess_surjective(R: FinFunctor, budget: int = DEFAULT_BUDGET) -> bool:
    """Surjective on objects, and every hom between image objects is hit.

    In an acyclic shape the only isomorphisms are identities, so essential
    surjectivity reduces to surjectivity on objects. A hom that cannot be
    shown equal to an image is treated as missed.
    """
    if not (R.dom.acyclic and R.cod.acyclic):
        raise NonAcyclicError("is_full_ess_surjective needs acyclic shapes")
    image = set(R.ob_map.values())
    if any(v not in image for v in R.cod.vertices):
        return False
    for a in R.dom.vertices:
        for b in R.dom.vertices:
            hit = [R.map_path(p) for p in enumerate_paths(R.dom, a, b)]
            for target in _hom_reps(R.cod, R(a), R(b), budget):
                if not any(paths_equal(R.cod, target, h, budget) is Verdict.EQUAL for h in hit):
                    return False
    return True


def is_relatively_initial(m: ForwardMorphism, budget: int = DEFAULT_BUDGET) -> InitialityResult:
    """Every relative comma ``(R, rho)/j'`` is nonempty and connected.

    ``m`` runs forward: ``R: J -> J'`` and ``rho[j]: D j -> D' R j``. An arrow
    ``h: j -> k`` joins ``(j, f')`` to ``(k, g')`` when
    ``D h ; rho_k ; D' g' = rho_j ; D' f'``. Undecidable equalities make the
    verdict inconclusive rather than false, unless connectivity fails anyway.
    """
    R, D, Dp = m.R, m.dom, m.cod
    if not R.cod.acyclic:
        raise NonAcyclicError("is_relatively_initial needs an acyclic codomain shape")
    sem = D.semantics

    def admits(h: Path, src, dst):
        (j, f), (k, g) = src, dst
        lhs = sem.compose(sem.compose(D.map_path(h), m.components[k]), Dp.map_path(g))
        rhs = sem.compose(m.components[j], Dp.map_path(f))
        return sem.equal(lhs, rhs)

    return _judge({jp: build_comma(R, jp, admits, budget) for jp in R.cod.vertices})


@dataclass
class EquivCertificate:
    morphism: DiagramMorphism
    kind: str  # FullEssSurj, InitialFunctor, RelativelyInitial
    summaries: dict[str, dict]
    relative: InitialityResult | None = field(default=None, repr=False)

    def __str__(self) -> str:
        lines = [f"weak equivalence certified: {self.kind}"]
        for j, s in self.summaries.items():
            lines.append(f"  comma at {j}: {s['objects']} objects, {s['components']} components")
        return "\n".join(lines)


def certify_weak_equivalence(m: DiagramMorphism, budget: int = DEFAULT_BUDGET) -> EquivCertificate | None:
    """Certificate for a strong morphism, or None when no sufficient condition is proven."""
    if not m.strong:
        raise EquivError("morphism is not strong: some component is not invertible")
    R = m.R
    init = is_initial(R, budget)
    if R.dom.acyclic and is_full_ess_surjective(R, budget):
        return EquivCertificate(m, "FullEssSurj", init.summaries)
    if init:
        return EquivCertificate(m, "InitialFunctor", init.summaries)
    rel = is_relatively_initial(inverse_forward(m), budget)
    if rel:
        return EquivCertificate(m, "RelativelyInitial", rel.summaries, rel)
    return None


def _comma_objects(cert: EquivCertificate, j: str, budget: int) -> list[tuple[str, Path]]:
    if cert.relative is not None:
        return cert.relative.commas[j].objects
    return comma_category(cert.morphism.R, j, budget).objects


def transfer_lift_backward(cert: EquivCertificate, Lp: Lift, tol: float = DEFAULT_TOL,
                           reverse: bool = False, budget: int = DEFAULT_BUDGET) -> Lift:
    """Lift of the domain whose pushforward is ``Lp``.

    On the image of ``R`` the element is ``rho^-1(x')``; elsewhere the first
    object ``(j', f)`` of the comma at ``j`` gives ``D(f) rho^-1(x'_{j'})``.
    ``reverse`` picks preimages and comma objects from the other end, which
    must give the same answer.
    """
    if not isinstance(cert, EquivCertificate):
        raise EquivError("a weak-equivalence certificate is required")
    m = cert.morphism
    D, Dp = m.dom, m.cod
    rep = verify_lift(Dp, Lp, tol)
    if not rep.ok:
        raise LiftError(f"input is not a lift of the codomain (arrows {rep.failing})")
    fwd = inverse_forward(m)
    back = {jp: fwd.components[jp](Lp[jp]) for jp in Dp.vertices}
    order = list(Dp.vertices)[::-1] if reverse else list(Dp.vertices)
    els: dict[str, np.ndarray] = {}
    for j in D.vertices:
        pre = [jp for jp in order if m.R(jp) == j]
        if pre:
            els[j] = back[pre[0]]
            continue
        objs = _comma_objects(cert, j, budget)
        if not objs:
            raise EquivError(f"empty comma category at {j!r}; certificate is broken")
        jp, f = objs[-1] if reverse else objs[0]
        els[j] = D.map_path(f)(back[jp])
    L = Lift(D, els)
    scale = max((float(np.max(np.abs(x))) for x in Lp.elements.values() if x.size), default=0.0)
    rep = verify_lift(D, L, tol * max(1.0, scale))
    if not rep.ok:
        raise EquivError(f"transferred lift fails at arrows {rep.failing}; certificate is broken")
    return L


def transfer_lift_forward(cert: EquivCertificate, L: Lift, tol: float = DEFAULT_TOL) -> Lift:
    return pushforward_lift(cert.morphism, L, tol)

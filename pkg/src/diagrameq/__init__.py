"""Executable diagrams of equations: build, solve, compose and compare."""
from .fincat import (
    CommaCat, FinCatError, FinCatPresentation, FinFunctor, Graph, NonAcyclicError, Path, Verdict,
    check_functor, comma_category, enumerate_paths, make_path, path_compose, paths_equal, pushout,
)
from .semcat import (
    LinMap, LinSpace, LinearSemantics, OperatorSignature, SymMorphism, SymbolicSemantics,
    direct_sum, lin_compose, lin_equal, sum_map, sym_equal, sym_normalize,
)
from .diagram import (
    Diagram, DiagramError, ProductNode, build_diagram, check_commutes, check_products, export_dot,
)
from .morphism import (
    DiagramMorphism, ForwardMorphism, MorphismError, check_naturality, collage, compose_morphisms,
    identity_morphism, make_morphism,
)
from .lifting import (
    Lift, LiftError, Pinning, SolveOutcome, assemble_system, pushforward_lift, solve_bvp, solve_lift,
    verify_lift,
)
from .equiv import (
    EquivCertificate, EquivError, certify_weak_equivalence, is_full_ess_surjective, is_initial,
    is_relatively_initial, transfer_lift_backward,
)
from .compose import UWD, OpenDiagram, apply_uwd, make_open, open_isomorphic, substitute_uwd

__version__ = "0.1.0"

__all__ = [
    "CommaCat", "FinCatError", "FinCatPresentation", "FinFunctor", "Graph", "NonAcyclicError",
    "Path", "Verdict", "check_functor", "comma_category", "enumerate_paths", "make_path",
    "path_compose", "paths_equal", "pushout", "LinMap", "LinSpace", "LinearSemantics",
    "OperatorSignature", "SymMorphism", "SymbolicSemantics", "direct_sum", "lin_compose",
    "lin_equal", "sum_map", "sym_equal", "sym_normalize", "Diagram", "DiagramError", "ProductNode",
    "build_diagram", "check_commutes", "check_products", "export_dot", "DiagramMorphism",
    "ForwardMorphism", "MorphismError", "check_naturality", "collage", "compose_morphisms",
    "identity_morphism", "make_morphism", "Lift", "LiftError", "Pinning", "SolveOutcome",
    "assemble_system", "pushforward_lift", "solve_bvp", "solve_lift", "verify_lift",
    "EquivCertificate", "EquivError", "certify_weak_equivalence", "is_full_ess_surjective",
    "is_initial", "is_relatively_initial", "transfer_lift_backward", "UWD", "OpenDiagram",
    "apply_uwd", "make_open", "open_isomorphic", "substitute_uwd",
]

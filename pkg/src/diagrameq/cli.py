"""Command line entry point.

Exit codes: 0 success or unique solution, 2 underdetermined, 3 infeasible or a
failed check, 1 usage and parse errors.
"""
from __future__ import annotations

import argparse
import io
import sys
from typing import TextIO


from . import physlib
from .compose import ComposeError, apply_uwd, open_isomorphic, substitute_uwd
from .diagram import FAILS, NOT_PROVEN, Diagram, DiagramError, check_commutes, check_products, export_dot
from .equiv import EquivError, certify_weak_equivalence
from .fincat import DEFAULT_BUDGET, FinCatError
from .lifting import DEFAULT_TOL, Lift, LiftError, pushforward_lift, solve_bvp, solve_lift
from .morphism import DiagramMorphism, MorphismError, check_naturality, collage
from .semcat import SemanticsError
from .specfile import (
    Command, SpecError, SpecFile, SpecValidationError, instantiate_model, load_spec, register, split_opts,
)

EXIT_OK, EXIT_USAGE, EXIT_UNDER, EXIT_FAIL = 0, 1, 2, 3
_STATUS_CODE = {"Unique": EXIT_OK, "Underdetermined": EXIT_UNDER, "Infeasible": EXIT_FAIL}
_RUNTIME_ERRORS = (DiagramError, MorphismError, ComposeError, EquivError, LiftError, SemanticsError,
                   FinCatError, physlib.GraphError)


class _Usage(Exception):
    pass


def _fmt(x: float) -> str:
    x = float(x)
    if x == 0:
        return "0"
    return f"{x:.12g}"


def _print_lift(L: Lift, out: TextIO) -> None:
    for v in L.diagram.vertices:
        for i, x in enumerate(L[v]):
            print(f"  {v}[{i}] = {_fmt(x)}", file=out)


def _get(table: dict, name: str, what: str):
    if name not in table:
        raise _Usage(f"unknown {what} {name!r}")
    return table[name]


class Runner:
    def __init__(self, spec: SpecFile, args, out: TextIO):
        self.spec = spec
        self.args = args
        self.out = out

    def emit(self, line: str = "") -> None:
        print(line, file=self.out)

    # each handler returns an exit code

    def check_diagram(self, name: str, d: Diagram) -> int:
        if self.args.format == "dot":
            self.emit(export_dot(d, name))
            return EXIT_OK
        rep = check_commutes(d, self.args.max_path_len, self.args.budget)
        fails, unproven = rep.with_verdict(FAILS), rep.with_verdict(NOT_PROVEN)
        self.emit(f"diagram {name}: {len(d.vertices)} objects, {len(d.edges)} arrows, "
                  f"{d.semantics.kind} semantics")
        self.emit(f"  parallel pairs: {len(rep.entries)}, non-commuting: {len(fails)}, unproven: {len(unproven)}")
        for e in fails:
            self.emit(f"  note: {e.p} and {e.q} differ ({e.witness})")
        for e in unproven:
            self.emit(f"  note: {e.p} and {e.q} not proven equal")
        code = EXIT_OK
        if d.products:
            prep = check_products(d)
            self.emit(f"  products: {'ok' if prep.ok else 'FAILED'}")
            for p in prep.problems:
                self.emit(f"    {p}")
            if not prep.ok:
                code = EXIT_FAIL
        return code

    def check_morphism(self, name: str, m: DiagramMorphism) -> int:
        rep = check_naturality(m)
        verdict = "ok" if rep.ok else ("FAILED" if rep.failures else "not proven")
        self.emit(f"morphism {name}: naturality {verdict}" + (", strong" if m.strong else ""))
        for e in rep.failures:
            self.emit(f"  fails at {e.edge}: {e.witness}")
        for e in rep.unproven:
            self.emit(f"  not proven at {e.edge}" + (" (assumed)" if e.edge in m.assumed else ""))
        return EXIT_OK if rep.ok else EXIT_FAIL

    def cmd_check(self, c) -> int:
        names = c.args
        code = EXIT_OK
        if not names:
            names = list(self.spec.diagrams) + [m for m in self.spec.morphisms if m not in self.spec.diagrams]
        for n in names:
            if n in self.spec.diagrams:
                code = max(code, self.check_diagram(n, self.spec.diagrams[n]))
            elif n in self.spec.morphisms:
                if self.args.format != "dot":
                    code = max(code, self.check_morphism(n, self.spec.morphisms[n]))
            else:
                raise _Usage(f"unknown diagram or morphism {n!r}")
        return code

    def _report(self, label: str, out) -> int:
        self.emit(f"{label}: {out.status} (rank {out.rank}, nullity {out.nullity}, residual {_fmt(out.residual)})")
        if out.lift is not None and out.status != "Infeasible":
            _print_lift(out.lift, self.out)
        return _STATUS_CODE[out.status]

    def cmd_solve(self, c) -> int:
        if not c.args:
            raise _Usage("solve needs a diagram name")
        d = _get(self.spec.diagrams, c.args[0], "diagram")
        pins = _get(self.spec.pins, c.opts["pins"], "pins") if "pins" in c.opts else None
        return self._report(f"solve {c.args[0]}", solve_lift(d, pins, self.args.tol))

    def cmd_bvp(self, c) -> int:
        if not c.args or "boundary" not in c.opts:
            raise _Usage("bvp needs a morphism name and boundary=LIFT")
        m = _get(self.spec.morphisms, c.args[0], "morphism")
        b = _get(self.spec.lifts, c.opts["boundary"], "lift")
        pins = _get(self.spec.pins, c.opts["pins"], "pins") if "pins" in c.opts else None
        return self._report(f"bvp {c.args[0]}", solve_bvp(m, b, self.args.tol, pins=pins))

    def cmd_push(self, c) -> int:
        if not c.args or "lift" not in c.opts:
            raise _Usage("push needs a morphism name and lift=LIFT")
        m = _get(self.spec.morphisms, c.args[0], "morphism")
        L = _get(self.spec.lifts, c.opts["lift"], "lift")
        Lp = pushforward_lift(m, L, self.args.tol)
        self.emit(f"push {c.args[0]}:")
        _print_lift(Lp, self.out)
        return EXIT_OK

    def cmd_equiv(self, c) -> int:
        if not c.args:
            raise _Usage("equiv needs a morphism name")
        m = _get(self.spec.morphisms, c.args[0], "morphism")
        cert = certify_weak_equivalence(m, self.args.budget)
        if cert is None:
            self.emit(f"equiv {c.args[0]}: NotProven")
            return EXIT_FAIL
        self.emit(f"equiv {c.args[0]}: {cert.kind}")
        for j, s in cert.summaries.items():
            self.emit(f"  comma at {j}: {s['objects']} objects, {s['components']} components")
        return EXIT_OK

    def _show_open(self, name: str, o) -> None:
        d = o.apex
        self.emit(f"{name}: {len(d.vertices)} objects, {len(d.edges)} arrows, legs {[list(l) for l in o.legs]}")
        self.emit("  objects: " + " ".join(d.vertices))
        self.emit("  arrows: " + " ".join(d.edges))

    def cmd_compose(self, c) -> int:
        if not c.args or "fillers" not in c.opts:
            raise _Usage("compose needs a uwd name and fillers=A,B,...")
        u = _get(self.spec.uwds, c.args[0], "uwd")
        fillers = [_get(self.spec.opens, f, "open diagram") for f in c.opts["fillers"].split(",")]
        name = c.opts.get("name", f"{c.args[0]}.composite")
        o = apply_uwd(u, fillers, name)
        self._store(name, o, c)
        self._show_open(name, o)
        return EXIT_OK

    def cmd_substitute(self, c) -> int:
        if not c.args or "inners" not in c.opts or "name" not in c.opts:
            raise _Usage("substitute needs a uwd name, inners=A,-,... and name=NEW")
        u = _get(self.spec.uwds, c.args[0], "uwd")
        inners = [None if x == "-" else _get(self.spec.uwds, x, "uwd") for x in c.opts["inners"].split(",")]
        v = substitute_uwd(u, inners)
        self._store(c.opts["name"], v, c)
        self.emit(f"{c.opts['name']}: boxes {v.box_names}, junctions {sorted(v.junctions)}")
        return EXIT_OK

    def cmd_iso(self, c) -> int:
        if len(c.args) != 2:
            raise _Usage("iso needs two open diagram names")
        a, b = (_get(self.spec.opens, x, "open diagram") for x in c.args)
        ok = open_isomorphic(a, b)
        self.emit(f"iso {c.args[0]} {c.args[1]}: {'yes' if ok else 'no'}")
        return EXIT_OK if ok else EXIT_FAIL

    def cmd_collage(self, c) -> int:
        if not c.args:
            raise _Usage("collage needs a morphism name")
        m = _get(self.spec.morphisms, c.args[0], "morphism")
        name = c.opts.get("name", f"{c.args[0]}.collage")
        d = collage(m, name)
        self._store(name, d, c)
        self.emit(f"{name}: {len(d.vertices)} objects, {len(d.edges)} arrows")
        return EXIT_OK

    def cmd_export(self, c) -> int:
        names = c.args or list(self.spec.diagrams)
        for n in names:
            d = _get(self.spec.diagrams, n, "diagram")
            self.emit(export_dot(d, n))
        return EXIT_OK

    def _store(self, name, obj, c) -> None:
        if name in self.spec.names():
            raise SpecError(f"duplicate name {name!r}", c.line)
        register(self.spec, name, obj)


# which file commands each subcommand runs
_KINDS = {
    "check": ("check",),
    "solve": ("solve",),
    "bvp": ("bvp",),
    "push": ("push",),
    "compose": ("compose", "substitute", "iso", "collage"),
    "equiv": ("equiv",),
    "export": ("export",),
}
# commands that create objects later commands may use
_SETUP = ("compose", "substitute", "collage")


def _run_file(args, out: TextIO) -> int:
    spec = load_spec(args.file, budget=args.budget)
    runner = Runner(spec, args, out)
    if args.names:
        # ad hoc command from the command line, after the file's setup commands
        pos, opts = split_opts(args.names)
        kinds = (args.cmd,)
        cmds = [c for c in spec.commands if c.kind in _SETUP] + [Command(args.cmd, pos, opts, 0)]
    else:
        kinds = _KINDS[args.cmd]
        cmds = [c for c in spec.commands if c.kind in kinds or c.kind in _SETUP]
        if args.cmd in ("check", "export") and not any(c.kind == args.cmd for c in cmds):
            cmds.append(Command(args.cmd, [], {}, 0))
        if not any(c.kind in kinds for c in cmds):
            raise _Usage(f"{args.file} has no '{args.cmd}' commands; name a target on the command line")
    code = EXIT_OK
    for c in cmds:
        handler = getattr(runner, f"cmd_{c.kind}", None)
        if handler is None:
            raise SpecError(f"unknown command {c.kind!r}", c.line)
        if c.kind in kinds:
            code = max(code, handler(c))
            continue
        runner.out = io.StringIO()
        try:
            handler(c)
        finally:
            runner.out = out
    return code


def _models(args, out: TextIO) -> int:
    if not args.names:
        for k in sorted(physlib.CATALOG):
            print(f"{k}: {physlib.CATALOG[k]}", file=out)
        return EXIT_OK
    pos, opts = split_opts(args.names[1:])
    if pos:
        raise _Usage(f"unexpected arguments {pos}")
    kind = args.names[0]
    obj = instantiate_model(kind, opts)
    spec = SpecFile()
    register(spec, kind, obj)
    runner = Runner(spec, args, out)
    if kind in spec.uwds:
        u = spec.uwds[kind]
        print(f"{kind}: boxes {u.box_names}, outer {list(u.outer)}", file=out)
        return EXIT_OK
    code = EXIT_OK
    if kind in spec.morphisms:
        if args.format == "dot":
            return runner.check_diagram(kind, collage(spec.morphisms[kind], kind))
        code = max(code, runner.check_diagram(f"{kind}.dom", spec.diagrams[f"{kind}.dom"]))
        code = max(code, runner.check_diagram(f"{kind}.cod", spec.diagrams[f"{kind}.cod"]))
        code = max(code, runner.check_morphism(kind, spec.morphisms[kind]))
        return code
    if kind in spec.opens and args.format != "dot":
        print(f"legs {[list(l) for l in spec.opens[kind].legs]}", file=out)
    return runner.check_diagram(kind, spec.diagrams[kind])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diagrameq", description="Diagrammatic equations: build, check and solve.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="residual tolerance for lifts")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="rewriting budget")
    common.add_argument("--max-path-len", type=int, default=None, help="longest path compared by check")
    common.add_argument("--format", choices=("text", "dot"), default="text")
    sub = p.add_subparsers(dest="cmd", required=True)
    helps = {
        "check": "build, check commutativity and naturality",
        "solve": "solve for lifts",
        "bvp": "solve boundary value problems",
        "push": "push lifts forward along morphisms",
        "compose": "apply wiring diagrams",
        "equiv": "certify weak equivalences",
        "export": "write Graphviz DOT",
    }
    for name, h in helps.items():
        s = sub.add_parser(name, parents=[common], help=h)
        s.add_argument("file")
        s.add_argument("names", nargs="*", help="target and key=value options; default runs the file's commands")
    m = sub.add_parser("models", parents=[common], help="list or instantiate catalog models")
    m.add_argument("names", nargs="*", help="KIND key=value ...")
    return p


def run(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.cmd == "models":
            return _models(args, out)
        return _run_file(args, out)
    except SpecValidationError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAIL
    except (SpecError, _Usage, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except _RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())

"""Command-line driver: ``termlab <command> ...``.

Exit status is 0 for a terminates verdict or a successful check, 1 for an
unknown verdict or a failed check, and 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from importlib.resources import files
from pathlib import Path
from typing import Sequence

from . import __version__
from .interp import DEFAULT_INPUT_CAP, Box, Choice, Scripted, SeededRandom, check_segment_decrease, run
from .program import DslError, ExecutionError, Program, parse, parse_state
from .ramsey import (
    SearchBudgetExceeded,
    build_extremal,
    find_homogeneous,
    format_coloring,
    longest_mip,
    monotone_subsequence,
    parse_coloring,
    transitivity_witness,
    trt_size,
)
from .report import EXACT, Report, Verdict, box_domain
from .tropical import DEFAULT_CLAMP, INF, clamp, format_matrix, identity, mul, parse_matrix

EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2
DEFAULT_MAX_LEN = 6
DEFAULT_BOX_TEXT = "-50:50"


class UsageError(Exception):
    pass


# -- file lookup -------------------------------------------------------------------


def corpus_dir() -> Path:
    return Path(str(files("termlab") / "corpus"))


def resolve(name: str, subdir: str = "", suffix: str = "") -> Path:
    """A path as given, else the same name inside the shipped corpus."""
    direct = Path(name)
    if direct.exists():
        return direct
    base = corpus_dir() / subdir if subdir else corpus_dir()
    for cand in (base / name, base / (name + suffix)):
        if cand.exists():
            return cand
    raise UsageError(f"cannot read {name!r}: no such file (also looked in {base})")


def load_program(name: str) -> Program:
    return parse(resolve(name, suffix=".tl").read_text())


def _lists(mat) -> list:
    return [["inf" if v == INF else v for v in row] for row in mat.rows]


# -- analyze -----------------------------------------------------------------------------


def _analyze_sct(p: Program, args) -> tuple[Report, list[str]]:
    from .sct import MeasureBasis, decide

    basis = MeasureBasis.parse(args.functions) if args.functions else MeasureBasis.variables(p)
    res = decide(p, basis, args.clamp, args.criterion)
    cert = res.certificate
    lines = [
        f"basis: {', '.join(basis.labels)}",
        f"clamp K={args.clamp}, criterion {args.criterion}",
        f"closure size: {len(cert.closure)}",
    ]
    if res.failing is not None:
        lines.append("first closure element without witness:")
        lines.append(format_matrix(res.failing))
    if args.dump_closure:
        Path(args.dump_closure).write_text(cert.dump() + "\n")
        lines.append(f"closure written to {args.dump_closure}")
    if args.figure:
        from .plotting import plot_matrices

        mats = list(cert.generators) + ([res.failing] if res.failing is not None else [])
        titles = [f"case {c}" for c in p.case_ids] + (["failing"] if res.failing is not None else [])
        plot_matrices(mats, args.figure, titles)
        lines.append(f"figure written to {args.figure}")
    rep = Report(p.name, "sct", res.verdict, cert.to_dict(), EXACT, list(res.notes))
    return rep, lines


def _analyze_ranking(p: Program, args) -> tuple[Report, list[str]]:
    from .ranking import RankingSpec, verify_ranking

    if not args.rank:
        raise UsageError("--method ranking needs --rank")
    rank_spec = RankingSpec.parse(args.rank)
    res = verify_ranking(p, rank_spec)
    labels = rank_spec.labels
    described = [cj.describe(labels) for cj in res.cases]
    cert = {
        "rank": labels,
        "cases": [
            {
                "case": cj.case,
                "certified_by": None if cj.decreasing_index is None else labels[cj.decreasing_index],
                "components": [
                    {"label": lab, "kind": ch.kind, "bounded_below": ch.bounded_below, "detail": ch.detail}
                    for lab, ch in zip(labels, cj.changes)
                ],
            }
            for cj in res.cases
        ],
    }
    diags = [] if res.offending_case is None else [described[p.case_ids.index(res.offending_case)]]
    rep = Report(p.name, "ranking", res.verdict, cert, EXACT, diags)
    return rep, [f"rank: ({', '.join(labels)})", *described]


def _analyze_transinv(p: Program, args) -> tuple[Report, list[str]]:
    from .transinv import check_dwf, check_transition_invariant, format_invariant, parse_invariant

    if not args.invariant:
        raise UsageError("--method transinv needs --invariant")
    inv = parse_invariant(resolve(args.invariant, "invariants", ".inv").read_text())
    unknown = inv.variables() - set(p.vars)
    if unknown:
        raise UsageError(f"invariant mentions undeclared variables: {', '.join(sorted(unknown))}")
    box = Box.parse(args.box, p.nvars)
    ti = check_transition_invariant(p, inv, box, args.input_cap)
    dwf = check_dwf(inv, box, p.vars)
    lines = [f"box: {box.describe()}, input cap {args.input_cap}"]
    diags = list(ti.notes)
    if ti.passed:
        lines.append(f"transition invariant: pass ({ti.starts} starts, {ti.pairs_checked} pairs)")
    else:
        cx = ti.counterexample
        msg = f"uncovered pair {cx.start} -> {cx.end} ({cx.kind}; segment {list(cx.segment)})"
        lines.append(f"transition invariant: counterexample {msg}")
        diags.append(msg)
    if dwf.passed:
        lines.append(f"well-foundedness: pass ({dwf.pairs_checked} pairs)")
    else:
        f = dwf.failure
        msg = (
            f"disjunct {f['disjunct']} rank fails on {f['pre']} -> {f['post']}: "
            f"{f['rank_pre']} -> {f['rank_post']}"
        )
        lines.append(f"well-foundedness: failure, {msg}")
        diags.append(msg)
    if ti.base_split is not None:
        lines.append("case split (one step): " + ", ".join(f"case {c} -> T{j}" for c, j in ti.base_split.items()))
        lines.append(
            "case split (extension): "
            + ", ".join(f"T{i}+case {c} -> T{j}" for (i, c), j in ti.step_split.items())
        )
    passed = ti.passed and dwf.passed
    exact = ti.exact and all(dwf.exact)
    cert = None
    if passed:
        cert = {
            "invariant": format_invariant(inv),
            "witnesses": [str(d.witness) for d in inv.disjuncts],
            "exact_inductive": ti.exact,
            "exact_well_founded": dwf.exact,
            "base_split": None if ti.base_split is None else {str(c): j for c, j in ti.base_split.items()},
            "step_split": None
            if ti.step_split is None
            else {f"{i},{c}": j for (i, c), j in ti.step_split.items()},
        }
    verdict = Verdict.TERMINATES if passed else Verdict.UNKNOWN
    domain = EXACT if exact else box_domain(box, args.input_cap)
    return Report(p.name, "transinv", verdict, cert, domain, diags), lines


def cmd_analyze(args) -> tuple[Report, list[str], int]:
    p = load_program(args.program)
    handler = {"sct": _analyze_sct, "ranking": _analyze_ranking, "transinv": _analyze_transinv}[args.method]
    rep, lines = handler(p, args)
    if args.figure and args.method != "sct":
        lines.append("note: --figure is only drawn for --method sct")
    code = EXIT_OK if rep.verdict == Verdict.TERMINATES else EXIT_UNKNOWN
    return rep, [f"program: {p.name}", f"method: {args.method}", *lines, f"verdict: {rep.verdict}"], code


# -- simulate / segments / audit -------------------------------------------------------


def parse_script(text: str) -> Scripted:
    """``"2:y=2;1"``: steps separated by ``;``, each ``case[:var=value,...]``."""
    steps = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        head, _, rest = part.partition(":")
        try:
            case = int(head)
            inputs = {}
            for item in filter(None, (t.strip() for t in rest.split(","))):
                var, _, val = item.partition("=")
                inputs[var.strip()] = int(val)
        except ValueError:
            raise UsageError(f"bad script step {part!r}") from None
        steps.append(Choice.of(case, inputs))
    return Scripted(tuple(steps))


def cmd_simulate(args) -> tuple[Report, list[str], int]:
    p = load_program(args.program)
    start = parse_state(args.start, p)
    if args.script is not None and args.seed is not None:
        raise UsageError("give either --script or --seed, not both")
    if args.script is not None:
        strat = parse_script(args.script)
        max_steps = args.max_steps if args.max_steps is not None else len(strat.steps)
    else:
        strat = SeededRandom(args.seed if args.seed is not None else 0, args.input_cap)
        max_steps = args.max_steps if args.max_steps is not None else 100
    trace = run(p, start, strat, max_steps)
    lines = [f"# {','.join(p.vars)}", *trace.lines()]
    lines.append(f"# {'terminated' if trace.terminated else 'stopped'} after {len(trace) - 1} steps")
    if args.figure:
        from .plotting import plot_trace

        plot_trace(trace, p.vars, args.figure, p.name)
    cert = {"states": [list(s) for s in trace.states], "cases": list(trace.word), "terminated": trace.terminated}
    return Report(p.name, "simulate", Verdict.NA, cert, EXACT), lines, EXIT_OK


def cmd_segments(args) -> tuple[Report, list[str], int]:
    from .sct import MeasureBasis

    p = load_program(args.program)
    basis = MeasureBasis.parse(args.functions) if args.functions else MeasureBasis.variables(p)
    box = Box.parse(args.box, p.nvars)
    rep = check_segment_decrease(p, basis.functions, box, args.max_len, args.input_cap)
    lines = [
        f"basis: {', '.join(basis.labels)}",
        f"box: {box.describe()}, max_len {args.max_len}, input cap {args.input_cap}",
        f"starts: {rep.starts}, (start, end) pairs: {rep.pairs_checked}",
    ]
    diags = []
    if rep.passed:
        lines.append("every segment decreases some measure")
    else:
        cx = rep.counterexample
        msg = f"no measure decreases on segment {' -> '.join(map(str, cx.states))} (cases {list(cx.word)})"
        lines.append(msg)
        diags.append(msg)
    cert = {"basis": basis.labels, "passed": rep.passed, "pairs_checked": rep.pairs_checked}
    report = Report(p.name, "segments", Verdict.NA, cert, box_domain(box, args.input_cap), diags)
    return report, lines, EXIT_OK if rep.passed else EXIT_UNKNOWN


def cmd_audit(args) -> tuple[Report, list[str], int]:
    from .sct import MeasureBasis, audit_matrix

    p = load_program(args.program)
    basis = MeasureBasis.parse(args.functions) if args.functions else MeasureBasis.variables(p)
    mat = parse_matrix(resolve(args.matrix, "matrices", ".txt").read_text())
    if args.case not in p.case_ids:
        raise UsageError(f"program {p.name} has no case {args.case}")
    box = Box.parse(args.box, p.nvars)
    res = audit_matrix(p, args.case, basis, mat, box, args.input_cap)
    line = res.describe(basis)
    cert = {
        "case": args.case,
        "basis": basis.labels,
        "matrix": _lists(mat),
        "passed": res.passed,
        "transitions": res.transitions,
    }
    report = Report(p.name, "audit", Verdict.NA, cert, box_domain(box, args.input_cap), [] if res.passed else [line])
    return report, [line], EXIT_OK if res.passed else EXIT_UNKNOWN


# -- matrix ---------------------------------------------------------------------------------


def cmd_matrix(args) -> tuple[Report, list[str], int]:
    from .sct import closure

    mats = [parse_matrix(resolve(f, "matrices", ".txt").read_text()) for f in args.files]
    k = args.clamp
    if args.op == "mul":
        out = mats[0]
        for m in mats[1:]:
            out = mul(out, m)
        if k is not None:
            out = clamp(out, k)
        result = [out]
    elif args.op == "pow":
        if len(mats) != 1 or args.exponent is None or args.exponent < 0:
            raise UsageError("matrix pow needs one file and --exponent N (N >= 0)")
        out = identity(mats[0].dim)
        for _ in range(args.exponent):
            out = mul(out, mats[0])
            if k is not None:
                out = clamp(out, k)
        result = [out]
    else:
        result = closure(mats, DEFAULT_CLAMP if k is None else k)
    lines = []
    for idx, m in enumerate(result, start=1):
        if len(result) > 1:
            lines.append(f"# element {idx}")
        lines.append(format_matrix(m))
    if args.figure:
        from .plotting import plot_matrices

        plot_matrices(result, args.figure)
    cert = {"op": args.op, "clamp": k, "result": [_lists(m) for m in result]}
    return Report(None, "matrix", Verdict.NA, cert, EXACT), lines, EXIT_OK


# -- ramsey ---------------------------------------------------------------------------------


def _load_coloring(name: str):
    return parse_coloring(resolve(name).read_text())


def cmd_ramsey(args) -> tuple[Report, list[str], int]:
    code = EXIT_OK
    col = None
    if args.op == "trt-size":
        value = trt_size(args.k, args.c)
        lines, cert = [str(value)], {"k": args.k, "c": args.c, "trt": value}
    elif args.op == "trt-build":
        col = build_extremal(args.k, args.c)
        mip = longest_mip(col)
        text = format_coloring(col)
        if args.out:
            Path(args.out).write_text(text + "\n")
            lines = [f"# K_{col.n}, {col.c} colors, longest MIP {mip.length}; written to {args.out}"]
        else:
            lines = [text]
        cert = {"k": args.k, "c": args.c, "n": col.n, "longest_mip": mip.length}
    elif args.op == "mip":
        col = _load_coloring(args.file)
        mip = longest_mip(col)
        lines = [f"length {mip.length}, color {mip.color}: {' '.join(map(str, mip.path))}"]
        cert = {"path": list(mip.path), "color": mip.color}
    elif args.op == "check-transitive":
        col = _load_coloring(args.file)
        w = transitivity_witness(col)
        lines = ["transitive" if w is None else f"not transitive, witness {w}"]
        cert = {"transitive": w is None, "witness": None if w is None else list(w)}
        code = EXIT_OK if w is None else EXIT_UNKNOWN
    elif args.op == "search-homog":
        col = _load_coloring(args.file)
        try:
            found = find_homogeneous(col, args.k)
        except SearchBudgetExceeded as exc:
            raise UsageError(str(exc)) from None
        lines = ["none" if found is None else " ".join(map(str, found))]
        cert = {"k": args.k, "set": None if found is None else list(found)}
        code = EXIT_OK if found is not None else EXIT_UNKNOWN
    else:
        try:
            seq = [int(t) for t in args.seq.replace(",", " ").split()]
        except ValueError:
            raise UsageError(f"bad sequence {args.seq!r}") from None
        res = monotone_subsequence(seq, args.k)
        lines = [f"{res.direction} length {len(res.values)}: {' '.join(map(str, res.values))}"]
        cert = {"direction": res.direction, "values": list(res.values), "indices": list(res.indices)}
        code = EXIT_OK if len(res.values) >= args.k else EXIT_UNKNOWN
    if args.figure and col is not None:
        from .plotting import plot_coloring

        plot_coloring(col, args.figure)
    return Report(None, "ramsey", Verdict.NA, cert, EXACT), lines, code


# -- argument parsing --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="termlab", description="Termination analyses for a small loop language.")
    ap.add_argument("--version", action="version", version=f"termlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, box=True, figure=True):
        sp.add_argument("--json", metavar="OUT", help="also write the report as JSON")
        if figure:
            sp.add_argument("--figure", metavar="PATH", help="write a figure (format from the extension)")
        if box:
            sp.add_argument("--box", default=DEFAULT_BOX_TEXT, help="lo:hi or lo:hi,lo:hi,... (default -50:50)")
            sp.add_argument("--input-cap", type=int, default=DEFAULT_INPUT_CAP)

    an = sub.add_parser("analyze", help="decide termination with one method")
    an.add_argument("program")
    an.add_argument("--method", choices=["sct", "ranking", "transinv"], required=True)
    an.add_argument("--functions", help="measure basis, e.g. 'x,y,x+y'")
    an.add_argument("--clamp", type=int, default=DEFAULT_CLAMP)
    an.add_argument("--criterion", choices=["A", "B"], default="A")
    an.add_argument("--rank", help="lexicographic components, e.g. 'w,x,y,z'")
    an.add_argument("--invariant", help="invariant file")
    an.add_argument("--dump-closure", metavar="PATH")
    common(an)

    sm = sub.add_parser("simulate", help="run the program from a start state")
    sm.add_argument("program")
    sm.add_argument("--start", required=True, help="e.g. '5,-1'")
    sm.add_argument("--script", help="e.g. '2:y=2;1'")
    sm.add_argument("--seed", type=int)
    sm.add_argument("--max-steps", type=int)
    sm.add_argument("--input-cap", type=int, default=DEFAULT_INPUT_CAP)
    common(sm, box=False)

    sg = sub.add_parser("segments", help="check measure decrease on all short segments")
    sg.add_argument("program")
    sg.add_argument("--max-len", type=int, default=DEFAULT_MAX_LEN)
    sg.add_argument("--functions")
    common(sg, figure=False)

    mx = sub.add_parser("matrix", help="min-plus matrix arithmetic on files")
    mx.add_argument("op", choices=["mul", "pow", "closure"])
    mx.add_argument("files", nargs="+")
    mx.add_argument("--exponent", type=int)
    mx.add_argument("--clamp", type=int)
    common(mx, box=False)

    au = sub.add_parser("audit", help="check a matrix against concrete transitions")
    au.add_argument("program")
    au.add_argument("--case", type=int, required=True)
    au.add_argument("--matrix", required=True)
    au.add_argument("--functions")
    common(au, figure=False)

    rs = sub.add_parser("ramsey", help="finite Ramsey utilities")
    rsub = rs.add_subparsers(dest="op", required=True)
    for name in ("trt-size", "trt-build"):
        sp = rsub.add_parser(name)
        sp.add_argument("k", type=int)
        sp.add_argument("c", type=int)
        if name == "trt-build":
            sp.add_argument("--out")
        common(sp, box=False)
    for name in ("mip", "check-transitive"):
        sp = rsub.add_parser(name)
        sp.add_argument("file")
        common(sp, box=False)
    sp = rsub.add_parser("search-homog")
    sp.add_argument("file")
    sp.add_argument("k", type=int)
    common(sp, box=False)
    sp = rsub.add_parser("monotone")
    sp.add_argument("k", type=int)
    sp.add_argument("seq", help="distinct integers, e.g. '2,1,4,3,5'")
    common(sp, box=False)
    return ap


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "segments": cmd_segments,
    "matrix": cmd_matrix,
    "audit": cmd_audit,
    "ramsey": cmd_ramsey,
}


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    t0 = time.perf_counter()
    try:
        report, lines, code = COMMANDS[args.command](args)
    except (UsageError, DslError, ExecutionError, ValueError, OSError) as exc:
        print(f"termlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.timing = round(time.perf_counter() - t0, 6)
    print("\n".join(lines))
    if getattr(args, "json", None):
        try:
            Path(args.json).write_text(report.to_json() + "\n")
        except OSError as exc:
            print(f"termlab: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())

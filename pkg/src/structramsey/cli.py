"""Command-line front end.

Every command reads one JSON document (``-i``, ``-`` for stdin) and writes a
JSON result to ``-o`` or stdout.  Exit codes: 0 holds/success, 1 fails, 2
budget exhausted, 3 bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Any, Callable

from . import arrow, classes, constructions, hales_jewett, ordering, partite, trees
from .core import FiniteStructure, dumps
from .errors import BudgetExceeded

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class Run:
    """Input loading and output/certificate/record writing for one command."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.hashes: dict[str, str] = {}

    def load(self, path: str | None, what: str = "input") -> Any:
        if path is None:
            raise InputError(f"missing {what} (use -i)")
        try:
            raw = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
        except OSError as e:
            raise InputError(str(e)) from None
        self.hashes[what] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw)
        except json.JSONDecodeError as e:
            raise InputError(f"{what}: {e}") from None

    def doc(self) -> dict:
        data = self.load(self.args.input)
        if not isinstance(data, dict):
            raise InputError("expected a JSON object")
        return data

    def emit(self, result: Any, verdict: str, certificate: Any = None) -> int:
        text = dumps(result)
        if self.args.output:
            Path(self.args.output).write_text(text + "\n")
        else:
            print(text)
        if self.args.certificate:
            Path(self.args.certificate).write_text(dumps(certificate if certificate is not None else result) + "\n")
        self.verdict = verdict
        self.result = certificate if certificate is not None else result
        return EXIT_FAIL if verdict == "fails" else EXIT_OK


def _structure(doc: dict, key: str) -> FiniteStructure:
    if key not in doc:
        raise InputError(f"input has no {key!r}")
    return FiniteStructure.from_json(doc[key])


def _partite(doc: dict, key: str) -> partite.PartiteStructure:
    if key not in doc:
        raise InputError(f"input has no {key!r}")
    return partite.PartiteStructure.from_json(doc[key])


def _tree(doc: dict, key: str) -> trees.Tree:
    if key not in doc:
        raise InputError(f"input has no {key!r}")
    return trees.parse_tree(doc[key])


def _verdict(holds: bool) -> str:
    return "holds" if holds else "fails"


def _write_stage_log(args, res: partite.ConstructionResult) -> None:
    if args.stage_log:
        Path(args.stage_log).write_text(res.stage_log())


# arrow ----------------------------------------------------------------------


def cmd_arrow_check(run: Run, a) -> int:
    d = run.doc()
    C, B, A = _structure(d, "C"), _structure(d, "B"), _structure(d, "A")
    if a.backend == "hypergraph":
        cert = arrow.check_arrow_hypergraph(C, B, A, a.r)
    else:
        cert = arrow.check_arrow(C, B, A, a.r, budget=a.budget, jobs=a.jobs)
    return run.emit(cert.to_json(), cert.verdict)


def cmd_arrow_defect(run: Run, a) -> int:
    d = run.doc()
    cert = arrow.check_arrow_defect(_structure(d, "C"), _structure(d, "B"), _structure(d, "A"), a.r, a.k, budget=a.budget, jobs=a.jobs)
    return run.emit(cert.to_json(), cert.verdict)


def cmd_arrow_simultaneous(run: Run, a) -> int:
    d = run.doc()
    pats = [FiniteStructure.from_json(p) for p in d.get("patterns", [])]
    if not pats:
        raise InputError("input has no 'patterns'")
    cert = arrow.check_simultaneous(_structure(d, "C"), _structure(d, "B"), pats, a.r, budget=a.budget, jobs=a.jobs)
    return run.emit(cert.to_json(), cert.verdict)


# hj -------------------------------------------------------------------------


def cmd_hj_lines(run: Run, a) -> int:
    lines = [L.to_json() for L in hales_jewett.enumerate_lines(a.m, a.d)]
    return run.emit({"m": a.m, "d": a.d, "count": len(lines), "lines": lines}, "holds")


def cmd_hj_number(run: Run, a) -> int:
    res = hales_jewett.hj_sweep(a.m, a.r, a.dmax, budget=a.budget, jobs=a.jobs)
    if not a.output and not a.certificate:
        # bare number on stdout; the trace is available with -o / --certificate
        print(res.d if res.d is not None else "none")
        run.verdict, run.result = _verdict(res.d is not None), res.to_json()
        return EXIT_OK if res.d is not None else EXIT_FAIL
    return run.emit(res.to_json(), _verdict(res.d is not None))


def cmd_hj_find_line(run: Run, a) -> int:
    d = run.doc()
    m, dim = int(d["m"]), int(d["d"])
    pts = hales_jewett.points(m, dim)
    colors = d.get("coloring")
    if not isinstance(colors, list) or len(colors) != len(pts):
        raise InputError(f"'coloring' must list {len(pts)} colors in lexicographic point order")
    L = hales_jewett.find_mono_line(dict(zip(pts, colors)), m, dim)
    return run.emit({"line": L.to_json() if L else None}, _verdict(L is not None))


# partite --------------------------------------------------------------------


def cmd_partite_nr_power(run: Run, a) -> int:
    d = run.doc()
    P = partite.nr_power(_partite(d, "B"), _partite(d, "A"), a.d, max_size=a.max_size)
    return run.emit(P.to_json(), "holds")


def cmd_partite_lemma(run: Run, a) -> int:
    d = run.doc()
    w = partite.partite_lemma_witness(_partite(d, "A"), _partite(d, "B"), a.r, d_max=a.dmax, budget=a.budget, max_size=a.max_size)
    return run.emit({"summary": w.summary(), "structure": w.structure.to_json()}, "holds")


def _construction_out(run: Run, a, res: partite.ConstructionResult, B, A) -> int:
    _write_stage_log(a, res)
    out: dict = {"structure": res.structure.to_json(), "p": res.p, "steps": res.q}
    verdict = "holds"
    if a.verify:
        cert = arrow.check_arrow(res.structure, B, A, a.r, budget=a.budget, jobs=a.jobs)
        out["verification"] = cert.to_json()
        verdict = cert.verdict
    return run.emit(out, verdict)


def cmd_partite_construct(run: Run, a) -> int:
    d = run.doc()
    A, B = _structure(d, "A"), _structure(d, "B")
    res = partite.partite_construction(A, B, a.r, initial=a.initial, d_max=a.dmax, budget=a.budget, max_size=a.max_size)
    return _construction_out(run, a, res, B, A)


def cmd_partite_construct_forb(run: Run, a) -> int:
    d = run.doc()
    A, B = _structure(d, "A"), _structure(d, "B")
    fam = [FiniteStructure.from_json(F) for F in d.get("family", [])]
    amb = FiniteStructure.from_json(d["ambient"]) if d.get("ambient") else None
    res = partite.partite_construction_forb(A, B, a.r, fam, ambient=amb, initial=a.initial, d_max=a.dmax, budget=a.budget, max_size=a.max_size)
    return _construction_out(run, a, res, B, A)


# tree -----------------------------------------------------------------------


def cmd_tree_check(run: Run, a) -> int:
    S = FiniteStructure.from_json(run.doc())
    out = {
        "axioms": trees.c_axiom_violation(S) or "ok",
        "binary_branching": trees.is_binary_branching(S),
        "convex": trees.check_c_axioms(S) and trees.is_convex(S),
    }
    ok = out["axioms"] == "ok" and out["binary_branching"] and (out["convex"] or not a.convex)
    return run.emit(out, _verdict(ok))


def cmd_tree_convert(run: Run, a) -> int:
    data = run.load(a.input)
    if isinstance(data, dict):
        return run.emit({"tree": trees.tree_to_json(trees.structure_to_tree(FiniteStructure.from_json(data)))}, "holds")
    return run.emit(trees.tree_to_structure(trees.parse_tree(data)).to_json(), "holds")


def cmd_tree_construct(run: Run, a) -> int:
    d = run.doc()
    A, B = _tree(d, "A"), _tree(d, "B")
    res = trees.construct_ramsey_tree(A, B, a.r, verify=a.verify, budget=a.budget)
    out = {"tree": trees.tree_to_json(res.tree), "leaves": res.size, "method": res.method, "verified": res.verified}
    verdict = "holds"
    if a.verify:
        cert = res.certificate or arrow.verify_arrow(trees.tree_to_structure(res.tree), trees.tree_to_structure(B), trees.tree_to_structure(A), a.r, budget=a.budget)
        out["verification"] = cert.to_json()
        verdict = cert.verdict
    return run.emit(out, verdict)


# class ----------------------------------------------------------------------


def _report(rep: constructions.AmalgamationReport) -> dict:
    out: dict = {"holds": rep.holds, "checked": rep.checked}
    if rep.counterexample:
        A, B1, B2, e1, e2 = rep.counterexample
        out["counterexample"] = {"A": A.to_json(), "B1": B1.to_json(), "B2": B2.to_json(), "e1": list(e1), "e2": list(e2)}
    return out


def cmd_class_amalgamation(run: Run, a) -> int:
    rep = constructions.check_amalgamation_property(classes.builtin_class(a.cls), a.max_size, strong=a.strong)
    return run.emit(_report(rep), _verdict(rep.holds))


def cmd_class_jep(run: Run, a) -> int:
    rep = constructions.check_jep(classes.builtin_class(a.cls), a.max_size)
    return run.emit(_report(rep), _verdict(rep.holds))


def cmd_class_enumerate(run: Run, a) -> int:
    ms = classes.builtin_class(a.cls).members(a.max_size)
    return run.emit({"count": len(ms), "members": [S.to_json() for S in ms]}, "holds")


def cmd_class_superpose(run: Run, a) -> int:
    c1 = classes.builtin_class(a.cls)
    c2 = classes.builtin_class(a.cls2)
    if a.cls == a.cls2 == "lo":
        c1, c2 = classes.linear_orders("<1"), classes.linear_orders("<2")
    ms = constructions.superposition_members(c1, c2, a.max_size, up_to=a.up_to)
    return run.emit({"count": len(ms), "members": [S.to_json() for S in ms]}, "holds")


def cmd_class_product(run: Run, a) -> int:
    d = run.doc()
    fs = [FiniteStructure.from_json(F) for F in d.get("factors", [])]
    if not fs:
        raise InputError("input has no 'factors'")
    return run.emit(constructions.full_product(fs).to_json(), "holds")


def cmd_class_constants(run: Run, a) -> int:
    d = run.doc()
    S = constructions.expand_with_constants(_structure(d, "S"), [int(p) for p in d.get("points", [])])
    return run.emit(S.to_json(), "holds")


def cmd_class_disjoint_union(run: Run, a) -> int:
    d = run.doc()
    return run.emit(constructions.disjoint_union_p(_structure(d, "A1"), _structure(d, "A2")).to_json(), "holds")


# ordering -------------------------------------------------------------------


def cmd_ordering_check(run: Run, a) -> int:
    X = FiniteStructure.from_json(run.load(a.x, "x"))
    res = ordering.check_ordering_property(ordering.family(a.cls), X, a.max_size, budget=a.budget)
    out: dict = {"witness": res.witness.to_json() if res.witness else None, "checked": res.checked}
    if res.blocking:
        Y, Xx, Yx = res.blocking[-1]
        out["blocking"] = {"Y": Y.to_json(), "X_expansion": Xx.to_json(), "Y_expansion": Yx.to_json()}
    return run.emit(out, _verdict(res.witness is not None))


def cmd_ordering_defeat(run: Run, a) -> int:
    C = FiniteStructure.from_json(run.load(a.c, "c"))
    if a.cls == "equivalence":
        col, B, A = ordering.convex_defeat_equivalence(C), ordering.EQ_TARGET, ordering.EQ_PATTERN
    else:
        col, B, A = ordering.convex_defeat_ctree(C), ordering.CTREE_TARGET, ordering.CTREE_PATTERN
    refutes = arrow.is_refutation(C, B, A, col.as_map())
    return run.emit({"coloring": col.to_json(), "refutes": refutes}, _verdict(refutes))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", help="JSON input file, '-' for stdin")
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    common.add_argument("--r", type=int, default=2, help="number of colors")
    common.add_argument("--d", type=int, default=1, help="dimension")
    common.add_argument("--m", type=int, default=2, help="alphabet size")
    common.add_argument("--dmax", type=int, default=6, help="largest dimension to try")
    common.add_argument("--max-size", type=int, default=None)
    common.add_argument("--budget", type=int, default=None, help="colorings per sweep (default 2^26, env RAMSEY_BUDGET)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=None, help="accepted for test drivers; results do not depend on it")
    common.add_argument("--certificate", help="write the certificate JSON here")
    common.add_argument("--record", help="write a run record JSON here")

    p = argparse.ArgumentParser(prog="structramsey", description="Partition arrows and Ramsey witnesses for finite structures.")
    top = p.add_subparsers(dest="group", required=True)

    def group(name: str, help_: str):
        g = top.add_parser(name, help=help_)
        return g.add_subparsers(dest="command", required=True)

    def cmd(sub, name: str, fn: Callable, help_: str):
        c = sub.add_parser(name, parents=[common], help=help_)
        c.set_defaults(fn=fn)
        return c

    ar = group("arrow", "decide partition arrows")
    c = cmd(ar, "check", cmd_arrow_check, "C -> (B)^A_r from {C, B, A}")
    c.add_argument("--backend", choices=["sweep", "hypergraph"], default="sweep")
    c = cmd(ar, "defect", cmd_arrow_defect, "at most k colors per copy of B")
    c.add_argument("--k", type=int, default=1)
    cmd(ar, "simultaneous", cmd_arrow_simultaneous, "one coloring per pattern, from {C, B, patterns}")

    hj = group("hj", "Hales-Jewett numbers and lines")
    cmd(hj, "lines", cmd_hj_lines, "list the combinatorial lines of [m]^d")
    cmd(hj, "number", cmd_hj_number, "least d <= dmax forcing a monochromatic line")
    cmd(hj, "find-line", cmd_hj_find_line, "monochromatic line of a coloring {m, d, coloring}")

    pa = group("partite", "partite constructions")
    cmd(pa, "nr-power", cmd_partite_nr_power, "power of B over A, from {B, A}")
    cmd(pa, "lemma", cmd_partite_lemma, "partite arrow witness, from {A, B}")
    for name, fn in (("construct", cmd_partite_construct), ("construct-forb", cmd_partite_construct_forb)):
        c = cmd(pa, name, fn, "ordered Ramsey witness by amalgamation")
        c.add_argument("--initial", choices=["compact", "disjoint"], default="compact")
        c.add_argument("--stage-log", help="write one JSON line per stage here")
        c.add_argument("--verify", action="store_true", help="check the arrow on the output")

    tr = group("tree", "C-relations and convex trees")
    c = cmd(tr, "check", cmd_tree_check, "axioms, branching and convexity of a structure")
    c.add_argument("--convex", action="store_true", help="also require a convex order")
    cmd(tr, "convert", cmd_tree_convert, "nested-list tree <-> structure")
    c = cmd(tr, "construct", cmd_tree_construct, "Ramsey tree for {A, B}")
    c.add_argument("--verify", action="store_true")

    cl = group("class", "class-level operations")
    for name, fn in (
        ("amalgamation", cmd_class_amalgamation),
        ("jep", cmd_class_jep),
        ("enumerate", cmd_class_enumerate),
        ("superpose", cmd_class_superpose),
    ):
        c = cmd(cl, name, fn, f"{name} over a built-in class")
        c.add_argument("--class", dest="cls", required=True, help=f"one of {sorted(classes.BUILTIN)}")
        if name == "amalgamation":
            c.add_argument("--strong", action="store_true")
        if name == "superpose":
            c.add_argument("--class2", dest="cls2", required=True)
            c.add_argument("--up-to", action="store_true", help="all sizes up to --max-size")
    cmd(cl, "product", cmd_class_product, "full product of {factors}")
    cmd(cl, "constants", cmd_class_constants, "constant expansion of {S, points}")
    cmd(cl, "disjoint-union", cmd_class_disjoint_union, "marked disjoint union of {A1, A2}")

    od = group("ordering", "ordering property and convex-order colorings")
    c = cmd(od, "check", cmd_ordering_check, "search a witness for the ordering property")
    c.add_argument("--class", dest="cls", required=True, choices=["two-orders", "ordered-graphs", "lo"])
    c.add_argument("--x", required=True, help="JSON file with X")
    c = cmd(od, "defeat", cmd_ordering_defeat, "coloring with no monochromatic copy of the 4-element target")
    c.add_argument("--class", dest="cls", required=True, choices=["equivalence", "ctree"])
    c.add_argument("--c", required=True, help="JSON file with C")
    return p


_SIZE_DEFAULTS = {"amalgamation": 3, "jep": 3, "enumerate": 3, "superpose": 3, "check": 6}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_size is None and args.group in ("class", "ordering"):
        args.max_size = _SIZE_DEFAULTS.get(args.command, 3)
    run = Run(args)
    run.verdict, run.result = "error", None
    start = time.perf_counter()
    try:
        code = args.fn(run, args)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        run.verdict, code = "budget", EXIT_BUDGET
    except (InputError, ValueError, KeyError, TypeError) as e:
        print(f"input error: {e}", file=sys.stderr)
        code = EXIT_INPUT
    if args.record:
        params = {k: v for k, v in vars(args).items() if k not in ("fn", "record", "output", "certificate")}
        record = {
            "command": f"{args.group} {args.command}",
            "parameters": params,
            "input_hashes": run.hashes,
            "verdict": run.verdict,
            "certificate": run.result,
            "wall_time": round(time.perf_counter() - start, 6),
            "jobs": args.jobs,
        }
        Path(args.record).write_text(json.dumps(record, sort_keys=True, indent=2) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())

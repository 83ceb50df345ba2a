"""``evencw`` command line: generators, homology, coloring and k-homotopy checks.

Exit codes: 0 success, 1 operational error (bad input, budget exhausted,
failed replay), 2 a theorem prediction was violated.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from dataclasses import dataclass, field
from math import ceil

from evencw import formats
from evencw.coloring import (
    DEFAULT_BUDGET,
    SearchBudgetExceeded,
    chromatic_number,
    circular_chromatic,
    enumerate_colorings,
    find_homomorphism,
    find_torsion_odd_walk,
    rainbow_faces,
    theorem_a_bound,
    verify_refutation,
)
from evencw.complex import FAMILIES, EvenComplex, generate, validate
from evencw.errors import InputError, InternalConsistencyError, ResourceError
from evencw.graph import Graph, Walk, bipartition, build_family
from evencw.homology import (
    boundary_matrices,
    h1,
    is_torsion_class,
    is_torsion_class_snf,
    neighborhood_complex,
    z2_class_nonzero,
)
from evencw.kfund import (
    CoverLine,
    k_homotopic,
    moves_to_text,
    parse_moves,
    pi1k_table,
    replay as replay_moves,
)

PASS, FAIL, VIOLATION = "pass", "fail", "violation"


@dataclass
class RunReport:
    command: list
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    seconds: float = 0.0
    to_stderr: bool = False  # set when stdout carries a generated file

    def add_input(self, label: str, text: str):
        self.inputs[label] = hashlib.sha256(text.encode()).hexdigest()

    def exit_code(self) -> int:
        if VIOLATION in self.verdicts.values():
            return 2
        if FAIL in self.verdicts.values():
            return 1
        return 0

    def render(self, fmt: str) -> str:
        if fmt == "keyvalue":
            lines = [f"command={' '.join(self.command)}"]
            lines += [f"input.{k}={v}" for k, v in self.inputs.items()]
            lines += [f"{_key(k)}={_flat(v)}" for k, v in self.results.items()]
            lines += [f"verdict.{_key(k)}={v}" for k, v in self.verdicts.items()]
            lines.append(f"time_seconds={self.seconds:.3f}")
        else:
            lines = [f"$ evencw {' '.join(self.command)}"]
            lines += [f"input {k}: sha256 {v}" for k, v in self.inputs.items()]
            lines += [f"{k}: {_flat(v)}" for k, v in self.results.items()]
            lines += [f"[{v}] {k}" for k, v in self.verdicts.items()]
            lines.append(f"time: {self.seconds:.3f}s")
        return "\n".join(lines) + "\n"


def _key(k: str) -> str:
    return k.replace(" ", "_")


def _flat(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_flat(x) for x in v)
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


# -- argument helpers ---------------------------------------------------------

def parse_walk(text: str) -> Walk:
    try:
        return Walk(tuple(int(t) for t in text.replace(" ", "").split(",") if t != ""))
    except ValueError:
        raise InputError(f"bad walk {text!r}; expected comma-separated vertex ids") from None


def parse_range(text: str) -> list:
    """``2..6``, ``3`` or ``2,4,5``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"bad range {text!r}") from None


def _read(path: str, report: RunReport) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    report.add_input(path, text)
    return text


def _write(path: str, text: str, report: RunReport, key: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    report.results[key] = path


def load_complex_arg(path: str, report: RunReport) -> EvenComplex:
    return formats.load_complex(_read(path, report))


def load_graph_arg(path: str | None, family: list | None, report: RunReport, label: str = "graph") -> Graph:
    """A graph from a graph file, a complex file (its skeleton) or ``--family``."""
    if family:
        name, *params = family
        try:
            nums = [int(p) for p in params]
        except ValueError:
            raise InputError(f"family parameters must be integers, got {params}") from None
        report.results[label] = " ".join(family)
        return build_family(name, *nums)
    if path is None:
        raise InputError("give a graph file or --family")
    text = _read(path, report)
    if formats.is_complex_text(text):
        return formats.load_complex(text).skeleton
    return formats.load_graph(text)


def _graph_spec(spec: str, report: RunReport, label: str) -> Graph:
    """A path, or ``family:p1:p2`` such as ``circular:7:3``."""
    if os.path.exists(spec):
        return load_graph_arg(spec, None, report)
    return load_graph_arg(None, spec.split(":"), report, label)


def _add_graph_input(p):
    p.add_argument("input", nargs="?", help="graph or complex file")
    p.add_argument("--family", nargs="+", metavar="ARG", help="graph family: complete N | cycle N | path N | circular N M")


# -- subcommands --------------------------------------------------------------

def cmd_gen(args, report):
    params = {k: getattr(args, k) for k in ("m", "n", "d", "seed", "vertices") if getattr(args, k) is not None}
    fam = args.family.replace("-", "_")
    if fam == "random":
        params.setdefault("vertices", 10)
        params.setdefault("seed", args.global_seed)
    x = generate(args.family, **params)
    text = formats.dump_complex(x)
    report.results.update(
        family=fam, vertices=x.vertex_count, edges=x.edge_count, cells=x.cell_count,
        euler=x.euler_characteristic,
    )
    if args.out:
        _write(args.out, text, report, "written")
    else:
        report.results["stdout"] = "complex file"
        sys.stdout.write(text)
        report.to_stderr = True


def cmd_validate(args, report):
    text = _read(args.input, report)
    if formats.is_complex_text(text):
        x = formats.load_complex(text)
        problems = validate(x)
        report.results.update(kind="complex", vertices=x.vertex_count, edges=x.edge_count, cells=x.cell_count)
    else:
        g = formats.load_graph(text)
        problems = []
        report.results.update(kind="graph", vertices=g.vertex_count, edges=g.edge_count)
    report.results["problems"] = problems or "none"
    report.verdicts["valid"] = FAIL if problems else PASS


def _homology(x, report):
    hz, h2 = h1(x, "Z"), h1(x, "Z2")
    report.results["H1(Z)"] = str(hz)
    report.results["H1(Z2)"] = str(h2)
    # universal coefficients: dim H1(X;Z/2) = rank + number of even invariant factors
    expect = hz.free_rank + sum(1 for d in hz.torsion if d % 2 == 0)
    report.verdicts["universal-coefficients"] = PASS if expect == h2.free_rank else FAIL
    return hz


def cmd_homology(args, report):
    x = load_complex_arg(args.input, report)
    if args.ring == "both":
        _homology(x, report)
    else:
        report.results[f"H1({args.ring})"] = str(h1(x, args.ring))
    if args.export_d2:
        _, d2 = boundary_matrices(x, "Z")
        _write(args.export_d2, d2.to_triplets(), report, "d2")


def _torsion_checks(x, report):
    g = x.skeleton
    bip = bipartition(g)
    if bip.is_bipartite:
        report.results["odd walk"] = "none (bipartite skeleton)"
        return None
    report.results["odd walk"] = list(bip.odd_walk.vertices)
    report.verdicts["odd walk has nonzero Z2 class"] = PASS if z2_class_nonzero(x, bip.odd_walk) else VIOLATION
    walk = find_torsion_odd_walk(x)
    report.results["torsion odd walk"] = list(walk.vertices) if walk else "none"
    if walk is not None:
        ok = is_torsion_class(x, walk) and is_torsion_class_snf(x, walk)
        report.verdicts["torsion witness (rank and Smith form)"] = PASS if ok else FAIL
    return walk


def cmd_torsion(args, report):
    x = load_complex_arg(args.input, report)
    if args.walk is None:
        _torsion_checks(x, report)
        return
    w = parse_walk(args.walk)
    rank_route, snf_route = is_torsion_class(x, w), is_torsion_class_snf(x, w)
    report.results.update(walk=list(w.vertices), length=w.length, torsion=rank_route)
    report.verdicts["rank and Smith form agree"] = PASS if rank_route == snf_route else FAIL
    if w.length % 2:
        report.verdicts["odd walk has nonzero Z2 class"] = PASS if z2_class_nonzero(x, w) else VIOLATION


def cmd_chi(args, report):
    g = load_graph_arg(args.input, args.family, report)
    res = chromatic_number(g, limit=args.budget)
    report.results.update(chi=res.number, clique=res.clique, coloring=list(res.certificate.coloring.image))
    if res.refutation is not None:
        report.results["refuted colors"] = res.refutation.colors
        report.results["search nodes"] = res.refutation.nodes
        ok = verify_refutation(g, res.refutation.colors, res.refutation.trace)
        report.verdicts[f"{res.refutation.colors}-coloring refutation replays"] = PASS if ok else FAIL
        if args.trace:
            _write(args.trace, res.refutation.trace_text(), report, "trace")
    if args.coloring_out:
        _write(args.coloring_out, formats.dump_coloring(res.certificate.coloring, res.number), report, "coloring file")


def cmd_chic(args, report):
    g = load_graph_arg(args.input, args.family, report)
    res = circular_chromatic(g, max_den=args.max_den, budget=args.budget)
    report.results["chi_c"] = str(res)
    report.results["exact"] = res.exact
    report.results["lower"] = str(res.lower.value)
    report.results["upper"] = str(res.upper.value)
    report.results["refuted"] = [str(r) for r in res.refuted] or "none"
    if res.undecided:
        report.results["undecided"] = [str(r) for r in res.undecided]


def cmd_hom(args, report):
    g, h = _graph_spec(args.source, report, "source"), _graph_spec(args.target, report, "target")
    try:
        f = find_homomorphism(g, h, budget=args.budget)
    except SearchBudgetExceeded:
        report.results["homomorphism"] = "undecided (budget exhausted)"
        report.verdicts["search completed"] = FAIL
        return
    report.results["homomorphism"] = list(f.image) if f is not None else "none"


def cmd_rainbow(args, report):
    x = load_complex_arg(args.input, report)
    if args.coloring:
        c, _ = formats.load_coloring(_read(args.coloring, report))
        faces = rainbow_faces(x, c)
        report.results["rainbow faces"] = [list(f.vertices[:4]) for f in faces] or "none"
        return
    _rainbow_sweep(x, args.colors, args.budget, report, applies=find_torsion_odd_walk(x) is not None)


def _rainbow_sweep(x, colors, budget, report, applies):
    if not x.is_quadrangulated:
        raise InputError("rainbow squares need a quadrangulated complex")
    total = bad = 0
    first_bad = None
    for c in enumerate_colorings(x.skeleton, colors, budget=budget):
        total += 1
        if not rainbow_faces(x, c):
            bad += 1
            first_bad = first_bad or list(c.image)
    report.results[f"colorings with <= {colors} colors"] = total
    report.results["colorings without a rainbow face"] = bad
    if first_bad:
        report.results["first coloring without a rainbow face"] = first_bad
    report.results["torsion odd walk present"] = applies
    if applies:
        report.verdicts["every coloring has a rainbow face"] = VIOLATION if bad else PASS


def cmd_pi1k(args, report):
    g = load_graph_arg(args.input, args.family, report)
    ks = parse_range(args.k)
    table = pi1k_table(g, ks, jobs=args.jobs)
    for k in ks:
        report.results[f"k={k}"] = str(table[k])
    if args.expect:
        n, m = args.expect
        if not 2 * m < n < 4 * m:
            raise InputError("--expect circular needs 2 < n/m < 4")
        kstar = ceil(2 * m / (n - 2 * m))
        report.results["k*"] = kstar
        ok = all(str(table[k]) == ("Z" if k <= kstar else "Z/2") for k in ks)
        report.verdicts[f"matches Z up to k={kstar}, Z/2 beyond"] = PASS if ok else VIOLATION


def cmd_reduce(args, report):
    w1 = parse_walk(args.walk)
    if args.input or args.family:
        g = load_graph_arg(args.input, args.family, report)
    else:
        # the graph spanned by the walk itself
        steps = list(zip(w1.vertices, w1.vertices[1:]))
        g = Graph.from_edges(max(w1.vertices) + 1, steps)
    w2 = parse_walk(args.target) if args.target else Walk((w1.start,))
    cover = CoverLine(*args.cover) if args.cover else None
    invariants = ("parity", "winding", "z2") + (("homology",) if args.integer_class else ())
    v = k_homotopic(g, w1, w2, args.k, budget=args.budget, cover=cover, invariants=invariants)
    report.results.update(walk=list(w1.vertices), target=list(w2.vertices), k=args.k, answer=v.answer)
    if v.answer == "no":
        report.results["invariant"] = v.invariant
        report.results["values"] = [str(x) for x in v.values]
    if v.answer == "yes":
        report.results["moves"] = len(v.moves)
        ok = replay_moves(g, w1, v.moves, args.k) == w2
        report.verdicts["certificate replays"] = PASS if ok else FAIL
        if args.cert:
            _write(args.cert, moves_to_text(v.moves), report, "certificate")
        else:
            report.results["certificate"] = [str(m) for m in v.moves] or "empty"


def cmd_lift(args, report):
    cover = CoverLine(args.n, args.m)
    w = parse_walk(args.walk)
    lift = cover.lift_walk(w)
    report.results.update(
        walk=list(w.vertices), numerators=[q for q, _ in lift], signs=[e for _, e in lift],
        **{"covering order": cover.covering_order},
    )
    if w.is_closed:
        report.results["winding"] = cover.winding(w)


def cmd_nbhd(args, report):
    g = load_graph_arg(args.input, args.family, report)
    for j in parse_range(args.j):
        report.results[f"H1(N^{j})"] = str(neighborhood_complex(g, j).h1("Z"))


CHECKS = ("homology", "torsion", "youngs", "rainbow", "bound")


def cmd_verify(args, report):
    x = load_complex_arg(args.input, report)
    checks = args.checks.split(",") if args.checks != "all" else list(CHECKS)
    unknown = set(checks) - set(CHECKS)
    if unknown:
        raise InputError(f"unknown checks {sorted(unknown)}; choose from {CHECKS}")
    problems = validate(x)
    if problems:
        raise InputError("invalid complex: " + "; ".join(problems[:5]))
    report.results.update(vertices=x.vertex_count, edges=x.edge_count, cells=x.cell_count)
    g = x.skeleton
    walk = None
    if "homology" in checks:
        _homology(x, report)
    if {"torsion", "youngs", "rainbow"} & set(checks):
        walk = _torsion_checks(x, report)
    chi = None
    if "youngs" in checks:
        res = chromatic_number(g, limit=args.budget)
        chi = res.number
        report.results["chi"] = chi
        if res.refutation is not None:
            ok = verify_refutation(g, res.refutation.colors, res.refutation.trace)
            report.verdicts[f"{res.refutation.colors}-coloring refutation replays"] = PASS if ok else FAIL
        if x.is_quadrangulated and walk is not None:
            report.verdicts["not 3-colorable"] = PASS if chi >= 4 else VIOLATION
        if bipartition(g).is_bipartite:
            report.verdicts["bipartite skeleton has chi <= 2"] = PASS if chi <= 2 else FAIL
    if "rainbow" in checks:
        if not x.is_quadrangulated:
            report.results["rainbow"] = "skipped (not quadrangulated)"
        elif walk is None:
            report.results["rainbow"] = "skipped (no torsion odd walk)"
        else:
            try:
                _rainbow_sweep(x, args.colors, args.budget, report, applies=walk is not None)
            except ResourceError:
                report.results["rainbow"] = "skipped (budget exhausted)"
    if "bound" in checks:
        b = theorem_a_bound(x)
        if b is None:
            report.results["theorem A bound"] = "inapplicable"
        else:
            report.results["theorem A bound"] = str(b.bound.value)
            report.results["k"] = b.k
            report.results["bound witness"] = list(b.witness.vertices)
            try:
                cc = circular_chromatic(g, budget=args.budget)
            except ResourceError:
                report.results["chi_c"] = "skipped (budget exhausted)"
            else:
                report.results["chi_c"] = str(cc)
                report.verdicts["bound <= chi_c"] = PASS if b.bound.value <= cc.upper.value else VIOLATION


def cmd_replay(args, report):
    if args.kind == "coloring":
        g = load_graph_arg(args.input, args.family, report)
        if args.colors is None:
            raise InputError("--colors is required for coloring traces")
        text = _read(args.certificate, report)
        ok = verify_refutation(g, args.colors, text.splitlines())
        report.results["refuted colors"] = args.colors
        report.verdicts["trace proves no coloring exists"] = PASS if ok else FAIL
        return
    if args.walk is None or args.k is None:
        raise InputError("--walk and --k are required for move certificates")
    w = parse_walk(args.walk)
    if args.input or args.family:
        g = load_graph_arg(args.input, args.family, report)
    else:
        g = Graph.from_edges(max(w.vertices) + 1, list(zip(w.vertices, w.vertices[1:])))
    moves = parse_moves(_read(args.certificate, report))
    try:
        end = replay_moves(g, w, moves, args.k)
    except InputError as exc:
        report.results["error"] = str(exc)
        report.verdicts["moves are legal"] = FAIL
        return
    target = parse_walk(args.target) if args.target else Walk((w.start,))
    report.results["end"] = list(end.vertices)
    report.verdicts["moves are legal"] = PASS
    report.verdicts["ends at target"] = PASS if end == target else FAIL


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evencw", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("--format", choices=("text", "keyvalue"), default="text")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for closed-walk enumeration")
    parser.add_argument("--seed", type=int, default=20240601, dest="global_seed",
                        help="seed for randomized generators")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a complex file")
    p.add_argument("family", choices=sorted(FAMILIES) + sorted(f.replace("_", "-") for f in FAMILIES))
    for name in ("m", "n", "d", "seed", "vertices"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="check a graph or complex file")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("homology", help="H_1 over Z and/or Z/2")
    p.add_argument("input")
    p.add_argument("--ring", choices=("Z", "Z2", "both"), default="both")
    p.add_argument("--export-d2", help="write the boundary matrix d2 as triplets")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("torsion", help="odd walks and their homology classes")
    p.add_argument("input")
    p.add_argument("--walk")
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("chi", help="exact chromatic number with refutation trace")
    _add_graph_input(p)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--trace", help="write the refutation trace here")
    p.add_argument("--coloring-out", help="write the optimal coloring here")
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("chic", help="circular chromatic number by K_{p/q} scan")
    _add_graph_input(p)
    p.add_argument("--max-den", type=int)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_chic)

    p = sub.add_parser("hom", help="search a homomorphism SOURCE -> TARGET")
    p.add_argument("source", help="file or family spec like circular:7:3")
    p.add_argument("target")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("rainbow", help="rainbow faces of one or all colorings")
    p.add_argument("input")
    p.add_argument("--coloring", help="coloring file; omit to sweep all colorings")
    p.add_argument("--colors", type=int, default=5)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_rainbow)

    p = sub.add_parser("pi1k", help="abelianized k-fundamental groups")
    _add_graph_input(p)
    p.add_argument("--k", required=True, help="e.g. 2..6")
    p.add_argument("--expect", nargs=2, type=int, metavar=("N", "M"),
                   help="compare with the circular complete graph pattern")
    p.set_defaults(func=cmd_pi1k)

    p = sub.add_parser("reduce", help="decide k-homotopy of two walks")
    _add_graph_input(p)
    p.add_argument("--walk", required=True)
    p.add_argument("--target", help="defaults to the trivial walk")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, default=2)
    p.add_argument("--cover", nargs=2, type=int, metavar=("N", "M"))
    p.add_argument("--integer-class", action="store_true", help="also separate by the Z homology class")
    p.add_argument("--cert", help="write the move certificate here")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("lift", help="lift a walk of K_{n/m} to the unrolled cover")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--walk", required=True)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("nbhd", help="H_1 of neighborhood complexes")
    _add_graph_input(p)
    p.add_argument("--j", required=True, help="e.g. 1..3")
    p.set_defaults(func=cmd_nbhd)

    p = sub.add_parser("verify", help="run theorem checks on a complex file")
    p.add_argument("input")
    p.add_argument("--checks", default="all", help=f"comma list from {','.join(CHECKS)} or 'all'")
    p.add_argument("--colors", type=int, default=5)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", help="check a refutation trace or move certificate")
    _add_graph_input(p)
    p.add_argument("--kind", choices=("coloring", "moves"), required=True)
    p.add_argument("--certificate", required=True)
    p.add_argument("--colors", type=int)
    p.add_argument("--walk")
    p.add_argument("--target")
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    report = RunReport(argv)
    start = time.perf_counter()
    try:
        args.func(args, report)
    except (InputError, ResourceError, InternalConsistencyError) as exc:
        print(f"evencw: error: {exc}", file=sys.stderr)
        return 1
    report.seconds = time.perf_counter() - start
    out = sys.stderr if report.to_stderr else sys.stdout
    out.write(report.render(args.format))
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: solve, gen, and bench over PACE .gr/.td files.

Exit codes: 0 success, 2 parse error, 3 invalid decomposition, 4 audit
failure, 5 box refusal. Bench parallelism is capped by TWMIS_WORKERS.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .graphcore import Graph, GraphParseError, format_pace_gr, gen_partial_ktree, parse_graph
from .decomp import InvalidDecompositionError, make_nice, read_td, validate_td, write_td
from .solvers import (BlackBox, BudgetExceededError, box_clique_removal, box_exact,
                      exact_mis_bruteforce, exact_mis_td_dp, greedy_degeneracy)
from .twapx import approx_tw
from .audit import run_audits

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID_TD = 3
EXIT_AUDIT = 4
EXIT_REFUSED = 5

REPORT_SCHEMA = "twmis-report/1"


@dataclass
class RunReport:
    """Per-instance record: sizes, provenance, timings, and audit outcomes."""

    schema: str
    instance: str
    n: int
    m: int
    width: int
    leaf_count: int
    candidates: list[tuple[str, int]]
    final_size: int
    final_provenance: str
    solution: list[int]  # 1-indexed
    alpha: int | None = None
    ratio: float | None = None
    stage_seconds: dict = field(default_factory=dict)
    audits: list[dict] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [
            f"instance      {self.instance}",
            f"n / m         {self.n} / {self.m}",
            f"width         {self.width}",
            f"leaf count    {self.leaf_count}",
            "candidates:",
        ]
        for prov, size in self.candidates:
            lines.append(f"  {prov:<12} {size}")
        lines.append(f"final         {self.final_size} ({self.final_provenance})")
        if self.alpha is not None:
            lines.append(f"oracle alpha  {self.alpha}")
            lines.append(f"ratio         {self.ratio:.3f}")
        for stage, secs in self.stage_seconds.items():
            lines.append(f"time {stage:<9} {secs:.3f}s")
        if self.audits:
            bad = [a for a in self.audits if not a["ok"]]
            lines.append(f"audits        {len(self.audits) - len(bad)}/{len(self.audits)} passed")
            for a in bad:
                lines.append(f"  FAIL {a['name']}: {a['detail']}")
        return "\n".join(lines)


def _parse_box(spec: str) -> BlackBox:
    if spec == "clique-removal":
        return box_clique_removal()
    if spec == "exact":
        return box_exact()
    if spec.startswith("exact:"):
        return box_exact(budget=int(spec.split(":", 1)[1]))
    raise ValueError(f"unknown box {spec!r}; use exact[:budget] or clique-removal")


def _oracle_alpha(G: Graph, T, budget_n: int = 30, budget_w: int = 20) -> int | None:
    try:
        return exact_mis_bruteforce(G, budget=budget_n).size
    except BudgetExceededError:
        pass
    try:
        return exact_mis_td_dp(G, make_nice(T, G), width_budget=budget_w).size
    except BudgetExceededError:
        return None


def _solve_instance(gr_path: Path, td_path: Path, box: BlackBox,
                    want_oracle: bool, want_audit: bool) -> RunReport:
    G = parse_graph(gr_path.read_text())
    T = read_td(td_path.read_text())
    validate_td(G, T).raise_if_failed()

    stages: dict[str, float] = {}
    t0 = time.perf_counter()
    result, trace = approx_tw(G, T, box)
    stages["pipeline"] = time.perf_counter() - t0

    alpha = ratio = None
    if want_oracle:
        t0 = time.perf_counter()
        alpha = _oracle_alpha(G, T)
        stages["oracle"] = time.perf_counter() - t0
        if alpha is not None and result.size > 0:
            ratio = alpha / result.size

    audits: list[dict] = []
    if want_audit:
        t0 = time.perf_counter()
        audits = [dataclasses.asdict(c) for c in run_audits(G, T, box)]
        stages["audit"] = time.perf_counter() - t0

    leaf_count = len(make_nice(T, G).leaf_nodes())
    return RunReport(
        schema=REPORT_SCHEMA,
        instance=gr_path.stem,
        n=G.n,
        m=G.m,
        width=T.width,
        leaf_count=leaf_count,
        candidates=list(trace.candidates),
        final_size=result.size,
        final_provenance=result.provenance,
        solution=[v + 1 for v in result.vertices],
        alpha=alpha,
        ratio=ratio,
        stage_seconds=stages,
        audits=audits,
    )


def cmd_solve(args) -> int:
    try:
        box = _parse_box(args.box)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = _solve_instance(Path(args.graph), Path(args.td), box,
                                 args.oracle, args.audit)
    except (GraphParseError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidDecompositionError as exc:
        print(f"invalid decomposition: {exc}", file=sys.stderr)
        return EXIT_INVALID_TD
    except BudgetExceededError as exc:
        print(f"box refusal: {exc}", file=sys.stderr)
        return EXIT_REFUSED

    if args.out:
        Path(args.out).write_text("".join(f"{v}\n" for v in report.solution))
    if args.json:
        Path(args.json).write_text(json.dumps(dataclasses.asdict(report), indent=2) + "\n")
    print(report.to_text())
    if not args.out:
        print("solution (1-indexed): " + " ".join(map(str, report.solution)))
    if args.audit and any(not a["ok"] for a in report.audits):
        return EXIT_AUDIT
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        G, T = gen_partial_ktree(args.n, args.k, args.keep_prob, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    gr_path = Path(args.prefix + ".gr")
    td_path = Path(args.prefix + ".td")
    gr_path.write_text(format_pace_gr(G))
    td_path.write_text(write_td(T, G.n))
    print(f"wrote {gr_path} (n={G.n}, m={G.m}) and {td_path} (width {T.width})")
    return EXIT_OK


def _geo_mean(values: list[float]) -> float | None:
    vals = [v for v in values if v > 0]
    if not vals:
        return None
    return math.exp(sum(math.log(v) for v in vals) / len(vals))


def cmd_bench(args) -> int:
    try:
        box = _parse_box(args.box)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    corpus = Path(args.dir)
    pairs = sorted((p, p.with_suffix(".td")) for p in corpus.glob("*.gr")
                   if p.with_suffix(".td").exists())
    if not pairs:
        print(f"error: no .gr/.td instance pairs in {corpus}", file=sys.stderr)
        return 1

    def run_one(pair):
        gr, td = pair
        try:
            report = _solve_instance(gr, td, box, want_oracle=True, want_audit=False)
            G = parse_graph(gr.read_text())
            greedy = greedy_degeneracy(G).size
            return report, greedy, None
        except Exception as exc:  # noqa: BLE001 -- skip bad instances with a warning
            return None, None, f"{gr.name}: {exc}"

    workers = max(1, int(os.environ.get("TWMIS_WORKERS", "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_one, pairs))
    else:
        outcomes = [run_one(p) for p in pairs]

    rows = []
    for report, greedy, warning in outcomes:
        if warning:
            print(f"warning: {warning}", file=sys.stderr)
            continue
        rows.append((report, greedy))
    if not rows:
        print("error: every instance failed", file=sys.stderr)
        return 1
    rows.sort(key=lambda r: r[0].instance)

    header = f"{'instance':<24} {'n':>4} {'w':>3} {'greedy':>6} {'final':>6} {'alpha':>6} {'a/f':>6}"
    print(header)
    print("-" * len(header))
    vs_greedy, vs_exact = [], []
    for report, greedy in rows:
        alpha = report.alpha if report.alpha is not None else float("nan")
        af = report.ratio if report.ratio is not None else float("nan")
        print(f"{report.instance:<24} {report.n:>4} {report.width:>3} "
              f"{greedy:>6} {report.final_size:>6} {alpha:>6} {af:>6.3f}")
        if greedy:
            vs_greedy.append(report.final_size / greedy)
        if report.alpha:
            vs_exact.append(report.final_size / report.alpha)
    print("-" * len(header))
    gg = _geo_mean(vs_greedy)
    ge = _geo_mean(vs_exact)
    print(f"geo-mean final/greedy: {gg:.3f}" if gg else "geo-mean final/greedy: n/a")
    print(f"geo-mean final/exact-dp: {ge:.3f} over {len(vs_exact)} instances"
          if ge else "geo-mean final/exact-dp: n/a (widths exceed DP budget)")
    if args.json:
        payload = {
            "schema": REPORT_SCHEMA,
            "rows": [dict(dataclasses.asdict(r), greedy=g) for r, g in rows],
            "geo_mean_final_over_greedy": gg,
            "geo_mean_final_over_exact_dp": ge,
        }
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twmis",
                                     description="Treewidth-parameterized MIS approximation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the pipeline on a .gr/.td pair")
    p.add_argument("graph")
    p.add_argument("td")
    p.add_argument("--box", default="exact:30", help="exact[:budget] or clique-removal")
    p.add_argument("--oracle", action="store_true", help="also compute the exact optimum")
    p.add_argument("--audit", action="store_true", help="run all structural audits")
    p.add_argument("--out", help="write the solution, one 1-indexed vertex per line")
    p.add_argument("--json", help="write the machine-readable report")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a partial k-tree instance pair")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("keep_prob", type=float)
    p.add_argument("seed", type=int)
    p.add_argument("prefix")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run the pipeline over a directory of instances")
    p.add_argument("dir")
    p.add_argument("--box", default="exact:30")
    p.add_argument("--json", help="write machine-readable rows and aggregates")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

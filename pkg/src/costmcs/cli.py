"""``mcs`` command line.

Exit codes: 0 answered (consistent / query true), 1 inconsistent, query false
or cyclic ``strata`` input, 2 usage, parse or precondition error, 3 guard or
cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import engine
from .errors import ContractError, CyclicError, GuardExceeded, MCSError
from .generate import GeneratorSpec, generate
from .incremental import incremental_run
from .ledger import CostLedger, bound_report
from .results import result_json
from .solvers import (grounded_equilibrium_fixpoint, grounded_equilibrium_stratified,
                      solve_general, stratify)
from .supports import supports_of
from .syntax import McsParseError, load_mcs

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON result document")
    common.add_argument("--ledger", metavar="PATH", help="write the invocation ledger as JSON lines")
    common.add_argument("--report-bounds", action="store_true",
                        help="compare the ledger with the algorithm's worst-case bound")

    p = _Parser(prog="mcs", description="Cost-aware multi-context system reasoning.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="decide consistency")
    c.add_argument("file")
    c.add_argument("--algorithm", default="auto", choices=["auto", "general", "fixpoint", "stratified"])

    q = sub.add_parser("query", parents=[common], help="brave or cautious query")
    q.add_argument("file")
    q.add_argument("--context", required=True)
    q.add_argument("--atom", required=True)
    q.add_argument("--mode", default="brave", choices=["brave", "cautious"])
    q.add_argument("--algorithm", default="auto", choices=list(engine.ALGORITHMS))
    q.add_argument("--select", default="order", choices=["order", "cheapest"])
    q.add_argument("--explain", action="store_true", help="print per-iteration fragments (incremental)")

    s = sub.add_parser("strata", parents=[common], help="compact stratification")
    s.add_argument("file")

    u = sub.add_parser("supports", parents=[common], help="enumerate supports of a context")
    u.add_argument("file")
    u.add_argument("--context", required=True)

    b = sub.add_parser("bench", parents=[common], help="run algorithms on generated systems, CSV out")
    b.add_argument("--spec", required=True, help="generator spec: JSON text or path to a JSON file")
    b.add_argument("--algorithms", default="general,fixpoint,stratified,incremental")
    return p


def _emit(args, doc: dict, text: str, ledger: CostLedger, out) -> None:
    if args.ledger:
        ledger.write_jsonl(args.ledger)
    if args.json:
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")
        if args.report_bounds and "bound_report" in doc:
            r = doc["bound_report"]
            out.write(f"bound[{r['algorithm']}]: {r['observed_count']} invocations <= "
                      f"{r['bound_count']}: {r['within_bound']}; cost {Fraction(r['observed_cost'])} <= "
                      f"{Fraction(r['bound_cost'])}\n")
        for note in ledger.notes:
            out.write(f"note: {note}\n")


def _fmt_state(state) -> str:
    return "(" + ", ".join(f"{k}: {{{', '.join(sorted(v))}}}" for k, v in state.items()) + ")"


def _cmd_check(args, out) -> int:
    mcs = load_mcs(args.file)
    ledger = CostLedger()
    outcome = engine.check(mcs, args.algorithm, ledger)
    report = bound_report(mcs, ledger, engine.BOUND_FOR[outcome.algorithm]) if args.report_bounds else None
    doc = result_json(outcome.algorithm, ledger, outcome=outcome, report=report)
    if outcome.consistent:
        lines = [f"consistent ({outcome.algorithm}): {len(outcome.equilibria)} equilibrium(s)"]
        lines += ["  " + _fmt_state(s) for s in outcome.equilibria]
    else:
        lines = ["inconsistent: no equilibrium"]
    lines.append(f"invocations: {ledger.count()}, cost: {ledger.total()}")
    _emit(args, doc, "\n".join(lines), ledger, out)
    return EXIT_OK if outcome.consistent else EXIT_FALSE


def _cmd_query(args, out) -> int:
    mcs = load_mcs(args.file)
    ledger = CostLedger()
    selection = "cheapest" if args.select == "cheapest" else "declared-order"
    explain: list = []
    outcome = engine.query(mcs, args.context, args.atom, args.mode, args.algorithm, selection,
                           ledger, explain)
    report = None
    if args.report_bounds:
        report = bound_report(mcs, ledger, engine.BOUND_FOR[outcome.algorithm],
                              context=args.context)
    doc = result_json(outcome.algorithm, ledger, query=outcome, report=report,
                      iterations=explain if args.explain else None)
    verdict = "entailed" if outcome.entailed else "not entailed"
    lines = [f"{args.mode} {args.context}:{args.atom}: {verdict} ({outcome.algorithm})"]
    if outcome.vacuous:
        lines.append("  vacuous: the system has no equilibrium")
    if outcome.witness is not None:
        lines.append("  witness: " + _fmt_state(outcome.witness))
    if args.explain:
        for k, it in enumerate(explain, 1):
            lines.append(f"  iteration {k}: support {{{', '.join(it.support)}}} new {{{', '.join(it.new_rules)}}} "
                         f"recomputed [{', '.join(it.recomputed)}] seeded [{', '.join(it.seeded)}] "
                         f"+{it.invocations} invocations, +{it.cost} cost")
    lines.append(f"invocations: {ledger.count()}, cost: {ledger.total()}")
    _emit(args, doc, "\n".join(lines), ledger, out)
    return EXIT_OK if outcome.entailed else EXIT_FALSE


def _cmd_strata(args, out) -> int:
    mcs = load_mcs(args.file)
    try:
        strat = stratify(mcs)
    except CyclicError as exc:
        if args.json:
            out.write(json.dumps({"stratified": False, "cycle": exc.cycle}) + "\n")
        else:
            out.write(f"not stratified: cycle {' -> '.join(exc.cycle)}\n")
        return EXIT_FALSE
    if args.json:
        out.write(json.dumps({"stratified": True, "strata": strat.as_lists()}) + "\n")
    else:
        for k, layer in enumerate(strat.strata):
            out.write(f"stratum {k}: {', '.join(layer)}\n")
    return EXIT_OK


def _cmd_supports(args, out) -> int:
    mcs = load_mcs(args.file)
    info = supports_of(mcs, args.context)
    if args.json:
        out.write(json.dumps({
            "context": args.context,
            "supports": [s.fragment.sorted_ids() for s in info],
            "supporting_contexts": [n for n in mcs.names if n in info.supporting_contexts],
            "supporting_rules": [r.id for r in mcs.rules if r.id in info.supporting_rules],
        }, indent=2) + "\n")
        return EXIT_OK
    for k, s in enumerate(info, 1):
        out.write(f"support {k}: {{{', '.join(s.fragment.sorted_ids())}}}\n")
    out.write(f"supporting contexts: {{{', '.join(n for n in mcs.names if n in info.supporting_contexts)}}}\n")
    out.write(f"supporting rules: {{{', '.join(r.id for r in mcs.rules if r.id in info.supporting_rules)}}}\n")
    return EXIT_OK


BENCH_COLUMNS = ["seed", "kind", "n", "m", "algorithm", "invocations", "total_cost",
                 "bound_count", "within_bound"]


def _bench_spec(raw: str) -> tuple[GeneratorSpec, list[int]]:
    if os.path.exists(raw):
        with open(raw, encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = json.loads(raw)
    if "seeds" in data:
        seeds = [int(s) for s in data["seeds"]]
    else:
        base = int(data.get("seed", 0))
        seeds = list(range(base, base + int(data.get("count", 1))))
    return GeneratorSpec.from_json(data), seeds


def run_bench(spec: GeneratorSpec, seeds: Sequence[int], algorithms: Sequence[str], out, err=None) -> int:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for seed in seeds:
        mcs = generate(spec.with_seed(seed))
        for alg in algorithms:
            ledger = CostLedger()
            context = mcs.names[-1] if mcs.n else None
            try:
                if alg == "general":
                    solve_general(mcs, "all", ledger)
                elif alg == "fixpoint":
                    grounded_equilibrium_fixpoint(mcs, ledger)
                elif alg == "stratified":
                    grounded_equilibrium_stratified(mcs, ledger)
                elif alg == "incremental":
                    if context is None:
                        raise ContractError("no context to query")
                    incremental_run(mcs, context, "p0", "declared-order", ledger)
                else:
                    raise ContractError(f"unknown algorithm {alg}")
                report = bound_report(mcs, ledger, engine.BOUND_FOR[alg], context=context)
            except (ContractError, CyclicError, GuardExceeded) as exc:
                if err is not None:
                    err.write(f"seed {seed} {alg}: skipped ({exc})\n")
                continue
            writer.writerow([seed, spec.kind, mcs.n, mcs.m, alg, report.observed_count,
                             str(report.observed_cost), report.bound_count,
                             str(report.within_bound).lower()])
    return EXIT_OK


def _cmd_bench(args, out) -> int:
    spec, seeds = _bench_spec(args.spec)
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    unknown = set(algorithms) - {"general", "fixpoint", "stratified", "incremental"}
    if unknown:
        raise ContractError(f"unknown algorithms {sorted(unknown)}")
    return run_bench(spec, seeds, algorithms, out, sys.stderr)


COMMANDS = {"check": _cmd_check, "query": _cmd_query, "strata": _cmd_strata,
            "supports": _cmd_supports, "bench": _cmd_bench}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except McsParseError as exc:
        for d in exc.diagnostics:
            sys.stderr.write(f"{getattr(args, 'file', '-')}:{d}\n")
        return EXIT_USAGE
    except GuardExceeded as exc:
        sys.stderr.write(f"mcs: guard exceeded: {exc}\n")
        return EXIT_GUARD
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write(f"mcs: {exc}\n")
        return EXIT_USAGE
    except MCSError as exc:
        sys.stderr.write(f"mcs: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance criteria 1-9, one printed PASS/FAIL line each.

Every comparison is exact (set equality, integer counts, rational totals).
"""
import random
import time

import costmcs
from costmcs import (CostLedger, GeneratorSpec, bound_report, check_prop3, generate,
                     incremental_query, incremental_run, independent_chains, parse_mcs,
                     solve_general, to_text)
from costmcs import engine
from costmcs.model import BeliefState
from costmcs.results import result_json, validate
from costmcs.solvers import (brave, cautious, grounded_equilibrium_fixpoint,
                             grounded_equilibrium_stratified, run_fixpoint)

from conftest import definite_specs, definite_systems

# the generator's definite kinds; all three are stratified by construction
DEFINITE_KINDS = ("chain", "layered", "diamond-forest")


def _queries(mcs, rng, k):
    return [(rng.choice(mcs.names), rng.choice(["p0", "p1", "p2"])) for _ in range(k)]


def test_criterion_1_definite_oracle_equivalence(acceptance_line):
    start = time.perf_counter()
    systems = definite_systems(200, seed=101, max_n=4, max_m=10, kinds=DEFINITE_KINDS)
    bad = []
    for k, mcs in enumerate(systems):
        eqs = solve_general(mcs, "all").equilibria
        if len(eqs) != 1 or eqs[0] != grounded_equilibrium_fixpoint(mcs):
            bad.append(k)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 60
    acceptance_line(1, ok, f"{len(systems) - len(bad)}/{len(systems)} definite systems have exactly one "
                           f"equilibrium equal to the fixpoint result; {elapsed:.1f}s (< 60s)")
    assert ok, bad


def test_criterion_2_fixture_exactness(acceptance_line):
    e1, e2, e3 = (costmcs.load_fixture(n) for n in ("E1", "E2", "E3"))
    checks = {
        "E1 grounded": grounded_equilibrium_fixpoint(e1) == BeliefState({"C1": ["a"], "C2": ["b", "c"]}),
        "E2 equilibria": set(solve_general(e2).equilibria) == {
            BeliefState({"C1": ["a"], "C2": []}), BeliefState({"C1": [], "C2": ["b"]})},
        "E2 brave C1:a": brave(e2, "C1", "a").entailed is True,
        "E2 cautious C1:a": cautious(e2, "C1", "a").entailed is False,
        "E3 inconsistent": not solve_general(e3).consistent,
    }
    failed = [k for k, v in checks.items() if not v]
    acceptance_line(2, not failed, f"{len(checks) - len(failed)}/{len(checks)} fixture facts exact"
                    + (f"; failed: {', '.join(failed)}" if failed else ""))
    assert not failed


def test_criterion_3_stratified_count(acceptance_line):
    systems = definite_systems(50, seed=103, max_n=8, max_m=14, kinds=DEFINITE_KINDS)
    bad = []
    for k, mcs in enumerate(systems):
        ledger = CostLedger()
        state = grounded_equilibrium_stratified(mcs, ledger)
        if ledger.count() != mcs.n or state != grounded_equilibrium_fixpoint(mcs):
            bad.append(k)
    acceptance_line(3, not bad, f"{len(systems) - len(bad)}/{len(systems)} stratified runs made exactly n "
                                f"invocations and matched the fixpoint")
    assert not bad


def test_criterion_4_bound_envelopes(acceptance_line):
    rng = random.Random(104)
    definite = definite_systems(120, seed=104, max_n=5, max_m=10)
    general = [generate(GeneratorSpec("general-random", 3, rng.randint(0, 7), negation_rate=0.4,
                                      seed=s)) for s in range(60)]
    runs = {"general": [0, 0], "fixpoint": [0, 0], "stratified": [0, 0], "incremental-relevant": [0, 0]}
    optimized_ok = True
    nm_exceeded = 0
    leaf_only = True

    def tally(family, report):
        runs[family][0] += 1
        runs[family][1] += 0 if report.within_bound else 1

    for mcs in general + [m for m in definite if m.m <= 8]:
        ledger = CostLedger()
        solve_general(mcs, "all", ledger)
        tally("general", bound_report(mcs, ledger, "general"))
    for mcs in definite:
        ledger = CostLedger()
        grounded_equilibrium_fixpoint(mcs, ledger)
        rep = bound_report(mcs, ledger, "fixpoint")
        tally("fixpoint", rep)
        optimized_ok &= ledger.count() <= mcs.n + mcs.n * mcs.m
        nm_exceeded += not rep.annotations["within_nm"]
        if engine.choose_algorithm(mcs) == "stratified":
            ledger = CostLedger()
            grounded_equilibrium_stratified(mcs, ledger)
            rep = bound_report(mcs, ledger, "stratified")
            tally("stratified", rep)
            for ctx, atom in _queries(mcs, rng, 2):
                ledger = CostLedger()
                incremental_run(mcs, ctx, atom, ledger=ledger)
                rep = bound_report(mcs, ledger, "incremental-relevant", context=ctx)
                tally("incremental-relevant", rep)
                if not rep.within_bound:
                    leaf_only &= rep.annotations["within_bound_rule_owners"]
    failing = {k: v for k, v in runs.items() if v[1]}
    ok = not failing and optimized_ok
    summary = "; ".join(f"{k} {v[0] - v[1]}/{v[0]} within" for k, v in runs.items())
    detail = (f"{summary}; optimized fixpoint <= n+n*m: {optimized_ok}; "
              f"fixpoint runs above n*m: {nm_exceeded}")
    if failing.keys() == {"incremental-relevant"} and leaf_only:
        detail += ("; every incremental violation comes from evaluating contexts without bridge "
                   "rules, which the |C|*|R| product leaves out")
    acceptance_line(4, ok, detail)
    assert ok, failing


def test_criterion_5_prop3(acceptance_line):
    systems = definite_systems(100, seed=105, max_n=5, max_m=8)
    bad = [k for k, mcs in enumerate(systems) if not check_prop3(mcs)]
    acceptance_line(5, not bad, f"{len(systems) - len(bad)}/{len(systems)} systems: every justification "
                                f"lies inside a support")
    assert not bad


def test_criterion_6_incremental_correctness(acceptance_line):
    rng = random.Random(106)
    systems = definite_systems(100, seed=106, max_n=6, max_m=10, kinds=DEFINITE_KINDS)
    total = wrong = 0
    for mcs in systems:
        full = grounded_equilibrium_fixpoint(mcs)
        for ctx, atom in _queries(mcs, rng, 3):
            for sel in ("declared-order", "cheapest"):
                total += 1
                wrong += incremental_query(mcs, ctx, atom, sel) != (atom in full[ctx])
    acceptance_line(6, not wrong, f"{total - wrong}/{total} incremental answers (both selections) "
                                  f"match full-equilibrium entailment")
    assert not wrong


def test_criterion_7_incremental_cost_saving(acceptance_line):
    start = time.perf_counter()
    mcs = independent_chains(5, 4)
    inc, full = CostLedger(), CostLedger()
    entailed = incremental_query(mcs, "K1_4", "a", ledger=inc)
    grounded_equilibrium_fixpoint(mcs, full)
    elapsed = time.perf_counter() - start
    ok = (entailed and inc.total() <= 5 and full.total() >= 20 and inc.total() < full.total()
          and elapsed < 1.0)
    acceptance_line(7, ok, f"incremental cost {inc.total()} (<= 5), fixpoint cost {full.total()} (>= 20), "
                           f"{elapsed * 1000:.0f} ms (< 1 s)")
    assert ok


def test_criterion_8_loop_invariant(acceptance_line):
    rng = random.Random(108)
    specs = definite_specs(20, seed=108, max_n=6, max_m=10)
    audited = mismatches = 0
    for spec in specs:
        mcs = generate(spec)
        ctx, atom = _queries(mcs, rng, 1)[0]

        def audit(st):
            nonlocal audited, mismatches
            scratch, _ = run_fixpoint(mcs, CostLedger(), rule_ids=st.done.rule_ids, evaluate=st.evaluated)
            audited += 1
            mismatches += any(st.partial[n] != scratch[n] for n in st.evaluated)

        incremental_run(mcs, ctx, atom, on_iteration=audit)
    acceptance_line(8, not mismatches, f"{audited - mismatches}/{audited} iterations over 20 instances "
                                       f"equal the from-scratch equilibrium of the merged fragment")
    assert not mismatches and audited >= 20


def test_criterion_9_round_trip_and_schemas(acceptance_line):
    systems = [costmcs.load_fixture(n) for n in ("E1", "E2", "E3", "E4", "E5")]
    specs = definite_specs(400, seed=109, max_n=6, max_m=10)
    specs += [GeneratorSpec("general-random", 4, s % 7, negation_rate=0.3, seed=s,
                            cost_range=("1/3", "2")) for s in range(100)]
    systems += [generate(s) for s in specs]
    bad_round_trip = bad_schema = 0
    for mcs in systems:
        text = to_text(mcs)
        again = parse_mcs(text)
        bad_round_trip += again != mcs or to_text(again) != text
        ledger = CostLedger()
        outcome = engine.check(mcs, "auto", ledger)
        report = bound_report(mcs, ledger, engine.BOUND_FOR[outcome.algorithm])
        try:
            validate(result_json(outcome.algorithm, ledger, outcome=outcome, report=report))
            for rec in ledger.records:
                validate(rec.to_json(), "ledger_record")
        except Exception:
            bad_schema += 1
    ok = not bad_round_trip and not bad_schema
    acceptance_line(9, ok, f"{len(systems)} systems (5 fixtures + {len(specs)} generated): "
                           f"{bad_round_trip} round-trip failures, {bad_schema} schema failures")
    assert ok

import pytest

from costmcs import (MCS, BridgeRule, Clause, Context, ContractError, CostLedger, CyclicError, GuardExceeded,
                     HornSuite, TableSuite, bound_report, brave, cautious, check_definite, generate,
                     GeneratorSpec, solve_general, stratify)
from costmcs.model import BeliefState
from costmcs.solvers import (grounded_equilibrium, grounded_equilibrium_fixpoint,
                             grounded_equilibrium_stratified, is_stratification, Stratification)

from conftest import as_plain, brute_equilibria, definite_systems


def state(**sets):
    return BeliefState(sets)


# -- definiteness ---------------------------------------------------------------

def test_check_definite_examples(e1, e2):
    assert check_definite(e1)
    result = check_definite(e2)
    assert not result and any("r1" in d for d in result.diagnostics)
    branching = TableSuite([({}, [set(), {"z"}]), ({"b"}, [{"b"}])])
    swapped = MCS([e1["C1"], Context("C2", branching, e1["C2"].rules)])
    assert not check_definite(swapped)


# -- general search -------------------------------------------------------------

def test_general_fixture_equilibria(e2, e3):
    out = solve_general(e2, "all")
    assert set(out.equilibria) == {state(C1=["a"], C2=[]), state(C1=[], C2=["b"])}
    out = solve_general(e3, "all")
    assert out.equilibria == [] and not out.consistent


def test_general_no_rules():
    mcs = MCS([Context("A", HornSuite(())), Context("B", HornSuite(()))])
    out = solve_general(mcs)
    assert out.equilibria == [state(A=[], B=[])]


def test_general_first_mode(e2):
    out = solve_general(e2, "first")
    assert out.consistent and len(out.equilibria) == 1


def test_general_guard():
    rules = tuple(BridgeRule(f"r{i}", "A", f"x{i}") for i in range(21))
    mcs = MCS([Context("A", HornSuite(()), rules)])
    with pytest.raises(GuardExceeded):
        solve_general(mcs)


def test_general_matches_brute_force_on_nondefinite():
    for seed in range(40):
        mcs = generate(GeneratorSpec("general-random", 3, 4, negation_rate=0.5, seed=seed,
                                     atoms_per_context=2))
        ledger = CostLedger()
        got = {frozenset(as_plain(s).items()) for s in solve_general(mcs, "all", ledger).equilibria}
        want = {frozenset(as_plain(s).items()) for s in brute_equilibria(mcs)}
        assert got == want
        assert bound_report(mcs, ledger, "general").within_bound


def test_general_invocation_count_exact(e2):
    ledger = CostLedger()
    solve_general(e2, "all", ledger)
    assert ledger.count() == e2.n * 2 ** e2.m


# -- queries ----------------------------------------------------------------------

def test_queries_on_fixtures(e2, e3):
    out = brave(e2, "C1", "a")
    assert out.entailed and out.witness == state(C1=["a"], C2=[])
    out = cautious(e2, "C1", "a")
    assert not out.entailed and "a" not in out.witness["C1"]
    out = cautious(e3, "C1", "a")
    assert out.entailed and out.vacuous
    assert not brave(e3, "C1", "a").entailed


ACYCLIC = ("chain", "layered", "diamond-forest")


def test_definite_dispatch_matches_search():
    for mcs in definite_systems(25, seed=11, max_m=6, kinds=ACYCLIC):
        for ctx in mcs.names:
            for atom in ("p0", "p1"):
                for run in (brave, cautious):
                    assert run(mcs, ctx, atom).entailed == run(mcs, ctx, atom, search=True).entailed


def test_definite_dispatch_cyclic():
    # cycles admit self-supporting equilibria above the grounded one: cautious
    # answers still agree, brave on the definite path is grounded entailment
    self_loop = MCS([Context("C1", HornSuite(()), (BridgeRule("r1", "C1", "p", {("C1", "p")}),))])
    assert not brave(self_loop, "C1", "p").entailed
    assert brave(self_loop, "C1", "p", search=True).entailed
    for mcs in definite_systems(25, seed=12, max_m=6, kinds=("general-random",)):
        for ctx in mcs.names:
            for atom in ("p0", "p1"):
                assert cautious(mcs, ctx, atom).entailed == cautious(mcs, ctx, atom, search=True).entailed


# -- definite fixpoint ----------------------------------------------------------

def test_fixpoint_e1_trace(e1):
    trace = []
    ledger = CostLedger()
    result = grounded_equilibrium_fixpoint(e1, ledger, skip_unchanged=False, trace=trace)
    assert result == state(C1=["a"], C2=["b", "c"])
    assert [s for _, s in trace] == [state(C1=["a"], C2=[]), state(C1=["a"], C2=["b", "c"]),
                                     state(C1=["a"], C2=["b", "c"])]
    assert ledger.count() == 6
    skipped = CostLedger()
    grounded_equilibrium_fixpoint(e1, skipped)
    assert skipped.count() == 3


def test_fixpoint_e5(e5):
    assert grounded_equilibrium_fixpoint(e5) == state(C1=["a"], C2=["b", "b2"], C3=["c", "c2"])


def test_fixpoint_no_rules():
    mcs = MCS([Context("A", HornSuite(())), Context("B", HornSuite(()))])
    ledger = CostLedger()
    grounded_equilibrium_fixpoint(mcs, ledger)
    assert ledger.count() == 2


def test_fixpoint_rejects_nondefinite(e2):
    with pytest.raises(ContractError):
        grounded_equilibrium_fixpoint(e2)


def test_fixpoint_monotone_growth():
    for mcs in definite_systems(40, seed=5):
        trace = []
        grounded_equilibrium_fixpoint(mcs, trace=trace)
        for (kb0, s0), (kb1, s1) in zip(trace, trace[1:]):
            assert all(kb0[n] <= kb1[n] for n in kb0)
            assert s0 <= s1


def test_fixpoint_bounds_raw_and_optimized():
    for mcs in definite_systems(60, seed=9):
        raw, opt = CostLedger(), CostLedger()
        grounded_equilibrium_fixpoint(mcs, raw, skip_unchanged=False)
        grounded_equilibrium_fixpoint(mcs, opt)
        assert raw.count() <= mcs.n * (mcs.m + 2)
        assert opt.count() <= mcs.n + mcs.m
        assert bound_report(mcs, opt, "fixpoint").within_bound


def test_raw_fixpoint_can_exceed_n_times_m_plus_one():
    # no rules but a fact: the loop still needs a confirming second sweep
    mcs = MCS([Context("A", HornSuite((Clause("a"),)))])
    raw = CostLedger()
    grounded_equilibrium_fixpoint(mcs, raw, skip_unchanged=False)
    assert raw.count() == 2 > mcs.n * (mcs.m + 1)
    rep = bound_report(mcs, raw, "fixpoint")
    assert not rep.within_bound and raw.count() <= rep.annotations["raw_bound"]


# -- stratification ---------------------------------------------------------------

def test_stratify_examples(e1, e2, e5):
    assert stratify(e5).as_lists() == [["C1"], ["C2"], ["C3"]]
    assert stratify(e1).as_lists() == [["C1"], ["C2"]]
    with pytest.raises(CyclicError) as info:
        stratify(e2)
    assert set(info.value.cycle) == {"C1", "C2"}


def test_stratified_counts(e1, e5):
    for mcs, n in ((e5, 3), (e1, 2)):
        ledger = CostLedger()
        assert grounded_equilibrium_stratified(mcs, ledger) == grounded_equilibrium_fixpoint(mcs)
        assert ledger.count() == n


def test_stratified_rejects_bad_input(e2, e5):
    with pytest.raises(ContractError):
        grounded_equilibrium_stratified(e2)
    with pytest.raises(ContractError):
        grounded_equilibrium_stratified(e5, stratification=Stratification((("C1", "C2", "C3"),)))


def _compact(mcs, strat):
    """No single context can drop to a lower stratum and still satisfy the definition."""
    idx = strat.index()
    for name in mcs.names:
        for lower in range(idx[name]):
            moved = {**idx, name: lower}
            if all(moved[c] < moved[r.target] for r in mcs.rules for c in r.body_contexts):
                return False
    return True


def test_stratification_sound_and_compact():
    kinds = ("chain", "layered", "diamond-forest")
    for mcs in definite_systems(100, seed=21, max_n=6, kinds=kinds):
        strat = stratify(mcs)
        assert is_stratification(mcs, strat)
        assert _compact(mcs, strat)


def test_grounded_equilibrium_dispatch(e5):
    ledger = CostLedger()
    grounded_equilibrium(e5, ledger)
    assert {r.phase for r in ledger.records} == {"stratified"}


def test_acyclic_definite_unique_equilibrium_brute_force():
    for mcs in definite_systems(40, seed=13, max_m=6, kinds=ACYCLIC):
        eqs = brute_equilibria(mcs)
        assert len(eqs) == 1
        assert as_plain(grounded_equilibrium_fixpoint(mcs)) == eqs[0]


def test_cyclic_definite_fixpoint_is_least_equilibrium():
    for mcs in definite_systems(40, seed=14, max_m=6, kinds=("general-random",)):
        eqs = brute_equilibria(mcs)
        least = as_plain(grounded_equilibrium_fixpoint(mcs))
        assert least in eqs
        assert all(least[n] <= e[n] for e in eqs for n in mcs.names)

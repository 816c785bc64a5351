"""
Fixpoint versus stratified evaluation
=====================================

Without negation every system has a grounded equilibrium.  The iterated
fixpoint reaches it in a few sweeps; when the rules form no cycle, one pass
over the strata evaluates every context exactly once.
"""

import costmcs
from costmcs import CostLedger, GeneratorSpec, bound_report, generate, stratify
from costmcs.solvers import grounded_equilibrium_fixpoint, grounded_equilibrium_stratified

# chain C1 -> C2 -> C3
mcs = costmcs.load_fixture("E5")
print("strata:", stratify(mcs).as_lists())

# trace the fixpoint sweep by sweep; skipping is off so every sweep runs all contexts
trace = []
raw = CostLedger()
grounded_equilibrium_fixpoint(mcs, raw, skip_unchanged=False, trace=trace)
for k, (kb, state) in enumerate(trace):
    print(f"sweep {k}: kb={ {n: sorted(v) for n, v in kb.items()} } -> {state.as_dict()}")

# reusing the belief set of a context whose kb did not grow saves invocations
skipped = CostLedger()
grounded_equilibrium_fixpoint(mcs, skipped)
strat = CostLedger()
grounded_equilibrium_stratified(mcs, strat)
print("invocations: raw", raw.count(), "skipping", skipped.count(), "stratified", strat.count())

# bound reports on a random layered system with rational costs
big = generate(GeneratorSpec("layered", 9, 14, cost_range=("1/2", "3"), seed=4))
for name, solve in (("fixpoint", grounded_equilibrium_fixpoint),
                    ("stratified", grounded_equilibrium_stratified)):
    ledger = CostLedger()
    solve(big, ledger)
    r = bound_report(big, ledger, name)
    print(f"{name:10s} count {r.observed_count:3d} <= {r.bound_count:3d}   "
          f"cost {r.observed_cost} <= {r.bound_cost}   ok={r.within_bound}")

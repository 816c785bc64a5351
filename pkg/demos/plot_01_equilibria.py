"""
Equilibria of a small multi-context system
==========================================

Two contexts that each believe their atom unless the other one does.
Guess-and-check search finds both stable outcomes and charges one ledger
record per context per guessed rule set.
"""

import costmcs
from costmcs import CostLedger, bound_report, brave, cautious, solve_general

# C1.a <- not (C2:b) and C2.b <- not (C1:a): an even negative loop
mcs = costmcs.load_fixture("E2")
print(costmcs.to_text(mcs))

ledger = CostLedger()
outcome = solve_general(mcs, "all", ledger)
for state in outcome.equilibria:
    print("equilibrium:", state.as_dict())

# every subset of the two rules is guessed once: 2 contexts * 2^2 guesses
report = bound_report(mcs, ledger, "general")
print(f"invocations {report.observed_count}, bound n*2^m = {report.bound_count}")

# a is believed in some equilibrium but not in all of them
print("brave C1:a   ", brave(mcs, "C1", "a").entailed)
print("cautious C1:a", cautious(mcs, "C1", "a").entailed)

# the odd loop C1.a <- not (C1:a) has no equilibrium at all, so cautious
# queries hold vacuously
odd = costmcs.load_fixture("E3")
print("E3 consistent:", solve_general(odd).consistent)
print("E3 cautious C1:a:", cautious(odd, "C1", "a"))

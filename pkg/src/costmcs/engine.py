"""Algorithm selection shared by the CLI and the benchmark runner."""
from __future__ import annotations

from typing import Optional

from .errors import ContractError, ValidationError
from .incremental import incremental_run
from .ledger import CostLedger
from .model import MCS
from .solvers import (QueryOutcome, SolveOutcome, brave, cautious, check_definite,
                      grounded_equilibrium_fixpoint, grounded_equilibrium_stratified,
                      is_stratifiable, solve_general)

ALGORITHMS = ("auto", "general", "fixpoint", "stratified", "incremental")

# which bound family a run of each algorithm is measured against
BOUND_FOR = {"general": "general", "fixpoint": "fixpoint", "stratified": "stratified",
             "incremental": "incremental-relevant"}


def choose_algorithm(mcs: MCS) -> str:
    if check_definite(mcs):
        return "stratified" if is_stratifiable(mcs) else "fixpoint"
    return "general"


def _resolve(mcs: MCS, algorithm: str) -> str:
    if algorithm not in ALGORITHMS:
        raise ValidationError(f"unknown algorithm {algorithm!r}")
    if algorithm == "auto":
        return choose_algorithm(mcs)
    if algorithm != "general":
        check = check_definite(mcs)
        if not check:
            raise ContractError(f"{algorithm} needs a definite system: " + "; ".join(check.diagnostics))
    if algorithm == "stratified" and not is_stratifiable(mcs):
        raise ContractError("stratified evaluation needs an acyclic system")
    return algorithm


def check(mcs: MCS, algorithm: str = "auto", ledger: Optional[CostLedger] = None) -> SolveOutcome:
    """Consistency: every equilibrium (general) or the grounded one (definite)."""
    ledger = CostLedger() if ledger is None else ledger
    algorithm = _resolve(mcs, algorithm)
    if algorithm == "incremental":
        raise ContractError("the incremental algorithm answers queries, not consistency")
    if algorithm == "general":
        out = solve_general(mcs, "all", ledger)
    else:
        solve = grounded_equilibrium_stratified if algorithm == "stratified" else grounded_equilibrium_fixpoint
        state = solve(mcs, ledger)
        out = SolveOutcome([state], True, ledger.summary())
    out.algorithm = algorithm
    return out


def query(mcs: MCS, context: str, atom: str, mode: str = "brave", algorithm: str = "auto",
          selection: str = "declared-order", ledger: Optional[CostLedger] = None,
          explain: Optional[list] = None) -> QueryOutcome:
    """Brave or cautious query; definite systems have one equilibrium so both coincide."""
    if mode not in ("brave", "cautious"):
        raise ValidationError(f"unknown mode {mode!r}")
    if context not in mcs:
        raise ValidationError(f"unknown context {context}")
    ledger = CostLedger() if ledger is None else ledger
    algorithm = _resolve(mcs, algorithm)
    if algorithm == "general":
        run = brave if mode == "brave" else cautious
        return run(mcs, context, atom, ledger, search=True)
    if algorithm == "incremental":
        result = incremental_run(mcs, context, atom, selection, ledger)
        if explain is not None:
            explain.extend(result.iterations)
        witness = result.state if result.entailed == (mode == "brave") else None
        return QueryOutcome(result.entailed, mode, context, atom, witness, algorithm="incremental")
    solve = grounded_equilibrium_stratified if algorithm == "stratified" else grounded_equilibrium_fixpoint
    state = solve(mcs, ledger)
    hit = atom in state[context]
    witness = state if hit == (mode == "brave") else None
    return QueryOutcome(hit, mode, context, atom, witness, algorithm=algorithm)

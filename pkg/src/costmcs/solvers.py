"""Decision procedures: guess-and-check search, definite fixpoint, stratified evaluation."""
from __future__ import annotations

import graphlib
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import ContractError, CyclicError, GuardExceeded, ValidationError
from .ledger import CostLedger
from .logics import TableSuite, invoke_acc, verify_monotone
from .model import (MCS, BeliefState, knowledge_bases_from_guess, rule_satisfied,
                    satisfied_rules)

DEFAULT_MAX_RULES = 20


@dataclass
class DefiniteCheck:
    ok: bool
    diagnostics: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_definite(mcs: MCS) -> DefiniteCheck:
    diags = []
    for ctx in mcs.contexts:
        logic = ctx.logic
        if isinstance(logic, TableSuite):
            if not verify_monotone(logic):
                diags.append(f"context {ctx.name}: table is not a monotone singleton table")
        elif not logic.monotone:
            diags.append(f"context {ctx.name}: logic suite is not declared monotone")
        for r in ctx.rules:
            if r.negative:
                diags.append(f"rule {r.id}: negated body literal")
    return DefiniteCheck(not diags, diags)


def _require_definite(mcs: MCS) -> None:
    check = check_definite(mcs)
    if not check:
        raise ContractError("system is not definite: " + "; ".join(check.diagnostics))


# -- general search ----------------------------------------------------------

@dataclass
class SolveOutcome:
    equilibria: list[BeliefState]
    consistent: bool
    ledger_summary: dict
    algorithm: str = "general"


def _guesses(rule_ids: Iterable[str]) -> Iterator[tuple[str, ...]]:
    ids = sorted(rule_ids)
    for size in range(len(ids) + 1):
        yield from itertools.combinations(ids, size)


def iter_equilibria(mcs: MCS, ledger: CostLedger,
                    max_rules: int = DEFAULT_MAX_RULES) -> Iterator[BeliefState]:
    """Yield every equilibrium by guessing the set of satisfied rules.

    For each guess R: kb_i = heads of R owned by C_i, one invocation per
    context, then every combination of the returned alternatives is kept iff
    the rules it satisfies are exactly R.
    """
    if mcs.m > max_rules:
        raise GuardExceeded(f"{mcs.m} bridge rules exceed the general-search cap of {max_rules}")
    names = mcs.names
    for guess in _guesses(mcs.rule_ids):
        kbs = knowledge_bases_from_guess(mcs, guess)
        alternatives = []
        for ctx in mcs.contexts:
            accepted = invoke_acc(ctx, kbs[ctx.name], ledger, "general")
            alternatives.append(sorted(accepted, key=lambda s: (len(s), sorted(s))))
        if not all(alternatives):
            continue
        wanted = frozenset(guess)
        for combo in itertools.product(*alternatives):
            state = BeliefState(dict(zip(names, combo)))
            if satisfied_rules(mcs, state) == wanted:
                yield state


def solve_general(mcs: MCS, mode: str = "all", ledger: Optional[CostLedger] = None,
                  max_rules: int = DEFAULT_MAX_RULES) -> SolveOutcome:
    if mode not in ("all", "first"):
        raise ValidationError(f"unknown mode {mode!r}")
    ledger = CostLedger() if ledger is None else ledger
    found = []
    for state in iter_equilibria(mcs, ledger, max_rules):
        found.append(state)
        if mode == "first":
            break
    return SolveOutcome(found, bool(found), ledger.summary())


# -- definite fixpoint ---------------------------------------------------------

@dataclass
class FixpointStats:
    sweeps: int = 0
    invocations: int = 0
    # what the loop would have charged without skipping unchanged contexts
    raw_invocations: int = 0


def _heads(mcs, name, rule_ids, state):
    return frozenset(r.head for r in mcs[name].rules
                     if r.id in rule_ids and rule_satisfied(r, state))


def run_fixpoint(mcs: MCS, ledger: CostLedger, *, rule_ids=None, evaluate=None,
                 start: Optional[BeliefState] = None, seed_kb: bool = False,
                 skip_unchanged: bool = True, phase: str = "fixpoint",
                 trace: Optional[list] = None) -> tuple[BeliefState, FixpointStats]:
    """Grounded equilibrium by iterated evaluation, optionally restricted.

    Only the contexts in ``evaluate`` are invoked (others keep their value
    from ``start``) and only rules in ``rule_ids`` fire.  Knowledge bases
    start empty, or from the heads satisfied in ``start`` when ``seed_kb``.
    With ``skip_unchanged`` a context whose kb did not grow since its last
    invocation reuses its previous belief set.  Each sweep appends
    ``(kbs, state)`` to ``trace`` if given.
    """
    rule_ids = mcs.rule_ids if rule_ids is None else frozenset(rule_ids)
    evaluate = list(mcs.names) if evaluate is None else [n for n in mcs.names if n in set(evaluate)]
    state = BeliefState.empty(mcs) if start is None else start
    mcs.check_state(state)
    if seed_kb:
        kb = {n: _heads(mcs, n, rule_ids, state) for n in evaluate}
    else:
        kb = {n: frozenset() for n in evaluate}
    last_kb: dict[str, frozenset] = {}
    stats = FixpointStats()
    prev = None
    while True:
        values = {}
        for name in evaluate:
            if skip_unchanged and last_kb.get(name) == kb[name]:
                continue
            accepted = invoke_acc(mcs[name], kb[name], ledger, phase)
            if len(accepted) != 1:
                raise ContractError(
                    f"context {name} returned {len(accepted)} belief sets for kb "
                    f"{sorted(kb[name])}; definite evaluation needs exactly one"
                )
            values[name] = next(iter(accepted))
            last_kb[name] = kb[name]
            stats.invocations += 1
        stats.sweeps += 1
        stats.raw_invocations += len(evaluate)
        state = state.updated(values)
        if trace is not None:
            trace.append((dict(kb), state))
        if prev is not None:
            if not prev <= state:
                raise ContractError("belief state shrank between sweeps: a suite is not monotone")
            if state == prev:
                break
        prev = state
        kb = {n: kb[n] | _heads(mcs, n, rule_ids, state) for n in evaluate}
    return state, stats


def grounded_equilibrium_fixpoint(mcs: MCS, ledger: Optional[CostLedger] = None, *,
                                  skip_unchanged: bool = True,
                                  trace: Optional[list] = None) -> BeliefState:
    _require_definite(mcs)
    ledger = CostLedger() if ledger is None else ledger
    state, _ = run_fixpoint(mcs, ledger, skip_unchanged=skip_unchanged, trace=trace)
    return state


# -- stratification -------------------------------------------------------------

@dataclass(frozen=True)
class Stratification:
    strata: tuple[tuple[str, ...], ...]

    def index(self) -> dict[str, int]:
        return {name: k for k, layer in enumerate(self.strata) for name in layer}

    def __len__(self):
        return len(self.strata)

    def as_lists(self) -> list[list[str]]:
        return [list(layer) for layer in self.strata]


def dependency_graph(mcs: MCS) -> dict[str, set[str]]:
    """context -> contexts its rule bodies read from."""
    return {ctx.name: set().union(*(r.body_contexts for r in ctx.rules)) for ctx in mcs.contexts}


def stratify(mcs: MCS) -> Stratification:
    """Compact stratification: each context at its longest dependency depth."""
    graph = dependency_graph(mcs)
    sorter = graphlib.TopologicalSorter(graph)
    try:
        order = list(sorter.static_order())
    except graphlib.CycleError as exc:
        raise CyclicError(reversed(exc.args[1])) from None
    level: dict[str, int] = {}
    for name in order:
        level[name] = 1 + max((level[p] for p in graph[name]), default=-1)
    depth = max(level.values(), default=-1) + 1
    strata = tuple(tuple(n for n in mcs.names if level[n] == k) for k in range(depth))
    return Stratification(strata)


def is_stratification(mcs: MCS, strat: Stratification) -> bool:
    idx = strat.index()
    if sorted(idx) != sorted(mcs.names) or sum(map(len, strat.strata)) != mcs.n:
        return False
    return all(idx[c] < idx[r.target] for r in mcs.rules for c in r.body_contexts)


def grounded_equilibrium_stratified(mcs: MCS, ledger: Optional[CostLedger] = None,
                                    stratification: Optional[Stratification] = None) -> BeliefState:
    """Evaluate every context once, stratum by stratum (stratum 0 included)."""
    _require_definite(mcs)
    strat = stratify(mcs) if stratification is None else stratification
    if not is_stratification(mcs, strat):
        raise ContractError("not a stratification of this system")
    ledger = CostLedger() if ledger is None else ledger
    state = BeliefState.empty(mcs)
    for layer in strat.strata:
        for name in layer:
            kb = frozenset(r.head for r in mcs[name].rules if rule_satisfied(r, state))
            accepted = invoke_acc(mcs[name], kb, ledger, "stratified")
            if len(accepted) != 1:
                raise ContractError(f"context {name} returned {len(accepted)} belief sets")
            state = state.replace(**{name: next(iter(accepted))})
    return state


def is_stratifiable(mcs: MCS) -> bool:
    try:
        stratify(mcs)
    except CyclicError:
        return False
    return True


def grounded_equilibrium(mcs: MCS, ledger: Optional[CostLedger] = None) -> BeliefState:
    """Stratified evaluation when possible, fixpoint otherwise."""
    if is_stratifiable(mcs):
        return grounded_equilibrium_stratified(mcs, ledger)
    return grounded_equilibrium_fixpoint(mcs, ledger)


# -- reasoning -------------------------------------------------------------------

@dataclass
class QueryOutcome:
    entailed: bool
    mode: str
    context: str
    atom: str
    witness: Optional[BeliefState] = None
    vacuous: bool = False
    algorithm: str = ""


def _check_query(mcs, context, atom):
    if context not in mcs:
        raise ValidationError(f"unknown context {context}")
    if not atom:
        raise ValidationError("empty query atom")


def brave(mcs: MCS, context: str, atom: str, ledger: Optional[CostLedger] = None,
          max_rules: int = DEFAULT_MAX_RULES, search: bool = False) -> QueryOutcome:
    """True iff some equilibrium has ``atom`` in ``context``.

    Definite systems are answered from their grounded equilibrium unless
    ``search`` forces the guess-and-check path.
    """
    _check_query(mcs, context, atom)
    ledger = CostLedger() if ledger is None else ledger
    if not search and check_definite(mcs):
        state = grounded_equilibrium(mcs, ledger)
        hit = atom in state[context]
        return QueryOutcome(hit, "brave", context, atom, state if hit else None, algorithm="definite")
    for state in iter_equilibria(mcs, ledger, max_rules):
        if atom in state[context]:
            return QueryOutcome(True, "brave", context, atom, state, algorithm="general")
    return QueryOutcome(False, "brave", context, atom, algorithm="general")


def cautious(mcs: MCS, context: str, atom: str, ledger: Optional[CostLedger] = None,
             max_rules: int = DEFAULT_MAX_RULES, search: bool = False) -> QueryOutcome:
    """True iff every equilibrium has ``atom``; vacuously true when there is none.

    When false, ``witness`` is an equilibrium lacking the atom.
    """
    _check_query(mcs, context, atom)
    ledger = CostLedger() if ledger is None else ledger
    if not search and check_definite(mcs):
        state = grounded_equilibrium(mcs, ledger)
        hit = atom in state[context]
        return QueryOutcome(hit, "cautious", context, atom, None if hit else state, algorithm="definite")
    seen = False
    for state in iter_equilibria(mcs, ledger, max_rules):
        seen = True
        if atom not in state[context]:
            return QueryOutcome(False, "cautious", context, atom, state, algorithm="general")
    return QueryOutcome(True, "cautious", context, atom, vacuous=not seen, algorithm="general")

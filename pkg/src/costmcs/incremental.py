"""Incremental query answering for definite systems.

Supports of the query context are merged into a growing fragment one at a
time.  Each merge only re-evaluates the contexts that gained rules plus the
contexts reading from them (and seeds contexts never evaluated before), so
a query settled by an early support never pays for the rest of the system.
"""
from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .errors import ContractError, CyclicError, GuardExceeded, ValidationError
from .ledger import CostLedger
from .logics import invoke_acc
from .model import MCS, BeliefState, Fragment, rule_satisfied
from .solvers import check_definite, grounded_equilibrium_fixpoint, run_fixpoint, stratify
from .supports import Support, precisely_dependent_fragment, supports_of

SELECTIONS = ("declared-order", "cheapest")


def scope(fragment: Fragment, root: Optional[str] = None) -> frozenset[str]:
    """Contexts whose belief sets a fragment's equilibrium determines."""
    out = fragment.valid_contexts() | fragment.body_contexts()
    return out | {root} if root is not None else out


@dataclass(frozen=True)
class ExtensionPlan:
    union: Fragment
    recompute: frozenset[str]
    seed: frozenset[str]

    @property
    def evaluate(self) -> frozenset[str]:
        return self.recompute | self.seed


def plan_extension(mcs: MCS, done: Fragment, delta: Fragment,
                   evaluated: Optional[Iterable[str]] = None,
                   root: Optional[str] = None) -> ExtensionPlan:
    """Which contexts must run when ``delta`` is merged into ``done``.

    ``recompute``: targets of the new rules plus every context reading
    (transitively, through rules of the union) from them.  ``seed``: contexts
    the union needs that were never evaluated.
    """
    evaluated = scope(done) if evaluated is None else frozenset(evaluated)
    new = delta - done
    union = done | delta
    supp = precisely_dependent_fragment(mcs, new.valid_contexts(), within=union.rule_ids) | new
    recompute = supp.valid_contexts()
    seed = scope(union, root) - evaluated - recompute
    return ExtensionPlan(union, recompute, seed)


def _evaluation_order(mcs: MCS, names: frozenset[str], rule_ids: frozenset[str]):
    graph = {n: set() for n in names}
    for rid in rule_ids:
        r = mcs.rule(rid)
        if r.target in names:
            graph[r.target] |= r.body_contexts & names
    try:
        topo = list(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError:
        return None
    # stable: declaration order inside each topological layer
    level: dict[str, int] = {}
    for n in topo:
        level[n] = 1 + max((level[p] for p in graph[n]), default=-1)
    decl = {n: k for k, n in enumerate(mcs.names)}
    return sorted(names, key=lambda n: (level[n], decl[n]))


def _run_plan(mcs, plan: ExtensionPlan, s_done: BeliefState, ledger) -> BeliefState:
    names = plan.evaluate
    if not names:
        return s_done
    order = _evaluation_order(mcs, names, plan.union.rule_ids)
    if order is None:
        state, _ = run_fixpoint(mcs, ledger, rule_ids=plan.union.rule_ids, evaluate=names,
                                start=s_done, seed_kb=True, phase="incremental")
        return s_done | state
    state = s_done
    ids = plan.union.rule_ids
    for name in order:
        kb = frozenset(r.head for r in mcs[name].rules if r.id in ids and rule_satisfied(r, state))
        accepted = invoke_acc(mcs[name], kb, ledger, "incremental")
        if len(accepted) != 1:
            raise ContractError(f"context {name} returned {len(accepted)} belief sets")
        state = state.replace(**{name: next(iter(accepted))})
    return s_done | state


def _require_definite(mcs):
    check = check_definite(mcs)
    if not check:
        raise ContractError("incremental reasoning needs a definite system: " + "; ".join(check.diagnostics))


def extend_equilibrium(mcs: MCS, done: Fragment, s_done: BeliefState, delta: Fragment,
                       ledger: Optional[CostLedger] = None, *,
                       evaluated: Optional[Iterable[str]] = None,
                       root: Optional[str] = None) -> BeliefState:
    """Grounded equilibrium of ``done | delta`` from that of ``done``.

    ``s_done`` must be the grounded equilibrium of ``done`` on the contexts in
    ``evaluated`` (default: the contexts ``done`` touches).  Contexts outside
    the plan keep their ``s_done`` value and are not invoked.
    """
    _require_definite(mcs)
    if done.base is not mcs or delta.base is not mcs:
        raise ContractError("fragments must belong to the given system")
    mcs.check_state(s_done)
    ledger = CostLedger() if ledger is None else ledger
    plan = plan_extension(mcs, done, delta, evaluated, root)
    return _run_plan(mcs, plan, s_done, ledger)


def fragment_cost_estimate(mcs: MCS, done: Fragment, candidate, *,
                           evaluated: Optional[Iterable[str]] = None,
                           root: Optional[str] = None) -> Fraction:
    """Sum of max costs of the contexts merging ``candidate`` would evaluate."""
    try:
        stratify(mcs)
    except CyclicError as exc:
        raise ContractError(f"cost estimate needs a stratified system ({exc})") from None
    fragment = candidate.fragment if isinstance(candidate, Support) else candidate
    if fragment <= done:
        return Fraction(0)
    plan = plan_extension(mcs, done, fragment, evaluated, root)
    return sum((mcs[n].logic.max_cost for n in plan.evaluate), Fraction(0))


@dataclass
class IncrementalState:
    done: Fragment
    partial: BeliefState
    remaining: list[Support]
    evaluated: frozenset[str] = frozenset()


@dataclass
class IterationRecord:
    support: list[str]
    new_rules: list[str]
    recomputed: list[str]
    seeded: list[str]
    invocations: int
    cost: Fraction
    entailed: bool

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["cost"] = f"{self.cost.numerator}/{self.cost.denominator}"
        return d


@dataclass
class IncrementalResult:
    entailed: bool
    state: BeliefState
    iterations: list[IterationRecord] = field(default_factory=list)
    fallback: bool = False
    evaluated: frozenset[str] = frozenset()


def incremental_run(mcs: MCS, context: str, atom: str, selection: str = "declared-order",
                    ledger: Optional[CostLedger] = None, *, cap: Optional[int] = None,
                    on_iteration: Optional[Callable[[IncrementalState], None]] = None) -> IncrementalResult:
    """Merge supports of ``context`` until ``atom`` shows up or none remain.

    ``on_iteration`` sees the state after every merge (used to audit that the
    partial state is the grounded equilibrium of the merged fragment).  When
    the supports cap is exceeded the whole system is solved by the fixpoint
    instead and a note is left in the ledger.
    """
    if selection not in SELECTIONS:
        raise ValidationError(f"unknown selection {selection!r}; expected one of {SELECTIONS}")
    _require_definite(mcs)
    mcs[context]
    ledger = CostLedger() if ledger is None else ledger
    try:
        remaining = list(supports_of(mcs, context, cap))
    except GuardExceeded as exc:
        ledger.note(f"warning: {exc}; falling back to the full fixpoint")
        state = grounded_equilibrium_fixpoint(mcs, ledger)
        return IncrementalResult(atom in state[context], state, fallback=True,
                                 evaluated=frozenset(mcs.names))
    if selection == "cheapest":
        try:
            stratify(mcs)
        except CyclicError as exc:
            raise ContractError(f"cheapest selection needs a stratified system ({exc})") from None

    st = IncrementalState(mcs.empty_fragment(), BeliefState.empty(mcs), remaining)
    result = IncrementalResult(False, st.partial)
    while st.remaining:
        if selection == "cheapest":
            costs = [fragment_cost_estimate(mcs, st.done, s, evaluated=st.evaluated, root=context)
                     for s in st.remaining]
            pick = costs.index(min(costs))
        else:
            pick = 0
        support = st.remaining.pop(pick)
        plan = plan_extension(mcs, st.done, support.fragment, st.evaluated, context)
        mark = ledger.mark()
        st.partial = _run_plan(mcs, plan, st.partial, ledger)
        spent = ledger.since(mark)
        new_rules = (support.fragment - st.done).sorted_ids()
        st.done = plan.union
        st.evaluated = st.evaluated | plan.evaluate
        hit = atom in st.partial[context]
        result.iterations.append(IterationRecord(
            support.fragment.sorted_ids(), new_rules,
            [n for n in mcs.names if n in plan.recompute],
            [n for n in mcs.names if n in plan.seed],
            spent.count(), spent.total(), hit))
        if on_iteration is not None:
            on_iteration(st)
        if hit:
            result.entailed = True
            break
    result.state = st.partial
    result.evaluated = st.evaluated
    return result


def incremental_query(mcs: MCS, context: str, atom: str, selection: str = "declared-order",
                      ledger: Optional[CostLedger] = None, cap: Optional[int] = None) -> bool:
    return incremental_run(mcs, context, atom, selection, ledger, cap=cap).entailed

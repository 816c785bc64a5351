"""Syntactic dependency analysis for definite systems.

Supports are the syntactic side (which rules could feed a context),
justifications the semantic side (which rules actually produce its belief
set in the grounded equilibrium).  Both are exponential to enumerate; every
enumeration here takes an explicit cap.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import ContractError, GuardExceeded
from .ledger import CostLedger
from .model import MCS, BeliefState, Context, Fragment, rule_satisfied
from .solvers import check_definite, grounded_equilibrium_fixpoint, run_fixpoint

DEFAULT_SUPPORTS_CAP = 256
DEFAULT_JUSTIFICATION_GUARD = 12


def supports_cap_from_env(default: int = DEFAULT_SUPPORTS_CAP) -> int:
    raw = os.environ.get("MCS_SUPPORTS_CAP")
    if not raw:
        return default
    value = int(raw)
    if value <= 0:
        raise ValueError("MCS_SUPPORTS_CAP must be positive")
    return value


def input_signature(ctx: Context) -> frozenset[str]:
    return frozenset(r.head for r in ctx.rules)


@dataclass(frozen=True)
class ImmediateRuleSupport:
    context: str
    rules: frozenset[str]


def immediate_rule_supports(ctx: Context) -> list[ImmediateRuleSupport]:
    """One rule per head literal, every combination; [empty] for a rule-less context."""
    by_head: dict[str, list[str]] = {}
    for r in ctx.rules:
        by_head.setdefault(r.head, []).append(r.id)
    heads = sorted(by_head)
    return [ImmediateRuleSupport(ctx.name, frozenset(choice))
            for choice in itertools.product(*(by_head[h] for h in heads))]


@dataclass(frozen=True)
class Support:
    fragment: Fragment
    root: str

    @property
    def rule_ids(self) -> frozenset[str]:
        return self.fragment.rule_ids


@dataclass
class SupportSet:
    root: str
    supports: list[Support] = field(default_factory=list)

    @property
    def supporting_contexts(self) -> frozenset[str]:
        """Contexts owning rules in at least one support."""
        out: set[str] = set()
        for s in self.supports:
            out |= s.fragment.valid_contexts()
        return frozenset(out)

    @property
    def supporting_rules(self) -> frozenset[str]:
        out: set[str] = set()
        for s in self.supports:
            out |= s.rule_ids
        return frozenset(out)

    def __len__(self):
        return len(self.supports)

    def __iter__(self):
        return iter(self.supports)


def _require_definite(mcs):
    check = check_definite(mcs)
    if not check:
        raise ContractError("supports are defined for definite systems only: " + "; ".join(check.diagnostics))


def supports_of(mcs: MCS, context: str, cap: Optional[int] = None) -> SupportSet:
    """Enumerate all supports of ``context``.

    A support fixes one immediate rule support for each context reachable
    from ``context`` through the chosen rules' bodies; a context reached twice
    keeps its first choice, otherwise its rule set would not be minimal.
    Raises :class:`GuardExceeded` past ``cap`` supports.
    """
    _require_definite(mcs)
    cap = supports_cap_from_env() if cap is None else cap
    mcs[context]
    order = {name: k for k, name in enumerate(mcs.names)}
    immediate = {c.name: immediate_rule_supports(c) for c in mcs.contexts}
    result = SupportSet(context)
    seen: set[frozenset[str]] = set()

    def expand(assigned: dict[str, frozenset[str]], pending: tuple[str, ...]):
        if not pending:
            ids = frozenset().union(*assigned.values())
            if ids not in seen:
                seen.add(ids)
                if len(result.supports) >= cap:
                    raise GuardExceeded(f"more than {cap} supports for context {context}")
                result.supports.append(Support(Fragment(mcs, ids), context))
            return
        name, rest = pending[0], pending[1:]
        if name in assigned:
            expand(assigned, rest)
            return
        for irs in immediate[name]:
            refs = set()
            for rid in irs.rules:
                refs |= mcs.rule(rid).body_contexts
            new = sorted((r for r in refs if r not in assigned and r not in pending and r != name),
                         key=order.__getitem__)
            expand({**assigned, name: irs.rules}, rest + tuple(new))

    expand({}, (context,))
    return result


def is_support(mcs: MCS, root: str, fragment: Fragment, max_rules: int = 16) -> bool:
    """Check the three support conditions directly, independent of the enumerator.

    Minimality is checked against every proper subset: dropping a single rule
    is not enough, since a cycle of rules can keep itself covered.
    """

    def covered(name, ids):
        return {mcs.rule(i).head for i in ids & mcs[name].rule_ids} >= input_signature(mcs[name])

    def conditions_hold(ids):
        needed = {root}
        for i in ids:
            needed |= mcs.rule(i).body_contexts
        return all(covered(name, ids) for name in needed)

    ids = fragment.rule_ids
    if not conditions_hold(ids):
        return False
    if len(ids) > max_rules:
        raise GuardExceeded(f"fragment of {len(ids)} rules exceeds the support-check guard of {max_rules}")
    members = sorted(ids)
    return not any(conditions_hold(frozenset(sub))
                   for k in range(len(members))
                   for sub in itertools.combinations(members, k))


# -- dependence ----------------------------------------------------------------

def dependent_fragment(mcs: MCS, context: str, within: Optional[Iterable[str]] = None) -> Fragment:
    """Every rule (transitively) reading from ``context``.

    ``within`` restricts the candidate rules, e.g. to the rules of a fragment.
    """
    mcs[context]
    pool = [r for r in mcs.rules if within is None or r.id in set(within)]
    ids: set[str] = set()
    frontier = [context]
    visited = set()
    while frontier:
        c = frontier.pop()
        if c in visited:
            continue
        visited.add(c)
        for r in pool:
            if c in r.body_contexts and r.id not in ids:
                ids.add(r.id)
                frontier.append(r.target)
    return Fragment(mcs, frozenset(ids))


def precisely_dependent_fragment(mcs: MCS, contexts: Iterable[str],
                                 within: Optional[Iterable[str]] = None) -> Fragment:
    within = None if within is None else frozenset(within)
    out = mcs.empty_fragment()
    for c in contexts:
        out = out | dependent_fragment(mcs, c, within)
    return out


# -- justifications -------------------------------------------------------------

def fragment_equilibrium(mcs: MCS, rule_ids: Iterable[str], ledger: CostLedger,
                         phase: str = "justification") -> BeliefState:
    state, _ = run_fixpoint(mcs, ledger, rule_ids=frozenset(rule_ids), phase=phase)
    return state


def _reproduces(mcs, state, context, ids, ledger, memo):
    if ids not in memo:
        sub = fragment_equilibrium(mcs, ids, ledger)
        memo[ids] = sub[context] == state[context] and sub <= state
    return memo[ids]


def is_justification(mcs: MCS, state: BeliefState, context: str, fragment: Fragment,
                     ledger: Optional[CostLedger] = None,
                     max_rules: int = DEFAULT_JUSTIFICATION_GUARD) -> bool:
    """Does ``fragment`` minimally reproduce ``state[context]``?

    Grounded equilibria grow with the fragment, so a fragment is minimal as
    soon as no single-rule removal still reproduces the belief set.
    """
    _require_definite(mcs)
    if len(fragment) > max_rules:
        raise GuardExceeded(f"fragment of {len(fragment)} rules exceeds the guard of {max_rules}")
    ledger = CostLedger() if ledger is None else ledger
    memo: dict = {}
    ids = fragment.rule_ids
    if not _reproduces(mcs, state, context, ids, ledger, memo):
        return False
    return not any(_reproduces(mcs, state, context, ids - {r}, ledger, memo) for r in ids)


def all_justifications(mcs: MCS, state: BeliefState, ledger: Optional[CostLedger] = None,
                       max_rules: int = DEFAULT_JUSTIFICATION_GUARD) -> dict[str, list[Fragment]]:
    """Brute force: every minimal rule subset reproducing each context's belief set."""
    _require_definite(mcs)
    if mcs.m > max_rules:
        raise GuardExceeded(f"{mcs.m} rules exceed the justification guard of {max_rules}")
    ledger = CostLedger() if ledger is None else ledger
    ids = sorted(mcs.rule_ids)
    eqs = {}
    for size in range(len(ids) + 1):
        for subset in itertools.combinations(ids, size):
            eqs[frozenset(subset)] = fragment_equilibrium(mcs, subset, ledger)
    out = {}
    for name in mcs.names:
        good = [s for s, eq in eqs.items() if eq[name] == state[name] and eq <= state]
        minimal = [s for s in good if not any(o < s for o in good)]
        out[name] = [Fragment(mcs, s) for s in minimal]
    return out


@dataclass
class Prop3Check:
    ok: bool
    counterexample: Optional[tuple[str, Fragment]] = None

    def __bool__(self):
        return self.ok


def check_prop3(mcs: MCS, ledger: Optional[CostLedger] = None,
                max_rules: int = DEFAULT_JUSTIFICATION_GUARD,
                cap: Optional[int] = None) -> Prop3Check:
    """Every justification of every belief set lies inside some support of its
    context, and all its rules are satisfied in the grounded equilibrium."""
    ledger = CostLedger() if ledger is None else ledger
    state = grounded_equilibrium_fixpoint(mcs, ledger)
    justs = all_justifications(mcs, state, ledger, max_rules)
    for name in mcs.names:
        supps = supports_of(mcs, name, cap)
        for just in justs[name]:
            inside = any(just.rule_ids <= s.rule_ids for s in supps)
            satisfied = all(rule_satisfied(r, state) for r in just.rules)
            if not (inside and satisfied):
                return Prop3Check(False, (name, just))
    return Prop3Check(True)

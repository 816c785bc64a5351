"""Multi-context system data model: rules, contexts, belief states, fragments.

Atoms are plain strings compared by exact equality; belief sets and
knowledge bases are ``frozenset`` of atoms.  All types are immutable once
built, so they can be shared freely between solvers (and threads).
"""
from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Optional

from .errors import FragmentError, ValidationError
from .logics import LogicSuite, invoke_acc

_ATOM_RE = re.compile(r"\S+")

BodyLiteral = tuple[str, str]  # (context name, atom)


def check_atom(atom: str, what: str = "atom") -> str:
    if not isinstance(atom, str) or not _ATOM_RE.fullmatch(atom):
        raise ValidationError(f"invalid {what} {atom!r}: must be a non-empty string without whitespace")
    return atom


@dataclass(frozen=True)
class BridgeRule:
    """``target.head <- (c:p), ..., not (c:p), ...``"""

    id: str
    target: str
    head: str
    positive: frozenset[BodyLiteral] = frozenset()
    negative: frozenset[BodyLiteral] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "positive", frozenset(self.positive))
        object.__setattr__(self, "negative", frozenset(self.negative))
        check_atom(self.id, "rule id")
        check_atom(self.target, "context name")
        check_atom(self.head)
        for ctx, atom in self.positive | self.negative:
            check_atom(ctx, "context name")
            check_atom(atom)
        both = self.positive & self.negative
        if both:
            ctx, atom = sorted(both)[0]
            raise ValidationError(f"rule {self.id}: ({ctx}:{atom}) occurs both positively and negated")

    @property
    def body_contexts(self) -> frozenset[str]:
        return frozenset(c for c, _ in self.positive | self.negative)

    def __str__(self):
        parts = [f"({c}:{p})" for c, p in sorted(self.positive)]
        parts += [f"not ({c}:{p})" for c, p in sorted(self.negative)]
        return f"{self.id}: {self.target}.{self.head} <- {', '.join(parts)}"


@dataclass(frozen=True)
class Context:
    name: str
    logic: LogicSuite
    rules: tuple[BridgeRule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        check_atom(self.name, "context name")
        for r in self.rules:
            if r.target != self.name:
                raise ValidationError(f"rule {r.id} targets {r.target} but is attached to context {self.name}")

    @property
    def rule_ids(self) -> frozenset[str]:
        return frozenset(r.id for r in self.rules)


class MCS:
    """An ordered collection of uniquely named contexts.

    Every context reference in every rule is resolved once here; rule ids
    must be unique across the whole system.
    """

    def __init__(self, contexts: Iterable[Context] = ()):
        self.contexts: tuple[Context, ...] = tuple(contexts)
        self._by_name: dict[str, Context] = {}
        self._rules: dict[str, BridgeRule] = {}
        for ctx in self.contexts:
            if ctx.name in self._by_name:
                raise ValidationError(f"duplicate context name {ctx.name}")
            self._by_name[ctx.name] = ctx
        for ctx in self.contexts:
            for r in ctx.rules:
                if r.id in self._rules:
                    raise ValidationError(f"duplicate rule id {r.id}")
                for ref in r.body_contexts:
                    if ref not in self._by_name:
                        raise ValidationError(f"rule {r.id}: unresolved context {ref}")
                self._rules[r.id] = r

    # -- lookup ---------------------------------------------------------
    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.contexts)

    def __getitem__(self, name: str) -> Context:
        try:
            return self._by_name[name]
        except KeyError:
            raise ValidationError(f"unknown context {name}") from None

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def __len__(self):
        return len(self.contexts)

    @property
    def rules(self) -> tuple[BridgeRule, ...]:
        """R(M), in declaration order."""
        return tuple(self._rules.values())

    @property
    def rule_ids(self) -> frozenset[str]:
        return frozenset(self._rules)

    def rule(self, rule_id: str) -> BridgeRule:
        try:
            return self._rules[rule_id]
        except KeyError:
            raise ValidationError(f"unknown rule id {rule_id}") from None

    @property
    def n(self) -> int:
        return len(self.contexts)

    @property
    def m(self) -> int:
        return len(self._rules)

    def __eq__(self, other):
        if not isinstance(other, MCS):
            return NotImplemented
        return self.contexts == other.contexts

    def __hash__(self):
        return hash(self.contexts)

    def __repr__(self):
        return f"MCS(n={self.n}, m={self.m}, contexts={list(self.names)})"

    def full_fragment(self) -> "Fragment":
        return Fragment(self, self.rule_ids)

    def empty_fragment(self) -> "Fragment":
        return Fragment(self, frozenset())

    def check_state(self, state: "BeliefState") -> None:
        if set(state) != set(self.names):
            raise ValidationError(
                f"belief state keys {sorted(state)} do not match contexts {sorted(self.names)}"
            )


class BeliefState(Mapping):
    """One belief set per context, keyed by context name.

    Set operations act componentwise; ``a <= b`` is componentwise inclusion.
    """

    __slots__ = ("_sets",)

    def __init__(self, sets: Mapping[str, Iterable[str]]):
        self._sets = {name: frozenset(bs) for name, bs in sets.items()}

    @classmethod
    def empty(cls, mcs: MCS) -> "BeliefState":
        return cls({name: () for name in mcs.names})

    def __getitem__(self, name):
        return self._sets[name]

    def __iter__(self):
        return iter(self._sets)

    def __len__(self):
        return len(self._sets)

    def __hash__(self):
        return hash(frozenset(self._sets.items()))

    def __eq__(self, other):
        if not isinstance(other, Mapping):
            return NotImplemented
        return self._sets == {k: frozenset(v) for k, v in other.items()}

    def _zip(self, other, op):
        if set(self) != set(other):
            raise ValidationError("belief states over different contexts")
        return BeliefState({k: op(v, other[k]) for k, v in self._sets.items()})

    def __or__(self, other):
        return self._zip(other, frozenset.union)

    def __and__(self, other):
        return self._zip(other, frozenset.intersection)

    def __sub__(self, other):
        return self._zip(other, frozenset.difference)

    def __le__(self, other):
        if set(self) != set(other):
            raise ValidationError("belief states over different contexts")
        return all(v <= other[k] for k, v in self._sets.items())

    def replace(self, **updates: Iterable[str]) -> "BeliefState":
        sets = dict(self._sets)
        for k, v in updates.items():
            if k not in sets:
                raise ValidationError(f"unknown context {k}")
            sets[k] = frozenset(v)
        return BeliefState(sets)

    def updated(self, updates: Mapping[str, Iterable[str]]) -> "BeliefState":
        return self.replace(**updates)

    def as_dict(self) -> dict[str, list[str]]:
        return {k: sorted(v) for k, v in self._sets.items()}

    def __repr__(self):
        inner = ", ".join(f"{k}: {{{', '.join(sorted(v))}}}" for k, v in self._sets.items())
        return f"BeliefState({inner})"


@dataclass(frozen=True)
class Fragment:
    """A sub-system of ``base`` sharing its logics but keeping only ``rule_ids``.

    Rule ids are unique across a system, so a single id set determines the
    per-context rule sets exactly.
    """

    base: MCS = field(compare=False, repr=False)
    rule_ids: frozenset[str] = frozenset()

    def __post_init__(self):
        ids = frozenset(self.rule_ids)
        object.__setattr__(self, "rule_ids", ids)
        unknown = ids - self.base.rule_ids
        if unknown:
            raise ValidationError(f"fragment refers to unknown rules {sorted(unknown)}")

    def __eq__(self, other):
        if not isinstance(other, Fragment):
            return NotImplemented
        return self.base is other.base and self.rule_ids == other.rule_ids

    def __hash__(self):
        return hash(self.rule_ids)

    def _same_base(self, other: "Fragment"):
        if self.base is not other.base:
            raise FragmentError("fragments of different systems")

    def rules_for(self, context: str) -> frozenset[str]:
        return self.base[context].rule_ids & self.rule_ids

    @property
    def rules(self) -> list[BridgeRule]:
        return [r for r in self.base.rules if r.id in self.rule_ids]

    def __or__(self, other: "Fragment") -> "Fragment":
        self._same_base(other)
        return Fragment(self.base, self.rule_ids | other.rule_ids)

    def __sub__(self, other: "Fragment") -> "Fragment":
        self._same_base(other)
        return Fragment(self.base, self.rule_ids - other.rule_ids)

    def __and__(self, other: "Fragment") -> "Fragment":
        self._same_base(other)
        return Fragment(self.base, self.rule_ids & other.rule_ids)

    def __le__(self, other: "Fragment") -> bool:
        self._same_base(other)
        return self.rule_ids <= other.rule_ids

    def __lt__(self, other: "Fragment") -> bool:
        self._same_base(other)
        return self.rule_ids < other.rule_ids

    def __len__(self):
        return len(self.rule_ids)

    def valid_contexts(self) -> frozenset[str]:
        """Contexts owning at least one rule of the fragment."""
        return frozenset(self.base.rule(i).target for i in self.rule_ids)

    def body_contexts(self) -> frozenset[str]:
        out: set[str] = set()
        for i in self.rule_ids:
            out |= self.base.rule(i).body_contexts
        return frozenset(out)

    def sorted_ids(self) -> list[str]:
        order = {r.id: k for k, r in enumerate(self.base.rules)}
        return sorted(self.rule_ids, key=order.__getitem__)

    def __repr__(self):
        return f"Fragment({{{', '.join(self.sorted_ids())}}})"


def fragment_union(f1: Fragment, f2: Fragment) -> Fragment:
    return f1 | f2


def fragment_difference(f1: Fragment, f2: Fragment) -> Fragment:
    return f1 - f2


def is_subfragment(f1: Fragment, f2: Fragment) -> bool:
    return f1 <= f2


def valid_contexts(f: Fragment) -> frozenset[str]:
    return f.valid_contexts()


# -- satisfaction and equilibria ---------------------------------------------

def rule_satisfied(rule: BridgeRule, state: Mapping[str, frozenset]) -> bool:
    try:
        return all(p in state[c] for c, p in rule.positive) and not any(
            p in state[c] for c, p in rule.negative
        )
    except KeyError as exc:
        raise ValidationError(f"rule {rule.id}: unresolved context {exc.args[0]}") from None


def satisfied_rules(mcs: MCS, state: Mapping[str, frozenset], rule_ids=None) -> frozenset[str]:
    rules = mcs.rules if rule_ids is None else (mcs.rule(i) for i in rule_ids)
    return frozenset(r.id for r in rules if rule_satisfied(r, state))


def induced_knowledge_bases(mcs: MCS, state: BeliefState) -> dict[str, frozenset[str]]:
    """kb_i = heads of the rules of C_i satisfied in ``state``."""
    mcs.check_state(state)
    return {
        ctx.name: frozenset(r.head for r in ctx.rules if rule_satisfied(r, state))
        for ctx in mcs.contexts
    }


def knowledge_bases_from_guess(mcs: MCS, guessed: Iterable[str]) -> dict[str, frozenset[str]]:
    """kb_i = heads of the guessed rules owned by C_i."""
    guessed = frozenset(guessed)
    unknown = guessed - mcs.rule_ids
    if unknown:
        raise ValidationError(f"unknown rule ids {sorted(unknown)}")
    kbs: dict[str, set[str]] = {name: set() for name in mcs.names}
    for rid in guessed:
        r = mcs.rule(rid)
        kbs[r.target].add(r.head)
    return {k: frozenset(v) for k, v in kbs.items()}


def is_equilibrium(mcs: MCS, state: BeliefState, ledger, diagnostics: Optional[list] = None,
                   phase: str = "check") -> bool:
    """True iff every S_i is acceptable for the knowledge base induced by ``state``.

    Charges ``ledger`` once per context.  A context whose operator yields no
    acceptable belief set makes the check fail; the reason is appended to
    ``diagnostics`` when a list is supplied.
    """
    kbs = induced_knowledge_bases(mcs, state)
    ok = True
    for ctx in mcs.contexts:
        accepted = invoke_acc(ctx, kbs[ctx.name], ledger, phase)
        if not accepted:
            ok = False
            if diagnostics is not None:
                diagnostics.append(
                    f"{ctx.name}: no acceptable belief set for kb {{{', '.join(sorted(kbs[ctx.name]))}}}"
                )
        elif state[ctx.name] not in accepted:
            ok = False
            if diagnostics is not None:
                diagnostics.append(f"{ctx.name}: belief set not acceptable for its induced kb")
    return ok

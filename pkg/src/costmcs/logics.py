"""Logic suites: the semantic operators contexts are built from.

A suite maps a knowledge base (frozenset of atoms) to a set of acceptable
belief sets and charges a cost per invocation.  Two suites ship: a monotone
Horn suite and an explicit lookup table.  Every solver reaches an operator
only through :func:`invoke_acc`, which is where the ledger is charged.
"""
from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import ValidationError

Cost = Union[int, str, Fraction, float]

INCONSISTENT = "inconsistent"
EMPTY = "empty"


def to_fraction(value: Cost) -> Fraction:
    """Parse a cost given as int, Fraction, ``"2/3"``, ``"2.5"`` or float."""
    if isinstance(value, float):
        value = repr(value)
    try:
        out = Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ValidationError(f"invalid cost {value!r}") from exc
    if out < 0:
        raise ValidationError(f"negative cost {value!r}")
    return out


class LogicSuite(ABC):
    """Abstract (KB, BS, ACC, cost) quadruple."""

    @abstractmethod
    def acc(self, kb: frozenset[str]) -> frozenset[frozenset[str]]:
        """Acceptable belief sets for ``kb``; empty when none is acceptable."""

    @abstractmethod
    def cost(self, kb: frozenset[str]) -> Fraction:
        """Cost of one invocation of :meth:`acc` on ``kb``."""

    @property
    @abstractmethod
    def max_cost(self) -> Fraction:
        ...

    @property
    def constant_cost(self) -> Optional[Fraction]:
        """The cost if it does not depend on the kb, else None."""
        return None

    @property
    def monotone(self) -> bool:
        return False

    @property
    def kind(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class Clause:
    head: str
    body: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(self.body)}."


@dataclass(frozen=True)
class HornSuite(LogicSuite):
    """Least model of a built-in definite program extended with the kb as facts."""

    program: tuple[Clause, ...] = ()
    unit_cost: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "program", tuple(self.program))
        object.__setattr__(self, "unit_cost", to_fraction(self.unit_cost))

    def acc(self, kb):
        return frozenset([least_model(self.program, kb)])

    def cost(self, kb):
        return self.unit_cost

    @property
    def max_cost(self):
        return self.unit_cost

    @property
    def constant_cost(self):
        return self.unit_cost

    @property
    def monotone(self):
        return True

    @property
    def kind(self):
        return "horn"

    def atoms(self) -> frozenset[str]:
        return frozenset(itertools.chain.from_iterable((c.head, *c.body) for c in self.program))


def least_model(program: Iterable[Clause], facts: Iterable[str]) -> frozenset[str]:
    """Naive forward chaining to the least fixpoint."""
    model = set(facts)
    program = tuple(program)
    changed = True
    while changed:
        changed = False
        for clause in program:
            if clause.head not in model and all(b in model for b in clause.body):
                model.add(clause.head)
                changed = True
    return frozenset(model)


def horn_acc(suite: HornSuite, kb: Iterable[str]) -> frozenset[frozenset[str]]:
    return suite.acc(frozenset(kb))


@dataclass(frozen=True)
class TableSuite(LogicSuite):
    """ACC given extensionally: kb -> list of acceptable belief sets.

    Lookup is by set equality.  A kb missing from the table yields no
    acceptable belief set (``default="inconsistent"``) or the single empty
    belief set (``default="empty"``).
    """

    entries: tuple[tuple[frozenset[str], tuple[frozenset[str], ...]], ...] = ()
    default: str = INCONSISTENT
    unit_cost: Fraction = Fraction(1)
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        raw = self.entries.items() if isinstance(self.entries, Mapping) else self.entries
        lookup: dict[frozenset[str], frozenset[frozenset[str]]] = {}
        canon = []
        for kb, alternatives in raw:
            kb = frozenset(kb)
            if kb in lookup:
                raise ValidationError(f"duplicate table entry for kb {sorted(kb)}")
            alts = tuple(sorted({frozenset(a) for a in alternatives}, key=_set_key))
            lookup[kb] = frozenset(alts)
            canon.append((kb, alts))
        canon.sort(key=lambda e: _set_key(e[0]))
        if self.default not in (INCONSISTENT, EMPTY):
            raise ValidationError(f"unknown table default {self.default!r}")
        object.__setattr__(self, "entries", tuple(canon))
        object.__setattr__(self, "unit_cost", to_fraction(self.unit_cost))
        object.__setattr__(self, "_lookup", lookup)

    def acc(self, kb):
        try:
            return self._lookup[frozenset(kb)]
        except KeyError:
            if self.default == EMPTY:
                return frozenset([frozenset()])
            return frozenset()

    def cost(self, kb):
        return self.unit_cost

    @property
    def max_cost(self):
        return self.unit_cost

    @property
    def constant_cost(self):
        return self.unit_cost

    @property
    def monotone(self):
        return verify_monotone(self)

    @property
    def kind(self):
        return "table"

    def atoms(self) -> frozenset[str]:
        out: set[str] = set()
        for kb, alts in self.entries:
            out |= kb
            for a in alts:
                out |= a
        return frozenset(out)


def _set_key(s: frozenset[str]):
    return (len(s), sorted(s))


def table_acc(suite: TableSuite, kb: Iterable[str]) -> frozenset[frozenset[str]]:
    return suite.acc(frozenset(kb))


def verify_monotone(suite: TableSuite) -> bool:
    """Singleton results, and kb <= kb' implies S <= S', over the declared entries."""
    single = {}
    for kb, alts in suite.entries:
        if len(alts) != 1:
            return False
        single[kb] = alts[0]
    return all(single[a] <= single[b] for a in single for b in single if a <= b)


def invoke_acc(context, kb: Iterable[str], ledger, phase: str = "") -> frozenset[frozenset[str]]:
    """Run ``context.logic.acc`` on ``kb`` and charge one ledger record."""
    kb = frozenset(kb)
    suite = context.logic
    ledger.record(context.name, len(kb), suite.cost(kb), phase)
    return suite.acc(kb)

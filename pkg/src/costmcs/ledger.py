"""Append-only accounting of semantic-operator invocations and bound reports."""
from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import ContractError, ValidationError

ALGORITHMS = ("general", "fixpoint", "stratified", "incremental-relevant")


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


@dataclass(frozen=True)
class InvocationRecord:
    seq: int
    context: str
    kb_size: int
    cost: Fraction
    phase: str = ""

    def to_json(self) -> dict:
        return {
            "seq": self.seq,
            "context": self.context,
            "kb_size": self.kb_size,
            "cost": fraction_str(self.cost),
            "phase": self.phase,
        }


class CostLedger:
    """Thread-safe append-only list of :class:`InvocationRecord`.

    ``notes`` carries non-invocation events (e.g. a fallback warning); they
    never count towards :meth:`count` or :meth:`total`.
    """

    def __init__(self, records: Iterable[InvocationRecord] = ()):
        self._lock = threading.Lock()
        self._records: list[InvocationRecord] = list(records)
        self.notes: list[str] = []

    def record(self, context: str, kb_size: int, cost, phase: str = "") -> InvocationRecord:
        cost = Fraction(cost)
        if cost < 0:
            raise ContractError(f"negative cost {cost} for {context}")
        if kb_size < 0:
            raise ContractError(f"negative kb size {kb_size}")
        with self._lock:
            rec = InvocationRecord(len(self._records), context, kb_size, cost, phase)
            self._records.append(rec)
        return rec

    def note(self, message: str) -> None:
        with self._lock:
            self.notes.append(message)

    @property
    def records(self) -> tuple[InvocationRecord, ...]:
        with self._lock:
            return tuple(self._records)

    def __len__(self):
        return self.count()

    def count(self) -> int:
        with self._lock:
            return len(self._records)

    def total(self) -> Fraction:
        return sum((r.cost for r in self.records), Fraction(0))

    def mark(self) -> int:
        """Position to pass to :meth:`since` later."""
        return self.count()

    def since(self, mark: int) -> "CostLedger":
        """A detached ledger holding the records appended after ``mark``."""
        return CostLedger(self.records[mark:])

    def contexts(self) -> list[str]:
        return [r.context for r in self.records]

    def count_by_context(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.records:
            out[r.context] = out.get(r.context, 0) + 1
        return out

    def summary(self) -> dict:
        return {"count": self.count(), "total": fraction_str(self.total())}

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_json()) + "\n" for r in self.records)

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def from_jsonl(cls, text: str) -> "CostLedger":
        records = []
        for line in text.splitlines():
            if not line.strip():
                continue
            d = json.loads(line)
            records.append(InvocationRecord(d["seq"], d["context"], d["kb_size"],
                                            parse_fraction(d["cost"]), d.get("phase", "")))
        return cls(records)


def record(ledger: CostLedger, context: str, kb_size: int, cost, phase: str = "") -> CostLedger:
    ledger.record(context, kb_size, cost, phase)
    return ledger


def is_uniform_cost(mcs) -> bool:
    return all(ctx.logic.max_cost == 1 and ctx.logic.constant_cost == 1 for ctx in mcs.contexts)


def max_context_cost(mcs, names: Optional[Iterable[str]] = None) -> Fraction:
    names = mcs.names if names is None else names
    return max((mcs[n].logic.max_cost for n in names), default=Fraction(0))


@dataclass
class BoundReport:
    algorithm: str
    n: int
    m: int
    c: Fraction
    observed_count: int
    observed_cost: Fraction
    bound_count: int
    bound_cost: Fraction
    within_bound: bool
    annotations: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = asdict(self)
        for k in ("c", "observed_cost", "bound_cost"):
            d[k] = fraction_str(d[k])
        return d


def bound_report(mcs, ledger: CostLedger, algorithm: str, context: Optional[str] = None,
                 k: Optional[int] = None, supports_cap: Optional[int] = None) -> BoundReport:
    """Compare a run's ledger with the worst-case bound of ``algorithm``.

    Bounds on invocation counts: general n*2^m, fixpoint n*(m+1),
    stratified n, incremental-relevant |C(ctx)|*|R(ctx)| over the supports
    of ``context``.  The cost bound is c times the count bound.  Whether the
    ledger really came from ``algorithm`` on ``mcs`` cannot be detected.
    """
    n, m = mcs.n, mcs.m
    c = max_context_cost(mcs)
    notes: dict = {}
    if algorithm == "general":
        bound = n * 2 ** m
    elif algorithm == "fixpoint":
        bound = n * (m + 1)
        notes["nm_bound"] = n * m
        notes["within_nm"] = ledger.count() <= n * m
        notes["optimized_bound"] = n + n * m
        # without skipping, the loop needs up to m + 2 sweeps: the first one,
        # one per newly fired rule, and the one confirming nothing changed
        notes["raw_bound"] = n * (m + 2)
    elif algorithm == "stratified":
        bound = n
    elif algorithm == "incremental-relevant":
        if context is None:
            raise ContractError("incremental-relevant bound needs the query context")
        from .supports import supports_of

        kwargs = {} if supports_cap is None else {"cap": supports_cap}
        info = supports_of(mcs, context, **kwargs)
        bound = len(info.supporting_contexts) * len(info.supporting_rules)
        c = max_context_cost(mcs, info.supporting_contexts)
        notes["supporting_contexts"] = sorted(info.supporting_contexts)
        notes["supporting_rules"] = sorted(info.supporting_rules)
        # Contexts without bridge rules are outside C(ctx) but still have to
        # be evaluated once for their belief sets, so report both views.
        owners = [r for r in ledger.records if r.context in info.supporting_contexts]
        seeded = {context}.union(*(s.fragment.body_contexts() for s in info)) - info.supporting_contexts
        seeded_bound = (len(info.supporting_contexts) + len(seeded)) * max(1, len(info.supporting_rules))
        notes["rule_owner_invocations"] = len(owners)
        notes["within_bound_rule_owners"] = (
            len(owners) <= bound and sum((r.cost for r in owners), Fraction(0)) <= c * bound)
        notes["seeded_contexts"] = sorted(seeded)
        notes["seeded_bound"] = seeded_bound
        notes["within_seeded_bound"] = ledger.count() <= seeded_bound
    else:
        raise ValidationError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    if k is not None:
        notes["bounded_rules"] = {"k": k, "holds": m <= k * n}
    count, total = ledger.count(), ledger.total()
    bound_cost = c * bound
    return BoundReport(algorithm, n, m, c, count, total, bound, bound_cost,
                       count <= bound and total <= bound_cost, notes)

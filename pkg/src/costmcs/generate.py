"""Seeded random systems for property tests and benchmarks."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ValidationError
from .logics import Clause, HornSuite, to_fraction
from .model import MCS, BridgeRule, Context

KINDS = ("layered", "chain", "diamond-forest", "general-random")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n_contexts: int
    n_rules: int
    negation_rate: float = 0.0
    cost_range: tuple[Fraction, Fraction] = (Fraction(1), Fraction(1))
    seed: int = 0
    atoms_per_context: int = 3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.n_contexts < 0 or self.n_rules < 0 or self.atoms_per_context < 1:
            raise ValidationError("sizes must be non-negative")
        if not 0.0 <= self.negation_rate <= 1.0:
            raise ValidationError("negation_rate must lie in [0, 1]")
        if self.negation_rate and self.kind != "general-random":
            raise ValidationError(f"{self.kind} systems are definite; negation_rate must be 0")
        lo, hi = (to_fraction(x) for x in self.cost_range)
        if lo > hi:
            raise ValidationError("empty cost range")
        object.__setattr__(self, "cost_range", (lo, hi))

    @classmethod
    def from_json(cls, d: dict) -> "GeneratorSpec":
        keys = {"kind", "n_contexts", "n_rules", "negation_rate", "cost_range", "seed", "atoms_per_context"}
        args = {k: v for k, v in d.items() if k in keys}
        if "cost_range" in args:
            args["cost_range"] = tuple(args["cost_range"])
        return cls(**args)

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(self.kind, self.n_contexts, self.n_rules, self.negation_rate,
                             self.cost_range, seed, self.atoms_per_context)


def _cost(rng: random.Random, lo: Fraction, hi: Fraction) -> Fraction:
    if lo == hi:
        return lo
    den = rng.randint(1, 4)
    first, last = math.ceil(lo * den), math.floor(hi * den)
    if first > last:
        return lo
    return Fraction(rng.randint(first, last), den)


class _Builder:
    def __init__(self, spec: GeneratorSpec):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.names = [f"C{i + 1}" for i in range(spec.n_contexts)]
        self.atoms = [f"p{k}" for k in range(spec.atoms_per_context)]
        self.rules: dict[str, list[BridgeRule]] = {n: [] for n in self.names}
        self.count = 0

    def literal(self, ctx: str) -> tuple[str, str]:
        return ctx, self.rng.choice(self.atoms)

    def add(self, target: str, positive=(), negative=()):
        self.count += 1
        positive = frozenset(positive)
        negative = frozenset(negative) - positive
        self.rules[target].append(
            BridgeRule(f"r{self.count}", target, self.rng.choice(self.atoms), positive, negative))

    def program(self) -> tuple[Clause, ...]:
        rng = self.rng
        clauses = []
        if rng.random() < 0.6:
            clauses.append(Clause(rng.choice(self.atoms)))
        for _ in range(rng.randint(0, 2)):
            head = rng.choice(self.atoms)
            body = tuple(sorted(set(rng.sample(self.atoms, rng.randint(1, min(2, len(self.atoms)))))))
            if head not in body:
                clauses.append(Clause(head, body))
        return tuple(clauses)

    def build(self) -> MCS:
        lo, hi = self.spec.cost_range
        contexts = [Context(n, HornSuite(self.program(), _cost(self.rng, lo, hi)), tuple(self.rules[n]))
                    for n in self.names]
        return MCS(contexts)


def generate(spec: GeneratorSpec) -> MCS:
    """Deterministic in ``spec.seed``.

    ``chain``: rule k targets C(2 + k mod (n-1)) and reads C(target-1).
    ``layered``: contexts in ceil(sqrt(n)) layers, bodies read lower layers only.
    ``diamond-forest``: per four contexts B, L, R, T the rules L<-B, R<-B, T<-L,
    T<-R (same head on T), extra rules pointing downward inside a diamond.
    ``general-random``: arbitrary targets and bodies, cycles allowed, each body
    literal negated with probability ``negation_rate``.
    """
    b = _Builder(spec)
    rng, n, m = b.rng, spec.n_contexts, spec.n_rules
    if spec.kind == "chain":
        if m and n < 2:
            raise ValidationError("a chain with rules needs at least two contexts")
        for k in range(m):
            t = 1 + k % (n - 1)
            b.add(b.names[t], [b.literal(b.names[t - 1])])
    elif spec.kind == "layered":
        layers = math.ceil(math.sqrt(n)) if n else 0
        if m and layers < 2:
            raise ValidationError("a layered system with rules needs at least two layers")
        layer_of = [i * layers // n for i in range(n)] if n else []
        upper = [i for i in range(n) if layer_of[i] > 0]
        for _ in range(m):
            t = rng.choice(upper)
            lower = [i for i in range(n) if layer_of[i] < layer_of[t]]
            body = {b.literal(b.names[rng.choice(lower)]) for _ in range(rng.randint(1, 2))}
            b.add(b.names[t], body)
    elif spec.kind == "diamond-forest":
        diamonds = n // 4
        if m < 4 * diamonds or (m and not diamonds):
            raise ValidationError("diamond-forest needs n_contexts >= 4 and n_rules >= 4 per diamond")
        for d in range(diamonds):
            bot, left, right, top = b.names[4 * d: 4 * d + 4]
            b.add(left, [b.literal(bot)])
            b.add(right, [b.literal(bot)])
            b.add(top, [b.literal(left)])
            head = b.rules[top][-1].head
            b.count += 1
            b.rules[top].append(BridgeRule(f"r{b.count}", top, head, frozenset([b.literal(right)])))
        for _ in range(m - 4 * diamonds):
            d = rng.randrange(diamonds)
            bot, left, right, top = b.names[4 * d: 4 * d + 4]
            target, source = rng.choice([(left, bot), (right, bot), (top, left), (top, right), (top, bot)])
            b.add(target, [b.literal(source)])
    else:
        if m and not n:
            raise ValidationError("rules need at least one context")
        for _ in range(m):
            t = rng.choice(b.names)
            pos, neg = set(), set()
            for _ in range(rng.choice([0, 1, 1, 2, 2])):
                lit = b.literal(rng.choice(b.names))
                (neg if rng.random() < spec.negation_rate else pos).add(lit)
            b.add(t, pos, neg - pos)
    return b.build()


def independent_chains(k: int, length: int, cost=1) -> MCS:
    """``k`` disjoint chains of ``length`` rules (``length + 1`` contexts each).

    Context ``K{i}_0`` holds the fact ``a``; every ``K{i}_j`` imports ``a``
    from ``K{i}_{j-1}``.  Querying ``a`` at the top of chain 1 needs chain 1 only.
    """
    contexts = []
    for i in range(1, k + 1):
        for j in range(length + 1):
            name = f"K{i}_{j}"
            program = (Clause("a"),) if j == 0 else ()
            rules = () if j == 0 else (
                BridgeRule(f"k{i}_{j}", name, "a", frozenset([(f"K{i}_{j - 1}", "a")])),)
            contexts.append(Context(name, HornSuite(program, cost), rules))
    return MCS(contexts)

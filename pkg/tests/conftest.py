"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's solvers: they only call a
suite's ``acc`` directly and enumerate candidates by brute force.
"""
import itertools
import random

import pytest

import costmcs
from costmcs import GeneratorSpec, generate

FIXTURES = ("E1", "E2", "E3", "E4", "E5")


@pytest.fixture(params=FIXTURES)
def fixture_name(request):
    return request.param


@pytest.fixture
def e1():
    return costmcs.load_fixture("E1")


@pytest.fixture
def e2():
    return costmcs.load_fixture("E2")


@pytest.fixture
def e3():
    return costmcs.load_fixture("E3")


@pytest.fixture
def e4():
    return costmcs.load_fixture("E4")


@pytest.fixture
def e5():
    return costmcs.load_fixture("E5")


def subsets(items):
    items = sorted(items)
    for k in range(len(items) + 1):
        yield from (frozenset(c) for c in itertools.combinations(items, k))


def _satisfied(rule, state):
    return (all(p in state[c] for c, p in rule.positive)
            and all(p not in state[c] for c, p in rule.negative))


def brute_equilibria(mcs):
    """All equilibria by checking every combination of candidate belief sets.

    Candidates for context i are every belief set ACC_i returns for any subset
    of its rule heads; an equilibrium has S_i in ACC_i(kb_i(S)) for every i.
    """
    candidates = []
    for ctx in mcs.contexts:
        heads = {r.head for r in ctx.rules}
        options = set()
        for kb in subsets(heads):
            options |= set(ctx.logic.acc(kb))
        candidates.append(sorted(options, key=lambda s: (len(s), sorted(s))))
    found = []
    for combo in itertools.product(*candidates):
        state = dict(zip(mcs.names, combo))
        if all(state[ctx.name] in ctx.logic.acc(frozenset(r.head for r in ctx.rules if _satisfied(r, state)))
               for ctx in mcs.contexts):
            found.append(state)
    return found


def as_plain(state):
    return {k: frozenset(v) for k, v in state.items()}


def brute_least_model(clauses, facts, universe):
    """Intersection of every model containing ``facts``; the least model of a Horn program."""
    models = [s for s in subsets(universe)
              if set(facts) <= s and all(c.head in s for c in clauses if set(c.body) <= s)]
    return frozenset.intersection(*models)


def definite_specs(count, seed=0, max_n=4, max_m=10, kinds=("chain", "layered", "diamond-forest", "general-random")):
    """Deterministic stream of small definite generator specs."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        kind = kinds[len(out) % len(kinds)]
        if kind == "diamond-forest":
            n, m = 4, rng.randint(4, max_m)
        elif kind == "layered":
            n, m = rng.randint(2, max_n), rng.randint(0, max_m)
        elif kind == "chain":
            n, m = rng.randint(2, max_n), rng.randint(0, max_m)
        else:
            n, m = rng.randint(1, max_n), rng.randint(0, max_m)
        n = min(n, max_n)
        out.append(GeneratorSpec(kind, n, m, seed=rng.randrange(2 ** 32),
                                 atoms_per_context=rng.randint(1, 3)))
    return out


def definite_systems(count, **kw):
    return [generate(s) for s in definite_specs(count, **kw)]


# -- acceptance reporting ----------------------------------------------------------

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record the one-line verdict of an acceptance criterion."""

    def emit(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

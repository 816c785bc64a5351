"""Cost-aware multi-context systems.

Declare contexts (a logic suite plus bridge rules), then decide consistency
and brave/cautious queries while a :class:`CostLedger` accounts every
semantic-operator invocation.
"""
from .errors import (ContractError, CyclicError, FragmentError, GuardExceeded, MCSError,
                     ValidationError)
from .generate import GeneratorSpec, generate, independent_chains
from .incremental import (extend_equilibrium, fragment_cost_estimate, incremental_query,
                          incremental_run)
from .ledger import BoundReport, CostLedger, InvocationRecord, bound_report, is_uniform_cost
from .logics import (Clause, HornSuite, LogicSuite, TableSuite, horn_acc, invoke_acc, table_acc,
                     verify_monotone)
from .model import (MCS, BeliefState, BridgeRule, Context, Fragment, fragment_difference,
                    fragment_union, induced_knowledge_bases, is_equilibrium, is_subfragment,
                    knowledge_bases_from_guess, rule_satisfied, valid_contexts)
from .solvers import (QueryOutcome, SolveOutcome, Stratification, brave, cautious,
                      check_definite, grounded_equilibrium, grounded_equilibrium_fixpoint,
                      grounded_equilibrium_stratified, solve_general, stratify)
from .supports import (check_prop3, dependent_fragment, immediate_rule_supports,
                       input_signature, is_justification, is_support,
                       precisely_dependent_fragment, supports_of)
from .syntax import McsParseError, load_mcs, parse_mcs, to_text

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a bundled reference system, e.g. ``fixture_path("E2")``."""
    from importlib import resources

    return resources.files("costmcs.fixtures").joinpath(f"{name}.mcs")


def load_fixture(name: str) -> MCS:
    return parse_mcs(fixture_path(name).read_text(encoding="utf-8"))

"""JSON rendering of solver results and validation against the shipped schemas."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Optional

import jsonschema
from referencing import Registry, Resource

from .ledger import BoundReport, CostLedger
from .model import BeliefState
from .solvers import QueryOutcome, SolveOutcome

SCHEMAS = ("result", "bound_report", "ledger_record")


def load_schema(name: str) -> dict:
    text = resources.files("costmcs.schemas").joinpath(f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


@lru_cache(maxsize=None)
def _validators():
    schemas = {name: load_schema(name) for name in SCHEMAS}
    registry = Registry().with_resources(
        (s["$id"], Resource.from_contents(s)) for s in schemas.values()
    )
    return {name: jsonschema.Draft202012Validator(s, registry=registry) for name, s in schemas.items()}


def validate(document, schema: str = "result") -> None:
    """Raise ``jsonschema.ValidationError`` if ``document`` does not match."""
    _validators()[schema].validate(document)


def state_json(state: Optional[BeliefState]):
    return None if state is None else state.as_dict()


def result_json(algorithm: str, ledger: CostLedger, *, outcome: Optional[SolveOutcome] = None,
                query: Optional[QueryOutcome] = None, report: Optional[BoundReport] = None,
                iterations=None) -> dict:
    doc: dict = {"algorithm": algorithm}
    if outcome is not None:
        doc["consistent"] = outcome.consistent
        doc["equilibria"] = [state_json(s) for s in outcome.equilibria]
    if query is not None:
        doc["query"] = {
            "context": query.context,
            "atom": query.atom,
            "mode": query.mode,
            "entailed": query.entailed,
            "vacuous": query.vacuous,
            "witness": state_json(query.witness),
        }
    doc["ledger_summary"] = ledger.summary()
    if report is not None:
        doc["bound_report"] = report.to_json()
    if iterations is not None:
        doc["iterations"] = [it.to_json() for it in iterations]
    if ledger.notes:
        doc["notes"] = list(ledger.notes)
    return doc

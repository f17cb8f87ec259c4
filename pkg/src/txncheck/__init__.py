"""Checking transactional consistency models over histories and dependency graphs."""

from .axec import AbstractExecution, PreExecution, graphof, validate_execution
from .core import History, Marker, Read, Transaction, Write, history, txn
from .depgraph import DependencyGraph, build_graph, check_gspec, gspec, robustness_check
from .oracle import enumerate_executions, oracle_membership
from .solver import decide_membership, least_solution, totalize
from .spec import catalog, satisfies

__all__ = [
    "AbstractExecution",
    "DependencyGraph",
    "History",
    "Marker",
    "PreExecution",
    "Read",
    "Transaction",
    "Write",
    "build_graph",
    "catalog",
    "check_gspec",
    "decide_membership",
    "enumerate_executions",
    "graphof",
    "gspec",
    "history",
    "least_solution",
    "oracle_membership",
    "robustness_check",
    "satisfies",
    "totalize",
    "txn",
    "validate_execution",
]

__version__ = "0.1.0"

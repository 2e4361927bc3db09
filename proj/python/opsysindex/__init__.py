"""Index invariants for inclusions of matricial operator systems.

Thin re-export of the native module: graphs are (n, edge list) pairs, systems
are lists of complex generator matrices (the *-closed span is used).
"""

from ._opsysindex import (
    bounded_index_linf,
    cb_index,
    cb_norm,
    coindex,
    cp_index,
    cp_index_dual,
    cp_index_relative,
    graph_complement_system,
    graph_system,
    hoffman_bound,
    lambda_tilde,
    lovasz_theta,
    quantum_theta,
    relative_theta,
)

__all__ = [
    "bounded_index_linf",
    "cb_index",
    "cb_norm",
    "coindex",
    "cp_index",
    "cp_index_dual",
    "cp_index_relative",
    "graph_complement_system",
    "graph_system",
    "hoffman_bound",
    "lambda_tilde",
    "lovasz_theta",
    "quantum_theta",
    "relative_theta",
]

__version__ = "0.1.0"

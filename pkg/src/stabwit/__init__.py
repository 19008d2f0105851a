"""Stabilizer-based entanglement witnesses with numerical verification oracles."""

from importlib import resources

from .pauli import (
    ConsistencyError,
    DimensionError,
    HermitianOperator,
    PauliString,
    SizeError,
    commutes,
    commutes_locally,
    expectation,
    pauli_decompose,
    pauli_mul,
    to_dense,
)
from .states import DensityMatrix, Graph, PureState, make_cluster, make_ghz, make_graph_state, make_w3
from .witnesses import Witness, build

__version__ = "0.1.0"


def example_graph_path() -> str:
    """Path to the bundled seven-vertex graph containing a triangle."""
    return str(resources.files(__package__).joinpath("data", "fig2c.json"))


__all__ = [
    "ConsistencyError",
    "DensityMatrix",
    "DimensionError",
    "Graph",
    "HermitianOperator",
    "PauliString",
    "PureState",
    "SizeError",
    "Witness",
    "build",
    "commutes",
    "commutes_locally",
    "example_graph_path",
    "expectation",
    "make_cluster",
    "make_ghz",
    "make_graph_state",
    "make_w3",
    "pauli_decompose",
    "pauli_mul",
    "to_dense",
]

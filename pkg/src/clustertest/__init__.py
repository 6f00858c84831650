"""Random-walk property tester for 2-clusterability of bounded-degree graphs."""

from .errors import GraphFormatError, GuardExceeded
from .graph import (
    Graph,
    cut_conductance,
    graph_conductance_bruteforce,
    inner_conductance,
    is_two_clusterable_bruteforce,
    load_graph,
    save_graph,
)
from .spectral import Spectrum, eigendecompose, gram2, graph_spectrum, laplacian, walk_matrix
from .tester import Constants, TestParams, TestReport, cluster_test, derive_params

__version__ = "0.1.0"

__all__ = [
    "Constants",
    "Graph",
    "GraphFormatError",
    "GuardExceeded",
    "Spectrum",
    "TestParams",
    "TestReport",
    "cluster_test",
    "cut_conductance",
    "derive_params",
    "eigendecompose",
    "gram2",
    "graph_conductance_bruteforce",
    "graph_spectrum",
    "inner_conductance",
    "is_two_clusterable_bruteforce",
    "laplacian",
    "load_graph",
    "save_graph",
    "walk_matrix",
]

"""Cypher retrieval over 3D scene graphs, answer checkers and an agent harness."""

from importlib import resources

__version__ = "0.1.0"


def example_graph_path():
    """Path to the bundled 18-node example graph."""
    return resources.files(__package__) / "data" / "example_graph.json"

"""Random bipartite graph generator and analysis toolkit."""

from .bigraph import Bigraph, DuplicateEdgeError, Modality, NodeRef

__version__ = "0.1.0"

__all__ = [
    "Bigraph",
    "DuplicateEdgeError",
    "Modality",
    "NodeRef",
    "__version__",
]

"""lnnplay: a weighted real-valued logic network that plays, explains, and
trains on a coin-collector text game, with a session server and CLI."""

from .lnn import (
    InferenceConfig,
    InferenceReport,
    LnnGraph,
    NodeKind,
    TrainConfig,
    TruthBounds,
    backend_name,
)

__version__ = "0.1.0"

__all__ = [
    "InferenceConfig",
    "InferenceReport",
    "LnnGraph",
    "NodeKind",
    "TrainConfig",
    "TruthBounds",
    "backend_name",
    "__version__",
]

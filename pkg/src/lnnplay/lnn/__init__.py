from .core import (
    GraphError,
    InferenceConfig,
    InferenceReport,
    LnnGraph,
    NodeKind,
    NodeView,
    TrainConfig,
    TruthBounds,
    backend_name,
)

__all__ = [
    "GraphError",
    "InferenceConfig",
    "InferenceReport",
    "LnnGraph",
    "NodeKind",
    "NodeView",
    "TrainConfig",
    "TruthBounds",
    "backend_name",
]

"""Reference field-extraction worker for the form-attack harness."""

from .models import LexicalScorer, ModelConfig, build_model, load_model_config
from .server import PROTOCOL_VERSION, serve

__version__ = "0.1.0"

__all__ = [
    "LexicalScorer",
    "ModelConfig",
    "PROTOCOL_VERSION",
    "build_model",
    "load_model_config",
    "serve",
]

"""Hidden-state exporter: per-layer activations of a small pretrained
transformer, written in the ADATRACE format for the selection toolkit."""

__version__ = "0.1.0"

from .capture import ExportSpec, UnsupportedArchitecture, capture_hidden_states, export_activations
from .writer import write_trace

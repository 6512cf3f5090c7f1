"""Figure rendering for two-photon-absorption sensitivity sweep exports."""

from .exceptions import EmptySelection, FigureError, SchemaError
from .plots import KINDS, load_field, load_sweep, render

__all__ = [
    "EmptySelection",
    "FigureError",
    "SchemaError",
    "KINDS",
    "load_field",
    "load_sweep",
    "render",
]

__version__ = "0.1.0"

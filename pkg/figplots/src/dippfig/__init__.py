"""Figure renderer for dippsim sweep CSVs."""

from .plots import (
    FIGURES,
    NoDataError,
    PlotSpec,
    SchemaError,
    build_figure,
    load_rows,
    render,
)

__all__ = [
    "FIGURES",
    "NoDataError",
    "PlotSpec",
    "SchemaError",
    "build_figure",
    "load_rows",
    "render",
]
__version__ = "0.1.0"

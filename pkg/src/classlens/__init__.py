"""Exploration engine for multi-class classifier prediction distributions."""

from .analytics import (
    ChordFlows,
    ClassSummary,
    ColorSpec,
    Dataset,
    FilterSpec,
    Histogram,
    LabelEntry,
    PredictionRecord,
    SortSpec,
    WindowSlice,
    build_dataset,
    chord_flows,
    class_summary,
    color_group,
    filter_instances,
    predicted_class,
    prediction_histogram,
    sort_classes,
    window_slice,
)

__version__ = "0.1.0"

__all__ = [
    "ChordFlows",
    "ClassSummary",
    "ColorSpec",
    "Dataset",
    "FilterSpec",
    "Histogram",
    "LabelEntry",
    "PredictionRecord",
    "SortSpec",
    "WindowSlice",
    "build_dataset",
    "chord_flows",
    "class_summary",
    "color_group",
    "filter_instances",
    "predicted_class",
    "prediction_histogram",
    "sort_classes",
    "window_slice",
    "__version__",
]

"""Layered pipeline: configuration, metrics, execution and traces."""

from .config import PipelineConfig, load_config, parse_config, validate_document
from .initiation import ChatInitiator
from .layers import AggregationMetric, GenerateSpec, LayerSpec, place_levels, split_levels
from .metrics import MetricOutcome, apply_filter_metric, apply_metric, apply_optimal_metric, apply_rank_metric
from .refinement import ChatRefinement, StaticRefinement, bind_refinements
from .runner import LayerError, run_layer, run_pipeline
from .trace import (
    BacktrackEvent,
    LayerRecord,
    PipelineTrace,
    explain_document,
    explain_trace,
    replay_trace,
    verify_trace,
)

__all__ = [
    "AggregationMetric",
    "BacktrackEvent",
    "ChatInitiator",
    "ChatRefinement",
    "GenerateSpec",
    "LayerError",
    "LayerRecord",
    "LayerSpec",
    "MetricOutcome",
    "PipelineConfig",
    "PipelineTrace",
    "StaticRefinement",
    "apply_filter_metric",
    "apply_metric",
    "apply_optimal_metric",
    "apply_rank_metric",
    "bind_refinements",
    "explain_document",
    "explain_trace",
    "load_config",
    "parse_config",
    "place_levels",
    "replay_trace",
    "run_layer",
    "run_pipeline",
    "split_levels",
    "validate_document",
    "verify_trace",
]

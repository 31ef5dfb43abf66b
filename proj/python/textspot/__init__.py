"""Open Images V5 Text annotation tools and polygon text-spotting evaluation."""

import json

from ._textspot import (
    Error,
    GeometryError,
    LexiconError,
    MatchingError,
    ParseError,
    SchemaError,
    aggregate_stats,
    coco_round_trip,
    edit_distance,
    hmean,
    icdar_to_coco,
    intersection_area,
    iou,
    normalize_polygon,
    normalize_transcription,
    polygon_area,
    run_cli,
    subset_stats,
    validate,
    weighted_edit_distance,
    word_spotting_eligible,
)
from ._textspot import evaluate as _evaluate

__version__ = "0.1.0"


def evaluate(gt, pred, protocol="e2e", iou=0.5, jobs=1):
    """Score predictions against ground truth and return the report as a dict."""
    return json.loads(_evaluate(str(gt), str(pred), protocol, iou, jobs))


__all__ = [
    "Error",
    "GeometryError",
    "LexiconError",
    "MatchingError",
    "ParseError",
    "SchemaError",
    "aggregate_stats",
    "coco_round_trip",
    "edit_distance",
    "evaluate",
    "hmean",
    "icdar_to_coco",
    "intersection_area",
    "iou",
    "normalize_polygon",
    "normalize_transcription",
    "polygon_area",
    "run_cli",
    "subset_stats",
    "validate",
    "weighted_edit_distance",
    "word_spotting_eligible",
]

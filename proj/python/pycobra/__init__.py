"""Causal cost-estimation engine: simulation, calibration and refinement analysis."""

import json
import os

from ._core import (
    IterationConfig,
    IterationReport,
    ModelValidationError,
    ParseError,
    exceedance_probability,
    quantile,
    triangular_inverse_cdf,
)
from . import _core

__all__ = [
    "IterationConfig",
    "IterationReport",
    "ModelValidationError",
    "ParseError",
    "analyze",
    "apply_refinements",
    "estimate",
    "evaluate",
    "exceedance_probability",
    "iterate",
    "quantile",
    "synthesize",
    "triangular_inverse_cdf",
    "validate_model",
]


def _text(source):
    """Document text from a path, a JSON-serializable dict or a string."""
    if isinstance(source, os.PathLike):
        with open(source, encoding="utf-8") as f:
            return f.read()
    if isinstance(source, dict):
        return json.dumps(source)
    return source


def _config(config, options):
    if config is not None and options:
        raise TypeError("pass either an IterationConfig or keyword options, not both")
    return config if config is not None else IterationConfig(**options)


def validate_model(model):
    """List of (rule, subject, message) violations; empty for a valid model."""
    return _core.validate_model(_text(model))


def estimate(model, ratings, size, productivity, samples=10000, method="lhs", seed=0):
    """Sorted simulated effort samples of a new project."""
    return _core.estimate(_text(model), dict(ratings), size, productivity, samples, method, seed)


def analyze(model, projects, config=None, **options):
    """Pre-modeling analysis as a dict."""
    return json.loads(_core.analyze(_text(model), _text(projects), _config(config, options)))


def evaluate(model, projects, config=None, **options):
    """Leave-one-out evaluation as a dict."""
    return json.loads(_core.evaluate(_text(model), _text(projects), _config(config, options)))


def iterate(model, projects, config=None, **options):
    """One refinement iteration; returns an IterationReport."""
    return _core.iterate(_text(model), _text(projects), _config(config, options))


def apply_refinements(projects, report, kinds=("remove_outlier", "fix_effort_scope")):
    """New project table (CSV text) with the selected suggestion kinds applied."""
    if isinstance(report, IterationReport):
        report = report.to_json()
    return _core.apply(_text(projects), _text(report), list(kinds))


def synthesize(**options):
    """Synthetic organization as (model JSON text, project CSV text)."""
    return _core.synthesize(**options)

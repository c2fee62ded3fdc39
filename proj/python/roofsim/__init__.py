"""Synthetic property-insurance benchmark: policy generation, compound losses,
roof-condition channels, random-forest tiers and normalized Gini scoring."""

import json

from . import _roofsim
from ._roofsim import (
    PRNG_ID,
    CalibrationError,
    ClaimOutcome,
    ConfigError,
    DomainError,
    GiniResult,
    IntegrityError,
    IoError,
    ParameterError,
    PolicyRecord,
    RoofHealth,
    RoofsimError,
    UndefinedMetricError,
    UsageError,
    ValidationError,
    WallType,
    assign_roof_health,
    calibrate_labeler,
    normalized_gini,
    ordinal_correlation,
    raw_gini,
)

__all__ = [
    "PRNG_ID",
    "CalibrationError",
    "ClaimOutcome",
    "ConfigError",
    "DomainError",
    "GiniResult",
    "IntegrityError",
    "IoError",
    "ParameterError",
    "PolicyRecord",
    "RoofHealth",
    "RoofsimError",
    "UndefinedMetricError",
    "UsageError",
    "ValidationError",
    "WallType",
    "assign_roof_health",
    "calibrate_labeler",
    "config_fingerprint",
    "default_config",
    "generate_policies",
    "normalized_gini",
    "oracle_predict",
    "ordinal_correlation",
    "raw_gini",
    "run_experiment",
    "score_submission",
    "simulate_losses",
]


def _dump(config):
    return None if config is None else json.dumps(config)


def default_config():
    """The built-in experiment config as a dict."""
    return json.loads(_roofsim.default_config_json())


def config_fingerprint(config=None):
    return _roofsim.config_fingerprint(_dump(config))


def generate_policies(seed=0, config=None, threads=0):
    """Policies for one master seed. `config` is a (partial) experiment config dict."""
    return _roofsim.generate_policies(seed, _dump(config), threads)


def simulate_losses(records, seed=0, config=None, threads=0):
    return _roofsim.simulate_losses(records, seed, _dump(config), threads)


def oracle_predict(records, config=None):
    return _roofsim.oracle_predict(records, _dump(config))


def run_experiment(config=None, seeds=None, output_dir=None, write_files=True, threads=0):
    """Runs the tier comparison and returns the reports as a dict."""
    text = _roofsim.run_experiment(_dump(config), seeds, output_dir, write_files, threads)
    return json.loads(text)


def score_submission(predictions, answers, tie_policy="index"):
    return json.loads(_roofsim.score_submission(str(predictions), str(answers), tie_policy))

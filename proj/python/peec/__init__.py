"""Python face of the PEEC simulator and learning harness.

The compiled module speaks JSON strings; this package turns them into
dictionaries and accepts dict-or-string configs everywhere.
"""

import json as _json

try:
    from . import _peec as _core
except ImportError:  # running against a build tree via PYTHONPATH
    import _peec as _core

elimination_probability = _core.elimination_probability
prediction_feedback = _core.prediction_feedback

__all__ = [
    "resolve_config",
    "evaluate",
    "episode",
    "train",
    "oracle",
    "feature_schema",
    "elimination_probability",
    "prediction_feedback",
]


def _config_text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def resolve_config(profile="desk", config=None, overrides=(), seed=None):
    """Resolved run configuration as a dict."""
    return _json.loads(
        _core.resolve_config(profile, _config_text(config), list(overrides), seed)
    )


def evaluate(config, traces_path=""):
    """Evaluate the configured policies; returns {config, report}."""
    return _json.loads(_core.eval_report(_config_text(config), traces_path))


def episode(config, seed):
    """One episode at the given seed; returns {seed, outcome, steps}."""
    return _json.loads(_core.episode_trace(_config_text(config), seed))


def train(config, resume=""):
    """Co-train the full agent stack; returns counters and validation rows."""
    return _json.loads(_core.train(_config_text(config), resume))


def oracle(**kwargs):
    """Exact minimax sweep and break-even certificate on a toy grid game."""
    return _json.loads(_core.oracle(**kwargs))


def feature_schema():
    """Feature vector layout consumed by the policy networks."""
    return _json.loads(_core.feature_schema())

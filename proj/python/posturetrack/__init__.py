"""Lying-posture classification from a single tri-axial accelerometer.

Configuration dictionaries follow the same schema as the ``posture`` command's
``--config`` file: ``dataset``, ``model``, ``split``, ``locations``, ``postures``
and ``seed``.
"""

import json

from . import _core
from ._core import ConfigError, PostureError, cov, feature_names, meta_features, window_features

__version__ = _core.version

__all__ = [
    "ConfigError",
    "PostureError",
    "compute_metrics",
    "cov",
    "evaluate",
    "feature_names",
    "fit_ensemble",
    "generate_dataset",
    "kruskal_wallis",
    "meta_features",
    "predict_adalstm",
    "predict_ensemble",
    "train_adalstm",
    "window_features",
    "write_dataset",
]


def _dump(config):
    return json.dumps(config or {})


def compute_metrics(counts, labels):
    """One-vs-rest macro metrics for a confusion matrix (rows actual, columns predicted)."""
    return json.loads(_core.compute_metrics(counts, labels))


def kruskal_wallis(groups):
    return json.loads(_core.kruskal_wallis(groups))


def generate_dataset(config=None):
    """Episodes as dicts with id, subject_id, location, label and samples."""
    return json.loads(_core.generate_dataset(_dump(config)))


def write_dataset(config, out_dir):
    """Writes CSV files and a manifest; returns the manifest path."""
    return _core.write_dataset(_dump(config), str(out_dir))


def evaluate(config=None):
    """Cross-validated report per sensor location."""
    return json.loads(_core.evaluate(_dump(config)))


def fit_ensemble(X, y, labels, seed=42, n_trees=100):
    return json.loads(_core.fit_ensemble(X, y, labels, seed, n_trees))


def predict_ensemble(model, X):
    return _core.predict_ensemble(json.dumps(model), X)


def train_adalstm(config=None):
    """Trains on the whole configured dataset; returns model, loss trace and warnings."""
    return json.loads(_core.train_adalstm(_dump(config)))


def predict_adalstm(model, samples):
    return _core.predict_adalstm(json.dumps(model), samples)

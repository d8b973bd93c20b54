"""Python bindings for the gerve mode-estimation library."""

import json

import numpy as np

from . import _gerve
from ._gerve import InvalidInput, NumericFailure, hungarian, mean_shift_step, preset_names

__all__ = [
    "InvalidInput",
    "NumericFailure",
    "assign_clusters",
    "bootstrap",
    "elbow",
    "fit",
    "gen_mixture_sample",
    "hungarian",
    "hungarian_sum",
    "mean_shift_step",
    "mode_recovery",
    "nearest_neighbor_sum",
    "preset_names",
    "resolve_modes",
    "run_cli",
]


def _points(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return x


def _overrides(overrides):
    return json.dumps(overrides) if overrides else ""


def gen_mixture_sample(spec, n, seed=0):
    """Draw n points from a preset name ("triangle", "two-blob") or a spec dict."""
    return _gerve.gen_mixture_sample(json.dumps(spec), n, seed)


def fit(x, preset="triangle-modes", K=None, seed=0, overrides=None):
    """Fit a mixture; returns the fit report with the final state under "state"."""
    return json.loads(_gerve.fit(_points(x), preset, K, seed, _overrides(overrides)))


def resolve_modes(state, preset="triangle-modes", overrides=None):
    """Prune and merge a fitted state; returns a list of mode dicts, heaviest first."""
    doc = _gerve.resolve_modes(json.dumps(state), preset, _overrides(overrides))
    return json.loads(doc)["modes"]


def assign_clusters(state, x):
    return np.asarray(_gerve.assign_clusters(json.dumps(state), _points(x)))


def bootstrap(x, preset="two-blob", K=None, seed=0, overrides=None):
    return json.loads(_gerve.bootstrap(_points(x), preset, K, seed, _overrides(overrides)))


def elbow(x, grid=None, preset="hotspot", K=None, seed=0, overrides=None):
    return json.loads(_gerve.elbow(_points(x), grid, preset, K, seed, _overrides(overrides)))


def mode_recovery(estimates, truth, eps):
    return _gerve.mode_recovery(_points(estimates), _points(truth), eps)


def hungarian_sum(estimates, truth):
    return _gerve.hungarian_sum(_points(estimates), _points(truth))


def nearest_neighbor_sum(estimates, truth):
    return _gerve.nearest_neighbor_sum(_points(estimates), _points(truth))


def run_cli(args):
    """Run the command-line tool in-process; returns (exit code, stdout, stderr)."""
    return _gerve.run_cli([str(a) for a in args])

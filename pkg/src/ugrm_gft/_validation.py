"""Input checks shared by the estimator classes."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .graph import DirectedGraph, UgrmParams


def check_graph(g, name: str = "graph") -> DirectedGraph:
    if isinstance(g, DirectedGraph):
        return g
    try:
        return DirectedGraph(np.asarray(g, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name} is not a valid directed graph: {exc}") from exc


def check_params(alpha, k) -> UgrmParams:
    return UgrmParams(alpha, k)


def check_choice(value, choices, name: str):
    if value not in choices:
        raise ValueError(f"{name} must be one of {tuple(choices)}, got {value!r}")
    return value


def check_signals(X, n_features: int, name: str = "X") -> np.ndarray:
    """2-D float array of vectorized signals, one per row."""
    X = check_array(X, dtype=np.float64, ensure_2d=False, input_name=name)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != n_features:
        raise ValueError(
            f"{name} has {X.shape[1]} features, but the graph has {n_features} vertices"
        )
    return X

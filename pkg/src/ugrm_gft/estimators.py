"""scikit-learn style wrappers around the transforms and the grid search.

Signals are passed as rows: a product-graph signal matrix ``X`` of shape
``(n2, n1)`` becomes the row ``vec(X)`` (column-major), matching the
vertex numbering of :func:`ugrm_gft.graph.cartesian_product`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_choice, check_graph, check_params, check_signals
from .denoise import (
    BASELINE_KINDS,
    GridConfig,
    NoiseConfig,
    baseline_basis,
    grid_search,
    snr_db,
    ugrm_basis,
)
from .gft import bandlimit_reconstruct_I, bandlimit_reconstruct_II
from .graph import ProductShape, unvec, vec


class _BasisMixin:
    def _build_basis(self):
        g1 = check_graph(self.graph, "graph")
        g2 = None if self.graph2 is None else check_graph(self.graph2, "graph2")
        check_choice(self.variant, ("I", "II"), "variant")
        if self.matrix is not None:
            check_choice(self.matrix, BASELINE_KINDS, "matrix")
            basis, table = baseline_basis(g1, g2, self.matrix, self.variant)
        else:
            basis, table = ugrm_basis(g1, g2, check_params(self.alpha, self.k), self.variant)
        self.basis_ = basis
        self.frequency_table_ = table
        self.shape_ = ProductShape(1, g1.n) if g2 is None else ProductShape(g1.n, g2.n)
        self.n_features_in_ = self.shape_.n
        if table is None:
            self.order_ = np.arange(basis.n)
            self.frequencies_ = basis.sigma
        else:
            self.order_ = table.flat_index
            self.frequencies_ = table.mu


class GraphFourierTransform(_BasisMixin, TransformerMixin, BaseEstimator):
    """Two-block SVD graph Fourier transform.

    ``transform`` returns ``[z1 | z2]`` with each block listed in ascending
    frequency order (singular value for variant ``"I"``, singular value
    sum for variant ``"II"``).

    Parameters
    ----------
    graph : DirectedGraph
        The graph, or the first factor ``g1`` of a product graph.
    graph2 : DirectedGraph, optional
        Second factor ``g2``; signals then live on ``graph x graph2``.
    alpha, k : float
        UGRM parameters in ``[0, 1]``.
    variant : {"I", "II"}
        ``"I"`` decomposes the product UGRM; ``"II"`` combines the factor SVDs.
    matrix : {"L", "A", "D", "Q"}, optional
        Use this classical matrix instead of the UGRM.
    """

    def __init__(self, graph, graph2=None, alpha=0.5, k=1.0, variant="I", matrix=None):
        self.graph = graph
        self.graph2 = graph2
        self.alpha = alpha
        self.k = k
        self.variant = variant
        self.matrix = matrix

    def fit(self, X=None, y=None):
        self._build_basis()
        if X is not None:
            check_signals(X, self.n_features_in_)
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = check_signals(X, self.n_features_in_)
        ux = X @ self.basis_.u
        vx = X @ self.basis_.v
        z1 = 0.5 * (ux + vx)
        z2 = 0.5 * (ux - vx)
        return np.hstack([z1[:, self.order_], z2[:, self.order_]])

    def inverse_transform(self, Z):
        check_is_fitted(self, "basis_")
        n = self.n_features_in_
        Z = check_signals(Z, 2 * n, name="Z")
        z1 = np.empty((Z.shape[0], n))
        z2 = np.empty_like(z1)
        z1[:, self.order_] = Z[:, :n]
        z2[:, self.order_] = Z[:, n:]
        return 0.5 * ((z1 + z2) @ self.basis_.u.T + (z1 - z2) @ self.basis_.v.T)


class BandlimitedDenoiser(_BasisMixin, TransformerMixin, BaseEstimator):
    """Keep the lowest ``n_components`` frequencies of each signal.

    ``n_components=None`` keeps everything (the identity map). Parameters
    otherwise match :class:`GraphFourierTransform`.
    """

    def __init__(
        self, graph, graph2=None, alpha=0.5, k=1.0, n_components=None, variant="I", matrix=None
    ):
        self.graph = graph
        self.graph2 = graph2
        self.alpha = alpha
        self.k = k
        self.n_components = n_components
        self.variant = variant
        self.matrix = matrix

    def fit(self, X=None, y=None):
        self._build_basis()
        m = self.n_features_in_ if self.n_components is None else self.n_components
        if int(m) != m or not 0 <= m <= self.n_features_in_:
            raise ValueError(f"n_components must lie in [0, {self.n_features_in_}], got {m!r}")
        self.n_components_ = int(m)
        if X is not None:
            check_signals(X, self.n_features_in_)
        return self

    def _one(self, row):
        x = unvec(row, self.shape_)
        if self.frequency_table_ is None:
            out = bandlimit_reconstruct_I(self.basis_, x, self.n_components_)
        else:
            out = bandlimit_reconstruct_II(
                self.basis_, self.frequency_table_, x, self.n_components_
            )
        return vec(out)

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = check_signals(X, self.n_features_in_)
        return np.array([self._one(row) for row in X]).reshape(X.shape)

    def score(self, X, y):
        """Mean reconstruction SNR (dB) of ``transform(X)`` against clean ``y``."""
        y = check_signals(y, self.n_features_in_, name="y")
        rec = self.transform(X)
        if rec.shape != y.shape:
            raise ValueError(f"X and y hold different numbers of signals: {rec.shape} vs {y.shape}")
        return float(np.mean([snr_db(t, r) for t, r in zip(y, rec)]))


class UGRMGridSearch(BaseEstimator):
    """Noise-injection search over ``(alpha, k, M)``.

    ``fit(X)`` takes the clean signal matrix of shape ``(n2, n1)`` (or a
    vector when ``graph2`` is None), adds ``trials`` seeded noise draws of
    standard deviation ``noise_sigma`` and scores every grid point together
    with the fixed ``baselines``.

    Attributes
    ----------
    report_ : DenoiseReport
    best_params_ : dict
        ``alpha``, ``k`` and ``n_components`` of the best grid point.
    best_score_ : float
        Trial-averaged SNR (dB) or BAE of the best point.
    best_estimator_ : BandlimitedDenoiser
        Fitted denoiser at ``best_params_``.
    """

    def __init__(
        self,
        graph,
        graph2=None,
        alpha_values=None,
        k_values=None,
        m_values=None,
        variant="I",
        objective="snr",
        noise_sigma=0.1,
        trials=100,
        seed=0,
        baselines=BASELINE_KINDS,
        n_jobs=1,
    ):
        self.graph = graph
        self.graph2 = graph2
        self.alpha_values = alpha_values
        self.k_values = k_values
        self.m_values = m_values
        self.variant = variant
        self.objective = objective
        self.noise_sigma = noise_sigma
        self.trials = trials
        self.seed = seed
        self.baselines = baselines
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        g1 = check_graph(self.graph, "graph")
        g2 = None if self.graph2 is None else check_graph(self.graph2, "graph2")
        check_choice(self.variant, ("I", "II"), "variant")
        grid_kw = {"objective": self.objective, "m_values": self.m_values}
        if self.alpha_values is not None:
            grid_kw["alpha_values"] = self.alpha_values
        if self.k_values is not None:
            grid_kw["k_values"] = self.k_values
        grid = GridConfig(**grid_kw)
        noise = NoiseConfig(self.noise_sigma, self.seed, self.trials)
        for kind in self.baselines:
            check_choice(kind, BASELINE_KINDS, "baselines")
        report = grid_search(
            X, g1, g2, grid, noise, self.variant, tuple(self.baselines), n_jobs=self.n_jobs
        )
        self.report_ = report
        self.best_params_ = {
            "alpha": report.best.alpha,
            "k": report.best.k,
            "n_components": report.best.m,
        }
        self.best_score_ = report.best.score
        self.best_estimator_ = BandlimitedDenoiser(
            g1, g2, variant=self.variant, **self.best_params_
        ).fit()
        return self

    def transform(self, X):
        check_is_fitted(self, "best_estimator_")
        return self.best_estimator_.transform(X)

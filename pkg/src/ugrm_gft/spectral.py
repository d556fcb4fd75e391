"""Deterministic SVD / PSD eigendecomposition in ascending order.

Both factorizations share one sign convention: each column pair is flipped
so that the largest-magnitude entry of the left vector is positive (lowest
index wins among near-ties). Inputs are rescaled by a power of two before
LAPACK is called, so ``c * m`` and ``m`` produce bit-identical singular
vectors whenever ``c`` is a power of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import DirectedGraph, UgrmParams, ugrm

__all__ = [
    "ORTHO_TOL",
    "MONOTONE_TOL",
    "SvdFactorization",
    "EigFactorization",
    "MonotonicityReport",
    "svd_ascending",
    "eig_psd_ascending",
    "monotonicity_report",
]

ORTHO_TOL = 1e-10
MONOTONE_TOL = 1e-8
SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-8

# relative slack when looking for the largest-magnitude entry
_PIVOT_RTOL = 1e-9


@dataclass(frozen=True)
class SvdFactorization:
    """``m == u @ diag(sigma) @ v.T`` with ``sigma`` nondecreasing."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


@dataclass(frozen=True)
class EigFactorization:
    """``m == w @ diag(lam) @ w.T`` with ``lam`` nondecreasing."""

    w: np.ndarray
    lam: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.w * self.lam) @ self.w.T


def _pivot_signs(u: np.ndarray) -> np.ndarray:
    """+1/-1 per column so the largest-|entry| of each column is positive."""
    mag = np.abs(u)
    peak = mag.max(axis=0, keepdims=True)
    pivot = np.argmax(mag >= peak * (1.0 - _PIVOT_RTOL), axis=0)
    signs = np.sign(u[pivot, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def _power_of_two_scale(m: np.ndarray) -> float:
    peak = float(np.max(np.abs(m))) if m.size else 0.0
    if peak == 0.0:
        return 1.0
    return math.ldexp(1.0, math.frexp(peak)[1])


def _check_square_finite(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def svd_ascending(m) -> SvdFactorization:
    """Full SVD with singular values sorted in nondecreasing order.

    Ties keep LAPACK's relative order. In the numerical null space the
    right vectors are rotated onto the left ones (orthogonal Procrustes),
    which makes ``u == v`` for symmetric PSD input even when ``sigma``
    contains zeros.

    Raises
    ------
    ValueError
        On non-square or non-finite input.
    numpy.linalg.LinAlgError
        If LAPACK fails to converge.
    """
    m = _check_square_finite(m)
    n = m.shape[0]
    scale = _power_of_two_scale(m)
    try:
        u, s, vt = np.linalg.svd(m / scale)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"SVD did not converge for a {n}x{n} matrix (max |entry| = {np.max(np.abs(m)):.3g})"
        ) from exc
    v = vt.T
    # stable ascending sort keyed by (sigma, position in LAPACK's descending output)
    order = np.lexsort((np.arange(n), s))
    u, s, v = u[:, order], s[order], v[:, order]

    if n:
        null_tol = n * np.finfo(float).eps * max(float(s[-1]), 1.0)
        n_null = int(np.count_nonzero(s <= null_tol))
        if n_null:
            u0, v0 = u[:, :n_null], v[:, :n_null]
            a, _, bt = np.linalg.svd(v0.T @ u0)
            v = v.copy()
            v[:, :n_null] = v0 @ (a @ bt)

    signs = _pivot_signs(u)
    u = u * signs
    v = v * signs
    return SvdFactorization(u=u, sigma=s * scale, v=v)


def eig_psd_ascending(m) -> EigFactorization:
    """Eigendecomposition of a symmetric positive semidefinite matrix.

    Raises
    ------
    ValueError
        If ``m`` is not symmetric within 1e-10 or has an eigenvalue below -1e-8.
    """
    m = _check_square_finite(m)
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > SYMMETRY_TOL:
        raise ValueError(f"matrix is not symmetric (max |m - m.T| = {asym:.3g})")
    scale = _power_of_two_scale(m)
    lam, w = np.linalg.eigh(0.5 * (m + m.T) / scale)
    lam = lam * scale
    if lam.size and lam[0] < -PSD_TOL:
        raise ValueError(f"matrix is indefinite (smallest eigenvalue {lam[0]:.3g})")
    w = w * _pivot_signs(w)
    return EigFactorization(w=w, lam=np.clip(lam, 0.0, None))


@dataclass(frozen=True)
class MonotonicityReport:
    """Singular values of ``P(alpha, k)`` over an ascending alpha grid.

    ``table[a, l]`` is the ``l``-th smallest singular value at
    ``alpha_grid[a]``. ``violations`` lists every ``(l, alpha, alpha', gap)``
    with ``alpha < alpha'`` whose value drops by more than ``tol``;
    ``gap`` is the (positive) size of the drop.
    """

    k: float
    alpha_grid: tuple
    table: np.ndarray
    violations: list = field(default_factory=list)
    tol: float = MONOTONE_TOL

    @property
    def is_monotone(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "alpha_grid": list(self.alpha_grid),
            "tolerance": self.tol,
            "singular_values": self.table.tolist(),
            "violations": [
                {"index": l, "alpha": a, "alpha_prime": b, "gap": g}
                for l, a, b, g in self.violations
            ],
        }


def monotonicity_report(
    g: DirectedGraph, k: float, alpha_grid: Sequence[float], tol: float = MONOTONE_TOL
) -> MonotonicityReport:
    alphas = tuple(float(a) for a in alpha_grid)
    if not alphas:
        raise ValueError("alpha_grid must not be empty")
    if any(b < a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha_grid must be ascending")
    table = np.array(
        [svd_ascending(ugrm(g, UgrmParams(a, k))).sigma for a in alphas]
    ).reshape(len(alphas), g.n)

    violations = []
    for l in range(g.n):
        col = table[:, l]
        for i in range(len(alphas)):
            for j in range(i + 1, len(alphas)):
                drop = col[i] - col[j]
                if drop > tol:
                    violations.append((l, alphas[i], alphas[j], float(drop)))
    return MonotonicityReport(k=float(k), alpha_grid=alphas, table=table, violations=violations, tol=tol)

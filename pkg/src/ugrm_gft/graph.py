"""Directed graphs, their classical matrices, and the UGRM.

Orientation convention: ``weights[i, j]`` is the weight of the directed
edge ``j -> i``. Row sums are therefore in-degrees and ``L @ 1 == 0`` for
every graph, which keeps the Laplacian singular and its smallest singular
value at zero.

Product vertices ``(i1, i2)`` of ``g1 x g2`` are flattened to
``i1 * n2 + i2``, so the product adjacency is ``A1 (+) A2`` (Kronecker
sum) and a signal matrix ``X`` of shape ``(n2, n1)`` is flattened by
column-major stacking (see :func:`vec`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "DirectedGraph",
    "UgrmParams",
    "GraphMatrices",
    "ProductShape",
    "derive_matrices",
    "ugrm",
    "kronecker",
    "kron_sum",
    "cartesian_product",
    "vec",
    "unvec",
]


@dataclass(frozen=True)
class DirectedGraph:
    """Weighted directed graph stored as a dense matrix.

    Parameters
    ----------
    weights : array-like of shape (n, n)
        ``weights[i, j]`` is the weight of the edge from ``j`` into ``i``.
        Entries must be finite and nonnegative with a zero diagonal.
    labels : sequence of str, optional
        One identifier per vertex.
    """

    weights: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be a square matrix, got shape {w.shape}")
        if w.shape[0] < 1:
            raise ValueError("a graph needs at least one vertex")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise ValueError("self-loops are not allowed (diagonal must be zero)")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != w.shape[0]:
                raise ValueError(
                    f"got {len(labels)} labels for {w.shape[0]} vertices"
                )
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def from_edges(cls, n: int, edges, labels=None) -> "DirectedGraph":
        """Build from ``(source, target[, weight])`` tuples."""
        w = np.zeros((n, n))
        for edge in edges:
            src, dst = edge[0], edge[1]
            w[dst, src] = edge[2] if len(edge) > 2 else 1.0
        return cls(w, labels)

    def is_symmetric(self, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.weights, self.weights.T, rtol=0.0, atol=atol))

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.weights.tobytes(), self.weights.shape, self.labels))

    def __repr__(self):
        n_edges = int(np.count_nonzero(self.weights))
        return f"DirectedGraph(n={self.n}, edges={n_edges})"


@dataclass(frozen=True)
class UgrmParams:
    """The ``(alpha, k)`` pair; both must lie in ``[0, 1]``."""

    alpha: float
    k: float

    def __post_init__(self):
        for name in ("alpha", "k"):
            value = float(getattr(self, name))
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def adjacency_coefficient(self) -> float:
        return (2.0 * self.k - 1.0) * (self.alpha - 1.0)


@dataclass(frozen=True)
class GraphMatrices:
    adjacency: np.ndarray
    in_degree: np.ndarray
    laplacian: np.ndarray
    signless_laplacian: np.ndarray

    def by_kind(self, kind: str) -> np.ndarray:
        """Return the matrix named by one of ``"A"``, ``"D"``, ``"L"``, ``"Q"``."""
        table = {
            "A": self.adjacency,
            "D": self.in_degree,
            "L": self.laplacian,
            "Q": self.signless_laplacian,
        }
        try:
            return table[kind]
        except KeyError:
            raise ValueError(f"unknown matrix kind {kind!r}; expected one of A, D, L, Q") from None


@dataclass(frozen=True)
class ProductShape:
    n1: int
    n2: int
    n: int = field(init=False)

    def __post_init__(self):
        if int(self.n1) < 1 or int(self.n2) < 1:
            raise ValueError("factor orders must be positive")
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "n2", int(self.n2))
        object.__setattr__(self, "n", self.n1 * self.n2)


def derive_matrices(g: DirectedGraph) -> GraphMatrices:
    a = g.weights.copy()
    d = np.diag(a.sum(axis=1))
    return GraphMatrices(adjacency=a, in_degree=d, laplacian=d - a, signless_laplacian=d + a)


def ugrm(g: DirectedGraph, p: UgrmParams) -> np.ndarray:
    """Return ``alpha * D + (2k - 1)(alpha - 1) * A``."""
    m = derive_matrices(g)
    out = p.alpha * m.in_degree + p.adjacency_coefficient * m.adjacency
    # adding +0.0 turns any -0.0 into +0.0 so degenerate points match D, A, L, Q bit for bit
    out += 0.0
    return out


def kronecker(a, b) -> np.ndarray:
    """Kronecker product with explicit block layout.

    Entry ``(i * p + s, j * q + t)`` equals ``a[i, j] * b[s, t]`` where
    ``b`` has shape ``(p, q)``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    m, n = a.shape
    p, q = b.shape
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(m * p, n * q)


def kron_sum(m1, m2) -> np.ndarray:
    """Kronecker sum ``m1 (x) I + I (x) m2`` of two square matrices."""
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    for name, m in (("m1", m1), ("m2", m2)):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"{name} must be square, got shape {m.shape}")
    n1, n2 = m1.shape[0], m2.shape[0]
    return kronecker(m1, np.eye(n2)) + kronecker(np.eye(n1), m2)


def cartesian_product(g1: DirectedGraph, g2: DirectedGraph) -> DirectedGraph:
    """Cartesian product graph on ``V1 x V2``.

    An edge joins ``(j1, j2) -> (i1, i2)`` when either ``i2 == j2`` and
    ``j1 -> i1`` in ``g1``, or ``i1 == j1`` and ``j2 -> i2`` in ``g2``.
    """
    n1, n2 = g1.n, g2.n
    w = np.zeros((n1 * n2, n1 * n2))
    # (i1, i2, j1, j2) view of the flat matrix
    view = w.reshape(n1, n2, n1, n2)
    for i2 in range(n2):
        view[:, i2, :, i2] += g1.weights
    for i1 in range(n1):
        view[i1, :, i1, :] += g2.weights
    labels = None
    if g1.labels is not None or g2.labels is not None:
        l1 = g1.labels or tuple(str(i) for i in range(n1))
        l2 = g2.labels or tuple(str(i) for i in range(n2))
        labels = tuple(f"{a}|{b}" for a in l1 for b in l2)
    return DirectedGraph(w, labels)


def vec(x) -> np.ndarray:
    """Stack the columns of ``x`` into one vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"vec expects a 2-D matrix, got ndim={x.ndim}")
    return x.reshape(-1, order="F")


def unvec(v, shape: ProductShape) -> np.ndarray:
    """Inverse of :func:`vec`; returns an ``(n2, n1)`` matrix."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != shape.n:
        raise ValueError(
            f"expected a vector of length {shape.n} for shape ({shape.n2}, {shape.n1}), "
            f"got shape {v.shape}"
        )
    return v.reshape(shape.n2, shape.n1, order="F")

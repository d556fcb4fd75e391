"""Signal / station CSV I/O, normalization and graph builders."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .gft import build_basis_product, gft_inverse, SpectrumPair
from .graph import DirectedGraph, ProductShape, UgrmParams, unvec

__all__ = [
    "SignalMatrix",
    "StationSet",
    "load_signal_csv",
    "save_signal_csv",
    "load_stations_csv",
    "save_stations_csv",
    "save_graph_csv",
    "load_graph_csv",
    "normalize",
    "denormalize",
    "knn_graph",
    "line_graph",
    "synthetic_stations",
    "synthetic_spatiotemporal",
]


class CsvFormatError(ValueError):
    """Raised for malformed CSV input; the message names the line and column."""


@dataclass(frozen=True, eq=False)
class SignalMatrix:
    """``values[i, t]``: observation at vertex ``i`` and time step ``t``.

    ``normalization`` holds the ``(mean, std)`` removed by :func:`normalize`.
    """

    values: np.ndarray
    row_labels: Optional[tuple] = None
    col_labels: Optional[tuple] = None
    normalization: Optional[tuple] = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError(f"signal must be a non-empty matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("signal has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        for name, size in (("row_labels", v.shape[0]), ("col_labels", v.shape[1])):
            labels = getattr(self, name)
            if labels is not None:
                labels = tuple(str(s) for s in labels)
                if len(labels) != size:
                    raise ValueError(f"{name} has {len(labels)} entries, expected {size}")
                object.__setattr__(self, name, labels)

    @property
    def shape(self) -> tuple:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class StationSet:
    coords: np.ndarray  # (N, 2): longitude, latitude
    labels: Optional[tuple] = None

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.ndim != 2 or c.shape[1] != 2 or c.shape[0] < 1:
            raise ValueError(f"coords must have shape (N, 2), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("station coordinates must be finite")
        if np.unique(c, axis=0).shape[0] != c.shape[0]:
            raise ValueError("two or more stations share identical coordinates")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != c.shape[0]:
                raise ValueError(f"got {len(labels)} labels for {c.shape[0]} stations")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.coords.shape[0]


def _is_number(cell: str) -> bool:
    try:
        return math.isfinite(float(cell))
    except ValueError:
        return False


def _read_rows(path) -> list:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1) if row]
    if not rows:
        raise CsvFormatError(f"{path}: file is empty")
    return rows


def load_signal_csv(path) -> SignalMatrix:
    """Read a numeric grid with an optional header row and label column.

    The first column holds labels when any body row starts with a
    non-numeric cell. The first row is a header when a cell past its first
    is non-numeric, or when only its first cell is non-numeric and no row
    below it carries a label.
    """
    rows = _read_rows(path)
    first = rows[0][1]
    labels_below = any(not _is_number(r[0]) for _, r in rows[1:])
    header = None
    if not all(_is_number(c) for c in first[1:]) or (
        not _is_number(first[0]) and len(rows) > 1 and not labels_below
    ):
        header = first
        rows = rows[1:]
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    has_labels = any(not _is_number(r[0]) for _, r in rows)
    width = len(rows[0][1])
    values, row_labels = [], []
    for lineno, row in rows:
        if len(row) != width:
            raise CsvFormatError(
                f"{path}: line {lineno} has {len(row)} fields, expected {width}"
            )
        cells = row[1:] if has_labels else row
        if has_labels:
            row_labels.append(row[0].strip())
        parsed = []
        for col, cell in enumerate(cells, start=2 if has_labels else 1):
            if not _is_number(cell):
                raise CsvFormatError(
                    f"{path}: line {lineno}, column {col}: non-numeric value {cell!r}"
                )
            parsed.append(float(cell))
        values.append(parsed)
    col_labels = None
    if header is not None:
        if len(header) != width:
            raise CsvFormatError(f"{path}: header has {len(header)} fields, expected {width}")
        col_labels = [h.strip() for h in (header[1:] if has_labels else header)]
    return SignalMatrix(
        np.array(values, dtype=float),
        row_labels=tuple(row_labels) if has_labels else None,
        col_labels=tuple(col_labels) if col_labels is not None else None,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_signal_csv(path, m: SignalMatrix | np.ndarray) -> None:
    """Write with 17 significant digits so values reload bit-exactly."""
    if not isinstance(m, SignalMatrix):
        m = SignalMatrix(m)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if m.col_labels is not None:
            w.writerow((["label"] if m.row_labels is not None else []) + list(m.col_labels))
        for i, row in enumerate(m.values):
            lead = [m.row_labels[i]] if m.row_labels is not None else []
            w.writerow(lead + [_fmt(x) for x in row])


def load_stations_csv(path) -> StationSet:
    """Read ``label,longitude,latitude`` rows after a header line."""
    rows = _read_rows(path)
    head = [c.strip().lower() for c in rows[0][1]]
    if head != ["label", "longitude", "latitude"]:
        raise CsvFormatError(
            f"{path}: line {rows[0][0]}: expected header 'label,longitude,latitude', got {','.join(rows[0][1])!r}"
        )
    labels, coords = [], []
    for lineno, row in rows[1:]:
        if len(row) != 3:
            raise CsvFormatError(f"{path}: line {lineno} has {len(row)} fields, expected 3")
        for col in (1, 2):
            if not _is_number(row[col]):
                raise CsvFormatError(
                    f"{path}: line {lineno}, column {col + 1}: non-numeric value {row[col]!r}"
                )
        labels.append(row[0].strip())
        coords.append((float(row[1]), float(row[2])))
    if not coords:
        raise CsvFormatError(f"{path}: no stations")
    return StationSet(np.array(coords), tuple(labels))


def save_stations_csv(path, s: StationSet) -> None:
    labels = s.labels or tuple(str(i) for i in range(s.n))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "longitude", "latitude"])
        for label, (x, y) in zip(labels, s.coords):
            w.writerow([label, _fmt(x), _fmt(y)])


def save_graph_csv(path, g: DirectedGraph) -> None:
    """Adjacency matrix with row = target, column = source."""
    labels = g.labels or tuple(str(i) for i in range(g.n))
    save_signal_csv(path, SignalMatrix(g.weights, row_labels=labels, col_labels=labels))


def load_graph_csv(path) -> DirectedGraph:
    m = load_signal_csv(path)
    return DirectedGraph(m.values, m.row_labels)


def normalize(m: SignalMatrix) -> SignalMatrix:
    """Global z-score: subtract the mean of all entries, divide by their std."""
    v = m.values
    mean = float(v.mean())
    std = float(v.std())
    if std == 0.0:
        raise ValueError("cannot normalize a constant signal (zero variance)")
    return SignalMatrix((v - mean) / std, m.row_labels, m.col_labels, (mean, std))


def denormalize(m: SignalMatrix, values=None) -> np.ndarray:
    """Undo :func:`normalize` on ``values`` (defaults to ``m.values``)."""
    if m.normalization is None:
        raise ValueError("signal carries no normalization record")
    mean, std = m.normalization
    v = m.values if values is None else np.asarray(values, dtype=float)
    return v * std + mean


def knn_graph(
    s: StationSet,
    neighbors: int = 5,
    bandwidth: float | str = "auto",
    reverse: bool = False,
) -> DirectedGraph:
    """Gaussian-kernel k-nearest-neighbour graph on planar coordinates.

    Each vertex ``i`` receives edges from its ``neighbors`` closest stations
    ``j`` with weight ``exp(-||p_i - p_j||^2 / bandwidth^2)``; equal
    distances prefer the lower index. ``bandwidth="auto"`` uses the mean of
    the retained neighbour distances. ``reverse=True`` flips every edge so
    ``i`` feeds its neighbours instead.
    """
    n = s.n
    if not 1 <= int(neighbors) < n:
        raise ValueError(f"neighbors must lie in [1, {n - 1}] for {n} stations, got {neighbors}")
    neighbors = int(neighbors)
    diff = s.coords[:, None, :] - s.coords[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    idx = np.arange(n)
    chosen = []
    for i in range(n):
        others = idx[idx != i]
        order = np.lexsort((others, dist[i, others]))
        chosen.append(others[order[:neighbors]])
    chosen = np.array(chosen)
    kept = dist[idx[:, None], chosen]
    if isinstance(bandwidth, str):
        if bandwidth != "auto":
            raise ValueError(f"bandwidth must be a positive number or 'auto', got {bandwidth!r}")
        bw = float(kept.mean())
    else:
        bw = float(bandwidth)
        if not (bw > 0 and math.isfinite(bw)):
            raise ValueError(f"bandwidth must be positive and finite, got {bandwidth!r}")
    w = np.zeros((n, n))
    weights = np.exp(-(kept**2) / bw**2)
    for i in range(n):
        if reverse:
            w[chosen[i], i] = weights[i]
        else:
            w[i, chosen[i]] = weights[i]
    return DirectedGraph(w, s.labels)


def line_graph(t: int) -> DirectedGraph:
    """Unweighted directed path ``0 -> 1 -> ... -> t-1``."""
    if int(t) < 1:
        raise ValueError(f"line graph needs t >= 1, got {t}")
    t = int(t)
    w = np.zeros((t, t))
    w[np.arange(1, t), np.arange(t - 1)] = 1.0
    return DirectedGraph(w)


def synthetic_stations(seed: int, n: int) -> StationSet:
    """``n`` distinct stations drawn uniformly from the unit square."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0]))
    coords = rng.random((n, 2))
    return StationSet(coords, tuple(f"s{i}" for i in range(n)))


def synthetic_spatiotemporal(
    seed: int, n: int, t: int, band: int, neighbors: int = 5
) -> SignalMatrix:
    """Bandlimited signal on ``line_graph(t) x knn_graph(stations)``.

    The signal is the inverse GFT of a spectrum whose first block carries
    seeded standard-normal coefficients on the first ``band`` components of
    the Laplacian GFT-I basis (the second block is zero). Returns an
    ``(n, t)`` matrix: rows are stations, columns time steps.
    """
    total = int(n) * int(t)
    if not 1 <= int(band) <= total:
        raise ValueError(f"band must lie in [1, {total}], got {band}")
    stations = synthetic_stations(seed, n)
    g_space = knn_graph(stations, neighbors=min(neighbors, n - 1)) if n > 1 else DirectedGraph(np.zeros((1, 1)))
    g_time = line_graph(t)
    basis = build_basis_product(g_time, g_space, UgrmParams(0.5, 1.0))
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1]))
    z1 = np.zeros(total)
    z1[:band] = rng.standard_normal(band)
    x = gft_inverse(basis, SpectrumPair(z1, np.zeros(total)))
    return SignalMatrix(
        unvec(x, ProductShape(t, n)),
        row_labels=stations.labels,
        col_labels=tuple(f"t{i}" for i in range(t)),
    )

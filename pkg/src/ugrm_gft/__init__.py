"""UGRM graph Fourier transforms on directed graphs and directed product graphs."""

from .data import (
    SignalMatrix,
    StationSet,
    knn_graph,
    line_graph,
    load_signal_csv,
    load_stations_csv,
    normalize,
    synthetic_spatiotemporal,
)
from .denoise import (
    DenoiseReport,
    GridConfig,
    NoiseConfig,
    add_noise,
    bae,
    baseline_basis,
    grid_search,
    metrics,
    snr_db,
)
from .estimators import BandlimitedDenoiser, GraphFourierTransform, UGRMGridSearch
from .gft import (
    FrequencyTable,
    GftBasis,
    SpectrumPair,
    bandlimit_reconstruct_I,
    bandlimit_reconstruct_II,
    build_basis_direct,
    build_basis_factored,
    gft_forward,
    gft_inverse,
)
from .graph import (
    DirectedGraph,
    GraphMatrices,
    ProductShape,
    UgrmParams,
    cartesian_product,
    derive_matrices,
    kron_sum,
    kronecker,
    ugrm,
    unvec,
    vec,
)
from .spectral import (
    EigFactorization,
    MonotonicityReport,
    SvdFactorization,
    eig_psd_ascending,
    monotonicity_report,
    svd_ascending,
)

__version__ = "0.1.0"

__all__ = [
    "BandlimitedDenoiser",
    "DenoiseReport",
    "DirectedGraph",
    "EigFactorization",
    "FrequencyTable",
    "GftBasis",
    "GraphFourierTransform",
    "GraphMatrices",
    "GridConfig",
    "MonotonicityReport",
    "NoiseConfig",
    "ProductShape",
    "SignalMatrix",
    "SpectrumPair",
    "StationSet",
    "SvdFactorization",
    "UGRMGridSearch",
    "UgrmParams",
    "add_noise",
    "bae",
    "bandlimit_reconstruct_I",
    "bandlimit_reconstruct_II",
    "baseline_basis",
    "build_basis_direct",
    "build_basis_factored",
    "cartesian_product",
    "derive_matrices",
    "eig_psd_ascending",
    "gft_forward",
    "gft_inverse",
    "grid_search",
    "knn_graph",
    "kron_sum",
    "kronecker",
    "line_graph",
    "load_signal_csv",
    "load_stations_csv",
    "metrics",
    "monotonicity_report",
    "normalize",
    "snr_db",
    "svd_ascending",
    "synthetic_spatiotemporal",
    "ugrm",
    "unvec",
    "vec",
]

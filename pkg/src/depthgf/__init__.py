"""Color-guided depth-map denoising by fast polynomial graph filtering."""

from .errors import (
    AlignmentError,
    CapacityError,
    DepthgfError,
    FitError,
    FormatError,
    InputDomainError,
    NumericOverflowError,
    UndefinedRatioError,
)
from .fir import (
    FilterDesign,
    FirCoefficients,
    apply_fir,
    apply_fir_native,
    butterworth_response,
    count_dense_operations,
    fit_for_laplacian,
    fit_polynomial,
    lambda_max_bound,
)
from .graph import (
    PixelDatum,
    SimilarityGraph,
    SparseLaplacian,
    WeightParams,
    build_similarity_graph,
    edge_weight,
    extract_depth_signal,
    insert_depth_signal,
    laplacian,
    vertex_index,
)
from .imaging import (
    RgbdImage,
    add_awgn,
    downsample,
    load_rgbd,
    psnr,
    rgb_to_lab,
    save_depth,
)
from .pipeline import (
    DenoiseConfig,
    IterationRecord,
    default_config,
    denoise,
    update_params,
)
from .spectral import (
    SpectralDecomposition,
    band_energy,
    eigendecompose,
    gft,
    igft,
    spectral_filter,
)
from .synthetic import make_synthetic_scene

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "CapacityError",
    "DepthgfError",
    "DenoiseConfig",
    "FilterDesign",
    "FirCoefficients",
    "FitError",
    "FormatError",
    "InputDomainError",
    "IterationRecord",
    "NumericOverflowError",
    "PixelDatum",
    "RgbdImage",
    "SimilarityGraph",
    "SparseLaplacian",
    "SpectralDecomposition",
    "UndefinedRatioError",
    "WeightParams",
    "add_awgn",
    "apply_fir",
    "apply_fir_native",
    "band_energy",
    "build_similarity_graph",
    "butterworth_response",
    "count_dense_operations",
    "default_config",
    "denoise",
    "downsample",
    "edge_weight",
    "eigendecompose",
    "extract_depth_signal",
    "fit_for_laplacian",
    "fit_polynomial",
    "gft",
    "igft",
    "insert_depth_signal",
    "lambda_max_bound",
    "laplacian",
    "load_rgbd",
    "make_synthetic_scene",
    "psnr",
    "rgb_to_lab",
    "save_depth",
    "spectral_filter",
    "update_params",
    "vertex_index",
]

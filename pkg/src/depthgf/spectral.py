"""Dense, exact spectral-domain machinery: the slow reference path.

Eigendecomposition of the graph Laplacian yields graph frequencies
(eigenvalues) and a Fourier-like orthonormal basis (eigenvectors). Filtering
here costs a full O(n^3) decomposition, so this module is deliberately
limited to small instances by a capacity cap; the vertex-domain FIR path is
the production route. Everything here is a pure function over immutable
inputs and safe for concurrent calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import CapacityError, InputDomainError, UndefinedRatioError
from .graph import SparseLaplacian

ORACLE_CAP_DEFAULT = 20_000


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigendecomposition L = U diag(eigenvalues) U^T.

    Eigenvalues ascend; column i of ``eigenvectors`` pairs with
    ``eigenvalues[i]``. For repeated eigenvalues any orthonormal basis of the
    eigenspace may appear; downstream comparisons are basis-invariant.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]


def eigendecompose(
    lap: SparseLaplacian, cap: int = ORACLE_CAP_DEFAULT
) -> SpectralDecomposition:
    """Full dense eigendecomposition of a sparse Laplacian.

    Refuses instances above ``cap`` vertices: the dense path exists as a
    correctness oracle and spectrum diagnostic, not a production route.
    """
    n = lap.dimension
    if n > cap:
        raise CapacityError(
            f"{n} vertices exceed the dense-oracle cap of {cap}; "
            "downsample the input or raise the cap"
        )
    dense = lap.matrix.toarray()
    eigenvalues, eigenvectors = scipy.linalg.eigh(
        dense, overwrite_a=True, check_finite=False
    )
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def gft(decomp: SpectralDecomposition, signal: np.ndarray) -> np.ndarray:
    """Graph Fourier transform: project a vertex signal onto the eigenbasis."""
    signal = np.asarray(signal, dtype=np.float64)
    if signal.shape != (decomp.dimension,):
        raise InputDomainError(
            f"signal length {signal.shape} does not match dimension {decomp.dimension}"
        )
    return decomp.eigenvectors.T @ signal


def igft(decomp: SpectralDecomposition, coefficients: np.ndarray) -> np.ndarray:
    """Inverse graph Fourier transform: synthesize a vertex signal."""
    coefficients = np.asarray(coefficients, dtype=np.float64)
    if coefficients.shape != (decomp.dimension,):
        raise InputDomainError(
            f"coefficient length {coefficients.shape} does not match "
            f"dimension {decomp.dimension}"
        )
    return decomp.eigenvectors @ coefficients


def _gains(decomp: SpectralDecomposition, response: Callable) -> np.ndarray:
    gains = response(decomp.eigenvalues)
    gains = np.asarray(gains, dtype=np.float64)
    if gains.shape != decomp.eigenvalues.shape:  # non-vectorized callable
        gains = np.array(
            [float(response(lam)) for lam in decomp.eigenvalues], dtype=np.float64
        )
    return gains


def spectral_filter(
    decomp: SpectralDecomposition, signal: np.ndarray, response: Callable
) -> np.ndarray:
    """Exact graph spectral filtering: per-frequency gain in the eigenbasis.

    ``response`` maps eigenvalue -> gain; it may be vectorized or scalar.
    """
    fhat = gft(decomp, signal)
    return decomp.eigenvectors @ (_gains(decomp, response) * fhat)


def band_energy(
    decomp: SpectralDecomposition, signal: np.ndarray, band_fraction: float
) -> float:
    """Fraction of signal energy in the lowest-frequency band.

    The band holds the ceil(band_fraction * N) smallest graph frequencies.
    """
    if not (0.0 < band_fraction <= 1.0):
        raise InputDomainError("band_fraction must lie in (0, 1]")
    fhat = gft(decomp, signal)
    total = float(fhat @ fhat)
    if total == 0.0:
        raise UndefinedRatioError("band energy undefined for an all-zero signal")
    band = int(np.ceil(band_fraction * decomp.dimension))
    low = float(fhat[:band] @ fhat[:band])
    return low / total


def spectrum_table(decomp: SpectralDecomposition, signal: np.ndarray) -> np.ndarray:
    """Two-column table (eigenvalue, |spectral coefficient|) for plotting."""
    fhat = gft(decomp, signal)
    return np.column_stack([decomp.eigenvalues, np.abs(fhat)])

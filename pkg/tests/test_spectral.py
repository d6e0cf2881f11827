import numpy as np
import pytest
import scipy.sparse as sp

from depthgf.errors import CapacityError, InputDomainError, UndefinedRatioError
from depthgf.fir import FirCoefficients, apply_fir_native
from depthgf.graph import (
    SimilarityGraph,
    SparseLaplacian,
    build_similarity_graph,
    extract_depth_signal,
    laplacian,
)
from depthgf.imaging import add_awgn
from depthgf.spectral import (
    band_energy,
    eigendecompose,
    gft,
    igft,
    spectral_filter,
    spectrum_table,
)

from conftest import random_params, random_rgbd


def path_laplacian(w: float) -> SparseLaplacian:
    adj = sp.csr_matrix(np.array([[0.0, w], [w, 0.0]]))
    return laplacian(SimilarityGraph(adjacency=adj, dims=(2, 1)))


def cycle_laplacian() -> SparseLaplacian:
    adj = sp.csr_matrix(1.0 - np.eye(3))
    return laplacian(SimilarityGraph(adjacency=adj, dims=(3, 1)))


def random_laplacian(seed: int, rows: int = 8, cols: int = 7):
    image = random_rgbd(seed, rows, cols)
    lap = laplacian(build_similarity_graph(image, random_params(seed)))
    return lap, extract_depth_signal(image)


class TestEigendecompose:
    def test_two_path_analytic_spectrum(self):
        decomp = eigendecompose(path_laplacian(0.8))
        assert decomp.eigenvalues == pytest.approx([0.0, 1.6], abs=1e-12)

    def test_three_cycle_analytic_spectrum(self):
        decomp = eigendecompose(cycle_laplacian())
        assert decomp.eigenvalues == pytest.approx([0.0, 3.0, 3.0], abs=1e-12)

    def test_smallest_eigenvalue_zero_with_constant_vector(self):
        lap, _ = random_laplacian(0)
        decomp = eigendecompose(lap)
        lam_max = decomp.eigenvalues[-1]
        assert decomp.eigenvalues[0] >= -1e-9 * lam_max
        assert abs(decomp.eigenvalues[0]) <= 1e-9 * max(lam_max, 1.0)
        # L @ constant = 0, so the constant vector lies in the 0-eigenspace.
        n = lap.dimension
        constant = np.ones(n) / np.sqrt(n)
        assert np.linalg.norm(lap.matvec(constant)) <= 1e-9 * max(lam_max, 1.0)

    def test_orthonormality_and_reconstruction(self):
        for seed in (1, 2, 3):
            lap, _ = random_laplacian(seed)
            decomp = eigendecompose(lap)
            U = decomp.eigenvectors
            n = lap.dimension
            assert np.max(np.abs(U.T @ U - np.eye(n))) <= 1e-9
            rebuilt = U @ np.diag(decomp.eigenvalues) @ U.T
            lam_max = max(decomp.eigenvalues[-1], 1e-30)
            assert np.max(np.abs(rebuilt - lap.matrix.toarray())) <= 1e-8 * lam_max

    def test_eigenvalues_sorted_ascending(self):
        lap, _ = random_laplacian(4)
        decomp = eigendecompose(lap)
        assert np.all(np.diff(decomp.eigenvalues) >= 0.0)

    def test_capacity_cap_enforced(self):
        lap, _ = random_laplacian(5)
        with pytest.raises(CapacityError):
            eigendecompose(lap, cap=lap.dimension - 1)


class TestGftIgft:
    def test_constant_signal_concentrates_at_dc(self):
        # Uniform image -> all weights 1 -> connected grid, so the
        # frequency-zero eigenspace is spanned by the constant vector alone.
        from depthgf.graph import WeightParams
        from depthgf.imaging import RgbdImage

        image = RgbdImage.from_rgb_depth(
            np.full((6, 6, 3), 80, np.uint8), np.full((6, 6), 1.0)
        )
        lap = laplacian(
            build_similarity_graph(image, WeightParams(10.0, 5.0, 5.0, 5.0))
        )
        decomp = eigendecompose(lap)
        n = lap.dimension
        fhat = gft(decomp, np.full(n, 3.0))
        assert abs(fhat[0]) == pytest.approx(3.0 * np.sqrt(n), rel=1e-10)
        assert np.max(np.abs(fhat[1:])) <= 1e-9 * np.sqrt(n)

    def test_round_trip_and_parseval(self):
        lap, signal = random_laplacian(7)
        decomp = eigendecompose(lap)
        fhat = gft(decomp, signal)
        assert igft(decomp, fhat) == pytest.approx(signal, rel=1e-10)
        assert np.linalg.norm(fhat) == pytest.approx(
            np.linalg.norm(signal), rel=1e-10
        )

    def test_length_mismatch_rejected(self):
        lap, _ = random_laplacian(8)
        decomp = eigendecompose(lap)
        with pytest.raises(InputDomainError):
            gft(decomp, np.zeros(lap.dimension + 1))
        with pytest.raises(InputDomainError):
            igft(decomp, np.zeros(lap.dimension + 1))


class TestSpectralFilter:
    def test_identity_response(self):
        lap, signal = random_laplacian(9)
        decomp = eigendecompose(lap)
        out = spectral_filter(decomp, signal, lambda lam: np.ones_like(lam))
        assert out == pytest.approx(signal, rel=1e-10)

    def test_zero_response(self):
        lap, signal = random_laplacian(10)
        decomp = eigendecompose(lap)
        out = spectral_filter(decomp, signal, lambda lam: np.zeros_like(lam))
        assert np.max(np.abs(out)) <= 1e-10 * np.max(np.abs(signal))

    def test_linear_response_equals_sparse_multiply(self):
        lap, signal = random_laplacian(11)
        decomp = eigendecompose(lap)
        out = spectral_filter(decomp, signal, lambda lam: lam)
        direct = lap.matvec(signal)
        scale = max(np.max(np.abs(direct)), 1e-30)
        assert np.max(np.abs(out - direct)) <= 1e-9 * scale

    def test_scalar_response_callable_accepted(self):
        lap, signal = random_laplacian(12)
        decomp = eigendecompose(lap)
        out_scalar = spectral_filter(decomp, signal, lambda lam: 0.5)
        assert out_scalar == pytest.approx(0.5 * signal, rel=1e-10)

    def test_constant_signal_scaled_by_dc_gain(self):
        lap, _ = random_laplacian(13)
        decomp = eigendecompose(lap)
        constant = np.full(lap.dimension, 7.0)
        out = spectral_filter(decomp, constant, lambda lam: np.exp(-lam))
        assert out == pytest.approx(constant, rel=1e-9)  # h(0) = 1

    def test_polynomial_response_matches_native_fir(self):
        for seed in (14, 15, 16):
            lap, signal = random_laplacian(seed)
            decomp = eigendecompose(lap)
            scale = 2.0 * max(lap.max_degree, 1.0)
            coeffs = np.array([0.9, -1.5, 0.7, -0.2, 0.05])
            fir = FirCoefficients(
                coeffs=coeffs, lambda_scale=scale, fit_residual=0.0
            )

            def poly(lam):
                s = lam / scale
                value = np.zeros_like(s)
                for c in coeffs[::-1]:
                    value = value * s + c
                return value

            exact = spectral_filter(decomp, signal, poly)
            fast = apply_fir_native(lap, signal, fir)
            bound = 1e-8 * max(np.max(np.abs(signal)), 1.0)
            assert np.max(np.abs(exact - fast)) <= bound


class TestBandEnergy:
    def test_constant_signal_fully_low_band(self):
        # Constant image -> connected graph -> all energy at frequency zero.
        image = random_rgbd(17, 5, 5)
        flat = image.with_depth(np.full_like(image.depth, 9.0))
        lap = laplacian(
            build_similarity_graph(flat, random_params(17))
        )
        decomp = eigendecompose(lap)
        signal = extract_depth_signal(flat)
        assert band_energy(decomp, signal, 0.05) == pytest.approx(1.0, abs=1e-12)

    def test_full_band_is_one(self):
        lap, signal = random_laplacian(18)
        decomp = eigendecompose(lap)
        assert band_energy(decomp, signal, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_zero_signal_rejected(self):
        lap, _ = random_laplacian(19)
        decomp = eigendecompose(lap)
        with pytest.raises(UndefinedRatioError):
            band_energy(decomp, np.zeros(lap.dimension), 0.1)

    def test_band_fraction_domain(self):
        lap, signal = random_laplacian(20)
        decomp = eigendecompose(lap)
        with pytest.raises(InputDomainError):
            band_energy(decomp, signal, 0.0)
        with pytest.raises(InputDomainError):
            band_energy(decomp, signal, 1.2)

    def test_noise_lowers_low_band_fraction_same_graph(self):
        # Clean piecewise-constant depth versus its noisy version, analyzed
        # on the same (clean-image) graph.
        from depthgf.synthetic import make_synthetic_scene

        scene = make_synthetic_scene(width=36, height=30)
        params = random_params(21)
        lap = laplacian(build_similarity_graph(scene, params))
        decomp = eigendecompose(lap)
        clean = extract_depth_signal(scene)
        clean_frac = band_energy(decomp, clean, 0.1)
        for seed in range(3):
            noisy = add_awgn(
                scene.depth, sigma=30.0, seed=seed
            ).ravel(order="F")
            noisy_frac = band_energy(decomp, noisy, 0.1)
            assert clean_frac > noisy_frac


class TestSpectrumTable:
    def test_columns_are_frequency_and_magnitude(self):
        lap, signal = random_laplacian(22)
        decomp = eigendecompose(lap)
        table = spectrum_table(decomp, signal)
        assert table.shape == (lap.dimension, 2)
        assert np.array_equal(table[:, 0], decomp.eigenvalues)
        assert np.all(table[:, 1] >= 0.0)
        assert np.sum(table[:, 1] ** 2) == pytest.approx(
            float(signal @ signal), rel=1e-10
        )

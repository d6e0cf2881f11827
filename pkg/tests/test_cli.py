import numpy as np
import pytest

from depthgf.bench import discover_pairs, run_benchmark
from depthgf.cli import main
from depthgf.imaging import psnr, read_image, write_image
from depthgf.synthetic import make_synthetic_scene


@pytest.fixture()
def scene_files(tmp_path):
    code = main(
        [
            "make-synthetic",
            "--out-dir",
            str(tmp_path),
            "--width",
            "64",
            "--height",
            "56",
        ]
    )
    assert code == 0
    return tmp_path / "synthetic_color.ppm", tmp_path / "synthetic_depth.pgm"


class TestMakeSynthetic:
    def test_writes_loadable_pair(self, scene_files):
        color_path, depth_path = scene_files
        color = read_image(color_path)
        depth = read_image(depth_path)
        assert color.shape == (56, 64, 3)
        assert depth.shape == (56, 64)

    def test_reproducible(self, tmp_path):
        for sub in ("a", "b"):
            assert (
                main(
                    [
                        "make-synthetic",
                        "--out-dir",
                        str(tmp_path / sub),
                        "--width",
                        "32",
                        "--height",
                        "32",
                    ]
                )
                == 0
            )
        a = (tmp_path / "a" / "synthetic_depth.pgm").read_bytes()
        b = (tmp_path / "b" / "synthetic_depth.pgm").read_bytes()
        assert a == b

    def test_png_format(self, tmp_path):
        assert (
            main(
                [
                    "make-synthetic",
                    "--out-dir",
                    str(tmp_path),
                    "--width",
                    "24",
                    "--height",
                    "24",
                    "--format",
                    "png",
                ]
            )
            == 0
        )
        assert (tmp_path / "synthetic_color.png").exists()
        assert (tmp_path / "synthetic_depth.png").exists()


class TestSynthesize:
    def test_sigma_zero_identity(self, scene_files, tmp_path):
        _, depth_path = scene_files
        out = tmp_path / "noisy.pgm"
        assert (
            main(
                [
                    "synthesize",
                    "--depth",
                    str(depth_path),
                    "--sigma",
                    "0",
                    "--seed",
                    "4",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        assert np.array_equal(read_image(out), read_image(depth_path))

    def test_same_seed_byte_identical(self, scene_files, tmp_path):
        _, depth_path = scene_files
        outs = []
        for name in ("n1.pgm", "n2.pgm"):
            out = tmp_path / name
            assert (
                main(
                    [
                        "synthesize",
                        "--depth",
                        str(depth_path),
                        "--sigma",
                        "25",
                        "--seed",
                        "11",
                        "--out",
                        str(out),
                    ]
                )
                == 0
            )
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_sigma_fifty_psnr_range(self, tmp_path):
        # Clamping raises measured PSNR above the unclamped 14.15 dB figure.
        scene = make_synthetic_scene(width=256, height=224)
        depth_path = tmp_path / "depth.pgm"
        write_image(depth_path, scene.depth.astype(np.uint8))
        out = tmp_path / "noisy.pgm"
        assert (
            main(
                [
                    "synthesize",
                    "--depth",
                    str(depth_path),
                    "--sigma",
                    "50",
                    "--seed",
                    "0",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        measured = psnr(
            read_image(depth_path).astype(float), read_image(out).astype(float)
        )
        assert 13.5 <= measured <= 15.5

    def test_missing_file_exit_code(self, tmp_path, capsys):
        code = main(
            [
                "synthesize",
                "--depth",
                str(tmp_path / "absent.pgm"),
                "--sigma",
                "10",
                "--out",
                str(tmp_path / "o.pgm"),
            ]
        )
        assert code == 2
        assert "category=file" in capsys.readouterr().err


class TestDenoiseCommand:
    def test_constant_image_round_trips_bytes(self, tmp_path):
        color = np.full((24, 20, 3), 120, np.uint8)
        depth = np.full((24, 20), 88, np.uint8)
        write_image(tmp_path / "c.ppm", color)
        write_image(tmp_path / "d.pgm", depth)
        out = tmp_path / "out.pgm"
        code = main(
            [
                "denoise",
                "--color",
                str(tmp_path / "c.ppm"),
                "--depth",
                str(tmp_path / "d.pgm"),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert out.read_bytes() == (tmp_path / "d.pgm").read_bytes()

    def test_summary_line_and_artifacts(self, scene_files, tmp_path, capsys):
        color_path, depth_path = scene_files
        noisy = tmp_path / "noisy.pgm"
        main(
            [
                "synthesize",
                "--depth",
                str(depth_path),
                "--sigma",
                "20",
                "--seed",
                "1",
                "--out",
                str(noisy),
            ]
        )
        capsys.readouterr()
        out = tmp_path / "denoised.pgm"
        dump = tmp_path / "dump"
        code = main(
            [
                "denoise",
                "--color",
                str(color_path),
                "--depth",
                str(noisy),
                "--out",
                str(out),
                "--sigma",
                "20",
                "--reference",
                str(depth_path),
                "--dump-dir",
                str(dump),
                "--iterations",
                "4",
            ]
        )
        assert code == 0
        line = capsys.readouterr().out.strip()
        assert line.startswith("denoise status=ok")
        fields = dict(
            part.split("=", 1) for part in line.split() if "=" in part
        )
        assert fields["iterations"] == "4"
        assert float(fields["psnr_denoised"]) > float(fields["psnr_noisy"])
        assert (dump / "depth_04.pgm").exists()
        assert (dump / "edges_01.pgm").exists()
        assert (dump / "filter_01.png").exists()
        # summary PSNR values are recomputable from the files
        recomputed = psnr(
            read_image(depth_path).astype(float), read_image(out).astype(float)
        )
        assert abs(recomputed - float(fields["psnr_denoised"])) <= 0.51

    def test_env_override_and_flag_precedence(
        self, scene_files, tmp_path, capsys, monkeypatch
    ):
        color_path, depth_path = scene_files
        monkeypatch.setenv("DEPTHGF_ITERATIONS", "2")
        out = tmp_path / "o.pgm"
        code = main(
            [
                "denoise",
                "--color",
                str(color_path),
                "--depth",
                str(depth_path),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        line = capsys.readouterr().out
        assert "iterations=2" in line
        code = main(
            [
                "denoise",
                "--color",
                str(color_path),
                "--depth",
                str(depth_path),
                "--out",
                str(out),
                "--iterations",
                "3",
            ]
        )
        assert code == 0
        assert "iterations=3" in capsys.readouterr().out

    def test_config_file_applied(self, scene_files, tmp_path, capsys):
        color_path, depth_path = scene_files
        cfg = tmp_path / "d.cfg"
        cfg.write_text("iterations = 5\npoly_degree = 6\n")
        out = tmp_path / "o.pgm"
        code = main(
            [
                "denoise",
                "--color",
                str(color_path),
                "--depth",
                str(depth_path),
                "--out",
                str(out),
                "--config",
                str(cfg),
            ]
        )
        assert code == 0
        assert "iterations=5" in capsys.readouterr().out

    def test_alignment_error_exit_code(self, tmp_path, capsys):
        write_image(tmp_path / "c.ppm", np.zeros((4, 4, 3), np.uint8))
        write_image(tmp_path / "d.pgm", np.zeros((4, 5), np.uint8))
        code = main(
            [
                "denoise",
                "--color",
                str(tmp_path / "c.ppm"),
                "--depth",
                str(tmp_path / "d.pgm"),
            ]
        )
        assert code == 4
        assert "category=alignment" in capsys.readouterr().err


class TestSpectrumCommand:
    def test_constant_depth_concentrates_energy(self, tmp_path, capsys):
        color = np.full((10, 12, 3), 90, np.uint8)
        depth = np.full((10, 12), 66, np.uint8)
        write_image(tmp_path / "c.ppm", color)
        write_image(tmp_path / "d.pgm", depth)
        code = main(
            [
                "spectrum",
                "--color",
                str(tmp_path / "c.ppm"),
                "--depth",
                str(tmp_path / "d.pgm"),
                "--out-dir",
                str(tmp_path / "spec"),
            ]
        )
        assert code == 0
        line = capsys.readouterr().out
        fields = dict(p.split("=", 1) for p in line.split() if "=" in p)
        assert float(fields["clean_low_band"]) == pytest.approx(1.0, abs=1e-9)
        table = np.loadtxt(tmp_path / "spec" / "spectrum_clean.tsv")
        assert table.shape == (120, 2)
        # all magnitude off the zero frequency is numerically zero
        assert table[1:, 1].max() <= 1e-9 * table[:, 1].max()
        assert not (tmp_path / "spec" / "spectrum_noisy.tsv").exists()
        assert (tmp_path / "spec" / "spectrum.png").exists()

    def test_noisy_variant_lowers_band_fraction(self, scene_files, tmp_path, capsys):
        color_path, depth_path = scene_files
        code = main(
            [
                "spectrum",
                "--color",
                str(color_path),
                "--depth",
                str(depth_path),
                "--sigma",
                "30",
                "--seed",
                "2",
                "--out-dir",
                str(tmp_path / "spec"),
            ]
        )
        assert code == 0
        fields = dict(
            p.split("=", 1)
            for p in capsys.readouterr().out.split()
            if "=" in p
        )
        assert float(fields["noisy_low_band"]) < float(fields["clean_low_band"])
        assert (tmp_path / "spec" / "spectrum_noisy.tsv").exists()

    def test_capacity_error_suggests_downsampling(self, scene_files, tmp_path, capsys):
        color_path, depth_path = scene_files
        code = main(
            [
                "spectrum",
                "--color",
                str(color_path),
                "--depth",
                str(depth_path),
                "--oracle-cap",
                "100",
                "--out-dir",
                str(tmp_path / "spec"),
            ]
        )
        assert code == 5
        err = capsys.readouterr().err
        assert "category=capacity" in err
        assert "downsample" in err


class TestBenchmarkCommand:
    def test_single_cell_benchmark(self, scene_files, tmp_path, capsys):
        color_path, depth_path = scene_files
        dataset = color_path.parent
        out_dir = tmp_path / "bench"
        code = main(
            [
                "benchmark",
                "--dataset",
                str(dataset),
                "--sigmas",
                "10",
                "--seeds",
                "0,1,2",
                "--out-dir",
                str(out_dir),
                "--iterations",
                "3",
                "--timing-runs",
                "1",
                "--warmup-runs",
                "0",
            ]
        )
        assert code == 0
        table = (out_dir / "report.txt").read_text()
        assert "synthetic" in table
        structured = (out_dir / "report.tsv").read_text()
        cells = [l for l in structured.splitlines() if l.startswith("cell\t")]
        assert len(cells) == 1
        parts = cells[0].split("\t")
        assert parts[1] == "synthetic"
        assert parts[3] == "0,1,2"
        assert (out_dir / "psnr_vs_sigma.png").exists()
        assert (out_dir / "timing_stages.png").exists()

    def test_report_psnr_matches_artifacts(self, scene_files, tmp_path):
        color_path, depth_path = scene_files
        out_dir = tmp_path / "bench"
        pairs = discover_pairs(color_path.parent)
        report = run_benchmark(
            pairs,
            sigmas=[15.0],
            seeds=[0, 1],
            out_dir=out_dir,
            config_overrides={"iterations": 2},
            timing_runs=1,
            warmup_runs=0,
        )
        cell = report.cells[0]
        clean = read_image(depth_path).astype(float)
        recomputed = []
        for seed in (0, 1):
            path = out_dir / "artifacts" / f"synthetic_s15_seed{seed}_denoised.pgm"
            recomputed.append(psnr(clean, read_image(path).astype(float)))
        assert cell.denoised_psnr == pytest.approx(
            float(np.mean(recomputed)), abs=1e-9
        )

    def test_reproducible_psnr_cells(self, scene_files, tmp_path):
        color_path, _ = scene_files
        pairs = discover_pairs(color_path.parent)
        values = []
        for sub in ("r1", "r2"):
            report = run_benchmark(
                pairs,
                sigmas=[20.0],
                seeds=[3],
                out_dir=tmp_path / sub,
                config_overrides={"iterations": 2},
                timing_runs=1,
                warmup_runs=0,
            )
            values.append(
                (report.cells[0].noisy_psnr, report.cells[0].denoised_psnr)
            )
        assert values[0] == values[1]

    def test_empty_sigma_list_empty_report(self, scene_files, tmp_path, capsys):
        color_path, _ = scene_files
        code = main(
            [
                "benchmark",
                "--dataset",
                str(color_path.parent),
                "--sigmas",
                "",
                "--seeds",
                "0",
                "--out-dir",
                str(tmp_path / "bench"),
            ]
        )
        assert code == 0
        structured = (tmp_path / "bench" / "report.tsv").read_text()
        assert not any(l.startswith("cell\t") for l in structured.splitlines())

    def test_workers_parallel_matches_serial(self, scene_files, tmp_path):
        color_path, _ = scene_files
        pairs = discover_pairs(color_path.parent)
        reports = []
        for workers, sub in ((1, "serial"), (2, "parallel")):
            reports.append(
                run_benchmark(
                    pairs,
                    sigmas=[10.0, 20.0],
                    seeds=[0],
                    out_dir=tmp_path / sub,
                    config_overrides={"iterations": 2},
                    workers=workers,
                    timing_runs=1,
                    warmup_runs=0,
                )
            )
        serial, parallel = reports
        for c_serial, c_parallel in zip(serial.cells, parallel.cells):
            assert c_serial.denoised_psnr == c_parallel.denoised_psnr

    def test_missing_dataset_dir_is_error(self, tmp_path, capsys):
        code = main(
            [
                "benchmark",
                "--dataset",
                str(tmp_path / "none"),
                "--out-dir",
                str(tmp_path / "bench"),
            ]
        )
        assert code == 2

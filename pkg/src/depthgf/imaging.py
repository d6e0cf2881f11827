"""Image ingestion/export, CIELAB conversion, noise synthesis, and metrics.

Depth maps are treated as 8-bit intensity images ([0, 255] depth levels) and
kept as float64 planes in memory; quantization back to integers happens only
on export. Color guidance uses the A/B chroma channels of CIELAB so that
lightness variations do not influence edge weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import AlignmentError, FormatError, InputDomainError

# sRGB (IEC 61966-2-1) -> XYZ, D65 reference white, 2-degree observer.
_SRGB_TO_XYZ = np.array(
    [
        [0.4124, 0.3576, 0.1805],
        [0.2126, 0.7152, 0.0722],
        [0.0193, 0.1192, 0.9505],
    ]
)
# White point taken as the matrix row sums (the image of RGB white), so
# grays land exactly on the neutral axis a* = b* = 0.
_D65_WHITE = _SRGB_TO_XYZ.sum(axis=1)
_CIE_EPS = 216.0 / 24389.0
_CIE_KAPPA = 24389.0 / 27.0

PEAK_LEVEL = 255.0


def _lab_from_srgb(rgb: np.ndarray) -> np.ndarray:
    """Vectorized sRGB(8-bit) -> CIELAB for an (..., 3) array."""
    c = np.asarray(rgb, dtype=np.float64) / 255.0
    linear = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _SRGB_TO_XYZ.T
    t = xyz / _D65_WHITE
    f = np.where(t > _CIE_EPS, np.cbrt(t), (_CIE_KAPPA * t + 16.0) / 116.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def rgb_to_lab(r: float, g: float, b: float) -> tuple[float, float, float]:
    """Convert one 8-bit sRGB triplet to CIELAB (L*, a*, b*), D65 white.

    Gray inputs (r = g = b) map onto the neutral axis: a* = b* = 0.
    """
    lab = _lab_from_srgb(np.array([r, g, b], dtype=np.float64))
    return float(lab[0]), float(lab[1]), float(lab[2])


@dataclass(frozen=True)
class RgbdImage:
    """An aligned RGB-D image: depth plane plus CIELAB chroma guidance.

    All planes share dimensions (M rows, N columns). ``lab_a``/``lab_b`` are
    derived from ``source_rgb`` and must never be edited independently of it.
    Instances are treated as immutable after construction and are safe to
    share across concurrent workers.
    """

    depth: np.ndarray  # float64 (M, N), depth levels in [0, 255]
    lab_a: np.ndarray  # float64 (M, N)
    lab_b: np.ndarray  # float64 (M, N)
    source_rgb: np.ndarray  # uint8 (M, N, 3)

    @property
    def height(self) -> int:
        return self.depth.shape[0]

    @property
    def width(self) -> int:
        return self.depth.shape[1]

    @classmethod
    def from_rgb_depth(cls, rgb: np.ndarray, depth: np.ndarray) -> "RgbdImage":
        """Build an RgbdImage from an (M,N,3) uint8 color array and an
        (M,N) depth plane, deriving the CIELAB chroma planes."""
        rgb = np.asarray(rgb)
        depth = np.asarray(depth, dtype=np.float64)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise FormatError("color array must have shape (M, N, 3)")
        if depth.ndim != 2:
            raise FormatError("depth array must have shape (M, N)")
        if rgb.shape[:2] != depth.shape:
            raise AlignmentError(
                f"color {rgb.shape[:2]} and depth {depth.shape} dimensions differ"
            )
        if depth.size and (depth.min() < 0.0 or depth.max() > PEAK_LEVEL):
            raise InputDomainError("depth values must lie in [0, 255]")
        lab = _lab_from_srgb(rgb)
        return cls(
            depth=depth.copy(),
            lab_a=lab[..., 1],
            lab_b=lab[..., 2],
            source_rgb=np.ascontiguousarray(rgb, dtype=np.uint8),
        )

    def with_depth(self, depth: np.ndarray) -> "RgbdImage":
        """Return a copy sharing color planes but carrying a new depth plane."""
        depth = np.asarray(depth, dtype=np.float64)
        if depth.shape != self.depth.shape:
            raise AlignmentError("replacement depth plane has different dimensions")
        return RgbdImage(
            depth=depth.copy(),
            lab_a=self.lab_a,
            lab_b=self.lab_b,
            source_rgb=self.source_rgb,
        )


# ---------------------------------------------------------------------------
# File I/O: 8-bit PNG via Pillow, binary PGM/PPM via a small built-in codec.
# ---------------------------------------------------------------------------

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _read_pnm(data: bytes, path: str) -> np.ndarray:
    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(data):
            ch = data[pos : pos + 1]
            if ch == b"#":
                while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PNM header")
        return data[start:pos]

    magic = next_token()
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"{path}: unsupported PNM magic {magic!r} (binary P5/P6 only)")
    width = int(next_token())
    height = int(next_token())
    maxval = int(next_token())
    if maxval != 255:
        raise FormatError(f"{path}: unsupported maxval {maxval} (8-bit, maxval 255 only)")
    pos += 1  # single whitespace byte separates header from raster
    channels = 1 if magic == b"P5" else 3
    count = width * height * channels
    raster = data[pos : pos + count]
    if len(raster) != count:
        raise FormatError(f"{path}: PNM raster shorter than header promises")
    arr = np.frombuffer(raster, dtype=np.uint8)
    if channels == 1:
        return arr.reshape(height, width).copy()
    return arr.reshape(height, width, 3).copy()


def _write_pnm(path: Path, arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    if arr.ndim == 2:
        magic = b"P5"
        h, w = arr.shape
    elif arr.ndim == 3 and arr.shape[2] == 3:
        magic = b"P6"
        h, w = arr.shape[:2]
    else:
        raise FormatError("PNM writer accepts (M,N) gray or (M,N,3) RGB arrays")
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (w, h))
        fh.write(arr.tobytes())


def _read_png(path: Path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode == "L":
            return np.asarray(im).copy()
        if im.mode == "RGB":
            return np.asarray(im).copy()
        raise FormatError(
            f"{path}: unsupported PNG mode {im.mode!r} (8-bit L or RGB only)"
        )


def read_image(path: str | Path) -> np.ndarray:
    """Read an 8-bit image file (PNG, PGM, or PPM) into a uint8 array.

    Returns (M, N) for grayscale inputs and (M, N, 3) for color inputs.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(8)
        fh.seek(0)
        data = fh.read() if head[:2] in (b"P5", b"P6") else None
    if head == _PNG_MAGIC:
        return _read_png(path)
    if data is not None:
        return _read_pnm(data, str(path))
    raise FormatError(f"{path}: unrecognized image format (PNG, binary PGM/PPM only)")


def write_image(path: str | Path, arr: np.ndarray) -> None:
    """Write a uint8 array as PNG or PGM/PPM, chosen by file extension."""
    path = Path(path)
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    suffix = path.suffix.lower()
    if suffix == ".png":
        Image.fromarray(arr).save(path)
    elif suffix in (".pgm", ".ppm", ".pnm"):
        _write_pnm(path, arr)
    else:
        raise FormatError(f"{path}: unsupported output extension {suffix!r}")


def quantize_depth(plane: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero to uint8."""
    clamped = np.clip(np.asarray(plane, dtype=np.float64), 0.0, PEAK_LEVEL)
    return np.floor(clamped + 0.5).astype(np.uint8)


def save_depth(path: str | Path, plane: np.ndarray) -> None:
    """Export a float depth plane as an 8-bit grayscale image file."""
    write_image(path, quantize_depth(plane))


def load_rgbd(color_path: str | Path, depth_path: str | Path) -> RgbdImage:
    """Load an aligned (color, depth) pair into an RgbdImage.

    The color file must be 8-bit RGB (PNG or PPM); the depth file must be
    8-bit single-channel (PNG or PGM) of identical dimensions.
    """
    color = read_image(color_path)
    depth = read_image(depth_path)
    if color.ndim != 3:
        raise FormatError(f"{color_path}: color image must be RGB, got grayscale")
    if depth.ndim != 2:
        raise FormatError(f"{depth_path}: depth image must be single-channel")
    if color.shape[:2] != depth.shape:
        raise AlignmentError(
            f"color {color.shape[:2]} and depth {depth.shape} dimensions differ"
        )
    return RgbdImage.from_rgb_depth(color, depth.astype(np.float64))


# ---------------------------------------------------------------------------
# Noise synthesis and quality metrics.
# ---------------------------------------------------------------------------


def standard_normal(count: int, seed: int) -> np.ndarray:
    """Reproducible standard-normal samples.

    Uses the counter-based Philox4x64-10 bit generator (raw stream is stable
    across library versions) and an explicit Box-Muller transform, so the
    same seed yields the same samples everywhere.
    """
    if seed < 0:
        raise InputDomainError("seed must be non-negative")
    if count == 0:
        return np.zeros(0)
    pairs = (count + 1) // 2
    raw = np.random.Philox(key=seed).random_raw(2 * pairs)
    u = ((raw >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * 2.0**-53
    u1, u2 = u[:pairs], u[pairs:]
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = (2.0 * math.pi) * u2
    z = np.concatenate([radius * np.cos(theta), radius * np.sin(theta)])
    return z[:count]


def add_awgn(plane: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise to a depth plane, then clamp.

    Clamping to [0, 255] keeps the noisy plane representable as an 8-bit
    image. Deterministic per seed.
    """
    if sigma < 0:
        raise InputDomainError("sigma must be non-negative")
    plane = np.asarray(plane, dtype=np.float64)
    if sigma == 0:
        return plane.copy()
    noise = standard_normal(plane.size, seed).reshape(plane.shape)
    return np.clip(plane + sigma * noise, 0.0, PEAK_LEVEL)


def psnr(reference: np.ndarray, test: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with a fixed peak of 255.

    Identical planes yield positive infinity.
    """
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.shape != test.shape:
        raise InputDomainError(
            f"plane dimensions differ: {reference.shape} vs {test.shape}"
        )
    mse = float(np.mean((reference - test) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * math.log10(PEAK_LEVEL**2 / mse)


def _block_mean(plane: np.ndarray, factor: int) -> np.ndarray:
    m, n = plane.shape
    m2, n2 = m // factor, n // factor
    trimmed = plane[: m2 * factor, : n2 * factor]
    return trimmed.reshape(m2, factor, n2, factor).mean(axis=(1, 3))


def downsample(image: RgbdImage, factor: int) -> RgbdImage:
    """Block-mean downsample by an integer factor; remainder rows/cols drop.

    RGB channels are block-meaned and re-quantized, and the CIELAB planes are
    recomputed from the downsampled RGB so they stay derivable from it.
    """
    if factor < 2:
        raise InputDomainError("downsample factor must be an integer >= 2")
    if factor > image.height or factor > image.width:
        raise InputDomainError(
            f"factor {factor} exceeds image dimensions {image.height}x{image.width}"
        )
    depth = _block_mean(image.depth, factor)
    rgb = np.stack(
        [
            _block_mean(image.source_rgb[..., ch].astype(np.float64), factor)
            for ch in range(3)
        ],
        axis=-1,
    )
    rgb8 = np.floor(np.clip(rgb, 0.0, 255.0) + 0.5).astype(np.uint8)
    return RgbdImage.from_rgb_depth(rgb8, np.clip(depth, 0.0, PEAK_LEVEL))

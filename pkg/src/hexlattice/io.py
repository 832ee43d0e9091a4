"""File formats: HEXA grids, IDX (MNIST) archives, PNG/PGM images, class directories."""

from __future__ import annotations

import gzip
import os
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hexgrid import HexArray, HexGridSpec


class FormatError(ValueError):
    """A file does not follow its declared format."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


# --- HEXA ------------------------------------------------------------------------
# magic "HEXA", version u16, rows u32, cols u32, channels u16, pitch f64,
# then rows*cols*channels little-endian f64 samples in linewise order.

HEXA_MAGIC = b"HEXA"
HEXA_VERSION = 1
_HEXA_HEADER = struct.Struct("<4sHIIHd")


def write_hexa(path, hexarr: HexArray) -> None:
    spec = hexarr.spec
    with open(path, "wb") as f:
        f.write(_HEXA_HEADER.pack(HEXA_MAGIC, HEXA_VERSION, spec.rows, spec.cols,
                                  hexarr.channels, spec.pitch))
        f.write(np.ascontiguousarray(hexarr.data, dtype="<f8").tobytes())


def read_hexa(path) -> HexArray:
    with open(path, "rb") as f:
        buf = f.read()
    if len(buf) < _HEXA_HEADER.size:
        raise FormatError("truncated HEXA header", len(buf))
    magic, version, rows, cols, channels, pitch = _HEXA_HEADER.unpack_from(buf)
    if magic != HEXA_MAGIC:
        raise FormatError("bad magic, expected HEXA", 0)
    if version != HEXA_VERSION:
        raise FormatError(f"unsupported HEXA version {version}", 4)
    n = rows * cols * channels
    payload = buf[_HEXA_HEADER.size :]
    if len(payload) != 8 * n:
        raise FormatError(f"payload holds {len(payload)} bytes, expected {8 * n}", _HEXA_HEADER.size)
    try:
        spec = HexGridSpec(rows, cols, pitch)
    except ValueError as e:
        raise FormatError(str(e), 6) from None
    data = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(rows, cols, channels)
    return HexArray(spec, data)


# --- IDX ---------------------------------------------------------------------------

IDX_IMAGES = 0x00000803
IDX_LABELS = 0x00000801


def _open_bytes(path) -> bytes:
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return raw


def _read_idx(path, magic: int, ndim: int) -> np.ndarray:
    buf = _open_bytes(path)
    header = 4 + 4 * ndim
    if len(buf) < 4:
        raise FormatError(f"{path}: file too short for an IDX magic number", len(buf))
    (got,) = struct.unpack_from(">I", buf, 0)
    if got != magic:
        raise FormatError(f"{path}: magic 0x{got:08x}, expected 0x{magic:08x}", 0)
    if len(buf) < header:
        raise FormatError(f"{path}: truncated IDX header", len(buf))
    dims = struct.unpack_from(f">{ndim}I", buf, 4)
    n = int(np.prod(dims))
    if len(buf) - header < n:
        raise FormatError(f"{path}: payload has {len(buf) - header} bytes, expected {n}", len(buf))
    if len(buf) - header > n:
        raise FormatError(f"{path}: {len(buf) - header - n} trailing bytes", header + n)
    return np.frombuffer(buf, dtype=np.uint8, count=n, offset=header).reshape(dims)


def write_idx(path, array: np.ndarray) -> None:
    """Write a uint8 array as IDX (images if 3-D, labels if 1-D)."""
    array = np.ascontiguousarray(array, dtype=np.uint8)
    magic = {1: IDX_LABELS, 3: IDX_IMAGES}[array.ndim]
    with open(path, "wb") as f:
        f.write(struct.pack(">I", magic))
        f.write(struct.pack(f">{array.ndim}I", *array.shape))
        f.write(array.tobytes())


def ingest_mnist(image_path, label_path) -> tuple[np.ndarray, np.ndarray]:
    """Read an IDX image/label pair: ``(N, rows, cols)`` uint8 images and labels."""
    images = _read_idx(image_path, IDX_IMAGES, 3)
    labels = _read_idx(label_path, IDX_LABELS, 1)
    if len(images) != len(labels):
        raise FormatError(f"{len(images)} images but {len(labels)} labels")
    if labels.size and labels.max() > 9:
        raise FormatError(f"label {labels.max()} outside 0..9")
    return images, labels


MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


def find_mnist(directory) -> dict:
    """Locate the standard MNIST file names (optionally ``.gz``) in a directory."""
    directory = Path(directory)
    found = {}
    for split, names in MNIST_FILES.items():
        paths = []
        for name in names:
            for cand in (directory / name, directory / (name + ".gz")):
                if cand.exists():
                    paths.append(cand)
                    break
        if len(paths) == 2:
            found[split] = tuple(paths)
    if not found:
        raise FileNotFoundError(f"no MNIST IDX files in {directory}")
    return found


# --- images ----------------------------------------------------------------------------


def read_image(path) -> np.ndarray:
    """Decode PNG/PGM (anything Pillow reads) to float64 ``(H, W, C)``."""
    from PIL import Image

    with Image.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB" if "A" in im.mode or im.mode in ("P", "CMYK") else "L")
        a = np.asarray(im, dtype=np.float64)
    return a[:, :, None] if a.ndim == 2 else a


def write_image(path, img) -> None:
    """Encode an ``(H, W[, C])`` array in [0, 255] as PNG or binary PGM (by suffix)."""
    from PIL import Image

    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 3 and a.shape[2] == 1:
        a = a[:, :, 0]
    a = np.clip(np.rint(a), 0, 255).astype(np.uint8)
    if str(path).lower().endswith((".pgm", ".pnm")):
        if a.ndim != 2:
            raise ValueError("PGM output needs a single-channel image")
        with open(path, "wb") as f:
            f.write(b"P5\n%d %d\n255\n" % (a.shape[1], a.shape[0]))
            f.write(a.tobytes())
        return
    Image.fromarray(a).save(path)


IMAGE_SUFFIXES = (".png", ".pgm", ".pnm", ".ppm", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


@dataclass
class LabeledImages:
    images: list          # float64 (H, W, C) arrays
    labels: np.ndarray
    classes: list
    paths: list
    is_test: np.ndarray   # bool per image


def split_is_test(name: str, test_fraction: float = 0.2) -> bool:
    """Deterministic 80/20 split by a hash of the file name."""
    return (zlib.crc32(name.encode("utf-8")) % 1000) < test_fraction * 1000


def ingest_image_dir(directory) -> LabeledImages:
    """One subdirectory per class; classes and files in lexicographic order.

    If the directory has ``train/`` and ``test/`` subdirectories those define
    the split; otherwise file names are hashed into 80/20.
    """
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"{root} is not a directory")
    explicit = (root / "train").is_dir() and (root / "test").is_dir()
    parts = [("train", root / "train"), ("test", root / "test")] if explicit else [(None, root)]
    classes = sorted({d.name for _, base in parts for d in base.iterdir() if d.is_dir()})
    if not classes:
        raise FormatError(f"{root} has no class subdirectories")
    index = {c: i for i, c in enumerate(classes)}
    images, labels, paths, is_test = [], [], [], []
    for split, base in parts:
        for cls in classes:
            d = base / cls
            if not d.is_dir():
                continue
            for p in sorted(d.iterdir()):
                if p.suffix.lower() not in IMAGE_SUFFIXES:
                    continue
                images.append(read_image(p))
                labels.append(index[cls])
                paths.append(str(p))
                is_test.append(split == "test" if explicit else split_is_test(p.name))
    return LabeledImages(images, np.array(labels, dtype=np.int64), classes, paths,
                         np.array(is_test, dtype=bool))


def is_hexa(path) -> bool:
    return os.path.splitext(str(path))[1].lower() == ".hexa"

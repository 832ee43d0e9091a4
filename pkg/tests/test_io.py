import gzip
import struct

import numpy as np
import pytest

from hexlattice import io as hio
from hexlattice.hexgrid import HexArray, HexGridSpec


def _hexa(tmp_path, rows=3, cols=4, ch=2):
    a = HexArray(HexGridSpec(rows, cols, 1.25), np.arange(rows * cols * ch, dtype=float).reshape(rows, cols, ch))
    p = tmp_path / "g.hexa"
    hio.write_hexa(p, a)
    return a, p


def test_hexa_header_layout(tmp_path):
    _, p = _hexa(tmp_path)
    raw = p.read_bytes()
    magic, version, rows, cols, ch, pitch = struct.unpack_from("<4sHIIHd", raw)
    assert (magic, version, rows, cols, ch, pitch) == (b"HEXA", 1, 3, 4, 2, 1.25)
    assert len(raw) == 24 + 8 * 24
    # Samples are stored linewise, channel fastest.
    assert struct.unpack_from("<d", raw, 24 + 8 * 5)[0] == 5.0


@pytest.mark.parametrize("mutate,offset", [
    (lambda b: b"HEXB" + b[4:], 0),
    (lambda b: b[:4] + b"\x02\x00" + b[6:], 4),
    (lambda b: b[:-1], 24),
    (lambda b: b + b"\0" * 8, 24),
    (lambda b: b[:10], 10),
])
def test_hexa_format_errors(tmp_path, mutate, offset):
    _, p = _hexa(tmp_path)
    bad = tmp_path / "bad.hexa"
    bad.write_bytes(mutate(p.read_bytes()))
    with pytest.raises(hio.FormatError) as e:
        hio.read_hexa(bad)
    assert e.value.offset == offset


def test_hexa_invalid_geometry(tmp_path):
    raw = struct.pack("<4sHIIHd", b"HEXA", 1, 0, 4, 1, 1.0)
    p = tmp_path / "z.hexa"
    p.write_bytes(raw)
    with pytest.raises(hio.FormatError):
        hio.read_hexa(p)


def test_idx_roundtrip_plain_and_gzip(tmp_path):
    imgs = np.random.default_rng(0).integers(0, 256, (5, 28, 28)).astype(np.uint8)
    labels = np.array([0, 9, 3, 3, 1], dtype=np.uint8)
    hio.write_idx(tmp_path / "train-images-idx3-ubyte", imgs)
    raw = (tmp_path / "train-images-idx3-ubyte").read_bytes()
    assert raw[:4] == b"\x00\x00\x08\x03" and struct.unpack(">3I", raw[4:16]) == (5, 28, 28)
    (tmp_path / "train-labels-idx1-ubyte.gz").write_bytes(gzip.compress(
        b"\x00\x00\x08\x01" + struct.pack(">I", 5) + labels.tobytes()))
    found = hio.find_mnist(tmp_path)
    assert set(found) == {"train"}
    x, y = hio.ingest_mnist(*found["train"])
    assert np.array_equal(x, imgs) and np.array_equal(y, labels)


def test_idx_errors(tmp_path):
    imgs = np.zeros((2, 3, 3), dtype=np.uint8)
    hio.write_idx(tmp_path / "i", imgs)
    hio.write_idx(tmp_path / "l", np.array([1, 2, 3], dtype=np.uint8))
    with pytest.raises(hio.FormatError, match="2 images but 3 labels"):
        hio.ingest_mnist(tmp_path / "i", tmp_path / "l")
    with pytest.raises(hio.FormatError) as e:
        hio.ingest_mnist(tmp_path / "l", tmp_path / "l")
    assert e.value.offset == 0
    raw = (tmp_path / "i").read_bytes()
    (tmp_path / "t").write_bytes(raw[:-2])
    with pytest.raises(hio.FormatError, match="payload"):
        hio.ingest_mnist(tmp_path / "t", tmp_path / "l")
    hio.write_idx(tmp_path / "l2", np.array([1, 12], dtype=np.uint8))
    with pytest.raises(hio.FormatError, match="outside 0..9"):
        hio.ingest_mnist(tmp_path / "i", tmp_path / "l2")
    with pytest.raises(FileNotFoundError):
        hio.find_mnist(tmp_path)


@pytest.mark.parametrize("suffix,channels", [(".png", 1), (".png", 3), (".pgm", 1)])
def test_image_roundtrip(tmp_path, suffix, channels):
    img = np.random.default_rng(channels).integers(0, 256, (7, 9, channels)).astype(float)
    p = tmp_path / ("x" + suffix)
    hio.write_image(p, img)
    assert np.array_equal(hio.read_image(p), img)


def test_pgm_header_and_rgb_rejection(tmp_path):
    hio.write_image(tmp_path / "a.pgm", np.full((2, 3), 300.0))
    assert (tmp_path / "a.pgm").read_bytes() == b"P5\n3 2\n255\n" + b"\xff" * 6
    with pytest.raises(ValueError):
        hio.write_image(tmp_path / "b.pgm", np.zeros((2, 2, 3)))


def test_image_dir_ingest(tmp_path):
    for cls in ("cat", "ant"):
        (tmp_path / cls).mkdir()
        for k in range(3):
            hio.write_image(tmp_path / cls / f"{k}.png", np.full((4, 4), 10.0 * k))
    (tmp_path / "ant" / "notes.txt").write_text("skip me")
    li = hio.ingest_image_dir(tmp_path)
    assert li.classes == ["ant", "cat"]
    assert li.labels.tolist() == [0, 0, 0, 1, 1, 1]
    assert [p.split("/")[-1] for p in li.paths[:3]] == ["0.png", "1.png", "2.png"]
    assert li.is_test.tolist() == [hio.split_is_test(p.split("/")[-1]) for p in li.paths]


def test_image_dir_explicit_split(tmp_path):
    for split in ("train", "test"):
        for cls in ("a", "b"):
            d = tmp_path / split / cls
            d.mkdir(parents=True)
            hio.write_image(d / "x.png", np.zeros((2, 2)))
    li = hio.ingest_image_dir(tmp_path)
    assert li.is_test.tolist() == [False, False, True, True]


def test_image_dir_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        hio.ingest_image_dir(tmp_path / "missing")
    with pytest.raises(hio.FormatError):
        hio.ingest_image_dir(tmp_path)

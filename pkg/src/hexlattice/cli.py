"""Command-line entry point: ``hexlattice <command> [options]``.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 format error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import io as hio
from .bench import run_bench
from .datasets import stratified_split, to_hex, to_square
from .hexgrid import HexGridSpec
from .metrics import efficiency_at, efficiency_sweep, psnr, weighted_mse
from .render import RenderOptions, rasterize
from .transform import InterpMode, as_image, choose_grid, grid_for_radius, h2s, s2h

log = logging.getLogger("hexlattice")

EXIT_USAGE, EXIT_IO, EXIT_FORMAT = 2, 3, 4


class UsageError(Exception):
    pass


# --- helpers ---------------------------------------------------------------------


def _grid_from_args(args, width: int, height: int) -> HexGridSpec:
    if getattr(args, "rows", None):
        pitch = width / (args.cols + (0.5 if args.rows > 1 else 0.0))
        return HexGridSpec(args.rows, args.cols, pitch)
    if getattr(args, "radius", None) is not None:
        spec = grid_for_radius(width, height, args.radius)
        if spec is None:
            raise UsageError(f"--radius {args.radius} is too large for a {width}x{height} image")
        return spec
    return choose_grid(width, height)


def _fmt(v: float) -> str:
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return repr(float(v))


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return _fmt(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _image_paths(path) -> list[Path]:
    p = Path(path)
    if p.is_dir():
        files = sorted(f for f in p.iterdir() if f.suffix.lower() in hio.IMAGE_SUFFIXES)
        if not files:
            raise FileNotFoundError(f"no images in {p}")
        return files
    if not p.exists():
        raise FileNotFoundError(f"{p} does not exist")
    return [p]


# --- commands ------------------------------------------------------------------------


def cmd_transform(args) -> int:
    src, dst = args.input, args.output
    if hio.is_hexa(src):
        hexarr = hio.read_hexa(src)
        xmin, ymin, xmax, ymax = hexarr.spec.bounding_box()
        w = args.width or max(1, round(xmax - xmin))
        h = args.height or max(1, round(ymax - ymin))
        hio.write_image(dst, h2s(hexarr, w, h, args.interp))
    else:
        img = hio.read_image(src)
        spec = _grid_from_args(args, img.shape[1], img.shape[0])
        hexarr = s2h(img, spec, args.interp)
        if hio.is_hexa(dst):
            hio.write_hexa(dst, hexarr)
        else:
            hio.write_image(dst, rasterize(hexarr, RenderOptions(args.scale, args.supersample)))
    return 0


def cmd_render(args) -> int:
    hexarr = hio.read_hexa(args.input) if hio.is_hexa(args.input) else s2h(
        hio.read_image(args.input), mode=args.interp)
    opts = RenderOptions(args.scale, args.supersample, args.background)
    hio.write_image(args.output, rasterize(hexarr, opts))
    return 0


def cmd_metrics(args) -> int:
    img = hio.read_image(args.input)
    h, w, _ = img.shape
    if args.hex:
        hexarr = hio.read_hexa(args.hex)
        mse = weighted_mse(img, hexarr, args.normalize)
        report = {"mse_h": mse, "T_h": psnr(mse), "R": hexarr.spec.circumradius}
    else:
        spec = _grid_from_args(args, w, h)
        r = efficiency_at(img, spec, args.interp, normalize=args.normalize)
        report = {k: v for k, v in vars(r).items() if k != "warning"}
    report = _json_safe(report)
    if args.format == "csv":
        buf = _io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=list(report), lineterminator="\n")
        wr.writeheader()
        wr.writerow(report)
        _emit(buf.getvalue(), args.output)
    else:
        _emit(json.dumps(report, indent=2) + "\n", args.output)
    return 0


def _parse_radii(text: str) -> list[float]:
    try:
        radii = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--radii expects comma-separated numbers, got {text!r}") from None
    if not radii or any(r <= 0 for r in radii):
        raise UsageError("--radii must be positive")
    return radii


def cmd_sweep(args) -> int:
    radii = _parse_radii(args.radii)
    rows = []
    for path in _image_paths(args.input):
        img = hio.read_image(path)
        for r in efficiency_sweep(img, radii, args.interp, normalize=args.normalize):
            if r.skipped:  # already logged by efficiency_sweep
                continue
            rows.append({"image": path.name, "R": r.R, "T_q": r.T_q, "T_h": r.T_h, "delta": r.delta})
    if args.format == "json":
        _emit(json.dumps(_json_safe(rows), indent=2) + "\n", args.output)
        return 0
    buf = _io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["image", "R", "T_q", "T_h", "delta"])
    for row in rows:
        wr.writerow([row["image"]] + [_fmt(row[k]) for k in ("R", "T_q", "T_h", "delta")])
    _emit(buf.getvalue(), args.output)
    return 0


def cmd_summary(args) -> int:
    from .hexnn.model import preset, summary

    shape = None
    if args.in_channels:
        base = preset(args.model).input_shape
        shape = tuple(base[:2]) + (args.in_channels,)
    _emit(summary(preset(args.model, shape, args.classes)), args.output)
    return 0


def _load_dataset(args, hex_input: bool):
    """Return (Dataset, classes) prepared for the chosen model family."""
    from .hexnn.train import Dataset

    path = Path(args.dataset)
    if not path.exists():
        raise FileNotFoundError(f"{path} does not exist")
    try:
        files = hio.find_mnist(path) if path.is_dir() else None
    except FileNotFoundError:
        files = None
    if files:
        x_tr, y_tr = hio.ingest_mnist(*files["train"])
        if "test" in files:
            x_te, y_te = hio.ingest_mnist(*files["test"])
        else:
            tr, te = stratified_split(y_tr, len(y_tr) * 4 // 5, len(y_tr) // 5, args.seed)
            x_tr, y_tr, x_te, y_te = x_tr[tr], y_tr[tr], x_tr[te], y_tr[te]
        classes = 10
    else:
        li = hio.ingest_image_dir(path)
        shapes = {im.shape for im in li.images}
        if len(shapes) != 1:
            raise hio.FormatError(f"images in {path} differ in size: {sorted(shapes)[:3]}")
        x = np.stack(li.images)
        x_tr, y_tr = x[~li.is_test], li.labels[~li.is_test]
        x_te, y_te = x[li.is_test], li.labels[li.is_test]
        classes = len(li.classes)
    if args.train_limit:
        keep = np.random.default_rng([args.seed, 10]).permutation(len(y_tr))[: args.train_limit]
        x_tr, y_tr = x_tr[keep], y_tr[keep]
    if args.test_limit:
        keep = np.random.default_rng([args.seed, 11]).permutation(len(y_te))[: args.test_limit]
        x_te, y_te = x_te[keep], y_te[keep]
    sq_tr, sq_te = to_square(x_tr), to_square(x_te)
    if hex_input:
        sq_tr, sq_te = to_hex(sq_tr, mode=args.interp), to_hex(sq_te, mode=args.interp)
    return Dataset(sq_tr, y_tr, sq_te, y_te), classes


def _thread_limit(n):
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:  # pragma: no cover
        import contextlib

        return contextlib.nullcontext()
    return threadpool_limits(n)


def cmd_train(args) -> int:
    from .hexnn.model import preset
    from .hexnn.train import TrainConfig, train
    from .hexnn.weights import save_weights

    data, classes = _load_dataset(args, args.model == "h-cnn")
    spec = preset(args.model, data.x_train.shape[1:], classes)
    with _thread_limit(args.threads):
        result = train(spec, data, TrainConfig(args.epochs, args.batch_size, args.seed))
    if args.output:
        save_weights(args.output, result.model.params)
    report = {"model": args.model, "initial_loss": result.initial_loss,
              "history": result.history, "test_accuracy": result.test_accuracy}
    sys.stdout.write(json.dumps(_json_safe(report), indent=2) + "\n")
    return 0


def cmd_eval(args) -> int:
    from .hexnn.model import preset
    from .hexnn.train import evaluate
    from .hexnn.weights import load_model

    data, classes = _load_dataset(args, args.model == "h-cnn")
    spec = preset(args.model, data.x_test.shape[1:], classes)
    model = load_model(args.weights, spec)
    with _thread_limit(args.threads):
        loss, acc = evaluate(model, data.x_test, data.y_test)
    sys.stdout.write(json.dumps({"model": args.model, "test_loss": loss, "test_accuracy": acc}, indent=2) + "\n")
    return 0


def cmd_bench(args) -> int:
    if args.input:
        images = [hio.read_image(p) for p in _image_paths(args.input)]
    else:
        rng = np.random.default_rng(args.seed)
        images = [rng.uniform(0, 255, (args.size, args.size, 1)) for _ in range(args.synthetic)]
    h, w = images[0].shape[:2]
    spec = _grid_from_args(args, w, h)
    reports = run_bench(images, spec, args.interp, args.runs, args.warmup, args.threads)
    if args.format == "json":
        _emit(json.dumps([r.as_dict() for r in reports], indent=2) + "\n", args.output)
    else:
        buf = _io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["operation", "images_per_second", "stddev", "runs", "warmup", "input"])
        for r in reports:
            wr.writerow([r.operation, f"{r.images_per_second:.3f}", f"{r.stddev:.3f}", r.runs, r.warmup, r.input])
        _emit(buf.getvalue(), args.output)
    return 0


# --- parser ------------------------------------------------------------------------------


def _add_grid(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--radius", type=float, help="hexagon circumradius in pixels")
    g.add_argument("--equal-count", action="store_true",
                   help="size the grid to the image's sample count (default)")
    p.add_argument("--rows", type=_positive(int))
    p.add_argument("--cols", type=_positive(int))


def _add_interp(p):
    p.add_argument("--interp", choices=[m.value for m in InterpMode], default="bilinear")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hexlattice", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="square image <-> HEXA grid")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_interp(p)
    _add_grid(p)
    p.add_argument("--width", type=_positive(int))
    p.add_argument("--height", type=_positive(int))
    p.add_argument("--scale", type=_positive(float), default=10.0)
    p.add_argument("--supersample", type=int, choices=(1, 2, 4), default=2)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("render", help="rasterise a HEXA grid (or an image's hex transform) to PNG/PGM")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_interp(p)
    p.add_argument("--scale", type=_positive(float), default=10.0)
    p.add_argument("--supersample", type=int, choices=(1, 2, 4), default=4)
    p.add_argument("--background", type=float, default=0.0)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("metrics", help="transformation efficiency of one grid")
    p.add_argument("--input", required=True)
    p.add_argument("--hex", help="evaluate this HEXA file instead of transforming")
    p.add_argument("--output")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--normalize", choices=("area", "count"), default="area")
    _add_interp(p)
    _add_grid(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sweep", help="T_q, T_h and delta over circumradii")
    p.add_argument("--input", required=True, help="image or directory of images")
    p.add_argument("--radii", default="0.6,0.8,1,1.5,2,3,4,6,8")
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--normalize", choices=("area", "count"), default="area")
    _add_interp(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("summary", help="layer table of a model preset")
    p.add_argument("--model", choices=("s-cnn", "s-cnn-3x3", "h-cnn"), required=True)
    p.add_argument("--classes", type=_positive(int), default=100)
    p.add_argument("--in-channels", type=_positive(int))
    p.add_argument("--output")
    p.set_defaults(func=cmd_summary)

    for name, func in (("train", cmd_train), ("eval", cmd_eval)):
        p = sub.add_parser(name, help=f"{name} a model on MNIST IDX files or a class directory")
        p.add_argument("--model", choices=("s-cnn", "s-cnn-3x3", "h-cnn"), required=True)
        p.add_argument("--dataset", required=True)
        p.add_argument("--train-limit", type=_positive(int))
        p.add_argument("--test-limit", type=_positive(int))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=_positive(int), default=1)
        _add_interp(p)
        if name == "train":
            p.add_argument("--epochs", type=int, default=5)
            p.add_argument("--batch-size", type=_positive(int), default=32)
            p.add_argument("--output", help="HXNN weights file to write")
        else:
            p.add_argument("--weights", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("bench", help="s2h / h2s / square-resize throughput")
    p.add_argument("--input", help="image or directory (default: synthetic noise images)")
    p.add_argument("--synthetic", type=_positive(int), default=10)
    p.add_argument("--size", type=_positive(int), default=128)
    p.add_argument("--runs", type=_positive(int), default=5)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--threads", type=_positive(int), default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_interp(p)
    _add_grid(p)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if (getattr(args, "rows", None) is None) != (getattr(args, "cols", None) is None):
        parser.error("--rows and --cols must be given together")
    if getattr(args, "rows", None) and getattr(args, "radius", None) is not None:
        parser.error("--rows/--cols and --radius are mutually exclusive")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.error(str(e))  # exits 2
    except hio.FormatError as e:
        print(f"hexlattice: format error: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as e:
        print(f"hexlattice: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        # Shape-inconsistent weights and similar content problems.
        print(f"hexlattice: format error: {e}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())

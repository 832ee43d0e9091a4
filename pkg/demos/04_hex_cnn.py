"""
Hexagonal and square CNNs on MNIST digits
=========================================

Both models share one layout; the hexagonal one swaps 3x3 kernels for
7-tap hexagonal ones and runs on a 34x30 hexagonal resampling of the
32x32 input. Digits come from the 5 000-sample MNIST subset bundled with
mlxtend (``pip install mlxtend``); pass a directory with the standard
MNIST IDX files to use those instead.
"""

import gzip
import os
import sys
import tempfile

import numpy as np

from hexlattice.datasets import stratified_split, to_hex, to_square
from hexlattice.hexnn import pool_offsets, preset, summary
from hexlattice.hexnn.train import Dataset, TrainConfig, train
from hexlattice.io import find_mnist, ingest_mnist, write_idx

print(summary(preset("s-cnn")))
print(summary(preset("h-cnn")))

# Pooling windows are picked by solving an assignment problem between the
# ideal 7-cell cluster and the 3x3 window; the result is the hex neighbourhood.
print("pool offsets, odd rows:", pool_offsets("odd"))


def mnist_dir():
    if len(sys.argv) > 1:
        return sys.argv[1]
    import mlxtend

    path = os.path.join(os.path.dirname(mlxtend.__file__), "data", "data", "mnist_5k.csv.gz")
    with gzip.open(path, "rt") as f:
        table = np.loadtxt(f, delimiter=",", dtype=np.int64)
    d = tempfile.mkdtemp()
    write_idx(os.path.join(d, "train-images-idx3-ubyte"), table[:, :-1].reshape(-1, 28, 28))
    write_idx(os.path.join(d, "train-labels-idx1-ubyte"), table[:, -1])
    return d


images, labels = ingest_mnist(*find_mnist(mnist_dir())["train"])
tr, te = stratified_split(labels, 2000, 1000, seed=0)
square_train, square_test = to_square(images[tr]), to_square(images[te])
inputs = {
    "s-cnn": (square_train, square_test),
    "h-cnn": (to_hex(square_train), to_hex(square_test)),
}

for name, (x_train, x_test) in inputs.items():
    data = Dataset(x_train, labels[tr], x_test, labels[te])
    spec = preset(name, x_train.shape[1:], classes=10)
    result = train(spec, data, TrainConfig(epochs=5, batch_size=32, seed=0))
    secs = sum(h["seconds"] for h in result.history)
    print(f"{name}: test accuracy {result.test_accuracy:.3f} after {secs:.0f}s")

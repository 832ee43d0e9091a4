import gzip
import os
from collections import OrderedDict

import numpy as np
import pytest

from hexlattice.io import ingest_mnist, write_idx

# criterion number -> [title, outcomes]
_CRITERIA: "OrderedDict[int, list]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            n, title = m.args
            _CRITERIA.setdefault(n, [title, []])
    # Keep criteria in numeric order in the final report.
    ordered = OrderedDict(sorted(_CRITERIA.items()))
    _CRITERIA.clear()
    _CRITERIA.update(ordered)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA[m.args[0]][1].append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, (title, outcomes) in _CRITERIA.items():
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for _, o in outcomes):
            status = "PASS"
        elif any(o == "failed" for _, o in outcomes):
            status = "FAIL"
        else:
            status = "SKIP"
        tr.write_line(f"criterion {n:2d} {status:7s} {title} ({len(outcomes)} checks)")


# --- MNIST --------------------------------------------------------------------------


def _mnist_csv():
    mlxtend = pytest.importorskip("mlxtend")
    path = os.path.join(os.path.dirname(mlxtend.__file__), "data", "data", "mnist_5k.csv.gz")
    if not os.path.exists(path):
        pytest.skip("mlxtend's MNIST sample is missing")
    with gzip.open(path, "rt") as f:
        return np.loadtxt(f, delimiter=",", dtype=np.int64)


@pytest.fixture(scope="session")
def mnist_dir(tmp_path_factory):
    """A directory holding real MNIST digits as plain IDX train files.

    The 5 000-digit sample bundled with mlxtend is written out in the
    standard IDX layout so that it goes through the same reader as the full
    archives.
    """
    table = _mnist_csv()
    d = tmp_path_factory.mktemp("mnist")
    write_idx(d / "train-images-idx3-ubyte", table[:, :-1].reshape(-1, 28, 28))
    write_idx(d / "train-labels-idx1-ubyte", table[:, -1])
    return d


@pytest.fixture(scope="session")
def mnist(mnist_dir):
    return ingest_mnist(mnist_dir / "train-images-idx3-ubyte", mnist_dir / "train-labels-idx1-ubyte")

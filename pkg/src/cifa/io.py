"""On-disk formats.

A matrix is delimited text, one row per line, values written with 17
significant digits (exact float64 round trip) under an optional
``# rows=<I> cols=<J>`` header.  A :class:`~cifa.multiblock.MultiBlock` is a
directory holding ``block_000.csv``, ``block_001.csv``, ... and
``meta.json`` = ``{"shared_rows": I, "blocks": [J_1, ...]}``.
"""

import json
import re
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, IoError
from .multiblock import validate

_HEADER = re.compile(r"#\s*rows=(\d+)\s+cols=(\d+)")


def write_matrix(path, a, delimiter=","):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"# rows={a.shape[0]} cols={a.shape[1]}\n")
        for row in a:
            fh.write(delimiter.join(format(float(v), ".17g") for v in row))
            fh.write("\n")


def read_matrix(path, delimiter=","):
    if not Path(path).is_file():
        raise IoError(f"{path} not found")
    rows, expected = [], None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _HEADER.match(line)
                if m:
                    expected = (int(m.group(1)), int(m.group(2)))
                continue
            rows.append([float(v) for v in line.split(delimiter)])
    if expected is not None and expected[1] == 0:
        return np.zeros(expected)
    a = np.array(rows, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"{path}: ragged rows")
    if expected is not None and a.shape != expected:
        raise DimensionMismatch(f"{path}: header says {expected}, found {a.shape}")
    return a


def write_multiblock(directory, data):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for n, block in enumerate(data):
        write_matrix(directory / f"block_{n:03d}.csv", block)
    meta = {"shared_rows": data.shared_rows, "blocks": data.cols}
    (directory / "meta.json").write_text(json.dumps(meta) + "\n")


def read_multiblock(directory):
    directory = Path(directory)
    meta_path = directory / "meta.json"
    if not meta_path.is_file():
        raise IoError(f"{meta_path} not found")
    meta = json.loads(meta_path.read_text())
    blocks = [read_matrix(directory / f"block_{n:03d}.csv") for n in range(len(meta["blocks"]))]
    data = validate(blocks)
    if data.shared_rows != meta["shared_rows"] or data.cols != list(meta["blocks"]):
        raise DimensionMismatch(f"{directory}: meta.json disagrees with block files")
    return data


def read_sample_dir(directory):
    """Read every ``*.csv`` matrix in a directory, keyed by file stem.

    Used for user-supplied samples: one matrix per class (classification)
    or per collection (clustering), samples stored as columns.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise IoError(f"{directory} is not a directory")
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise IoError(f"no .csv matrices in {directory}")
    return {f.stem: read_matrix(f) for f in files}

"""Target serialization: a plain-text matrix format with a dimension header.

Layout (one record per line, floats as shortest round-trip decimals):

    bldsim-target 1
    <dim>
    <beta>
    <mean: dim space-separated values>
    <precision row 0>
    ...
    <precision row dim-1>

The sha256 of the file bytes serves as the target checksum recorded in run
manifests.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .gaussian import GaussianTarget

__all__ = ["load_target", "save_target", "target_checksum"]

_MAGIC = "bldsim-target 1"


def _fmt_row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def save_target(target: GaussianTarget, path: str | Path) -> Path:
    path = Path(path)
    lines = [_MAGIC, str(target.dim), repr(float(target.beta)), _fmt_row(target.mean)]
    lines.extend(_fmt_row(row) for row in target.precision)
    path.write_text("\n".join(lines) + "\n")
    return path


def load_target(path: str | Path) -> GaussianTarget:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != _MAGIC:
        raise ValueError(f"{path}: not a target file (missing '{_MAGIC}' header)")
    dim = int(lines[1])
    beta = float(lines[2])
    if len(lines) != 4 + dim:
        raise ValueError(f"{path}: expected {4 + dim} lines for dim {dim}, got {len(lines)}")
    mean = np.array([float(v) for v in lines[3].split()])
    rows = [np.array([float(v) for v in lines[4 + i].split()]) for i in range(dim)]
    precision = np.vstack(rows)
    if mean.size != dim or precision.shape != (dim, dim):
        raise ValueError(f"{path}: row lengths disagree with the dimension header")
    return GaussianTarget(precision=precision, mean=mean, beta=beta)


def target_checksum(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()

"""Norm-ordered index over the rows of a dataset.

The index is a table of ``(original_index, norm)`` pairs sorted by the
Euclidean norm of each row.  Sorted norms give logarithmic band lookups,
and the stored permutation and its inverse map between sorted positions
and dataset rows in constant time.
"""

from __future__ import annotations

import hashlib
import io
import math
import os
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BindingError, InvalidInputError, ParseError

__all__ = [
    "Dataset",
    "NormIndex",
    "euclidean_norm",
    "row_norms",
    "row_sq_norms",
    "build_index",
    "band_positions",
    "original_of",
    "ordered_pos_of",
    "dumps_index",
    "loads_index",
    "save_index",
    "load_index",
]

NORM_RTOL = 1e-12
_BLOCK_ROWS = 2048
_HEADER_RE = re.compile(r"^#normindex v1 n=(\d+) d=(\d+) hash=([0-9a-f]{64})$")


def _readonly(a):
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ``n x d`` matrix of finite reals with optional per-row labels.

    ``rows`` is stored as a read-only C-contiguous float64 array.  The
    content hash is computed once at construction and identifies the
    data an index was built over.
    """

    rows: np.ndarray
    labels: np.ndarray | None = None
    content_hash: str = field(init=False, repr=False)

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64, order="C", copy=True)
        if rows.ndim != 2:
            raise InvalidInputError(f"rows must be 2-D, got shape {rows.shape}")
        n, d = rows.shape
        if n < 1 or d < 1:
            raise InvalidInputError(f"dataset must have n >= 1 and d >= 1, got {rows.shape}")
        if not np.isfinite(rows).all():
            bad = int(np.argwhere(~np.isfinite(rows))[0, 0])
            raise InvalidInputError(f"row {bad} has a non-finite coordinate")
        object.__setattr__(self, "rows", _readonly(rows))

        if self.labels is not None:
            labels = np.array(list(self.labels), dtype=object)
            if labels.shape != (n,):
                raise InvalidInputError(
                    f"expected {n} labels, got {labels.shape[0] if labels.ndim else 0}"
                )
            object.__setattr__(self, "labels", _readonly(labels))

        h = hashlib.sha256(f"{n},{d};".encode())
        h.update(rows.astype("<f8", copy=False).tobytes())
        object.__setattr__(self, "content_hash", h.hexdigest())

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def __len__(self):
        return self.n


def row_sq_norms(rows: np.ndarray) -> np.ndarray:
    """Sum of squared coordinates of each row.

    Squares are accumulated column by column, so a row's result does not
    depend on which other rows share the call.
    """
    rows = np.asarray(rows, dtype=np.float64)
    n, d = rows.shape
    acc = np.zeros(n)
    for start in range(0, n, _BLOCK_ROWS):
        block = rows[start:start + _BLOCK_ROWS]
        out = acc[start:start + _BLOCK_ROWS]
        for j in range(d):
            col = block[:, j]
            out += col * col
    return acc


def row_norms(rows: np.ndarray) -> np.ndarray:
    """Euclidean norms of each row, bit-identical to :func:`euclidean_norm`."""
    return np.sqrt(row_sq_norms(rows))


def euclidean_norm(v: Sequence[float] | np.ndarray) -> float:
    """Return ``sqrt(v_1^2 + ... + v_d^2)``."""
    return math.sqrt(_sq_norm(v))


def _sq_norm(v) -> float:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise InvalidInputError("vector has a non-finite coordinate")
    return float(row_sq_norms(v[None, :])[0])


class NormIndex:
    """Rows of a dataset ordered by ascending Euclidean norm.

    Equal norms are ordered by original index.  Use :func:`build_index`
    or :func:`load_index` to create one.

    Attributes
    ----------
    order : ndarray of int64
        ``order[pos]`` is the original row index at sorted position ``pos``.
    norms : ndarray of float64
        ``norms[pos]`` is the norm of that row; non-decreasing.
    sq_norms : ndarray of float64
        Unrounded sums of squares behind ``norms``, used for distance
        decomposition so exact ties stay exact.
    positions : ndarray of int64
        Inverse permutation, ``positions[order[pos]] == pos``.
    """

    __slots__ = ("order", "norms", "sq_norms", "positions", "n", "d", "content_hash", "min_gap")

    def __init__(self, order, sq_norms, d, content_hash):
        self.order = _readonly(np.asarray(order, dtype=np.int64))
        self.sq_norms = _readonly(np.asarray(sq_norms, dtype=np.float64))
        self.norms = _readonly(np.sqrt(self.sq_norms))
        self.n = int(self.order.shape[0])
        self.d = int(d)
        self.content_hash = content_hash
        positions = np.empty(self.n, dtype=np.int64)
        positions[self.order] = np.arange(self.n)
        self.positions = _readonly(positions)
        gaps = np.diff(self.norms)
        gaps = gaps[gaps > 0]
        # smallest positive step between adjacent norms; 0.0 if all norms are equal
        self.min_gap = float(gaps.min()) if gaps.size else 0.0

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"NormIndex(n={self.n}, d={self.d}, hash={self.content_hash[:12]}...)"

    def __eq__(self, other):
        if not isinstance(other, NormIndex):
            return NotImplemented
        return (
            self.content_hash == other.content_hash
            and self.d == other.d
            and np.array_equal(self.order, other.order)
            and np.array_equal(self.norms, other.norms)
        )

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.order, self.norms)]

    @property
    def min_norm(self) -> float:
        return float(self.norms[0])

    @property
    def max_norm(self) -> float:
        return float(self.norms[-1])

    def check_binding(self, data: Dataset) -> None:
        """Raise BindingError unless this index was built over ``data``."""
        if (self.n, self.d) != (data.n, data.d) or self.content_hash != data.content_hash:
            raise BindingError(
                f"index (n={self.n}, d={self.d}, hash={self.content_hash[:12]}) does not "
                f"match dataset (n={data.n}, d={data.d}, hash={data.content_hash[:12]})"
            )


def build_index(data: Dataset) -> NormIndex:
    """Sort the rows of ``data`` by Euclidean norm, ties by original index."""
    if not isinstance(data, Dataset):
        data = Dataset(data)
    sq = row_sq_norms(data.rows)
    order = np.lexsort((np.arange(data.n), np.sqrt(sq)))
    return NormIndex(order, sq[order], data.d, data.content_hash)


def band_positions(index: NormIndex, lo: float, hi: float) -> range:
    """Sorted positions whose norm lies in the closed interval ``[lo, hi]``.

    Two binary searches; an empty range is returned when ``lo > hi`` or
    no norm qualifies.
    """
    if math.isnan(lo) or math.isnan(hi):
        raise InvalidInputError("band bounds must not be NaN")
    if lo > hi:
        return range(0)
    start = int(np.searchsorted(index.norms, lo, side="left"))
    stop = int(np.searchsorted(index.norms, hi, side="right"))
    return range(start, max(start, stop))


def _check_bounds(i, n, what):
    if not isinstance(i, (int, np.integer)) or isinstance(i, bool):
        raise TypeError(f"{what} must be an integer, got {type(i).__name__}")
    if not 0 <= i < n:
        raise IndexError(f"{what} {i} out of range for n={n}")


def original_of(index: NormIndex, pos: int) -> tuple[int, float]:
    """Return ``(original_index, norm)`` stored at sorted position ``pos``."""
    _check_bounds(pos, index.n, "ordered position")
    return int(index.order[pos]), float(index.norms[pos])


def ordered_pos_of(index: NormIndex, original_index: int) -> int:
    """Return the sorted position holding row ``original_index``."""
    _check_bounds(original_index, index.n, "original index")
    return int(index.positions[original_index])


# -- serialization -----------------------------------------------------------


def dumps_index(index: NormIndex) -> str:
    buf = io.StringIO()
    buf.write(f"#normindex v1 n={index.n} d={index.d} hash={index.content_hash}\n")
    for pos, (i, v) in enumerate(zip(index.order.tolist(), index.norms.tolist())):
        # repr() gives the shortest string that round-trips to the same double
        buf.write(f"{pos},{i},{v!r}\n")
    return buf.getvalue()


def loads_index(text: str, data: Dataset) -> NormIndex:
    """Parse an index written by :func:`dumps_index` and validate it against ``data``."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty index file")
    m = _HEADER_RE.match(lines[0].strip())
    if m is None:
        raise ParseError(f"bad header {lines[0]!r}", 1)
    n, d, content_hash = int(m.group(1)), int(m.group(2)), m.group(3)
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != n:
        raise ParseError(f"header declares n={n} but found {len(body)} entries")

    order = np.empty(n, dtype=np.int64)
    norms = np.empty(n, dtype=np.float64)
    for k, ln in enumerate(body):
        lineno = k + 2
        parts = ln.strip().split(",")
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}", lineno)
        try:
            pos, i, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if pos != k:
            raise ParseError(f"expected ordered position {k}, got {pos}", lineno)
        if not (math.isfinite(v) and v >= 0):
            raise ParseError(f"invalid norm {parts[2]!r}", lineno)
        order[k], norms[k] = i, v

    if (n, d) != (data.n, data.d) or content_hash != data.content_hash:
        raise BindingError("index file was built over a different dataset")
    if not np.array_equal(np.sort(order), np.arange(n)):
        raise ParseError("original indices are not a permutation of 0..n-1")
    dn = np.diff(norms)
    di = np.diff(order)
    if np.any(dn < 0) or np.any((dn == 0) & (di < 0)):
        raise ParseError("entries are not sorted by (norm, original index)")
    sq = row_sq_norms(data.rows)[order]
    expected = np.sqrt(sq)
    if np.any(np.abs(norms - expected) > NORM_RTOL * np.maximum(1.0, expected)):
        raise ParseError("stored norms do not match the dataset")
    return NormIndex(order, sq, d, content_hash)


def save_index(index: NormIndex, path: str | os.PathLike) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(dumps_index(index))


def load_index(path: str | os.PathLike, data: Dataset) -> NormIndex:
    with open(path) as f:
        return loads_index(f.read(), data)

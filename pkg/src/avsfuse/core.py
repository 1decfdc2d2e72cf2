"""Shared numeric containers, stream identities, validation and file I/O.

Matrices are C-contiguous float64 numpy arrays of shape (rows, cols).
All arithmetic in the toolkit is 64-bit; gradient checks at 1e-6
tolerance do not survive single precision.

AVSF binary matrix format: magic ``b"AVSF"``, rows and cols as unsigned
32-bit little-endian, 4 reserved zero bytes, then rows*cols IEEE-754
float64 little-endian values in row-major order.  CSV files are
RFC-4180-style with '.' as the decimal separator and an optional single
header row.
"""

from __future__ import annotations

import csv
import enum
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadMagicError,
    FormatError,
    TruncatedFileError,
    ValidationError,
)

#: Floor applied to posterior entries before any logarithm.
POSTERIOR_FLOOR = 1e-10

#: Tolerance for "rows sum to one" checks on probability matrices.
ROW_SUM_TOL = 1e-9

_MAGIC = b"AVSF"
_HEADER = struct.Struct("<4sII4s")


def feature_matrix(data, dtype=np.float64) -> np.ndarray:
    """Validate and return a 2-D float64 C-contiguous matrix.

    Raises ValidationError for non-2-D input, zero columns, or any
    non-finite value.
    """
    m = np.ascontiguousarray(data, dtype=dtype)
    if m.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {m.shape}")
    if m.shape[1] < 1:
        raise ValidationError("matrix must have at least one column")
    if m.size and not np.isfinite(m).all():
        bad = np.argwhere(~np.isfinite(m))[0]
        raise ValidationError(
            f"non-finite value at row {bad[0]}, column {bad[1]}"
        )
    return m


def write_matrix(m: np.ndarray, path) -> None:
    """Write a matrix in AVSF binary format (bit-exact round trip)."""
    m = feature_matrix(m)
    rows, cols = m.shape
    with open(path, "wb") as f:
        f.write(_HEADER.pack(_MAGIC, rows, cols, b"\x00" * 4))
        f.write(m.astype("<f8", copy=False).tobytes())


def read_matrix(path) -> np.ndarray:
    """Read an AVSF binary matrix, validating magic, dimensions and payload."""
    with open(path, "rb") as f:
        header = f.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise TruncatedFileError(f"{path}: header truncated")
        magic, rows, cols, _reserved = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise BadMagicError(f"{path}: bad magic {magic!r}")
        if cols < 1:
            raise FormatError(f"{path}: column count {cols} is invalid")
        payload = f.read()
    expected = rows * cols * 8
    if len(payload) < expected:
        raise TruncatedFileError(
            f"{path}: payload has {len(payload)} bytes, expected {expected}"
        )
    if len(payload) > expected:
        raise FormatError(f"{path}: {len(payload) - expected} trailing bytes")
    m = np.frombuffer(payload, dtype="<f8").reshape(rows, cols)
    m = np.ascontiguousarray(m, dtype=np.float64)
    if m.size and not np.isfinite(m).all():
        raise ValidationError(f"{path}: payload contains non-finite values")
    return m


def write_csv_matrix(m: np.ndarray, path, header=None) -> None:
    """Write a matrix as CSV.  Values use repr so the round trip is exact."""
    m = feature_matrix(m)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        if header is not None:
            if len(header) != m.shape[1]:
                raise ValidationError(
                    f"header has {len(header)} fields for {m.shape[1]} columns"
                )
            w.writerow(header)
        for row in m:
            w.writerow([repr(float(v)) for v in row])


def read_csv_matrix(path) -> np.ndarray:
    """Read a numeric rectangular CSV, skipping one optional header row."""
    with open(path, "r", newline="") as f:
        raw = [row for row in csv.reader(f) if row]
    if not raw:
        raise FormatError(f"{path}: empty CSV")

    def parse_row(cells, rownum):
        values = []
        for col, cell in enumerate(cells):
            try:
                values.append(float(cell))
            except ValueError:
                raise FormatError(
                    f"{path}: non-numeric cell at row {rownum}, column {col + 1}"
                ) from None
        return values

    start = 0
    try:
        parse_row(raw[0], 1)
    except FormatError:
        start = 1  # non-numeric first row is the optional header
    if start == len(raw):
        return np.empty((0, len(raw[0])), dtype=np.float64)
    width = len(raw[start])
    rows = []
    for i in range(start, len(raw)):
        if len(raw[i]) != width:
            raise FormatError(
                f"{path}: ragged row at row {i + 1} "
                f"({len(raw[i])} cells, expected {width})"
            )
        rows.append(parse_row(raw[i], i + 1))
    return feature_matrix(np.array(rows, dtype=np.float64))


class StreamId(enum.Enum):
    """The three posterior streams, in fixed bundle order."""

    A = "A"
    VA = "VA"
    VS = "VS"


STREAM_ORDER = (StreamId.A, StreamId.VA, StreamId.VS)
NUM_STREAMS = len(STREAM_ORDER)


@dataclass(frozen=True)
class PosteriorStream:
    """Per-frame state posterior distributions for one stream.

    ``matrix`` has shape (frames, states).  In the probability domain
    each row sums to one within ROW_SUM_TOL and entries are floored at
    POSTERIOR_FLOOR (up to renormalisation); in the log domain the row
    exponentials sum to one.
    """

    matrix: np.ndarray
    log_domain: bool = False

    def __post_init__(self):
        m = feature_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.shape[0] == 0:
            raise ValidationError("posterior stream has no frames")
        rows = np.exp(m) if self.log_domain else m
        sums = rows.sum(axis=1)
        if not np.allclose(sums, 1.0, rtol=0.0, atol=ROW_SUM_TOL):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise ValidationError(
                f"posterior row {bad} sums to {sums[bad]!r}, expected 1"
            )
        if not self.log_domain and (m < POSTERIOR_FLOOR / 100).any():
            bad = int(np.argwhere(m < POSTERIOR_FLOOR / 100)[0][0])
            raise ValidationError(f"posterior row {bad} has entries below floor")

    @property
    def num_frames(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_states(self) -> int:
        return self.matrix.shape[1]

    def probs(self) -> np.ndarray:
        return np.exp(self.matrix) if self.log_domain else self.matrix

    def log_probs(self) -> np.ndarray:
        return self.matrix if self.log_domain else np.log(self.matrix)


def validate_posteriors(m: np.ndarray) -> PosteriorStream:
    """Floor entries at POSTERIOR_FLOOR, renormalise rows to sum to one.

    Rows whose total mass is not positive cannot be repaired and raise a
    degenerate-frame error.
    """
    m = feature_matrix(m)
    if m.shape[0] == 0:
        raise ValidationError("cannot validate posteriors with zero frames")
    degenerate = np.flatnonzero(m.max(axis=1) <= 0.0)
    if degenerate.size:
        raise ValidationError(
            f"degenerate posterior frames (no positive mass): "
            f"{degenerate[:10].tolist()}"
        )
    floored = np.maximum(m, POSTERIOR_FLOOR)
    floored /= floored.sum(axis=1, keepdims=True)
    return PosteriorStream(floored)


@dataclass(frozen=True)
class StreamBundle:
    """The three synchronized posterior streams (A, VA, VS)."""

    a: PosteriorStream
    va: PosteriorStream
    vs: PosteriorStream

    def __post_init__(self):
        t, s = self.a.matrix.shape
        for sid, stream in zip(STREAM_ORDER, self.streams):
            if stream.matrix.shape != (t, s):
                raise ValidationError(
                    f"stream {sid.value} has shape {stream.matrix.shape}, "
                    f"expected {(t, s)}"
                )

    @property
    def streams(self) -> tuple:
        return (self.a, self.va, self.vs)

    @property
    def num_frames(self) -> int:
        return self.a.num_frames

    @property
    def num_states(self) -> int:
        return self.a.num_states

    def log_posteriors(self) -> np.ndarray:
        """Stacked log posteriors with shape (3, frames, states)."""
        return np.stack([s.log_probs() for s in self.streams])


@dataclass(frozen=True)
class TargetAlignment:
    """Per-frame reference state indices; induces one-hot targets."""

    states: np.ndarray
    num_states: int

    def __post_init__(self):
        s = np.ascontiguousarray(self.states, dtype=np.int64)
        if s.ndim != 1:
            raise ValidationError("alignment states must be a 1-D array")
        object.__setattr__(self, "states", s)
        if self.num_states < 1:
            raise ValidationError("num_states must be at least 1")
        if s.size and (s.min() < 0 or s.max() >= self.num_states):
            raise ValidationError(
                f"state index out of range [0, {self.num_states})"
            )

    @property
    def num_frames(self) -> int:
        return self.states.shape[0]

    def one_hot(self) -> np.ndarray:
        """Reference targets as a (frames, states) 0/1 matrix."""
        out = np.zeros((self.num_frames, self.num_states))
        out[np.arange(self.num_frames), self.states] = 1.0
        return out


def stream_weights(data) -> np.ndarray:
    """Validate a (frames, 3) weight matrix with entries in [0, 1]."""
    w = feature_matrix(data)
    if w.shape[1] != NUM_STREAMS:
        raise ValidationError(
            f"weights must have {NUM_STREAMS} columns, got {w.shape[1]}"
        )
    if w.size and (w.min() < 0.0 or w.max() > 1.0):
        raise ValidationError("stream weights must lie in [0, 1]")
    return w

"""Binary and CSV persistence of labeled frame sets.

Binary layout (all integers little-endian)::

    b"JVMD"            magic
    u16                format version (1)
    u32                frame length L
    f64                sample rate in Hz
    u32                entry count
    per entry:
        u16            label length in bytes
        bytes          UTF-8 label
        L x f32        samples

Samples are stored as 32-bit floats; the solvers still compute in 64 bits.
"""
import csv
import os
import struct
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadMagicError,
    DatasetError,
    InvalidInputError,
    TruncatedFileError,
    UnsupportedVersionError,
)
from .joint import FrameBatch
from .spectral import RealFrame, as_frame

__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "LabeledFrameSet",
    "write_frames",
    "read_frames",
    "decode_frames",
    "batch_by_label",
    "read_csv_frames",
    "write_csv_frames",
]

MAGIC = b"JVMD"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHIdI")
_LABEL_LEN = struct.Struct("<H")


@dataclass(frozen=True, eq=False)
class LabeledFrameSet:
    """Ordered ``(label, frame)`` entries sharing one length and sample rate."""

    entries: tuple

    def __post_init__(self):
        entries = tuple((str(label), as_frame(frame)) for label, frame in self.entries)
        if not entries:
            raise DatasetError("a labeled frame set needs at least one entry")
        L, fs = len(entries[0][1]), entries[0][1].sample_rate_hz
        for i, (label, frame) in enumerate(entries):
            if not label:
                raise DatasetError(f"entry {i} has an empty label")
            if len(label.encode("utf-8")) > 0xFFFF:
                raise DatasetError(f"entry {i} label is longer than 65535 bytes")
            if len(frame) != L or frame.sample_rate_hz != fs:
                raise DatasetError(f"entry {i} does not match the set's frame length/sample rate")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_arrays(cls, labels, samples, sample_rate_hz=1.0):
        samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
        return cls(tuple((lab, RealFrame(row, sample_rate_hz)) for lab, row in zip(labels, samples)))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other):
        if not isinstance(other, LabeledFrameSet):
            return NotImplemented
        return len(self) == len(other) and all(
            a == c and b == d for (a, b), (c, d) in zip(self.entries, other.entries)
        )

    @property
    def labels(self):
        return [label for label, _ in self.entries]

    @property
    def frame_length(self):
        return len(self.entries[0][1])

    @property
    def sample_rate_hz(self):
        return self.entries[0][1].sample_rate_hz

    def as_array(self):
        return np.stack([f.samples for _, f in self.entries])


def _encode(frame_set):
    parts = [
        _HEADER.pack(
            MAGIC, FORMAT_VERSION, frame_set.frame_length, frame_set.sample_rate_hz, len(frame_set)
        )
    ]
    for label, frame in frame_set:
        raw = label.encode("utf-8")
        parts.append(_LABEL_LEN.pack(len(raw)))
        parts.append(raw)
        parts.append(frame.samples.astype("<f4").tobytes())
    return b"".join(parts)


def write_frames(frame_set, destination):
    """Write ``frame_set`` atomically (temporary file in the same directory, then rename).

    Raises
    ------
    OSError
        If the destination cannot be written; the message names the path.
    """
    path = os.fspath(destination)
    if not path:
        raise FileNotFoundError("empty destination path")
    data = _encode(frame_set)
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".jvmd-", dir=directory)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def _need(data, offset, n, what):
    if offset + n > len(data):
        raise TruncatedFileError(f"file ends inside {what}", len(data))


def decode_frames(data):
    """Parse the bytes of a frame file; see :func:`read_frames`."""
    data = bytes(data)
    if not data[:4] == MAGIC[: min(len(data), 4)]:
        raise BadMagicError(f"bad magic {data[:4]!r}, expected {MAGIC!r}", 0)
    _need(data, 0, _HEADER.size, "header")
    _, version, L, fs, count = _HEADER.unpack_from(data, 0)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"format version {version} is not supported", 4)
    offset = _HEADER.size
    frame_bytes = 4 * L
    entries = []
    for i in range(count):
        _need(data, offset, _LABEL_LEN.size, f"label length of entry {i}")
        (n,) = _LABEL_LEN.unpack_from(data, offset)
        offset += _LABEL_LEN.size
        _need(data, offset, n, f"label of entry {i}")
        label = data[offset: offset + n].decode("utf-8")
        offset += n
        _need(data, offset, frame_bytes, f"samples of entry {i}")
        samples = np.frombuffer(data, dtype="<f4", count=L, offset=offset).astype(np.float64)
        offset += frame_bytes
        entries.append((label, RealFrame(samples, fs)))
    if offset != len(data):
        raise TruncatedFileError(
            f"{len(data) - offset} trailing bytes after the declared {count} entries", offset
        )
    return LabeledFrameSet(tuple(entries))


def read_frames(source):
    """Read a frame file written by :func:`write_frames`.

    Raises
    ------
    BadMagicError, UnsupportedVersionError, TruncatedFileError
        Each carries the byte ``offset`` where parsing failed. No partial
        set is returned.
    """
    with open(source, "rb") as fh:
        return decode_frames(fh.read())


def batch_by_label(frame_set, M):
    """Group consecutive same-label runs into batches of exactly ``M`` frames.

    Returns
    -------
    batches : list of (label, FrameBatch)
        In input order.
    dropped : int
        Frames left over at the end of each run.
    """
    if not (isinstance(M, (int, np.integer)) and M >= 1):
        raise InvalidInputError(f"batch size must be a positive integer, got {M!r}")
    batches = []
    dropped = 0
    run_label, run = None, []

    def flush():
        nonlocal dropped
        full = len(run) - len(run) % M
        for s in range(0, full, M):
            batches.append((run_label, FrameBatch(tuple(run[s: s + M]))))
        dropped += len(run) - full

    for label, frame in frame_set:
        if label != run_label:
            flush()
            run_label, run = label, []
        run.append(frame)
    flush()
    return batches, dropped


def read_csv_frames(source, sample_rate_hz=1.0):
    """One frame per row, label in the first column, samples after it."""
    entries = []
    with open(source, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row:
                continue
            try:
                samples = np.array([float(v) for v in row[1:]])
            except ValueError as exc:
                raise DatasetError(f"{source}:{lineno}: {exc}") from exc
            entries.append((row[0], RealFrame(samples, sample_rate_hz)))
    return LabeledFrameSet(tuple(entries))


def write_csv_frames(frame_set, destination):
    """Inverse of :func:`read_csv_frames` (samples written with ``repr`` precision)."""
    with open(destination, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for label, frame in frame_set:
            writer.writerow([label] + [repr(float(v)) for v in frame.samples])

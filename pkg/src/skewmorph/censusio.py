"""Deterministic on-disk persistence of censuses.

The format is a versioned plain-text file, diffable and byte-exact:

    SKEW-CENSUS v1 n=<n> count=<k> method=<oracle|backtracking|twopower|imported>
    <phi(0)> <phi(1)> ... <phi(n-1)>
    ...

one morphism per line, base-10 integers separated by single spaces, every
line terminated by a single linefeed, body lines sorted ascending
lexicographically, no trailing blank line. Reading re-validates every entry
from scratch; imported data is untrusted.
"""

from __future__ import annotations

import os
import re
import tempfile
from pathlib import Path
from typing import BinaryIO

import numpy as np

from . import _kernels
from .enumerate import Census, Method

__all__ = [
    "CensusFileError",
    "ParseError",
    "CountMismatch",
    "EntryValidationError",
    "SinkError",
    "write_census",
    "read_census",
    "cache_path",
]

_HEADER_RE = re.compile(
    rb"\ASKEW-CENSUS v1 n=(\d+) count=(\d+) method=(oracle|backtracking|twopower|imported)\Z"
)


class CensusFileError(Exception):
    """Base class for census file problems; .line is 1-based when set."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ParseError(CensusFileError):
    pass


class CountMismatch(CensusFileError):
    pass


class EntryValidationError(CensusFileError):
    """A body line parsed but is not a skew morphism."""


class SinkError(OSError):
    """Writing the census file failed."""


def render_census(census: Census) -> bytes:
    """The exact byte content of a census file."""
    header = (
        f"SKEW-CENSUS v1 n={census.n} count={len(census)} "
        f"method={census.method.value}"
    )
    lines = [header.encode("ascii")]
    for i in range(len(census)):
        lines.append(" ".join(str(int(v)) for v in census.matrix[i]).encode("ascii"))
    return b"\n".join(lines) + b"\n"


def write_census(census: Census, destination: str | Path | BinaryIO) -> None:
    """Write a census file; paths are written via a temp file renamed into
    place so readers never observe a partial file."""
    payload = render_census(census)
    if hasattr(destination, "write"):
        try:
            destination.write(payload)
        except OSError as exc:
            raise SinkError(str(exc)) from exc
        return
    path = Path(destination)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise SinkError(str(exc)) from exc


def read_census(source: str | Path | BinaryIO) -> Census:
    """Parse and fully re-validate a census file."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = Path(source).read_bytes()
    if not data:
        raise ParseError("empty file", line=1)
    if not data.endswith(b"\n"):
        raise ParseError("missing final linefeed", line=data.count(b"\n") + 1)
    lines = data[:-1].split(b"\n")
    match = _HEADER_RE.match(lines[0])
    if match is None:
        raise ParseError("malformed header", line=1)
    n = int(match.group(1))
    count = int(match.group(2))
    method = Method(match.group(3).decode("ascii"))
    if n < 1:
        raise ParseError("n must be positive", line=1)
    body = lines[1:]
    if len(body) != count:
        raise CountMismatch(
            f"header count {count} but {len(body)} body lines", line=1
        )
    matrix = np.empty((count, n), dtype=np.int64)
    for i, raw in enumerate(body):
        lineno = i + 2
        parts = raw.split(b" ")
        if len(parts) != n or b"" in parts:
            raise ParseError(f"expected {n} space-separated integers", line=lineno)
        try:
            row = [int(p) for p in parts]
        except ValueError:
            raise ParseError("non-integer field", line=lineno) from None
        matrix[i] = row
    codes, orders, kindices = _kernels.validate_rows(matrix)
    if np.any(codes != 0):
        bad = int(np.argmax(codes != 0))
        raise EntryValidationError(
            f"entry is not a skew morphism of Z_{n}", line=bad + 2
        )
    for i in range(1, count):
        a, b = matrix[i - 1], matrix[i]
        if not _lex_less(a, b):
            raise ParseError("body lines not sorted strictly ascending", line=i + 2)
    return Census(n, matrix.astype(np.int32), method,
                  orders=orders.astype(np.int32),
                  kernel_indices=kindices.astype(np.int32))


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    neq = a != b
    if not neq.any():
        return False
    i = int(np.argmax(neq))
    return bool(a[i] < b[i])


def cache_path(cache_dir: str | Path, n: int) -> Path:
    """Cache layout: <cache_dir>/z<n>.census."""
    return Path(cache_dir) / f"z{n}.census"

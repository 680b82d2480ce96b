"""Plain-text and MatrixMarket matrix/vector files.

Plain format::

    m n
    a11 a12 ... a1n
    ...
    am1 am2 ... amn

Vectors use a single-number header ``m`` followed by ``m`` values laid out
on any number of lines. Blank lines and lines starting with ``#`` are
ignored. Files whose first line starts with ``%%MatrixMarket`` are read as
MatrixMarket ``array`` files (dense, column-major).
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import EntryCountMismatch, MalformedHeader, NonFiniteValue, ParseError

MM_BANNER = "%%MatrixMarket"


def _lines(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror or exc}", path=path) from exc
    return text.splitlines()


def _content(lines, comment):
    """Yield ``(lineno, tokens)`` for non-blank, non-comment lines."""
    for i, line in enumerate(lines, start=1):
        s = line.strip()
        if not s or s.startswith(comment):
            continue
        yield i, s.split()


def _value(tok, lineno, path):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", line=lineno, path=path) from None
    if not math.isfinite(v):
        raise NonFiniteValue(f"non-finite value {tok!r}", line=lineno, path=path)
    return v


def _dims(tokens, count, lineno, path):
    if len(tokens) != count:
        raise MalformedHeader(f"expected {count} integer(s) in size line, got {' '.join(tokens)!r}",
                              line=lineno, path=path)
    try:
        dims = [int(t) for t in tokens]
    except ValueError:
        raise MalformedHeader(f"size line must hold integers, got {' '.join(tokens)!r}",
                              line=lineno, path=path) from None
    if any(d < 1 for d in dims):
        raise MalformedHeader("dimensions must be positive", line=lineno, path=path)
    return dims


def _read_mm(lines, path):
    banner = lines[0].split()
    if len(banner) < 5 or banner[1].lower() != "matrix":
        raise MalformedHeader("expected '%%MatrixMarket matrix <format> <field> <symmetry>'",
                              line=1, path=path)
    fmt, fld, sym = (t.lower() for t in banner[2:5])
    if fmt != "array":
        raise MalformedHeader(f"only the dense 'array' format is supported, got {fmt!r}",
                              line=1, path=path)
    if fld not in ("real", "integer", "double"):
        raise MalformedHeader(f"unsupported field {fld!r}", line=1, path=path)
    if sym != "general":
        raise MalformedHeader(f"unsupported symmetry {sym!r}", line=1, path=path)

    body = _content(lines[1:], "%")
    try:
        lineno, tokens = next(body)
    except StopIteration:
        raise MalformedHeader("missing size line", line=len(lines) + 1, path=path) from None
    lineno += 1
    m, n = _dims(tokens, 2, lineno, path)
    values = []
    for i, tokens in body:
        i += 1
        for tok in tokens:
            if len(values) == m * n:
                raise EntryCountMismatch(f"more than {m * n} entries", line=i, path=path)
            values.append(_value(tok, i, path))
    if len(values) != m * n:
        raise EntryCountMismatch(f"expected {m * n} entries, found {len(values)}",
                                 line=len(lines) + 1, path=path)
    return np.array(values).reshape((n, m)).T.copy()


def parse_matrix_file(path) -> np.ndarray:
    lines = _lines(path)
    if not lines:
        raise MalformedHeader("empty file", line=1, path=path)
    if lines[0].startswith(MM_BANNER):
        return _read_mm(lines, path)

    body = _content(lines, "#")
    try:
        lineno, tokens = next(body)
    except StopIteration:
        raise MalformedHeader("missing size line", line=1, path=path) from None
    m, n = _dims(tokens, 2, lineno, path)
    rows = []
    for i, tokens in body:
        if len(rows) == m:
            raise EntryCountMismatch(f"more than {m} rows", line=i, path=path)
        if len(tokens) != n:
            raise EntryCountMismatch(f"expected {n} entries in row, found {len(tokens)}",
                                     line=i, path=path)
        rows.append([_value(t, i, path) for t in tokens])
    if len(rows) != m:
        raise EntryCountMismatch(f"expected {m} rows, found {len(rows)}",
                                 line=len(lines) + 1, path=path)
    return np.array(rows, dtype=np.float64)


def parse_vector_file(path) -> np.ndarray:
    lines = _lines(path)
    if not lines:
        raise MalformedHeader("empty file", line=1, path=path)
    if lines[0].startswith(MM_BANNER):
        M = _read_mm(lines, path)
        if M.shape[1] != 1:
            raise MalformedHeader(f"expected a single column, got shape {M.shape}", line=1, path=path)
        return M[:, 0]

    body = _content(lines, "#")
    try:
        lineno, tokens = next(body)
    except StopIteration:
        raise MalformedHeader("missing size line", line=1, path=path) from None
    (m,) = _dims(tokens, 1, lineno, path)
    values = []
    for i, tokens in body:
        for tok in tokens:
            if len(values) == m:
                raise EntryCountMismatch(f"more than {m} entries", line=i, path=path)
            values.append(_value(tok, i, path))
    if len(values) != m:
        raise EntryCountMismatch(f"expected {m} entries, found {len(values)}",
                                 line=len(lines) + 1, path=path)
    return np.array(values, dtype=np.float64)


def format_matrix(A) -> str:
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    out = [f"{A.shape[0]} {A.shape[1]}"]
    out += [" ".join(repr(float(v)) for v in row) for row in A]
    return "\n".join(out) + "\n"


def format_vector(v) -> str:
    v = np.asarray(v, dtype=np.float64).ravel()
    return f"{v.size}\n" + "\n".join(repr(float(x)) for x in v) + "\n"


def write_matrix_file(path, A) -> None:
    Path(path).write_text(format_matrix(A))


def write_vector_file(path, v) -> None:
    Path(path).write_text(format_vector(v))

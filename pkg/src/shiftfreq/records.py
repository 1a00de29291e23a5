"""Plain-text file formats.

Digit files: UTF-8, optional ``# key=value`` header lines, then base-10
symbols separated by single spaces, 64 per line.

Records (certificates, trajectories, reports): one record per line, fields
written as ``key=value`` separated by single spaces. Values never contain
spaces.

Config files: flat ``key=value`` lines; ``#`` starts a comment.
"""

from __future__ import annotations

import contextlib
import sys
from pathlib import Path

import numpy as np

from .errors import InputError
from .stream import iter_chunks

PER_LINE = 64


@contextlib.contextmanager
def open_output(path):
    """A text handle for ``path``; ``-`` or empty means standard output."""
    if not path or path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def write_digits(path, source, header: dict | None = None, limit: int | None = None) -> int:
    """Write symbols from ``source`` (word, array or stream); returns the count written."""
    total = 0
    carry = np.empty(0, np.int64)
    with open_output(path) as fh:
        for key, value in (header or {}).items():
            fh.write(f"# {key}={value}\n")
        for chunk in iter_chunks(source, limit=limit):
            buf = np.concatenate([carry, chunk])
            full = len(buf) // PER_LINE * PER_LINE
            if full:
                rows = buf[:full].reshape(-1, PER_LINE)
                fh.write("".join(" ".join(map(str, row.tolist())) + "\n" for row in rows))
            carry = buf[full:]
            total += len(chunk)
        if len(carry):
            fh.write(" ".join(map(str, carry.tolist())) + "\n")
    return total


def read_digits(path) -> tuple:
    """``(header, symbols)`` with symbols as an int64 array."""
    header, body = {}, []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    try:
        arr = np.array(" ".join(body).split(), dtype=np.int64)
    except ValueError as exc:
        raise InputError(f"{path}: symbols must be base-10 integers") from exc
    if len(arr) and arr.min() < 0:
        raise InputError(f"{path}: negative symbol")
    return header, arr


def format_record(fields: dict) -> str:
    for k, v in fields.items():
        if " " in str(v) or " " in k:
            raise InputError(f"record field {k}={v!r} contains a space")
    return " ".join(f"{k}={v}" for k, v in fields.items())


def parse_record(line: str) -> dict:
    out = {}
    for item in line.split():
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"malformed record field {item!r}")
        out[key] = value
    return out


def read_records(path) -> list:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return [parse_record(l) for l in lines if l.strip() and not l.startswith("#")]


def write_records(path, lines) -> None:
    with open_output(path) as fh:
        for line in lines:
            fh.write(line + "\n")


def read_config(path) -> dict:
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"{path}:{n}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out

"""Lazy digit streams.

A :class:`DigitStream` wraps a generator of numpy chunks. It is a
single-consumer object: reading advances it. Producers may append stage
certificates to ``stream.certificates`` as the data they certify is emitted.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator

import numpy as np

CHUNK = 1 << 16
DTYPE = np.int64


class DigitStream:
    def __init__(self, chunks: Iterable, name: str = ""):
        self._source = iter(chunks)
        self._pending = np.empty(0, DTYPE)
        self.produced = 0
        self.certificates: list = []
        self.exhausted = False
        self.truncated = False  # set by producers that stop at a budget
        self.name = name

    @classmethod
    def from_word(cls, w, cycle: bool = False, name: str = "") -> "DigitStream":
        arr = np.asarray(tuple(w), dtype=DTYPE)
        if cycle:
            if not len(arr):
                raise ValueError("cannot cycle the empty word")
            reps = max(1, CHUNK // len(arr))
            block = np.tile(arr, reps)
            return cls(itertools.repeat(block), name)
        return cls([arr], name)

    @classmethod
    def from_iterable(cls, symbols: Iterable[int], name: str = "") -> "DigitStream":
        it = iter(symbols)

        def gen():
            while True:
                batch = list(itertools.islice(it, CHUNK))
                if not batch:
                    return
                yield np.asarray(batch, dtype=DTYPE)

        return cls(gen(), name)

    def _next_raw(self):
        if len(self._pending):
            out, self._pending = self._pending, np.empty(0, DTYPE)
            return out
        for chunk in self._source:
            chunk = np.asarray(chunk, dtype=DTYPE)
            if len(chunk):
                return chunk
        self.exhausted = True
        return None

    def read(self, n: int) -> np.ndarray:
        """Up to ``n`` further symbols (fewer only if the stream ends)."""
        parts, got = [], 0
        while got < n:
            chunk = self._next_raw()
            if chunk is None:
                break
            need = n - got
            if len(chunk) > need:
                self._pending = chunk[need:]
                chunk = chunk[:need]
            parts.append(chunk)
            got += len(chunk)
        self.produced += got
        return np.concatenate(parts) if parts else np.empty(0, DTYPE)

    def take(self, n: int) -> tuple:
        return tuple(int(s) for s in self.read(n))

    def chunks(self, size: int = CHUNK, limit: int | None = None) -> Iterator[np.ndarray]:
        left = limit
        while left is None or left > 0:
            want = size if left is None else min(size, left)
            chunk = self.read(want)
            if not len(chunk):
                return
            if left is not None:
                left -= len(chunk)
            yield chunk

    def __iter__(self):
        for chunk in self.chunks():
            yield from (int(s) for s in chunk)


def iter_chunks(source, size: int = CHUNK, limit: int | None = None) -> Iterator[np.ndarray]:
    """Normalise a stream, array, word or iterable of symbols into numpy chunks."""
    if isinstance(source, DigitStream):
        yield from source.chunks(size, limit)
        return
    if isinstance(source, (np.ndarray, tuple, list)):
        arr = np.asarray(source, dtype=DTYPE)
        if limit is not None:
            arr = arr[:limit]
        for i in range(0, len(arr), size):
            yield arr[i : i + size]
        return
    yield from DigitStream.from_iterable(source).chunks(size, limit)

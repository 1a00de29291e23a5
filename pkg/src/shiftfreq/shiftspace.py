"""Alphabets, words, language oracles and the padding machinery.

Words are plain tuples of ints. A :class:`ShiftSpec` describes a one-sided
subshift by its language: the full shift, a shift of finite type given by
forbidden words, or a beta-shift (admissibility delegated to a
:class:`~shiftfreq.beta.BetaSystem`).
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError, NotConnectable, ResourceError

Word = tuple  # tuple[int, ...]

ENUMERATION_CAP = 2**22

FULL = "full"
SFT = "sft"
BETA = "beta"


def word(symbols) -> Word:
    """Coerce ``"0101"``, ``[0, 1, 0, 1]`` or ``"0 1 0 1"`` into a word tuple."""
    if isinstance(symbols, str):
        text = symbols.strip()
        if " " in text or "," in text:
            return tuple(int(s) for s in text.replace(",", " ").split())
        return tuple(int(c) for c in text)
    return tuple(int(s) for s in symbols)


def fmt(w: Sequence[int]) -> str:
    """Compact text form: digits glued together for alphabets up to 10."""
    if all(0 <= s < 10 for s in w):
        return "".join(map(str, w)) if w else "ε"
    return " ".join(map(str, w))


@dataclass(frozen=True)
class ShiftSpec:
    alphabet_size: int
    kind: str = FULL
    forbidden: tuple = ()
    beta: object = None
    spec_constant: int | None = None
    name: str = ""

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise InputError("alphabet must have at least one symbol")
        if self.kind not in (FULL, SFT, BETA):
            raise InputError(f"unknown shift kind {self.kind!r}")
        for f in self.forbidden:
            if not f:
                raise InputError("forbidden words must be nonempty")
            _check_range(f, self.alphabet_size)
        if self.kind == BETA and self.beta is None:
            raise InputError("beta shift needs a BetaSystem")

    @property
    def memory(self) -> int:
        """Length of the longest constraint window (1 for the full shift)."""
        if self.kind == SFT and self.forbidden:
            return max(len(f) for f in self.forbidden)
        if self.kind == BETA:
            return self.beta.depth
        return 1

    def with_spec_constant(self, j: int) -> "ShiftSpec":
        return dataclasses.replace(self, spec_constant=j)

    def describe(self) -> str:
        if self.kind == FULL:
            return f"full:{self.alphabet_size}"
        if self.kind == SFT:
            return f"sft:{self.alphabet_size}:" + ",".join(fmt(f) for f in self.forbidden)
        return f"beta:{self.beta.label}:{self.beta.depth}"


@dataclass(frozen=True)
class LanguageSlice:
    k: int
    words: tuple

    @property
    def count(self) -> int:
        return len(self.words)

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def index(self) -> dict:
        return {w: i for i, w in enumerate(self.words)}


def full_shift(n: int) -> ShiftSpec:
    return ShiftSpec(n, FULL, spec_constant=0, name=f"full {n}-shift")


def sft(n: int, forbidden: Iterable, spec_constant: int | None = None, name: str = "") -> ShiftSpec:
    fw = tuple(sorted({word(f) for f in forbidden}))
    if not fw:
        return ShiftSpec(n, FULL, spec_constant=0 if spec_constant is None else spec_constant, name=name)
    return ShiftSpec(n, SFT, fw, spec_constant=spec_constant, name=name)


def golden_mean_shift() -> ShiftSpec:
    return sft(2, ["11"], spec_constant=1, name="golden mean shift")


def connect(spec: ShiftSpec, probe_len: int = 4, j_max: int = 8) -> ShiftSpec:
    """Return ``spec`` with its specification constant measured and recorded."""
    return spec.with_spec_constant(specification_constant(spec, probe_len, j_max))


def _check_range(w, n):
    for s in w:
        if not (isinstance(s, int) and 0 <= s < n):
            raise InputError(f"symbol {s!r} out of range for alphabet of size {n}")


def is_allowed(spec: ShiftSpec, w: Sequence[int]) -> bool:
    w = tuple(w)
    _check_range(w, spec.alphabet_size)
    if spec.kind == FULL:
        return True
    if spec.kind == SFT:
        return not _contains_forbidden(w, spec.forbidden)
    return spec.beta.parry_admissible(w)


def _contains_forbidden(w: tuple, forbidden) -> bool:
    for f in forbidden:
        m = len(f)
        for i in range(len(w) - m + 1):
            if w[i : i + m] == f:
                return True
    return False


def _extension_ok(spec: ShiftSpec, w: tuple) -> bool:
    """Admissibility of ``w`` given that ``w[:-1]`` is already admissible."""
    if spec.kind == FULL:
        return True
    if spec.kind == SFT:
        n = len(w)
        return not any(len(f) <= n and w[n - len(f) :] == f for f in spec.forbidden)
    return spec.beta.parry_admissible(w)


def enumerate_language(spec: ShiftSpec, k: int, cap: int = ENUMERATION_CAP) -> LanguageSlice:
    """All allowed words of length ``k`` in lexicographic order.

    Words are grown one symbol at a time from allowed prefixes, so the
    candidate count is ``|L_{k-1}| * N`` per level; the cap bounds it.
    """
    if k < 0:
        raise InputError("block length must be non-negative")
    n = spec.alphabet_size
    level = [()]
    for _ in range(k):
        if len(level) * n > cap:
            raise ResourceError(f"enumeration cap {cap} exceeded at length {len(level[0]) + 1}")
        level = [w + (a,) for w in level for a in range(n) if _extension_ok(spec, w + (a,))]
    return LanguageSlice(k, tuple(level))


def find_padding(spec: ShiftSpec, a: Sequence[int], b: Sequence[int], j_max: int) -> Word:
    """Shortest, then lexicographically least, ``u`` with ``a u b`` allowed."""
    a, b = tuple(a), tuple(b)
    if not is_allowed(spec, a) or not is_allowed(spec, b):
        raise InputError("padding endpoints must be allowed words")
    n = spec.alphabet_size
    for length in range(j_max + 1):
        u = _least_padding(spec, a, b, length, n)
        if u is not None:
            return u
    raise NotConnectable(f"no padding of length <= {j_max} joins {fmt(a)} and {fmt(b)}")


def _least_padding(spec, a, b, length, n):
    # depth-first in lexicographic order; a.u' must stay allowed (factor closure)
    def extend(u):
        if len(u) == length:
            return u if is_allowed(spec, a + u + b) else None
        for s in range(n):
            cand = u + (s,)
            if _extension_ok(spec, a + cand):
                found = extend(cand)
                if found is not None:
                    return found
        return None

    return extend(())


def specification_constant(spec: ShiftSpec, probe_len: int, j_max: int) -> int:
    """Smallest ``j <= j_max`` joining every pair of allowed words up to ``probe_len``."""
    if probe_len < 0 or j_max < 0:
        raise InputError("probe_len and j_max must be non-negative")
    if spec.kind == FULL:
        return 0
    words = [w for k in range(1, probe_len + 1) for w in enumerate_language(spec, k)]
    worst = 0
    for a, b in itertools.product(words, repeat=2):
        u = find_padding(spec, a, b, j_max)
        worst = max(worst, len(u))
    return worst

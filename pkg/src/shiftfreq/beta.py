"""Beta-expansions: greedy digits, Parry admissibility, SFT surrogates.

Arithmetic is exact whenever beta lies in a real quadratic field (integers,
rationals, the golden mean, ``a + b*sqrt(d)``). Other bases fall back to
mpmath interval arithmetic, and any floor that the interval cannot decide
raises :class:`PrecisionError` instead of guessing a side.
"""

from __future__ import annotations

import math
import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import mpmath

from .errors import InputError, PrecisionError
from .shiftspace import BETA, ShiftSpec, fmt, sft, specification_constant

DEFAULT_DEPTH = 64


def _isqrt_exact(d: int) -> int | None:
    r = math.isqrt(d)
    return r if r * r == d else None


class QuadraticNumber:
    """Exact element ``a + b*sqrt(d)`` of a real quadratic field (``d > 1`` squarefree-ish)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=5):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)
        if self.d < 2 or _isqrt_exact(self.d) is not None:
            raise InputError(f"sqrt({d}) is not irrational")

    def _coerce(self, other):
        if isinstance(other, QuadraticNumber):
            if other.d != self.d and other.b and self.b:
                raise InputError("mixing different quadratic fields")
            return other
        return QuadraticNumber(Fraction(other), 0, self.d)

    def _field(self, other):
        d = self.d if self.b or not isinstance(other, QuadraticNumber) else other.d
        return d

    def __add__(self, other):
        o = self._coerce(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        d = self._field(o)
        return QuadraticNumber(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        d = self._field(o)
        norm = o.a * o.a - o.b * o.b * d
        if norm == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        conj = QuadraticNumber(o.a / norm, -o.b / norm, d)
        return self * conj

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return QuadraticNumber(1, 0, self.d) / (self ** (-e))
        out = QuadraticNumber(1, 0, self.d)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        return sa if a * a > b * b * self.d else sb

    def __eq__(self, other):
        try:
            return (self - other).sign() == 0
        except (TypeError, InputError):
            return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d)) if self.b else hash(self.a)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        a, b = self.a, self.b
        if not b or not a or (a > 0) == (b > 0):
            return float(a) + float(b) * math.sqrt(self.d)
        # Opposite signs cancel; divide the exact norm by the conjugate instead.
        norm = a * a - b * b * self.d
        return float(norm) / (float(a) - float(b) * math.sqrt(self.d))

    def to_mpf(self):
        return mpmath.mpf(self.a.numerator) / self.a.denominator + (
            mpmath.mpf(self.b.numerator) / self.b.denominator
        ) * mpmath.sqrt(self.d)

    def __floor__(self):
        n = math.floor(float(self))
        while self < n:
            n -= 1
        while self >= n + 1:
            n += 1
        return n

    def __repr__(self):
        if not self.b:
            return f"Q({self.a})"
        return f"Q({self.a} + {self.b}*sqrt({self.d}))"


@contextmanager
def _iv_prec(prec):
    saved = mpmath.iv.prec
    mpmath.iv.prec = prec
    try:
        yield
    finally:
        mpmath.iv.prec = saved


def _raw_floor(raw) -> int:
    """Exact floor of an mpmath raw tuple ``(sign, man, exp, bc)``."""
    sign, man, exp, _ = raw
    man = int(man)
    if exp >= 0:
        return -(man << exp) if sign else man << exp
    shift = -exp
    if sign:
        return -((man + (1 << shift) - 1) >> shift)
    return man >> shift


class _Interval:
    """Thin wrapper over ``mpmath.iv`` intervals used for non-quadratic bases."""

    def __init__(self, x, prec):
        self.x, self.prec = x, prec

    @classmethod
    def of(cls, value, prec):
        with _iv_prec(prec):
            return cls(mpmath.iv.mpf(value), prec)

    def _other(self, other):
        return other.x if isinstance(other, _Interval) else mpmath.iv.mpf(other)

    def __mul__(self, other):
        with _iv_prec(self.prec):
            return _Interval(self.x * self._other(other), self.prec)

    __rmul__ = __mul__

    def __sub__(self, other):
        with _iv_prec(self.prec):
            return _Interval(self.x - self._other(other), self.prec)

    @property
    def lo(self):
        return self.x.a

    @property
    def hi(self):
        return self.x.b

    def __floor__(self):
        lo_raw, hi_raw = self.x._mpi_
        lo, hi = _raw_floor(lo_raw), _raw_floor(hi_raw)
        if lo != hi:
            raise PrecisionError(
                f"interval [{float(mpmath.mpf(lo_raw)):.12g}, {float(mpmath.mpf(hi_raw)):.12g}] "
                "straddles a partition endpoint"
            )
        return lo

    def is_zero(self):
        lo_raw, hi_raw = self.x._mpi_
        if not lo_raw[1] and not hi_raw[1]:
            return True
        if lo_raw[0] or not lo_raw[1]:
            raise PrecisionError("cannot decide whether the remainder vanishes")
        return False

    def __float__(self):
        return float(self.x.mid)


@dataclass(frozen=True)
class BetaSystem:
    """A base ``beta > 1`` with its quasi-greedy expansion of one, to depth ``depth``."""

    value: object  # QuadraticNumber or Fraction (exact), or mpmath.mpf with ``prec``
    depth: int = DEFAULT_DEPTH
    label: str = ""
    prec: int = 0  # > 0 selects interval arithmetic at this many bits
    dstar: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.depth < 1:
            raise InputError("depth must be at least 1")
        if not self.float_value > 1:
            raise InputError("beta must exceed 1")
        if not self.dstar:
            object.__setattr__(self, "dstar", tuple(_quasi_greedy(self, self.depth)))
        if not self.label:
            object.__setattr__(self, "label", mpmath.nstr(self.float_value, 12))

    # constructors -------------------------------------------------------
    @classmethod
    def golden(cls, depth: int = DEFAULT_DEPTH) -> "BetaSystem":
        return cls(QuadraticNumber(Fraction(1, 2), Fraction(1, 2), 5), depth, "golden")

    @classmethod
    def integer(cls, n: int, depth: int = DEFAULT_DEPTH) -> "BetaSystem":
        return cls(Fraction(n), depth, str(n))

    @classmethod
    def rational(cls, q, depth: int = DEFAULT_DEPTH) -> "BetaSystem":
        q = Fraction(q)
        return cls(q, depth, str(q))

    @classmethod
    def quadratic(cls, a, b, d, depth: int = DEFAULT_DEPTH) -> "BetaSystem":
        return cls(QuadraticNumber(a, b, d), depth)

    @classmethod
    def from_mpf(cls, x, depth: int = DEFAULT_DEPTH, prec: int = 256, label: str = "") -> "BetaSystem":
        """Generic real base evaluated with ``prec``-bit interval arithmetic."""
        with mpmath.workprec(prec):
            x = mpmath.mpf(x)
        return cls(x, depth, label, prec)

    @classmethod
    def parse(cls, text: str, depth: int = DEFAULT_DEPTH) -> "BetaSystem":
        """``golden``, ``2``, ``9/5``, ``1.8``, ``a+b*sqrt(d)``, ``pi``, ``e``."""
        t = text.strip().lower().replace(" ", "")
        if t in ("golden", "phi"):
            return cls.golden(depth)
        if t in ("pi", "e"):
            with mpmath.workprec(256):
                v = mpmath.pi if t == "pi" else mpmath.e
                return cls.from_mpf(+v, depth, 256, t)
        m = re.fullmatch(r"([-+]?[\d./]+)?([-+][\d./]*)\*?sqrt\((\d+)\)", t)
        if m:
            a = Fraction(m.group(1) or 0)
            b = m.group(2)
            b = Fraction(b + "1" if b in "+-" else b)
            return cls(QuadraticNumber(a, b, int(m.group(3))), depth, text.strip())
        try:
            q = Fraction(t)
        except ValueError as exc:
            raise InputError(f"cannot parse beta {text!r}") from exc
        return cls(q, depth, text.strip())

    # properties ---------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.prec == 0

    @property
    def float_value(self) -> float:
        return float(self.value)

    @property
    def alphabet_size(self) -> int:
        """Number of digits, ``ceil(beta)``."""
        if self.exact:
            return -math.floor(-self.value)
        with mpmath.workprec(self.prec):
            return int(mpmath.ceil(self.value))

    def _num(self, x):
        """Lift ``x`` into the arithmetic used for this base."""
        if self.exact:
            if isinstance(self.value, QuadraticNumber):
                if isinstance(x, QuadraticNumber):
                    return x
                return QuadraticNumber(_to_fraction(x), 0, self.value.d)
            if isinstance(x, QuadraticNumber):
                raise InputError("quadratic point with a rational base")
            return _to_fraction(x)
        if isinstance(x, QuadraticNumber):
            x = x.to_mpf()
        elif isinstance(x, Fraction):
            with mpmath.workprec(self.prec):
                x = mpmath.mpf(x.numerator) / x.denominator
        return _Interval.of(x, self.prec)

    def _beta(self):
        if self.exact:
            return self.value
        return _Interval.of(self.value, self.prec)

    def point(self, a, b=0):
        """The exact field element ``a + b*sqrt(d)`` (``b`` only for quadratic bases)."""
        if isinstance(self.value, QuadraticNumber):
            return QuadraticNumber(a, b, self.value.d)
        if b:
            raise InputError("irrational coefficient needs a quadratic base")
        return Fraction(a)

    def inverse_power(self, h: int):
        """Exact ``beta**-h`` (quadratic or rational bases only)."""
        if not self.exact:
            raise InputError("exact powers need a quadratic or rational base")
        return 1 / (self.value**h) if isinstance(self.value, QuadraticNumber) else Fraction(1) / self.value**h

    def greedy_expansion(self, x, n: int):
        return greedy_expansion(x, self, n)

    def parry_admissible(self, w) -> bool:
        return parry_admissible(w, self)


def _to_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def _greedy_digits(sys: BetaSystem, y, n: int):
    beta = sys._beta()
    out = []
    for _ in range(n):
        t = beta * y
        d = math.floor(t)
        out.append(d)
        y = t - d
    return out


def greedy_expansion(x, sys: BetaSystem, n: int):
    """First ``n`` digits of the greedy orbit of ``x`` under ``y -> beta*y mod 1``."""
    if n < 1:
        raise InputError("need at least one digit")
    y = sys._num(x)
    if sys.exact:
        if not (0 <= y < 1):
            raise InputError(f"x must lie in [0, 1), got {float(y)}")
    else:
        lo_raw, hi_raw = y.x._mpi_
        if lo_raw[0] and lo_raw[1] or _raw_floor(hi_raw) >= 1:
            raise InputError("x must lie in [0, 1)")
    return tuple(_greedy_digits(sys, y, n))


def _quasi_greedy(sys: BetaSystem, n: int):
    beta = sys._beta()
    r = sys._num(1)
    digits = []
    while len(digits) < n:
        t = beta * r
        d = math.floor(t)
        r = t - d
        digits.append(d)
        if (r == 0) if sys.exact else r.is_zero():
            # terminating d_1..d_m becomes (d_1..d_{m-1}(d_m - 1)) repeated
            period = digits[:-1] + [d - 1]
            reps = -(-n // len(period))
            return (period * reps)[:n]
    return digits


def quasi_greedy_of_one(sys: BetaSystem, n: int):
    """First ``n`` digits of the quasi-greedy expansion of 1."""
    if n < 1:
        raise InputError("need at least one digit")
    if n <= len(sys.dstar):
        return sys.dstar[:n]
    # periodic tails from terminating expansions are rebuilt by _quasi_greedy
    return tuple(_quasi_greedy(sys, n))


def parry_admissible(w: Sequence[int], sys: BetaSystem) -> bool:
    """Every suffix of ``w`` is lexicographically at most the expansion of one."""
    w = tuple(w)
    top = sys.alphabet_size
    for s in w:
        if not (isinstance(s, int) and 0 <= s < top):
            raise InputError(f"digit {s!r} out of range for base {sys.label}")
    dstar, depth = sys.dstar, sys.depth
    for i in range(len(w)):
        m = min(len(w) - i, depth)
        if w[i : i + m] > dstar[:m]:
            return False
    return True


def self_admissible(sys: BetaSystem) -> bool:
    d = sys.dstar
    return all(d[i:] <= d[: len(d) - i] for i in range(1, len(d)))


def sft_approximation(sys: BetaSystem, depth: int) -> ShiftSpec:
    """Shift of finite type forbidding the minimal rejected words of length ``<= depth``.

    A minimal rejected word must be a prefix of the expansion of one with
    its last digit raised; those candidates are filtered for minimality.
    """
    if depth < 1:
        raise InputError("depth must be at least 1")
    dstar = quasi_greedy_of_one(sys, depth)
    forbidden = []
    for i in range(depth):
        for c in range(dstar[i] + 1, sys.alphabet_size):
            cand = dstar[:i] + (c,)
            if parry_admissible(cand[1:], sys):
                forbidden.append(cand)
    spec = sft(sys.alphabet_size, forbidden, name=f"beta {sys.label} SFT depth {depth}")
    return spec


def beta_shift(sys: BetaSystem, probe_len: int = 4) -> ShiftSpec:
    """The beta-shift language itself, with its padding constant probed."""
    spec = ShiftSpec(sys.alphabet_size, BETA, beta=sys, name=f"beta-shift {sys.label}")
    return spec.with_spec_constant(specification_constant(spec, probe_len, sys.depth))


class Point(NamedTuple):
    value: float
    error: float


def symbolic_to_point(w: Sequence[int], sys: BetaSystem) -> Point:
    """``sum d_h beta**-h`` together with the tail bound ``beta**-len(w)``."""
    w = tuple(w)
    if sys.exact:
        total = sys.point(0)
        inv = 1 / sys.value
        p = inv
        for d in w:
            if d:
                total = total + d * p
            p = p * inv
        return Point(float(total), float(sys.value) ** -len(w))
    with mpmath.workprec(sys.prec):
        b = sys.value
        total = mpmath.fsum(d * b ** -(h + 1) for h, d in enumerate(w))
        return Point(float(total), float(b ** -len(w)))


@dataclass(frozen=True)
class CylinderInterval:
    lower: float
    upper: float
    digits: tuple

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, other: "CylinderInterval", slack: float = 1e-12) -> bool:
        return self.lower - slack <= other.lower and other.upper <= self.upper + slack


def max_continuation(w: Sequence[int], sys: BetaSystem, n: int):
    """Lexicographically largest admissible continuation of ``w`` of length ``n``."""
    w = tuple(w)
    out = ()
    for _ in range(n):
        for c in range(sys.alphabet_size - 1, -1, -1):
            if parry_admissible(w + out + (c,), sys):
                out += (c,)
                break
    return out


def cylinder_interval(w: Sequence[int], sys: BetaSystem) -> CylinderInterval:
    """Closed interval of points whose greedy expansion starts with ``w``."""
    w = tuple(w)
    if not parry_admissible(w, sys):
        raise InputError(f"{fmt(w)} is not admissible")
    lower = symbolic_to_point(w, sys).value
    tail = max_continuation(w, sys, sys.depth)
    upper = symbolic_to_point(w + tail, sys).value
    # the truncated tail misses at most beta**-(|w|+depth)
    upper = min(1.0, upper + float(sys.float_value) ** -(len(w) + sys.depth))
    return CylinderInterval(lower, upper, w)

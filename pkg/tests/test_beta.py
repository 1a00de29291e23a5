import itertools
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftfreq import InputError, enumerate_language, sft_approximation
from shiftfreq.beta import (
    BetaSystem,
    beta_shift,
    cylinder_interval,
    greedy_expansion,
    parry_admissible,
    quasi_greedy_of_one,
    symbolic_to_point,
)

GOLDEN = BetaSystem.golden()
PHI = (1 + 5**0.5) / 2
unit = st.fractions(min_value=0, max_value=1, max_denominator=10**6).filter(lambda x: x < 1)


def test_golden_fixtures():
    assert greedy_expansion(GOLDEN.inverse_power(1), GOLDEN, 20) == (1,) + (0,) * 19
    assert greedy_expansion(GOLDEN.inverse_power(2), GOLDEN, 20) == (0, 1) + (0,) * 18
    assert quasi_greedy_of_one(GOLDEN, 8) == (1, 0) * 4


def test_integer_base_is_decimal():
    ten = BetaSystem.integer(10)
    assert greedy_expansion(Fraction(1, 7), ten, 8) == (1, 4, 2, 8, 5, 7, 1, 4)
    assert greedy_expansion("0.25", ten, 4) == (2, 5, 0, 0)


def test_rational_base():
    b = BetaSystem.rational(Fraction(5, 2))
    assert b.alphabet_size == 3
    assert quasi_greedy_of_one(b, 3)[0] == 2


def test_out_of_range_point():
    with pytest.raises(InputError):
        greedy_expansion(Fraction(3, 2), GOLDEN, 3)


def test_parse():
    assert BetaSystem.parse("golden").alphabet_size == 2
    assert BetaSystem.parse("3/2").alphabet_size == 2


@given(unit)
def test_round_trip(x):
    n = 40
    d = greedy_expansion(x, GOLDEN, n)
    p = symbolic_to_point(d, GOLDEN)
    # Greedy digits undershoot by less than beta**-n.
    assert -1e-12 <= float(x) - p.value <= PHI**-n + 1e-12
    assert parry_admissible(d, GOLDEN)


@given(unit, st.sampled_from(["3/2", "5/2", "10"]))
def test_round_trip_other_bases(x, base):
    sysb = BetaSystem.parse(base)
    n = 30
    d = greedy_expansion(x, sysb, n)
    err = float(x) - symbolic_to_point(d, sysb).value
    assert -1e-12 <= err <= float(sysb.float_value) ** -n + 1e-12


@given(st.lists(st.integers(0, 1), min_size=1, max_size=12).map(tuple))
def test_cylinders_nest(w):
    if not parry_admissible(w, GOLDEN):
        return
    outer = cylinder_interval(w, GOLDEN)
    assert 0 <= outer.lower <= outer.upper <= 1
    for a in (0, 1):
        if parry_admissible(w + (a,), GOLDEN):
            assert outer.contains(cylinder_interval(w + (a,), GOLDEN))


def test_cylinder_endpoint():
    c = cylinder_interval((1, 0, 0), GOLDEN)
    assert c.lower == pytest.approx(1 / PHI, abs=1e-15)
    assert c.upper == pytest.approx(1 / PHI + PHI**-3, abs=1e-12)


@pytest.mark.parametrize("base", ["golden", "3/2", "5/2"])
def test_sft_approximation_matches_parry_language(base):
    sysb = BetaSystem.parse(base, depth=16)
    approx = sft_approximation(sysb, 16)
    for k in range(1, 9):
        brute = [w for w in itertools.product(range(sysb.alphabet_size), repeat=k) if parry_admissible(w, sysb)]
        assert list(enumerate_language(approx, k).words) == brute


def test_beta_shift_spec():
    spec = beta_shift(GOLDEN)
    assert len(enumerate_language(spec, 5)) == 13


def test_from_mpf():
    sysb = BetaSystem.from_mpf(mpmath.mpf(PHI), label="phi-float")
    assert greedy_expansion(Fraction(1, 2), sysb, 10) == greedy_expansion(Fraction(1, 2), GOLDEN, 10)


def test_spec_examples():
    two, three = BetaSystem.integer(2), BetaSystem.integer(3)
    assert greedy_expansion(Fraction(3, 4), two, 4) == (1, 1, 0, 0)
    assert quasi_greedy_of_one(GOLDEN, 6) == (1, 0, 1, 0, 1, 0)
    assert quasi_greedy_of_one(two, 4) == (1, 1, 1, 1)
    assert quasi_greedy_of_one(three, 4) == (2, 2, 2, 2)
    assert not parry_admissible((1, 1), GOLDEN)
    assert parry_admissible((1, 0, 1, 0), GOLDEN)
    assert parry_admissible((1, 1, 1, 1, 0), two)
    assert sft_approximation(GOLDEN, 2).forbidden == ((1, 1),)
    assert sft_approximation(GOLDEN, 5).forbidden == ((1, 1),)
    assert not sft_approximation(two, 6).forbidden
    assert symbolic_to_point((1, 0, 0, 0, 0), GOLDEN).value == pytest.approx(0.618034, abs=1e-6)
    assert symbolic_to_point((0, 1, 0, 0), GOLDEN).value == pytest.approx(0.381966, abs=1e-6)
    assert symbolic_to_point((0,) * 10, three).value == 0
    one = cylinder_interval((1,), GOLDEN)
    assert one.lower == pytest.approx(1 / PHI) and one.upper == pytest.approx(1.0)
    zero = cylinder_interval((0,), two)
    assert (zero.lower, zero.upper) == pytest.approx((0.0, 0.5))
    empty = cylinder_interval((), GOLDEN)
    assert (empty.lower, empty.upper) == pytest.approx((0.0, 1.0))


def test_parry_matches_sft_on_short_words():
    approx = sft_approximation(GOLDEN, 2)
    from shiftfreq import is_allowed

    for k in range(0, 11):
        for w in itertools.product((0, 1), repeat=k):
            assert parry_admissible(w, GOLDEN) == is_allowed(approx, w)


def test_dstar_is_self_admissible():
    from shiftfreq.beta import self_admissible

    for base in ("golden", "3/2", "5/2", "7/3"):
        assert self_admissible(BetaSystem.parse(base))

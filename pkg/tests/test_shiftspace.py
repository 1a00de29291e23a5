import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_language, fibonacci_counts, forbidden_scan
from shiftfreq import (
    InputError,
    NotConnectable,
    ResourceError,
    connect,
    enumerate_language,
    find_padding,
    full_shift,
    golden_mean_shift,
    is_allowed,
    sft,
    specification_constant,
)
from shiftfreq.shiftspace import fmt, word

binary = st.lists(st.integers(0, 1), max_size=30).map(tuple)
forbidden_sets = st.lists(st.lists(st.integers(0, 1), min_size=1, max_size=3).map(tuple), min_size=0, max_size=3)


def test_word_parsing():
    assert word("0110") == (0, 1, 1, 0)
    assert word("1 12 3") == (1, 12, 3)
    assert fmt((0, 1)) == "01"


def test_golden_examples():
    g = golden_mean_shift()
    assert is_allowed(g, (0, 1, 0, 1))
    assert not is_allowed(g, (0, 1, 1))
    assert g.spec_constant == 1
    assert list(enumerate_language(g, 3).words) == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 0, 1)]


@pytest.mark.parametrize("k", range(3, 13))
def test_golden_counts_are_fibonacci(k):
    assert len(enumerate_language(golden_mean_shift(), k)) == fibonacci_counts(k)[-1]


def test_full_shift_language():
    assert len(enumerate_language(full_shift(3), 4)) == 81


def test_enumeration_cap():
    with pytest.raises(ResourceError):
        enumerate_language(full_shift(2), 30)


def test_symbol_out_of_range():
    with pytest.raises(InputError):
        is_allowed(golden_mean_shift(), (0, 2))


@given(binary, forbidden_sets)
def test_is_allowed_matches_scan(w, forbidden):
    assert is_allowed(sft(2, forbidden), w) == forbidden_scan(w, forbidden)


@given(binary)
def test_factor_closure(w):
    g = golden_mean_shift()
    if is_allowed(g, w):
        for i, j in itertools.combinations(range(len(w) + 1), 2):
            assert is_allowed(g, w[i:j])


@given(forbidden_sets, st.integers(1, 7))
def test_enumeration_matches_brute_force(forbidden, k):
    lib = enumerate_language(sft(2, forbidden), k).words
    assert list(lib) == brute_language(2, forbidden, k)


def test_padding_joins_words():
    g = golden_mean_shift()
    u = find_padding(g, (1,), (1,), 3)
    assert is_allowed(g, (1,) + u + (1,))
    assert len(u) <= 1


def test_padding_is_deterministic():
    spec = connect(sft(2, ["000", "111"]))
    rng = random.Random(3)
    for _ in range(20):
        a = tuple(rng.choice(enumerate_language(spec, 3).words))
        b = tuple(rng.choice(enumerate_language(spec, 3).words))
        assert find_padding(spec, a, b, 4) == find_padding(spec, a, b, 4)
        assert is_allowed(spec, a + find_padding(spec, a, b, 4) + b)


def test_specification_constant_values():
    assert specification_constant(golden_mean_shift(), 4, 8) == 1
    assert specification_constant(full_shift(2), 4, 8) == 0


def test_not_connectable():
    # {01, 10} forbids every change of symbol, so 0 and 1 cannot be joined.
    with pytest.raises(NotConnectable):
        connect(sft(2, ["01", "10"]))


def test_spec_examples():
    g = golden_mean_shift()
    assert is_allowed(full_shift(2), word("0110"))
    assert not is_allowed(g, word("11"))
    assert is_allowed(g, word("0101001"))
    assert list(enumerate_language(full_shift(2), 2).words) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert list(enumerate_language(g, 1).words) == [(0,), (1,)]
    assert find_padding(full_shift(2), (1,), (1,), 0) == ()
    assert find_padding(g, (1,), (1,), 2) == (0,)
    assert find_padding(g, (0,), (1,), 2) == ()
    assert specification_constant(g, 4, 4) == 1
    assert specification_constant(full_shift(3), 2, 2) == 0


def test_alternating_sft_has_no_small_constant():
    # {00, 11} leaves only the two alternating points; 0 and 0 cannot be joined by an even gap.
    spec = sft(2, ["00", "11"])
    try:
        j = specification_constant(spec, 4, 4)
    except NotConnectable:
        return
    assert is_allowed(spec, (0,) + find_padding(spec, (0,), (0,), j) + (0,))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4).map(tuple), st.integers(1, 4))
def test_enumeration_on_four_letters(f, k):
    forbidden = [f]
    assert list(enumerate_language(sft(4, forbidden), k).words) == [
        w for w in itertools.product(range(4), repeat=k) if forbidden_scan(w, forbidden)
    ]


def test_extension_property_under_specification():
    g = golden_mean_shift()
    words = [w for k in range(1, 5) for w in enumerate_language(g, k).words]
    for a in words:
        for b in words:
            u = find_padding(g, a, b, g.spec_constant)
            assert len(u) <= g.spec_constant and is_allowed(g, a + u + b)

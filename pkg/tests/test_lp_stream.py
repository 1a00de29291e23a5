from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from shiftfreq.lp import feasible_point, is_feasible
from shiftfreq.stream import DigitStream, iter_chunks

small = st.integers(-3, 3)


@given(st.integers(1, 3), st.integers(1, 4), st.data())
def test_feasibility_matches_scipy(m, n, data):
    A = [[data.draw(small) for _ in range(n)] for _ in range(m)]
    b = [data.draw(small) for _ in range(m)]
    x = feasible_point(A, b)
    res = linprog(np.zeros(n), A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
    assert (x is not None) == (res.status == 0)
    if x is not None:
        assert all(v >= 0 for v in x)
        assert all(sum(Fraction(a) * v for a, v in zip(row, x)) == bi for row, bi in zip(A, b))


def test_exact_boundary():
    # x0 + x1 = 1, x1 = 1/2 + 10^-30 is feasible; with x1 > 1 it is not.
    tiny = Fraction(1, 10**30)
    assert is_feasible([[1, 1], [0, 1]], [1, Fraction(1, 2) + tiny])
    assert not is_feasible([[1, 1], [0, 1]], [1, 1 + tiny])


def test_stream_reading():
    s = DigitStream.from_word((0, 1, 2), cycle=True)
    assert s.take(7) == (0, 1, 2, 0, 1, 2, 0)
    assert s.read(2).tolist() == [1, 2]
    s = DigitStream.from_iterable(iter(range(10)))
    parts = list(s.chunks(size=4, limit=9))
    assert [p.tolist() for p in parts] == [[0, 1, 2, 3], [4, 5, 6, 7], [8]]


@given(st.lists(st.integers(0, 5), max_size=100), st.integers(1, 17), st.one_of(st.none(), st.integers(0, 120)))
def test_iter_chunks(w, size, limit):
    got = np.concatenate(list(iter_chunks(tuple(w), size, limit)) or [np.empty(0, np.int64)])
    expect = w if limit is None else w[:limit]
    assert got.tolist() == expect

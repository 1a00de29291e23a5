"""Exact phase-one simplex over the rationals.

Only feasibility of ``A x = b, x >= 0`` is needed, so there is no objective
beyond the sum of artificial variables. Bland's rule prevents cycling.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def feasible_point(A: Sequence[Sequence], b: Sequence) -> list | None:
    """A basic feasible solution of ``A x = b, x >= 0``, or ``None``.

    Entries may be ints, Fractions or anything Fraction accepts; the
    returned point is a list of Fractions.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    rhs = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]]
        bi = Fraction(b[i])
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
        rows.append(row)
        rhs.append(bi)
    if m == 0:
        return [Fraction(0)] * n
    rhs_orig = list(rhs)

    # tableau columns: n structural, then m artificials
    T = [rows[i] + [Fraction(int(i == r)) for r in range(m)] for i in range(m)]
    basis = [n + i for i in range(m)]
    width = n + m
    # reduced costs of phase-one objective (minimise sum of artificials)
    cost = [-sum(T[i][c] for i in range(m)) for c in range(n)] + [Fraction(0)] * m

    while True:
        enter = next((c for c in range(width) if cost[c] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:  # unbounded direction cannot occur in phase one
            break
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        rhs[leave] /= piv
        for i in range(m):
            if i != leave and T[i][enter]:
                f = T[i][enter]
                Ti, Tl = T[i], T[leave]
                T[i] = [Ti[c] - f * Tl[c] for c in range(width)]
                rhs[i] -= f * rhs[leave]
        f = cost[enter]
        cost = [cost[c] - f * T[leave][c] for c in range(width)]
        basis[leave] = enter

    x = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = rhs[i]
        elif rhs[i] != 0:
            return None
    return x if all(sum(r[c] * x[c] for c in range(n)) == bi for r, bi in zip(rows, rhs_orig)) else None


def is_feasible(A, b) -> bool:
    return feasible_point(A, b) is not None

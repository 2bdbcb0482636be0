"""Smith normal form over the integers.

Python ints are arbitrary precision, so intermediate growth never overflows.
"""
from __future__ import annotations


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _swap_cols(M, i, j):
    for row in M:
        row[i], row[j] = row[j], row[i]


def _add_row(M, src, dst, c):
    """row[dst] += c * row[src]"""
    if c:
        M[dst] = [a + c * b for a, b in zip(M[dst], M[src])]


def _add_col(M, src, dst, c):
    if c:
        for row in M:
            row[dst] += c * row[src]


def smith_normal_form(M):
    """Return ``(factors, U, V)`` with ``U @ M @ V`` diagonal.

    ``factors`` lists the ``min(m, n)`` diagonal entries, nonnegative, each
    dividing the next, zeros last.  ``U`` and ``V`` are unimodular.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero |entry| in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        _swap_rows(A, t, i)
        _swap_rows(U, t, i)
        _swap_cols(A, t, j)
        _swap_cols(V, t, j)

        done = False
        while not done:
            done = True
            p = A[t][t]
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    _add_row(A, t, i, -q)
                    _add_row(U, t, i, -q)
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    _add_col(A, t, j, -q)
                    _add_col(V, t, j, -q)
                if A[t][j]:
                    done = False
            if not done:
                # a remainder is smaller than the pivot; move it into place
                best = None
                for i in range(t, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < abs(A[best][t])):
                        best = i
                _swap_rows(A, t, best)
                _swap_rows(U, t, best)
                best = None
                for j in range(t, n):
                    if A[t][j] and (best is None or abs(A[t][j]) < abs(A[t][best])):
                        best = j
                _swap_cols(A, t, best)
                _swap_cols(V, t, best)
                continue
            # divisibility of the trailing block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is not None:
                _add_row(A, bad, t, 1)
                _add_row(U, bad, t, 1)
                done = False
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    factors = [A[i][i] for i in range(min(m, n))]
    return factors, U, V


def invariant_factors(M):
    return smith_normal_form(M)[0]


def integer_rank(M) -> int:
    return sum(1 for d in invariant_factors(M) if d != 0)

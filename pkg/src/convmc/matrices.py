"""Dense exact linear algebra over Fraction.

Everything downstream (homology, contractions, gauge solves, moduli normal
forms) reduces to row operations on small dense matrices with Fraction
entries.  Pivoting is deterministic: scan columns left to right, take the
first row with a nonzero entry.  No floating point enters anywhere.

Matrices are lists of rows, rows are lists of Fraction.  Vectors are lists
of Fraction.  Functions return fresh objects and never mutate arguments.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

Matrix = list  # list[list[Fraction]]
Vector = list  # list[Fraction]


def zeros(m: int, n: int) -> Matrix:
    return [[ZERO] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def copy(a: Matrix) -> Matrix:
    return [row[:] for row in a]


def shape(a: Matrix) -> tuple[int, int]:
    return (len(a), len(a[0]) if a else 0)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    m, n = shape(a)
    n2, k = shape(b)
    if n != n2:
        raise ValueError(f"shape mismatch: {m}x{n} times {n2}x{k}")
    out = zeros(m, k)
    for i in range(m):
        arow = a[i]
        orow = out[i]
        for t in range(n):
            c = arow[t]
            if c:
                brow = b[t]
                for j in range(k):
                    if brow[j]:
                        orow[j] += c * brow[j]
    return out


def mat_vec(a: Matrix, v: Vector) -> Vector:
    m, n = shape(a)
    if n != len(v):
        raise ValueError("dimension mismatch in mat_vec")
    return [sum((a[i][j] * v[j] for j in range(n) if v[j]), ZERO) for i in range(m)]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ValueError("shape mismatch in mat_add")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c: Fraction, a: Matrix) -> Matrix:
    return [[c * x for x in row] for row in a]


def transpose(a: Matrix) -> Matrix:
    m, n = shape(a)
    return [[a[i][j] for i in range(m)] for j in range(n)]


def is_zero_matrix(a: Matrix) -> bool:
    return all(all(x == 0 for x in row) for row in a)


def rref(a: Matrix) -> tuple[Matrix, list[tuple[int, int]]]:
    """Reduced row echelon form.

    Returns (R, pivots) where pivots is the list of (row, column) positions
    in the order found.  The pivot rule is the one fixed for the whole
    package: leftmost nonzero column first, and within a column the smallest
    untouched row index.
    """
    r = copy(a)
    m, n = shape(r)
    pivots: list[tuple[int, int]] = []
    prow = 0
    for col in range(n):
        sel = None
        for row in range(prow, m):
            if r[row][col] != 0:
                sel = row
                break
        if sel is None:
            continue
        if sel != prow:
            r[sel], r[prow] = r[prow], r[sel]
        inv = ONE / r[prow][col]
        if inv != 1:
            r[prow] = [x * inv for x in r[prow]]
        for row in range(m):
            if row != prow and r[row][col]:
                c = r[row][col]
                r[row] = [x - c * y for x, y in zip(r[row], r[prow])]
        pivots.append((prow, col))
        prow += 1
        if prow == m:
            break
    return r, pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def nullspace(a: Matrix) -> list[Vector]:
    """Deterministic kernel basis: one vector per free column, in increasing
    column order, with a 1 at the free column."""
    r, pivots = rref(a)
    _, n = shape(a)
    pivot_cols = [c for _, c in pivots]
    pivot_of_col = {c: row for row, c in pivots}
    free = [c for c in range(n) if c not in pivot_of_col]
    basis = []
    for fc in free:
        v = [ZERO] * n
        v[fc] = ONE
        for c in pivot_cols:
            v[c] = -r[pivot_of_col[c]][fc]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Vector) -> Vector | None:
    """One exact solution of a x = b, or None.  Free variables are set to 0,
    so the solution is the canonical one for the fixed pivot rule."""
    m, n = shape(a)
    if len(b) != m:
        raise ValueError("rhs length mismatch")
    aug = [a[i][:] + [b[i]] for i in range(m)]
    r, pivots = rref(aug)
    for row, col in pivots:
        if col == n:
            return None  # pivot in the augmented column: inconsistent
    x = [ZERO] * n
    for row, col in pivots:
        x[col] = r[row][n]
    return x


def solve_matrix(a: Matrix, b: Matrix) -> Matrix | None:
    """Solve a X = b columnwise; None if any column is inconsistent."""
    m, n = shape(a)
    mb, k = shape(b)
    if mb != m:
        raise ValueError("shape mismatch in solve_matrix")
    cols = []
    for j in range(k):
        x = solve(a, [b[i][j] for i in range(m)])
        if x is None:
            return None
        cols.append(x)
    return [[cols[j][i] for j in range(k)] for i in range(n)]


def column_space_pivots(a: Matrix) -> list[int]:
    """Indices of the pivot columns of a; those columns of the original
    matrix form the canonical image basis."""
    return [c for _, c in rref(a)[1]]


def in_span(vectors: Sequence[Vector], v: Vector) -> Vector | None:
    """Coordinates of v in the given spanning vectors (columns), or None."""
    if not vectors:
        return [] if all(x == 0 for x in v) else None
    n = len(v)
    a = [[vec[i] for vec in vectors] for i in range(n)]
    return solve(a, list(v))


def coset_reduce(v: Vector, directions: Sequence[Vector]) -> Vector:
    """Canonical representative of v + span(directions).

    Row-reduce the directions and subtract multiples so that v becomes zero
    in every pivot coordinate.  Deterministic and idempotent; the output is
    the unique coset member supported away from the pivot columns.
    """
    if not directions:
        return list(v)
    r, pivots = rref([list(d) for d in directions])
    out = list(v)
    for row, col in pivots:
        c = out[col]
        if c:
            out = [x - c * y for x, y in zip(out, r[row])]
    return out


def vectors_equal(u: Vector, v: Vector) -> bool:
    return len(u) == len(v) and all(x == y for x, y in zip(u, v))

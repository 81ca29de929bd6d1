"""Dense exact linear algebra over the rationals.

Homology ranks, eta-inversion and boundary solving all reduce to row
echelon computations here.  Everything is Fraction-exact; no floats are
allowed anywhere in the library.  Matrices are plain lists of rows and
sizes stay at desk scale (a few hundred rows), so there is no need for
sparse formats or pivoting heuristics beyond determinism.
"""

from __future__ import annotations

from fractions import Fraction

Q0 = Fraction(0)
Q1 = Fraction(1)

Vector = list[Fraction]
Matrix = list[list[Fraction]]


def _copy(rows: Matrix) -> Matrix:
    return [row[:] for row in rows]


def rref(rows: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns.

    Pivots are chosen left to right, first nonzero row wins: the result is
    deterministic for a given input, which downstream code relies on for
    reproducible basis choices.
    """
    m = _copy(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def solve(rows: Matrix, rhs: Vector, column_order: list[int] | None = None) -> Vector | None:
    """One exact solution of ``rows @ x = rhs`` or None if inconsistent.

    Free variables are set to zero, so the solution is the deterministic
    minimal-support one for the given pivot preference.  ``column_order``
    permutes the pivot preference (still returning coordinates in the
    original order); two different orders give two genuinely different
    particular solutions when the system is underdetermined.
    """
    if not rows:
        return [] if all(x == 0 for x in rhs) else None
    ncols = len(rows[0])
    order = list(range(ncols)) if column_order is None else list(column_order)
    aug = [[row[c] for c in order] + [b] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    for row in red[len(pivots):]:
        if row[ncols] != 0:
            return None
    if any(p == ncols for p in pivots):
        return None
    x = [Fraction(0)] * ncols
    for k, p in enumerate(pivots):
        x[order[p]] = red[k][ncols]
    return x


def nullspace(rows: Matrix) -> list[Vector]:
    """Deterministic basis of the kernel of ``rows``."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for k, p in enumerate(pivots):
            v[p] = -red[k][free]
        basis.append(v)
    return basis


def solve_in_span(columns: list[Vector], target: Vector,
                  column_order: list[int] | None = None) -> Vector | None:
    """Coefficients expressing ``target`` in the span of ``columns``."""
    if not columns:
        return [] if all(x == 0 for x in target) else None
    rows = [[col[r] for col in columns] for r in range(len(target))]
    return solve(rows, target, column_order)


class PresolvedSystem:
    """A coefficient matrix factored once for many right-hand sides.

    Row-reduces the matrix augmented with the identity, recording the row
    transform; each later solve costs one matrix-vector product instead of
    a fresh elimination.  Solutions match ``solve`` (free variables zero).
    """

    def __init__(self, rows: Matrix, ncols: int | None = None):
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else (ncols or 0)
        aug = [row[:] + [Q1 if i == j else Q0 for j in range(self.nrows)]
               for i, row in enumerate(rows)]
        red, pivots = rref(aug)
        self.pivots = [p for p in pivots if p < self.ncols]
        self.transform = [row[self.ncols:] for row in red]

    def solve(self, rhs: Vector) -> Vector | None:
        reduced = [sum((t * b for t, b in zip(row, rhs)), Q0)
                   for row in self.transform]
        for k in range(len(self.pivots), self.nrows):
            if reduced[k] != 0:
                return None
        x = [Q0] * self.ncols
        for k, p in enumerate(self.pivots):
            x[p] = reduced[k]
        return x


def column_rank(columns: list[Vector]) -> int:
    if not columns:
        return 0
    return rank([[col[r] for col in columns] for r in range(len(columns[0]))])

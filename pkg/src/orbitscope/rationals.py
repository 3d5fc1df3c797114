"""Exact linear algebra over the rationals.

Matrices are immutable tuples of tuples of Fraction, vectors are tuples of
Fraction.  Everything here is deterministic: pivots are always chosen as the
first usable column / row in storage order, never by magnitude, so repeated
runs produce identical output bit for bit.
"""

from __future__ import annotations

from fractions import Fraction

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(text) -> Fraction:
    """Parse 'p/q', 'p', or a decimal string into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


def format_rational(q: Fraction) -> str:
    return str(q)


def vec(entries) -> Vec:
    return tuple(Fraction(e) for e in entries)


def mat(rows) -> Mat:
    out = tuple(tuple(Fraction(e) for e in row) for row in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def mat_identity(n: int) -> Mat:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def mat_is_square(a: Mat) -> bool:
    return bool(a) and all(len(r) == len(a) for r in a)


def mat_mul(a: Mat, b: Mat) -> Mat:
    n, m, p = len(a), len(b), len(b[0])
    if len(a[0]) != m:
        raise ValueError("shape mismatch")
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(ra[k] * cb[k] for k in range(m)) for cb in bt) for ra in a
    )


def mat_vec(a: Mat, v: Vec) -> Vec:
    if len(a[0]) != len(v):
        raise ValueError("shape mismatch")
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in a)


def mat_transpose(a: Mat) -> Mat:
    return tuple(zip(*a))


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(a: Mat, c: Fraction) -> Mat:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_sub_identity(a: Mat) -> Mat:
    """a - I, used for fixed-space constraints."""
    n = len(a)
    return tuple(
        tuple(a[i][j] - (ONE if i == j else ZERO) for j in range(n)) for i in range(n)
    )


def dot(u: Vec, v: Vec) -> Fraction:
    return sum(x * y for x, y in zip(u, v))


def mat_det(a: Mat) -> Fraction:
    """Determinant by fraction Gaussian elimination (no pivoting by size)."""
    n = len(a)
    rows = [list(r) for r in a]
    det = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if piv is None:
            return ZERO
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        det *= rows[col][col]
        inv = ONE / rows[col][col]
        for r in range(col + 1, n):
            if rows[r][col] != 0:
                factor = rows[r][col] * inv
                for c in range(col, n):
                    rows[r][c] -= factor * rows[col][c]
    return det


def mat_inverse(a: Mat) -> Mat:
    """Exact inverse via Gauss-Jordan; raises ValueError when singular."""
    n = len(a)
    rows = [list(r) + list(ident_row) for r, ident_row in zip(a, mat_identity(n))]
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = ONE / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return tuple(tuple(row[n:]) for row in rows)


def rref(rows_in) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot_columns).

    Zero rows are dropped.  Pivot columns come out strictly increasing, the
    first nonzero column of each surviving row.
    """
    rows = [list(r) for r in rows_in if any(x != 0 for x in r)]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = ONE / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    return rows[:rank], pivots


def nullspace(rows_in, ncols: int) -> list[Vec]:
    """Basis of the right null space, in the standard free-column form.

    Each basis vector has a 1 in one free column and zeros in the others,
    which makes the output canonical given the column order.
    """
    red, pivots = rref(rows_in)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(tuple(v))
    return basis


def solve_canonical(columns: list[Vec], target: Vec) -> list[Fraction] | None:
    """Solve sum_j x_j * columns[j] = target; canonical solution or None.

    Elimination walks columns left to right, so when the system is
    underdetermined the solution is supported on the earliest independent
    columns and all later free unknowns are zero.  Returns None when the
    system is inconsistent.
    """
    nrows = len(target)
    ncols = len(columns)
    aug = [[columns[j][r] for j in range(ncols)] + [target[r]] for r in range(nrows)]
    rank = 0
    pivots: list[int] = []
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if aug[r][col] != 0), None)
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = ONE / aug[rank][col]
        aug[rank] = [x * inv for x in aug[rank]]
        for r in range(nrows):
            if r != rank and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[rank])]
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    for r in range(rank, nrows):
        if aug[r][ncols] != 0:
            return None
    solution = [ZERO] * ncols
    for r, pc in enumerate(pivots):
        solution[pc] = aug[r][ncols]
    # rows below rank are all-zero in the coefficient part but may still
    # carry a nonzero rhs when rank == nrows was hit early; re-check fully
    if rank == nrows:
        for r in range(nrows):
            lhs = sum(solution[j] * columns[j][r] for j in range(ncols))
            if lhs != target[r]:
                return None
    return solution


class RowReducer:
    """Incremental exact rank tracker.

    Feed vectors one at a time; ``add`` reports whether the vector enlarged
    the span.  Pivots are first-nonzero positions, so the greedy selection
    over a canonically ordered candidate stream is deterministic.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivot_rows: dict[int, list[Fraction]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def residual(self, v) -> list[Fraction]:
        row = list(v)
        for col in sorted(self.pivot_rows):
            if row[col] != 0:
                factor = row[col]
                prow = self.pivot_rows[col]
                row = [x - factor * y for x, y in zip(row, prow)]
        return row

    def contains(self, v) -> bool:
        return all(x == 0 for x in self.residual(v))

    def add(self, v) -> bool:
        row = self.residual(v)
        piv = next((c for c in range(self.ncols) if row[c] != 0), None)
        if piv is None:
            return False
        inv = ONE / row[piv]
        self.pivot_rows[piv] = [x * inv for x in row]
        return True

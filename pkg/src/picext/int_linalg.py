"""Exact integer matrix algebra: Smith normal form, linear solving, kernels.

Everything runs on Python's arbitrary-precision integers; there is no
floating point anywhere.  Reductions use elementary (unimodular) row and
column operations with pivots chosen by minimal absolute value, and every
placed pivot immediately Hermite-reduces the entries it dominates — the
standard guard against intermediate coefficient explosion.

Solving and kernel extraction go through a column Hermite form, which only
has to track the column transform.  The Smith form alternates row/column
Hermite passes until the matrix is diagonal and then enforces the
divisibility chain.

Sign conventions: Smith diagonal entries are nonnegative, so decompositions
of equal matrices are directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputMismatch, InvariantViolation


class IntMatrix:
    """Immutable integer matrix, row-major.

    Zero-dimensional shapes (0 x n, n x 0) are legal and show up constantly
    as maps to and from the trivial group.
    """

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, entries: Iterable[Sequence[int]], cols: int | None = None):
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise InputMismatch("ragged matrix rows")
            if cols is not None and cols != width:
                raise InputMismatch(f"expected {cols} columns, got {width}")
            cols = width
        elif cols is None:
            cols = 0
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "_hash", None)

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(((0,) * cols for _ in range(rows)), cols=cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls((tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), cols=n)

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: int | None = None, cols: int | None = None) -> "IntMatrix":
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        return cls(
            (tuple(diag[i] if i == j and i < len(diag) else 0 for j in range(cols)) for i in range(rows)),
            cols=cols,
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int | None = None) -> "IntMatrix":
        if columns:
            rows = len(columns[0]) if rows is None else rows
        elif rows is None:
            rows = 0
        return cls((tuple(col[i] for col in columns) for i in range(rows)), cols=len(columns))

    # -- access ------------------------------------------------------------

    def __getitem__(self, rc: tuple[int, int]) -> int:
        return self.entries[rc[0]][rc[1]]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    # -- arithmetic ----------------------------------------------------------

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise InputMismatch(f"cannot multiply {self.shape} by {other.shape}")
        bt = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = []
        for arow in self.entries:
            out.append(tuple(sum(a * b for a, b in zip(arow, bcol) if a) for bcol in bt))
        return IntMatrix(out, cols=other.cols)

    def mul_vector(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise InputMismatch("vector length mismatch")
        return tuple(sum(a * x for a, x in zip(row, vec) if a) for row in self.entries)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix((tuple(c * x for x in row) for row in self.entries), cols=self.cols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise InputMismatch("shape mismatch in addition")
        return IntMatrix(
            (tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
            cols=self.cols,
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + other.scale(-1)

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self.entries) if self.rows else [], cols=self.rows)

    # -- predicates ----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.cols, self.entries))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"IntMatrix({list(map(list, self.entries))!r}, cols={self.cols})"


def hstack(mats: Sequence[IntMatrix]) -> IntMatrix:
    mats = [m for m in mats]
    if not mats:
        return IntMatrix([], cols=0)
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise InputMismatch("hstack row mismatch")
    return IntMatrix(
        (tuple(x for m in mats for x in m.entries[i]) for i in range(rows)),
        cols=sum(m.cols for m in mats),
    )


def vstack(mats: Sequence[IntMatrix]) -> IntMatrix:
    mats = [m for m in mats]
    if not mats:
        return IntMatrix([], cols=0)
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise InputMismatch("vstack column mismatch")
    return IntMatrix((row for m in mats for row in m.entries), cols=cols)


def block_diag(mats: Sequence[IntMatrix]) -> IntMatrix:
    total_rows = sum(m.rows for m in mats)
    total_cols = sum(m.cols for m in mats)
    out = [[0] * total_cols for _ in range(total_rows)]
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m.entries):
            out[r0 + i][c0 : c0 + m.cols] = row
        r0 += m.rows
        c0 += m.cols
    return IntMatrix(out, cols=total_cols)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (x, y, g) with x*a + y*b == g >= 0."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


# ---------------------------------------------------------------------------
# Hermite passes (in-place on lists of row lists)
# ---------------------------------------------------------------------------


def _col_hermite(s: list[list[int]], v: list[list[int]] | None, m: int, n: int) -> list[tuple[int, int]]:
    """Column echelon with Hermite reduction; returns pivots [(row, col)].

    Column operations are mirrored into ``v`` (as column operations), so
    original * v == result.  After each pivot lands, entries left of it in
    its row are reduced into [0, pivot), which is what keeps both the work
    matrix and the transform small.
    """

    def col_sub(j, t, q):
        if q:
            for row in s:
                row[j] -= q * row[t]
            if v is not None:
                for row in v:
                    row[j] -= q * row[t]

    def col_swap(j, t):
        if j != t:
            for row in s:
                row[j], row[t] = row[t], row[j]
            if v is not None:
                for row in v:
                    row[j], row[t] = row[t], row[j]

    def col_neg(j):
        for row in s:
            row[j] = -row[j]
        if v is not None:
            for row in v:
                row[j] = -row[j]

    pivots: list[tuple[int, int]] = []
    t = 0
    for i in range(m):
        if t >= n:
            break
        row = s[i]
        live = [j for j in range(t, n) if row[j]]
        if not live:
            continue
        # gcd-combine the live columns into position t, smallest entry first
        while len(live) > 1:
            live.sort(key=lambda j: abs(row[j]))
            j0 = live[0]
            nxt = []
            for j in live[1:]:
                col_sub(j, j0, row[j] // row[j0])
                if row[j]:
                    nxt.append(j)
            live = [j0] + nxt
        col_swap(live[0], t)
        if row[t] < 0:
            col_neg(t)
        g = row[t]
        # Hermite-reduce the entries this pivot dominates
        for j in range(t):
            col_sub(j, t, row[j] // g)
        pivots.append((i, t))
        t += 1
    return pivots


def _row_hermite(s: list[list[int]], u: list[list[int]] | None, m: int, n: int) -> list[tuple[int, int]]:
    """Row echelon with Hermite reduction; row ops mirrored into ``u``."""

    def row_sub(i, t, q):
        if q:
            si, st = s[i], s[t]
            for k in range(n):
                si[k] -= q * st[k]
            if u is not None:
                ui, ut = u[i], u[t]
                for k in range(len(ui)):
                    ui[k] -= q * ut[k]

    def row_swap(i, t):
        if i != t:
            s[i], s[t] = s[t], s[i]
            if u is not None:
                u[i], u[t] = u[t], u[i]

    def row_neg(i):
        s[i] = [-x for x in s[i]]
        if u is not None:
            u[i] = [-x for x in u[i]]

    pivots: list[tuple[int, int]] = []
    t = 0
    for j in range(n):
        if t >= m:
            break
        live = [i for i in range(t, m) if s[i][j]]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda i: abs(s[i][j]))
            i0 = live[0]
            nxt = []
            for i in live[1:]:
                row_sub(i, i0, s[i][j] // s[i0][j])
                if s[i][j]:
                    nxt.append(i)
            live = [i0] + nxt
        row_swap(live[0], t)
        if s[t][j] < 0:
            row_neg(t)
        g = s[t][j]
        for i in range(t):
            row_sub(i, t, s[i][j] // g)
        pivots.append((t, j))
        t += 1
    return pivots


@dataclass(frozen=True)
class SmithDecomposition:
    """u * a * v == s with u, v unimodular and s in Smith normal form."""

    u: IntMatrix
    s: IntMatrix
    v: IntMatrix

    def diagonal(self) -> tuple[int, ...]:
        n = min(self.s.rows, self.s.cols)
        return tuple(self.s.entries[i][i] for i in range(n))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal() if d)


def _is_scattered_diagonal(s: list[list[int]], m: int, n: int) -> bool:
    for i in range(m):
        nz = 0
        for j in range(n):
            if s[i][j]:
                nz += 1
                if nz > 1:
                    return False
    for j in range(n):
        nz = 0
        for i in range(m):
            if s[i][j]:
                nz += 1
                if nz > 1:
                    return False
    return True


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Diagonalize ``a`` by unimodular row and column operations.

    Total on all integer matrices.  Alternates Hermite column and row
    passes until the matrix is diagonal, then enforces the divisibility
    chain, so the diagonal is the canonical Smith form: nonnegative with
    each entry dividing the next.
    """
    m, n = a.rows, a.cols
    s = [list(row) for row in a.entries]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    for _ in range(1000):
        _col_hermite(s, v, m, n)
        if _is_scattered_diagonal(s, m, n):
            break
        _row_hermite(s, u, m, n)
        if _is_scattered_diagonal(s, m, n):
            break
    else:
        raise InvariantViolation("smith normal form did not converge")

    # Pivots are scattered; permute them onto the leading diagonal.
    entries = sorted((i, j) for i in range(m) for j in range(n) if s[i][j])
    for t, (i, j) in enumerate(entries):
        if i != t:
            s[i], s[t] = s[t], s[i]
            u[i], u[t] = u[t], u[i]
        jj = next(jc for jc in range(n) if s[t][jc])
        if jj != t:
            for row in s:
                row[jj], row[t] = row[t], row[jj]
            for row in v:
                row[jj], row[t] = row[t], row[jj]
    r = len(entries)
    for t in range(r):
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]

    # Enforce the divisibility chain d_i | d_{i+1}.
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            ai, bi = s[i][i], s[i + 1][i + 1]
            if bi % ai == 0:
                continue
            changed = True
            # col_i += col_{i+1}: block becomes [[a, 0], [b, b]]
            for row in s:
                row[i] += row[i + 1]
            for row in v:
                row[i] += row[i + 1]
            x, y, g = xgcd(ai, bi)
            ri, rj = s[i], s[i + 1]
            s[i] = [x * p + y * q for p, q in zip(ri, rj)]
            s[i + 1] = [(-bi // g) * p + (ai // g) * q for p, q in zip(ri, rj)]
            ri, rj = u[i], u[i + 1]
            u[i] = [x * p + y * q for p, q in zip(ri, rj)]
            u[i + 1] = [(-bi // g) * p + (ai // g) * q for p, q in zip(ri, rj)]
            # clear the reduced block's remaining off-diagonal entry
            q = s[i][i + 1] // s[i][i]
            for row in s:
                row[i + 1] -= q * row[i]
            for row in v:
                row[i + 1] -= q * row[i]

    return SmithDecomposition(u=IntMatrix(u, cols=m), s=IntMatrix(s, cols=n), v=IntMatrix(v, cols=n))


# ---------------------------------------------------------------------------
# Column Hermite form: the workhorse behind solving and kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnHermite:
    """h == a * v with v unimodular and h in column echelon form."""

    h: IntMatrix
    v: IntMatrix
    pivots: tuple[tuple[int, int], ...]  # (row, col), rows strictly increasing

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def solve(self, b: Sequence[int]) -> tuple[int, ...] | None:
        """Some x with a*x == b, or None; forward substitution on h."""
        if len(b) != self.h.rows:
            raise InputMismatch(f"right-hand side has length {len(b)}, expected {self.h.rows}")
        residual = list(b)
        y = [0] * self.h.cols
        for (i, t) in self.pivots:
            g = self.h.entries[i][t]
            if residual[i] % g:
                return None
            q = residual[i] // g
            if q:
                y[t] = q
                col = self.h.column(t)
                for k in range(i, len(residual)):
                    residual[k] -= q * col[k]
        if any(residual):
            return None
        return self.v.mul_vector(y)


def column_hermite(a: IntMatrix) -> ColumnHermite:
    m, n = a.rows, a.cols
    s = [list(row) for row in a.entries]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    pivots = _col_hermite(s, v, m, n)
    return ColumnHermite(
        h=IntMatrix(s, cols=n), v=IntMatrix(v, cols=n), pivots=tuple(pivots)
    )


def solve_linear(a: IntMatrix, b: Sequence[int]) -> tuple[int, ...] | None:
    """Some integer solution x of a*x == b, or None when none exists.

    Equivalent to Smith-reducing the system: with the decomposition
    u*a*v == s the system becomes s*y == u*b, and a solution exists exactly
    when each diagonal entry divides the transformed right-hand side and the
    entries beyond the rank vanish.  The implementation substitutes down a
    column Hermite form, which detects the same obstructions.
    """
    return column_hermite(a).solve(b)


def solve_matrix(a: IntMatrix, b: IntMatrix) -> IntMatrix | None:
    """Columnwise solve: X with a*X == b, sharing one reduction."""
    if b.rows != a.rows:
        raise InputMismatch("row mismatch in solve_matrix")
    ch = column_hermite(a)
    cols = []
    for j in range(b.cols):
        x = ch.solve(b.column(j))
        if x is None:
            return None
        cols.append(x)
    return IntMatrix.from_columns(cols, rows=a.cols)


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Columns form a basis of the integer kernel lattice {x : a*x == 0}.

    These are the transform columns sitting over the zero columns of the
    column Hermite form; the transform being unimodular makes them a basis
    of the full (saturated) kernel lattice.  Column count is cols - rank.
    """
    ch = column_hermite(a)
    pivot_cols = {t for (_, t) in ch.pivots}
    return IntMatrix.from_columns(
        [ch.v.column(j) for j in range(a.cols) if j not in pivot_cols], rows=a.cols
    )


def lattice_basis(gens: IntMatrix) -> IntMatrix:
    """Basis of the lattice spanned by the columns of ``gens``.

    Column operations preserve the column lattice, so the nonzero columns of
    the column Hermite form are a basis.
    """
    ch = column_hermite(gens)
    return IntMatrix.from_columns(
        [ch.h.column(t) for (_, t) in ch.pivots], rows=gens.rows
    )


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix."""
    if m.rows != m.cols:
        raise InputMismatch("inverse of a non-square matrix")
    inv = solve_matrix(m, IntMatrix.identity(m.rows))
    if inv is None:
        raise InputMismatch("matrix is not unimodular")
    return inv


def determinant(a: IntMatrix) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise InputMismatch("determinant of a non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = [list(row) for row in a.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]

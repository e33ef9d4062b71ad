"""Independent brute-force cross-checks.

Nothing here shares a code path with the machinery it validates: finite
groups are handled in canonical residue coordinates, Ext groups are
recomputed from symmetric 2-cocycle tables, Hom groups by exhaustive
enumeration of generator images, and the degree -1/0/1 derived Hom groups
from cohomology alone via the splitting formula.  The modular linear
algebra lives here too (numpy, exact small-modulus arithmetic) so that the
main library's integer lattice routines are never in the loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product as iter_product

import numpy as np

from .abelian import FgAbGroup, GroupElement, direct_sum, ext1_group, hom_group
from .complexes import TwoTermComplex, cohomology
from .errors import DomainError, InputMismatch
from .int_linalg import IntMatrix, smith_normal_form, unimodular_inverse, xgcd

_TABLE_GUARD = 10_000
_HOM_GUARD = 100_000


class FiniteAbelianTable:
    """A finite group in canonical residue coordinates.

    Elements are tuples of residues along the Smith basis of the relation
    matrix; addition is componentwise modular arithmetic, so nothing from
    the lattice machinery is needed once the table is built.
    """

    def __init__(self, g: FgAbGroup):
        if not g.is_finite():
            raise DomainError("group is infinite")
        dec = g.snf
        self.group = g
        self.moduli = tuple(dec.diagonal())
        self._u = dec.u
        self._u_inv = unimodular_inverse(dec.u) if g.ambient_rank else IntMatrix.identity(0)
        self.elements = [tuple(c) for c in iter_product(*(range(d) for d in self.moduli))]
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.order = len(self.elements)

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.moduli)

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.moduli))

    def neg(self, a) -> tuple[int, ...]:
        return tuple((-x) % d for x, d in zip(a, self.moduli))

    def scale(self, c: int, a) -> tuple[int, ...]:
        return tuple((c * x) % d for x, d in zip(a, self.moduli))

    def from_ambient(self, coords) -> tuple[int, ...]:
        c = self._u.mul_vector(coords)
        return tuple(x % d for x, d in zip(c, self.moduli))

    def to_element(self, t) -> GroupElement:
        return self.group.element(self._u_inv.mul_vector(t))

    def generators(self) -> list[tuple[int, ...]]:
        """Canonical generators: one residue basis vector per modulus > 1."""
        out = []
        for pos, d in enumerate(self.moduli):
            if d > 1:
                out.append(tuple(1 if t == pos else 0 for t in range(len(self.moduli))))
        return out


# ---------------------------------------------------------------------------
# Modular kernels (oracle-local linear algebra)
# ---------------------------------------------------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _echelon_mod(rows: np.ndarray, q: int) -> np.ndarray:
    """Row echelon mod q via unimodular 2-row combines; kernel preserved."""
    if rows.size == 0:
        return np.zeros((0, rows.shape[1]), dtype=np.int64)
    work = rows % q
    work = work[work.any(axis=1)]
    placed: list[np.ndarray] = []
    for col in range(rows.shape[1]):
        if work.shape[0] == 0:
            break
        live = np.nonzero(work[:, col])[0]
        if len(live) == 0:
            continue
        base = work[live[0]]
        for i in live[1:]:
            a, b = int(base[col]), int(work[i][col])
            x, y, g = xgcd(a, b)
            t1 = (x * base + y * work[i]) % q
            t2 = ((-b // g) * base + (a // g) * work[i]) % q
            base, work[i] = t1, t2
        placed.append(base.copy())
        keep = np.ones(work.shape[0], dtype=bool)
        keep[live[0]] = False
        work = work[keep]
        work = work[work.any(axis=1)]
    return np.array(placed, dtype=np.int64) if placed else np.zeros((0, rows.shape[1]), dtype=np.int64)


def _kernel_gf2(rows: np.ndarray, ncols: int) -> list[tuple[int, ...]]:
    """GF(2) kernel with rows packed into Python integers as bitsets."""
    pivots: dict[int, int] = {}
    for row in rows:
        r = 0
        for j in np.nonzero(row & 1)[0]:
            r |= 1 << int(j)
        while r:
            c = (r & -r).bit_length() - 1
            if c in pivots:
                r ^= pivots[c]
            else:
                pivots[c] = r
                break
    cols_sorted = sorted(pivots)
    for c in cols_sorted:
        pr = pivots[c]
        for c2 in cols_sorted:
            if c2 != c and (pivots[c2] >> c) & 1:
                pivots[c2] ^= pr
    gens = []
    for f in range(ncols):
        if f in pivots:
            continue
        vec = [0] * ncols
        vec[f] = 1
        for c in cols_sorted:
            if (pivots[c] >> f) & 1:
                vec[c] = 1
        gens.append(tuple(vec))
    return gens


def kernel_mod(rows: np.ndarray, q: int) -> list[tuple[int, ...]]:
    """Generators of {x in (Z/q)^C : rows @ x == 0 mod q}."""
    ncols = rows.shape[1]
    if q == 2:
        return _kernel_gf2(rows, ncols)
    ech = _echelon_mod(rows, q)
    if ech.shape[0] == 0:
        return [tuple(1 if t == j else 0 for t in range(ncols)) for j in range(ncols)]
    if _is_prime(q):
        # normalize pivots and back-reduce: classic RREF kernel
        pivots = []
        for r in range(ech.shape[0]):
            nz = np.nonzero(ech[r] % q)[0]
            if len(nz) == 0:
                continue
            c = int(nz[0])
            inv = pow(int(ech[r][c]), -1, q)
            ech[r] = (ech[r] * inv) % q
            pivots.append((r, c))
        for (r, c) in pivots:
            for r2, _ in pivots:
                if r2 != r and ech[r2][c]:
                    ech[r2] = (ech[r2] - int(ech[r2][c]) * ech[r]) % q
        pivot_cols = {c for (_, c) in pivots}
        gens = []
        for c in range(ncols):
            if c in pivot_cols:
                continue
            vec = [0] * ncols
            vec[c] = 1
            for (r, pc) in pivots:
                vec[pc] = (-int(ech[r][c])) % q
            gens.append(tuple(vec))
        return gens
    # prime power: exact integer Smith form of the (small) echelon matrix
    dec = smith_normal_form(IntMatrix([[int(x) for x in row] for row in ech], cols=ncols))
    diag = dec.diagonal()
    gens = []
    for t in range(ncols):
        if t < len(diag) and diag[t]:
            from math import gcd

            mult = q // gcd(diag[t], q)
            if mult % q == 0:
                continue
            vec = tuple((mult * x) % q for x in dec.v.column(t))
        else:
            vec = tuple(x % q for x in dec.v.column(t))
        if any(vec):
            gens.append(vec)
    return gens


# ---------------------------------------------------------------------------
# Factor sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorSet:
    """Normalized symmetric 2-cocycle on a finite base with finite fiber."""

    base: FiniteAbelianTable
    fiber: FiniteAbelianTable
    table: tuple[tuple[tuple[int, ...], ...], ...]  # indexed by base element indices

    def __post_init__(self):
        n = self.base.order
        if n * n > _TABLE_GUARD:
            raise DomainError("factor set table exceeds the enumeration guard")
        z = self.fiber.zero()
        els = self.base.elements
        idx = self.base.index
        for i, x in enumerate(els):
            if self.value(self.base.zero(), x) != z or self.value(x, self.base.zero()) != z:
                raise InputMismatch("factor set is not normalized")
        for i, x in enumerate(els):
            for j, y in enumerate(els):
                if self.table[i][j] != self.table[j][i]:
                    raise InputMismatch("factor set is not symmetric")
        add, fadd = self.base.add, self.fiber.add
        for x in els:
            for y in els:
                for zz in els:
                    lhs = fadd(self.value(x, y), self.value(add(x, y), zz))
                    rhs = fadd(self.value(y, zz), self.value(x, add(y, zz)))
                    if lhs != rhs:
                        raise InputMismatch("cocycle identity fails")

    def value(self, x, y) -> tuple[int, ...]:
        return self.table[self.base.index[x]][self.base.index[y]]

    @classmethod
    def from_function(cls, base: FiniteAbelianTable, fiber: FiniteAbelianTable, fn) -> "FactorSet":
        table = tuple(
            tuple(fn(x, y) for y in base.elements) for x in base.elements
        )
        return cls(base=base, fiber=fiber, table=table)

    def middle_invariants(self) -> tuple[int, tuple[int, ...]]:
        """Invariants of the extension group fiber x base with twisted sum.

        Computed by counting element orders, so it never touches the
        presentation machinery.
        """
        els = [(a, b) for a in self.fiber.elements for b in self.base.elements]

        def add(p, q):
            return (
                self.fiber.add(self.fiber.add(p[0], q[0]), self.value(p[1], q[1])),
                self.base.add(p[1], q[1]),
            )

        zero = (self.fiber.zero(), self.base.zero())
        n = len(els)
        factors = _invariants_by_orders(els, add, zero, n)
        return (0, factors)


def _invariants_by_orders(els, add, zero, n) -> tuple[int, ...]:
    """Invariant factors of a finite abelian group given by its addition."""

    def power(x, c):
        acc = zero
        base = x
        while c:
            if c & 1:
                acc = add(acc, base)
            base = add(base, base)
            c >>= 1
        return acc

    def prime_factors(v):
        out = {}
        d = 2
        while d * d <= v:
            while v % d == 0:
                out[d] = out.get(d, 0) + 1
                v //= d
            d += 1
        if v > 1:
            out[v] = out.get(v, 0) + 1
        return out

    per_prime: dict[int, list[int]] = {}
    for p, e_max in prime_factors(n).items():
        counts = [1]
        for k in range(1, e_max + 1):
            c = sum(1 for x in els if power(x, p**k) == zero)
            counts.append(c)
        logs = []
        for c in counts:
            e = 0
            while p**e < c:
                e += 1
            logs.append(e)
        ge = [logs[k] - logs[k - 1] for k in range(1, len(logs))]
        parts = []
        for k, g in enumerate(ge, start=1):
            nxt = ge[k] if k < len(ge) else 0
            parts.extend([k] * (g - nxt))
        per_prime[p] = sorted(parts, reverse=True)
    width = max((len(v) for v in per_prime.values()), default=0)
    factors = []
    for i in range(width):
        d = 1
        for p, parts in per_prime.items():
            if i < len(parts):
                d *= p ** parts[i]
        factors.append(d)
    return tuple(sorted(d for d in factors if d > 1))


# ---------------------------------------------------------------------------
# Ext^1 by exhaustive cocycle linear algebra
# ---------------------------------------------------------------------------


def _prime_power_split(d: int) -> list[int]:
    out = []
    p = 2
    while p * p <= d:
        if d % p == 0:
            q = 1
            while d % p == 0:
                q *= p
                d //= p
            out.append(q)
        p += 1
    if d > 1:
        out.append(d)
    return out


def _ext1_cocycles_cyclic(base: FiniteAbelianTable, q: int) -> FgAbGroup:
    """H^2_sym(B, Z/q) from the cocycle/coboundary lattices mod q."""
    n = base.order
    if n == 1:
        return FgAbGroup.trivial()
    nz = base.elements[1:]
    pos = {e: t for t, e in enumerate(nz)}
    C = (n - 1) * (n - 1)

    def var(x, y):
        return pos[x] * (n - 1) + pos[y]

    rows: list[np.ndarray] = []
    for a in range(n - 1):
        for b in range(a + 1, n - 1):
            r = np.zeros(C, dtype=np.int64)
            r[a * (n - 1) + b] = 1
            r[b * (n - 1) + a] = q - 1
            rows.append(r)
    zero = base.zero()
    for g in base.generators():
        for x in nz:
            for y in nz:
                r = np.zeros(C, dtype=np.int64)
                r[var(y, g)] += 1
                xy = base.add(x, y)
                if xy != zero:
                    r[var(xy, g)] -= 1
                yg = base.add(y, g)
                if yg != zero:
                    r[var(x, yg)] += 1
                r[var(x, y)] -= 1
                if r.any():
                    rows.append(r % q)
    mat = np.array(rows, dtype=np.int64) if rows else np.zeros((0, C), dtype=np.int64)
    cocycles = kernel_mod(mat, q)
    cobound = []
    for w in nz:
        vec = [0] * C
        for x in nz:
            for y in nz:
                v = (1 if x == w else 0) + (1 if y == w else 0)
                if base.add(x, y) == w:
                    v -= 1
                vec[var(x, y)] = v % q
        cobound.append(tuple(vec))
    s = len(cocycles)
    if s == 0:
        return FgAbGroup.trivial()
    stacked = np.array(
        [list(c) for c in cocycles] + [list(c) for c in cobound], dtype=np.int64
    ).T  # C x (s + t)
    rel = kernel_mod(stacked, q)
    rel_cols = [tuple(r[:s]) for r in rel] + [
        tuple(q if t == j else 0 for t in range(s)) for j in range(s)
    ]
    return FgAbGroup(s, IntMatrix.from_columns(rel_cols, rows=s))


def ext1_by_factor_sets(b: FgAbGroup, a: FgAbGroup) -> FgAbGroup:
    """Ext^1(b, a) as symmetric 2-cocycles modulo coboundaries.

    The coefficient group splits into prime-power cyclic blocks at the data
    level (a table valued in a product is a tuple of tables), so each block
    is handled by one modular kernel computation.
    """
    if not (a.is_finite() and b.is_finite()):
        raise DomainError("factor set enumeration needs finite groups")
    base = FiniteAbelianTable(b)
    if base.order * base.order > _TABLE_GUARD:
        raise DomainError("factor set table exceeds the enumeration guard")
    parts = []
    for d in FiniteAbelianTable(a).moduli:
        for qq in _prime_power_split(d):
            parts.append(_ext1_cocycles_cyclic(base, qq))
    if not parts:
        return FgAbGroup.trivial()
    return direct_sum(parts).group


# ---------------------------------------------------------------------------
# Hom counting and the splitting formula
# ---------------------------------------------------------------------------


def brute_force_hom_count(a: FgAbGroup, b: FgAbGroup) -> int:
    """Number of generator-image tuples that define homomorphisms a -> b."""
    if not (a.is_finite() and b.is_finite()):
        raise DomainError("hom counting needs finite groups")
    bt = FiniteAbelianTable(b)
    n = a.ambient_rank
    if bt.order**n > _HOM_GUARD:
        raise DomainError("hom enumeration exceeds the guard")
    rel_cols = [a.relations.column(j) for j in range(a.relations.cols)]
    count = 0
    for images in iter_product(bt.elements, repeat=n):
        ok = True
        for col in rel_cols:
            acc = bt.zero()
            for c, img in zip(col, images):
                if c:
                    acc = bt.add(acc, bt.scale(c, img))
            if acc != bt.zero():
                ok = False
                break
        if ok:
            count += 1
    return count


def splitting_formula_ext(k: TwoTermComplex, l: TwoTermComplex, i: int) -> FgAbGroup:
    """Derived Hom groups rebuilt from cohomology alone.

    Over the integers every two-term complex splits as the sum of its
    cohomology, placed in degrees -1 and 0, which yields closed formulas in
    the groups pi0 and pi1 for the three interesting degrees.
    """
    hk = cohomology(k)
    hl = cohomology(l)
    p0k, p1k = hk[0], hk[-1]
    p0l, p1l = hl[0], hl[-1]
    if i == -1:
        return hom_group(p0k, p1l).group
    if i == 0:
        return direct_sum(
            [hom_group(p0k, p0l).group, ext1_group(p0k, p1l), hom_group(p1k, p1l).group]
        ).group
    if i == 1:
        return direct_sum(
            [ext1_group(p0k, p0l), hom_group(p1k, p0l).group, ext1_group(p1k, p1l)]
        ).group
    raise InputMismatch("degree must be -1, 0 or 1")

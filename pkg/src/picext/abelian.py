"""Finitely generated abelian groups, presented by generators and relations.

A group is the quotient of Z^n (n = ambient rank) by the lattice spanned by
the columns of its relation matrix.  All constructions (kernels, cokernels,
pullbacks, pushouts, Hom and Ext groups) work at the presentation level, so
group elements and homomorphisms always live in concrete ambient
coordinates; canonical invariants are computed lazily from the Smith form
of the relations.

Equality of elements and of homomorphisms is always taken modulo the
relation lattice, since presentations are far from canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product as iter_product
from typing import Callable, Sequence

from .errors import DomainError, InputMismatch
from .int_linalg import (
    ColumnHermite,
    IntMatrix,
    block_diag,
    column_hermite,
    hstack,
    kernel_basis,
    lattice_basis,
    smith_normal_form,
    unimodular_inverse,
    vstack,
)


class FgAbGroup:
    """Quotient of Z^ambient_rank by the column lattice of ``relations``."""

    __slots__ = ("ambient_rank", "relations", "_snf", "_hermite", "_invariants", "_hash")

    def __init__(self, ambient_rank: int, relations: IntMatrix | None = None):
        if relations is None:
            relations = IntMatrix.zeros(ambient_rank, 0)
        if relations.rows != ambient_rank:
            raise InputMismatch(
                f"relations have {relations.rows} rows for ambient rank {ambient_rank}"
            )
        object.__setattr__(self, "ambient_rank", ambient_rank)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "_snf", None)
        object.__setattr__(self, "_hermite", None)
        object.__setattr__(self, "_invariants", None)
        object.__setattr__(self, "_hash", None)

    # -- construction -------------------------------------------------------

    @classmethod
    def free(cls, n: int) -> "FgAbGroup":
        return cls(n)

    @classmethod
    def trivial(cls) -> "FgAbGroup":
        return cls(0)

    @classmethod
    def cyclic(cls, n: int) -> "FgAbGroup":
        """Z/n, with Z itself for n == 0."""
        if n == 0:
            return cls(1)
        return cls(1, IntMatrix([[n]]))

    @classmethod
    def from_invariants(cls, free_rank: int, factors: Sequence[int]) -> "FgAbGroup":
        rels = IntMatrix.from_columns(
            [
                tuple(f if i == j else 0 for i in range(free_rank + len(factors)))
                for j, f in enumerate(factors)
            ],
            rows=free_rank + len(factors),
        )
        return cls(free_rank + len(factors), rels)

    # -- cached reductions ----------------------------------------------------

    @property
    def snf(self):
        dec = self._snf
        if dec is None:
            dec = smith_normal_form(self.relations)
            object.__setattr__(self, "_snf", dec)
        return dec

    @property
    def _rel_hermite(self) -> ColumnHermite:
        ch = self._hermite
        if ch is None:
            ch = column_hermite(self.relations)
            object.__setattr__(self, "_hermite", ch)
        return ch

    @property
    def invariants(self) -> tuple[int, tuple[int, ...]]:
        """(free_rank, invariant factors > 1, in divisibility order)."""
        inv = self._invariants
        if inv is None:
            dec = self.snf
            factors = tuple(d for d in dec.diagonal() if d > 1)
            inv = (self.ambient_rank - dec.rank, factors)
            object.__setattr__(self, "_invariants", inv)
        return inv

    @property
    def free_rank(self) -> int:
        return self.invariants[0]

    @property
    def torsion_factors(self) -> tuple[int, ...]:
        return self.invariants[1]

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def is_trivial(self) -> bool:
        return self.invariants == (0, ())

    def is_free_presentation(self) -> bool:
        """True when the presentation carries no effective relation at all."""
        return self.relations.cols == 0 or self.relations.is_zero()

    def order(self) -> int:
        if not self.is_finite():
            raise DomainError("group is infinite")
        return reduce(lambda a, b: a * b, self.torsion_factors, 1)

    # -- elements ----------------------------------------------------------------

    def in_relation_lattice(self, vec: Sequence[int]) -> bool:
        if len(vec) != self.ambient_rank:
            raise InputMismatch("coordinate length mismatch")
        return self._rel_hermite.solve(vec) is not None

    def normal_form(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Canonical coset representative: residues along the Smith basis."""
        dec = self.snf
        c = list(dec.u.mul_vector(vec))
        diag = dec.diagonal()
        for i, d in enumerate(diag):
            if d:
                c[i] %= d
        return tuple(c)

    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, tuple(int(x) for x in coords))

    def zero(self) -> "GroupElement":
        return self.element((0,) * self.ambient_rank)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FgAbGroup)
            and self.ambient_rank == other.ambient_rank
            and self.relations == other.relations
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.ambient_rank, self.relations))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        free, factors = self.invariants
        parts = ["Z"] * free + [f"Z/{d}" for d in factors]
        return f"FgAbGroup({' + '.join(parts) if parts else '0'})"


def canonical_invariants(g: FgAbGroup) -> tuple[int, tuple[int, ...]]:
    """Isomorphism invariants; two groups are isomorphic iff these agree."""
    return g.invariants


class GroupElement:
    """Ambient coordinates of a coset; equality is congruence mod relations."""

    __slots__ = ("group", "coords", "_nf")

    def __init__(self, group: FgAbGroup, coords: tuple[int, ...]):
        if len(coords) != group.ambient_rank:
            raise InputMismatch("coordinate length mismatch")
        self.group = group
        self.coords = coords
        self._nf = None

    @property
    def normalized(self) -> tuple[int, ...]:
        if self._nf is None:
            self._nf = self.group.normal_form(self.coords)
        return self._nf

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.normalized)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if self.group != other.group:
            raise InputMismatch("elements of different groups")
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __rmul__(self, c: int) -> "GroupElement":
        return GroupElement(self.group, tuple(c * a for a in self.coords))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupElement)
            and self.group == other.group
            and self.normalized == other.normalized
        )

    def __hash__(self) -> int:
        return hash((self.group, self.normalized))

    def __repr__(self) -> str:
        return f"GroupElement({list(self.coords)} in {self.group!r})"


class GroupHom:
    """Homomorphism given on ambient generators by an integer matrix.

    Well-definedness on the quotients (the matrix maps the source relation
    lattice into the target relation lattice) is checked at construction.
    """

    __slots__ = ("source", "target", "matrix", "_hash")

    def __init__(self, source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix):
        if matrix.shape != (target.ambient_rank, source.ambient_rank):
            raise InputMismatch(
                f"hom matrix is {matrix.shape}, expected "
                f"({target.ambient_rank}, {source.ambient_rank})"
            )
        for j in range(source.relations.cols):
            if not target.in_relation_lattice(matrix.mul_vector(source.relations.column(j))):
                raise InputMismatch("matrix does not define a homomorphism on the quotients")
        self.source = source
        self.target = target
        self.matrix = matrix
        self._hash = None

    @classmethod
    def identity(cls, g: FgAbGroup) -> "GroupHom":
        return cls(g, g, IntMatrix.identity(g.ambient_rank))

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> "GroupHom":
        return cls(source, target, IntMatrix.zeros(target.ambient_rank, source.ambient_rank))

    def __call__(self, el: GroupElement) -> GroupElement:
        if el.group != self.source:
            raise InputMismatch("element not in the source group")
        return GroupElement(self.target, self.matrix.mul_vector(el.coords))

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self after other."""
        if other.target != self.source:
            raise InputMismatch("composition endpoint mismatch")
        return GroupHom(other.source, self.target, self.matrix * other.matrix)

    def __add__(self, other: "GroupHom") -> "GroupHom":
        if self.source != other.source or self.target != other.target:
            raise InputMismatch("hom endpoint mismatch")
        return GroupHom(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: "GroupHom") -> "GroupHom":
        return self + (-other)

    def __neg__(self) -> "GroupHom":
        return GroupHom(self.source, self.target, -self.matrix)

    def is_zero_hom(self) -> bool:
        return all(
            self.target.in_relation_lattice(self.matrix.column(j))
            for j in range(self.matrix.cols)
        )

    def same_hom(self, other: "GroupHom") -> bool:
        """Equality modulo the target relation lattice."""
        if self.source != other.source or self.target != other.target:
            return False
        return (self - other).is_zero_hom()

    def is_injective(self) -> bool:
        return kernel(self).group.is_trivial()

    def is_surjective(self) -> bool:
        return cokernel(self).group.is_trivial()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupHom)
            and self.source == other.source
            and self.target == other.target
            and self.matrix == other.matrix
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.source, self.target, self.matrix))
        return self._hash

    def __repr__(self) -> str:
        return f"GroupHom({self.source!r} -> {self.target!r})"


def invert_isomorphism(f: GroupHom) -> GroupHom:
    """Inverse of an isomorphism, solved generator by generator."""
    sys = hstack([f.matrix, f.target.relations])
    cols = []
    n = f.source.ambient_rank
    ch = column_hermite(sys)
    for j in range(f.target.ambient_rank):
        sol = ch.solve(tuple(1 if i == j else 0 for i in range(f.target.ambient_rank)))
        if sol is None:
            raise InputMismatch("hom is not surjective, cannot invert")
        cols.append(sol[:n])
    return GroupHom(f.target, f.source, IntMatrix.from_columns(cols, rows=n))


# ---------------------------------------------------------------------------
# Subquotient plumbing
# ---------------------------------------------------------------------------


def solve_mod_lattice(matrix: IntMatrix, group: FgAbGroup, vec: Sequence[int]) -> tuple[int, ...] | None:
    """c with matrix*c == vec modulo the relation lattice of ``group``."""
    sol = column_hermite(hstack([matrix, group.relations])).solve(vec)
    return None if sol is None else sol[: matrix.cols]


def presented_subquotient(
    numerator_gens: IntMatrix, denominator_gens: IntMatrix
) -> tuple[FgAbGroup, IntMatrix]:
    """Present N/D for lattices D <= N <= Z^n given by generating columns.

    Returns the group together with the basis matrix embedding its ambient
    generators back into Z^n.
    """
    basis = lattice_basis(numerator_gens)
    ch = column_hermite(basis)
    rel_cols = []
    for j in range(denominator_gens.cols):
        c = ch.solve(denominator_gens.column(j))
        if c is None:
            raise InputMismatch("denominator lattice is not inside the numerator lattice")
        rel_cols.append(c)
    group = FgAbGroup(basis.cols, IntMatrix.from_columns(rel_cols, rows=basis.cols))
    return group, basis


def _preimage_lattice(matrix: IntMatrix, target: FgAbGroup) -> IntMatrix:
    """Generators of {x : matrix*x lies in the relation lattice of target}."""
    n = matrix.cols
    full = kernel_basis(hstack([matrix, target.relations.scale(-1)]))
    return IntMatrix((row for row in full.entries[:n]), cols=full.cols) if n else IntMatrix.zeros(0, 0)


@dataclass(frozen=True)
class Kernel:
    group: FgAbGroup
    include: GroupHom  # kernel -> source


def kernel(f: GroupHom) -> Kernel:
    """Kernel with its inclusion; universal among maps killed by f."""
    gens = _preimage_lattice(f.matrix, f.target)
    group, basis = presented_subquotient(gens, f.source.relations)
    return Kernel(group=group, include=GroupHom(group, f.source, basis))


@dataclass(frozen=True)
class Cokernel:
    group: FgAbGroup
    project: GroupHom  # target -> cokernel


def cokernel(f: GroupHom) -> Cokernel:
    """Cokernel presented by adjoining the image columns to the relations."""
    group = FgAbGroup(
        f.target.ambient_rank, hstack([f.target.relations, f.matrix])
    )
    proj = GroupHom(f.target, group, IntMatrix.identity(f.target.ambient_rank))
    return Cokernel(group=group, project=proj)


def image_exactness_pair(f: GroupHom, g: GroupHom) -> bool:
    """Exactness at the middle of  source(f) -> middle -> target(g)."""
    if f.target != g.source:
        raise InputMismatch("maps do not share the middle group")
    if not g.compose(f).is_zero_hom():
        return False
    mid = f.target
    im_gens = hstack([f.matrix, mid.relations])
    ker_gens = _preimage_lattice(g.matrix, g.target)
    im_ch = column_hermite(im_gens)
    for j in range(ker_gens.cols):
        if im_ch.solve(ker_gens.column(j)) is None:
            return False
    return True


# ---------------------------------------------------------------------------
# Hom and Ext groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomGroup:
    """Group of homomorphisms a -> b with concrete matrix lifts.

    ``basis`` columns are flattened matrices (column-major over the source
    generators) spanning the lattice of well-defined matrices; the group is
    that lattice modulo matrices landing entirely in the target relations.
    """

    source: FgAbGroup
    target: FgAbGroup
    group: FgAbGroup
    basis: IntMatrix

    def lift(self, el: GroupElement) -> GroupHom:
        if el.group != self.group:
            raise InputMismatch("element not in this Hom group")
        flat = self.basis.mul_vector(el.coords)
        return GroupHom(self.source, self.target, _unflatten(flat, self.target.ambient_rank, self.source.ambient_rank))

    def class_of(self, f: GroupHom) -> GroupElement:
        if f.source != self.source or f.target != self.target:
            raise InputMismatch("hom endpoints do not match this Hom group")
        flat = _flatten(f.matrix)
        coords = solve_mod_lattice(self.basis, _zero_padding_group(self), flat)
        if coords is None:
            raise InputMismatch("hom does not lie in the computed lattice")
        return self.group.element(coords)


def _zero_padding_group(hg: HomGroup) -> FgAbGroup:
    # the "zero maps" lattice as relations of the flattened ambient space
    nb, na = hg.target.ambient_rank, hg.source.ambient_rank
    return FgAbGroup(nb * na, _zero_map_lattice(hg.source, hg.target))


def _flatten(m: IntMatrix) -> tuple[int, ...]:
    # column-major: entry (r, c) at index c*rows + r
    return tuple(m.entries[r][c] for c in range(m.cols) for r in range(m.rows))


def _unflatten(flat: Sequence[int], rows: int, cols: int) -> IntMatrix:
    return IntMatrix.from_columns(
        [tuple(flat[c * rows + r] for r in range(rows)) for c in range(cols)], rows=rows
    )


def _zero_map_lattice(a: FgAbGroup, b: FgAbGroup) -> IntMatrix:
    """Flattened matrices all of whose columns lie in b's relation lattice."""
    na, nb = a.ambient_rank, b.ambient_rank
    cols = []
    for c in range(na):
        for t in range(b.relations.cols):
            rel = b.relations.column(t)
            flat = [0] * (na * nb)
            flat[c * nb : (c + 1) * nb] = rel
            cols.append(tuple(flat))
    return IntMatrix.from_columns(cols, rows=na * nb)


def hom_group(a: FgAbGroup, b: FgAbGroup) -> HomGroup:
    """The group Hom(a, b), with concrete lifts for its elements.

    A matrix X defines a homomorphism iff X * R_a lands in the column
    lattice of R_b; those X form a lattice computed from one kernel, and the
    Hom group is that lattice modulo the matrices that are zero on the
    quotient.  The lift of 0 is the zero map.
    """
    na, nb = a.ambient_rank, b.ambient_rank
    nvars = na * nb
    ra, rb = a.relations, b.relations
    # unknowns: vec(X) then one slack block per relation column of a
    rows = []
    for j in range(ra.cols):
        rel = ra.column(j)
        for r in range(nb):
            row = [0] * (nvars + ra.cols * rb.cols)
            for c in range(na):
                if rel[c]:
                    row[c * nb + r] = rel[c]
            for t in range(rb.cols):
                row[nvars + j * rb.cols + t] = -rb.entries[r][t]
            rows.append(row)
    if rows:
        full = kernel_basis(IntMatrix(rows, cols=nvars + ra.cols * rb.cols))
        wd_gens = IntMatrix(full.entries[:nvars] if nvars else [], cols=full.cols)
    else:
        wd_gens = IntMatrix.identity(nvars)
    group, basis = presented_subquotient(wd_gens, _zero_map_lattice(a, b))
    return HomGroup(source=a, target=b, group=group, basis=basis)


def free_presentation(a: FgAbGroup) -> IntMatrix:
    """Basis of the relation lattice: the R in 0 -> R -> Z^n -> a -> 0."""
    return lattice_basis(a.relations)


def ext1_group(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    """Ext^1(a, b) as coker(Hom(F, b) -> Hom(R, b)) for 0 -> R -> F -> a -> 0.

    F is free on the ambient generators of a and R is the relation lattice.
    Hom(R, b) is b^rank(R); the restriction map is precomposition with the
    inclusion matrix of R.
    """
    rb_basis = free_presentation(a)  # n x rho, columns a basis of the relation lattice
    rho = rb_basis.cols
    nb = b.ambient_rank
    # ambient of Hom(R, b) = b^rho, flattened column-major over R's generators
    relations = [block_diag([b.relations] * rho)] if rho else [IntMatrix.zeros(0, 0)]
    # image of the restriction map on the ambient generators of Hom(F, b) = b^n
    cols = []
    for c in range(a.ambient_rank):
        for r in range(nb):
            # the hom F -> b sending generator c to basis vector r restricts to
            # R -> b with matrix row pattern taken from rb_basis row c
            flat = [0] * (rho * nb)
            for t in range(rho):
                x = rb_basis.entries[c][t]
                if x:
                    flat[t * nb + r] = x
            cols.append(tuple(flat))
    image = IntMatrix.from_columns(cols, rows=rho * nb)
    return FgAbGroup(rho * nb, hstack(relations + [image]))


# ---------------------------------------------------------------------------
# Pullbacks, pushouts, direct sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PullbackGroup:
    group: FgAbGroup
    pr1: GroupHom
    pr2: GroupHom
    basis: IntMatrix  # embedding into ambient(a) + ambient(b)


def pullback_group(f: GroupHom, g: GroupHom) -> PullbackGroup:
    """{(x, y) : f(x) == g(y)} with its two projections."""
    if f.target != g.target:
        raise InputMismatch("pullback needs a common target")
    na, nb = f.source.ambient_rank, g.source.ambient_rank
    gens = _preimage_lattice(hstack([f.matrix, -g.matrix]), f.target)
    denom = block_diag([f.source.relations, g.source.relations])
    group, basis = presented_subquotient(gens, denom)
    pr1 = GroupHom(group, f.source, IntMatrix(basis.entries[:na], cols=basis.cols))
    pr2 = GroupHom(group, g.source, IntMatrix(basis.entries[na:], cols=basis.cols))
    return PullbackGroup(group=group, pr1=pr1, pr2=pr2, basis=basis)


def pullback_mediator(pb: PullbackGroup, t1: GroupHom, t2: GroupHom) -> GroupHom:
    """The map into the pullback induced by a commuting test cone."""
    if t1.source != t2.source:
        raise InputMismatch("test cone legs have different sources")
    denom = block_diag([t1.target.relations, t2.target.relations])
    sys = column_hermite(hstack([pb.basis, denom]))
    cols = []
    for j in range(t1.source.ambient_rank):
        vec = tuple(t1.matrix.column(j)) + tuple(t2.matrix.column(j))
        sol = sys.solve(vec)
        if sol is None:
            raise InputMismatch("test cone does not factor through the pullback")
        cols.append(sol[: pb.basis.cols])
    return GroupHom(t1.source, pb.group, IntMatrix.from_columns(cols, rows=pb.basis.cols))


@dataclass(frozen=True)
class PushoutGroup:
    group: FgAbGroup
    in1: GroupHom
    in2: GroupHom


def pushout_group(f: GroupHom, g: GroupHom) -> PushoutGroup:
    """(a + b) / <(f(x), -g(x))> with its two inclusions."""
    if f.source != g.source:
        raise InputMismatch("pushout needs a common source")
    a, b = f.target, g.target
    na, nb = a.ambient_rank, b.ambient_rank
    twist = vstack([f.matrix, -g.matrix])
    group = FgAbGroup(na + nb, hstack([block_diag([a.relations, b.relations]), twist]))
    in1 = GroupHom(a, group, vstack([IntMatrix.identity(na), IntMatrix.zeros(nb, na)]))
    in2 = GroupHom(b, group, vstack([IntMatrix.zeros(na, nb), IntMatrix.identity(nb)]))
    return PushoutGroup(group=group, in1=in1, in2=in2)


def pushout_mediator(po: PushoutGroup, h1: GroupHom, h2: GroupHom) -> GroupHom:
    """The map out of the pushout induced by a commuting test cocone."""
    if h1.target != h2.target:
        raise InputMismatch("test cocone legs have different targets")
    return GroupHom(po.group, h1.target, hstack([h1.matrix, h2.matrix]))


@dataclass(frozen=True)
class DirectSum:
    group: FgAbGroup
    inclusions: tuple[GroupHom, ...]
    projections: tuple[GroupHom, ...]


def direct_sum(groups: Sequence[FgAbGroup]) -> DirectSum:
    total = sum(g.ambient_rank for g in groups)
    sum_group = FgAbGroup(total, block_diag([g.relations for g in groups]))
    incls = []
    projs = []
    offset = 0
    for g in groups:
        n = g.ambient_rank
        inc = IntMatrix.from_columns(
            [tuple(1 if i == offset + j else 0 for i in range(total)) for j in range(n)],
            rows=total,
        )
        pr = inc.transpose()
        incls.append(GroupHom(g, sum_group, inc))
        projs.append(GroupHom(sum_group, g, pr))
        offset += n
    return DirectSum(group=sum_group, inclusions=tuple(incls), projections=tuple(projs))


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def enumerate_elements(g: FgAbGroup) -> list[GroupElement]:
    """All elements of a finite group, zero included, pairwise distinct."""
    if not g.is_finite():
        raise DomainError("cannot enumerate an infinite group")
    dec = g.snf
    u_inv = unimodular_inverse(dec.u)
    diag = [d for d in dec.diagonal()]
    # every ambient dimension is covered by a nonzero diagonal entry here
    out = []
    ranges = [range(d) for d in diag]
    for combo in iter_product(*ranges):
        out.append(g.element(u_inv.mul_vector(combo)))
    return out

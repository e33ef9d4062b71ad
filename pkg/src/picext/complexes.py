"""Bounded complexes of finitely generated abelian groups.

The central objects are two-term complexes in degrees -1 and 0; internal
constructions (mapping cones, free resolutions) temporarily leave that
window, hence the general bounded type.  Differentials and chain maps are
equal when they agree modulo relations degreewise; homotopy is a separate,
explicit notion carried by ``Homotopy``.

Sign conventions, fixed once:
  * shifting by i multiplies differentials by (-1)^i,
  * the cone of f: K -> L has MC(f)^n = L^n (+) K^{n+1} with differential
    blocks (d_L, f) over (0, -d_K).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .abelian import (
    FgAbGroup,
    GroupHom,
    PullbackGroup,
    PushoutGroup,
    direct_sum,
    presented_subquotient,
    pullback_group,
    pullback_mediator,
    pushout_group,
    pushout_mediator,
)
from .errors import InputMismatch
from .int_linalg import (
    IntMatrix,
    block_diag,
    column_hermite,
    hstack,
    kernel_basis,
    lattice_basis,
    vstack,
)

_TRIVIAL = FgAbGroup.trivial()


class BoundedComplex:
    """Cochain complex supported on finitely many degrees."""

    __slots__ = ("lowest", "components", "differentials", "_hash")

    def __init__(
        self,
        lowest: int,
        components: Sequence[FgAbGroup],
        differentials: Sequence[GroupHom],
    ):
        components = tuple(components)
        differentials = tuple(differentials)
        if components and len(differentials) != len(components) - 1:
            raise InputMismatch("need exactly one differential between consecutive components")
        if not components and differentials:
            raise InputMismatch("differentials without components")
        for i, d in enumerate(differentials):
            if d.source != components[i] or d.target != components[i + 1]:
                raise InputMismatch(f"differential {i} does not match its components")
        for i in range(len(differentials) - 1):
            if not differentials[i + 1].compose(differentials[i]).is_zero_hom():
                raise InputMismatch("d o d is nonzero")
        object.__setattr__(self, "lowest", lowest)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "differentials", differentials)
        object.__setattr__(self, "_hash", None)

    @property
    def highest(self) -> int:
        return self.lowest + len(self.components) - 1

    def degrees(self) -> range:
        return range(self.lowest, self.lowest + len(self.components))

    def component(self, i: int) -> FgAbGroup:
        if self.lowest <= i <= self.highest:
            return self.components[i - self.lowest]
        return _TRIVIAL

    def differential(self, i: int) -> GroupHom:
        idx = i - self.lowest
        if 0 <= idx < len(self.differentials):
            return self.differentials[idx]
        return GroupHom.zero(self.component(i), self.component(i + 1))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoundedComplex)
            and self.lowest == other.lowest
            and self.components == other.components
            and tuple(d.matrix for d in self.differentials)
            == tuple(d.matrix for d in other.differentials)
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(
                (self.lowest, self.components, tuple(d.matrix for d in self.differentials))
            )
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        parts = " -> ".join(repr(c) for c in self.components) or "0"
        return f"BoundedComplex[{self.lowest}..{self.highest}]({parts})"


class TwoTermComplex(BoundedComplex):
    """Complex concentrated in degrees -1 and 0."""

    def __init__(self, k_minus1: FgAbGroup, k0: FgAbGroup, d: GroupHom | None = None):
        if d is None:
            d = GroupHom.zero(k_minus1, k0)
        super().__init__(-1, (k_minus1, k0), (d,))

    @property
    def k_minus1(self) -> FgAbGroup:
        return self.components[0]

    @property
    def k0(self) -> FgAbGroup:
        return self.components[1]

    @property
    def d(self) -> GroupHom:
        return self.differentials[0]

    @classmethod
    def concentrated(cls, g: FgAbGroup, degree: int = 0) -> "TwoTermComplex":
        if degree == 0:
            return cls(_TRIVIAL, g)
        if degree == -1:
            return cls(g, _TRIVIAL)
        raise InputMismatch("two-term complexes live in degrees -1 and 0")

    @classmethod
    def zero(cls) -> "TwoTermComplex":
        return cls(_TRIVIAL, _TRIVIAL)


def as_two_term(c: BoundedComplex) -> TwoTermComplex:
    """Reinterpret a complex supported in [-1, 0] as a TwoTermComplex."""
    for i in c.degrees():
        if i not in (-1, 0) and c.component(i).ambient_rank:
            raise InputMismatch(f"complex has support in degree {i}")
    if isinstance(c, TwoTermComplex):
        return c
    if c.lowest == -1 and len(c.components) == 2:
        return TwoTermComplex(c.components[0], c.components[1], c.differentials[0])
    km1, k0 = c.component(-1), c.component(0)
    return TwoTermComplex(km1, k0, c.differential(-1))


class ChainMap:
    """Degreewise maps commuting with the differentials modulo relations."""

    __slots__ = ("source", "target", "maps", "_hash")

    def __init__(
        self,
        source: BoundedComplex,
        target: BoundedComplex,
        maps: Mapping[int, GroupHom],
        check: bool = True,
    ):
        stored = {}
        for i, f in maps.items():
            if f.source != source.component(i) or f.target != target.component(i):
                raise InputMismatch(f"component map at degree {i} has wrong endpoints")
            if f.matrix.rows and f.matrix.cols and not f.matrix.is_zero():
                stored[i] = f
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "maps", dict(stored))
        object.__setattr__(self, "_hash", None)
        if check:
            for i in range(
                min(source.lowest, target.lowest) - 1,
                max(source.highest, target.highest) + 1,
            ):
                lhs = target.differential(i).compose(self.map(i))
                rhs = self.map(i + 1).compose(source.differential(i))
                if not lhs.same_hom(rhs):
                    raise InputMismatch(f"square at degree {i} does not commute")

    @classmethod
    def from_matrices(
        cls,
        source: BoundedComplex,
        target: BoundedComplex,
        matrices: Mapping[int, IntMatrix],
        check: bool = True,
    ) -> "ChainMap":
        return cls(
            source,
            target,
            {
                i: GroupHom(source.component(i), target.component(i), m)
                for i, m in matrices.items()
            },
            check=check,
        )

    @classmethod
    def identity(cls, c: BoundedComplex) -> "ChainMap":
        return cls(c, c, {i: GroupHom.identity(c.component(i)) for i in c.degrees()}, check=False)

    @classmethod
    def zero(cls, source: BoundedComplex, target: BoundedComplex) -> "ChainMap":
        return cls(source, target, {}, check=False)

    def map(self, i: int) -> GroupHom:
        f = self.maps.get(i)
        if f is None:
            return GroupHom.zero(self.source.component(i), self.target.component(i))
        return f

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self after other."""
        if other.target != self.source:
            raise InputMismatch("chain map composition endpoint mismatch")
        degs = set(self.maps) | set(other.maps)
        return ChainMap(
            other.source,
            self.target,
            {i: self.map(i).compose(other.map(i)) for i in degs},
            check=False,
        )

    def __add__(self, other: "ChainMap") -> "ChainMap":
        if self.source != other.source or self.target != other.target:
            raise InputMismatch("chain map endpoint mismatch")
        degs = set(self.maps) | set(other.maps)
        return ChainMap(
            self.source, self.target, {i: self.map(i) + other.map(i) for i in degs}, check=False
        )

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + (-other)

    def __neg__(self) -> "ChainMap":
        return ChainMap(
            self.source, self.target, {i: -f for i, f in self.maps.items()}, check=False
        )

    def is_zero_map(self) -> bool:
        return all(f.is_zero_hom() for f in self.maps.values())

    def same_map(self, other: "ChainMap") -> bool:
        if self.source != other.source or self.target != other.target:
            return False
        return (self - other).is_zero_map()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ChainMap)
            and self.source == other.source
            and self.target == other.target
            and {i: f.matrix for i, f in self.maps.items()}
            == {i: f.matrix for i, f in other.maps.items()}
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(
                (
                    self.source,
                    self.target,
                    tuple(sorted((i, f.matrix) for i, f in self.maps.items())),
                )
            )
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"ChainMap({self.source!r} -> {self.target!r})"


class Homotopy:
    """Witness that two chain maps agree up to homotopy: g - f = dH + Hd."""

    __slots__ = ("f", "g", "components")

    def __init__(self, f: ChainMap, g: ChainMap, components: Mapping[int, GroupHom]):
        if f.source != g.source or f.target != g.target:
            raise InputMismatch("homotopy endpoints mismatch")
        src, tgt = f.source, f.target
        comps = {}
        for i, h in components.items():
            if h.source != src.component(i) or h.target != tgt.component(i - 1):
                raise InputMismatch(f"homotopy component at degree {i} has wrong endpoints")
            comps[i] = h
        self.f, self.g, self.components = f, g, dict(comps)
        for i in range(min(src.lowest, tgt.lowest) - 1, max(src.highest, tgt.highest) + 2):
            lhs = g.map(i) - f.map(i)
            rhs = tgt.differential(i - 1).compose(self.component(i)) + self.component(
                i + 1
            ).compose(src.differential(i))
            if not lhs.same_hom(rhs):
                raise InputMismatch(f"homotopy identity fails at degree {i}")

    def component(self, i: int) -> GroupHom:
        h = self.components.get(i)
        if h is None:
            return GroupHom.zero(self.f.source.component(i), self.f.target.component(i - 1))
        return h


# ---------------------------------------------------------------------------
# Cohomology
# ---------------------------------------------------------------------------


class CohomologySpace:
    """H^i of a complex together with coordinates for classes of cycles."""

    __slots__ = ("complex", "degree", "group", "cycle_basis", "_solver")

    def __init__(self, c: BoundedComplex, i: int):
        comp = c.component(i)
        d_out = c.differential(i)
        d_in = c.differential(i - 1)
        cycles = _preimage_cols(d_out.matrix, c.component(i + 1))
        denominator = hstack([d_in.matrix, comp.relations])
        group, basis = presented_subquotient(cycles, denominator)
        self.complex = c
        self.degree = i
        self.group = group
        self.cycle_basis = basis
        self._solver = column_hermite(hstack([basis, denominator]))

    def class_of(self, vec: Sequence[int]):
        """Class of a cycle given in ambient coordinates of the component."""
        sol = self._solver.solve(vec)
        if sol is None:
            raise InputMismatch("vector is not a cycle of this degree")
        return self.group.element(sol[: self.cycle_basis.cols])


def _preimage_cols(matrix: IntMatrix, target: FgAbGroup) -> IntMatrix:
    """Generators of {x : matrix*x in relation lattice of target}."""
    n = matrix.cols
    if n == 0:
        return IntMatrix.zeros(0, 0)
    full = kernel_basis(hstack([matrix, target.relations.scale(-1)]))
    return IntMatrix(full.entries[:n], cols=full.cols)


@lru_cache(maxsize=None)
def cohomology_space(c: BoundedComplex, i: int) -> CohomologySpace:
    return CohomologySpace(c, i)


def cohomology(c: BoundedComplex) -> dict[int, FgAbGroup]:
    """H^i = ker(d^i)/im(d^{i-1}) with explicit presentations, all degrees."""
    return {i: cohomology_space(c, i).group for i in c.degrees()}


def pi0(c: BoundedComplex) -> FgAbGroup:
    return cohomology_space(c, 0).group


def pi1(c: BoundedComplex) -> FgAbGroup:
    return cohomology_space(c, -1).group


def induced_cohomology_map(f: ChainMap, i: int) -> GroupHom:
    src = cohomology_space(f.source, i)
    tgt = cohomology_space(f.target, i)
    fmat = f.map(i).matrix
    cols = []
    for j in range(src.cycle_basis.cols):
        img = fmat.mul_vector(src.cycle_basis.column(j))
        cols.append(tgt.class_of(img).coords)
    return GroupHom(
        src.group, tgt.group, IntMatrix.from_columns(cols, rows=tgt.group.ambient_rank)
    )


def is_quasi_isomorphism(f: ChainMap) -> bool:
    """True iff the induced maps on all cohomology groups are isomorphisms."""
    lo = min(f.source.lowest, f.target.lowest)
    hi = max(f.source.highest, f.target.highest)
    for i in range(lo, hi + 1):
        if not induced_cohomology_map(f, i).is_isomorphism():
            return False
    return True


# ---------------------------------------------------------------------------
# Shift and truncation
# ---------------------------------------------------------------------------


def shift(c: BoundedComplex, i: int) -> BoundedComplex:
    """Shift by i: components reindexed, differentials scaled by (-1)^i."""
    if i == 0:
        return c
    sign = -1 if i % 2 else 1
    diffs = tuple(
        GroupHom(d.source, d.target, d.matrix.scale(sign)) if sign < 0 else d
        for d in c.differentials
    )
    return BoundedComplex(c.lowest - i, c.components, diffs)


def shift_chain_map(f: ChainMap, i: int) -> ChainMap:
    if i == 0:
        return f
    return ChainMap(
        shift(f.source, i),
        shift(f.target, i),
        {deg - i: hom for deg, hom in f.maps.items()},
        check=False,
    )


def _zero_complex() -> BoundedComplex:
    return BoundedComplex(0, (), ())


def truncate(c: BoundedComplex, mode: str, n: int) -> BoundedComplex:
    """Good truncation; retains cohomology inside the window, kills it outside."""
    if mode == "le":
        return _truncate_le(c, n)[0]
    if mode == "ge":
        return _truncate_ge(c, n)
    raise InputMismatch("mode must be 'le' or 'ge'")


def _truncate_le(c: BoundedComplex, n: int) -> tuple[BoundedComplex, IntMatrix | None]:
    """tau_<=n; also returns the kernel basis at the boundary degree."""
    if c.highest <= n:
        return c, None
    if n < c.lowest:
        return _zero_complex(), None
    comp_n = c.component(n)
    cycles = _preimage_cols(c.differential(n).matrix, c.component(n + 1))
    ker_group, basis = presented_subquotient(cycles, comp_n.relations)
    comps = list(c.components[: n - c.lowest]) + [ker_group]
    diffs = list(c.differentials[: n - c.lowest])
    if diffs:
        prev = diffs.pop()
        ch = column_hermite(basis)
        cols = []
        for j in range(prev.matrix.cols):
            sol = ch.solve(prev.matrix.column(j))
            if sol is None:
                raise InputMismatch("differential image is not inside the kernel lattice")
            cols.append(sol)
        diffs.append(
            GroupHom(
                prev.source, ker_group, IntMatrix.from_columns(cols, rows=basis.cols)
            )
        )
    return BoundedComplex(c.lowest, comps, diffs), basis


def _truncate_ge(c: BoundedComplex, n: int) -> BoundedComplex:
    if c.lowest >= n:
        return c
    if n > c.highest:
        return _zero_complex()
    comp_n = c.component(n)
    d_in = c.differential(n - 1)
    cok = FgAbGroup(comp_n.ambient_rank, hstack([comp_n.relations, d_in.matrix]))
    comps = [cok] + list(c.components[n - c.lowest + 1 :])
    diffs = list(c.differentials[n - c.lowest :])
    if diffs:
        nxt = diffs[0]
        diffs[0] = GroupHom(cok, nxt.target, nxt.matrix)
    return BoundedComplex(n, comps, diffs)


# ---------------------------------------------------------------------------
# Mapping cone
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cone:
    cone: BoundedComplex
    include: ChainMap  # target -> cone
    project: ChainMap  # cone -> source[1]


def mapping_cone(f: ChainMap) -> Cone:
    """MC(f)^n = L^n (+) K^{n+1}, d = [[d_L, f], [0, -d_K]].

    Comes with the canonical inclusion of the target and projection onto the
    shifted source.
    """
    k, l = f.source, f.target
    lo = min(l.lowest, k.lowest - 1)
    hi = max(l.highest, k.highest - 1)
    comps = {}
    for n in range(lo, hi + 1):
        comps[n] = direct_sum([l.component(n), k.component(n + 1)])
    components = []
    diffs = []
    for n in range(lo, hi + 1):
        components.append(comps[n].group)
        if n < hi:
            ln, kn1 = l.component(n), k.component(n + 1)
            ln1, kn2 = l.component(n + 1), k.component(n + 2)
            top = hstack([l.differential(n).matrix, f.map(n + 1).matrix])
            bot = hstack(
                [IntMatrix.zeros(kn2.ambient_rank, ln.ambient_rank), k.differential(n + 1).matrix.scale(-1)]
            )
            diffs.append(GroupHom(comps[n].group, comps[n + 1].group, vstack([top, bot])))
    cone = BoundedComplex(lo, components, diffs)
    include = ChainMap(
        l, cone, {n: comps[n].inclusions[0] for n in range(lo, hi + 1)}, check=False
    )
    k1 = shift(k, 1)
    project = ChainMap(
        cone,
        k1,
        {
            n: GroupHom(comps[n].group, k1.component(n), comps[n].projections[1].matrix)
            for n in range(lo, hi + 1)
        },
        check=False,
    )
    return Cone(cone=cone, include=include, project=project)


@dataclass(frozen=True)
class KernelComplex:
    complex: TwoTermComplex
    include: ChainMap  # kernel -> source of f
    embed: ChainMap  # kernel -> MC(f)[-1], quasi-isomorphism


def kernel_complex(f: ChainMap) -> KernelComplex:
    """tau_<=0(MC(f)[-1]) together with its map to the source.

    Degree -1 is the source's degree -1 component; degree 0 is the kernel of
    (d_L, f^0) inside L^{-1} (+) K^0.
    """
    k = f.source
    cone = mapping_cone(f).cone
    shifted = shift(cone, -1)
    trunc, basis = _truncate_le(shifted, 0)
    kc = as_two_term(trunc)
    l_amb = f.target.component(-1).ambient_rank
    k_amb = k.component(0).ambient_rank
    if basis is None:
        basis = IntMatrix.identity(kc.k0.ambient_rank)
    proj0 = GroupHom(
        kc.k0, k.component(0), IntMatrix(basis.entries[l_amb:], cols=basis.cols)
    )
    into = ChainMap(
        kc,
        k,
        {
            -1: GroupHom(kc.k_minus1, k.component(-1), IntMatrix.identity(k.component(-1).ambient_rank)),
            0: proj0,
        },
    )
    embed = ChainMap(
        kc,
        shifted,
        {
            -1: GroupHom(
                kc.k_minus1,
                shifted.component(-1),
                IntMatrix.identity(kc.k_minus1.ambient_rank),
            ),
            0: GroupHom(kc.k0, shifted.component(0), basis),
        },
    )
    return KernelComplex(complex=kc, include=into, embed=embed)


@dataclass(frozen=True)
class CokernelComplex:
    complex: TwoTermComplex
    project: ChainMap  # target of f -> cokernel


def cokernel_complex(f: ChainMap) -> CokernelComplex:
    """tau_>=-1(MC(f)) together with the map from the target.

    Degree -1 is coker(f^{-1}, -d_K) on L^{-1} (+) K^0; degree 0 is the
    target's degree 0 component.
    """
    l = f.target
    cone = mapping_cone(f).cone
    cc = as_two_term(_truncate_ge(cone, -1))
    lm1 = l.component(-1)
    incl = vstack(
        [
            IntMatrix.identity(lm1.ambient_rank),
            IntMatrix.zeros(cc.k_minus1.ambient_rank - lm1.ambient_rank, lm1.ambient_rank),
        ]
    )
    from_target = ChainMap(
        l,
        cc,
        {
            -1: GroupHom(lm1, cc.k_minus1, incl),
            0: GroupHom(l.component(0), cc.k0, IntMatrix.identity(cc.k0.ambient_rank)),
        },
    )
    return CokernelComplex(complex=cc, project=from_target)


# ---------------------------------------------------------------------------
# Fibered products and sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberedProduct:
    complex: TwoTermComplex
    pr1: ChainMap
    pr2: ChainMap
    parts: tuple[PullbackGroup, PullbackGroup]  # degree -1, degree 0


def fibered_product_complex(f: ChainMap, g: ChainMap) -> FiberedProduct:
    """Degreewise pullback with the differential from the universal property."""
    if f.target != g.target:
        raise InputMismatch("fibered product needs a common target")
    k, l = f.source, g.source
    parts = {}
    for i in (-1, 0):
        parts[i] = pullback_group(
            GroupHom(k.component(i), f.target.component(i), f.map(i).matrix),
            GroupHom(l.component(i), f.target.component(i), g.map(i).matrix),
        )
    ka = k.component(-1).ambient_rank
    ch0 = column_hermite(parts[0].basis)
    cols = []
    for j in range(parts[-1].basis.cols):
        col = parts[-1].basis.column(j)
        x, y = col[:ka], col[ka:]
        vec = tuple(k.differential(-1).matrix.mul_vector(x)) + tuple(
            l.differential(-1).matrix.mul_vector(y)
        )
        sol = ch0.solve(vec)
        if sol is None:
            raise InputMismatch("induced differential does not land in the pullback lattice")
        cols.append(sol)
    d = GroupHom(
        parts[-1].group,
        parts[0].group,
        IntMatrix.from_columns(cols, rows=parts[0].basis.cols),
    )
    cx = TwoTermComplex(parts[-1].group, parts[0].group, d)
    pr1 = ChainMap(cx, k, {-1: parts[-1].pr1, 0: parts[0].pr1})
    pr2 = ChainMap(cx, l, {-1: parts[-1].pr2, 0: parts[0].pr2})
    return FiberedProduct(complex=cx, pr1=pr1, pr2=pr2, parts=(parts[-1], parts[0]))


def fibered_product_mediator(fp: FiberedProduct, t1: ChainMap, t2: ChainMap) -> ChainMap:
    if t1.source != t2.source:
        raise InputMismatch("test cone legs have different sources")
    maps = {}
    for idx, i in enumerate((-1, 0)):
        maps[i] = pullback_mediator(
            fp.parts[idx],
            GroupHom(t1.source.component(i), t1.target.component(i), t1.map(i).matrix),
            GroupHom(t2.source.component(i), t2.target.component(i), t2.map(i).matrix),
        )
    return ChainMap(t1.source, fp.complex, maps)


@dataclass(frozen=True)
class FiberedSum:
    complex: TwoTermComplex
    in1: ChainMap
    in2: ChainMap
    parts: tuple[PushoutGroup, PushoutGroup]


def fibered_sum_complex(f: ChainMap, g: ChainMap) -> FiberedSum:
    """Degreewise pushout; the differential is the block diagonal one."""
    if f.source != g.source:
        raise InputMismatch("fibered sum needs a common source")
    k, l = f.target, g.target
    parts = {}
    for i in (-1, 0):
        parts[i] = pushout_group(
            GroupHom(f.source.component(i), k.component(i), f.map(i).matrix),
            GroupHom(f.source.component(i), l.component(i), g.map(i).matrix),
        )
    d = GroupHom(
        parts[-1].group,
        parts[0].group,
        block_diag([k.differential(-1).matrix, l.differential(-1).matrix]),
    )
    cx = TwoTermComplex(parts[-1].group, parts[0].group, d)
    in1 = ChainMap(k, cx, {-1: parts[-1].in1, 0: parts[0].in1})
    in2 = ChainMap(l, cx, {-1: parts[-1].in2, 0: parts[0].in2})
    return FiberedSum(complex=cx, in1=in1, in2=in2, parts=(parts[-1], parts[0]))


def fibered_sum_mediator(fs: FiberedSum, h1: ChainMap, h2: ChainMap) -> ChainMap:
    if h1.target != h2.target:
        raise InputMismatch("test cocone legs have different targets")
    maps = {}
    for idx, i in enumerate((-1, 0)):
        maps[i] = pushout_mediator(
            fs.parts[idx],
            GroupHom(h1.source.component(i), h1.target.component(i), h1.map(i).matrix),
            GroupHom(h2.source.component(i), h2.target.component(i), h2.map(i).matrix),
        )
    return ChainMap(fs.complex, h1.target, maps)


@dataclass(frozen=True)
class ComplexSum:
    complex: TwoTermComplex
    inclusions: tuple[ChainMap, ...]
    projections: tuple[ChainMap, ...]


def direct_sum_complex(complexes: Sequence[TwoTermComplex]) -> ComplexSum:
    sums = {i: direct_sum([c.component(i) for c in complexes]) for i in (-1, 0)}
    d = GroupHom(
        sums[-1].group,
        sums[0].group,
        block_diag([c.differential(-1).matrix for c in complexes]),
    )
    total = TwoTermComplex(sums[-1].group, sums[0].group, d)
    incls = tuple(
        ChainMap(c, total, {-1: sums[-1].inclusions[t], 0: sums[0].inclusions[t]})
        for t, c in enumerate(complexes)
    )
    projs = tuple(
        ChainMap(total, c, {-1: sums[-1].projections[t], 0: sums[0].projections[t]})
        for t, c in enumerate(complexes)
    )
    return ComplexSum(complex=total, inclusions=incls, projections=projs)


# ---------------------------------------------------------------------------
# Free covers and resolutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeCover:
    """Degreewise short exact 0 -> N -> P -> M -> 0 with P, N free."""

    p: ChainMap  # P -> M, degreewise surjective
    n: TwoTermComplex
    s: ChainMap  # N -> P, degreewise kernel inclusion

    @property
    def cover(self) -> TwoTermComplex:
        return as_two_term(self.p.source)


def _build_cover(m: TwoTermComplex, pm1_extra: IntMatrix, p0_extra: IntMatrix) -> FreeCover:
    a = m.k_minus1.ambient_rank
    b = m.k0.ambient_rank
    pm1_mat = hstack([IntMatrix.identity(a), pm1_extra])  # P^{-1} -> M^{-1}
    p1 = pm1_mat.cols
    pm1_free = FgAbGroup.free(p1)
    p0_tail = hstack([IntMatrix.identity(b), p0_extra])
    q0 = p0_tail.cols
    p0_free = FgAbGroup.free(p1 + q0)
    d_p = GroupHom(
        pm1_free, p0_free, vstack([IntMatrix.identity(p1), IntMatrix.zeros(q0, p1)])
    )
    p0_mat = hstack([m.d.matrix * pm1_mat, p0_tail])
    cover = TwoTermComplex(pm1_free, p0_free, d_p)
    p = ChainMap(
        cover,
        m,
        {
            -1: GroupHom(pm1_free, m.k_minus1, pm1_mat),
            0: GroupHom(p0_free, m.k0, p0_mat),
        },
    )
    # degreewise kernels; subgroups of free groups are free
    n_groups = {}
    n_bases = {}
    for i, (free, mat, tgt) in {
        -1: (pm1_free, pm1_mat, m.k_minus1),
        0: (p0_free, p0_mat, m.k0),
    }.items():
        gens = _preimage_cols(mat, tgt)
        grp, basis = presented_subquotient(gens, free.relations)
        n_groups[i], n_bases[i] = grp, basis
    ch = column_hermite(n_bases[0])
    cols = []
    for j in range(n_bases[-1].cols):
        sol = ch.solve(d_p.matrix.mul_vector(n_bases[-1].column(j)))
        if sol is None:
            raise InputMismatch("kernel is not preserved by the cover differential")
        cols.append(sol)
    d_n = GroupHom(
        n_groups[-1], n_groups[0], IntMatrix.from_columns(cols, rows=n_bases[0].cols)
    )
    n = TwoTermComplex(n_groups[-1], n_groups[0], d_n)
    s = ChainMap(
        n,
        cover,
        {
            -1: GroupHom(n_groups[-1], pm1_free, n_bases[-1]),
            0: GroupHom(n_groups[0], p0_free, n_bases[0]),
        },
    )
    return FreeCover(p=p, n=n, s=s)


@lru_cache(maxsize=None)
def free_cover(m: TwoTermComplex) -> FreeCover:
    """The two-summand cover: P^{-1} free on the ambient generators of
    M^{-1}, P^0 = P^{-1} (+) free on the generators of M^0, differential the
    inclusion of the first summand."""
    a = m.k_minus1.ambient_rank
    b = m.k0.ambient_rank
    return _build_cover(m, IntMatrix.zeros(a, 0), IntMatrix.zeros(b, 0))


def randomized_free_cover(m: TwoTermComplex, rng, extra: tuple[int, int] = (1, 1)) -> FreeCover:
    """A fattened cover with extra random free generators; for independence tests."""
    a = m.k_minus1.ambient_rank
    b = m.k0.ambient_rank
    pm1_extra = IntMatrix(
        [[rng.randrange(-2, 3) for _ in range(extra[0])] for _ in range(a)], cols=extra[0]
    )
    p0_extra = IntMatrix(
        [[rng.randrange(-2, 3) for _ in range(extra[1])] for _ in range(b)], cols=extra[1]
    )
    return _build_cover(m, pm1_extra, p0_extra)


@dataclass(frozen=True)
class Resolution:
    """Free complex in degrees [-2, 0] quasi-isomorphic to a two-term complex."""

    complex: BoundedComplex
    witness: ChainMap  # resolution -> original, a quasi-isomorphism


def resolution_from_cover(cov: FreeCover, m: TwoTermComplex) -> Resolution:
    cone = mapping_cone(cov.s).cone
    maps = {}
    for i in (-1, 0):
        p_amb = cov.p.source.component(i).ambient_rank
        n_amb = cov.n.component(i + 1).ambient_rank
        maps[i] = GroupHom(
            cone.component(i),
            m.component(i),
            hstack(
                [
                    cov.p.map(i).matrix,
                    IntMatrix.zeros(m.component(i).ambient_rank, n_amb),
                ]
            ),
        )
    return Resolution(complex=cone, witness=ChainMap(cone, m, maps))


@lru_cache(maxsize=None)
def free_resolution(k: TwoTermComplex) -> Resolution:
    """Mapping cone of the kernel inclusion of the free cover.

    All components are free and the canonical map down to the input complex
    is a quasi-isomorphism.
    """
    return resolution_from_cover(free_cover(k), k)


# ---------------------------------------------------------------------------
# The lattice of chain maps (used for sampling and for derived Homs)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Block:
    degree: int
    rows: int  # ambient of target component
    cols: int  # ambient of source component
    offset: int


class ChainMapLattice:
    """All chain maps source -> target, as a lattice of flattened matrices.

    Flattening is column-major per degree block, blocks ordered by degree.
    ``basis`` columns span exactly the lattice of matrix families that are
    well defined degreewise and commute with the differentials modulo
    relations.
    """

    def __init__(self, source: BoundedComplex, target: BoundedComplex):
        self.source = source
        self.target = target
        blocks = []
        offset = 0
        lo = max(source.lowest, target.lowest)
        hi = min(source.highest, target.highest)
        for i in range(lo, hi + 1):
            r = target.component(i).ambient_rank
            c = source.component(i).ambient_rank
            if r and c:
                blocks.append(_Block(degree=i, rows=r, cols=c, offset=offset))
                offset += r * c
        self.blocks = {b.degree: b for b in blocks}
        self.nvars = offset
        slack = 0
        eqs: list[dict[int, int]] = []

        # commuting squares: d_target f_i - f_{i+1} d_source = 0 mod relations
        for i in range(source.lowest - 1, source.highest + 1):
            src_amb = source.component(i).ambient_rank
            tgt_next = target.component(i + 1)
            if src_amb == 0 or tgt_next.ambient_rank == 0:
                continue
            dt = target.differential(i).matrix
            ds = source.differential(i).matrix
            rel = tgt_next.relations
            for c in range(src_amb):
                eq_rows = [dict() for _ in range(tgt_next.ambient_rank)]
                bi = self.blocks.get(i)
                if bi is not None:
                    for t in range(bi.rows):
                        for r in range(tgt_next.ambient_rank):
                            x = dt.entries[r][t]
                            if x:
                                idx = bi.offset + c * bi.rows + t
                                eq_rows[r][idx] = eq_rows[r].get(idx, 0) + x
                bi1 = self.blocks.get(i + 1)
                if bi1 is not None:
                    for r in range(tgt_next.ambient_rank):
                        for t in range(bi1.cols):
                            x = ds.entries[t][c]
                            if x:
                                idx = bi1.offset + t * bi1.rows + r
                                eq_rows[r][idx] = eq_rows[r].get(idx, 0) - x
                for r in range(tgt_next.ambient_rank):
                    if rel.cols:
                        for t in range(rel.cols):
                            x = rel.entries[r][t]
                            if x:
                                eq_rows[r][self.nvars + slack + t] = x
                    eqs.append(eq_rows[r])
                slack += rel.cols
        # well-definedness: f_i (relation column) = 0 mod relations
        for i, b in self.blocks.items():
            rel_src = source.component(i).relations
            rel_tgt = target.component(i).relations
            for j in range(rel_src.cols):
                col = rel_src.column(j)
                eq_rows = [dict() for _ in range(b.rows)]
                for c in range(b.cols):
                    if col[c]:
                        for r in range(b.rows):
                            idx = b.offset + c * b.rows + r
                            eq_rows[r][idx] = eq_rows[r].get(idx, 0) + col[c]
                for r in range(b.rows):
                    if rel_tgt.cols:
                        for t in range(rel_tgt.cols):
                            x = rel_tgt.entries[r][t]
                            if x:
                                eq_rows[r][self.nvars + slack + t] = x
                    eqs.append(eq_rows[r])
                slack += rel_tgt.cols

        total = self.nvars + slack
        if eqs:
            mat = IntMatrix(
                ([row.get(j, 0) for j in range(total)] for row in eqs), cols=total
            )
            full = kernel_basis(mat)
            gens = IntMatrix(full.entries[: self.nvars], cols=full.cols)
            self.basis = lattice_basis(gens)
        else:
            self.basis = IntMatrix.identity(self.nvars)
        self._solver = None

    def to_chain_map(self, flat: Sequence[int], check: bool = True) -> ChainMap:
        mats = {}
        for i, b in self.blocks.items():
            mats[i] = IntMatrix.from_columns(
                [tuple(flat[b.offset + c * b.rows : b.offset + (c + 1) * b.rows]) for c in range(b.cols)],
                rows=b.rows,
            )
        return ChainMap.from_matrices(self.source, self.target, mats, check=check)

    def flatten(self, f: ChainMap) -> tuple[int, ...]:
        out = [0] * self.nvars
        for i, b in self.blocks.items():
            m = f.map(i).matrix
            for c in range(b.cols):
                for r in range(b.rows):
                    out[b.offset + c * b.rows + r] = m.entries[r][c]
        return tuple(out)

    def from_coords(self, coords: Sequence[int], check: bool = False) -> ChainMap:
        return self.to_chain_map(self.basis.mul_vector(coords), check=check)

    def random_map(self, rng, span: int = 2) -> ChainMap:
        coords = [rng.randrange(-span, span + 1) for _ in range(self.basis.cols)]
        return self.from_coords(coords)


def chain_map_lattice(source: BoundedComplex, target: BoundedComplex) -> ChainMapLattice:
    return ChainMapLattice(source, target)

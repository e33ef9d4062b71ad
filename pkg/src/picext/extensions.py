"""Extensions of two-term complexes and their classification.

An extension K -> L -> M is validated through two equivalent conditions:
(a) H^0 of the projection is surjective and K maps quasi-isomorphically to
the truncated shifted cone of the projection; (b) H^-1 of the inclusion is
injective and the truncated cone of the inclusion maps quasi-isomorphically
to M.  Both are checked and must agree.

``theta`` sends an extension to its class in Ext^1(M, K); ``psi`` realizes
a class as a push-down of the canonical free cover of M.  They are mutually
inverse on equivalence classes, and equivalence of extensions is decided
through ``theta`` (sound because the classification is a bijection, and
effectively computable; a witness-producing search is out of scope).

Composites j o i vanish strictly, i.e. degreewise as homomorphisms: every
constructor here produces strict composites, and each equivalence class has
such a representative.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .abelian import (
    FgAbGroup,
    GroupElement,
    GroupHom,
    image_exactness_pair,
    invert_isomorphism,
)
from .complexes import (
    ChainMap,
    KernelComplex,
    TwoTermComplex,
    as_two_term,
    chain_map_lattice,
    cohomology_space,
    direct_sum_complex,
    fibered_product_complex,
    fibered_product_mediator,
    fibered_sum_complex,
    fibered_sum_mediator,
    free_cover,
    induced_cohomology_map,
    is_quasi_isomorphism,
    kernel_complex,
    cokernel_complex,
    mapping_cone,
    shift,
    shift_chain_map,
)
from .derived import (
    DerivedHomGroup,
    chain_maps_mod_homotopy,
    derived_hom,
    lift_through_quasi_iso,
)
from .errors import IncomparableClasses, InputMismatch, InvariantViolation, NotAnExtension
from .int_linalg import IntMatrix, block_diag, column_hermite, hstack, vstack


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    composite_zero: bool
    a_h0_surjective: bool
    a_quasi_iso: bool
    b_h1_injective: bool
    b_quasi_iso: bool

    @property
    def condition_a(self) -> bool:
        return self.a_h0_surjective and self.a_quasi_iso

    @property
    def condition_b(self) -> bool:
        return self.b_h1_injective and self.b_quasi_iso

    @property
    def valid(self) -> bool:
        return self.composite_zero and self.condition_a

    @property
    def conditions_agree(self) -> bool:
        return self.condition_a == self.condition_b


def _to_kernel_map(i: ChainMap, kc: KernelComplex) -> ChainMap:
    """The canonical map K -> tau_<=0(MC(j)[-1]) induced by i (needs joi=0)."""
    k = as_two_term(i.source)
    m_amb = kc.embed.target.component(0).ambient_rank - i.target.component(0).ambient_rank
    maps = {}
    # degree -1: the component of the truncated cone is 0 (+) L^-1
    maps[-1] = GroupHom(k.k_minus1, kc.complex.k_minus1, i.map(-1).matrix)
    # degree 0: solve into the kernel lattice
    basis = kc.embed.map(0).matrix
    ch = column_hermite(basis)
    cols = []
    for t in range(k.k0.ambient_rank):
        vec = (0,) * m_amb + tuple(i.map(0).matrix.column(t))
        sol = ch.solve(vec)
        if sol is None:
            raise InvariantViolation("canonical map misses the kernel lattice")
        cols.append(sol)
    maps[0] = GroupHom(
        k.k0, kc.complex.k0, IntMatrix.from_columns(cols, rows=basis.cols)
    )
    return ChainMap(k, kc.complex, maps)


def extension_conditions(i: ChainMap, j: ChainMap) -> ConditionReport:
    """Evaluate both halves of the extension definition on a candidate."""
    if i.target != j.source:
        raise InputMismatch("maps do not compose")
    composite_zero = j.compose(i).is_zero_map()
    a_h0 = induced_cohomology_map(j, 0).is_surjective()
    a_qis = False
    if composite_zero:
        kc = kernel_complex(j)
        a_qis = is_quasi_isomorphism(_to_kernel_map(i, kc))
    b_h1 = induced_cohomology_map(i, -1).is_injective()
    b_qis = False
    if composite_zero:
        cc = cokernel_complex(i)
        m = as_two_term(j.target)
        from_coker = ChainMap(
            cc.complex,
            m,
            {
                -1: GroupHom(
                    cc.complex.k_minus1,
                    m.k_minus1,
                    hstack(
                        [
                            j.map(-1).matrix,
                            IntMatrix.zeros(
                                m.k_minus1.ambient_rank,
                                cc.complex.k_minus1.ambient_rank
                                - j.source.component(-1).ambient_rank,
                            ),
                        ]
                    ),
                ),
                0: GroupHom(cc.complex.k0, m.k0, j.map(0).matrix),
            },
        )
        b_qis = is_quasi_isomorphism(from_coker)
    return ConditionReport(
        composite_zero=composite_zero,
        a_h0_surjective=a_h0,
        a_quasi_iso=a_qis,
        b_h1_injective=b_h1,
        b_quasi_iso=b_qis,
    )


class Extension:
    """A validated extension k -> l -> m of two-term complexes."""

    __slots__ = ("k", "l", "m", "i", "j", "_hash")

    def __init__(self, i: ChainMap, j: ChainMap, _report: ConditionReport):
        self.k = as_two_term(i.source)
        self.l = as_two_term(i.target)
        self.m = as_two_term(j.target)
        self.i = i
        self.j = j
        self._hash = None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Extension)
            and self.i == other.i
            and self.j == other.j
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.i, self.j))
        return self._hash

    def __repr__(self) -> str:
        return f"Extension({self.k!r} -> {self.l!r} -> {self.m!r})"


def validate_extension(i: ChainMap, j: ChainMap) -> Extension:
    """Check the extension conditions; raise NotAnExtension on failure."""
    report = extension_conditions(i, j)
    if not report.composite_zero:
        raise NotAnExtension("composite j o i is not the zero map")
    if not report.a_h0_surjective:
        raise NotAnExtension("H^0 of the projection is not surjective")
    if not report.a_quasi_iso:
        raise NotAnExtension(
            "inclusion does not induce a quasi-isomorphism onto the kernel complex"
        )
    if not report.conditions_agree:
        raise InvariantViolation("extension conditions (a) and (b) disagree")
    return Extension(i, j, report)


# ---------------------------------------------------------------------------
# Classes in Ext^1
# ---------------------------------------------------------------------------


class ExtClass:
    """An element of Ext^1(m, k) in a fixed ambient presentation.

    Classes over different ambient presentations are incomparable; mixing
    them raises rather than silently coercing.
    """

    __slots__ = ("ambient", "coords")

    def __init__(self, ambient: DerivedHomGroup, coords: GroupElement):
        if coords.group != ambient.group:
            raise InputMismatch("coordinates do not live in the ambient group")
        self.ambient = ambient
        self.coords = coords

    def _check_comparable(self, other: "ExtClass"):
        if not self.ambient.same_presentation(other.ambient):
            raise IncomparableClasses(
                "classes live in Ext groups over different pairs of complexes"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtClass):
            return NotImplemented
        self._check_comparable(other)
        return self.coords == other.coords

    __hash__ = None  # comparisons may raise; hashing is not meaningful

    def __add__(self, other: "ExtClass") -> "ExtClass":
        self._check_comparable(other)
        return ExtClass(self.ambient, self.coords + other.coords)

    def __neg__(self) -> "ExtClass":
        return ExtClass(self.ambient, -self.coords)

    def __sub__(self, other: "ExtClass") -> "ExtClass":
        return self + (-other)

    def scale(self, c: int) -> "ExtClass":
        return ExtClass(self.ambient, c * self.coords)

    def is_zero(self) -> bool:
        return self.coords.is_zero()

    def __repr__(self) -> str:
        return f"ExtClass({list(self.coords.coords)})"


def ext_class(m: TwoTermComplex, k: TwoTermComplex, coords) -> ExtClass:
    dh = derived_hom(m, k, 1)
    return ExtClass(dh, dh.group.element(tuple(coords)))


# ---------------------------------------------------------------------------
# theta: extension -> class
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def theta(e: Extension) -> ExtClass:
    """The class of an extension: the connecting image of the identity.

    A free resolution Q of m maps into the cone of j through the canonical
    inclusion of m; transporting that map backwards along the
    quasi-isomorphism k[1] -> MC(j) (one integer system, solvable because Q
    is free) produces a chain map Q -> k[1] whose homotopy class is the
    answer, expressed in the fixed presentation of Ext^1(m, k).
    """
    dh = derived_hom(e.m, e.k, 1)
    cone = mapping_cone(e.j)
    kc = kernel_complex(e.j)
    phi = _to_kernel_map(e.i, kc)
    w = shift_chain_map(kc.embed.compose(phi), 1)  # k[1] -> MC(j)
    target_map = cone.include.compose(dh.resolution.witness)  # Q -> MC(j)
    u = lift_through_quasi_iso(dh.resolution.complex, w, target_map)
    return ExtClass(dh, dh.class_of(u))


# ---------------------------------------------------------------------------
# Operations on extensions
# ---------------------------------------------------------------------------


def neutral_extension(m: TwoTermComplex, k: TwoTermComplex) -> Extension:
    """The split extension k -> k (+) m -> m; the neutral object."""
    ds = direct_sum_complex([k, m])
    return validate_extension(ds.inclusions[0], ds.projections[1])


def pullback_extension(e: Extension, f: ChainMap) -> Extension:
    """Base change along f: m' -> m; an extension of m' by k."""
    if as_two_term(f.target) != e.m:
        raise InputMismatch("pull-back map must land in the base of the extension")
    mp = as_two_term(f.source)
    fp = fibered_product_complex(e.j, f)
    new_i = fibered_product_mediator(fp, e.i, ChainMap.zero(e.k, mp))
    return validate_extension(new_i, fp.pr2)


def pushdown_extension(e: Extension, g: ChainMap) -> Extension:
    """Cobase change along g: k -> k'; an extension of m by k'."""
    if as_two_term(g.source) != e.k:
        raise InputMismatch("push-down map must start at the fiber of the extension")
    kp = as_two_term(g.target)
    fs = fibered_sum_complex(e.i, g)
    new_j = fibered_sum_mediator(fs, e.j, ChainMap.zero(kp, e.m))
    return validate_extension(fs.in2, new_j)


def product_extension(e: Extension, e2: Extension) -> Extension:
    """Componentwise product: an extension of m x m' by k x k'."""
    ks = direct_sum_complex([e.k, e2.k])
    ls = direct_sum_complex([e.l, e2.l])
    ms = direct_sum_complex([e.m, e2.m])
    i = ChainMap.from_matrices(
        ks.complex,
        ls.complex,
        {
            d: block_diag([e.i.map(d).matrix, e2.i.map(d).matrix])
            for d in (-1, 0)
        },
    )
    j = ChainMap.from_matrices(
        ls.complex,
        ms.complex,
        {
            d: block_diag([e.j.map(d).matrix, e2.j.map(d).matrix])
            for d in (-1, 0)
        },
    )
    return validate_extension(i, j)


def _diagonal_map(m: TwoTermComplex) -> ChainMap:
    ds = direct_sum_complex([m, m])
    return ChainMap.from_matrices(
        m,
        ds.complex,
        {
            d: vstack(
                [
                    IntMatrix.identity(m.component(d).ambient_rank),
                    IntMatrix.identity(m.component(d).ambient_rank),
                ]
            )
            for d in (-1, 0)
        },
    )


def _sum_map(k: TwoTermComplex) -> ChainMap:
    ds = direct_sum_complex([k, k])
    return ChainMap.from_matrices(
        ds.complex,
        k,
        {
            d: hstack(
                [
                    IntMatrix.identity(k.component(d).ambient_rank),
                    IntMatrix.identity(k.component(d).ambient_rank),
                ]
            )
            for d in (-1, 0)
        },
    )


def baer_sum(e: Extension, e2: Extension) -> Extension:
    """Group law on extensions of m by k.

    Pull the product back along the diagonal of m, then push down along the
    sum map of k.
    """
    if e.k != e2.k or e.m != e2.m:
        raise InputMismatch("summands must be extensions of the same m by the same k")
    prod = product_extension(e, e2)
    pulled = pullback_extension(prod, _diagonal_map(e.m))
    return pushdown_extension(pulled, _sum_map(e.k))


def is_split(e: Extension) -> bool:
    """True iff the extension is equivalent to the neutral one."""
    return theta(e).is_zero()


def are_equivalent(e: Extension, e2: Extension) -> bool:
    """Equality of classes decides equivalence of extensions."""
    if e.k != e2.k or e.m != e2.m:
        raise InputMismatch("extensions have different endpoints")
    return theta(e) == theta(e2)


# ---------------------------------------------------------------------------
# psi: class -> extension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _PsiData:
    cover_ext: Extension
    classes: object  # HomotopyClassGroup of maps N -> k
    boundary_matrix: IntMatrix  # ambient(Ext^1) x ambient(classes)
    dh: DerivedHomGroup


@lru_cache(maxsize=None)
def _psi_data(m: TwoTermComplex, k: TwoTermComplex) -> _PsiData:
    cov = free_cover(m)
    cover_ext = validate_extension(cov.s, cov.p)
    classes = chain_maps_mod_homotopy(cov.n, k)
    dh = derived_hom(m, k, 1)
    cols = []
    n = classes.group.ambient_rank
    for t in range(n):
        u = classes.lift_coords(tuple(1 if s == t else 0 for s in range(n)))
        cls = theta(pushdown_extension(cover_ext, u))
        cols.append(cls.coords.coords)
    boundary = IntMatrix.from_columns(cols, rows=dh.group.ambient_rank)
    # the connecting map must be well defined on homotopy classes
    GroupHom(classes.group, dh.group, boundary)
    return _PsiData(cover_ext=cover_ext, classes=classes, boundary_matrix=boundary, dh=dh)


def psi(x: ExtClass) -> Extension:
    """Realize a class: push the free cover of m down along a lift of x.

    The connecting homomorphism from homotopy classes of maps N -> k onto
    Ext^1(m, k) is surjective, so the integer system always has a solution;
    failure indicates an internal bug, not bad input.
    """
    if x.ambient.degree != 1:
        raise InputMismatch("psi expects a class in degree 1")
    m, k = x.ambient.source, x.ambient.target
    data = _psi_data(m, k)
    if not data.dh.same_presentation(x.ambient):
        raise IncomparableClasses("class does not live over the cached presentation")
    sys = hstack([data.boundary_matrix, data.dh.group.relations])
    sol = column_hermite(sys).solve(x.coords.coords)
    if sol is None:
        raise InvariantViolation("connecting map failed to be surjective")
    coords = sol[: data.boundary_matrix.cols]
    u = data.classes.lift_coords(coords)
    return pushdown_extension(data.cover_ext, u)


# ---------------------------------------------------------------------------
# The six-term exact sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LongExactSequence:
    """0 -> pi1(k) -> pi1(l) -> pi1(m) -> pi0(k) -> pi0(l) -> pi0(m) -> 0."""

    extension: Extension
    pi1_i: GroupHom
    pi1_j: GroupHom
    delta: GroupHom
    pi0_i: GroupHom
    pi0_j: GroupHom
    spots: dict[str, bool]

    @property
    def exact(self) -> bool:
        return all(self.spots.values())

    @property
    def maps(self) -> tuple[GroupHom, ...]:
        return (self.pi1_i, self.pi1_j, self.delta, self.pi0_i, self.pi0_j)


def long_exact_sequence(e: Extension) -> LongExactSequence:
    """The six-term sequence of the extension, with the connecting map.

    A class in H^-1(m) lifts canonically into the degree -1 component of the
    cone of j; its class there is carried back to H^0(k) through the
    quasi-isomorphism of condition (a).
    """
    kc = kernel_complex(e.j)
    phi = _to_kernel_map(e.i, kc)
    h0_iso = invert_isomorphism(induced_cohomology_map(phi, 0))
    cs_m = cohomology_space(e.m, -1)
    cs_kc = cohomology_space(kc.complex, 0)
    basis = kc.embed.map(0).matrix
    ch = column_hermite(basis)
    m_amb = e.m.k_minus1.ambient_rank
    cols = []
    for t in range(cs_m.cycle_basis.cols):
        z = cs_m.cycle_basis.column(t)
        vec = tuple(z) + (0,) * (basis.rows - m_amb)
        sol = ch.solve(vec)
        if sol is None:
            raise InvariantViolation("canonical lift misses the kernel lattice")
        cols.append(h0_iso(cs_kc.class_of(sol)).coords)
    delta = GroupHom(
        cs_m.group,
        h0_iso.target,
        IntMatrix.from_columns(cols, rows=h0_iso.target.ambient_rank),
    )
    pi1_i = induced_cohomology_map(e.i, -1)
    pi1_j = induced_cohomology_map(e.j, -1)
    pi0_i = induced_cohomology_map(e.i, 0)
    pi0_j = induced_cohomology_map(e.j, 0)
    spots = {
        "pi1_k": pi1_i.is_injective(),
        "pi1_l": image_exactness_pair(pi1_i, pi1_j),
        "pi1_m": image_exactness_pair(pi1_j, delta),
        "pi0_k": image_exactness_pair(delta, pi0_i),
        "pi0_l": image_exactness_pair(pi0_i, pi0_j),
        "pi0_m": pi0_j.is_surjective(),
    }
    return LongExactSequence(
        extension=e,
        pi1_i=pi1_i,
        pi1_j=pi1_j,
        delta=delta,
        pi0_i=pi0_i,
        pi0_j=pi0_j,
        spots=spots,
    )

"""Seeded random generators for groups, complexes, maps and extensions.

Everything takes an explicit ``random.Random`` so verification runs and
test shards are reproducible.  Sizes are kept small on purpose: the point
of the corpus is coverage of shapes (trivial groups, free parts, redundant
presentations), not scale.
"""

from __future__ import annotations

import random
from typing import Sequence

from .abelian import FgAbGroup, GroupHom, enumerate_elements, hom_group
from .complexes import ChainMap, TwoTermComplex, chain_map_lattice, cohomology
from .int_linalg import IntMatrix, hstack


def random_unimodular(rng: random.Random, n: int, steps: int | None = None) -> IntMatrix:
    """Product of random elementary operations; determinant +-1."""
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 3 * n):
        op = rng.randrange(3)
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        if op == 0:
            c = rng.choice([-2, -1, 1, 2])
            for t in range(n):
                rows[i][t] += c * rows[j][t]
        elif op == 1:
            rows[i], rows[j] = rows[j], rows[i]
        else:
            rows[i] = [-x for x in rows[i]]
    return IntMatrix(rows, cols=n)


def random_finite_group(rng: random.Random, max_rank: int = 2, factor_pool: Sequence[int] = (1, 2, 2, 3, 4, 4, 6, 8)) -> FgAbGroup:
    """A finite group with a scrambled, possibly redundant presentation."""
    n = rng.randrange(1, max_rank + 1)
    diag = [rng.choice(factor_pool) for _ in range(n)]
    rel = IntMatrix.diagonal(diag, rows=n, cols=n)
    u = random_unimodular(rng, n)
    rels = u * rel
    if rng.random() < 0.3:
        extra = IntMatrix.from_columns(
            [tuple(sum(rels.entries[i][j] for j in range(rels.cols)) for i in range(n))],
            rows=n,
        )
        rels = hstack([rels, extra])
    return FgAbGroup(n, rels)


def random_group(rng: random.Random, max_rank: int = 2, allow_free: bool = True) -> FgAbGroup:
    """Finite by default, with occasional free summands and trivial groups."""
    roll = rng.random()
    if roll < 0.1:
        return FgAbGroup.trivial()
    if allow_free and roll < 0.25:
        n = rng.randrange(1, max_rank + 1)
        k = rng.randrange(0, n)
        diag = [rng.choice((1, 2, 3, 4)) for _ in range(k)]
        rel = IntMatrix.from_columns(
            [tuple(diag[j] if i == j else 0 for i in range(n)) for j in range(k)], rows=n
        )
        return FgAbGroup(n, random_unimodular(rng, n) * rel if k else rel)
    return random_finite_group(rng, max_rank=max_rank)


def random_hom(rng: random.Random, a: FgAbGroup, b: FgAbGroup, span: int = 2) -> GroupHom:
    """A random well-defined homomorphism, sampled from the Hom lattice."""
    hg = hom_group(a, b)
    coords = [rng.randrange(-span, span + 1) for _ in range(hg.basis.cols)]
    flat = hg.basis.mul_vector(coords)
    nb = b.ambient_rank
    cols = [tuple(flat[c * nb : (c + 1) * nb]) for c in range(a.ambient_rank)]
    return GroupHom(a, b, IntMatrix.from_columns(cols, rows=nb))


def random_two_term(
    rng: random.Random,
    max_rank: int = 2,
    allow_free: bool = True,
    max_cohomology_order: int | None = None,
) -> TwoTermComplex:
    """A random two-term complex, optionally with a cap on cohomology size."""
    for _ in range(50):
        a = random_group(rng, max_rank=max_rank, allow_free=allow_free)
        b = random_group(rng, max_rank=max_rank, allow_free=allow_free)
        d = random_hom(rng, a, b)
        cx = TwoTermComplex(a, b, d)
        if max_cohomology_order is not None:
            sizes = []
            for g in cohomology(cx).values():
                if not g.is_finite():
                    sizes.append(None)
                else:
                    sizes.append(g.order())
            if any(s is None or s > max_cohomology_order for s in sizes):
                continue
        return cx
    raise RuntimeError("failed to sample a complex within the requested bounds")


def random_chain_map(rng: random.Random, k: TwoTermComplex, l: TwoTermComplex, span: int = 2) -> ChainMap:
    return chain_map_lattice(k, l).random_map(rng, span=span)


def random_quasi_isomorphism(rng: random.Random, k: TwoTermComplex) -> tuple[TwoTermComplex, ChainMap]:
    """(k', w) with w: k' -> k a quasi-isomorphism; k' is a fattened model."""
    from .complexes import randomized_free_cover, resolution_from_cover, truncate, as_two_term

    cov = randomized_free_cover(rng=rng, m=k, extra=(rng.randrange(0, 2), rng.randrange(0, 2)))
    res = resolution_from_cover(cov, k)
    trunc = as_two_term(truncate(res.complex, "ge", -1))
    maps = {
        -1: GroupHom(
            trunc.k_minus1, k.k_minus1, res.witness.map(-1).matrix
        ),
        0: res.witness.map(0),
    }
    w = ChainMap(trunc, k, maps)
    return trunc, w


def random_extension_class(rng: random.Random, dh_group: FgAbGroup) -> tuple[int, ...]:
    """Coordinates of a random element, honest for infinite groups too."""
    if dh_group.is_finite() and dh_group.order() <= 512:
        els = enumerate_elements(dh_group)
        return rng.choice(els).coords
    return tuple(rng.randrange(-3, 4) for _ in range(dh_group.ambient_rank))

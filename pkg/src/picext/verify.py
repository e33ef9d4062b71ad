"""Randomized verification suites behind the ``verify`` CLI command.

Every suite draws from an explicitly seeded generator and reports a check
count plus the list of failures, so a given (seed, iterations) pair always
produces the identical report.
"""

from __future__ import annotations

import random
from math import gcd

from . import corpus, oracle
from .abelian import (
    FgAbGroup,
    GroupHom,
    canonical_invariants,
    cokernel,
    direct_sum,
    enumerate_elements,
    ext1_group,
    hom_group,
    image_exactness_pair,
    kernel,
    pullback_group,
    pullback_mediator,
    pushout_group,
    pushout_mediator,
)
from .complexes import (
    ChainMap,
    TwoTermComplex,
    chain_map_lattice,
    cohomology,
    cohomology_space,
    cokernel_complex,
    free_cover,
    free_resolution,
    induced_cohomology_map,
    is_quasi_isomorphism,
    kernel_complex,
    mapping_cone,
    randomized_free_cover,
    resolution_from_cover,
    shift,
    truncate,
)
from .derived import (
    derived_hom,
    derived_hom_with_resolution,
    hom_stack_complex,
    pi_epsilon_sequence,
    precomposition_map,
)
from .extensions import (
    ExtClass,
    are_equivalent,
    baer_sum,
    extension_conditions,
    is_split,
    long_exact_sequence,
    neutral_extension,
    psi,
    pushdown_extension,
    pullback_extension,
    theta,
    validate_extension,
)
from .int_linalg import (
    IntMatrix,
    determinant,
    kernel_basis,
    lattice_basis,
    smith_normal_form,
    solve_linear,
)


class Suite:
    def __init__(self, name: str):
        self.name = name
        self.checks = 0
        self.failures: list[str] = []

    def check(self, ok: bool, label: str):
        self.checks += 1
        if not ok:
            self.failures.append(label)

    def report(self) -> dict:
        return {
            "name": self.name,
            "checks": self.checks,
            "failures": self.failures,
            "ok": not self.failures,
        }


def suite_int_linalg(rng: random.Random, iterations: int) -> dict:
    s = Suite("int_linalg")
    for t in range(iterations * 8):
        m = rng.randrange(0, 9)
        n = rng.randrange(0, 9)
        a = IntMatrix([[rng.randrange(-9, 10) for _ in range(n)] for _ in range(m)], cols=n)
        dec = smith_normal_form(a)
        s.check(dec.u * a * dec.v == dec.s, f"snf uav #{t}")
        s.check(abs(determinant(dec.u)) == 1 and abs(determinant(dec.v)) == 1, f"snf unimodular #{t}")
        diag = [d for d in dec.diagonal() if d]
        s.check(all(d >= 0 for d in dec.diagonal()), f"snf nonneg #{t}")
        s.check(all(diag[i + 1] % diag[i] == 0 for i in range(len(diag) - 1)), f"snf divis #{t}")
        kb = kernel_basis(a)
        s.check((a * kb).is_zero(), f"kernel annihilates #{t}")
        s.check(kb.cols == n - dec.rank, f"kernel rank #{t}")
        if n:
            x = tuple(rng.randrange(-4, 5) for _ in range(n))
            b = a.mul_vector(x)
            sol = solve_linear(a, b)
            s.check(sol is not None and a.mul_vector(sol) == b, f"solve roundtrip #{t}")
        b = tuple(rng.randrange(-5, 6) for _ in range(m))
        sol = solve_linear(a, b)
        if sol is not None:
            s.check(a.mul_vector(sol) == b, f"solve verifies #{t}")
        else:
            c = dec.u.mul_vector(b)
            dlist = dec.diagonal()
            obstructed = any(
                (i < len(dlist) and dlist[i] and ci % dlist[i])
                or ((i >= len(dlist) or not dlist[i]) and ci)
                for i, ci in enumerate(c)
            )
            s.check(obstructed, f"solve obstruction certificate #{t}")
    # small-coordinate kernel vectors lie in the basis lattice
    for t in range(iterations):
        m, n = rng.randrange(1, 3), rng.randrange(1, 4)
        a = IntMatrix([[rng.randrange(-3, 4) for _ in range(n)] for _ in range(m)], cols=n)
        kb = kernel_basis(a)
        from itertools import product as iproduct

        for vec in iproduct(*(range(-3, 4) for _ in range(n))):
            if a.mul_vector(vec) == (0,) * m:
                s.check(solve_linear(kb, vec) is not None, f"kernel saturated #{t}")
    return s.report()


def suite_abelian(rng: random.Random, iterations: int) -> dict:
    s = Suite("abelian")
    for t in range(iterations):
        g = corpus.random_group(rng)
        u = corpus.random_unimodular(rng, g.ambient_rank)
        conj = FgAbGroup(g.ambient_rank, u * g.relations)
        s.check(canonical_invariants(conj) == canonical_invariants(g), f"invariants stable #{t}")
    for t in range(iterations):
        a = corpus.random_finite_group(rng)
        b = corpus.random_finite_group(rng)
        if b.order() ** a.ambient_rank <= 20000:
            s.check(
                oracle.brute_force_hom_count(a, b) == hom_group(a, b).group.order(),
                f"hom count #{t}",
            )
    for n in range(2, 31):
        for m in (2, 3, n, min(30, n + 6)):
            g = gcd(n, m)
            expect = (0, ()) if g == 1 else (0, (g,))
            s.check(
                ext1_group(FgAbGroup.cyclic(n), FgAbGroup.cyclic(m)).invariants == expect,
                f"ext1 cyclic {n},{m}",
            )
    for t in range(iterations):
        a = corpus.random_group(rng)
        b = corpus.random_group(rng)
        f = corpus.random_hom(rng, a, b)
        ker = kernel(f)
        cok = cokernel(f)
        s.check(ker.include.is_injective(), f"kernel injects #{t}")
        s.check(cok.project.is_surjective(), f"cokernel surjects #{t}")
        s.check(image_exactness_pair(ker.include, f), f"exact at source #{t}")
        s.check(image_exactness_pair(f, cok.project), f"exact at target #{t}")
    for t in range(iterations):
        a, b, c = (corpus.random_group(rng) for _ in range(3))
        f = corpus.random_hom(rng, a, c)
        g = corpus.random_hom(rng, b, c)
        pb = pullback_group(f, g)
        s.check(f.compose(pb.pr1).same_hom(g.compose(pb.pr2)), f"pullback square #{t}")
        tsrc = corpus.random_group(rng)
        h = corpus.random_hom(rng, tsrc, pb.group)
        t1 = pb.pr1.compose(h)
        t2 = pb.pr2.compose(h)
        med = pullback_mediator(pb, t1, t2)
        s.check(pb.pr1.compose(med).same_hom(t1) and pb.pr2.compose(med).same_hom(t2), f"pullback mediates #{t}")
        f2 = corpus.random_hom(rng, c, a)
        g2 = corpus.random_hom(rng, c, b)
        po = pushout_group(f2, g2)
        s.check(po.in1.compose(f2).same_hom(po.in2.compose(g2)), f"pushout square #{t}")
        tt = corpus.random_group(rng)
        h = corpus.random_hom(rng, po.group, tt)
        med2 = pushout_mediator(po, h.compose(po.in1), h.compose(po.in2))
        s.check(med2.same_hom(h), f"pushout mediator unique #{t}")
    return s.report()


def suite_complexes(rng: random.Random, iterations: int) -> dict:
    s = Suite("complexes")
    for t in range(iterations):
        k = corpus.random_two_term(rng)
        l = corpus.random_two_term(rng)
        f = corpus.random_chain_map(rng, k, l)
        cone = mapping_cone(f)
        for i in range(cone.cone.lowest, cone.cone.highest):
            s.check(
                cone.cone.differential(i + 1).compose(cone.cone.differential(i)).is_zero_hom(),
                f"cone dd=0 #{t}",
            )
        # truncation windows
        for mode, n in (("le", -1), ("le", 0), ("ge", -1), ("ge", 0)):
            tr = truncate(cone.cone, mode, n)
            h_orig = cohomology(cone.cone)
            h_tr = cohomology(tr)
            for i in range(cone.cone.lowest - 1, cone.cone.highest + 2):
                keep = i <= n if mode == "le" else i >= n
                want = h_orig.get(i, FgAbGroup.trivial()).invariants if keep else (0, ())
                got = h_tr.get(i, FgAbGroup.trivial()).invariants
                s.check(got == want, f"truncate {mode} {n} degree {i} #{t}")
        s.check(shift(shift(k, 1), -1) == k, f"shift inverse #{t}")
        s.check(shift(k, 0) == k, f"shift zero #{t}")
        s.check(
            shift(k, 1).differential(-2).matrix == k.differential(-1).matrix.scale(-1),
            f"shift sign #{t}",
        )
        # kernel/cokernel lemma: structural formulas and partial exactness
        kc = kernel_complex(f)
        cc = cokernel_complex(f)
        s.check(
            kc.complex == TwoTermComplex(
                kc.complex.k_minus1, kc.complex.k0, kc.complex.d
            ),
            f"kernel is two-term #{t}",
        )
        s.check(
            induced_cohomology_map(kc.include, -1).is_injective(),
            f"pi1 of kernel injects #{t}",
        )
        s.check(
            induced_cohomology_map(cc.project, 0).is_surjective(),
            f"pi0 onto cokernel #{t}",
        )
        trunc_ker = truncate(shift(mapping_cone(f).cone, -1), "le", 0)
        s.check(
            all(
                cohomology(kc.complex)[i].invariants
                == cohomology(trunc_ker).get(i, FgAbGroup.trivial()).invariants
                for i in (-1, 0)
            ),
            f"kernel matches truncated cone #{t}",
        )
        trunc_cok = truncate(mapping_cone(f).cone, "ge", -1)
        s.check(
            all(
                cohomology(cc.complex)[i].invariants
                == cohomology(trunc_cok).get(i, FgAbGroup.trivial()).invariants
                for i in (-1, 0)
            ),
            f"cokernel matches truncated cone #{t}",
        )
    for t in range(max(2, iterations // 2)):
        m = corpus.random_two_term(rng)
        cov = free_cover(m)
        for i in (-1, 0):
            s.check(cov.p.map(i).is_surjective(), f"cover surjective deg {i} #{t}")
            s.check(cov.s.map(i).is_injective(), f"cover kernel injects deg {i} #{t}")
            s.check(image_exactness_pair(cov.s.map(i), cov.p.map(i)), f"cover exact deg {i} #{t}")
            s.check(cov.n.component(i).is_free_presentation(), f"kernel free deg {i} #{t}")
            s.check(cov.p.source.component(i).is_free_presentation(), f"cover free deg {i} #{t}")
        res = free_resolution(m)
        s.check(is_quasi_isomorphism(res.witness), f"resolution qis #{t}")
        pe = pi_epsilon_sequence(m)
        s.check(pe.exact, f"four-term exact #{t}")
        s.check(pe.verdict == "trivial", f"four-term trivial class #{t}")
    # zero differential: extensions split degreewise at the level of Ext^1
    for t in range(max(2, iterations // 3)):
        mm = TwoTermComplex(corpus.random_finite_group(rng), corpus.random_finite_group(rng))
        kk = TwoTermComplex(corpus.random_finite_group(rng), corpus.random_finite_group(rng))
        lhs = derived_hom(mm, kk, 1).group.invariants
        rhs = direct_sum(
            [
                ext1_group(mm.k0, kk.k0),
                hom_group(mm.k_minus1, kk.k0).group,
                ext1_group(mm.k_minus1, kk.k_minus1),
            ]
        ).group.invariants
        s.check(lhs == rhs, f"zero-differential degreewise split #{t}")
    return s.report()


def suite_derived(rng: random.Random, iterations: int) -> dict:
    s = Suite("derived")
    for t in range(iterations):
        k = corpus.random_two_term(rng, max_cohomology_order=16)
        l = corpus.random_two_term(rng, max_cohomology_order=16)
        for deg in (-1, 0, 1):
            s.check(
                oracle.splitting_formula_ext(k, l, deg).invariants
                == derived_hom(k, l, deg).group.invariants,
                f"splitting formula deg {deg} #{t}",
            )
        hs = hom_stack_complex(k, l)
        hh = cohomology(hs)
        s.check(
            hh[0].invariants == derived_hom(k, l, 0).group.invariants,
            f"hom stack H0 #{t}",
        )
        s.check(
            hh[-1].invariants == derived_hom(k, l, -1).group.invariants,
            f"hom stack H-1 #{t}",
        )
    for t in range(max(2, iterations // 2)):
        k = corpus.random_two_term(rng, max_cohomology_order=16)
        l = corpus.random_two_term(rng, max_cohomology_order=16)
        cov = randomized_free_cover(k, rng)
        res = resolution_from_cover(cov, k)
        for deg in (-1, 0, 1):
            s.check(
                derived_hom_with_resolution(k, l, deg, res).group.invariants
                == derived_hom(k, l, deg).group.invariants,
                f"resolution independence deg {deg} #{t}",
            )
        kp, w = corpus.random_quasi_isomorphism(rng, k)
        for deg in (-1, 0, 1):
            s.check(
                precomposition_map(w, l, deg).is_isomorphism(),
                f"functorial along qis deg {deg} #{t}",
            )
    return s.report()


def _random_pair(rng: random.Random):
    m = corpus.random_two_term(rng, max_cohomology_order=8)
    k = corpus.random_two_term(rng, max_cohomology_order=8)
    return m, k


def suite_extensions(rng: random.Random, iterations: int) -> dict:
    s = Suite("extensions")
    pairs = max(2, iterations // 3)
    made = []
    for t in range(pairs):
        m, k = _random_pair(rng)
        dh = derived_hom(m, k, 1)
        if not dh.group.is_finite() or dh.group.order() > 64:
            continue
        els = enumerate_elements(dh.group)
        for el in els:
            x = ExtClass(dh, el)
            e = psi(x)
            s.check(theta(e) == x, f"theta(psi(x)) = x #{t}")
            made.append(e)
        ne = neutral_extension(m, k)
        s.check(theta(ne).is_zero(), f"theta neutral #{t}")
        if dh.group.is_trivial():
            s.check(is_split(psi(ExtClass(dh, dh.group.zero()))), f"ext1=0 split #{t}")
        if len(els) > 1:
            e1 = psi(ExtClass(dh, els[rng.randrange(len(els))]))
            e2 = psi(ExtClass(dh, els[rng.randrange(len(els))]))
            s.check(
                theta(baer_sum(e1, e2)) == theta(e1) + theta(e2),
                f"theta additive #{t}",
            )
            s.check(
                theta(baer_sum(e1, e2)) == theta(baer_sum(e2, e1)),
                f"baer sum commutes #{t}",
            )
            s.check(are_equivalent(baer_sum(e1, ne), e1), f"neutral is neutral #{t}")
    for e in made[: max(4, iterations)]:
        s.check(are_equivalent(psi(theta(e)), e), f"psi(theta(e)) ~ e")
        les = long_exact_sequence(e)
        s.check(les.exact, "six-term exact")
    # naturality and conditions agreement on fresh candidates
    for t in range(max(2, iterations // 3)):
        m, k = _random_pair(rng)
        dh = derived_hom(m, k, 1)
        if not dh.group.is_finite() or dh.group.order() > 32:
            continue
        els = enumerate_elements(dh.group)
        x = ExtClass(dh, els[rng.randrange(len(els))])
        e = psi(x)
        mp = corpus.random_two_term(rng, max_cohomology_order=8)
        f = corpus.random_chain_map(rng, mp, m)
        pulled = pullback_extension(e, f)
        ind = precomposition_map(f, k, 1)
        s.check(
            theta(pulled).coords == ind(theta(e).coords),
            f"pullback naturality #{t}",
        )
        kp = corpus.random_two_term(rng, max_cohomology_order=8)
        g = corpus.random_chain_map(rng, k, kp)
        pushed = pushdown_extension(e, g)
        from .derived import postcomposition_map

        ind2 = postcomposition_map(m, g, 1)
        s.check(
            theta(pushed).coords == ind2(theta(e).coords),
            f"pushdown naturality #{t}",
        )
        li = corpus.random_chain_map(rng, k, corpus.random_two_term(rng))
        lj = corpus.random_chain_map(rng, li.target, m)
        rep = extension_conditions(li, lj)
        s.check(rep.conditions_agree, f"conditions agree #{t}")
    return s.report()


def suite_oracle(rng: random.Random, iterations: int) -> dict:
    s = Suite("oracle")
    for t in range(iterations):
        a = corpus.random_finite_group(rng)
        b = corpus.random_finite_group(rng)
        if a.order() * b.order() <= 64:
            s.check(
                oracle.ext1_by_factor_sets(b, a).invariants == ext1_group(b, a).invariants,
                f"factor sets #{t}",
            )
        if b.order() ** a.ambient_rank <= 20000:
            s.check(
                oracle.brute_force_hom_count(a, b) == hom_group(a, b).group.order(),
                f"hom count #{t}",
            )
    return s.report()


SUITES = [
    suite_int_linalg,
    suite_abelian,
    suite_complexes,
    suite_derived,
    suite_extensions,
    suite_oracle,
]


def run_verification(seed: int, iterations: int) -> dict:
    reports = []
    for suite in SUITES:
        # string seeding is deterministic across processes, unlike tuple
        # seeding which goes through salted hash()
        rng = random.Random(f"{seed}/{suite.__name__}")
        reports.append(suite(rng, iterations))
    return {
        "seed": seed,
        "iterations": iterations,
        "suites": reports,
        "checks": sum(r["checks"] for r in reports),
        "ok": all(r["ok"] for r in reports),
    }

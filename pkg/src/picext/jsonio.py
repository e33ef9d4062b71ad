"""JSON encoding/decoding for groups, complexes, maps and extensions.

Matrix entries and class coordinates are decimal strings so arbitrary
precision survives JSON; dimensions, ranks and invariant factors are plain
numbers.  Loaders raise ``FormatError`` on malformed data, which the CLI
maps to exit code 2.
"""

from __future__ import annotations

from typing import Any

from .abelian import FgAbGroup, GroupHom
from .complexes import BoundedComplex, ChainMap, TwoTermComplex, as_two_term
from .derived import DerivedHomGroup, derived_hom
from .errors import FormatError
from .extensions import ExtClass, Extension, validate_extension
from .int_linalg import IntMatrix


def _expect(d: Any, key: str):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(f"missing key {key!r}")
    return d[key]


def matrix_to_json(m: IntMatrix) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[str(x) for x in row] for row in m.entries],
    }


def matrix_from_json(d: Any) -> IntMatrix:
    rows = _expect(d, "rows")
    cols = _expect(d, "cols")
    entries = _expect(d, "entries")
    try:
        parsed = [[int(x) for x in row] for row in entries]
        m = IntMatrix(parsed, cols=int(cols))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad matrix: {exc}") from exc
    if m.rows != int(rows):
        raise FormatError("matrix row count mismatch")
    return m


def group_to_json(g: FgAbGroup) -> dict:
    return {"rank": g.ambient_rank, "relations": matrix_to_json(g.relations)}


def group_from_json(d: Any) -> FgAbGroup:
    rank = _expect(d, "rank")
    rel = matrix_from_json(_expect(d, "relations"))
    try:
        return FgAbGroup(int(rank), rel)
    except Exception as exc:
        raise FormatError(f"bad group: {exc}") from exc


def hom_to_json(f: GroupHom) -> dict:
    return {
        "source": group_to_json(f.source),
        "target": group_to_json(f.target),
        "matrix": matrix_to_json(f.matrix),
    }


def hom_from_json(d: Any) -> GroupHom:
    try:
        return GroupHom(
            group_from_json(_expect(d, "source")),
            group_from_json(_expect(d, "target")),
            matrix_from_json(_expect(d, "matrix")),
        )
    except FormatError:
        raise
    except Exception as exc:
        raise FormatError(f"bad homomorphism: {exc}") from exc


def two_term_to_json(c: TwoTermComplex) -> dict:
    return {
        "deg_minus1": group_to_json(c.k_minus1),
        "deg0": group_to_json(c.k0),
        "d": matrix_to_json(c.d.matrix),
    }


def two_term_from_json(d: Any) -> TwoTermComplex:
    km1 = group_from_json(_expect(d, "deg_minus1"))
    k0 = group_from_json(_expect(d, "deg0"))
    mat = matrix_from_json(_expect(d, "d"))
    try:
        return TwoTermComplex(km1, k0, GroupHom(km1, k0, mat))
    except Exception as exc:
        raise FormatError(f"bad complex: {exc}") from exc


def bounded_to_json(c: BoundedComplex) -> dict:
    return {
        "lowest": c.lowest,
        "components": [group_to_json(g) for g in c.components],
        "differentials": [matrix_to_json(f.matrix) for f in c.differentials],
    }


def bounded_from_json(d: Any) -> BoundedComplex:
    lowest = int(_expect(d, "lowest"))
    comps = [group_from_json(g) for g in _expect(d, "components")]
    mats = [matrix_from_json(m) for m in _expect(d, "differentials")]
    try:
        diffs = [GroupHom(comps[i], comps[i + 1], m) for i, m in enumerate(mats)]
        return BoundedComplex(lowest, comps, diffs)
    except Exception as exc:
        raise FormatError(f"bad bounded complex: {exc}") from exc


def chain_map_to_json(f: ChainMap) -> dict:
    """Two-term chain map with endpoint references."""
    return {
        "source": two_term_to_json(as_two_term(f.source)),
        "target": two_term_to_json(as_two_term(f.target)),
        "f_minus1": matrix_to_json(f.map(-1).matrix),
        "f0": matrix_to_json(f.map(0).matrix),
    }


def chain_map_from_json(d: Any) -> ChainMap:
    src = two_term_from_json(_expect(d, "source"))
    tgt = two_term_from_json(_expect(d, "target"))
    try:
        return ChainMap.from_matrices(
            src,
            tgt,
            {-1: matrix_from_json(_expect(d, "f_minus1")), 0: matrix_from_json(_expect(d, "f0"))},
        )
    except FormatError:
        raise
    except Exception as exc:
        raise FormatError(f"bad chain map: {exc}") from exc


def bounded_chain_map_to_json(f: ChainMap) -> dict:
    return {
        "source": bounded_to_json(f.source),
        "target": bounded_to_json(f.target),
        "maps": {str(i): matrix_to_json(h.matrix) for i, h in sorted(f.maps.items())},
    }


def extension_to_json(e: Extension) -> dict:
    return {
        "k": two_term_to_json(e.k),
        "l": two_term_to_json(e.l),
        "m": two_term_to_json(e.m),
        "i": {
            "f_minus1": matrix_to_json(e.i.map(-1).matrix),
            "f0": matrix_to_json(e.i.map(0).matrix),
        },
        "j": {
            "f_minus1": matrix_to_json(e.j.map(-1).matrix),
            "f0": matrix_to_json(e.j.map(0).matrix),
        },
    }


def extension_from_json(d: Any) -> Extension:
    k = two_term_from_json(_expect(d, "k"))
    l = two_term_from_json(_expect(d, "l"))
    m = two_term_from_json(_expect(d, "m"))
    di = _expect(d, "i")
    dj = _expect(d, "j")
    try:
        i = ChainMap.from_matrices(
            k,
            l,
            {-1: matrix_from_json(_expect(di, "f_minus1")), 0: matrix_from_json(_expect(di, "f0"))},
        )
        j = ChainMap.from_matrices(
            l,
            m,
            {-1: matrix_from_json(_expect(dj, "f_minus1")), 0: matrix_from_json(_expect(dj, "f0"))},
        )
    except FormatError:
        raise
    except Exception as exc:
        raise FormatError(f"bad extension maps: {exc}") from exc
    return validate_extension(i, j)


def invariants_to_json(g: FgAbGroup) -> dict:
    free, factors = g.invariants
    return {"free_rank": free, "factors": list(factors)}


def ext_class_to_json(x: ExtClass) -> dict:
    return {
        "ambient": {
            "source": two_term_to_json(x.ambient.source),
            "target": two_term_to_json(x.ambient.target),
            "degree": x.ambient.degree,
        },
        "coords": [str(c) for c in x.coords.coords],
    }


def ext_class_from_json(d: Any) -> ExtClass:
    amb = _expect(d, "ambient")
    m = two_term_from_json(_expect(amb, "source"))
    k = two_term_from_json(_expect(amb, "target"))
    degree = int(_expect(amb, "degree"))
    dh = derived_hom(m, k, degree)
    try:
        coords = tuple(int(c) for c in _expect(d, "coords"))
        return ExtClass(dh, dh.group.element(coords))
    except FormatError:
        raise
    except Exception as exc:
        raise FormatError(f"bad class coordinates: {exc}") from exc


def derived_hom_to_json(dh: DerivedHomGroup, max_generators: int = 32) -> dict:
    reps = dh.representatives
    truncated = len(reps) > max_generators
    return {
        "invariants": invariants_to_json(dh.group),
        "generators": [bounded_chain_map_to_json(r) for r in reps[:max_generators]],
        "truncated": truncated,
    }

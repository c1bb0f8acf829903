"""Subface combinatorics of the n-cube.

A subface of the n-cube is written as a string over ``{0,1,*}`` of length n;
the stars mark free coordinates, so the number of stars is the dimension of
the subface.  Everything in this module is a pure function on such strings.

The orientation of an (n-1)-subface inside an n-face is decided against the
alternating reference sequence zeta = (0, 1, 0, 1, ...): replacing the i-th
star by zeta(i) gives an *incoming* subface, any other replacement gives an
*outgoing* one.  For the 2-face this reproduces the canonical edge labels

    0* | *1 | 1* | *0
    i1 | i2 | o1 | o2

and for the 4-cube it makes {0***, *1**, **0*, ***1} the incoming 3-cubes.

The two compiled-in edge-choice tables pick 3 edges on each incoming
(``LEFT``) and each outgoing (``RIGHT``) 3-cube of the 4-cube.  Their key
property, used by the twisted tetrahedron equation verifier, is that the two
12-edge sets are exchanged by reversing the coordinate order (1<->4, 2<->3).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

_LEX = {"0": 0, "1": 1, "*": 2}


class Orientation(enum.Enum):
    INCOMING = "incoming"
    OUTGOING = "outgoing"


def validate_code(code: str) -> str:
    if not code or any(ch not in "01*" for ch in code):
        raise ValueError(f"not a subface code: {code!r}")
    return code


def dimension(code: str) -> int:
    """Number of stars in the code."""
    return code.count("*")


def star_positions(code: str) -> list[int]:
    return [p for p, ch in enumerate(code) if ch == "*"]


def zeta(i: int) -> int:
    """Alternating reference bit, 1-based: zeta(1)=0, zeta(2)=1, zeta(3)=0, ..."""
    if i < 1:
        raise ValueError("zeta index is 1-based")
    return (i + 1) % 2


def contains(parent: str, child: str) -> bool:
    """True iff child is a subface of parent (stars only where parent has stars,
    fixed symbols equal elsewhere)."""
    if len(parent) != len(child):
        return False
    return all(p == "*" or p == c for p, c in zip(parent, child))


def classify(parent: str, child: str) -> Orientation:
    """Orient an (n-1)-subface of parent.

    The child must be parent with exactly one star replaced by a bit.  It is
    incoming when the replaced star (the i-th star of parent, counted left to
    right) was replaced by zeta(i), outgoing otherwise.
    """
    validate_code(parent)
    validate_code(child)
    if len(parent) != len(child):
        raise ValueError("parent and child have different lengths")
    replaced = None
    star_ordinal = 0
    for p, c in zip(parent, child):
        if p == "*":
            star_ordinal += 1
            if c != "*":
                if c not in "01" or replaced is not None:
                    raise ValueError(f"{child!r} is not a facet of {parent!r}")
                replaced = (star_ordinal, int(c))
        elif p != c:
            raise ValueError(f"{child!r} is not a facet of {parent!r}")
    if replaced is None:
        raise ValueError(f"{child!r} is not a facet of {parent!r}")
    i, bit = replaced
    return Orientation.INCOMING if bit == zeta(i) else Orientation.OUTGOING


def edge_roles(two_face: str) -> tuple[str, str, str, str]:
    """The four edges of a 2-face in role order (i1, i2, o1, o2).

    i1/i2 replace the first/second star by zeta(1)=0 / zeta(2)=1; o1/o2 are
    the complementary replacements.
    """
    validate_code(two_face)
    if dimension(two_face) != 2:
        raise ValueError(f"not a 2-face: {two_face!r}")
    p, q = star_positions(two_face)

    def put(pos: int, bit: int) -> str:
        return two_face[:pos] + str(bit) + two_face[pos + 1 :]

    return put(p, 0), put(q, 1), put(p, 1), put(q, 0)


def reverse_transform(code: str) -> str:
    """Coordinate reversal 1<->4, 2<->3 of a length-4 code."""
    validate_code(code)
    if len(code) != 4:
        raise ValueError("reverse transform is defined on length-4 codes")
    return code[::-1]


def subfaces(code: str, k: int) -> list[str]:
    """All k-dimensional subfaces of ``code``, lexicographic with 0 < 1 < *."""
    validate_code(code)
    d = dimension(code)
    if not 0 <= k <= d:
        raise ValueError(f"no {k}-subfaces of a {d}-face")
    stars = star_positions(code)
    out = []
    for keep in itertools.combinations(stars, k):
        fill = [p for p in stars if p not in keep]
        for bits in itertools.product("01", repeat=len(fill)):
            chars = list(code)
            for p, b in zip(fill, bits):
                chars[p] = b
            out.append("".join(chars))
    out.sort(key=lambda c: tuple(_LEX[ch] for ch in c))
    return out


def facets(code: str, orientation: Orientation) -> list[str]:
    """The (n-1)-subfaces of ``code`` with the given orientation, lexicographic."""
    d = dimension(code)
    return [f for f in subfaces(code, d - 1) if classify(code, f) is orientation]


@dataclass(frozen=True)
class EdgeChoiceTables:
    """Three chosen edges per 3-cube of the 4-cube, keyed by cube code.

    ``lte`` covers the incoming 3-cubes, ``rte`` the outgoing ones; key order
    follows the headers of the two tables.
    """

    lte: dict[str, tuple[str, str, str]]
    rte: dict[str, tuple[str, str, str]]

    def all_edges(self, side: str) -> list[str]:
        table = self.lte if side == "left" else self.rte
        return [e for col in table.values() for e in col]


DEFAULT_TABLES = EdgeChoiceTables(
    lte={
        "0***": ("01*0", "000*", "0*11"),
        "*1**": ("011*", "*100", "11*1"),
        "**0*": ("0*00", "110*", "*001"),
        "***1": ("00*1", "*111", "1*01"),
    },
    rte={
        "***0": ("1*00", "00*0", "*110"),
        "**1*": ("0*10", "111*", "*011"),
        "*0**": ("001*", "*000", "10*1"),
        "1***": ("100*", "1*11", "11*0"),
    },
)


def validate_tables(tables: EdgeChoiceTables = DEFAULT_TABLES) -> list[str]:
    """Structural checks on the edge-choice tables; returns a list of problems
    (empty when the tables are valid)."""
    problems = []
    if set(tables.lte) != set(facets("****", Orientation.INCOMING)):
        problems.append("lte keys are not the incoming 3-cubes of the 4-cube")
    if set(tables.rte) != set(facets("****", Orientation.OUTGOING)):
        problems.append("rte keys are not the outgoing 3-cubes of the 4-cube")
    for name, table in (("lte", tables.lte), ("rte", tables.rte)):
        for key, col in table.items():
            if len(col) != 3:
                problems.append(f"{name}[{key}] does not list 3 edges")
            for e in col:
                if dimension(e) != 1:
                    problems.append(f"{name}[{key}] entry {e} is not an edge")
                elif not contains(key, e):
                    problems.append(f"{name}[{key}] entry {e} is not in the cube")
    left = tables.all_edges("left")
    right = tables.all_edges("right")
    if len(set(left)) != 12:
        problems.append("lte edges are not pairwise distinct")
    if len(set(right)) != 12:
        problems.append("rte edges are not pairwise distinct")
    if set(left) & set(right):
        problems.append("lte and rte share an edge")
    return problems


def exchange_invariant_check(
    tables: EdgeChoiceTables = DEFAULT_TABLES,
) -> tuple[bool, dict]:
    """Check that coordinate reversal maps the 12 left edges onto the 12 right
    edges as a set.  Reversal redistributes edges across cubes, so the
    identity holds for the unions, not column by column."""
    images = {e: reverse_transform(e) for e in tables.all_edges("left")}
    ok = set(images.values()) == set(tables.all_edges("right"))
    report = {
        "edge_images": images,
        "left_reversed": sorted(images.values()),
        "right": sorted(tables.all_edges("right")),
        "header_images": {k: reverse_transform(k) for k in tables.lte},
    }
    return ok, report

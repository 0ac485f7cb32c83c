"""Pairing functions assembled from colorings, gates and merges.

Every construction returns a SymbolicFn and, where a premise is needed,
verifies it on an explicit box; a failed premise raises
ConstructionRefuted with the offending points.  The normalizing unary
maps required by the asymmetric constructions are built lazily over the
verification box, which is the only place they are ever consulted.
"""

from __future__ import annotations

from typing import Collection, Iterable

from .combinatorics import Coloring, IndependentFamily
from .symbolic import (
    Box,
    ConstructionRefuted,
    SymbolicFn,
    cantor_pairing,
    check_injective_on,
    delta_pairing,
)


class InvalidMergeError(ValueError):
    """The supplied merge violates a boundary identity on a checked point."""


def color_gated_pairing(
    colors: Collection[int],
    coloring: Coloring,
    pr: SymbolicFn | None = None,
    name: str | None = None,
) -> SymbolicFn:
    """Pairing gated by the color of the pair.

    Degenerate pairs (either coordinate zero, or equal coordinates) map to
    the maximum; otherwise the pair code passes through exactly when the
    pair's color belongs to the gate set, and is flattened to zero if not.
    """
    pr = pr or cantor_pairing()
    gate = frozenset(colors)
    if any(c < 0 or c >= coloring.mu for c in gate):
        raise ValueError(f"gate colors {sorted(gate)} outside 0..{coloring.mu - 1}")

    def fn(a: int, b: int) -> int:
        if a == 0 or b == 0 or a == b:
            return max(a, b)
        if coloring(a, b) in gate:
            return pr(a, b)
        return 0

    label = name or f"gate{{{','.join(str(c) for c in sorted(gate))}}}"
    return SymbolicFn(label, 2, fn)


def recovered_pairing(
    a_colors: Collection[int],
    b_colors: Collection[int],
    coloring: Coloring,
    pr: SymbolicFn | None = None,
) -> SymbolicFn:
    """Recover the pairing from two gates whose color sets cover everything.

    For distinct positive arguments one of three things happens: both gates
    pass the code (the outer gate sees a diagonal pair), only the first does
    (second coordinate zero), or only the second does (first coordinate
    zero); in each case the outer gate returns the code unchanged.
    """
    pr = pr or cantor_pairing()
    a_set, b_set = frozenset(a_colors), frozenset(b_colors)
    missing = set(range(coloring.mu)) - (a_set | b_set)
    if missing:
        raise ValueError(f"gate sets do not cover colors {sorted(missing)}")
    first = color_gated_pairing(a_set, coloring, pr)
    second = color_gated_pairing(b_set, coloring, pr)

    def fn(a: int, b: int) -> int:
        return first(first(a, b), second(a, b))

    return SymbolicFn("recovered_pair", 2, fn)


_LEFT_MARK = 1   # image of 0 under the left injection 4x+1
_RIGHT_MARK = 3  # image of 0 under the right injection 4x+3


def _left_inject(v: int) -> int:
    return 4 * v + 1


def _right_inject(v: int) -> int:
    return 4 * v + 3


def two_sided_pairing(
    merge: SymbolicFn,
    pr: SymbolicFn | None = None,
    check_box: Box | None = None,
) -> SymbolicFn:
    """Pairing from one lower-triangle pairing and a merge with marker ids.

    Both triangle halves are routed through injections with disjoint odd
    ranges (4v+1 and 4v+3), so the merge only needs to return its non-marker
    argument; the two halves then land in distinct residue classes mod 4.
    """
    pr = pr or cantor_pairing()
    below = delta_pairing(pr)

    if check_box is not None:
        # the all-markers cell merge(left 0, right 0) is deliberately free:
        # it only shapes the constant diagonal value
        for x, y in check_box.pairs():
            v = below(x, y)
            if v == 0:
                continue
            if merge(_left_inject(v), _RIGHT_MARK) != _left_inject(v):
                raise InvalidMergeError(
                    f"merge({_left_inject(v)}, {_RIGHT_MARK}) != {_left_inject(v)}"
                )
            if merge(_LEFT_MARK, _right_inject(v)) != _right_inject(v):
                raise InvalidMergeError(
                    f"merge({_LEFT_MARK}, {_right_inject(v)}) != {_right_inject(v)}"
                )

    def fn(x: int, y: int) -> int:
        return merge(_left_inject(below(x, y)), _right_inject(below(y, x)))

    return SymbolicFn("two_sided_pair", 2, fn)


def marked_merge() -> SymbolicFn:
    """Merge matching the two_sided_pairing markers: returns its first
    argument when the second is the right marker, its second when the first
    is the left marker, 0 otherwise."""

    def fn(a: int, b: int) -> int:
        if b == _RIGHT_MARK:
            return a
        if a == _LEFT_MARK:
            return b
        return 0

    return SymbolicFn("marked_merge", 2, fn)


def nested_pairing(f: SymbolicFn, box: Box) -> SymbolicFn:
    """Pairing (x, y) -> F(x, F(x, y)) from a symmetric F injective below the
    diagonal.

    When F does not already dominate max it is lifted by a unary shift built
    over the box (values seen on the box go above the box, everything else
    higher still, injectively), which preserves symmetry and injectivity.
    The composite is then verified injective on the box's off-diagonal part;
    any collision refutes the construction.
    """
    square = Box(box.lo, box.hi, "full")
    for x, y in square.pairs():
        if f(x, y) != f(y, x):
            raise ConstructionRefuted("argument not symmetric", ((x, y), (y, x)))
    collision = check_injective_on(f, box.with_region("delta"))
    if collision is not None:
        raise ConstructionRefuted("argument not injective below the diagonal", collision)

    needs_shift = any(f(x, y) <= max(x, y) for x, y in square.pairs())
    if needs_shift:
        seen = sorted({f(x, y) for x, y in square.pairs()})
        ranks = {v: i for i, v in enumerate(seen)}
        base = box.hi

        def shift(v: int) -> int:
            if v in ranks:
                return base + ranks[v]
            return base + len(ranks) + v

        g = SymbolicFn(f"{f.name}_lifted", 2, lambda x, y: shift(f(x, y)))
    else:
        g = f

    def fn(x: int, y: int) -> int:
        return g(x, g(x, y))

    out = SymbolicFn("nested_pair", 2, fn)
    collision = check_injective_on(out, box.with_region("offdiag"))
    if collision is not None:
        raise ConstructionRefuted("composite not injective off the diagonal", collision)
    return out


def split_merge_pairing(f: SymbolicFn, merge: SymbolicFn, box: Box) -> SymbolicFn:
    """Pairing (x, y) -> merge(F x y, F y x + 1) from an F whose two triangle
    images are disjoint with the upper one injective.

    F is normalized over the box by a unary map sending below-diagonal
    values to 0 and above-diagonal values to distinct positive evens; the
    merge identities then route the surviving half through unchanged, and
    the two halves end up with opposite parities.
    """
    below_vals = {f(x, y) for x, y in box.with_region("delta").pairs()}
    above_vals = {f(x, y) for x, y in box.with_region("nabla").pairs()}
    overlap = below_vals & above_vals
    if overlap:
        raise ConstructionRefuted(
            "triangle images are not disjoint", sorted(overlap)[:4]
        )
    collision = check_injective_on(f, box.with_region("nabla"))
    if collision is not None:
        raise ConstructionRefuted("argument not injective above the diagonal", collision)

    evens = {v: 2 * (i + 1) for i, v in enumerate(sorted(above_vals))}
    spare = 2 * len(above_vals) + 1

    def normalize(v: int) -> int:
        if v in below_vals:
            return 0
        if v in evens:
            return evens[v]
        return spare + 2 * v  # odd, so it never shadows a normalized even

    g = SymbolicFn(f"{f.name}_norm", 2, lambda x, y: normalize(f(x, y)))

    for e in evens.values():
        if merge(e, 1) != e:
            raise InvalidMergeError(f"merge({e}, 1) != {e}")
        if merge(0, e + 1) != e + 1:
            raise InvalidMergeError(f"merge(0, {e + 1}) != {e + 1}")

    def fn(x: int, y: int) -> int:
        return merge(g(x, y), g(y, x) + 1)

    out = SymbolicFn("split_merge_pair", 2, fn)
    collision = check_injective_on(out, box.with_region("offdiag"))
    if collision is not None:
        raise ConstructionRefuted("composite not injective off the diagonal", collision)
    return out


def family_generators(
    family: IndependentFamily,
    included: Iterable[int],
    coloring: Coloring,
    pr: SymbolicFn | None = None,
) -> list[SymbolicFn]:
    """One gated pairing per family index: the set itself for included
    indices, its complement otherwise."""
    pr = pr or cantor_pairing()
    size = len(family.base)
    if coloring.mu != size:
        raise ValueError(f"coloring has {coloring.mu} colors, family base has {size}")
    chosen = set(included)
    out = []
    for i, positions in enumerate(family.sets):
        colors = positions if i in chosen else frozenset(range(size)) - positions
        tag = "+" if i in chosen else "-"
        out.append(color_gated_pairing(colors, coloring, pr, name=f"gate{tag}{i}"))
    return out

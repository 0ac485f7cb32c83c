"""Box-scale almost-unary analysis.

Almost-unary means the values are confined to a small set determined by a
single coordinate.  On a box the notion is necessarily three-valued: a
witness can be verified or refuted on the box, and without a witness only
a fiber census relative to a declared slack function is possible, so the
verdicts are labeled box-relative throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .symbolic import AlmostUnaryWitness, Box, SpreadWitness, SymbolicFn


@dataclass(frozen=True)
class AlmostUnaryReport:
    kind: str  # witness-verified | witness-refuted | almost-unary-on-box | not-almost-unary-on-box
    coordinate: int | None = None
    violation: tuple[int, ...] | None = None
    profiles: dict[int, dict[int, int]] | None = None  # coordinate -> fixed value -> fiber size


def _box_tuples(box: Box, arity: int):
    return itertools.product(box.points(), repeat=arity)


def almost_unary_check(
    f: SymbolicFn,
    box: Box,
    witness: AlmostUnaryWitness | None = None,
    slack: Callable[[int], int] | None = None,
) -> AlmostUnaryReport:
    """Check confinement of f's values to one coordinate's allowed sets.

    With a witness, every box tuple is tested against the witness's allowed
    set; the first violating tuple refutes it.  Without one, the census
    computes each coordinate's fiber sizes and accepts when some
    coordinate's fibers all stay within slack of the fixed value (default
    slack a -> a + 1, the identity ordinal bound).
    """
    witness = witness if witness is not None else f.witness
    if witness is not None:
        cache: dict[int, frozenset[int]] = {}
        for args in _box_tuples(box, f.arity):
            key = args[witness.coordinate - 1]
            if key not in cache:
                cache[key] = frozenset(witness.allowed(key))
            if f(*args) not in cache[key]:
                return AlmostUnaryReport("witness-refuted", witness.coordinate, args)
        return AlmostUnaryReport("witness-verified", witness.coordinate)

    slack = slack or (lambda a: a + 1)
    fibers: dict[int, dict[int, set[int]]] = {
        k: {a: set() for a in box.points()} for k in range(1, f.arity + 1)
    }
    for args in _box_tuples(box, f.arity):
        v = f(*args)
        for k in range(1, f.arity + 1):
            fibers[k][args[k - 1]].add(v)
    profiles = {
        k: {a: len(vals) for a, vals in per.items()} for k, per in fibers.items()
    }
    for k in range(1, f.arity + 1):
        if all(size <= slack(a) for a, size in profiles[k].items()):
            return AlmostUnaryReport("almost-unary-on-box", k, profiles=profiles)
    return AlmostUnaryReport("not-almost-unary-on-box", profiles=profiles)


def depends_heavily(f: SymbolicFn, coordinate: int, box: Box) -> bool:
    """Some fixing of the other coordinates gives a full-width value fiber.

    Full width is the box surrogate for a fiber as large as the whole
    space, and the fixed values range over the lower half of the box only:
    a coordinate pinned near the box top can fill a fiber by window
    accident even when its true fibers are small.
    """
    if not 1 <= coordinate <= f.arity:
        raise ValueError(f"coordinate {coordinate} out of range 1..{f.arity}")
    others = [k for k in range(f.arity) if k != coordinate - 1]
    interior = range(box.lo, box.lo + box.width // 2)
    for rest in itertools.product(interior, repeat=len(others)):
        values = set()
        for x in box.points():
            args = [0] * f.arity
            args[coordinate - 1] = x
            for pos, val in zip(others, rest):
                args[pos] = val
            values.add(f(*args))
        if len(values) == box.width:
            return True
    return False


@dataclass(frozen=True)
class SpreadSupportReport:
    supports: frozenset[frozenset[int]]
    pairwise_intersecting: bool
    threshold: int


def spread_supports(g: SymbolicFn, box: Box, threshold: int) -> SpreadSupportReport:
    """Coordinate subsets able to spread g over at least `threshold` values.

    A subset s qualifies when some assignment of the complementary
    coordinates makes g take >= threshold distinct values as the s-part
    ranges over the box.  Complement assignments range over the lower half
    of the box only: a fixed value near the box top can drag a fiber to
    full width by accident of the window, which is exactly the boundary
    artifact the half rule suppresses.
    """
    if threshold > box.width:
        raise ValueError("threshold above the box width")
    n = g.arity
    interior = range(box.lo, box.lo + box.width // 2)
    supports = set()
    for r in range(0, n + 1):
        for subset in itertools.combinations(range(1, n + 1), r):
            varying = [k - 1 for k in subset]
            fixed = [k for k in range(n) if k not in varying]
            best = 0
            for rest in itertools.product(interior, repeat=len(fixed)) if fixed else [()]:
                values = set()
                for xs in itertools.product(box.points(), repeat=len(varying)):
                    args = [0] * n
                    for pos, val in zip(fixed, rest):
                        args[pos] = val
                    for pos, val in zip(varying, xs):
                        args[pos] = val
                    values.add(g(*args))
                best = max(best, len(values))
                if best >= threshold:
                    break
            if best >= threshold:
                supports.add(frozenset(subset))
    intersecting = all(a & b for a in supports for b in supports)
    return SpreadSupportReport(frozenset(supports), intersecting, threshold)


@dataclass(frozen=True)
class SpreadVerdict:
    kind: str  # verified | refuted | bound-refuted
    witness_tuple: tuple[int, ...] | None = None
    witness_point: int | None = None


def witnessed_spread_check(f: SymbolicFn, w: SpreadWitness, box: Box) -> SpreadVerdict:
    """Check the per-point cover f(x̄) ∈ map(x_1) ∪ ... ∪ map(x_n) on the box.

    A uniformly bounded witness additionally requires every per-point set
    to stay strictly below the bound.
    """
    if w.uniform_bound is not None:
        for x in box.points():
            if len(set(w.per_point(x))) >= w.uniform_bound:
                return SpreadVerdict("bound-refuted", witness_point=x)
    cache: dict[int, frozenset[int]] = {}

    def allowed(x: int) -> frozenset[int]:
        if x not in cache:
            cache[x] = frozenset(w.per_point(x))
        return cache[x]

    for args in _box_tuples(box, f.arity):
        v = f(*args)
        if not any(v in allowed(x) for x in args):
            return SpreadVerdict("refuted", witness_tuple=args)
    return SpreadVerdict("verified")


def compose_unary_witness(u: SymbolicFn, w: AlmostUnaryWitness) -> AlmostUnaryWitness:
    """Witness for u∘f given a witness for f: push the allowed sets through u."""
    if u.arity != 1:
        raise ValueError("outer operation must be unary")
    return AlmostUnaryWitness(
        w.coordinate, lambda x, _w=w: frozenset(u(v) for v in _w.allowed(x))
    )


def median_witness(parts: Sequence[AlmostUnaryWitness]) -> AlmostUnaryWitness:
    """Witness for the median of three witnessed binary operations.

    The median of three values is one of them and, once two of the three
    are trapped under bounds driven by the same coordinate, it never
    exceeds the larger of those bounds; the pigeonhole coordinate shared by
    at least two witnesses therefore confines the composite.
    """
    if len(parts) != 3:
        raise ValueError("median takes exactly three argument witnesses")
    coords = [w.coordinate for w in parts]
    shared = min(c for c in coords if coords.count(c) >= 2)
    trapped = [w for w in parts if w.coordinate == shared]

    def allowed(x: int) -> range:
        bound = max(max(w.allowed(x), default=0) for w in trapped)
        return range(0, bound + 1)

    return AlmostUnaryWitness(shared, allowed)

"""Order patterns of quadruples and canonicity analysis of binary maps.

A binary map is canonical on a sample when the comparison of its values on
two argument pairs depends only on the order pattern of the combined
quadruple.  The large canonical subsets that exist in principle are far
beyond finite reach, so canonical_subset performs a greedy scan with no
largeness guarantee and reports the selection ratio instead.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .symbolic import Box, SymbolicFn
from .terms import Registry, Term, eval_term, subterms


def _sign(d: int) -> int:
    return (d > 0) - (d < 0)


_PAIRS = tuple(itertools.combinations(range(4), 2))


@dataclass(frozen=True)
class OrderPattern:
    """Complete comparison profile of an admissible quadruple.

    Admissible means the first two and last two entries are distinct, so
    both halves are valid off-diagonal argument pairs.
    """

    profile: tuple[int, ...]  # sign of a_i - a_j over the six index pairs

    def __post_init__(self):
        if len(self.profile) != len(_PAIRS):
            raise ValueError("profile must cover all six index pairs")


def tuple_pattern(quad: Sequence[int]) -> OrderPattern:
    if len(quad) != 4:
        raise ValueError("need exactly four entries")
    if quad[0] == quad[1] or quad[2] == quad[3]:
        raise ValueError(f"inadmissible quadruple {tuple(quad)}")
    return OrderPattern(tuple(_sign(quad[i] - quad[j]) for i, j in _PAIRS))


def similar(a: Sequence[int], b: Sequence[int]) -> bool:
    return tuple_pattern(a) == tuple_pattern(b)


def admissible_patterns() -> frozenset[OrderPattern]:
    """All realizable admissible patterns (four values always suffice)."""
    out = set()
    for quad in itertools.product(range(4), repeat=4):
        if quad[0] != quad[1] and quad[2] != quad[3]:
            out.add(tuple_pattern(quad))
    return frozenset(out)


def _admissible_quads(sample: Sequence[int]):
    for quad in itertools.product(sample, repeat=4):
        if quad[0] != quad[1] and quad[2] != quad[3]:
            yield quad


def is_canonical(f: SymbolicFn, sample: Sequence[int]):
    """None when f is canonical on the sample; otherwise the first pair of
    similar quadruples with differently ordered values."""
    sample = sorted(set(sample))
    buckets: dict[OrderPattern, tuple[int, tuple[int, ...]]] = {}
    for quad in _admissible_quads(sample):
        pattern = tuple_pattern(quad)
        outcome = _sign(f(quad[0], quad[1]) - f(quad[2], quad[3]))
        if pattern in buckets:
            prior_outcome, prior_quad = buckets[pattern]
            if prior_outcome != outcome:
                return (prior_quad, quad)
        else:
            buckets[pattern] = (outcome, quad)
    return None


@dataclass(frozen=True)
class CanonicalSubsetReport:
    selected: tuple[int, ...]
    box: Box
    ratio: float


def canonical_subset(f: SymbolicFn, box: Box) -> CanonicalSubsetReport:
    """Greedy increasing scan keeping points that cause no pattern clash.

    The result always passes is_canonical and is never empty; no claim is
    made about its size, which is why the ratio is reported.
    """
    selected: list[int] = []
    buckets: dict[OrderPattern, tuple[int, tuple[int, ...]]] = {}
    for p in box.points():
        trial = selected + [p]
        additions: dict[OrderPattern, tuple[int, tuple[int, ...]]] = {}
        ok = True
        for quad in _admissible_quads(trial):
            if p not in quad:
                continue
            pattern = tuple_pattern(quad)
            outcome = _sign(f(quad[0], quad[1]) - f(quad[2], quad[3]))
            prior = buckets.get(pattern) or additions.get(pattern)
            if prior is None:
                additions[pattern] = (outcome, quad)
            elif prior[0] != outcome:
                ok = False
                break
        if ok:
            selected.append(p)
            buckets.update(additions)
    return CanonicalSubsetReport(tuple(selected), box, len(selected) / box.width)


class NotCanonicalError(ValueError):
    def __init__(self, witness):
        super().__init__(f"map is not canonical on the sample: {witness}")
        self.witness = witness


INJECTIVE = "injective"
FIRST_COORDINATE = "first-coordinate"
SECOND_COORDINATE = "second-coordinate"
CONSTANT = "constant"


@dataclass(frozen=True)
class RegionClassification:
    kind: str
    region: str
    witness_map: tuple[tuple[int, int], ...] | None = None  # 1-1 coordinate map
    value: int | None = None                                # constant value
    degenerate: bool = False

    def predicts(self, f: SymbolicFn, pairs: Iterable[tuple[int, int]]) -> bool:
        lookup = dict(self.witness_map or ())
        for a, b in pairs:
            v = f(a, b)
            if self.kind == CONSTANT:
                if self.value is not None and v != self.value:
                    return False
            elif self.kind == FIRST_COORDINATE:
                if lookup[a] != v:
                    return False
            elif self.kind == SECOND_COORDINATE:
                if lookup[b] != v:
                    return False
        return True


def _region_pairs(sample: Sequence[int], region: str) -> list[tuple[int, int]]:
    if region == "delta":
        return [(a, b) for a in sample for b in sample if a > b]
    if region == "nabla":
        return [(a, b) for a in sample for b in sample if a < b]
    raise ValueError("region must be delta or nabla")


def classify_on_region(f: SymbolicFn, region: str, sample: Sequence[int]) -> RegionClassification:
    """Sort a canonical map's restriction into exactly one of four shapes.

    Requires canonicity on the sample (checked; a violation raises).  With
    fewer than three region pairs the sample cannot separate the shapes and
    the verdict is a degenerate constant.
    """
    sample = sorted(set(sample))
    violation = is_canonical(f, sample)
    if violation is not None:
        raise NotCanonicalError(violation)
    pairs = _region_pairs(sample, region)
    if len(pairs) < 3:
        value = f(*pairs[0]) if pairs else None
        return RegionClassification(CONSTANT, region, value=value, degenerate=True)
    values = {p: f(*p) for p in pairs}

    if len(set(values.values())) == 1:
        return RegionClassification(
            CONSTANT, region, value=next(iter(values.values()))
        )

    def coordinate_map(index: int):
        fibers: dict[int, set[int]] = {}
        for p, v in values.items():
            fibers.setdefault(p[index], set()).add(v)
        if all(len(vs) == 1 for vs in fibers.values()):
            mapping = {a: next(iter(vs)) for a, vs in fibers.items()}
            if len(set(mapping.values())) == len(mapping):
                return tuple(sorted(mapping.items()))
        return None

    first = coordinate_map(0)
    if first is not None:
        return RegionClassification(FIRST_COORDINATE, region, witness_map=first)
    second = coordinate_map(1)
    if second is not None:
        return RegionClassification(SECOND_COORDINATE, region, witness_map=second)
    if len(set(values.values())) == len(values):
        return RegionClassification(INJECTIVE, region)
    raise ValueError(
        "canonical on the sample but matching no shape; enlarge the sample"
    )


SYMMETRIC = "symmetric"
DISJOINT_RANGES = "disjoint-ranges"
NEITHER_PRECONDITION = "neither-precondition"
OVERLAP = "overlap"


@dataclass(frozen=True)
class RegionInteraction:
    verdict: str
    witness: tuple | None = None


def region_interaction(f: SymbolicFn, box: Box) -> RegionInteraction:
    """How the two triangle restrictions relate on the box.

    Requires one of them injective (else neither-precondition).  For a
    canonical map the remaining outcomes are symmetry or disjoint value
    ranges; the overlap verdict can only appear on non-canonical input and
    carries a witness value.
    """
    from .symbolic import check_injective_on

    inj_delta = check_injective_on(f, box.with_region("delta")) is None
    inj_nabla = check_injective_on(f, box.with_region("nabla")) is None
    if not (inj_delta or inj_nabla):
        return RegionInteraction(NEITHER_PRECONDITION)
    asym = next(
        ((a, b) for a, b in box.with_region("nabla").pairs() if f(a, b) != f(b, a)),
        None,
    )
    if asym is None:
        return RegionInteraction(SYMMETRIC)
    delta_vals = {f(a, b) for a, b in box.with_region("delta").pairs()}
    nabla_vals = {f(a, b) for a, b in box.with_region("nabla").pairs()}
    shared = delta_vals & nabla_vals
    if not shared:
        return RegionInteraction(DISJOINT_RANGES, witness=asym)
    return RegionInteraction(OVERLAP, witness=(min(shared),))


@dataclass(frozen=True)
class RegionFactorReport:
    factors: bool
    side: str | None = None  # "x" | "y"
    x_violation: tuple | None = None  # two region pairs sharing the first coord
    y_violation: tuple | None = None


def unary_on_region(
    t: Term, box: Box, region: str, registry: Registry
) -> RegionFactorReport:
    """Whether the term's restriction to a triangle factors through one
    coordinate; ties prefer the x side."""
    pairs = list(box.with_region(region).pairs())
    values = {p: eval_term(t, p[0], p[1], registry) for p in pairs}

    def violation(index: int):
        rep: dict[int, tuple[tuple[int, int], int]] = {}
        for p, v in values.items():
            key = p[index]
            if key in rep and rep[key][1] != v:
                return (rep[key][0], p)
            rep.setdefault(key, (p, v))
        return None

    x_bad = violation(0)
    if x_bad is None:
        return RegionFactorReport(True, side="x")
    y_bad = violation(1)
    if y_bad is None:
        return RegionFactorReport(True, side="y")
    return RegionFactorReport(False, x_violation=x_bad, y_violation=y_bad)


@dataclass(frozen=True)
class HeavySubtermReport:
    path: tuple[int, ...]
    term: Term
    failed_regions: tuple[str, ...]


def minimal_heavy_subterm(
    t: Term, box: Box, registry: Registry
) -> HeavySubtermReport | None:
    """Smallest subterm not factoring through a coordinate on both triangles.

    Subterms are visited by increasing size with post-order ties; None means
    every subterm is one-sided on both regions.
    """
    ordered = sorted(
        ((s.size(), i, path, s) for i, (path, s) in enumerate(subterms(t))),
        key=lambda item: (item[0], item[1]),
    )
    for _, _, path, s in ordered:
        failed = tuple(
            region
            for region in ("delta", "nabla")
            if not unary_on_region(s, box, region, registry).factors
        )
        if failed:
            return HeavySubtermReport(path, s, failed)
    return None


def classification_json(
    name: str, classification: RegionClassification, sample_size: int
) -> str:
    """Stable JSON record for a region classification."""
    record = {
        "function": name,
        "region": classification.region,
        "verdict": classification.kind,
        "witness": (
            list(classification.witness_map)
            if classification.witness_map is not None
            else classification.value
        ),
        "sample-size": sample_size,
        "degenerate": classification.degenerate,
    }
    return json.dumps(record, indent=2)

"""Operation tables on finite carriers and bounded clone computations.

Everything here is exhaustive and exact: operations are explicit value
tables, relations are explicit tuple sets, and clone closures are computed
arity slice by arity slice.  The n-ary slice of the clone generated by a
set G is exactly the set of tables reachable from the n projection tables
by pointwise application of members of G, so no intermediate of arity
above the requested cap is ever materialized.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np


class ResourceLimitError(RuntimeError):
    """Requested computation exceeds the configured enumeration budget."""


@dataclass(frozen=True, order=True)
class Carrier:
    """A finite carrier; elements are 0..size-1."""

    size: int

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"carrier size must be >= 2, got {self.size}")

    def elements(self) -> range:
        return range(self.size)

    def tuples(self, arity: int) -> Iterator[tuple[int, ...]]:
        """All arity-tuples in lexicographic order, leftmost most significant."""
        return itertools.product(range(self.size), repeat=arity)


@dataclass(frozen=True)
class OpTable:
    """A total finitary operation stored as an explicit value table.

    The table lists values in lexicographic tuple order with the leftmost
    argument most significant: the entry for (x1,..,xn) sits at index
    sum(x_i * k^(n-1-i)).
    """

    carrier: Carrier
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        k = self.carrier.size
        if self.arity < 1:
            raise ValueError(f"arity must be >= 1, got {self.arity}")
        if len(self.table) != k**self.arity:
            raise ValueError(
                f"table length {len(self.table)} != {k}^{self.arity}"
            )
        if any(v < 0 or v >= k for v in self.table):
            raise ValueError("table entry outside carrier")

    @classmethod
    def from_fn(cls, carrier: Carrier, arity: int, fn: Callable[..., int]) -> "OpTable":
        return cls(carrier, arity, tuple(fn(*t) for t in carrier.tuples(arity)))

    def index(self, args: Sequence[int]) -> int:
        k = self.carrier.size
        idx = 0
        for a in args:
            idx = idx * k + a
        return idx

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        return self.table[self.index(args)]

    def sort_key(self) -> tuple:
        return (self.arity, self.table)


def make_projection(arity: int, coordinate: int, carrier: Carrier) -> OpTable:
    """The arity-ary operation returning its coordinate-th argument (1-based)."""
    if not 1 <= coordinate <= arity:
        raise ValueError(f"coordinate {coordinate} out of range 1..{arity}")
    return OpTable.from_fn(carrier, arity, lambda *t: t[coordinate - 1])


def compose(g: OpTable, fs: Sequence[OpTable]) -> OpTable:
    """Pointwise composition g(f_1(x̄), ..., f_m(x̄)).

    All inner operations must share a carrier and arity; g's arity must
    equal the number of inner operations.
    """
    if len(fs) != g.arity:
        raise ValueError(f"g has arity {g.arity} but got {len(fs)} inner operations")
    if not fs:
        raise ValueError("composition needs at least one inner operation")
    carrier, inner_arity = fs[0].carrier, fs[0].arity
    if g.carrier != carrier or any(f.carrier != carrier or f.arity != inner_arity for f in fs):
        raise ValueError("carrier or arity mismatch among composition operands")
    table = tuple(
        g.table[g.index([f.table[i] for f in fs])]
        for i in range(carrier.size**inner_arity)
    )
    return OpTable(carrier, inner_arity, table)


def all_op_tables(carrier: Carrier, arity: int) -> Iterator[OpTable]:
    """Every operation of the given arity, in table-lexicographic order."""
    size = carrier.size**arity
    for values in itertools.product(range(carrier.size), repeat=size):
        yield OpTable(carrier, arity, values)


def op_space_size(carrier: Carrier, arity: int) -> int:
    return carrier.size ** (carrier.size**arity)


@dataclass(frozen=True)
class RelationTable:
    """A finitary relation: a set of fixed-width tuples over the carrier."""

    carrier: Carrier
    width: int
    tuples: frozenset[tuple[int, ...]]

    def __post_init__(self):
        for t in self.tuples:
            if len(t) != self.width:
                raise ValueError(f"tuple {t} has width {len(t)} != {self.width}")
            if any(v < 0 or v >= self.carrier.size for v in t):
                raise ValueError(f"tuple {t} has entries outside the carrier")

    @classmethod
    def unary(cls, carrier: Carrier, members: Iterable[int]) -> "RelationTable":
        return cls(carrier, 1, frozenset((m,) for m in members))

    @classmethod
    def full(cls, carrier: Carrier, width: int) -> "RelationTable":
        return cls(carrier, width, frozenset(carrier.tuples(width)))

    @classmethod
    def from_op_tables(cls, ops: Iterable[OpTable]) -> "RelationTable":
        """Encode a set of same-arity operations as a relation over X^(k^n).

        Each operation contributes its value table as one tuple, so an
        operation respects the result exactly when composing it with members
        of the encoded set stays inside the set.
        """
        ops = list(ops)
        if not ops:
            raise ValueError("need at least one operation to encode")
        carrier, arity = ops[0].carrier, ops[0].arity
        if any(o.carrier != carrier or o.arity != arity for o in ops):
            raise ValueError("operations must share carrier and arity")
        return cls(carrier, carrier.size**arity, frozenset(o.table for o in ops))


def respects(f: OpTable, relation: RelationTable) -> bool:
    """Whether f maps tuples of the relation coordinatewise into the relation."""
    if f.carrier != relation.carrier:
        raise ValueError("carrier mismatch between operation and relation")
    rows = sorted(relation.tuples)
    for choice in itertools.product(rows, repeat=f.arity):
        image = tuple(f(*(row[i] for row in choice)) for i in range(relation.width))
        if image not in relation.tuples:
            return False
    return True


@dataclass(frozen=True)
class OpSet:
    """A deduplicated set of operations of arity <= arity_cap on one carrier."""

    carrier: Carrier
    arity_cap: int
    ops: frozenset[OpTable]

    def __post_init__(self):
        for op in self.ops:
            if op.carrier != self.carrier:
                raise ValueError("operation on a different carrier")
            if op.arity > self.arity_cap:
                raise ValueError("operation arity above the cap")

    def slice(self, arity: int) -> tuple[OpTable, ...]:
        return tuple(sorted((o for o in self.ops if o.arity == arity),
                            key=OpTable.sort_key))

    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {n: 0 for n in range(1, self.arity_cap + 1)}
        for o in self.ops:
            out[o.arity] += 1
        return out

    def signature(self) -> tuple:
        """Canonical identity of the bounded slice set (for clone comparison)."""
        return tuple(sorted((o.arity, o.table) for o in self.ops))

    def __contains__(self, op: OpTable) -> bool:
        return op in self.ops

    def __iter__(self):
        return iter(sorted(self.ops, key=OpTable.sort_key))

    def __len__(self) -> int:
        return len(self.ops)

    def __le__(self, other: "OpSet") -> bool:
        return self.ops <= other.ops


def pol(relation: RelationTable, arity_cap: int, *, max_candidates: int = 1 << 21) -> OpSet:
    """All operations of arity <= arity_cap that respect the relation."""
    if arity_cap < 1:
        raise ValueError("arity_cap must be >= 1")
    total = sum(op_space_size(relation.carrier, n) for n in range(1, arity_cap + 1))
    if total > max_candidates:
        raise ResourceLimitError(
            f"{total} candidate operations exceed the budget {max_candidates}"
        )
    keep = [
        f
        for n in range(1, arity_cap + 1)
        for f in all_op_tables(relation.carrier, n)
        if respects(f, relation)
    ]
    return OpSet(relation.carrier, arity_cap, frozenset(keep))


# ---------------------------------------------------------------------------
# Bounded clone closure.
#
# Slice generation works on numpy value tables.  Tables of arity n are rows
# of length k^n; applying a generator g of arity m to m rows is one fancy
# indexing pass.  Generators are introduced one at a time and skipped when
# they are already members of the clone generated so far (a generator that
# is already a term function adds nothing).

_BITMAP_LIMIT = 1 << 24


class _SliceState:
    """Dedup + storage for one arity slice during closure generation."""

    def __init__(self, k: int, width: int):
        self.k = k
        self.width = width
        self.space = k**width  # python int; may be astronomically large
        self.pow = (k ** np.arange(width - 1, -1, -1, dtype=np.int64)
                    if self.space < (1 << 62) else None)
        self.bitmap = (np.zeros(self.space, dtype=bool)
                       if self.space <= _BITMAP_LIMIT else None)
        self.codes: set[int] | None = None if self.bitmap is not None else set()
        self.rows = np.zeros((0, width), dtype=np.int8)
        self.count = 0

    def encode(self, rows: np.ndarray) -> np.ndarray | None:
        if self.pow is None:
            return None
        return rows.astype(np.int64) @ self.pow

    def add(self, rows: np.ndarray) -> np.ndarray:
        """Insert rows, returning the block of genuinely new ones."""
        if rows.size == 0:
            return rows.reshape(0, self.width)
        codes = self.encode(rows)
        if codes is None:
            # fallback for table spaces beyond int64 packing
            fresh_idx = []
            seen = self.codes
            assert seen is not None
            for i, row in enumerate(rows):
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    fresh_idx.append(i)
            fresh = rows[fresh_idx]
        elif self.bitmap is not None:
            novel = ~self.bitmap[codes]
            codes = codes[novel]
            rows = rows[novel]
            codes, first = np.unique(codes, return_index=True)
            fresh = rows[np.sort(first)]
            self.bitmap[self.encode(fresh)] = True
        else:
            assert self.codes is not None
            fresh_idx = []
            for i, c in enumerate(codes.tolist()):
                if c not in self.codes:
                    self.codes.add(c)
                    fresh_idx.append(i)
            fresh = rows[fresh_idx]
        if len(fresh):
            self.rows = np.concatenate([self.rows, fresh.astype(np.int8)])
            self.count += len(fresh)
        return fresh

    def contains_row(self, row: np.ndarray) -> bool:
        code = self.encode(row.reshape(1, -1))
        if code is None:
            assert self.codes is not None
            return row.tobytes() in self.codes
        if self.bitmap is not None:
            return bool(self.bitmap[code[0]])
        assert self.codes is not None
        return int(code[0]) in self.codes

    @property
    def full(self) -> bool:
        return self.count == self.space


def _apply_unary(lut: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return lut[rows]


def _apply_pointwise(lut: np.ndarray, k: int, operands: list[np.ndarray],
                     chunk_cells: int = 4_000_000) -> Iterator[np.ndarray]:
    """Yield lut[g-index of operand tuples] over the product of operand blocks.

    operands is a list of m row-blocks; the product block_1 x ... x block_m is
    traversed in chunks small enough to keep peak memory bounded.
    """
    m = len(operands)
    if m == 1:
        yield lut[operands[0]]
        return
    sizes = [len(b) for b in operands]
    if any(s == 0 for s in sizes):
        return
    width = operands[0].shape[1]
    tail_cells = width
    for s in sizes[1:]:
        tail_cells *= s
    step = max(1, chunk_cells // max(tail_cells, 1))
    first = operands[0]
    for start in range(0, sizes[0], step):
        block = first[start:start + step].astype(np.int32)
        idx = block[:, None, :] * k + operands[1][None, :, :]
        idx = idx.reshape(-1, width)
        for extra in operands[2:]:
            idx = (idx[:, None, :] * k + extra[None, :, :]).reshape(-1, width)
        yield lut[idx]


def _generator_key(g: OpTable) -> tuple:
    return (g.arity, g.table)


def _cylinder_row(g: OpTable, tuple_prefix: np.ndarray) -> np.ndarray:
    """Table of g(x_1..x_m) read as an n-ary operation (m <= n)."""
    k = g.carrier.size
    lut = np.asarray(g.table, dtype=np.int8)
    idx = np.zeros(len(tuple_prefix), dtype=np.int64)
    for j in range(g.arity):
        idx = idx * k + tuple_prefix[:, j]
    return lut[idx].astype(np.int8)


_CODE_LIMIT = 1 << 20
_BLOCK = 1024


def _digits(codes: np.ndarray, k: int, width: int) -> np.ndarray:
    out = np.empty((len(codes), width), dtype=np.int8)
    rest = codes.astype(np.int64)
    for j in range(width - 1, -1, -1):
        out[:, j] = rest % k
        rest //= k
    return out


class _CodeEngine:
    """Closure of one slice over packed table codes.

    Each table is a single base-k integer; binary generators act through a
    pair of half-table lookup matrices (high and low digit halves), so one
    composed pair costs a couple of gathers instead of a digit loop.  Every
    active generator keeps a cursor into the pool and processes blocks
    against everything before them, which guarantees each operand tuple is
    seen once while letting freshly found tables circulate quickly.

    stop_codes are tables certified elsewhere to generate the full slice on
    their own; the moment one appears the closure is provably full and the
    run stops.
    """

    def __init__(self, k: int, arity: int, stop_if_full: bool,
                 max_tables: int | None, stop_codes: np.ndarray | None = None):
        self.k = k
        self.width = k**arity
        self.space = k**self.width
        self.stop_if_full = stop_if_full
        self.max_tables = max_tables
        self.stop_codes = stop_codes
        self.certified = False
        self.lo_w = self.width // 2
        self.hi_w = self.width - self.lo_w
        self.lo_space = k**self.lo_w
        self.bitmap = np.zeros(self.space, dtype=bool)
        self.pool = np.empty(self.space, dtype=np.int32)
        self.count = 0
        self.pow_full = k ** np.arange(self.width - 1, -1, -1, dtype=np.int64)
        self.appliers: list = []   # (arity, payload)
        self.cursors: list[int] = []

    # -- storage ------------------------------------------------------------

    def add(self, codes: np.ndarray) -> int:
        if codes.size == 0:
            return 0
        novel = codes[~self.bitmap[codes]]
        if novel.size == 0:
            return 0
        fresh = np.unique(novel)
        self.bitmap[fresh] = True
        self.pool[self.count : self.count + len(fresh)] = fresh
        self.count += len(fresh)
        if self.max_tables is not None and self.count > self.max_tables:
            raise ResourceLimitError(f"slice exceeded {self.max_tables} tables")
        if self.stop_codes is not None and not self.certified:
            self.certified = bool(self.bitmap[self.stop_codes].any())
        return len(fresh)

    @property
    def full(self) -> bool:
        return self.count == self.space

    @property
    def done_enough(self) -> bool:
        return self.stop_if_full and (self.full or self.certified)

    def pack_rows(self, rows: np.ndarray) -> np.ndarray:
        return (rows.astype(np.int64) @ self.pow_full).astype(np.int32)

    def contains_table(self, row: np.ndarray) -> bool:
        return bool(self.bitmap[int(self.pack_rows(row.reshape(1, -1))[0])])

    # -- generator application ----------------------------------------------

    def make_applier(self, g: OpTable):
        lut = np.asarray(g.table, dtype=np.int8)
        if g.arity == 1:
            digs = _digits(np.arange(self.space), self.k, self.width)
            table = self.pack_rows(lut[digs])
            return (1, table)
        if g.arity == 2:
            def half(w: int) -> np.ndarray:
                space = self.k**w
                digs = _digits(np.arange(space), self.k, w)
                idx = digs[:, None, :].astype(np.int16) * self.k + digs[None, :, :]
                vals = lut[idx]
                pw = self.k ** np.arange(w - 1, -1, -1, dtype=np.int64)
                return (vals.astype(np.int64) @ pw).astype(np.int32)

            return (2, (half(self.hi_w), half(self.lo_w)))
        return (g.arity, lut)

    def _apply_binary(self, payload, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        hi_lut, lo_lut = payload
        a_hi, a_lo = a // self.lo_space, a % self.lo_space
        b_hi, b_lo = b // self.lo_space, b % self.lo_space
        out = hi_lut[a_hi[:, None], b_hi[None, :]] * self.lo_space
        out += lo_lut[a_lo[:, None], b_lo[None, :]]
        return out.ravel()

    def _binary_sweep(self, payload, a: np.ndarray, b: np.ndarray) -> None:
        """a x b in bounded tiles with an early-exit check per tile."""
        tile = max(1, 4_000_000 // max(len(b), 1))
        for start in range(0, len(a), tile):
            self.add(self._apply_binary(payload, a[start : start + tile], b))
            if self.done_enough:
                return

    def _apply_wide(self, m: int, lut: np.ndarray, operands: list[np.ndarray]) -> np.ndarray:
        rows = [_digits(o, self.k, self.width) for o in operands]
        acc = rows[0].astype(np.int32)
        for extra in rows[1:]:
            acc = (acc[:, None, :] * self.k + extra[None, :, :]).reshape(-1, self.width)
        return self.pack_rows(lut[acc])

    def process_block(self, gen_index: int) -> None:
        """Advance one generator's cursor by one block of pool rows."""
        m, payload = self.appliers[gen_index]
        done = self.cursors[gen_index]
        hi = min(done + _BLOCK, self.count)
        block = self.pool[done:hi]
        if m == 1:
            self.add(payload[block])
        elif m == 2:
            self._binary_sweep(payload, block, self.pool[:hi])
            if not self.done_enough and done:
                self._binary_sweep(payload, self.pool[:done], block)
        else:
            # slot p holds the block, earlier slots strictly older rows,
            # later slots anything up to hi: covers every operand tuple once
            upto = self.pool[:hi]
            older = self.pool[:done]
            for p in range(m):
                operands = [older] * p + [block] + [upto] * (m - 1 - p)
                if any(len(o) == 0 for o in operands):
                    continue
                tail = 1
                for o in operands[1:]:
                    tail *= len(o)
                step = max(1, 2_000_000 // max(tail, 1))
                for start in range(0, len(operands[0]), step):
                    chunk = [operands[0][start : start + step]] + operands[1:]
                    self.add(self._apply_wide(m, payload, chunk))
                    if self.done_enough:
                        return
        self.cursors[gen_index] = hi

    def drain(self) -> None:
        while not self.done_enough:
            pending = [i for i in range(len(self.appliers)) if self.cursors[i] < self.count]
            if not pending:
                return
            # least advanced first so fresh tables circulate across generators
            for i in sorted(pending, key=lambda i: self.cursors[i]):
                self.process_block(i)
                if self.done_enough:
                    return


def _closure_slice_codes(
    gens: list[OpTable],
    carrier: Carrier,
    arity: int,
    stop_if_full: bool,
    max_tables: int | None,
    stop_codes: np.ndarray | None = None,
) -> tuple[list[tuple[int, ...]], bool, list[OpTable]]:
    k = carrier.size
    eng = _CodeEngine(k, arity, stop_if_full, max_tables, stop_codes)
    tuple_prefix = np.array(list(carrier.tuples(arity)), dtype=np.int64)
    projections = np.array(
        [[t[j] for t in carrier.tuples(arity)] for j in range(arity)], dtype=np.int8
    )
    eng.add(eng.pack_rows(projections))

    activated: list[OpTable] = []
    for g in gens:
        if eng.done_enough:
            break
        if g.arity <= arity and eng.contains_table(_cylinder_row(g, tuple_prefix)):
            # already a term function of the generators activated so far
            continue
        activated.append(g)
        eng.appliers.append(eng.make_applier(g))
        eng.cursors.append(0)
        eng.drain()

    codes = eng.pool[: eng.count]
    tables = [tuple(int(v) for v in row) for row in _digits(codes, k, eng.width)]
    return tables, eng.full or eng.certified, activated


def _closure_slice_rows(
    gens: list[OpTable],
    carrier: Carrier,
    arity: int,
    stop_if_full: bool,
    max_tables: int | None,
) -> tuple[list[tuple[int, ...]], bool, list[OpTable]]:
    k = carrier.size
    width = k**arity
    state = _SliceState(k, width)

    projections = np.array(
        [[t[j] for t in carrier.tuples(arity)] for j in range(arity)], dtype=np.int8
    )
    state.add(projections)

    tuple_prefix = np.array(list(carrier.tuples(arity)), dtype=np.int64)
    active: list[tuple[int, np.ndarray]] = []  # (gen arity, lut)
    empty = np.zeros((0, width), dtype=np.int8)

    def absorb(blocks) -> tuple[np.ndarray, bool]:
        """Dedup-insert chunks eagerly; returns (fresh rows, done flag)."""
        fresh_parts = []
        for block in blocks:
            fresh = state.add(block)
            if len(fresh):
                fresh_parts.append(fresh)
            if stop_if_full and state.full:
                return (np.concatenate(fresh_parts) if fresh_parts else empty, True)
            if max_tables is not None and state.count > max_tables:
                raise ResourceLimitError(
                    f"slice exceeded {max_tables} tables at arity {arity}"
                )
        return (np.concatenate(fresh_parts) if fresh_parts else empty, False)

    def run_rounds(frontier: np.ndarray) -> bool:
        while len(frontier):
            if stop_if_full and state.full:
                return True
            old = state.rows[: state.count - len(frontier)]
            fresh_parts = []
            for m, lut in active:
                if m == 1:
                    blocks = [_apply_unary(lut, frontier)]
                else:
                    blocks = itertools.chain.from_iterable(
                        _apply_pointwise(lut, k, [frontier if p else old for p in pattern])
                        for pattern in itertools.product((0, 1), repeat=m)
                        if any(pattern)
                    )
                fresh, done = absorb(blocks)
                if len(fresh):
                    fresh_parts.append(fresh)
                if done:
                    return True
            frontier = np.concatenate(fresh_parts) if fresh_parts else empty
        return state.full

    activated: list[OpTable] = []
    for g in gens:
        if stop_if_full and state.full:
            break
        if g.arity <= arity and state.contains_row(_cylinder_row(g, tuple_prefix)):
            continue
        activated.append(g)
        lut = np.asarray(g.table, dtype=np.int8)
        active.append((g.arity, lut))
        pool = state.rows[: state.count]
        if g.arity == 1:
            blocks = [_apply_unary(lut, pool)]
        else:
            blocks = _apply_pointwise(lut, k, [pool] * g.arity)
        frontier, done = absorb(blocks)
        if done or run_rounds(frontier):
            break

    tables = [tuple(int(v) for v in row) for row in state.rows[: state.count]]
    return tables, state.full, activated


def _normalized_generators(
    generators: Sequence[OpTable], carrier: Carrier, include_all_unary: bool
) -> list[OpTable]:
    """Dedup, validate and stage generators for introduction.

    Unary generators go first (they are cheap and multiply the pool fast);
    within an arity the caller's order is kept, so callers can front-load
    the generators they expect to carry the closure.  The resulting clone
    does not depend on the order, only the work done to reach it does.
    """
    gens = list(generators)
    if include_all_unary:
        gens.extend(all_op_tables(carrier, 1))
    for g in gens:
        if g.carrier != carrier:
            raise ValueError("generator on a different carrier")
    seen: set[tuple[int, tuple[int, ...]]] = set()
    deduped = []
    for g in gens:
        key = (g.arity, g.table)
        if key not in seen:
            seen.add(key)
            deduped.append(g)
    deduped.sort(key=lambda g: g.arity)  # stable: preserves order within an arity
    return deduped


def closure_slice(
    generators: Sequence[OpTable],
    carrier: Carrier,
    arity: int,
    include_all_unary: bool = False,
    *,
    stop_if_full: bool = True,
    max_tables: int | None = None,
) -> tuple[list[tuple[int, ...]], bool]:
    """The arity-slice of the bounded clone closure.

    Returns (tables, is_full).  When stop_if_full is set the generation halts
    the moment every table of this arity has appeared, skipping the final
    confirmation sweep (sound: the slice cannot grow further).
    """
    gens = _normalized_generators(generators, carrier, include_all_unary)
    k = carrier.size
    width = k**arity
    if k**width <= _CODE_LIMIT:
        tables, full, _ = _closure_slice_codes(gens, carrier, arity, stop_if_full, max_tables)
    else:
        tables, full, _ = _closure_slice_rows(gens, carrier, arity, stop_if_full, max_tables)
    return tables, full


def closure_covers_slice(
    generators: Sequence[OpTable],
    carrier: Carrier,
    arity: int,
    complete_ops: Sequence[OpTable] = (),
) -> bool:
    """Whether the closure's arity-slice is everything, with shortcut exits.

    complete_ops must each be known (verified elsewhere, e.g. by an honest
    closure_slice_is_full run) to generate the full slice single-handedly;
    the run then stops as soon as one of them appears in the pool, since by
    monotonicity the closure contains that operation's full closure.
    """
    gens = _normalized_generators(generators, carrier, False)
    k = carrier.size
    width = k**arity
    if k**width > _CODE_LIMIT:
        _, full, _ = _closure_slice_rows(gens, carrier, arity, True, None)
        return full
    stop_codes = None
    if complete_ops:
        pow_full = k ** np.arange(width - 1, -1, -1, dtype=np.int64)
        rows = []
        tuple_prefix = np.array(list(carrier.tuples(arity)), dtype=np.int64)
        for op in complete_ops:
            if op.arity > arity:
                raise ValueError("complete op arity above the slice arity")
            rows.append(_cylinder_row(op, tuple_prefix))
        stop_codes = (np.array(rows, dtype=np.int64) @ pow_full).astype(np.int32)
    _, full, _ = _closure_slice_codes(gens, carrier, arity, True, None, stop_codes)
    return full


def reduce_generators(
    generators: Sequence[OpTable], carrier: Carrier, arity_cap: int
) -> list[OpTable]:
    """A subset of the generators with the same bounded closure.

    Runs the top slice's introduction scan and keeps only the generators
    that were not already term functions of the earlier ones; everything
    skipped is derivable from the kept subset, so closures agree at every
    arity up to the cap.
    """
    gens = _normalized_generators(generators, carrier, False)
    for g in gens:
        if g.arity > arity_cap:
            raise ValueError("arity cap below a generator arity")
    k = carrier.size
    width = k**arity_cap
    if k**width <= _CODE_LIMIT:
        _, _, activated = _closure_slice_codes(gens, carrier, arity_cap, False, None)
    else:
        _, _, activated = _closure_slice_rows(gens, carrier, arity_cap, False, None)
    return activated


def clone_closure(
    generators: Iterable[OpTable],
    carrier: Carrier,
    arity_cap: int,
    include_all_unary: bool = False,
    *,
    max_tables: int | None = None,
) -> OpSet:
    """Least bounded clone containing the generators and all projections.

    All slices of arity <= arity_cap are exact: an n-ary operation is in the
    result iff it is a term function of the generators (plus every unary
    operation when include_all_unary is set).
    """
    gens = list(generators)
    for g in gens:
        if g.arity > arity_cap:
            raise ValueError(
                f"arity cap {arity_cap} below generator arity {g.arity}"
            )
    ops: set[OpTable] = set()
    for n in range(1, arity_cap + 1):
        tables, _ = closure_slice(
            gens, carrier, n, include_all_unary, max_tables=max_tables
        )
        ops.update(OpTable(carrier, n, t) for t in tables)
    return OpSet(carrier, arity_cap, frozenset(ops))


def closure_slice_is_full(
    generators: Sequence[OpTable],
    carrier: Carrier,
    arity: int,
    include_all_unary: bool = False,
) -> bool:
    """Whether the arity-slice of the bounded closure is every operation."""
    _, full = closure_slice(generators, carrier, arity, include_all_unary)
    return full


def conjugate(op: OpTable, perm: Sequence[int]) -> OpTable:
    """Conjugation by a carrier permutation: x̄ -> perm(op(perm^{-1} x̄))."""
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return OpTable.from_fn(
        op.carrier, op.arity, lambda *t: perm[op(*(inv[a] for a in t))]
    )


# ---------------------------------------------------------------------------
# Text formats.
#
#   op <name> carrier=<k> arity=<n>
#   <k^n integers, whitespace separated>
#
#   rel <name> carrier=<k> width=<m>
#   <one tuple per line>

_OP_HEADER = re.compile(r"^op\s+(\S+)\s+carrier=(\d+)\s+arity=(\d+)\s*$")
_REL_HEADER = re.compile(r"^rel\s+(\S+)\s+carrier=(\d+)\s+width=(\d+)\s*$")


def format_ops(named_ops: Sequence[tuple[str, OpTable]]) -> str:
    lines = []
    for name, op in named_ops:
        lines.append(f"op {name} carrier={op.carrier.size} arity={op.arity}")
        lines.append(" ".join(str(v) for v in op.table))
    return "\n".join(lines) + "\n"


def parse_ops(text: str) -> list[tuple[str, OpTable]]:
    out: list[tuple[str, OpTable]] = []
    lines = [ln for ln in text.splitlines() if ln.strip()]
    i = 0
    while i < len(lines):
        m = _OP_HEADER.match(lines[i])
        if not m:
            raise ValueError(f"bad op header: {lines[i]!r}")
        name, k, arity = m.group(1), int(m.group(2)), int(m.group(3))
        carrier = Carrier(k)
        need = k**arity
        values: list[int] = []
        i += 1
        while i < len(lines) and len(values) < need:
            values.extend(int(tok) for tok in lines[i].split())
            i += 1
        if len(values) != need:
            raise ValueError(f"op {name}: expected {need} entries, got {len(values)}")
        out.append((name, OpTable(carrier, arity, tuple(values))))
    return out


def format_relations(named_rels: Sequence[tuple[str, RelationTable]]) -> str:
    lines = []
    for name, rel in named_rels:
        lines.append(f"rel {name} carrier={rel.carrier.size} width={rel.width}")
        for t in sorted(rel.tuples):
            lines.append(" ".join(str(v) for v in t))
    return "\n".join(lines) + "\n"


def parse_relations(text: str) -> list[tuple[str, RelationTable]]:
    out: list[tuple[str, RelationTable]] = []
    lines = [ln for ln in text.splitlines() if ln.strip()]
    i = 0
    while i < len(lines):
        m = _REL_HEADER.match(lines[i])
        if not m:
            raise ValueError(f"bad rel header: {lines[i]!r}")
        name, k, width = m.group(1), int(m.group(2)), int(m.group(3))
        carrier = Carrier(k)
        tuples = set()
        i += 1
        while i < len(lines) and not lines[i].startswith(("op ", "rel ")):
            row = tuple(int(tok) for tok in lines[i].split())
            tuples.add(row)
            i += 1
        out.append((name, RelationTable(carrier, width, frozenset(tuples))))
    return out

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from clonelab.finite import (
    Carrier,
    OpTable,
    RelationTable,
    ResourceLimitError,
    all_op_tables,
    clone_closure,
    closure_slice,
    compose,
    conjugate,
    format_ops,
    format_relations,
    make_projection,
    parse_ops,
    parse_relations,
    pol,
    reduce_generators,
    respects,
)
from clonelab.finite import _closure_slice_codes, _closure_slice_rows, _normalized_generators

C2 = Carrier(2)
C3 = Carrier(3)


def brute_table(carrier, arity, fn):
    return tuple(fn(*t) for t in itertools.product(range(carrier.size), repeat=arity))


class TestProjections:
    def test_identity(self):
        assert make_projection(1, 1, C2).table == (0, 1)

    def test_second_coordinate(self):
        assert make_projection(2, 2, C2).table == (0, 1, 0, 1)

    def test_ternary_first_by_enumeration(self):
        # oracle: walk all 27 tuples and read off the first component
        expected = brute_table(C3, 3, lambda a, b, c: a)
        assert make_projection(3, 1, C3).table == expected

    def test_coordinate_out_of_range(self):
        with pytest.raises(ValueError):
            make_projection(2, 3, C2)
        with pytest.raises(ValueError):
            make_projection(2, 0, C2)


AND = OpTable(C2, 2, (0, 0, 0, 1))
OR = OpTable(C2, 2, (0, 1, 1, 1))
XOR = OpTable(C2, 2, (0, 1, 1, 0))
NAND = OpTable(C2, 2, (1, 1, 1, 0))
NOT = OpTable(C2, 1, (1, 0))


class TestCompose:
    def test_projection_absorbs(self):
        f1 = OpTable(C2, 2, (1, 0, 0, 1))
        f2 = OpTable(C2, 2, (0, 1, 1, 1))
        assert compose(make_projection(2, 1, C2), [f1, f2]).table == f1.table

    def test_and_of_not_first(self):
        not_first = OpTable(C2, 2, (1, 1, 0, 0))
        got = compose(AND, [not_first, make_projection(2, 2, C2)])
        expected = brute_table(C2, 2, lambda x, y: int((1 - x) and y))
        assert got.table == expected == (0, 1, 0, 0)

    def test_median_formula_matches_pointwise_median(self):
        mx = OpTable.from_fn(C3, 2, max)
        mn = OpTable.from_fn(C3, 2, min)
        p1, p2, p3 = (make_projection(3, k, C3) for k in (1, 2, 3))
        pair_min = lambda a, b: compose(mn, [a, b])
        formula = compose(mx, [compose(mx, [pair_min(p1, p2), pair_min(p2, p3)]),
                               pair_min(p1, p3)])
        oracle = brute_table(C3, 3, lambda a, b, c: sorted((a, b, c))[1])
        assert formula.table == oracle

    def test_mismatch_errors(self):
        with pytest.raises(ValueError):
            compose(AND, [make_projection(2, 1, C2)])
        with pytest.raises(ValueError):
            compose(AND, [make_projection(2, 1, C2), make_projection(1, 1, C2)])
        with pytest.raises(ValueError):
            compose(AND, [make_projection(2, 1, C2), make_projection(2, 1, C3)])


class TestRespects:
    def test_full_relation_accepts_everything(self):
        full = RelationTable.full(C2, 2)
        for f in all_op_tables(C2, 2):
            assert respects(f, full)

    def test_and_respects_order(self):
        order = RelationTable(C2, 2, frozenset({(0, 0), (0, 1), (1, 1)}))
        assert respects(AND, order)
        assert not respects(NOT, RelationTable.unary(C2, {0}))

    def test_xor_breaks_order(self):
        order = RelationTable(C2, 2, frozenset({(0, 0), (0, 1), (1, 1)}))
        assert not respects(XOR, order)


class TestPol:
    def test_full_relation_gives_everything(self):
        got = pol(RelationTable.full(C2, 2), 2)
        assert got.counts() == {1: 4, 2: 16}

    def test_unary_relation_carrier3(self):
        # oracle: f(0), f(1) in {0,1} (4 ways) x f(2) free (3 ways) = 12
        got = pol(RelationTable.unary(C3, {0, 1}), 1)
        assert len(got) == 12

    def test_zero_fixing_binaries(self):
        got = pol(RelationTable.unary(C2, {0}), 2)
        oracle = [f for f in all_op_tables(C2, 2) if f(0, 0) == 0]
        assert set(got.slice(2)) == set(oracle)
        assert len(oracle) == 8

    def test_budget(self):
        with pytest.raises(ResourceLimitError):
            pol(RelationTable.unary(C3, {0}), 2, max_candidates=10)


class TestClosure:
    def test_empty_generators_projections_only(self):
        assert clone_closure([], C2, 2).counts() == {1: 1, 2: 2}

    def test_nand_generates_everything(self):
        assert clone_closure([NAND], C2, 2).counts() == {1: 4, 2: 16}

    def test_all_unary_gives_essentially_unary_binaries(self):
        closed = clone_closure([], C2, 2, include_all_unary=True)
        # oracle: tables of u(x) and u(y) for the four unary u, deduplicated
        essentially_unary = {brute_table(C2, 2, lambda x, y, u=u: u(x)) for u in
                             [lambda v: v, lambda v: 1 - v, lambda v: 0, lambda v: 1]}
        essentially_unary |= {brute_table(C2, 2, lambda x, y, u=u: u(y)) for u in
                              [lambda v: v, lambda v: 1 - v, lambda v: 0, lambda v: 1]}
        assert {op.table for op in closed.slice(2)} == essentially_unary
        assert len(essentially_unary) == 6

    def test_cap_below_generator_arity(self):
        with pytest.raises(ValueError):
            clone_closure([AND], C2, 1)

    def test_engines_agree_on_random_generators(self):
        # carrier 3 binary slices are kept out of the row engine here: its
        # full fixpoint over 19683 tables is minutes of work, and the unary
        # slice plus the whole carrier-2 space already exercise both paths
        import random

        rng = random.Random(7)
        for _ in range(25):
            k = rng.choice([2, 2, 3])
            carrier = Carrier(k)
            gens = [
                OpTable(carrier, ar, tuple(rng.randrange(k) for _ in range(k**ar)))
                for ar in (rng.choice([1, 2]) for _ in range(rng.randrange(0, 4)))
            ]
            arity = rng.choice([1, 2]) if k == 2 else 1
            norm = _normalized_generators(gens, carrier, False)
            t1, f1, _ = _closure_slice_codes(norm, carrier, arity, False, None)
            t2, f2, _ = _closure_slice_rows(norm, carrier, arity, False, None)
            assert sorted(t1) == sorted(t2)
            assert f1 == f2

    def test_reduce_generators_preserves_closure(self):
        gens = [AND, OR, XOR, NOT, NAND]
        core = reduce_generators(gens, C2, 2)
        assert len(core) <= len(gens)
        assert clone_closure(core, C2, 2).signature() == clone_closure(gens, C2, 2).signature()


binary_ops = st.builds(
    lambda t: OpTable(C2, 2, t),
    st.tuples(*[st.integers(0, 1)] * 4),
)


class TestClosureProperties:
    @settings(max_examples=25, deadline=None)
    @given(st.lists(binary_ops, max_size=3))
    def test_idempotent(self, gens):
        once = clone_closure(gens, C2, 2)
        twice = clone_closure(sorted(once.ops, key=OpTable.sort_key), C2, 2)
        assert once.signature() == twice.signature()

    @settings(max_examples=25, deadline=None)
    @given(st.lists(binary_ops, max_size=2), st.lists(binary_ops, max_size=2))
    def test_monotone(self, gens, extra):
        small = clone_closure(gens, C2, 2)
        big = clone_closure(gens + extra, C2, 2)
        assert small.ops <= big.ops

    @settings(max_examples=20, deadline=None)
    @given(st.lists(binary_ops, max_size=3))
    def test_projections_always_present(self, gens):
        closed = clone_closure(gens, C2, 2)
        assert make_projection(1, 1, C2) in closed
        assert make_projection(2, 1, C2) in closed
        assert make_projection(2, 2, C2) in closed


class TestGaloisSanity:
    @settings(max_examples=15, deadline=None)
    @given(st.lists(binary_ops, max_size=2))
    def test_members_respect_own_slice_encoding(self, gens):
        closed = clone_closure(gens, C2, 2)
        encoded = RelationTable.from_op_tables(closed.slice(2))
        for op in closed.ops:
            assert respects(op, encoded)

    @settings(max_examples=10, deadline=None)
    @given(st.lists(binary_ops, max_size=2))
    def test_pol_of_slice_recovers_slice(self, gens):
        closed = clone_closure(gens, C2, 2)
        encoded = RelationTable.from_op_tables(closed.slice(2))
        recovered = pol(encoded, 2)
        assert set(recovered.slice(2)) == set(closed.slice(2))


class TestFormats:
    def test_op_round_trip(self):
        named = [("and", AND), ("neg", NOT), ("med3", OpTable.from_fn(C3, 3, lambda a, b, c: sorted((a, b, c))[1]))]
        text = format_ops(named)
        assert parse_ops(text) == named
        assert format_ops(parse_ops(text)) == text

    def test_rel_round_trip(self):
        named = [
            ("ord", RelationTable(C2, 2, frozenset({(0, 0), (0, 1), (1, 1)}))),
            ("zero", RelationTable.unary(C3, {0})),
        ]
        text = format_relations(named)
        assert parse_relations(text) == named
        assert format_relations(parse_relations(text)) == text

    def test_bad_header(self):
        with pytest.raises(ValueError):
            parse_ops("op broken carrier=x arity=1\n0 1\n")
        with pytest.raises(ValueError):
            parse_ops("op short carrier=2 arity=2\n0 1 0\n")


class TestConjugation:
    def test_conjugate_is_involution_under_inverse(self):
        swap = (1, 0)
        assert conjugate(conjugate(AND, swap), swap).table == AND.table

    def test_conjugate_of_and_is_or(self):
        assert conjugate(AND, (1, 0)).table == OR.table

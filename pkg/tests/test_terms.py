import random

import pytest
from hypothesis import given, settings, strategies as st

from clonelab.combinatorics import constant_coloring, sum_coloring
from clonelab.pairings import color_gated_pairing
from clonelab.symbolic import Box, SymbolicFn, cantor_pairing
from clonelab.terms import (
    CONST,
    UNARY_X,
    UNARY_Y,
    UNDEFINED,
    BinaryApp,
    Const,
    InconclusiveError,
    RegistryError,
    SubsetSpec,
    UnaryApp,
    VarX,
    VarY,
    bounded_term_search,
    classify_on,
    default_registry,
    eval_term,
    find_agreement,
    format_term,
    parse_term,
    partial_eval,
    thin_avoid_constants,
    thin_avoid_pairing_collisions,
    thin_disjoint_images,
    thin_for,
)

PR = cantor_pairing()


def gated_registry(coloring, a_colors={0, 1}, b_colors={2, 3}):
    registry = default_registry()
    registry.register(color_gated_pairing(a_colors, coloring, PR, name="gateA"))
    registry.register(color_gated_pairing(b_colors, coloring, PR, name="gateB"))
    return registry


class TestGrammar:
    @pytest.mark.parametrize(
        "text",
        ["x", "y", "7", "(u:succ x)", "(b:max (u:succ x) (b:min y 3))"],
    )
    def test_round_trip(self, text):
        assert format_term(parse_term(text)) == text

    def test_arity_misuse_rejected(self):
        with pytest.raises(ValueError):
            parse_term("(u:succ x y)")
        with pytest.raises(ValueError):
            parse_term("(b:max x)")
        with pytest.raises(ValueError):
            parse_term("(max x y)")

    def test_trailing_garbage_rejected(self):
        with pytest.raises(ValueError):
            parse_term("x y")

    def test_eval(self):
        registry = default_registry()
        term = parse_term("(b:max (u:succ x) (b:min y 3))")
        assert eval_term(term, 4, 9, registry) == 5
        assert eval_term(parse_term("x"), 5, 9, registry) == 5
        assert eval_term(parse_term("(u:succ 3)"), 0, 0, registry) == 4

    def test_unknown_symbol(self):
        with pytest.raises(RegistryError):
            eval_term(parse_term("(u:nope x)"), 0, 0, default_registry())


class TestSubsets:
    def test_builtin_enumerations(self):
        assert SubsetSpec.naturals().first(4) == [0, 1, 2, 3]
        assert SubsetSpec.evens().first(4) == [0, 2, 4, 6]
        assert SubsetSpec.odds().first(3) == [1, 3, 5]

    def test_enumeration_predicate_mismatch_detected(self):
        import itertools

        broken = SubsetSpec(lambda v: v % 2 == 0, lambda: itertools.count(1), "broken")
        with pytest.raises(ValueError):
            broken.first(3)

    def test_classify_injective_constant_neither(self):
        naturals = SubsetSpec.naturals()
        assert classify_on(lambda v: 2 * v, naturals, 32)[0] == "injective"
        assert classify_on(lambda v: 9, naturals, 32) == ("constant", 9)
        verdict, witness = classify_on(lambda v: min(v, 3), naturals, 32)
        assert verdict == "neither"
        collision, distinct = witness
        assert min(collision[0], 3) == min(collision[1], 3)

    def test_classification_needs_two_probes(self):
        singleton = SubsetSpec(lambda v: v == 5, lambda: iter([5]), "one")
        with pytest.raises(InconclusiveError):
            classify_on(lambda v: v, singleton, 8)


class TestPartialEval:
    def test_variable_is_identity(self):
        res = partial_eval(parse_term("x"), SubsetSpec.naturals(), default_registry())
        assert res.kind == UNARY_X
        assert res.map(17) == 17

    def test_unary_of_constant(self):
        res = partial_eval(parse_term("(u:succ 3)"), SubsetSpec.naturals(), default_registry())
        assert res.kind == CONST and res.value == 4

    def test_cross_case_is_zero(self):
        registry = gated_registry(sum_coloring(4))
        term = parse_term("(b:gateB (u:succ x) (u:double y))")
        res = partial_eval(term, SubsetSpec.naturals(), registry)
        assert res.kind == CONST and res.value == 0

    def test_cross_case_mirrored(self):
        registry = gated_registry(sum_coloring(4))
        term = parse_term("(b:gateB (u:succ y) (u:double x))")
        res = partial_eval(term, SubsetSpec.naturals(), registry)
        assert res.kind == CONST and res.value == 0

    def test_same_side_composition(self):
        res = partial_eval(
            parse_term("(b:max (u:succ x) (u:double x))"), SubsetSpec.naturals(), default_registry()
        )
        assert res.kind == UNARY_X
        assert res.map(4) == 8

    def test_undefined_carries_path(self):
        res = partial_eval(parse_term("(b:min x 3)"), SubsetSpec.naturals(), default_registry())
        assert res.kind == UNDEFINED
        assert res.path == ()
        res = partial_eval(
            parse_term("(u:succ (b:min x 3))"), SubsetSpec.naturals(), default_registry()
        )
        assert res.kind == UNDEFINED
        assert res.path == (0,)

    def test_soundness_probes_on_defined_results(self):
        rng = random.Random(11)
        registry = gated_registry(sum_coloring(4))
        corpus = [
            "(u:double (u:succ x))",
            "(b:max (u:succ y) (u:double y))",
            "(b:gateA (u:succ x) (u:double y))",
            "(b:gateA x 0)",
            "(u:succ (b:gateB (u:succ x) (u:double y)))",
        ]
        naturals = SubsetSpec.naturals()
        for text in corpus:
            term = parse_term(text)
            res = partial_eval(term, naturals, registry)
            if not res.defined or res.kind == CONST:
                continue
            # claimed 1-1 maps stay 1-1 on fresh sample points
            points = sorted(rng.sample(range(500), 40))
            values = [res.map(p) for p in points]
            assert len(set(values)) == len(values)


class TestThinning:
    def test_nothing_to_thin(self):
        naturals = SubsetSpec.naturals()
        out = thin_for([parse_term("x")], naturals, default_registry())
        assert out.first(5) == [0, 1, 2, 3, 4]

    def test_constant_symbol_needs_no_thinning(self):
        out = thin_for([parse_term("(u:zero x)")], SubsetSpec.naturals(), default_registry())
        assert out.first(5) == [0, 1, 2, 3, 4]

    def test_halving_thins_to_evens(self):
        out = thin_for([parse_term("(u:half x)")], SubsetSpec.naturals(), default_registry())
        assert out.first(5) == [0, 2, 4, 6, 8]

    def test_saturating_min_becomes_constant(self):
        term = parse_term("(b:min x 7)")
        out = thin_for([term], SubsetSpec.naturals(), default_registry())
        res = partial_eval(term, out, default_registry())
        assert res.kind == CONST and res.value == 7

    def test_definedness_is_preserved_for_earlier_terms(self):
        registry = default_registry()
        terms = [parse_term("(u:double x)"), parse_term("(u:half x)"), parse_term("(b:min x 3)")]
        out = thin_for(terms, SubsetSpec.naturals(), registry)
        for term in terms:
            assert partial_eval(term, out, registry).defined

    def test_disjoint_images(self):
        fns = [lambda a: a // 3, lambda a: a // 3 + 100]
        out = thin_disjoint_images(SubsetSpec.naturals(), fns)
        chosen = out.first(6)
        images = [{f(a) for f in fns} for a in chosen]
        for i, left in enumerate(images):
            for right in images[i + 1:]:
                assert not (left & right)

    def test_avoid_pairing_collisions(self):
        fns = [lambda a: PR(a, a + 1)]  # engineered to collide with pair codes
        out = thin_avoid_pairing_collisions(SubsetSpec.naturals(), fns, PR)
        chosen = out.first(6)
        for a in chosen:
            for b in chosen:
                if a != b:
                    assert fns[0](a) not in (PR(a, b), PR(b, a))

    def test_avoid_constants(self):
        bad = {PR(0, 1), PR(2, 3)}
        out = thin_avoid_constants(SubsetSpec.naturals(), bad, PR)
        chosen = out.first(6)
        for a in chosen:
            for b in chosen:
                assert PR(a, b) not in bad


class TestAgreement:
    def test_found_pair_satisfies_both_conjuncts(self):
        coloring = constant_coloring(4, 0)
        registry = gated_registry(coloring, b_colors={2, 3})
        term = parse_term("(b:gateB (u:succ x) (u:double y))")
        naturals = SubsetSpec.naturals()
        pair = find_agreement(term, naturals, coloring, 0, registry)
        assert pair is not None
        a, b = pair
        res = partial_eval(term, naturals, registry)
        assert coloring(a, b) == 0
        assert eval_term(term, a, b, registry) == res.evaluate(a, b) == 0

    def test_wrong_target_color_finds_nothing(self):
        coloring = constant_coloring(4, 1)
        registry = gated_registry(coloring)
        term = parse_term("(b:gateB (u:succ x) (u:double y))")
        assert find_agreement(term, SubsetSpec.naturals(), coloring, 0, registry, 24) is None

    def test_constant_term_agrees_at_first_eligible_pair(self):
        coloring = constant_coloring(4, 0)
        registry = gated_registry(coloring)
        assert find_agreement(parse_term("5"), SubsetSpec.naturals(), coloring, 0, registry) == (0, 1)

    def test_undefined_reduction_rejected(self):
        coloring = constant_coloring(4, 0)
        with pytest.raises(ValueError):
            find_agreement(
                parse_term("(b:min x 3)"), SubsetSpec.naturals(), coloring, 0,
                gated_registry(coloring),
            )


class TestBoundedSearch:
    def test_projection_found_at_depth_zero(self):
        target = SymbolicFn("p1", 2, lambda x, y: x)
        registry = gated_registry(sum_coloring(4))
        res = bounded_term_search(target, {"gateB": registry.get_binary("gateB")}, {}, 1, Box(1, 16, "full"))
        assert isinstance(res.term, VarX)

    def test_recovered_pairing_found_at_depth_two(self):
        from clonelab.pairings import recovered_pairing

        coloring = sum_coloring(4)
        registry = gated_registry(coloring)
        gate_a = registry.get_binary("gateA")
        gate_b = registry.get_binary("gateB")
        target = recovered_pairing({0, 1}, {2, 3}, coloring, PR)
        box = Box(1, 24, "full")
        res = bounded_term_search(
            target, {"gateA": gate_a, "gateB": gate_b},
            {"id": registry.get_unary("id")}, 2, box,
        )
        assert res.term is not None
        assert all(eval_term(res.term, x, y, registry) == target(x, y) for x, y in box.pairs())

    def test_found_term_matches_bit_exactly(self):
        registry = default_registry()
        target = SymbolicFn("succmax", 2, lambda x, y: max(x, y) + 1)
        box = Box(0, 12, "full")
        res = bounded_term_search(
            target, {"max": registry.get_binary("max")},
            {"succ": registry.get_unary("succ")}, 2, box,
        )
        assert res.term is not None
        assert all(eval_term(res.term, x, y, registry) == target(x, y) for x, y in box.pairs())

    def test_unreachable_target_returns_none(self):
        registry = default_registry()
        target = SymbolicFn("plus", 2, lambda x, y: x + y)
        res = bounded_term_search(
            target, {"min": registry.get_binary("min")},
            {"id": registry.get_unary("id")}, 2, Box(0, 10, "full"),
        )
        assert res.term is None
        assert res.stats.candidates_checked > 0


terms_strategy = st.deferred(
    lambda: st.one_of(
        st.just(VarX()),
        st.just(VarY()),
        st.builds(Const, st.integers(0, 9)),
        st.builds(UnaryApp, st.sampled_from(["id", "succ", "double"]), terms_strategy),
        st.builds(
            BinaryApp, st.sampled_from(["max", "min", "pair"]), terms_strategy, terms_strategy
        ),
    )
)


class TestReductionShapeProperty:
    @settings(max_examples=60, deadline=None)
    @given(terms_strategy)
    def test_every_reduction_matches_the_trichotomy(self, term):
        registry = default_registry()
        res = partial_eval(term, SubsetSpec.naturals(), registry, probe_budget=24)
        assert res.kind in (CONST, UNARY_X, UNARY_Y, UNDEFINED)
        if res.kind == CONST:
            assert isinstance(res.value, int)
        elif res.kind in (UNARY_X, UNARY_Y):
            probes = SubsetSpec.naturals().first(24)
            values = [res.map(p) for p in probes]
            assert len(set(values)) == len(values)

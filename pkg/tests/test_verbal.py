import random

import pytest

from largequot.errors import CapExceeded, NotMaterializedError
from largequot.quotients import FiniteQuotient, build_quotient, mod_abelianization
from largequot.verbal import (
    ORDER_EXPONENT_CAP,
    LayeredCoset,
    PrimeSeq,
    build_series,
    levi_bound,
    quotient_order,
    quotient_order_factors,
)
from largequot.words import Word, parse_word, power, random_reduced_word


def test_primeseq_validation():
    with pytest.raises(ValueError):
        PrimeSeq([])
    with pytest.raises(ValueError):
        PrimeSeq([2, 4])
    seq = PrimeSeq([2, 3, 5, 3])
    assert not seq.distinct
    assert PrimeSeq([2, 3, 5]).distinct
    assert seq.shift(2).primes == (5, 3)
    with pytest.raises(ValueError):
        seq.shift(4)


def test_build_series_argument_checks():
    with pytest.raises(ValueError):
        build_series([2, 3], 2, -1)
    with pytest.raises(ValueError):
        build_series([2, 3], 2, 3)
    assert build_series([2, 3], 2, 0) == []


def test_order_formula_matches_bfs_enumeration():
    # |F_2/gamma_2| over (2, 3): 4 * 3^(1+4) = 972, and the coset graph of
    # F/gamma_2 (the parent of level 3) must enumerate to the same count.
    assert quotient_order([2, 3], 2, 1) == 4
    assert quotient_order([2, 3], 2, 2) == 972
    levels = build_series([2, 3, 5], 2, 3)
    assert levels[2].parent_quotient.order == 972
    assert levels[2].parent_order == 972
    assert levels[1].schreier_rank == 1 + 1 * 4
    assert levels[2].schreier_rank == 1 + 1 * 972


def test_order_formula_depth_zero_and_rank_one():
    assert quotient_order([5], 3, 0) == 1
    # rank 1: every Schreier rank is 1, so the tower is just a product
    assert quotient_order([2, 3, 5], 1, 3) == 2 * 3 * 5


def test_level_one_vectors_and_membership():
    level1, level2 = build_series([2, 3], 2, 2)
    a = parse_word("a", 2)
    assert level1.component_vector(a) == (1, 0)
    assert not level1.member(a)
    assert level1.member(parse_word("aa", 2))
    assert level1.member(parse_word("ABab", 2))
    with pytest.raises(ValueError):
        level2.component_vector(a)  # a is not in gamma_1


def test_normal_form_frozen_example():
    _, level2 = build_series([2, 3], 2, 2)
    a = parse_word("a", 2)
    assert level2.normal_form(a) == ((1, 0), (0, 0, 0, 0, 0))
    assert level2.normal_form(Word.identity(2)) == ((0, 0), (0, 0, 0, 0, 0))


def test_normal_form_is_a_coset_invariant():
    rng = random.Random(89)
    _, level2 = build_series([2, 3], 2, 2)
    for _ in range(20):
        w = random_reduced_word(rng, 2, rng.randint(1, 6))
        nf = level2.normal_form(w)
        # multiplying by the reconstructed representative's inverse lands in gamma_2
        u = w
        for lvl, v in zip(level2._chain(), nf):
            u = u * lvl.representative(v).inverse()
        assert level2.member(u)
        # and a gamma_2 perturbation does not change the normal form
        deep = parse_word("aa", 2) ** 3  # aa in gamma_1, (aa)^3 kills the mod-3 layer
        assert level2.member(deep)
        assert level2.normal_form(w * deep) == nf


def test_representative_inverts_component_vector():
    rng = random.Random(97)
    level1, level2 = build_series([2, 3], 2, 2)
    for level in (level1, level2):
        q = level.prime
        for _ in range(15):
            v = tuple(rng.randrange(q) for _ in level.basis_words)
            assert level.component_vector(level.representative(v)) == v


def test_membership_is_nested():
    rng = random.Random(101)
    levels = build_series([2, 3], 2, 2)
    for _ in range(60):
        w = random_reduced_word(rng, 2, rng.randint(0, 7))
        flags = []
        for lvl in levels:
            try:
                flags.append(lvl.member(w))
            except ValueError:
                flags.append(False)
        if flags[1]:
            assert flags[0], "gamma_2 must sit inside gamma_1"


def test_order_mod_frozen_and_exact():
    rng = random.Random(103)
    _, level2 = build_series([2, 3], 2, 2)
    assert level2.order_mod(parse_word("a", 2)) == 6
    assert level2.order_mod(Word.identity(2)) == 1
    for _ in range(15):
        w = random_reduced_word(rng, 2, rng.randint(1, 5))
        n = level2.order_mod(w)
        assert level2.member(power(w, n))
        for p in {2, 3}:
            if n % p == 0:
                assert not level2.member(power(w, n // p))


def test_layered_cosets_generate_the_right_group():
    level1 = build_series([2, 3], 2, 1)[0]
    images = [LayeredCoset(level1, Word.generator(2, g)) for g in (1, 2)]
    q = build_quotient(2, images)
    ref = mod_abelianization(2, 2)
    assert q.order == ref.order == 4
    x = LayeredCoset(level1, parse_word("ab", 2))
    y = LayeredCoset(level1, parse_word("ba", 2))
    assert x == y  # same coset despite different representatives
    assert x * x.inverse() == LayeredCoset(level1, Word.identity(2))


def test_verbal_quotient_serialization_roundtrip():
    levels = build_series([2, 3], 2, 2)
    q = levels[1].parent_quotient
    doc = q.serialize()
    assert doc["kind"] == "verbal"
    assert doc["params"] == {"primes": [2], "rank": 2, "depth": 1}
    again = FiniteQuotient.from_spec(doc)
    assert again.order == 4
    assert again.mult == q.mult


def test_materialization_cap_defers_membership():
    levels = build_series([2, 3], 2, 2, coset_cap=2)
    assert not levels[1].materialized
    assert levels[1].quotient_order == 972  # closed formula still answers
    with pytest.raises(NotMaterializedError):
        levels[1].member(parse_word("aa", 2))


def test_exponent_cap_cuts_off_tower_orders():
    levels = build_series([2, 3, 5, 7], 2, 4)
    d3 = levels[2]
    assert d3.quotient_order == 972 * 5 ** 973
    d4 = levels[3]
    # the rank is one more than the depth-3 order: huge but representable
    assert d4.schreier_rank == 1 + 972 * 5 ** 973
    with pytest.raises(CapExceeded):
        d4.quotient_order
    with pytest.raises(CapExceeded):
        quotient_order([2, 3, 5, 7], 2, 4)


def test_factored_order_survives_one_more_level():
    factors = quotient_order_factors([2, 3, 5, 7], 2, 4)
    assert factors[2] == 2
    assert factors[3] == 5
    assert factors[5] == 973
    assert factors[7] == 1 + 972 * 5 ** 973
    # while both forms exist they agree
    for depth in (1, 2, 3):
        f = quotient_order_factors([2, 3, 5, 7], 2, depth)
        n = 1
        for p, e in f.items():
            n *= p ** e
        assert n == quotient_order([2, 3, 5, 7], 2, depth)
    with pytest.raises(CapExceeded):
        quotient_order_factors([2, 3, 5, 7, 11], 2, 5)


def test_levi_bound_examples_and_errors():
    a = parse_word("a", 2)
    aa = parse_word("aa", 2)
    assert levi_bound([a], [2, 3]) == 1
    assert levi_bound([aa], [2, 3]) == 2
    assert levi_bound([a, aa], [2, 3]) == 2
    with pytest.raises(ValueError):
        levi_bound([], [2, 3])
    with pytest.raises(ValueError):
        levi_bound([Word.identity(2)], [2, 3])
    with pytest.raises(ValueError):
        levi_bound([a, parse_word("a", 3)], [2, 3])
    with pytest.raises(ValueError):
        levi_bound([aa], [2])  # sequence exhausted before escaping
    with pytest.raises(CapExceeded):
        levi_bound([aa], [2, 3], depth_cap=1)
    with pytest.raises(CapExceeded):
        levi_bound([aa], [2, 3], coset_cap=2)


def test_exponent_cap_is_sane():
    assert ORDER_EXPONENT_CAP >= 10 ** 3

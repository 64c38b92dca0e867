import random
from itertools import islice

import pytest

from largequot.words import (
    Word,
    parse_word,
    power,
    random_reduced_word,
    shortlex_words,
)


def test_reduction_cancels_adjacent_inverses():
    w = Word(2, [(1, 1), (2, 1), (2, -1), (1, -1), (1, 1)])
    assert w.letters == ((1, 1),)
    assert str(w) == "a"


def test_reduction_of_full_cancellation_is_identity():
    w = Word(2, [(1, 1), (2, 1), (2, -1), (1, -1)])
    assert w.is_identity
    assert len(w) == 0
    assert str(w) == "1"


def test_identity_and_generator_constructors():
    e = Word.identity(3)
    a2 = Word.generator(3, 2)
    assert e.is_identity
    assert a2.letters == ((2, 1),)
    assert e * a2 == a2


def test_generator_index_out_of_range():
    with pytest.raises(ValueError):
        Word.generator(2, 3)
    with pytest.raises(ValueError):
        Word(2, [(0, 1)])


def test_mul_cancels_across_boundary():
    u = parse_word("abb", 2)
    v = parse_word("BBA", 2)
    assert (u * v).is_identity
    w = parse_word("abbA", 2) * parse_word("aB", 2)
    assert str(w) == "ab"


def test_inverse_reverses_and_flips():
    w = parse_word("abA", 2)
    assert str(w.inverse()) == "aBA"
    assert (w * w.inverse()).is_identity
    assert ~w == w.inverse()


def test_inverse_of_product_is_reversed_product():
    rng = random.Random(11)
    for _ in range(100):
        u = random_reduced_word(rng, 3, rng.randint(0, 8))
        v = random_reduced_word(rng, 3, rng.randint(0, 8))
        assert (u * v).inverse() == v.inverse() * u.inverse()


def test_power_matches_repeated_multiplication():
    rng = random.Random(5)
    for _ in range(60):
        w = random_reduced_word(rng, 2, rng.randint(1, 6))
        n = rng.randint(-5, 5)
        direct = Word.identity(2)
        base = w if n >= 0 else w.inverse()
        for _ in range(abs(n)):
            direct = direct * base
        assert power(w, n) == direct
        assert w**n == direct


def test_power_of_conjugate_stays_short():
    # (t c t^-1)^n reduces to t c^n t^-1: length n|c| + 2|t|, not n|w|
    t = parse_word("ba", 2)
    c = parse_word("ab", 2)
    w = t * c * t.inverse()
    assert len(w) == 6
    p = power(w, 50)
    assert len(p) == 50 * len(c) + 2 * len(t)


def test_conjugate_definition():
    w = parse_word("ab", 2)
    t = parse_word("b", 2)
    assert w.conjugate(t) == t.inverse() * w * t


def test_exponent_sums():
    w = parse_word("aabAB", 2)
    assert w.exponent_sums() == (1, 0)
    assert Word.identity(2).exponent_sums() == (0, 0)


def test_cyclic_decomposition_roundtrip():
    rng = random.Random(3)
    for _ in range(80):
        w = random_reduced_word(rng, 2, rng.randint(0, 10))
        t, c = w.cyclic_decomposition()
        assert t * c * t.inverse() == w
        # c is cyclically reduced: first and last letters do not cancel
        if len(c) > 1:
            g1, e1 = c.letters[0]
            g2, e2 = c.letters[-1]
            assert not (g1 == g2 and e1 == -e2)


def test_parse_letter_and_indexed_syntax_agree():
    assert parse_word("aBa", 2) == parse_word("g1*g2^-1*g1", 2)
    assert parse_word("a^3", 2) == parse_word("aaa", 2)
    assert parse_word("g2^-2", 2) == parse_word("BB", 2)
    assert parse_word("1", 2).is_identity
    assert parse_word("", 2).is_identity


def test_parse_rejects_garbage_and_out_of_range():
    with pytest.raises(ValueError):
        parse_word("a$b", 2)
    with pytest.raises(ValueError):
        parse_word("c", 2)
    with pytest.raises(ValueError):
        parse_word("g3", 2)


def test_print_parse_roundtrip():
    rng = random.Random(7)
    for _ in range(100):
        w = random_reduced_word(rng, 2, rng.randint(0, 9))
        assert parse_word(str(w), 2) == w
    # indexed printing kicks in above rank 26
    w = Word.generator(27, 27) * Word.generator(27, 1).inverse()
    assert parse_word(str(w), 27) == w


def test_equality_includes_rank():
    assert parse_word("a", 2) != parse_word("a", 3)
    assert hash(parse_word("ab", 2)) == hash(parse_word("ab", 2))


def test_mixed_rank_multiplication_rejected():
    with pytest.raises(ValueError):
        parse_word("a", 2) * parse_word("a", 3)


def test_shortlex_order_and_completeness():
    words = list(islice(shortlex_words(2), 60))
    # nontrivial, reduced, strictly shortlex-increasing, no duplicates
    assert len(set(words)) == len(words)
    lengths = [len(w) for w in words]
    assert lengths == sorted(lengths)
    assert [str(w) for w in words[:4]] == ["a", "b", "A", "B"]
    # all 4*3^(n-1) reduced words of length n appear
    by_len = {}
    for w in words:
        by_len.setdefault(len(w), []).append(w)
    assert len(by_len[1]) == 4
    assert len(by_len[2]) == 12


def test_shortlex_can_include_identity():
    first = next(iter(shortlex_words(2, include_identity=True)))
    assert first.is_identity


def test_random_reduced_word_is_reduced_and_has_length():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randint(0, 12)
        w = random_reduced_word(rng, 2, n)
        assert len(w) == n
        assert Word(2, w.letters) == w  # re-reduction changes nothing

import random

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form

from largequot.smith import smith_diagonal


def sympy_diagonal(matrix):
    """Oracle: sympy's Smith form, diagonal read off and sign-normalized."""
    m = Matrix(matrix)
    s = smith_normal_form(m)
    return [abs(s[i, i]) for i in range(min(s.rows, s.cols))]


def test_known_small_cases():
    assert smith_diagonal([[2]]) == [2]
    assert smith_diagonal([[1, 0], [0, 1]]) == [1, 1]
    assert smith_diagonal([[2, 0], [0, 3]]) == [1, 6]
    assert smith_diagonal([[0, 0], [0, 0]]) == [0, 0]
    assert smith_diagonal([[2, 4], [6, 8]]) == [2, 4]


def test_empty_and_degenerate_shapes():
    assert smith_diagonal([]) == []
    assert smith_diagonal([[3, 6, 9]]) == [3]
    assert smith_diagonal([[3], [6], [9]]) == [3]


def test_divisibility_chain():
    rng = random.Random(61)
    for _ in range(80):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        m = [[rng.randint(-8, 8) for _ in range(cols)] for _ in range(rows)]
        d = smith_diagonal(m)
        assert len(d) == min(rows, cols)
        assert all(x >= 0 for x in d)
        for x, y in zip(d, d[1:]):
            if x == 0:
                assert y == 0
            else:
                assert y % x == 0


def test_matches_sympy_oracle():
    rng = random.Random(67)
    for _ in range(120):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        m = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
        assert smith_diagonal(m) == sympy_diagonal(m)


def test_input_matrix_not_mutated():
    m = [[2, 4], [6, 8]]
    snapshot = [row[:] for row in m]
    smith_diagonal(m)
    assert m == snapshot

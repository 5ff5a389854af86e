from fractions import Fraction

import pytest
from polyparse import P, X, Y

from toda_cluster.cluster import build_Qn, p_map
from toda_cluster.exactalg import LaurentPoly, PolyMatrix
from toda_cluster.toda import (
    cartan,
    coweight_matrix,
    elementary_matrices,
    factorization_matrix,
    hamiltonian_matrix,
    to_x,
    y_to_x,
)

# monomial counts of H_k in x-coordinates, computed once and frozen
FROZEN_TERM_COUNTS = {
    1: [3], 2: [5, 5], 3: [7, 13, 7], 4: [9, 25, 25, 9],
    5: [11, 41, 63, 41, 11], 6: [13, 61, 129, 129, 61, 13],
}


def _ints(rows, n):
    return PolyMatrix.from_ints(rows, Y(n), n + 1)


def test_elementary_matrices():
    E, F = elementary_matrices(1, 1)
    assert E == _ints([[1, 1], [0, 1]], 1)
    assert F == _ints([[1, 0], [1, 1]], 1)
    E, F = elementary_matrices(2, 1)
    assert E @ F == _ints([[2, 1, 0], [1, 1, 0], [0, 0, 1]], 2)
    with pytest.raises(ValueError):
        elementary_matrices(2, 3)


def test_coweight_matrix():
    H = coweight_matrix(1, 1, "y1")
    assert H[0, 0] == P("y1^(1/2)", Y(1), 2)
    assert H[1, 1] == P("y1^(-1/2)", Y(1), 2)
    for n in (2, 3):
        for i in range(1, n + 1):
            H = coweight_matrix(n, i, "y1")
            assert H[n, n] == LaurentPoly.monomial(Y(n), {"y1": Fraction(-i, n + 1)}, n + 1)
            assert H.det() == LaurentPoly.one(Y(n), n + 1)


def test_factorization_rank_one():
    ys = Y(1)
    s = P("y1^(-1/2)*y2^(-1/2)", ys, 2)
    expected = PolyMatrix([[P("y2 + y1*y2", ys, 2), P("1", ys, 2)],
                           [P("y2", ys, 2), P("1", ys, 2)]]).scale(s)
    assert factorization_matrix(1) == expected


def test_factorization_rank_two():
    ys = Y(2)
    s = P("y1^(-1/3)*y2^(-1/3)*y3^(-2/3)*y4^(-2/3)", ys, 3)
    rows = [["y2*y3*y4 + y1*y2*y3*y4", "y4 + y3*y4", "1"],
            ["y2*y3*y4", "y4 + y3*y4", "1"],
            ["0", "y4", "1"]]
    expected = PolyMatrix([[P(e, ys, 3) for e in r] for r in rows]).scale(s)
    assert factorization_matrix(2) == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_factorization_determinant(n):
    assert factorization_matrix(n).det() == LaurentPoly.one(Y(n), n + 1)


def test_hamiltonians_in_y():
    assert hamiltonian_matrix(1, 1, "y") == P(
        "y1^(-1/2)*y2^(-1/2)", Y(1), 2) * P("1 + y2 + y1*y2", Y(1), 2)
    pre = P("y1^(-2/3)*y2^(-2/3)*y3^(-1/3)*y4^(-1/3)", Y(2), 3)
    assert hamiltonian_matrix(2, 2, "y") == pre * P(
        "1 + y2 + y1*y2 + y1*y2*y4 + y1*y2*y3*y4", Y(2), 3)


def test_hamiltonians_in_x():
    xs = X(1)
    assert hamiltonian_matrix(1, 1) == P("x1*x2^-1 + x1^-1*x2^-1 + x1^-1*x2", xs)
    xs = X(2)
    y = {k: v for k, v in y_to_x(2).items()}
    one = LaurentPoly.one(xs)
    bracket = one + y["y4"] + y["y3"] * y["y4"] + y["y2"] * y["y3"] * y["y4"] \
        + y["y1"] * y["y2"] * y["y3"] * y["y4"]
    assert hamiltonian_matrix(2, 1) == P("x3*x4^-1", xs) * bracket
    bracket = one + y["y2"] + y["y1"] * y["y2"] + y["y1"] * y["y2"] * y["y4"] \
        + y["y1"] * y["y2"] * y["y3"] * y["y4"]
    assert hamiltonian_matrix(2, 2) == P("x1*x2^-1", xs) * bracket


def test_y_to_x_examples():
    assert y_to_x(1) == {"y1": P("x2^2", X(1)), "y2": P("x1^-2", X(1))}
    m = y_to_x(2)
    assert m["y1"] == P("x2^2*x4^-1", X(2))
    assert m["y2"] == P("x1^-2*x3", X(2))
    assert m["y3"] == P("x2^-1*x4^2", X(2))
    assert m["y4"] == P("x1*x3^-2", X(2))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_y_to_x_agrees_with_p_map(n):
    Q = build_Qn(n)
    for name, img in y_to_x(n).items():
        assert p_map(Q, LaurentPoly.var(Y(n), name)) == img


def test_cartan():
    assert cartan(3) == [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]


@pytest.mark.parametrize("n", range(1, 7))
def test_hamiltonian_shape(n):
    counts = []
    for k in range(1, n + 1):
        H = hamiltonian_matrix(n, k)
        assert H.den == 1
        assert set(H.coefficients()) == {1}
        counts.append(len(H))
    assert counts[0] == 2 * n + 1
    assert counts == FROZEN_TERM_COUNTS[n]
    assert counts == counts[::-1]


def test_range_errors():
    with pytest.raises(ValueError):
        hamiltonian_matrix(2, 0)
    with pytest.raises(ValueError):
        hamiltonian_matrix(2, 3)
    with pytest.raises(ValueError):
        hamiltonian_matrix(2, 1, "z")


def test_to_x_rejects_fractional_result():
    with pytest.raises(ValueError):
        to_x(2, P("y1^(1/3)", Y(2), 3))
    assert to_x(1, P("y1^(1/2)", Y(1), 2)) == P("x2", X(1))

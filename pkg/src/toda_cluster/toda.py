"""Factorization map T -> SL_{n+1} and the Toda Hamiltonians H_k."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .exactalg import LaurentPoly, PolyMatrix, exterior_trace, ring_vars, substitute


def y_vars(n: int) -> tuple[str, ...]:
    return ring_vars("y", 2 * n)


def x_vars(n: int) -> tuple[str, ...]:
    return ring_vars("x", 2 * n)


def y_one(n: int) -> LaurentPoly:
    return LaurentPoly.one(y_vars(n), n + 1)


def x_one(n: int) -> LaurentPoly:
    return LaurentPoly.one(x_vars(n))


def cartan(n: int) -> list[list[int]]:
    return [[2 if i == j else (-1 if abs(i - j) == 1 else 0)
             for j in range(n)] for i in range(n)]


def _check_index(n: int, i: int) -> None:
    if n < 1 or not 1 <= i <= n:
        raise ValueError(f"index {i} out of range 1..{n}")


def elementary_matrices(n: int, i: int) -> tuple[PolyMatrix, PolyMatrix]:
    """E_i = 1 + e_{i,i+1}, F_i = 1 + e_{i+1,i} over the y-ring of rank n."""
    _check_index(n, i)
    size = n + 1
    E = [[int(r == c) for c in range(size)] for r in range(size)]
    F = [row[:] for row in E]
    E[i - 1][i] = 1
    F[i][i - 1] = 1
    vs, den = y_vars(n), n + 1
    return PolyMatrix.from_ints(E, vs, den), PolyMatrix.from_ints(F, vs, den)


def coweight_matrix(n: int, i: int, y: str) -> PolyMatrix:
    """y^{omega_i}: y^{-i/(n+1)} diag(y,..,y (i times), 1,..,1)."""
    _check_index(n, i)
    vs, den = y_vars(n), n + 1
    diag = []
    for j in range(n + 1):
        p = Fraction(-i, n + 1) + (1 if j < i else 0)
        diag.append(LaurentPoly.var(vs, y, den, p))
    return PolyMatrix.diagonal(diag)


@lru_cache(maxsize=None)
def factorization_matrix(n: int) -> PolyMatrix:
    """prod_i E_i y_{2i-1}^{omega_i} F_i y_{2i}^{omega_i}."""
    if n < 1:
        raise ValueError("n must be at least 1")
    M = PolyMatrix.identity(n + 1, y_vars(n), n + 1)
    for i in range(1, n + 1):
        E, F = elementary_matrices(n, i)
        M = M @ E @ coweight_matrix(n, i, f"y{2 * i - 1}")
        M = M @ F @ coweight_matrix(n, i, f"y{2 * i}")
    return M


@lru_cache(maxsize=None)
def y_to_x(n: int) -> dict[str, LaurentPoly]:
    """y_{2i-1} -> prod_j x_{2j}^{C_ij}, y_{2i} -> prod_j x_{2j-1}^{-C_ij}."""
    C = cartan(n)
    xs = x_vars(n)
    out = {}
    for i in range(n):
        odd = [0] * (2 * n)
        even = [0] * (2 * n)
        for j in range(n):
            odd[2 * j + 1] = C[i][j]
            even[2 * j] = -C[i][j]
        out[f"y{2 * i + 1}"] = LaurentPoly.monomial(xs, odd)
        out[f"y{2 * i + 2}"] = LaurentPoly.monomial(xs, even)
    return out


def to_x(n: int, p: LaurentPoly) -> LaurentPoly:
    """Expand a y-ring polynomial in x-coordinates; exponents must become integral."""
    return substitute(p, y_to_x(n), target=x_one(n))


def hamiltonian_matrix(n: int, k: int, coords: str = "x") -> LaurentPoly:
    """H_k = tr(wedge^k M) for the factorization matrix M."""
    _check_index(n, k)
    if coords not in ("x", "y"):
        raise ValueError("coords must be 'x' or 'y'")
    H = exterior_trace(factorization_matrix(n), k)
    return to_x(n, H) if coords == "x" else H

"""Quivers, mutation of quivers and seeds, and the p-map y -> x."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exactalg import LaurentPoly, NotDivisible, exact_divide, ring_vars, substitute


@dataclass(frozen=True)
class Quiver:
    """Quiver on vertices 1..n; ``adj[i][j]`` = #(i->j) - #(j->i), 0-based storage."""

    n: int
    adj: tuple

    def __post_init__(self):
        adj = tuple(tuple(int(x) for x in row) for row in self.adj)
        object.__setattr__(self, "adj", adj)
        if len(adj) != self.n or any(len(r) != self.n for r in adj):
            raise ValueError("adjacency must be n x n")
        for i in range(self.n):
            if adj[i][i]:
                raise ValueError("loops are not allowed")
            for j in range(self.n):
                if adj[i][j] != -adj[j][i]:
                    raise ValueError("adjacency must be skew-symmetric")

    def Q(self, i: int, j: int) -> int:
        """1-based access to the signed adjacency."""
        return self.adj[i - 1][j - 1]

    def arrows(self) -> list[tuple[int, int, int]]:
        """(source, target, multiplicity), 1-based, sorted."""
        return [(i + 1, j + 1, self.adj[i][j])
                for i in range(self.n) for j in range(self.n)
                if self.adj[i][j] > 0]

    def to_dict(self) -> dict:
        return {"n": self.n, "adj": [list(r) for r in self.adj]}

    def to_dot(self, name: str = "Q") -> str:
        lines = [f"digraph {name} {{"]
        for v in range(1, self.n + 1):
            lines.append(f"  {v};")
        for s, t, m in self.arrows():
            for _ in range(m):
                lines.append(f"  {s} -> {t};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def from_arrows(n: int, arrows: Sequence[tuple[int, int]]) -> Quiver:
    adj = [[0] * n for _ in range(n)]
    for s, t in arrows:
        adj[s - 1][t - 1] += 1
        adj[t - 1][s - 1] -= 1
    return Quiver(n, adj)


def build_Qn(n: int) -> Quiver:
    """The quiver Q_n on 2n vertices."""
    if n < 1:
        raise ValueError("n must be at least 1")
    arrows = []
    for i in range(1, n + 1):
        arrows += [(2 * i - 1, 2 * i)] * 2
        if i < n:
            arrows.append((2 * i, 2 * i + 1))
        if i >= 2:
            arrows.append((2 * i, 2 * i - 3))
    return from_arrows(2 * n, arrows)


def mutate_quiver(Q: Quiver, k: int) -> Quiver:
    if not 1 <= k <= Q.n:
        raise ValueError(f"vertex {k} out of range")
    k -= 1
    a = Q.adj
    new = [[0] * Q.n for _ in range(Q.n)]
    for i in range(Q.n):
        for j in range(Q.n):
            if i == k or j == k:
                new[i][j] = -a[i][j]
            else:
                new[i][j] = a[i][j] + (abs(a[i][k]) * a[k][j]
                                       + a[i][k] * abs(a[k][j])) // 2
    return Quiver(Q.n, new)


def x_ring(n: int) -> tuple[str, ...]:
    return ring_vars("x", n)


def y_ring(n: int) -> tuple[str, ...]:
    return ring_vars("y", n)


@dataclass(frozen=True)
class SeedA:
    quiver: Quiver
    vars: tuple

    @classmethod
    def initial(cls, Q: Quiver) -> "SeedA":
        names = x_ring(Q.n)
        return cls(Q, tuple(LaurentPoly.var(names, v) for v in names))


def mutate_seed_a(S: SeedA, k: int) -> SeedA:
    Q = S.quiver
    if not 1 <= k <= Q.n:
        raise ValueError(f"vertex {k} out of range")
    one = S.vars[0] ** 0
    pos, neg = one, one
    for j in range(1, Q.n + 1):
        q = Q.Q(k, j)
        if q > 0:
            pos = pos * S.vars[j - 1] ** q
        elif q < 0:
            neg = neg * S.vars[j - 1] ** (-q)
    new = exact_divide(pos + neg, S.vars[k - 1])
    vars = list(S.vars)
    vars[k - 1] = new
    return SeedA(mutate_quiver(Q, k), tuple(vars))


def _strip_monomial_content(p: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Split p = m * r with m a monomial and r having componentwise min exponent 0."""
    nv = len(p.vars)
    mins = tuple(min(e[j] for e, _ in p.terms) for j in range(nv))
    m = p.like({mins: 1})
    r = p.like({tuple(x - y for x, y in zip(e, mins)): c for e, c in p.terms})
    return m, r


def reduce_fraction(num: LaurentPoly, den: LaurentPoly,
                    candidates: Sequence[LaurentPoly] = ()) -> tuple:
    """Cancel monomial content and repeated common factors from ``candidates``."""
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return num, num ** 0
    mn, rn = _strip_monomial_content(num)
    md, rd = _strip_monomial_content(den)
    mono = exact_divide(mn, md)
    # normalize sign so the denominator's leading coefficient is positive
    if rd.leading()[1] < 0:
        rd, rn = -rd, -rn
    changed = True
    while changed:
        changed = False
        for f in candidates:
            if f.is_monomial() or f.is_zero():
                continue
            while True:
                try:
                    qn = exact_divide(rn, f)
                    qd = exact_divide(rd, f)
                except NotDivisible:
                    break
                rn, rd = qn, qd
                changed = True
    # keep the leftover monomial on whichever side it belongs
    (e, c), = mono.terms
    pos = num.like({tuple(max(x, 0) for x in e): c})
    neg = num.like({tuple(max(-x, 0) for x in e): 1})
    return pos * rn, neg * rd


@dataclass(frozen=True)
class SeedX:
    quiver: Quiver
    vars: tuple  # tuple of (numerator, denominator) pairs

    @classmethod
    def initial(cls, Q: Quiver) -> "SeedX":
        names = y_ring(Q.n)
        one = LaurentPoly.one(names)
        return cls(Q, tuple((LaurentPoly.var(names, v), one) for v in names))

    def equals(self, other: "SeedX") -> bool:
        """Equality as rational functions (cross-multiplied)."""
        if self.quiver != other.quiver:
            return False
        return all(a * d == b * c for (a, b), (c, d) in zip(self.vars, other.vars))


def mutate_seed_x(S: SeedX, k: int) -> SeedX:
    Q = S.quiver
    if not 1 <= k <= Q.n:
        raise ValueError(f"vertex {k} out of range")
    p, q = S.vars[k - 1]
    s = p + q  # 1 + y_k = (p + q) / q
    out = []
    for i in range(1, Q.n + 1):
        a, b = S.vars[i - 1]
        if i == k:
            out.append(reduce_fraction(q, p, (p, q, s)))
            continue
        qik = Q.Q(i, k)
        if qik == 0:
            out.append((a, b))
            continue
        # y_i * y_k^{[Q_ik]+} * (1 + y_k)^{-Q_ik}
        num, den = a, b
        if qik > 0:
            num = num * p ** qik
            den = den * s ** qik
        else:
            num = num * s ** (-qik)
            den = den * q ** (-qik)
        out.append(reduce_fraction(num, den, (p, q, s)))
    return SeedX(mutate_quiver(Q, k), tuple(out))


def p_map(Q: Quiver, p: LaurentPoly) -> LaurentPoly:
    """Substitute y_i -> prod_j x_j^{Q_ij}."""
    xs = x_ring(Q.n)
    mapping = {f"y{i}": LaurentPoly.monomial(xs, [Q.Q(i, j) for j in range(1, Q.n + 1)])
               for i in range(1, Q.n + 1)}
    return substitute(p, mapping, target=LaurentPoly.one(xs))


def p_map_seed(S: SeedA) -> SeedX:
    """The X-seed whose entries are p-map images of the A-seed: prod_j x_j^{Q_ij}."""
    Q = S.quiver
    one = S.vars[0] ** 0
    out = []
    for i in range(1, Q.n + 1):
        num, den = one, one
        for j in range(1, Q.n + 1):
            q = Q.Q(i, j)
            if q > 0:
                num = num * S.vars[j - 1] ** q
            elif q < 0:
                den = den * S.vars[j - 1] ** (-q)
        out.append((num, den))
    return SeedX(Q, tuple(out))


def commuting_square(Q: Quiver, seq: Sequence[int]) -> bool:
    """Check p-map ∘ (A-mutation) = (X-mutation) ∘ p-map along ``seq``.

    The right-hand side mutates the X-seed whose entries are the
    p-images of the initial x's, treated as rational functions in x.
    """
    A = SeedA.initial(Q)
    X = p_map_seed(A)
    for k in seq:
        A = mutate_seed_a(A, k)
        X = mutate_seed_x(X, k)
    return p_map_seed(A).equals(X)

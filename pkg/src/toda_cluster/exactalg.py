"""Exact Laurent polynomials with a shared fractional exponent lattice.

A ring is fixed by an ordered tuple of variable names and a positive
integer denominator ``den``.  A monomial exponent is stored as a tuple of
integer numerators; the actual exponent of variable ``j`` is
``e[j] / den``.  Coefficients are Python integers.
"""

from __future__ import annotations

import heapq
import json
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .kernels import poly_mul


class RingMismatch(ValueError):
    pass


class NotDivisible(ArithmeticError):
    pass


class NonIntegralExponent(ValueError):
    pass


def _check_ring(a: "LaurentPoly", b: "LaurentPoly") -> None:
    if a.vars != b.vars or a.den != b.den:
        raise RingMismatch(
            f"ring mismatch: {a.vars}/{a.den} vs {b.vars}/{b.den}")


_PACK_THRESHOLD = 256


def _packed_product(t1: dict, t2: dict, nv: int) -> dict | None:
    """Product of two term dicts via mixed-radix exponent keys.

    Each exponent is shifted to be non-negative and encoded with radices
    large enough that adding two keys never carries.  Returns ``None`` when
    the keys would not fit in 62 bits.
    """
    lo1 = [min(e[j] for e in t1) for j in range(nv)]
    lo2 = [min(e[j] for e in t2) for j in range(nv)]
    radix, stride, total = [], [], 1
    for j in range(nv):
        w1 = max(e[j] for e in t1) - lo1[j]
        w2 = max(e[j] for e in t2) - lo2[j]
        stride.append(total)
        radix.append(w1 + w2 + 1)
        total *= w1 + w2 + 1
    if total >= 1 << 62:
        return None

    def pack(t, lo):
        keys = []
        for e in t:
            k = 0
            for x, l, st in zip(e, lo, stride):
                k += (x - l) * st
            keys.append(k)
        return keys

    keys, coefs = poly_mul(pack(t1, lo1), list(t1.values()),
                           pack(t2, lo2), list(t2.values()))
    base = [a + b for a, b in zip(lo1, lo2)]
    out = {}
    for k, c in zip(keys, coefs):
        e = []
        for r, b in zip(radix, base):
            k, x = divmod(k, r)
            e.append(x + b)
        out[tuple(e)] = c
    return out


class LaurentPoly:
    """Immutable Laurent polynomial over Z with exponents in (1/den)Z."""

    __slots__ = ("vars", "den", "_terms", "_hash")

    def __init__(self, vars: Sequence[str], den: int = 1,
                 terms: Mapping[tuple, int] | Iterable | None = None):
        self.vars = tuple(vars)
        if den < 1:
            raise ValueError("denominator must be positive")
        self.den = int(den)
        nv = len(self.vars)
        clean: dict[tuple, int] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for e, c in items:
                e = tuple(int(x) for x in e)
                if len(e) != nv:
                    raise ValueError("exponent length does not match variables")
                c = int(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if clean[e] == 0:
                        del clean[e]
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, vars, den=1):
        return cls(vars, den)

    @classmethod
    def const(cls, vars, c, den=1):
        return cls(vars, den, {(0,) * len(tuple(vars)): c})

    @classmethod
    def one(cls, vars, den=1):
        return cls.const(vars, 1, den)

    @classmethod
    def var(cls, vars, name, den=1, power=1):
        """The monomial ``name**power``; ``power`` may be a Fraction."""
        vars = tuple(vars)
        e = [0] * len(vars)
        num = Fraction(power) * den
        if num.denominator != 1:
            raise NonIntegralExponent(f"{power} not in (1/{den})Z")
        e[vars.index(name)] = int(num)
        return cls(vars, den, {tuple(e): 1})

    @classmethod
    def monomial(cls, vars, exps: Mapping[str, Fraction | int] | Sequence,
                 den=1, coeff=1):
        """Monomial from true (possibly fractional) exponents."""
        vars = tuple(vars)
        if isinstance(exps, Mapping):
            vec = [Fraction(0)] * len(vars)
            for k, v in exps.items():
                vec[vars.index(k)] += Fraction(v)
        else:
            vec = [Fraction(v) for v in exps]
        nums = []
        for v in vec:
            x = v * den
            if x.denominator != 1:
                raise NonIntegralExponent(f"{v} not in (1/{den})Z")
            nums.append(int(x))
        return cls(vars, den, {tuple(nums): coeff})

    def like(self, terms) -> "LaurentPoly":
        return LaurentPoly(self.vars, self.den, terms)

    def _from_clean(self, terms: dict) -> "LaurentPoly":
        """Wrap an already normalised term dict (int keys, nonzero ints)."""
        p = LaurentPoly.__new__(LaurentPoly)
        p.vars, p.den, p._terms, p._hash = self.vars, self.den, terms, None
        return p

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> list[tuple[tuple, int]]:
        """Terms in canonical (lexicographic) order."""
        return sorted(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def coefficients(self) -> list[int]:
        return [c for _, c in self.terms]

    def exponent(self, e) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in e)

    def constant_value(self):
        if not self._terms:
            return 0
        if len(self._terms) == 1:
            e, c = next(iter(self._terms.items()))
            if not any(e):
                return c
        raise ValueError("not a constant")

    def leading(self) -> tuple[tuple, int]:
        e = max(self._terms)
        return e, self._terms[e]

    def trailing(self) -> tuple[tuple, int]:
        e = min(self._terms)
        return e, self._terms[e]

    def has_integral_exponents(self) -> bool:
        return all(x % self.den == 0 for e in self._terms for x in e)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            _check_ring(self, other)
            return other
        if isinstance(other, int):
            return LaurentPoly.const(self.vars, other, self.den)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self._terms)
        for e, c in other._terms.items():
            t[e] = t.get(e, 0) + c
        return self.like(t)

    __radd__ = __add__

    def __neg__(self):
        return self.like({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self._terms) * len(other._terms) > _PACK_THRESHOLD:
            t = _packed_product(self._terms, other._terms, len(self.vars))
            if t is not None:
                return self._from_clean(t)
        t: dict[tuple, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return self.like(t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("integer powers only")
        if k < 0:
            if not self.is_monomial():
                raise NotDivisible("negative power of a non-monomial")
            (e, c), = self._terms.items()
            if c not in (1, -1):
                raise NotDivisible("negative power with non-unit coefficient")
            return self.like({tuple(-k * x for x in e): c ** (-k)})
        if k == 0:
            return LaurentPoly.one(self.vars, self.den)
        result = None
        base = self
        while True:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if not k:
                return result
            base = base * base

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(self.vars, other, self.den)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (self.vars == other.vars and self.den == other.den
                and self._terms == other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, self.den, tuple(self.terms)))
        return self._hash

    # -- ring changes -------------------------------------------------
    def change_den(self, den: int) -> "LaurentPoly":
        """Re-express over denominator ``den`` (exact or error)."""
        t = {}
        for e, c in self._terms.items():
            ne = []
            for x in e:
                q, r = divmod(x * den, self.den)
                if r:
                    raise NonIntegralExponent(
                        f"exponent {x}/{self.den} not in (1/{den})Z")
                ne.append(q)
            t[tuple(ne)] = c
        return LaurentPoly(self.vars, den, t)

    def reduce_den(self) -> "LaurentPoly":
        """Smallest denominator dividing ``den`` that represents self."""
        from math import gcd
        g = self.den
        for e in self._terms:
            for x in e:
                g = gcd(g, x)
        return self.change_den(self.den // g) if g > 1 else self

    # -- serialization ------------------------------------------------
    def to_dict(self) -> dict:
        return {"vars": list(self.vars), "den": self.den,
                "terms": [{"c": str(c), "e": list(e)} for e, c in self.terms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentPoly":
        return cls(d["vars"], d["den"],
                   [(tuple(t["e"]), int(t["c"])) for t in d["terms"]])

    @classmethod
    def from_json(cls, s: str) -> "LaurentPoly":
        return cls.from_dict(json.loads(s))

    def _mono_str(self, e) -> str:
        parts = []
        for name, x in zip(self.vars, e):
            if x == 0:
                continue
            f = Fraction(x, self.den)
            if f == 1:
                parts.append(name)
            elif f.denominator == 1:
                parts.append(f"{name}^{f.numerator}")
            else:
                parts.append(f"{name}^({f})")
        return "*".join(parts)

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for e, c in self.terms:
            m = self._mono_str(e)
            if not m:
                s = str(c)
            elif c == 1:
                s = m
            elif c == -1:
                s = "-" + m
            else:
                s = f"{c}*{m}"
            out.append(s)
        return " + ".join(out).replace("+ -", "- ")

    def __repr__(self):
        return f"LaurentPoly({self})"


def poly_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    _check_ring(a, b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def exact_divide(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Return q with q*b == a, or raise NotDivisible.

    Leading-term division in lex order.  Newton polytopes add under
    multiplication, so every quotient exponent lies in the box
    [min(a)-min(b), max(a)-max(b)] coordinatewise; leaving it proves
    non-divisibility and guarantees termination.
    """
    _check_ring(a, b)
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if a.is_zero():
        return a
    nv = len(a.vars)
    lo = [min(e[j] for e in a._terms) - min(e[j] for e in b._terms)
          for j in range(nv)]
    hi = [max(e[j] for e in a._terms) - max(e[j] for e in b._terms)
          for j in range(nv)]
    if any(l > h for l, h in zip(lo, hi)):
        raise NotDivisible("not divisible")
    eb, cb = b.leading()
    btail = [(e, c) for e, c in b._terms.items() if e != eb]
    rem = dict(a._terms)
    # max-heap of remainder exponents; every new exponent is below the current
    # leading one, so stale heap entries are simply skipped
    heap = [tuple(-x for x in e) for e in rem]
    heapq.heapify(heap)
    q: dict[tuple, int] = {}
    while rem:
        er = tuple(-x for x in heapq.heappop(heap))
        cr = rem.pop(er, 0)
        if not cr:
            continue
        if cr % cb:
            raise NotDivisible("not divisible")
        eq = tuple(x - y for x, y in zip(er, eb))
        if any(x < l or x > h for x, l, h in zip(eq, lo, hi)):
            raise NotDivisible("not divisible")
        cq = cr // cb
        q[eq] = cq
        for e, c in btail:
            ee = tuple(x + y for x, y in zip(eq, e))
            old = rem.get(ee)
            v = (old or 0) - cq * c
            if v:
                rem[ee] = v
                if old is None:
                    heapq.heappush(heap, tuple(-x for x in ee))
            elif old is not None:
                del rem[ee]
    return a.like(q)


def divides(a: LaurentPoly, b: LaurentPoly) -> bool:
    """True iff ``b`` divides ``a`` exactly."""
    try:
        exact_divide(a, b)
        return True
    except NotDivisible:
        return False


def substitute(p: LaurentPoly, mapping: Mapping[str, LaurentPoly],
               target: LaurentPoly | None = None) -> LaurentPoly:
    """Substitute each variable of ``p`` by a polynomial of the target ring.

    Images attached to variables that occur with fractional or negative
    exponents must be monomials (coefficient 1 when the power is
    fractional).  The target ring is taken from the images, or from
    ``target`` when given.
    """
    ref = target
    for v in p.vars:
        if v not in mapping:
            raise KeyError(f"unmapped variable {v!r}")
        if ref is None:
            ref = mapping[v]
    if ref is None:  # ring without variables
        return p
    for v in p.vars:
        _check_ring(ref, mapping[v])
    tv, tden = ref.vars, ref.den
    mono = {}
    for v in p.vars:
        img = mapping[v]
        if img.is_monomial():
            (e, c), = img._terms.items()
            mono[v] = (e, c)
    one = LaurentPoly.one(tv, tden)
    out = LaurentPoly.zero(tv, tden)
    for e, c in p._terms.items():
        acc = [Fraction(0)] * len(tv)
        coeff = c
        poly = one
        for v, x in zip(p.vars, e):
            if not x:
                continue
            f = Fraction(x, p.den)
            if v in mono:
                me, mc = mono[v]
                if mc != 1:
                    if f.denominator != 1:
                        raise NonIntegralExponent(
                            f"fractional power of coefficient {mc}")
                    if f < 0 and mc not in (1, -1):
                        raise NotDivisible("negative power of a coefficient")
                    coeff *= mc ** abs(int(f))
                for j, y in enumerate(me):
                    if y:
                        acc[j] += y * f
            else:
                if f.denominator != 1 or f < 0:
                    raise NonIntegralExponent(
                        f"fractional/negative power of non-monomial image of {v}")
                poly = poly * mapping[v] ** int(f)
        for a in acc:
            if a.denominator != 1:
                raise NonIntegralExponent(
                    f"non-integral exponents after substitution ({a}/{tden})")
        out = out + poly * LaurentPoly(tv, tden, {tuple(int(a) for a in acc): coeff})
    return out


class PolyMatrix:
    """Square matrix of LaurentPoly entries over a single ring."""

    __slots__ = ("size", "entries", "vars", "den")

    def __init__(self, entries: Sequence[Sequence[LaurentPoly]]):
        rows = [tuple(r) for r in entries]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square and nonempty")
        ref = rows[0][0]
        for r in rows:
            for x in r:
                _check_ring(ref, x)
        self.size = n
        self.entries = tuple(rows)
        self.vars = ref.vars
        self.den = ref.den

    @classmethod
    def identity(cls, size, vars, den=1):
        z = LaurentPoly.zero(vars, den)
        o = LaurentPoly.one(vars, den)
        return cls([[o if i == j else z for j in range(size)]
                    for i in range(size)])

    @classmethod
    def from_ints(cls, rows, vars, den=1):
        return cls([[LaurentPoly.const(vars, int(c), den) for c in r]
                    for r in rows])

    @classmethod
    def diagonal(cls, diag: Sequence[LaurentPoly]):
        z = diag[0] - diag[0]
        n = len(diag)
        return cls([[diag[i] if i == j else z for j in range(n)]
                    for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.size != other.size:
            raise ValueError("size mismatch")
        n = self.size
        z = LaurentPoly.zero(self.vars, self.den)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = z
                for k in range(n):
                    a = self.entries[i][k]
                    if a.is_zero():
                        continue
                    b = other.entries[k][j]
                    if not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def scale(self, c: LaurentPoly) -> "PolyMatrix":
        return PolyMatrix([[c * x for x in r] for r in self.entries])

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix([[fn(x) for x in r] for r in self.entries])

    def minor(self, rows: Sequence[int], cols: Sequence[int]) -> LaurentPoly:
        """Determinant of the submatrix on ``rows`` x ``cols``."""
        memo: dict[tuple, LaurentPoly] = {}
        rows = tuple(rows)
        z = LaurentPoly.zero(self.vars, self.den)

        def rec(depth: int, cols_left: tuple) -> LaurentPoly:
            if depth == len(rows):
                return LaurentPoly.one(self.vars, self.den)
            key = cols_left
            if key in memo:
                return memo[key]
            acc = z
            r = rows[depth]
            for pos, c in enumerate(cols_left):
                a = self.entries[r][c]
                if a.is_zero():
                    continue
                sub = rec(depth + 1, cols_left[:pos] + cols_left[pos + 1:])
                if sub.is_zero():
                    continue
                term = a * sub
                acc = acc - term if pos % 2 else acc + term
            memo[key] = acc
            return acc

        return rec(0, tuple(cols))

    def det(self) -> LaurentPoly:
        idx = tuple(range(self.size))
        return self.minor(idx, idx)

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]"
                         for r in self.entries)


def exterior_trace(M: PolyMatrix, k: int) -> LaurentPoly:
    """Trace of the k-th exterior power: the sum of principal k-minors."""
    if not 0 <= k <= M.size:
        raise ValueError(f"k={k} out of range 0..{M.size}")
    terms = (M.minor(S, S) for S in combinations(range(M.size), k))
    return reduce(lambda a, b: a + b, terms,
                  LaurentPoly.zero(M.vars, M.den))


def ring_vars(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, count + 1))

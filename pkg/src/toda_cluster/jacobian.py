"""The quiver with potential (Q_n, W_n), the modules M_i^lambda, and their
cluster characters.

Paths are written as words composed right to left: in ``a1 l2 b2 r1`` the
arrow ``r1`` is traversed first.  Module matrices act on column vectors,
so the matrix of a word is the product of the letter matrices in written
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .exactalg import LaurentPoly
from .kernels import closed_subsets
from .toda import to_x, x_vars, y_one, y_vars

# -- the labelled quiver and its potential ----------------------------------

def arrows(n: int) -> dict[str, tuple[int, int]]:
    """Labelled arrows of Q_n: name -> (source, target)."""
    out = {}
    for i in range(1, n + 1):
        out[f"a{i}"] = (2 * i - 1, 2 * i)
        out[f"b{i}"] = (2 * i - 1, 2 * i)
        if i < n:
            out[f"r{i}"] = (2 * i, 2 * i + 1)
        if i >= 2:
            out[f"l{i}"] = (2 * i, 2 * i - 3)
    return out


def potential_terms(n: int) -> list[tuple[int, tuple[str, ...]]]:
    """Signed cyclic words of W_n = sum a_i l_{i+1} b_{i+1} r_i - b_i l_{i+1} a_{i+1} r_i."""
    out = []
    for i in range(1, n):
        out.append((1, (f"a{i}", f"l{i + 1}", f"b{i + 1}", f"r{i}")))
        out.append((-1, (f"b{i}", f"l{i + 1}", f"a{i + 1}", f"r{i}")))
    return out


def cyclic_derivatives(n: int) -> dict[str, list[tuple[int, tuple[str, ...]]]]:
    """For each arrow x, the signed words of d_x W (rotate x to the front, drop it)."""
    out: dict[str, list] = {x: [] for x in arrows(n)}
    for sign, word in potential_terms(n):
        for p, x in enumerate(word):
            out[x].append((sign, word[p + 1:] + word[:p]))
    return out


def word_endpoints(n: int, word: Sequence[str]) -> tuple[int, int]:
    """(source, target) of a right-to-left word; raises if not composable."""
    arr = arrows(n)
    src, cur = None, None
    for x in reversed(word):
        s, t = arr[x]
        if cur is not None and s != cur:
            raise ValueError(f"word {word} is not composable")
        if src is None:
            src = s
        cur = t
    return src, cur


@dataclass(frozen=True)
class PathTuple:
    s: int
    t: int
    lam: int  # number of l-arrows
    rho: int  # number of r-arrows
    a: int
    b: int


def _col(v: int) -> int:
    return (v + 1) // 2


def forced_vertical_count(T: PathTuple) -> int:
    """Vertical (a/b) arrows on any path with the given endpoints and l/r counts."""
    return T.lam + T.rho + (T.t % 2 == 0) - (T.s % 2 == 0)


def is_basis_tuple(n: int, T: PathTuple) -> bool:
    if min(T.s, T.t) < 1 or max(T.s, T.t) > 2 * n:
        return False
    if min(T.lam, T.rho, T.a, T.b) < 0:
        return False
    cs, ct = _col(T.s), _col(T.t)
    return (T.rho - T.lam == ct - cs
            and T.rho <= n - cs
            and T.lam < cs
            and T.a + T.b == forced_vertical_count(T))


# -- coefficient quivers -----------------------------------------------------

@dataclass(frozen=True)
class CoefficientQuiver:
    n: int
    i: int
    vertices: tuple  # (t, l) pairs, sorted by (l, t)
    edges: tuple  # ((t, l), (t', l')) pairs

    def successor_masks(self) -> list[int]:
        idx = {v: k for k, v in enumerate(self.vertices)}
        succ = [0] * len(self.vertices)
        for u, w in self.edges:
            succ[idx[u]] |= 1 << idx[w]
        return succ


def basis(n: int, i: int) -> tuple:
    if not 1 <= i <= n:
        raise ValueError(f"i={i} out of range 1..{n}")
    return tuple((t, l) for l in range(i)
                 for t in range(2 * (i - l) - 1, 2 * (n - l) + 1))


def build_coefficient_quiver(n: int, i: int) -> CoefficientQuiver:
    """Gamma_i: t_l -> (t+1)_l, and t_l -> (t-3)_{l+1} for even t."""
    verts = basis(n, i)
    vs = set(verts)
    edges = []
    for t, l in verts:
        if (t + 1, l) in vs:
            edges.append(((t, l), (t + 1, l)))
        if t % 2 == 0 and (t - 3, l + 1) in vs:
            edges.append(((t, l), (t - 3, l + 1)))
    return CoefficientQuiver(n, i, verts, tuple(edges))


def _dimension_vector(n: int, verts, mask: int) -> tuple[int, ...]:
    d = [0] * (2 * n)
    for k, (t, _) in enumerate(verts):
        if (mask >> k) & 1:
            d[t - 1] += 1
    return tuple(d)


def enumerate_submodules(G: CoefficientQuiver) -> list[tuple[int, ...]]:
    """Dimension vectors of successor-closed subquivers, sorted."""
    masks = closed_subsets(len(G.vertices), G.successor_masks())
    return sorted(_dimension_vector(G.n, G.vertices, m) for m in masks)


def nu(n: int, i: int) -> int:
    """The Nakayama involution on {1..n}."""
    return n + 1 - i


def coindex_monomial(n: int, i: int) -> LaurentPoly:
    """x_{2nu(i)-1} x_{2nu(i)}^{-1}."""
    v = nu(n, i)
    return LaurentPoly.monomial(x_vars(n), {f"x{2 * v - 1}": 1, f"x{2 * v}": -1})


def y_generating_sum(n: int, dims: Sequence[Sequence[int]],
                     mult: Sequence[int] | None = None) -> LaurentPoly:
    ring = y_one(n)
    total = ring - ring
    for k, e in enumerate(dims):
        c = 1 if mult is None else mult[k]
        total = total + LaurentPoly.monomial(y_vars(n), list(e), ring.den, c)
    return total


def cluster_character(n: int, i: int) -> LaurentPoly:
    """x_{2nu-1} x_{2nu}^{-1} sum_N y^{dim N} over submodules of M_i."""
    dims = enumerate_submodules(build_coefficient_quiver(n, i))
    return coindex_monomial(n, i) * to_x(n, y_generating_sum(n, dims))


# -- concrete modules ----------------------------------------------------------

@dataclass(frozen=True)
class ConcreteModule:
    n: int
    i: int
    lam: tuple  # (lambda1, lambda2) as Fractions
    basis: tuple  # (t, l) pairs
    matrices: dict  # arrow name -> dim x dim tuple-of-tuples of Fractions
    free_letter: str  # "a" or "b": the letter absent from basis paths

    @property
    def dim(self) -> int:
        return len(self.basis)

    def dimension_vector(self) -> tuple[int, ...]:
        return _dimension_vector(self.n, self.basis, (1 << self.dim) - 1)

    def word_matrix(self, word: Sequence[str]):
        M = _identity(self.dim)
        for x in word:
            M = _matmul(M, self.matrices[x])
        return M


def _identity(d):
    return tuple(tuple(Fraction(int(r == c)) for c in range(d)) for r in range(d))


def _zero(d):
    return tuple(tuple(Fraction(0) for _ in range(d)) for _ in range(d))


def _matmul(A, B):
    d = len(A)
    Bt = list(zip(*B))
    return tuple(tuple(sum((A[r][k] * Bt[c][k] for k in range(d) if A[r][k]),
                           Fraction(0)) for c in range(d)) for r in range(d))


def _is_zero(A) -> bool:
    return all(x == 0 for row in A for x in row)


def _parse_lambda(lam) -> tuple[Fraction, Fraction]:
    if isinstance(lam, str):
        p, q = lam.split(":")
        lam = (p, q)
    l1, l2 = (Fraction(x) for x in lam)
    if l1 == 0 and l2 == 0:
        raise ValueError("degenerate lambda (0:0)")
    return l1, l2


@lru_cache(maxsize=None)
def _build_module(n: int, i: int, l1: Fraction, l2: Fraction) -> ConcreteModule:
    B = basis(n, i)
    idx = {v: k for k, v in enumerate(B)}
    d = len(B)
    # basis paths avoid the letter that can be rewritten through the relation
    # p(l1 a_i + l2 b_i) = 0; a-free needs l1 != 0, b-free needs l2 != 0
    free = "a" if l1 != 0 else "b"
    if free == "a":
        coeff = {"a": -l2 / l1, "b": Fraction(1)}
    else:
        coeff = {"a": Fraction(1), "b": -l1 / l2}
    mats = {}
    for name, (s, t) in arrows(n).items():
        M = [[Fraction(0)] * d for _ in range(d)]
        kind = name[0]
        for (u, l), col in idx.items():
            if u != s:
                continue
            if kind in "ab":
                target, c = (t, l), coeff[kind]
            elif kind == "r":
                target, c = (t, l), Fraction(1)
            else:  # l-arrow raises the l-count
                target, c = (t, l + 1), Fraction(1)
            if target in idx and c:
                M[idx[target]][col] = c
        mats[name] = tuple(tuple(r) for r in M)
    return ConcreteModule(n, i, (l1, l2), B, mats, free)


def build_module_matrices(n: int, i: int, lam=(1, 1)) -> ConcreteModule:
    """Explicit arrow matrices of M_i^lambda in the path basis t_l."""
    l1, l2 = _parse_lambda(lam)
    return _build_module(n, i, l1, l2)


def relation_defects(mod: ConcreteModule) -> list[str]:
    """Arrows whose cyclic-derivative relation fails on the module (empty if all hold)."""
    bad = []
    for x, terms in cyclic_derivatives(mod.n).items():
        acc = None
        for sign, word in terms:
            M = mod.word_matrix(word)
            if sign < 0:
                M = tuple(tuple(-v for v in r) for r in M)
            acc = M if acc is None else tuple(
                tuple(p + q for p, q in zip(r1, r2)) for r1, r2 in zip(acc, M))
        if acc is not None and not _is_zero(acc):
            bad.append(x)
    return bad


def e_operator(mod: ConcreteModule, t: int):
    """The cycle E_t at vertex t (through the basis letter), as a dim x dim matrix."""
    n, c = mod.n, ("b" if mod.free_letter == "a" else "a")
    if t % 2 == 0:
        j = t // 2
        word = (f"{c}{j}", f"l{j + 1}", f"{c}{j + 1}", f"r{j}")
    else:
        j = (t + 1) // 2
        word = (f"l{j + 1}", f"{c}{j + 1}", f"r{j}", f"{c}{j}")
    if j + 1 > n:
        return None
    return mod.word_matrix(word)


def check_cyclic_shifts(mod: ConcreteModule) -> bool:
    """At every vertex, E_t maps t_l to a nonzero multiple of t_{l+1}.

    A single nilpotent Jordan block at each vertex forces every submodule
    to be spanned by basis vectors.
    """
    idx = {v: k for k, v in enumerate(mod.basis)}
    for t in range(1, 2 * mod.n + 1):
        at_t = sorted(l for (u, l) in mod.basis if u == t)
        if len(at_t) <= 1:
            continue
        E = e_operator(mod, t)
        if E is None:
            return False
        for l in at_t:
            col = idx[(t, l)]
            for (u, l2), row in idx.items():
                v = E[row][col]
                expect_nonzero = (u == t and l2 == l + 1)
                if bool(v) != expect_nonzero:
                    return False
    return True


def module_coefficient_masks(mod: ConcreteModule) -> list[int]:
    """Successor masks read off the nonzero entries of the arrow matrices."""
    succ = [0] * mod.dim
    for M in mod.matrices.values():
        for r in range(mod.dim):
            for c in range(mod.dim):
                if M[r][c]:
                    succ[c] |= 1 << r
    return succ


def module_submodules(mod: ConcreteModule) -> list[tuple[int, ...]]:
    """Dimension vectors of all submodules, found as invariant coordinate subspaces."""
    if not check_cyclic_shifts(mod):
        raise AssertionError("E_t operators are not cyclic shifts; "
                             "coordinate enumeration would be incomplete")
    masks = closed_subsets(mod.dim, module_coefficient_masks(mod))
    return sorted(_dimension_vector(mod.n, mod.basis, m) for m in masks)


def euler_characteristics(n: int, i: int, lam=(1, 1)) -> dict[tuple, int]:
    """chi(Gr_e M_i^lambda) for every dimension vector e with nonempty Grassmannian."""
    chi: dict[tuple, int] = {}
    for e in module_submodules(build_module_matrices(n, i, lam)):
        chi[e] = chi.get(e, 0) + 1
    return chi


def framed_generating_function(n: int, k: int, lam=(1, 1)) -> LaurentPoly:
    """x_{2k-1} x_{2k}^{-1} sum_e chi(Gr_e M_{nu(k)}) y^e."""
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    chi = euler_characteristics(n, nu(n, k), lam)
    dims = sorted(chi)
    pref = LaurentPoly.monomial(x_vars(n), {f"x{2 * k - 1}": 1, f"x{2 * k}": -1})
    return pref * to_x(n, y_generating_sum(n, dims, [chi[e] for e in dims]))

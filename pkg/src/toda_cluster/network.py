"""Spectral-network side: the standard local network, splittings, the
strong-coupling BPS quiver, homology bookkeeping, path lifting around the
unit circle, and a numerical tracer for wall trajectories.

Phases of the standard network are exact: a ``Fraction`` q stands for the
angle q*pi.  Sheets are labelled 0..N-1, sheet k carrying the root
omega^k (z + 1/z)^(1/N) with omega = exp(2 pi i / N).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .annular import AnnularGraph, Vertical, _face_samples, path_sum
from .cluster import Quiver
from .exactalg import LaurentPoly, PolyMatrix, exterior_trace, substitute
from .toda import to_x, y_vars


class NongenericPhase(ValueError):
    pass


def arg_omega(N: int, i: int, j: int) -> Fraction:
    """arg(omega^i - omega^j) / pi, exactly."""
    base = Fraction(i + j, N) + (Fraction(1, 2) if i > j else Fraction(-1, 2))
    return base % 2


# -- the standard network ----------------------------------------------------

@dataclass(frozen=True)
class Wall:
    label: tuple  # ordered pair of sheets
    phase: Fraction  # in units of pi, in [0, 2)


@dataclass(frozen=True)
class WallModel:
    N: int
    cut: Fraction  # branch-cut direction in units of pi, in (0, 2]
    walls: tuple

    def multiwalls(self) -> dict[Fraction, list[tuple]]:
        out: dict[Fraction, list] = {}
        for w in self.walls:
            out.setdefault(w.phase, []).append(w.label)
        return {p: sorted(v) for p, v in sorted(out.items())}


def standard_network(N: int, cut: Fraction = Fraction(1, 2)) -> WallModel:
    """Walls of W_N, labelled by solving (1 + 1/N) phi = -arg omega_ij mod 2pi.

    The solution is taken on the branch whose phase window is
    (cut - 2pi, cut); the window contains the positive real axis, where
    (z)^(1/N) is positive.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    cut = Fraction(cut)
    if not 0 < cut <= 2:
        raise ValueError("cut must lie in (0, 2]")
    walls = []
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            a = arg_omega(N, i, j)
            for m in range(-N - 2, N + 3):
                phi = Fraction(N, N + 1) * (2 * m - a)
                if cut - 2 < phi < cut:
                    walls.append(Wall((i, j), phi % 2))
    walls.sort(key=lambda w: (w.phase, w.label))
    return WallModel(N, cut, tuple(walls))


# -- splittings --------------------------------------------------------------

@dataclass(frozen=True)
class SplittingData:
    N: int
    theta: object  # representative phase
    positions: tuple  # k = 0..N: sorted label tuples of the multiwall at slot k
    Phi: frozenset
    Delta_a: frozenset
    Delta_b: frozenset
    sigma: tuple
    tau_a: tuple
    Delta_p_a: frozenset
    Delta_p_b: frozenset

    @property
    def Delta(self) -> frozenset:
        return self.Delta_a | self.Delta_b

    @property
    def Delta_p(self) -> frozenset:
        return self.Delta_p_a | self.Delta_p_b

    def alpha(self, k: int) -> tuple:
        return (self.sigma[k - 1], self.sigma[k])

    def alpha_p(self, k: int) -> tuple:
        t = self.tau_a
        return (t[self.sigma[k]], t[self.sigma[k - 1]])

    def in_a(self, k: int) -> bool:
        return self.alpha(k) in self.Delta_a

    def fingerprint(self) -> str:
        a = "".join("a" if self.in_a(k) else "b" for k in range(1, self.N))
        return f"N={self.N};sigma={''.join(map(str, self.sigma))};{a}"

    def to_dict(self) -> dict:
        fmt = lambda s: sorted(f"{i}{j}" for i, j in s)
        return {"N": self.N, "theta": str(self.theta),
                "Phi": fmt(self.Phi), "Delta_a": fmt(self.Delta_a),
                "Delta_b": fmt(self.Delta_b), "sigma": list(self.sigma),
                "tau_a": list(self.tau_a), "Delta_p_a": fmt(self.Delta_p_a),
                "Delta_p_b": fmt(self.Delta_p_b)}


def _chain_order(N: int, Delta: set) -> tuple:
    """The permutation sigma with Delta = {sigma_0 sigma_1, ..., sigma_{N-2} sigma_{N-1}}."""
    nxt = dict(Delta)
    if len(nxt) != len(Delta) or len(Delta) != N - 1:
        raise AssertionError(f"simple roots {sorted(Delta)} do not form a chain")
    seconds = {j for _, j in Delta}
    starts = [s for s in range(N) if s not in seconds]
    if len(starts) != 1:
        raise AssertionError(f"simple roots {sorted(Delta)} do not form a chain")
    seq = [starts[0]]
    while seq[-1] in nxt:
        seq.append(nxt[seq[-1]])
    if len(seq) != N:
        raise AssertionError(f"simple roots {sorted(Delta)} do not form a chain")
    return tuple(seq)


def _from_positions(N: int, theta, positions: Sequence[Sequence[tuple]]) -> SplittingData:
    positions = tuple(tuple(sorted(p)) for p in positions)
    Phi = frozenset(l for p in positions[1:] for l in p)
    Da, Db = frozenset(positions[N]), frozenset(positions[1])
    if Da & Db:
        raise AssertionError("Delta_a and Delta_b overlap")
    sigma = _chain_order(N, set(Da | Db))
    tau = list(range(N))
    for i, j in Da:
        if tau[i] != i or tau[j] != j:
            raise AssertionError("reflections in Delta_a do not commute")
        tau[i], tau[j] = j, i
    tau = tuple(tau)
    flip = lambda S: frozenset((tau[j], tau[i]) for i, j in S)
    return SplittingData(N, theta, positions, Phi, Da, Db, sigma, tau,
                         flip(Da), flip(Db))


def splitting(model: WallModel, theta) -> SplittingData:
    """Splitting S_theta of the standard network (theta in units of pi).

    A theta that is not a wall phase is snapped to the next wall
    counterclockwise.  The branch cut is moved out of [theta, theta+pi)
    when necessary.
    """
    N = model.N
    theta = Fraction(theta) % 2
    phases = sorted({w.phase for w in model.walls})
    if theta not in phases:
        later = [p for p in phases if p > theta]
        theta = later[0] if later else phases[0]
    rel = (model.cut - theta) % 2
    if rel < 1 or model.cut % 2 == theta:
        model = standard_network(N, (theta - Fraction(1, 2 * (N + 1))) % 2 or Fraction(2))
    slots = []
    for k in range(N + 1):
        ph = (theta + Fraction(k, N + 1)) % 2
        slots.append([w.label for w in model.walls if w.phase == ph])
    stray = [w for w in model.walls
             if (w.phase - theta) % 2 < 1 and ((w.phase - theta) % 2) * (N + 1) % 1]
    if stray:
        raise NongenericPhase("walls off the multiwall grid")
    return _from_positions(N, theta, slots)


def toda_splitting(N: int, theta: float) -> SplittingData:
    """Splitting at the branch point i formed by walls entering the unit disk.

    Near i the walls leave in directions psi with
    (1 + 1/N) psi = theta - arg(-2i omega_ij)  (mod 2pi), on the branch of
    (z - i)^(1/N) with psi in (-3pi/2, pi/2].  The inward walls are those
    with psi in (-pi, 0); clockwise order is decreasing psi.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    x = N * theta / math.pi
    if abs(x - round(x)) < 1e-9:
        raise NongenericPhase(f"theta={theta} is not generic for N={N}")
    slots: dict[int, list] = {}
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            q = arg_omega(N, i, j) - Fraction(1, 2)  # arg(-2i omega_ij)/pi
            for m in range(-2 * N - 2, 2 * N + 3):
                p = N * (2 * m - q)  # psi = (N theta + pi p)/(N+1)
                assert p.denominator == 1
                p = int(p)
                psi = (N * theta + math.pi * p) / (N + 1)
                if -1.5 * math.pi < psi <= 0.5 * math.pi and -math.pi < psi < 0:
                    slots.setdefault(p, []).append((i, j))
    lo = math.floor(-(N + 1) - x) + 1  # smallest p with psi > -pi
    ps = list(range(lo, lo + N + 1))
    if any(p not in ps for p in slots):
        raise AssertionError("inward wall outside the expected slots")
    return _from_positions(N, theta, [slots.get(p, []) for p in ps])


def scan_phases(N: int, offset: float = 0.1) -> list[float]:
    return [2 * math.pi * m / (4 * (N + 1)) + offset for m in range(4 * (N + 1))]


def scan_splittings(N: int) -> list[SplittingData]:
    """One representative per distinct splitting met over a 4(N+1)-phase scan."""
    seen, out = set(), []
    for th in scan_phases(N):
        S = toda_splitting(N, th)
        if S.fingerprint() not in seen:
            seen.add(S.fingerprint())
            out.append(S)
    return out


# -- homology -----------------------------------------------------------------

@dataclass(frozen=True)
class HomologyClass:
    """Class sum a_i A_i + b_i B_i (i = 1..N-1); coefficients may be fractional."""

    N: int
    a: tuple
    b: tuple

    @classmethod
    def zero(cls, N):
        z = (Fraction(0),) * (N - 1)
        return cls(N, z, z)

    @classmethod
    def A(cls, N, i):
        c = cls.zero(N)
        if i in (0, N):
            return c
        a = list(c.a)
        a[i - 1] = Fraction(1)
        return cls(N, tuple(a), c.b)

    @classmethod
    def B(cls, N, i):
        c = cls.zero(N)
        b = list(c.b)
        b[i - 1] = Fraction(1)
        return cls(N, c.a, tuple(b))

    def __add__(self, o):
        return HomologyClass(self.N, tuple(x + y for x, y in zip(self.a, o.a)),
                             tuple(x + y for x, y in zip(self.b, o.b)))

    def __neg__(self):
        return HomologyClass(self.N, tuple(-x for x in self.a), tuple(-x for x in self.b))

    def __sub__(self, o):
        return self + (-o)

    def __rmul__(self, c):
        c = Fraction(c)
        return HomologyClass(self.N, tuple(c * x for x in self.a), tuple(c * x for x in self.b))

    def is_integral(self) -> bool:
        return all(Fraction(x).denominator == 1 for x in self.a + self.b)

    def vector(self) -> tuple:
        return self.a + self.b


def pairing(x: HomologyClass, y: HomologyClass) -> Fraction:
    """Intersection pairing with <A_i, B_j> = delta_ij."""
    return sum((p * s - q * r for p, q, r, s in zip(x.a, x.b, y.a, y.b)), Fraction(0))


def quadratic_refinement(c: HomologyClass) -> int:
    """sigma(c) = (-1)^{sum b_i (a_i + 1)}: the refinement with A_i -> 1, B_i -> -1."""
    if not c.is_integral():
        raise ValueError("quadratic refinement needs an integral class")
    e = sum(int(b) * (int(a) + 1) for a, b in zip(c.a, c.b))
    return -1 if e % 2 else 1


def D_class(N: int, r: int) -> HomologyClass:
    """D_r = A_r - A_{r+1} (r = 0..N-1), with A_0 = A_N = 0 and D_0 = -A_1."""
    if r == 0:
        return -HomologyClass.A(N, 1)
    return HomologyClass.A(N, r) - HomologyClass.A(N, r + 1)


def bottom_class(N: int) -> HomologyClass:
    """D_N, the class of the bottom row of the network graph.

    It is fixed by N D_N + sum_k k (gamma_k + gamma'_k) = 0, which gives
    D_N = A_{N-1}; the class is integral and equals D_{N-1}.
    """
    return HomologyClass.A(N, N - 1)


def gamma_classes(S: SplittingData) -> tuple[list, list]:
    """(gamma_k, gamma'_k) for k = 1..N-1 in the A/B basis."""
    N = S.N
    A, B = (lambda i: HomologyClass.A(N, i)), (lambda i: HomologyClass.B(N, i))
    g, gp = [], []
    for k in range(1, N):
        other = A(k - 1) - 2 * A(k) + A(k + 1) - B(k)
        if S.in_a(k):
            g.append(B(k))
            gp.append(other)
        else:
            g.append(other)
            gp.append(B(k))
    return g, gp


def vertex_map(S: SplittingData) -> tuple[list[int], list[int]]:
    """Q_{N-1} vertices of gamma_k and gamma'_k."""
    vg = [2 * k if S.alpha(k) in S.Delta_b else 2 * k - 1 for k in range(1, S.N)]
    vgp = [2 * k if S.alpha_p(k) in S.Delta_p_a else 2 * k - 1 for k in range(1, S.N)]
    return vg, vgp


@dataclass(frozen=True)
class BPSData:
    positive: tuple  # (kind, root, class)
    basis: tuple  # (name, class, vertex)
    quiver: Quiver


def bps_spectrum(N: int, theta: float | None = None,
                 S: SplittingData | None = None) -> BPSData:
    if S is None:
        S = toda_splitting(N, theta)
    g, gp = gamma_classes(S)
    vg, vgp = vertex_map(S)
    basis = [(f"gamma{k}", g[k - 1], vg[k - 1]) for k in range(1, N)]
    basis += [(f"gamma'{k}", gp[k - 1], vgp[k - 1]) for k in range(1, N)]
    # positive roots are sums of consecutive simple roots along the chain
    pos = []
    sig = S.sigma
    tsig = tuple(S.tau_a[s] for s in reversed(sig))
    for p, q in combinations(range(N), 2):
        pos.append(("R", (sig[p], sig[q]), sum(g[p:q], HomologyClass.zero(N))))
        # consecutive pair m of tsig is alpha'_{N-1-m}, so the segment p..q-1
        # covers k = N-q .. N-1-p
        pos.append(("L", (tsig[p], tsig[q]),
                    sum(gp[N - 1 - q:N - 1 - p], HomologyClass.zero(N))))
    roots = {r for kind, r, _ in pos if kind == "R"}
    if roots != set(S.Phi):
        raise AssertionError("chain sums do not reproduce Phi")
    n = 2 * (N - 1)
    adj = [[0] * n for _ in range(n)]
    for (_, c1, v1), (_, c2, v2) in combinations(basis, 2):
        m = int(pairing(c1, c2))
        adj[v1 - 1][v2 - 1] += m
        adj[v2 - 1][v1 - 1] -= m
    return BPSData(tuple(pos), tuple(basis), Quiver(n, adj))


# -- path lifting around the unit circle -----------------------------------

def ab_vars(N: int) -> tuple[str, ...]:
    return tuple(f"A{i}" for i in range(1, N)) + tuple(f"B{i}" for i in range(1, N))


def class_monomial(c: HomologyClass) -> LaurentPoly:
    if not c.is_integral():
        raise ValueError("fractional class")
    return LaurentPoly(ab_vars(c.N), 1, {tuple(int(x) for x in c.vector()): 1})


def monomial_class(N: int, e: Sequence[int]) -> HomologyClass:
    e = [Fraction(x) for x in e]
    return HomologyClass(N, tuple(e[:N - 1]), tuple(e[N - 1:]))


@dataclass(frozen=True)
class CrossingEvent:
    kind: str  # "wall", "cut" or "arc"
    where: str  # "-i", "i", "W", "M" or "cut"
    data: tuple


def crossing_sequence(S: SplittingData) -> list[CrossingEvent]:
    """Events met by the clockwise unit circle starting at the basepoint 1."""
    N = S.N
    op = lambda r: (r[1], r[0])
    ks_a = [k for k in range(1, N) if S.in_a(k)]
    ks_b = [k for k in range(1, N) if not S.in_a(k)]
    ev = [CrossingEvent("cut", "cut", tuple(sorted(S.Delta_a)))]
    ev.append(CrossingEvent("arc", "M", ()))
    ev += [CrossingEvent("wall", "-i", S.alpha(k)) for k in ks_a]
    ev += [CrossingEvent("wall", "-i", op(S.alpha(k))) for k in ks_b]
    ev.append(CrossingEvent("arc", "W", ()))
    ev += [CrossingEvent("wall", "i", S.alpha(k)) for k in ks_b]
    ev += [CrossingEvent("wall", "i", op(S.alpha(k))) for k in ks_a]
    ev.append(CrossingEvent("cut", "cut", tuple(sorted(S.Delta_a))))
    return ev


def _arc_classes(S: SplittingData) -> tuple[list, list]:
    """Classes of the lifts of the two arcs, per wall-frame index q.

    The arc through -1 (region W) on sheet sigma_q carries
    D_q + sum_{k<=q} gamma'_k; the arc through 1 (region M) carries the
    complement -sum_{k<=q} gamma'_k, so that a full turn on one sheet is D_q.
    """
    N = S.N
    _, gp = gamma_classes(S)
    M, W = [], []
    acc = HomologyClass.zero(N)
    for q in range(N):
        if q >= 1:
            acc = acc + gp[q - 1]
        M.append(-acc)
        W.append(D_class(N, q) + acc)
    return M, W


def lift_path_wall_frame(S: SplittingData) -> PolyMatrix:
    """The transport between the two branch-cut crossings, in the frame where
    index q stands for sheet sigma_q.  A wall with root jk contributes
    1 + E_{jk}."""
    N = S.N
    vs = ab_vars(N)
    one = LaurentPoly.one(vs)
    zero = one - one
    pos = {s: r for r, s in enumerate(S.sigma)}
    M_cls, W_cls = _arc_classes(S)
    T = PolyMatrix.identity(N, vs)
    for e in crossing_sequence(S)[1:-1]:
        if e.kind == "arc":
            cls = M_cls if e.where == "M" else W_cls
            T = T @ PolyMatrix.diagonal([class_monomial(c) for c in cls])
        else:
            rows = [[one if u == v else zero for v in range(N)] for u in range(N)]
            rows[pos[e.data[0]]][pos[e.data[1]]] = one
            T = T @ PolyMatrix(rows)
    return T


def lift_path(S: SplittingData) -> PolyMatrix:
    """Parallel transport of the clockwise unit circle, based at 1.

    Rows and columns index the sheets in the frame just after the basepoint.
    The product is read left to right: entry (u, v) sums the lifts that
    start on sheet u and end on sheet v.  A wall with root jk contributes
    1 + E_{jk}; each branch cut contributes the permutation tau_a.
    """
    N = S.N
    one = LaurentPoly.one(ab_vars(N))
    zero = one - one

    def perm(p):
        return PolyMatrix([[one if p[u] == v else zero for v in range(N)] for u in range(N)])

    to_wall = PolyMatrix([[one if S.sigma[q] == s else zero for q in range(N)]
                          for s in range(N)])
    from_wall = PolyMatrix([[one if S.sigma[q] == s else zero for s in range(N)]
                            for q in range(N)])
    T = perm(S.tau_a) @ to_wall @ lift_path_wall_frame(S) @ from_wall @ perm(S.tau_a)
    for row in T.entries:
        for x in row:
            for ex, c in x.terms:
                if c != 1:
                    raise AssertionError("soliton coefficient other than 1")
    return T


def ab_to_y(S: SplittingData) -> dict[str, LaurentPoly]:
    """Express A_j and B_j as monomials in the y-variables of Q_{N-1}.

    A_j = (N - j) D + sum_{i>j} (i - j)(gamma_i + gamma'_i), where the
    bottom-row class D has y_D = prod_k (y_{2k-1} y_{2k})^{-k/N}.
    """
    N = S.N
    n = N - 1
    ys = y_vars(n)
    vg, vgp = vertex_map(S)
    out = {}
    for j in range(1, N):
        ex = {}
        for k in range(1, N):
            e = Fraction(-(N - j) * k, N) + (k - j if k > j else 0)
            ex[f"y{vg[k - 1]}"] = ex.get(f"y{vg[k - 1]}", 0) + e
            ex[f"y{vgp[k - 1]}"] = ex.get(f"y{vgp[k - 1]}", 0) + e
        out[f"A{j}"] = LaurentPoly.monomial(ys, ex, N)
        v = vg[j - 1] if S.in_a(j) else vgp[j - 1]
        out[f"B{j}"] = LaurentPoly.var(ys, f"y{v}", N)
    return out


def holonomy_trace(N: int, k: int, theta: float | None = None,
                   S: SplittingData | None = None, coords: str = "x") -> LaurentPoly:
    """tr of the k-th exterior power of the lifted transport, in cluster coordinates."""
    if S is None:
        S = toda_splitting(N, 0.1 if theta is None else theta)
    if not 1 <= k <= N:
        raise ValueError(f"k={k} out of range 1..{N}")
    t = exterior_trace(lift_path(S), k)
    n = N - 1
    ys = y_vars(n)
    y = substitute(t, ab_to_y(S), target=LaurentPoly.one(ys, N))
    if coords == "y":
        return y
    if n == 0:
        return y
    return to_x(n, y.change_den(n + 1))


def refinement_violations(S: SplittingData) -> list[HomologyClass]:
    """Monomial classes of tr(wedge^k T) (all k) on which sigma differs from 1."""
    T = lift_path(S)
    bad = []
    for k in range(1, S.N + 1):
        for e, _ in exterior_trace(T, k).terms:
            c = monomial_class(S.N, e)
            if quadratic_refinement(c) != 1:
                bad.append(c)
    return bad


# -- the graph N_W ---------------------------------------------------------

@dataclass(frozen=True)
class NetworkGraph:
    graph: AnnularGraph
    face_classes: dict  # vertical id -> HomologyClass of the face right of it
    splitting: SplittingData = field(repr=False)


def build_network_graph(S: SplittingData) -> NetworkGraph:
    """N rows; band i holds an up/down pair at (1/5, 4/5) if alpha_i is in
    Delta_b and at (3/5, 2/5) if in Delta_a.  The face of band i through
    angle 0 is gamma_i and the face through 1/2 is gamma'_i."""
    N = S.N
    g, gp = gamma_classes(S)
    vg, vgp = vertex_map(S)
    verts, classes = [], {}
    for i in range(1, N):
        if S.in_a(i):
            up, down = Fraction(3, 5), Fraction(2, 5)
        else:
            up, down = Fraction(1, 5), Fraction(4, 5)
        # face right of the vertical at 1/5 or 2/5 contains 1/2 -> gamma'
        for vid, ang, d in ((f"u{i}", up, "up"), (f"d{i}", down, "down")):
            middle = ang < Fraction(1, 2)
            label = f"y{vgp[i - 1] if middle else vg[i - 1]}"
            verts.append(Vertical(vid, i, ang, d, label))
            classes[vid] = gp[i - 1] if middle else g[i - 1]
    return NetworkGraph(AnnularGraph(N, tuple(verts)), classes, S)


def graph_transfer(NG: NetworkGraph, start: Fraction = Fraction(11, 20),
                   rotate: bool = True) -> PolyMatrix:
    """Leftward transfer matrix of the graph from angle ``start``, over the A/B ring.

    Horizontal segments on row r pick up the classes of the faces below r
    whose interior they pass over; every row also carries the bottom-row
    class, put on the first segment.  With ``rotate`` the diagonal factor of
    the closing segment is conjugated to the front, so that the result is
    comparable entrywise with ``lift_path_wall_frame``.
    """
    G, S = NG.graph, NG.splitting
    N = S.N
    vs = ab_vars(N)
    one = LaurentPoly.one(vs)
    zero = one - one
    samples = _face_samples(G)
    # events in travel order: decreasing angle starting just below ``start``
    order = sorted(G.verticals, key=lambda v: ((start - v.angle) % 1, v.vid))
    bottom = bottom_class(N)
    T = PolyMatrix.identity(N, vs)
    prev = start
    cuts = [v.angle for v in order] + [start]
    first = True
    for pos, ang in enumerate(cuts):
        diag = []
        for r in range(N):
            c = bottom if first else HomologyClass.zero(N)
            for vid, (band, theta) in samples.items():
                if band > r and prev != ang and _in_arc(prev, ang, theta):
                    c = c + NG.face_classes[vid]
            diag.append(class_monomial(c))
        first = False
        T = T @ PolyMatrix.diagonal(diag)
        if pos < len(order):
            v = order[pos]
            rows = [[one if u == w else zero for w in range(N)] for u in range(N)]
            rows[v.source_row][v.target_row] = one
            T = T @ PolyMatrix(rows)
        elif rotate:
            inv = PolyMatrix.diagonal([d ** -1 for d in diag])
            T = PolyMatrix.diagonal(diag) @ T @ inv
        prev = ang
    return T


def _in_arc(hi: Fraction, lo: Fraction, theta: Fraction) -> bool:
    """theta strictly inside the leftward arc from hi down to lo."""
    d_total = (hi - lo) % 1
    d = (hi - theta) % 1
    return 0 < d < d_total


def transfer_matches(S: SplittingData) -> bool:
    """Entrywise equality of the graph transfer and the wall-frame transport."""
    A = lift_path_wall_frame(S)
    B = graph_transfer(build_network_graph(S))
    return all(A[i, j] == B[i, j] for i in range(S.N) for j in range(S.N))


def transfer_invariants_agree(S: SplittingData) -> bool:
    """Do the lifted transport and the graph transfer matrix have equal
    traces on every exterior power?"""
    T = lift_path(S)
    G = graph_transfer(build_network_graph(S))
    return all(exterior_trace(T, k) == exterior_trace(G, k) for k in range(1, S.N + 1))


def network_graph_path_sum(NG: NetworkGraph, k: int) -> LaurentPoly:
    """Weighted k-tuple sum over N_W in the y-coordinates of Q_{N-1}."""
    S = NG.splitting
    n = S.N - 1
    base = substitute(class_monomial(bottom_class(S.N)), ab_to_y(S),
                      target=LaurentPoly.one(y_vars(n), S.N))
    return path_sum(NG.graph, k, base)


# -- wall trajectories ---------------------------------------------------------

@dataclass
class Trajectory:
    N: int
    phi: float
    t: np.ndarray
    z: np.ndarray
    w: np.ndarray
    step: float
    reason: str

    @property
    def radius(self) -> np.ndarray:
        return np.abs(self.z)

    def monotonicity(self, tol: float = 1e-9) -> str:
        d = np.diff(self.radius)
        if d.size == 0 or np.all(np.abs(d) <= tol):
            return "constant"
        if np.all(d <= tol):
            return "decreasing"
        if np.all(d >= -tol):
            return "increasing"
        return "mixed"

    def to_csv(self) -> str:
        lines = ["t,re_z,im_z,abs_z,branch_re,branch_im"]
        for t, z, w in zip(self.t, self.z, self.w):
            lines.append(f"{t:.12g},{z.real:.12g},{z.imag:.12g},{abs(z):.12g},"
                         f"{w.real:.12g},{w.imag:.12g}")
        return "\n".join(lines) + "\n"


def _nearest_root(z, w_prev, N):
    """The N-th root of z + 1/z closest to w_prev (vectorized)."""
    u = z + 1 / z
    base = u ** (1.0 / N)
    roots = base[:, None] * np.exp(2j * np.pi * np.arange(N) / N)[None, :]
    k = np.argmin(np.abs(roots - w_prev[:, None]), axis=1)
    return roots[np.arange(len(z)), k]


def _velocity(z, w, phi):
    return np.exp(1j * (phi + np.angle(z / w)))


def principal_branch(z: complex, N: int) -> complex:
    """The root of z + 1/z obtained by continuing the positive root on R+ along a ray."""
    return complex((z + 1 / z) ** (1.0 / N))


def trace_batch(N: int, phi: float, z0, w0=None, step: float = 1e-2,
                t_max: float = 10.0, tol: float = 1e-3) -> list[Trajectory]:
    """Integrate many trajectories at once with classical RK4 at unit speed."""
    z = np.asarray(z0, dtype=complex).ravel().copy()
    if np.any(np.abs(z) < tol) or np.any(np.abs(np.abs(z - 1j)) < tol) \
            or np.any(np.abs(z + 1j) < tol):
        raise ValueError("singular starting point")
    if w0 is None:
        w = (z + 1 / z) ** (1.0 / N)
    else:
        w = np.asarray(w0, dtype=complex).ravel().copy()
    M = len(z)
    active = np.ones(M, dtype=bool)
    t = np.zeros(M)
    hist_z, hist_w, hist_t = [[x] for x in z], [[x] for x in w], [[0.0] for _ in z]
    reasons = ["t_max"] * M
    while active.any():
        idx = np.nonzero(active)[0]
        zz, ww = z[idx], w[idx]
        near = np.minimum(np.abs(zz - 1j), np.abs(zz + 1j))
        h = np.where(near < 0.1, min(step, 0.01), step)
        h = np.minimum(h, np.minimum(near, np.abs(zz)) / 4)
        h = np.minimum(h, t_max - t[idx])
        k1 = _velocity(zz, ww, phi)
        z2 = zz + h / 2 * k1
        w2 = _nearest_root(z2, ww, N)
        k2 = _velocity(z2, w2, phi)
        z3 = zz + h / 2 * k2
        w3 = _nearest_root(z3, w2, N)
        k3 = _velocity(z3, w3, phi)
        z4 = zz + h * k3
        w4 = _nearest_root(z4, w3, N)
        k4 = _velocity(z4, w4, phi)
        znew = zz + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        wnew = _nearest_root(znew, w4, N)
        z[idx], w[idx] = znew, wnew
        t[idx] += h
        for a, i in enumerate(idx):
            hist_z[i].append(znew[a])
            hist_w[i].append(wnew[a])
            hist_t[i].append(t[i])
        done_t = t[idx] >= t_max - 1e-12
        done_0 = np.abs(znew) < tol
        done_b = (np.abs(znew - 1j) < tol) | (np.abs(znew + 1j) < tol)
        for a, i in enumerate(idx):
            if done_0[a]:
                reasons[i] = "origin"
            elif done_b[a]:
                reasons[i] = "branch point"
        active[idx[done_t | done_0 | done_b]] = False
    return [Trajectory(N, phi, np.array(hist_t[i]), np.array(hist_z[i]),
                       np.array(hist_w[i]), step, reasons[i]) for i in range(M)]


def trace_trajectory(N: int, phi: float, z0: complex, step: float = 1e-2,
                     t_max: float = 10.0, w0: complex | None = None) -> Trajectory:
    if step <= 0:
        raise ValueError("step must be positive")
    return trace_batch(N, phi, [z0], None if w0 is None else [w0], step, t_max)[0]


def tangential_phase(N: int, z0: complex, w0: complex | None = None,
                     sign: int = 1) -> float:
    """phi making the field tangent to the circle |z| = |z0| at z0."""
    w = principal_branch(z0, N) if w0 is None else w0
    return sign * math.pi / 2 + cmath.phase(w)


def entering_monotone(tr: Trajectory, tol: float = 1e-9) -> bool:
    """Once the trajectory is inside the unit disk with |z| decreasing, |z| never increases."""
    r = tr.radius
    for j in range(1, len(r)):
        if r[j] < 1 and r[j] < r[j - 1]:
            return bool(np.all(np.diff(r[j - 1:]) <= tol))
    return True

"""Directed graphs on the annulus: closed paths, weighted tuple sums, moves.

Conventions
-----------
Rows ``0 .. rows-1`` are horizontal cycles, row 0 on top.  Every row is
oriented leftward, i.e. travel along a row decreases the angle (angles
live in [0, 1)).  Band ``b`` (1 <= b <= rows-1) is the strip between rows
``b-1`` and ``b``.  A vertical in band ``b`` is either ``up`` (from row
``b`` to row ``b-1``) or ``down`` (from row ``b-1`` to row ``b``).

Each bounded face lies in one band between two cyclically consecutive
verticals of that band.  The face is labelled through the vertical on
its left (smaller angle): ``Vertical.label`` names the face immediately
to the right of that vertical.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .exactalg import LaurentPoly
from .toda import to_x, y_vars


@dataclass(frozen=True)
class Vertical:
    vid: str
    band: int
    angle: Fraction
    direction: str  # "up" or "down"
    label: str

    @property
    def source_row(self) -> int:
        return self.band if self.direction == "up" else self.band - 1

    @property
    def target_row(self) -> int:
        return self.band - 1 if self.direction == "up" else self.band


@dataclass(frozen=True)
class AnnularGraph:
    rows: int
    verticals: tuple

    def __post_init__(self):
        object.__setattr__(self, "verticals",
                           tuple(sorted(self.verticals, key=lambda v: (v.angle, v.vid))))
        seen = set()
        for v in self.verticals:
            if not 1 <= v.band < self.rows:
                raise ValueError(f"vertical {v.vid} outside the bands")
            if v.direction not in ("up", "down"):
                raise ValueError("direction must be 'up' or 'down'")
            if not 0 <= v.angle < 1:
                raise ValueError("angles must lie in [0, 1)")
            if v.vid in seen:
                raise ValueError(f"duplicate vertical id {v.vid}")
            seen.add(v.vid)
        for r in range(self.rows):
            angles = [v.angle for v in self.row_verticals(r)]
            if len(set(angles)) != len(angles):
                raise ValueError(f"two verticals meet row {r} at the same angle")

    def vertical(self, vid: str) -> Vertical:
        for v in self.verticals:
            if v.vid == vid:
                return v
        raise KeyError(vid)

    def row_verticals(self, r: int) -> list[Vertical]:
        """Verticals with an endpoint on row r, by increasing angle."""
        return [v for v in self.verticals if r in (v.band - 1, v.band)]

    def band_verticals(self, b: int) -> list[Vertical]:
        return [v for v in self.verticals if v.band == b]

    def faces(self) -> list[tuple[int, str, str]]:
        """(band, left vertical id, label) for every bounded face."""
        return [(v.band, v.vid, v.label) for v in self.verticals]

    def relabel(self, labels: dict[str, str]) -> "AnnularGraph":
        return AnnularGraph(self.rows, tuple(
            replace(v, label=labels.get(v.vid, v.label)) for v in self.verticals))

    # -- export ---------------------------------------------------------
    def to_dot(self, name: str = "N") -> str:
        lines = [f"digraph {name} {{", "  rankdir=TB;"]
        verts = _vertices(self)
        for r in range(self.rows):
            lines.append(f"  subgraph cluster_row{r} {{")
            lines.append(f'    label="row {r}";')
            for (row, vid) in verts:
                if row == r:
                    lines.append(f'    "{row}:{vid}";')
            lines.append("  }")
        succ = _successors(self, verts)
        for u, outs in zip(verts, succ):
            for w in outs:
                x, y = verts[w]
                kind = "horizontal" if x == u[0] else "vertical"
                lines.append(f'  "{u[0]}:{u[1]}" -> "{x}:{y}" [kind="{kind}"];')
        for band, vid, label in self.faces():
            lines.append(f'  "face:{label}" [shape=plaintext, band={band}, '
                         f'right_of="{vid}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_Ni(n: int) -> AnnularGraph:
    """The graph for the Coxeter double word: n+1 rows, one up/down pair per band.

    The pair in band k sits at angles k/(2n+1) (up) and (n+k)/(2n+1)
    (down).  The face right of the up-vertical is y_{2k-1}, the face right
    of the down-vertical is y_{2k}.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    vs = []
    for k in range(1, n + 1):
        vs.append(Vertical(f"u{k}", k, Fraction(k, 2 * n + 1), "up", f"y{2 * k - 1}"))
        vs.append(Vertical(f"d{k}", k, Fraction(n + k, 2 * n + 1), "down", f"y{2 * k}"))
    return AnnularGraph(n + 1, tuple(vs))


# -- vertices, edges, closed paths -------------------------------------------

def _vertices(G: AnnularGraph) -> list[tuple[int, str]]:
    out = []
    for r in range(G.rows):
        rv = G.row_verticals(r)
        if rv:
            out += [(r, v.vid) for v in rv]
        else:
            out.append((r, "*"))  # anchor on an otherwise empty row
    return out


def _angle(G: AnnularGraph, vertex: tuple[int, str]) -> Fraction:
    return Fraction(0) if vertex[1] == "*" else G.vertical(vertex[1]).angle


def _successors(G: AnnularGraph, verts) -> list[list[int]]:
    index = {v: i for i, v in enumerate(verts)}
    succ: list[list[int]] = [[] for _ in verts]
    for r in range(G.rows):
        on_row = [v for v in verts if v[0] == r]
        on_row.sort(key=lambda v: _angle(G, v))
        for pos, v in enumerate(on_row):
            succ[index[v]].append(index[on_row[pos - 1]])  # leftward neighbour
    for v in G.verticals:
        succ[index[(v.source_row, v.vid)]].append(index[(v.target_row, v.vid)])
    return succ


@dataclass(frozen=True)
class ClosedPath:
    vertices: tuple  # cyclic sequence of (row, vertical id), rotated to start at its minimum
    mask: int
    faces: frozenset  # left-vertical ids of enclosed faces


def _cyclic_contains(hi: Fraction, lo: Fraction, theta: Fraction) -> bool:
    """Is theta strictly inside the leftward arc from ``hi`` down to ``lo``?"""
    if hi == lo:
        return theta != hi
    if hi > lo:
        return lo < theta < hi
    return theta > lo or theta < hi


def _face_samples(G: AnnularGraph) -> dict[str, tuple[int, Fraction]]:
    """Per face (keyed by its left vertical): band and an interior sample angle."""
    angles = sorted({v.angle for v in G.verticals} | {Fraction(0)})
    out = {}
    for v in G.verticals:
        nxt = [a for a in angles if a > v.angle]
        gap = (nxt[0] if nxt else angles[0] + 1) - v.angle
        out[v.vid] = (v.band, (v.angle + gap / 2) % 1)
    return out


def _row_at(G, cycle, theta) -> int:
    n = len(cycle)
    for i in range(n):
        u, w = cycle[i], cycle[(i + 1) % n]
        if u[0] != w[0]:
            continue
        if _cyclic_contains(_angle(G, u), _angle(G, w), theta):
            return u[0]
    raise AssertionError("closed path does not cover every angle")


def _winding(G, cycle) -> Fraction:
    total = Fraction(0)
    n = len(cycle)
    for i in range(n):
        u, w = cycle[i], cycle[(i + 1) % n]
        if u[0] == w[0]:
            d = (_angle(G, u) - _angle(G, w)) % 1
            total += d if d else 1
    return total


def enumerate_closed_paths(G: AnnularGraph) -> list[ClosedPath]:
    """All simple directed cycles; each is checked to wind exactly once."""
    verts = _vertices(G)
    succ = _successors(G, verts)
    samples = _face_samples(G)
    cycles = []
    for s in range(len(verts)):
        stack = [(s, [s], 1 << s)]
        while stack:
            u, path, mask = stack.pop()
            for w in succ[u]:
                if w == s:
                    cycles.append((path, mask))
                elif w > s and not (mask >> w) & 1:
                    stack.append((w, path + [w], mask | (1 << w)))
    out = []
    for path, mask in cycles:
        cyc = [verts[i] for i in path]
        wind = _winding(G, cyc)
        if wind != 1:
            raise AssertionError(f"closed path with winding number {wind}")
        enclosed = frozenset(
            vid for vid, (band, theta) in samples.items()
            if _row_at(G, cyc, theta) <= band - 1)
        out.append(ClosedPath(tuple(cyc), mask, enclosed))
    out.sort(key=lambda p: (len(p.faces), sorted(p.faces), p.vertices))
    return out


def nonintersecting_tuples(G: AnnularGraph, k: int,
                           paths: Sequence[ClosedPath] | None = None) -> list[tuple]:
    """All k-sets of pairwise vertex-disjoint closed paths."""
    if not 1 <= k <= G.rows:
        raise ValueError(f"k={k} out of range 1..{G.rows}")
    if paths is None:
        paths = enumerate_closed_paths(G)
    out = []

    def rec(start: int, chosen: list, mask: int):
        if len(chosen) == k:
            out.append(tuple(chosen))
            return
        for j in range(start, len(paths)):
            p = paths[j]
            if not p.mask & mask:
                rec(j + 1, chosen + [p], mask | p.mask)

    rec(0, [], 0)
    return out


def face_monomial(G: AnnularGraph, faces: Iterable[str], ring: LaurentPoly) -> LaurentPoly:
    labels = {v.vid: v.label for v in G.verticals}
    m = ring ** 0
    for vid in faces:
        m = m * LaurentPoly.var(ring.vars, labels[vid], ring.den)
    return m


def tuple_weight(G: AnnularGraph, tup: Sequence[ClosedPath],
                 base_weight: LaurentPoly) -> LaurentPoly:
    w = base_weight ** 0
    for p in tup:
        w = w * base_weight * face_monomial(G, p.faces, base_weight)
    return w


def min_path_weight(n: int) -> LaurentPoly:
    """wht(p_min) = prod_i (y_{2i-1} y_{2i})^{-i/(n+1)}."""
    exps = {}
    for i in range(1, n + 1):
        exps[f"y{2 * i - 1}"] = exps[f"y{2 * i}"] = Fraction(-i, n + 1)
    return LaurentPoly.monomial(y_vars(n), exps, n + 1)


def path_sum(G: AnnularGraph, k: int, base_weight: LaurentPoly) -> LaurentPoly:
    paths = enumerate_closed_paths(G)
    total = base_weight - base_weight
    for tup in nonintersecting_tuples(G, k, paths):
        total = total + tuple_weight(G, tup, base_weight)
    return total


def hamiltonian_paths(n: int, k: int, coords: str = "x",
                      graph: AnnularGraph | None = None) -> LaurentPoly:
    """H_k as the weighted sum over nonintersecting k-tuples of closed paths."""
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    G = build_Ni(n) if graph is None else graph
    H = path_sum(G, k, min_path_weight(n))
    if coords == "y":
        return H
    if coords != "x":
        raise ValueError("coords must be 'x' or 'y'")
    return to_x(n, H)


def mtuple_oracle(n: int, i: int) -> list[tuple[int, ...]]:
    """Integer i-tuples (m_0, .., m_{i-1}) obeying the nonintersection rules."""
    if not 1 <= i <= n:
        raise ValueError(f"i={i} out of range 1..{n}")
    out = []

    def rec(l: int, prev: int | None, acc: tuple):
        if l == i:
            out.append(acc)
            return
        lo, hi = 2 * (i - l) - 1, 2 * (n - l) + 1
        if prev is not None:
            hi = min(hi, prev - 3 if prev % 2 == 0 else prev - 2)
        for m in range(lo, hi + 1):
            rec(l + 1, m, acc + (m,))

    rec(0, None, ())
    return out


def mtuple_exponents(n: int, m: Sequence[int]) -> tuple[int, ...]:
    """Exponent vector of prod_l prod_{j=m_l}^{2(n-l)} y_j."""
    exps = [0] * (2 * n)
    for l, ml in enumerate(m):
        for j in range(ml, 2 * (n - l) + 1):
            exps[j - 1] += 1
    return tuple(exps)


def mtuple_monomial(n: int, m: Sequence[int]) -> LaurentPoly:
    """prod_l prod_{j=m_l}^{2(n-l)} y_j."""
    return LaurentPoly.monomial(y_vars(n), list(mtuple_exponents(n, m)), n + 1)


# -- the slide move and normal forms -----------------------------------------

def movable_sites(G: AnnularGraph) -> list[tuple[int, str, str]]:
    """Sites (row, vid, vid') where the slide move applies.

    The two verticals are cyclically adjacent on the row, belong to the
    bands above and below it, and are both outgoing from the row or both
    incoming to it.
    """
    sites = []
    for r in range(G.rows):
        rv = G.row_verticals(r)
        if len(rv) < 2:
            continue
        for pos in range(len(rv)):
            a, b = rv[pos], rv[(pos + 1) % len(rv)]
            if a is b or a.band == b.band:
                continue
            out_a, out_b = a.source_row == r, b.source_row == r
            if out_a == out_b:
                sites.append((r, a.vid, b.vid))
    return sites


def apply_move(G: AnnularGraph, site: tuple[int, str, str]) -> AnnularGraph:
    """Exchange the order of two adjacent verticals on a row.

    Only the cyclic order on the shared row changes; the angles are then
    re-laid out so every other row keeps its cyclic order.
    """
    r, va, vb = site
    if (r, va, vb) not in movable_sites(G) and (r, vb, va) not in movable_sites(G):
        raise ValueError(f"site {site} is not in a movable configuration")
    a, b = G.vertical(va), G.vertical(vb)
    # rotate the seam so that a and b are consecutive in linear order
    rv = G.row_verticals(r)
    ids = [v.vid for v in rv]
    ia, ib = ids.index(va), ids.index(vb)
    later = b if (ia + 1) % len(ids) == ib else a
    angles = sorted({v.angle for v in G.verticals})
    nxt = [x for x in angles if x > later.angle]
    seam = (later.angle + ((nxt[0] if nxt else angles[0] + 1) - later.angle) / 2) % 1

    def pos(v):
        return (v.angle - seam) % 1

    orders = []
    for row in range(G.rows):
        seq = sorted(G.row_verticals(row), key=pos)
        names = [v.vid for v in seq]
        if row == r:
            i, j = names.index(va), names.index(vb)
            names[i], names[j] = names[j], names[i]
        orders.append(names)
    # topological sort of the union of the per-row linear orders
    succ: dict[str, set] = {v.vid: set() for v in G.verticals}
    indeg = {v.vid: 0 for v in G.verticals}
    for names in orders:
        for x, y in zip(names, names[1:]):
            if y not in succ[x]:
                succ[x].add(y)
                indeg[y] += 1
    key = {v.vid: pos(v) for v in G.verticals}
    ready = sorted((vid for vid, d in indeg.items() if d == 0), key=key.get)
    layout = []
    while ready:
        vid = ready.pop(0)
        layout.append(vid)
        for w in succ[vid]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
        ready.sort(key=key.get)
    if len(layout) != len(G.verticals):
        raise AssertionError("move produced inconsistent row orders")
    total = len(layout)
    new_angle = {vid: Fraction(i + 1, total + 1) for i, vid in enumerate(layout)}
    return AnnularGraph(G.rows, tuple(replace(v, angle=new_angle[v.vid])
                                      for v in G.verticals))


def _min_rotation(seq: list) -> tuple:
    if not seq:
        return ()
    return min(tuple(seq[i:] + seq[:i]) for i in range(len(seq)))


def normal_form(G: AnnularGraph) -> tuple:
    """Isotopy invariant: per row, the cyclic sequence of (band, direction, label)."""
    return (G.rows,) + tuple(
        _min_rotation([(v.band, v.direction, v.label) for v in G.row_verticals(r)])
        for r in range(G.rows))


def find_move_sequence(G: AnnularGraph, target: tuple,
                       max_depth: int = 12) -> list | None:
    """Breadth-first search for moves taking G to the normal form ``target``."""
    start = normal_form(G)
    if start == target:
        return []
    seen = {start}
    queue = deque([(G, [])])
    while queue:
        H, seq = queue.popleft()
        if len(seq) >= max_depth:
            continue
        for site in movable_sites(H):
            H2 = apply_move(H, site)
            nf = normal_form(H2)
            if nf == target:
                return seq + [site]
            if nf not in seen:
                seen.add(nf)
                queue.append((H2, seq + [site]))
    return None

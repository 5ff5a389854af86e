"""Compare the compiled and pure-Python kernels.

Run with ``python3 benchmarks/bench_kernels.py``.  The first table times the
enumeration of successor-closed vertex sets of a coefficient quiver.  The
second times the packed sparse product on the square of a cluster variable
reached by mutating Q_2.  The compiled product uses int64 coefficients and
reports "overflow" when they do not fit; the library then falls back to the
exact Python product automatically.
"""

import argparse
import timeit

from toda_cluster import _kernels_py
from toda_cluster.cluster import SeedA, build_Qn, mutate_seed_a
from toda_cluster.exactalg import _packed_product
from toda_cluster.jacobian import build_coefficient_quiver

try:
    from toda_cluster import _kernels
except ImportError:
    _kernels = None


def bench(n: int, i: int, repeat: int) -> dict:
    G = build_coefficient_quiver(n, i)
    succ = G.successor_masks()
    nv = len(G.vertices)
    row = {"n": n, "i": i, "vertices": nv}
    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("cython", _kernels))
    results = {}
    for name, mod in backends:
        results[name] = mod.closed_subsets(nv, succ)
        t = min(timeit.repeat(lambda mod=mod: mod.closed_subsets(nv, succ), number=1, repeat=repeat))
        row[name] = t
    row["count"] = len(results["python"])
    if "cython" in results:
        assert results["cython"] == results["python"], "backends disagree"
    return row


def bench_product(seq: tuple, repeat: int) -> dict:
    import toda_cluster.exactalg as ea
    S = SeedA.initial(build_Qn(2))
    for k in seq:
        S = mutate_seed_a(S, k)
    t = S.vars[seq[-1] - 1]._terms
    row = {"seq": seq, "terms": len(t)}
    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("cython", _kernels))
    saved = ea.poly_mul
    results = {}
    try:
        for name, mod in backends:
            ea.poly_mul = mod.poly_mul
            try:
                results[name] = _packed_product(t, t, 4)
            except OverflowError:  # int64 coefficients exceeded
                continue
            row[name] = min(timeit.repeat(lambda: _packed_product(t, t, 4),
                                          number=1, repeat=repeat))
    finally:
        ea.poly_mul = saved
    if "cython" in results:
        assert results["cython"] == results["python"], "backends disagree"
    return row


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n-max", type=int, default=7)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernel not built; timing the Python kernel only")
    print(f"{'n':>3} {'i':>3} {'verts':>6} {'ideals':>7} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for n in range(3, args.n_max + 1):
        i = (n + 1) // 2
        r = bench(n, i, args.repeat)
        cy = r.get("cython")
        speed = f"{r['python'] / cy:8.1f}" if cy else "       -"
        cys = f"{cy:10.5f}" if cy else "         -"
        print(f"{n:>3} {i:>3} {r['vertices']:>6} {r['count']:>7} {r['python']:10.5f} {cys} {speed}")
    print()
    print(f"{'Q_2 sequence':>16} {'terms':>6} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for seq in [(1, 2, 1), (1, 2, 1, 4), (1, 2, 1, 4, 2)]:
        r = bench_product(seq, args.repeat)
        cy = r.get("cython")
        speed = f"{r['python'] / cy:8.1f}" if cy else "       -"
        cys = f"{cy:10.5f}" if cy else "  overflow"
        label = ",".join(map(str, seq))
        print(f"{label:>16} {r['terms']:>6} {r['python']:10.5f} {cys} {speed}")


if __name__ == "__main__":
    main()

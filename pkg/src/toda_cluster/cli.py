"""Command-line front end: ``toda-cluster <command> [flags]``.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage errors.
JSON is the machine interface; text output is a thin view of it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .annular import build_Ni, hamiltonian_paths, mtuple_exponents, mtuple_oracle
from .cluster import SeedA, build_Qn, mutate_seed_a
from .exactalg import LaurentPoly
from .jacobian import (
    build_coefficient_quiver,
    build_module_matrices,
    cluster_character,
    enumerate_submodules,
    module_submodules,
)
from .network import (
    bps_spectrum,
    build_network_graph,
    holonomy_trace,
    scan_splittings,
    toda_splitting,
    trace_trajectory,
)
from .toda import hamiltonian_matrix

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
METHODS = ("matrix", "paths", "cc", "network")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TODA_THREADS", "1")))
    except ValueError:
        return 1


def canonical_hash(p: LaurentPoly) -> str:
    return hashlib.sha256(p.to_json().encode("utf-8")).hexdigest()[:16]


def first_difference(a: LaurentPoly, b: LaurentPoly) -> str | None:
    """The first monomial (in canonical order) where a and b differ."""
    d = a - b
    if d.is_zero():
        return None
    e, c = d.terms[0]
    return str(d.like({e: c}))


def compute_hamiltonian(method: str, n: int, k: int, coords: str = "x",
                        theta: float = 0.1, graph=None) -> LaurentPoly:
    if not 1 <= k <= n:
        raise UsageError(f"k must lie in 1..{n}")
    if coords not in ("x", "y"):
        raise UsageError("coords must be x or y")
    if method == "matrix":
        return hamiltonian_matrix(n, k, coords)
    if method == "paths":
        return hamiltonian_paths(n, k, coords, graph=graph)
    if method == "cc":
        if coords != "x":
            raise UsageError("the cluster character is computed in x coordinates only")
        return cluster_character(n, k)
    if method == "network":
        return holonomy_trace(n + 1, k, theta, coords=coords)
    raise UsageError(f"unknown method {method}")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {s!r}") from exc


# -- commands ----------------------------------------------------------------

def cmd_hamiltonian(a) -> int:
    if a.N is not None:
        if a.n is not None and a.n != a.N - 1:
            raise UsageError("--n and --N disagree (n = N - 1)")
        a.n = a.N - 1
    if a.n is None or a.n < 1:
        raise UsageError("--n (or --N) is required and must be positive")
    p = compute_hamiltonian(a.method, a.n, a.k, a.coords, a.theta)
    if a.json:
        doc = {"n": a.n, "k": a.k, "method": a.method, "coords": a.coords,
               "terms": len(p), "hash": canonical_hash(p), "poly": p.to_dict()}
        _emit(json.dumps(doc, sort_keys=True) + "\n", a.out)
    else:
        _emit(str(p) + "\n", a.out)
    return EXIT_OK


def cmd_mutate(a) -> int:
    name = a.quiver.strip()
    if not (name[:1] in "Qq" and name[1:].isdigit() and int(name[1:]) >= 1):
        raise UsageError("--quiver must look like Q3")
    Q = build_Qn(int(name[1:]))
    seq = [int(s) for s in a.seq.split(",") if s.strip()] if a.seq else []
    if any(not 1 <= k <= Q.n for k in seq):
        raise UsageError(f"mutation indices must lie in 1..{Q.n}")
    S = SeedA.initial(Q)
    for k in seq:
        S = mutate_seed_a(S, k)
    if a.dot:
        _emit(S.quiver.to_dot(), a.out)
        return EXIT_OK
    doc = {"sequence": seq, "quiver": S.quiver.to_dict(),
           "cluster": [str(x) for x in S.vars]}
    _emit(json.dumps(doc, sort_keys=True, indent=None if a.json else 1) + "\n", a.out)
    return EXIT_OK


def cmd_submodules(a) -> int:
    if not 1 <= a.i <= a.n:
        raise UsageError(f"--i must lie in 1..{a.n}")
    try:
        mod = build_module_matrices(a.n, a.i, a.lam)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc
    subs = sorted(module_submodules(mod))
    doc = {"n": a.n, "i": a.i, "lambda": a.lam, "dimension": mod.dim,
           "dimension_vector": list(mod.dimension_vector()), "count": len(subs),
           "submodules": [list(d) for d in subs]}
    if a.json:
        _emit(json.dumps(doc, sort_keys=True) + "\n", a.out)
    else:
        _emit(f"dimension {mod.dim}\nsubmodules {len(subs)}\n", a.out)
    return EXIT_OK


def cmd_bps(a) -> int:
    if a.N < 2:
        raise UsageError("--N must be at least 2")
    try:
        data = bps_spectrum(a.N, a.theta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if a.dot:
        _emit(data.quiver.to_dot(f"BPS{a.N}"), a.out)
        return EXIT_OK
    S = toda_splitting(a.N, a.theta)
    fmt = lambda c: {"A": [str(x) for x in c.a], "B": [str(x) for x in c.b]}
    doc = {"N": a.N, "theta": a.theta, "splitting": S.to_dict(),
           "positive": [{"kind": k, "root": f"{r[0]}{r[1]}", "class": fmt(c)}
                        for k, r, c in data.positive],
           "basis": [{"name": nm, "class": fmt(c), "vertex": v}
                     for nm, c, v in data.basis],
           "quiver": data.quiver.to_dict(),
           "equals_Q": data.quiver == build_Qn(a.N - 1)}
    _emit(json.dumps(doc, sort_keys=True) + "\n", a.out)
    return EXIT_OK


def _trajectory(a):
    if a.N < 2:
        raise UsageError("--N must be at least 2")
    z0 = _parse_complex(a.z0)
    try:
        return trace_trajectory(a.N, a.phi, z0, step=a.step, t_max=a.t_max)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_trace(a) -> int:
    tr = _trajectory(a)
    if a.csv:
        _emit(tr.to_csv(), a.csv)
    z = tr.z[-1]
    summary = {"N": a.N, "phi": a.phi, "steps": len(tr.z) - 1,
               "end": [float(z.real), float(z.imag)], "reason": tr.reason,
               "monotonicity": tr.monotonicity()}
    sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_export(a) -> int:
    if a.kind == "quiver-dot":
        if a.n is None or a.n < 1:
            raise UsageError("quiver-dot needs --n")
        _emit(build_Qn(a.n).to_dot(f"Q{a.n}"), a.out)
    elif a.kind == "graph-dot":
        if a.N is not None:
            if a.N < 2:
                raise UsageError("--N must be at least 2")
            G = build_network_graph(toda_splitting(a.N, a.theta)).graph
            _emit(G.to_dot(f"NW{a.N}"), a.out)
        elif a.n is not None and a.n >= 1:
            _emit(build_Ni(a.n).to_dot(f"N{a.n}"), a.out)
        else:
            raise UsageError("graph-dot needs --n or --N")
    else:
        if a.N is None or a.z0 is None:
            raise UsageError("traj-csv needs --N and --z0")
        _emit(_trajectory(a).to_csv(), a.out)
    return EXIT_OK


# -- verification driver -------------------------------------------------------

@dataclass
class VerifyReport:
    hamiltonians: list = field(default_factory=list)
    splittings: list = field(default_factory=list)
    counts: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"ok": self.ok, "hamiltonians": self.hamiltonians,
                "splittings": self.splittings, "counts": self.counts,
                "failures": self.failures}


def _faulty_graph(n: int):
    """N_i with the labels of its first two faces exchanged."""
    G = build_Ni(n)
    v, w = G.verticals[0], G.verticals[1]
    return G.relabel({v.vid: w.label, w.vid: v.label})


def _verify_hamiltonian(n: int, k: int, fault: bool) -> dict:
    polys, times = {}, {}
    for m in ("matrix", "paths", "cc", "network"):
        t0 = time.perf_counter()
        graph = _faulty_graph(n) if (fault and m == "paths") else None
        polys[m] = compute_hamiltonian(m, n, k, graph=graph)
        times[m] = round(time.perf_counter() - t0, 4)
    ref = polys["matrix"]
    equal = {m: p == ref for m, p in polys.items()}
    rec = {"n": n, "k": k, "terms": len(ref),
           "hash": {m: canonical_hash(p) for m, p in polys.items()},
           "equal": equal, "seconds": times}
    diffs = {m: first_difference(p, ref) for m, p in polys.items() if not equal[m]}
    if diffs:
        rec["first_difference"] = diffs
    return rec


def _verify_splittings(N: int) -> list[dict]:
    out = []
    for S in scan_splittings(N):
        rec = {"N": N, "theta": round(S.theta, 6), "fingerprint": S.fingerprint(),
               "quiver_ok": bps_spectrum(N, S=S).quiver == build_Qn(N - 1)}
        bad = []
        for k in range(1, N):
            h = holonomy_trace(N, k, S=S)
            ref = hamiltonian_matrix(N - 1, k)
            if h != ref:
                bad.append({"k": k, "first_difference": first_difference(h, ref)})
        rec["traces_ok"] = not bad
        if bad:
            rec["mismatches"] = bad
        out.append(rec)
    return out


def _verify_counts(n: int, i: int) -> dict:
    subs = enumerate_submodules(build_coefficient_quiver(n, i))
    tuples = mtuple_oracle(n, i)
    dims = sorted(tuple(d) for d in subs)
    dims_from_tuples = sorted(mtuple_exponents(n, m) for m in tuples)
    mod = build_module_matrices(n, i)
    return {"n": n, "i": i, "dimension": mod.dim, "submodules": len(subs),
            "mtuples": len(tuples),
            "concrete_submodules": len(module_submodules(mod)),
            "terms": len(cluster_character(n, i)),
            "_dims_agree": dims == dims_from_tuples}


def run_verify(n_max: int, N_max: int, fault: bool = False) -> VerifyReport:
    rep = VerifyReport()
    jobs = [(n, k) for n in range(1, n_max + 1) for k in range(1, n + 1)]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        hs = list(pool.map(lambda nk: _verify_hamiltonian(*nk, fault), jobs))
        sp = list(pool.map(_verify_splittings, range(2, N_max + 1)))
        cs = list(pool.map(lambda nk: _verify_counts(*nk), jobs))
    for rec in hs:
        rep.hamiltonians.append(rec)
        for m, ok in rec["equal"].items():
            if not ok:
                rep.failures.append(f"H_{rec['k']} for n={rec['n']}: {m} differs from "
                                    f"matrix at {rec['first_difference'][m]}")
    for recs in sp:
        for rec in recs:
            rep.splittings.append(rec)
            if not rec["quiver_ok"]:
                rep.failures.append(f"BPS quiver for {rec['fingerprint']}")
            for bad in rec.get("mismatches", []):
                rep.failures.append(f"holonomy trace k={bad['k']} for {rec['fingerprint']} "
                                    f"differs at {bad['first_difference']}")
    for rec in cs:
        agree = rec.pop("_dims_agree")
        rep.counts.append(rec)
        if not (agree and rec["submodules"] == rec["mtuples"] == rec["terms"]
                == rec["concrete_submodules"]):
            rep.failures.append(f"submodule count mismatch for n={rec['n']}, i={rec['i']}")
    return rep


def cmd_verify(a) -> int:
    if not 1 <= a.n_max <= 7:
        raise UsageError("--n-max must lie in 1..7")
    N_max = a.N_max if a.N_max is not None else a.n_max + 1
    if N_max < 1:
        raise UsageError("--N-max must be positive")
    rep = run_verify(a.n_max, N_max, a.inject_fault)
    if a.json:
        _emit(json.dumps(rep.to_dict(), sort_keys=True) + "\n", a.out)
    else:
        lines = []
        for rec in rep.hamiltonians:
            flag = "ok" if all(rec["equal"].values()) else "MISMATCH"
            lines.append(f"H n={rec['n']} k={rec['k']} terms={rec['terms']} {flag}")
        for rec in rep.splittings:
            flag = "ok" if rec["quiver_ok"] and rec["traces_ok"] else "MISMATCH"
            lines.append(f"splitting {rec['fingerprint']} {flag}")
        for rec in rep.counts:
            lines.append(f"module n={rec['n']} i={rec['i']} dim={rec['dimension']} "
                         f"submodules={rec['submodules']}")
        lines += [f"FAIL {f}" for f in rep.failures]
        lines.append("all checks passed" if rep.ok else f"{len(rep.failures)} failure(s)")
        _emit("\n".join(lines) + "\n", a.out)
    return EXIT_OK if rep.ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toda-cluster", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    h = sub.add_parser("hamiltonian", help="compute H_k by one method")
    h.add_argument("--n", type=int)
    h.add_argument("--N", type=int, help="rank of the network (n = N - 1)")
    h.add_argument("--k", type=int, required=True)
    h.add_argument("--method", choices=METHODS, default="matrix")
    h.add_argument("--coords", choices=("x", "y"), default="x")
    h.add_argument("--theta", type=float, default=0.1)
    h.add_argument("--json", action="store_true")
    h.add_argument("--out")
    h.set_defaults(func=cmd_hamiltonian)

    m = sub.add_parser("mutate", help="mutate the initial seed of Q_n")
    m.add_argument("--quiver", required=True, help="e.g. Q3")
    m.add_argument("--seq", default="", help="comma separated vertices, e.g. 1,2,1")
    m.add_argument("--json", action="store_true")
    m.add_argument("--dot", action="store_true")
    m.add_argument("--out")
    m.set_defaults(func=cmd_mutate)

    s = sub.add_parser("submodules", help="submodules of the module M_i")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--i", type=int, required=True)
    s.add_argument("--lambda", dest="lam", default="1:1", help="p:q")
    s.add_argument("--json", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_submodules)

    b = sub.add_parser("bps", help="strong-coupling BPS data")
    b.add_argument("--N", type=int, required=True)
    b.add_argument("--theta", type=float, default=0.1)
    b.add_argument("--dot", action="store_true")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bps)

    def traj_flags(q, required):
        q.add_argument("--N", type=int, required=required)
        q.add_argument("--phi", type=float, default=-math.pi / 2)
        q.add_argument("--z0", required=required)
        q.add_argument("--step", type=float, default=1e-2)
        q.add_argument("--t-max", dest="t_max", type=float, default=10.0)

    t = sub.add_parser("trace", help="trace a wall trajectory")
    traj_flags(t, True)
    t.add_argument("--csv")
    t.set_defaults(func=cmd_trace)

    v = sub.add_parser("verify", help="run the cross-method checks")
    v.add_argument("--n-max", dest="n_max", type=int, default=3)
    v.add_argument("--N-max", dest="N_max", type=int)
    v.add_argument("--inject-fault", action="store_true",
                   help="exchange two face labels of the path graph (self-test)")
    v.add_argument("--json", action="store_true")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", help="write DOT or CSV files")
    e.add_argument("kind", choices=("quiver-dot", "graph-dot", "traj-csv"))
    e.add_argument("--n", type=int)
    traj_flags(e, False)
    e.add_argument("--theta", type=float, default=0.1)
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"toda-cluster: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"toda-cluster: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

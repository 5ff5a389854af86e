# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels for successor-closed subset enumeration (nv <= 63)."""

from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64


cdef int _order(int nv, u64* succ, int* order) except -1:
    cdef u64 done = 0
    cdef int filled = 0, v, progressed
    while filled < nv:
        progressed = 0
        for v in range(nv):
            if not ((done >> v) & 1) and (succ[v] & ~done) == 0:
                order[filled] = v
                filled += 1
                done |= (<u64>1) << v
                progressed = 1
        if not progressed:
            raise ValueError("graph has a directed cycle")
    return 0


def closed_subsets(int nv, succ):
    if nv > 63:
        raise ValueError("at most 63 vertices")
    cdef u64* s = <u64*>malloc(max(nv, 1) * sizeof(u64))
    cdef int* order = <int*>malloc(max(nv, 1) * sizeof(int))
    cdef u64* st_set = <u64*>malloc((nv + 2) * sizeof(u64))
    cdef int* st_i = <int*>malloc((nv + 2) * sizeof(int))
    cdef int sp, i, v
    cdef u64 S
    out = []
    try:
        for i in range(nv):
            s[i] = <u64>succ[i]
        _order(nv, s, order)
        # depth-first; each stack frame branches into exclude/include
        sp = 0
        st_i[0] = 0
        st_set[0] = 0
        sp = 1
        while sp:
            sp -= 1
            i = st_i[sp]
            S = st_set[sp]
            if i == nv:
                out.append(S)
                continue
            v = order[i]
            st_i[sp] = i + 1
            st_set[sp] = S
            sp += 1
            if (s[v] & ~S) == 0:
                st_i[sp] = i + 1
                st_set[sp] = S | ((<u64>1) << v)
                sp += 1
    finally:
        free(s)
        free(order)
        free(st_set)
        free(st_i)
    out.sort()
    return out


def count_closed_bruteforce(int nv, succ):
    if nv > 40:
        raise ValueError("brute force limited to 40 vertices")
    cdef u64* s = <u64*>malloc(max(nv, 1) * sizeof(u64))
    cdef u64 S, T, low, total = (<u64>1) << nv
    cdef long long count = 0
    cdef int v, ok
    try:
        for v in range(nv):
            s[v] = <u64>succ[v]
        S = 0
        while S < total:
            ok = 1
            T = S
            while T:
                low = T & (~T + 1)
                v = 0
                while (low >> v) != 1:
                    v += 1
                if s[v] & ~S:
                    ok = 0
                    break
                T ^= low
            count += ok
            S += 1
    finally:
        free(s)
    return count


from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cdef extern from *:
    bint __builtin_mul_overflow(long long, long long, long long*) nogil
    bint __builtin_add_overflow(long long, long long, long long*) nogil


def poly_mul(keys1, coefs1, keys2, coefs2):
    """Packed-key sparse product with int64 coefficients.

    Raises OverflowError when a key or coefficient leaves int64; callers then
    use the exact pure-Python routine.
    """
    cdef vector[long long] a_k, a_c, b_k, b_c
    cdef Py_ssize_t i, j, m, n
    cdef long long p, s
    cdef unordered_map[long long, long long] out
    for k in keys1:
        a_k.push_back(k)
    for c in coefs1:
        a_c.push_back(c)
    for k in keys2:
        b_k.push_back(k)
    for c in coefs2:
        b_c.push_back(c)
    m = a_k.size()
    n = b_k.size()
    out.reserve(m + n)
    with nogil:
        for i in range(m):
            for j in range(n):
                if __builtin_mul_overflow(a_c[i], b_c[j], &p):
                    with gil:
                        raise OverflowError("coefficient overflow")
                if __builtin_add_overflow(out[a_k[i] + b_k[j]], p, &s):
                    with gil:
                        raise OverflowError("coefficient overflow")
                out[a_k[i] + b_k[j]] = s
    rk, rc = [], []
    for kv in out:
        if kv.second:
            rk.append(kv.first)
            rc.append(kv.second)
    return rk, rc

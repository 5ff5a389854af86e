"""Pure-Python kernels for successor-closed subset enumeration.

A directed graph on vertices 0..nv-1 is given by ``succ``, where
``succ[v]`` is the bitmask of out-neighbours of ``v``.  A subset ``S``
(bitmask) is successor-closed when ``succ[v]`` is contained in ``S`` for
every ``v`` in ``S``.  The graph must be acyclic.
"""


def _sink_first_order(nv, succ):
    order, done = [], 0
    while len(order) < nv:
        progressed = False
        for v in range(nv):
            if not (done >> v) & 1 and succ[v] & ~done == 0:
                order.append(v)
                done |= 1 << v
                progressed = True
        if not progressed:
            raise ValueError("graph has a directed cycle")
    return order


def closed_subsets(nv, succ):
    """All successor-closed subsets, as a sorted list of bitmasks."""
    order = _sink_first_order(nv, list(succ))
    out = []
    stack = [(0, 0)]
    while stack:
        i, S = stack.pop()
        if i == nv:
            out.append(S)
            continue
        v = order[i]
        stack.append((i + 1, S))
        if succ[v] & ~S == 0:
            stack.append((i + 1, S | (1 << v)))
    out.sort()
    return out


def count_closed_bruteforce(nv, succ):
    """Count successor-closed subsets by testing all 2**nv masks."""
    succ = list(succ)
    count = 0
    for S in range(1 << nv):
        ok = True
        T = S
        while T:
            low = T & -T
            v = low.bit_length() - 1
            if succ[v] & ~S:
                ok = False
                break
            T ^= low
        if ok:
            count += 1
    return count


def poly_mul(keys1, coefs1, keys2, coefs2):
    """Multiply sparse polynomials given by packed exponent keys.

    Keys add under multiplication; the caller guarantees that the packing
    leaves no carries.  Returns ``(keys, coefs)`` with zero terms removed.
    """
    out = {}
    get = out.get
    pairs2 = list(zip(keys2, coefs2))
    for k1, c1 in zip(keys1, coefs1):
        for k2, c2 in pairs2:
            k = k1 + k2
            out[k] = get(k, 0) + c1 * c2
    items = [(k, c) for k, c in out.items() if c]
    return [k for k, _ in items], [c for _, c in items]

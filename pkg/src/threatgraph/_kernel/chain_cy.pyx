# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled chain-search kernel; must mirror chain_py exactly.

Same transition rule, same DFS preorder, same emit modes. Inputs are
coerced to contiguous int64 arrays; successor lists are stored CSR-style
and the search runs with an explicit stack, so depth is bounded by
``max_len`` regardless of stream size.
"""

import numpy as np

cimport cython
cimport numpy as cnp

EMIT_ALL = 0
EMIT_UNEXTENDABLE = 1


def find_chains(
    src_in,
    dest_in,
    ts_in,
    tactic_in,
    long long max_gap_ms,
    int tactic_mode,
    int max_len,
    bint anchor_required,
    long long external_idx,
    int emit_mode,
):
    cdef cnp.int64_t[::1] src = np.ascontiguousarray(src_in, dtype=np.int64)
    cdef cnp.int64_t[::1] dest = np.ascontiguousarray(dest_in, dtype=np.int64)
    cdef cnp.int64_t[::1] ts = np.ascontiguousarray(ts_in, dtype=np.int64)
    cdef cnp.int64_t[::1] tactic = np.ascontiguousarray(tactic_in, dtype=np.int64)
    cdef Py_ssize_t n = src.shape[0]

    cdef cnp.int64_t[::1] succ_start = np.zeros(n + 1, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef Py_ssize_t total = 0
    for i in range(n):
        if src[i] != dest[i]:
            for j in range(i + 1, n):
                if _transition_ok(src, dest, ts, tactic, i, j, max_gap_ms, tactic_mode):
                    total += 1
        succ_start[i + 1] = total
    cdef cnp.int64_t[::1] succ_data = np.empty(total, dtype=np.int64)
    cdef Py_ssize_t fill = 0
    for i in range(n):
        if src[i] != dest[i]:
            for j in range(i + 1, n):
                if _transition_ok(src, dest, ts, tactic, i, j, max_gap_ms, tactic_mode):
                    succ_data[fill] = j
                    fill += 1

    cdef cnp.uint8_t[::1] can_start = np.empty(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] has_pred = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        can_start[i] = 1 if (not anchor_required or src[i] == external_idx) else 0
    if emit_mode == 1:
        for i in range(n):
            if can_start[i]:
                for j in range(succ_start[i], succ_start[i + 1]):
                    has_pred[succ_data[j]] = 1

    out = []
    if n == 0 or max_len < 2:
        return out
    cdef cnp.int64_t[::1] path = np.empty(max_len, dtype=np.int64)
    cdef cnp.int64_t[::1] ptr = np.empty(max_len, dtype=np.int64)
    cdef Py_ssize_t depth, node, nxt
    cdef bint prependable
    for i in range(n):
        if not can_start[i]:
            continue
        prependable = has_pred[i]
        path[0] = i
        ptr[0] = succ_start[i]
        depth = 1
        while depth > 0:
            node = path[depth - 1]
            if depth < max_len and ptr[depth - 1] < succ_start[node + 1]:
                nxt = succ_data[ptr[depth - 1]]
                ptr[depth - 1] += 1
                path[depth] = nxt
                ptr[depth] = succ_start[nxt]
                depth += 1
                if emit_mode == 0:
                    out.append(_as_tuple(path, depth))
                elif depth == max_len or (
                    not prependable and succ_start[nxt] == succ_start[nxt + 1]
                ):
                    out.append(_as_tuple(path, depth))
            else:
                depth -= 1
    return out


cdef inline bint _transition_ok(
    cnp.int64_t[::1] src,
    cnp.int64_t[::1] dest,
    cnp.int64_t[::1] ts,
    cnp.int64_t[::1] tactic,
    Py_ssize_t i,
    Py_ssize_t j,
    long long max_gap_ms,
    int tactic_mode,
):
    if src[j] != dest[i]:
        return False
    if max_gap_ms > 0 and ts[j] - ts[i] > max_gap_ms:
        return False
    if tactic_mode == 1 and tactic[j] < tactic[i]:
        return False
    if tactic_mode == 2 and tactic[j] <= tactic[i]:
        return False
    return True


cdef inline tuple _as_tuple(cnp.int64_t[::1] path, Py_ssize_t depth):
    cdef Py_ssize_t k
    return tuple([<long long> path[k] for k in range(depth)])


def filter_maximal(list chains):
    """Drop every chain that is a proper subsequence of a longer chain.

    Longest first; each chain is compared only against strictly longer kept
    chains (containment is transitive, equal lengths never contain).
    """
    cdef Py_ssize_t m = len(chains)
    if m == 0:
        return []
    cdef cnp.int64_t[::1] lengths = np.empty(m, dtype=np.int64)
    cdef Py_ssize_t k, total = 0
    for k in range(m):
        lengths[k] = len(chains[k])
        total += lengths[k]
    cdef cnp.int64_t[::1] offsets = np.empty(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] data = np.empty(total, dtype=np.int64)
    offsets[0] = 0
    cdef Py_ssize_t pos = 0
    for k in range(m):
        for value in chains[k]:
            data[pos] = value
            pos += 1
        offsets[k + 1] = pos

    order_arr = np.argsort(np.negative(np.asarray(lengths)), kind="stable")
    cdef cnp.int64_t[::1] order = np.ascontiguousarray(order_arr, dtype=np.int64)
    cdef cnp.uint8_t[::1] keep = np.ones(m, dtype=np.uint8)
    # Kept indexes from strictly longer length groups, then the current group.
    cdef cnp.int64_t[::1] longer = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] group = np.empty(m, dtype=np.int64)
    cdef Py_ssize_t longer_count = 0, group_count = 0, g, t, idx, other
    cdef Py_ssize_t group_len = -1
    for t in range(m):
        idx = order[t]
        if lengths[idx] != group_len:
            for g in range(group_count):
                longer[longer_count] = group[g]
                longer_count += 1
            group_count = 0
            group_len = lengths[idx]
        for k in range(longer_count):
            other = longer[k]
            if _is_subseq(
                data, offsets[idx], lengths[idx], offsets[other], lengths[other]
            ):
                keep[idx] = 0
                break
        if keep[idx]:
            group[group_count] = idx
            group_count += 1
    return [chains[k] for k in range(m) if keep[k]]


cdef inline bint _is_subseq(
    cnp.int64_t[::1] data,
    Py_ssize_t needle_off,
    Py_ssize_t needle_len,
    Py_ssize_t hay_off,
    Py_ssize_t hay_len,
):
    cdef Py_ssize_t pos = 0, h
    for h in range(hay_len):
        if data[hay_off + h] == data[needle_off + pos]:
            pos += 1
            if pos == needle_len:
                return True
    return False

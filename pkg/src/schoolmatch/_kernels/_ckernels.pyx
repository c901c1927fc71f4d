# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend; semantics mirror pykernels exactly."""

from libc.stdlib cimport free, malloc

import numpy as np

BACKEND_NAME = "c"

MECH_DA = 0
MECH_BOSTON = 1


cdef inline int _max_cap(const int[:] cap) noexcept nogil:
    cdef int s, best = 0
    for s in range(cap.shape[0]):
        if cap[s] > best:
            best = cap[s]
    return best


# scratch layout for one deferred-acceptance run:
#   eff[n] | ptr[n] | stack[n] | heldcnt[m] | held[m*maxcap]
cdef inline int _da_scratch_size(int n, int m, int maxcap) noexcept nogil:
    return 3 * n + m + m * maxcap


cdef void _da_core(const int[:, ::1] prefs, const int[:] plen, const int[:] limit,
                   const int[:, ::1] prank, const int[:] cap,
                   int[:] assign, int* scratch, int maxcap) noexcept nogil:
    cdef int n = plen.shape[0]
    cdef int m = cap.shape[0]
    cdef int* eff = scratch
    cdef int* ptr = scratch + n
    cdef int* stack = scratch + 2 * n
    cdef int* heldcnt = scratch + 3 * n
    cdef int* held = scratch + 3 * n + m
    cdef int i, s, t, q, cnt, worst, top
    for i in range(n):
        assign[i] = -1
        ptr[i] = 0
        eff[i] = plen[i] if plen[i] < limit[i] else limit[i]
    for s in range(m):
        heldcnt[s] = 0
    top = 0
    for i in range(n - 1, -1, -1):
        if eff[i] > 0:
            stack[top] = i
            top += 1
    while top > 0:
        top -= 1
        i = stack[top]
        while ptr[i] < eff[i]:
            s = prefs[i, ptr[i]]
            ptr[i] += 1
            q = cap[s]
            if q == 0:
                continue
            cnt = heldcnt[s]
            if cnt < q:
                held[s * maxcap + cnt] = i
                heldcnt[s] = cnt + 1
                break
            worst = 0
            for t in range(1, q):
                if prank[s, held[s * maxcap + t]] > prank[s, held[s * maxcap + worst]]:
                    worst = t
            if prank[s, i] < prank[s, held[s * maxcap + worst]]:
                stack[top] = held[s * maxcap + worst]
                top += 1
                held[s * maxcap + worst] = i
                break
    for s in range(m):
        for t in range(heldcnt[s]):
            assign[held[s * maxcap + t]] = s


# scratch layout for one immediate-acceptance run:
#   eff[n] | rem[m] | appcnt[m] | apps[m*n]
cdef inline int _boston_scratch_size(int n, int m) noexcept nogil:
    return n + 2 * m + m * n


cdef void _boston_core(const int[:, ::1] prefs, const int[:] plen, const int[:] limit,
                       const int[:, ::1] prank, const int[:] cap,
                       int[:] assign, int* scratch) noexcept nogil:
    cdef int n = plen.shape[0]
    cdef int m = cap.shape[0]
    cdef int* eff = scratch
    cdef int* rem = scratch + n
    cdef int* appcnt = scratch + n + m
    cdef int* apps = scratch + n + 2 * m
    cdef int i, s, t, u, v, take, key, max_len
    max_len = 0
    for i in range(n):
        assign[i] = -1
        eff[i] = plen[i] if plen[i] < limit[i] else limit[i]
        if eff[i] > max_len:
            max_len = eff[i]
    for s in range(m):
        rem[s] = cap[s]
    for t in range(max_len):
        for s in range(m):
            appcnt[s] = 0
        for i in range(n):
            if assign[i] == -1 and t < eff[i]:
                s = prefs[i, t]
                apps[s * n + appcnt[s]] = i
                appcnt[s] += 1
        for s in range(m):
            if appcnt[s] == 0 or rem[s] == 0:
                continue
            # insertion sort applicants by priority rank (ranks are distinct)
            for u in range(1, appcnt[s]):
                key = apps[s * n + u]
                v = u - 1
                while v >= 0 and prank[s, apps[s * n + v]] > prank[s, key]:
                    apps[s * n + v + 1] = apps[s * n + v]
                    v -= 1
                apps[s * n + v + 1] = key
            take = rem[s] if rem[s] < appcnt[s] else appcnt[s]
            for u in range(take):
                assign[apps[s * n + u]] = s
            rem[s] -= take


cdef void _blocking_core(const int[:, ::1] prefs, const int[:] plen,
                         const int[:, ::1] prank, const int[:] cap,
                         const int[:] assign, unsigned char[:] mask,
                         int* scratch) noexcept nogil:
    cdef int n = plen.shape[0]
    cdef int m = cap.shape[0]
    cdef int* fill = scratch
    cdef int* worst = scratch + m
    cdef int i, s, t, a, bound
    for s in range(m):
        fill[s] = 0
        worst[s] = -1
    for i in range(n):
        s = assign[i]
        if s >= 0:
            fill[s] += 1
            if prank[s, i] > worst[s]:
                worst[s] = prank[s, i]
    for i in range(n):
        mask[i] = 0
        a = assign[i]
        bound = plen[i]
        if a >= 0:
            for t in range(plen[i]):
                if prefs[i, t] == a:
                    bound = t
                    break
        for t in range(bound):
            s = prefs[i, t]
            if fill[s] < cap[s] or prank[s, i] < worst[s]:
                mask[i] = 1
                break


cdef inline int _true_value(const int[:, ::1] prefs, const int[:] plen, int i, int a) noexcept nogil:
    cdef int t
    if a < 0:
        return plen[i]
    for t in range(plen[i]):
        if prefs[i, t] == a:
            return t
    return plen[i] + 1


def da(const int[:, ::1] prefs, const int[:] plen, const int[:] limit,
       const int[:, ::1] prank, const int[:] cap):
    cdef int n = prefs.shape[0]
    cdef int m = cap.shape[0]
    cdef int maxcap = _max_cap(cap)
    assign = np.empty(n, dtype=np.int32)
    cdef int[:] A = assign
    cdef int* scratch = <int*> malloc(sizeof(int) * max(_da_scratch_size(n, m, maxcap), 1))
    if scratch == NULL:
        raise MemoryError()
    try:
        _da_core(prefs, plen, limit, prank, cap, A, scratch, maxcap)
    finally:
        free(scratch)
    return assign


def boston(const int[:, ::1] prefs, const int[:] plen, const int[:] limit,
           const int[:, ::1] prank, const int[:] cap):
    cdef int n = prefs.shape[0]
    cdef int m = cap.shape[0]
    assign = np.empty(n, dtype=np.int32)
    cdef int[:] A = assign
    cdef int* scratch = <int*> malloc(sizeof(int) * max(_boston_scratch_size(n, m), 1))
    if scratch == NULL:
        raise MemoryError()
    try:
        _boston_core(prefs, plen, limit, prank, cap, A, scratch)
    finally:
        free(scratch)
    return assign


def fpf_adjust(const int[:, ::1] prefs, const int[:] plen, const int[:] limit,
               const int[:, ::1] prank, const unsigned char[:] fpf_mask):
    cdef int m = prank.shape[0]
    cdef int n = prefs.shape[0]
    out = np.empty((m, max(n, 1)), dtype=np.int32)
    cdef int[:, ::1] O = out
    cdef long long* keys = <long long*> malloc(sizeof(long long) * max(n, 1))
    cdef int* order = <int*> malloc(sizeof(int) * max(n, 1))
    if keys == NULL or order == NULL:
        free(keys)
        free(order)
        raise MemoryError()
    cdef int s, i, t, u, v, e, rc, moved
    cdef long long key
    try:
        for s in range(m):
            if not fpf_mask[s]:
                for i in range(n):
                    O[s, i] = prank[s, i]
                continue
            for i in range(n):
                rc = m + 1
                e = plen[i] if plen[i] < limit[i] else limit[i]
                for t in range(e):
                    if prefs[i, t] == s:
                        rc = t + 1
                        break
                keys[i] = (<long long> rc) * n + prank[s, i]
                order[i] = i
            for u in range(1, n):
                key = keys[u]
                moved = order[u]
                v = u - 1
                while v >= 0 and keys[v] > key:
                    keys[v + 1] = keys[v]
                    order[v + 1] = order[v]
                    v -= 1
                keys[v + 1] = key
                order[v + 1] = moved
            for t in range(n):
                O[s, order[t]] = t
    finally:
        free(keys)
        free(order)
    return out


def blocking_mask(const int[:, ::1] prefs, const int[:] plen,
                  const int[:, ::1] prank, const int[:] cap, const int[:] assign):
    cdef int n = prefs.shape[0]
    cdef int m = cap.shape[0]
    mask = np.empty(n, dtype=np.uint8)
    cdef unsigned char[:] M = mask
    cdef int* scratch = <int*> malloc(sizeof(int) * max(2 * m, 1))
    if scratch == NULL:
        raise MemoryError()
    try:
        _blocking_core(prefs, plen, prank, cap, assign, M, scratch)
    finally:
        free(scratch)
    return mask


def improving_mask(const int[:, ::1] true_prefs, const int[:] true_plen,
                   base_prefs, base_plen, const int[:] limit,
                   const int[:, ::1] prank, const int[:] cap,
                   int mech, const int[:, ::1] reports, const int[:] rlen,
                   const unsigned char[:] check):
    work_prefs = np.ascontiguousarray(base_prefs, dtype=np.int32).copy()
    work_plen = np.asarray(base_plen, dtype=np.int32).copy()
    cdef int[:, ::1] BP = work_prefs
    cdef int[:] BL = work_plen
    cdef int n = true_prefs.shape[0]
    cdef int m = cap.shape[0]
    cdef int width = BP.shape[1]
    cdef int maxcap = _max_cap(cap)

    mask = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[:] M = mask
    baseline = np.empty(n, dtype=np.int32)
    trial = np.empty(n, dtype=np.int32)
    cdef int[:] BASE = baseline
    cdef int[:] TRIAL = trial

    cdef int scratch_size = max(
        _da_scratch_size(n, m, maxcap), _boston_scratch_size(n, m)
    ) + max(width, 1)
    cdef int* scratch = <int*> malloc(sizeof(int) * max(scratch_size, 1))
    if scratch == NULL:
        raise MemoryError()
    cdef int* saved = scratch + scratch_size - max(width, 1)

    cdef int i, r, t, cur, v, saved_len, n_reports = reports.shape[0]
    try:
        if mech == MECH_DA:
            _da_core(BP, BL, limit, prank, cap, BASE, scratch, maxcap)
        else:
            _boston_core(BP, BL, limit, prank, cap, BASE, scratch)
        for i in range(n):
            if not check[i]:
                continue
            cur = _true_value(true_prefs, true_plen, i, BASE[i])
            if cur == 0:
                continue
            for t in range(width):
                saved[t] = BP[i, t]
            saved_len = BL[i]
            for r in range(n_reports):
                for t in range(width):
                    BP[i, t] = reports[r, t]
                BL[i] = rlen[r]
                if mech == MECH_DA:
                    _da_core(BP, BL, limit, prank, cap, TRIAL, scratch, maxcap)
                else:
                    _boston_core(BP, BL, limit, prank, cap, TRIAL, scratch)
                v = _true_value(true_prefs, true_plen, i, TRIAL[i])
                if v < cur:
                    M[i] = 1
                    break
            for t in range(width):
                BP[i, t] = saved[t]
            BL[i] = saved_len
    finally:
        free(scratch)
    return mask

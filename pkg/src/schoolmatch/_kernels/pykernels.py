"""Pure-Python kernel backend.

Mirrors the compiled extension function-for-function; used when the
extension is unavailable or when SCHOOLMATCH_BACKEND=py is set.  All
functions take the packed int32/uint8 numpy arrays produced by
``Instance.packed()`` and return numpy arrays, so results are
byte-interchangeable with the compiled backend.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

MECH_DA = 0
MECH_BOSTON = 1


def _da_core(prefs, plen, limit, prank, cap):
    n = len(plen)
    m = len(cap)
    eff = [min(plen[i], limit[i]) for i in range(n)]
    ptr = [0] * n
    held = [[] for _ in range(m)]
    stack = [i for i in range(n - 1, -1, -1) if eff[i] > 0]
    while stack:
        i = stack.pop()
        while ptr[i] < eff[i]:
            s = prefs[i][ptr[i]]
            ptr[i] += 1
            q = cap[s]
            if q == 0:
                continue
            hs = held[s]
            if len(hs) < q:
                hs.append(i)
                break
            pr = prank[s]
            worst = 0
            for t in range(1, q):
                if pr[hs[t]] > pr[hs[worst]]:
                    worst = t
            if pr[i] < pr[hs[worst]]:
                stack.append(hs[worst])
                hs[worst] = i
                break
    assign = [-1] * n
    for s in range(m):
        for i in held[s]:
            assign[i] = s
    return assign


def _boston_core(prefs, plen, limit, prank, cap):
    n = len(plen)
    m = len(cap)
    eff = [min(plen[i], limit[i]) for i in range(n)]
    rem = list(cap)
    assign = [-1] * n
    max_len = max(eff, default=0)
    for t in range(max_len):
        apps = [[] for _ in range(m)]
        any_app = False
        for i in range(n):
            if assign[i] == -1 and t < eff[i]:
                apps[prefs[i][t]].append(i)
                any_app = True
        if not any_app:
            break
        for s in range(m):
            take = min(rem[s], len(apps[s]))
            if take == 0:
                continue
            if take < len(apps[s]):
                pr = prank[s]
                winners = sorted(apps[s], key=lambda i: pr[i])[:take]
            else:
                winners = apps[s]
            for i in winners:
                assign[i] = s
            rem[s] -= take
    return assign


def _fpf_prank(prefs, plen, limit, prank, fpf_mask):
    n = len(plen)
    m = len(fpf_mask)
    sentinel = m + 1
    out = []
    for s in range(m):
        pr = prank[s]
        if not fpf_mask[s]:
            out.append(list(pr))
            continue
        keys = []
        for i in range(n):
            rc = sentinel
            e = min(plen[i], limit[i])
            for t in range(e):
                if prefs[i][t] == s:
                    rc = t + 1
                    break
            keys.append((rc, pr[i], i))
        keys.sort()
        row = [0] * n
        for pos, (_, _, i) in enumerate(keys):
            row[i] = pos
        out.append(row)
    return out


def _blocking_core(prefs, plen, prank, cap, assign):
    n = len(plen)
    m = len(cap)
    fill = [0] * m
    worst = [-1] * m
    for i in range(n):
        s = assign[i]
        if s >= 0:
            fill[s] += 1
            r = prank[s][i]
            if r > worst[s]:
                worst[s] = r
    mask = [0] * n
    for i in range(n):
        a = assign[i]
        bound = plen[i]
        if a >= 0:
            for t in range(plen[i]):
                if prefs[i][t] == a:
                    bound = t
                    break
        for t in range(bound):
            s = prefs[i][t]
            if fill[s] < cap[s] or prank[s][i] < worst[s]:
                mask[i] = 1
                break
    return mask


def _run(mech, prefs, plen, limit, prank, cap):
    if mech == MECH_DA:
        return _da_core(prefs, plen, limit, prank, cap)
    return _boston_core(prefs, plen, limit, prank, cap)


def _value(tp_row, tp_len, a):
    # position in the true list; outside option sits at tp_len; an assigned
    # school missing from the list is worse than the outside option
    if a < 0:
        return tp_len
    for t in range(tp_len):
        if tp_row[t] == a:
            return t
    return tp_len + 1


def _improving_core(
    true_prefs, true_plen, base_prefs, base_plen, limit, prank, cap, mech, reports, rlen, check
):
    n = len(true_plen)
    base_prefs = [list(row) for row in base_prefs]
    base_plen = list(base_plen)
    baseline = _run(mech, base_prefs, base_plen, limit, prank, cap)
    mask = [0] * n
    n_reports = len(rlen)
    for i in range(n):
        if not check[i]:
            continue
        cur = _value(true_prefs[i], true_plen[i], baseline[i])
        if cur == 0:
            continue
        saved_row = base_prefs[i]
        saved_len = base_plen[i]
        for r in range(n_reports):
            base_prefs[i] = reports[r]
            base_plen[i] = rlen[r]
            trial = _run(mech, base_prefs, base_plen, limit, prank, cap)
            if _value(true_prefs[i], true_plen[i], trial[i]) < cur:
                mask[i] = 1
                break
        base_prefs[i] = saved_row
        base_plen[i] = saved_len
    return mask


# -- public API (numpy in, numpy out) ----------------------------------------


def da(prefs, plen, limit, prank, cap):
    assign = _da_core(prefs.tolist(), plen.tolist(), limit.tolist(), prank.tolist(), cap.tolist())
    return np.asarray(assign, dtype=np.int32)


def boston(prefs, plen, limit, prank, cap):
    assign = _boston_core(
        prefs.tolist(), plen.tolist(), limit.tolist(), prank.tolist(), cap.tolist()
    )
    return np.asarray(assign, dtype=np.int32)


def fpf_adjust(prefs, plen, limit, prank, fpf_mask):
    rows = _fpf_prank(
        prefs.tolist(), plen.tolist(), limit.tolist(), prank.tolist(), fpf_mask.tolist()
    )
    if not rows:
        return np.empty_like(prank)
    return np.asarray(rows, dtype=np.int32)


def blocking_mask(prefs, plen, prank, cap, assign):
    mask = _blocking_core(
        prefs.tolist(), plen.tolist(), prank.tolist(), cap.tolist(), assign.tolist()
    )
    return np.asarray(mask, dtype=np.uint8)


def improving_mask(
    true_prefs, true_plen, base_prefs, base_plen, limit, prank, cap, mech, reports, rlen, check
):
    mask = _improving_core(
        true_prefs.tolist(),
        true_plen.tolist(),
        base_prefs.tolist(),
        base_plen.tolist(),
        limit.tolist(),
        prank.tolist(),
        cap.tolist(),
        int(mech),
        reports.tolist(),
        rlen.tolist(),
        check.tolist(),
    )
    return np.asarray(mask, dtype=np.uint8)

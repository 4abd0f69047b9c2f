"""Compiled inner loops.

All kernels take points in canonical order (nondecreasing time) as
plain float64 arrays and avoid any fastmath reassociation so that
results are bit-reproducible across runs and thread counts.

Exactness notes for the pruned kernels live next to the pruning steps;
every rejection is justified by an inequality that holds for the exact
values, never by a heuristic threshold.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = np.inf

# Multiplicative slop for the division-free feasibility precheck
# dx^2 <= 2 dt (cur - e).  The precheck only skips candidates, so it
# must never reject one the exact comparison would keep; the margin
# covers the few-ulp discrepancy between the two forms.
_MARGIN = 1.0 + 1e-12


@njit(cache=True, nogil=True)
def frontier_kernel(ts, xs, cap, k_max):
    """Dense per-level DP table of minimal k-chain entropies.

    minent[k-1, j] is the least entropy over chains of exactly k cloud
    points ending at point j (origin step included); bp[k-1, j] is the
    canonical index of the predecessor realizing it, -1 for the origin
    and -2 when no chain with entropy <= cap exists.  Ties prefer the
    lowest predecessor index.  Returns (minent, bp, levels) where
    levels counts rows with at least one feasible endpoint.

    cap = inf gives the unconstrained table.  Cost O(k_max * m^2)
    worst case; the prefix-minimum break keeps typical cost far lower.
    """
    m = ts.size
    minent = np.full((k_max, m), INF)
    bp = np.full((k_max, m), -2, dtype=np.int32)
    e_prev = np.full(m, INF)
    alive_any = False
    for j in range(m):
        if ts[j] > 0.0:
            e0 = xs[j] * xs[j] / (2.0 * ts[j])
            if e0 <= cap:
                e_prev[j] = e0
                minent[0, j] = e0
                bp[0, j] = -1
                alive_any = True
    if not alive_any or k_max == 1:
        return minent, bp, (1 if alive_any else 0)
    levels = 1
    pm = np.empty(m)
    e_next = np.empty(m)
    for k in range(1, k_max):
        run = INF
        for i in range(m):
            if e_prev[i] < run:
                run = e_prev[i]
            pm[i] = run
        alive_any = False
        for j in range(m):
            e_next[j] = INF
            # a point with no feasible k-chain has no feasible
            # (k+1)-chain either: dropping the second point of a
            # (k+1)-chain leaves a k-chain at j with no larger entropy
            if e_prev[j] == INF:
                continue
            cur = cap
            arg = np.int32(-2)
            tj = ts[j]
            xj = xs[j]
            for i in range(j - 1, -1, -1):
                pmi = pm[i]
                # every remaining candidate value is >= its e, hence
                # >= the prefix minimum; strict excess cannot help and
                # ties are still scanned so the lowest index wins
                if pmi > cur:
                    break
                if pmi == INF:
                    break
                ei = e_prev[i]
                if ei > cur:
                    continue
                dt = tj - ts[i]
                if dt <= 0.0:
                    continue
                dx = xj - xs[i]
                rem = cur - ei
                if dx * dx > 2.0 * dt * rem * _MARGIN:
                    continue
                val = ei + dx * dx / (2.0 * dt)
                if val <= cur:
                    cur = val
                    arg = np.int32(i)
            if arg != np.int32(-2):
                e_next[j] = cur
                minent[k, j] = cur
                bp[k, j] = arg
                alive_any = True
        if not alive_any:
            break
        levels = k + 1
        tmp = e_prev
        e_prev = e_next
        e_next = tmp
    return minent, bp, levels


@njit(cache=True, nogil=True)
def value_kernel(ts, xs, cap, k_max, x_span, record, bp_out):
    """Largest k admitting a k-chain with entropy <= cap.

    Level-synchronous DP over a compacted list of feasible endpoints.
    Within each level the endpoints are grouped into time buckets,
    each bucket counting-sorted into position cells, and three exact
    prunes apply:

    * excess break: e_i + step(i,j) >= step0(j) + (e_i - step0(i)) by
      the straight-line inequality, so once every remaining bucket's
      minimal excess e - step0 exceeds cur - step0(j) nothing can
      improve cur;
    * position window: the same inequality confines useful candidates
      to a tube around the ray from the origin through j, intersected
      with the bucket's time range; only cells meeting the window are
      scanned;
    * division-free per-candidate precheck with exact re-test.

    x_span is unused (kept for signature stability).

    With record != 0, per-level backpointers are written into bp_out
    (shape at least (k_max, m), canonical indices, -1 for the origin)
    with the lowest-index tie rule, and equality never short-circuits
    a break.  With record == 0 bp_out may be a 1x1 dummy and ties may
    resolve arbitrarily; the value is exact either way.

    Returns (levels, best_end) where best_end is the canonical index
    of the lowest-index endpoint attaining the minimal entropy at the
    last feasible level (-1 when levels == 0).
    """
    m = ts.size
    if m == 0 or k_max <= 0:
        return 0, np.int64(-1)
    ts_c = np.empty(m)
    xs_c = np.empty(m)
    e_c = np.empty(m)
    ex_c = np.empty(m)          # chain excess e - step0, level k
    orig = np.empty(m, dtype=np.int64)
    warm = np.full(m, -1, dtype=np.int64)
    a = 0
    for j in range(m):
        if ts[j] > 0.0:
            e0 = xs[j] * xs[j] / (2.0 * ts[j])
            if e0 <= cap:
                ts_c[a] = ts[j]
                xs_c[a] = xs[j]
                e_c[a] = e0
                ex_c[a] = 0.0
                orig[a] = j
                if record != 0:
                    bp_out[0, j] = -1
                a += 1
    if a == 0:
        return 0, np.int64(-1)
    # bucket granularity trades break resolution against per-visit
    # overhead; measured optimum grows with the live state count
    if a < 3000:
        bucket = 64
    elif a < 6000:
        bucket = 128
    else:
        bucket = 256
    ncell = bucket
    level = 1
    e_new = np.empty(m)
    best = np.full(m, -1, dtype=np.int64)
    sx = np.empty(m)
    se = np.empty(m)
    st = np.empty(m)
    sorder = np.empty(m, dtype=np.int64)
    cell_of = np.empty(m, dtype=np.int64)
    n_bmax = m // bucket + 1
    b_tlo = np.empty(n_bmax)
    b_thi = np.empty(n_bmax)
    b_exmin = np.empty(n_bmax)
    b_pm = np.empty(n_bmax)
    b_xmin = np.empty(n_bmax)
    b_xmax = np.empty(n_bmax)
    b_inv = np.empty(n_bmax)
    off = np.empty(n_bmax * (ncell + 1), dtype=np.int64)
    fill = np.empty(n_bmax * ncell, dtype=np.int64)
    newpos = np.empty(m, dtype=np.int64)
    while level < k_max:
        nb = (a + bucket - 1) // bucket
        for b in range(nb):
            lo = b * bucket
            hi = min(lo + bucket, a)
            exmin = INF
            xmn = xs_c[lo]
            xmx = xs_c[lo]
            for i in range(lo, hi):
                if ex_c[i] < exmin:
                    exmin = ex_c[i]
                xi = xs_c[i]
                if xi < xmn:
                    xmn = xi
                if xi > xmx:
                    xmx = xi
            b_exmin[b] = exmin
            b_tlo[b] = ts_c[lo]
            b_thi[b] = ts_c[hi - 1]
            b_xmin[b] = xmn
            b_xmax[b] = xmx
            width = xmx - xmn
            b_inv[b] = ncell / width if width > 0.0 else 0.0
        run = INF
        for b in range(nb):
            if b_exmin[b] < run:
                run = b_exmin[b]
            b_pm[b] = run
        # counting sort of each bucket into position cells; cell
        # assignment is a monotone map of x, so a window in x maps to
        # a contiguous cell range
        for b in range(nb):
            fbase = b * ncell
            for c in range(ncell):
                fill[fbase + c] = 0
            lo = b * bucket
            hi = min(lo + bucket, a)
            xmn = b_xmin[b]
            inv = b_inv[b]
            for i in range(lo, hi):
                c = np.int64((xs_c[i] - xmn) * inv)
                if c > ncell - 1:
                    c = ncell - 1
                cell_of[i] = c
                fill[fbase + c] += 1
        for b in range(nb):
            fbase = b * ncell
            obase = b * (ncell + 1)
            run_i = b * bucket
            for c in range(ncell):
                off[obase + c] = run_i
                run_i += fill[fbase + c]
                fill[fbase + c] = 0
            off[obase + ncell] = run_i
        for b in range(nb):
            fbase = b * ncell
            obase = b * (ncell + 1)
            lo = b * bucket
            hi = min(lo + bucket, a)
            for i in range(lo, hi):
                c = cell_of[i]
                p = off[obase + c] + fill[fbase + c]
                fill[fbase + c] += 1
                sx[p] = xs_c[i]
                se[p] = e_c[i]
                st[p] = ts_c[i]
                sorder[p] = i
        alive = 0
        for jp in range(a):
            tj = ts_c[jp]
            xj = xs_c[jp]
            s0 = xj * xj / (2.0 * tj)
            cur = cap
            found = False
            arg = np.int64(-1)
            w = warm[jp]
            if w >= 0:
                # previous level's best predecessor, exact test first;
                # a tight cur up front is what makes the breaks bite
                dt = tj - ts_c[w]
                if dt > 0.0:
                    dx = xj - xs_c[w]
                    v = e_c[w] + dx * dx / (2.0 * dt)
                    if v <= cur:
                        cur = v
                        found = True
                        arg = w
            jb = jp // bucket
            slack = cur - s0
            for b in range(jb, -1, -1):
                pmb = b_pm[b]
                if pmb > slack:
                    break
                if pmb == slack and found and record == 0:
                    break
                if b_exmin[b] > slack:
                    continue
                if b_exmin[b] == slack and found and record == 0:
                    continue
                tlo = b_tlo[b]
                dtmax = tj - tlo
                if dtmax <= 0.0:
                    continue
                thi = b_thi[b]
                th = thi if thi < tj else tj
                w2 = 2.0 * th * dtmax * (slack - b_exmin[b]) / tj
                if w2 < 0.0:
                    w2 = 0.0
                half = np.sqrt(w2) * _MARGIN
                c1 = xj * tlo / tj
                c2 = xj * th / tj
                if c1 > c2:
                    c1, c2 = c2, c1
                wlo = c1 - half
                whi = c2 + half
                if whi < b_xmin[b] or wlo > b_xmax[b]:
                    continue
                inv = b_inv[b]
                clo = np.int64((wlo - b_xmin[b]) * inv)
                if clo < 0:
                    clo = 0
                chi = np.int64((whi - b_xmin[b]) * inv)
                if chi > ncell - 1:
                    chi = ncell - 1
                base = b * (ncell + 1)
                p_lo = off[base + clo]
                p_hi = off[base + chi + 1]
                for p in range(p_lo, p_hi):
                    ei = se[p]
                    if ei > cur:
                        continue
                    dt = tj - st[p]
                    if dt <= 0.0:
                        continue
                    dx = xj - sx[p]
                    rem = cur - ei
                    if dx * dx > 2.0 * dt * rem * _MARGIN:
                        continue
                    v = ei + dx * dx / (2.0 * dt)
                    i = sorder[p]
                    if v < cur or (v == cur and (not found or orig[i] < orig[arg])):
                        cur = v
                        found = True
                        arg = i
                slack = cur - s0
            if found:
                e_new[jp] = cur
                best[jp] = arg
                if record != 0:
                    bp_out[level, orig[jp]] = orig[arg]
                alive += 1
            else:
                e_new[jp] = INF
        if alive == 0:
            break
        a2 = 0
        for jp in range(a):
            if e_new[jp] < INF:
                newpos[jp] = a2
                a2 += 1
            else:
                newpos[jp] = -1
        for jp in range(a):
            np_j = newpos[jp]
            if np_j >= 0:
                ts_c[np_j] = ts_c[jp]
                xs_c[np_j] = xs_c[jp]
                e_c[np_j] = e_new[jp]
                ex_c[np_j] = e_new[jp] - xs_c[np_j] * xs_c[np_j] / (2.0 * ts_c[np_j])
                orig[np_j] = orig[jp]
                b = best[jp]
                warm[np_j] = newpos[b] if b >= 0 else -1
        a = a2
        level += 1
    best_end = np.int64(-1)
    e_best = INF
    for i in range(a):
        if e_c[i] < e_best:
            e_best = e_c[i]
            best_end = orig[i]
    return level, best_end


@njit(cache=True, nogil=True)
def subset_tables(n):
    """Highest set bit and popcount for all masks below 2^n."""
    size = 1 << n
    top = np.empty(size, dtype=np.int8)
    pc = np.empty(size, dtype=np.int8)
    top[0] = -1
    pc[0] = 0
    for mask in range(1, size):
        top[mask] = top[mask >> 1] + 1 if mask > 1 else 0
        pc[mask] = pc[mask >> 1] + (mask & 1)
    return top, pc


@njit(cache=True, nogil=True)
def subset_entropies(ts, xs, top):
    """Entropy of every subset, taken in canonical (time) order.

    ent[mask] uses the recursion over the highest set bit: the chain of
    a subset is its members in index order, so dropping the last point
    leaves the chain of the remaining mask.
    """
    n = ts.size
    size = 1 << n
    ent = np.empty(size)
    ent[0] = 0.0
    for mask in range(1, size):
        tp = top[mask]
        rest = mask ^ (1 << tp)
        if rest == 0:
            pt = 0.0
            px = 0.0
        else:
            pp = top[rest]
            pt = ts[pp]
            px = xs[pp]
        dt = ts[tp] - pt
        if dt <= 0.0:
            ent[mask] = INF
        else:
            dx = xs[tp] - px
            ent[mask] = ent[rest] + dx * dx / (2.0 * dt)
    return ent


@njit(cache=True, nogil=True)
def brute_best_count(ent, pc, budget):
    best = 0
    for mask in range(ent.size):
        if ent[mask] <= budget and pc[mask] > best:
            best = pc[mask]
    return best


@njit(cache=True, nogil=True)
def _lex_less(a, b, n):
    """Is subset a lexicographically before subset b as an ascending
    index sequence?  A strict prefix counts as smaller."""
    d = a ^ b
    if d == 0:
        return False
    low = 0
    for i in range(n):
        if d >> i & 1:
            low = i
            break
    rest = n - low - 1
    if a >> low & 1:
        # a's next element is low; a wins unless b is already exhausted,
        # which makes b a strict prefix of a
        return (b >> (low + 1)) != 0 if rest > 0 else False
    return (a >> (low + 1)) == 0 if rest > 0 else True


@njit(cache=True, nogil=True)
def brute_best_gain(ent, top, weighted, n):
    """Maximize weighted sum minus entropy over all subsets.

    weighted[i] is beta * w_i.  Empty set scores 0.  Among exact value
    ties the lexicographically smallest index set wins, empty set
    first of all.  Returns (value, mask).
    """
    best_val = 0.0
    best_mask = 0
    gain = np.empty(ent.size)
    gain[0] = 0.0
    for mask in range(1, ent.size):
        tp = top[mask]
        gain[mask] = gain[mask ^ (1 << tp)] + weighted[tp]
        if ent[mask] == INF:
            continue
        v = gain[mask] - ent[mask]
        if v > best_val:
            best_val = v
            best_mask = mask
        elif v == best_val and best_mask != 0 and _lex_less(mask, best_mask, n):
            best_mask = mask
    return best_val, best_mask


@njit(cache=True, nogil=True)
def variational_kernel(ts, xs, weighted):
    """Best chain score g[j] = weighted[j] + max over predecessors of
    (g[i] - step(i, j)), origin allowed, for points in canonical order.

    bp[j] is the predecessor index, -1 for the origin.  The origin
    option is the default and a predecessor must strictly beat it;
    among tying predecessors the lowest index wins (ascending scan,
    strict improvement).
    """
    n = ts.size
    g = np.full(n, -INF)
    bp = np.full(n, -1, dtype=np.int64)
    for j in range(n):
        tj = ts[j]
        xj = xs[j]
        best = -INF
        if tj > 0.0:
            best = -(xj * xj) / (2.0 * tj)
        arg = np.int64(-1)
        for i in range(j):
            if g[i] == -INF:
                continue
            dt = tj - ts[i]
            if dt <= 0.0:
                continue
            dx = xj - xs[i]
            v = g[i] - dx * dx / (2.0 * dt)
            if v > best:
                best = v
                arg = i
        if best == -INF:
            g[j] = -INF
        else:
            g[j] = weighted[j] + best
        bp[j] = arg
    return g, bp

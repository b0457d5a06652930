"""Compiled tree growing for binary Gini trees (CART and extremely randomised)."""

import numpy as np
from numba import njit

EPS = 1e-7


@njit(cache=True)
def _gini(w_pos, w_tot):
    if w_tot <= 0.0:
        return 0.0
    p = w_pos / w_tot
    return 2.0 * p * (1.0 - p)


@njit(cache=True)
def _best_split(X, y, w, idx, start, end, max_features, random_split, w_root):
    """Return (feature, threshold, improvement, n_left) or feature -1 if unsplittable."""
    n_features = X.shape[1]
    n = end - start
    w_tot = 0.0
    w_pos = 0.0
    for t in range(start, end):
        i = idx[t]
        w_tot += w[i]
        if y[i] == 1:
            w_pos += w[i]
    parent_imp = _gini(w_pos, w_tot)

    feats = np.arange(n_features)
    for a in range(n_features - 1, 0, -1):
        b = np.random.randint(0, a + 1)
        tmp = feats[a]
        feats[a] = feats[b]
        feats[b] = tmp

    best_f = -1
    best_thr = 0.0
    best_child = np.inf
    best_nl = 0
    visited = 0
    vals = np.empty(n)
    ws = np.empty(n)
    ys = np.empty(n, dtype=np.int64)
    for fi in range(n_features):
        if visited >= max_features:
            break
        f = feats[fi]
        lo = np.inf
        hi = -np.inf
        for t in range(n):
            v = X[idx[start + t], f]
            vals[t] = v
            if v < lo:
                lo = v
            if v > hi:
                hi = v
        if hi <= lo + 1e-12 * max(1.0, abs(lo)):
            continue  # constant in this node, does not count as visited
        visited += 1
        if random_split:
            thr = lo + (hi - lo) * np.random.random()
            if thr >= hi:
                thr = lo
            wl = 0.0
            wlp = 0.0
            nl = 0
            for t in range(n):
                i = idx[start + t]
                if vals[t] <= thr:
                    wl += w[i]
                    nl += 1
                    if y[i] == 1:
                        wlp += w[i]
            wr = w_tot - wl
            wrp = w_pos - wlp
            child = wl * _gini(wlp, wl) + wr * _gini(wrp, wr)
            if nl > 0 and nl < n and child < best_child:
                best_child = child
                best_f = f
                best_thr = thr
                best_nl = nl
        else:
            order = np.argsort(vals, kind="mergesort")
            for t in range(n):
                i = idx[start + order[t]]
                ws[t] = w[i]
                ys[t] = y[i]
            wl = 0.0
            wlp = 0.0
            for t in range(n - 1):
                wl += ws[t]
                if ys[t] == 1:
                    wlp += ws[t]
                v0 = vals[order[t]]
                v1 = vals[order[t + 1]]
                if v1 <= v0 + 1e-12 * max(1.0, abs(v0)):
                    continue
                wr = w_tot - wl
                wrp = w_pos - wlp
                child = wl * _gini(wlp, wl) + wr * _gini(wrp, wr)
                if child < best_child - 1e-15:
                    best_child = child
                    best_f = f
                    thr = 0.5 * (v0 + v1)
                    if thr >= v1:
                        thr = v0
                    best_thr = thr
                    best_nl = t + 1
    if best_f < 0:
        return -1, 0.0, 0.0, 0, parent_imp, w_tot, w_pos
    improvement = (w_tot * parent_imp - best_child) / w_root
    return best_f, best_thr, improvement, best_nl, parent_imp, w_tot, w_pos


@njit(cache=True)
def _partition(X, idx, start, end, f, thr):
    lo = start
    hi = end - 1
    while lo <= hi:
        if X[idx[lo], f] <= thr:
            lo += 1
        else:
            tmp = idx[lo]
            idx[lo] = idx[hi]
            idx[hi] = tmp
            hi -= 1
    return lo


@njit(cache=True)
def build_tree(X, y, w, max_depth, max_features, max_leaf_nodes,
               min_impurity_decrease, random_split, seed):
    """Grow a tree; returns (feature, threshold, left, right, value, impurity, weight).

    ``max_depth`` < 0 means unlimited; ``max_leaf_nodes`` <= 0 means
    depth-first growth without a leaf cap, otherwise best-first growth.
    """
    np.random.seed(seed)
    n = X.shape[0]
    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap)
    impurity = np.zeros(cap)
    weight = np.zeros(cap)
    idx = np.arange(n)
    w_root = 0.0
    for i in range(n):
        w_root += w[i]

    # per node bookkeeping
    nstart = np.zeros(cap, dtype=np.int64)
    nend = np.zeros(cap, dtype=np.int64)
    ndepth = np.zeros(cap, dtype=np.int64)
    sf = np.full(cap, -1, dtype=np.int64)
    sthr = np.zeros(cap)
    simp = np.zeros(cap)
    snl = np.zeros(cap, dtype=np.int64)

    n_nodes = 1
    nstart[0] = 0
    nend[0] = n
    ndepth[0] = 0
    best_first = max_leaf_nodes > 0
    frontier = np.zeros(cap, dtype=np.int64)
    frontier[0] = 0
    n_front = 1
    n_leaves = 1
    if best_first:
        f, thr, imp, nl, pimp, wt, wp = _best_split(
            X, y, w, idx, 0, n, max_features, random_split, w_root)
        impurity[0] = pimp
        weight[0] = wt
        value[0] = wp / wt if wt > 0 else 0.0
        if (f >= 0 and pimp > EPS and n >= 2 and max_depth != 0
                and not (imp + EPS < min_impurity_decrease)):
            sf[0] = f
            sthr[0] = thr
            simp[0] = imp
        else:
            n_front = 0

    while n_front > 0:
        if best_first:
            # evaluate any unevaluated frontier node lazily: all were evaluated on insert
            pick = 0
            for q in range(1, n_front):
                if simp[frontier[q]] > simp[frontier[pick]]:
                    pick = q
            node = frontier[pick]
            frontier[pick] = frontier[n_front - 1]
            n_front -= 1
            if sf[node] < 0 or n_leaves >= max_leaf_nodes:
                continue
        else:
            n_front -= 1
            node = frontier[n_front]
            s = nstart[node]
            e = nend[node]
            f, thr, imp, nl, pimp, wt, wp = _best_split(
                X, y, w, idx, s, e, max_features, random_split, w_root)
            impurity[node] = pimp
            weight[node] = wt
            value[node] = wp / wt if wt > 0 else 0.0
            if (f < 0 or pimp <= EPS or e - s < 2
                    or (max_depth >= 0 and ndepth[node] >= max_depth)
                    or imp + EPS < min_impurity_decrease):
                continue
            sf[node] = f
            sthr[node] = thr
            snl[node] = nl

        s = nstart[node]
        e = nend[node]
        mid = _partition(X, idx, s, e, sf[node], sthr[node])
        feature[node] = sf[node]
        threshold[node] = sthr[node]
        lc = n_nodes
        rc = n_nodes + 1
        n_nodes += 2
        left[node] = lc
        right[node] = rc
        n_leaves += 1
        nstart[lc] = s
        nend[lc] = mid
        nstart[rc] = mid
        nend[rc] = e
        ndepth[lc] = ndepth[node] + 1
        ndepth[rc] = ndepth[node] + 1
        if best_first:
            for child in (lc, rc):
                cs = nstart[child]
                ce = nend[child]
                f, thr, imp, nl, pimp, wt, wp = _best_split(
                    X, y, w, idx, cs, ce, max_features, random_split, w_root)
                impurity[child] = pimp
                weight[child] = wt
                value[child] = wp / wt if wt > 0 else 0.0
                if (f >= 0 and pimp > EPS and ce - cs >= 2
                        and not (max_depth >= 0 and ndepth[child] >= max_depth)
                        and not (imp + EPS < min_impurity_decrease)):
                    sf[child] = f
                    sthr[child] = thr
                    simp[child] = imp
                    frontier[n_front] = child
                    n_front += 1
        else:
            frontier[n_front] = rc
            n_front += 1
            frontier[n_front] = lc
            n_front += 1

    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes],
            value[:n_nodes], impurity[:n_nodes], weight[:n_nodes])


@njit(cache=True)
def apply_tree(X, feature, threshold, left, right, value):
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        node = 0
        while left[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out

"""Pure-Python Karp kernels; same contract as the compiled ``_ckernels``.

Vertices are numbered ``0..n-1``. In-edges of vertex ``j`` are
``pred[indptr[j]:indptr[j+1]]`` with weights ``weight[...]``, predecessors in
increasing order so the first strict minimum is the smallest predecessor.
"""
import numpy as np


def karp_fill(n, source, indptr, pred, weight):
    """Fill the ``(n+1) x n`` Karp tables.

    Returns ``(F, B, R)``: path weights, backpointers (-1 where none) and the
    reachability mask. ``F`` is meaningless wherever ``R`` is false.
    """
    indptr = [int(i) for i in indptr]
    pred = [int(i) for i in pred]
    weight = [float(w) for w in weight]
    prev_f = [0.0] * n
    prev_r = [False] * n
    prev_r[source] = True
    rows_f, rows_r, rows_b = [prev_f], [prev_r], [[-1] * n]
    for _ in range(n):
        cur_f = [0.0] * n
        cur_r = [False] * n
        cur_b = [-1] * n
        for j in range(n):
            best = 0.0
            arg = -1
            for e in range(indptr[j], indptr[j + 1]):
                i = pred[e]
                if prev_r[i]:
                    cand = prev_f[i] + weight[e]
                    if arg < 0 or cand < best:
                        best = cand
                        arg = i
            if arg >= 0:
                cur_f[j] = best
                cur_r[j] = True
                cur_b[j] = arg
        rows_f.append(cur_f)
        rows_r.append(cur_r)
        rows_b.append(cur_b)
        prev_f, prev_r = cur_f, cur_r
    return (np.array(rows_f, dtype=np.float64).reshape(n + 1, n),
            np.array(rows_b, dtype=np.int32).reshape(n + 1, n),
            np.array(rows_r, dtype=bool).reshape(n + 1, n))


def karp_min_mean(F, R, scan, tol):
    """Minimise over ``v`` the maximum over ``k`` of the Karp ratio.

    Vertices are visited in ``scan`` order and ties go to the earlier one;
    within a vertex ties go to the smallest ``k``. Returns ``(mu, v, k)`` with
    ``v == -1`` when no vertex is reachable at level n.
    """
    n = F.shape[1]
    f_last = F[n].tolist()
    r_last = R[n].tolist()
    cols_f = F.T.tolist()
    cols_r = R.T.tolist()
    best_mu = 0.0
    v_star = -1
    k_star = -1
    for v in scan:
        v = int(v)
        if not r_last[v]:
            continue
        fv = cols_f[v]
        rv = cols_r[v]
        top = 0.0
        k_top = -1
        for k in range(n):
            if rv[k]:
                ratio = (f_last[v] - fv[k]) / (n - k)
                if k_top < 0 or ratio > top + tol:
                    top = ratio
                    k_top = k
        if k_top < 0:
            continue
        if v_star < 0 or top < best_mu - tol:
            best_mu = top
            v_star = v
            k_star = k_top
    return best_mu, v_star, k_star

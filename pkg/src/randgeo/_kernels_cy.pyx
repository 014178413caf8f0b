# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Same API and same floating point arithmetic as
randgeo._kernels_py, just with the loops in C."""

import numpy as np

cimport cython
cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()

BACKEND_NAME = "cython"

# table builders are shared with the NumPy module; only consumers are hot
from randgeo._kernels_py import range_min, sparse_min_table


def build_tree_from_dyck(steps):
    """Decode a balanced Dyck word into (parent, contour); see the NumPy
    twin for the conventions."""
    cdef cnp.int64_t[::1] s = np.ascontiguousarray(steps, dtype=np.int64)
    cdef Py_ssize_t two_n = s.shape[0]
    cdef Py_ssize_t n = two_n // 2
    parent_arr = np.empty(n + 1, dtype=np.int64)
    contour_arr = np.empty(2 * n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] parent = parent_arr
    cdef cnp.int64_t[::1] contour = contour_arr
    stack_arr = np.empty(n + 2, dtype=np.int64)
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef Py_ssize_t top = 0, i
    cdef cnp.int64_t nxt = 1, cur = 0
    parent[0] = -1
    contour[0] = 0
    stack[0] = 0
    for i in range(two_n):
        if s[i] == 1:
            parent[nxt] = cur
            cur = nxt
            nxt += 1
            top += 1
            stack[top] = cur
        else:
            top -= 1
            cur = stack[top]
        contour[i + 1] = cur
    return parent_arr, contour_arr


def cvs_successor(corner_labels):
    """Next corner clockwise with label one less; -1 for label-1 corners."""
    cdef cnp.int64_t[::1] lab = np.ascontiguousarray(corner_labels, dtype=np.int64)
    cdef Py_ssize_t m = lab.shape[0]
    succ_arr = np.full(m, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] succ = succ_arr
    cdef cnp.int64_t max_lab = 0
    cdef Py_ssize_t i, j
    cdef cnp.int64_t value, c
    for i in range(m):
        if lab[i] > max_lab:
            max_lab = lab[i]
    head_arr = np.full(max_lab + 2, -1, dtype=np.int64)
    nxt_arr = np.full(m, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] head = head_arr
    cdef cnp.int64_t[::1] nxt = nxt_arr
    for j in range(2 * m):
        i = j % m
        value = lab[i]
        c = head[value]
        while c != -1:
            if succ[c] == -1:
                succ[c] = i
            c = nxt[c]
        head[value] = -1
        if j < m and value >= 2:
            nxt[i] = head[value - 1]
            head[value - 1] = i
    return succ_arr


def bfs_csr(xadj, nbr, source):
    """Graph distances from source; -1 where unreachable."""
    cdef cnp.int64_t[::1] xa = np.ascontiguousarray(xadj, dtype=np.int64)
    cdef cnp.int64_t[::1] nb = np.ascontiguousarray(nbr, dtype=np.int64)
    cdef Py_ssize_t n_vertices = xa.shape[0] - 1
    dist_arr = np.full(n_vertices, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    queue_arr = np.empty(n_vertices, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t lo = 0, hi = 1
    cdef cnp.int64_t u, v
    cdef Py_ssize_t e
    dist[source] = 0
    queue[0] = source
    while lo < hi:
        u = queue[lo]
        lo += 1
        for e in range(xa[u], xa[u + 1]):
            v = nb[e]
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue[hi] = v
                hi += 1
    return dist_arr


def dijkstra_dzero(Z, table, logt, source, circular):
    """Single-source chain-infimum distances; see the NumPy twin."""
    cdef cnp.float64_t[::1] z = np.ascontiguousarray(Z, dtype=np.float64)
    cdef cnp.float64_t[:, ::1] tb = np.ascontiguousarray(table, dtype=np.float64)
    cdef cnp.int64_t[::1] lg = np.ascontiguousarray(logt, dtype=np.int64)
    cdef Py_ssize_t m = z.shape[0]
    cdef bint circ = bool(circular)
    dist_arr = np.full(m, np.inf)
    pred_arr = np.full(m, -1, dtype=np.int64)
    cdef cnp.float64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] pred = pred_arr
    done_arr = np.zeros(m, dtype=np.uint8)
    cdef cnp.uint8_t[::1] done = done_arr
    cdef Py_ssize_t it, j, u, a, b, k
    cdef double best, zu, du, mf, mb, w, trial
    dist[source] = 0.0
    for it in range(m):
        u = -1
        best = INFINITY
        for j in range(m):
            if not done[j] and dist[j] < best:
                best = dist[j]
                u = j
        if u < 0:
            break
        done[u] = 1
        zu = z[u]
        du = dist[u]
        for j in range(m):
            if done[j]:
                continue
            if circ:
                if j >= u:
                    b = j
                else:
                    b = j + m
                k = lg[b - u + 1]
                mf = tb[k, u]
                if tb[k, b - (1 << k) + 1] < mf:
                    mf = tb[k, b - (1 << k) + 1]
                if u >= j:
                    b = u
                else:
                    b = u + m
                k = lg[b - j + 1]
                mb = tb[k, j]
                if tb[k, b - (1 << k) + 1] < mb:
                    mb = tb[k, b - (1 << k) + 1]
                if mb > mf:
                    mf = mb
                w = zu + z[j] - 2.0 * mf
            else:
                if j >= u:
                    a = u
                    b = j
                else:
                    a = j
                    b = u
                k = lg[b - a + 1]
                mf = tb[k, a]
                if tb[k, b - (1 << k) + 1] < mf:
                    mf = tb[k, b - (1 << k) + 1]
                w = zu + z[j] - 2.0 * mf
            trial = du + w
            if trial < dist[j]:
                dist[j] = trial
                pred[j] = u
    return dist_arr, pred_arr


def snake_labels(heights, normals):
    """Tree-indexed Gaussian labels along a height walk; see the NumPy twin."""
    cdef cnp.float64_t[::1] h = np.ascontiguousarray(heights, dtype=np.float64)
    cdef cnp.float64_t[::1] g = np.ascontiguousarray(normals, dtype=np.float64)
    cdef Py_ssize_t length = h.shape[0]
    out_arr = np.empty(length)
    cdef cnp.float64_t[::1] out = out_arr
    stack_h_arr = np.empty(length + 1, dtype=np.float64)
    stack_z_arr = np.empty(length + 1, dtype=np.float64)
    cdef cnp.float64_t[::1] stack_h = stack_h_arr
    cdef cnp.float64_t[::1] stack_z = stack_z_arr
    cdef Py_ssize_t top = 0, i
    cdef double hv, z, hi_h, hi_z, lo_h, lo_z, frac
    out[0] = 0.0
    stack_h[0] = h[0]
    stack_z[0] = 0.0
    for i in range(1, length):
        hv = h[i]
        if hv > stack_h[top]:
            z = stack_z[top] + g[i - 1] * sqrt(hv - stack_h[top])
            top += 1
            stack_h[top] = hv
            stack_z[top] = z
        elif hv == stack_h[top]:
            z = stack_z[top]
        else:
            hi_h = stack_h[top]
            hi_z = stack_z[top]
            top -= 1
            while top >= 0 and stack_h[top] > hv:
                hi_h = stack_h[top]
                hi_z = stack_z[top]
                top -= 1
            if top >= 0 and stack_h[top] == hv:
                z = stack_z[top]
            else:
                lo_h = stack_h[top]
                lo_z = stack_z[top]
                frac = (hv - lo_h) / (hi_h - lo_h)
                z = lo_z + (hi_z - lo_z) * frac + g[i - 1] * sqrt(
                    (hv - lo_h) * (hi_h - hv) / (hi_h - lo_h))
                top += 1
                stack_h[top] = hv
                stack_z[top] = z
        out[i] = z
    return out_arr

"""Compiled kernels: exact minimum escape translation and the batch segment screen.

The set of translations ``t`` with ``seg + t`` meeting a convex part is the
convex polygon ``part (+) (-seg)``. Free translations are the complement of
the union of those polygons, optionally clipped to a box. The shortest free
translation is attained at an edge foot point, a vertex, or a crossing of two
edges, so all of these are enumerated.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

EPS = 1e-9
_RING_N = 72


@njit(cache=True)
def _hull(px, py, n, ox, oy):
    """Monotone-chain hull of n points into (ox, oy); returns vertex count (CCW, no collinear)."""
    idx = np.arange(n)
    # insertion sort by (x, y); n is tiny
    for i in range(1, n):
        j = i
        while j > 0:
            a, b = idx[j - 1], idx[j]
            if px[a] > px[b] or (px[a] == px[b] and py[a] > py[b]):
                idx[j - 1], idx[j] = b, a
                j -= 1
            else:
                break
    hx = np.empty(2 * n + 1)
    hy = np.empty(2 * n + 1)
    k = 0
    for ii in range(n):
        i = idx[ii]
        if k > 0 and px[i] == hx[k - 1] and py[i] == hy[k - 1]:
            continue
        while k >= 2 and ((hx[k - 1] - hx[k - 2]) * (py[i] - hy[k - 2])
                          - (hy[k - 1] - hy[k - 2]) * (px[i] - hx[k - 2])) <= 0:
            k -= 1
        hx[k] = px[i]
        hy[k] = py[i]
        k += 1
    lower = k + 1
    for ii in range(n - 2, -1, -1):
        i = idx[ii]
        while k >= lower and ((hx[k - 1] - hx[k - 2]) * (py[i] - hy[k - 2])
                              - (hy[k - 1] - hy[k - 2]) * (px[i] - hx[k - 2])) <= 0:
            k -= 1
        hx[k] = px[i]
        hy[k] = py[i]
        k += 1
    m = k - 1
    for i in range(m):
        ox[i] = hx[i]
        oy[i] = hy[i]
    return m


@njit(cache=True)
def _inside_any(cx, cy, sx, sy, vx, vy, ln, offs, nshape, margin):
    """True if (cx, cy) lies deeper than ``margin`` inside some shape."""
    for k in range(nshape):
        dmin = np.inf
        for e in range(offs[k], offs[k + 1]):
            d = (vx[e] * (cy - sy[e]) - vy[e] * (cx - sx[e])) / ln[e]
            if d < dmin:
                dmin = d
        if dmin > margin:
            return True
    return False


@njit(cache=True)
def _free_nearby(cx, cy, sx, sy, vx, vy, ln, offs, nshape, has_box, box, scale):
    """Whether free translations exist arbitrarily close to (cx, cy).

    Needed because a candidate on the boundary can be isolated, e.g. where a
    translation-obstacle edge lies on a box edge.
    """
    tol = EPS * scale
    E = offs[nshape]
    tdx = np.empty(E + 2)
    tdy = np.empty(E + 2)
    nt = 0
    for e in range(E):
        d = (vx[e] * (cy - sy[e]) - vy[e] * (cx - sx[e])) / ln[e]
        if abs(d) <= tol:
            along = (vx[e] * (cx - sx[e]) + vy[e] * (cy - sy[e])) / (ln[e] * ln[e])
            if along >= -EPS and along <= 1 + EPS:
                tdx[nt] = vx[e] / ln[e]
                tdy[nt] = vy[e] / ln[e]
                nt += 1
    if has_box:
        if abs(cx - box[0]) <= tol or abs(cx - box[2]) <= tol:
            tdx[nt] = 0.0
            tdy[nt] = 1.0
            nt += 1
        if abs(cy - box[1]) <= tol or abs(cy - box[3]) <= tol:
            tdx[nt] = 1.0
            tdy[nt] = 0.0
            nt += 1
    if nt == 0:
        return True
    h = 1e-6 * scale
    margin = -1e-3 * h
    # base directions: each tangent, its reverse and both perpendiculars
    nb = 4 * nt
    bx = np.empty(nb)
    by = np.empty(nb)
    for i in range(nt):
        bx[4 * i], by[4 * i] = tdx[i], tdy[i]
        bx[4 * i + 1], by[4 * i + 1] = -tdx[i], -tdy[i]
        bx[4 * i + 2], by[4 * i + 2] = -tdy[i], tdx[i]
        bx[4 * i + 3], by[4 * i + 3] = tdy[i], -tdx[i]
    total = _RING_N + nb + nb * nb
    for q in range(total):
        if q < _RING_N:
            a = 2.0 * math.pi * q / _RING_N
            dx, dy = math.cos(a), math.sin(a)
        elif q < _RING_N + nb:
            dx, dy = bx[q - _RING_N], by[q - _RING_N]
        else:
            r = q - _RING_N - nb
            dx = bx[r // nb] + bx[r % nb]
            dy = by[r // nb] + by[r % nb]
            n = math.sqrt(dx * dx + dy * dy)
            if n <= 1e-9:
                continue
            dx /= n
            dy /= n
        px = cx + h * dx
        py = cy + h * dy
        if has_box and (px < box[0] or px > box[2] or py < box[1] or py > box[3]):
            continue
        outside = True
        for k in range(nshape):
            dmin = np.inf
            for e in range(offs[k], offs[k + 1]):
                d = (vx[e] * (py - sy[e]) - vy[e] * (px - sx[e])) / ln[e]
                if d < dmin:
                    dmin = d
            if not dmin < margin:
                outside = False
                break
        if outside:
            return True
    return False


@njit(cache=True)
def _try(cx, cy, best, sx, sy, vx, vy, ln, offs, nshape, has_box, box, scale):
    norm = math.sqrt(cx * cx + cy * cy)
    if norm >= best:
        return False
    tol = EPS * scale
    if has_box and (cx < box[0] - tol or cx > box[2] + tol or cy < box[1] - tol or cy > box[3] + tol):
        return False
    if _inside_any(cx, cy, sx, sy, vx, vy, ln, offs, nshape, tol):
        return False
    return _free_nearby(cx, cy, sx, sy, vx, vy, ln, offs, nshape, has_box, box, scale)


@njit(cache=True)
def min_escape(ax, ay, bx, by, px, py, poffs, has_box, box):
    """Return (length, tx, ty) of the shortest free translation, or length inf."""
    nshape = len(poffs) - 1
    total = 2 * poffs[nshape]
    sx = np.empty(total + 4)
    sy = np.empty(total + 4)
    offs = np.empty(nshape + 2, dtype=np.int64)
    offs[0] = 0
    for k in range(nshape):
        n = poffs[k + 1] - poffs[k]
        qx = np.empty(2 * n)
        qy = np.empty(2 * n)
        for i in range(n):
            qx[i] = px[poffs[k] + i] - ax
            qy[i] = py[poffs[k] + i] - ay
            qx[n + i] = px[poffs[k] + i] - bx
            qy[n + i] = py[poffs[k] + i] - by
        m = _hull(qx, qy, 2 * n, sx[offs[k]:], sy[offs[k]:])
        offs[k + 1] = offs[k] + m
    E = offs[nshape]
    nedge = E
    if has_box:
        sx[E], sy[E] = box[0], box[1]
        sx[E + 1], sy[E + 1] = box[2], box[1]
        sx[E + 2], sy[E + 2] = box[2], box[3]
        sx[E + 3], sy[E + 3] = box[0], box[3]
        nedge = E + 4
    offs[nshape + 1] = nedge
    vx = np.empty(nedge)
    vy = np.empty(nedge)
    ln = np.empty(nedge)
    scale = 1.0
    for k in range(nshape + (1 if has_box else 0)):
        lo, hi = offs[k], offs[k + 1]
        for e in range(lo, hi):
            nxt = e + 1 if e + 1 < hi else lo
            vx[e] = sx[nxt] - sx[e]
            vy[e] = sy[nxt] - sy[e]
            ln[e] = math.sqrt(vx[e] * vx[e] + vy[e] * vy[e])
            if ln[e] == 0.0:
                ln[e] = 1.0
            a = max(abs(sx[e]), abs(sy[e]))
            if 1.0 + a > scale:
                scale = 1.0 + a

    best = np.inf
    tx = 0.0
    ty = 0.0
    # edge foot points of the origin
    for e in range(nedge):
        vv = vx[e] * vx[e] + vy[e] * vy[e]
        u = 0.0
        if vv > 0:
            u = -(sx[e] * vx[e] + sy[e] * vy[e]) / vv
            u = min(max(u, 0.0), 1.0)
        cx = sx[e] + u * vx[e]
        cy = sy[e] + u * vy[e]
        if _try(cx, cy, best, sx, sy, vx, vy, ln, offs, nshape, has_box, box, scale):
            best, tx, ty = math.sqrt(cx * cx + cy * cy), cx, cy
    # vertices
    for e in range(nedge):
        if _try(sx[e], sy[e], best, sx, sy, vx, vy, ln, offs, nshape, has_box, box, scale):
            best, tx, ty = math.sqrt(sx[e] * sx[e] + sy[e] * sy[e]), sx[e], sy[e]
    # pairwise edge crossings
    for i in range(nedge):
        for j in range(i + 1, nedge):
            den = vx[i] * vy[j] - vy[i] * vx[j]
            if abs(den) <= 1e-12:
                continue
            dx = sx[j] - sx[i]
            dy = sy[j] - sy[i]
            ui = (dx * vy[j] - dy * vx[j]) / den
            uj = (dx * vy[i] - dy * vx[i]) / den
            if ui < -EPS or ui > 1 + EPS or uj < -EPS or uj > 1 + EPS:
                continue
            cx = sx[i] + ui * vx[i]
            cy = sy[i] + ui * vy[i]
            if _try(cx, cy, best, sx, sy, vx, vy, ln, offs, nshape, has_box, box, scale):
                best, tx, ty = math.sqrt(cx * cx + cy * cy), cx, cy
    return best, tx, ty


@njit(cache=True)
def screen(ax, ay, bx, by, box, nx, ny, up, lo, vx, vy, nvert, group, simple, n_groups, touch):
    """Separating-axis screen of K segments against P padded convex parts.

    Returns per segment: clear flag, a lower bound on the summed group depth
    (each hit group charged at least ``touch``) and whether that bound is exact.
    """
    K = ax.shape[0]
    P = box.shape[0]
    clear = np.ones(K, dtype=np.bool_)
    beta = np.zeros(K)
    exact = np.ones(K, dtype=np.bool_)
    depth_g = np.zeros(n_groups)
    count_g = np.zeros(n_groups, dtype=np.int64)
    for k in range(K):
        x0, y0, x1, y1 = ax[k], ay[k], bx[k], by[k]
        lx, hx = min(x0, x1), max(x0, x1)
        ly, hy = min(y0, y1), max(y0, y1)
        dx, dy = x1 - x0, y1 - y0
        length = math.sqrt(dx * dx + dy * dy)
        proper = length > EPS
        mx, my, c = 0.0, 0.0, 0.0
        if proper:
            mx, my = -dy / length, dx / length
            c = mx * x0 + my * y0
        any_hit = False
        for p in range(P):
            if hx < box[p, 0] or lx > box[p, 2] or hy < box[p, 1] or ly > box[p, 3]:
                continue
            sep = False
            depth = np.inf
            for e in range(nvert[p]):
                pa = nx[p, e] * x0 + ny[p, e] * y0
                pb = nx[p, e] * x1 + ny[p, e] * y1
                if (pa > up[p, e] + EPS and pb > up[p, e] + EPS) or (pa < lo[p, e] - EPS and pb < lo[p, e] - EPS):
                    sep = True
                    break
                d = min(up[p, e] - min(pa, pb), max(pa, pb) - lo[p, e])
                if d < depth:
                    depth = d
            if sep:
                continue
            if proper:
                smax, smin = -np.inf, np.inf
                for e in range(nvert[p]):
                    s = vx[p, e] * mx + vy[p, e] * my - c
                    smax = max(smax, s)
                    smin = min(smin, s)
                if smin > EPS or smax < -EPS:
                    continue
                depth = min(depth, min(smax, -smin))
            g = group[p]
            if not any_hit:
                any_hit = True
                depth_g[:] = 0.0
                count_g[:] = 0
            depth_g[g] = max(depth_g[g], max(depth, 0.0))
            count_g[g] += 1
            if not simple[p]:
                exact[k] = False
        if any_hit:
            clear[k] = False
            total = 0.0
            for g in range(n_groups):
                if count_g[g] > 0:
                    total += max(depth_g[g], touch)
                    if count_g[g] > 1:
                        exact[k] = False
            beta[k] = total
    return clear, beta, exact

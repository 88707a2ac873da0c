"""Hot numeric kernels.

Each kernel has a numba implementation (``*_nb``) and a numpy/scipy implementation
(``*_np``). The public names dispatch on :data:`resplan._jit.USE_NUMBA`; both
variants stay importable so tests and ``benchmarks/bench_kernels.py`` can compare
them directly.
"""
import heapq
import math

import numpy as np
from scipy import ndimage

from ._jit import USE_NUMBA, njit

INF_D2 = 1e20
SQRT2 = math.sqrt(2.0)
TWO_PI = 2.0 * math.pi

_NBR8 = np.array(
    [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)], dtype=np.int64
)


# ---------------------------------------------------------------------------
# Euclidean distance transform with nearest-site tracking
# ---------------------------------------------------------------------------


@njit
def edt_nb(occ):
    H, W = occ.shape
    g = np.empty((H, W), dtype=np.float64)
    gr = np.empty((H, W), dtype=np.int64)
    for c in range(W):
        last = -1
        for r in range(H):
            if occ[r, c]:
                last = r
            gr[r, c] = last
        nxt = -1
        for r in range(H - 1, -1, -1):
            if occ[r, c]:
                nxt = r
            best = gr[r, c]
            if nxt >= 0 and (best < 0 or nxt - r < r - best):
                best = nxt
            gr[r, c] = best
            if best < 0:
                g[r, c] = INF_D2
            else:
                g[r, c] = float((r - best) * (r - best))

    d2 = np.empty((H, W), dtype=np.float64)
    sr = np.empty((H, W), dtype=np.int64)
    sc = np.empty((H, W), dtype=np.int64)
    v = np.empty(W, dtype=np.int64)
    z = np.empty(W + 1, dtype=np.float64)
    for r in range(H):
        k = -1
        for q in range(W):
            fq = g[r, q]
            if fq >= INF_D2:
                continue
            if k < 0:
                k = 0
                v[0] = q
                z[0] = -np.inf
                z[1] = np.inf
                continue
            p = v[k]
            s = ((fq + q * q) - (g[r, p] + p * p)) / (2.0 * q - 2.0 * p)
            while s <= z[k]:
                k -= 1
                p = v[k]
                s = ((fq + q * q) - (g[r, p] + p * p)) / (2.0 * q - 2.0 * p)
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = np.inf
        if k < 0:
            for q in range(W):
                d2[r, q] = np.inf
                sr[r, q] = -1
                sc[r, q] = -1
            continue
        j = 0
        for q in range(W):
            while z[j + 1] < q:
                j += 1
            p = v[j]
            d2[r, q] = (q - p) * (q - p) + g[r, p]
            sc[r, q] = p
            sr[r, q] = gr[r, p]
    return d2, sr, sc


def edt_np(occ):
    occ = np.asarray(occ, dtype=bool)
    H, W = occ.shape
    if not occ.any():
        return (np.full((H, W), np.inf), np.full((H, W), -1, np.int64), np.full((H, W), -1, np.int64))
    _, idx = ndimage.distance_transform_edt(~occ, return_indices=True)
    sr = idx[0].astype(np.int64)
    sc = idx[1].astype(np.int64)
    rr, cc = np.indices((H, W))
    d2 = ((rr - sr) ** 2 + (cc - sc) ** 2).astype(np.float64)
    return d2, sr, sc


def edt(occ):
    """Squared cell-metric distance to the nearest occupied cell, plus that cell's row/col.

    Cells with no occupied cell anywhere get ``inf`` and site ``-1``.
    """
    occ = np.ascontiguousarray(occ, dtype=np.bool_)
    if USE_NUMBA:
        d2, sr, sc = edt_nb(occ)
        if not occ.any():
            d2[:] = np.inf
        return d2, sr, sc
    return edt_np(occ)


# ---------------------------------------------------------------------------
# Generalized Voronoi edge marking
# ---------------------------------------------------------------------------


@njit
def gvd_edges_nb(occ, basin, d2, sr, sc, thresh):
    H, W = occ.shape
    edges = np.zeros((H, W), dtype=np.bool_)
    for r in range(H):
        for c in range(W):
            if occ[r, c] or sr[r, c] < 0:
                continue
            a = basin[r, c]
            d1 = math.sqrt(d2[r, c])
            for t in range(8):
                nr = r + _NBR8[t, 0]
                nc = c + _NBR8[t, 1]
                if nr < 0 or nr >= H or nc < 0 or nc >= W:
                    continue
                b = basin[nr, nc]
                if b == a or b < 0:
                    continue
                dr = r - sr[nr, nc]
                dc = c - sc[nr, nc]
                ec = math.sqrt(dr * dr + dc * dc) - d1
                if ec > thresh:
                    continue
                if occ[nr, nc]:
                    en = np.inf
                else:
                    er = nr - sr[r, c]
                    ecc = nc - sc[r, c]
                    en = math.sqrt(er * er + ecc * ecc) - math.sqrt(d2[nr, nc])
                if ec < en - 1e-12 or (abs(ec - en) <= 1e-12 and r * W + c < nr * W + nc):
                    edges[r, c] = True
                    break
    return edges


def gvd_edges_np(occ, basin, d2, sr, sc, thresh):
    H, W = occ.shape
    rr, cc = np.indices((H, W))
    flat = rr * W + cc
    d1 = np.sqrt(d2)
    base = (~occ) & (sr >= 0)
    edges = np.zeros((H, W), dtype=bool)
    for dr, dc in _NBR8:
        # neighbour arrays aligned with the cell arrays; out-of-range neighbours masked
        r0, r1 = max(0, -dr), min(H, H - dr)
        c0, c1 = max(0, -dc), min(W, W - dc)
        sl = (slice(r0, r1), slice(c0, c1))
        nsl = (slice(r0 + dr, r1 + dr), slice(c0 + dc, c1 + dc))
        a = basin[sl]
        b = basin[nsl]
        ok = base[sl] & (b != a) & (b >= 0)
        ec = np.sqrt((rr[sl] - sr[nsl]) ** 2 + (cc[sl] - sc[nsl]) ** 2) - d1[sl]
        with np.errstate(invalid="ignore"):
            en = np.sqrt((rr[nsl] - sr[sl]) ** 2 + (cc[nsl] - sc[sl]) ** 2) - d1[nsl]
        en = np.where(occ[nsl], np.inf, en)
        wins = (ec < en - 1e-12) | ((np.abs(ec - en) <= 1e-12) & (flat[sl] < flat[nsl]))
        edges[sl] |= ok & (ec <= thresh) & wins
    return edges


def gvd_edges(occ, basin, d2, sr, sc, thresh=SQRT2):
    """Free cells whose two nearest obstacle basins differ by at most ``thresh`` cells."""
    occ = np.ascontiguousarray(occ, dtype=np.bool_)
    if USE_NUMBA:
        return gvd_edges_nb(occ, basin, d2, sr, sc, float(thresh))
    return gvd_edges_np(occ, basin, d2, sr, sc, float(thresh))


# ---------------------------------------------------------------------------
# Bilinear sampling and the Voronoi field
# ---------------------------------------------------------------------------


@njit
def _interp(arr, ox, oy, res, x, y):
    H, W = arr.shape
    fx = (x - ox) / res - 0.5
    fy = (y - oy) / res - 0.5
    fx = min(max(fx, 0.0), W - 1.0)
    fy = min(max(fy, 0.0), H - 1.0)
    i0 = int(math.floor(fx))
    j0 = int(math.floor(fy))
    i1 = min(i0 + 1, W - 1)
    j1 = min(j0 + 1, H - 1)
    tx = fx - i0
    ty = fy - j0
    top = arr[j0, i0] * (1.0 - tx) + arr[j0, i1] * tx
    bot = arr[j1, i0] * (1.0 - tx) + arr[j1, i1] * tx
    return top * (1.0 - ty) + bot * ty


@njit
def _field_value(dob, dvor, has_vor, lam_v, dmax):
    if dob >= dmax:
        return 0.0
    a = 1.0 - (dob / dmax) ** 2
    s = lam_v / (lam_v + dob)
    if not has_vor:
        rr = 1.0
    else:
        den = dob + dvor
        rr = 1.0 if den <= 0.0 else dvor / den
    return a * s * rr


@njit
def _field_at(dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax, x, y):
    H, W = dobs.shape
    if x < ox or y < oy or x > ox + W * res or y > oy + H * res:
        return 1.0
    if not has_obs:
        return 0.0
    dob = _interp(dobs, ox, oy, res, x, y)
    dv = _interp(dvor, ox, oy, res, x, y) if has_vor else np.inf
    return _field_value(dob, dv, has_vor, lam_v, dmax)


@njit
def bilinear_nb(arr, ox, oy, res, xs, ys):
    out = np.empty(xs.shape[0], dtype=np.float64)
    for k in range(xs.shape[0]):
        out[k] = _interp(arr, ox, oy, res, xs[k], ys[k])
    return out


def bilinear_np(arr, ox, oy, res, xs, ys):
    H, W = arr.shape
    fx = np.clip((np.asarray(xs) - ox) / res - 0.5, 0.0, W - 1.0)
    fy = np.clip((np.asarray(ys) - oy) / res - 0.5, 0.0, H - 1.0)
    i0 = np.floor(fx).astype(np.int64)
    j0 = np.floor(fy).astype(np.int64)
    i1 = np.minimum(i0 + 1, W - 1)
    j1 = np.minimum(j0 + 1, H - 1)
    tx = fx - i0
    ty = fy - j0
    top = arr[j0, i0] * (1.0 - tx) + arr[j0, i1] * tx
    bot = arr[j1, i0] * (1.0 - tx) + arr[j1, i1] * tx
    return top * (1.0 - ty) + bot * ty


def bilinear(arr, ox, oy, res, xs, ys):
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    if USE_NUMBA:
        return bilinear_nb(arr, float(ox), float(oy), float(res), xs, ys)
    return bilinear_np(arr, ox, oy, res, xs, ys)


def field_values_np(dob, dvor, has_vor, lam_v, dmax):
    """Vectorized field formula over arrays of d_obs/d_vor values."""
    dob = np.asarray(dob, dtype=np.float64)
    a = 1.0 - (dob / dmax) ** 2
    s = lam_v / (lam_v + dob)
    if has_vor:
        dvor = np.asarray(dvor, dtype=np.float64)
        den = dob + dvor
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(den > 0.0, dvor / np.where(den > 0.0, den, 1.0), 1.0)
    else:
        r = np.ones_like(dob)
    return np.where(dob >= dmax, 0.0, a * s * r)


# ---------------------------------------------------------------------------
# Oriented-rectangle footprint collision
# ---------------------------------------------------------------------------


@njit
def _row_span(dy, c, s, front, rear, half_w):
    """Offsets dx with (dx, dy) inside the rectangle, as (lo, hi); lo > hi when empty."""
    lo = -np.inf
    hi = np.inf
    # along-heading extent: dx*c + dy*s in [-rear, front]
    if abs(c) > 1e-12:
        a = (-rear - dy * s) / c
        b = (front - dy * s) / c
        lo = max(lo, min(a, b))
        hi = min(hi, max(a, b))
    elif dy * s < -rear or dy * s > front:
        return 1.0, -1.0
    # lateral extent: -dx*s + dy*c in [-half_w, half_w]
    if abs(s) > 1e-12:
        a = (dy * c - half_w) / s
        b = (dy * c + half_w) / s
        lo = max(lo, min(a, b))
        hi = min(hi, max(a, b))
    elif abs(dy * c) > half_w:
        return 1.0, -1.0
    return lo, hi


@njit
def _pose_hits(rowcum, clear, use_clear, ox, oy, res, front, rear, half_w, x, y, th):
    return _pose_hits_cs(rowcum, clear, use_clear, ox, oy, res, front, rear, half_w, x, y, math.cos(th), math.sin(th))


@njit
def _pose_hits_cs(rowcum, clear, use_clear, ox, oy, res, front, rear, half_w, x, y, c, s):
    H = rowcum.shape[0]
    W = rowcum.shape[1] - 1
    if use_clear:
        # two circles, each covering half the rectangle; the 0.7072 slack covers
        # the offset between a circle center and the center of its cell
        half_len = 0.5 * (front + rear)
        rad = math.sqrt(0.25 * half_len * half_len + half_w * half_w) / res + 0.7072
        free = True
        for q in range(2):
            off = 0.5 * (front - rear) + (0.5 if q == 0 else -0.5) * half_len
            ci = min(max(int((x + off * c - ox) / res), 0), W - 1)
            cj = min(max(int((y + off * s - oy) / res), 0), H - 1)
            if clear[cj, ci] <= rad:
                free = False
                break
        if free:
            return False
    xmax = ox + W * res
    ymax = oy + H * res
    miny = np.inf
    maxy = -np.inf
    for q in range(4):
        lon = front if q < 2 else -rear
        lat = half_w if (q % 2) == 0 else -half_w
        wx = x + lon * c - lat * s
        wy = y + lon * s + lat * c
        if wx < ox or wx > xmax or wy < oy or wy > ymax:
            return True
        miny = min(miny, wy)
        maxy = max(maxy, wy)
    j0 = max(0, int(math.ceil((miny - oy) / res - 0.5)))
    j1 = min(H - 1, int(math.floor((maxy - oy) / res - 0.5)))
    # each cell row meets the rectangle in one interval; count its occupied centers by prefix sums
    for j in range(j0, j1 + 1):
        lo, hi = _row_span(oy + (j + 0.5) * res - y, c, s, front, rear, half_w)
        if lo > hi:
            continue
        i0 = max(0, int(math.ceil((x + lo - ox) / res - 0.5)))
        i1 = min(W - 1, int(math.floor((x + hi - ox) / res - 0.5)))
        if i1 >= i0 and rowcum[j, i1 + 1] > rowcum[j, i0]:
            return True
    return False


def row_prefix(occ):
    """Per-row running count of occupied cells, shape (H, W + 1), with a leading zero column."""
    occ = np.asarray(occ, dtype=bool)
    out = np.zeros((occ.shape[0], occ.shape[1] + 1), dtype=np.int32)
    np.cumsum(occ, axis=1, out=out[:, 1:])
    return out


def clearance_cells(occ):
    """Distance in cells from each cell center to the nearest occupied cell center or the grid boundary."""
    occ = np.asarray(occ, dtype=bool)
    H, W = occ.shape
    j, i = np.indices((H, W))
    border = np.minimum(np.minimum(i + 0.5, W - 0.5 - i), np.minimum(j + 0.5, H - 0.5 - j))
    if not occ.any():
        return border
    d2, _, _ = edt(occ)
    return np.minimum(np.sqrt(d2), border)


@njit
def footprint_hits_nb(rowcum, clear, use_clear, ox, oy, res, front, rear, half_w, xs, ys, ths, starts, ends):
    n = starts.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for g in range(n):
        for k in range(starts[g], ends[g]):
            if _pose_hits(rowcum, clear, use_clear, ox, oy, res, front, rear, half_w, xs[k], ys[k], ths[k]):
                out[g] = True
                break
    return out


def _pose_hits_np(occ, clear, use_clear, ox, oy, res, front, rear, half_w, xs, ys, ths):
    H, W = occ.shape
    c = np.cos(ths)
    s = np.sin(ths)
    lon = np.array([front, front, -rear, -rear])
    lat = np.array([half_w, -half_w, half_w, -half_w])
    wx = xs[:, None] + lon[None, :] * c[:, None] - lat[None, :] * s[:, None]
    wy = ys[:, None] + lon[None, :] * s[:, None] + lat[None, :] * c[:, None]
    outside = ((wx < ox) | (wx > ox + W * res) | (wy < oy) | (wy > oy + H * res)).any(axis=1)
    hits = outside.copy()
    todo = ~outside
    off = 0.5 * (front - rear)
    rad = math.hypot(0.5 * (front + rear), half_w)
    fcx = xs + off * c
    fcy = ys + off * s
    if use_clear:
        half_len = 0.5 * (front + rear)
        r2 = math.sqrt(0.25 * half_len * half_len + half_w * half_w) / res + 0.7072
        both = np.ones(len(xs), dtype=bool)
        for sign in (0.5, -0.5):
            o = off + sign * half_len
            ci = np.clip(((xs + o * c - ox) / res).astype(np.int64), 0, W - 1)
            cj = np.clip(((ys + o * s - oy) / res).astype(np.int64), 0, H - 1)
            both &= clear[cj, ci] > r2
        todo &= ~both
    idx = np.flatnonzero(todo)
    if idx.size == 0:
        return hits
    reach = int(math.ceil(rad / res)) + 1
    di, dj = np.meshgrid(np.arange(-reach, reach + 1), np.arange(-reach, reach + 1))
    di = di.ravel()
    dj = dj.ravel()
    base_i = np.floor((fcx[idx] - ox) / res).astype(np.int64)
    base_j = np.floor((fcy[idx] - oy) / res).astype(np.int64)
    ii = base_i[:, None] + di[None, :]
    jj = base_j[:, None] + dj[None, :]
    inside = (ii >= 0) & (ii < W) & (jj >= 0) & (jj < H)
    occ_here = np.zeros(ii.shape, dtype=bool)
    occ_here[inside] = occ[jj[inside], ii[inside]]
    cx = ox + (ii + 0.5) * res - xs[idx, None]
    cy = oy + (jj + 0.5) * res - ys[idx, None]
    cl = c[idx, None]
    sl = s[idx, None]
    plon = cx * cl + cy * sl
    plat = -cx * sl + cy * cl
    inrect = (plon >= -rear) & (plon <= front) & (plat >= -half_w) & (plat <= half_w)
    hits[idx] = (occ_here & inrect).any(axis=1)
    return hits


def footprint_hits_np(occ, clear, use_clear, ox, oy, res, front, rear, half_w, xs, ys, ths, starts, ends):
    per_pose = _pose_hits_np(occ, clear, use_clear, ox, oy, res, front, rear, half_w, xs, ys, ths)
    out = np.zeros(len(starts), dtype=bool)
    for g in range(len(starts)):
        out[g] = per_pose[starts[g]:ends[g]].any()
    return out


def footprint_hits(occ, clear, ox, oy, res, front, rear, half_w, xs, ys, ths, starts=None, ends=None, rowcum=None):
    """Per-group flag: does any pose in ``[starts[g], ends[g])`` hit an occupied cell?

    A cell is hit when its center lies inside the oriented rectangle spanning
    ``[-rear, front]`` along the heading and ``[-half_w, half_w]`` across it. Poses
    whose rectangle leaves the grid count as hits. ``clear`` (from
    :func:`clearance_cells`) enables a conservative early-out; pass ``None`` to skip it.
    The compiled path scans cell rows through ``rowcum`` (from :func:`row_prefix`,
    computed when omitted); the numpy path tests every nearby cell center.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    ths = np.ascontiguousarray(ths, dtype=np.float64)
    if starts is None:
        starts = np.arange(xs.shape[0], dtype=np.int64)
        ends = starts + 1
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    ends = np.ascontiguousarray(ends, dtype=np.int64)
    use_clear = clear is not None
    if clear is None:
        clear = np.zeros((1, 1))
    args = (occ, clear, use_clear, float(ox), float(oy), float(res), float(front), float(rear), float(half_w))
    if USE_NUMBA:
        if rowcum is None:
            rowcum = row_prefix(occ)
        return footprint_hits_nb(rowcum, *args[1:], xs, ys, ths, starts, ends)
    return footprint_hits_np(*args, xs, ys, ths, starts, ends)


# ---------------------------------------------------------------------------
# Smoothing objective
# ---------------------------------------------------------------------------


@njit
def _wrap(a):
    return a - TWO_PI * math.floor((a + math.pi) / TWO_PI)


@njit
def _vertex_terms(P, j, kmax, hinge):
    ax = P[j, 0] - P[j - 1, 0]
    ay = P[j, 1] - P[j - 1, 1]
    bx = P[j + 1, 0] - P[j, 0]
    by = P[j + 1, 1] - P[j, 1]
    la = math.sqrt(ax * ax + ay * ay)
    if la < 1e-12:
        k = 0.0
    else:
        k = _wrap(math.atan2(by, bx) - math.atan2(ay, ax)) / la
    if hinge:
        e = max(abs(k) - kmax, 0.0)
        cur = e * e
    else:
        sg = 1.0 if k > 0.0 else (-1.0 if k < 0.0 else 0.0)
        e = k - sg * kmax
        cur = e * e
    dx = bx - ax
    dy = by - ay
    return cur, dx * dx + dy * dy


@njit
def _local_cost(P, i, fp, w_obs, w_cur, w_path, kmax, hinge):
    n = P.shape[0]
    dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax = fp
    tot = w_obs * _field_at(dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax, P[i, 0], P[i, 1])
    for j in range(i - 1, i + 2):
        if j >= 1 and j <= n - 2:
            cur, pth = _vertex_terms(P, j, kmax, hinge)
            tot += w_cur * cur + w_path * pth
    return tot


@njit
def smooth_cost_nb(P, dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax, w_obs, w_cur, w_path, kmax, hinge):
    n = P.shape[0]
    jo = 0.0
    for i in range(n):
        jo += _field_at(dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax, P[i, 0], P[i, 1])
    jc = 0.0
    jp = 0.0
    for j in range(1, n - 1):
        cur, pth = _vertex_terms(P, j, kmax, hinge)
        jc += cur
        jp += pth
    return w_obs * jo + w_cur * jc + w_path * jp


@njit
def smooth_grad_nb(P, movable, dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax,
                   w_obs, w_cur, w_path, kmax, hinge, h):
    n = P.shape[0]
    Q = P.copy()
    G = np.zeros((n, 2), dtype=np.float64)
    fp = (dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax)
    for i in range(n):
        if not movable[i]:
            continue
        for ax in range(2):
            v0 = Q[i, ax]
            Q[i, ax] = v0 + h
            cp = _local_cost(Q, i, fp, w_obs, w_cur, w_path, kmax, hinge)
            Q[i, ax] = v0 - h
            cm = _local_cost(Q, i, fp, w_obs, w_cur, w_path, kmax, hinge)
            Q[i, ax] = v0
            G[i, ax] = (cp - cm) / (2.0 * h)
    return G


def _wrap_np(a):
    return a - TWO_PI * np.floor((a + math.pi) / TWO_PI)


def _field_np(P, dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax):
    H, W = dobs.shape
    x = P[:, 0]
    y = P[:, 1]
    out = (x < ox) | (y < oy) | (x > ox + W * res) | (y > oy + H * res)
    if not has_obs:
        return np.where(out, 1.0, 0.0)
    dob = bilinear_np(dobs, ox, oy, res, x, y)
    dv = bilinear_np(dvor, ox, oy, res, x, y) if has_vor else None
    return np.where(out, 1.0, field_values_np(dob, dv, has_vor, lam_v, dmax))


def _vertex_terms_np(P, kmax, hinge):
    """Curvature and second-difference terms for vertices 1..n-2."""
    a = P[1:-1] - P[:-2]
    b = P[2:] - P[1:-1]
    la = np.hypot(a[:, 0], a[:, 1])
    dth = _wrap_np(np.arctan2(b[:, 1], b[:, 0]) - np.arctan2(a[:, 1], a[:, 0]))
    k = np.where(la < 1e-12, 0.0, dth / np.where(la < 1e-12, 1.0, la))
    if hinge:
        cur = np.maximum(np.abs(k) - kmax, 0.0) ** 2
    else:
        cur = (k - np.sign(k) * kmax) ** 2
    d = b - a
    return cur, (d * d).sum(axis=1)


def smooth_cost_np(P, dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax, w_obs, w_cur, w_path, kmax, hinge):
    jo = _field_np(P, dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax).sum()
    cur, pth = _vertex_terms_np(P, kmax, hinge)
    return w_obs * jo + w_cur * cur.sum() + w_path * pth.sum()


def _local_costs_np(P, fp, w_obs, w_cur, w_path, kmax, hinge):
    n = P.shape[0]
    obs = _field_np(P, *fp)
    cur, pth = _vertex_terms_np(P, kmax, hinge)
    vt = np.zeros(n + 2)
    vt[2:n] = w_cur * cur + w_path * pth  # vt[j + 1] holds vertex j
    # point i touches vertices i-1, i, i+1
    return w_obs * obs + vt[0:n] + vt[1:n + 1] + vt[2:n + 2]


def smooth_grad_np(P, movable, dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax,
                   w_obs, w_cur, w_path, kmax, hinge, h):
    n = P.shape[0]
    fp = (dobs, dvor, has_obs, has_vor, ox, oy, res, lam_v, dmax)
    G = np.zeros((n, 2))
    colour = np.arange(n) % 5
    for col in range(5):
        sel = (colour == col) & movable
        if not sel.any():
            continue
        for ax in range(2):
            Q = P.copy()
            Q[sel, ax] += h
            cp = _local_costs_np(Q, fp, w_obs, w_cur, w_path, kmax, hinge)
            Q[sel, ax] = P[sel, ax] - h
            cm = _local_costs_np(Q, fp, w_obs, w_cur, w_path, kmax, hinge)
            G[sel, ax] = (cp[sel] - cm[sel]) / (2.0 * h)
    return G


def smooth_cost(*args):
    if USE_NUMBA:
        return smooth_cost_nb(*args)
    return smooth_cost_np(*args)


def smooth_grad(*args):
    """Central finite-difference gradient of the smoothing objective, one point at a time.

    Only the terms touching a point are re-evaluated; fixed points get a zero row.
    """
    if USE_NUMBA:
        return smooth_grad_nb(*args)
    return smooth_grad_np(*args)


# ---------------------------------------------------------------------------
# Hybrid A* expansion loop
# ---------------------------------------------------------------------------

SEARCH_FOUND = 0
SEARCH_EXHAUSTED = 1
SEARCH_LIMIT = 2
THETA_BINS = 72


@njit
def _wrap_pi(a):
    # same arithmetic as kinematics.wrap_angles
    r = (a + math.pi) % TWO_PI - math.pi
    return math.pi if r <= -math.pi else r


@njit
def _state_key(x, y, th, d, ox, oy, res, H):
    ix = int(math.floor((x - ox) / res))
    iy = int(math.floor((y - oy) / res))
    tb = int(math.floor((th + math.pi) / TWO_PI * THETA_BINS)) % THETA_BINS
    return (((ix + 1) * (H + 2) + (iy + 1)) * THETA_BINS + tb) * 3 + (d + 1)


@njit
def search_nb(rowcum, clear, use_clear, ox, oy, res, front, rear, half_w,
              offsets, starts, ends, steering, base_cost, dirs, lam_sc, lam_heu,
              sx, sy, sth, gx, gy, gth, xy_tol, th_tol, max_exp):
    """Best-first search over the primitive table; returns (status, goal node, expansions, node arrays).

    Mirrors hybrid_astar.search: heap order (f, h, push counter), closed set on pop,
    best-g pruning on push, goal test on pop. Children pruned by the closed set or
    best-g are never collision-checked; they would not be pushed either way.
    """
    H = rowcum.shape[0]
    cap = 1024
    nx = np.empty(cap)
    ny = np.empty(cap)
    nth = np.empty(cap)
    ng = np.empty(cap)
    npar = np.empty(cap, dtype=np.int64)
    nprim = np.empty(cap, dtype=np.int64)
    ndir = np.empty(cap, dtype=np.int64)
    nx[0] = sx
    ny[0] = sy
    nth[0] = sth
    ng[0] = 0.0
    npar[0] = -1
    nprim[0] = -1
    ndir[0] = 0
    count = 1
    h0 = lam_heu * math.hypot(sx - gx, sy - gy)
    heap = [(h0, h0, 0, 0)]
    best = dict()
    best[_state_key(sx, sy, sth, 0, ox, oy, res, H)] = 0.0
    closed = set()
    closed.add(-1)
    counter = 0
    expansions = 0
    nprims = starts.shape[0]
    off_cos = np.cos(offsets[:, 2])
    off_sin = np.sin(offsets[:, 2])
    while len(heap) > 0:
        item = heapq.heappop(heap)
        node = item[3]
        x = nx[node]
        y = ny[node]
        th = nth[node]
        key = _state_key(x, y, th, ndir[node], ox, oy, res, H)
        if key in closed:
            continue
        closed.add(key)
        if math.hypot(x - gx, y - gy) <= xy_tol and abs(_wrap_pi(th - gth)) <= th_tol:
            return SEARCH_FOUND, node, expansions, nx[:count], ny[:count], nth[:count], ng[:count], npar[:count], nprim[:count]
        if expansions >= max_exp:
            return SEARCH_LIMIT, -1, expansions, nx[:count], ny[:count], nth[:count], ng[:count], npar[:count], nprim[:count]
        expansions += 1
        c = math.cos(th)
        s = math.sin(th)
        last = steering[nprim[node]] if nprim[node] >= 0 else 0.0
        for k in range(nprims):
            m = ends[k] - 1
            cx = x + c * offsets[m, 0] - s * offsets[m, 1]
            cy = y + s * offsets[m, 0] + c * offsets[m, 1]
            cth = _wrap_pi(th + offsets[m, 2])
            ckey = _state_key(cx, cy, cth, dirs[k], ox, oy, res, H)
            if ckey in closed:
                continue
            g = ng[node] + (base_cost[k] + lam_sc * abs(steering[k] - last))
            if ckey in best and g >= best[ckey]:
                continue
            # collision check only for children that would be pushed
            hit = False
            for m in range(starts[k], ends[k]):
                px = x + c * offsets[m, 0] - s * offsets[m, 1]
                py = y + s * offsets[m, 0] + c * offsets[m, 1]
                pc = c * off_cos[m] - s * off_sin[m]
                ps = s * off_cos[m] + c * off_sin[m]
                if _pose_hits_cs(rowcum, clear, use_clear, ox, oy, res, front, rear, half_w, px, py, pc, ps):
                    hit = True
                    break
            if hit:
                continue
            best[ckey] = g
            h = lam_heu * math.hypot(cx - gx, cy - gy)
            if count == cap:
                cap *= 2
                nx = _grow_f(nx, cap)
                ny = _grow_f(ny, cap)
                nth = _grow_f(nth, cap)
                ng = _grow_f(ng, cap)
                npar = _grow_i(npar, cap)
                nprim = _grow_i(nprim, cap)
                ndir = _grow_i(ndir, cap)
            nx[count] = cx
            ny[count] = cy
            nth[count] = cth
            ng[count] = g
            npar[count] = node
            nprim[count] = k
            ndir[count] = dirs[k]
            counter += 1
            heapq.heappush(heap, (g + h, h, counter, count))
            count += 1
    return SEARCH_EXHAUSTED, -1, expansions, nx[:count], ny[:count], nth[:count], ng[:count], npar[:count], nprim[:count]


@njit
def _grow_f(a, cap):
    b = np.empty(cap)
    b[:a.shape[0]] = a
    return b


@njit
def _grow_i(a, cap):
    b = np.empty(cap, dtype=np.int64)
    b[:a.shape[0]] = a
    return b

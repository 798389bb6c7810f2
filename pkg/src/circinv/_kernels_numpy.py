"""Pure-numpy fallback for the hot kernels.

Same public signatures and return conventions as the numba flavor, but
vectorized over grid points / quadrature nodes instead of compiled
loops.  Used when numba is unavailable or disabled via CIRCINV_NUMBA=0.
"""

import numpy as np

_PI = np.pi


def _trig(phis, nmodes):
    j = np.arange(nmodes)
    arg = np.multiply.outer(phis, j)
    return np.cos(arg), np.sin(arg)


def eval_series(c, s, phis):
    C, S = _trig(phis, c.shape[0])
    return C @ c + S @ s


def eval_series_d1(c, s, phis):
    j = np.arange(c.shape[0])
    C, S = _trig(phis, c.shape[0])
    return C @ (j * s) - S @ (j * c)


def curve_points(cx, sx, cy, sy, phis):
    C, S = _trig(phis, cx.shape[0])
    return C @ cx + S @ sx, C @ cy + S @ sy


def curve_d1(cx, sx, cy, sy, phis):
    j = np.arange(cx.shape[0])
    C, S = _trig(phis, cx.shape[0])
    return C @ (j * sx) - S @ (j * cx), C @ (j * sy) - S @ (j * cy)


def curve_d2(cx, sx, cy, sy, phis):
    j2 = np.arange(cx.shape[0]) ** 2
    C, S = _trig(phis, cx.shape[0])
    return -(C @ (j2 * cx) + S @ (j2 * sx)), -(C @ (j2 * cy) + S @ (j2 * sy))


def _vec_newton(cx, sx, cy, sy, x0, y0, r2, d0, max_iter, tol_accept):
    """Vectorized Newton for |gamma(d)-p0|^2 = r2 from per-point seeds."""
    d = d0.copy()
    best = d0.copy()
    best_g = np.full(d.shape, 1.0e300)
    for _ in range(max_iter):
        x, y = curve_points(cx, sx, cy, sy, d)
        dx, dy = curve_d1(cx, sx, cy, sy, d)
        ex = x - x0
        ey = y - y0
        g = ex * ex + ey * ey - r2
        ag = np.abs(g)
        better = ag < best_g
        best_g = np.where(better, ag, best_g)
        best = np.where(better, d, best)
        gp = 2.0 * (ex * dx + ey * dy)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(gp != 0.0, g / gp, 0.0)
        step = np.clip(step, -0.5, 0.5)
        live = (ag > 1e-15 * r2) & (np.abs(step) > 4e-16 * (1.0 + np.abs(d)))
        if not live.any():
            break
        d = np.where(live, d - step, d)
    return best, best_g <= tol_accept * r2


def pair_continuation(cx, sx, cy, sy, r, phis, seed_off, tol_accept, max_iter):
    n = phis.shape[0]
    r2 = r * r
    x0, y0 = curve_points(cx, sx, cy, sy, phis)
    p, ok_p = _vec_newton(cx, sx, cy, sy, x0, y0, r2, phis + seed_off, max_iter, tol_accept)
    m, ok_m = _vec_newton(cx, sx, cy, sy, x0, y0, r2, phis - seed_off, max_iter, tol_accept)
    # repair failures by reseeding from a converged neighbor
    for arr, ok, sign in ((p, ok_p, 1.0), (m, ok_m, -1.0)):
        bad = np.nonzero(~ok)[0]
        for i in bad:
            for k in (i - 1, i + 1):
                k = k % n
                if not ok[k]:
                    continue
                seed = np.array([arr[k] + (phis[i] - phis[k])])
                root, good = _vec_newton(
                    cx, sx, cy, sy, x0[i:i + 1], y0[i:i + 1], r2, seed, max_iter, tol_accept
                )
                if good[0]:
                    arr[i] = root[0]
                    ok[i] = True
                    break
    status = np.zeros(n, dtype=np.int8)
    status[(~ok_p) | (~ok_m)] = 1
    window = (p > phis) & (p < phis + _PI) & (m > phis - _PI) & (m < phis)
    status[(status == 0) & ~window] = 2
    return m, p, status


def _quad_escalate(integrand, m, p, gnodes, gweights, gcounts, tol):
    """Shared escalation loop.  ``integrand(psi_flat, idx, ncols)`` returns
    the integrand sampled at the mapped nodes for the active points."""
    n = m.shape[0]
    mid = 0.5 * (m + p)
    h = 0.5 * (p - m)
    vals = np.zeros(n)
    errs = np.full(n, 1.0e300)
    prev = np.zeros(n)
    active = np.ones(n, dtype=bool)
    for lev in range(gcounts.shape[0]):
        cnt = int(gcounts[lev])
        idx = np.nonzero(active)[0]
        psi = mid[idx, None] + h[idx, None] * gnodes[lev, :cnt][None, :]
        f = integrand(psi.ravel(), idx, cnt).reshape(idx.shape[0], cnt)
        v = (f @ gweights[lev, :cnt]) * h[idx]
        vals[idx] = v
        if lev > 0:
            e = np.abs(v - prev[idx])
            errs[idx] = e
            active[idx] = e > tol
        prev[idx] = v
        if lev > 0 and not active.any():
            break
    return vals, errs


def chord_quad(cx, sx, cy, sy, x0s, y0s, m, p, gnodes, gweights, gcounts, tol):
    def integrand(psi, idx, cnt):
        x, y = curve_points(cx, sx, cy, sy, psi)
        dx, dy = curve_d1(cx, sx, cy, sy, psi)
        x0 = np.repeat(x0s[idx], cnt)
        y0 = np.repeat(y0s[idx], cnt)
        return (x - x0) * dy - (y - y0) * dx

    return _quad_escalate(integrand, m, p, gnodes, gweights, gcounts, tol)


def field_quad(fcx, fsx, fcy, fsy, cx, sx, cy, sy, m, p, gnodes, gweights, gcounts, tol):
    def integrand(psi, idx, cnt):
        fx = eval_series(fcx, fsx, psi)
        fy = eval_series(fcy, fsy, psi)
        dx, dy = curve_d1(cx, sx, cy, sy, psi)
        return fx * dy - fy * dx

    return _quad_escalate(integrand, m, p, gnodes, gweights, gcounts, tol)


def trig_moment_quad(cx, sx, cy, sy, m, p, jmax, gnodes, gweights, gcounts, tol):
    """Moments Int_{m_i}^{p_i} cos(j psi) w(psi) dpsi (and the sine
    counterpart) for j = 0..jmax, with w = |dgamma|^2."""
    n = m.shape[0]
    mid = 0.5 * (m + p)
    h = 0.5 * (p - m)
    cmom = np.zeros((n, jmax + 1))
    smom = np.zeros((n, jmax + 1))
    errs = np.full(n, 1.0e300)
    prev_c = np.zeros((n, jmax + 1))
    prev_s = np.zeros((n, jmax + 1))
    active = np.ones(n, dtype=bool)
    for lev in range(gcounts.shape[0]):
        cnt = int(gcounts[lev])
        idx = np.nonzero(active)[0]
        psi = mid[idx, None] + h[idx, None] * gnodes[lev, :cnt][None, :]
        dx, dy = curve_d1(cx, sx, cy, sy, psi.ravel())
        w = (dx * dx + dy * dy).reshape(idx.shape[0], cnt) \
            * gweights[lev, :cnt][None, :]
        c1 = np.cos(psi)
        s1 = np.sin(psi)
        cj = np.ones_like(psi)
        sj = np.zeros_like(psi)
        cm = np.empty((idx.shape[0], jmax + 1))
        sm = np.zeros((idx.shape[0], jmax + 1))
        cm[:, 0] = w.sum(axis=1)
        for j in range(1, jmax + 1):
            cj, sj = cj * c1 - sj * s1, sj * c1 + cj * s1
            cm[:, j] = (w * cj).sum(axis=1)
            sm[:, j] = (w * sj).sum(axis=1)
        cm *= h[idx, None]
        sm *= h[idx, None]
        cmom[idx] = cm
        smom[idx] = sm
        if lev > 0:
            e = np.maximum(np.abs(cm - prev_c[idx]).max(axis=1),
                           np.abs(sm - prev_s[idx]).max(axis=1))
            errs[idx] = e
            active[idx] = e > tol
        prev_c[idx] = cm
        prev_s[idx] = sm
        if lev > 0 and not active.any():
            break
    return cmom, smom, errs


def disk_polygon_areas(px, py, qx, qy, r):
    nv = px.shape[0]
    nc = qx.shape[0]
    r2 = r * r
    x2v = np.roll(px, -1)
    y2v = np.roll(py, -1)
    exv = x2v - px
    eyv = y2v - py
    aq = exv * exv + eyv * eyv
    areas = np.empty(nc)
    chunk = max(1, int(2.0e6 // max(nv, 1)))
    for lo in range(0, nc, chunk):
        hi = min(lo + chunk, nc)
        X1 = px[None, :] - qx[lo:hi, None]
        Y1 = py[None, :] - qy[lo:hi, None]
        X2 = x2v[None, :] - qx[lo:hi, None]
        Y2 = y2v[None, :] - qy[lo:hi, None]
        d1 = X1 * X1 + Y1 * Y1
        d2 = X2 * X2 + Y2 * Y2
        inside = (d1 <= r2) & (d2 <= r2)
        tri = 0.5 * (X1 * Y2 - Y1 * X2)
        bq = 2.0 * (X1 * exv + Y1 * eyv)
        cq = d1 - r2
        disc = bq * bq - 4.0 * aq * cq
        sq = np.sqrt(np.maximum(disc, 0.0))
        qq = -0.5 * (bq + np.where(bq >= 0.0, 1.0, -1.0) * sq)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = np.where((aq > 0.0) & (qq != 0.0), qq / aq, 0.0)
            t2 = np.where(qq != 0.0, cq / qq, 0.0)
        tlo = np.minimum(t1, t2)
        thi = np.maximum(t1, t2)
        u1 = np.clip(tlo, 0.0, 1.0)
        u2 = np.clip(thi, 0.0, 1.0)
        hit = (~inside) & (aq > 0.0) & (disc > 0.0) & (u2 > u1)
        iax = X1 + u1 * exv
        iay = Y1 + u1 * eyv
        ibx = X1 + u2 * exv
        iby = Y1 + u2 * eyv
        sec_in = 0.5 * r2 * np.arctan2(X1 * iay - Y1 * iax, X1 * iax + Y1 * iay)
        sec_out = 0.5 * r2 * np.arctan2(ibx * Y2 - iby * X2, ibx * X2 + iby * Y2)
        mid_tri = 0.5 * (iax * iby - iay * ibx)
        split = np.where(u1 > 0.0, sec_in, 0.0) + mid_tri + np.where(u2 < 1.0, sec_out, 0.0)
        sector = 0.5 * r2 * np.arctan2(X1 * Y2 - Y1 * X2, X1 * X2 + Y1 * Y2)
        contrib = np.where(inside, tri, np.where(hit, split, sector))
        areas[lo:hi] = contrib.sum(axis=1)
    return areas


def crossing_scan(cx, sx, cy, sy, fphis, fx, fy, phis, x0s, y0s, r, tol_tan, bisect_iters):
    nf = fphis.shape[0]
    n = phis.shape[0]
    r2 = r * r
    step = 2.0 * _PI / nf
    counts = np.zeros(n, dtype=np.int64)
    flags = np.zeros(n, dtype=np.uint8)
    chunk = max(1, int(4.0e6 // max(nf, 1)))
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        ex = fx[None, :] - x0s[lo:hi, None]
        ey = fy[None, :] - y0s[lo:hi, None]
        g = ex * ex + ey * ey - r2
        gprev = np.roll(g, 1, axis=1)
        change = gprev * g < 0.0
        counts[lo:hi] = change.sum(axis=1)
        flags[lo:hi] |= (g == 0.0).any(axis=1).astype(np.uint8)
        ci, ck = np.nonzero(change)
        if ci.size == 0:
            continue
        hi_b = fphis[ck]
        lo_b = hi_b - step
        glo = gprev[ci, ck]
        x0b = x0s[lo + ci]
        y0b = y0s[lo + ci]
        for _ in range(bisect_iters):
            midb = 0.5 * (lo_b + hi_b)
            xm, ym = curve_points(cx, sx, cy, sy, midb)
            gm = (xm - x0b) ** 2 + (ym - y0b) ** 2 - r2
            same = (gm > 0.0) == (glo > 0.0)
            lo_b = np.where(same, midb, lo_b)
            glo = np.where(same, gm, glo)
            hi_b = np.where(same, hi_b, midb)
        root = 0.5 * (lo_b + hi_b)
        xr, yr = curve_points(cx, sx, cy, sy, root)
        dxr, dyr = curve_d1(cx, sx, cy, sy, root)
        erx = xr - x0b
        ery = yr - y0b
        dist = np.sqrt(erx * erx + ery * ery)
        with np.errstate(divide="ignore", invalid="ignore"):
            dd = np.where(dist > 0.0, np.abs(erx * dxr + ery * dyr) / dist, 0.0)
        tang = dd < tol_tan
        if tang.any():
            np.logical_or.at(flags[lo:hi], ci[tang], True)
    return counts, flags


def _seg_dist2_vec(pxq, pyq, ax, ay, bx, by):
    ex = bx - ax
    ey = by - ay
    den = ex * ex + ey * ey
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(den > 0.0, ((pxq - ax) * ex + (pyq - ay) * ey) / den, 0.0)
    t = np.clip(t, 0.0, 1.0)
    dx = pxq - (ax + t * ex)
    dy = pyq - (ay + t * ey)
    return dx * dx + dy * dy


def poly_self_intersect(px, py, gap):
    nv = px.shape[0]
    gap2 = gap * gap
    nxt = np.roll(np.arange(nv), -1)
    bx = px[nxt]
    by = py[nxt]
    chunk = max(1, int(2.0e6 // max(nv, 1)))
    for lo in range(0, nv, chunk):
        hi = min(lo + chunk, nv)
        ii = np.arange(lo, hi)
        jj = np.arange(nv)
        I, J = np.meshgrid(ii, jj, indexing="ij")
        keep = (J > I) & (J != nxt[I]) & (nxt[J] != I)
        if not keep.any():
            continue
        axI = px[I]
        ayI = py[I]
        bxI = bx[I]
        byI = by[I]
        uxJ = px[J]
        uyJ = py[J]
        vxJ = bx[J]
        vyJ = by[J]
        o1 = (bxI - axI) * (uyJ - ayI) - (byI - ayI) * (uxJ - axI)
        o2 = (bxI - axI) * (vyJ - ayI) - (byI - ayI) * (vxJ - axI)
        o3 = (vxJ - uxJ) * (ayI - uyJ) - (vyJ - uyJ) * (axI - uxJ)
        o4 = (vxJ - uxJ) * (byI - uyJ) - (vyJ - uyJ) * (bxI - uxJ)
        cross = ((o1 > 0.0) != (o2 > 0.0)) & ((o3 > 0.0) != (o4 > 0.0))
        if (cross & keep).any():
            return 1
        if gap2 > 0.0:
            d = _seg_dist2_vec(uxJ, uyJ, axI, ayI, bxI, byI)
            np.minimum(d, _seg_dist2_vec(vxJ, vyJ, axI, ayI, bxI, byI), out=d)
            np.minimum(d, _seg_dist2_vec(axI, ayI, uxJ, uyJ, vxJ, vyJ), out=d)
            np.minimum(d, _seg_dist2_vec(bxI, byI, uxJ, uyJ, vxJ, vyJ), out=d)
            if (keep & (d < gap2)).any():
                return 1
    return 0

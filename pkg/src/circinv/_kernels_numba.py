"""Numba-compiled hot loops.

All kernels operate on packed real trigonometric coefficients: arrays
``c`` and ``s`` of equal length K+1 represent

    f(phi) = sum_{j=0..K} c[j]*cos(j*phi) + s[j]*sin(j*phi)

with ``s[0]`` ignored.  Mode values cos(j*phi), sin(j*phi) are built by
a rotation recurrence, which keeps per-point cost at a few flops per
mode and is accurate to ~K*eps.
"""

import math

import numpy as np
from numba import njit

_PI = math.pi


@njit(cache=True)
def _series_val(c, s, phi):
    c1 = math.cos(phi)
    s1 = math.sin(phi)
    v = c[0]
    cj = 1.0
    sj = 0.0
    for j in range(1, c.shape[0]):
        t = cj * c1 - sj * s1
        sj = sj * c1 + cj * s1
        cj = t
        v += c[j] * cj + s[j] * sj
    return v


@njit(cache=True)
def _xy(cx, sx, cy, sy, phi):
    c1 = math.cos(phi)
    s1 = math.sin(phi)
    x = cx[0]
    y = cy[0]
    cj = 1.0
    sj = 0.0
    for j in range(1, cx.shape[0]):
        t = cj * c1 - sj * s1
        sj = sj * c1 + cj * s1
        cj = t
        x += cx[j] * cj + sx[j] * sj
        y += cy[j] * cj + sy[j] * sj
    return x, y


@njit(cache=True)
def _xy_d1(cx, sx, cy, sy, phi):
    """Position and first derivative in one recurrence pass."""
    c1 = math.cos(phi)
    s1 = math.sin(phi)
    x = cx[0]
    y = cy[0]
    dx = 0.0
    dy = 0.0
    cj = 1.0
    sj = 0.0
    for j in range(1, cx.shape[0]):
        t = cj * c1 - sj * s1
        sj = sj * c1 + cj * s1
        cj = t
        x += cx[j] * cj + sx[j] * sj
        y += cy[j] * cj + sy[j] * sj
        dx += j * (sx[j] * cj - cx[j] * sj)
        dy += j * (sy[j] * cj - cy[j] * sj)
    return x, y, dx, dy


@njit(cache=True)
def eval_series(c, s, phis):
    out = np.empty(phis.shape[0])
    for i in range(phis.shape[0]):
        out[i] = _series_val(c, s, phis[i])
    return out


@njit(cache=True)
def eval_series_d1(c, s, phis):
    out = np.empty(phis.shape[0])
    for i in range(phis.shape[0]):
        phi = phis[i]
        c1 = math.cos(phi)
        s1 = math.sin(phi)
        v = 0.0
        cj = 1.0
        sj = 0.0
        for j in range(1, c.shape[0]):
            t = cj * c1 - sj * s1
            sj = sj * c1 + cj * s1
            cj = t
            v += j * (s[j] * cj - c[j] * sj)
        out[i] = v
    return out


@njit(cache=True)
def curve_points(cx, sx, cy, sy, phis):
    n = phis.shape[0]
    x = np.empty(n)
    y = np.empty(n)
    for i in range(n):
        x[i], y[i] = _xy(cx, sx, cy, sy, phis[i])
    return x, y


@njit(cache=True)
def curve_d1(cx, sx, cy, sy, phis):
    n = phis.shape[0]
    dx = np.empty(n)
    dy = np.empty(n)
    for i in range(n):
        _, _, dx[i], dy[i] = _xy_d1(cx, sx, cy, sy, phis[i])
    return dx, dy


@njit(cache=True)
def curve_d2(cx, sx, cy, sy, phis):
    n = phis.shape[0]
    ddx = np.empty(n)
    ddy = np.empty(n)
    for i in range(n):
        phi = phis[i]
        c1 = math.cos(phi)
        s1 = math.sin(phi)
        ax = 0.0
        ay = 0.0
        cj = 1.0
        sj = 0.0
        for j in range(1, cx.shape[0]):
            t = cj * c1 - sj * s1
            sj = sj * c1 + cj * s1
            cj = t
            ax -= j * j * (cx[j] * cj + sx[j] * sj)
            ay -= j * j * (cy[j] * cj + sy[j] * sj)
        ddx[i] = ax
        ddy[i] = ay
    return ddx, ddy


@njit(cache=True)
def _newton_root(cx, sx, cy, sy, x0, y0, r2, d0, max_iter, tol_accept):
    """Solve |gamma(d) - (x0,y0)|^2 = r2 near d0.  Returns (root, ok)."""
    d = d0
    best = d0
    best_g = 1.0e300
    for _ in range(max_iter):
        x, y, dx, dy = _xy_d1(cx, sx, cy, sy, d)
        ex = x - x0
        ey = y - y0
        g = ex * ex + ey * ey - r2
        ag = abs(g)
        if ag < best_g:
            best_g = ag
            best = d
        if ag <= 1e-15 * r2:
            break
        gp = 2.0 * (ex * dx + ey * dy)
        if gp == 0.0:
            break
        step = g / gp
        if step > 0.5:
            step = 0.5
        elif step < -0.5:
            step = -0.5
        if abs(step) <= 4e-16 * (1.0 + abs(d)):
            break
        d = d - step
    return best, best_g <= tol_accept * r2


@njit(cache=True)
def pair_continuation(cx, sx, cy, sy, r, phis, seed_off, tol_accept, max_iter):
    """Both disk-boundary crossing parameters for every grid point.

    Roots are seeded from the previous grid point (circle-offset seeds at
    the first point) and kept in the windows (phi, phi+pi) / (phi-pi, phi).
    status: 0 ok, 1 no convergence, 2 out of window.
    """
    n = phis.shape[0]
    r2 = r * r
    m = np.empty(n)
    p = np.empty(n)
    status = np.zeros(n, dtype=np.int8)
    for i in range(n):
        phi = phis[i]
        x0, y0 = _xy(cx, sx, cy, sy, phi)
        if i == 0:
            seed_p = phi + seed_off
            seed_m = phi - seed_off
        else:
            dphi = phi - phis[i - 1]
            seed_p = p[i - 1] + dphi
            seed_m = m[i - 1] + dphi
        root, ok = _newton_root(cx, sx, cy, sy, x0, y0, r2, seed_p, max_iter, tol_accept)
        p[i] = root
        if not ok:
            status[i] = 1
        elif not (phi < root < phi + _PI):
            status[i] = 2
        root, ok = _newton_root(cx, sx, cy, sy, x0, y0, r2, seed_m, max_iter, tol_accept)
        m[i] = root
        if status[i] == 0:
            if not ok:
                status[i] = 1
            elif not (phi - _PI < root < phi):
                status[i] = 2
    return m, p, status


@njit(cache=True)
def chord_quad(cx, sx, cy, sy, x0s, y0s, m, p, gnodes, gweights, gcounts, tol):
    """Integral of <gamma(psi)-gamma0, perp(dgamma(psi))> over [m_i, p_i].

    perp(v) := (v_y, -v_x).  Escalates through the Gauss-Legendre orders
    until two successive results agree to ``tol`` (absolute).
    """
    n = m.shape[0]
    vals = np.empty(n)
    errs = np.empty(n)
    nlev = gcounts.shape[0]
    for i in range(n):
        a = m[i]
        b = p[i]
        mid = 0.5 * (a + b)
        h = 0.5 * (b - a)
        x0 = x0s[i]
        y0 = y0s[i]
        prev = 0.0
        val = 0.0
        err = 1.0e300
        for lev in range(nlev):
            cnt = gcounts[lev]
            acc = 0.0
            for q in range(cnt):
                psi = mid + h * gnodes[lev, q]
                x, y, dx, dy = _xy_d1(cx, sx, cy, sy, psi)
                acc += gweights[lev, q] * ((x - x0) * dy - (y - y0) * dx)
            val = acc * h
            if lev > 0:
                err = abs(val - prev)
                if err <= tol:
                    break
            prev = val
        vals[i] = val
        errs[i] = err
    return vals, errs


@njit(cache=True)
def trig_moment_quad(cx, sx, cy, sy, m, p, jmax, gnodes, gweights, gcounts, tol):
    """Moments Int_{m_i}^{p_i} cos(j psi) w(psi) dpsi (and the sine
    counterpart) for j = 0..jmax, with w = |dgamma|^2.

    Shared workhorse for collocation-matrix assembly: every frame-basis
    column uses the same weight function, only the trig factor differs.
    """
    n = m.shape[0]
    cmom = np.empty((n, jmax + 1))
    smom = np.empty((n, jmax + 1))
    errs = np.empty(n)
    nlev = gcounts.shape[0]
    cacc = np.empty(jmax + 1)
    sacc = np.empty(jmax + 1)
    cprev = np.empty(jmax + 1)
    sprev = np.empty(jmax + 1)
    for i in range(n):
        a = m[i]
        b = p[i]
        mid = 0.5 * (a + b)
        h = 0.5 * (b - a)
        err = 1.0e300
        for lev in range(nlev):
            cnt = gcounts[lev]
            for j in range(jmax + 1):
                cacc[j] = 0.0
                sacc[j] = 0.0
            for q in range(cnt):
                psi = mid + h * gnodes[lev, q]
                c1 = math.cos(psi)
                s1 = math.sin(psi)
                dx = 0.0
                dy = 0.0
                cj = 1.0
                sj = 0.0
                for j in range(1, cx.shape[0]):
                    t = cj * c1 - sj * s1
                    sj = sj * c1 + cj * s1
                    cj = t
                    dx += j * (sx[j] * cj - cx[j] * sj)
                    dy += j * (sy[j] * cj - cy[j] * sj)
                w = gweights[lev, q] * (dx * dx + dy * dy)
                cacc[0] += w
                cj = 1.0
                sj = 0.0
                for j in range(1, jmax + 1):
                    t = cj * c1 - sj * s1
                    sj = sj * c1 + cj * s1
                    cj = t
                    cacc[j] += w * cj
                    sacc[j] += w * sj
            for j in range(jmax + 1):
                cacc[j] *= h
                sacc[j] *= h
            if lev > 0:
                e = 0.0
                for j in range(jmax + 1):
                    dc = abs(cacc[j] - cprev[j])
                    ds = abs(sacc[j] - sprev[j])
                    if dc > e:
                        e = dc
                    if ds > e:
                        e = ds
                err = e
                if err <= tol:
                    break
            for j in range(jmax + 1):
                cprev[j] = cacc[j]
                sprev[j] = sacc[j]
        for j in range(jmax + 1):
            cmom[i, j] = cacc[j]
            smom[i, j] = sacc[j]
        smom[i, 0] = 0.0
        errs[i] = err
    return cmom, smom, errs


@njit(cache=True)
def field_quad(fcx, fsx, fcy, fsy, cx, sx, cy, sy, m, p, gnodes, gweights, gcounts, tol):
    """Integral of <sigma(psi), perp(dgamma(psi))> over [m_i, p_i]."""
    n = m.shape[0]
    vals = np.empty(n)
    errs = np.empty(n)
    nlev = gcounts.shape[0]
    for i in range(n):
        a = m[i]
        b = p[i]
        mid = 0.5 * (a + b)
        h = 0.5 * (b - a)
        prev = 0.0
        val = 0.0
        err = 1.0e300
        for lev in range(nlev):
            cnt = gcounts[lev]
            acc = 0.0
            for q in range(cnt):
                psi = mid + h * gnodes[lev, q]
                fx = _series_val(fcx, fsx, psi)
                fy = _series_val(fcy, fsy, psi)
                c1 = math.cos(psi)
                s1 = math.sin(psi)
                dx = 0.0
                dy = 0.0
                cj = 1.0
                sj = 0.0
                for j in range(1, cx.shape[0]):
                    t = cj * c1 - sj * s1
                    sj = sj * c1 + cj * s1
                    cj = t
                    dx += j * (sx[j] * cj - cx[j] * sj)
                    dy += j * (sy[j] * cj - cy[j] * sj)
                acc += gweights[lev, q] * (fx * dy - fy * dx)
            val = acc * h
            if lev > 0:
                err = abs(val - prev)
                if err <= tol:
                    break
            prev = val
        vals[i] = val
        errs[i] = err
    return vals, errs


@njit(cache=True)
def disk_polygon_areas(px, py, qx, qy, r):
    """Area of disk(center, r) intersected with the closed polygon.

    Per-edge decomposition relative to the center: edges with both ends
    inside the disk contribute a signed triangle, fully outside edges a
    signed circular sector, and crossing edges are split at the chord.
    Signed contributions telescope to the exact clipped area for a
    simple positively oriented polygon.
    """
    nv = px.shape[0]
    nc = qx.shape[0]
    r2 = r * r
    areas = np.empty(nc)
    for ic in range(nc):
        ax = qx[ic]
        ay = qy[ic]
        acc = 0.0
        x1 = px[nv - 1] - ax
        y1 = py[nv - 1] - ay
        d1 = x1 * x1 + y1 * y1
        for e in range(nv):
            x2 = px[e] - ax
            y2 = py[e] - ay
            d2 = x2 * x2 + y2 * y2
            if d1 <= r2 and d2 <= r2:
                acc += 0.5 * (x1 * y2 - y1 * x2)
            else:
                ex = x2 - x1
                ey = y2 - y1
                aq = ex * ex + ey * ey
                hit = False
                u1 = 0.0
                u2 = 0.0
                if aq > 0.0:
                    bq = 2.0 * (x1 * ex + y1 * ey)
                    cq = d1 - r2
                    disc = bq * bq - 4.0 * aq * cq
                    if disc > 0.0:
                        sq = math.sqrt(disc)
                        if bq >= 0.0:
                            qq = -0.5 * (bq + sq)
                        else:
                            qq = -0.5 * (bq - sq)
                        if qq != 0.0:
                            t1 = qq / aq
                            t2 = cq / qq
                        else:
                            t1 = 0.0
                            t2 = 0.0
                        if t1 > t2:
                            t1, t2 = t2, t1
                        u1 = min(max(t1, 0.0), 1.0)
                        u2 = min(max(t2, 0.0), 1.0)
                        hit = u2 > u1
                if hit:
                    iax = x1 + u1 * ex
                    iay = y1 + u1 * ey
                    ibx = x1 + u2 * ex
                    iby = y1 + u2 * ey
                    if u1 > 0.0:
                        acc += 0.5 * r2 * math.atan2(x1 * iay - y1 * iax, x1 * iax + y1 * iay)
                    acc += 0.5 * (iax * iby - iay * ibx)
                    if u2 < 1.0:
                        acc += 0.5 * r2 * math.atan2(ibx * y2 - iby * x2, ibx * x2 + iby * y2)
                else:
                    acc += 0.5 * r2 * math.atan2(x1 * y2 - y1 * x2, x1 * x2 + y1 * y2)
            x1 = x2
            y1 = y2
            d1 = d2
        areas[ic] = acc
    return areas


@njit(cache=True)
def crossing_scan(cx, sx, cy, sy, fphis, fx, fy, phis, x0s, y0s, r, tol_tan, bisect_iters):
    """Number of disk-boundary crossings of the curve, per center.

    Sign changes of |gamma(psi)-center|-r are located on the fine grid
    and refined by bisection; a crossing with distance-derivative below
    ``tol_tan`` (or an exact grid touch) sets the tangency flag.
    """
    nf = fphis.shape[0]
    n = phis.shape[0]
    r2 = r * r
    step = 2.0 * _PI / nf
    counts = np.zeros(n, dtype=np.int64)
    flags = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        x0 = x0s[i]
        y0 = y0s[i]
        exl = fx[nf - 1] - x0
        eyl = fy[nf - 1] - y0
        gprev = exl * exl + eyl * eyl - r2
        cnt = 0
        flag = 0
        for k in range(nf):
            ex = fx[k] - x0
            ey = fy[k] - y0
            gk = ex * ex + ey * ey - r2
            if gk == 0.0:
                flag = 1
            if gprev * gk < 0.0:
                cnt += 1
                hi = fphis[k]
                lo = hi - step
                glo = gprev
                for _ in range(bisect_iters):
                    mid = 0.5 * (lo + hi)
                    xm, ym = _xy(cx, sx, cy, sy, mid)
                    emx = xm - x0
                    emy = ym - y0
                    gm = emx * emx + emy * emy - r2
                    if (gm > 0.0) == (glo > 0.0):
                        lo = mid
                        glo = gm
                    else:
                        hi = mid
                root = 0.5 * (lo + hi)
                xr, yr, dxr, dyr = _xy_d1(cx, sx, cy, sy, root)
                erx = xr - x0
                ery = yr - y0
                dist = math.sqrt(erx * erx + ery * ery)
                if dist > 0.0:
                    dd = abs(erx * dxr + ery * dyr) / dist
                    if dd < tol_tan:
                        flag = 1
            gprev = gk
        counts[i] = cnt
        flags[i] = flag
    return counts, flags


@njit(cache=True)
def _seg_dist2(pxq, pyq, ax, ay, bx, by):
    """Squared distance from point to segment [a, b]."""
    ex = bx - ax
    ey = by - ay
    den = ex * ex + ey * ey
    if den == 0.0:
        dx = pxq - ax
        dy = pyq - ay
        return dx * dx + dy * dy
    t = ((pxq - ax) * ex + (pyq - ay) * ey) / den
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    dx = pxq - (ax + t * ex)
    dy = pyq - (ay + t * ey)
    return dx * dx + dy * dy


@njit(cache=True)
def poly_self_intersect(px, py, gap):
    """1 if any non-adjacent edge pair crosses or comes within ``gap``."""
    nv = px.shape[0]
    gap2 = gap * gap
    for i in range(nv):
        i2 = i + 1 if i + 1 < nv else 0
        ax = px[i]
        ay = py[i]
        bx = px[i2]
        by = py[i2]
        for j in range(i + 1, nv):
            j2 = j + 1 if j + 1 < nv else 0
            if j == i2 or j2 == i:
                continue
            ux = px[j]
            uy = py[j]
            vx = px[j2]
            vy = py[j2]
            o1 = (bx - ax) * (uy - ay) - (by - ay) * (ux - ax)
            o2 = (bx - ax) * (vy - ay) - (by - ay) * (vx - ax)
            o3 = (vx - ux) * (ay - uy) - (vy - uy) * (ax - ux)
            o4 = (vx - ux) * (by - uy) - (vy - uy) * (bx - ux)
            if ((o1 > 0.0) != (o2 > 0.0)) and ((o3 > 0.0) != (o4 > 0.0)):
                return 1
            if gap2 > 0.0:
                d = _seg_dist2(ux, uy, ax, ay, bx, by)
                d2 = _seg_dist2(vx, vy, ax, ay, bx, by)
                if d2 < d:
                    d = d2
                d2 = _seg_dist2(ax, ay, ux, uy, vx, vy)
                if d2 < d:
                    d = d2
                d2 = _seg_dist2(bx, by, ux, uy, vx, vy)
                if d2 < d:
                    d = d2
                if d < gap2:
                    return 1
    return 0

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled counting kernels.

Same contract as ``_fallback``: exact closed-ball predicates, occupied r-mesh
cells anchored at the origin, ties resolved by serialization index.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, sqrt, fabs

NAME = "compiled"

cnp.import_array()


def local_counts_1d(double[::1] xs, double R, double r):
    """Per-point count of occupied r-cells within distance R, xs sorted ascending."""
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.int64_t[::1] prefix = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i, j, lo = 0, hi = 0
    cdef double prev, cur
    with nogil:
        if n > 0:
            prev = floor(xs[0] / r)
            prefix[0] = 0
        for i in range(1, n):
            cur = floor(xs[i] / r)
            prefix[i] = prefix[i - 1] + (cur != prev)
            prev = cur
        for j in range(n):
            while xs[j] - xs[lo] > R:
                lo += 1
            if hi < j:
                hi = j
            while hi + 1 < n and xs[hi + 1] - xs[j] <= R:
                hi += 1
            counts[j] = 1 + prefix[hi] - prefix[lo]
    return np.asarray(counts)


cdef inline cnp.int64_t _flo(double v) noexcept nogil:
    # cell index just below v, widened so rounding in v never drops a cell
    return <cnp.int64_t>floor(v - (1e-9 + 1e-15 * fabs(v)))


cdef inline cnp.int64_t _fhi(double v) noexcept nogil:
    return <cnp.int64_t>floor(v + (1e-9 + 1e-15 * fabs(v)))


cdef class _Grid:
    """Occupied r-cells grouped by row (y index), columns sorted inside a row."""

    cdef double r
    cdef int sup
    cdef double[::1] sx, sy, bx0, bx1, by0, by1, qx0, qx1, qy0, qy1
    cdef cnp.int64_t[::1] ccx, cstart, cend, rcy, rstart, rend, kstart, kend, pstart, pend
    cdef Py_ssize_t nrow
    cdef double slack

    def __init__(self, xs, ys, double r, int sup):
        self.r = r
        self.sup = sup
        cx = np.floor(xs / r)
        cy = np.floor(ys / r)
        if len(xs) and max(np.abs(cx).max(), np.abs(cy).max()) > 2.0 ** 52:
            raise OverflowError("cell indices exceed the exact integer range")
        # 4x4 sub-cells let hit tests reject or accept most of a cell by box
        sub = (np.clip(np.floor((xs / r - cx) * 4), 0, 3)
               + 4 * np.clip(np.floor((ys / r - cy) * 4), 0, 3)).astype(np.int64)
        order = np.lexsort((sub, cx, cy))
        cx = cx[order].astype(np.int64)
        cy = cy[order].astype(np.int64)
        sub = sub[order]
        sx = np.ascontiguousarray(xs[order])
        sy = np.ascontiguousarray(ys[order])
        self.sx = sx
        self.sy = sy
        n = len(order)
        newcell = np.ones(n, dtype=bool)
        newcell[1:] = (cx[1:] != cx[:-1]) | (cy[1:] != cy[:-1])
        newsub = newcell.copy()
        newsub[1:] |= sub[1:] != sub[:-1]
        starts = np.flatnonzero(newcell)
        sstarts = np.flatnonzero(newsub)
        self.cstart = starts.astype(np.int64)
        self.cend = np.append(starts[1:], n).astype(np.int64)
        self.bx0 = np.minimum.reduceat(sx, starts)
        self.bx1 = np.maximum.reduceat(sx, starts)
        self.by0 = np.minimum.reduceat(sy, starts)
        self.by1 = np.maximum.reduceat(sy, starts)
        self.pstart = sstarts.astype(np.int64)
        self.pend = np.append(sstarts[1:], n).astype(np.int64)
        self.qx0 = np.minimum.reduceat(sx, sstarts)
        self.qx1 = np.maximum.reduceat(sx, sstarts)
        self.qy0 = np.minimum.reduceat(sy, sstarts)
        self.qy1 = np.maximum.reduceat(sy, sstarts)
        first_sub = np.searchsorted(sstarts, starts)
        self.kstart = first_sub.astype(np.int64)
        self.kend = np.append(first_sub[1:], len(sstarts)).astype(np.int64)
        self.ccx = cx[starts]
        ccy = cy[starts]
        newrow = np.ones(len(starts), dtype=bool)
        newrow[1:] = ccy[1:] != ccy[:-1]
        rs = np.flatnonzero(newrow)
        self.rcy = ccy[rs]
        self.rstart = rs.astype(np.int64)
        self.rend = np.append(rs[1:], len(starts)).astype(np.int64)
        self.nrow = len(rs)
        scale = max(float(np.abs(xs).max()), float(np.abs(ys).max()), r)
        self.slack = 1e-12 * scale

    cdef inline Py_ssize_t row_lower(self, cnp.int64_t v) noexcept nogil:
        cdef Py_ssize_t a = 0, b = self.nrow, m
        while a < b:
            m = (a + b) >> 1
            if self.rcy[m] < v:
                a = m + 1
            else:
                b = m
        return a

    cdef inline Py_ssize_t col_lower(self, Py_ssize_t row, cnp.int64_t v) noexcept nogil:
        cdef Py_ssize_t a = self.rstart[row], b = self.rend[row], m
        while a < b:
            m = (a + b) >> 1
            if self.ccx[m] < v:
                a = m + 1
            else:
                b = m
        return a

    cdef inline double dist(self, double dx, double dy) noexcept nogil:
        if self.sup:
            return dx if dx > dy else dy
        return sqrt(dx * dx + dy * dy)

    cdef inline int box_test(self, double x0, double x1, double y0, double y1,
                             double px, double py, double R) noexcept nogil:
        """0: no point of the box is within R; 1: every point is; 2: undecided."""
        cdef double dx = 0.0, dy = 0.0, ex, ey
        # floating subtraction, multiplication and sqrt are monotone, so the
        # box corners bound every computed point distance from both sides
        if x0 > px:
            dx = x0 - px
        elif px > x1:
            dx = px - x1
        if y0 > py:
            dy = y0 - py
        elif py > y1:
            dy = py - y1
        if self.dist(dx, dy) > R:
            return 0
        ex = fabs(x0 - px)
        if fabs(x1 - px) > ex:
            ex = fabs(x1 - px)
        ey = fabs(y0 - py)
        if fabs(y1 - py) > ey:
            ey = fabs(y1 - py)
        if self.dist(ex, ey) <= R:
            return 1
        return 2

    cdef inline int hit(self, Py_ssize_t k, double px, double py, double R) noexcept nogil:
        cdef Py_ssize_t j, p
        cdef int t = self.box_test(self.bx0[k], self.bx1[k], self.by0[k], self.by1[k], px, py, R)
        if t < 2:
            return t
        for j in range(self.kstart[k], self.kend[k]):
            t = self.box_test(self.qx0[j], self.qx1[j], self.qy0[j], self.qy1[j], px, py, R)
            if t == 1:
                return 1
            if t == 2:
                for p in range(self.pstart[j], self.pend[j]):
                    if self.dist(fabs(self.sx[p] - px), fabs(self.sy[p] - py)) <= R:
                        return 1
        return 0

    cdef inline double half_width(self, double dy, double R) noexcept nogil:
        if self.sup:
            return R
        return sqrt(R * R - dy * dy)

    cdef cnp.int64_t count(self, double px, double py, double R) noexcept nogil:
        cdef double r = self.r, s = self.slack
        cdef double blo, bhi, dymin, dymax, wo, wi
        cdef cnp.int64_t cy, lo_in, hi_in
        cdef cnp.int64_t total = 0
        cdef Py_ssize_t ri, a, b, ia, ib, k
        cdef cnp.int64_t cy_hi = _fhi((py + R) / r)
        ri = self.row_lower(_flo((py - R) / r))
        while ri < self.nrow and self.rcy[ri] <= cy_hi:
            cy = self.rcy[ri]
            blo = cy * r
            bhi = (cy + 1) * r
            dymin = blo - py
            if py - bhi > dymin:
                dymin = py - bhi
            dymin -= s
            if dymin < 0:
                dymin = 0
            if dymin > R:
                ri += 1
                continue
            wo = self.half_width(dymin, R) + s
            a = self.col_lower(ri, _flo((px - wo) / r))
            b = self.col_lower(ri, _fhi((px + wo) / r) + 1)
            dymax = fabs(py - blo)
            if fabs(bhi - py) > dymax:
                dymax = fabs(bhi - py)
            dymax += s
            ia = b
            ib = b
            if dymax <= R:
                wi = self.half_width(dymax, R)
                lo_in = _fhi((px - wi) / r) + 1
                hi_in = _flo((px + wi) / r) - 1
                if lo_in <= hi_in:
                    ia = self.col_lower(ri, lo_in)
                    ib = self.col_lower(ri, hi_in + 1)
                    total += ib - ia
            for k in range(a, ia):
                total += self.hit(k, px, py, R)
            for k in range(ib, b):
                total += self.hit(k, px, py, R)
            ri += 1
        return total

    cdef void bounds(self, double x0, double x1, double y0, double y1, double R,
                     cnp.int64_t *lb, cnp.int64_t *ub, cnp.int64_t *undecided,
                     Py_ssize_t *nund) noexcept nogil:
        """Count bounds valid for every center in the box [x0,x1] x [y0,y1].

        Cells strictly inside the band geometry count for both bounds. Fringe
        cells count toward the upper bound when their point box comes within
        R of the center box, and toward the lower bound when one of their
        first few points is within R of every corner of the center box. When
        ``undecided`` is given, the cells counted only in the upper bound are
        listed there, so count = lb + hits among them for any center in the box.
        """
        cdef double r = self.r, s = self.slack
        cdef double blo, bhi, dymin, dymax, wo, wi, dx, dy, ex, ey
        cdef cnp.int64_t cy, lo_c, hi_c
        cdef cnp.int64_t lower = 0, upper = 0
        cdef Py_ssize_t ri, a, b, ia, ib, k, p, pstop, m = 0
        cdef int sure
        cdef cnp.int64_t cy_hi = _fhi((y1 + R) / r)
        ri = self.row_lower(_flo((y0 - R) / r))
        while ri < self.nrow and self.rcy[ri] <= cy_hi:
            cy = self.rcy[ri]
            blo = cy * r
            bhi = (cy + 1) * r
            dymin = blo - y1
            if y0 - bhi > dymin:
                dymin = y0 - bhi
            dymin -= s
            if dymin < 0:
                dymin = 0
            if dymin > R:
                ri += 1
                continue
            wo = self.half_width(dymin, R) + s
            a = self.col_lower(ri, _flo((x0 - wo) / r))
            b = self.col_lower(ri, _fhi((x1 + wo) / r) + 1)
            ia = b
            ib = b
            dymax = bhi - y0
            if y1 - blo > dymax:
                dymax = y1 - blo
            dymax += s
            if dymax <= R:
                wi = self.half_width(dymax, R)
                lo_c = _fhi((x1 - wi) / r) + 1
                hi_c = _flo((x0 + wi) / r) - 1
                if lo_c <= hi_c:
                    ia = self.col_lower(ri, lo_c)
                    ib = self.col_lower(ri, hi_c + 1)
                    if ia < a:
                        ia = a
                    if ib < ia:
                        ib = ia
                    lower += ib - ia
                    upper += ib - ia
            for k in range(a, b):
                if ia <= k < ib:
                    continue
                dx = 0.0
                if self.bx0[k] > x1:
                    dx = self.bx0[k] - x1
                elif x0 > self.bx1[k]:
                    dx = x0 - self.bx1[k]
                dy = 0.0
                if self.by0[k] > y1:
                    dy = self.by0[k] - y1
                elif y0 > self.by1[k]:
                    dy = y0 - self.by1[k]
                if self.dist(dx, dy) > R:
                    continue
                upper += 1
                sure = 0
                pstop = self.cstart[k] + 4
                if pstop > self.cend[k]:
                    pstop = self.cend[k]
                for p in range(self.cstart[k], pstop):
                    ex = fabs(self.sx[p] - x0)
                    if fabs(self.sx[p] - x1) > ex:
                        ex = fabs(self.sx[p] - x1)
                    ey = fabs(self.sy[p] - y0)
                    if fabs(self.sy[p] - y1) > ey:
                        ey = fabs(self.sy[p] - y1)
                    if self.dist(ex, ey) <= R:
                        sure = 1
                        break
                if sure:
                    lower += 1
                elif undecided != NULL:
                    undecided[m] = k
                    m += 1
            ri += 1
        lb[0] = lower
        ub[0] = upper
        if nund != NULL:
            nund[0] = m


def local_count_2d(xs, ys, double px, double py, double R, double r, bint sup):
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    cdef _Grid g = _Grid(xs, ys, r, sup)
    return int(g.count(px, py, R))


def _morton(xs, ys, int bits):
    """Z-order keys of the points on a 2**bits grid over their bounding box."""
    span = max(float(xs.max() - xs.min()), float(ys.max() - ys.min()), 1e-300)
    scale = (2 ** bits - 1) / span
    ix = ((xs - xs.min()) * scale).astype(np.uint64)
    iy = ((ys - ys.min()) * scale).astype(np.uint64)
    key = np.zeros(len(xs), dtype=np.uint64)
    for b in range(bits):
        key |= ((ix >> np.uint64(b)) & np.uint64(1)) << np.uint64(2 * b)
        key |= ((iy >> np.uint64(b)) & np.uint64(1)) << np.uint64(2 * b + 1)
    return key.astype(np.int64)


cdef class _Tree:
    """Centers in Z-order; any quadtree node is a contiguous run."""

    cdef cnp.int64_t[::1] key, idx
    cdef double[::1] x, y

    def __init__(self, xs, ys, int bits):
        key = _morton(xs, ys, bits)
        order = np.lexsort((np.arange(len(xs)), key))
        self.key = key[order]
        self.idx = order.astype(np.int64)
        self.x = np.ascontiguousarray(xs[order])
        self.y = np.ascontiguousarray(ys[order])

    cdef Py_ssize_t lower(self, cnp.int64_t v) noexcept nogil:
        cdef Py_ssize_t a = 0, b = self.key.shape[0], m
        while a < b:
            m = (a + b) >> 1
            if self.key[m] < v:
                a = m + 1
            else:
                b = m
        return a

    cdef void box(self, Py_ssize_t lo, Py_ssize_t hi, double *out, cnp.int64_t *first) noexcept nogil:
        cdef Py_ssize_t p
        out[0] = self.x[lo]
        out[1] = self.x[lo]
        out[2] = self.y[lo]
        out[3] = self.y[lo]
        first[0] = self.idx[lo]
        for p in range(lo + 1, hi):
            if self.x[p] < out[0]:
                out[0] = self.x[p]
            if self.x[p] > out[1]:
                out[1] = self.x[p]
            if self.y[p] < out[2]:
                out[2] = self.y[p]
            if self.y[p] > out[3]:
                out[3] = self.y[p]
            if self.idx[p] < first[0]:
                first[0] = self.idx[p]


DEF LEAF = 24
DEF BITS = 21


def extreme_count_2d(xs, ys, double R, double r, bint sup, bint want_max, block_side=None):
    """Max (or min) over all centers of the local count, with the first index attaining it.

    Branch and bound over a quadtree of centers: every node carries count
    bounds valid for all of its centers, nodes are expanded best-bound first,
    and the search stops once no open node can beat the incumbent. A node
    that can only tie the incumbent is still opened when it holds an earlier
    serialized center, which keeps the witness rule exact.
    """
    import heapq
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    cdef _Grid g = _Grid(xs, ys, r, sup)
    cdef _Tree t = _Tree(xs, ys, BITS)
    cdef double bb[4]
    cdef cnp.int64_t first, lb, ub, c, best = -1, best_idx = -1, k0, k1, kq, step
    cdef Py_ssize_t lo, hi, p, q, qa, qb, j, nund = 0
    cdef cnp.int64_t[::1] und = np.empty(len(g.ccx) + 1, dtype=np.int64)
    cdef int level
    heap = []

    def push(Py_ssize_t a, Py_ssize_t b, cnp.int64_t klo, int lev):
        cdef double box[4]
        cdef cnp.int64_t f, l, u
        t.box(a, b, box, &f)
        g.bounds(box[0], box[1], box[2], box[3], R, &l, &u, NULL, NULL)
        heapq.heappush(heap, ((-u if want_max else l), f, a, b, klo, lev, l, u))

    push(0, len(xs), 0, 0)
    while heap:
        _, first, lo, hi, k0, level, lb, ub = heapq.heappop(heap)
        if best >= 0:
            if want_max and (ub < best or (ub == best and first > best_idx)):
                break
            if not want_max and (lb > best or (lb == best and first > best_idx)):
                break
        if lb == ub:
            c = lb
            if best < 0 or (want_max and c > best) or (not want_max and c < best) \
                    or (c == best and first < best_idx):
                best = c
                best_idx = first
            continue
        if hi - lo <= LEAF or level == BITS:
            with nogil:
                t.box(lo, hi, bb, &first)
                g.bounds(bb[0], bb[1], bb[2], bb[3], R, &lb, &ub, &und[0], &nund)
                for p in range(lo, hi):
                    q = t.idx[p]
                    # a center that can at best tie only matters if it comes earlier
                    if best >= 0 and q > best_idx and \
                            ((want_max and ub <= best) or (not want_max and lb >= best)):
                        continue
                    c = lb
                    for j in range(nund):
                        c += g.hit(und[j], t.x[p], t.y[p], R)
                    if best < 0 or (want_max and c > best) or (not want_max and c < best) \
                            or (c == best and q < best_idx):
                        best = c
                        best_idx = q
            continue
        step = (<cnp.int64_t>1) << (2 * (BITS - level - 1))
        qa = lo
        for kq in range(4):
            qb = t.lower(k0 + (kq + 1) * step) if kq < 3 else hi
            if qb > qa:
                push(qa, qb, k0 + kq * step, level + 1)
            qa = qb
    return int(best), int(best_idx)

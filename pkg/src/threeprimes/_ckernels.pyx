# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels (see _pykernels for the
fallback twins). Exact-arithmetic kernels return identical output to the
pure backend; float kernels use the same IEEE operation order."""

import numpy as np

from libc.math cimport sqrt

BACKEND = "compiled"


cdef inline unsigned long long _fold(unsigned long long window, int m):
    return (window & ((1ULL << m) - 1)) | (window >> m)


cdef inline double _dmin(double a, double b):
    return a if a < b else b


# --------------------------------------------------------------------------
# subset-triple coverage enumeration
# --------------------------------------------------------------------------

def _prep_subsets(residues, int m):
    cdef int phi = len(residues)
    if phi > 14 or m > 31:
        raise ValueError("exhaustive kernel supports phi <= 14 and m <= 31")
    n_sub = 1 << phi
    occ = np.zeros(n_sub, dtype=np.uint64)
    pop = np.zeros(n_sub, dtype=np.int32)
    res = np.asarray(residues, dtype=np.int32)
    cdef unsigned long long[::1] occ_v = occ
    cdef int[::1] pop_v = pop
    cdef int[::1] res_v = res
    cdef int s, low_idx
    cdef int n_sub_c = n_sub
    for s in range(1, n_sub_c):
        low_idx = (s & -s).bit_length() - 1
        occ_v[s] = occ_v[s & (s - 1)] | (1ULL << res_v[low_idx])
        pop_v[s] = pop_v[s & (s - 1)] + 1
    return occ, pop, res


def base_case_four_patterns(residues, int m, patterns):
    occ, pop, res = _prep_subsets(residues, m)
    cdef unsigned long long[::1] occ_v = occ
    cdef int[::1] res_v = res
    cdef int phi = len(residues)
    cdef int n_sub = 1 << phi
    cdef unsigned long long full = (1ULL << m) - 1
    by_size = [np.flatnonzero(pop == k).astype(np.int32) for k in range(phi + 1)]

    cdef unsigned long long window, s_ab, u
    cdef unsigned long long rot[32]
    cdef int t, ii, jj, kk, sa, sb, sc
    cdef long long checked = 0, cnt
    cdef int[::1] subs_a, subs_b, subs_c
    per_pattern = []
    failures = []
    for (na, nb, nc) in patterns:
        subs_a = by_size[na]
        subs_b = by_size[nb]
        subs_c = by_size[nc]
        cnt = 0
        for ii in range(subs_a.shape[0]):
            sa = subs_a[ii]
            for jj in range(subs_b.shape[0]):
                sb = subs_b[jj]
                window = 0
                for t in range(phi):
                    if (sb >> t) & 1:
                        window |= occ_v[sa] << res_v[t]
                s_ab = _fold(window, m)
                for t in range(phi):
                    rot[t] = _fold(s_ab << res_v[t], m)
                for kk in range(subs_c.shape[0]):
                    sc = subs_c[kk]
                    cnt += 1
                    u = 0
                    for t in range(phi):
                        if (sc >> t) & 1:
                            u |= rot[t]
                            if u == full:
                                break
                    if u != full:
                        failures.append((sa, sb, sc))
        per_pattern.append(int(cnt))
        checked += cnt
    return int(checked), per_pattern, failures


def base_case_all_triples(residues, int m, qual):
    occ, pop, res = _prep_subsets(residues, m)
    cdef unsigned long long[::1] occ_v = occ
    cdef int[::1] pop_v = pop
    cdef int[::1] res_v = res
    cdef int phi = len(residues)
    cdef int n_sub = 1 << phi
    cdef unsigned long long full = (1ULL << m) - 1
    qual_u8 = np.ascontiguousarray(qual, dtype=np.uint8)
    cdef const unsigned char[:, :, ::1] q = qual_u8
    # any_c[na*(phi+1)+nb]: does any size nc qualify
    any_c = np.zeros((phi + 1) * (phi + 1), dtype=np.uint8)
    cdef unsigned char[::1] any_v = any_c
    cdef int na, nb, nc
    for na in range(phi + 1):
        for nb in range(phi + 1):
            for nc in range(phi + 1):
                if q[na, nb, nc]:
                    any_v[na * (phi + 1) + nb] = 1
                    break

    cdef unsigned long long window, s_ab, u
    cdef unsigned long long rot[32]
    cdef int t, sa, sb, sc
    cdef long long checked = 0
    failures = []
    for sa in range(n_sub):
        na = pop_v[sa]
        for sb in range(n_sub):
            nb = pop_v[sb]
            if not any_v[na * (phi + 1) + nb]:
                continue
            window = 0
            for t in range(phi):
                if (sb >> t) & 1:
                    window |= occ_v[sa] << res_v[t]
            s_ab = _fold(window, m)
            for t in range(phi):
                rot[t] = _fold(s_ab << res_v[t], m)
            for sc in range(n_sub):
                if not q[na, nb, pop_v[sc]]:
                    continue
                checked += 1
                u = 0
                for t in range(phi):
                    if (sc >> t) & 1:
                        u |= rot[t]
                        if u == full:
                            break
                if u != full:
                    failures.append((sa, sb, sc))
    return int(checked), failures


# --------------------------------------------------------------------------
# randomized witness scans
# --------------------------------------------------------------------------

def witness_scan(int kind, residues, int m, long long g, ti, tj, tk, tgt, V):
    cdef const long long[:, ::1] v = V
    cdef const long long[::1] ti_v = ti
    cdef const long long[::1] tj_v = tj
    cdef const long long[::1] tk_v = tk
    cdef long long n_batch = v.shape[0]
    cdef int phi = v.shape[1]
    cdef long long n_tri = ti_v.shape[0]

    res = np.asarray(residues, dtype=np.int64)
    cdef const long long[::1] res_v = res
    # multiset ids grouped by target class
    order = np.argsort(np.asarray(tgt), kind="stable").astype(np.int64)
    cls_off = np.searchsorted(np.asarray(tgt)[order], np.arange(m + 1)).astype(np.int64)
    cdef const long long[::1] ord_v = order
    cdef const long long[::1] off_v = cls_off

    qual = np.zeros(n_batch, dtype=np.uint8)
    cdef unsigned char[::1] qual_v = qual
    failures = []

    cdef long long row, p, t, s_all, s1, s2, bound, va, vb, vc, s3, pq
    cdef int x, i, ok_row, found, n1, n2
    n1 = 0
    n2 = 0
    for i in range(phi):
        if res_v[i] % 3 == 1:
            n1 += 1
        elif res_v[i] % 3 == 2:
            n2 += 1

    for row in range(n_batch):
        # hypothesis filter, exact integers
        if kind == 1:
            s1 = 0
            s2 = 0
            ok_row = 1
            for i in range(phi):
                if v[row, i] <= 0:
                    ok_row = 0
                if res_v[i] % 3 == 1:
                    s1 += v[row, i]
                elif res_v[i] % 3 == 2:
                    s2 += v[row, i]
            bound = 3 * g * n1 * n2
            if not (4 * s1 * n2 + 2 * s2 * n1 > bound and 4 * s2 * n1 + 2 * s1 * n2 > bound):
                ok_row = 0
        else:
            s_all = 0
            for i in range(phi):
                s_all += v[row, i]
            ok_row = 1 if 8 * s_all > 5 * g * phi else 0
        if not ok_row:
            continue
        qual_v[row] = 1
        for x in range(m):
            found = 0
            for p in range(off_v[x], off_v[x + 1]):
                t = ord_v[p]
                va = v[row, ti_v[t]]
                vb = v[row, tj_v[t]]
                vc = v[row, tk_v[t]]
                s3 = va + vb + vc
                if kind == 0:
                    if 2 * s3 > 3 * g and va > 0 and vb > 0 and vc > 0:
                        found = 1
                        break
                elif kind == 1:
                    if 2 * s3 > 3 * g:
                        found = 1
                        break
                else:
                    pq = va * vb + vb * vc + vc * va
                    if 8 * pq > 5 * g * s3:
                        found = 1
                        break
            if not found:
                failures.append((int(row), x))
    return qual, failures


# --------------------------------------------------------------------------
# sequence-lemma search
# --------------------------------------------------------------------------

cdef int _sym_hyp_row(const double[:, ::1] a, long long r,
                      const long long[::1] ti, const long long[::1] tj,
                      const long long[::1] tk):
    cdef long long t
    cdef double ai, aj, ak, lhs, rhs
    for t in range(ti.shape[0]):
        ai = a[r, ti[t]]
        aj = a[r, tj[t]]
        ak = a[r, tk[t]]
        lhs = ai * aj + aj * ak + ak * ai
        rhs = 0.625 * (ai + aj + ak)
        if not (lhs <= rhs):
            return 0
    return 1


def sym_batch(a, ti, tj, tk, bint refine, t3, r_pu, r_po, r_su, r_sw, r_so):
    out = a.copy()
    cdef double[:, ::1] o = out
    cdef const long long[::1] ti_v = ti
    cdef const long long[::1] tj_v = tj
    cdef const long long[::1] tk_v = tk
    cdef const unsigned char[::1] t3_v = t3
    cdef const long long[::1] pu = r_pu
    cdef const long long[::1] po = r_po
    cdef const long long[::1] su = r_su
    cdef const long long[::1] sw = r_sw
    cdef const long long[::1] so = r_so
    cdef long long n_batch = o.shape[0]
    cdef int n = o.shape[1]
    hyp = np.zeros(n_batch, dtype=np.uint8)
    cdef unsigned char[::1] hyp_v = hyp

    cdef long long r, p, s
    cdef int t
    cdef double cap, au, aw, b, coef, c1, c2
    for r in range(n_batch):
        hyp_v[r] = _sym_hyp_row(o, r, ti_v, tj_v, tk_v)
    if not refine:
        return hyp, out
    for r in range(n_batch):
        if not hyp_v[r]:
            continue
        for t in range(n):
            cap = 1.0
            if t > 0:
                cap = _dmin(cap, o[r, t - 1])
            if t3_v[t]:
                cap = _dmin(cap, 0.625)
            for p in range(po[t], po[t + 1]):
                au = o[r, pu[p]]
                b = 2.0 * au - 1.25
                c2 = 0.5 * (sqrt(b * b + 2.5 * au) - b)
                cap = _dmin(cap, c2)
            for s in range(so[t], so[t + 1]):
                au = o[r, su[s]]
                aw = o[r, sw[s]]
                coef = au + aw - 0.625
                if coef > 0.0:
                    c1 = (0.625 * (au + aw) - au * aw) / coef
                    cap = _dmin(cap, c1)
            if cap > o[r, t]:
                o[r, t] = cap
        if hyp_v[r]:
            hyp_v[r] = _sym_hyp_row(o, r, ti_v, tj_v, tk_v)
    return hyp, out


cdef int _asym_hyp_row(const double[:, ::1] a, const double[:, ::1] b,
                       const double[:, ::1] c, long long r,
                       const long long[::1] ti, const long long[::1] tj,
                       const long long[::1] tk):
    cdef long long t
    cdef double ai, bj, ck, lhs, rhs
    for t in range(ti.shape[0]):
        ai = a[r, ti[t]]
        bj = b[r, tj[t]]
        ck = c[r, tk[t]]
        lhs = ai * bj + bj * ck + ck * ai
        rhs = 0.625 * (ai + bj + ck)
        if not (lhs <= rhs):
            return 0
    return 1


def asym_batch(a, b, c, ti, tj, tk, bint refine, p1, p2, offs):
    out_a = a.copy()
    out_b = b.copy()
    out_c = c.copy()
    cdef double[:, ::1] oa = out_a
    cdef double[:, ::1] ob = out_b
    cdef double[:, ::1] oc = out_c
    cdef const long long[::1] ti_v = ti
    cdef const long long[::1] tj_v = tj
    cdef const long long[::1] tk_v = tk
    cdef const long long[::1] p1_v = p1
    cdef const long long[::1] p2_v = p2
    cdef const long long[:, ::1] offs_v = offs
    cdef long long n_batch = oa.shape[0]
    cdef int n = oa.shape[1]
    hyp = np.zeros(n_batch, dtype=np.uint8)
    cdef unsigned char[::1] hyp_v = hyp

    cdef long long r, s
    cdef int role, t
    cdef double cap, au, aw, coef, c1
    cdef double[:, ::1] cur, o1, o2
    for r in range(n_batch):
        hyp_v[r] = _asym_hyp_row(oa, ob, oc, r, ti_v, tj_v, tk_v)
    if not refine:
        return hyp, out_a, out_b, out_c
    for r in range(n_batch):
        if not hyp_v[r]:
            continue
        for role in range(3):
            if role == 0:
                cur = oa
                o1 = ob
                o2 = oc
            elif role == 1:
                cur = ob
                o1 = oc
                o2 = oa
            else:
                cur = oc
                o1 = oa
                o2 = ob
            for t in range(n):
                cap = 1.0
                if t > 0:
                    cap = _dmin(cap, cur[r, t - 1])
                for s in range(offs_v[role, t], offs_v[role, t + 1]):
                    au = o1[r, p1_v[s]]
                    aw = o2[r, p2_v[s]]
                    coef = au + aw - 0.625
                    if coef > 0.0:
                        c1 = (0.625 * (au + aw) - au * aw) / coef
                        cap = _dmin(cap, c1)
                if cap > cur[r, t]:
                    cur[r, t] = cap
        if hyp_v[r]:
            hyp_v[r] = _asym_hyp_row(oa, ob, oc, r, ti_v, tj_v, tk_v)
    return hyp, out_a, out_b, out_c


# --------------------------------------------------------------------------
# direct cyclic triple sum
# --------------------------------------------------------------------------

def triple_direct(a1, a2, a3, long long x):
    cdef const double[::1] v1 = a1
    cdef const double[::1] v2 = a2
    cdef const double[::1] v3 = a3
    cdef long long n = v1.shape[0]
    cdef long long y, z, w
    cdef double total = 0.0, inner, s1, av
    for y in range(n):
        s1 = v1[y]
        if s1 == 0.0:
            continue
        inner = 0.0
        w = (x - y) % n
        if w < 0:
            w += n
        for z in range(n):
            av = v2[z]
            if av != 0.0:
                inner += av * v3[w]
            w -= 1
            if w < 0:
                w += n
        total += s1 * inner
    return total

"""Pure-Python/numpy implementations of the hot kernels.

Same signatures as the compiled module `_ckernels`; `kernels.py` selects a
backend at import time. The subset-enumeration kernels here use big-integer
bitsets over the space of subsets (one 2^phi-bit integer per coverage
question) instead of the compiled module's flat triple loop, so the two
backends cross-validate each other with genuinely different strategies.

Exact-arithmetic kernels (base case, witness scan) produce identical output
on both backends. Float kernels (sequence search, direct triple sum) use
the same IEEE operation order so results agree to the last few ulps.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


# --------------------------------------------------------------------------
# subset-triple coverage enumeration
# --------------------------------------------------------------------------

def _fold(window: int, m: int) -> int:
    """Reduce a 2m-bit shift window to an m-bit occupancy mask mod m."""
    return (window & ((1 << m) - 1)) | (window >> m)


def _occupancy_table(residues, m):
    """Occupancy mask over Z_m for every subset index of the residue list."""
    phi = len(residues)
    occ = [0] * (1 << phi)
    for s in range(1, 1 << phi):
        low = s & -s
        occ[s] = occ[s ^ low] | (1 << residues[low.bit_length() - 1])
    return occ


def _pair_sum(occ_a: int, occ_b: int, m: int) -> int:
    acc = 0
    b = occ_b
    while b:
        low = b & -b
        acc |= occ_a << (low.bit_length() - 1)
        b ^= low
    return _fold(acc, m)


def _cover_bitset(s_mask: int, residues, m: int, full: int) -> int:
    """Bitset over subset indices c: bit c set iff s_mask + C_c covers Z_m."""
    phi = len(residues)
    rot = [_fold(s_mask << r, m) for r in residues]
    n_sub = 1 << phi
    acc = [0] * n_sub
    bits = 0
    for c in range(1, n_sub):
        low = c & -c
        acc[c] = acc[c ^ low] | rot[low.bit_length() - 1]
        if acc[c] == full:
            bits |= 1 << c
    return bits


def _subsets_by_size(phi):
    by_size = [[] for _ in range(phi + 1)]
    for s in range(1 << phi):
        by_size[s.bit_count()].append(s)
    size_bits = [0] * (phi + 1)
    for k in range(phi + 1):
        for s in by_size[k]:
            size_bits[k] |= 1 << s
    return by_size, size_bits


def base_case_four_patterns(residues, m, patterns):
    """Enumerate ordered (A,B,C) with |A|,|B|,|C| equal to each size pattern
    and test A+B+C = Z_m. Returns (checked, per-pattern counts, failures);
    failures are (sa, sb, sc) subset indices into the residue list."""
    occ = _occupancy_table(residues, m)
    full = (1 << m) - 1
    by_size, size_bits = _subsets_by_size(len(residues))
    cover_cache: dict[int, int] = {}
    checked = 0
    per_pattern = []
    failures = []
    for (na, nb, nc) in patterns:
        want = size_bits[nc]
        n_want = len(by_size[nc])
        cnt = 0
        for sa in by_size[na]:
            occ_a = occ[sa]
            for sb in by_size[nb]:
                s_ab = _pair_sum(occ_a, occ[sb], m)
                cov = cover_cache.get(s_ab)
                if cov is None:
                    cov = _cover_bitset(s_ab, residues, m, full)
                    cover_cache[s_ab] = cov
                cnt += n_want
                bad = want & ~cov
                while bad:
                    low = bad & -bad
                    failures.append((sa, sb, low.bit_length() - 1))
                    bad ^= low
        per_pattern.append(cnt)
        checked += cnt
    return checked, per_pattern, failures


def base_case_all_triples(residues, m, qual):
    """Check coverage for every subset triple whose size triple qualifies
    under qual[na, nb, nc]. Returns (checked, failures)."""
    phi = len(residues)
    occ = _occupancy_table(residues, m)
    full = (1 << m) - 1
    n_sub = 1 << phi
    by_size, size_bits = _subsets_by_size(phi)
    qual_bits = [[0] * (phi + 1) for _ in range(phi + 1)]
    qual_counts = [[0] * (phi + 1) for _ in range(phi + 1)]
    for na in range(phi + 1):
        for nb in range(phi + 1):
            bits = 0
            cnt = 0
            for nc in range(phi + 1):
                if qual[na, nb, nc]:
                    bits |= size_bits[nc]
                    cnt += len(by_size[nc])
            qual_bits[na][nb] = bits
            qual_counts[na][nb] = cnt
    pop = [s.bit_count() for s in range(n_sub)]
    cover_cache: dict[int, int] = {}
    checked = 0
    failures = []
    for sa in range(n_sub):
        occ_a = occ[sa]
        na = pop[sa]
        row_bits = qual_bits[na]
        row_counts = qual_counts[na]
        for sb in range(n_sub):
            q = row_bits[pop[sb]]
            if not q:
                continue
            s_ab = _pair_sum(occ_a, occ[sb], m)
            cov = cover_cache.get(s_ab)
            if cov is None:
                cov = _cover_bitset(s_ab, residues, m, full)
                cover_cache[s_ab] = cov
            checked += row_counts[pop[sb]]
            bad = q & ~cov
            while bad:
                low = bad & -bad
                failures.append((sa, sb, low.bit_length() - 1))
                bad ^= low
    return checked, failures


# --------------------------------------------------------------------------
# randomized witness scans (grid-rational weight functions, exact ints)
# --------------------------------------------------------------------------

def witness_scan(kind, residues, m, g, ti, tj, tk, tgt, V):
    """Scan a batch of grid weight functions for witness failures.

    kind 0: average > 5/8, witness needs positivity and sum > 3/2;
    kind 1: mod-3 class conditions 2*alpha_1+alpha_2 > 3/2 (both ways) and
            strictly positive values, witness needs sum > 3/2;
    kind 2: average > 5/8, witness needs the 5/8-quadratic inequality.

    V is a (B, phi) int64 array of grid numerators in [0, g]. All
    comparisons are exact integer arithmetic. Returns (qualifying uint8
    array, failures as (row, target) pairs).
    """
    res = np.asarray(residues, dtype=np.int64)
    phi = res.size
    n_batch = V.shape[0]
    v_sum = V.sum(axis=1)
    if kind == 1:
        c1 = res % 3 == 1
        c2 = res % 3 == 2
        n1 = int(c1.sum())
        n2 = int(c2.sum())
        s1 = V[:, c1].sum(axis=1)
        s2 = V[:, c2].sum(axis=1)
        bound = 3 * g * n1 * n2
        qual = (
            (4 * s1 * n2 + 2 * s2 * n1 > bound)
            & (4 * s2 * n1 + 2 * s1 * n2 > bound)
            & (V > 0).all(axis=1)
        )
    else:
        qual = 8 * v_sum > 5 * g * phi

    vi = V[:, ti]
    vj = V[:, tj]
    vk = V[:, tk]
    s3 = vi + vj + vk
    if kind == 0:
        ok = (2 * s3 > 3 * g) & (vi > 0) & (vj > 0) & (vk > 0)
    elif kind == 1:
        ok = 2 * s3 > 3 * g
    else:
        pq = vi * vj + vj * vk + vk * vi
        ok = 8 * pq > 5 * g * s3

    failures = []
    for x in range(m):
        cols = np.nonzero(tgt == x)[0]
        if cols.size:
            hit = ok[:, cols].any(axis=1)
        else:
            hit = np.zeros(n_batch, dtype=bool)
        for row in np.nonzero(qual & ~hit)[0]:
            failures.append((int(row), x))
    return qual.astype(np.uint8), failures


# --------------------------------------------------------------------------
# sequence-lemma search
# --------------------------------------------------------------------------

def _sym_hyp(a, ti, tj, tk):
    ai = a[:, ti]
    aj = a[:, tj]
    ak = a[:, tk]
    lhs = ai * aj + aj * ak + ak * ai
    rhs = 0.625 * (ai + aj + ak)
    return (lhs <= rhs).all(axis=1)


def _asym_hyp(a, b, c, ti, tj, tk):
    ai = a[:, ti]
    bj = b[:, tj]
    ck = c[:, tk]
    lhs = ai * bj + bj * ck + ck * ai
    rhs = 0.625 * (ai + bj + ck)
    return (lhs <= rhs).all(axis=1)


def _linear_cap(au, aw):
    """Max value v allowed by v*au + au*aw + aw*v <= (5/8)(v+au+aw); +inf
    when the constraint cannot bind from above."""
    coef = au + aw - 0.625
    rhs = 0.625 * (au + aw) - au * aw
    with np.errstate(divide="ignore", invalid="ignore"):
        cap = rhs / coef
    return np.where(coef > 0.0, cap, np.inf)


def sym_batch(a, ti, tj, tk, refine, r_t3, r_pu, r_po, r_su, r_sw, r_so):
    """Hypothesis-check (and optionally boundary-refine) a batch of sorted
    sequences. Returns (hypothesis uint8 (B,), output array (B, n))."""
    out = a.copy()
    hyp0 = _sym_hyp(out, ti, tj, tk)
    if not refine:
        return hyp0.astype(np.uint8), out
    rows = np.nonzero(hyp0)[0]
    if rows.size:
        sub = out[rows]
        n = a.shape[1]
        for t in range(n):
            caps = np.full(sub.shape[0], 1.0)
            if t > 0:
                caps = np.minimum(caps, sub[:, t - 1])
            if r_t3[t]:
                caps = np.minimum(caps, 0.625)
            p0, p1 = int(r_po[t]), int(r_po[t + 1])
            if p1 > p0:
                au = sub[:, r_pu[p0:p1]]
                b = 2.0 * au - 1.25
                cap2 = 0.5 * (np.sqrt(b * b + 2.5 * au) - b)
                caps = np.minimum(caps, cap2.min(axis=1))
            s0, s1 = int(r_so[t]), int(r_so[t + 1])
            if s1 > s0:
                cap1 = _linear_cap(sub[:, r_su[s0:s1]], sub[:, r_sw[s0:s1]])
                caps = np.minimum(caps, cap1.min(axis=1))
            sub[:, t] = np.maximum(sub[:, t], caps)
        out[rows] = sub
    hyp = _sym_hyp(out, ti, tj, tk) & hyp0
    return hyp.astype(np.uint8), out


def asym_batch(a, b, c, ti, tj, tk, refine, p1, p2, offs):
    """Asymmetric analogue of sym_batch over three sequence arrays.

    p1/p2 are flat partner-index arrays; the segment offs[role, t] to
    offs[role, t+1] lists, for coordinate t of that role, the partner pair
    indices of every constraint the coordinate appears in. Partner 1 lives
    in role+1 (mod 3) and partner 2 in role+2 (mod 3).
    """
    outs = [a.copy(), b.copy(), c.copy()]
    hyp0 = _asym_hyp(outs[0], outs[1], outs[2], ti, tj, tk)
    if not refine:
        return hyp0.astype(np.uint8), outs[0], outs[1], outs[2]
    rows = np.nonzero(hyp0)[0]
    if rows.size:
        subs = [o[rows] for o in outs]
        n = a.shape[1]
        for role in range(3):
            cur = subs[role]
            o1 = subs[(role + 1) % 3]
            o2 = subs[(role + 2) % 3]
            for t in range(n):
                caps = np.full(cur.shape[0], 1.0)
                if t > 0:
                    caps = np.minimum(caps, cur[:, t - 1])
                s0, s1 = int(offs[role, t]), int(offs[role, t + 1])
                if s1 > s0:
                    cap1 = _linear_cap(o1[:, p1[s0:s1]], o2[:, p2[s0:s1]])
                    caps = np.minimum(caps, cap1.min(axis=1))
                cur[:, t] = np.maximum(cur[:, t], caps)
        for o, s in zip(outs, subs):
            o[rows] = s
    hyp = _asym_hyp(outs[0], outs[1], outs[2], ti, tj, tk) & hyp0
    return hyp.astype(np.uint8), outs[0], outs[1], outs[2]


# --------------------------------------------------------------------------
# direct cyclic triple sum
# --------------------------------------------------------------------------

def triple_direct(a1, a2, a3, x):
    """sum_{y,z} a1(y) a2(z) a3(x-y-z mod N) without any Fourier step.

    Uses numpy's direct (quadratic-time) linear convolution, folded to the
    cyclic case, then one weighted gather."""
    n = a1.shape[0]
    lin = np.convolve(a2, a3)
    cyc = lin[:n].copy()
    cyc[: n - 1] += lin[n:]
    idx = (x - np.arange(n)) % n
    return float(np.dot(a1, cyc[idx]))

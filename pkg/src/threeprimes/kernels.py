"""Kernel backend selection and shared table construction.

The compiled Cython module `_ckernels` is preferred when it imported
cleanly; set THREEPRIMES_PURE=1 to force the numpy/big-integer fallback.
All index tables are built here (cached per argument) so both backends
consume byte-identical inputs.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

HAVE_COMPILED = _ckernels is not None
_FORCE_PURE = os.environ.get("THREEPRIMES_PURE", "") not in ("", "0")
_selected = _pykernels if (_ckernels is None or _FORCE_PURE) else _ckernels
BACKEND = _selected.BACKEND


def get_backend(name: str | None = None):
    if name is None:
        return _selected
    if name == "pure":
        return _pykernels
    if name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available")
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def size_qualifies(na: int, nb: int, nc: int) -> bool:
    """The size-triple inequality n1*n2 + n2*n3 + n3*n1 > 5(n1+n2+n3)."""
    return na * nb + nb * nc + nc * na > 5 * (na + nb + nc)


@lru_cache(maxsize=None)
def qual_table(phi: int) -> np.ndarray:
    """qual[na, nb, nc] over sizes 0..phi, built from the per-coordinate
    threshold (the condition is monotone in each size) and asserted against
    direct evaluation."""
    q = np.zeros((phi + 1,) * 3, dtype=np.uint8)
    for na in range(phi + 1):
        for nb in range(phi + 1):
            if na + nb <= 5:
                # nc*(na+nb-5) <= 0 and na*nb < 5(na+nb) here: nothing qualifies
                assert not any(size_qualifies(na, nb, nc) for nc in range(phi + 1))
                continue
            num = 5 * (na + nb) - na * nb
            den = na + nb - 5
            min_nc = max(0, num // den + 1)
            for nc in range(phi + 1):
                q[na, nb, nc] = nc >= min_nc
                assert bool(q[na, nb, nc]) == size_qualifies(na, nb, nc)
    return q


# --------------------------------------------------------------------------
# base case
# --------------------------------------------------------------------------

def base_case_four_patterns(residues, m, patterns, backend=None):
    be = get_backend(backend)
    return be.base_case_four_patterns(tuple(residues), m, tuple(patterns))


def base_case_all_triples(residues, m, backend=None):
    be = get_backend(backend)
    return be.base_case_all_triples(tuple(residues), m, qual_table(len(residues)))


# --------------------------------------------------------------------------
# witness scans
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def witness_tables(residues: tuple[int, ...], m: int):
    """Index multisets i <= j <= k over the residue list, with the mod-m
    target of each multiset's residue sum."""
    phi = len(residues)
    ti, tj, tk, tgt = [], [], [], []
    for i in range(phi):
        for j in range(i, phi):
            for k in range(j, phi):
                ti.append(i)
                tj.append(j)
                tk.append(k)
                tgt.append((residues[i] + residues[j] + residues[k]) % m)
    as_arr = lambda xs: np.asarray(xs, dtype=np.int64)
    return as_arr(ti), as_arr(tj), as_arr(tk), as_arr(tgt)


KIND_CODES = {"main": 0, "main2": 1, "prop58": 2}


def witness_scan(kind: str, residues, m, g, V, backend=None):
    """Run a batch of sampled grid weight functions through the witness
    search for one of the three local propositions."""
    be = get_backend(backend)
    ti, tj, tk, tgt = witness_tables(tuple(residues), m)
    V = np.ascontiguousarray(V, dtype=np.int64)
    return be.witness_scan(KIND_CODES[kind], tuple(residues), m, g, ti, tj, tk, tgt, V)


# --------------------------------------------------------------------------
# sequence search
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def sym_tables(n: int):
    """Canonical index multisets i <= j <= k with i+j+k >= n, plus the
    per-coordinate refine tables (triple flag, twice-partners, once-partner
    pairs, as flat arrays with offsets)."""
    ti, tj, tk = [], [], []
    t3 = np.zeros(n, dtype=np.uint8)
    pairs = [[] for _ in range(n)]    # coordinate appears twice: partner u
    singles = [[] for _ in range(n)]  # coordinate appears once: partners (u, w)
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                if i + j + k < n:
                    continue
                ti.append(i)
                tj.append(j)
                tk.append(k)
                if i == j == k:
                    t3[i] = 1
                elif i == j:
                    pairs[i].append(k)
                    singles[k].append((i, i))
                elif j == k:
                    pairs[j].append(i)
                    singles[i].append((j, j))
                else:
                    singles[i].append((j, k))
                    singles[j].append((i, k))
                    singles[k].append((i, j))
    r_pu, r_po = _flatten_single(pairs, n)
    r_su, r_sw, r_so = _flatten_pairs(singles, n)
    as_arr = lambda xs: np.asarray(xs, dtype=np.int64)
    return as_arr(ti), as_arr(tj), as_arr(tk), t3, r_pu, r_po, r_su, r_sw, r_so


def _flatten_single(buckets, n):
    flat = []
    offs = np.zeros(n + 1, dtype=np.int64)
    for t in range(n):
        flat.extend(buckets[t])
        offs[t + 1] = len(flat)
    return np.asarray(flat, dtype=np.int64), offs


def _flatten_pairs(buckets, n):
    u, w = [], []
    offs = np.zeros(n + 1, dtype=np.int64)
    for t in range(n):
        for a, b in buckets[t]:
            u.append(a)
            w.append(b)
        offs[t + 1] = len(u)
    return np.asarray(u, dtype=np.int64), np.asarray(w, dtype=np.int64), offs


@lru_cache(maxsize=None)
def asym_tables(n: int):
    """Ordered index triples with i+j+k >= n, plus per-role refine tables.
    For role r coordinate t, the flat segment offs[r, t]:offs[r, t+1] lists
    partner pairs living in roles r+1 and r+2 (mod 3)."""
    ti, tj, tk = [], [], []
    buckets = [[[] for _ in range(n)] for _ in range(3)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if i + j + k < n:
                    continue
                ti.append(i)
                tj.append(j)
                tk.append(k)
                buckets[0][i].append((j, k))  # partners in roles b, c
                buckets[1][j].append((k, i))  # partners in roles c, a
                buckets[2][k].append((i, j))  # partners in roles a, b
    p1, p2 = [], []
    offs = np.zeros((3, n + 1), dtype=np.int64)
    for role in range(3):
        for t in range(n):
            for u, w in buckets[role][t]:
                p1.append(u)
                p2.append(w)
            offs[role, t + 1] = len(p1)
        if role < 2:
            offs[role + 1, 0] = len(p1)
    as_arr = lambda xs: np.asarray(xs, dtype=np.int64)
    return as_arr(ti), as_arr(tj), as_arr(tk), as_arr(p1), as_arr(p2), offs


def sym_batch(a, refine, backend=None):
    be = get_backend(backend)
    n = a.shape[1]
    ti, tj, tk, t3, r_pu, r_po, r_su, r_sw, r_so = sym_tables(n)
    a = np.ascontiguousarray(a, dtype=np.float64)
    return be.sym_batch(a, ti, tj, tk, bool(refine), t3, r_pu, r_po, r_su, r_sw, r_so)


def asym_batch(a, b, c, refine, backend=None):
    be = get_backend(backend)
    n = a.shape[1]
    ti, tj, tk, p1, p2, offs = asym_tables(n)
    arrs = [np.ascontiguousarray(x, dtype=np.float64) for x in (a, b, c)]
    return be.asym_batch(arrs[0], arrs[1], arrs[2], ti, tj, tk, bool(refine), p1, p2, offs)


# --------------------------------------------------------------------------
# direct triple sum
# --------------------------------------------------------------------------

def triple_direct(a1, a2, a3, x, backend=None):
    be = get_backend(backend)
    arrs = [np.ascontiguousarray(v, dtype=np.float64) for v in (a1, a2, a3)]
    n = arrs[0].shape[0]
    return be.triple_direct(arrs[0], arrs[1], arrs[2], int(x) % n)

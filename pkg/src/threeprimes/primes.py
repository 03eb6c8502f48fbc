"""Sieve-backed prime data, congruence-filtered subsets, and exact
ternary-representation counting.

Counts are certificates, not estimates: the fast path cubes a real FFT of
the 0/1 indicator and aborts if any rounded coefficient strays by more
than 0.25 from an integer; the direct path convolves int64 indicators
with numpy's quadratic-time convolution (exact integer arithmetic).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.fft

from .errors import DomainError, PrecisionError

FFT_RESIDUAL_LIMIT = 0.25
DIRECT_CUTOFF = 4096


@dataclass(frozen=True)
class PrimeWindow:
    """All primes up to limit: sorted array plus 0/1 indicator."""

    limit: int
    primes: np.ndarray
    indicator: np.ndarray

    def __contains__(self, p: int) -> bool:
        return 0 <= p <= self.limit and bool(self.indicator[p])

    def count_upto(self, n: int) -> int:
        if n > self.limit:
            raise DomainError(f"{n} exceeds the sieve limit {self.limit}")
        return int(self.indicator[: n + 1].sum())


def sieve(limit: int, segment_size: int = 1 << 20) -> PrimeWindow:
    """Segmented sieve of Eratosthenes up to limit inclusive."""
    if limit < 2:
        raise DomainError(f"sieve limit must be at least 2, got {limit}")
    root = math.isqrt(limit)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if base[p]:
            base[p * p :: p] = False
    base_primes = np.flatnonzero(base)

    indicator = np.ones(limit + 1, dtype=bool)
    indicator[:2] = False
    for lo in range(2, limit + 1, segment_size):
        hi = min(lo + segment_size, limit + 1)
        for p in base_primes:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                indicator[start:hi:p] = False
    primes = np.flatnonzero(indicator).astype(np.int64)
    return PrimeWindow(limit=limit, primes=primes, indicator=indicator)


@dataclass(frozen=True)
class PrimeSubset:
    """Primes of a window filtered by residue classes mod m, minus an
    explicit exclusion list."""

    base: PrimeWindow
    modulus: int | None = None
    allowed: frozenset = frozenset()
    excluded: frozenset = frozenset()

    def __post_init__(self):
        if self.modulus is not None:
            object.__setattr__(
                self, "allowed", frozenset(r % self.modulus for r in self.allowed)
            )
        object.__setattr__(self, "excluded", frozenset(self.excluded))

    @classmethod
    def all_primes(cls, window: PrimeWindow) -> "PrimeSubset":
        return cls(base=window)

    @classmethod
    def residue_class(cls, window: PrimeWindow, modulus: int, allowed) -> "PrimeSubset":
        return cls(base=window, modulus=modulus, allowed=frozenset(allowed))

    def label(self) -> str:
        parts = []
        if self.modulus is not None:
            parts.append(f"{self.modulus}:{','.join(map(str, sorted(self.allowed)))}")
        else:
            parts.append("all")
        if self.excluded:
            parts.append(f"minus {sorted(self.excluded)}")
        return " ".join(parts)

    def __contains__(self, p: int) -> bool:
        if p not in self.base or p in self.excluded:
            return False
        if self.modulus is not None and p % self.modulus not in self.allowed:
            return False
        return True

    def indicator_upto(self, n: int) -> np.ndarray:
        if n > self.base.limit:
            raise DomainError(f"{n} exceeds the sieve limit {self.base.limit}")
        ind = self.base.indicator[: n + 1].copy()
        if self.modulus is not None:
            residues = np.arange(n + 1) % self.modulus
            keep = np.isin(residues, sorted(self.allowed))
            ind &= keep
        for p in self.excluded:
            if 0 <= p <= n:
                ind[p] = False
        return ind

    def elements_upto(self, n: int) -> np.ndarray:
        return np.flatnonzero(self.indicator_upto(n)).astype(np.int64)

    def count_upto(self, n: int) -> int:
        return int(self.indicator_upto(n).sum())


def lower_density_estimate(
    a: PrimeSubset, n: int, b: int | None = None, w: int | None = None
) -> Fraction:
    """|A cap [1, N]| / |P cap [1, N]| at finite N; with (b, w) given, both
    counts are restricted to the residue class b mod w."""
    if n > a.base.limit:
        raise DomainError(f"{n} exceeds the sieve limit {a.base.limit}")
    num_ind = a.indicator_upto(n)
    den_ind = a.base.indicator[: n + 1]
    if b is not None:
        if w is None or w < 1:
            raise DomainError("class filter needs both b and w >= 1")
        cls = np.arange(n + 1) % w == b % w
        num = int((num_ind & cls).sum())
        den = int((den_ind & cls).sum())
    else:
        num = int(num_ind.sum())
        den = int(den_ind.sum())
    if den == 0:
        return Fraction(0)
    return Fraction(num, den)


# --------------------------------------------------------------------------
# representation counting
# --------------------------------------------------------------------------

def _counts_fft(ind: np.ndarray) -> np.ndarray:
    """Exact integer triple-convolution of a 0/1 indicator via real FFT,
    with a rounding-residual certificate."""
    t = ind.shape[0]
    length = scipy.fft.next_fast_len(3 * t - 2, real=True)
    spec = scipy.fft.rfft(ind.astype(np.float64), n=length)
    conv = scipy.fft.irfft(spec * spec * spec, n=length)[: 3 * t - 2]
    rounded = np.rint(conv)
    residual = float(np.abs(conv - rounded).max())
    if residual > FFT_RESIDUAL_LIMIT:
        raise PrecisionError(
            f"FFT convolution residual {residual:.3g} exceeds {FFT_RESIDUAL_LIMIT}"
        )
    return rounded.astype(np.int64)


def _counts_direct(ind: np.ndarray) -> np.ndarray:
    """Quadratic-time integer convolution; exact, no rounding involved."""
    v = ind.astype(np.int64)
    c2 = np.convolve(v, v)
    return np.convolve(c2, v)


def representation_counts(
    a: PrimeSubset, n_range: tuple[int, int], method: str = "auto"
) -> dict[int, int]:
    """Ordered-triple counts #{(p1,p2,p3) in A^3 : p1+p2+p3 = n} for each
    odd n in [n0, n1]. Unordered counts are derivable by orbit size: an
    ordered count is 6*(distinct multisets) + 3*(two-equal) + (all-equal)."""
    n0, n1 = n_range
    if n1 > 3 * a.base.limit:
        raise DomainError(f"range end {n1} exceeds 3 * sieve limit")
    if n0 > n1:
        raise DomainError("empty range")
    top = min(n1, a.base.limit)
    ind = a.indicator_upto(top)
    if method == "auto":
        method = "direct" if n1 <= DIRECT_CUTOFF else "fft"
    if method == "fft":
        conv = _counts_fft(ind)
    elif method == "direct":
        conv = _counts_direct(ind)
    else:
        raise DomainError(f"unknown method {method!r}")
    out = {}
    for n in range(n0 if n0 % 2 else n0 + 1, n1 + 1, 2):
        out[n] = int(conv[n]) if n < conv.shape[0] else 0
    return out


@dataclass
class ScanReport:
    subset: str
    n_range: tuple[int, int]
    counts: dict[int, int] = field(default_factory=dict)
    misses: list[int] = field(default_factory=list)
    min_count: int = 0
    median_count: float = 0.0

    @property
    def coverage_complete(self) -> bool:
        return not self.misses

    def rows(self):
        """CSV rows: n, count, miss flag."""
        for n, c in self.counts.items():
            yield n, c, int(c == 0)


def coverage_scan(a: PrimeSubset, n_range: tuple[int, int], method: str = "auto") -> ScanReport:
    """List every odd n in range with zero ordered representations and
    summarize the counts."""
    counts = representation_counts(a, n_range, method=method)
    values = np.fromiter(counts.values(), dtype=np.int64, count=len(counts))
    return ScanReport(
        subset=a.label(),
        n_range=n_range,
        counts=counts,
        misses=[n for n, c in counts.items() if c == 0],
        min_count=int(values.min()) if values.size else 0,
        median_count=float(np.median(values)) if values.size else 0.0,
    )

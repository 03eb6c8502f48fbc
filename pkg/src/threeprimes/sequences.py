"""Sequence-lemma laboratory: exact hypothesis/conclusion checkers, the
affine change of variables to x-space, and randomized counterexample
search with greedy boundary refinement.

Checkers run on exact rationals (floats convert losslessly to Fraction);
the random search proposes and refines in float and re-verifies any hit
exactly before reporting it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import DomainError

FIVE_EIGHTHS = Fraction(5, 8)
SIXTEEN_FIFTHS = Fraction(16, 5)


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class MonotoneSequence:
    """Nonincreasing values in [0, 1], held as exact rationals."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(_exact(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        for v in vals:
            if not (0 <= v <= 1):
                raise DomainError(f"value {v} outside [0, 1]")
        for i in range(len(vals) - 1):
            if vals[i] < vals[i + 1]:
                raise DomainError("values must be nonincreasing")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def mean(self) -> Fraction:
        return Fraction(sum(self.values), len(self.values))

    def scaled(self, t) -> "MonotoneSequence":
        t = _exact(t)
        return MonotoneSequence(tuple(t * v for v in self.values))


@dataclass(frozen=True)
class XSequence:
    """Nonincreasing values in [-1, 11/5]: the image of a MonotoneSequence
    under x = (16/5) a - 1."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(_exact(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        for v in vals:
            if not (-1 <= v <= Fraction(11, 5)):
                raise DomainError(f"value {v} outside [-1, 11/5]")
        for i in range(len(vals) - 1):
            if vals[i] < vals[i + 1]:
                raise DomainError("values must be nonincreasing")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def _require_even(n: int):
    if n < 4 or n % 2:
        raise DomainError(f"length must be even and at least 4, got {n}")


def _index_multisets(n: int):
    """Index multisets i <= j <= k with i+j+k >= n; both lemma inequalities
    are symmetric polynomials of the chosen values, so multisets cover all
    ordered triples."""
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                if i + j + k >= n:
                    yield i, j, k


def sym_hypothesis(a: MonotoneSequence) -> bool:
    """a_i a_j + a_j a_k + a_k a_i <= (5/8)(a_i + a_j + a_k) for every index
    triple with i+j+k >= n."""
    n = len(a)
    _require_even(n)
    for i, j, k in _index_multisets(n):
        x, y, z = a[i], a[j], a[k]
        if x * y + y * z + z * x > FIVE_EIGHTHS * (x + y + z):
            return False
    return True


def sym_conclusion(a: MonotoneSequence) -> bool:
    """mean(a) <= 5/8 (boundary included)."""
    return a.mean() <= FIVE_EIGHTHS


def asym_hypothesis(a: MonotoneSequence, b: MonotoneSequence, c: MonotoneSequence) -> bool:
    """a_i b_j + b_j c_k + c_k a_i <= (5/8)(a_i + b_j + c_k) over ordered
    index triples with i+j+k >= n."""
    n = len(a)
    _require_even(n)
    if len(b) != n or len(c) != n:
        raise DomainError("sequences must have equal length")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if i + j + k < n:
                    continue
                x, y, z = a[i], b[j], c[k]
                if x * y + y * z + z * x > FIVE_EIGHTHS * (x + y + z):
                    return False
    return True


def asym_conclusion(a: MonotoneSequence, b: MonotoneSequence, c: MonotoneSequence) -> bool:
    """AB + BC + CA <= (5/8)(A + B + C) on the averages."""
    x, y, z = a.mean(), b.mean(), c.mean()
    return x * y + y * z + z * x <= FIVE_EIGHTHS * (x + y + z)


def to_x_space(a: MonotoneSequence, verify: bool = False) -> XSequence:
    """Elementwise x_i = (16/5) a_i - 1. With verify=True, asserts for every
    qualifying index triple that the a-space inequality holds exactly iff
    x_i x_j + x_j x_k + x_k x_i <= 3."""
    xs = XSequence(tuple(SIXTEEN_FIFTHS * v - 1 for v in a.values))
    if verify:
        n = len(a)
        for i, j, k in _index_multisets(n):
            av = (a[i], a[j], a[k])
            xv = (xs[i], xs[j], xs[k])
            a_ok = (
                av[0] * av[1] + av[1] * av[2] + av[2] * av[0]
                <= FIVE_EIGHTHS * (av[0] + av[1] + av[2])
            )
            x_ok = xv[0] * xv[1] + xv[1] * xv[2] + xv[2] * xv[0] <= 3
            assert a_ok == x_ok, (i, j, k, av, xv)
    return xs


# --------------------------------------------------------------------------
# counterexample search
# --------------------------------------------------------------------------

@dataclass
class Counterexample:
    n: int
    lemma: str
    sequences: tuple[MonotoneSequence, ...]
    conclusion_margin: Fraction
    trial: int
    seed: int

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "lemma": self.lemma,
            "values": [[str(v) for v in s.values] for s in self.sequences],
            "conclusion_margin": str(self.conclusion_margin),
            "trial": self.trial,
            "seed": self.seed,
        }


def _nudge_down(row: np.ndarray, steps: int) -> np.ndarray:
    out = row.copy()
    for _ in range(steps):
        out = np.nextafter(out, 0.0)
    return np.maximum(out, 0.0)


def _confirm_sym(row: np.ndarray) -> MonotoneSequence | None:
    """Exact re-check of a float candidate; refined values sit on the float
    constraint boundary, so retry with one-ulp downward nudges."""
    for steps in (0, 1, 2, 4):
        vals = _nudge_down(row, steps)
        seq = MonotoneSequence(tuple(Fraction(float(v)) for v in vals))
        if sym_hypothesis(seq) and not sym_conclusion(seq):
            return seq
    return None


def _confirm_asym(rows) -> tuple[MonotoneSequence, ...] | None:
    for steps in (0, 1, 2, 4):
        seqs = tuple(
            MonotoneSequence(tuple(Fraction(float(v)) for v in _nudge_down(r, steps)))
            for r in rows
        )
        if asym_hypothesis(*seqs) and not asym_conclusion(*seqs):
            return seqs
    return None


def search_counterexample(
    n: int,
    lemma: str = "sym",
    trials: int = 10_000,
    seed: int | None = None,
    refine: bool = True,
    backend: str | None = None,
    batch: int = 4096,
) -> Counterexample | None:
    """Random search for a hypothesis-satisfying sequence (triple) that
    violates the conclusion. Proposals are sorted uniforms; refine=True
    pushes each coordinate up to its binding constraint before testing.
    A hit is reported only after exact rational confirmation."""
    _require_even(n)
    if lemma not in ("sym", "asym"):
        raise DomainError(f"unknown lemma {lemma!r}")
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2**32))
    rng = np.random.default_rng(seed)
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        if lemma == "sym":
            u = np.sort(rng.random((b, n)))[:, ::-1].copy()
            hyp, out = kernels.sym_batch(u, refine, backend=backend)
            means = out.mean(axis=1)
            for row in np.nonzero(hyp.astype(bool) & (means > 0.625))[0]:
                seq = _confirm_sym(out[row])
                if seq is not None:
                    return Counterexample(
                        n, lemma, (seq,), seq.mean() - FIVE_EIGHTHS,
                        done + int(row), seed,
                    )
        else:
            u = np.sort(rng.random((b, 3, n)))[:, :, ::-1]
            ra, rb, rc = (u[:, t, :].copy() for t in range(3))
            hyp, oa, ob, oc = kernels.asym_batch(ra, rb, rc, refine, backend=backend)
            ma, mb, mc = oa.mean(axis=1), ob.mean(axis=1), oc.mean(axis=1)
            viol = ma * mb + mb * mc + mc * ma > 0.625 * (ma + mb + mc)
            for row in np.nonzero(hyp.astype(bool) & viol)[0]:
                seqs = _confirm_asym((oa[row], ob[row], oc[row]))
                if seqs is not None:
                    margin = (
                        seqs[0].mean() * seqs[1].mean()
                        + seqs[1].mean() * seqs[2].mean()
                        + seqs[2].mean() * seqs[0].mean()
                        - FIVE_EIGHTHS * (seqs[0].mean() + seqs[1].mean() + seqs[2].mean())
                    )
                    return Counterexample(
                        n, lemma, seqs, margin, done + int(row), seed
                    )
        done += b
    return None

"""Desk-scale transference laboratory over Z_N (N prime): Fourier
transforms with the positive-sign convention, W-trick majorants,
pseudorandomness diagnostics, Bohr-set smoothing decomposition, dual-path
triple-convolution counting, and the end-to-end pipeline.

Transform convention: hat(f)(r) = sum_x f(x) e_N(rx) with
e_N(y) = exp(2 pi i y / N). Inversion is f(x) = (1/N) sum_r hat(f)(r)
e_N(-rx) and convolution satisfies hat(f*g) = hat(f) hat(g). The dual-path
triple count guards the convention on every invocation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import DomainError, PrecisionError
from .primes import PrimeSubset, PrimeWindow, representation_counts
from .residues import WeightFunction, is_prime, units

DUAL_PATH_RTOL = 1e-9
SET_LIKE_FLAG_LEVEL = 1.5


@dataclass(frozen=True)
class TransferenceConfig:
    """Knobs of the transference run; W is derived from z."""

    delta: float = 0.1
    eps: float = 0.2
    q: float = 2.5
    z: int = 5
    kappa: float = 0.05

    def __post_init__(self):
        if not (0 < self.delta < 1 and 0 < self.eps < 1 and 0 < self.kappa < 1):
            raise DomainError("delta, eps, kappa must lie in (0, 1)")
        if not (2 < self.q < 3):
            raise DomainError(f"q must lie in (2, 3), got {self.q}")
        if self.z < 2:
            raise DomainError(f"z must be at least 2, got {self.z}")

    @property
    def w(self) -> int:
        w = 1
        for p in range(2, self.z + 1):
            if is_prime(p):
                w *= p
        return w


@dataclass(frozen=True)
class CyclicFunction:
    """Real function on Z_N, N prime."""

    modulus: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.modulus,):
            raise DomainError("value array must have length N")
        if not is_prime(self.modulus):
            raise DomainError(f"modulus must be prime, got {self.modulus}")

    def total(self) -> float:
        return float(self.values.sum())

    def dft(self) -> "Spectrum":
        return dft(self)

    @classmethod
    def uniform(cls, n: int) -> "CyclicFunction":
        return cls(n, np.full(n, 1.0 / n))


@dataclass
class Spectrum:
    """Fourier coefficients over Z_N with sup and l^q summaries."""

    modulus: int
    coefficients: np.ndarray
    sup_offzero: float = 0.0
    lq_norms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.coefficients.shape != (self.modulus,):
            raise DomainError("coefficient array must have length N")
        mags = np.abs(self.coefficients)
        self.sup_offzero = float(mags[1:].max()) if self.modulus > 1 else 0.0

    def lq_norm(self, q: float) -> float:
        key = float(q)
        if key not in self.lq_norms:
            mags = np.abs(self.coefficients)
            self.lq_norms[key] = float((mags**key).sum() ** (1.0 / key))
        return self.lq_norms[key]


def dft(f: CyclicFunction) -> Spectrum:
    """hat(f)(r) = sum_x f(x) e_N(rx); numpy's ifft carries the positive
    sign, so the transform is N * ifft."""
    coeffs = np.fft.ifft(f.values) * f.modulus
    spec = Spectrum(modulus=f.modulus, coefficients=coeffs)
    total = f.values.sum()
    scale = max(1.0, float(np.abs(total)))
    if abs(spec.coefficients[0] - total) > 1e-9 * scale:
        raise PrecisionError("DC coefficient disagrees with the value sum")
    energy_x = float((f.values**2).sum())
    energy_r = float((np.abs(coeffs) ** 2).sum() / f.modulus)
    if abs(energy_x - energy_r) > 1e-9 * max(1.0, energy_x):
        raise PrecisionError("Parseval identity violated beyond 1e-9")
    return spec


def inverse_dft(spec: Spectrum) -> CyclicFunction:
    """f(x) = (1/N) sum_r hat(f)(r) e_N(-rx); real input assumed."""
    vals = np.fft.fft(spec.coefficients) / spec.modulus
    return CyclicFunction(spec.modulus, vals.real)


def convolve(f: CyclicFunction, g: CyclicFunction) -> CyclicFunction:
    """Cyclic convolution f*g(x) = sum_y f(y) g(x-y)."""
    if f.modulus != g.modulus:
        raise DomainError("modulus mismatch")
    vals = np.fft.ifft(np.fft.fft(f.values) * np.fft.fft(g.values)).real
    return CyclicFunction(f.modulus, vals)


# --------------------------------------------------------------------------
# majorants
# --------------------------------------------------------------------------

def build_majorant(
    cfg: TransferenceConfig, b: int, n_cyclic: int, window: PrimeWindow
) -> CyclicFunction:
    """mu(x) = phi(W) log(Wx + b) / (W N) when Wx + b is prime, else 0."""
    w = cfg.w
    if math.gcd(b, w) != 1:
        raise DomainError(f"b = {b} is not a reduced residue mod W = {w}")
    if window.limit < w * n_cyclic + b:
        raise DomainError(
            f"sieve limit {window.limit} below W*N + b = {w * n_cyclic + b}"
        )
    phi_w = len(units(w)) if w > 1 else 1
    xs = np.arange(n_cyclic, dtype=np.int64)
    points = w * xs + b
    mask = window.indicator[points]
    vals = np.where(mask, np.log(points.astype(np.float64)), 0.0) * (
        phi_w / (w * n_cyclic)
    )
    return CyclicFunction(n_cyclic, vals)


@dataclass
class PseudorandomnessReport:
    z: int
    n: int
    measured_sup: float
    asymptotic_bound: float
    within_bound: bool
    verdict: str = "info"  # the bound is asymptotic; recorded, never asserted


def pseudorandomness_report(mu: CyclicFunction, cfg: TransferenceConfig) -> PseudorandomnessReport:
    measured = dft(mu).sup_offzero
    bound = 2.0 * math.log(math.log(cfg.z)) / cfg.z if cfg.z > 2 else float("-inf")
    return PseudorandomnessReport(
        z=cfg.z,
        n=mu.modulus,
        measured_sup=measured,
        asymptotic_bound=bound,
        within_bound=measured <= bound,
    )


def wtrick_density(
    a: PrimeSubset, cfg: TransferenceConfig, n: int, delta: float | None = None
) -> WeightFunction:
    """f(b) = max((3 phi(W) / 2n) sum_{x in A, x = b mod W, x < 2n/3} log x
    - delta/8, 0), clamped into [0, 1], for every reduced b mod W."""
    w = cfg.w
    d = cfg.delta if delta is None else delta
    top = (2 * n) // 3 if (2 * n) % 3 else (2 * n) // 3 - 1  # x < 2n/3 strictly
    if a.base.limit < top:
        raise DomainError(f"sieve limit {a.base.limit} below 2n/3 = {top}")
    els = a.elements_upto(top)
    logs = np.log(els.astype(np.float64)) if els.size else np.zeros(0)
    residues = els % w
    phi_w = len(units(w))
    values = {}
    for b in units(w):
        s = float(logs[residues == b].sum())
        val = 3.0 * phi_w / (2.0 * n) * s - d / 8.0
        val = min(max(val, 0.0), 1.0)
        values[b] = Fraction(val)
    return WeightFunction(w, values)


# --------------------------------------------------------------------------
# residue target selection
# --------------------------------------------------------------------------

@dataclass
class SelectionResult:
    found: bool
    triple: tuple[int, int, int] | None
    weight_sum: Fraction | None
    hypothesis_main: bool
    hypothesis_main2: bool
    message: str = ""


def residue_target_selection(f: WeightFunction, n: int) -> SelectionResult:
    """Search Z_W*^3 for b1 + b2 + b3 = n (mod W) with positive weights and
    weight sum > 3/2, in decreasing weight-sum order. A missing witness is
    an outcome, not an error."""
    w = f.modulus
    res = f.residues()
    hyp_main = f.average() > Fraction(5, 8)
    hyp_main2 = False
    if w % 3 == 0 or (w % 2 == 0 and (w // 2) % 3 == 0):
        try:
            a1 = f.class_average(1)
            a2 = f.class_average(2)
            positive = all(v > 0 for v in f.values.values())
            hyp_main2 = (
                positive
                and 2 * a1 + a2 > Fraction(3, 2)
                and 2 * a2 + a1 > Fraction(3, 2)
            )
        except DomainError:
            hyp_main2 = False
    target = n % w
    triples = []
    for i in range(len(res)):
        for j in range(i, len(res)):
            for k in range(j, len(res)):
                triples.append((res[i], res[j], res[k]))
    triples.sort(key=lambda t: (-(f(t[0]) + f(t[1]) + f(t[2])), t))
    for (b1, b2, b3) in triples:
        s = f(b1) + f(b2) + f(b3)
        if s <= Fraction(3, 2):
            break
        if (b1 + b2 + b3) % w != target:
            continue
        if f(b1) > 0 and f(b2) > 0 and f(b3) > 0:
            return SelectionResult(True, (b1, b2, b3), s, hyp_main, hyp_main2)
    return SelectionResult(
        False, None, None, hyp_main, hyp_main2,
        message=f"no witness: no reduced triple sums to {target} mod {w} "
        f"with positive weights and weight sum > 3/2",
    )


# --------------------------------------------------------------------------
# Bohr sets and decomposition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BohrSet:
    modulus: int
    frequencies: tuple[int, ...]
    radius: float
    members: np.ndarray

    def __post_init__(self):
        if self.members.size == 0 or self.members[0] != 0:
            raise DomainError("a Bohr set always contains 0")

    def __len__(self) -> int:
        return int(self.members.size)

    def normalized_indicator(self) -> CyclicFunction:
        vals = np.zeros(self.modulus)
        vals[self.members] = 1.0 / self.members.size
        return CyclicFunction(self.modulus, vals)


def bohr_set(frequencies, eps: float, n: int) -> BohrSet:
    """{x : |e_N(xr) - 1| <= eps for all r in R}, decided through
    |e_N(xr) - 1|^2 = 2 - 2 cos(2 pi x r / N) to avoid square roots."""
    if eps <= 0:
        raise DomainError(f"radius must be positive, got {eps}")
    freqs = tuple(sorted({int(r) % n for r in frequencies}))
    xs = np.arange(n, dtype=np.int64)
    keep = np.ones(n, dtype=bool)
    for r in freqs:
        if r == 0:
            continue  # |e_N(0) - 1| = 0: no restriction
        gap = 2.0 - 2.0 * np.cos(2.0 * np.pi * (xs * r % n) / n)
        keep &= gap <= eps * eps
    members = np.flatnonzero(keep).astype(np.int64)
    return BohrSet(modulus=n, frequencies=freqs, radius=eps, members=members)


@dataclass
class DecompositionReport:
    n: int
    eps: float
    q: float
    r_set: tuple[int, ...]
    bohr_size: int
    mass: float
    mass_smooth: float
    max_n_smooth: float
    sup_uniform: float
    lq_full: float
    lq_smooth: float
    lq_uniform: float
    set_like_flagged: bool  # max N*a' above 1.5: flagged for inspection only
    degenerate_bohr: bool   # B = Z_N (permitted, reported)


def decompose(
    a: CyclicFunction, cfg: TransferenceConfig
) -> tuple[CyclicFunction, CyclicFunction, DecompositionReport]:
    """Split a into the set-like part a' = a * beta * beta (beta the
    normalized indicator of the Bohr set of the large spectrum) and the
    uniform remainder a'' = a - a'."""
    n = a.modulus
    spec = dft(a)
    mags = np.abs(spec.coefficients)
    r_set = tuple(int(r) for r in np.flatnonzero(mags >= cfg.eps))
    bohr = bohr_set(r_set, cfg.eps, n)
    beta = bohr.normalized_indicator()
    beta_hat = (np.fft.ifft(beta.values) * n).real  # B = -B makes it real
    beta_hat[0] = 1.0  # unit mass by construction
    smooth_hat = spec.coefficients * beta_hat * beta_hat
    smooth = np.fft.fft(smooth_hat).real / n
    a_smooth = CyclicFunction(n, smooth)
    a_uniform = CyclicFunction(n, a.values - smooth)
    uniform_hat = spec.coefficients - smooth_hat
    q = cfg.q
    report = DecompositionReport(
        n=n,
        eps=cfg.eps,
        q=q,
        r_set=r_set,
        bohr_size=len(bohr),
        mass=a.total(),
        mass_smooth=a_smooth.total(),
        max_n_smooth=float(n * a_smooth.values.max()),
        sup_uniform=float(np.abs(uniform_hat).max()),
        lq_full=spec.lq_norm(q),
        lq_smooth=float((np.abs(smooth_hat) ** q).sum() ** (1.0 / q)),
        lq_uniform=float((np.abs(uniform_hat) ** q).sum() ** (1.0 / q)),
        set_like_flagged=float(n * a_smooth.values.max()) > SET_LIKE_FLAG_LEVEL,
        degenerate_bohr=len(bohr) == n,
    )
    return a_smooth, a_uniform, report


# --------------------------------------------------------------------------
# triple counting
# --------------------------------------------------------------------------

@dataclass
class TripleCount:
    x: int
    direct: float
    fourier: float

    @property
    def value(self) -> float:
        return self.direct

    @property
    def positive(self) -> bool:
        return self.direct > 0


def triple_count(
    a1: CyclicFunction, a2: CyclicFunction, a3: CyclicFunction, x: int,
    backend: str | None = None,
) -> TripleCount:
    """sum_{y,z} a1(y) a2(z) a3(x-y-z), computed directly and through
    (1/N) sum_r hat(a1) hat(a2) hat(a3) e_N(-rx); disagreement beyond 1e-9
    relative aborts (convention bug detector)."""
    n = a1.modulus
    if a2.modulus != n or a3.modulus != n:
        raise DomainError("modulus mismatch")
    x %= n
    direct = kernels.triple_direct(a1.values, a2.values, a3.values, x, backend=backend)
    h1 = np.fft.ifft(a1.values) * n
    h2 = np.fft.ifft(a2.values) * n
    h3 = np.fft.ifft(a3.values) * n
    phase = np.exp(-2j * np.pi * x * np.arange(n) / n)
    fourier = float((h1 * h2 * h3 * phase).sum().real / n)
    tol = DUAL_PATH_RTOL * max(1.0, abs(direct), abs(fourier))
    if abs(direct - fourier) > tol:
        raise PrecisionError(
            f"triple count paths disagree: direct {direct!r} vs fourier {fourier!r}"
        )
    return TripleCount(x=x, direct=direct, fourier=fourier)


@dataclass
class DenseCoverReport:
    n: int
    sizes: tuple[int, int, int]
    theta: float
    theta_flagged: bool
    min_count: int
    min_over_n2: float
    zero_targets: list
    counts: np.ndarray


def dense_cover_check(x1, x2, x3, n: int) -> DenseCoverReport:
    """Exact representation counts of x = t1 + t2 + t3 over subsets of Z_N
    for every x; integer convolution arithmetic throughout."""
    inds = []
    for xs in (x1, x2, x3):
        ind = np.zeros(n, dtype=np.int64)
        for v in xs:
            ind[v % n] = 1
        inds.append(ind)

    def fold(arr):
        out = arr[:n].copy()
        if arr.shape[0] > n:
            rest = arr[n:]
            out[: rest.shape[0]] += rest
        return out

    c12 = fold(np.convolve(inds[0], inds[1]))
    counts = fold(np.convolve(c12, inds[2]))
    sizes = tuple(int(i.sum()) for i in inds)
    thetas = [s / n for s in sizes]
    theta = min(thetas[0], thetas[1], thetas[2], sum(thetas) - 1)
    return DenseCoverReport(
        n=n,
        sizes=sizes,
        theta=theta,
        theta_flagged=theta <= 0,
        min_count=int(counts.min()),
        min_over_n2=float(counts.min()) / (n * n),
        zero_targets=[int(t) for t in np.flatnonzero(counts == 0)],
        counts=counts,
    )


# --------------------------------------------------------------------------
# end-to-end pipeline
# --------------------------------------------------------------------------

@dataclass
class Stage:
    name: str
    verdict: str  # pass | fail | info
    data: dict = field(default_factory=dict)


@dataclass
class PipelineReport:
    n: int
    config: TransferenceConfig
    stages: list = field(default_factory=list)
    halted_at: str | None = None
    witness: tuple[int, int, int] | None = None
    count: TripleCount | None = None

    @property
    def succeeded(self) -> bool:
        return self.halted_at is None

    def stage(self, name: str) -> Stage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)


def _smallest_prime_at_least(n: int) -> int:
    k = max(2, n)
    while not is_prime(k):
        k += 1
    return k


def transference_pipeline(
    a: PrimeSubset, n: int, cfg: TransferenceConfig
) -> PipelineReport:
    """Run the full deduction at desk scale: W-trick weights, residue
    targets, majorants over Z_N, decomposition diagnostics, and the
    dual-path triple count with an integer confirmation."""
    report = PipelineReport(n=n, config=cfg)
    w = cfg.w

    f = wtrick_density(a, cfg, n)
    avg = f.average()
    report.stages.append(
        Stage(
            "wtrick-density",
            "info",
            {
                "W": w,
                "average": float(avg),
                "values": {b: float(v) for b, v in sorted(f.values.items())},
            },
        )
    )

    sel = residue_target_selection(f, n)
    data = {
        "hypothesis_main": sel.hypothesis_main,
        "hypothesis_main2": sel.hypothesis_main2,
        "triple": sel.triple,
        "weight_sum": float(sel.weight_sum) if sel.weight_sum is not None else None,
        "message": sel.message,
    }
    if not sel.found:
        report.stages.append(Stage("residue-target-selection", "fail", data))
        report.halted_at = "residue-target-selection"
        return report
    report.stages.append(Stage("residue-target-selection", "pass", data))
    b1, b2, b3 = sel.triple

    lo = (1 + cfg.kappa) * n / w
    hi = (1 + 2 * cfg.kappa) * n / w
    n_cyc = _smallest_prime_at_least(math.ceil(lo))
    if n_cyc > hi:
        report.stages.append(
            Stage("choose-N", "fail", {"lo": lo, "hi": hi, "prime": n_cyc})
        )
        report.halted_at = "choose-N"
        return report
    report.stages.append(Stage("choose-N", "pass", {"lo": lo, "hi": hi, "N": n_cyc}))

    two_thirds = 2 * n / 3
    mus = []
    ays = []
    deltas = []
    etas = []
    major_ok = True
    identity_rel = []
    for b in (b1, b2, b3):
        mu = build_majorant(cfg, b, n_cyc, a.base)
        mu_spec = dft(mu)
        etas.append(
            max(mu_spec.sup_offzero, float(abs(mu_spec.coefficients[0] - 1.0)))
        )
        points = w * np.arange(n_cyc, dtype=np.int64) + b
        in_a = a.indicator_upto(min(int(two_thirds), a.base.limit))
        sel_mask = (points < two_thirds) & (points < in_a.shape[0])
        mask = np.zeros(n_cyc, dtype=bool)
        mask[sel_mask] = in_a[points[sel_mask]]
        ai = CyclicFunction(n_cyc, np.where(mask, mu.values, 0.0))
        if not (np.all(ai.values >= 0) and np.all(ai.values <= mu.values)):
            major_ok = False
        di = ai.total()
        deltas.append(di)
        fb = float(f(b))
        if fb > 0:
            expected = 2 * n / (3 * w * n_cyc) * (fb + cfg.delta / 8)
            identity_rel.append(abs(di - expected) / expected)
        mus.append(mu)
        ays.append(ai)
    d1, d2, d3 = deltas
    mean_ok = min(d1, d2, d3, d1 + d2 + d3 - 1) >= cfg.delta
    margin_ok = d1 + d2 + d3 > 1 + cfg.delta / 20
    report.stages.append(
        Stage(
            "majorants",
            "pass" if (major_ok and mean_ok) else "fail",
            {
                "majorization": major_ok,
                "deltas": deltas,
                "delta_sum": d1 + d2 + d3,
                "mean_condition": mean_ok,
                "sum_margin_over_1_plus_delta20": margin_ok,
                "density_identity_rel_err": identity_rel,
                "mu_sums": [m.total() for m in mus],
                "eta_measured": etas,  # max_r |mu-hat(r) - [r=0]| per majorant
            },
        )
    )
    if not (major_ok and mean_ok):
        report.halted_at = "majorants"
        return report

    dec_reports = []
    for ai in ays:
        _, _, rep = decompose(ai, cfg)
        dec_reports.append(rep)
    report.stages.append(
        Stage(
            "decompose",
            "info",
            {
                "r_sizes": [len(r.r_set) for r in dec_reports],
                "r_union_size": len(set().union(*(set(r.r_set) for r in dec_reports))),
                "bohr_sizes": [r.bohr_size for r in dec_reports],
                "sup_uniform": [r.sup_uniform for r in dec_reports],
                "M_lq": [r.lq_full for r in dec_reports],  # measured restriction norm
                "max_n_smooth": [r.max_n_smooth for r in dec_reports],
                "set_like_flagged": [r.set_like_flagged for r in dec_reports],
                "degenerate_bohr": [r.degenerate_bohr for r in dec_reports],
            },
        )
    )

    x0 = (n - b1 - b2 - b3) // w
    assert (n - b1 - b2 - b3) % w == 0
    tc = triple_count(ays[0], ays[1], ays[2], x0 % n_cyc)
    report.count = tc
    report.stages.append(
        Stage(
            "triple-count",
            "pass" if tc.positive else "fail",
            {"x": tc.x, "direct": tc.direct, "fourier": tc.fourier},
        )
    )
    if not tc.positive:
        report.halted_at = "triple-count"
        return report

    supp = [np.flatnonzero(ai.values > 0) for ai in ays]
    witness = None
    ind3 = ays[2].values > 0
    for y in supp[0]:
        zs = supp[1]
        ws = x0 - int(y) - zs
        ok = (ws >= 0) & (ws < n_cyc)
        if not ok.any():
            continue
        cand = zs[ok]
        wvals = x0 - int(y) - cand
        hit = np.flatnonzero(ind3[wvals])
        if hit.size:
            z = int(cand[hit[0]])
            wv = x0 - int(y) - z
            witness = (w * int(y) + b1, w * z + b2, w * wv + b3)
            break
    confirmed = False
    rep_count = None
    if witness is not None:
        p1, p2, p3 = witness
        confirmed = (
            p1 + p2 + p3 == n and p1 in a and p2 in a and p3 in a
        )
        if n <= 3 * a.base.limit:
            rep_count = representation_counts(a, (n, n))[n]
    report.witness = witness
    report.stages.append(
        Stage(
            "integer-confirmation",
            "pass" if confirmed else "fail",
            {
                "witness": witness,
                "confirmed": confirmed,
                "representation_count": rep_count,
            },
        )
    )
    if not confirmed:
        report.halted_at = "integer-confirmation"
    return report

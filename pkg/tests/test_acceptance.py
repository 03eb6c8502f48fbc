"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run `pytest tests/test_acceptance.py -s` to see the per-criterion lines.

One clause is expected to fail and is isolated under strict xfail: the
reference value table pins the (4,8,8) optimum at 31/2, but the exact
optimum is 61/4 = 15.25 (certified by the rational simplex's dual
certificate and cross-checked with an independent float solver; 15.5 is
an upper bound for that instance, not the optimum). Everything else is
green.
"""

from fractions import Fraction

import numpy as np
import pytest

from threeprimes import kernels, lp, sequences, verifier
from threeprimes import primes as ph
from threeprimes import transference as tr

SEED = 20260810


def criterion(name: str, ok: bool, detail: str = ""):
    tag = "PASS" if ok else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    print(f"{tag}  acceptance: {name}{suffix}")
    assert ok, f"{name}{suffix}"


class TestBaseCase:
    def test_all_triples_enumeration(self):
        rep = verifier.verify_base_case("all-triples")
        criterion(
            "base case: all-triples enumeration has zero coverage failures",
            rep.passed and rep.elapsed < 300,
            f"{rep.triples_satisfying_condition} qualifying triples, "
            f"{rep.elapsed:.1f}s",
        )

    def test_four_pattern_count(self):
        rep = verifier.verify_base_case("four-patterns")
        criterion(
            "base case: four-pattern candidate count is 186,592 < 2e5",
            rep.size_pattern_candidate_count == 186_592
            and rep.size_pattern_candidate_count < 2 * 10**5
            and rep.passed
            and rep.elapsed < 300,
            f"count {rep.size_pattern_candidate_count}",
        )


class TestAdmissibleSet:
    def test_m_cardinality(self):
        m = lp.admissible_triples()
        criterion("admissible set: |M| = 34 exactly", len(m) == 34, f"|M| = {len(m)}")


class TestLpTable:
    def test_table_certified(self, lp_table):
        values = {r.triple: r for r in lp_table.rows}
        ok = True
        detail = []
        peak = values[(2, 8, 8)]
        if peak.value != 16:
            ok = False
            detail.append(f"(2,8,8) = {peak.value}")
        for key in ((2, 7, 8), (3, 6, 8), (3, 8, 8), (4, 5, 8)):
            if values[key].value != Fraction(31, 2):
                ok = False
                detail.append(f"{key} = {values[key].value}")
        special = {(2, 8, 8), (2, 7, 8), (3, 6, 8), (3, 8, 8), (4, 5, 8), (4, 8, 8)}
        for row in lp_table.rows:
            if row.triple not in special and row.value > 15:
                ok = False
                detail.append(f"{row.triple} = {row.value}")
        for row in lp_table.constrained_rows:
            if row.value > 15:
                ok = False
                detail.append(f"{row.triple}+{row.extra} = {row.value}")
        criterion(
            "LP table: 16 at (2,8,8); 31/2 at (2,7,8),(3,6,8),(3,8,8),(4,5,8); "
            "<= 15 on the 28 others and both constrained runs; exact duals",
            ok,
            "; ".join(detail),
        )

    @pytest.mark.xfail(
        strict=True,
        reason="the exact (4,8,8) optimum is 61/4 = 15.25, certified by a "
        "validated dual certificate and an independent float solver; the "
        "reference table's 15.5 is an upper bound there, not the optimum",
    )
    def test_488_equals_31_halves_as_specified(self, lp_table):
        row = next(r for r in lp_table.rows if r.triple == (4, 8, 8))
        criterion(
            "LP table: exactly 31/2 for (4,8,8)",
            row.value == Fraction(31, 2),
            f"certified optimum {row.value}",
        )


class TestSpotValues:
    def test_spot_values_negative(self):
        vals = {
            "T(2,7,7)": lp.t_value(2, 7, 7),
            "T(3,25/4,25/4)": lp.t_value(3, Fraction(25, 4), Fraction(25, 4)),
            "T(4,4,15/2)": lp.t_value(4, 4, Fraction(15, 2)),
        }
        criterion(
            "spot values: T(2,7,7), T(3,25/4,25/4), T(4,4,15/2) all < 0 exactly",
            all(v < 0 for v in vals.values()),
            ", ".join(f"{k}={v}" for k, v in vals.items()),
        )


class TestSequenceLemmas:
    def test_n4_example_exact(self):
        a = sequences.MonotoneSequence(
            (1, Fraction(3, 5), Fraction(1, 2), Fraction(41, 100))
        )
        criterion(
            "sequence lemmas: (1, 0.6, 0.5, 0.41) passes the hypothesis and "
            "fails the conclusion in exact arithmetic",
            sequences.sym_hypothesis(a)
            and not sequences.sym_conclusion(a)
            and a.mean() == Fraction(251, 400),
            f"mean = {a.mean()} > 5/8",
        )

    @pytest.mark.parametrize(
        "n,lemma,trials",
        [
            (6, "sym", 10**6),
            (8, "sym", 10**5),
            (10, "sym", 10**5),
            (12, "sym", 10**5),
            (10, "asym", 10**5),
            (12, "asym", 10**5),
        ],
    )
    def test_volume_searches_find_nothing(self, n, lemma, trials):
        ce = sequences.search_counterexample(
            n, lemma, trials=trials, seed=SEED + n, refine=False
        )
        criterion(
            f"sequence lemmas: {trials:.0e} random trials at n={n} ({lemma}) "
            "produce zero counterexamples",
            ce is None,
        )


class TestLocalChecks:
    @pytest.mark.parametrize(
        "label,fn,m",
        [
            ("prop-main @ m=15", verifier.check_prop_main_randomized, 15),
            ("prop-main2 @ m=15", verifier.check_prop_main2_randomized, 15),
            ("prop-5/8 @ m=7", verifier.check_prop58_randomized, 7),
            ("prop-5/8 @ m=11", verifier.check_prop58_randomized, 11),
            ("prop-5/8 @ m=13", verifier.check_prop58_randomized, 13),
        ],
    )
    def test_randomized_checks(self, label, fn, m):
        rep = fn(m=m, trials=10_000, seed=SEED)
        criterion(
            f"local checks: 1e4 randomized trials for {label} with zero "
            "witness failures",
            rep.passed and rep.trials == 10_000,
            f"{rep.qualifying_trials} qualifying",
        )


class TestSharpness:
    def test_extremal_14_class_empty(self, window_1m):
        ext = ph.PrimeSubset.residue_class(window_1m, 15, (1, 2, 4, 7, 13))
        counts = ph.representation_counts(ext, (10**4, 10**5))
        targets = [n for n in counts if n % 15 == 14]
        bad = [n for n in targets if counts[n] != 0]
        criterion(
            "sharpness: every odd n = 14 mod 15 in [1e4, 1e5] has count "
            "exactly 0 for the extremal subset",
            len(targets) == 3000 and not bad,
            f"{len(targets)} targets",
        )

    def test_all_primes_cover_window(self, window_1m):
        scan = ph.coverage_scan(
            ph.PrimeSubset.all_primes(window_1m), (10**4, 10**5)
        )
        criterion(
            "sharpness: every odd n in [1e4, 1e5] has count >= 1 for all primes",
            scan.coverage_complete and scan.min_count >= 1,
            f"min count {scan.min_count}",
        )

    def test_convolution_matches_enumeration(self, window_1m):
        a = ph.PrimeSubset.all_primes(window_1m)
        fft_counts = ph.representation_counts(a, (3, 2000), method="fft")
        direct_counts = ph.representation_counts(a, (3, 2000), method="direct")
        criterion(
            "sharpness: convolution counts match direct enumeration exactly "
            "for all odd n <= 2000",
            fft_counts == direct_counts,
        )


class TestTransferenceIdentities:
    def test_fourier_inversion(self):
        rng = np.random.default_rng(SEED)
        worst = 0.0
        for n in (101, 1009, 9973):
            f = tr.CyclicFunction(n, rng.random(n))
            back = tr.inverse_dft(tr.dft(f))
            worst = max(worst, float(np.abs(back.values - f.values).max()))
        criterion(
            "transference: Fourier inversion to 1e-12 at N <= 1e4",
            worst <= 1e-12,
            f"worst {worst:.2e}",
        )

    def test_parseval_convolution_triple_paths(self):
        rng = np.random.default_rng(SEED + 1)
        ok = True
        for n in (101, 1009, 9973):
            f = tr.CyclicFunction(n, rng.random(n))
            g = tr.CyclicFunction(n, rng.random(n))
            s = tr.dft(f)
            lhs = float((f.values**2).sum())
            rhs = float((np.abs(s.coefficients) ** 2).sum() / n)
            ok &= abs(lhs - rhs) <= 1e-9 * max(1.0, lhs)
            conv_spec = tr.dft(tr.convolve(f, g)).coefficients
            prod = s.coefficients * tr.dft(g).coefficients
            ok &= float(np.abs(conv_spec - prod).max()) <= 1e-9 * max(
                1.0, float(np.abs(prod).max())
            )
            sparse = [
                tr.CyclicFunction(n, (rng.random(n) < 0.3) / n) for _ in range(3)
            ]
            tc = tr.triple_count(*sparse, int(rng.integers(n)))
            ok &= abs(tc.direct - tc.fourier) <= 1e-9 * max(
                1.0, abs(tc.direct), abs(tc.fourier)
            )
        criterion(
            "transference: Parseval, convolution theorem, and triple-count "
            "dual-path agreement to 1e-9 on randomized inputs at N <= 1e4",
            ok,
        )

    def test_decomposition_identities(self, window_1m):
        cfg = tr.TransferenceConfig()
        ok = True
        details = []
        for b in (7, 11):
            mu = tr.build_majorant(cfg, b, 1009, window_1m)
            smooth, uniform, rep = tr.decompose(mu, cfg)
            mass_ok = abs(rep.mass - rep.mass_smooth) <= 1e-12 * max(1.0, rep.mass)
            lq_ok = rep.lq_smooth <= rep.lq_full
            ok &= mass_ok and lq_ok
            details.append(f"b={b}: mass gap {abs(rep.mass - rep.mass_smooth):.1e}")
        criterion(
            "transference: decomposition mass identity to 1e-12 relative and "
            "lq norm of the smooth part never above the full norm",
            ok,
            "; ".join(details),
        )

    def test_wtrick_shrinks_spectral_sup(self, window_1m):
        n = 10_007
        mu2 = tr.build_majorant(tr.TransferenceConfig(z=2), 1, n, window_1m)
        mu5 = tr.build_majorant(tr.TransferenceConfig(z=5), 7, n, window_1m)
        s2 = tr.pseudorandomness_report(mu2, tr.TransferenceConfig(z=2)).measured_sup
        s5 = tr.pseudorandomness_report(mu5, tr.TransferenceConfig(z=5)).measured_sup
        criterion(
            "transference: measured sup |mu-hat| off zero at z=5 strictly "
            "below the z=2 value at matched N near 1e4",
            s5 < s2,
            f"z=2: {s2:.4f}, z=5: {s5:.4f}",
        )


class TestEndToEnd:
    def test_pipeline_all_primes(self, window_pipeline):
        cfg = tr.TransferenceConfig(z=5, kappa=0.05, delta=0.1)
        n = 10**6 + 1
        rep = tr.transference_pipeline(
            ph.PrimeSubset.all_primes(window_pipeline), n, cfg
        )
        confirm = rep.stage("integer-confirmation")
        ok = (
            rep.succeeded
            and rep.count is not None
            and rep.count.positive
            and rep.witness is not None
            and sum(rep.witness) == n
            and confirm.data["confirmed"]
            and confirm.data["representation_count"] > 0
        )
        criterion(
            "end-to-end: pipeline at n = 1e6+1 (z=5, kappa=0.05, delta=0.1) "
            "yields a positive count and a confirmed prime triple",
            ok,
            f"witness {rep.witness}, count {rep.count.direct if rep.count else None:.3e}",
        )

    def test_pipeline_extremal_halts(self, window_pipeline):
        cfg = tr.TransferenceConfig(z=5, kappa=0.05, delta=0.1)
        ext = ph.PrimeSubset.residue_class(window_pipeline, 15, (1, 2, 4, 7, 13))
        rep = tr.transference_pipeline(ext, 100_019, cfg)
        sel = rep.stage("residue-target-selection")
        criterion(
            "end-to-end: pipeline on the extremal subset at n = 14 mod 15 "
            'halts at residue-target-selection with "no witness"',
            rep.halted_at == "residue-target-selection"
            and "no witness" in sel.data["message"],
        )

import math

import numpy as np
import pytest

from threeprimes import primes as ph
from threeprimes import transference as tr
from threeprimes.errors import DomainError, PrecisionError

CFG = tr.TransferenceConfig()  # delta=0.1, eps=0.2, q=2.5, z=5, kappa=0.05


class TestConfig:
    def test_w_products(self):
        assert tr.TransferenceConfig(z=2).w == 2
        assert tr.TransferenceConfig(z=5).w == 30
        assert tr.TransferenceConfig(z=7).w == 210

    def test_validation(self):
        with pytest.raises(DomainError):
            tr.TransferenceConfig(q=3.5)
        with pytest.raises(DomainError):
            tr.TransferenceConfig(delta=0)
        with pytest.raises(DomainError):
            tr.TransferenceConfig(z=1)


class TestDft:
    def test_point_mass(self):
        f = tr.CyclicFunction(5, np.array([1.0, 0, 0, 0, 0]))
        assert np.allclose(tr.dft(f).coefficients, 1.0, atol=1e-14)

    def test_uniform_is_delta(self):
        s = tr.dft(tr.CyclicFunction.uniform(101))
        assert abs(s.coefficients[0] - 1) < 1e-12
        assert s.sup_offzero < 1e-12

    def test_positive_sign_convention(self):
        # hat(f)(r) = sum f(x) e^{2 pi i r x / N}: point mass at x=1 gives
        # coefficient e^{+2 pi i r / N} at r=1
        n = 7
        f = tr.CyclicFunction(n, np.eye(n)[1])
        got = tr.dft(f).coefficients[1]
        assert abs(got - np.exp(2j * np.pi / n)) < 1e-12

    def test_parseval_random(self):
        rng = np.random.default_rng(3)
        for n in (101, 9973):
            f = tr.CyclicFunction(n, rng.standard_normal(n))
            s = tr.dft(f)
            lhs = (f.values**2).sum()
            rhs = (np.abs(s.coefficients) ** 2).sum() / n
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))

    def test_inversion(self):
        rng = np.random.default_rng(4)
        for n in (101, 1009, 9973):
            f = tr.CyclicFunction(n, rng.random(n))
            back = tr.inverse_dft(tr.dft(f))
            assert np.abs(back.values - f.values).max() <= 1e-12

    def test_convolution_theorem(self):
        rng = np.random.default_rng(5)
        n = 1009
        f = tr.CyclicFunction(n, rng.random(n))
        g = tr.CyclicFunction(n, rng.random(n))
        conv = tr.convolve(f, g)
        lhs = tr.dft(conv).coefficients
        rhs = tr.dft(f).coefficients * tr.dft(g).coefficients
        assert np.abs(lhs - rhs).max() <= 1e-9 * max(1.0, np.abs(rhs).max())

    def test_composite_modulus_rejected(self):
        with pytest.raises(DomainError, match="prime"):
            tr.CyclicFunction(10, np.zeros(10))

    def test_lq_norm(self):
        s = tr.dft(tr.CyclicFunction.uniform(11))
        assert abs(s.lq_norm(2.5) - 1.0) < 1e-9  # only the DC term


class TestMajorant:
    def test_small_support_example(self):
        cfg = tr.TransferenceConfig(z=2)
        w = ph.sieve(50)
        mu = tr.build_majorant(cfg, 1, 5, w)
        assert set(np.flatnonzero(mu.values > 0)) == {1, 2, 3}

    def test_nonnegative_and_zero_on_composites(self, window_1m):
        mu = tr.build_majorant(CFG, 7, 1009, window_1m)
        assert (mu.values >= 0).all()
        xs = np.arange(1009)
        composite = ~window_1m.indicator[30 * xs + 7]
        assert (mu.values[composite] == 0).all()

    def test_total_mass_near_one(self, window_1m):
        for b in (7, 11, 29):
            mu = tr.build_majorant(CFG, b, 10_007, window_1m)
            assert abs(mu.total() - 1) < 0.1

    def test_reduced_residue_required(self, window_1m):
        with pytest.raises(DomainError, match="reduced"):
            tr.build_majorant(CFG, 6, 101, window_1m)

    def test_sieve_range_required(self):
        small = ph.sieve(100)
        with pytest.raises(DomainError, match="sieve limit"):
            tr.build_majorant(CFG, 7, 101, small)


class TestPseudorandomness:
    def test_constant_majorant(self):
        rep = tr.pseudorandomness_report(tr.CyclicFunction.uniform(101), CFG)
        assert rep.measured_sup < 1e-12
        assert rep.verdict == "info"

    def test_w_trick_shrinks_sup(self, window_1m):
        n = 10_007
        mu2 = tr.build_majorant(tr.TransferenceConfig(z=2), 1, n, window_1m)
        mu5 = tr.build_majorant(tr.TransferenceConfig(z=5), 7, n, window_1m)
        r2 = tr.pseudorandomness_report(mu2, tr.TransferenceConfig(z=2))
        r5 = tr.pseudorandomness_report(mu5, tr.TransferenceConfig(z=5))
        assert r5.measured_sup < r2.measured_sup


class TestWtrickDensity:
    def test_all_primes_near_one_minus_delta8(self, window_1m):
        a = ph.PrimeSubset.all_primes(window_1m)
        f = tr.wtrick_density(a, CFG, 10**6)
        target = 1 - CFG.delta / 8
        for b, v in f.values.items():
            assert abs(float(v) - target) < 0.05 * target, (b, float(v))

    def test_empty_set_is_zero(self, window_1m):
        empty = ph.PrimeSubset.residue_class(window_1m, 2, ())
        f = tr.wtrick_density(empty, CFG, 10**6)
        assert all(v == 0 for v in f.values.values())

    def test_extremal_set_supported_on_allowed_classes(self, window_1m):
        ext = ph.PrimeSubset.residue_class(window_1m, 15, (1, 2, 4, 7, 13))
        f = tr.wtrick_density(ext, CFG, 10**6)
        allowed = {1, 2, 4, 7, 13}
        for b, v in f.values.items():
            if b % 15 in allowed:
                assert float(v) > 0.9
            else:
                assert float(v) < 0.01

    def test_values_exact_rationals_in_range(self, window_1m):
        a = ph.PrimeSubset.all_primes(window_1m)
        f = tr.wtrick_density(a, CFG, 10**6)
        for v in f.values.values():
            assert 0 <= v <= 1


class TestResidueTargetSelection:
    def test_constant_one(self, window_1m):
        from threeprimes.residues import WeightFunction

        f = WeightFunction.constant(30, 1)
        for n in (11, 41, 10**6 + 1):
            sel = tr.residue_target_selection(f, n)
            assert sel.found
            b1, b2, b3 = sel.triple
            assert (b1 + b2 + b3) % 30 == n % 30
            assert sel.weight_sum > 1.5

    def test_extremal_14_class_has_no_witness(self, window_1m):
        ext = ph.PrimeSubset.residue_class(window_1m, 15, (1, 2, 4, 7, 13))
        f = tr.wtrick_density(ext, CFG, 10**6)
        sel = tr.residue_target_selection(f, 100_019)  # 14 mod 15
        assert not sel.found
        assert "no witness" in sel.message

    def test_all_primes_witness(self, window_1m):
        a = ph.PrimeSubset.all_primes(window_1m)
        f = tr.wtrick_density(a, CFG, 10**6)
        sel = tr.residue_target_selection(f, 10**6 + 1)
        assert sel.found and sel.hypothesis_main


class TestBohrSets:
    def test_empty_frequency_set(self):
        assert len(tr.bohr_set((), 0.3, 101)) == 101

    def test_radius_two_is_everything(self):
        assert len(tr.bohr_set((1, 5), 2.0, 101)) == 101

    def test_interval_size(self):
        n, eps = 2003, 0.15
        b = tr.bohr_set((1,), eps, n)
        approx = eps * n / math.pi
        assert abs(len(b) - approx) <= 3

    def test_zero_always_member(self):
        b = tr.bohr_set((3, 17), 0.05, 1009)
        assert 0 in b.members

    def test_symmetric(self):
        b = tr.bohr_set((3, 17), 0.3, 1009)
        members = set(b.members.tolist())
        assert all((-x) % 1009 in members for x in members)

    def test_positive_radius_required(self):
        with pytest.raises(DomainError):
            tr.bohr_set((1,), 0.0, 101)


class TestDecomposition:
    def test_constant_function(self):
        smooth, uniform, rep = tr.decompose(
            tr.CyclicFunction(101, np.full(101, 0.4)), CFG
        )
        assert np.abs(uniform.values).max() < 1e-12
        assert rep.degenerate_bohr  # R = {0} only: Bohr set is all of Z_N

    def test_mass_identity(self, window_1m):
        mu = tr.build_majorant(CFG, 7, 1009, window_1m)
        smooth, uniform, rep = tr.decompose(mu, CFG)
        assert abs(rep.mass - rep.mass_smooth) <= 1e-12 * max(1.0, rep.mass)
        assert np.abs(smooth.values + uniform.values - mu.values).max() < 1e-12

    def test_lq_monotone(self, window_1m):
        mu = tr.build_majorant(CFG, 11, 1009, window_1m)
        _, _, rep = tr.decompose(mu, CFG)
        assert rep.lq_smooth <= rep.lq_full
        assert rep.lq_uniform <= rep.lq_full

    def test_spectral_bounds_on_and_off_r(self, window_1m):
        # on R: |hat(a'')(r)| <= 2 eps |hat(a)(r)| + slack; off R: <= |hat(a)(r)|
        cfg = tr.TransferenceConfig(eps=0.1)
        mu = tr.build_majorant(cfg, 13, 1009, window_1m)
        smooth, uniform, rep = tr.decompose(mu, cfg)
        a_hat = tr.dft(mu).coefficients
        u_hat = tr.dft(uniform).coefficients
        mags = np.abs(a_hat)
        in_r = np.zeros(1009, dtype=bool)
        in_r[list(rep.r_set)] = True
        assert np.all(
            np.abs(u_hat[in_r]) <= 2 * cfg.eps * mags[in_r] + 1e-9
        )
        assert np.all(np.abs(u_hat[~in_r]) <= mags[~in_r] + 1e-12)
        assert np.all(mags[~in_r] < cfg.eps)

    def test_uniform_part_sup_small(self, window_1m):
        # observed desk behavior on prime majorants: sup |hat(a'')| <= 3 eps
        mu = tr.build_majorant(CFG, 7, 1009, window_1m)
        _, _, rep = tr.decompose(mu, CFG)
        assert rep.sup_uniform <= 3 * CFG.eps


class TestTripleCount:
    def test_uniform(self):
        u = tr.CyclicFunction.uniform(101)
        tc = tr.triple_count(u, u, u, 17)
        assert abs(tc.direct - 1 / 101) < 1e-12
        assert abs(tc.fourier - 1 / 101) < 1e-12

    def test_point_masses(self):
        n = 101
        fs = []
        for pos in (3, 10, 20):
            v = np.zeros(n)
            v[pos] = 1.0
            fs.append(tr.CyclicFunction(n, v))
        assert abs(tr.triple_count(*fs, 33).direct - 1) < 1e-12
        assert abs(tr.triple_count(*fs, 34).direct) < 1e-12

    def test_dual_path_agreement_random(self):
        rng = np.random.default_rng(8)
        for n in (101, 1009, 9973):
            fs = [
                tr.CyclicFunction(n, (rng.random(n) < 0.4) / n) for _ in range(3)
            ]
            tc = tr.triple_count(*fs, int(rng.integers(n)))
            assert abs(tc.direct - tc.fourier) <= 1e-9 * max(
                1.0, abs(tc.direct), abs(tc.fourier)
            )

    def test_modulus_mismatch(self):
        with pytest.raises(DomainError):
            tr.triple_count(
                tr.CyclicFunction.uniform(101),
                tr.CyclicFunction.uniform(101),
                tr.CyclicFunction.uniform(103),
                0,
            )


class TestDenseCover:
    def test_full_sets(self):
        full = np.arange(101)
        rep = tr.dense_cover_check(full, full, full, 101)
        assert rep.min_count == 101 * 101
        assert not rep.zero_targets

    def test_random_dense_sets(self):
        rng = np.random.default_rng(9)
        n = 101
        xs = [np.flatnonzero(rng.random(n) < 0.4) for _ in range(3)]
        rep = tr.dense_cover_check(*xs, n)
        if rep.theta > 0:
            assert rep.min_count > 0

    def test_empty_factor_flagged(self):
        full = np.arange(101)
        rep = tr.dense_cover_check(full, full, [], 101)
        assert rep.theta_flagged
        assert rep.min_count == 0


class TestPipeline:
    def test_small_end_to_end(self, window_1m):
        n = 100_001  # odd, 100001 mod 30 = 11
        cfg = tr.TransferenceConfig(z=5, kappa=0.05, delta=0.1)
        window = ph.sieve(int(1.1 * n) + 60)
        rep = tr.transference_pipeline(ph.PrimeSubset.all_primes(window), n, cfg)
        assert rep.succeeded
        p1, p2, p3 = rep.witness
        assert p1 + p2 + p3 == n
        assert rep.count.positive
        major = rep.stage("majorants")
        assert major.data["majorization"]
        assert major.data["mean_condition"]
        assert max(major.data["density_identity_rel_err"]) < 1e-9

    def test_even_target_halts(self, window_1m):
        cfg = tr.TransferenceConfig(z=5)
        rep = tr.transference_pipeline(
            ph.PrimeSubset.all_primes(window_1m), 100_000, cfg
        )
        # even n cannot be hit by three odd reduced residues mod 30
        assert rep.halted_at == "residue-target-selection"

    def test_extremal_14_mod_15_halts(self, window_1m):
        cfg = tr.TransferenceConfig(z=5)
        ext = ph.PrimeSubset.residue_class(window_1m, 15, (1, 2, 4, 7, 13))
        rep = tr.transference_pipeline(ext, 100_019, cfg)
        assert rep.halted_at == "residue-target-selection"
        sel = rep.stage("residue-target-selection")
        assert "no witness" in sel.data["message"]

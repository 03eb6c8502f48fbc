import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threeprimes.errors import DomainError
from threeprimes.residues import (
    ResidueSet,
    WeightFunction,
    cauchy_davenport_check,
    euler_phi,
    extremal_set_mod15,
    is_prime,
    reduced_residues,
    triple_sumset,
    triple_sumset_listwise,
    units,
)


def brute_sumset(a, b, c):
    m = a.modulus
    out = {(x + y + z) % m for x in a for y in b for z in c}
    return tuple(sorted(out))


class TestReducedResidues:
    def test_m3(self):
        assert reduced_residues(3).elements == (1, 2)

    def test_m15(self):
        rs = reduced_residues(15)
        assert rs.elements == (1, 2, 4, 7, 8, 11, 13, 14)
        assert len(rs) == 8

    def test_m105_size(self):
        # independent gcd filter
        expected = sum(1 for x in range(1, 105) if math.gcd(x, 105) == 1)
        assert expected == 48
        assert len(reduced_residues(105)) == 48

    @pytest.mark.parametrize("bad,msg", [(4, "odd"), (45, "squarefree"), (1, "at least 3")])
    def test_rejects(self, bad, msg):
        with pytest.raises(DomainError, match=msg):
            reduced_residues(bad)

    def test_phi_agrees(self):
        for m in (3, 15, 21, 33, 105):
            assert len(reduced_residues(m)) == euler_phi(m)


class TestResidueSet:
    def test_canonicalization(self):
        rs = ResidueSet.from_elements(7, [10, 3, 3, -1])
        assert rs.elements == (3, 6)

    def test_mask_agrees_with_elements(self):
        rs = ResidueSet.from_elements(15, [1, 2, 4])
        assert rs.mask == (1 << 1) | (1 << 2) | (1 << 4)
        assert ResidueSet.from_mask(15, rs.mask) == rs

    def test_mask_mismatch_rejected(self):
        with pytest.raises(DomainError, match="mask"):
            ResidueSet(15, (1, 2), mask=0b1)

    def test_no_mask_above_64(self):
        rs = ResidueSet.from_elements(105, [1, 2])
        assert rs.mask is None


class TestTripleSumset:
    def test_mod3_example(self):
        a = ResidueSet.from_elements(3, [1, 2])
        expected = brute_sumset(a, a, a)
        assert triple_sumset(a, a, a).elements == expected == (0, 1, 2)

    def test_extremal_excludes_14(self):
        e = extremal_set_mod15()
        s = triple_sumset(e, e, e)
        assert 14 not in s.elements
        assert s.elements == brute_sumset(e, e, e)

    def test_empty_factor(self):
        a = ResidueSet.from_elements(15, [1, 2])
        empty = ResidueSet(15, ())
        assert triple_sumset(a, a, empty).elements == ()

    def test_modulus_mismatch(self):
        with pytest.raises(DomainError, match="mismatch"):
            triple_sumset(
                ResidueSet.from_elements(3, [1]),
                ResidueSet.from_elements(5, [1]),
                ResidueSet.from_elements(3, [1]),
            )

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_permutation_and_dilation_invariance(self, data):
        m = data.draw(st.sampled_from([5, 9, 15, 21, 33]))
        draw_set = lambda: ResidueSet.from_elements(
            m, data.draw(st.sets(st.integers(0, m - 1), min_size=1, max_size=m))
        )
        a, b, c = draw_set(), draw_set(), draw_set()
        base = triple_sumset(a, b, c)
        for perm in itertools.permutations((a, b, c)):
            assert triple_sumset(*perm) == base
        u = data.draw(st.sampled_from([x for x in range(1, m) if math.gcd(x, m) == 1]))
        dilated = triple_sumset(a.dilate(u), b.dilate(u), c.dilate(u))
        assert dilated == base.dilate(u)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_mask_path_matches_list_path(self, data):
        m = data.draw(st.integers(2, 64))
        draw_set = lambda: ResidueSet.from_elements(
            m,
            data.draw(st.sets(st.integers(0, m - 1), min_size=1, max_size=min(m, 10))),
        )
        a, b, c = draw_set(), draw_set(), draw_set()
        assert triple_sumset(a, b, c) == triple_sumset_listwise(a, b, c)


class TestCauchyDavenport:
    def test_p7_example(self):
        a = ResidueSet.from_elements(7, [1, 2])
        s = triple_sumset(a, a, a)
        assert s.elements == (3, 4, 5, 6)
        assert cauchy_davenport_check(a, a, a, 7)

    def test_full_group(self):
        a = ResidueSet.from_elements(5, range(5))
        assert cauchy_davenport_check(a, a, a, 5)

    def test_singleton(self):
        a = ResidueSet.from_elements(11, [1])
        assert cauchy_davenport_check(a, a, a, 11)

    def test_composite_rejected(self):
        a = ResidueSet.from_elements(9, [1])
        with pytest.raises(DomainError, match="prime"):
            cauchy_davenport_check(a, a, a, 9)

    def test_random_triples_over_small_primes(self):
        # invariant: holds for 1000 random triples across primes p <= 31
        rng = np.random.default_rng(20260810)
        ps = [p for p in range(3, 32) if is_prime(p)]
        for trial in range(1000):
            p = ps[trial % len(ps)]
            sets = []
            for _ in range(3):
                size = int(rng.integers(1, p + 1))
                elems = rng.choice(p, size=size, replace=False)
                sets.append(ResidueSet.from_elements(p, elems.tolist()))
            assert cauchy_davenport_check(*sets, p)


class TestExtremalSet:
    def test_elements(self):
        assert extremal_set_mod15().elements == (1, 2, 4, 7, 13)

    def test_density_is_exactly_5_8(self):
        assert extremal_set_mod15().unit_density() == Fraction(5, 8)


class TestWeightFunction:
    def test_domain_must_be_units(self):
        with pytest.raises(DomainError, match="domain"):
            WeightFunction(15, {1: 1})

    def test_range_enforced(self):
        vals = {r: Fraction(1) for r in units(15)}
        vals[1] = Fraction(3, 2)
        with pytest.raises(DomainError, match="outside"):
            WeightFunction(15, vals)

    def test_even_modulus_allowed(self):
        # Z_W* with W = 30 is the W-trick domain
        f = WeightFunction.constant(30, Fraction(1, 2))
        assert f.residues() == (1, 7, 11, 13, 17, 19, 23, 29)

    def test_averages(self):
        f = WeightFunction(3, {1: 1, 2: Fraction(1, 4)})
        assert f.average() == Fraction(5, 8)
        assert f.class_average(1) == 1
        assert f.class_average(2) == Fraction(1, 4)

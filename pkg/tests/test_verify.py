import math

import pytest

from cutcat.circuit import PRE_MEASUREMENT, enumerate_fault_locations
from cutcat.decoders import IdentityDecoder, RuleDecoderD3D5, RuleDecoderD7
from cutcat.gadgets import GadgetSpec, build_cut_cat
from cutcat.verify import eval_upper_bound, oracle_residuals, verify_gadget


class TestVerifyGadget:
    def test_d3_gamma6_passes(self):
        spec = GadgetSpec(gamma=6, distance=3)
        g = build_cut_cat(spec)
        rep = verify_gadget(g, RuleDecoderD3D5(g, 1), 1, dedupe=False)
        assert rep.passed
        assert rep.n_locations == 24

    def test_d5_gamma10_passes(self):
        spec = GadgetSpec(gamma=10, distance=5)
        g = build_cut_cat(spec)
        assert verify_gadget(g, RuleDecoderD3D5(g, 2), 2, dedupe=False).passed

    def test_identity_decoder_hook_counterexample(self):
        spec = GadgetSpec(gamma=6, distance=3)
        g = build_cut_cat(spec)
        rep = verify_gadget(g, IdentityDecoder(), 1, dedupe=False)
        assert not rep.passed
        cx = rep.counterexample
        assert cx.n_faults == 1
        assert cx.coset_weight == 2
        locs = enumerate_fault_locations(g)
        assert locs[cx.fault_ids[0]].kind == "cat_init"

    def test_dedupe_agrees_with_full(self):
        spec = GadgetSpec(gamma=8, distance=5)
        g = build_cut_cat(spec)
        dec = RuleDecoderD3D5(g, 2)
        assert verify_gadget(g, dec, 2, dedupe=True).passed == \
            verify_gadget(g, dec, 2, dedupe=False).passed

    def test_measurement_only_faults_always_pass(self):
        spec = GadgetSpec(gamma=10, distance=5)
        g = build_cut_cat(spec)
        locs = [l for l in enumerate_fault_locations(g) if l.kind == PRE_MEASUREMENT]
        rep = verify_gadget(g, RuleDecoderD3D5(g, 2), 2, locations=locs,
                            dedupe=False)
        assert rep.passed

    def test_parallel_jobs_match_serial(self):
        spec = GadgetSpec(gamma=8, distance=3)
        g = build_cut_cat(spec)
        dec = RuleDecoderD3D5(g, 1)
        serial = verify_gadget(g, dec, 1, dedupe=False, jobs=1)
        parallel = verify_gadget(g, dec, 1, dedupe=False, jobs=2)
        assert serial.passed == parallel.passed
        assert serial.faults_checked == parallel.faults_checked

    def test_d7_small_adaptive_passes(self):
        spec = GadgetSpec(gamma=14, distance=7)
        g = build_cut_cat(spec)
        assert verify_gadget(g, RuleDecoderD7(g), 3, dedupe=True).passed


class TestOracle:
    def test_weight_zero_entry(self):
        g = build_cut_cat(GadgetSpec(gamma=6, distance=3))
        stream = list(oracle_residuals(g, 0))
        assert stream == [(0, 0, 0)]

    def test_weight_one_count_matches_locations(self):
        g = build_cut_cat(GadgetSpec(gamma=6, distance=3))
        entries = [e for e in oracle_residuals(g, 1) if e[2] == 1]
        assert len(entries) == 24

    def test_weight_one_residuals_bounded(self):
        g = build_cut_cat(GadgetSpec(gamma=10, distance=5))
        for _, res, w in oracle_residuals(g, 1):
            if w == 1:
                assert bin(res).count("1") <= 2

    def test_deterministic_stream(self):
        g = build_cut_cat(GadgetSpec(gamma=6, distance=3))
        assert list(oracle_residuals(g, 2)) == list(oracle_residuals(g, 2))


class TestUpperBound:
    def test_zero_rate(self):
        assert eval_upper_bound(10, 2, 0.0) == 0.0

    def test_t_zero_closed_form(self):
        for gamma, p in ((6, 1e-3), (10, 3e-3), (18, 1e-2)):
            q = 2 * p / 3
            expected = 1 - (1 - q) ** (4 * gamma)
            assert eval_upper_bound(gamma, 0, p) == pytest.approx(expected, rel=1e-12)

    def test_monotone_in_p(self):
        vals = [eval_upper_bound(10, 2, p) for p in (1e-4, 1e-3, 1e-2, 1e-1)]
        assert vals == sorted(vals)

    def test_monotone_in_gamma(self):
        vals = [eval_upper_bound(g, 2, 1e-3) for g in (6, 10, 14, 18)]
        assert vals == sorted(vals)

    def test_antitone_in_t(self):
        vals = [eval_upper_bound(10, t, 1e-2) for t in (0, 1, 2, 3)]
        assert vals == sorted(vals, reverse=True)

    def test_matches_complementary_identity(self):
        # direct 1 - CDF in exact fractions for a modest case
        from fractions import Fraction

        gamma, t, p = 6, 1, Fraction(3, 1000)
        q = 2 * p / 3
        n = 4 * gamma
        cdf = sum(
            Fraction(math.comb(n, s)) * q**s * (1 - q) ** (n - s)
            for s in range(t + 1)
        )
        expected = float(1 - cdf)
        assert eval_upper_bound(gamma, t, float(p)) == pytest.approx(expected, rel=1e-12)

    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            eval_upper_bound(10, 2, 1.5)

"""Frame-synchronization tests: correlation, metric, placement recovery."""

import numpy as np
import pytest

from burstrx import framesync, framing
from burstrx.errors import SyncError

LAYOUT = framing.FrameLayout(payload_len=0)
PN = framing.pn_sequence(LAYOUT.pn_seed)


class TestXcorr:
    def test_clean_blocks(self):
        window = np.concatenate([PN, PN, -PN, np.zeros(96)])[:192]
        c = framesync.xcorr_pn(window, PN)
        assert len(c) == 161
        assert c[0] == 32
        assert c[32] == 32
        assert c[64] == -32

    def test_zero_window(self):
        assert not framesync.xcorr_pn(np.zeros(192), PN).any()

    def test_linearity_in_gain(self):
        rng = np.random.default_rng(1)
        w = rng.normal(size=192)
        c1 = framesync.xcorr_pn(w, PN)
        c2 = framesync.xcorr_pn(3.5 * w, PN)
        assert np.allclose(c2, 3.5 * c1)

    def test_window_size_checked(self):
        with pytest.raises(SyncError):
            framesync.xcorr_pn(np.zeros(191), PN)


class TestSyncMetric:
    def test_clean_peak_96(self):
        window = np.concatenate([PN, PN, -PN, np.zeros(96)])[:192]
        m = framesync.sync_metric(framesync.xcorr_pn(window, PN))
        assert len(m) == 97
        assert m[0] == 96

    def test_zero(self):
        assert not framesync.sync_metric(np.zeros(161)).any()

    def test_linear(self):
        rng = np.random.default_rng(2)
        c1, c2 = rng.normal(size=(2, 161))
        lhs = framesync.sync_metric(2 * c1 - 3 * c2)
        rhs = 2 * framesync.sync_metric(c1) - 3 * framesync.sync_metric(c2)
        assert np.allclose(lhs, rhs)


class TestFindSync:
    def place_b(self, q, total=1500, rng_seed=3):
        """Clean {0,1} stream with preamble B at offset q, random elsewhere."""
        rng = np.random.default_rng(rng_seed)
        s = rng.integers(0, 2, total).astype(float)
        b = framing.gen_preamble_b(LAYOUT)
        s[q : q + 96] = b
        return s

    @pytest.mark.parametrize("q", [0, 17, 96, 353, 1000])
    def test_placement_exact(self, q):
        s = self.place_b(q)
        res = framesync.find_sync(s, PN, ratio_min=1.2)
        assert res.p1 == q

    def test_position_arithmetic(self):
        assert framesync.make_sync_result(8, 1.0, 0.1).p == 9
        assert framesync.make_sync_result(8, 1.0, 0.1).frac == 0.0
        r = framesync.make_sync_result(3, 1.0, 0.1)
        assert r.p == 3
        assert r.frac == pytest.approx(0.375)

    def test_offset_reporting(self):
        s = self.place_b(353)
        res = framesync.find_sync(s, PN, ratio_min=1.2, offset=1000)
        assert res.p1 == 1353

    def test_gain_invariance(self):
        s = self.place_b(353)
        r1 = framesync.find_sync(s, PN, ratio_min=1.2)
        r2 = framesync.find_sync(s * 12.5, PN, ratio_min=1.2)
        assert r1.p1 == r2.p1

    def test_single_dominant_peak_in_frame(self):
        # full preamble frame: exactly one metric value above half the peak
        frame = framing.build_frame(LAYOUT, np.array([], dtype=np.uint8))
        m = framesync.metric_stream(frame.symbols, PN)
        peak = m.max()
        assert np.sum(m > 0.5 * peak) == 1

    def test_failure_on_noise_only(self):
        rng = np.random.default_rng(4)
        with pytest.raises(SyncError):
            framesync.find_sync(rng.normal(size=2000), PN, ratio_min=1.5)

    def test_frac_in_range(self):
        for q in range(0, 32):
            r = framesync.make_sync_result(q, 1.0, 0.0)
            assert 0.0 <= r.frac < 1.0
            assert r.peak_value >= r.second_peak_value or r.second_peak_value == 0.0

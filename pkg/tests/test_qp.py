"""QP rules: scaling, normalization, rounding, per-CU selection, maps."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perceptqp import (
    ActivityRecord,
    ChromaFormat,
    CuRect,
    Frame,
    FrameActivity,
    Mode,
    Plane,
    QpConfig,
    Rounding,
    TMode,
    VideoFormat,
    cu_qp,
    delta_qp,
    normalized_activity,
    qp_map,
    round_half_away_from_zero,
    scaling_factor,
)
from strategies import random_frame

positive = st.floats(min_value=1.0, max_value=1e9, allow_nan=False)


def record(luma, cb=1.0, cr=1.0):
    return ActivityRecord(cu=CuRect(0, 0, 64, 64, 64), luma=luma, cb=cb, cr=cr)


def stats(s, t):
    """Synthetic CU whose activity is s in both modes, against frame mean t."""
    rec = record(s, cb=0.0, cr=0.0)
    return rec, FrameActivity(records=(rec,), t_luma=t, t_cross=t)


class TestScalingFactor:
    def test_default_range_doubles(self):
        assert scaling_factor(6) == 2.0

    def test_zero_range_is_neutral(self):
        assert scaling_factor(0) == 1.0

    def test_two_octaves(self):
        assert scaling_factor(12) == 4.0


class TestNormalizedActivity:
    def test_equal_activity_is_one(self):
        assert normalized_activity(7.25, 7.25, 2.0) == 1.0
        assert normalized_activity(1.0, 1.0, 4.0) == 1.0

    def test_large_activity_approaches_f(self):
        n = normalized_activity(1e6, 10.0, 2.0)
        assert n < 2.0
        assert n == pytest.approx(2.0, abs=1e-4)

    def test_small_activity_approaches_reciprocal(self):
        n = normalized_activity(1.0, 1e6, 2.0)
        assert n > 0.5
        assert n == pytest.approx(0.5, abs=1e-4)

    @settings(max_examples=200, deadline=None)
    @given(positive, positive, st.floats(min_value=1.0, max_value=16.0))
    def test_stays_inside_band(self, s, t, f):
        n = normalized_activity(s, t, f)
        assert 1.0 / f <= n <= f

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=1e-2, max_value=1e4),
        st.floats(min_value=1e-2, max_value=1e4),
        st.floats(min_value=1.0 + 1e-6, max_value=100.0),
        st.floats(min_value=1.01, max_value=8.0),
    )
    def test_strictly_monotone_in_activity(self, t, lo, ratio, f):
        hi = lo * ratio
        assert normalized_activity(lo, t, f) < normalized_activity(hi, t, f)


class TestRounding:
    @pytest.mark.parametrize(
        "x,want",
        [(2.5, 3), (-2.5, -3), (0.5, 1), (-0.5, -1), (1.49, 1), (-1.49, -1), (0.0, 0)],
    )
    def test_half_away_from_zero(self, x, want):
        assert round_half_away_from_zero(x) == want

    def test_neutral_activity_has_no_delta(self):
        assert delta_qp(1.0) == 0
        assert delta_qp(1.0, Rounding.CEILING) == 0

    def test_doubled_activity_is_six_steps(self):
        assert delta_qp(2.0) == 6

    def test_third_octave(self):
        assert delta_qp(1.2599) == 2

    def test_ceiling_promotes_fractional_deltas(self):
        # 6*log2(1.01) ~ 0.086: nearest keeps 0, ceiling pushes to 1
        assert delta_qp(1.01, Rounding.NEAREST) == 0
        assert delta_qp(1.01, Rounding.CEILING) == 1

    def test_ceiling_of_negative_fraction_is_zero(self):
        assert delta_qp(0.99, Rounding.CEILING) == 0
        assert delta_qp(0.99, Rounding.NEAREST) == 0


class TestCuQp:
    def test_mean_activity_keeps_slice_qp(self):
        rec, fa = stats(5.0, 5.0)
        for mode in Mode:
            cfg = QpConfig(slice_qp=37, mode=mode)
            assert cu_qp(cfg, rec, fa) == 37

    def test_busy_cu_saturates_at_range(self):
        rec, fa = stats(1e9, 1.0)
        cfg = QpConfig(slice_qp=37, mode=Mode.ADAPTIVE_QP, qp_range=6)
        assert cu_qp(cfg, rec, fa) == 43

    def test_clip_at_upper_bound(self):
        rec, fa = stats(1e9, 1.0)
        cfg = QpConfig(slice_qp=48, mode=Mode.ADAPTIVE_QP, qp_range=6)
        assert cu_qp(cfg, rec, fa) == 51

    def test_clip_at_lower_bound(self):
        rec, fa = stats(1.0, 1e9)
        cfg = QpConfig(slice_qp=2, mode=Mode.CBAQ, qp_range=12)
        assert cu_qp(cfg, rec, fa) == 0

    def test_adaptive_mode_ignores_chroma(self):
        fa = FrameActivity(records=(), t_luma=4.0, t_cross=40.0)
        cfg = QpConfig(slice_qp=30, mode=Mode.ADAPTIVE_QP)
        quiet = record(4.0, cb=500.0, cr=500.0)
        assert cu_qp(cfg, quiet, fa) == 30

    def test_cbaq_mode_sees_chroma(self):
        # luma matches the mean but chroma pushes the summed activity up
        fa = FrameActivity(records=(), t_luma=4.0, t_cross=6.0)
        cfg = QpConfig(slice_qp=30, mode=Mode.CBAQ)
        assert cu_qp(cfg, record(4.0, cb=500.0, cr=500.0), fa) > 30
        assert cu_qp(cfg, record(4.0, cb=1.0, cr=1.0), fa) == 30

    def test_t_mode_selects_normalizer(self):
        fa = FrameActivity(records=(), t_luma=3.0, t_cross=9.0)
        rec = record(3.0, cb=3.0, cr=3.0)  # cross = 9 = t_cross
        cross_cfg = QpConfig(slice_qp=32, mode=Mode.CBAQ, t_mode=TMode.CROSS)
        luma_cfg = QpConfig(slice_qp=32, mode=Mode.CBAQ, t_mode=TMode.LUMA)
        assert cu_qp(cross_cfg, rec, fa) == 32
        # n = (2*9+3)/(9+2*3) = 1.4, 6*log2(1.4) = 2.91 -> 3
        assert cu_qp(luma_cfg, rec, fa) == 35

    @settings(max_examples=300, deadline=None)
    @given(
        positive,
        positive,
        st.integers(0, 51),
        st.sampled_from([0, 3, 6, 12]),
        st.sampled_from(list(Rounding)),
    )
    def test_delta_bounded_by_range(self, s, t, q, a, rounding):
        rec, fa = stats(s, t)
        cfg = QpConfig(slice_qp=q, mode=Mode.ADAPTIVE_QP, qp_range=a, rounding=rounding)
        got = cu_qp(cfg, rec, fa)
        assert abs(got - q) <= a
        assert 0 <= got <= 51

    @settings(max_examples=200, deadline=None)
    @given(positive, positive, positive)
    def test_non_decreasing_in_activity(self, t, a, b):
        lo, hi = sorted((a, b))
        cfg = QpConfig(slice_qp=26, mode=Mode.ADAPTIVE_QP)
        qp_lo = cu_qp(cfg, *stats(lo, t))
        qp_hi = cu_qp(cfg, *stats(hi, t))
        assert qp_lo <= qp_hi


class TestQpConfigValidation:
    def test_slice_qp_out_of_range(self):
        with pytest.raises(ValueError):
            QpConfig(slice_qp=52, mode=Mode.CBAQ)
        with pytest.raises(ValueError):
            QpConfig(slice_qp=-1, mode=Mode.CBAQ)

    def test_negative_range(self):
        with pytest.raises(ValueError):
            QpConfig(slice_qp=32, mode=Mode.CBAQ, qp_range=-1)

    def test_bad_cu_size(self):
        with pytest.raises(ValueError):
            QpConfig(slice_qp=32, mode=Mode.CBAQ, cu_size=8)


def checkerboard(h, w, lo, hi):
    grid = np.add.outer(np.arange(h), np.arange(w)) % 2
    return np.where(grid.astype(bool), hi, lo).astype(np.uint8)


class TestQpMap:
    def test_constant_frame_is_all_slice_qp(self):
        fmt = VideoFormat(128, 128, 8, ChromaFormat.YUV420)
        frame = random_frame(fmt, seed=0, lo=100, hi=100)
        for mode in Mode:
            for rounding in Rounding:
                cfg = QpConfig(slice_qp=32, mode=mode, rounding=rounding)
                qm = qp_map(frame, cfg)
                assert qm.flat() == [32] * 4
                assert (qm.cols, qm.rows) == (2, 2)

    def test_cells_enumerate_raster_coordinates(self):
        fmt = VideoFormat(128, 128, 8, ChromaFormat.YUV420)
        frame = random_frame(fmt, seed=1)
        qm = qp_map(frame, QpConfig(slice_qp=32, mode=Mode.CBAQ))
        coords = [(x, y) for x, y, _ in qm.cells()]
        assert coords == [(0, 0), (64, 0), (0, 64), (64, 64)]

    def test_flat_cu_among_noisy_gets_lower_qp(self):
        fmt = VideoFormat(128, 128, 8, ChromaFormat.YUV420)
        rng = np.random.default_rng(13)
        y = rng.integers(0, 256, size=(128, 128), dtype=np.uint8)
        y[0:64, 0:64] = 77
        cb = rng.integers(0, 256, size=(64, 64), dtype=np.uint8)
        cr = rng.integers(0, 256, size=(64, 64), dtype=np.uint8)
        cb[0:32, 0:32] = 90
        cr[0:32, 0:32] = 90
        frame = Frame(Plane(y), Plane(cb), Plane(cr), fmt)
        for mode in Mode:
            qm = qp_map(frame, QpConfig(slice_qp=32, mode=mode))
            flat = qm.qps[0][0]
            noisy = [qm.qps[0][1], qm.qps[1][0], qm.qps[1][1]]
            assert flat < 32
            assert all(flat < qp for qp in noisy)

    def test_modes_agree_when_chroma_tracks_luma(self):
        # every CU gets the same chroma texture, so the cross activity is
        # a constant shift of luma activity only when luma is uniform too
        fmt = VideoFormat(128, 64, 8, ChromaFormat.YUV420)
        y = np.tile(checkerboard(64, 64, 60, 196), (1, 2))
        cb = np.tile(checkerboard(32, 32, 100, 140), (1, 2))
        cr = np.tile(checkerboard(32, 32, 90, 150), (1, 2))
        frame = Frame(Plane(y), Plane(cb), Plane(cr), fmt)
        a = qp_map(frame, QpConfig(slice_qp=27, mode=Mode.ADAPTIVE_QP))
        c = qp_map(frame, QpConfig(slice_qp=27, mode=Mode.CBAQ))
        assert a.qps == c.qps == ((27, 27),)

    def test_chroma_only_contrast_splits_the_modes(self):
        # identical luma everywhere; one CU carries busy chroma
        fmt = VideoFormat(128, 128, 8, ChromaFormat.YUV420)
        y = np.tile(checkerboard(64, 64, 50, 200), (2, 2))
        cb = np.full((64, 64), 128, dtype=np.uint8)
        cr = np.full((64, 64), 128, dtype=np.uint8)
        cb[0:32, 0:32] = checkerboard(32, 32, 0, 255)
        cr[0:32, 0:32] = checkerboard(32, 32, 0, 255)
        frame = Frame(Plane(y), Plane(cb), Plane(cr), fmt)
        adaptive = qp_map(frame, QpConfig(slice_qp=32, mode=Mode.ADAPTIVE_QP))
        cross = qp_map(frame, QpConfig(slice_qp=32, mode=Mode.CBAQ))
        assert adaptive.qps == ((32, 32), (32, 32))
        assert cross.qps != adaptive.qps
        assert cross.qps[0][0] > 32  # the busy-chroma CU pays more QP

    def test_worker_count_irrelevant_to_map(self):
        fmt = VideoFormat(176, 144, 8, ChromaFormat.YUV420)
        frame = random_frame(fmt, seed=42)
        cfg = QpConfig(slice_qp=27, mode=Mode.CBAQ, cu_size=16)
        maps = [qp_map(frame, cfg, max_workers=w) for w in (1, 2, 8)]
        assert maps[0] == maps[1] == maps[2]

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([0, 3, 6, 12]))
    def test_all_qps_within_range_of_slice(self, seed, a):
        fmt = VideoFormat(64, 48, 8, ChromaFormat.YUV420)
        frame = random_frame(fmt, seed)
        for mode in Mode:
            cfg = QpConfig(slice_qp=26, mode=mode, qp_range=a, cu_size=16)
            for qp in qp_map(frame, cfg).flat():
                assert abs(qp - 26) <= a

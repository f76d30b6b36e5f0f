import numpy as np
import pytest

from dwt3d.core import FixedPointFormat, Frame
from dwt3d.metrics import memory_words
from dwt3d.reference import haar_forward_sets, lift97_forward_2d
from dwt3d.system import DatapathConfig, run_pair, transform_video

DEBUG = DatapathConfig(P=2, debug_no_quantize=True)


def _reference(f0, f1, cfg):
    c = cfg.constants()
    s0 = lift97_forward_2d(np.asarray(f0, float) - cfg.level_shift, c)
    s1 = lift97_forward_2d(np.asarray(f1, float) - cfg.level_shift, c)
    return haar_forward_sets(s0, s1)


@pytest.mark.parametrize("P, shape", [(2, (16, 16)), (1, (8, 8)), (4, (8, 16))])
def test_debug_pair_equals_reference(rng, P, shape):
    cfg = DatapathConfig(P=P, debug_no_quantize=True)
    f0, f1 = rng.integers(0, 256, (2, *shape))
    run = run_pair(f0, f1, cfg)
    lo, hi = _reference(f0, f1, cfg)
    assert np.array_equal(run.gop.l_frame.stack(), lo.stack())
    assert np.array_equal(run.gop.h_frame.stack(), hi.stack())


def test_report_fields(rng):
    f0, f1 = rng.integers(0, 256, (2, 16, 16))
    rep = run_pair(f0, f1).report
    assert (rep.latency_2d, rep.latency_3d) == (18, 21)
    assert rep.steady_cycles == 64
    assert rep.coefficients == 2 * 16 * 16
    assert rep.throughput_steady == 8
    assert rep.memory_words == memory_words(16, 2)
    assert rep.n_processors == 2
    assert rep.total_cycles > rep.steady_cycles


def test_identical_frames_give_zero_h_frame(rng):
    f = rng.integers(0, 256, (16, 16))
    run = run_pair(f, f)
    assert not run.gop.h_frame.stack().any()


def test_frame_indices_and_shape_check():
    a = Frame(np.zeros((8, 8)), index=4)
    b = Frame(np.zeros((8, 8)), index=5)
    run = run_pair(a, b, pair_index=2)
    assert (run.gop.l_frame.source_index, run.gop.h_frame.source_index) == (4, 5)
    assert run.gop.pair_index == 2
    with pytest.raises(ValueError):
        run_pair(np.zeros((8, 8)), np.zeros((8, 12)))


def test_transform_video_pairs(rng):
    frames = rng.integers(0, 256, (4, 8, 8))
    runs = transform_video(frames, DEBUG)
    assert [r.gop.pair_index for r in runs] == [0, 1]
    lo, _ = _reference(frames[2], frames[3], DEBUG)
    assert np.array_equal(runs[1].gop.l_frame.stack(), lo.stack())
    with pytest.raises(ValueError):
        transform_video(frames[:3])


def test_spatial_outputs_exposed(rng):
    f0, f1 = rng.integers(0, 256, (2, 8, 8))
    run = run_pair(f0, f1, DEBUG)
    c = DEBUG.constants()
    assert np.array_equal(run.spatial[1].stack(), lift97_forward_2d(f1 - 128.0, c).stack())


def test_quantized_raw_words_in_range(rng):
    cfg = DatapathConfig(fmt=FixedPointFormat(14, 2))
    f0, f1 = rng.integers(100, 156, (2, 8, 8))
    run = run_pair(f0, f1, cfg)
    raw = run.gop.l_frame.stack() * 4
    assert np.all(raw % 1 == 0) and np.abs(raw).max() <= 8192

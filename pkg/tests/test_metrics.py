import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dwt3d.metrics import (
    CycleReport,
    compute_cycles,
    frame_rate,
    latency_audit,
    max_abs_error,
    memory_words,
    model_table,
    psnr,
)
from dwt3d.system import DatapathConfig, run_pair


@pytest.mark.parametrize("N, P, words", [(512, 2, 3360), (64, 2, 672), (128, 2, 1056),
                                         (64, 4, 912)])
def test_memory_words(N, P, words):
    assert memory_words(N, P) == words


def test_memory_words_rejects_nonpositive():
    with pytest.raises(ValueError):
        memory_words(0, 2)


@pytest.mark.parametrize("W, H, P, cycles", [(512, 512, 2, 65536), (16, 16, 2, 64),
                                             (3840, 2160, 2, 2_073_600)])
def test_compute_cycles(W, H, P, cycles):
    assert compute_cycles(W, H, P) == cycles


def test_compute_cycles_rejects_bad_width():
    with pytest.raises(ValueError):
        compute_cycles(10, 16, 2)


def test_frame_rates():
    assert frame_rate(3840, 2160, 2, 200e6) == pytest.approx(192.9, abs=0.05)
    assert frame_rate(3840, 2160, 2, 265e6) == pytest.approx(255.6, abs=0.05)
    assert frame_rate(3840, 2160, 2, 200e6) >= 60
    assert frame_rate(3840, 2160, 4, 200e6) == pytest.approx(2 * frame_rate(3840, 2160, 2, 200e6))


def test_psnr_examples():
    a = np.array([1.0, 2.0, 3.0, 4.0])
    assert psnr(a, a) == math.inf
    assert psnr([0.0], [255.0]) == pytest.approx(0.0)
    assert psnr(a, a + [1, -1, 1, -1]) == pytest.approx(48.13, abs=0.005)
    with pytest.raises(ValueError):
        psnr(a, a[:3])


finite = arrays(float, 8, elements=st.floats(-1e3, 1e3))


@given(finite, finite)
def test_psnr_symmetric(a, b):
    assert psnr(a, b) == psnr(b, a)


@given(finite, st.floats(0.01, 100))
def test_psnr_matches_mse(a, d):
    b = a + d
    assert psnr(a, b) == pytest.approx(10 * math.log10(255 ** 2 / d ** 2), rel=1e-6)


def test_max_abs_error():
    assert max_abs_error([1, 2], [1, 5]) == 3
    assert max_abs_error(np.zeros(0), np.zeros(0)) == 0.0
    with pytest.raises(ValueError):
        max_abs_error([1], [1, 2])


@pytest.mark.parametrize("N, P", [(16, 2), (32, 1), (16, 4)])
def test_memory_audit_matches_formula(N, P):
    run = run_pair(np.zeros((N, N)), np.zeros((N, N)), DatapathConfig(P=P))
    assert run.audit["total"] == memory_words(N, P)
    assert sum(run.audit["items"].values()) == memory_words(N, P)
    assert run.audit["edge_lanes_uncounted"] == 80


def test_latency_audit():
    run = run_pair(np.zeros((16, 16)), np.zeros((16, 16)))
    assert latency_audit(run.report) == (18, 21)
    bad = CycleReport(latency_2d=17, latency_3d=None, total_cycles=1, steady_cycles=1,
                      coefficients=1, memory_words=1)
    with pytest.raises(AssertionError):
        latency_audit(bad)


def test_latency_independent_of_content(rng):
    a = run_pair(np.zeros((16, 16)), np.zeros((16, 16))).report
    b = run_pair(*rng.integers(0, 256, (2, 16, 16))).report
    assert (a.latency_2d, a.latency_3d, a.total_cycles) == (b.latency_2d, b.latency_3d,
                                                           b.total_cycles)


def test_report_round_trips_through_json():
    rep = run_pair(np.zeros((8, 8)), np.zeros((8, 8))).report
    d = rep.to_dict()
    back = json.loads(json.dumps(d))
    assert back == d
    assert d["throughput_steady"] == 8.0
    assert rep.frames_per_second(200e6) == pytest.approx(200e6 * 2 / rep.steady_cycles)


def test_model_table():
    t = model_table(512, 512, 2)
    assert t["memory_words"] == 3360
    assert t["compute_cycles_per_pair"] == 65536
    assert (t["latency_2d"], t["latency_3d"]) == (18, 21)
    assert set(t["frame_rate"]) == {"200000000", "265000000"}

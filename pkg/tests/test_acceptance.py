"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a one-line PASS/FAIL verdict; the lines are printed in
the pytest terminal summary and by ``python tests/test_acceptance.py``.
"""

import numpy as np
import pytest

from dwt3d.core import CDF97, BANDS, FixedPointFormat, adopted_constants
from dwt3d.datapath import SHIFT_ADD_COEFFICIENTS, FixedArith
from dwt3d.metrics import compute_cycles, frame_rate, memory_audit, memory_words, psnr
from dwt3d.reference import (
    conv97_oracle_1d,
    haar_forward,
    haar_forward_sets,
    lift97_forward_1d,
    lift97_forward_2d,
    lift97_inverse_1d,
    lift97_inverse_2d,
)
from dwt3d.spatial import SpatialProcessor, StripConfig
from dwt3d.system import DatapathConfig, run_pair
from dwt3d.temporal import TemporalProcessor

RESULTS = {}


def record(n, name, ok, detail):
    RESULTS[n] = f"criterion {n:2d} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    assert ok, RESULTS[n]


def test_c01_latency():
    seen = {}
    for N in (16, 64, 128):
        for P in (1, 2):
            rep = run_pair(np.zeros((N, N)), np.zeros((N, N)), DatapathConfig(P=P)).report
            seen[(N, P)] = (rep.latency_2d, rep.latency_3d)
    ok = all(v == (18, 21) for v in seen.values())
    record(1, "latency 18/21", ok, ", ".join(f"N={n} P={p}: {v}" for (n, p), v in seen.items()))


def test_c02_throughput(rng):
    f0, f1 = rng.integers(0, 256, (2, 64, 64))
    rep = run_pair(f0, f1, DatapathConfig(P=2)).report
    t = rep.throughput_steady
    record(2, "throughput", t == 8 and t.denominator == 1,
           f"{rep.coefficients} coefficients / {rep.steady_cycles} cycles = {t}")


def test_c03_memory():
    out = []
    ok = True
    arith = FixedArith(FixedPointFormat())
    for N, P in [(64, 2), (128, 2), (512, 2), (64, 4)]:
        sps = [SpatialProcessor(N, N, StripConfig(P), arith) for _ in range(2)]
        tps = [TemporalProcessor(b, arith) for b in BANDS]
        total = memory_audit(sps, tps)["total"]
        ok &= total == memory_words(N, P) == 2 * (3 * N + 60 * P) + 48
        out.append(f"({N},{P})={total}")
    run = run_pair(np.zeros((64, 64)), np.zeros((64, 64)), DatapathConfig(P=2))
    ok &= run.report.memory_words == 672
    ok &= memory_words(512, 2) == 3360
    record(3, "memory formula", ok, " ".join(out))


def test_c04_cycles():
    got = {}
    for N in (16, 64):
        got[N] = run_pair(np.zeros((N, N)), np.zeros((N, N)), DatapathConfig(P=2)).report
    fps = frame_rate(3840, 2160, 2, 200e6)
    ok = all(r.steady_cycles == N * N // 4 == compute_cycles(N, N, 2) for N, r in got.items())
    ok &= fps >= 60 and abs(fps - 192.9) < 0.05
    record(4, "cycle count", ok,
           f"N=16: {got[16].steady_cycles}, N=64: {got[64].steady_cycles}, UHD@200MHz {fps:.1f} fps")


def test_c05_shift_add_sums():
    want = [-0.6328125, 12.0, -21.375, 2.5625]
    sums = [sum(s * 2.0 ** e for s, e in c.terms) for c in SHIFT_ADD_COEFFICIENTS]
    record(5, "shift-add table", sums == want, f"{sums}")


def test_c06_oracle_equivalence():
    rng = np.random.default_rng(606)
    cfg = DatapathConfig(P=2, debug_no_quantize=True)
    c = cfg.constants()
    err2 = err3 = 0.0
    for _ in range(20):
        f0, f1 = rng.integers(0, 256, (2, 16, 16))
        run = run_pair(f0, f1, cfg)
        r0 = lift97_forward_2d(f0 - cfg.level_shift, c)
        r1 = lift97_forward_2d(f1 - cfg.level_shift, c)
        err2 = max(err2, np.abs(run.spatial[0].stack() - r0.stack()).max(),
                   np.abs(run.spatial[1].stack() - r1.stack()).max())
        lo, hi = haar_forward_sets(*run.spatial)
        err3 = max(err3, np.abs(run.gop.l_frame.stack() - lo.stack()).max(),
                   np.abs(run.gop.h_frame.stack() - hi.stack()).max())
    record(6, "oracle equivalence", err2 == 0 and err3 == 0,
           f"2-D max error {err2}, temporal max error {err3}, 20 pairs")


def test_c07_perfect_reconstruction():
    rng = np.random.default_rng(707)
    e1 = e2 = 0.0
    for _ in range(100):
        x = rng.uniform(-255, 255, 64)
        e1 = max(e1, np.abs(lift97_inverse_1d(*lift97_forward_1d(x, CDF97), CDF97) - x).max())
        f = rng.uniform(0, 255, (32, 32))
        e2 = max(e2, np.abs(lift97_inverse_2d(lift97_forward_2d(f)) - f).max())
    record(7, "perfect reconstruction", e1 <= 1e-9 and e2 <= 1e-8,
           f"1-D {e1:.2e} <= 1e-9, 2-D {e2:.2e} <= 1e-8, 100 trials")


def test_c08_convolution_cross_check():
    rng = np.random.default_rng(808)
    err = 0.0
    for _ in range(100):
        x = rng.uniform(-255, 255, 32)
        for a, b in zip(lift97_forward_1d(x), conv97_oracle_1d(x)):
            err = max(err, np.abs(a - b).max())
    record(8, "lifting vs convolution", err <= 1e-6, f"max {err:.2e} <= 1e-6, 100 signals")


def test_c09_haar_energy():
    rng = np.random.default_rng(909)
    x0, x1 = rng.uniform(-1, 1, (2, 1_000_000))
    L, H = haar_forward(x0, x1)
    err = np.abs(L * L + H * H - (x0 * x0 + x1 * x1)).max()
    record(9, "Haar energy", err <= 1e-12, f"max {err:.2e} <= 1e-12 over 1e6 pairs in [-1, 1)")


def test_c10_quantized_quality(camera_pair, golden):
    g = golden["camera_pair_64"]
    f0, f1 = camera_pair
    run = run_pair(f0, f1, DatapathConfig(P=2, fmt=FixedPointFormat(14, 0)))
    r0 = lift97_forward_2d(f0 - 128.0, CDF97)
    r1 = lift97_forward_2d(f1 - 128.0, CDF97)
    lo, hi = haar_forward_sets(r0, r1)
    p3 = psnr(np.stack([run.gop.l_frame.stack(), run.gop.h_frame.stack()]),
              np.stack([lo.stack(), hi.stack()]))
    p2 = psnr(run.spatial[0].stack(), r0.stack())
    ok = p3 >= g["threshold_3d_db"] and p2 >= g["threshold_2d_db"] and p3 >= 40
    record(10, "quantized quality", ok,
           f"3-D {p3:.2f} dB >= {g['threshold_3d_db']}, 2-D {p2:.2f} dB >= {g['threshold_2d_db']}")


def test_adopted_constants_in_use():
    # the datapath under test really uses the shift-add coefficients
    assert DatapathConfig().constants().flipped == adopted_constants().flipped


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

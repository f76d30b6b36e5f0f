import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dwt3d.core import FixedPointFormat, SubbandSet
from dwt3d.datapath import FixedArith, FloatArith, constant_mul
from dwt3d.reference import SQRT2, haar_forward_sets
from dwt3d.temporal import TemporalProcessor, temporal_transform, tp_clock

FMT = FixedPointFormat()


def _sets(rng, shape=(4, 6), scale=50.0):
    a = SubbandSet.from_stack(rng.normal(size=(4, *shape)) * scale, 0)
    b = SubbandSet.from_stack(rng.normal(size=(4, *shape)) * scale, 1)
    return a, b


def test_three_clock_fill():
    tp = TemporalProcessor("ll", FixedArith(FMT))
    outs = [tp_clock(tp, 3, 1)[1], tp_clock(tp)[1], tp_clock(tp)[1], tp_clock(tp)[1]]
    assert outs[0] is None and outs[1] is None
    assert outs[2] is not None and outs[3] is None
    assert tp.occupancy == 0


def test_zero_pair():
    tp = TemporalProcessor("hh", FixedArith(FMT))
    tp_clock(tp, 0, 0)
    tp_clock(tp)
    assert tp_clock(tp)[1] == (0, 0)


@given(st.integers(-4000, 4000))
def test_identical_inputs(v):
    tp = TemporalProcessor("lh", FixedArith(FMT))
    tp_clock(tp, v, v)
    tp_clock(tp)
    L, H = tp_clock(tp)[1]
    assert H == 0
    assert L == constant_mul(v, SQRT2, FMT)
    assert abs(L - math.sqrt(2) * v) < 1


def test_one_output_per_clock():
    tp = TemporalProcessor("hl", FloatArith())
    got = []
    for t in range(10):
        _, out = tp_clock(tp, float(t), float(2 * t)) if t < 8 else tp_clock(tp)
        got.append(out)
    assert got[:2] == [None, None] and all(o is not None for o in got[2:])


def test_register_count():
    tp = TemporalProcessor("ll", FloatArith())
    assert tp.DEPTH == 3 and tp.register_words == 12
    with pytest.raises(ValueError):
        TemporalProcessor("xx", FloatArith())


def test_debug_equals_reference_haar(rng):
    a, b = _sets(rng)
    g = temporal_transform(a, b, FloatArith())
    lo, hi = haar_forward_sets(a, b)
    assert np.array_equal(g.l_frame.stack(), lo.stack())
    assert np.array_equal(g.h_frame.stack(), hi.stack())
    assert (g.l_frame.source_index, g.h_frame.source_index, g.pair_index) == (0, 1, 0)


def test_debug_energy(rng):
    a, b = _sets(rng)
    g = temporal_transform(a, b, FloatArith())
    e_in = np.sum(a.stack() ** 2 + b.stack() ** 2)
    e_out = np.sum(g.l_frame.stack() ** 2 + g.h_frame.stack() ** 2)
    assert abs(e_in - e_out) <= 1e-9 * e_in


def test_identical_sets_give_zero_h_frame(rng):
    a, _ = _sets(rng)
    a = SubbandSet.from_stack(np.floor(a.stack()), 0)
    b = SubbandSet.from_stack(a.stack(), 1)
    g = temporal_transform(a, b)
    assert not g.h_frame.stack().any()
    assert np.abs(g.l_frame.stack() - SQRT2 * a.stack()).max() < 1


def test_quantized_close_to_reference(rng):
    a, b = _sets(rng)
    a = SubbandSet.from_stack(np.floor(a.stack()), 0)
    b = SubbandSet.from_stack(np.floor(b.stack()), 1)
    g = temporal_transform(a, b)
    lo, hi = haar_forward_sets(a, b)
    assert np.abs(g.l_frame.stack() - lo.stack()).max() < 2
    assert np.abs(g.h_frame.stack() - hi.stack()).max() < 2


def test_rejects_mismatched_sets(rng):
    a, b = _sets(rng)
    with pytest.raises(ValueError):
        temporal_transform(a, SubbandSet.from_stack(np.zeros((4, 2, 2)), 1))
    with pytest.raises(ValueError):
        temporal_transform(a, SubbandSet.from_stack(b.stack(), 2))
    with pytest.raises(ValueError):
        temporal_transform(SubbandSet.from_stack(a.stack(), 1), SubbandSet.from_stack(b.stack(), 2))

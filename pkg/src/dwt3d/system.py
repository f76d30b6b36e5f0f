"""The full 3-D processor: two spatial processors feeding four temporal ones.

Frame ``2p`` goes to SP 1 and frame ``2p + 1`` to SP 2; both are clocked in
lockstep, so their rearrange units emit the same coefficient positions on
the same clock and each TP combines one sub-band of the two frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BANDS, FixedPointFormat, Frame, GopOutput, SubbandSet, adopted_constants, CDF97
from .datapath import make_arith
from .metrics import CycleReport, memory_audit
from .spatial import SpatialEvents, SpatialProcessor, StripConfig, level_shifted, strip_schedule
from .temporal import TemporalProcessor


@dataclass(frozen=True)
class DatapathConfig:
    """Everything that shapes a datapath run.

    ``scaling`` picks the band scaling constants for the shift-add
    coefficients (``"compensated"`` or ``"published"``); ``level_shift`` is
    subtracted from pixel codes before they enter the datapath.
    """

    P: int = 2
    fmt: FixedPointFormat = field(default_factory=FixedPointFormat)
    debug_no_quantize: bool = False
    scaling: str = "compensated"
    level_shift: float = 128.0

    @property
    def strip(self) -> StripConfig:
        return StripConfig(self.P)

    def arith(self):
        return make_arith(self.fmt, self.debug_no_quantize)

    def constants(self):
        return adopted_constants(CDF97, self.scaling)


@dataclass
class PairRun:
    gop: GopOutput
    report: CycleReport
    audit: dict
    spatial: tuple  # (SubbandSet, SubbandSet) fed to the TPs


def _plane_of(f):
    return f.samples if isinstance(f, Frame) else np.asarray(f)


def run_pair(f0, f1, config: DatapathConfig = DatapathConfig(), pair_index: int = 0) -> PairRun:
    """Clock one frame pair through the 3-D processor."""
    p0 = level_shifted(_plane_of(f0), config.level_shift)
    p1 = level_shifted(_plane_of(f1), config.level_shift)
    if p0.shape != p1.shape:
        raise ValueError(f"frame shapes differ: {p0.shape} vs {p1.shape}")
    h, w = p0.shape
    arith = config.arith()
    constants = config.constants()
    sps = [SpatialProcessor(w, h, config.strip, arith, constants) for _ in range(2)]
    tps = [TemporalProcessor(b, arith) for b in BANDS]
    events = SpatialEvents()
    first_tp_out = None
    spatial = np.zeros((2, 4, h // 2, w // 2))
    lo = np.zeros((4, h // 2, w // 2))
    hi = np.zeros((4, h // 2, w // 2))
    produced = 0

    beats = iter(strip_schedule(w, h, config.strip))
    beat = next(beats, None)
    clock = 0
    while (beat is not None or any(sp.busy() for sp in sps)
           or any(tp.occupancy for tp in tps)):
        clock += 1
        s0 = s1 = None
        if beat is not None:
            events.mark("first_input", clock)
            events.input_beats += 1
            s0 = sps[0]._samples(p0, beat)
            s1 = sps[1]._samples(p1, beat)
        e0, q0 = sps[0].clock(beat, s0, events, clock)
        e1, q1 = sps[1].clock(beat, s1)
        if e0 != e1 or [q[:2] for q in q0] != [q[:2] for q in q1]:
            raise RuntimeError("spatial processors fell out of lockstep")
        if q0:
            events.mark("first_coefficient", clock)
        for q in q0:
            spatial[0][:, q[0], q[1]] = q[2:]
        for q in q1:
            spatial[1][:, q[0], q[1]] = q[2:]
        for b, tp in enumerate(tps):
            items = [(a[:2], a[2 + b], c[2 + b]) for a, c in zip(q0, q1)] if e0 else None
            out = tp.clock(items)
            if out is None:
                continue
            first_tp_out = first_tp_out or clock
            for (v, c), l_val, h_val in out:
                lo[b, v, c] = l_val
                hi[b, v, c] = h_val
                produced += 2
        beat = next(beats, None) if beat is not None else None

    events.coefficients = produced
    report = CycleReport.from_spatial(events, clock, sps[0], n_processors=2)
    report.latency_3d = first_tp_out - events.first_input + 1
    audit = memory_audit(sps, tps)
    report.memory_words = audit["total"]
    report.allocation = audit
    if arith.quantized:
        scale = 1.0 / (1 << config.fmt.frac_bits)
        lo, hi, spatial = lo * scale, hi * scale, spatial * scale
    i0 = f0.index if isinstance(f0, Frame) else 2 * pair_index
    gop = GopOutput(SubbandSet.from_stack(lo, i0), SubbandSet.from_stack(hi, i0 + 1),
                    pair_index=pair_index)
    return PairRun(gop, report, audit,
                   (SubbandSet.from_stack(spatial[0], i0), SubbandSet.from_stack(spatial[1], i0 + 1)))


def transform_video(frames, config: DatapathConfig = DatapathConfig()):
    """Run every (even, odd) frame pair; returns a list of :class:`PairRun`."""
    frames = list(frames)
    if len(frames) % 2:
        raise ValueError(f"need an even number of frames, got {len(frames)}")
    return [run_pair(frames[i], frames[i + 1], config, i // 2) for i in range(0, len(frames), 2)]

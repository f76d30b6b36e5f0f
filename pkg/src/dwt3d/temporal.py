"""Temporal processors: lifting Haar across the same sub-band of two frames.

Each TP is three pipeline stages: predict (``h = c1 - c0``), update
(``l = c0 + h/2``) and normalise (``L = sqrt2 * l``, ``H = h / sqrt2``).
Coefficients arrive straight from the two spatial processors, so there is
no frame buffer, only the pipeline registers.
"""

from __future__ import annotations

import numpy as np

from .core import BANDS, FixedPointFormat, GopOutput, SubbandSet
from .datapath import FixedArith
from .metrics import TP_REGISTER_WORDS
from .reference import INV_SQRT2, SQRT2


class TemporalProcessor:
    """One 3-stage Haar TP.  A beat carries any number of coefficient pairs."""

    DEPTH = 3
    register_words = TP_REGISTER_WORDS

    def __init__(self, band: str, arith):
        if band not in BANDS:
            raise ValueError(f"unknown band {band!r}")
        self.band = band
        self.arith = arith
        self.reset()

    def reset(self):
        self.stages = [None] * self.DEPTH

    @property
    def occupancy(self) -> int:
        return sum(s is not None for s in self.stages)

    def clock(self, items=None):
        """``items``: list of ``(position, c0, c1)`` or ``None`` for no beat.

        Returns the list of ``(position, L, H)`` leaving stage 3, or ``None``.
        """
        ar = self.arith
        s1, s2, _ = self.stages
        out = None
        if s2 is not None:
            out = [(p, ar.scale(SQRT2, lo), ar.scale(INV_SQRT2, h)) for p, lo, h in s2]
        if s1 is not None:
            s1 = [(p, ar.add(c0, ar.half(h)), h) for p, c0, h in s1]
        new = None
        if items is not None:
            new = [(p, c0, ar.sub(c1, c0)) for p, c0, c1 in items]
        self.stages = [new, s1, out]
        return out


def tp_clock(state: TemporalProcessor, c0=None, c1=None):
    """Clock a TP with a single coefficient pair (or a bubble).

    Returns ``(state, (L, H) or None)``.
    """
    items = None if c0 is None else [(None, c0, c1)]
    out = state.clock(items)
    return state, (None if not out else out[0][1:])


def temporal_transform(s0: SubbandSet, s1: SubbandSet, arith=None) -> GopOutput:
    """Haar-combine two sub-band sets, one coefficient per band per clock.

    ``s0`` must come from an even frame and ``s1`` from the next one.
    """
    if s0.shape != s1.shape:
        raise ValueError(f"sub-band shapes differ: {s0.shape} vs {s1.shape}")
    if s0.source_index % 2 or s1.source_index != s0.source_index + 1:
        raise ValueError(
            f"need consecutive (even, odd) frames, got {s0.source_index}, {s1.source_index}"
        )
    arith = arith if arith is not None else FixedArith(FixedPointFormat())
    lo, hi = {}, {}
    for band in BANDS:
        a = s0.band(band).ravel()
        b = s1.band(band).ravel()
        tp = TemporalProcessor(band, arith)
        L = np.zeros(a.size)
        H = np.zeros(a.size)
        n = a.size
        for t in range(n + tp.DEPTH):
            items = [(t, arith.load(a[t]), arith.load(b[t]))] if t < n else None
            out = tp.clock(items)
            for p, l_val, h_val in out or ():
                L[p], H[p] = arith.real(l_val), arith.real(h_val)
        lo[band] = L.reshape(s0.shape)
        hi[band] = H.reshape(s0.shape)
    return GopOutput(SubbandSet(**lo, source_index=s0.source_index),
                     SubbandSet(**hi, source_index=s1.source_index),
                     pair_index=s0.source_index // 2)

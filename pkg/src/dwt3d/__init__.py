"""Cycle-stepped model of a 3-D discrete wavelet transform processor.

A 2-D CDF 9/7 lifting transform (flipped form, shift-add multipliers) runs
on each frame and a Haar step combines frame pairs.  The package holds a
floating-point reference, a clock-level datapath model and an
estimator/CLI front end.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BANDS,
    CDF97,
    FixedPointFormat,
    Frame,
    GopOutput,
    LiftingConstants,
    SubbandSet,
    adopted_constants,
    quantize,
    to_real,
)
from .estimators import DWT3D, SpatialDWT  # noqa: E402
from .metrics import CycleReport, compute_cycles, frame_rate, memory_words, psnr  # noqa: E402
from .system import DatapathConfig, run_pair, transform_video  # noqa: E402

__all__ = [
    "BANDS", "CDF97", "CycleReport", "DWT3D", "DatapathConfig", "FixedPointFormat", "Frame",
    "GopOutput", "LiftingConstants", "SpatialDWT", "SubbandSet", "adopted_constants",
    "compute_cycles", "frame_rate", "memory_words", "psnr", "quantize", "run_pair",
    "to_real", "transform_video",
]

"""Performance model and numerical quality metrics.

Closed-form figures (memory words, cycles per frame pair, frame rate) sit
next to the measurements taken from clock-stepped runs so the two can be
checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

REPORT_SCHEMA = "dwt3d.report/1"

SPATIAL_FILL = 9 + 9  # row PU + column PU pipelines
TEMPORAL_FILL = 3
TP_COUNT = 4
TP_REGISTER_WORDS = 12  # 3 stages x 2 registers, two coefficient positions wide


def memory_words(N: int, P: int) -> int:
    """On-chip words for two spatial processors and four temporal processors."""
    if N <= 0 or P <= 0:
        raise ValueError("N and P must be positive")
    return 2 * (3 * N + 60 * P) + 48


def compute_cycles(width: int, height: int, P: int) -> int:
    """Steady-state clocks to transform one frame pair (both SPs in parallel)."""
    if P <= 0 or width <= 0 or height <= 0:
        raise ValueError("dimensions and P must be positive")
    if width % (2 * P):
        raise ValueError(f"width {width} is not divisible by 2P = {2 * P}")
    return width * height // (2 * P)


def frame_rate(width: int, height: int, P: int, f_clk: float) -> float:
    """Frames per second at clock ``f_clk`` (two frames per frame-pair time)."""
    return f_clk / (compute_cycles(width, height, P) / 2)


def psnr(a, b, peak: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB; ``math.inf`` for identical inputs."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0:
        return math.inf
    return 20.0 * math.log10(peak) - 10.0 * math.log10(mse)


def max_abs_error(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


@dataclass
class CycleReport:
    """Latency, throughput, cycles and storage for one clock-stepped run.

    Latencies count inclusively from the clock of the first input beat to
    the clock a pipeline beat first leaves the column processor (2-D) or a
    temporal processor (3-D).  ``first_coefficient_clock`` is when the first
    *valid* coefficient appears, which is later because the symmetric
    extension needs a few rows of look-ahead.
    """

    latency_2d: int
    latency_3d: int | None
    total_cycles: int
    steady_cycles: int
    coefficients: int
    memory_words: int
    allocation: dict = field(default_factory=dict)
    first_coefficient_clock: int | None = None
    n_processors: int = 1

    @property
    def throughput_steady(self) -> Fraction:
        return Fraction(self.coefficients, self.steady_cycles)

    def frames_per_second(self, f_clk: float) -> float:
        frames = 2 if self.latency_3d is not None else 1
        return f_clk * frames / self.steady_cycles

    @classmethod
    def from_spatial(cls, events, total_cycles, sp, n_processors=1):
        alloc = sp.allocation()
        return cls(
            latency_2d=events.first_cp_output - events.first_input + 1,
            latency_3d=None,
            total_cycles=total_cycles,
            steady_cycles=events.input_beats,
            coefficients=events.coefficients,
            memory_words=sum(alloc["counted"].values()),
            allocation=alloc,
            first_coefficient_clock=events.first_coefficient,
            n_processors=n_processors,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["throughput_steady"] = float(self.throughput_steady)
        return d


def memory_audit(spatial_processors, temporal_processors) -> dict:
    """Sum the itemised storage of a 3-D run's processors."""
    items = {}
    edge = 0
    for n, sp in enumerate(spatial_processors):
        alloc = sp.allocation()
        for k, v in alloc["counted"].items():
            items[f"sp{n}.{k}"] = v
        edge += alloc["edge_lane"]
    for tp in temporal_processors:
        items[f"tp.{tp.band}"] = tp.register_words
    return {"items": items, "total": sum(items.values()), "edge_lanes_uncounted": edge}


def latency_audit(report: CycleReport) -> tuple[int, int | None]:
    """Return the measured latencies, raising if they miss the design values."""
    if report.latency_2d != SPATIAL_FILL:
        raise AssertionError(f"2-D latency {report.latency_2d} != {SPATIAL_FILL}")
    if report.latency_3d is not None and report.latency_3d != SPATIAL_FILL + TEMPORAL_FILL:
        raise AssertionError(f"3-D latency {report.latency_3d} != {SPATIAL_FILL + TEMPORAL_FILL}")
    return report.latency_2d, report.latency_3d


def model_table(width: int, height: int, P: int, clocks=(200e6, 265e6)) -> dict:
    """Closed-form figures for one configuration."""
    side = height
    return {
        "width": width,
        "height": height,
        "P": P,
        "memory_words": memory_words(side, P),
        "compute_cycles_per_pair": compute_cycles(width, height, P),
        "latency_2d": SPATIAL_FILL,
        "latency_3d": SPATIAL_FILL + TEMPORAL_FILL,
        "frame_rate": {str(int(f)): frame_rate(width, height, P, f) for f in clocks},
    }

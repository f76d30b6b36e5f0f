"""One spatial (2-D) processor, clock by clock.

Data path per clock::

    strip scanner -> row processor (P PUs + row memories)
                  -> transpose registers -> column processor (P PUs)
                  -> rearrange unit -> (LL, LH, HL, HH) quadruples

The row processor reads a strip of ``2P + 1`` columns of one row per clock.
Consecutive strips share one column and the image is extended on the right
by one mirrored column, so ``W / 2P`` strips cover a ``W``-wide frame.  The
last PU parks its H1/L1/H2 recurrence values in three ``H``-word row
memories, which PU 0 reads back when the next strip reaches the same row.

Because each lifting step emits the coefficient to its left, PU 0 of the
first strip produces nothing and the last PU of the last strip produces two
coefficients per row.  That extra column runs through an *edge lane*
(transpose register, column PU, rearrange register) that is only busy
during the last strip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CDF97, FixedPointFormat, Frame, LiftingConstants, SubbandSet, adopted_constants
from .datapath import FeedbackRegisters, FixedArith, ProcessingUnit, Token, make_step
from .metrics import CycleReport

RP_DEPTH = ProcessingUnit.DEPTH
CP_DEPTH = ProcessingUnit.DEPTH

# Register words per lane (one row PU + one column PU and their glue).  The
# split is a bookkeeping convention; only the per-lane total of 60 is fixed.
LANE_REGISTER_WORDS = {
    "rp_pu_pipeline": 18,  # 9 stages x 2 words
    "rp_pu_scaling": 2,
    "cp_pu_pipeline": 18,
    "cp_pu_scaling": 2,
    "cp_shift_registers": 14,  # length-2 caches on 7 stage boundaries
    "transpose": 4,  # two H + two L
    "rearrange": 2,  # held (HL, HH)
}
# The edge lane has no row PU of its own; it is kept outside the lane total.
EDGE_LANE_WORDS = sum(
    v for k, v in LANE_REGISTER_WORDS.items() if not k.startswith("rp_")
)


@dataclass(frozen=True)
class StripConfig:
    P: int = 2

    def __post_init__(self):
        if self.P < 1:
            raise ValueError(f"P must be positive, got {self.P}")

    @property
    def strip_width(self) -> int:
        return 2 * self.P + 1

    @property
    def overlap(self) -> int:
        return 1

    def n_strips(self, width: int) -> int:
        return width // (2 * self.P)


@dataclass(frozen=True)
class Beat:
    """One scan clock: row ``row`` of strip ``strip``."""

    clock: int
    strip: int
    row: int
    columns: tuple  # logical columns 2kP .. 2kP+2P
    source_columns: tuple  # same, with the extension column mirrored


def check_dimensions(width: int, height: int, cfg: StripConfig) -> None:
    if width % (2 * cfg.P):
        raise ValueError(f"width {width} is not divisible by 2P = {2 * cfg.P}")
    if width < 4 or height < 8 or height % 2:
        raise ValueError(f"need even height >= 8 and width >= 4, got {width}x{height}")


def strip_schedule(width: int, height: int, cfg: StripConfig = StripConfig()):
    """Scan order: strip by strip, top to bottom, one row per clock."""
    check_dimensions(width, height, cfg)
    P = cfg.P
    clock = 0
    for k in range(cfg.n_strips(width)):
        cols = tuple(range(2 * k * P, 2 * k * P + 2 * P + 1))
        # whole-sample symmetric extension: x[W] = x[W-2]
        src = tuple(c if c < width else 2 * (width - 1) - c for c in cols)
        for r in range(height):
            clock += 1
            yield Beat(clock, k, r, cols, src)


class RowMemories:
    """Memory_alpha / beta / gama: one word per image row each."""

    KINDS = {"H1": "alpha", "L1": "beta", "H2": "gama"}

    def __init__(self, height: int, zero=0):
        self.height = height
        self.mem = {kind: [(None, zero)] * height for kind in self.KINDS}

    @property
    def words(self) -> int:
        return sum(len(v) for v in self.mem.values())

    def fetch(self, row: int) -> dict:
        return {kind: self.mem[kind][row] for kind in self.KINDS}

    def write(self, kind, token, step, value):
        self.mem[kind][token.tag[0]] = (step.m, value)


class _PrefetchSource:
    """PU 0 takes its left neighbour's values from the row memories."""

    def __init__(self, zero):
        self.zero = zero

    def read(self, kind, token, step):
        m, value = token.meta["prefetch"][kind]
        if step.m == 0:
            return self.zero
        if m != step.m - 1:
            raise RuntimeError(f"row memory hazard: {kind} holds step {m}, need {step.m - 1}")
        return value


class _NeighbourSource:
    def __init__(self, left: ProcessingUnit):
        self.left = left

    def read(self, kind, token, step):
        tag, m, value = self.left.latch[kind]
        if tag != token.tag or m != step.m - 1:
            raise RuntimeError(f"PU skew: neighbour has {tag}/{m}, need {token.tag}/{step.m - 1}")
        return value


class RowProcessor:
    def __init__(self, width: int, height: int, cfg: StripConfig, arith,
                 constants: LiftingConstants = CDF97):
        self.cfg = cfg
        self.arith = arith
        self.n_pairs = width // 2
        zero = 0 if arith.quantized else 0.0
        self.memories = RowMemories(height, zero)
        self.pus = []
        for j in range(cfg.P):
            src = _PrefetchSource(zero) if j == 0 else _NeighbourSource(self.pus[j - 1])
            sinks = [self.memories] if j == cfg.P - 1 else []
            self.pus.append(ProcessingUnit(arith, constants, source=src, sinks=sinks))

    def clock(self, beat: Beat | None = None, samples=None):
        """Advance every PU; returns the P tokens leaving stage 9 (or ``None``s).

        ``samples`` are the ``2P + 1`` strip values for ``beat``.
        """
        tokens = [None] * self.cfg.P
        if beat is not None:
            prefetch = self.memories.fetch(beat.row)
            for j in range(self.cfg.P):
                m = beat.strip * self.cfg.P + j
                e_l, o, e_r = samples[2 * j: 2 * j + 3]
                tokens[j] = Token([make_step(m, self.n_pairs, e_l, o, e_r)],
                                  tag=(beat.row, beat.strip),
                                  meta={"prefetch": prefetch})
        return [pu.clock(t) for pu, t in zip(self.pus, tokens)]


@dataclass
class ColumnBeat:
    """A vertical sample pair of one coefficient column, as fed to a column PU."""

    stream: str  # "H" or "L": which row band the column belongs to
    pair: int  # rows 2*pair, 2*pair + 1
    column: int | None  # None marks a beat without data
    values: tuple = ()


class TransposeRegister:
    """Turns per-row (H, L) pairs into alternating vertical H and L pairs."""

    def __init__(self):
        self.held = None
        self.pending = None

    def clock(self, row: int | None, item=None):
        """``item`` is ``(column, H, L)`` or ``None`` for a data-less row beat."""
        out, self.pending = self.pending, None
        if row is None:
            return out
        if row % 2 == 0:
            self.held = (row, item)
            return out
        even_row, even = self.held
        if even_row != row - 1 or out is not None:
            raise RuntimeError("transpose register out of phase")
        i = row // 2
        if even is None or item is None:
            out = ColumnBeat("H", i, None)
            self.pending = ColumnBeat("L", i, None)
        else:
            col = even[0]
            out = ColumnBeat("H", i, col, (even[1], item[1]))
            self.pending = ColumnBeat("L", i, col, (even[2], item[2]))
        return out


class ColumnLane:
    """One column PU plus the input delay that forms vertical triples."""

    def __init__(self, height: int, arith, constants: LiftingConstants = CDF97):
        self.n_pairs = height // 2
        zero = 0 if arith.quantized else 0.0
        self.pu = ProcessingUnit(arith, constants, source=FeedbackRegisters(zero))
        self.delay = {}

    def clock(self, beat: ColumnBeat | None):
        token = None
        if beat is not None:
            steps = []
            if beat.column is not None:
                x0, x1 = beat.values
                i = beat.pair
                prev = self.delay.get(beat.stream)
                self.delay[beat.stream] = (beat.column, x0, x1)
                if i >= 1:
                    if prev is None or prev[0] != beat.column:
                        raise RuntimeError("column lane lost its vertical context")
                    steps.append(make_step(i - 1, self.n_pairs, prev[1], prev[2], x0))
                if i == self.n_pairs - 1:
                    steps.append(make_step(i, self.n_pairs, x0, x1, x0))
            token = Token(steps, tag=(beat.column, beat.stream, beat.pair),
                          stream=beat.stream, meta={"column": beat.column})
        return self.pu.clock(token)


class RearrangeRegister:
    """Holds (HL, HH) until the matching (LL, LH) arrives; emits quadruples."""

    def __init__(self):
        self.held = None

    def clock(self, token: Token | None):
        """Returns ``(beat, quads)``; ``beat`` is False when nothing is emitted."""
        if token is None:
            return False, []
        column, stream, _ = token.tag
        if stream == "H":
            self.held = (column, {v: (lo, hi) for v, hi, lo in token.outputs})
            return False, []
        held_col, held = self.held
        self.held = None
        if held_col != column:
            raise RuntimeError("rearrange register out of phase")
        quads = []
        for v, hi, lo in token.outputs:
            hl, hh = held.pop(v)
            quads.append((v, column, lo, hi, hl, hh))
        if held:
            raise RuntimeError(f"unmatched HL/HH rows {sorted(held)}")
        return True, quads


@dataclass
class SpatialEvents:
    first_input: int | None = None
    first_rp_output: int | None = None
    first_cp_output: int | None = None
    first_quad_beat: int | None = None
    first_coefficient: int | None = None
    last_cp_output: int | None = None
    input_beats: int = 0
    coefficients: int = 0

    def mark(self, name, clock):
        if getattr(self, name) is None:
            setattr(self, name, clock)


class SpatialProcessor:
    """Clock-stepped model of one SP for frames of a fixed size."""

    def __init__(self, width: int, height: int, cfg: StripConfig = StripConfig(),
                 arith=None, constants: LiftingConstants = CDF97):
        check_dimensions(width, height, cfg)
        self.width, self.height, self.cfg = width, height, cfg
        self.arith = arith if arith is not None else FixedArith(FixedPointFormat())
        self.constants = constants
        self.rp = RowProcessor(width, height, cfg, self.arith, constants)
        lanes = cfg.P + 1  # last one is the edge lane
        self.transpose = [TransposeRegister() for _ in range(lanes)]
        self.cp = [ColumnLane(height, self.arith, constants) for _ in range(lanes)]
        self.rearrange = [RearrangeRegister() for _ in range(lanes)]
        self.n_strips = cfg.n_strips(width)

    def allocation(self) -> dict:
        """Storage words, itemised.  ``edge_lane`` is outside the 60-per-lane total."""
        items = {"row_memories": self.rp.memories.words}
        for k, v in LANE_REGISTER_WORDS.items():
            items[k] = v * self.cfg.P
        return {"counted": items, "edge_lane": EDGE_LANE_WORDS}

    def clock(self, beat: Beat | None, samples=None, events: SpatialEvents | None = None,
              clock: int = 0):
        """One clock of the whole SP; returns ``(beat_emitted, quads)``."""
        rp_out = self.rp.clock(beat, samples)
        if events is not None and any(t is not None for t in rp_out):
            events.mark("first_rp_output", clock)
        P = self.cfg.P
        row_items = [None] * (P + 1)
        row = None
        edge_active = False
        for j, tok in enumerate(rp_out):
            if tok is None:
                continue
            row, strip = tok.tag
            m = tok.steps[0].m
            for c, h, lo in tok.outputs:
                if c == m - 1:
                    row_items[j] = (c, h, lo)
                else:
                    row_items[P] = (c, h, lo)
            edge_active = strip == self.n_strips - 1
        any_beat = False
        quads = []
        for lane in range(P + 1):
            lane_row = row if (lane < P or edge_active) else None
            cb = self.transpose[lane].clock(lane_row, row_items[lane])
            done = self.cp[lane].clock(cb)
            if done is not None and events is not None:
                events.mark("first_cp_output", clock)
                events.last_cp_output = clock
            emitted, q = self.rearrange[lane].clock(done)
            any_beat |= emitted
            quads.extend(q)
        return any_beat, quads

    def _samples(self, plane, beat):
        load = self.arith.load
        return [load(plane[beat.row, c]) for c in beat.source_columns]

    def busy(self) -> bool:
        return (any(pu.occupancy for pu in self.rp.pus)
                or any(lane.pu.occupancy for lane in self.cp)
                or any(t.pending is not None for t in self.transpose))


def _to_planes(quads, width, height, dtype):
    bands = np.zeros((4, height // 2, width // 2), dtype=dtype)
    seen = np.zeros((height // 2, width // 2), dtype=int)
    for v, c, ll, lh, hl, hh in quads:
        bands[:, v, c] = (ll, lh, hl, hh)
        seen[v, c] += 1
    if not (seen == 1).all():
        raise RuntimeError("spatial processor did not produce every coefficient exactly once")
    return bands


def level_shifted(frame, level_shift: float = 0.0) -> np.ndarray:
    plane = frame.samples if isinstance(frame, Frame) else np.asarray(frame)
    return np.asarray(plane, dtype=float) - level_shift


def spatial_transform(f, cfg: StripConfig = StripConfig(), arith=None,
                      constants: LiftingConstants | None = None, level_shift: float = 0.0):
    """Run one frame through a fresh SP.

    Returns ``(SubbandSet, CycleReport)``; sub-band values are in real
    units (raw datapath words divided by ``2**frac_bits``).
    """
    arith = arith if arith is not None else FixedArith(FixedPointFormat())
    constants = constants if constants is not None else adopted_constants()
    index = f.index if isinstance(f, Frame) else 0
    plane = level_shifted(f, level_shift)
    h, w = plane.shape
    sp = SpatialProcessor(w, h, cfg, arith, constants)
    events = SpatialEvents()
    quads = []
    clock = 0
    beats = iter(strip_schedule(w, h, cfg))
    beat = next(beats, None)
    while beat is not None or sp.busy():
        clock += 1
        samples = None
        if beat is not None:
            assert beat.clock == clock
            events.mark("first_input", clock)
            events.input_beats += 1
            samples = sp._samples(plane, beat)
        emitted, q = sp.clock(beat, samples, events, clock)
        if emitted:
            events.mark("first_quad_beat", clock)
        if q:
            events.mark("first_coefficient", clock)
        quads.extend(q)
        beat = next(beats, None) if beat is not None else None
    bands = _to_planes(quads, w, h, float)
    bands = np.vectorize(arith.real, otypes=[float])(bands) if arith.quantized else bands
    events.coefficients = 4 * len(quads)
    report = CycleReport.from_spatial(events, clock, sp, n_processors=1)
    return SubbandSet.from_stack(bands, source_index=index), report

"""Fixed-point shift-add processing elements and the nine-stage processing unit.

A processing unit (PU) runs one 1-D 9/7 transform as a stream of lifting
*steps*.  Step ``m`` sees the sample triple ``(x[2m], x[2m+1], x[2m+2])``
and, because every update needs its left neighbour, emits coefficient
``m - 1``:

=====  =========  ==============================================  ========
stage  PE         work                                            reg.
=====  =========  ==============================================  ========
1      shift_PE   ``x[2m] + x[2m+2]``
2      alpha/a    ``a' * x[2m+1]``
3      alpha/b    ``H1[m]``                                        H1 ->
4      beta/a     ``b' * x[2m]``, ``H1[m] + H1[m-1]``
5      beta/b     ``L1[m]``                                        L1 ->
6      gama/a     ``c' * H1[m-1]``, ``L1[m] + L1[m-1]``
7      gama/b     ``H2[m-1]``                                      H2 ->
8      delta/a    ``d' * L1[m-1]``, ``H2[m-1] + H2[m-2]``
9      delta/b    ``L2[m-1]``, then band scaling by k0 / k1
=====  =========  ==============================================  ========

The ``[m-1]`` operands come from a *recurrence source*: feedback registers
for a free-standing PU, length-two shift registers in the column processor,
or the left neighbour PU / row memories in the row processor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import CDF97, FixedPointFormat, LiftingConstants, quantize

SCALE_FRAC_BITS = 16  # precision of the k0/k1/sqrt2 constant multipliers


@dataclass(frozen=True)
class ShiftAddCoefficient:
    """A constant multiplier realised as signed power-of-two terms.

    ``terms`` holds ``(sign, exponent)`` pairs; the multiplier is
    ``sum(sign * 2**exponent)``.
    """

    name: str
    terms: tuple[tuple[int, int], ...]
    original_value: float

    @property
    def adopted_value(self) -> float:
        return sum(s * 2.0 ** e for s, e in self.terms)


A_PRIME = ShiftAddCoefficient("a'", ((-1, -1), (-1, -3), (-1, -7)), CDF97.a_prime)
B_PRIME = ShiftAddCoefficient("b'", ((1, 3), (1, 2)), CDF97.b_prime)
C_PRIME = ShiftAddCoefficient(
    "c'", ((-1, 4), (-1, 2), (-1, 0), (-1, -2), (-1, -3)), CDF97.c_prime
)
D_PRIME = ShiftAddCoefficient("d'", ((1, 1), (1, -1), (1, -4)), CDF97.d_prime)

SHIFT_ADD_COEFFICIENTS = (A_PRIME, B_PRIME, C_PRIME, D_PRIME)


def shift_add_mul(x: int, coeff: ShiftAddCoefficient, fmt: FixedPointFormat) -> int:
    """Multiply a raw value by ``coeff`` using shifts and adds.

    The adder tree keeps the bits shifted out below the LSB and truncates
    once, when the PE result is registered, so the product is exactly
    ``floor(adopted_value * x)`` brought into range.
    """
    low = min(0, min(e for _, e in coeff.terms))
    acc = sum(s * (x << (e - low)) for s, e in coeff.terms)
    return fmt.fit(acc >> -low)


def shift_add_mul_per_term(x: int, coeff: ShiftAddCoefficient, fmt: FixedPointFormat) -> int:
    """Variant that truncates every right-shifted term before adding."""
    return fmt.fit(sum(s * (x << e if e >= 0 else x >> -e) for s, e in coeff.terms))


def constant_mul(x: int, k: float, fmt: FixedPointFormat) -> int:
    """Raw ``x * k`` with ``k`` held to ``SCALE_FRAC_BITS`` fraction bits."""
    kq = round(k * (1 << SCALE_FRAC_BITS))
    return fmt.fit((x * kq) >> SCALE_FRAC_BITS)


class FixedArith:
    """Datapath arithmetic on raw integers; every result is re-quantized."""

    quantized = True

    def __init__(self, fmt: FixedPointFormat):
        self.fmt = fmt

    def add(self, a, b):
        return self.fmt.fit(a + b)

    def sub(self, a, b):
        return self.fmt.fit(a - b)

    def half(self, a):
        return a >> 1

    def mul(self, coeff: ShiftAddCoefficient, x):
        return shift_add_mul(x, coeff, self.fmt)

    def scale(self, k: float, x):
        return constant_mul(x, k, self.fmt)

    def load(self, value: float) -> int:
        return quantize(value, self.fmt)

    def real(self, raw) -> float:
        return raw / (1 << self.fmt.frac_bits)


class FloatArith:
    """Wide-accumulator debug arithmetic: real registers, no quantization.

    Multipliers use the adopted (shift-add realisable) values so results
    line up exactly with the reference run on adopted constants.
    """

    quantized = False

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def half(self, a):
        return a * 0.5

    def mul(self, coeff: ShiftAddCoefficient, x):
        return coeff.adopted_value * x

    def scale(self, k: float, x):
        return k * x

    def load(self, value: float) -> float:
        return float(value)

    def real(self, raw) -> float:
        return float(raw)


def make_arith(fmt: FixedPointFormat | None = None, debug_no_quantize: bool = False):
    return FloatArith() if debug_no_quantize else FixedArith(fmt or FixedPointFormat())


# --- processing elements ------------------------------------------------------

def pe_shift(arith, x_even, x_next_even):
    """First stage: the pair sum that feeds PE_alpha."""
    return arith.add(x_even, x_next_even)


PE_COEFFICIENTS = {"alpha": A_PRIME, "beta": B_PRIME, "gama": C_PRIME, "delta": D_PRIME}


def pe_step(stage: str, arith, operand, cur, prev=None):
    """One lifting PE, as its two pipeline halves.

    Returns ``(output, (product, pair_sum))``: the first half forms the
    shift-add product and the neighbour sum, the second adds them.  For
    ``alpha`` the neighbour sum comes precomputed from :func:`pe_shift`, so
    pass it as ``cur`` and leave ``prev`` unset.
    """
    product = arith.mul(PE_COEFFICIENTS[stage], operand)
    pair = cur if prev is None else arith.add(cur, prev)
    return arith.add(product, pair), (product, pair)


# --- the processing unit ------------------------------------------------------

@dataclass
class Step:
    """One lifting step travelling through a PU.

    ``first``/``second``/``last`` mark the symmetric-extension edges:
    step 0 mirrors ``H1[-1]``, step 1 mirrors ``H2[-1]`` and the last step
    also computes the final coefficient with ``L1[M]`` mirrored.
    """

    m: int
    e_l: object
    o: object
    e_r: object
    first: bool = False
    second: bool = False
    last: bool = False
    v: dict = field(default_factory=dict)


@dataclass
class Token:
    """Whatever occupies a pipeline register: zero or more steps plus tags."""

    steps: list
    tag: object = None  # e.g. (row, strip) in the row processor
    stream: object = 0
    meta: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)  # (index, H, L)


class FeedbackRegisters:
    """Holds the most recent H1, L1 and H2 per stream.

    With one stream this is the PU's own feedback registers; with two
    alternating streams it behaves as the length-two shift registers of the
    column processor.
    """

    def __init__(self, zero=0):
        self.zero = zero
        self.regs = {}

    def read(self, kind, token, step):
        return self.regs.get((token.stream, kind), (None, self.zero))[1]

    def write(self, kind, token, step, value):
        self.regs[(token.stream, kind)] = (step.m, value)

    @property
    def words(self):
        return len(self.regs)


class ProcessingUnit:
    """Nine-stage pipelined 9/7 PU.  ``clock`` advances every stage once."""

    DEPTH = 9

    def __init__(self, arith, constants: LiftingConstants = CDF97, source=None, sinks=()):
        self.arith = arith
        self.k0 = constants.k0
        self.k1 = constants.k1
        zero = 0 if arith.quantized else 0.0
        self.source = source if source is not None else FeedbackRegisters(zero)
        self.sinks = list(sinks)
        if hasattr(self.source, "write"):
            self.sinks.append(self.source)
        self.latch = {}
        self.reset()

    def reset(self):
        self.stages = [None] * self.DEPTH
        self.latch = {}

    @property
    def occupancy(self) -> int:
        return sum(t is not None for t in self.stages)

    def clock(self, token: Token | None = None) -> Token | None:
        """Shift the pipeline; returns the token that completed stage 9."""
        for s in range(self.DEPTH - 1, 0, -1):
            moving = self.stages[s - 1]
            if moving is not None:
                self._stage(s + 1, moving)
            self.stages[s] = moving
        if token is not None:
            self._stage(1, token)
        self.stages[0] = token
        return self.stages[-1]

    def _exchange(self, kind, token, step, value, mirror):
        prev = self.source.read(kind, token, step)
        if mirror:
            prev = value
        self.latch[kind] = (token.tag, step.m, value)
        for sink in self.sinks:
            sink.write(kind, token, step, value)
        return prev

    def _chained(self, kind, token, i, value, mirror):
        """Recurrence exchange; steps after the first chain off their predecessor."""
        step = token.steps[i]
        if i == 0:
            return self._exchange(kind, token, step, value, mirror)
        prev = value if mirror else token.steps[i - 1].v[kind]
        self.latch[kind] = (token.tag, step.m, value)
        for sink in self.sinks:
            sink.write(kind, token, step, value)
        return prev

    def _stage(self, n, token):
        ar = self.arith
        for i, st in enumerate(token.steps):
            v = st.v
            if n == 1:
                v["pair"] = pe_shift(ar, st.e_l, st.e_r)
            elif n == 2:
                v["a_prod"] = ar.mul(A_PRIME, st.o)
            elif n == 3:
                v["H1"] = ar.add(v["a_prod"], v["pair"])
                v["H1p"] = self._chained("H1", token, i, v["H1"], st.first)
            elif n == 4:
                v["b_prod"] = ar.mul(B_PRIME, st.e_l)
                v["h1_sum"] = ar.add(v["H1"], v["H1p"])
            elif n == 5:
                v["L1"] = ar.add(v["b_prod"], v["h1_sum"])
                v["L1p"] = self._chained("L1", token, i, v["L1"], False)
            elif n == 6:
                v["c_prod"] = ar.mul(C_PRIME, v["H1p"])
                v["l1_sum"] = ar.add(v["L1"], v["L1p"])
                if st.last:
                    v["c_prod_t"] = ar.mul(C_PRIME, v["H1"])
                    v["l1_sum_t"] = ar.add(v["L1"], v["L1"])
            elif n == 7:
                v["H2"] = ar.add(v["c_prod"], v["l1_sum"])
                # the edge mirror H2[-1] = H2[0] is applied on step 1 only
                v["H2p"] = self._chained("H2", token, i, v["H2"], st.second)
                if st.last:
                    v["H2t"] = ar.add(v["c_prod_t"], v["l1_sum_t"])
            elif n == 8:
                v["d_prod"] = ar.mul(D_PRIME, v["L1p"])
                v["h2_sum"] = ar.add(v["H2"], v["H2p"])
                if st.last:
                    v["d_prod_t"] = ar.mul(D_PRIME, v["L1"])
                    v["h2_sum_t"] = ar.add(v["H2t"], v["H2"])
            elif n == 9:
                v["L2"] = ar.add(v["d_prod"], v["h2_sum"])
                if st.m >= 1:
                    token.outputs.append(
                        (st.m - 1, ar.scale(self.k0, v["H2"]), ar.scale(self.k1, v["L2"]))
                    )
                if st.last:
                    l2t = ar.add(v["d_prod_t"], v["h2_sum_t"])
                    token.outputs.append(
                        (st.m, ar.scale(self.k0, v["H2t"]), ar.scale(self.k1, l2t))
                    )


def make_step(m: int, n_pairs: int, e_l, o, e_r) -> Step:
    return Step(m, e_l, o, e_r, first=m == 0, second=m == 1, last=m == n_pairs - 1)


def pu_clock(state: ProcessingUnit, triple=None, m: int = 0, n_pairs: int | None = None):
    """Clock a free-standing PU once.

    ``triple`` is ``(x[2m], x[2m+1], x[2m+2])`` or ``None`` for a bubble.
    Returns ``(state, outputs)`` where ``outputs`` is the list of
    ``(index, H, L)`` carried by the token leaving stage 9, or ``None`` when
    no token leaves this clock.
    """
    token = None
    if triple is not None:
        n = n_pairs if n_pairs is not None else m + 2
        token = Token([make_step(m, n, *triple)])
    done = state.clock(token)
    return state, (None if done is None else done.outputs)


def pu_transform_1d(x, arith, constants: LiftingConstants = CDF97):
    """Stream a whole signal through one PU; returns ``(L, H, trace)``.

    ``trace`` lists ``(clock, outputs)`` for every token leaving the PU.
    """
    samples = [arith.load(s) for s in x]
    n = len(samples)
    if n % 2 or n < 4:
        raise ValueError(f"signal length must be even and >= 4, got {n}")
    pairs = n // 2
    pu = ProcessingUnit(arith, constants)
    L = [None] * pairs
    H = [None] * pairs
    trace = []
    clock = 0
    for m in range(pairs + pu.DEPTH - 1):
        clock += 1
        triple = None
        if m < pairs:
            right = samples[2 * m + 2] if 2 * m + 2 < n else samples[n - 2]
            triple = (samples[2 * m], samples[2 * m + 1], right)
        _, outs = pu_clock(pu, triple, m, pairs)
        if outs is not None:
            trace.append((clock, outs))
            for k, h, lo in outs:
                H[k], L[k] = h, lo
    return L, H, trace


def approximation_bound(coeff: ShiftAddCoefficient, x: int) -> float:
    """Worst-case raw error of :func:`shift_add_mul` against the exact product."""
    return abs(coeff.adopted_value - coeff.original_value) * abs(x) + 1


def coefficient_table():
    """``(name, original, adopted)`` rows of the multiplier substitutions."""
    return [(c.name, c.original_value, c.adopted_value) for c in SHIFT_ADD_COEFFICIENTS]



"""Shared domain types, lifting constants and the fixed-point number system."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class LiftingConstants:
    """CDF 9/7 lifting constants and their flipped/scaling derivatives.

    ``a_prime`` .. ``d_prime`` are the reciprocal (flipped) lifting
    coefficients; ``k0`` scales the high band and ``k1`` the low band.
    Derived fields left as ``None`` are computed from the lifting constants.
    """

    alpha: float = -1.586134342
    beta: float = -0.052980118
    gamma: float = 0.8829110762
    delta: float = 0.4435068522
    zeta: float = 1.149604398
    a_prime: float | None = None
    b_prime: float | None = None
    c_prime: float | None = None
    d_prime: float | None = None
    k0: float | None = None
    k1: float | None = None

    def __post_init__(self):
        derived = self.exact_derived()
        for name, value in derived.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)

    def exact_derived(self) -> dict[str, float]:
        a, b, g, d, z = self.alpha, self.beta, self.gamma, self.delta, self.zeta
        return {
            "a_prime": 1.0 / a,
            "b_prime": 1.0 / (a * b),
            "c_prime": 1.0 / (b * g),
            "d_prime": 1.0 / (g * d),
            "k0": a * b * g / z,
            "k1": a * b * g * d * z,
        }

    def check(self, tol: float = 1e-12) -> None:
        """Raise ``ValueError`` if any derived field strays from its formula."""
        for name, value in self.exact_derived().items():
            if abs(getattr(self, name) - value) > tol:
                raise ValueError(f"{name}={getattr(self, name)!r} != {value!r}")

    @property
    def flipped(self) -> tuple[float, float, float, float]:
        return (self.a_prime, self.b_prime, self.c_prime, self.d_prime)

    def with_flipped(self, a, b, c, d) -> "LiftingConstants":
        """Copy with replaced flipped coefficients; ``k0``/``k1`` are kept."""
        return replace(self, a_prime=a, b_prime=b, c_prime=c, d_prime=d)


CDF97 = LiftingConstants()


def band_gains(c: LiftingConstants) -> tuple[float, float]:
    """Unscaled gains of the flipped lifting: low band at DC, high at Nyquist.

    Returns ``(L2 for x = 1, 1, ...; H2 for x = 1, -1, ...)`` in the interior
    of the signal, before ``k1``/``k0`` are applied.
    """
    a, b, cc, d = c.flipped
    h1 = a + 2.0
    l1 = b + 2.0 * h1
    h2 = cc * h1 + 2.0 * l1
    dc = d * l1 + 2.0 * h2
    h1 = -a + 2.0
    l1 = b + 2.0 * h1
    nyquist = cc * h1 + 2.0 * l1
    return dc, nyquist


def adopted_constants(base: LiftingConstants = CDF97, scaling: str = "compensated") -> LiftingConstants:
    """Constants whose flipped coefficients are the shift-add realisable ones.

    ``scaling="published"`` keeps ``k0``/``k1`` from the exact constants.
    ``"compensated"`` rescales them so the approximate filter bank keeps
    the exact bank's DC gain (low band) and Nyquist gain (high band); the
    rounded ``b'`` alone moves the low-band DC gain by about 2.3%.
    """
    from .datapath import SHIFT_ADD_COEFFICIENTS

    approx = base.with_flipped(*(c.adopted_value for c in SHIFT_ADD_COEFFICIENTS))
    if scaling == "published":
        return approx
    if scaling != "compensated":
        raise ValueError(f"unknown scaling {scaling!r}")
    dc_exact, ny_exact = band_gains(base)
    dc, ny = band_gains(approx)
    return replace(approx, k1=base.k1 * dc_exact / dc, k0=base.k0 * ny_exact / ny)


@dataclass(frozen=True)
class FixedPointFormat:
    """Two's complement fixed-point format.

    Values are carried as raw integers scaled by ``2**frac_bits``.  Rounding
    is truncation toward negative infinity (what an arithmetic right shift
    does); overflow saturates unless ``overflow="wrap"``.
    """

    word_bits: int = 14
    frac_bits: int = 0
    overflow: str = "saturate"

    def __post_init__(self):
        if not 0 <= self.frac_bits < self.word_bits:
            raise ValueError(
                f"need 0 <= frac_bits < word_bits, got {self.frac_bits}/{self.word_bits}"
            )
        if self.overflow not in ("saturate", "wrap"):
            raise ValueError(f"unknown overflow policy {self.overflow!r}")

    @property
    def min_raw(self) -> int:
        return -(1 << (self.word_bits - 1))

    @property
    def max_raw(self) -> int:
        return (1 << (self.word_bits - 1)) - 1

    @property
    def lsb(self) -> float:
        return 2.0 ** -self.frac_bits

    def fit(self, raw: int) -> int:
        """Bring an integer into range using the overflow policy."""
        if self.overflow == "wrap":
            span = 1 << self.word_bits
            return (raw - self.min_raw) % span + self.min_raw
        return min(max(raw, self.min_raw), self.max_raw)


def quantize(x: float, fmt: FixedPointFormat) -> int:
    """Largest raw value not exceeding ``x * 2**frac_bits``, brought into range."""
    scaled = x * (1 << fmt.frac_bits)
    if math.isinf(scaled):
        return fmt.max_raw if scaled > 0 else fmt.min_raw
    return fmt.fit(math.floor(scaled))


def to_real(raw: int, fmt: FixedPointFormat) -> float:
    return raw / (1 << fmt.frac_bits)


def _plane(samples) -> np.ndarray:
    arr = np.asarray(samples)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D sample grid, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class Frame:
    """One grayscale plane, ``samples[row, column]``."""

    samples: np.ndarray
    index: int = 0

    def __post_init__(self):
        arr = _plane(self.samples)
        if arr.size == 0:
            raise ValueError("empty frame")
        if self.index < 0:
            raise ValueError("frame index must be nonnegative")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]


BANDS = ("ll", "lh", "hl", "hh")


@dataclass(frozen=True, eq=False)
class SubbandSet:
    """The four quarter-size planes of one single-level 2-D transform.

    First letter is the horizontal (row) filter, second the vertical one.
    """

    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray
    source_index: int = 0
    level: int = field(default=1)

    def __post_init__(self):
        shapes = {_plane(getattr(self, b)).shape for b in BANDS}
        if len(shapes) != 1:
            raise ValueError(f"sub-band shapes differ: {sorted(shapes)}")
        if self.level != 1:
            raise ValueError("only single-level decompositions are supported")

    @property
    def shape(self) -> tuple[int, int]:
        return self.ll.shape

    def band(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def stack(self) -> np.ndarray:
        """Bands as one ``(4, H/2, W/2)`` array in LL, LH, HL, HH order."""
        return np.stack([getattr(self, b) for b in BANDS])

    @classmethod
    def from_stack(cls, arr, source_index: int = 0) -> "SubbandSet":
        arr = np.asarray(arr)
        return cls(*arr[:4], source_index=source_index)


@dataclass(frozen=True, eq=False)
class GopOutput:
    """Temporal low (L-frame) and high (H-frame) sub-band sets of a frame pair."""

    l_frame: SubbandSet
    h_frame: SubbandSet
    pair_index: int = 0

    def __post_init__(self):
        if self.l_frame.shape != self.h_frame.shape:
            raise ValueError("L-frame and H-frame dimensions differ")

"""Double-precision reference transforms.

The 9/7 transform is the flipped lifting form: each predict/update step is
divided through by the product of the preceding lifting constants so the
multiplier sits off the accumulation path, and the final band scaling
(``k0``, ``k1``) restores the standard normalisation.  Boundaries use
whole-sample symmetric extension (``x[-1] = x[1]``, ``x[N] = x[N-2]``).

:func:`conv97_oracle_1d` is an independent check: it derives the analysis
filter taps by composing the lifting steps as linear forms and convolves.
"""

from __future__ import annotations

import math

import numpy as np

from .core import CDF97, BANDS, Frame, LiftingConstants, SubbandSet

SQRT2 = math.sqrt(2.0)
INV_SQRT2 = 1.0 / SQRT2


def _signal(x, min_len: int = 4) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D signal, got shape {x.shape}")
    if len(x) % 2 or len(x) < min_len:
        raise ValueError(f"signal length must be even and >= {min_len}, got {len(x)}")
    return x


def _next(v: np.ndarray) -> np.ndarray:
    """``v[k+1]`` with the last element mirrored onto itself."""
    return np.concatenate([v[1:], v[-1:]])


def _prev(v: np.ndarray) -> np.ndarray:
    """``v[k-1]`` with the first element mirrored onto itself."""
    return np.concatenate([v[:1], v[:-1]])


def lift97_forward_1d(x, c: LiftingConstants = CDF97):
    """Forward 9/7 transform of one even-length signal; returns ``(L, H)``."""
    x = _signal(x)
    a, b, cc, d = c.flipped
    xe, xo = x[0::2], x[1::2]
    h1 = a * xo + (xe + _next(xe))
    l1 = b * xe + (h1 + _prev(h1))
    h2 = cc * h1 + (_next(l1) + l1)
    l2 = d * l1 + (h2 + _prev(h2))
    return c.k1 * l2, c.k0 * h2


def lift97_inverse_1d(L, H, c: LiftingConstants = CDF97) -> np.ndarray:
    """Undo :func:`lift97_forward_1d` by running the steps backwards."""
    L = np.asarray(L, dtype=float)
    H = np.asarray(H, dtype=float)
    if L.shape != H.shape or L.ndim != 1:
        raise ValueError(f"L and H must be 1-D of equal length, got {L.shape} / {H.shape}")
    if len(L) < 2:
        raise ValueError("need at least two coefficient pairs")
    a, b, cc, d = c.flipped
    h2 = H / c.k0
    l2 = L / c.k1
    l1 = (l2 - (h2 + _prev(h2))) / d
    h1 = (h2 - (_next(l1) + l1)) / cc
    xe = (l1 - (h1 + _prev(h1))) / b
    xo = (h1 - (xe + _next(xe))) / a
    x = np.empty(2 * len(L))
    x[0::2] = xe
    x[1::2] = xo
    return x


def _rows_forward(plane: np.ndarray, c: LiftingConstants):
    lo, hi = zip(*(lift97_forward_1d(row, c) for row in plane))
    return np.array(lo), np.array(hi)


def _cols_forward(plane: np.ndarray, c: LiftingConstants):
    lo, hi = _rows_forward(plane.T, c)
    return lo.T, hi.T


def _check_even(plane: np.ndarray) -> np.ndarray:
    plane = np.asarray(plane, dtype=float)
    if plane.ndim != 2:
        raise ValueError(f"expected a 2-D plane, got shape {plane.shape}")
    h, w = plane.shape
    if h % 2 or w % 2 or h < 4 or w < 4:
        raise ValueError(f"frame dimensions must be even and >= 4, got {w}x{h}")
    return plane


def lift97_forward_2d(f, c: LiftingConstants = CDF97) -> SubbandSet:
    """Rows first, then columns of each row band."""
    index = f.index if isinstance(f, Frame) else 0
    plane = _check_even(f.samples if isinstance(f, Frame) else f)
    row_lo, row_hi = _rows_forward(plane, c)
    ll, lh = _cols_forward(row_lo, c)
    hl, hh = _cols_forward(row_hi, c)
    return SubbandSet(ll, lh, hl, hh, source_index=index)


def lift97_inverse_2d(s: SubbandSet, c: LiftingConstants = CDF97) -> np.ndarray:
    def cols_inverse(lo, hi):
        return np.array([lift97_inverse_1d(l, h, c) for l, h in zip(lo.T, hi.T)]).T

    row_lo = cols_inverse(s.ll, s.lh)
    row_hi = cols_inverse(s.hl, s.hh)
    return np.array([lift97_inverse_1d(l, h, c) for l, h in zip(row_lo, row_hi)])


def haar_forward(x0, x1):
    """Lifting Haar: predict ``x1 - x0``, update by half, then normalise.

    Equal to ``((x0 + x1)/sqrt2, (x1 - x0)/sqrt2)``.  Works elementwise on
    arrays.
    """
    h = x1 - x0
    lo = x0 + h * 0.5
    return SQRT2 * lo, INV_SQRT2 * h


def haar_inverse(L, H):
    h = H * SQRT2
    lo = L * INV_SQRT2
    x0 = lo - h * 0.5
    return x0, x0 + h


def haar_forward_sets(s0: SubbandSet, s1: SubbandSet):
    """Elementwise Haar across two sub-band sets; returns (L-set, H-set)."""
    lo, hi = {}, {}
    for b in BANDS:
        lo[b], hi[b] = haar_forward(s0.band(b), s1.band(b))
    return (SubbandSet(**lo, source_index=s0.source_index),
            SubbandSet(**hi, source_index=s1.source_index))


# --- convolution oracle -----------------------------------------------------

class _Form(dict):
    """Linear form over input samples: ``{offset: weight}``."""

    def __add__(self, other):
        out = _Form(self)
        for k, v in other.items():
            out[k] = out.get(k, 0.0) + v
        return out

    def __mul__(self, s):
        return _Form({k: v * s for k, v in self.items()})

    __rmul__ = __mul__

    def shift(self, n):
        return _Form({k + n: v for k, v in self.items()})


def analysis_filters(c: LiftingConstants = CDF97):
    """Analysis taps from the (unflipped) lifting factorisation.

    Returns ``(low, high)`` as dicts ``{offset: tap}``: ``L[n] = sum
    low[k] * x[2n+k]`` and ``H[n] = sum high[k] * x[2n+1+k]``.
    """
    one = lambda k: _Form({k: 1.0})  # noqa: E731
    # d/s forms for the output at pair n, expressed relative to x[2n]
    d1 = one(1) + c.alpha * (one(0) + one(2))
    s1 = one(0) + c.beta * (d1 + d1.shift(-2))
    d2 = d1 + c.gamma * (s1 + s1.shift(2))
    s2 = s1 + c.delta * (d2 + d2.shift(-2))
    low = {k: v * c.zeta for k, v in s2.items() if v}
    high = {k - 1: v / c.zeta for k, v in d2.items() if v}
    return dict(sorted(low.items())), dict(sorted(high.items()))


def _mirror(i: int, n: int) -> int:
    period = 2 * (n - 1)
    i %= period
    return period - i if i >= n else i


def conv97_oracle_1d(x, c: LiftingConstants = CDF97):
    """Direct filter-bank evaluation with symmetric extension and decimation."""
    x = _signal(x, min_len=10)
    n = len(x)
    low, high = analysis_filters(c)
    L = np.array([sum(t * x[_mirror(2 * k + o, n)] for o, t in low.items())
                  for k in range(n // 2)])
    H = np.array([sum(t * x[_mirror(2 * k + 1 + o, n)] for o, t in high.items())
                  for k in range(n // 2)])
    return L, H


def dc_gain(c: LiftingConstants = CDF97) -> float:
    """Low-pass gain on a constant signal (sum of the analysis low taps)."""
    return sum(analysis_filters(c)[0].values())

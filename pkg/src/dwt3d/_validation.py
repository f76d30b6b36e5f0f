"""Input checks shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from .core import FixedPointFormat


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value <= 0:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_geometry(width: int, height: int, P: int) -> None:
    """Dimension rules of the strip scanner: ``2P | width``, even ``height >= 8``."""
    width = check_positive_int(width, "width")
    height = check_positive_int(height, "height")
    P = check_positive_int(P, "P")
    if width % (2 * P):
        raise ValueError(f"width {width} must be divisible by 2P = {2 * P}")
    if width < 4:
        raise ValueError(f"width must be at least 4, got {width}")
    if height % 2 or height < 8:
        raise ValueError(f"height must be even and at least 8, got {height}")


def check_format(word_bits, frac_bits, overflow: str = "saturate") -> FixedPointFormat:
    check_positive_int(word_bits, "word_bits")
    if isinstance(frac_bits, bool) or not isinstance(frac_bits, numbers.Integral):
        raise ValueError(f"frac_bits must be an integer, got {frac_bits!r}")
    return FixedPointFormat(int(word_bits), int(frac_bits), overflow)


def check_frames(X, *, even: bool = False, P: int | None = None) -> np.ndarray:
    """Return ``X`` as a float ``(n_frames, height, width)`` array.

    A single 2-D plane is promoted to one frame.  With ``even=True`` the
    frame count must be even (temporal pairs); with ``P`` the geometry is
    checked against the strip scanner.
    """
    arr = np.asarray(X)
    if arr.dtype == object or not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"frames must be numeric, got dtype {arr.dtype}")
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3:
        raise ValueError(f"expected (n_frames, height, width), got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("no frames")
    arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("frames contain NaN or infinite samples")
    if even and arr.shape[0] % 2:
        raise ValueError(f"need an even number of frames, got {arr.shape[0]}")
    if P is not None:
        check_geometry(arr.shape[2], arr.shape[1], P)
    elif arr.shape[1] % 2 or arr.shape[2] % 2:
        raise ValueError(f"frame dimensions must be even, got {arr.shape[1:]}")
    return arr

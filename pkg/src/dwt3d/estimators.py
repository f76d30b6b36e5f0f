"""scikit-learn style front end.

Both transformers take frames shaped ``(n_frames, height, width)``.

* :class:`SpatialDWT` returns ``(n_frames, 4, height/2, width/2)``.
* :class:`DWT3D` returns ``(n_pairs, 2, 4, height/2, width/2)``, where axis 1
  holds the L-frame and the H-frame.

``mode="reference"`` runs the floating-point lifting. ``mode="datapath"``
clocks the hardware model, and its cycle reports are kept in
``last_reports_``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_format, check_frames, check_positive_int
from .core import CDF97, SubbandSet, adopted_constants
from .reference import haar_forward_sets, haar_inverse, lift97_forward_2d, lift97_inverse_2d
from .spatial import StripConfig, spatial_transform
from .system import DatapathConfig, run_pair

MODES = ("reference", "datapath")


class _DWTBase(TransformerMixin, BaseEstimator):
    def __init__(self, P=2, word_bits=14, frac_bits=0, overflow="saturate", mode="reference",
                 debug_no_quantize=False, level_shift=128.0, scaling="compensated",
                 reference_constants="exact"):
        self.P = P
        self.word_bits = word_bits
        self.frac_bits = frac_bits
        self.overflow = overflow
        self.mode = mode
        self.debug_no_quantize = debug_no_quantize
        self.level_shift = level_shift
        self.scaling = scaling
        self.reference_constants = reference_constants

    _even = False

    def _check_params(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.reference_constants not in ("exact", "adopted"):
            raise ValueError(f"reference_constants must be 'exact' or 'adopted', "
                             f"got {self.reference_constants!r}")
        check_positive_int(self.P, "P")
        adopted_constants(scaling=self.scaling)  # rejects unknown scaling
        return check_format(self.word_bits, self.frac_bits, self.overflow)

    def _config(self) -> DatapathConfig:
        return DatapathConfig(P=self.P, fmt=self._check_params(),
                              debug_no_quantize=self.debug_no_quantize,
                              scaling=self.scaling, level_shift=float(self.level_shift))

    def _constants(self):
        if self.reference_constants == "exact":
            return CDF97
        return adopted_constants(scaling=self.scaling)

    def _validate(self, X):
        P = self.P if self.mode == "datapath" else None
        return check_frames(X, even=self._even, P=P)

    def fit(self, X, y=None):
        self._check_params()
        X = self._validate(X)
        self.frame_shape_ = X.shape[1:]
        self.n_features_in_ = X.shape[1] * X.shape[2]
        return self

    def _checked(self, X):
        check_is_fitted(self, "frame_shape_")
        self._check_params()
        X = self._validate(X)
        if X.shape[1:] != self.frame_shape_:
            raise ValueError(f"fitted on frames of shape {self.frame_shape_}, got {X.shape[1:]}")
        return X


class SpatialDWT(_DWTBase):
    """Single-level 2-D CDF 9/7 transform of each frame."""

    def transform(self, X):
        X = self._checked(X)
        if self.mode == "reference":
            c = self._constants()
            return np.stack([lift97_forward_2d(f - self.level_shift, c).stack() for f in X])
        cfg = self._config()
        out, reports = [], []
        for f in X:
            s, rep = spatial_transform(f, StripConfig(self.P), cfg.arith(), cfg.constants(),
                                       level_shift=cfg.level_shift)
            out.append(s.stack())
            reports.append(rep)
        self.last_reports_ = reports
        return np.stack(out)

    def inverse_transform(self, Y):
        """Exact inverse of the reference transform (any mode's output is accepted)."""
        check_is_fitted(self, "frame_shape_")
        Y = np.asarray(Y, dtype=float)
        if Y.ndim != 4 or Y.shape[1] != 4:
            raise ValueError(f"expected (n, 4, h, w) coefficients, got shape {Y.shape}")
        c = self._constants()
        return np.stack([lift97_inverse_2d(SubbandSet.from_stack(y), c) + self.level_shift
                         for y in Y])


class DWT3D(_DWTBase):
    """2-D CDF 9/7 of each frame followed by a Haar step across frame pairs."""

    _even = True

    def transform(self, X):
        X = self._checked(X)
        out = []
        if self.mode == "reference":
            c = self._constants()
            for i in range(0, len(X), 2):
                s0 = lift97_forward_2d(X[i] - self.level_shift, c)
                s1 = lift97_forward_2d(X[i + 1] - self.level_shift, c)
                lo, hi = haar_forward_sets(s0, s1)
                out.append(np.stack([lo.stack(), hi.stack()]))
            return np.stack(out)
        cfg = self._config()
        reports = []
        for i in range(0, len(X), 2):
            run = run_pair(X[i], X[i + 1], cfg, i // 2)
            out.append(np.stack([run.gop.l_frame.stack(), run.gop.h_frame.stack()]))
            reports.append(run.report)
        self.last_reports_ = reports
        return np.stack(out)

    def inverse_transform(self, Y):
        check_is_fitted(self, "frame_shape_")
        Y = np.asarray(Y, dtype=float)
        if Y.ndim != 5 or Y.shape[1:3] != (2, 4):
            raise ValueError(f"expected (n_pairs, 2, 4, h, w) coefficients, got shape {Y.shape}")
        c = self._constants()
        frames = []
        for lo, hi in Y:
            s0, s1 = haar_inverse(lo, hi)
            for s in (s0, s1):
                frames.append(lift97_inverse_2d(SubbandSet.from_stack(s), c) + self.level_shift)
        return np.stack(frames)

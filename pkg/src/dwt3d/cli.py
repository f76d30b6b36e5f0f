"""Command-line front end: ``dwt3d {transform,verify,report}``.

Input is headerless planar 8-bit grayscale, frame after frame.  Each frame
pair produces eight planes (L-frame and H-frame, four bands each):

* datapath words as little-endian two's complement (``<i2``, or ``<i4``
  above 16-bit words), raw units of ``2**-frac_bits``;
* reference coefficients as little-endian ``float32``.

Every run writes ``report.json``.  Exit codes: 0 success, 2 configuration
error, 3 I/O error, 4 verification threshold failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import check_format, check_geometry, check_positive_int
from .core import BANDS, CDF97, FixedPointFormat, adopted_constants
from .metrics import (
    REPORT_SCHEMA,
    compute_cycles,
    frame_rate,
    max_abs_error,
    memory_words,
    psnr,
)
from .reference import haar_forward_sets, lift97_forward_2d
from .system import DatapathConfig, run_pair

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_THRESHOLD = 0, 2, 3, 4
TARGET_FPS = 60.0


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    width: int
    height: int
    frames: int
    P: int
    fmt: FixedPointFormat
    mode: str
    debug_no_quantize: bool
    input: Path | None
    outdir: Path | None
    level_shift: float = 128.0
    scaling: str = "compensated"
    reference_constants: str = "adopted"

    def validate(self) -> "RunConfig":
        try:
            check_geometry(self.width, self.height, self.P)
            check_positive_int(self.frames, "frames")
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.frames % 2:
            raise ConfigError(f"frames must be even (temporal pairs), got {self.frames}")
        return self

    def datapath(self) -> DatapathConfig:
        return DatapathConfig(self.P, self.fmt, self.debug_no_quantize, self.scaling,
                              self.level_shift)

    def reference_lifting(self):
        if self.reference_constants == "exact":
            return CDF97
        return adopted_constants(scaling=self.scaling)

    def to_dict(self) -> dict:
        return {
            "width": self.width, "height": self.height, "frames": self.frames, "P": self.P,
            "word_bits": self.fmt.word_bits, "frac_bits": self.fmt.frac_bits,
            "overflow": self.fmt.overflow, "mode": self.mode,
            "debug_no_quantize": self.debug_no_quantize, "level_shift": self.level_shift,
            "scaling": self.scaling, "reference_constants": self.reference_constants,
            "input": None if self.input is None else str(self.input),
            "outdir": None if self.outdir is None else str(self.outdir),
        }


# --- argument parsing ---------------------------------------------------------

def _common(p: argparse.ArgumentParser, pixels: bool = True):
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--pu", type=int, default=2, help="processing units per processor (P)")
    p.add_argument("--word-bits", type=int, default=14)
    p.add_argument("--frac-bits", type=int, default=0)
    p.add_argument("--overflow", choices=("saturate", "wrap"), default="saturate")
    p.add_argument("--clock-hz", type=float, action="append",
                   help="clock for frame-rate figures (repeatable; default 200e6 and 265e6)")
    if pixels:
        p.add_argument("--frames", type=int, required=True)
        p.add_argument("--input", type=Path, required=True)
        p.add_argument("--outdir", type=Path, required=True)
        p.add_argument("--debug-no-quantize", action="store_true")
        p.add_argument("--level-shift", type=float, default=128.0)
        p.add_argument("--scaling", choices=("compensated", "published"), default="compensated")
        p.add_argument("--reference-constants", choices=("adopted", "exact"), default="adopted",
                       help="lifting constants of the reference model")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dwt3d", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="transform a raw video, write sub-band planes")
    _common(t)
    t.add_argument("--mode", choices=("reference", "datapath", "compare"), default="datapath")

    v = sub.add_parser("verify", help="compare datapath against reference")
    _common(v)
    v.add_argument("--mode", choices=("compare",), default="compare")
    v.add_argument("--min-psnr", type=float, default=40.0)
    v.add_argument("--max-abs-error", type=float, default=None,
                   help="default: 0 with --debug-no-quantize, otherwise unchecked")

    r = sub.add_parser("report", help="closed-form performance figures")
    _common(r, pixels=False)
    r.add_argument("--probe", type=int, metavar="N", default=None,
                   help="also clock an NxN zero frame pair and attach measurements")
    return parser


def _config(args) -> RunConfig:
    try:
        fmt = check_format(args.word_bits, args.frac_bits, args.overflow)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        width=args.width, height=args.height, frames=args.frames, P=args.pu, fmt=fmt,
        mode=args.mode, debug_no_quantize=args.debug_no_quantize, input=args.input,
        outdir=args.outdir, level_shift=args.level_shift, scaling=args.scaling,
        reference_constants=args.reference_constants,
    ).validate()


def _clocks(args):
    return args.clock_hz or [200e6, 265e6]


# --- I/O ----------------------------------------------------------------------

def read_frames(cfg: RunConfig) -> np.ndarray:
    expected = cfg.width * cfg.height * cfg.frames
    try:
        data = cfg.input.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read {cfg.input}: {exc.strerror or exc}") from None
    if len(data) != expected:
        raise OSError(f"{cfg.input}: expected {expected} bytes "
                      f"({cfg.frames} frames of {cfg.width}x{cfg.height}), found {len(data)}")
    return np.frombuffer(data, dtype=np.uint8).reshape(cfg.frames, cfg.height, cfg.width)


def _raw_dtype(fmt: FixedPointFormat):
    return np.dtype("<i2") if fmt.word_bits <= 16 else np.dtype("<i4")


def write_planes(outdir: Path, pair: int, gop_stacks, kind: str, fmt: FixedPointFormat,
                 quantized: bool) -> list[str]:
    """Write 8 planes for one pair; returns the relative file names."""
    names = []
    for label, stack in zip("LH", gop_stacks):
        for band, plane in zip(BANDS, stack):
            name = f"pair{pair:04d}_{label}_{band}.{kind}.raw"
            if kind == "datapath" and quantized:
                raw = np.rint(plane * (1 << fmt.frac_bits)).astype(_raw_dtype(fmt))
            else:
                raw = plane.astype("<f4")
            (outdir / name).write_bytes(raw.tobytes())
            names.append(name)
    return names


def write_report(outdir: Path, report: dict) -> Path:
    path = outdir / "report.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return path


# --- commands -----------------------------------------------------------------

def _reference_pair(f0, f1, cfg: RunConfig):
    c = cfg.reference_lifting()
    s0 = lift97_forward_2d(f0 - cfg.level_shift, c)
    s1 = lift97_forward_2d(f1 - cfg.level_shift, c)
    lo, hi = haar_forward_sets(s0, s1)
    return lo.stack(), hi.stack()


def _psnr_field(a, b):
    value = psnr(a, b)
    return None if math.isinf(value) else value  # null: identical


def _compare(dp, ref) -> dict:
    bands = {}
    for i, label in enumerate("LH"):
        for j, band in enumerate(BANDS):
            bands[f"{label}_{band}"] = {
                "max_abs_error": max_abs_error(dp[i][j], ref[i][j]),
                "psnr_db": _psnr_field(dp[i][j], ref[i][j]),
            }
    return {
        "bands": bands,
        "max_abs_error": max_abs_error(dp, ref),
        "psnr_db": _psnr_field(dp, ref),
    }


def _base_report(command: str, cfg: RunConfig | None = None) -> dict:
    report = {"schema": REPORT_SCHEMA, "command": command, "version": __version__}
    if cfg is not None:
        report["config"] = cfg.to_dict()
    return report


def run_pairs(cfg: RunConfig, frames: np.ndarray, modes, outdir: Path | None):
    """Transform every pair; yields one report entry per pair."""
    dp_cfg = cfg.datapath()
    quantized = dp_cfg.arith().quantized
    for p in range(cfg.frames // 2):
        f0, f1 = frames[2 * p].astype(float), frames[2 * p + 1].astype(float)
        entry = {"pair": p, "files": []}
        dp = ref = None
        if "datapath" in modes:
            run = run_pair(f0, f1, dp_cfg, p)
            dp = np.stack([run.gop.l_frame.stack(), run.gop.h_frame.stack()])
            entry["cycles"] = run.report.to_dict()
            if outdir is not None:
                entry["files"] += write_planes(outdir, p, dp, "datapath", cfg.fmt, quantized)
        if "reference" in modes:
            ref = np.stack(_reference_pair(f0, f1, cfg))
            if outdir is not None:
                entry["files"] += write_planes(outdir, p, ref, "reference", cfg.fmt, False)
        if dp is not None and ref is not None:
            entry["comparison"] = _compare(dp, ref)
        yield entry, dp, ref


def _stats(pairs_dp, pairs_ref) -> dict:
    dp = np.stack(pairs_dp)
    ref = np.stack(pairs_ref)
    return {"max_abs_error": max_abs_error(dp, ref), "psnr_db": _psnr_field(dp, ref)}


def cmd_transform(args) -> int:
    cfg = _config(args)
    frames = read_frames(cfg)
    _make_outdir(cfg.outdir)
    modes = ("datapath", "reference") if cfg.mode == "compare" else (cfg.mode,)
    report = _base_report("transform", cfg)
    if cfg.debug_no_quantize:
        dp_format = {"dtype": "<f4", "raw": False}
    else:
        dp_format = {"dtype": _raw_dtype(cfg.fmt).str, "raw": True,
                     "frac_bits": cfg.fmt.frac_bits}
    report["output_format"] = {
        "datapath": dp_format,
        "reference": {"dtype": "<f4", "raw": False},
        "plane_shape": [cfg.height // 2, cfg.width // 2],
    }
    report["pairs"] = [entry for entry, _, _ in run_pairs(cfg, frames, modes, cfg.outdir)]
    write_report(cfg.outdir, report)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    frames = read_frames(cfg)
    _make_outdir(cfg.outdir)
    max_err = args.max_abs_error
    if max_err is None and cfg.debug_no_quantize:
        max_err = 0.0
    report = _base_report("verify", cfg)
    pairs, dps, refs = [], [], []
    for entry, dp, ref in run_pairs(cfg, frames, ("datapath", "reference"), None):
        pairs.append(entry)
        dps.append(dp)
        refs.append(ref)
    overall = _stats(dps, refs)
    psnr_ok = overall["psnr_db"] is None or overall["psnr_db"] >= args.min_psnr
    err_ok = max_err is None or overall["max_abs_error"] <= max_err
    report["pairs"] = pairs
    report["overall"] = overall
    report["thresholds"] = {"min_psnr_db": args.min_psnr, "max_abs_error": max_err}
    report["passed"] = bool(psnr_ok and err_ok)
    write_report(cfg.outdir, report)
    status = "PASS" if report["passed"] else "FAIL"
    print(f"{status}: max_abs_error={overall['max_abs_error']:.6g} "
          f"psnr_db={overall['psnr_db'] if overall['psnr_db'] is not None else 'inf'}")
    return EXIT_OK if report["passed"] else EXIT_THRESHOLD


def performance_table(width: int, height: int, P: int, clocks) -> dict:
    return {
        "memory_words": memory_words(height, P),
        "compute_cycles_per_pair": compute_cycles(width, height, P),
        "frame_rate": [
            {"clock_hz": f, "fps": frame_rate(width, height, P, f),
             "meets_60fps": frame_rate(width, height, P, f) >= TARGET_FPS}
            for f in clocks
        ],
    }


def cmd_report(args) -> int:
    try:
        check_geometry(args.width, args.height, args.pu)
        fmt = check_format(args.word_bits, args.frac_bits, args.overflow)
        if args.probe is not None:
            check_geometry(args.probe, args.probe, args.pu)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = _base_report("report")
    report["config"] = {"width": args.width, "height": args.height, "P": args.pu,
                        "word_bits": fmt.word_bits, "frac_bits": fmt.frac_bits}
    report["model"] = performance_table(args.width, args.height, args.pu, _clocks(args))
    if args.probe is not None:
        n = args.probe
        zero = np.zeros((n, n))
        run = run_pair(zero, zero, DatapathConfig(P=args.pu, fmt=fmt))
        report["probe"] = {"N": n, **run.report.to_dict()}
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def _make_outdir(path: Path):
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {path}: {exc.strerror or exc}") from None


COMMANDS = {"transform": cmd_transform, "verify": cmd_verify, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # usage errors exit with status 2
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"dwt3d: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"dwt3d: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

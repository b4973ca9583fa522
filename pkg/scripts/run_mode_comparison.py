#!/usr/bin/env python3
"""Compare the luma-only and cross-channel QP rules on one clip.

Runs both rules over the same frames in-process (sharing the activity
pass) and prints a histogram of per-CU QP differences plus a summary:

    python scripts/run_mode_comparison.py --input clip.yuv \
        --width 176 --height 144 --qp 32 --cu-size 16
"""

import argparse
from collections import Counter
from pathlib import Path

from perceptqp import ChromaFormat, Mode, QpConfig, Rounding, TMode, VideoFormat, qp_map_from_activity
from perceptqp.activity import frame_activity
from perceptqp.cli import load_frames


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", type=Path, required=True)
    parser.add_argument("--width", type=int, required=True)
    parser.add_argument("--height", type=int, required=True)
    parser.add_argument("--bit-depth", type=int, choices=(8, 10), default=8)
    parser.add_argument("--chroma", choices=("444", "422", "420"), default="420")
    parser.add_argument("--frames", type=int, default=None)
    parser.add_argument("--skip", type=int, default=0)
    parser.add_argument("--cu-size", type=int, choices=(16, 32, 64), default=64)
    parser.add_argument("--qp", type=int, default=32)
    parser.add_argument("--qp-range", type=int, default=6)
    parser.add_argument("--t-mode", choices=("luma", "cross"), default="cross")
    parser.add_argument("--rounding", choices=("nearest", "ceiling"), default="nearest")
    args = parser.parse_args()

    fmt = VideoFormat(args.width, args.height, args.bit_depth, ChromaFormat(args.chroma))
    base = QpConfig(
        slice_qp=args.qp,
        mode=Mode.ADAPTIVE_QP,
        qp_range=args.qp_range,
        cu_size=args.cu_size,
        t_mode=TMode(args.t_mode),
        rounding=Rounding(args.rounding),
    )

    histogram: Counter[int] = Counter()
    total = 0
    for index, frame in load_frames(args.input, fmt, args.skip, args.frames):
        activity = frame_activity(frame, args.cu_size)
        luma_map = qp_map_from_activity(fmt, activity, base, frame_index=index)
        cross_cfg = QpConfig(
            slice_qp=args.qp,
            mode=Mode.CBAQ,
            qp_range=args.qp_range,
            cu_size=args.cu_size,
            t_mode=TMode(args.t_mode),
            rounding=Rounding(args.rounding),
        )
        cross_map = qp_map_from_activity(fmt, activity, cross_cfg, frame_index=index)
        for a, b in zip(luma_map.flat(), cross_map.flat()):
            histogram[b - a] += 1
            total += 1

    print("delta_qp(cross - luma),count,share")
    for delta in sorted(histogram):
        count = histogram[delta]
        print(f"{delta:+d},{count},{count / total:.4f}")
    moved = sum(count for delta, count in histogram.items() if delta != 0)
    mean_abs = sum(abs(delta) * count for delta, count in histogram.items()) / total
    print(f"# cus={total} changed={moved} ({moved / total:.1%}) mean_abs_delta={mean_abs:.4f}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Convert a video into an IVSSRAW1 stream via ffmpeg.

    ffmpeg_to_raw.py input.mp4 output.raw [--fps 2] [--max-width 320]

ffmpeg decodes to a pipe of binary PPM frames; each frame is appended to the
output after a 16-byte IVSSRAW1 header. With --ppm-stdin the PPM frames are
read from stdin instead of running ffmpeg.
"""

import argparse
import struct
import subprocess
import sys


def read_token(f):
    tok = b""
    while True:
        c = f.read(1)
        if not c:
            return tok or None
        if c == b"#":
            f.readline()
            continue
        if c.isspace():
            if tok:
                return tok
            continue
        tok += c


def ppm_frames(f):
    while True:
        magic = read_token(f)
        if magic is None:
            return
        if magic != b"P6":
            raise SystemExit(f"expected a P6 frame, got {magic!r}")
        w, h, maxval = (int(read_token(f)) for _ in range(3))
        if maxval != 255:
            raise SystemExit("only 8-bit PPM frames are supported")
        data = f.read(w * h * 3)
        if len(data) != w * h * 3:
            raise SystemExit("truncated frame in ffmpeg output")
        yield w, h, data


def convert(frames, out):
    size = None
    count = 0
    for w, h, data in frames:
        if size is None:
            size = (w, h)
            out.write(b"IVSSRAW1" + struct.pack("<II", w, h))
        elif size != (w, h):
            raise SystemExit("frame size changed mid-stream")
        out.write(data)
        count += 1
    if count == 0:
        raise SystemExit("no frames decoded")
    return count


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("input", nargs="?")
    ap.add_argument("output")
    ap.add_argument("--fps", type=float, default=2.0)
    ap.add_argument("--max-width", type=int, default=320)
    ap.add_argument("--ppm-stdin", action="store_true")
    args = ap.parse_args()

    with open(args.output, "wb") as out:
        if args.ppm_stdin:
            n = convert(ppm_frames(sys.stdin.buffer), out)
        else:
            vf = f"fps={args.fps},scale='min({args.max_width},iw)':-2"
            cmd = ["ffmpeg", "-loglevel", "error", "-i", args.input, "-vf", vf,
                   "-f", "image2pipe", "-vcodec", "ppm", "-"]
            proc = subprocess.Popen(cmd, stdout=subprocess.PIPE)
            n = convert(ppm_frames(proc.stdout), out)
            if proc.wait() != 0:
                raise SystemExit("ffmpeg failed")
    print(f"{n} frames written to {args.output}", file=sys.stderr)


if __name__ == "__main__":
    main()

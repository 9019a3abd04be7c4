#!/usr/bin/env python3
"""Regenerate the small data fixtures under data/.

flare48.pgm        48x48 solar-flare-like image (bright loop on a dim disk)
phantom16.pgm      16x16 smooth phantom used by the desk-scale trend checks
bike_saturdays.csv hour,day,count table: 24 hours x 3 Saturdays, one gap
"""
import argparse
import pathlib

import numpy as np


def write_pgm(path, img, max_value=255):
    img = np.clip(np.rint(img), 0, max_value).astype(int)
    h, w = img.shape
    lines = ["P2", f"{w} {h}", str(max_value)]
    lines += [" ".join(str(v) for v in row) for row in img]
    path.write_text("\n".join(lines) + "\n")


def flare(n=48):
    y, x = np.mgrid[0:n, 0:n] / (n - 1.0)
    r = np.hypot(x - 0.5, y - 0.55)
    disk = 40.0 * np.sqrt(np.clip(1.0 - (r / 0.45) ** 2, 0.0, None))
    loop_r = np.hypot(x - 0.45, (y - 0.62) * 1.6)
    loop = 180.0 * np.exp(-((loop_r - 0.22) ** 2) / 0.0015) * (y < 0.62)
    core = 230.0 * np.exp(-((x - 0.63) ** 2 + (y - 0.5) ** 2) / 0.004)
    return np.clip(20.0 + disk + loop + core, 0, 255)


def phantom(n=16):
    y, x = np.mgrid[0:n, 0:n] / (n - 1.0)
    blob = 150.0 * np.exp(-((x - 0.35) ** 2 + (y - 0.4) ** 2) / 0.05)
    ridge = 80.0 * np.exp(-((x - 0.7) ** 2) / 0.02)
    return 30.0 + blob + ridge + 40.0 * y


def bike(rng):
    hours = np.arange(24)
    base = 20 + 180 * np.exp(-((hours - 14.0) ** 2) / 18.0)
    rows = ["hour,day,count"]
    for d, scale in enumerate([1.0, 0.8, 1.15], start=1):
        for h in hours:
            if d == 2 and h == 5:
                continue  # missing record
            rows.append(f"{h + 1},{d},{rng.poisson(scale * base[h])}")
    return "\n".join(rows) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=pathlib.Path(__file__).resolve().parents[1] / "data")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240611)
    write_pgm(out / "flare48.pgm", flare())
    write_pgm(out / "phantom16.pgm", phantom())
    (out / "bike_saturdays.csv").write_text(bike(rng))


if __name__ == "__main__":
    main()

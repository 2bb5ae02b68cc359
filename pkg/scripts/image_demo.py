"""Transmit a grayscale test image through the simulated link.

Generates a gradient test card if no input image is given, sends it through
the RRAM link at the requested SNR, and writes the recovered PGM next to it.
"""

import argparse

import numpy as np

from imbb.pgm import read_pgm, write_pgm
from imbb.pipeline import FrameConfig, transmit_image


def test_card(size: int = 64) -> np.ndarray:
    y, x = np.mgrid[0:size, 0:size]
    img = (x * 255 / (size - 1) + y * 255 / (size - 1)) / 2
    img[size // 4: size // 2, size // 4: size // 2] = 255
    img[size // 2: 3 * size // 4, size // 2: 3 * size // 4] = 0
    return img.astype(np.uint8)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", default=None, help="input PGM (default: test card)")
    ap.add_argument("--output", default="recovered.pgm")
    ap.add_argument("--snr-db", type=float, default=20.0)
    ap.add_argument("--mode", default="rram",
                    choices=["digital", "rram", "rram_ideal"])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if args.input is None:
        img = test_card()
        write_pgm("testcard.pgm", img)
        print("wrote testcard.pgm")
    else:
        img = read_pgm(args.input)

    cfg = FrameConfig(n_c=64, n_t=2, n_r=2, pilots=2, symbols_per_frame=36,
                      snr_db=args.snr_db, mode=args.mode, k=2, seed=args.seed)
    recovered, metrics = transmit_image(img, cfg)
    write_pgm(args.output, recovered)
    print(f"wrote {args.output}")
    print(f"MER {metrics.mer_db:.2f} dB, BER {metrics.ber:.3e}")


if __name__ == "__main__":
    main()

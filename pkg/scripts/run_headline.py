"""Full-size frame with the default configuration; prints the ledger.

This is the headline experiment: 1024 sub-carriers, 4x4 antennas, 2240 OFDM
symbols, flat Rayleigh fading, write-with-verification programming on the
TaOx preset.  Takes several minutes.
"""

import argparse
import time

from imbb.pipeline import FrameConfig, run_frame


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--snr-db", type=float, default=20.0)
    ap.add_argument("--scheme", default="with_verification")
    args = ap.parse_args()

    cfg = FrameConfig(mode="rram", seed=args.seed, snr_db=args.snr_db,
                      scheme=args.scheme)
    t0 = time.time()
    res = run_frame(cfg)
    wall = time.time() - t0

    print(f"wall time            {wall:.1f} s")
    print(f"MER                  {res.metrics.mer_db:.2f} dB")
    print(f"BER                  {res.metrics.ber:.3e}")
    print(f"programming latency  {res.latency_program * 1e6:.2f} us")
    print(f"data latency         {res.latency_data * 1e6:.2f} us")
    print(f"total latency        {res.latency * 1e3:.4f} ms")
    print(f"throughput           {res.throughput / 1e9:.1f} Gb/s")
    print(f"programming energy   {res.energy_program * 1e3:.4f} mJ")
    print(f"data energy          {res.energy_data * 1e3:.4f} mJ")
    print(f"energy efficiency    {res.energy_efficiency / 1e12:.2f} Tb/J")


if __name__ == "__main__":
    main()

"""Detector programming latency/energy vs antenna count for both schemes."""

import argparse
import os

from imbb.cli import run_command


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--values", default="2,4,8,16")
    ap.add_argument("--trials", type=int, default=10)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    base = "n_c = 64\nsymbols_per_frame = 16\nk = 2\n"
    cfg_path = os.path.join(args.outdir, "antenna_config.toml")
    for scheme in ("with_verification", "without_verification"):
        with open(cfg_path, "w") as f:
            f.write(base + f'mode = "rram"\nscheme = "{scheme}"\n')
        out = os.path.join(args.outdir, f"antennas_{scheme}.csv")
        rc = run_command(["sweep-antennas", "--config", cfg_path,
                          "--values", args.values,
                          "--trials", str(args.trials), "--out", out])
        if rc != 0:
            raise SystemExit(rc)
        print(f"wrote {out}")


if __name__ == "__main__":
    main()

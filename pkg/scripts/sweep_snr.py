"""MER/BER vs SNR at desk scale for digital and both RRAM schemes.

Writes one CSV per mode/scheme combination into --outdir.
"""

import argparse
import os

from imbb.cli import run_command


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--values", default="10,15,20,25,30")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    combos = [
        ("digital", "with_verification", "digital.csv"),
        ("rram", "with_verification", "rram_wwv.csv"),
        ("rram", "without_verification", "rram_wwov.csv"),
    ]
    base = ("n_c = 64\nn_t = 4\nn_r = 4\npilots = 4\n"
            "symbols_per_frame = 32\nk = 2\n")
    cfg_path = os.path.join(args.outdir, "sweep_config.toml")
    for mode, scheme, name in combos:
        with open(cfg_path, "w") as f:
            f.write(base + f'mode = "{mode}"\nscheme = "{scheme}"\n')
        out = os.path.join(args.outdir, name)
        rc = run_command(["sweep-snr", "--config", cfg_path,
                          "--values", args.values,
                          "--trials", str(args.trials),
                          "--jobs", str(args.jobs), "--out", out])
        if rc != 0:
            raise SystemExit(rc)
        print(f"wrote {out}")


if __name__ == "__main__":
    main()

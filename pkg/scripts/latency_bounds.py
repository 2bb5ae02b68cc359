"""Monte Carlo write latency against the closed-form bounds, per preset."""

import argparse
import os

from imbb.cli import run_command


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--n", default="2,4,8,16,32")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--discrete", action="store_true",
                    help="also run the discrete crossbar simulation")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    for preset in ("ta_taox_pt", "fefet", "ftj_10ns", "ftj_630ps"):
        cfg_path = os.path.join(args.outdir, "bounds_config.toml")
        with open(cfg_path, "w") as f:
            f.write(f'preset = "{preset}"\n')
        out = os.path.join(args.outdir, f"bounds_{preset}.csv")
        argv = ["bounds", "--config", cfg_path, "--n", args.n,
                "--trials", str(args.trials), "--out", out]
        if args.discrete:
            argv.append("--discrete")
        rc = run_command(argv)
        if rc != 0:
            raise SystemExit(rc)
        print(f"wrote {out}")


if __name__ == "__main__":
    main()

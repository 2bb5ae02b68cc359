"""Experiment runner CLI.

Subcommands: simulate, sweep-snr, sweep-antennas, program-trace, bounds,
image, gray, cost.  Outputs are CSV files (sorted on their key columns, full
double precision, `inf` only in MER columns) or binary PGM images.  Exit
codes: 0 success, 1 validation error, 2 runtime failure.  The default config
path can be set via the IMBB_CONFIG environment variable.
"""

import argparse
import dataclasses
import sys

import numpy as np

from imbb import latency_theory, modem, pipeline
from imbb.config import ConfigError, emit_config, parse_config
from imbb.crossbar import encode_targets
from imbb.device import CellState, apply_write_pulse, preset, read_conductance
from imbb.pgm import read_pgm, write_pgm


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == float("inf"):
            return "inf"
        return repr(v)
    return str(v)


def _write_csv(path, header, rows, sort_keys):
    rows = sorted(rows, key=lambda r: tuple(r[k] for k in sort_keys))
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(_fmt(r[h]) for h in header))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _load_cfg(args):
    cfg = parse_config(getattr(args, "config", None))
    if getattr(args, "seed", None) is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def cmd_simulate(args):
    cfg = _load_cfg(args)
    res = pipeline.run_frame(cfg)
    rows = [{"snr_db": cfg.snr_db, "scheme": cfg.scheme, "mode": cfg.mode,
             "trial": 0, "mer_db": res.metrics.mer_db, "ber": res.metrics.ber}]
    _write_csv(args.out, ["snr_db", "scheme", "mode", "trial", "mer_db", "ber"],
               rows, ["snr_db", "trial"])
    if args.effective_config:
        with open(args.effective_config, "w") as f:
            f.write(emit_config(cfg))
    return 0


def cmd_sweep_snr(args):
    cfg = _load_cfg(args)
    values = [float(v) for v in args.values.split(",")]
    rows = pipeline.sweep(cfg, "snr", values, args.trials, jobs=args.jobs)
    _write_csv(args.out, ["snr_db", "scheme", "mode", "trial", "mer_db", "ber"],
               rows, ["snr_db", "trial"])
    return 0


def cmd_sweep_antennas(args):
    cfg = _load_cfg(args)
    values = [int(v) for v in args.values.split(",")]
    rows = pipeline.sweep(cfg, "antennas", values, args.trials, jobs=args.jobs)
    _write_csv(args.out, ["n_antennas", "scheme", "latency_s", "energy_j", "ci95"],
               rows, ["n_antennas"])
    return 0


def cmd_program_trace(args):
    cfg = _load_cfg(args)
    model = preset(cfg.preset)
    rng = np.random.default_rng(cfg.seed)
    targets = encode_targets(np.array([[args.value]]), model, sigma_value=1.0)
    tol = model.g_range / (2 * model.n_states)
    rows = []
    for side, tgt in (("plus", targets.targets_plus[0, 0]),
                      ("minus", targets.targets_minus[0, 0])):
        cell = CellState(model.g_min)
        latency = energy = 0.0
        idx = 0
        if cfg.scheme == "without_verification":
            n = int(round((tgt - model.g_min) / model.g_step))
            for _ in range(n):
                energy += model.v_set ** 2 * cell.conductance * model.pulse_width
                cell = apply_write_pulse(cell, "potentiate", model, rng)
                latency += model.pulse_width
                idx += 1
                rows.append({"pulse_index": idx, "target": tgt, "side": side,
                             "voltage_v": model.v_set,
                             "conductance_s": cell.conductance,
                             "latency_s": latency, "energy_j": energy})
        else:
            for _ in range(50 * model.n_states):
                g_read = read_conductance(cell, model, rng)
                latency += model.pulse_width
                energy += model.v_read ** 2 * cell.conductance * model.pulse_width
                idx += 1
                rows.append({"pulse_index": idx, "target": tgt, "side": side,
                             "voltage_v": model.v_read,
                             "conductance_s": cell.conductance,
                             "latency_s": latency, "energy_j": energy})
                if abs(g_read - tgt) <= tol:
                    break
                pol = "potentiate" if g_read < tgt else "depress"
                v = model.v_set if pol == "potentiate" else model.v_reset
                energy += v ** 2 * cell.conductance * model.pulse_width
                cell = apply_write_pulse(cell, pol, model, rng)
                latency += model.pulse_width
                idx += 1
                rows.append({"pulse_index": idx, "target": tgt, "side": side,
                             "voltage_v": v, "conductance_s": cell.conductance,
                             "latency_s": latency, "energy_j": energy})
    _write_csv(args.out, ["pulse_index", "target", "side", "voltage_v",
                          "conductance_s", "latency_s", "energy_j"],
               rows, ["side", "pulse_index"])
    return 0


def cmd_bounds(args):
    cfg = _load_cfg(args)
    model = preset(cfg.preset)
    rng = np.random.default_rng(cfg.seed)
    values = [int(v) for v in args.n.split(",")]
    rows = []
    for n in values:
        for scheme in latency_theory.SCHEMES:
            for mode in ("analytic",) if not args.discrete else ("analytic", "discrete"):
                mean, ci = latency_theory.mc_write_latency(
                    n, n, model, scheme, mode, args.trials, rng)
                b = latency_theory.latency_bound(scheme, n, n, model)
                rows.append({"n": n, "scheme": scheme, "mode": mode,
                             "mc_mean": mean, "ci95": ci, "bound": b.bound})
    _write_csv(args.out, ["n", "scheme", "mode", "mc_mean", "ci95", "bound"],
               rows, ["n", "scheme", "mode"])
    return 0


def cmd_image(args):
    cfg = _load_cfg(args)
    img = read_pgm(args.input)
    recovered, metrics = pipeline.transmit_image(img, cfg)
    write_pgm(args.output, recovered)
    sys.stdout.write(f"mer_db={_fmt(metrics.mer_db)} ber={_fmt(metrics.ber)}\n")
    return 0


def cmd_gray(args):
    w = args.width
    if w < 1 or w > 16:
        raise ValueError("width must be in 1..16")
    for v in range(2 ** w):
        bits = np.array([int(b) for b in format(v, f"0{w}b")])
        gray = modem.bin_to_gray(bits)
        sys.stdout.write("".join(map(str, bits)) + " "
                         + "".join(map(str, gray)) + "\n")
    return 0


def cmd_cost(args):
    cfg = _load_cfg(args)
    profile = pipeline.PROFILES[args.profile]
    lat, en = pipeline.digital_cost(cfg, profile)
    _write_csv(args.out, ["profile", "latency_s", "energy_j"],
               [{"profile": profile.name, "latency_s": lat, "energy_j": en}],
               ["profile"])
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="imbb", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("--config", default=None)
        sp.add_argument("--seed", type=int, default=None)
        if out:
            sp.add_argument("--out", default="-")

    sp = sub.add_parser("simulate", help="run one frame")
    common(sp)
    sp.add_argument("--effective-config", default=None)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("sweep-snr", help="MER/BER vs SNR")
    common(sp)
    sp.add_argument("--values", default="10,15,20,25,30")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_sweep_snr)

    sp = sub.add_parser("sweep-antennas", help="latency/energy vs array size")
    common(sp)
    sp.add_argument("--values", default="2,4,8")
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_sweep_antennas)

    sp = sub.add_parser("program-trace", help="per-pulse programming trace")
    common(sp)
    sp.add_argument("--value", type=float, default=1.5)
    sp.set_defaults(fn=cmd_program_trace)

    sp = sub.add_parser("bounds", help="write-latency bounds vs Monte Carlo")
    common(sp)
    sp.add_argument("--n", default="2,4,8,16,32")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--discrete", action="store_true")
    sp.set_defaults(fn=cmd_bounds)

    sp = sub.add_parser("image", help="transmit a PGM image through the link")
    common(sp, out=False)
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.set_defaults(fn=cmd_image)

    sp = sub.add_parser("gray", help="binary/Gray conversion table")
    sp.add_argument("--width", type=int, default=4)
    sp.set_defaults(fn=cmd_gray)

    sp = sub.add_parser("cost", help="digital baseline cost")
    common(sp)
    sp.add_argument("--profile", default="combined_65nm")
    sp.set_defaults(fn=cmd_cost)
    return p


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ConfigError, ValueError, KeyError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    except Exception as e:
        sys.stderr.write(f"runtime failure: {e}\n")
        return 2


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()

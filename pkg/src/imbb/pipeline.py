"""End-to-end MIMO-OFDM frame simulation and cost accounting.

A frame is symbols_per_frame OFDM symbols over n_c sub-carriers; the first
`pilots` symbols carry a unitary pilot for LS channel estimation, the rest
carry 16-QAM payload.  The receiver DFT and the MIMO detector run either as
exact math (digital mode) or on simulated crossbars (rram / rram_ideal).

Accounting rules: detector-array programming opens the frame (flat fading
programs one bank; frequency-selective mode programs per-sub-carrier banks
in parallel hardware, latency = max, energy = sum); the DFT array is a
static operator programmed once outside the frame; the data phase costs one
read pulse for the DFT plus one for the detector per OFDM symbol, with
per-sub-carrier banks operating in parallel.  The per-frame noise variance
is calibrated per channel realization,
    sigma_n^2 = n_t / (linear(snr) * tr((H^H H)^-1)),
so the post-equalization (ZF) MER equals the configured SNR; this is the
convention that makes the digital baseline track SNR.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from imbb import channel as chan
from imbb import mimo, modem, ofdm
from imbb.crossbar import defection_correct
from imbb.device import preset as device_preset


@dataclass
class FrameConfig:
    n_c: int = 1024
    n_t: int = 4
    n_r: int = 4
    pilots: int = 4
    symbols_per_frame: int = 2240  # 14 x 160
    snr_db: float = 20.0
    scheme: str = "with_verification"
    mode: str = "rram"  # digital | rram | rram_ideal
    detector: str = "lmmse"  # lmmse | zf
    k: int = 2  # device copies per signed value (two per value in hardware)
    preset: str = "ta_taox_pt"
    p_stuck_on: float = 0.0
    p_stuck_off: float = 0.0
    defection_correction: bool = True
    flat: bool = True
    cp_len: int = None  # defaults to n_c // 8
    seed: int = 0

    def __post_init__(self):
        if self.cp_len is None:
            self.cp_len = self.n_c // 8
        self.validate()

    def validate(self):
        checks = [
            ("n_c", self.n_c >= 2 and (self.n_c & (self.n_c - 1)) == 0),
            ("n_t", self.n_t >= 1),
            ("n_r", self.n_r >= self.n_t),
            ("pilots", self.pilots == self.n_t),
            ("symbols_per_frame", self.symbols_per_frame > self.pilots),
            ("scheme", self.scheme in ("with_verification", "without_verification")),
            ("mode", self.mode in ("digital", "rram", "rram_ideal")),
            ("detector", self.detector in ("lmmse", "zf")),
            ("k", self.k >= 1),
            ("p_stuck_on", 0 <= self.p_stuck_on <= 1),
            ("p_stuck_off", 0 <= self.p_stuck_off <= 1
             and self.p_stuck_on + self.p_stuck_off <= 1),
            ("cp_len", 0 <= self.cp_len < self.n_c),
            ("snr_db", self.snr_db == math.inf or math.isfinite(self.snr_db)),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"invalid config value for {name}")


@dataclass
class FrameResult:
    metrics: modem.Metrics
    latency_program: float
    latency_data: float
    energy_program: float
    energy_data: float
    throughput: float         # bits/s over the whole frame
    energy_efficiency: float  # bits/J
    rx_bits: np.ndarray = field(default=None, repr=False)
    tx_bits: np.ndarray = field(default=None, repr=False)

    @property
    def latency(self) -> float:
        return self.latency_program + self.latency_data

    @property
    def energy(self) -> float:
        return self.energy_program + self.energy_data


def snr_linear(snr_db: float) -> float:
    return math.inf if math.isinf(snr_db) else 10.0 ** (snr_db / 10.0)


def calibrated_noise_var(h, snr_db: float, n_t: int) -> float:
    """Per-frame noise power making post-ZF MER equal the configured SNR."""
    if math.isinf(snr_db):
        return 0.0
    h = np.asarray(h, dtype=complex)
    tr = float(np.real(np.trace(np.linalg.inv(h.conj().T @ h))))
    return n_t / (snr_linear(snr_db) * tr)


def _device_model(cfg: FrameConfig):
    model = device_preset(cfg.preset)
    return model.noiseless() if cfg.mode == "rram_ideal" else model


def run_frame(cfg: FrameConfig, rng: np.random.Generator = None,
              payload_bits: np.ndarray = None,
              dft_op: "ofdm.DftOperator" = None,
              keep_bits: bool = False) -> FrameResult:
    """Simulate one frame; returns metrics and the latency/energy ledger.

    dft_op lets callers reuse the (static) receiver DFT operator across
    frames; payload_bits overrides the random payload (image transmission).
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    model = _device_model(cfg)
    n_c, n_t, n_r = cfg.n_c, cfg.n_t, cfg.n_r
    n_data = cfg.symbols_per_frame - cfg.pilots
    n_bits = n_data * n_c * n_t * 4

    if payload_bits is None:
        bits = rng.integers(0, 2, n_bits)
    else:
        bits = np.asarray(payload_bits, dtype=int)
        if bits.size != n_bits:
            raise ValueError(f"payload must be exactly {n_bits} bits")

    # transmit grid (n_t, n_c, M): pilot slots then QAM payload
    syms = modem.qam16_modulate(bits).reshape(n_data, n_c, n_t)
    x_freq = np.empty((n_t, n_c, cfg.symbols_per_frame), dtype=complex)
    p = chan.unitary_pilot(n_t)
    x_freq[:, :, :cfg.pilots] = p[:, None, :]
    x_freq[:, :, cfg.pilots:] = syms.transpose(2, 1, 0)

    ch = chan.sample_channel(n_t, n_r, n_c, cfg.flat, rng)
    if cfg.flat:
        noise_var = calibrated_noise_var(ch.matrices[0], cfg.snr_db, n_t)
        y_clean = np.einsum("ij,jkm->ikm", ch.matrices[0], x_freq)
    else:
        nv = np.array([calibrated_noise_var(ch.matrices[k], cfg.snr_db, n_t)
                       for k in range(n_c)])
        noise_var = float(nv.mean())
        y_clean = np.einsum("kij,jkm->ikm", ch.matrices, x_freq)

    # exact transmit IDFT + cyclic prefix, channel noise in the time domain
    t_sig = np.fft.ifft(y_clean, axis=1) * math.sqrt(n_c)
    t_sig = np.concatenate([t_sig[:, n_c - cfg.cp_len:, :], t_sig], axis=1)
    if noise_var > 0:
        s = math.sqrt(noise_var / 2.0)
        t_sig = t_sig + s * (rng.standard_normal(t_sig.shape)
                             + 1j * rng.standard_normal(t_sig.shape))
    t_sig = t_sig[:, cfg.cp_len:, :]

    # receiver DFT
    energy_data = 0.0
    if cfg.mode == "digital":
        y_freq = np.fft.fft(t_sig, axis=1) / math.sqrt(n_c)
    else:
        if dft_op is None:
            dft_op, _ = ofdm.build_dft_operator(
                n_c, "forward", model, cfg.scheme, rng,
                k=cfg.k, exact=cfg.mode == "rram_ideal")
        defect_map = None
        if cfg.p_stuck_on > 0 or cfg.p_stuck_off > 0:
            defect_map = dft_op.array.inject_defects(
                cfg.p_stuck_on, cfg.p_stuck_off, rng)
        e0 = dft_op.array.read_energy
        cols = t_sig.transpose(1, 0, 2).reshape(n_c, n_r * cfg.symbols_per_frame)
        out = ofdm.dft_apply_block(dft_op, cols, rng)
        if defect_map is not None and cfg.defection_correction:
            corr = _dft_correction(dft_op, defect_map, cols)
            out = out + corr
        y_freq = out.reshape(n_c, n_r, cfg.symbols_per_frame).transpose(1, 0, 2)
        energy_data += dft_op.array.read_energy - e0

    # LS channel estimate from the pilot slots; a flat channel is observed
    # on every sub-carrier, so the estimates average across all of them
    if cfg.flat:
        s_pilot = y_freq[:, :, :cfg.pilots].mean(axis=1)
        h_hat = [chan.estimate_channel(s_pilot, p)]
    else:
        h_hat = [chan.estimate_channel(y_freq[:, k_i, :cfg.pilots], p)
                 for k_i in range(n_c)]

    # detection
    y_data = y_freq[:, :, cfg.pilots:]
    latency_program = 0.0
    energy_program = 0.0
    if cfg.mode == "digital":
        x_det = _detect_digital_grid(h_hat, y_data, cfg)
    else:
        x_det = np.empty((n_t, n_c, n_data), dtype=complex)
        bank_reports = []
        banks = []
        for h in h_hat:
            bank, rep = mimo.build_detector_bank(
                h, cfg.snr_db, cfg.detector, model, cfg.scheme, cfg.k, rng,
                exact=cfg.mode == "rram_ideal")
            banks.append(bank)
            bank_reports.append(rep)
        latency_program = max(r.latency for r in bank_reports)
        energy_program = sum(r.energy for r in bank_reports)
        if cfg.flat:
            y_cols = y_data.reshape(n_r, n_c * n_data)
            x_det = _detect_block_chunked(banks[0], y_cols, rng).reshape(
                n_t, n_c, n_data)
            energy_data += banks[0].left_pair.read_energy
            energy_data += banks[0].right_pair.read_energy
        else:
            for k_i, bank in enumerate(banks):
                x_det[:, k_i, :] = _detect_block_chunked(
                    bank, y_data[:, k_i, :], rng)
                energy_data += bank.left_pair.read_energy
                energy_data += bank.right_pair.read_energy

    # demap and score
    rx_syms = x_det.transpose(2, 1, 0).reshape(-1)
    tx_syms = x_freq[:, :, cfg.pilots:].transpose(2, 1, 0).reshape(-1)
    rx_bits = modem.qam16_demodulate(rx_syms)
    metrics = modem.compute_metrics(tx_syms, rx_syms, bits, rx_bits)

    model_dev = device_preset(cfg.preset)
    t_symbol = 2.0 * model_dev.pulse_width  # one DFT read + one detect read
    if cfg.mode == "digital":
        latency_program = 0.0
        latency_data, energy_total = digital_cost(cfg, PROFILES["combined_65nm"])
        energy_program, energy_data = 0.0, energy_total
    else:
        latency_data = cfg.symbols_per_frame * t_symbol

    total_bits = cfg.symbols_per_frame * n_c * n_t * 4
    total_latency = latency_program + latency_data
    total_energy = energy_program + energy_data
    return FrameResult(
        metrics=metrics,
        latency_program=latency_program,
        latency_data=latency_data,
        energy_program=energy_program,
        energy_data=energy_data,
        throughput=total_bits / total_latency if total_latency > 0 else math.inf,
        energy_efficiency=total_bits / total_energy if total_energy > 0 else math.inf,
        rx_bits=rx_bits if keep_bits else None,
        tx_bits=bits if keep_bits else None,
    )


def _dft_correction(dft_op, defect_map, cols):
    """Defection-correction for a whole block of DFT inputs."""
    zero = np.zeros(dft_op.array.rows)
    # correction is linear in the drive vector; recover the matrix once
    n = cols.shape[0]
    targets = ofdm.encode_targets(
        ofdm.real_map_matrix(ofdm.dft_matrix(dft_op.n_c)), dft_op.array.model,
        1.0 / (3.0 * math.sqrt(dft_op.n_c)))
    c_mat = np.empty((dft_op.array.rows, dft_op.array.cols))
    for j in range(dft_op.array.cols):
        e = np.zeros(dft_op.array.cols)
        e[j] = 1.0
        c_mat[:, j] = defection_correct(zero, defect_map, targets, e)
    v = np.vstack([cols.real, cols.imag])
    out = c_mat @ v
    half = dft_op.n_c
    return (out[:half] + 1j * out[half:]) / dft_op.alpha_dft


def _detect_digital_grid(h_hat, y_data, cfg: FrameConfig):
    """Batched digital detection; h_hat has 1 (flat) or n_c entries."""
    n_r, n_c, n_data = y_data.shape
    reg = 0.0 if cfg.detector == "zf" or math.isinf(cfg.snr_db) \
        else 1.0 / snr_linear(cfg.snr_db)
    out = np.empty((cfg.n_t, n_c, n_data), dtype=complex)
    if len(h_hat) == 1:
        h = h_hat[0]
        gram = h.conj().T @ h + reg * np.eye(cfg.n_t)
        rhs = np.einsum("ij,ikm->jkm", h.conj(), y_data).reshape(cfg.n_t, -1)
        out[:] = np.linalg.solve(gram, rhs).reshape(cfg.n_t, n_c, n_data)
    else:
        for k_i in range(n_c):
            h = h_hat[k_i]
            gram = h.conj().T @ h + reg * np.eye(cfg.n_t)
            out[:, k_i, :] = np.linalg.solve(gram, h.conj().T @ y_data[:, k_i, :])
    return out


def _detect_block_chunked(bank, y_cols, rng, chunk: int = 65536):
    """detect_crossbar_block in memory-bounded chunks."""
    m = y_cols.shape[1]
    out = np.empty((bank.n_t, m), dtype=complex)
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        out[:, lo:hi] = mimo.detect_crossbar_block(bank, y_cols[:, lo:hi], rng)
    return out


# -- digital baseline cost ---------------------------------------------------

@dataclass
class ProcessorProfile:
    """Reference digital-baseband cost coefficients."""

    name: str
    fft_clock_hz: float
    fft_cycles_per_block: int
    fft_per_uj: float           # FFT blocks per microjoule
    det_clock_hz: float
    det_forward_cycles: int     # forward elimination, once per sub-carrier
    det_back_cycles: int        # back substitution, per data symbol
    det_energy_per_unit: float  # J per (back-cycle x data symbol x sub-carrier)

    def validate(self):
        for f in ("fft_clock_hz", "fft_cycles_per_block", "fft_per_uj",
                  "det_clock_hz", "det_forward_cycles", "det_back_cycles",
                  "det_energy_per_unit"):
            if getattr(self, f) is None or getattr(self, f) <= 0:
                raise ValueError(f"profile missing/invalid {f}")


PROFILES = {
    "combined_65nm": ProcessorProfile(
        name="combined_65nm",
        fft_clock_hz=250e6, fft_cycles_per_block=688, fft_per_uj=2.07,
        det_clock_hz=625e6, det_forward_cycles=24, det_back_cycles=12,
        det_energy_per_unit=153.6e-12,
    ),
}


def digital_cost(cfg: FrameConfig, profile: ProcessorProfile):
    """Latency and energy of the reference digital-baseband comparison."""
    profile.validate()
    m = cfg.symbols_per_frame
    data = max(m - cfg.pilots, 0)
    fft_count = data + cfg.pilots
    latency = (profile.fft_cycles_per_block * fft_count / profile.fft_clock_hz
               + cfg.n_c * (profile.det_forward_cycles
                            + profile.det_back_cycles * data)
               / profile.det_clock_hz)
    energy = (fft_count / profile.fft_per_uj * 1e-6
              + profile.det_energy_per_unit * profile.det_back_cycles
              * data * cfg.n_c)
    return latency, energy


# -- sweeps and image transmission -------------------------------------------

def _sweep_worker(args):
    cfg, seed, keep = args
    res = run_frame(replace(cfg, seed=seed), keep_bits=keep)
    return res


def sweep(cfg: FrameConfig, variable: str, values, trials: int,
          jobs: int = 1) -> list:
    """Run trials per value; returns CSV-ready row dicts.

    variable='snr': rows (snr_db, scheme, mode, trial, mer_db, ber).
    variable='antennas': rows (n_antennas, scheme, latency_s, energy_j, ci95)
    from the programming phase, which is what grows with array size.
    """
    if variable not in ("snr", "antennas"):
        raise ValueError(f"unknown sweep variable {variable!r}")
    if len(values) == 0:
        raise ValueError("empty sweep value list")
    jobsets = []
    root = np.random.SeedSequence(cfg.seed)
    children = root.spawn(len(values) * trials)
    for vi, v in enumerate(values):
        if variable == "snr":
            c = replace(cfg, snr_db=float(v))
        else:
            c = replace(cfg, n_t=int(v), n_r=int(v), pilots=int(v))
        for t in range(trials):
            seed = int(children[vi * trials + t].generate_state(1)[0])
            jobsets.append((v, t, replace(c, seed=seed)))

    if jobs > 1:
        import multiprocessing as mp
        with mp.Pool(jobs) as pool:
            results = pool.map(_sweep_worker,
                               [(c, c.seed, False) for _, _, c in jobsets])
    else:
        results = [run_frame(c) for _, _, c in jobsets]

    rows = []
    if variable == "snr":
        for (v, t, _), res in zip(jobsets, results):
            rows.append({"snr_db": float(v), "scheme": cfg.scheme,
                         "mode": cfg.mode, "trial": t,
                         "mer_db": res.metrics.mer_db, "ber": res.metrics.ber})
    else:
        for v in values:
            rs = [r for (vv, _, _), r in zip(jobsets, results) if vv == v]
            lat = np.array([r.latency_program for r in rs])
            en = np.array([r.energy_program for r in rs])
            ci = math.nan if trials < 2 else float(
                1.96 * lat.std(ddof=1) / math.sqrt(trials))
            rows.append({"n_antennas": int(v), "scheme": cfg.scheme,
                         "latency_s": float(lat.mean()),
                         "energy_j": float(en.mean()), "ci95": ci})
    return rows


def transmit_image(image: np.ndarray, cfg: FrameConfig):
    """Send an 8-bit grayscale raster through the link; returns (image, Metrics)."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError("expected a 2-D grayscale image")
    pix = image.astype(np.uint8).reshape(-1)
    bits = np.unpackbits(pix).astype(int)
    per_frame = (cfg.symbols_per_frame - cfg.pilots) * cfg.n_c * cfg.n_t * 4
    n_frames = (bits.size + per_frame - 1) // per_frame
    padded = np.zeros(n_frames * per_frame, dtype=int)
    padded[:bits.size] = bits

    rng = np.random.default_rng(cfg.seed)
    model = _device_model(cfg)
    dft_op = None
    if cfg.mode != "digital":
        dft_op, _ = ofdm.build_dft_operator(
            cfg.n_c, "forward", model, cfg.scheme, rng, k=cfg.k,
            exact=cfg.mode == "rram_ideal")
    rx = np.empty_like(padded)
    tx_e = err_e = 0.0
    nerr = 0
    for f in range(n_frames):
        res = run_frame(cfg, rng=rng, dft_op=dft_op,
                        payload_bits=padded[f * per_frame:(f + 1) * per_frame],
                        keep_bits=True)
        rx[f * per_frame:(f + 1) * per_frame] = res.rx_bits
        if math.isinf(res.metrics.mer_db):
            tx_e += 1.0
        else:
            ratio = 10.0 ** (res.metrics.mer_db / 10.0)
            tx_e += 1.0
            err_e += 1.0 / ratio
        nerr += int(round(res.metrics.ber * per_frame))
    mer = math.inf if err_e == 0 else 10.0 * math.log10(tx_e / err_e)
    ber = nerr / (n_frames * per_frame)
    out_pix = np.packbits(rx[:bits.size].astype(np.uint8))
    recovered = out_pix.reshape(image.shape)
    return recovered, modem.Metrics(mer_db=mer, ber=ber)

"""Differential-pair crossbar arrays.

A signed real matrix is carried by two conductance grids G+ and G- (k device
copies per signed value); the decoded value of a pair is the mean over copies
of G+ - G-.  Programming follows the measured procedure: a full reset pulse,
then per-cell pulse trains, either open loop (write-without-verification) or
interleaved with read pulses until the noisy read lands within tolerance
(write-with-verification).  Rows are programmed sequentially; all cells of a
row, both grids and all copies, are pulsed in parallel, so the per-row
latency is the max over that row's cells.

Energy accounting is a documented policy, not a measured quantity: every
pulse dissipates V^2 * G * dt with the instantaneous (pre-pulse) conductance,
and the read pulse width equals the write pulse width.
"""

from dataclasses import dataclass, field

import numpy as np

from imbb.device import DeviceModel, HEALTHY, STUCK_ON, STUCK_OFF


@dataclass
class ConductanceTargets:
    """Per-grid conductance targets plus the value->siemens scale alpha."""

    targets_plus: np.ndarray
    targets_minus: np.ndarray
    alpha: float

    @property
    def decoded(self) -> np.ndarray:
        return self.targets_plus - self.targets_minus


@dataclass
class ProgramReport:
    """Ledger of one programming run."""

    latency: float = 0.0         # seconds, reads included
    write_latency: float = 0.0   # seconds, write pulses only (theory-comparable)
    energy: float = 0.0          # joules
    write_pulses: int = 0
    read_pulses: int = 0
    unreached_cells: list = field(default_factory=list)
    # per-device diagnostics, keyed 'plus'/'minus', shape (k, rows, cols)
    writes_per_cell: dict = field(default_factory=dict)
    first_cross_writes: dict = field(default_factory=dict)


def encode_targets(values, model: DeviceModel, sigma_value: float) -> ConductanceTargets:
    """Scale signed values into differential conductance targets.

    The three-sigma rule maps +-3*sigma_value onto the full conductance
    range; values beyond that clip.  Exactly one side of each pair is driven
    above g_min.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if not np.all(np.isfinite(values)):
        raise ValueError("values to encode must be finite")
    if sigma_value <= 0:
        raise ValueError("sigma_value must be positive")
    alpha = model.g_range / (3.0 * sigma_value)
    mag = np.minimum(alpha * np.abs(values), model.g_range)
    plus = np.where(values >= 0, model.g_min + mag, model.g_min)
    minus = np.where(values < 0, model.g_min + mag, model.g_min)
    return ConductanceTargets(plus, minus, alpha)


class CrossbarArray:
    """A differential crossbar: two (k, rows, cols) conductance grids."""

    def __init__(self, rows: int, cols: int, model: DeviceModel, k: int = 1):
        if rows < 1 or cols < 1 or k < 1:
            raise ValueError("rows, cols and k must be positive")
        self.rows, self.cols, self.k = rows, cols, k
        self.model = model
        shape = (k, rows, cols)
        self.g_plus = np.full(shape, model.g_min, dtype=float)
        self.g_minus = np.full(shape, model.g_min, dtype=float)
        self.defects_plus = np.zeros(shape, dtype=np.int8)
        self.defects_minus = np.zeros(shape, dtype=np.int8)
        # cumulative read-phase ledger
        self.read_latency = 0.0
        self.read_energy = 0.0
        self.read_pulses = 0

    # -- defect handling ---------------------------------------------------

    def _effective(self, g, defects):
        g = np.where(defects == STUCK_ON, self.model.g_max, g)
        return np.where(defects == STUCK_OFF, self.model.g_min, g)

    def effective_plus(self):
        return self._effective(self.g_plus, self.defects_plus)

    def effective_minus(self):
        return self._effective(self.g_minus, self.defects_minus)

    def decoded(self) -> np.ndarray:
        """Mean over copies of G+ - G-, honoring stuck cells."""
        return (self.effective_plus() - self.effective_minus()).mean(axis=0)

    # -- programming -------------------------------------------------------

    def _broadcast_targets(self, targets: ConductanceTargets):
        tp = np.broadcast_to(targets.targets_plus, (self.k, self.rows, self.cols))
        tm = np.broadcast_to(targets.targets_minus, (self.k, self.rows, self.cols))
        return tp, tm

    def program_exact(self, targets: ConductanceTargets) -> ProgramReport:
        """Set conductances to the targets directly (ideal-device oracle path)."""
        tp, tm = self._broadcast_targets(targets)
        healthy_p = self.defects_plus == HEALTHY
        healthy_m = self.defects_minus == HEALTHY
        self.g_plus = np.where(healthy_p, np.clip(tp, self.model.g_min, self.model.g_max), self.g_plus)
        self.g_minus = np.where(healthy_m, np.clip(tm, self.model.g_min, self.model.g_max), self.g_minus)
        return ProgramReport()

    def program(self, targets: ConductanceTargets, scheme: str,
                rng: np.random.Generator, tolerance: float = None,
                max_pulses: int = None) -> ProgramReport:
        m = self.model
        tp, tm = self._broadcast_targets(targets)
        if tp.shape[1:] != (self.rows, self.cols):
            raise ValueError("target dimensions do not match the array")
        if tolerance is None:
            tolerance = m.g_range / (2 * m.n_states)
        if max_pulses is None:
            max_pulses = 50 * m.n_states
        if max_pulses <= 0:
            raise ValueError("max_pulses must be positive")
        if scheme == "with_verification" and tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if scheme not in ("with_verification", "without_verification"):
            raise ValueError(f"unknown programming scheme {scheme!r}")

        report = ProgramReport()

        # Step 1: full reset, one pulse across the whole array in parallel.
        healthy_p = self.defects_plus == HEALTHY
        healthy_m = self.defects_minus == HEALTHY
        pre = np.concatenate([self._effective(self.g_plus, self.defects_plus)[healthy_p],
                              self._effective(self.g_minus, self.defects_minus)[healthy_m]])
        report.energy += m.v_full_reset ** 2 * pre.sum() * m.pulse_width
        report.write_pulses += pre.size
        report.latency += m.pulse_width
        self.g_plus = np.where(healthy_p, m.g_min, self.g_plus)
        self.g_minus = np.where(healthy_m, m.g_min, self.g_minus)

        for side, tgt, healthy in (("plus", tp, healthy_p), ("minus", tm, healthy_m)):
            grid = self.g_plus if side == "plus" else self.g_minus
            if scheme == "without_verification":
                res = _program_open_loop(grid, tgt, healthy, m, rng)
            else:
                res = _program_verified(grid, tgt, healthy, m, rng, tolerance, max_pulses)
            if side == "plus":
                self.g_plus = res["grid"]
            else:
                self.g_minus = res["grid"]
            report.energy += res["energy"]
            report.write_pulses += int(res["writes"].sum())
            report.read_pulses += int(res["reads"].sum())
            report.writes_per_cell[side] = res["writes"]
            report.first_cross_writes[side] = res["first_cross"]
            for k_i, r_i, c_i, resid in res["unreached"]:
                report.unreached_cells.append((r_i, c_i, resid))

        # Row-sequential latency: the two grids and all copies of a row are
        # pulsed in parallel, rows one after another.
        wp = report.writes_per_cell["plus"]
        wm = report.writes_per_cell["minus"]
        writes_row = np.maximum(wp, wm).max(axis=(0, 2)).astype(float)
        report.write_latency = float(writes_row.sum() * m.pulse_width)
        if scheme == "with_verification":
            # one read per write plus the final verification read
            cell_time = np.maximum(wp, wm) * m.pulse_width * 2 + m.pulse_width
            report.latency += float(cell_time.max(axis=(0, 2)).sum())
        else:
            report.latency += report.write_latency
        return report

    # -- reads -------------------------------------------------------------

    def read_matrix(self, rng: np.random.Generator) -> np.ndarray:
        """One noisy read of the decoded matrix (fresh noise per device)."""
        m = self.model
        gp = self.effective_plus() + m.sigma_read * rng.standard_normal(self.g_plus.shape)
        gm = self.effective_minus() + m.sigma_read * rng.standard_normal(self.g_minus.shape)
        self._charge_read(np.ones(self.cols))
        return (gp - gm).mean(axis=0)

    def mvm_read(self, volts, rng: np.random.Generator,
                 aggregate_noise: bool = False) -> np.ndarray:
        """Analog matrix-vector product with fresh read noise.

        aggregate_noise replaces the per-device noise draws with the exact
        equivalent Gaussian on each output entry (variance
        2*sigma_read^2*|v|^2/k), which is what makes large arrays tractable.
        """
        volts = np.asarray(volts, dtype=float)
        if volts.shape != (self.cols,):
            raise ValueError(f"voltage vector must have length {self.cols}")
        m = self.model
        if aggregate_noise or m.sigma_read == 0:
            out = self.decoded() @ volts
            if m.sigma_read > 0:
                std = m.sigma_read * np.sqrt(2.0 * (volts ** 2).sum() / self.k)
                out = out + std * rng.standard_normal(self.rows)
        else:
            gp = self.effective_plus() + m.sigma_read * rng.standard_normal(self.g_plus.shape)
            gm = self.effective_minus() + m.sigma_read * rng.standard_normal(self.g_minus.shape)
            out = ((gp - gm).mean(axis=0)) @ volts
        self._charge_read(volts)
        return out

    def _charge_read(self, volts):
        m = self.model
        g_total = (self.effective_plus() + self.effective_minus()).sum(axis=(0, 1))
        self.read_energy += float((volts ** 2 * g_total).sum()) * m.pulse_width
        self.read_latency += m.pulse_width
        self.read_pulses += 1

    # -- defects -----------------------------------------------------------

    def inject_defects(self, p_stuck_on: float, p_stuck_off: float,
                       rng: np.random.Generator) -> dict:
        """Mark each device independently stuck-on/stuck-off; returns the map."""
        if p_stuck_on < 0 or p_stuck_off < 0 or p_stuck_on + p_stuck_off > 1:
            raise ValueError("defect probabilities must be >= 0 and sum to <= 1")
        for defects in (self.defects_plus, self.defects_minus):
            u = rng.random(defects.shape)
            defects[u < p_stuck_on] = STUCK_ON
            defects[(u >= p_stuck_on) & (u < p_stuck_on + p_stuck_off)] = STUCK_OFF
        return {"plus": self.defects_plus.copy(), "minus": self.defects_minus.copy(),
                "model": self.model}

    def export_csv(self, path):
        """Snapshot (row, col, g_plus, g_minus, defect), copies averaged."""
        gp = self.g_plus.mean(axis=0)
        gm = self.g_minus.mean(axis=0)
        dd = np.maximum(self.defects_plus.max(axis=0), self.defects_minus.max(axis=0))
        with open(path, "w") as f:
            f.write("row,col,g_plus,g_minus,defect\n")
            for r in range(self.rows):
                for c in range(self.cols):
                    f.write(f"{r},{c},{gp[r, c]!r},{gm[r, c]!r},{int(dd[r, c])}\n")


def defection_correct(raw_output, defect_map: dict, targets: ConductanceTargets,
                      volts) -> np.ndarray:
    """Add back the MVM contribution lost to known stuck devices.

    For each defective device the correction is (target - pinned)/k times the
    driving voltage, signed by which grid the device sits in; pinned is g_max
    for stuck-on and g_min for stuck-off.  defect_map comes from
    inject_defects and carries the device model.
    """
    out = np.asarray(raw_output, dtype=float).copy()
    volts = np.asarray(volts, dtype=float)
    model = defect_map["model"]
    for side, sign, tgt in (("plus", 1.0, targets.targets_plus),
                            ("minus", -1.0, targets.targets_minus)):
        defects = defect_map[side]
        if not np.any(defects != HEALTHY):
            continue
        k = defects.shape[0]
        tgt3 = np.broadcast_to(tgt, defects.shape)
        pinned = np.where(defects == STUCK_ON, model.g_max, tgt3)
        pinned = np.where(defects == STUCK_OFF, model.g_min, pinned)
        delta = np.where(defects != HEALTHY, tgt3 - pinned, 0.0)
        out += sign * (delta.sum(axis=0) / k) @ volts
    return out


def _program_open_loop(grid, targets, healthy, model: DeviceModel,
                       rng: np.random.Generator) -> dict:
    """Write-without-verification: a fixed pulse count per cell, no reads.

    Assumes the grid sits at g_min (post reset).  The pulse count is the
    nearest integer number of mean steps covering target - g_min.
    """
    n_pulses = np.rint((targets - model.g_min) / model.g_step).astype(int)
    n_pulses = np.where(healthy, np.clip(n_pulses, 0, None), 0)
    writes = np.zeros(grid.shape, dtype=int)
    first_cross = np.zeros(grid.shape, dtype=int)
    energy = 0.0
    g = grid.copy()
    sigma_c = model.gamma_pot * model.g_range
    for p in range(1, int(n_pulses.max(initial=0)) + 1):
        active = n_pulses >= p
        if not active.any():
            break
        pre = g[active]
        energy += model.v_set ** 2 * pre.sum() * model.pulse_width
        delta = model.g_step + sigma_c * rng.standard_normal(pre.shape)
        g[active] = np.clip(pre + delta, model.g_min, model.g_max)
        writes[active] += 1
        crossed = active & (first_cross == 0) & (g >= targets)
        first_cross[crossed] = p
    return {"grid": g, "energy": energy, "writes": writes,
            "reads": np.zeros(grid.shape, dtype=int),
            "first_cross": first_cross, "unreached": []}


def _program_verified(grid, targets, healthy, model: DeviceModel,
                      rng: np.random.Generator, tolerance: float,
                      max_pulses: int) -> dict:
    """Write-with-verification: read, pulse toward the target, repeat.

    Each iteration reads the cell with read noise and, if the measured value
    is outside the tolerance band, applies one pulse whose polarity follows
    the sign of the measured error.  Cells stop on a read inside the band or
    when the pulse budget runs out.
    """
    shape = grid.shape
    g = grid.reshape(-1).copy()
    tgt_all = np.broadcast_to(targets, shape).reshape(-1)
    writes = np.zeros(g.size, dtype=int)
    reads = np.zeros(g.size, dtype=int)
    first_cross = np.zeros(g.size, dtype=int)
    energy = 0.0
    sc_pot = model.gamma_pot * model.g_range
    sc_dep = model.gamma_dep * model.g_range
    # compact active-state bookkeeping: per-iteration work scales with the
    # number of still-converging cells, not the grid size; since every
    # iteration is read-then-maybe-write, reads per cell = writes + 1
    idx = np.flatnonzero(healthy.reshape(-1))
    cur = g[idx].copy()
    tgt = tgt_all[idx].copy()
    w = np.zeros(idx.size, dtype=int)
    fc = np.zeros(idx.size, dtype=int)
    e_read = e_write = 0.0
    while idx.size:
        measured = cur + model.sigma_read * rng.standard_normal(idx.size)
        e_read += float(cur.sum())
        err = tgt - measured
        pulse = (np.abs(err) > tolerance) & (w < max_pulses)
        if not pulse.all():
            done = ~pulse
            g[idx[done]] = cur[done]
            writes[idx[done]] = w[done]
            first_cross[idx[done]] = fc[done]
            idx, cur, tgt, err, w, fc = (a[pulse] for a in (idx, cur, tgt, err, w, fc))
        if idx.size:
            pot = err > 0
            delta = (np.where(pot, model.g_step, -model.g_step)
                     + np.where(pot, sc_pot, sc_dep) * rng.standard_normal(idx.size))
            e_write += float((np.where(pot, model.v_set ** 2,
                                       model.v_reset ** 2) * cur).sum())
            cur = np.clip(cur + delta, model.g_min, model.g_max)
            w += 1
            crossed = (fc == 0) & (cur >= tgt)
            fc[crossed] = w[crossed]
    energy += (model.v_read ** 2 * e_read + e_write) * model.pulse_width
    hmask = healthy.reshape(-1)
    reads[hmask] = writes[hmask] + 1
    unreached = []
    resid = np.abs(g - tgt_all).reshape(shape)
    failed = healthy & (writes.reshape(shape) >= max_pulses) & (resid > tolerance)
    for k_i, r_i, c_i in zip(*np.nonzero(failed)):
        unreached.append((int(k_i), int(r_i), int(c_i), float(resid[k_i, r_i, c_i])))
    return {"grid": g.reshape(shape), "energy": energy,
            "writes": writes.reshape(shape), "reads": reads.reshape(shape),
            "first_cross": first_cross.reshape(shape), "unreached": unreached}

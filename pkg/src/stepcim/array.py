"""Column/block MAC: line settling, comparator/subtractor/ADC, variation.

Current-mode MAC: up to N_V rows are asserted at once; each active cell
adds its scalar-product current pair onto the two read bit lines. The read
driver is reduced to a linear series resistance R_drv per line, so each
line settles at the fixed point

    v = v_dd - R_drv * sum_rows I_cell(v)

solved by bisection (the total cell current is increasing in v, so the
residual is strictly decreasing and the root unique).

The comparator and current subtractor work on the difference of the two
line currents. The subtractor output stage has finite compliance: its
mirrors are sized together with the read drivers, so the compliance
current scales inversely with R_drv and the measured difference is

    f(D) = D / (1 + |D| * R_drv / v_headroom)

(odd, strictly increasing, exact when R_drv = 0). Large accumulated
differences therefore compress, which is what makes the worst-case sense
margin shrink monotonically with the output level:

    SM(a) = (f(a*u) - f((a-1)*u)) / 2 ~ u / (2*(1+a*x)*(1+(a-1)*x))

with u the unit difference and x = u*R_drv/v_headroom. With R_drv = 0 the
whole chain is ideal and the MAC equals the clipped integer dot product.

Threshold variation enters at every transistor: storage devices (per-row,
per-line), the two line drivers (as an equivalent rail offset), and the
comparator and subtractor input mirrors (as current offsets through a
fixed transconductance).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .device import DeviceStack, sense_gap_shift
from .errors import CapacityError, ConfigError, SolverError
from .tmdfet import drain_current_at

# Shipped driver calibration: R_drv is fitted (config.calibrate) so the
# worst-case sense margin bottoms out at the documented floor target while
# the zero-variation decode of every output level stays exact.
DEFAULT_R_DRV = 1292.75        # ohm, read-driver series resistance
DEFAULT_V_HEADROOM = 2.75      # V, subtractor compliance scale (I_knee = v_headroom/R_drv)
DEFAULT_G_COMPARATOR = 2.0e-5  # A/V, comparator/subtractor input transconductance


@dataclass(frozen=True)
class ArrayConfig:
    """Array geometry, driver model, and ADC width."""

    N_R: int = 256
    N_C: int = 256
    N_V: int = 16
    R_drv: float = DEFAULT_R_DRV
    adc_bits: int = 3
    Q: int = 32                      # peripheral accumulate units per array
    v_headroom: float = DEFAULT_V_HEADROOM
    g_comparator: float = DEFAULT_G_COMPARATOR
    residual_tol: float = 1e-12      # A, line fixed-point residual
    max_iters: int = 200

    def __post_init__(self):
        if self.N_V > self.N_R or self.N_R % self.N_V:
            raise ConfigError("N_V must divide N_R")
        if self.R_drv < 0.0 or self.v_headroom <= 0.0 or self.g_comparator < 0.0:
            raise ConfigError("driver/subtractor parameters must be non-negative")

    @property
    def clip(self) -> int:
        return 2 ** self.adc_bits

    @property
    def blocks(self) -> int:
        return self.N_R // self.N_V


@dataclass(frozen=True)
class VariationConfig:
    """Gaussian threshold-voltage variation setup."""

    sigma_vth: float = 0.010     # V
    iters: int = 1000
    seed: int = 1

    def __post_init__(self):
        if self.sigma_vth < 0.0 or self.iters <= 0:
            raise ConfigError("sigma_vth must be >= 0 and iters positive")


@dataclass(frozen=True)
class MacResult:
    """One column MAC outcome."""

    i_rbl1: float     # settled line currents, A
    i_rbl2: float
    v_rbl1: float     # settled line voltages, V
    v_rbl2: float
    s_n: int          # sign, +1 if line 1 measured above line 2 (ties +1)
    a: int            # quantized magnitude, 0..clip
    o: int            # s_n * a
    o_ideal: int      # unclipped integer dot product


def _as_ternary(vec, name: str) -> np.ndarray:
    arr = np.asarray(vec, dtype=int)
    if arr.ndim == 0:
        arr = arr[None]
    if not np.all(np.isin(arr, (-1, 0, 1))):
        raise ConfigError(f"{name} must contain only -1/0/+1")
    return arr


def _line_gap_shifts(weights: np.ndarray, inputs: np.ndarray, dEg0: float):
    """Per-row gap shifts on the two lines plus the active-row mask.

    weights/inputs are (..., R). M1 holds +P only for w = +1; M2 only for
    w = -1. The shift sign is polarization sign times input polarity.
    """
    p1 = np.where(weights == +1, 1, -1)
    p2 = np.where(weights == -1, 1, -1)
    active = inputs != 0
    dE1 = p1 * inputs * dEg0
    dE2 = p2 * inputs * dEg0
    return dE1, dE2, active


def _line_current(dev: DeviceStack, v_line, dE, active, vth):
    """Total line current at line voltage(s) v_line; broadcasts (..., R)."""
    v_ds = np.asarray(v_line, dtype=float)[..., None]
    cur = drain_current_at(dev.fet, dev.v_read, np.broadcast_to(v_ds, dE.shape), dE, vth)
    return np.sum(np.where(active, cur, 0.0), axis=-1)


def _settle(dev: DeviceStack, cfg: ArrayConfig, dE, active, vth, v_rail):
    """Vectorized bisection of v = v_rail - R_drv * I(v); returns (v, I)."""
    v_rail = np.asarray(v_rail, dtype=float)
    open_line = ~np.any(active, axis=-1)
    if cfg.R_drv == 0.0 or np.all(open_line):
        return v_rail.copy(), _line_current(dev, v_rail, dE, active, vth)
    lo = np.zeros_like(v_rail)
    hi = v_rail.copy()
    solved = None
    for _ in range(cfg.max_iters):
        mid = 0.5 * (lo + hi)
        resid = (v_rail - mid) / cfg.R_drv - _line_current(dev, mid, dE, active, vth)
        if np.max(np.abs(resid[~open_line])) < cfg.residual_tol:
            solved = mid
            break
        above = resid > 0.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    if solved is None:
        raise SolverError(
            f"line fixed point did not reach |residual| < {cfg.residual_tol:g} A "
            f"in {cfg.max_iters} iterations"
        )
    v = np.where(open_line, v_rail, solved)   # open line sits at the rail exactly
    return v, _line_current(dev, v, dE, active, vth)


def _subtractor(diff, cfg: ArrayConfig):
    """Compliance-limited difference measurement; identity for an ideal driver."""
    if cfg.R_drv == 0.0:
        return diff
    i_knee = cfg.v_headroom / cfg.R_drv
    return diff / (1.0 + np.abs(diff) / i_knee)


def adc_quantize(i_diff: float, unit: float, clip: int = 8):
    """Flash quantizer: thresholds at (k - 1/2)*unit, k = 1..clip.

    Values beyond the top threshold saturate at ``clip``; exact-threshold
    ties resolve toward zero. Vectorized over i_diff.
    """
    if unit <= 0.0:
        raise ConfigError("ADC unit current must be positive")
    q = np.ceil(np.asarray(i_diff, dtype=float) / unit - 0.5)
    out = np.clip(q, 0, clip).astype(int)
    return out if out.ndim else int(out)


def _mac_engine(
    dev: DeviceStack,
    cfg: ArrayConfig,
    weights: np.ndarray,       # (T, R)
    inputs: np.ndarray,        # (T, R)
    vth1=None,                 # (T, R) line-1 storage-device thresholds
    vth2=None,
    drv_off=None,              # (T, 2) driver threshold offsets -> rail shift
    cmp_off=None,              # (T,) comparator input offset, V
    sub_off=None,              # (T,) subtractor input offset, V
    unit: float | None = None,
    mag_clip: int | None = None,
):
    """Vectorized column MAC over a batch of trials; returns raw arrays."""
    dEg0 = sense_gap_shift(dev)
    dE1, dE2, active = _line_gap_shifts(weights, inputs, dEg0)
    T = weights.shape[0]
    nominal = dev.fet.V_TH
    vth1 = np.full_like(dE1, nominal) if vth1 is None else nominal + vth1
    vth2 = np.full_like(dE2, nominal) if vth2 is None else nominal + vth2
    rail = np.full((T, 2), dev.v_dd)
    if drv_off is not None:
        rail = rail + drv_off

    v1, i1 = _settle(dev, cfg, dE1, active, vth1, rail[:, 0])
    v2, i2 = _settle(dev, cfg, dE2, active, vth2, rail[:, 1])
    diff = _subtractor(i1 - i2, cfg)

    cmp_in = diff if cmp_off is None else diff + cfg.g_comparator * cmp_off
    s = np.where(cmp_in >= 0.0, 1, -1)
    mag_in = diff * s
    if sub_off is not None:
        mag_in = mag_in + cfg.g_comparator * sub_off
    if unit is None:
        unit = adc_unit_current(dev, cfg)
    a = adc_quantize(np.maximum(mag_in, 0.0), unit, cfg.clip if mag_clip is None else mag_clip)
    o_ideal = np.sum(weights * inputs, axis=-1)
    return {
        "i1": i1, "i2": i2, "v1": v1, "v2": v2,
        "diff": diff, "s": s, "a": a, "o": s * a, "o_ideal": o_ideal,
    }


@lru_cache(maxsize=32)
def adc_unit_current(dev: DeviceStack, cfg: ArrayConfig) -> float:
    """ADC unit current: measured line difference of the single-row pattern.

    Thresholds live where the analog signal actually operates, so the unit
    is taken at the minimum-loading a = 1 operating point (with R_drv = 0
    this is exactly I_LRS - I_HRS).
    """
    w = np.zeros((1, cfg.N_V), dtype=int)
    i = np.zeros((1, cfg.N_V), dtype=int)
    w[0, 0] = 1
    i[0, 0] = 1
    res = _mac_engine(dev, cfg, w, i, unit=1.0)  # unit unused downstream
    return float(res["diff"][0])


def _pad(vec: np.ndarray, n: int, name: str) -> np.ndarray:
    if vec.size > n:
        raise CapacityError(f"{name} longer than N_V={n} rows")
    out = np.zeros(n, dtype=int)
    out[: vec.size] = vec
    return out


def settle_rbl(rows, dev: DeviceStack, cfg: ArrayConfig):
    """Settle both read bit lines for explicit per-row (w, i) pairs.

    Returns ((v_rbl1, i_rbl1), (v_rbl2, i_rbl2)).
    """
    w = _pad(_as_ternary([r[0] for r in rows], "weights"), cfg.N_V, "weights")
    i = _pad(_as_ternary([r[1] for r in rows], "inputs"), cfg.N_V, "inputs")
    dEg0 = sense_gap_shift(dev)
    dE1, dE2, active = _line_gap_shifts(w[None, :], i[None, :], dEg0)
    vth = np.full_like(dE1, dev.fet.V_TH)
    rail = np.array([dev.v_dd])
    v1, i1 = _settle(dev, cfg, dE1, active, vth, rail)
    v2, i2 = _settle(dev, cfg, dE2, active, vth, rail)
    return (float(v1[0]), float(i1[0])), (float(v2[0]), float(i2[0]))


def mac_column(weights, inputs, dev: DeviceStack, cfg: ArrayConfig, vth_offsets=None) -> MacResult:
    """One column MAC of equal-length ternary vectors (length <= N_V).

    ``vth_offsets`` optionally perturbs the storage devices: shape
    (rows, 2), volts added to the nominal threshold of the line-1/line-2
    device in each row.
    """
    w = _as_ternary(weights, "weights")
    i = _as_ternary(inputs, "inputs")
    if w.size != i.size:
        raise ConfigError("weights and inputs must have equal length")
    w = _pad(w, cfg.N_V, "weights")[None, :]
    i = _pad(i, cfg.N_V, "inputs")[None, :]
    vth1 = vth2 = None
    if vth_offsets is not None:
        off = np.zeros((cfg.N_V, 2))
        off[: np.asarray(vth_offsets).shape[0]] = np.asarray(vth_offsets, dtype=float)
        vth1, vth2 = off[None, :, 0], off[None, :, 1]
    res = _mac_engine(dev, cfg, w, i, vth1=vth1, vth2=vth2)
    return MacResult(
        i_rbl1=float(res["i1"][0]), i_rbl2=float(res["i2"][0]),
        v_rbl1=float(res["v1"][0]), v_rbl2=float(res["v2"][0]),
        s_n=int(res["s"][0]), a=int(res["a"][0]), o=int(res["o"][0]),
        o_ideal=int(res["o_ideal"][0]),
    )


def min_loading_pattern(a: int, n: int = 16):
    """Lowest-current realization of output ``a``: a rows of (w=1, i=1)."""
    w = [1] * a + [0] * (n - a)
    i = [1] * a + [0] * (n - a)
    return w, i


def max_loading_pattern(a: int, n: int = 16):
    """Highest-current realization of output ``a``: idle rows driven at i=-1, w=0."""
    w = [1] * a + [0] * (n - a)
    i = [1] * a + [-1] * (n - a)
    return w, i


@dataclass(frozen=True)
class SenseMarginPoint:
    a: int
    sm: float          # A
    i_minload_1: float
    i_minload_2: float
    i_maxload_1: float
    i_maxload_2: float


def sense_margin_curve(dev: DeviceStack, cfg: ArrayConfig) -> list[SenseMarginPoint]:
    """Worst-case sense margin per output level.

    SM(a) = (O_min(a) - O_max(a-1)) / 2 with O the measured line-current
    difference: the minimum-loading realization of ``a`` against the
    maximum-loading realization of ``a - 1``.
    """
    n = cfg.N_V
    w_rows, i_rows = [], []
    for a in range(1, n + 1):
        w, i = min_loading_pattern(a, n)
        w_rows.append(w)
        i_rows.append(i)
        w, i = max_loading_pattern(a - 1, n)
        w_rows.append(w)
        i_rows.append(i)
    res = _mac_engine(dev, cfg, np.array(w_rows), np.array(i_rows), unit=1.0)
    out = []
    diff = res["diff"]
    for k, a in enumerate(range(1, n + 1)):
        o_min = diff[2 * k]
        o_max = diff[2 * k + 1]
        out.append(
            SenseMarginPoint(
                a=a,
                sm=float(0.5 * (o_min - o_max)),
                i_minload_1=float(res["i1"][2 * k]),
                i_minload_2=float(res["i2"][2 * k]),
                i_maxload_1=float(res["i1"][2 * k + 1]),
                i_maxload_2=float(res["i2"][2 * k + 1]),
            )
        )
    return out


@dataclass(frozen=True)
class McLevelStats:
    """Monte Carlo outcome for one expected output level."""

    a: int
    expected: int               # after ADC clipping
    p_error: float
    n_plus1: int
    n_minus1: int
    n_other: int                # |error| > 1 occurrences (should stay 0)
    histogram: dict             # decoded output -> count


@dataclass(frozen=True)
class McStats:
    levels: list
    seed: int
    iters: int
    sigma_vth: float

    @property
    def total_error_levels(self) -> int:
        return sum(1 for lv in self.levels if lv.p_error > 0.0)


def _level_rng(seed: int, level: int) -> np.random.Generator:
    """Counter-based stream: one independent Philox keyed by (seed, level)."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, level], dtype=np.uint64)))


def monte_carlo_mac(dev: DeviceStack, cfg: ArrayConfig, var: VariationConfig) -> McStats:
    """Threshold-variation study over output levels 1..N_V.

    For each level the minimum-loading pattern is evaluated ``iters`` times
    with fresh Gaussian threshold offsets on every storage device, both
    line drivers, the comparator, and the subtractor. Decoding uses the
    threshold ladder extended to N_V levels (the sense-margin instrument,
    not the clipping production ADC) so each level is scored against its
    own code. Deterministic for a fixed seed (Philox streams keyed by
    (seed, level)).
    """
    unit = adc_unit_current(dev, cfg)
    levels = []
    for a in range(1, cfg.N_V + 1):
        rng = _level_rng(var.seed, a)
        T = var.iters
        w, i = min_loading_pattern(a, cfg.N_V)
        W = np.tile(np.array(w), (T, 1))
        I = np.tile(np.array(i), (T, 1))
        s = var.sigma_vth
        vth1 = rng.normal(0.0, s, size=(T, cfg.N_V))
        vth2 = rng.normal(0.0, s, size=(T, cfg.N_V))
        drv = rng.normal(0.0, s, size=(T, 2))
        cmp_off = rng.normal(0.0, s, size=T)
        sub_off = rng.normal(0.0, s, size=T)
        res = _mac_engine(
            dev, cfg, W, I,
            vth1=vth1, vth2=vth2, drv_off=drv, cmp_off=cmp_off, sub_off=sub_off,
            unit=unit, mag_clip=cfg.N_V,
        )
        decoded = res["o"]
        expected = a
        err = decoded - expected
        hist: dict[int, int] = {}
        for val, cnt in zip(*np.unique(decoded, return_counts=True)):
            hist[int(val)] = int(cnt)
        levels.append(
            McLevelStats(
                a=a,
                expected=expected,
                p_error=float(np.mean(err != 0)),
                n_plus1=int(np.sum(err == +1)),
                n_minus1=int(np.sum(err == -1)),
                n_other=int(np.sum(np.abs(err) > 1)),
                histogram=hist,
            )
        )
    return McStats(levels=levels, seed=var.seed, iters=var.iters, sigma_vth=var.sigma_vth)


@dataclass(frozen=True)
class BlockMacResult:
    o: np.ndarray            # (N_C,) accumulated quantized outputs
    o_ideal: np.ndarray      # (N_C,) exact integer dot products
    clip_events: int         # per-block outputs that saturated the ADC


def block_mac(weight_matrix, inputs, dev: DeviceStack, cfg: ArrayConfig) -> BlockMacResult:
    """Parallel MAC of one input vector against all columns.

    weight_matrix is (L, N_C); inputs length L. L <= N_V runs one block
    access; longer vectors are split into N_V-row blocks whose quantized
    outputs accumulate in the peripheral units (post-ADC, so each block
    contributes at most +/-clip).
    """
    W = np.asarray(weight_matrix, dtype=int)
    if W.ndim != 2:
        raise ConfigError("weight_matrix must be 2-D (rows x columns)")
    iv = _as_ternary(inputs, "inputs")
    if iv.size != W.shape[0]:
        raise ConfigError("inputs length must match weight rows")
    if not np.all(np.isin(W, (-1, 0, 1))):
        raise ConfigError("weights must contain only -1/0/+1")
    n_cols = W.shape[1]
    o = np.zeros(n_cols, dtype=int)
    clip_events = 0
    for start in range(0, iv.size, cfg.N_V):
        stop = min(start + cfg.N_V, iv.size)
        blk_w = np.zeros((n_cols, cfg.N_V), dtype=int)
        blk_i = np.zeros((n_cols, cfg.N_V), dtype=int)
        blk_w[:, : stop - start] = W[start:stop].T
        blk_i[:, : stop - start] = iv[start:stop]
        res = _mac_engine(dev, cfg, blk_w, blk_i)
        o += res["o"]
        clip_events += int(np.sum(np.abs(res["o_ideal"]) > cfg.clip))
    return BlockMacResult(o=o, o_ideal=W.T @ iv, clip_events=clip_events)

"""Accelerator-level area/latency/energy estimator and workload replay.

Compares the in-memory ternary design against two near-memory baselines
built from the same cell (pefet_nm) and from a two-bit SRAM word cell
(sram_nm). The in-memory array asserts 16 rows per access and digitizes
column outputs through shared ADC/accumulate groups; the near-memory
baselines read rows one at a time and compute beside the array.

Published comparisons are ratios, so the cost model stores one absolute
anchor (the near-memory row-read latency, default 1 ns) plus ratio and
overhead constants, all overridable:

  * block latency   = mac_latency_ratio * N_V * t_read_nm  (0.09 -> 1.44 ns)
  * tile energy     : sram = step * (1 + sram_energy_overhead)
                      pefet = sram * (1 + pefet_energy_premium)
    The overheads are strictly positive, which makes the energy ordering
    step < sram < pefet structural rather than numerical coincidence.
    The sram overhead is dominated by idle leakage integrated over the
    longer near-memory runtime; it is energy per unit of work, so
    iso-area and iso-capacity sizings of the same baseline always cost
    the same energy (array-seconds are sizing-invariant).

Peak throughput metrics (TOPS/W, TOPS/mm2) are computed from the block
engine alone (accumulate groups excluded), which is the documented
convention for the headline table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

TECHNOLOGIES = ("step_cim", "sram_nm", "pefet_nm")


@dataclass(frozen=True)
class CostModel:
    """Array-level cost primitives, ratio-anchored; see module docstring."""

    F: float = 20e-9                       # feature size, m
    cell_area_step_f2: float = 202.5       # word cell, F^2 (also pefet_nm)
    cell_area_sram_f2: float = 378.0       # two-bit SRAM word cell, F^2
    adc_area_overhead: float = 1.09        # step array vs pefet_nm array
    sram_layout_factor: float = 0.89       # sram array packing vs raw cell grid

    t_read_nm: float = 1e-9                # absolute anchor: NM row read, s
    mac_latency_ratio: float = 0.09        # step block vs N_V sequential reads
    t_pcu_group: float = 0.1473e-9         # ADC/accumulate per column group, s
    q_pcu: int = 32                        # accumulate units shared by the columns
    t_write_sram: float = 1e-9
    write_latency_ratio: float = 3.97      # polarization write vs sram write
    t_pipeline_fill: float = 2e-9          # NM compute pipeline fill per layer

    e_mac_block_step: float = 13.13e-12    # block access incl ADC, J
    e_pcu_group: float = 1.364e-12         # per column-group accumulate, J
    sram_energy_overhead: float = 2.2      # -> E_sram_tile = 3.2 x step tile
    pefet_energy_premium: float = 0.896875  # -> E_pefet_tile = 6.07 x step tile

    util_active: float = 0.2               # active fraction for memory-op totals
    e_read_row_active_sram: float = 1.38e-12
    read_active_ratio_step: float = 9.0    # current sensing vs precharged sensing
    e_write_active_sram: float = 4.614e-12
    write_active_ratio_step: float = 2.0
    p_leak_sram_array: float = 1.66e-3     # W per array, idle-window leakage

    def __post_init__(self):
        for name in (
            "F", "cell_area_step_f2", "cell_area_sram_f2", "adc_area_overhead",
            "sram_layout_factor", "t_read_nm", "mac_latency_ratio", "t_pcu_group",
            "t_write_sram", "write_latency_ratio", "e_mac_block_step", "e_pcu_group",
            "sram_energy_overhead", "pefet_energy_premium",
        ):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"CostModel.{name} must be positive")

    # -- latency primitives ------------------------------------------------
    def t_mac_block_step(self, n_v: int = 16) -> float:
        return self.mac_latency_ratio * n_v * self.t_read_nm

    def t_write_step(self) -> float:
        return self.write_latency_ratio * self.t_write_sram

    # -- energy primitives -------------------------------------------------
    def e_step_tile(self, n_groups: int) -> float:
        return self.e_mac_block_step + n_groups * self.e_pcu_group

    def e_tile(self, technology: str, n_groups: int) -> float:
        base = self.e_step_tile(n_groups)
        if technology == "step_cim":
            return base
        sram = base * (1.0 + self.sram_energy_overhead)
        if technology == "sram_nm":
            return sram
        if technology == "pefet_nm":
            return sram * (1.0 + self.pefet_energy_premium)
        raise ConfigError(f"unknown technology {technology!r}")

    # -- published reference points (echoed in reports, not re-derived) -----
    @property
    def reference_ratios(self) -> dict:
        return {
            "cell_area_vs_sram": self.cell_area_step_f2 / self.cell_area_sram_f2,
            "mac_latency_vs_sram": self.mac_latency_ratio,
            "write_latency_vs_sram": self.write_latency_ratio,
            "mac_energy_vs_sram": 0.85,
            "mac_energy_vs_pefet": 0.09,
            "write_energy_vs_sram": 0.82,
            "read_energy_active_vs_sram": self.read_active_ratio_step,
            "read_energy_total_vs_sram": 1.55,
        }


# Headline comparison rows for prior accelerators; fixed published
# constants echoed into reports, never simulated.
REFERENCE_ACCELERATORS = [
    {"name": "this-work", "technology_nm": 20, "tops_per_w": None, "tops_per_mm2": None},
    {"name": "ternary-fefet-cim", "technology_nm": 45, "tops_per_w": 255.0, "tops_per_mm2": 122.0},
    {"name": "ternary-sram-cim", "technology_nm": 32, "tops_per_w": 127.0, "tops_per_mm2": 58.2},
    {"name": "binary-asic", "technology_nm": 65, "tops_per_w": 95.0, "tops_per_mm2": 3.5},
    {"name": "gpu-fp16", "technology_nm": 12, "tops_per_w": 0.42, "tops_per_mm2": 0.15},
]


@dataclass(frozen=True)
class Organization:
    """One machine sizing: technology, array count, array shape in words."""

    technology: str
    n_arrays: int
    rows: int = 256              # word rows per array
    cols: int = 256              # word columns per array
    rows_per_access: int = 1
    sizing: str = "iso_capacity"

    def __post_init__(self):
        if self.technology not in TECHNOLOGIES:
            raise ConfigError(f"unknown technology {self.technology!r}")
        if self.n_arrays <= 0 or self.rows <= 0 or self.cols <= 0:
            raise ConfigError("organization sizes must be positive")
        if self.rows % self.rows_per_access:
            raise ConfigError("rows_per_access must divide rows")

    @property
    def capacity_words(self) -> int:
        return self.n_arrays * self.rows * self.cols


def default_organizations() -> dict[str, Organization]:
    """Shipped sizings: the in-memory design plus its four baselines.

    The in-memory system is 32 arrays of 256x256 ternary words (two bits
    per word: 512 kB) asserting 16 rows per access. Near-memory baselines
    use the same word geometry read row by row; iso-capacity keeps 32
    arrays, iso-area packs as many arrays as fit in the in-memory floor
    plan (see :func:`area_report`).
    """
    return {
        "step_cim": Organization("step_cim", 32, rows_per_access=16, sizing="native"),
        "sram_nm_iso_capacity": Organization("sram_nm", 32),
        "sram_nm_iso_area": Organization("sram_nm", 21, sizing="iso_area"),
        "pefet_nm_iso_capacity": Organization("pefet_nm", 32),
        "pefet_nm_iso_area": Organization("pefet_nm", 35, sizing="iso_area"),
    }


@dataclass(frozen=True)
class WorkloadLayer:
    """One layer's work: MAC and weight counts with a sparsity annotation."""

    name: str
    kind: str                    # conv | fc | recurrent-step
    macs: int
    weights: int
    sparsity: float = 0.5

    def __post_init__(self):
        if self.kind not in ("conv", "fc", "recurrent-step"):
            raise ConfigError(f"unknown layer kind {self.kind!r}")
        if self.macs < 0 or self.weights < 0:
            raise ConfigError("MAC and weight counts must be non-negative")
        if not (0.0 <= self.sparsity <= 1.0):
            raise ConfigError("sparsity must lie in [0, 1]")


@dataclass(frozen=True)
class Workload:
    name: str
    layers: tuple

    @property
    def total_macs(self) -> int:
        return sum(l.macs for l in self.layers)


@dataclass(frozen=True)
class LayerEstimate:
    latency: float      # s
    energy: float       # J
    counts: dict        # tiles / block_accesses / row_reads / writes


def estimate_layer(
    layer: WorkloadLayer,
    org: Organization,
    cost: CostModel,
    include_weight_load: bool = False,
) -> LayerEstimate:
    """Latency/energy of one layer on one organization.

    Work is tiled into 16-row x full-column MAC tiles. The in-memory
    design runs one block access per tile plus serialized ADC/accumulate
    groups; near-memory designs read the tile's rows sequentially with
    the MAC pipeline hidden behind the reads. Weight loading is excluded
    by default (steady-state inference with resident weights).
    """
    n_v = 16
    tile_macs = n_v * org.cols
    tiles = math.ceil(layer.macs / tile_macs) if layer.macs else 0
    groups = math.ceil(org.cols / cost.q_pcu)
    counts = {"tiles": tiles, "block_accesses": 0, "row_reads": 0, "writes": 0}
    if tiles == 0:
        return LayerEstimate(0.0, 0.0, counts)

    energy = tiles * cost.e_tile(org.technology, groups)
    serial = math.ceil(tiles / org.n_arrays)
    if org.technology == "step_cim":
        counts["block_accesses"] = tiles
        latency = serial * (cost.t_mac_block_step(n_v) + groups * cost.t_pcu_group)
    else:
        counts["row_reads"] = tiles * n_v
        latency = serial * n_v * cost.t_read_nm + cost.t_pipeline_fill

    if include_weight_load and layer.weights:
        rows_to_write = math.ceil(layer.weights / org.cols)
        counts["writes"] = rows_to_write
        t_write = cost.t_write_step() if org.technology != "sram_nm" else cost.t_write_sram
        latency += math.ceil(rows_to_write / org.n_arrays) * t_write
        e_write = (
            cost.e_write_active_sram * cost.write_active_ratio_step
            if org.technology != "sram_nm"
            else cost.e_write_active_sram
        )
        energy += rows_to_write * e_write
    return LayerEstimate(latency=latency, energy=energy, counts=counts)


def estimate_workload(
    wl: Workload, org: Organization, cost: CostModel, include_weight_load: bool = False
) -> LayerEstimate:
    est = [estimate_layer(l, org, cost, include_weight_load) for l in wl.layers]
    counts: dict = {}
    for e in est:
        for k, v in e.counts.items():
            counts[k] = counts.get(k, 0) + v
    return LayerEstimate(
        latency=sum(e.latency for e in est),
        energy=sum(e.energy for e in est),
        counts=counts,
    )


def _geomean(values) -> float:
    values = [v for v in values]
    if not values:
        return float("nan")
    return float(np.exp(np.mean(np.log(values))))


@dataclass(frozen=True)
class AreaReport:
    cell_area_step_f2: float
    cell_area_sram_f2: float
    cell_area_ratio: float          # step / sram
    cell_area_step_um2: float
    array_area_step_mm2: float
    system_area_step_mm2: float
    iso_area_arrays: dict           # technology -> array count fitting the floor plan


def _array_area_m2(technology: str, org_words: int, cost: CostModel) -> float:
    f2 = cost.F ** 2
    if technology == "step_cim":
        return org_words * cost.cell_area_step_f2 * cost.adc_area_overhead * f2
    if technology == "pefet_nm":
        return org_words * cost.cell_area_step_f2 * f2
    if technology == "sram_nm":
        return org_words * cost.cell_area_sram_f2 * cost.sram_layout_factor * f2
    raise ConfigError(f"unknown technology {technology!r}")


def area_report(org: Organization, cost: CostModel) -> AreaReport:
    """Cell/array/system areas and the iso-area baseline array counts.

    Iso-area counts are the nearest whole number of baseline arrays whose
    floor-plan area matches the in-memory system (ADC overhead included on
    the in-memory side; the sram packing factor reflects its leaner
    voltage-sense periphery).
    """
    words = org.rows * org.cols
    a_step = _array_area_m2("step_cim", words, cost)
    system = org.n_arrays * a_step
    iso_counts = {}
    for tech in ("sram_nm", "pefet_nm"):
        iso_counts[tech] = int(round(system / _array_area_m2(tech, words, cost)))
    iso_counts["step_cim"] = org.n_arrays
    return AreaReport(
        cell_area_step_f2=cost.cell_area_step_f2,
        cell_area_sram_f2=cost.cell_area_sram_f2,
        cell_area_ratio=cost.cell_area_step_f2 / cost.cell_area_sram_f2,
        cell_area_step_um2=cost.cell_area_step_f2 * (cost.F * 1e6) ** 2,
        array_area_step_mm2=a_step * 1e6,
        system_area_step_mm2=system * 1e6,
        iso_area_arrays=iso_counts,
    )


@dataclass(frozen=True)
class PeakMetrics:
    tops: float
    tops_per_w: float
    tops_per_mm2: float


def peak_metrics(org: Organization, cost: CostModel) -> PeakMetrics:
    """Peak block-engine throughput and efficiency (accumulate path excluded).

    Ops are counted as 2 per MAC. One block access performs
    rows_per_access * cols MACs in t_mac_block at e_mac_block.
    """
    ops_per_block = 2 * org.rows_per_access * org.cols
    t_block = cost.t_mac_block_step(org.rows_per_access)
    ops_rate = org.n_arrays * ops_per_block / t_block
    area_mm2 = area_report(org, cost).system_area_step_mm2
    return PeakMetrics(
        tops=ops_rate / 1e12,
        tops_per_w=(ops_per_block / cost.e_mac_block_step) / 1e12,
        tops_per_mm2=ops_rate / 1e12 / area_mm2,
    )


@dataclass(frozen=True)
class BenchmarkReport:
    per_workload: dict        # workload -> {org -> LayerEstimate}
    speedups: dict            # org -> geometric-mean speedup vs that org
    energy_ratios: dict       # org -> geometric-mean energy ratio vs step
    peak: PeakMetrics
    reference_rows: list
    mean_kind: str = "geometric"


def run_benchmark(
    suite,
    orgs: dict[str, Organization],
    cost: CostModel,
    include_weight_load: bool = False,
) -> BenchmarkReport:
    """Replay a suite on every organization; report mean speedups/ratios.

    Speedups and energy ratios are geometric means across workloads of the
    baseline-to-step ratios (mean kind is recorded in the report).
    """
    if "step_cim" not in orgs:
        raise ConfigError("orgs must include the 'step_cim' organization")
    per: dict = {}
    for wl in suite:
        per[wl.name] = {
            org_name: estimate_workload(wl, org, cost, include_weight_load)
            for org_name, org in orgs.items()
        }
    speedups = {}
    ratios = {}
    for org_name in orgs:
        if org_name == "step_cim":
            continue
        speedups[org_name] = _geomean(
            [per[w][org_name].latency / per[w]["step_cim"].latency for w in per]
        )
        ratios[org_name] = _geomean(
            [per[w][org_name].energy / per[w]["step_cim"].energy for w in per]
        )
    pk = peak_metrics(orgs["step_cim"], cost)
    rows = [dict(r) for r in REFERENCE_ACCELERATORS]
    rows[0]["tops_per_w"] = round(pk.tops_per_w, 1)
    rows[0]["tops_per_mm2"] = round(pk.tops_per_mm2, 1)
    return BenchmarkReport(
        per_workload=per, speedups=speedups, energy_ratios=ratios,
        peak=pk, reference_rows=rows,
    )


@dataclass(frozen=True)
class ReplayResult:
    outputs: np.ndarray       # hardware-quantized accumulated outputs
    exact: np.ndarray         # exact integer dot products
    clip_events: int
    mismatches: int


def functional_replay(
    weights,
    inputs,
    dev,
    cfg,
    var=None,
    ideal_accumulation: bool = False,
) -> ReplayResult:
    """Run ternary tensors through the block MAC path.

    weights is (L, n_outputs), inputs length L. Per 16-row block the
    quantized outputs accumulate (post-ADC); ``ideal_accumulation``
    bypasses quantization for ablation. ``var`` optionally applies
    threshold variation per block access (Philox streams keyed by
    (seed, block index)).
    """
    from . import array as arr

    W = np.asarray(weights, dtype=int)
    iv = np.asarray(inputs, dtype=int)
    if W.ndim != 2 or iv.ndim != 1 or W.shape[0] != iv.size:
        raise ConfigError("weights must be (L, n_out) and inputs length L")
    exact = W.T @ iv
    if ideal_accumulation:
        return ReplayResult(outputs=exact.copy(), exact=exact, clip_events=0, mismatches=0)

    n_out = W.shape[1]
    out = np.zeros(n_out, dtype=int)
    clip_events = 0
    for b, start in enumerate(range(0, iv.size, cfg.N_V)):
        stop = min(start + cfg.N_V, iv.size)
        blk_w = np.zeros((n_out, cfg.N_V), dtype=int)
        blk_i = np.zeros((n_out, cfg.N_V), dtype=int)
        blk_w[:, : stop - start] = W[start:stop].T
        blk_i[:, : stop - start] = iv[start:stop]
        kwargs = {}
        if var is not None and var.sigma_vth > 0.0:
            rng = np.random.Generator(
                np.random.Philox(key=np.array([var.seed, b], dtype=np.uint64))
            )
            kwargs["vth1"] = rng.normal(0.0, var.sigma_vth, size=(n_out, cfg.N_V))
            kwargs["vth2"] = rng.normal(0.0, var.sigma_vth, size=(n_out, cfg.N_V))
        res = arr._mac_engine(dev, cfg, blk_w, blk_i, **kwargs)
        out += res["o"]
        clip_events += int(np.sum(np.abs(res["o_ideal"]) > cfg.clip))
    return ReplayResult(
        outputs=out,
        exact=exact,
        clip_events=clip_events,
        mismatches=int(np.sum(out != exact)),
    )

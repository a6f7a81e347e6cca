"""Two-transistor ternary cell: encoding, two-phase write, read, scalar product.

A cell stores one signed ternary weight in the polarization pair of its two
storage devices M1/M2:

    (p1, p2) = (-P, -P) -> w = 0
               (+P, -P) -> w = +1
               (-P, +P) -> w = -1

(+P, +P) is unreachable by the encoder and treated as corruption.

Inputs are encoded on the word line / compute word line pair. i = +1 keeps
the back rail grounded so the bit lines apply +v_read across the films
(read polarity); i = -1 raises the back rail to v_dd so the same bit-line
level applies -v_read (reversed polarity); i = 0 leaves the word line down
and the cell disconnected. The scalar product w*i then falls out of the
current pair on the two read bit lines.

Writes use the two-phase back-rail scheme: phase 1 holds the back rail at
0 V while a bit line at v_dd writes +P where needed; phase 2 raises the
back rail to v_dd so grounded bit lines write -P. Each storage device sees
the phases through the ferroelectric transient model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ferro as fe
from .device import DeviceStack
from .errors import ConfigError, InvalidStateError
from .piezo import transduce
from .tmdfet import drain_current_at

TERNARY = (-1, 0, +1)

# weight -> (p1, p2)
_ENCODE = {0: (-1, -1), +1: (+1, -1), -1: (-1, +1)}
_DECODE = {v: k for k, v in _ENCODE.items()}


@dataclass(frozen=True)
class TernaryWord:
    """A ternary weight with its polarization encoding."""

    w: int
    p1: int
    p2: int

    @staticmethod
    def encode(w: int) -> "TernaryWord":
        if w not in TERNARY:
            raise ConfigError(f"ternary weight must be -1/0/+1, got {w!r}")
        p1, p2 = _ENCODE[w]
        return TernaryWord(w=w, p1=p1, p2=p2)

    @staticmethod
    def decode(p1: int, p2: int) -> int:
        try:
            return _DECODE[(p1, p2)]
        except KeyError:
            raise InvalidStateError(
                f"polarization pair ({p1:+d}, {p2:+d}) has no ternary encoding"
            ) from None


@dataclass(frozen=True)
class InputCode:
    """Ternary input and the word-line levels realizing it."""

    i: int
    v_WL: float
    v_CWL: float

    @staticmethod
    def encode(i: int, v_dd: float = 0.8) -> "InputCode":
        if i not in TERNARY:
            raise ConfigError(f"ternary input must be -1/0/+1, got {i!r}")
        if i == 0:
            return InputCode(i=0, v_WL=0.0, v_CWL=0.0)
        if i == +1:
            return InputCode(i=+1, v_WL=v_dd, v_CWL=0.0)
        return InputCode(i=-1, v_WL=v_dd, v_CWL=v_dd)


@dataclass(frozen=True)
class BiasVector:
    """Line voltages for one operation phase."""

    v_BL1: float
    v_BL2: float
    v_RBL1: float
    v_RBL2: float
    v_WL: float
    v_CWL: float
    phase: str = "single"       # "phi1" | "phi2" | "single"


@dataclass(frozen=True)
class CellState:
    """Ferroelectric states of the two storage devices."""

    m1: fe.FerroState
    m2: fe.FerroState

    @property
    def p1(self) -> int:
        return self.m1.stored_sign

    @property
    def p2(self) -> int:
        return self.m2.stored_sign

    @property
    def word(self) -> int:
        return TernaryWord.decode(self.p1, self.p2)


def fresh_cell(dev: DeviceStack, w: int = 0) -> CellState:
    """Cell holding ``w`` with both films at rest."""
    tw = TernaryWord.encode(w)
    return CellState(
        m1=fe.FerroState.at_rest(dev.ferro, tw.p1),
        m2=fe.FerroState.at_rest(dev.ferro, tw.p2),
    )


def write_biases(w: int, dev: DeviceStack) -> list[BiasVector]:
    """Two-phase bias table for writing ``w``."""
    tw = TernaryWord.encode(w)
    v_bl1 = dev.v_dd if tw.p1 > 0 else 0.0
    v_bl2 = dev.v_dd if tw.p2 > 0 else 0.0
    wl = dev.v_dd  # boosted in hardware; access devices modelled as ideal
    return [
        BiasVector(v_bl1, v_bl2, 0.0, 0.0, wl, 0.0, phase="phi1"),
        BiasVector(v_bl1, v_bl2, 0.0, 0.0, wl, dev.v_dd, phase="phi2"),
    ]


@dataclass(frozen=True)
class WriteResult:
    cell: CellState
    energy: float            # J, switching + dielectric
    energy_switching: float  # J, polarization-reversal component only
    latency: float           # s, two phases
    biases: tuple[BiasVector, BiasVector]


def _write_device(state: fe.FerroState, dev: DeviceStack, v_phi1: float, v_phi2: float):
    """Run one storage device through both phases plus a relax tail."""
    p = dev.ferro
    dt = p.tau_PE / 100.0
    t_phase = dev.write_phase_tau * p.tau_PE
    wf = fe.step_waveform(
        [(v_phi1, t_phase), (v_phi2, t_phase), (0.0, 10.0 * p.tau_PE)], dt
    )
    _, final = fe.transient_write(state, p, wf, dt)
    flipped = final.branch is not state.branch
    if flipped:
        drive = v_phi1 if abs(v_phi1) >= abs(v_phi2) else v_phi2
        e_switch = fe.switching_energy(p, final.P - state.P, drive)
    else:
        e_switch = 0.0
    # background dielectric charging of the film, both phase edges
    e_diel = 0.5 * p.C_linear * (v_phi1 ** 2 + v_phi2 ** 2)
    return final, e_switch, e_diel


def write_word(cell: CellState, w: int, dev: DeviceStack) -> WriteResult:
    """Two-phase write; returns the new cell plus energy and latency.

    Phase 1 (back rail low) applies V_GB = v_BL; phase 2 (back rail at
    v_dd) applies V_GB = v_BL - v_dd. Only devices whose branch flips
    contribute switching energy, so rewriting the stored word costs no
    switching component.
    """
    phi1, phi2 = write_biases(w, dev)
    m1, e_sw1, e_d1 = _write_device(cell.m1, dev, phi1.v_BL1, phi1.v_BL1 - dev.v_dd)
    m2, e_sw2, e_d2 = _write_device(cell.m2, dev, phi1.v_BL2, phi1.v_BL2 - dev.v_dd)
    new_cell = CellState(m1=m1, m2=m2)
    if new_cell.word != w:
        raise InvalidStateError(f"write of {w} settled on encoding for {new_cell.word}")
    e_switch = e_sw1 + e_sw2
    return WriteResult(
        cell=new_cell,
        energy=e_switch + e_d1 + e_d2,
        energy_switching=e_switch,
        latency=2.0 * dev.write_phase_tau * dev.ferro.tau_PE,
        biases=(phi1, phi2),
    )


def _bit_current(dev: DeviceStack, p_sign: int, v_gb: float, v_ds: float) -> float:
    """Drain current of one storage device under a sense bias."""
    dEg = transduce(p_sign, v_gb, dev.piezo, dev.ferro).dE_G
    return float(drain_current_at(dev.fet, dev.v_read, v_ds, dEg))


def _classify(current: float, dev: DeviceStack) -> str:
    """LRS/HRS classification against the geometric mid-current."""
    from .device import state_currents

    i_lrs, i_hrs, _ = state_currents(dev)
    return "LRS" if current > (i_lrs * i_hrs) ** 0.5 else "HRS"


@dataclass(frozen=True)
class ReadResult:
    i_rbl1: float
    i_rbl2: float
    w: int


def read_word(cell: CellState, dev: DeviceStack) -> ReadResult:
    """Sense the stored word; stored polarizations are untouched.

    Bit lines sit at v_read with the back rail grounded (positive-polarity
    sensing), read bit lines at v_dd. +P reads low-resistance, -P high.
    The (LRS, LRS) pattern is impossible under this polarity and flags the
    forbidden (+P, +P) pair.
    """
    i1 = _bit_current(dev, cell.p1, dev.v_read, dev.v_dd)
    i2 = _bit_current(dev, cell.p2, dev.v_read, dev.v_dd)
    c1, c2 = _classify(i1, dev), _classify(i2, dev)
    table = {("LRS", "HRS"): +1, ("HRS", "LRS"): -1, ("HRS", "HRS"): 0}
    if (c1, c2) not in table:
        raise InvalidStateError("read sensed (LRS, LRS): forbidden (+P, +P) pair")
    return ReadResult(i_rbl1=i1, i_rbl2=i2, w=table[(c1, c2)])


@dataclass(frozen=True)
class ScalarProduct:
    i_rbl1: float
    i_rbl2: float
    o: int


def scalar_product(cell: CellState, inp: InputCode, dev: DeviceStack) -> ScalarProduct:
    """In-place multiply of the stored weight by a ternary input.

    i = +1 senses at +v_read, i = -1 at -v_read (polarity reversal swaps
    the resistance classes), i = 0 disconnects the cell. The output sign
    comes from comparing the two read-bit-line currents.
    """
    if inp.i == 0:
        return ScalarProduct(0.0, 0.0, 0)
    v_gb = inp.i * dev.v_read
    i1 = _bit_current(dev, cell.p1, v_gb, dev.v_dd)
    i2 = _bit_current(dev, cell.p2, v_gb, dev.v_dd)
    from .device import state_currents

    i_lrs, i_hrs, _ = state_currents(dev)
    diff = i1 - i2
    if abs(diff) < 0.5 * (i_lrs - i_hrs):
        o = 0
    else:
        o = +1 if diff > 0 else -1
    return ScalarProduct(i_rbl1=i1, i_rbl2=i2, o=o)


@dataclass(frozen=True)
class SegmentCosts:
    """Behavioral wiring/buffer capacitances for line-energy accounting (F)."""

    c_bl_wire_per_cell: float = 0.05e-15
    c_rbl_wire_per_cell: float = 0.05e-15
    c_wl_per_cell: float = 0.03e-15
    c_buffer: float = 0.10e-15       # local-row buffer pair per access
    seg_width: int = 64              # cells per local compute-word-line


@dataclass(frozen=True)
class SegmentEnergy:
    """Per-access dynamic energy, segmented vs full-row compute-word-line, J."""

    lcwl_segmented: float
    cwl_unsegmented: float
    bl: float
    rbl: float
    wl: float
    buffer: float

    @property
    def total_segmented(self) -> float:
        return self.lcwl_segmented + self.bl + self.rbl + self.wl + self.buffer

    @property
    def total_unsegmented(self) -> float:
        return self.cwl_unsegmented + self.bl + self.rbl + self.wl


def cwl_capacitance_per_cell(dev: DeviceStack) -> float:
    """Load each cell puts on its compute word line: both film backs, F."""
    rest = fe.FerroState.at_rest(dev.ferro, -1)
    return 2.0 * fe.ferro_capacitance(rest, dev.ferro, E=0.0)


def segment_energy(
    op_kind: str,
    segment_geom: tuple[int, int],
    dev: DeviceStack,
    costs: SegmentCosts | None = None,
) -> SegmentEnergy:
    """Dynamic line-charging energy of one row access in a segmented array.

    The local compute word line only drives ``seg_width`` cells instead of
    the full row, which scales that term by seg_width / n_cols. 'write'
    swings the compute word line and one bit line to v_dd; 'read' and
    'compute' swing bit lines to v_read and read bit lines to v_dd
    ('compute' adds the compute-word-line swing used by negative inputs);
    'hold' grounds everything.
    """
    if op_kind not in ("read", "write", "compute", "hold"):
        raise ConfigError(f"unknown op_kind {op_kind!r}")
    rows, cols = segment_geom
    if rows <= 0 or cols <= 0:
        raise ConfigError("segment geometry must be positive")
    costs = costs or SegmentCosts()
    if op_kind == "hold":
        return SegmentEnergy(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    c_cell = cwl_capacitance_per_cell(dev)
    v_dd, v_read = dev.v_dd, dev.v_read
    cwl_swing = v_dd if op_kind in ("write", "compute") else 0.0
    lcwl = 0.5 * min(costs.seg_width, cols) * c_cell * cwl_swing ** 2
    cwl_full = 0.5 * cols * c_cell * cwl_swing ** 2

    c_bl_line = rows * costs.c_bl_wire_per_cell
    c_rbl_line = rows * costs.c_rbl_wire_per_cell
    if op_kind == "write":
        bl = 0.5 * cols * c_bl_line * v_dd ** 2          # one bit line per cell swings
        rbl = 0.0
    else:
        bl = 2.0 * 0.5 * cols * c_bl_line * v_read ** 2  # both bit lines at v_read
        rbl = 2.0 * 0.5 * cols * c_rbl_line * v_dd ** 2
    wl = 0.5 * cols * costs.c_wl_per_cell * v_dd ** 2
    buf = 0.5 * costs.c_buffer * v_dd ** 2 if op_kind in ("write", "compute") else 0.0
    return SegmentEnergy(
        lcwl_segmented=lcwl, cwl_unsegmented=cwl_full, bl=bl, rbl=rbl, wl=wl, buffer=buf
    )


def truth_table(dev: DeviceStack) -> list[tuple[int, int, float, float, int]]:
    """All nine (w, i) scalar products: rows of (w, i, I_RBL1, I_RBL2, o)."""
    rows = []
    for i in (0, +1, -1):
        for w in (0, +1, -1):
            cell = fresh_cell(dev, w)
            sp = scalar_product(cell, InputCode.encode(i, dev.v_dd), dev)
            rows.append((w, i, sp.i_rbl1, sp.i_rbl2, sp.o))
    return rows

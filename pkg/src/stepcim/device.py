"""Shared device stack: film + transduction + channel models plus operating voltages."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import ConfigError
from .ferro import FerroParams
from .piezo import PiezoParams, transduce
from .tmdfet import FetParams, drain_current_at


@dataclass(frozen=True)
class DeviceStack:
    """Immutable bundle of the three device models and the rail voltages.

    v_dd drives writes and the read bit lines; v_read is the sub-coercive
    sense bias on the bit lines. Both default to the calibrated operating
    point (0.8 V / 0.4 V).
    """

    ferro: FerroParams = field(default_factory=FerroParams)
    piezo: PiezoParams = field(default_factory=PiezoParams)
    fet: FetParams = field(default_factory=FetParams)
    v_dd: float = 0.8
    v_read: float = 0.4
    write_phase_tau: float = 5.0    # write phase length in units of tau_PE

    def __post_init__(self):
        if self.v_dd <= 0.0 or self.v_read <= 0.0:
            raise ConfigError("rail voltages must be positive")
        if self.v_read >= self.ferro.V_C:
            raise ConfigError(
                f"v_read={self.v_read} V would disturb stored bits "
                f"(coercive voltage {self.ferro.V_C:.3g} V)"
            )
        if self.v_dd <= self.ferro.V_C:
            raise ConfigError(
                f"v_dd={self.v_dd} V cannot write (coercive voltage {self.ferro.V_C:.3g} V)"
            )


@lru_cache(maxsize=32)
def sense_gap_shift(dev: DeviceStack) -> float:
    """|dE_G| produced by the sense bias, eV (sign follows P * sign(V_GB))."""
    return transduce(+1, dev.v_read, dev.piezo, dev.ferro).dE_G


@lru_cache(maxsize=32)
def state_currents(dev: DeviceStack) -> tuple[float, float, float]:
    """(I_LRS, I_HRS, I_ref) at the nominal sense point with ideal drain rail, A."""
    dEg = sense_gap_shift(dev)
    i_lrs = float(drain_current_at(dev.fet, dev.v_read, dev.v_dd, +dEg))
    i_hrs = float(drain_current_at(dev.fet, dev.v_read, dev.v_dd, -dEg))
    i_ref = float(drain_current_at(dev.fet, dev.v_read, dev.v_dd, 0.0))
    return i_lrs, i_hrs, i_ref

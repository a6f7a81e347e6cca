"""Lumped ferroelectric capacitor: hysteresis branches and switching transient.

The stored bit lives in the remnant polarization of a PZT-5H film. The
static P-E response is a saturated-loop tanh model with two branches:

    P(E) = P_S * tanh((E - s*E_C) / (2*delta)) + eps0*eps_r*E

with s = +1 on the ascending branch (device polarized negative, switching
centred at +E_C) and s = -1 on the descending branch (polarized positive,
switching centred at -E_C). The transition width ``delta`` is fixed by the
loop constants so that P(0) = -P_R / +P_R exactly on the respective
branches; see :func:`delta_shape`.

A branch flip models a committed polarization reversal and happens exactly
when the applied field crosses the coercive field against the stored state
(|E| > E_C with opposing sign). Sub-coercive excursions are fully
reversible, which is what makes non-destructive sensing possible. Minor
loops are not modelled; writes are full-swing.

The switching delay is a single-pole RC lag: the field seen by the
hysteresis element follows the applied field with time constant ``tau_PE``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import EPS0
from .errors import ConfigError, DegenerateLoopError, ResolutionError


class Branch(Enum):
    """Hysteresis branch tag.

    ASCENDING holds -P at rest and switches positive at +E_C;
    DESCENDING holds +P at rest and switches negative at -E_C.
    """

    ASCENDING = "ascending"
    DESCENDING = "descending"

    @property
    def center_sign(self) -> int:
        """Sign s in the tanh argument (E - s*E_C)."""
        return +1 if self is Branch.ASCENDING else -1

    @property
    def stored_sign(self) -> int:
        """Sign of the remnant polarization this branch holds at E = 0."""
        return -1 if self is Branch.ASCENDING else +1

    @staticmethod
    def for_stored(polarity: int) -> "Branch":
        return Branch.DESCENDING if polarity > 0 else Branch.ASCENDING


@dataclass(frozen=True)
class FerroParams:
    """PZT-5H film constants and hammer geometry.

    P_S, P_R in C/m^2; E_C in V/m; thicknesses and lateral dims in m;
    tau_PE in s. Defaults are the calibrated PZT-5H values.
    """

    P_S: float = 0.35
    P_R: float = 0.32
    E_C: float = 9e5            # 9 kV/cm
    eps_r: float = 4000.0
    t_PE: float = 600e-9
    L_PE: float = 100e-9
    W_PE: float = 180e-9
    tau_PE: float = 1.8e-9

    def __post_init__(self):
        if not (0.0 < self.P_R < self.P_S):
            raise DegenerateLoopError(
                f"need 0 < P_R < P_S for a finite-width loop, got P_R={self.P_R}, P_S={self.P_S}"
            )
        for name in ("E_C", "t_PE", "L_PE", "W_PE", "tau_PE"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"FerroParams.{name} must be positive")

    @property
    def A_PE(self) -> float:
        """Hammer (top electrode) area, m^2."""
        return self.L_PE * self.W_PE

    @property
    def V_C(self) -> float:
        """Coercive voltage E_C * t_PE, V. Writes require |V_GB| above this."""
        return self.E_C * self.t_PE

    @property
    def C_linear(self) -> float:
        """Background dielectric capacitance eps0*eps_r*A/t, F."""
        return EPS0 * self.eps_r * self.A_PE / self.t_PE


@dataclass(frozen=True)
class FerroState:
    """Current polarization, active branch, and last applied field."""

    P: float
    branch: Branch
    E_applied: float = 0.0

    @staticmethod
    def at_rest(params: FerroParams, polarity: int) -> "FerroState":
        """State holding +P_R (polarity > 0) or -P_R at zero field."""
        branch = Branch.for_stored(polarity)
        return FerroState(P=branch.stored_sign * params.P_R, branch=branch)

    @property
    def stored_sign(self) -> int:
        return self.branch.stored_sign


def delta_shape(params: FerroParams) -> float:
    """Transition field width delta = E_C / ln((P_S+P_R)/(P_S-P_R)), V/m.

    This choice makes tanh(E_C / (2*delta)) = P_R/P_S, i.e. the branches
    pass through exactly -/+P_R at zero field.
    """
    if params.P_R >= params.P_S:
        raise DegenerateLoopError("P_R >= P_S gives a non-positive log argument")
    ratio = (params.P_S + params.P_R) / (params.P_S - params.P_R)
    log = math.log(ratio)
    if log <= 0.0:
        raise DegenerateLoopError("degenerate loop: ln((P_S+P_R)/(P_S-P_R)) <= 0")
    return params.E_C / log


def _branch_polarization(params: FerroParams, branch: Branch, E):
    """Static P on a fixed branch (vectorized over E)."""
    delta = delta_shape(params)
    arg = (np.asarray(E, dtype=float) - branch.center_sign * params.E_C) / (2.0 * delta)
    return params.P_S * np.tanh(arg) + EPS0 * params.eps_r * np.asarray(E, dtype=float)


def _flip(branch: Branch, E: float, E_C: float) -> Branch:
    """Apply the coercive-crossing rule: flip only past +/-E_C against the branch."""
    if branch is Branch.ASCENDING and E > E_C:
        return Branch.DESCENDING
    if branch is Branch.DESCENDING and E < -E_C:
        return Branch.ASCENDING
    return branch


def polarization_static(state: FerroState, params: FerroParams, E: float) -> FerroState:
    """Quasistatic field application; returns the updated state.

    The branch flips first if E crosses the opposing coercive field, then P
    is evaluated on the (possibly new) branch, so repeated application of
    the same field is a no-op.
    """
    branch = _flip(state.branch, E, params.E_C)
    P = float(_branch_polarization(params, branch, E))
    return FerroState(P=P, branch=branch, E_applied=E)


def ferro_capacitance(state: FerroState, params: FerroParams, E: float | None = None) -> float:
    """Small-signal capacitance (A_PE/t_PE) * dP/dE on the active branch, F.

    dP/dE is analytic: P_S/(2*delta) * sech^2 + eps0*eps_r, so the result
    is always at least the parallel-plate dielectric value and peaks at the
    branch's coercive point.
    """
    if E is None:
        E = state.E_applied
    delta = delta_shape(params)
    arg = (E - state.branch.center_sign * params.E_C) / (2.0 * delta)
    dP_dE = params.P_S / (2.0 * delta) / math.cosh(arg) ** 2 + EPS0 * params.eps_r
    return params.A_PE / params.t_PE * dP_dE


def sweep(state: FerroState, params: FerroParams, E_values) -> tuple[np.ndarray, list[Branch], FerroState]:
    """Quasistatic sweep over a field sequence.

    Returns (P values, branch per point, final state). Used for P-E loop
    traces; branch flips follow the coercive-crossing rule point by point.
    """
    E_values = np.asarray(E_values, dtype=float)
    P_out = np.empty_like(E_values)
    branches: list[Branch] = []
    for k, E in enumerate(E_values):
        state = polarization_static(state, params, float(E))
        P_out[k] = state.P
        branches.append(state.branch)
    return P_out, branches, state


@dataclass(frozen=True)
class WriteTrajectory:
    """Time series from a transient write: applied volts, lagged field, P."""

    t: np.ndarray           # s
    v_applied: np.ndarray   # V across the film
    E_lag: np.ndarray       # delayed field at the hysteresis element, V/m
    P: np.ndarray           # C/m^2
    branch_sign: np.ndarray  # +1 descending (+P side), -1 ascending


def transient_write(
    state: FerroState,
    params: FerroParams,
    v_waveform,
    dt: float,
) -> tuple[WriteTrajectory, FerroState]:
    """Integrate the RC-delayed polarization response to a voltage waveform.

    The field at the hysteresis element follows E_applied = v/t_PE through a
    first-order lag with time constant tau_PE (explicit fixed-step Euler);
    at each step the static branch model is re-evaluated. dt must resolve
    the lag: dt <= tau_PE / 20.
    """
    v_waveform = np.asarray(v_waveform, dtype=float)
    if not np.all(np.isfinite(v_waveform)):
        raise ConfigError("write waveform must be finite")
    if dt <= 0.0 or dt > params.tau_PE / 20.0:
        raise ResolutionError(
            f"dt={dt:g} s too coarse; need dt <= tau_PE/20 = {params.tau_PE / 20.0:g} s"
        )

    n = v_waveform.size
    t = np.arange(1, n + 1) * dt
    E_lag = np.empty(n)
    P = np.empty(n)
    branch_sign = np.empty(n, dtype=np.int8)

    E = state.E_applied
    branch = state.branch
    alpha = dt / params.tau_PE
    for k in range(n):
        E_target = v_waveform[k] / params.t_PE
        E = E + alpha * (E_target - E)
        branch = _flip(branch, E, params.E_C)
        E_lag[k] = E
        P[k] = float(_branch_polarization(params, branch, E))
        branch_sign[k] = branch.stored_sign

    final = FerroState(P=float(P[-1]), branch=branch, E_applied=float(E))
    traj = WriteTrajectory(t=t, v_applied=v_waveform, E_lag=E_lag, P=P, branch_sign=branch_sign)
    return traj, final


def step_waveform(levels_and_durations, dt: float) -> np.ndarray:
    """Build a piecewise-constant waveform from (volts, seconds) pairs."""
    chunks = []
    for volts, duration in levels_and_durations:
        n = max(1, int(round(duration / dt)))
        chunks.append(np.full(n, float(volts)))
    return np.concatenate(chunks) if chunks else np.zeros(0)


def switching_energy(params: FerroParams, delta_P: float, v_drive: float) -> float:
    """Charge-based energy of one polarization reversal, J.

    Uses the effective switching capacitance C_eff = A_PE*|dP|/|dV| so the
    usual 0.5*C*V^2 form reduces to 0.5*A_PE*|dP|*|V|.
    """
    return 0.5 * params.A_PE * abs(delta_P) * abs(v_drive)

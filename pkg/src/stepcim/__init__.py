"""Device-to-system simulator for strain-based ternary compute-in-memory.

Layers, bottom up:

- :mod:`stepcim.ferro`   -- ferroelectric film: hysteresis + write transient
- :mod:`stepcim.piezo`   -- polarization-dependent stress and bandgap shift
- :mod:`stepcim.tmdfet`  -- bandgap-modulated channel I-V
- :mod:`stepcim.cell`    -- two-device ternary cell: write/read/multiply
- :mod:`stepcim.array`   -- multi-row analog MAC, ADC, margins, variation
- :mod:`stepcim.system`  -- accelerator latency/energy/area estimates
- :mod:`stepcim.config`  -- configuration files and calibration
- :mod:`stepcim.cli`     -- command-line interface
"""

__version__ = "0.1.0"

from .array import ArrayConfig, MacResult, VariationConfig
from .cell import CellState, InputCode, TernaryWord
from .config import GlobalConfig, calibrate, default_config, load_config
from .device import DeviceStack
from .ferro import FerroParams, FerroState
from .piezo import PiezoParams, StressResult
from .system import CostModel, Organization, Workload, WorkloadLayer
from .tmdfet import FetBias, FetParams

__all__ = [
    "ArrayConfig",
    "CellState",
    "CostModel",
    "DeviceStack",
    "FerroParams",
    "FerroState",
    "FetBias",
    "FetParams",
    "GlobalConfig",
    "InputCode",
    "MacResult",
    "Organization",
    "PiezoParams",
    "StressResult",
    "TernaryWord",
    "VariationConfig",
    "Workload",
    "WorkloadLayer",
    "calibrate",
    "default_config",
    "load_config",
    "__version__",
]

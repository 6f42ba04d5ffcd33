"""Planar spin-1 condensate simulator with magnetic dipolar interactions."""

__version__ = "0.1.0"

from .errors import (GridMismatch, InvalidParameter, NumericalFailure,
                     SpintexError)
from .grid import Grid2D
from .params import (DerivedParams, PhysicalParams, default_params,
                     derive_params)
from .field import (InitialState, MagnetizationField, add_noise,
                    imprint_helix, magnetization, number_density,
                    prepare_initial, rotate_spinor, spin_density,
                    transverse_state)
from .dipole import DipolarCoupling, helix_column_energy, interaction_kernel
from .dynamics import (Evolver, EvolutionSpec, PulseEvent, PulseSchedule,
                       evolve, make_cancellation_schedule)
from .analysis import (OrderParamSeries, PowerSpectrum, RegionSpec, Vortex,
                       VortexSet, correlation, detect_vortices,
                       dominant_wavevector, growth_rate, order_parameters,
                       power_spectrum, sixfold_anisotropy)
from .io_text import (RunConfig, config_hash, load_config, parse_config,
                      read_snapshot, read_timeseries, serialize_config,
                      write_snapshot, write_timeseries)
from .runner import RunResult, analyze_run, run_simulate, run_sweep_kappa
from .selfcheck import run_selfcheck

__all__ = [
    "__version__",
    "SpintexError", "InvalidParameter", "GridMismatch", "NumericalFailure",
    "Grid2D", "PhysicalParams", "DerivedParams", "default_params",
    "derive_params",
    "InitialState", "MagnetizationField", "add_noise", "imprint_helix",
    "magnetization", "number_density", "prepare_initial", "rotate_spinor",
    "spin_density", "transverse_state",
    "DipolarCoupling", "helix_column_energy", "interaction_kernel",
    "Evolver", "EvolutionSpec", "PulseEvent", "PulseSchedule", "evolve",
    "make_cancellation_schedule",
    "OrderParamSeries", "PowerSpectrum", "RegionSpec", "Vortex", "VortexSet",
    "correlation", "detect_vortices", "dominant_wavevector", "growth_rate",
    "order_parameters", "power_spectrum", "sixfold_anisotropy",
    "RunConfig", "config_hash", "load_config", "parse_config",
    "read_snapshot", "read_timeseries", "serialize_config", "write_snapshot",
    "write_timeseries",
    "RunResult", "analyze_run", "run_simulate", "run_sweep_kappa",
    "run_selfcheck",
]

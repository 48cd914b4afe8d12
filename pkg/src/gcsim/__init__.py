"""Trace-driven cache hierarchy simulator with gain-cell, eDRAM and STT-RAM
technology models: latency, refresh, energy and EDP accounting."""
from .catalog import Level, TechClass, builtin_params, load_catalog, scale
from .config import HierarchyConfig, LevelConfig, RunConfig, load_run_config, preset
from .engine import SimReport, Simulator, run_sweep, simulate, simulate_run
from .trace import Trace, TraceHeader, TraceRecord, gen_loop, gen_random, gen_stream, interleave

__version__ = "0.1.0"

__all__ = [
    "HierarchyConfig", "Level", "LevelConfig", "RunConfig", "SimReport", "Simulator", "TechClass",
    "Trace", "TraceHeader", "TraceRecord", "builtin_params", "gen_loop", "gen_random",
    "gen_stream", "interleave", "load_catalog", "load_run_config", "preset", "run_sweep",
    "scale", "simulate", "simulate_run",
]

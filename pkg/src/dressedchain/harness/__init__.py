"""Experiment driver: config files, runs, spectra, plot scripts and the CLI."""
from .config import (OBSERVABLES, SCHEMA_VERSION, ConfigError, ExperimentConfig,
                     InitialStateSpec, OutputSpec, build_initial_state, parse_config,
                     parse_config_text)
from .plots import emit_plots
from .runner import RunResult, read_frames, read_matrix, run, uniform_prefix
from .spectrum import SpectrumResult, spectrum
from .configs import config_path, shipped_configs

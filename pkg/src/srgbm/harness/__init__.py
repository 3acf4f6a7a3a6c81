"""Experiment configuration, runners, CSV/SVG output and the ``srgbm`` command."""

from .config import ConfigError, ExperimentConfig, default_config, load, parse, render
from .experiments import RUNNERS, cell_seed, run, write_outputs
from .table import ResultTable

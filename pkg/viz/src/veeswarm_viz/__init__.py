"""Figure emitter for veeswarm run artifacts."""

from .figures import FIGURE_KINDS, emit, render, write_animation
from .io import InputError, load_run, read_metrics, read_scenario_file, read_summary, read_trajectory

__version__ = "0.1.0"

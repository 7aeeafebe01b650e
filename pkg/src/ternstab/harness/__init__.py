"""Scenario files, the suite runner and the command line interface."""

from .runner import RunReport, Series, emit_plot_data, run, write_outputs
from .scenario import Scenario, bundled_scenarios, load_scenario, parse_scenario, serialize

__all__ = ["RunReport", "Scenario", "Series", "bundled_scenarios", "emit_plot_data",
           "load_scenario", "parse_scenario", "run", "serialize", "write_outputs"]

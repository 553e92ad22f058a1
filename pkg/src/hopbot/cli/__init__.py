"""Scenario runner: JSON configs in, CSV and JSON artifacts out."""

from .config import KINDS, Scenario, load_scenario
from .main import build_parser, main, run_scenarios, stage_one
from .scenarios import execute, prepare

__all__ = ["KINDS", "Scenario", "build_parser", "execute", "load_scenario", "main", "prepare",
           "run_scenarios", "stage_one"]

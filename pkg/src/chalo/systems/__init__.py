"""Reference simulators for the bundled universes.

Each simulator is a deterministic step function that emits a trace of
total snapshots, suitable for window-by-window conformance checking
against the named formulas of its universe.
"""

from .subway import SCENARIOS as SUBWAY_SCENARIOS, ScriptError, run as run_subway
from .stopwatch import SCENARIOS as STOPWATCH_SCENARIOS, run as run_stopwatch
from .switch import SCENARIOS as SWITCH_SCENARIOS, SwitchResult, run as run_switch

__all__ = [
    "ScriptError", "SwitchResult",
    "run_subway", "run_stopwatch", "run_switch",
    "SUBWAY_SCENARIOS", "STOPWATCH_SCENARIOS", "SWITCH_SCENARIOS",
]

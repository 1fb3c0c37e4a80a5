"""Stopwatch simulator.

Inputs are the start/stop button, a tick source that toggles every step
unless overridden, and a reset line.  The machine starts in init, drops
to stop on the next step, and a button press (a 0 to 1 edge) toggles
stop and start.  In start the counter advances on each tick edge and
the reading is emitted to time for one step; otherwise time is absent.
A reset edge preempts everything and re-enters init.
"""

from __future__ import annotations

from ..snapshots import Snapshot
from ..traces import Trace
from ..values import ABS, Nat, Sym

SCENARIOS = {
    "idle": "",
    "basic": "strp@3,strp@9",
    "press_strp_at_2": "strp@2",
    "reset": "strp@3,strp@9,reset@12",
}

_TOGGLE = {"init": "stop", "stop": "start", "start": "stop"}


def parse_script(text: str):
    """Comma-separated strp@STEP / reset@STEP pulses, or a scenario name."""
    text = SCENARIOS.get(text, text)
    pulses = {"strp": set(), "reset": set()}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, step = part.partition("@")
        if name not in pulses or not step.isdigit():
            raise ValueError(
                "stopwatch scripts know strp@STEP and reset@STEP, got %r" % part)
        pulses[name].add(int(step))
    return pulses


def run(uni, steps: int = 20, script: str = "basic", ticks=None) -> Trace:
    pulses = parse_script(script)
    if ticks is None:
        ticks = [t % 2 for t in range(steps)]
    strp = [1 if t in pulses["strp"] else 0 for t in range(steps)]
    reset = [1 if t in pulses["reset"] else 0 for t in range(steps)]

    out = []
    mode, counter, time = "init", 0, ABS
    for t in range(steps):
        if t > 0:
            reset_edge = reset[t - 1] == 0 and reset[t] == 1
            strp_edge = strp[t - 1] == 0 and strp[t] == 1
            tick_edge = ticks[t - 1] == 0 and ticks[t] == 1
            prev = mode
            if reset_edge:
                mode, counter, time = "init", 0, ABS
            else:
                if strp_edge:
                    mode = _TOGGLE[prev]
                elif prev == "init":
                    mode = "stop"
                if prev == "init":
                    # leaving init emits the zeroed counter once
                    counter = 0
                    time = Nat(0)
                elif prev == "start" and tick_edge:
                    counter += 1
                    time = Nat(counter)
                else:
                    time = ABS
        out.append(Snapshot({
            ("strp",): Nat(strp[t]),
            ("tick",): Nat(ticks[t]),
            ("reset",): Nat(reset[t]),
            ("mode",): Sym(mode),
            ("counter",): Nat(counter),
            ("time",): time,
        }))
    return Trace(uni, out)

"""Single-track subway simulator.

A train enters at A, crosses to B, leaves through C, one step per hop.
The switch sensor/actuator and the lights react within the same step:
L_A is red exactly while a train occupies A, the switch connects AB
during entry and BC during the stay on B, and L_B grants the exit.
"""

from __future__ import annotations

from ..snapshots import Snapshot
from ..traces import Trace
from ..values import Nat, Sym

SCENARIOS = {
    "idle": "",
    "one_pass": "enter@2",
    "two_pass": "enter@2,enter@8",
}


class ScriptError(ValueError):
    pass


def parse_script(text: str):
    """Comma-separated enter@STEP events, or a scenario name."""
    text = SCENARIOS.get(text, text)
    steps = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if not part.startswith("enter@"):
            raise ScriptError("subway scripts know only enter@STEP, got %r" % part)
        try:
            steps.append(int(part[len("enter@"):]))
        except ValueError:
            raise ScriptError("bad step number in %r" % part)
    steps.sort()
    for a, b in zip(steps, steps[1:]):
        # a train needs three steps (A, B, C) before the next may enter
        if b - a < 3:
            raise ScriptError(
                "enter@%d while the enter@%d train is still inside" % (b, a))
    return steps


# outputs per train position: A, B, C, SenS, ActS, L_A, L_B
_STATE = {
    None: (0, 0, 0, "off", "off", "G", "R"),
    "A": (1, 0, 0, "AB", "AB", "R", "R"),
    "B": (0, 1, 0, "BC", "BC", "G", "G"),
    "C": (0, 0, 1, "off", "off", "G", "R"),
}


def run(uni, steps: int = 10, script: str = "one_pass") -> Trace:
    enters = parse_script(script)
    out = []
    for t in range(steps):
        pos = None
        for e in enters:
            if t == e:
                pos = "A"
            elif t == e + 1:
                pos = "B"
            elif t == e + 2:
                pos = "C"
        a, b, c, sens, acts, la, lb = _STATE[pos]
        out.append(Snapshot({
            ("A",): Nat(a), ("B",): Nat(b), ("C",): Nat(c),
            ("SenS",): Sym(sens), ("ActS",): Sym(acts),
            ("L_A",): Sym(la), ("L_B",): Sym(lb),
        }))
    return Trace(uni, out)

"""Execution traces and conformance checking.

A trace is a sequence of snapshots: every flat place bound at every step,
buffer bits bound as the system uses them.  A depth-k window starting at
step i packs the 2^k consecutive changes over snapshots i .. i+2^k into
one model (a plain change for k = 0); neighbouring changes share their
boundary snapshot, so windows are glued by construction.

``conform`` frame-completes a formula and evaluates it over windows.  A
top-level ";" chain is anchored to the run: with stages U1 ; ... ; Un,
stage Ui covers window i-1 and the last stage covers every window from
n-1 on.  That matches reading ";" as phases of the run rather than a
fact about each window in isolation.  In guarded mode an explicit guard
formula selects the windows to check instead, the whole formula is
evaluated on each selected window, and a guard that never fires is
reported loudly rather than passing silently."""

from __future__ import annotations

from dataclasses import dataclass, field

from .desugar import frame_complete, normalize
from .formulas import Seq, level_of, pretty
from .parser import ParseError
from .semantics import Engine
from .snapshots import Change, Snapshot, model_from_slots, slots
from .universe import Universe
from .values import Nat, parse_value_token, path_key, path_str


class TraceError(ValueError):
    pass


@dataclass
class Trace:
    universe: Universe
    steps: list

    def __len__(self):
        return len(self.steps)

    def window_count(self, depth: int) -> int:
        return len(self.steps) - 2 ** depth

    def replace_step(self, i, **bindings):
        """Copy with step i rebound; values given as value objects keyed by
        place name."""
        steps = list(self.steps)
        steps[i] = steps[i].update({(k,): v for k, v in bindings.items()})
        return Trace(self.universe, steps)


def window(trace: Trace, i: int, depth: int = 0):
    """Model of the 2^depth changes starting at step i."""
    n = 2 ** depth
    if i < 0:
        raise TraceError("window index must not be negative")
    snaps = trace.steps[i:i + n + 1]
    if len(snaps) != n + 1:
        raise TraceError(
            "window %d at depth %d needs steps up to %d, trace has %d"
            % (i, depth, i + n, len(trace.steps)))
    if depth == 0:
        return Change(snaps[0], snaps[1])
    ss = []
    for k in range(n):
        ss.extend((snaps[k], snaps[k + 1]))
    return model_from_slots(depth + 1, ss)


# --- trace files -----------------------------------------------------------

def parse_trace(text: str, universe: Universe) -> Trace:
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((no, line))
    if not lines:
        raise TraceError("empty trace")
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "trace":
        raise TraceError("line %d: header must be 'trace UNIVERSE STEPS'" % no)
    if parts[1] != universe.name:
        raise TraceError(
            "trace speaks about universe %r, expected %r" % (parts[1], universe.name))
    want = int(parts[2])
    steps = []
    for no, line in lines[1:]:
        steps.append(_parse_step(line, universe, no))
    if len(steps) != want:
        raise TraceError(
            "header promises %d steps, file has %d" % (want, len(steps)))
    return Trace(universe, steps)


def _parse_step(line: str, uni: Universe, no: int) -> Snapshot:
    bindings = {}
    for tok in line.split():
        lhs, sep, rhs = tok.partition("=")
        if not sep:
            raise TraceError("line %d: bad binding %r" % (no, tok))
        segs = lhs.split(".")
        head = segs[0]
        if uni.is_flat_place(head):
            if len(segs) != 1:
                raise TraceError("line %d: place %s takes no sub-path" % (no, head))
            v = parse_value_token(rhs)
            if not uni.check_flat_value(head, v):
                raise TraceError(
                    "line %d: value %s outside the alphabet of %s" % (no, rhs, head))
            bindings[(head,)] = v
        elif uni.is_buffer(head):
            tree = uni.tree
            if len(segs) == 2:
                entry = tree.entry_index(
                    int(segs[1]) if segs[1].isdigit() else segs[1])
                val = int(rhs)
                paths = tree.bit_paths(head, entry)
                if val >= (1 << tree.width):
                    raise TraceError("line %d: %d too wide for an entry" % (no, val))
                for k, p in enumerate(paths):
                    bindings[p] = Nat((val >> k) & 1)
            elif len(segs) == 3:
                entry = tree.entry_index(
                    int(segs[1]) if segs[1].isdigit() else segs[1])
                off = int(segs[2])
                tree.check_offsets(off, off)
                if rhs not in ("0", "1"):
                    raise TraceError("line %d: bits are 0 or 1" % no)
                bindings[(head, entry, off)] = Nat(int(rhs))
            else:
                raise TraceError("line %d: bad buffer path %r" % (no, lhs))
        else:
            raise TraceError("line %d: unknown place %r" % (no, head))
    for place in uni.flat_places():
        if (place,) not in bindings:
            raise TraceError("line %d: place %s unbound" % (no, place))
    return Snapshot(bindings)


def trace_to_text(trace: Trace) -> str:
    uni = trace.universe
    out = ["trace %s %d" % (uni.name, len(trace.steps))]
    for snap in trace.steps:
        toks = []
        flat = [p for p in snap.sorted_paths() if len(p) == 1]
        for p in flat:
            toks.append("%s=%s" % (p[0], snap[p]))
        entries = {}
        for p in snap.sorted_paths():
            if len(p) == 3:
                entries.setdefault(p[:2], []).append((p[2], snap[p]))
        for (buf, e), bits in sorted(entries.items(), key=lambda kv: path_key(kv[0])):
            width = uni.tree.width if uni.tree else 0
            if len(bits) == width:
                bits.sort()
                val = sum(v.n << k for k, (_, v) in enumerate(bits))
                toks.append("%s.%d=%d" % (buf, e, val))
            else:
                for off, v in sorted(bits):
                    toks.append("%s.%d.%d=%s" % (buf, e, off, v))
        out.append(" ".join(toks))
    return "\n".join(out) + "\n"


def load_trace(path, universe) -> Trace:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_trace(fh.read(), universe)


# --- conformance -----------------------------------------------------------

@dataclass
class ConformReport:
    universe: str
    formula: str
    level: int
    mode: str
    window_count: int
    checked: list
    violations: list
    guard_matched: int = None
    vacuous: bool = False
    stage_names: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self):
        d = {
            "universe": self.universe,
            "formula": self.formula,
            "level": self.level,
            "mode": self.mode,
            "windows": self.window_count,
            "checked": list(self.checked),
            "violations": list(self.violations),
            "ok": self.ok,
        }
        if self.mode == "guarded":
            d["guard_matched"] = self.guard_matched
            d["vacuous"] = self.vacuous
        return d

    def __str__(self):
        lines = [
            "universe: %s" % self.universe,
            "formula: %s" % self.formula,
            "windows: %d (depth %d)" % (self.window_count, self.level - 1),
        ]
        if self.mode == "guarded":
            lines.append("guard matched %d of %d windows"
                         % (self.guard_matched, self.window_count))
            if self.vacuous:
                lines.append("WARNING: the guard never fired; "
                             "this check is vacuous")
        if self.violations:
            lines.append("violated on windows: %s"
                         % ", ".join(str(i) for i in self.violations))
            lines.append("verdict: FAIL")
        else:
            lines.append("verdict: ok")
        return "\n".join(lines)


def seq_stages(f):
    """Flatten a top-level ; chain."""
    if isinstance(f, Seq):
        return seq_stages(f.left) + seq_stages(f.right)
    return [f]


def conform(trace: Trace, f, mode="every", guard=None, engine=None,
            formula_name=None):
    """Check every window (or every guard-selected window) of the trace.

    Returns a ConformReport; report.ok means no violations."""
    uni = trace.universe
    engine = engine or Engine(uni)
    nf = normalize(f, uni)
    level = level_of(nf)
    if level is None or level < 1:
        raise TraceError("conformance needs a formula about changes (level >= 1)")
    depth = level - 1
    total = trace.window_count(depth)
    if total < 0:
        raise TraceError(
            "trace too short: depth-%d windows need %d steps, trace has %d"
            % (depth, 2 ** depth + 1, len(trace.steps)))
    name = formula_name or pretty(f)

    if mode == "guarded":
        if guard is None:
            raise TraceError("guarded mode needs a guard formula")
        ng = normalize(guard, uni)
        glevel = level_of(ng)
        if glevel not in (None, level):
            raise TraceError("guard level %s does not match formula level %d"
                             % (glevel, level))
        gfc = frame_complete(ng, uni, level)
        ffc = frame_complete(nf, uni, level)
        checked, violations, matched = [], [], 0
        for i in range(total):
            m = window(trace, i, depth)
            if not engine.sat(gfc, m):
                continue
            matched += 1
            checked.append(i)
            if not engine.sat(ffc, m):
                violations.append(i)
        return ConformReport(uni.name, name, level, "guarded", total,
                             checked, violations, guard_matched=matched,
                             vacuous=(matched == 0))

    if mode != "every":
        raise TraceError("unknown conformance mode %r" % mode)
    stages = seq_stages(nf)
    # a trace of exactly 2^depth steps offers no window; vacuously conformant
    if total and len(stages) > total:
        raise TraceError(
            "formula has %d stages but the trace only offers %d windows"
            % (len(stages), total))
    fcs = [frame_complete(s, uni, level) for s in stages]
    checked, violations = [], []
    for i in range(total):
        stage = fcs[i] if i < len(fcs) - 1 else fcs[-1]
        m = window(trace, i, depth)
        checked.append(i)
        if not engine.sat(stage, m):
            violations.append(i)
    return ConformReport(uni.name, name, level, "every", total,
                         checked, violations,
                         stage_names=[pretty(s) for s in stages])

"""Exact satisfaction checking.

The engine evaluates normalized formulas (see desugar.normalize) over
models: snapshots at level 0, changes at level 1, nested change trees
above.  Evaluation is exact with respect to the separating semantics:
atoms pin their footprint precisely, * and (+) search binding splits,
";" quantifies over intermediate models, pairs at level two and up glue
their seam.

Two speed layers sit on top of the naive clauses and are both sound and
complete with respect to them:

* split pruning: a binding only goes to an operand whose footprint can
  absorb it, and must go to an operand that requires it;
* structural enumeration: for the tight fragment (atoms, emp, *, pairs,
  ";", exists, and/or) the models of a formula are enumerated directly
  instead of testing every candidate intermediate of a ";".

``Engine(prune=False)`` switches both layers off and falls back to blind
search, which serves as the oracle in the test suite.
"""

from __future__ import annotations

import itertools

from .desugar import all_holes_like, footprint as _footprint, free_in, is_pure
from .formulas import (
    And, Arith, Atom, Emp, Exists, FalseF, Frame, Hole, Implies, Lit,
    MacroCall, Not, NotPat, Or, Pair, RangeSeg, Rel, Seq, Star, Overlap,
    TrueF, Tup, Var, level_of, pattern_leaves,
)
from .snapshots import (
    EMPTY, Change, Snapshot, combine_models, halves, join_halves,
    model_from_slots, model_level, seam_ok, slot_count, slots,
)
from .trees import BitRangeError, assemble_bits, bits_of
from .values import Nat, Value, path_key, value_key


class EvalError(ValueError):
    pass


class NotEnumerable(Exception):
    pass


FREE = object()  # template marker for an unconstrained slot


# --- expressions -----------------------------------------------------------

def eval_expr(e, env):
    """Value of an expression, or None when the result is undefined
    (negative difference, mod by zero, arithmetic on non-naturals)."""
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        if e.name not in env:
            raise EvalError("unbound variable %r" % e.name)
        return env[e.name]
    if isinstance(e, Arith):
        a = eval_expr(e.left, env)
        b = eval_expr(e.right, env)
        if not (isinstance(a, Nat) and isinstance(b, Nat)):
            return None
        if e.op == "+":
            return Nat(a.n + b.n)
        if e.op == "-":
            return None if a.n < b.n else Nat(a.n - b.n)
        if e.op == "mod":
            return None if b.n == 0 else Nat(a.n % b.n)
        raise EvalError("bad arithmetic op %r" % e.op)
    if isinstance(e, Hole):
        raise EvalError("hole outside a pattern")
    raise EvalError("not an expression: %r" % (e,))


def eval_rel(op, a, b) -> bool:
    if a is None or b is None:
        return False
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if not (isinstance(a, Nat) and isinstance(b, Nat)):
        return False
    return a.n < b.n if op == "<" else a.n <= b.n


# --- ground paths ----------------------------------------------------------

class GroundPath:
    """A resolved atom path: the concrete bit or place paths it covers and
    how to read a value off them."""

    __slots__ = ("paths", "tree")

    def __init__(self, paths, tree):
        self.paths = paths  # tuple of concrete paths
        self.tree = tree    # True: value is assembled from bits

    def read(self, snap: Snapshot):
        """Value stored at this ground path, or None when incomplete."""
        if not self.tree:
            return snap.get(self.paths[0])
        bits = []
        for p in self.paths:
            v = snap.get(p)
            if not isinstance(v, Nat) or v.n not in (0, 1):
                return None
            bits.append(v.n)
        return Nat(assemble_bits(bits))

    def write(self, value) -> "Snapshot | None":
        """Snapshot binding exactly these paths to ``value``; None when the
        value does not fit."""
        if not self.tree:
            return Snapshot({self.paths[0]: value})
        if not isinstance(value, Nat):
            return None
        width = len(self.paths)
        if value.n >= (1 << width):
            return None
        bits = bits_of(value.n, 0, width - 1)
        return Snapshot({p: Nat(b) for p, b in zip(self.paths, bits)})


def ground_path(path, universe, env):
    """Resolve a path against bindings; returns a GroundPath or None when a
    variable segment is out of range.  Statically bad paths raise."""
    head = path[0]
    if universe.is_flat_place(head):
        if len(path) != 1:
            raise EvalError("place %s takes no sub-path" % head)
        return GroundPath((path,), False)
    tree = universe.tree
    if tree is None or head not in tree.buffer_names:
        raise EvalError("unknown place %r" % (head,))
    if not 2 <= len(path) <= 3:
        raise EvalError("buffer paths are buffer.entry or buffer.entry.bits")
    entry = path[1]
    if isinstance(entry, str) and entry not in ("first", "last"):
        v = env.get(entry, None)
        if v is None:
            raise EvalError("unbound variable %r in path" % entry)
        if not isinstance(v, Nat) or v.n >= tree.entries:
            return None
        entry = v.n
    n1, n2 = None, None
    if len(path) == 3:
        seg = path[2]
        if isinstance(seg, RangeSeg):
            n1, n2 = seg.lo, seg.hi
            symbolic = isinstance(n1, str) or isinstance(n2, str)
            if isinstance(n1, str):
                n1 = _bound_from_env(n1, env, tree)
            if isinstance(n2, str):
                n2 = _bound_from_env(n2, env, tree)
            if n1 is None or n2 is None or (symbolic and n1 > n2):
                return None
        elif isinstance(seg, int):
            n1 = n2 = seg
        elif isinstance(seg, str):
            v = env.get(seg, None)
            if v is None:
                raise EvalError("unbound variable %r in path" % seg)
            if not isinstance(v, Nat) or v.n >= tree.width:
                return None
            n1 = n2 = v.n
        else:
            raise EvalError("bad bit segment %r" % (seg,))
    return GroundPath(tuple(tree.bit_paths(head, entry, n1, n2)), True)


def _bound_from_env(name, env, tree):
    v = env.get(name, None)
    if v is None:
        raise EvalError("unbound variable %r in path" % name)
    if not isinstance(v, Nat) or v.n >= tree.width:
        return None
    return v.n


# --- the engine ------------------------------------------------------------

class Engine:
    def __init__(self, universe, prune=True, memo=True):
        self.uni = universe
        self.prune = prune
        self._memo = {} if memo else None
        self._free = {}
        self._fp = {}
        self._tight = {}
        self._req = {}
        self._gf = {}

    # .. cached analyses ...................................................

    def free_of(self, f) -> frozenset:
        got = self._free.get(id(f))
        if got is None:
            got = free_in(f, self.uni)
            self._free[id(f)] = (got, f)
        else:
            got = got[0]
        return got

    def footprint(self, f, env=None):
        env = env or {}
        fv = self.free_of(f)
        key = (id(f), tuple(sorted((v, env[v]) for v in fv if v in env)))
        got = self._fp.get(key)
        if got is None:
            got = _footprint(f, self.uni, env)
            self._fp[key] = (got, f)
        else:
            got = got[0]
        return got

    def tight(self, f) -> bool:
        got = self._tight.get(id(f))
        if got is not None:
            return got[0]
        val = self._tight_calc(f)
        self._tight[id(f)] = (val, f)
        return val

    def _tight_calc(self, f) -> bool:
        if is_pure(f):
            return True
        if isinstance(f, (Atom, NotPat, Emp, FalseF, Frame)):
            return True
        if isinstance(f, (TrueF, Rel, Implies, Not)):
            return False
        if isinstance(f, (Star, Overlap, Pair, Seq, Or)):
            return self.tight(f.left) and self.tight(f.right)
        if isinstance(f, And):
            return self.tight(f.left) or self.tight(f.right)
        if isinstance(f, Exists):
            return self.tight(f.body)
        return False

    def glue_forced(self, f) -> bool:
        """True when every model of f has equal snapshots on every seam.
        Only consulted at levels two and up."""
        got = self._gf.get(id(f))
        if got is not None:
            return got[0]
        val = self._gf_calc(f)
        self._gf[id(f)] = (val, f)
        return val

    def _gf_calc(self, f) -> bool:
        if is_pure(f):
            return True  # pure formulas only accept empty slots
        if isinstance(f, Atom):
            return True
        if isinstance(f, Pair):
            return True
        if isinstance(f, NotPat):
            return True
        if isinstance(f, (Star, Overlap)):
            return self.glue_forced(f.left) and self.glue_forced(f.right)
        if isinstance(f, And):
            return self.glue_forced(f.left) or self.glue_forced(f.right)
        if isinstance(f, Or):
            return self.glue_forced(f.left) and self.glue_forced(f.right)
        if isinstance(f, Exists):
            return self.glue_forced(f.body)
        return False

    def required(self, f, nslots, env):
        """Per-slot sets of concrete paths every model of f must bind.
        Environment-dependent because variable path segments may resolve."""
        if isinstance(f, Atom):
            gp = self._atom_ground(f, env)
            if gp is None:
                return [frozenset()] * nslots
            return [frozenset(gp.paths)] * nslots
        if isinstance(f, NotPat):
            return self.required(f.atom, nslots, env)
        if isinstance(f, (Star, Overlap, And)):
            l = self.required(f.left, nslots, env)
            r = self.required(f.right, nslots, env)
            return [a | b for a, b in zip(l, r)]
        if isinstance(f, Or):
            l = self.required(f.left, nslots, env)
            r = self.required(f.right, nslots, env)
            return [a & b for a, b in zip(l, r)]
        if isinstance(f, Pair):
            half = nslots // 2
            return (self.required(f.left, half, env)
                    + self.required(f.right, half, env))
        if isinstance(f, Seq):
            half = nslots // 2
            l = self.required(f.left, nslots, env)
            r = self.required(f.right, nslots, env)
            return l[:half] + r[half:]
        if isinstance(f, Exists):
            # drop requirements that hinge on the bound variable
            body = self.required(f.body, nslots, dict(env, **{f.var: None}))
            return body
        return [frozenset()] * nslots

    def _atom_ground(self, f: Atom, env):
        """Ground path of an atom, or None when a path variable is unbound
        or out of range here."""
        try:
            return ground_path(f.path, self.uni, env)
        except EvalError:
            return None

    def allowed(self, f, path, env) -> bool:
        """May a model of f bind this path?  False only when provably not."""
        if not self.tight(f):
            return True
        prefixes, _ = self.footprint(f, env)
        return any(path[:len(pre)] == pre for pre in prefixes)

    # .. satisfaction ......................................................

    def sat(self, f, m, env=None) -> bool:
        env = env or {}
        if self._memo is None:
            return self._sat(f, m, env)
        fv = self.free_of(f)
        key = (id(f), m, tuple(sorted((v, env[v]) for v in fv if v in env)))
        got = self._memo.get(key)
        if got is not None:
            return got[0]
        val = self._sat(f, m, env)
        self._memo[key] = (val, f)
        return val

    def _sat(self, f, m, env) -> bool:
        if isinstance(f, Atom):
            return self._sat_atom(f, m, env)
        if isinstance(f, Emp):
            if not isinstance(m, Snapshot):
                raise EvalError("emp speaks about snapshots")
            return len(m) == 0
        if isinstance(f, FalseF):
            return False
        if isinstance(f, TrueF):
            return True
        if isinstance(f, Rel):
            return eval_rel(f.op, eval_expr(f.left, env), eval_expr(f.right, env))
        if isinstance(f, Frame):
            return all(
                any(p[:len(pre)] == pre for pre in f.prefixes)
                for s in slots(m) for p in s.paths()
            )
        if isinstance(f, NotPat):
            return self._sat_notpat(f, m, env)
        if isinstance(f, Pair):
            left, right = halves(m)
            if model_level(m) >= 2 and slots(left)[-1] != slots(right)[0]:
                return False
            return self.sat(f.left, left, env) and self.sat(f.right, right, env)
        if isinstance(f, Star):
            return self._sat_star(f, m, env)
        if isinstance(f, Overlap):
            return self._sat_overlap(f, m, env)
        if isinstance(f, Seq):
            return self._sat_seq(f, m, env)
        if isinstance(f, Implies):
            return (not self.sat(f.left, m, env)) or self.sat(f.right, m, env)
        if isinstance(f, And):
            return self.sat(f.left, m, env) and self.sat(f.right, m, env)
        if isinstance(f, Or):
            return self.sat(f.left, m, env) or self.sat(f.right, m, env)
        if isinstance(f, Not):
            return not self.sat(f.body, m, env)
        if isinstance(f, Exists):
            return self._sat_exists(f, m, env)
        if isinstance(f, MacroCall):
            raise EvalError("macro %s not expanded; normalize first" % f.name)
        raise EvalError("cannot evaluate %r; normalize first" % (type(f).__name__,))

    # .. atoms .............................................................

    def _sat_atom(self, f: Atom, m, env) -> bool:
        gp = self._atom_ground(f, env)
        if gp is None:
            return False
        leaves = pattern_leaves(f.pattern)
        ss = slots(m)
        if len(leaves) != len(ss):
            raise EvalError(
                "pattern %s speaks about level %d, model has level %d"
                % (f.pattern, level_of(f), model_level(m)))
        want = frozenset(gp.paths)
        vals = []
        for leaf, snap in zip(leaves, ss):
            if frozenset(snap.paths()) != want:
                return False
            got = gp.read(snap)
            if got is None:
                return False
            vals.append(got)
            if isinstance(leaf, Hole):
                continue
            v = eval_expr(leaf, env)
            if v is None or v != got:
                return False
        # seams of the surrounding pair tower collapse onto this footprint
        for i in range(1, len(vals) - 1, 2):
            if vals[i] != vals[i + 1]:
                return False
        return True

    def _sat_notpat(self, f: NotPat, m, env) -> bool:
        # complement within the same footprint: the atom's paths must be
        # bound slotwise, the value tuple must not match the pattern
        atom = f.atom
        gp = self._atom_ground(atom, env)
        if gp is None:
            return False
        leaves = pattern_leaves(atom.pattern)
        ss = slots(m)
        if len(leaves) != len(ss):
            raise EvalError("pattern level mismatch under ~")
        want = frozenset(gp.paths)
        vals = []
        for snap in ss:
            if frozenset(snap.paths()) != want:
                return False
            got = gp.read(snap)
            if got is None:
                return False
            vals.append(got)
        for i in range(1, len(vals) - 1, 2):
            if vals[i] != vals[i + 1]:
                return False
        for leaf, got in zip(leaves, vals):
            if isinstance(leaf, Hole):
                continue
            v = eval_expr(leaf, env)
            if v is None or v != got:
                return True
        return False

    # .. separating connectives ............................................

    def _binding_options(self, f, m, env, three_way):
        """For every path bound in m, the list of sides its column may go
        to.  A path takes the same side in every slot, so each part keeps
        its slots over a common domain.  Sides: 0 left, 1 right, 2 shared
        (three_way only)."""
        nslots = len(slots(m))
        if self.prune:
            req_l = frozenset().union(*self.required(f.left, nslots, env))
            req_r = frozenset().union(*self.required(f.right, nslots, env))
        else:
            req_l = req_r = frozenset()
        paths = sorted({p for snap in slots(m) for p in snap.sorted_paths()},
                       key=path_key)
        out = []
        for p in paths:
            in_l = p in req_l
            in_r = p in req_r
            if self.prune:
                may_l = self.allowed(f.left, p, env)
                may_r = self.allowed(f.right, p, env)
            else:
                may_l = may_r = True
            opts = []
            if three_way:
                if in_l and in_r:
                    opts = [2] if may_l and may_r else []
                else:
                    if may_l and may_r:
                        opts.append(2)
                    if may_l and not in_r:
                        opts.append(0)
                    if may_r and not in_l:
                        opts.append(1)
                    if in_l:
                        opts = [o for o in opts if o in (0, 2)]
                    if in_r:
                        opts = [o for o in opts if o in (1, 2)]
            else:
                if in_l and in_r:
                    opts = []
                elif in_l:
                    opts = [0] if may_l else []
                elif in_r:
                    opts = [1] if may_r else []
                else:
                    if may_l:
                        opts.append(0)
                    if may_r:
                        opts.append(1)
            if not opts:
                return None
            out.append((p, opts))
        return out

    def _sat_star(self, f: Star, m, env) -> bool:
        opts = self._binding_options(f, m, env, three_way=False)
        if opts is None:
            return False
        # branch on the undecided columns only
        fixed = [(p, o[0]) for p, o in opts if len(o) == 1]
        open_ = [(p, o) for p, o in opts if len(o) > 1]
        for choice in itertools.product(*(o for _, o in open_)):
            sides = fixed + [(p, c) for (p, _), c in zip(open_, choice)]
            lm = self._column_build(m, sides, (0,))
            if not self.sat(f.left, lm, env):
                continue
            rm = self._column_build(m, sides, (1,))
            if self.sat(f.right, rm, env):
                return True
        return False

    def _sat_overlap(self, f: Overlap, m, env) -> bool:
        opts = self._binding_options(f, m, env, three_way=True)
        if opts is None:
            return False
        fixed = [(p, o[0]) for p, o in opts if len(o) == 1]
        open_ = [(p, o) for p, o in opts if len(o) > 1]
        for choice in itertools.product(*(o for _, o in open_)):
            sides = fixed + [(p, c) for (p, _), c in zip(open_, choice)]
            lm = self._column_build(m, sides, (0, 2))
            if not self.sat(f.left, lm, env):
                continue
            rm = self._column_build(m, sides, (1, 2))
            if self.sat(f.right, rm, env):
                return True
        return False

    @staticmethod
    def _column_build(m, sides, visible):
        keep = {p for p, side in sides if side in visible}
        maps = []
        for snap in slots(m):
            maps.append(Snapshot({p: v for p, v in snap.items() if p in keep}))
        return model_from_slots(model_level(m), maps)

    # .. sequential composition ............................................

    def _sat_seq(self, f: Seq, m, env) -> bool:
        left, right = halves(m)
        sub_level = model_level(m) - 1
        if self.prune:
            try:
                for t in self._enum_seq_mid(f, left, right, env, sub_level):
                    if (self.sat(f.left, join_halves(left, t), env)
                            and self.sat(f.right, join_halves(t, right), env)):
                        return True
                return False
            except NotEnumerable:
                pass
        for t in self._blind_mids(f, left, right, env, sub_level):
            if (self.sat(f.left, join_halves(left, t), env)
                    and self.sat(f.right, join_halves(t, right), env)):
                return True
        return False

    def _enum_seq_mid(self, f, left, right, env, sub_level):
        """Intermediates proposed by structurally enumerating whichever
        operand supports it.  Raises NotEnumerable when neither does."""
        nsub = slot_count(sub_level)
        last_err = None
        if self.tight(f.left):
            try:
                tpl = tuple(slots(left)) + (FREE,) * nsub
                seen = set()
                out = []
                for mm in self.enum_models(f.left, tpl, env):
                    t = self._mid_of(mm, sub_level, take_right=True)
                    if t not in seen and self._mid_declared(t):
                        seen.add(t)
                        out.append(t)
                return out
            except NotEnumerable as e:
                last_err = e
        if self.tight(f.right):
            tpl = (FREE,) * nsub + tuple(slots(right))
            seen = set()
            out = []
            for mm in self.enum_models(f.right, tpl, env):
                t = self._mid_of(mm, sub_level, take_right=False)
                if t not in seen and self._mid_declared(t):
                    seen.add(t)
                    out.append(t)
            return out
        raise last_err or NotEnumerable(type(f.left).__name__)

    def _mid_declared(self, t) -> bool:
        """Intermediates range over the declared model space: values from
        the per-path domains, seams glued."""
        if not seam_ok(t):
            return False
        for snap in slots(t):
            for p, v in snap.items():
                try:
                    if v not in self.uni.domain_of_path(p):
                        return False
                except Exception:
                    return False
        return True

    @staticmethod
    def _mid_of(slot_tuple, sub_level, take_right):
        nsub = slot_count(sub_level)
        part = slot_tuple[nsub:] if take_right else slot_tuple[:nsub]
        return model_from_slots(sub_level, part)

    def _blind_mids(self, f, left, right, env, sub_level):
        """Every candidate intermediate over the declared value domains.
        The domain covers all flat places plus the concrete tree paths the
        formula mentions; seams above level one are glued by construction,
        and glue-forced operands pin the boundary slots."""
        paths = sorted(self.seq_paths(f, env), key=path_key)
        domains = []
        size = 1
        for p in paths:
            vals = sorted(self.uni.domain_of_path(p), key=value_key)
            domains.append([None] + list(vals))
            size *= len(vals) + 1
        if size > 10 ** 7:
            raise EvalError(
                "intermediate space for ; has %d snapshots; "
                "restrict the formula footprint" % size)

        def snapshots():
            for combo in itertools.product(*domains):
                yield Snapshot({p: v for p, v in zip(paths, combo) if v is not None})

        if sub_level == 0:
            yield from snapshots()
            return

        pin_first = None
        pin_last = None
        if self.prune and sub_level >= 1:
            if self.glue_forced(f.left):
                pin_first = slots(left)[-1]
            if self.glue_forced(f.right):
                pin_last = slots(right)[0]
        # glued positions: snapshots shared between neighbouring changes
        npos = 2 ** (sub_level - 1) + 1 if sub_level >= 2 else 2
        pools = []
        for k in range(npos):
            if k == 0 and pin_first is not None:
                pools.append([pin_first])
            elif k == npos - 1 and pin_last is not None:
                pools.append([pin_last])
            else:
                pools.append(list(snapshots()))
        for combo in itertools.product(*pools):
            if sub_level == 1:
                yield Change(combo[0], combo[1])
            else:
                ss = []
                for k in range(npos - 1):
                    ss.extend((combo[k], combo[k + 1]))
                yield model_from_slots(sub_level, ss)

    def seq_paths(self, f, env=None) -> frozenset:
        """Declared domain for blind intermediate search: all flat places,
        plus the tree paths in the formula's footprint."""
        out = set(self.uni.flat_paths())
        prefixes, _ = self.footprint(f, env)
        tree = self.uni.tree
        for pre in prefixes:
            if len(pre) >= 3:
                out.add(pre)
            elif len(pre) == 2 and tree is not None:
                out.update(tree.bit_paths(pre[0], pre[1]))
            elif len(pre) == 1 and tree is not None and pre[0] in tree.buffer_names:
                for e in range(tree.entries):
                    out.update(tree.bit_paths(pre[0], e))
        return frozenset(out)

    # .. quantifiers .......................................................

    def witness_values(self, m):
        """Values present in the model, flat ones and assembled buffer
        entries, in deterministic order; good first guesses for exists."""
        out = []
        seen = set()
        tree = self.uni.tree
        for snap in slots(m):
            entries = {}
            for p in snap.sorted_paths():
                v = snap[p]
                if len(p) == 1:
                    if v not in seen:
                        seen.add(v)
                        out.append(v)
                elif tree is not None and len(p) == 3:
                    entries.setdefault(p[:2], []).append((p[2], v))
            for (buf, e), bits in entries.items():
                if len(bits) == tree.width:
                    bits.sort()
                    vv = [b for _, b in bits]
                    if all(isinstance(b, Nat) and b.n in (0, 1) for b in vv):
                        val = Nat(assemble_bits([b.n for b in vv]))
                        if val not in seen:
                            seen.add(val)
                            out.append(val)
        return out

    def _pin_values(self, body, var, m, env):
        """Candidate values for var that any satisfying assignment must use,
        read off the model wherever var is a bare pattern leaf of an atom
        that has to hold.  None means the shape gives no bound; an empty
        set means some required atom cannot hold at all."""
        slotlist = slots(m)

        def both(a, b):
            if a is not None and not a:
                return a
            if a is None:
                return b
            if b is None:
                return a
            return a & b

        def go(f, off, env):
            if isinstance(f, Atom):
                leaves = pattern_leaves(f.pattern)
                idxs = [i for i, l in enumerate(leaves)
                        if isinstance(l, Var) and l.name == var]
                if not idxs:
                    return None
                try:
                    gp = ground_path(f.path, self.uni, env)
                except EvalError:
                    return None
                if gp is None:
                    return frozenset()
                out = None
                for i in idxs:
                    if off + i >= len(slotlist):
                        return None
                    v = gp.read(slotlist[off + i])
                    if v is None:
                        return frozenset()
                    here = frozenset((v,))
                    out = here if out is None else (out & here)
                    if not out:
                        return out
                return out
            if isinstance(f, (Star, Overlap, And)):
                a = go(f.left, off, env)
                if a is not None and not a:
                    return a
                return both(a, go(f.right, off, env))
            if isinstance(f, Pair):
                lev = level_of(f.left)
                a = go(f.left, off, env)
                if lev is None or (a is not None and not a):
                    return a
                return both(a, go(f.right, off + (1 << lev), env))
            if isinstance(f, Or):
                a = go(f.left, off, env)
                b = go(f.right, off, env)
                if a is None or b is None:
                    return None
                return a | b
            if isinstance(f, Exists):
                if f.var == var:
                    return None
                wpins = self._pin_values(f.body, f.var, m, env)
                if wpins is not None and not wpins:
                    return frozenset()
                if wpins is not None and len(wpins) <= 4:
                    acc = frozenset()
                    for w in wpins:
                        sub = go(f.body, off, dict(env, **{f.var: w}))
                        if sub is None:
                            return None
                        acc = acc | sub
                    return acc
                return go(f.body, off, env)
            if isinstance(f, Not):
                g = f.body
                if isinstance(g, Implies):
                    # must make the antecedent hold
                    return go(g.left, off, env)
                if isinstance(g, Or):
                    return both(go(Not(g.left), off, env),
                                go(Not(g.right), off, env))
                if isinstance(g, Not):
                    return go(g.body, off, env)
                return None
            if isinstance(f, FalseF):
                return frozenset()
            return None

        return go(body, 0, env)

    def _sat_exists(self, f: Exists, m, env) -> bool:
        tried = set()
        if self.prune:
            pins = self._pin_values(f.body, f.var, m, env)
            if pins is not None:
                for v in sorted(pins, key=value_key):
                    if self.sat(f.body, m, dict(env, **{f.var: v})):
                        return True
                return False
            for v in self.witness_values(m):
                tried.add(v)
                if self.sat(f.body, m, dict(env, **{f.var: v})):
                    return True
        for v in self.uni.value_space():
            if v in tried:
                continue
            if self.sat(f.body, m, dict(env, **{f.var: v})):
                return True
        return False

    # .. structural model enumeration ......................................

    def enum_models(self, f, template, env):
        """Slot tuples satisfying f that agree with the template (fixed
        snapshots match exactly, FREE slots are enumerated).  Only the
        tight fragment supports this; anything else raises NotEnumerable.
        """
        if is_pure(f):
            if self.sat(f, EMPTY, env):
                out = tuple(EMPTY if t is FREE else t for t in template)
                if all(len(t) == 0 for t in out):
                    yield out
            return
        if isinstance(f, Atom):
            yield from self._enum_atom(f, template, env)
            return
        if isinstance(f, Emp):
            if all(t is FREE or len(t) == 0 for t in template):
                yield tuple(EMPTY for _ in template)
            return
        if isinstance(f, FalseF):
            return
        if isinstance(f, Star):
            yield from self._enum_star(f, template, env)
            return
        if isinstance(f, Pair):
            yield from self._enum_pair(f, template, env)
            return
        if isinstance(f, Seq):
            yield from self._enum_seq(f, template, env)
            return
        if isinstance(f, And):
            yield from self._enum_and(f, template, env)
            return
        if isinstance(f, Or):
            seen = set()
            for g in (f.left, f.right):
                for mm in self.enum_models(g, template, env):
                    if mm not in seen:
                        seen.add(mm)
                        yield mm
            return
        if isinstance(f, Exists):
            seen = set()
            for v in self._exists_domain(template):
                for mm in self.enum_models(f.body, template, dict(env, **{f.var: v})):
                    if mm not in seen:
                        seen.add(mm)
                        yield mm
            return
        if isinstance(f, NotPat):
            yield from self._enum_notpat(f, template, env)
            return
        raise NotEnumerable(type(f).__name__)

    def _exists_domain(self, template):
        fixed = [s for s in template if s is not FREE]
        if fixed:
            m = model_from_slots_loose(fixed)
            head = self.witness_values(m)
        else:
            head = []
        seen = set(head)
        for v in head:
            yield v
        for v in self.uni.value_space():
            if v not in seen:
                yield v

    def _enum_atom(self, f: Atom, template, env):
        gp = self._atom_ground(f, env)
        if gp is None:
            return
        leaves = pattern_leaves(f.pattern)
        if len(leaves) != len(template):
            raise EvalError("pattern level mismatch in enumeration")
        want = frozenset(gp.paths)
        per_slot = []
        for leaf, t in zip(leaves, template):
            if t is not FREE:
                if frozenset(t.paths()) != want:
                    return
                got = gp.read(t)
                if got is None:
                    return
                if not isinstance(leaf, Hole):
                    v = eval_expr(leaf, env)
                    if v is None or v != got:
                        return
                per_slot.append([(got, t)])
            else:
                if isinstance(leaf, Hole):
                    cands = []
                    for v in self._path_values(gp):
                        snap = gp.write(v)
                        if snap is not None:
                            cands.append((v, snap))
                    per_slot.append(cands)
                else:
                    v = eval_expr(leaf, env)
                    snap = gp.write(v) if v is not None else None
                    if snap is None:
                        return
                    per_slot.append([(v, snap)])
        for combo in itertools.product(*per_slot):
            vals = [v for v, _ in combo]
            if any(vals[i] != vals[i + 1] for i in range(1, len(vals) - 1, 2)):
                continue
            yield tuple(s for _, s in combo)

    def _enum_notpat(self, f: NotPat, template, env):
        for mm in self._enum_atom(
                Atom(all_holes_like(f.atom.pattern), f.atom.path), template, env):
            m = model_from_slots_loose(mm)
            if self._sat_notpat(f, m, env):
                yield mm

    def _path_values(self, gp: GroundPath):
        if gp.tree:
            for n in range(1 << len(gp.paths)):
                yield Nat(n)
        else:
            yield from self.uni.domain_of_path(gp.paths[0])

    def _enum_star(self, f: Star, template, env):
        nslots = len(template)
        if self.prune:
            req_l = self.required(f.left, nslots, env)
            req_r = self.required(f.right, nslots, env)
        else:
            req_l = req_r = [frozenset()] * nslots
        fixed_bindings = []
        for i, t in enumerate(template):
            if t is FREE:
                continue
            for p in t.sorted_paths():
                in_l, in_r = p in req_l[i], p in req_r[i]
                may_l = self.allowed(f.left, p, env) if self.prune else True
                may_r = self.allowed(f.right, p, env) if self.prune else True
                if in_l and in_r:
                    return
                opts = ([0] if in_l else [1] if in_r else
                        [s for s, ok in ((0, may_l), (1, may_r)) if ok])
                if not opts:
                    return
                fixed_bindings.append(((i, p, t[p]), opts))
        free_idx = [i for i, t in enumerate(template) if t is FREE]
        fixed = [(b, o[0]) for b, o in fixed_bindings if len(o) == 1]
        open_ = [(b, o) for b, o in fixed_bindings if len(o) > 1]
        seen = set()
        for choice in itertools.product(*(o for _, o in open_)):
            sides = fixed + [(b, c) for (b, _), c in zip(open_, choice)]
            tpl_l, tpl_r = [], []
            for i, t in enumerate(template):
                if t is FREE:
                    tpl_l.append(FREE)
                    tpl_r.append(FREE)
                else:
                    tpl_l.append(Snapshot({p: v for (j, p, v), s in sides
                                           if j == i and s == 0}))
                    tpl_r.append(Snapshot({p: v for (j, p, v), s in sides
                                           if j == i and s == 1}))
            for lm in self.enum_models(f.left, tuple(tpl_l), env):
                # freeze the free slots the left side produced and hand the
                # remainder of nothing to the right: on free slots the right
                # side owns whatever it likes as long as it stays disjoint
                for rm in self.enum_models(f.right, tuple(tpl_r), env):
                    out = []
                    ok = True
                    for i in range(nslots):
                        c = lm[i].combine(rm[i])
                        if c is None:
                            ok = False
                            break
                        out.append(c)
                    if not ok:
                        continue
                    for i, t in enumerate(template):
                        if t is not FREE and out[i] != t:
                            ok = False
                            break
                    if ok:
                        key = tuple(out)
                        if key not in seen:
                            seen.add(key)
                            yield key

    def _enum_pair(self, f: Pair, template, env):
        half = len(template) // 2
        tpl_l, tpl_r = template[:half], template[half:]
        glue = half >= 2  # seams exist at level >= 2
        for lm in self.enum_models(f.left, tpl_l, env):
            tr = tpl_r
            if glue and tr[0] is FREE:
                tr = (lm[-1],) + tr[1:]
            for rm in self.enum_models(f.right, tr, env):
                if glue and rm[0] != lm[-1]:
                    continue
                yield lm + rm

    def _enum_seq(self, f: Seq, template, env):
        half = len(template) // 2
        sub_level = 0 if half == 1 else half.bit_length() - 1
        tpl_l = template[:half] + (FREE,) * half
        seen = set()
        for lm in self.enum_models(f.left, tpl_l, env):
            mid = lm[half:]
            if not self._mid_declared(model_from_slots(sub_level, list(mid))):
                continue
            for rm in self.enum_models(f.right, mid + template[half:], env):
                out = lm[:half] + rm[half:]
                if out not in seen:
                    seen.add(out)
                    yield out

    def _enum_and(self, f: And, template, env):
        first, second = f.left, f.right
        try:
            gen = list(self.enum_models(first, template, env))
        except NotEnumerable:
            first, second = f.right, f.left
            gen = self.enum_models(first, template, env)
        for mm in gen:
            m = model_from_slots_loose(mm)
            if self.sat(second, m, env):
                yield mm


def model_from_slots_loose(snaps):
    """Model of the right level for this many slots (1, 2, 4, 8...)."""
    n = len(snaps)
    level = 0 if n == 1 else n.bit_length() - 1
    return model_from_slots(level, list(snaps))

"""Normalization, core desugaring, footprints, framing.

Two related rewrites of surface formulas:

``normalize``  inlines macros, expands framed arrows, angle tuples and
forall, hoists existentials out of * and (+) operands, and statically
checks paths and literals.  The result keeps the boolean shorthands
(&&, ||, !, true), hole patterns and ~ because the engine evaluates
them natively.

``desugar``    goes all the way to the core constructors: level-0 atoms,
emp, false, comparisons, pair, *, (+), ;, => and exists.  Multi-level
pattern atoms become pair towers, holes become fresh existentials, ~
becomes the footprint-preserving complement disjunction, the boolean
shorthands become their => / false encodings.

Both rewrites preserve satisfaction; the test suite checks them against
each other.
"""

from __future__ import annotations

import itertools

from .formulas import (
    And, Arith, Atom, Emp, Exists, FalseF, Forall, Frame, FramedIff,
    FramedImp, Hole, Implies, Lit, MacroCall, Not, NotPat, Or, Pair,
    RangeSeg, Rel, Seq, Star, Overlap, TrueF, Tup, TupleStar, Var,
    free_vars, level_of, pattern_leaves, pattern_of_leaves,
)
from .trees import BitRangeError, bits_of
from .values import Nat, path_key


class NormalizeError(ValueError):
    pass


def known_names(uni) -> frozenset:
    names = set(uni.flat_places())
    if uni.tree is not None:
        names.update(uni.tree.buffer_names)
        names.update(("first", "last"))
    return frozenset(names)


def free_in(f, uni) -> frozenset:
    return free_vars(f, known_names(uni))


# --- fresh names and substitution ------------------------------------------

def _all_names(f, acc):
    """Every identifier appearing anywhere; used to pick fresh variables."""
    if isinstance(f, Atom):
        for leaf in pattern_leaves(f.pattern):
            _expr_names(leaf, acc)
        for seg in f.path:
            if isinstance(seg, str):
                acc.add(seg)
    elif isinstance(f, NotPat):
        _all_names(f.atom, acc)
    elif isinstance(f, Rel):
        _expr_names(f.left, acc)
        _expr_names(f.right, acc)
    elif isinstance(f, (Pair, Star, Overlap, Seq, Implies, And, Or,
                        FramedImp, FramedIff)):
        _all_names(f.left, acc)
        _all_names(f.right, acc)
    elif isinstance(f, Not):
        _all_names(f.body, acc)
    elif isinstance(f, (Exists, Forall)):
        acc.add(f.var)
        _all_names(f.body, acc)
    elif isinstance(f, MacroCall):
        for a in f.args:
            if isinstance(a, str):
                acc.add(a)
            else:
                _expr_names(a, acc)
    elif isinstance(f, TupleStar):
        for item in f.items:
            _all_names(item, acc)
    return acc


def _expr_names(e, acc):
    if isinstance(e, Var):
        acc.add(e.name)
    elif isinstance(e, (Arith, Tup)):
        _expr_names(e.left, acc)
        _expr_names(e.right, acc)
    return acc


class _Gensym:
    def __init__(self, taken):
        self.taken = set(taken)
        self.k = 0

    def fresh(self, base="v"):
        while True:
            self.k += 1
            name = "%s%d" % (base, self.k)
            if name not in self.taken:
                self.taken.add(name)
                return name


def subst_expr(e, mapping):
    if isinstance(e, Var) and e.name in mapping:
        r = mapping[e.name]
        if isinstance(r, str):
            raise NormalizeError(
                "argument %r names a place and cannot be used as a value" % r)
        return r
    if isinstance(e, Arith):
        return Arith(e.op, subst_expr(e.left, mapping), subst_expr(e.right, mapping))
    if isinstance(e, Tup):
        return Tup(subst_expr(e.left, mapping), subst_expr(e.right, mapping))
    return e


def _subst_seg(seg, mapping):
    if isinstance(seg, str) and seg in mapping:
        r = mapping[seg]
        if isinstance(r, str):
            return r
        if isinstance(r, Lit) and isinstance(r.value, Nat):
            return r.value.n
        if isinstance(r, Var):
            return r.name
        raise NormalizeError("argument %s cannot stand in a path" % (r,))
    if isinstance(seg, RangeSeg):
        return RangeSeg(_subst_bound(seg.lo, mapping),
                        _subst_bound(seg.hi, mapping))
    return seg


def _subst_bound(b, mapping):
    if isinstance(b, str) and b in mapping:
        r = mapping[b]
        if isinstance(r, Lit) and isinstance(r.value, Nat):
            return r.value.n
        if isinstance(r, Var):
            return r.name
        raise NormalizeError("argument %s cannot be a bit offset" % (r,))
    return b


def subst(f, mapping, gensym):
    """Capture-avoiding substitution of macro arguments or renamings."""
    if not mapping:
        return f
    if isinstance(f, Atom):
        pat = subst_expr(f.pattern, mapping)
        path = tuple(_subst_seg(s, mapping) for s in f.path)
        return Atom(pat, path)
    if isinstance(f, NotPat):
        return NotPat(subst(f.atom, mapping, gensym))
    if isinstance(f, Rel):
        return Rel(f.op, subst_expr(f.left, mapping), subst_expr(f.right, mapping))
    if isinstance(f, (Pair, Star, Overlap, Seq, Implies, And, Or,
                      FramedImp, FramedIff)):
        return type(f)(subst(f.left, mapping, gensym),
                       subst(f.right, mapping, gensym))
    if isinstance(f, Not):
        return Not(subst(f.body, mapping, gensym))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        clash = any(
            (isinstance(v, str) and v == f.var)
            or (not isinstance(v, str) and f.var in _expr_names(v, set()))
            for v in inner.values()
        )
        var, body = f.var, f.body
        if clash:
            var = gensym.fresh(f.var)
            body = subst(body, {f.var: Var(var)}, gensym)
        return type(f)(var, subst(body, inner, gensym))
    if isinstance(f, MacroCall):
        args = []
        for a in f.args:
            if isinstance(a, str):
                args.append(mapping.get(a, a))
            else:
                args.append(subst_expr(a, mapping))
        return MacroCall(f.name, tuple(args))
    if isinstance(f, TupleStar):
        return TupleStar(tuple(subst(i, mapping, gensym) for i in f.items))
    return f


# --- macro inlining --------------------------------------------------------

def inline_macros(f, uni, gensym, stack=()):
    if isinstance(f, MacroCall):
        key = (f.name, len(f.args))
        if key in stack:
            raise NormalizeError("recursive macro %s" % f.name)
        macro = uni.macros.get(f.name, {}).get(len(f.args))
        if macro is None:
            raise NormalizeError(
                "no macro %s with %d argument(s)" % (f.name, len(f.args)))
        mapping = dict(zip(macro.params, f.args))
        body = subst(macro.body, mapping, gensym)
        return inline_macros(body, uni, gensym, stack + (key,))
    if isinstance(f, (Pair, Star, Overlap, Seq, Implies, And, Or,
                      FramedImp, FramedIff)):
        return type(f)(inline_macros(f.left, uni, gensym, stack),
                       inline_macros(f.right, uni, gensym, stack))
    if isinstance(f, Not):
        return Not(inline_macros(f.body, uni, gensym, stack))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, inline_macros(f.body, uni, gensym, stack))
    if isinstance(f, NotPat):
        inner = inline_macros(f.atom, uni, gensym, stack)
        if not isinstance(inner, Atom):
            raise NormalizeError("~ applies to a pattern atom")
        return NotPat(inner)
    if isinstance(f, TupleStar):
        return TupleStar(tuple(inline_macros(i, uni, gensym, stack) for i in f.items))
    return f


# --- footprints ------------------------------------------------------------

def is_pure(f) -> bool:
    """Model-independent constraint: demands no bindings, so under * or (+)
    it consumes the empty sub-model.  true is deliberately not pure; P * true
    keeps its absorbing reading."""
    if isinstance(f, (Rel, FalseF)):
        return True
    if isinstance(f, Not):
        return is_pure(f.body)
    if isinstance(f, (And, Or, Implies)):
        return is_pure(f.left) and is_pure(f.right)
    return False


def footprint(f, uni, env=None):
    """(prefixes, exact): the path prefixes models of f may bind, and
    whether that set is known bit-for-bit.  Variable path segments that the
    environment cannot resolve truncate to a prefix and clear the flag."""
    env = env or {}
    if isinstance(f, Atom) or isinstance(f, NotPat):
        atom = f.atom if isinstance(f, NotPat) else f
        return _atom_footprint(atom, uni, env)
    if isinstance(f, (Emp, FalseF, TrueF, Rel)):
        return frozenset(), True
    if isinstance(f, Frame):
        return f.prefixes, False
    if isinstance(f, (Pair, Star, Overlap, Seq)):
        # disjoint or shared-domain composition: models bind exactly the
        # union when both parts pin their own domains
        lp, le = footprint(f.left, uni, env)
        rp, re_ = footprint(f.right, uni, env)
        return lp | rp, le and re_
    if isinstance(f, (Implies, FramedImp, FramedIff)):
        # a vacuously true implication holds on models of any domain
        lp, _ = footprint(f.left, uni, env)
        rp, _ = footprint(f.right, uni, env)
        return lp | rp, False
    if isinstance(f, And):
        lp, le = footprint(f.left, uni, env)
        rp, re_ = footprint(f.right, uni, env)
        exact = (le and rp <= lp) or (re_ and lp <= rp)
        return lp | rp, exact
    if isinstance(f, Or):
        lp, le = footprint(f.left, uni, env)
        rp, re_ = footprint(f.right, uni, env)
        return lp | rp, le and re_ and lp == rp
    if isinstance(f, Not):
        # only a pure body keeps negation domain-pinning
        p, e = footprint(f.body, uni, env)
        return p, e and not p
    if isinstance(f, (Exists, Forall)):
        inner = dict(env)
        inner.pop(f.var, None)
        return footprint(f.body, uni, inner)
    if isinstance(f, TupleStar):
        ps, ex = frozenset(), True
        for item in f.items:
            p, e = footprint(item, uni, env)
            ps, ex = ps | p, ex and e
        return ps, ex
    if isinstance(f, MacroCall):
        raise NormalizeError("footprint of unexpanded macro %s" % f.name)
    raise NormalizeError("footprint of %r" % (type(f).__name__,))


def _atom_footprint(atom, uni, env):
    head = atom.path[0]
    if uni.is_flat_place(head):
        return frozenset({(head,)}), True
    if uni.tree is None or head not in uni.tree.buffer_names:
        raise NormalizeError("unknown place %r" % (head,))
    tree = uni.tree
    segs = []
    for seg in atom.path[1:]:
        if isinstance(seg, str) and seg in ("first", "last"):
            segs.append(tree.entry_index(seg))
            continue
        if isinstance(seg, str):
            v = env.get(seg)
            if isinstance(v, Nat):
                segs.append(v.n)
                continue
            return frozenset({(head,) + tuple(segs)}), False
        if isinstance(seg, RangeSeg):
            for bound in (seg.lo, seg.hi):
                if isinstance(bound, str) and not isinstance(env.get(bound), Nat):
                    return frozenset({(head,) + tuple(segs)}), False
            continue  # terminal bit range; exact paths come from grounding
        segs.append(seg)
    from .semantics import EvalError, ground_path
    try:
        gp = ground_path(atom.path, uni, env)
    except (EvalError, BitRangeError):
        return frozenset({(head,)}), False
    if gp is None:
        return frozenset(), True
    return frozenset(gp.paths), True


def minimal_prefixes(prefixes):
    out = []
    for p in sorted(prefixes, key=lambda q: (len(q), path_key(q))):
        if not any(p[:len(q)] == q for q in out):
            out.append(p)
    return frozenset(out)


# --- normalization ---------------------------------------------------------

def normalize(f, uni):
    """Macro-free, framing-free, forall-free evaluator form."""
    gensym = _Gensym(_all_names(f, set()))
    g = inline_macros(f, uni, gensym)
    g = _norm(g, uni, gensym)
    level_of(g)  # raises on inconsistent operand levels
    return g


def _norm(f, uni, gensym):
    if isinstance(f, Atom):
        _check_atom(f, uni)
        return f
    if isinstance(f, NotPat):
        _check_atom(f.atom, uni)
        return f
    if isinstance(f, (Emp, FalseF, TrueF, Rel, Frame)):
        return f
    if isinstance(f, (Star, Overlap)):
        l = _norm(f.left, uni, gensym)
        r = _norm(f.right, uni, gensym)
        return _hoist(type(f), l, r, uni, gensym)
    if isinstance(f, (Pair, Seq, Implies, And, Or)):
        return type(f)(_norm(f.left, uni, gensym), _norm(f.right, uni, gensym))
    if isinstance(f, Not):
        return Not(_norm(f.body, uni, gensym))
    if isinstance(f, Exists):
        return Exists(f.var, _norm(f.body, uni, gensym))
    if isinstance(f, Forall):
        return Not(Exists(f.var, Not(_norm(f.body, uni, gensym))))
    if isinstance(f, TupleStar):
        items = [_norm(i, uni, gensym) for i in f.items]
        kept = [i for i in items if not isinstance(i, Emp)]
        if not kept:
            return Emp()
        out = kept[0]
        for item in kept[1:]:
            out = Star(out, item)
        return out
    if isinstance(f, FramedImp):
        l = _norm(f.left, uni, gensym)
        r = _norm(f.right, uni, gensym)
        return _expand_framed(l, r, uni, gensym)
    if isinstance(f, FramedIff):
        l = _norm(f.left, uni, gensym)
        r = _norm(f.right, uni, gensym)
        return And(_expand_framed(l, r, uni, gensym),
                   _expand_framed(r, l, uni, gensym))
    if isinstance(f, MacroCall):
        raise NormalizeError("macro %s survived inlining" % f.name)
    raise NormalizeError("cannot normalize %r" % (type(f).__name__,))


def _hoist(cls, left, right, uni, gensym):
    """exists commutes with * and (+) over the operand it is not free in;
    pulling binders to the front lets the engine fix witnesses before it
    splits bindings."""
    binders = []

    def peel(side, other):
        nonlocal binders
        while isinstance(side, Exists):
            var, body = side.var, side.body
            if var in free_in(other, uni) or var in binders:
                new = gensym.fresh(var)
                body = subst(body, {var: Var(new)}, gensym)
                var = new
            binders.append(var)
            side = body
        return side

    left = peel(left, right)
    right = peel(right, left)
    if isinstance(left, Or) or isinstance(right, Or):
        # * and (+) distribute over ||; splitting per branch keeps each
        # disjunct tight enough to force its own binding split
        out = _distribute(cls, left, right, uni, gensym)
    else:
        out = cls(left, right)
    for var in reversed(binders):
        out = Exists(var, out)
    return out


def _distribute(cls, left, right, uni, gensym):
    if isinstance(left, Or):
        return Or(_distribute(cls, left.left, right, uni, gensym),
                  _distribute(cls, left.right, right, uni, gensym))
    if isinstance(right, Or):
        return Or(_distribute(cls, left, right.left, uni, gensym),
                  _distribute(cls, left, right.right, uni, gensym))
    return _hoist(cls, left, right, uni, gensym)


def _check_atom(f: Atom, uni):
    """Static validation: path shape, literal ranges, literal alphabets."""
    head = f.path[0] if f.path else None
    if head is None or not isinstance(head, str):
        raise NormalizeError("atom path must start with a place name")
    leaves = pattern_leaves(f.pattern)
    for leaf in leaves:
        _check_expr(leaf, allow_hole=True)
    if uni.is_flat_place(head):
        if len(f.path) != 1:
            raise NormalizeError("place %s takes no sub-path" % head)
        for leaf in leaves:
            if isinstance(leaf, Lit) and not uni.check_flat_value(head, leaf.value):
                raise NormalizeError(
                    "value %s outside the alphabet of %s" % (leaf, head))
        return
    if uni.tree is not None and head in uni.tree.buffer_names:
        tree = uni.tree
        if not 2 <= len(f.path) <= 3:
            raise NormalizeError("buffer paths are buffer.entry or buffer.entry.bits")
        entry = f.path[1]
        if isinstance(entry, int):
            tree.entry_index(entry)
        width = tree.width
        if len(f.path) == 3:
            seg = f.path[2]
            if isinstance(seg, RangeSeg):
                if isinstance(seg.lo, int) and isinstance(seg.hi, int):
                    tree.check_offsets(seg.lo, seg.hi)
                    width = seg.hi - seg.lo + 1
                else:
                    return  # symbolic offsets; range checks happen at grounding
            elif isinstance(seg, int):
                tree.check_offsets(seg, seg)
                width = 1
        for leaf in leaves:
            if isinstance(leaf, Lit):
                if not isinstance(leaf.value, Nat):
                    raise NormalizeError("buffers hold naturals, not %s" % leaf)
                bits_of(leaf.value.n, 0, width - 1)  # range check
        return
    raise NormalizeError("unknown place %r" % head)


def _check_expr(e, allow_hole):
    if isinstance(e, Hole):
        if not allow_hole:
            raise NormalizeError("_ only stands for a whole pattern slot")
        return
    if isinstance(e, Arith):
        _check_expr(e.left, allow_hole=False)
        _check_expr(e.right, allow_hole=False)


# --- framing ---------------------------------------------------------------

def hole_pattern(level: int):
    return pattern_of_leaves([Hole() for _ in range(2 ** level)])


def all_holes_like(pattern):
    return pattern_of_leaves([Hole() for _ in pattern_leaves(pattern)])


def dc_atom(path, level: int) -> Atom:
    """Don't-care atom: the path is bound in every slot, values free."""
    return Atom(hole_pattern(level), tuple(path))


def _star_chain(parts):
    out = parts[0]
    for p in parts[1:]:
        out = Star(out, p)
    return out


def _expand_framed(left, right, uni, gensym):
    lev_l, lev_r = level_of(left), level_of(right)
    level = lev_l if lev_l is not None else lev_r
    fp_l, ex_l = footprint(left, uni)
    fp_r, ex_r = footprint(right, uni)
    if level is None:
        if fp_l or fp_r:
            raise NormalizeError("cannot frame a formula of unknown level")
        return Implies(left, right)
    if ex_l and ex_r:
        lhs = _pad_exact(left, sorted(fp_r - fp_l, key=path_key), level)
        rhs = _pad_exact_pre(right, sorted(fp_l - fp_r, key=path_key), level)
        return Implies(lhs, rhs)
    # the leftover frame is unconstrained: whatever part of the model the
    # operand does not pin down may hold anything
    cover = Frame(frozenset({()}))
    # hoist binders above the frame so witnesses are fixed before splitting
    lhs = _hoist(Star, left, cover, uni, gensym)
    rhs = _hoist(Star, cover, right, uni, gensym)
    return Implies(lhs, rhs)


def _pad_exact(f, missing, level):
    if not missing:
        return f
    return _star_chain([f] + [dc_atom(p, level) for p in missing])


def _pad_exact_pre(f, missing, level):
    if not missing:
        return f
    return _star_chain([dc_atom(p, level) for p in missing] + [f])


def frame_complete(f, uni, level=None):
    """Pad a formula so it speaks about every declared place: don't-care
    atoms for unmentioned flat places, a frame over the buffer tree."""
    if level is None:
        level = level_of(f)
        if level is None:
            raise NormalizeError("frame completion needs a definite level")
    fp, _ = footprint(f, uni)
    if () in fp:
        return f  # already carries an unconstrained frame
    parts = [f]
    for place in uni.flat_places():
        if not any(pre and pre[0] == place for pre in fp):
            parts.append(dc_atom((place,), level))
    if uni.tree is not None:
        parts.append(Frame(frozenset((b,) for b in uni.tree.buffer_names)))
    return _star_chain(parts)


# --- core desugaring -------------------------------------------------------

def desugar(f, uni):
    """Full rewrite to the core constructors."""
    g = normalize(f, uni)
    gensym = _Gensym(_all_names(g, set()))
    return _core(g, uni, gensym)


def _core(f, uni, gensym):
    if isinstance(f, Atom):
        return _core_atom(f, gensym)
    if isinstance(f, NotPat):
        return _core(_expand_notpat(f, uni), uni, gensym)
    if isinstance(f, (Emp, FalseF, Rel, Frame)):
        return f
    if isinstance(f, TrueF):
        return Implies(FalseF(), FalseF())
    if isinstance(f, (Pair, Star, Overlap, Seq, Implies)):
        return type(f)(_core(f.left, uni, gensym), _core(f.right, uni, gensym))
    if isinstance(f, Not):
        return Implies(_core(f.body, uni, gensym), FalseF())
    if isinstance(f, Or):
        return Implies(Implies(_core(f.left, uni, gensym), FalseF()),
                       _core(f.right, uni, gensym))
    if isinstance(f, And):
        # !(P => !Q): holds exactly when both do
        return Implies(
            Implies(_core(f.left, uni, gensym),
                    Implies(_core(f.right, uni, gensym), FalseF())),
            FalseF())
    if isinstance(f, Exists):
        return Exists(f.var, _core(f.body, uni, gensym))
    raise NormalizeError("cannot desugar %r" % (type(f).__name__,))


def _core_atom(f: Atom, gensym):
    def build(pattern):
        if isinstance(pattern, Tup):
            return Pair(build(pattern.left), build(pattern.right))
        if isinstance(pattern, Hole):
            name = gensym.fresh()
            return Exists(name, Atom(Var(name), f.path))
        return Atom(pattern, f.path)

    return build(f.pattern)


def _expand_notpat(f: NotPat, uni):
    """First-difference complement: one disjunct per literal leaf, keeping
    earlier literals, flipping that leaf across its alphabet, freeing the
    rest."""
    atom = f.atom
    leaves = list(pattern_leaves(atom.pattern))
    lit_positions = [i for i, leaf in enumerate(leaves) if not isinstance(leaf, Hole)]
    if not lit_positions:
        raise NormalizeError("~ needs at least one literal in the pattern")
    for i in lit_positions:
        if not isinstance(leaves[i], Lit):
            raise NormalizeError("~ takes literal patterns, not %s" % (leaves[i],))
    alphabet = _notpat_alphabet(atom, uni)
    disjuncts = []
    for k, i in enumerate(lit_positions):
        for v in alphabet:
            if v == leaves[i].value:
                continue
            new = [Hole() for _ in leaves]
            for j in lit_positions[:k]:
                new[j] = leaves[j]
            new[i] = Lit(v)
            disjuncts.append(Atom(pattern_of_leaves(new), atom.path))
    if not disjuncts:
        return FalseF()
    out = disjuncts[0]
    for d in disjuncts[1:]:
        out = Or(out, d)
    return out


def _notpat_alphabet(atom: Atom, uni):
    head = atom.path[0]
    if uni.is_flat_place(head):
        return uni.alphabet(head)
    tree = uni.tree
    if tree is None:
        raise NormalizeError("unknown place %r" % head)
    width = tree.width
    if len(atom.path) == 3:
        seg = atom.path[2]
        if isinstance(seg, RangeSeg):
            if not (isinstance(seg.lo, int) and isinstance(seg.hi, int)):
                raise NormalizeError("~ needs concrete bit offsets")
            width = seg.hi - seg.lo + 1
        elif isinstance(seg, int):
            width = 1
    return tuple(Nat(n) for n in range(1 << width))


# --- whole-tree lowering ---------------------------------------------------

def lower_tree_atom(atom: Atom, uni) -> object:
    """Rewrite a literal buffer atom into the * chain of its single-bit
    atoms, least significant offset first."""
    if uni.tree is None:
        raise NormalizeError("no tree in this universe")
    head = atom.path[0]
    if not uni.is_buffer(head):
        raise NormalizeError("%s is not a buffer" % (head,))
    tree = uni.tree
    entry = atom.path[1]
    if not (isinstance(entry, int) or entry in ("first", "last")):
        raise NormalizeError("lowering needs a concrete entry")
    lo, hi = 0, tree.width - 1
    if len(atom.path) == 3:
        seg = atom.path[2]
        if isinstance(seg, RangeSeg) and isinstance(seg.lo, int) \
                and isinstance(seg.hi, int):
            lo, hi = seg.lo, seg.hi
        elif isinstance(seg, int):
            lo = hi = seg
        else:
            raise NormalizeError("lowering needs concrete offsets")
    tree.check_offsets(lo, hi)
    leaves = pattern_leaves(atom.pattern)
    per_leaf_bits = []
    for leaf in leaves:
        if isinstance(leaf, Hole):
            per_leaf_bits.append(None)
        elif isinstance(leaf, Lit) and isinstance(leaf.value, Nat):
            per_leaf_bits.append(bits_of(leaf.value.n, lo, hi))
        else:
            raise NormalizeError("lowering needs literal or hole patterns")
    parts = []
    for k, off in enumerate(range(lo, hi + 1)):
        bit_leaves = []
        for leaf, bits in zip(leaves, per_leaf_bits):
            bit_leaves.append(Hole() if bits is None else Lit(Nat(bits[k])))
        parts.append(Atom(pattern_of_leaves(bit_leaves), (head, entry, off)))
    return _star_chain(parts)

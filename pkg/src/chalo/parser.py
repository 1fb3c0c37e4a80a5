"""Tokenizer and recursive-descent parser for formulas and universe files.

Formula grammar, loosest binding first::

    formula    = "exists" IDENT "." formula
               | "forall" IDENT "." formula
               | arrow
    arrow      = or_f  [ ("=>" | "->" | "<->") arrow ]        right assoc
    or_f       = and_f { "||" and_f }
    and_f      = chain { "&&" chain }
    chain      = unary { OP unary }      OP one of "*" "(+)" ";",
                                         mixing OPs needs parentheses
    unary      = "!" unary | "~" primary | primary
    primary    = "emp" | "false" | "true"
               | "frame" "(" path { "," path } ")"
               | "<" formula { "," formula } ">"
               | NAME "[" arg "]" { "[" arg "]" }             macro call
               | pattern "@" path                             atom
               | expr REL expr                                comparison
               | "(" formula ")"
               | "(" formula "," formula ")"                  pair

    pattern    = expr | "(" pattern "," pattern ")"
    expr       = term { ("+" | "-" | "mod") term }
    term       = NAT | "abs" | "_" | IDENT | "(" expr ")"
    path       = seg { "." seg } ;  seg = IDENT | NAT [ "-" NAT ]
    REL        = "=" | "!=" | "<" | "<="

A leading "(" is ambiguous between pattern, expression and formula; the
parser resolves it by backtracking, trying in that order.

Universe files are line oriented::

    universe NAME
    place NAME { v1, v2, ... }     values, or "nat" for all naturals
    tree B E W
    natbound N
    def NAME := FORMULA
    def NAME(p1, p2) := FORMULA    parameters: path heads or expressions

"#" starts a comment; a trailing backslash continues a line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .formulas import (
    And, Arith, Atom, Emp, Exists, FalseF, Forall, Frame, FramedIff,
    FramedImp, Hole, Implies, Lit, MacroCall, Not, NotPat, Or, Pair,
    RangeSeg, Rel, Seq, Star, Overlap, TrueF, Tup, TupleStar, Var,
)
from .universe import Alpha, MacroDef, Universe, UniverseError
from .trees import TreeGeometry
from .values import ABS, Nat, parse_value_token


class ParseError(ValueError):
    def __init__(self, msg, line=None, col=None):
        self.line, self.col = line, col
        if line is not None:
            msg = "line %d, column %d: %s" % (line, col, msg)
        super().__init__(msg)


KEYWORDS = {
    "exists", "forall", "emp", "false", "true", "abs", "mod", "frame",
}

_TWO_CHAR = (":=", "=>", "->", "<->", "||", "&&", "<=", "!=")


@dataclass
class Tok:
    kind: str  # IDENT NAT OP HOLE EOF
    text: str
    line: int
    col: int
    num: Optional[int] = None


def tokenize(text: str):
    toks = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if text.startswith("(+)", i):
            toks.append(Tok("OP", "(+)", line, start_col))
            i += 3
            col += 3
            continue
        if c == "<" and text.startswith("<->", i):
            toks.append(Tok("OP", "<->", line, start_col))
            i += 3
            col += 3
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR:
            toks.append(Tok("OP", two, line, start_col))
            i += 2
            col += 2
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Tok("NAT", text[i:j], line, start_col, num=int(text[i:j])))
            col += j - i
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Tok("IDENT", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if c == "_":
            j = i + 1
            if j < n and (text[j].isalnum() or text[j] == "_"):
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                toks.append(Tok("IDENT", text[i:j], line, start_col))
                col += j - i
                i = j
            else:
                toks.append(Tok("HOLE", "_", line, start_col))
                i += 1
                col += 1
            continue
        if c in "()<>,.@*;!~+-={}[]":
            toks.append(Tok("OP", c, line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError("stray character %r" % c, line, col)
    toks.append(Tok("EOF", "", line, col))
    return toks


_CHAIN_OPS = {"*": Star, "(+)": Overlap, ";": Seq}
_REL_OPS = ("=", "!=", "<", "<=")


class _FormulaParser:
    def __init__(self, toks, universe=None, params=()):
        self.toks = toks
        self.pos = 0
        self.uni = universe
        self.params = frozenset(params)

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead=0) -> Tok:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at_op(self, *texts) -> bool:
        t = self.peek()
        return t.kind == "OP" and t.text in texts

    def eat_op(self, text):
        t = self.peek()
        if t.kind != "OP" or t.text != text:
            raise ParseError("expected %r, found %r" % (text, t.text or "end of input"),
                             t.line, t.col)
        return self.next()

    def at_keyword(self, word) -> bool:
        t = self.peek()
        return t.kind == "IDENT" and t.text == word

    def error(self, msg):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # -- formulas ----------------------------------------------------------

    def parse_formula(self):
        if self.at_keyword("exists") or self.at_keyword("forall"):
            kw = self.next().text
            name_tok = self.next()
            if name_tok.kind != "IDENT" or name_tok.text in KEYWORDS:
                raise ParseError("expected a variable after %s" % kw,
                                 name_tok.line, name_tok.col)
            self.eat_op(".")
            body = self.parse_formula()
            cls = Exists if kw == "exists" else Forall
            return cls(name_tok.text, body)
        return self.parse_arrow()

    def parse_arrow(self):
        left = self.parse_or()
        if self.at_op("=>", "->", "<->"):
            op = self.next().text
            right = self.parse_arrow()
            cls = {"=>": Implies, "->": FramedImp, "<->": FramedIff}[op]
            return cls(left, right)
        return left

    def parse_or(self):
        f = self.parse_and()
        while self.at_op("||"):
            self.next()
            f = Or(f, self.parse_and())
        return f

    def parse_and(self):
        f = self.parse_chain()
        while self.at_op("&&"):
            self.next()
            f = And(f, self.parse_chain())
        return f

    def parse_chain(self):
        first = self.parse_unary()
        if not self.at_op(*_CHAIN_OPS):
            return first
        op_tok = self.peek()
        op = op_tok.text
        items = [first]
        while self.at_op(*_CHAIN_OPS):
            t = self.peek()
            if t.text != op:
                raise ParseError(
                    "mixed %r and %r in one chain; add parentheses" % (op, t.text),
                    t.line, t.col)
            self.next()
            items.append(self.parse_unary())
        cls = _CHAIN_OPS[op]
        f = items[0]
        for item in items[1:]:
            f = cls(f, item)
        return f

    def parse_unary(self):
        if self.at_op("!"):
            self.next()
            return Not(self.parse_unary())
        if self.at_op("~"):
            tok = self.next()
            body = self.parse_primary()
            if not isinstance(body, Atom):
                raise ParseError("~ applies to a single pattern atom",
                                 tok.line, tok.col)
            return NotPat(body)
        return self.parse_primary()

    # -- primaries ---------------------------------------------------------

    def parse_primary(self):
        t = self.peek()
        if t.kind == "IDENT":
            if t.text in ("exists", "forall"):
                self.error("quantifiers need parentheses in operand position")
            if t.text == "emp":
                self.next()
                return Emp()
            if t.text == "false":
                self.next()
                return FalseF()
            if t.text == "true":
                self.next()
                return TrueF()
            if t.text == "frame":
                return self.parse_frame()
            if self.is_macro_name(t.text):
                return self.parse_macro_call()
            return self.parse_atom_or_rel()
        if t.kind in ("NAT", "HOLE"):
            return self.parse_atom_or_rel()
        if t.kind == "OP" and t.text == "<":
            return self.parse_angle_tuple()
        if t.kind == "OP" and t.text == "(":
            return self.parse_paren()
        self.error("expected a formula, found %r" % (t.text or "end of input"))

    def parse_frame(self):
        self.next()
        self.eat_op("(")
        prefixes = [self.parse_path()]
        while self.at_op(","):
            self.next()
            prefixes.append(self.parse_path())
        self.eat_op(")")
        resolved = []
        for p in prefixes:
            resolved.append(tuple(p))
        return Frame(frozenset(resolved))

    def parse_angle_tuple(self):
        self.eat_op("<")
        items = [self.parse_formula()]
        while self.at_op(","):
            self.next()
            items.append(self.parse_formula())
        self.eat_op(">")
        return TupleStar(tuple(items))

    def is_macro_name(self, name) -> bool:
        return self.uni is not None and name in self.uni.macros

    def parse_macro_call(self):
        name_tok = self.next()
        by_arity = self.uni.macros[name_tok.text]
        args = []
        while self.at_op("["):
            self.next()
            args.append(self.parse_macro_arg())
            self.eat_op("]")
        if len(args) not in by_arity:
            raise ParseError(
                "%s takes %s argument(s), got %d"
                % (name_tok.text,
                   " or ".join(str(n) for n in sorted(by_arity)), len(args)),
                name_tok.line, name_tok.col)
        return MacroCall(name_tok.text, tuple(args))

    def parse_macro_arg(self):
        # a lone identifier that is a buffer or parameter name stays a raw
        # name so it can substitute into path positions
        t = self.peek()
        if t.kind == "IDENT" and self.peek(1).kind == "OP" and self.peek(1).text == "]":
            name = t.text
            if name in self.params or (self.uni and self.uni.is_buffer(name)):
                self.next()
                return name
        return self.parse_expr()

    def parse_paren(self):
        mark = self.pos
        # 1: tuple pattern or parenthesized expression, then @ or relation
        try:
            return self.parse_atom_or_rel()
        except ParseError:
            self.pos = mark
        # 2: grouped formula or pair
        self.eat_op("(")
        f = self.parse_formula()
        if self.at_op(","):
            self.next()
            g = self.parse_formula()
            self.eat_op(")")
            return Pair(f, g)
        self.eat_op(")")
        return f

    def parse_atom_or_rel(self):
        t = self.peek()
        pat, bare_expr = self.parse_pattern()
        if self.at_op("@"):
            self.next()
            path = self.parse_path()
            return Atom(pat, tuple(path))
        if bare_expr and self.at_op(*_REL_OPS):
            op = self.next().text
            right = self.parse_expr()
            return Rel(op, pat, right)
        raise ParseError("expression is not a formula; expected @ or a comparison",
                         t.line, t.col)

    def parse_pattern(self):
        """Returns (pattern, is_bare_expr)."""
        if self.at_op("("):
            mark = self.pos
            try:
                self.next()
                left, _ = self.parse_pattern()
                self.eat_op(",")
                right, _ = self.parse_pattern()
                self.eat_op(")")
                return Tup(left, right), False
            except ParseError:
                self.pos = mark
        return self.parse_expr(), True

    # -- expressions -------------------------------------------------------

    def parse_expr(self):
        e = self.parse_term()
        while self.at_op("+", "-") or self.at_keyword("mod"):
            op = self.next().text
            e = Arith(op, e, self.parse_term())
        return e

    def parse_term(self):
        t = self.peek()
        if t.kind == "NAT":
            self.next()
            return Lit(Nat(t.num))
        if t.kind == "HOLE":
            self.next()
            return Hole()
        if t.kind == "IDENT":
            if t.text == "abs":
                self.next()
                return Lit(ABS)
            if t.text in KEYWORDS:
                self.error("%r cannot appear in an expression" % t.text)
            self.next()
            if self.uni is not None and self.uni.is_symbol(t.text):
                return Lit(parse_value_token(t.text))
            return Var(t.text)
        if t.kind == "OP" and t.text == "(":
            self.next()
            e = self.parse_expr()
            self.eat_op(")")
            return e
        self.error("expected an expression")

    # -- paths -------------------------------------------------------------

    def parse_path(self):
        segs = [self.parse_seg(first=True)]
        while self.at_op("."):
            self.next()
            segs.append(self.parse_seg(first=False))
        return segs

    def parse_seg(self, first):
        t = self.peek()
        if t.kind == "NAT" or (t.kind == "IDENT" and t.text not in KEYWORDS):
            self.next()
            lo = t.num if t.kind == "NAT" else t.text
            if first and t.kind == "IDENT" and self.uni is not None:
                name = t.text
                if not (self.uni.is_flat_place(name) or self.uni.is_buffer(name)
                        or name in self.params):
                    raise ParseError("unknown place %r" % name, t.line, t.col)
            if not first and self.at_op("-"):
                # bit range; bounds may be macro parameters
                self.next()
                hi = self.next()
                if hi.kind == "NAT":
                    return RangeSeg(lo, hi.num)
                if hi.kind == "IDENT" and hi.text not in KEYWORDS:
                    return RangeSeg(lo, hi.text)
                raise ParseError("expected the high offset of a bit range",
                                 hi.line, hi.col)
            return lo
        self.error("expected a path segment")


def parse_formula(text: str, universe=None, params=()):
    toks = tokenize(text)
    p = _FormulaParser(toks, universe, params)
    f = p.parse_formula()
    t = p.peek()
    if t.kind != "EOF":
        raise ParseError("unexpected %r after formula" % t.text, t.line, t.col)
    return f


# --- universe files --------------------------------------------------------

def _logical_lines(text: str):
    """(line number, content) pairs with comments stripped and backslash
    continuations joined."""
    out = []
    pending = None
    pending_no = 0
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if pending is not None:
            line = pending + " " + line.strip()
            no = pending_no
            pending = None
        if line.endswith("\\"):
            pending = line[:-1].rstrip()
            pending_no = no
            continue
        if line.strip():
            out.append((no, line.strip()))
    if pending is not None:
        out.append((pending_no, pending))
    return out


def parse_universe(text: str) -> Universe:
    uni = Universe()
    seen_name = False
    for no, line in _logical_lines(text):
        try:
            head, _, rest = line.partition(" ")
            rest = rest.strip()
            if head == "universe":
                if not rest or " " in rest:
                    raise ParseError("universe needs a single name")
                uni.name = rest
                seen_name = True
            elif head == "place":
                _parse_place_line(uni, rest)
            elif head == "tree":
                parts = rest.split()
                if len(parts) != 3 or not all(p.isdigit() for p in parts):
                    raise ParseError("tree takes three numbers: buffers entries width")
                uni.tree = TreeGeometry(int(parts[0]), int(parts[1]), int(parts[2]))
            elif head == "natbound":
                if not rest.isdigit():
                    raise ParseError("natbound takes a number")
                uni.nat_bound = int(rest)
            elif head == "def":
                _parse_def_line(uni, rest)
            else:
                raise ParseError("unknown declaration %r" % head)
        except (ParseError, UniverseError, ValueError) as e:
            raise ParseError("universe file line %d: %s" % (no, e)) from e
    if not seen_name:
        raise ParseError("missing universe declaration")
    return uni


def _parse_place_line(uni: Universe, rest: str):
    name, _, body = rest.partition("{")
    name = name.strip()
    if not name or not body.rstrip().endswith("}"):
        raise ParseError("place syntax: place NAME { v1, v2 }")
    body = body.rstrip()[:-1]
    toks = [t.strip() for t in body.split(",") if t.strip()]
    if not toks:
        raise ParseError("place %r has an empty alphabet" % name)
    nat = False
    extras = []
    for t in toks:
        if t == "nat":
            nat = True
        else:
            extras.append(parse_value_token(t))
    uni.add_place(name, Alpha(nat, tuple(extras)))


def _parse_def_line(uni: Universe, rest: str):
    head, sep, body = rest.partition(":=")
    if not sep:
        raise ParseError("def syntax: def NAME := FORMULA")
    head = head.strip()
    params = ()
    if "(" in head:
        name, _, plist = head.partition("(")
        if not plist.rstrip().endswith(")"):
            raise ParseError("unclosed parameter list")
        params = tuple(p.strip() for p in plist.rstrip()[:-1].split(",") if p.strip())
        head = name.strip()
    if not head.isidentifier():
        raise ParseError("bad macro name %r" % head)
    # the same name may be defined at several arities
    by_arity = uni.macros.setdefault(head, {})
    if len(params) in by_arity:
        raise ParseError("duplicate def %r with %d parameter(s)"
                         % (head, len(params)))
    formula = parse_formula(body.strip(), uni, params)
    by_arity[len(params)] = MacroDef(head, params, formula)


def load_universe(path) -> Universe:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_universe(fh.read())

"""Group-ring expressions over lamplighter-type groups and their translation.

The group is ``(direct sum over tapes x Z of Z/p) ⋊ Z^tapes``; the shift of
tape ``t`` conjugates lamps by ``t g_i t^-1 = g_(i-1)``.  Elements are kept
in normal form ``L * t^n`` (lamp configuration first, shift second).

Translation into operator expressions sends the projection
``(1/p) sum_a g_i^a`` to the indicator of ``{x_i = 0}``, a Z/2 lamp ``g_i``
to ``2 chi{x_i = 0} - 1`` and shifts to shift edges.  Only this fragment
is supported; individual lamps for ``p > 2`` would need complex characters.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .exactnum import parse_rational
from .groupoid import Edge, OperatorExpression
from .space import Alphabet, Cylinder, Shift, SpaceDescriptor


class UnsupportedAtom(ValueError):
    pass


class ParseError(ValueError):
    pass


# normal-form group elements: (lamps, shifts) with lamps a sorted tuple of ((tape, index), value)
Element = tuple


def _mk(lamps: dict, shifts) -> Element:
    return (tuple(sorted(lamps.items())), tuple(shifts))


def element_product(a: Element, b: Element, p: int) -> Element:
    """``(L1, n1)(L2, n2) = (L1 + shift(L2, -n1), n1 + n2)``."""
    l1, n1 = a
    l2, n2 = b
    lamps = dict(l1)
    for (t, i), v in l2:
        k = (t, i - n1[t])
        w = (lamps.get(k, 0) + v) % p
        if w:
            lamps[k] = w
        else:
            lamps.pop(k, None)
    return _mk(lamps, tuple(x + y for x, y in zip(n1, n2)))


def element_inverse(a: Element, p: int) -> Element:
    lamps, n = a
    return _mk({(t, i + n[t]): (-v) % p for (t, i), v in lamps}, tuple(-x for x in n))


# --------------------------------------------------------------------------
# syntax trees: ("shift", k, tape) ("lamp", i, a, tape) ("proj", i, tape)
# ("scale", c, child) ("sum", children) ("prod", children) ("id",)

class GroupRingExpr:
    """Rational combination of group elements, with its defining syntax tree."""

    def __init__(self, tree: tuple, p: int = 2, n_tapes: int = 1):
        if p < 2:
            raise ValueError("p must be at least 2")
        self.tree = tree
        self.p = p
        self.n_tapes = n_tapes
        self.coeffs = _evaluate(tree, p, n_tapes)

    # constructors
    @classmethod
    def identity(cls, p=2, n_tapes=1):
        return cls(("id",), p, n_tapes)

    @classmethod
    def shift(cls, k=1, tape=0, p=2, n_tapes=1):
        return cls(("shift", int(k), tape), p, n_tapes)

    @classmethod
    def lamp(cls, i=0, a=1, tape=0, p=2, n_tapes=1):
        return cls(("lamp", int(i), int(a) % p, tape), p, n_tapes)

    @classmethod
    def proj(cls, i=0, tape=0, p=2, n_tapes=1):
        return cls(("proj", int(i), tape), p, n_tapes)

    def _like(self, tree):
        return GroupRingExpr(tree, self.p, self.n_tapes)

    def _check(self, other):
        if (self.p, self.n_tapes) != (other.p, other.n_tapes):
            raise ValueError("expressions live in different groups")

    def __add__(self, other):
        self._check(other)
        return self._like(("sum", (self.tree, other.tree)))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return self._like(("scale", Fraction(c), self.tree))

    def __mul__(self, other):
        if isinstance(other, GroupRingExpr):
            return formal_product(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __pow__(self, n: int):
        out = GroupRingExpr.identity(self.p, self.n_tapes)
        for _ in range(n):
            out = out * self
        return out

    def star(self) -> "GroupRingExpr":
        return self._like(_star(self.tree, self.p))

    def __eq__(self, other):
        return isinstance(other, GroupRingExpr) and self.p == other.p and self.coeffs == other.coeffs

    def __repr__(self):
        return f"GroupRingExpr({to_sexpr(self.tree)})"


def _evaluate(tree, p, n_tapes) -> dict:
    kind = tree[0]
    zero = (0,) * n_tapes
    if kind == "id":
        return {_mk({}, zero): Fraction(1)}
    if kind == "shift":
        _, k, t = tree
        _tape_ok(t, n_tapes)
        n = [0] * n_tapes
        n[t] = k
        return {_mk({}, n): Fraction(1)}
    if kind == "lamp":
        _, i, a, t = tree
        _tape_ok(t, n_tapes)
        if a % p == 0:
            return {_mk({}, zero): Fraction(1)}
        return {_mk({(t, i): a % p}, zero): Fraction(1)}
    if kind == "proj":
        _, i, t = tree
        _tape_ok(t, n_tapes)
        out = {}
        for a in range(p):
            out[_mk({(t, i): a} if a else {}, zero)] = Fraction(1, p)
        return out
    if kind == "scale":
        c = tree[1]
        return {g: c * v for g, v in _evaluate(tree[2], p, n_tapes).items() if c * v}
    if kind == "sum":
        out: dict = {}
        for ch in tree[1]:
            for g, v in _evaluate(ch, p, n_tapes).items():
                out[g] = out.get(g, 0) + v
        return {g: v for g, v in out.items() if v}
    if kind == "prod":
        acc = {_mk({}, zero): Fraction(1)}
        for ch in tree[1]:
            acc = _convolve(acc, _evaluate(ch, p, n_tapes), p)
        return acc
    raise ParseError(f"unknown node {kind!r}")


def _tape_ok(t, n_tapes):
    if not 0 <= t < n_tapes:
        raise ParseError(f"tape {t} out of range")


def _convolve(a: dict, b: dict, p: int) -> dict:
    out: dict = {}
    for g, x in a.items():
        for h, y in b.items():
            k = element_product(g, h, p)
            out[k] = out.get(k, 0) + x * y
    return {g: v for g, v in out.items() if v}


def _star(tree, p):
    kind = tree[0]
    if kind in ("id", "proj"):
        return tree
    if kind == "shift":
        return ("shift", -tree[1], tree[2])
    if kind == "lamp":
        return ("lamp", tree[1], (-tree[2]) % p, tree[3])
    if kind == "scale":
        return ("scale", tree[1], _star(tree[2], p))
    if kind == "sum":
        return ("sum", tuple(_star(c, p) for c in tree[1]))
    if kind == "prod":
        return ("prod", tuple(_star(c, p) for c in reversed(tree[1])))
    raise ParseError(f"unknown node {kind!r}")


def formal_product(a: GroupRingExpr, b: GroupRingExpr) -> GroupRingExpr:
    """Convolution product; the normal form follows from the semidirect relations."""
    a._check(b)
    return a._like(("prod", (a.tree, b.tree)))


def formal_trace(e: GroupRingExpr) -> Fraction:
    """Coefficient of the neutral element."""
    return e.coeffs.get(_mk({}, (0,) * e.n_tapes), Fraction(0))


# --------------------------------------------------------------------------
# translation

def lamp_space(p: int = 2, n_tapes: int = 1) -> SpaceDescriptor:
    return SpaceDescriptor(tuple(Alphabet(tuple(str(a) for a in range(p))) for _ in range(n_tapes)))


def translate(e: GroupRingExpr, space: Optional[SpaceDescriptor] = None) -> OperatorExpression:
    """Operator expression of ``e`` on the dual Bernoulli space."""
    space = space or lamp_space(e.p, e.n_tapes)
    return _translate(e.tree, e.p, space).simplify()


def _indicator(space, t, i, c=1):
    cells = [{} for _ in range(space.n_tapes)]
    cells[t] = {i: 0}
    return OperatorExpression([(c, Edge((), Cylinder(space, cells)))])


def _translate(tree, p, space) -> OperatorExpression:
    kind = tree[0]
    whole = space.whole()
    if kind == "id":
        return OperatorExpression([(1, Edge((), whole))])
    if kind == "shift":
        _, k, t = tree
        if k == 0:
            return OperatorExpression([(1, Edge((), whole))])
        return OperatorExpression([(1, Edge((Shift(t, k),), whole))])
    if kind == "proj":
        return _indicator(space, tree[2], tree[1])
    if kind == "lamp":
        _, i, a, t = tree
        if a % p == 0:
            return OperatorExpression([(1, Edge((), whole))])
        if p != 2:
            raise UnsupportedAtom(f"lamp with p={p} needs complex characters")
        return _indicator(space, t, i, 2) + OperatorExpression([(-1, Edge((), whole))])
    if kind == "scale":
        return _translate(tree[2], p, space).scale(tree[1])
    if kind == "sum":
        out = OperatorExpression()
        for ch in tree[1]:
            out = out + _translate(ch, p, space)
        return out.simplify()
    if kind == "prod":
        out = OperatorExpression([(1, Edge((), whole))])
        for ch in tree[1]:
            out = out * _translate(ch, p, space)
        return out
    raise UnsupportedAtom(f"unsupported node {kind!r}")


def gz_element() -> GroupRingExpr:
    """``(t + t^-1 + t g + g t^-1) / 2`` over Z/2 wr Z."""
    t = GroupRingExpr.shift(1)
    ti = GroupRingExpr.shift(-1)
    g = GroupRingExpr.lamp(0, 1)
    return (t + ti + t * g + g * ti).scale(Fraction(1, 2))


# --------------------------------------------------------------------------
# s-expression format

def _tokenize(text: str) -> list:
    out = []
    for line in text.splitlines():
        line = line.split(";", 1)[0]
        out.extend(line.replace("(", " ( ").replace(")", " ) ").split())
    return out


def _read(tokens, pos):
    if pos >= len(tokens):
        raise ParseError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while True:
            if pos >= len(tokens):
                raise ParseError("missing ')'")
            if tokens[pos] == ")":
                return items, pos + 1
            item, pos = _read(tokens, pos)
            items.append(item)
    if tok == ")":
        raise ParseError("unexpected ')'")
    return tok, pos + 1


def _int(x, what):
    try:
        return int(x)
    except (TypeError, ValueError):
        raise ParseError(f"{what}: expected an integer, got {x!r}") from None


def _to_tree(node) -> tuple:
    if isinstance(node, str):
        if node in ("e", "id", "1"):
            return ("id",)
        raise ParseError(f"bare atom {node!r}")
    if not node:
        raise ParseError("empty list")
    head, args = node[0], node[1:]
    if head == "shift":
        if not 1 <= len(args) <= 2:
            raise ParseError("(shift k [tape])")
        return ("shift", _int(args[0], "shift"), _int(args[1], "tape") if len(args) > 1 else 0)
    if head == "lamp":
        if not 2 <= len(args) <= 3:
            raise ParseError("(lamp i a [tape])")
        return ("lamp", _int(args[0], "lamp"), _int(args[1], "lamp"), _int(args[2], "tape") if len(args) > 2 else 0)
    if head == "proj":
        if not 1 <= len(args) <= 2:
            raise ParseError("(proj i [tape])")
        return ("proj", _int(args[0], "proj"), _int(args[1], "tape") if len(args) > 1 else 0)
    if head == "id":
        return ("id",)
    if head == "scale":
        if len(args) < 2 or not isinstance(args[0], str):
            raise ParseError("(scale p/q expr ...)")
        try:
            c = parse_rational(args[0])
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        inner = [_to_tree(a) for a in args[1:]]
        return ("scale", c, inner[0] if len(inner) == 1 else ("prod", tuple(inner)))
    if head in ("sum", "prod"):
        return (head, tuple(_to_tree(a) for a in args))
    raise UnsupportedAtom(f"unknown atom {head!r}")


def _max_tape(tree) -> int:
    kind = tree[0]
    if kind == "shift" or kind == "proj":
        return tree[2]
    if kind == "lamp":
        return tree[3]
    if kind == "scale":
        return _max_tape(tree[2])
    if kind in ("sum", "prod"):
        return max((_max_tape(c) for c in tree[1]), default=0)
    return 0


def parse_expr(text: str, p: int = 2, n_tapes: Optional[int] = None) -> GroupRingExpr:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ParseError("trailing input after expression")
    tree = _to_tree(node)
    n = n_tapes if n_tapes is not None else _max_tape(tree) + 1
    return GroupRingExpr(tree, p, n)


def to_sexpr(tree) -> str:
    kind = tree[0]
    if kind == "id":
        return "(id)"
    if kind == "shift":
        return f"(shift {tree[1]} {tree[2]})"
    if kind == "lamp":
        return f"(lamp {tree[1]} {tree[2]} {tree[3]})"
    if kind == "proj":
        return f"(proj {tree[1]} {tree[2]})"
    if kind == "scale":
        c = tree[1]
        cs = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        return f"(scale {cs} {to_sexpr(tree[2])})"
    return f"({kind} " + " ".join(to_sexpr(c) for c in tree[1]) + ")"

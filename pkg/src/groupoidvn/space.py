"""Product spaces of tapes and finite factors, cylinders, generator actions.

Points of the space are pairs (tape contents, factor values).  A tape is a
bi-infinite word over a finite alphabet with the uniform measure.  Symbols
are stored as small integers; names only matter for I/O.

Two coordinate conventions are in play:

* A :class:`Cylinder` is a *point set*: its keys are coordinates of the
  point itself (coordinate 0 is the head cell).
* A :class:`SymbolicConfig` tracks one cylinder through a word of
  generators.  It keeps the starting cylinder (``origin``) in absolute
  coordinates, one head per tape, and the sequence of symbol rewrites
  applied so far.  Shifting only moves the head.

Constraints are sets of admissible symbols rather than single symbols, so
a cell may be pinned to a whole symbol class.  A singleton set is an
ordinary cylinder constraint; the full alphabet means unconstrained.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union


class NeedsRefinement(Exception):
    """Raised when an outcome depends on a cell that is not pinned down enough.

    ``splits`` lists :class:`Split` objects; applying any one of them (in the
    config's current view) lets the caller make progress.
    """

    def __init__(self, splits):
        self.splits = list(splits)
        super().__init__()

    def __str__(self):
        return ", ".join(str(s) for s in self.splits)

    @property
    def cells(self):
        return [(s.kind, s.index, s.cell) for s in self.splits]


class WindowExceeded(Exception):
    pass


class AlreadyConstrained(ValueError):
    pass


@dataclass(frozen=True)
class Split:
    """Partition a cell (or factor) of the *current* view into ``parts``."""

    kind: str          # "tape" or "factor"
    index: int
    cell: Optional[int]
    parts: tuple

    def __str__(self):
        where = f"tape{self.index}[{self.cell}]" if self.kind == "tape" else f"factor{self.index}"
        return f"split {where} into {[sorted(p) for p in self.parts]}"


# --------------------------------------------------------------------------
# space descriptor

@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise ValueError("alphabets need at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbol names")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, name) -> int:
        return self.symbols.index(name)

    def name(self, i: int) -> str:
        return self.symbols[i]


@dataclass(frozen=True)
class SpaceDescriptor:
    """``prod tapes x prod factors`` with uniform measures on every coordinate."""

    tapes: tuple
    factors: tuple = ()
    factor_names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tapes", tuple(
            t if isinstance(t, Alphabet) else Alphabet(tuple(t)) for t in self.tapes))
        object.__setattr__(self, "factors", tuple(tuple(f) for f in self.factors))
        for f in self.factors:
            if len(f) < 1:
                raise ValueError("empty finite factor")
        if not self.factor_names:
            object.__setattr__(self, "factor_names", tuple(f"factor{i}" for i in range(len(self.factors))))

    @property
    def n_tapes(self) -> int:
        return len(self.tapes)

    def tape_size(self, i: int) -> int:
        return self.tapes[i].size

    def factor_size(self, i: int) -> int:
        return len(self.factors[i])

    def full_tape(self, i: int) -> frozenset:
        return frozenset(range(self.tapes[i].size))

    def full_factor(self, i: int) -> frozenset:
        return frozenset(range(len(self.factors[i])))

    def whole(self) -> "Cylinder":
        return Cylinder(self)


def binary_space(n_tapes: int = 1, factors=()) -> SpaceDescriptor:
    return SpaceDescriptor(tuple(Alphabet(("0", "1")) for _ in range(n_tapes)), tuple(factors))


# --------------------------------------------------------------------------
# cylinders

class Cylinder:
    """Set of points fixing finitely many coordinates to symbol subsets.

    ``cells[t]`` maps coordinates of tape ``t`` to a proper nonempty
    frozenset of symbols; ``factors[i]`` is a proper nonempty frozenset or
    ``None``.  Instances are immutable and hashable.
    """

    __slots__ = ("space", "cells", "factors", "_key", "_measure")

    def __init__(self, space: SpaceDescriptor, cells=None, factors=None):
        self.space = space
        norm = []
        for t in range(space.n_tapes):
            src = cells[t] if cells is not None and t < len(cells) else {}
            m = space.tape_size(t)
            d = {}
            for c, s in src.items():
                s = frozenset([s]) if isinstance(s, int) else frozenset(s)
                if not s:
                    raise ValueError("empty constraint")
                if max(s) >= m or min(s) < 0:
                    raise ValueError(f"symbol out of range on tape {t}")
                if len(s) < m:
                    d[int(c)] = s
            norm.append(d)
        self.cells = tuple(norm)
        fs = []
        for i in range(len(space.factors)):
            v = factors[i] if factors is not None and i < len(factors) else None
            if v is not None:
                v = frozenset([v]) if isinstance(v, int) else frozenset(v)
                if not v:
                    raise ValueError("empty factor constraint")
                if len(v) == space.factor_size(i):
                    v = None
            fs.append(v)
        self.factors = tuple(fs)
        self._key = None
        self._measure = None

    @classmethod
    def _raw(cls, space, cells, factors) -> "Cylinder":
        """Trusted constructor: ``cells``/``factors`` already normalized."""
        c = object.__new__(cls)
        c.space, c.cells, c.factors = space, cells, factors
        c._key = None
        c._measure = None
        return c

    # identity
    def key(self):
        if self._key is None:
            self._key = (tuple(tuple(sorted((c, tuple(sorted(s))) for c, s in d.items())) for d in self.cells),
                         tuple(None if f is None else tuple(sorted(f)) for f in self.factors))
        return self._key

    def __eq__(self, other):
        return isinstance(other, Cylinder) and self.space == other.space and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Cylinder({self.text()})"

    # access
    def get(self, tape: int, coord: int) -> frozenset:
        s = self.cells[tape].get(coord)
        return self.space.full_tape(tape) if s is None else s

    def get_factor(self, i: int) -> frozenset:
        f = self.factors[i]
        return self.space.full_factor(i) if f is None else f

    def is_constrained(self, tape: int, coord: int) -> bool:
        return coord in self.cells[tape]

    def with_cell(self, tape: int, coord: int, symbols) -> "Cylinder":
        symbols = frozenset([symbols]) if isinstance(symbols, int) else frozenset(symbols)
        if not symbols or max(symbols) >= self.space.tape_size(tape) or min(symbols) < 0:
            raise ValueError("bad constraint")
        d = dict(self.cells[tape])
        if len(symbols) < self.space.tape_size(tape):
            d[coord] = symbols
        else:
            d.pop(coord, None)
        cells = self.cells[:tape] + (d,) + self.cells[tape + 1:]
        return Cylinder._raw(self.space, cells, self.factors)

    def with_factor(self, i: int, values) -> "Cylinder":
        fs = list(self.factors)
        fs[i] = values
        return Cylinder(self.space, self.cells, fs)

    def shifted(self, offsets: Sequence[int]) -> "Cylinder":
        """Re-key tape ``t`` by ``coord -> coord + offsets[t]``."""
        cells = [{c + offsets[t]: s for c, s in d.items()} for t, d in enumerate(self.cells)]
        return Cylinder(self.space, cells, self.factors)

    def span(self, tape: int) -> int:
        d = self.cells[tape]
        return 0 if not d else max(d) - min(d) + 1

    def n_constraints(self) -> int:
        return sum(len(d) for d in self.cells) + sum(f is not None for f in self.factors)

    # set algebra
    def intersect(self, other: "Cylinder") -> Optional["Cylinder"]:
        cells = []
        for t, d in enumerate(self.cells):
            nd = dict(d)
            for c, s in other.cells[t].items():
                s2 = nd.get(c, s) & s
                if not s2:
                    return None
                nd[c] = s2
            cells.append(nd)
        fs = []
        for a, b in zip(self.factors, other.factors):
            if a is None or b is None:
                fs.append(a if b is None else b)
            else:
                v = a & b
                if not v:
                    return None
                fs.append(v)
        return Cylinder(self.space, cells, fs)

    def disjoint(self, other: "Cylinder") -> bool:
        return self.intersect(other) is None

    def contains(self, other: "Cylinder") -> bool:
        """True when ``other`` is a subset of ``self``."""
        for t, d in enumerate(self.cells):
            for c, s in d.items():
                if not other.get(t, c) <= s:
                    return False
        for i, f in enumerate(self.factors):
            if f is not None and not other.get_factor(i) <= f:
                return False
        return True

    def difference(self, other: "Cylinder") -> list:
        """``self - other`` as a list of pairwise disjoint cylinders."""
        if self.disjoint(other):
            return [self]
        out = []
        cur = self
        for t, d in enumerate(other.cells):
            for c, s in sorted(d.items()):
                have = cur.get(t, c)
                outside = have - s
                if outside:
                    out.append(cur.with_cell(t, c, outside))
                cur = cur.with_cell(t, c, have & s)
        for i, f in enumerate(other.factors):
            if f is None:
                continue
            have = cur.get_factor(i)
            outside = have - f
            if outside:
                out.append(cur.with_factor(i, outside))
            cur = cur.with_factor(i, have & f)
        return out

    def text(self) -> str:
        """``tape0[3]=1; tape0[4]={0|1}; state=Start``; read back by :func:`parse_cylinder`."""
        parts = []
        for t, d in enumerate(self.cells):
            names = self.space.tapes[t].symbols
            parts.extend(f"tape{t}[{c}]={_set_text(names, s)}" for c, s in sorted(d.items()))
        for i, f in enumerate(self.factors):
            if f is not None:
                parts.append(f"{self.space.factor_names[i]}={_set_text(self.space.factors[i], f)}")
        return "; ".join(parts)


def _set_text(names, s) -> str:
    if len(s) == 1:
        return str(names[next(iter(s))])
    return "{" + "|".join(str(names[i]) for i in sorted(s)) + "}"


_CELL_RE = re.compile(r"^tape(\d+)\[(-?\d+)\]$")


def _parse_set(names, body: str, where: str) -> frozenset:
    body = body.strip()
    items = body[1:-1].split("|") if body.startswith("{") and body.endswith("}") else [body]
    out = set()
    for it in items:
        it = it.strip()
        if it not in names:
            raise ValueError(f"{where}: unknown symbol {it!r}; expected one of {list(names)}")
        out.add(names.index(it))
    return frozenset(out)


def parse_cylinder(space: "SpaceDescriptor", text: str) -> "Cylinder":
    """Inverse of :meth:`Cylinder.text`; an empty string is the whole space."""
    cells = [{} for _ in range(space.n_tapes)]
    factors = {}
    for part in filter(None, (x.strip() for x in text.split(";"))):
        if "=" not in part:
            raise ValueError(f"cylinder entry {part!r} lacks '='")
        lhs, rhs = (x.strip() for x in part.split("=", 1))
        m = _CELL_RE.match(lhs)
        if m:
            t, c = int(m.group(1)), int(m.group(2))
            if t >= space.n_tapes:
                raise ValueError(f"no tape {t}")
            cells[t][c] = _parse_set(space.tapes[t].symbols, rhs, lhs)
        elif lhs in space.factor_names:
            i = space.factor_names.index(lhs)
            factors[i] = _parse_set(tuple(str(v) for v in space.factors[i]), rhs, lhs)
        else:
            raise ValueError(f"unknown coordinate {lhs!r}")
    return Cylinder(space, cells, [factors.get(i) for i in range(len(space.factors))])


def measure(c: Cylinder) -> Fraction:
    """Exact product measure of a cylinder."""
    if c._measure is not None:
        return c._measure
    num, den = 1, 1
    sp = c.space
    for t, d in enumerate(c.cells):
        m = sp.tape_size(t)
        for s in d.values():
            num *= len(s)
            den *= m
    for i, f in enumerate(c.factors):
        if f is not None:
            num *= len(f)
            den *= sp.factor_size(i)
    c._measure = Fraction(num, den)
    return c._measure


def refine(c: Cylinder, tape: int, coordinate: int) -> list:
    """One child per admissible symbol of the given cell."""
    have = c.get(tape, coordinate)
    if len(have) == 1:
        raise AlreadyConstrained(f"tape {tape} cell {coordinate} is fixed")
    return [c.with_cell(tape, coordinate, {s}) for s in sorted(have)]


def refine_factor(c: Cylinder, i: int) -> list:
    have = c.get_factor(i)
    if len(have) == 1:
        raise AlreadyConstrained(f"factor {i} is fixed")
    return [c.with_factor(i, {v}) for v in sorted(have)]


def union_measure(cylinders: Iterable[Cylinder]) -> Fraction:
    """Measure of a finite union, by disjointification."""
    disjoint_parts: list = []
    for c in cylinders:
        pieces = [c]
        for d in disjoint_parts:
            pieces = [q for p in pieces for q in p.difference(d)]
            if not pieces:
                break
        disjoint_parts.extend(pieces)
    return sum((measure(p) for p in disjoint_parts), Fraction(0))


# --------------------------------------------------------------------------
# membership oracles for the flip set

class SigmaOracle:
    """Total membership predicate on the positive integers plus an enumerator."""

    kind = "abstract"

    def __contains__(self, n: int) -> bool:
        return n >= 1 and self._contains(n)

    def _contains(self, n: int) -> bool:
        raise NotImplementedError

    def members(self, upto: int) -> list:
        return [n for n in range(1, upto + 1) if n in self]

    def spec(self) -> str:
        return self.kind

    def __eq__(self, other):
        return isinstance(other, SigmaOracle) and self.spec() == other.spec()

    def __hash__(self):
        return hash(self.spec())

    def __repr__(self):
        return f"Sigma({self.spec()})"


class EmptySigma(SigmaOracle):
    kind = "none"

    def _contains(self, n):
        return False


class AllSigma(SigmaOracle):
    kind = "all"

    def _contains(self, n):
        return True


class EvenSigma(SigmaOracle):
    kind = "evens"

    def _contains(self, n):
        return n % 2 == 0


class PrimeSigma(SigmaOracle):
    kind = "primes"

    def _contains(self, n):
        if n < 2:
            return False
        if n % 2 == 0:
            return n == 2
        for d in range(3, math.isqrt(n) + 1, 2):
            if n % d == 0:
                return False
        return True


class ListSigma(SigmaOracle):
    kind = "list"

    def __init__(self, values):
        vals = sorted(set(int(v) for v in values))
        if vals and vals[0] < 1:
            raise ValueError("flip sets live in the positive integers")
        self.values = tuple(vals)
        self._set = frozenset(vals)

    def _contains(self, n):
        return n in self._set

    def spec(self):
        return "list:" + ",".join(map(str, self.values))


class FileSigma(ListSigma):
    kind = "file"

    def __init__(self, path):
        self.path = str(path)
        text = Path(path).read_text(encoding="utf-8")
        super().__init__(int(tok) for tok in text.replace(",", " ").split())

    def spec(self):
        return "file:" + self.path


def parse_sigma(text: Optional[str]) -> SigmaOracle:
    """``none | all | evens | primes | list:1,2,3 | file:PATH``."""
    if text is None or text in ("", "none", "empty"):
        return EmptySigma()
    if text == "all":
        return AllSigma()
    if text == "evens":
        return EvenSigma()
    if text == "primes":
        return PrimeSigma()
    if text.startswith("list:"):
        body = text[5:].strip()
        return ListSigma(int(x) for x in body.split(",") if x.strip())
    if text.startswith("file:"):
        return FileSigma(text[5:])
    raise ValueError(f"unknown flip-set spec {text!r}")


# --------------------------------------------------------------------------
# generator actions

def _perm(p) -> tuple:
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"not a permutation: {p}")
    return p


def perm_inverse(p: tuple) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def perm_compose(first: tuple, then: tuple) -> tuple:
    """The permutation ``x -> then[first[x]]``."""
    return tuple(then[i] for i in first)


@dataclass(frozen=True)
class Shift:
    """Move the head of ``tape`` by ``direction`` (+1 is shift forward)."""

    tape: int
    direction: int = 1

    def inverse(self):
        return Shift(self.tape, -self.direction)

    def label(self):
        return f"t{self.tape}{'+' if self.direction > 0 else '-'}" + (str(abs(self.direction)) if abs(self.direction) != 1 else "")


@dataclass(frozen=True)
class LocalAutomorphism:
    """Apply ``perm`` to the symbol under the head of ``tape``."""

    tape: int
    perm: tuple

    def __post_init__(self):
        object.__setattr__(self, "perm", _perm(self.perm))

    def inverse(self):
        return LocalAutomorphism(self.tape, perm_inverse(self.perm))

    def label(self):
        return f"loc{self.tape}{self.perm}"


@dataclass(frozen=True)
class OracleFlip:
    """Apply ``perm`` at every head-relative coordinate ``j`` with ``j`` in the flip set."""

    tape: int
    perm: tuple
    oracle: SigmaOracle

    def __post_init__(self):
        object.__setattr__(self, "perm", _perm(self.perm))

    def inverse(self):
        return OracleFlip(self.tape, perm_inverse(self.perm), self.oracle)

    def label(self):
        return f"B{self.tape}"


@dataclass(frozen=True)
class FactorMove:
    """Exchange the values ``source`` and ``target`` of a finite factor.

    On points whose factor equals ``source`` this sets it to ``target``; as a
    whole-space map it is the transposition, hence measure preserving.
    """

    factor: int
    source: int
    target: int

    def inverse(self):
        return FactorMove(self.factor, self.target, self.source)

    def perm(self, n: int) -> tuple:
        p = list(range(n))
        p[self.source], p[self.target] = self.target, self.source
        return tuple(p)

    def label(self):
        return f"f{self.factor}:{self.source}>{self.target}"


GeneratorAction = Union[Shift, LocalAutomorphism, OracleFlip, FactorMove]


def invert_word(word: Sequence) -> tuple:
    return tuple(a.inverse() for a in reversed(word))


def word_label(word: Sequence) -> str:
    return "·".join(a.label() for a in word) if word else "e"


# --------------------------------------------------------------------------
# symbolic configurations

@dataclass(frozen=True)
class CellEvent:
    """A symbol rewrite recorded on a configuration.

    ``oracle is None``: ``perm`` applied at absolute cell ``pos``.
    Otherwise: ``perm`` applied at every cell ``pos + j`` with ``j`` in the
    oracle's set (``pos`` is the head at the time of the flip).
    """

    tape: int
    pos: int
    perm: tuple
    oracle: Optional[SigmaOracle] = None

    def hits(self, tape: int, cell: int) -> bool:
        if tape != self.tape:
            return False
        if self.oracle is None:
            return cell == self.pos
        return (cell - self.pos) in self.oracle

    def inverse(self):
        return CellEvent(self.tape, self.pos, perm_inverse(self.perm), self.oracle)


def _push_event(events: tuple, ev: CellEvent) -> tuple:
    if ev.perm == tuple(range(len(ev.perm))):
        return events
    if events and events[-1] == ev.inverse():
        return events[:-1]
    return events + (ev,)


class SymbolicConfig:
    """A cylinder of starting points pushed through a word of generators.

    ``origin`` constrains the starting points (absolute coordinates, heads
    at 0 at the start).  ``heads`` are the current head positions,
    ``fperm`` the accumulated factor permutations and ``events`` the
    symbol rewrites.  The current view of a cell is the origin constraint
    pushed through the events that hit it.
    """

    __slots__ = ("space", "origin", "heads", "fperm", "events", "step_count", "_cache")

    def __init__(self, origin: Cylinder, heads=None, fperm=None, events=(), step_count: int = 0):
        self.space = origin.space
        self.origin = origin
        self.heads = tuple(heads) if heads is not None else (0,) * self.space.n_tapes
        if fperm is None:
            fperm = tuple(tuple(range(n)) for n in map(len, self.space.factors))
        self.fperm = tuple(fperm)
        self.events = tuple(events)
        self.step_count = step_count
        self._cache = {}

    @classmethod
    def start(cls, cylinder: Cylinder) -> "SymbolicConfig":
        return cls(cylinder)

    def _replace(self, **kw) -> "SymbolicConfig":
        args = dict(origin=self.origin, heads=self.heads, fperm=self.fperm,
                    events=self.events, step_count=self.step_count)
        args.update(kw)
        return SymbolicConfig(**args)

    # identity: two configs with the same origin, heads, factor maps and
    # reduced event history are the same map applied to the same set
    def key(self):
        return (self.origin.key(), self.heads, self.fperm, self.events)

    def map_key(self):
        return (self.heads, self.fperm, self.events)

    def __eq__(self, other):
        return isinstance(other, SymbolicConfig) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"SymbolicConfig(heads={self.heads}, {self.cylinder().text()}, step={self.step_count})"

    # views
    def cell_perm(self, tape: int, cell: int) -> tuple:
        """Permutation taking origin symbols of ``cell`` to current symbols."""
        k = ("p", tape, cell)
        got = self._cache.get(k)
        if got is None:
            got = tuple(range(self.space.tape_size(tape)))
            for ev in self.events:
                if ev.hits(tape, cell):
                    got = perm_compose(got, ev.perm)
            self._cache[k] = got
        return got

    def symbols_at(self, tape: int, cell: int) -> frozenset:
        """Current admissible symbols at absolute ``cell``."""
        base = self.origin.cells[tape].get(cell)
        if base is None:
            return self.space.full_tape(tape)
        if not self.events:
            return base
        p = self.cell_perm(tape, cell)
        return frozenset(p[s] for s in base)

    def head_symbols(self, tape: int) -> frozenset:
        return self.symbols_at(tape, self.heads[tape])

    def factor_values(self, i: int) -> frozenset:
        base = self.origin.get_factor(i)
        p = self.fperm[i]
        return frozenset(p[v] for v in base)

    def factor_value(self, i: int) -> Optional[int]:
        v = self.factor_values(i)
        return next(iter(v)) if len(v) == 1 else None

    def cylinder(self) -> Cylinder:
        """Current point set, keyed relative to the heads."""
        cells = []
        for t, d in enumerate(self.origin.cells):
            h = self.heads[t]
            cells.append({c - h: self.symbols_at(t, c) for c in d})
        return Cylinder(self.space, cells, [self.factor_values(i) for i in range(len(self.space.factors))])

    def view_key(self):
        return (self.heads, self.cylinder().key())

    # refinement
    def split(self, sp: Split) -> list:
        """Children whose current view of the split cell is each part."""
        out = []
        if sp.kind == "tape":
            have = self.symbols_at(sp.index, sp.cell)
            pinv = perm_inverse(self.cell_perm(sp.index, sp.cell)) if self.events else None
            for part in sp.parts:
                part = frozenset(part) & have
                if not part:
                    continue
                seed = part if pinv is None else frozenset(pinv[s] for s in part)
                out.append(self._replace(origin=self.origin.with_cell(sp.index, sp.cell, seed)))
        else:
            have = self.factor_values(sp.index)
            pinv = perm_inverse(self.fperm[sp.index])
            for part in sp.parts:
                part = frozenset(part) & have
                if not part:
                    continue
                out.append(self._replace(origin=self.origin.with_factor(sp.index, frozenset(pinv[v] for v in part))))
        return out

    def restrict(self, cells: dict, factors: Optional[dict] = None) -> "SymbolicConfig":
        """Sub-configuration whose current view of the given cells lies in the given sets.

        ``cells`` maps ``(tape, absolute cell)`` to admissible current symbols;
        ``factors`` maps factor index to admissible current values.
        """
        origin = self.origin
        for (t, c), want in cells.items():
            have = self.symbols_at(t, c)
            part = have & want
            if not part:
                raise ValueError("empty restriction")
            if part == have:
                continue
            if self.events:
                pinv = perm_inverse(self.cell_perm(t, c))
                part = frozenset(pinv[x] for x in part)
            origin = origin.with_cell(t, c, part)
        for i, want in (factors or {}).items():
            have = self.factor_values(i)
            part = have & want
            if not part:
                raise ValueError("empty restriction")
            if part != have:
                pinv = perm_inverse(self.fperm[i])
                origin = origin.with_factor(i, frozenset(pinv[v] for v in part))
        return self if origin is self.origin else self._replace(origin=origin)

    def measure(self) -> Fraction:
        return measure(self.origin)


def membership(cfg: SymbolicConfig, rel: Cylinder):
    """Decide whether the current point set of ``cfg`` lies in ``rel``.

    ``rel`` is a point-set cylinder (head-relative).  Returns True/False, or
    raises :class:`NeedsRefinement` with the split that would decide it.
    """
    undecided = None
    for t, d in enumerate(rel.cells):
        h = cfg.heads[t]
        for off, want in d.items():
            have = cfg.symbols_at(t, h + off)
            if have <= want:
                continue
            if not (have & want):
                return False
            if undecided is None:
                undecided = Split("tape", t, h + off, (have & want, have - want))
    for i, want in enumerate(rel.factors):
        if want is None:
            continue
        have = cfg.factor_values(i)
        if have <= want:
            continue
        if not (have & want):
            return False
        if undecided is None:
            undecided = Split("factor", i, None, (have & want, have - want))
    if undecided is not None:
        raise NeedsRefinement([undecided])
    return True


def apply_action(cfg: SymbolicConfig, a, window: Optional[int] = None) -> SymbolicConfig:
    """Apply one generator.  Raises NeedsRefinement (factor moves) / WindowExceeded."""
    if isinstance(a, Shift):
        heads = list(cfg.heads)
        heads[a.tape] += a.direction
        if window is not None and abs(heads[a.tape]) > window:
            raise WindowExceeded(f"head of tape {a.tape} left the window {window}")
        return cfg._replace(heads=tuple(heads))
    if isinstance(a, LocalAutomorphism):
        h = cfg.heads[a.tape]
        return cfg._replace(events=_push_event(cfg.events, CellEvent(a.tape, h, a.perm)))
    if isinstance(a, OracleFlip):
        h = cfg.heads[a.tape]
        return cfg._replace(events=_push_event(cfg.events, CellEvent(a.tape, h, a.perm, a.oracle)))
    if isinstance(a, FactorMove):
        vals = cfg.factor_values(a.factor)
        n = cfg.space.factor_size(a.factor)
        if len(vals) != 1:
            raise NeedsRefinement([Split("factor", a.factor, None, tuple(frozenset([v]) for v in sorted(vals)))])
        fperm = list(cfg.fperm)
        fperm[a.factor] = perm_compose(fperm[a.factor], a.perm(n))
        return cfg._replace(fperm=tuple(fperm))
    raise TypeError(f"unknown action {a!r}")


def apply_word(cfg: SymbolicConfig, word: Sequence, window: Optional[int] = None) -> SymbolicConfig:
    for a in word:
        cfg = apply_action(cfg, a, window)
    return cfg


def image_cylinder(rel: Cylinder, word: Sequence) -> Cylinder:
    """Image of a point-set cylinder under a word (word must be determined on it)."""
    return apply_word(SymbolicConfig.start(rel), word).cylinder()

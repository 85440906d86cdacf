"""Turing dynamical systems: block partitions, symbolic stepping, fundamental sets.

A system lives on a space of tapes plus one finite ``state`` factor.  Each
block is a product of symbol sets (one per tape, read at the head) with a
single state; the program assigns to every block a word of generators and
a next state.  Blocks in A or R must have the empty word and keep the state.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .exactnum import Interval
from .space import (Alphabet, Cylinder, FactorMove, LocalAutomorphism, NeedsRefinement,
                    OracleFlip, Shift, SigmaOracle, SpaceDescriptor, SymbolicConfig,
                    WindowExceeded, apply_word, image_cylinder, measure, membership,
                    parse_sigma, union_measure)

CLASSES = ("I", "A", "R", "work")


class InvalidSystem(ValueError):
    pass


class RestartDetected(Exception):
    pass


@dataclass
class Block:
    symbols: tuple          # per tape: frozenset of symbol indices
    state: int
    word: tuple = ()
    next: Optional[int] = None
    kind: str = "work"      # I / A / R / work
    name: str = ""

    def __post_init__(self):
        self.symbols = tuple(frozenset(s) for s in self.symbols)
        self.word = tuple(self.word)
        if self.next is None:
            self.next = self.state
        if self.kind not in CLASSES:
            raise InvalidSystem(f"unknown block class {self.kind!r}")

    @property
    def halting(self) -> bool:
        return self.kind in ("A", "R")

    def full_word(self) -> tuple:
        """Generators applied, with the state change appended."""
        if self.next == self.state:
            return self.word
        return self.word + (FactorMove(0, self.state, self.next),)

    def cylinder(self, space: SpaceDescriptor) -> Cylinder:
        return Cylinder(space, [{0: s} for s in self.symbols], [frozenset([self.state])])

    def size(self) -> int:
        n = 1
        for s in self.symbols:
            n *= len(s)
        return n


@dataclass
class Verdict:
    passed: bool
    message: str = ""
    witness: object = None

    def __bool__(self):
        return self.passed


class TuringSystem:
    def __init__(self, space: SpaceDescriptor, blocks: Sequence[Block], name: str = "",
                 state_names: Optional[Sequence[str]] = None, sigma: Optional[SigmaOracle] = None):
        if len(space.factors) != 1:
            raise InvalidSystem("a system needs exactly one finite factor (the state)")
        self.space = space
        self.blocks = list(blocks)
        self.name = name
        self.state_names = tuple(state_names or space.factors[0])
        self.sigma = sigma
        self._cyl = [b.cylinder(space) for b in self.blocks]
        self._by_state: dict = {}
        for i, b in enumerate(self.blocks):
            self._by_state.setdefault(b.state, []).append(i)
        self.validate()
        self._table = {}
        for i, b in enumerate(self.blocks):
            for tup in itertools.product(*(sorted(x) for x in b.symbols)):
                self._table[(b.state,) + tup] = i

    # structure
    def validate(self):
        sp = self.space
        nstates = sp.factor_size(0)
        seen = {}
        for i, b in enumerate(self.blocks):
            if len(b.symbols) != sp.n_tapes:
                raise InvalidSystem(f"block {i}: expected {sp.n_tapes} symbol sets")
            if not 0 <= b.state < nstates or not 0 <= b.next < nstates:
                raise InvalidSystem(f"block {i}: state out of range")
            for t, s in enumerate(b.symbols):
                if not s or max(s) >= sp.tape_size(t) or min(s) < 0:
                    raise InvalidSystem(f"block {i}: bad symbol set on tape {t}")
            if b.halting and (b.word or b.next != b.state):
                raise InvalidSystem(f"block {i}: halting blocks must act trivially")
            for tup in itertools.product(*(sorted(s) for s in b.symbols)):
                k = (tup, b.state)
                if k in seen:
                    raise InvalidSystem(f"blocks {seen[k]} and {i} overlap at {k}")
                seen[k] = i
        total = nstates
        for t in range(sp.n_tapes):
            total *= sp.tape_size(t)
        if len(seen) != total:
            for st in range(nstates):
                for tup in itertools.product(*(range(sp.tape_size(t)) for t in range(sp.n_tapes))):
                    if (tup, st) not in seen:
                        raise InvalidSystem(f"no block covers symbols {tup} in state {st}")

    def block_cylinder(self, i: int) -> Cylinder:
        return self._cyl[i]

    def blocks_of(self, kind: str) -> list:
        return [i for i, b in enumerate(self.blocks) if b.kind == kind]

    def set_cylinders(self, kind: str) -> list:
        return [self._cyl[i] for i in self.blocks_of(kind)]

    def measure_of(self, kind: str) -> Fraction:
        return sum((measure(c) for c in self.set_cylinders(kind)), Fraction(0))

    def state_index(self, name: str) -> int:
        return self.state_names.index(name)

    def expand(self) -> "TuringSystem":
        """Same system with every symbol class split into single-symbol blocks."""
        out = []
        for b in self.blocks:
            for tup in itertools.product(*(sorted(s) for s in b.symbols)):
                out.append(Block(tuple(frozenset([x]) for x in tup), b.state, b.word, b.next, b.kind, b.name))
        return TuringSystem(self.space, out, self.name, self.state_names, self.sigma)


# --------------------------------------------------------------------------
# stepping

@dataclass
class Halted:
    kind: str
    block: int
    cfg: SymbolicConfig


@dataclass
class Moved:
    cfg: SymbolicConfig
    block: int


@dataclass
class Branched:
    children: list


def classify(cfg: SymbolicConfig, sys: TuringSystem) -> int:
    """Index of the unique block containing the config's current view.

    Raises NeedsRefinement when the head symbols or state straddle blocks.
    """
    state_vals = cfg.factor_values(0)
    if len(state_vals) == 1:
        key = [next(iter(state_vals))]
        for t, h in enumerate(cfg.heads):
            got = cfg.symbols_at(t, h)
            if len(got) != 1:
                break
            key.append(next(iter(got)))
        else:
            return sys._table[tuple(key)]
    pending = None
    cands = (sys._by_state.get(next(iter(state_vals)), []) if len(state_vals) == 1
             else range(len(sys.blocks)))
    for i in cands:
        try:
            if membership(cfg, sys._cyl[i]):
                return i
        except NeedsRefinement as nr:
            if pending is None:
                pending = nr
    if pending is None:
        raise InvalidSystem("configuration matches no block")
    raise pending


def branch(cfg: SymbolicConfig, sys: TuringSystem) -> list:
    """Pieces ``(child, block index)`` of ``cfg``, one per block it meets."""
    states = cfg.factor_values(0)
    heads = [cfg.symbols_at(t, h) for t, h in enumerate(cfg.heads)]
    out = []
    for st in sorted(states):
        for i in sys._by_state.get(st, ()):
            b = sys.blocks[i]
            parts = [h & s for h, s in zip(heads, b.symbols)]
            if not all(parts):
                continue
            cells = {(t, cfg.heads[t]): p for t, p in enumerate(parts)}
            out.append((cfg.restrict(cells, {0: frozenset([st])}), i))
    return out


def refine_to_blocks(cfg: SymbolicConfig, sys: TuringSystem) -> list:
    """Split ``cfg`` until every piece lies in a single block."""
    return [c for c, _ in branch(cfg, sys)]


def step(cfg: SymbolicConfig, sys: TuringSystem, window: Optional[int] = None):
    try:
        i = classify(cfg, sys)
    except NeedsRefinement:
        return Branched(refine_to_blocks(cfg, sys))
    b = sys.blocks[i]
    if b.halting:
        return Halted(b.kind, i, cfg)
    nxt = apply_word(cfg, b.full_word(), window)
    nxt.step_count = cfg.step_count + 1
    return Moved(nxt, i)


# --------------------------------------------------------------------------
# exploration

@dataclass
class AcceptedChain:
    initial: Cylinder
    chain: list             # SymbolicConfig per step, first is the initial config
    final: Cylinder

    @property
    def steps(self) -> int:
        return len(self.chain) - 1


@dataclass
class ExplorationResult:
    accepted: list
    accepted_mass: Fraction
    rejected_mass: Fraction
    unresolved: list
    unresolved_mass: Fraction
    depth: int
    start_mass: Fraction
    rejected: list = field(default_factory=list)

    def ledger_ok(self) -> bool:
        return self.accepted_mass + self.rejected_mass + self.unresolved_mass == self.start_mass


def _unlink(h) -> list:
    out = []
    while h is not None:
        out.append(h[0])
        h = h[1]
    return out[::-1]


def _lookup(cfg: SymbolicConfig, sys: TuringSystem) -> Optional[int]:
    """Block index when state and head symbols are all pinned, else None."""
    sv = cfg.factor_values(0)
    if len(sv) != 1:
        return None
    key = [next(iter(sv))]
    for t, h in enumerate(cfg.heads):
        got = cfg.symbols_at(t, h)
        if len(got) != 1:
            return None
        key.append(next(iter(got)))
    return sys._table[tuple(key)]


def _rebuild(origin: Cylinder, states: list) -> list:
    return [SymbolicConfig(origin, h, f, ev, n) for n, (h, f, ev) in enumerate(states)]


def explore(sys: TuringSystem, start: Sequence[Cylinder], depth: int, mass_floor=0,
            window: Optional[int] = None, keep_rejected: bool = False) -> ExplorationResult:
    """Breadth-first symbolic execution of the start cylinders for ``depth`` steps.

    Start cylinders must be pairwise disjoint.  Every piece ends up accepted,
    rejected or unresolved (depth, window or mass floor), so the masses add
    up exactly to the start mass.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    mass_floor = Fraction(mass_floor)
    start = list(start)
    start_mass = sum((measure(c) for c in start), Fraction(0))
    accepted, rejected, unresolved = [], [], []
    acc_m = rej_m = unr_m = Fraction(0)
    # a live item is (config, history); histories are linked (map state, parent) pairs
    live = deque((SymbolicConfig(c), None, None) for c in start)
    for level in range(depth + 1):
        nxt = deque()
        while live:
            cfg, hist, i = live.popleft()
            if i is None:
                i = _lookup(cfg, sys)
            if i is None:
                for ch, j in branch(cfg, sys):
                    if mass_floor and measure(ch.origin) < mass_floor:
                        unresolved.append(ch)
                        unr_m += measure(ch.origin)
                    else:
                        live.append((ch, hist, j))
                continue
            b = sys.blocks[i]
            hist2 = (cfg.map_key(), hist)
            if b.halting:
                m = measure(cfg.origin)
                if b.kind == "A":
                    acc_m += m
                    accepted.append(AcceptedChain(cfg.origin, _rebuild(cfg.origin, _unlink(hist2)), cfg.cylinder()))
                else:
                    rej_m += m
                    if keep_rejected:
                        rejected.append(cfg)
                continue
            if level == depth:
                unresolved.append(cfg)
                unr_m += measure(cfg.origin)
                continue
            try:
                moved = apply_word(cfg, b.full_word(), window)
            except (WindowExceeded, NeedsRefinement):
                unresolved.append(cfg)
                unr_m += measure(cfg.origin)
                continue
            moved.step_count = cfg.step_count + 1
            nxt.append((moved, hist2, None))
        live = nxt
    return ExplorationResult(accepted, acc_m, rej_m, unresolved, unr_m, depth, start_mass, rejected)


def omega1_bounds(sys: TuringSystem, depth: int, mass_floor=0, window=None,
                  result: Optional[ExplorationResult] = None) -> Interval:
    """Enclosure of the first fundamental value: [accepted, accepted + unresolved]."""
    v = check_no_restart(sys)
    if not v:
        raise RestartDetected(v.message)
    if result is None:
        result = explore(sys, sys.set_cylinders("I"), depth, mass_floor, window)
    return Interval(result.accepted_mass, result.accepted_mass + result.unresolved_mass)


def check_no_restart(sys: TuringSystem) -> Verdict:
    """Exact test of T(X) ∩ I = ∅ over the finitely many block images."""
    initial = sys.set_cylinders("I")
    for i, b in enumerate(sys.blocks):
        img = sys.block_cylinder(i) if b.halting else image_cylinder(sys.block_cylinder(i), b.full_word())
        for c in initial:
            w = img.intersect(c)
            if w is not None:
                return Verdict(False, f"block {i} ({b.name or b.kind}) maps into I", w)
    return Verdict(True, "no block image meets I")


def check_disjoint_chains(result: ExplorationResult) -> Verdict:
    finals = [a.final for a in result.accepted]
    for i in range(len(finals)):
        for j in range(i):
            if not finals[i].disjoint(finals[j]):
                return Verdict(False, f"accepted chains {j} and {i} end in overlapping sets", (j, i))
    return Verdict(True, f"{len(finals)} accepted chains pairwise disjoint")


def stopping_mass(sys: TuringSystem, depth: int, mass_floor=0, window=None) -> Fraction:
    """Mass of the whole space still running after ``depth`` steps."""
    return explore(sys, [sys.space.whole()], depth, mass_floor, window).unresolved_mass


def _cover(pieces: list, cover: Sequence[Cylinder]) -> list:
    """Parts of ``pieces`` not covered by the union of ``cover``."""
    for c in cover:
        pieces = [q for p in pieces for q in p.difference(c)]
        if not pieces:
            break
    return pieces


def validate_fundamental_set(sys: TuringSystem, expected: Sequence[Cylinder], depth: int,
                             mass_floor=0, window=None,
                             result: Optional[ExplorationResult] = None) -> Verdict:
    """Exact set equality of accepted initial cylinders (within ``depth``) and ``expected``."""
    if result is None:
        result = explore(sys, sys.set_cylinders("I"), depth, mass_floor, window)
    got = [a.initial for a in result.accepted]
    for e in expected:
        miss = _cover([e], got)
        if miss:
            return Verdict(False, "expected cylinder not accepted", miss[0])
    for g in got:
        extra = _cover([g], expected)
        if extra:
            return Verdict(False, "accepted cylinder outside the expected family", extra[0])
    m_exp = union_measure(expected)
    if m_exp != result.accepted_mass:
        return Verdict(False, f"mass mismatch {result.accepted_mass} vs {m_exp}")
    return Verdict(True, f"{len(got)} accepted cylinders match, mass {m_exp}")


def measure_contraction(sys: TuringSystem, cylinders: Sequence[Cylinder]) -> tuple:
    """``(mu(T(U)), mu(U))`` for a union ``U`` of cylinders (refined to blocks)."""
    pieces = []
    for c in cylinders:
        pieces.extend(refine_to_blocks(SymbolicConfig(c), sys))
    images = []
    for p in pieces:
        b = sys.blocks[classify(p, sys)]
        images.append(p.cylinder() if b.halting else apply_word(p, b.full_word()).cylinder())
    return union_measure(images), union_measure(cylinders)


# --------------------------------------------------------------------------
# builtin systems

X_STATES = ("Start", "SearchFwd1", "SearchBack", "SearchFwdEither",
            "Dummy1", "Dummy2", "Dummy3", "Dummy4")
Y_STATES = ("Start", "Check", "SearchBack1", "SearchFwd13",
            "Dummy1", "Dummy2", "Dummy3", "Dummy4")

M_SYMBOLS = tuple(f"{a}{b}{c}" for a in (0, 1) for b in (0, 1) for c in (0, 1))


def m_index(a: int, b: int, c: int) -> int:
    return 4 * a + 2 * b + c


BETA = tuple(m_index(a, c, b) for a in (0, 1) for b in (0, 1) for c in (0, 1))  # swap the last two bits
M_BETA = frozenset(i for i in range(8) if BETA[i] == i)
E010 = m_index(0, 1, 0)


def _fill_rest(space: SpaceDescriptor, blocks: list, n_states: int) -> list:
    """Add R blocks covering everything not yet covered, grouped per state."""
    out = list(blocks)
    sizes = [space.tape_size(t) for t in range(space.n_tapes)]
    for st in range(n_states):
        used = set()
        for b in blocks:
            if b.state == st:
                used.update(itertools.product(*(sorted(s) for s in b.symbols)))
        rest = [tup for tup in itertools.product(*(range(n) for n in sizes)) if tup not in used]
        for group in _greedy_products(rest):
            out.append(Block(group, st, (), st, "R", "reject"))
    return out


def _greedy_products(tuples: list) -> list:
    """Cover a set of symbol tuples by disjoint product sets (greedy merging)."""
    remaining = set(tuples)
    groups = []
    for tup in sorted(tuples):
        if tup not in remaining:
            continue
        sets = [frozenset([x]) for x in tup]
        for t in range(len(tup)):
            for x in sorted({u[t] for u in remaining}):
                trial = sets[:t] + [sets[t] | {x}] + sets[t + 1:]
                if all(p in remaining for p in itertools.product(*(sorted(s) for s in trial))):
                    sets = trial
        prod = set(itertools.product(*(sorted(s) for s in sets)))
        remaining -= prod
        groups.append(tuple(sets))
    return groups


def build_system_x(oracle: SigmaOracle, per_symbol: bool = False) -> TuringSystem:
    """One tape over M = (Z/2)^3 and eight states; accepts 1 m_1..m_{k-1} 1 patterns for k in the oracle set."""
    space = SpaceDescriptor((Alphabet(M_SYMBOLS),), (X_STATES,), ("state",))
    S = {n: i for i, n in enumerate(X_STATES)}
    fwd, back = Shift(0, 1), Shift(0, -1)
    normal = LocalAutomorphism(0, BETA)
    flip = OracleFlip(0, BETA, oracle)
    b010 = frozenset([E010])
    blocks = [
        Block((b010,), S["Start"], (fwd,), S["SearchFwd1"], "I", "start"),
        Block((M_BETA,), S["SearchFwd1"], (fwd,), S["SearchFwd1"], "work", "scan forward"),
        Block((b010,), S["SearchFwd1"], (normal, back), S["SearchBack"], "work", "mark and turn"),
        Block((M_BETA,), S["SearchBack"], (back,), S["SearchBack"], "work", "scan backward"),
        Block((b010,), S["SearchBack"], (flip, fwd), S["SearchFwdEither"], "work", "oracle flip"),
        Block((M_BETA,), S["SearchFwdEither"], (fwd,), S["SearchFwdEither"], "work", "scan forward"),
        Block((b010,), S["SearchFwdEither"], (), S["SearchFwdEither"], "A", "accept"),
    ]
    sys = TuringSystem(space, _fill_rest(space, blocks, 8), "X", X_STATES, oracle)
    return sys.expand() if per_symbol else sys


def build_system_y(per_symbol: bool = False) -> TuringSystem:
    """Three binary tapes; accepts 1 0^k 1 / 1 0^k 1 / 1 0^(k^2+2k) 1 in state Start."""
    space = SpaceDescriptor(tuple(Alphabet(("0", "1")) for _ in range(3)), (Y_STATES,), ("state",))
    S = {n: i for i, n in enumerate(Y_STATES)}
    t1p, t1m, t2p, t2m, t3p = Shift(0, 1), Shift(0, -1), Shift(1, 1), Shift(1, -1), Shift(2, 1)

    def v(a, b, c):
        return (frozenset([a]), frozenset([b]), frozenset([c]))

    def v2(a, bs, c):
        return (frozenset([a]), frozenset(bs), frozenset([c]))

    blocks = [
        Block(v(1, 1, 1), S["Start"], (t1p, t2p), S["Check"], "I", "start"),
        Block(v(0, 0, 1), S["Check"], (t1p, t2p), S["Check"], "work", "compare zeros"),
        Block(v(1, 1, 1), S["Check"], (t1m, t2m, t3p), S["SearchBack1"], "work", "counts agree"),
        Block(v(0, 0, 0), S["SearchBack1"], (t1m,), S["SearchBack1"], "work", "sweep back"),
        Block(v(1, 0, 0), S["SearchBack1"], (t1p, t2m, t3p), S["SearchFwd13"], "work", "turn and count"),
        Block(v(0, 1, 1), S["SearchBack1"], (), S["SearchBack1"], "A", "accept"),
        Block(v2(0, (0, 1), 0), S["SearchFwd13"], (t1p, t3p), S["SearchFwd13"], "work", "sweep forward"),
        Block(v2(1, (0, 1), 0), S["SearchFwd13"], (t1m, t3p), S["SearchBack1"], "work", "turn back"),
    ]
    sys = TuringSystem(space, _fill_rest(space, blocks, 8), "Y", Y_STATES, None)
    return sys.expand() if per_symbol else sys


def x_fundamental_family(k: int) -> Cylinder:
    """[(0,1,0) m_1 .. m_{k-1} (0,1,0)][Start] with m_i ranging over M^beta."""
    space = SpaceDescriptor((Alphabet(M_SYMBOLS),), (X_STATES,), ("state",))
    cells = {0: {E010}, k: {E010}}
    for i in range(1, k):
        cells[i] = M_BETA
    return Cylinder(space, [cells], [0])


def y_fundamental_family(k: int) -> Cylinder:
    space = SpaceDescriptor(tuple(Alphabet(("0", "1")) for _ in range(3)), (Y_STATES,), ("state",))

    def tape(n):
        d = {0: 1, n + 1: 1}
        d.update({i: 0 for i in range(1, n + 1)})
        return d

    return Cylinder(space, [tape(k), tape(k), tape(k * k + 2 * k)], [0])


def x_chain_steps(k: int) -> int:
    return 3 * k


def y_chain_steps(k: int) -> int:
    return 2 * k * k + 3 * k + 2


def omega_x_exact(sigma_members: Sequence[int]) -> Fraction:
    """``(2/8^3) * sum 2^-i`` over the given flip-set members."""
    return Fraction(2, 512) * sum((Fraction(1, 2 ** i) for i in sigma_members), Fraction(0))


def omega_y_partial(k_max: int) -> Fraction:
    return Fraction(1, 8) * sum((Fraction(1, 2 ** (k * k + 4 * k + 6)) for k in range(1, k_max + 1)), Fraction(0))


# --------------------------------------------------------------------------
# JSON configuration

_TOP_KEYS = {"name", "tapes", "states", "blocks", "sigma"}
_BLOCK_KEYS = {"symbols", "state", "word", "next", "class", "name"}


def _parse_perm(text: str, n: int) -> tuple:
    p = tuple(int(x) for x in text.split(","))
    if len(p) != n:
        raise InvalidSystem(f"permutation {text!r} has wrong length")
    return p


def parse_action(tok: str, space: SpaceDescriptor, oracle: Optional[SigmaOracle]):
    """``shift:T:+1``, ``local:T:p0,p1,..``, ``oracle:T:p0,p1,..``."""
    parts = tok.split(":")
    try:
        kind, tape = parts[0], int(parts[1])
    except (IndexError, ValueError):
        raise InvalidSystem(f"bad action {tok!r}") from None
    if not 0 <= tape < space.n_tapes:
        raise InvalidSystem(f"action {tok!r}: no tape {tape}")
    if kind == "shift" and len(parts) == 3:
        return Shift(tape, int(parts[2]))
    if kind == "local" and len(parts) == 3:
        return LocalAutomorphism(tape, _parse_perm(parts[2], space.tape_size(tape)))
    if kind == "oracle" and len(parts) == 3:
        if oracle is None:
            raise InvalidSystem("oracle flip used but no sigma given")
        return OracleFlip(tape, _parse_perm(parts[2], space.tape_size(tape)), oracle)
    raise InvalidSystem(f"bad action {tok!r}")


def action_token(a) -> str:
    if isinstance(a, Shift):
        return f"shift:{a.tape}:{a.direction:+d}"
    if isinstance(a, LocalAutomorphism):
        return f"local:{a.tape}:" + ",".join(map(str, a.perm))
    if isinstance(a, OracleFlip):
        return f"oracle:{a.tape}:" + ",".join(map(str, a.perm))
    raise TypeError(a)


def system_from_dict(d: dict, sigma: Optional[SigmaOracle] = None) -> TuringSystem:
    if not isinstance(d, dict):
        raise InvalidSystem("system config must be a JSON object")
    unknown = set(d) - _TOP_KEYS
    if unknown:
        raise InvalidSystem(f"unknown keys {sorted(unknown)}")
    try:
        tapes = [Alphabet(tuple(str(s) for s in t["symbols"])) for t in d["tapes"]]
        states = tuple(str(s) for s in d["states"])
        raw_blocks = d["blocks"]
    except (KeyError, TypeError) as exc:
        raise InvalidSystem(f"missing or malformed field: {exc}") from None
    if sigma is None and "sigma" in d:
        sg = d["sigma"]
        sigma = parse_sigma(sg if isinstance(sg, str) else _sigma_text(sg))
    space = SpaceDescriptor(tuple(tapes), (states,), ("state",))
    blocks = []
    for i, b in enumerate(raw_blocks):
        unknown = set(b) - _BLOCK_KEYS
        if unknown:
            raise InvalidSystem(f"block {i}: unknown keys {sorted(unknown)}")
        try:
            syms = []
            for t, s in enumerate(b["symbols"]):
                names = [s] if isinstance(s, str) else list(s)
                syms.append(frozenset(tapes[t].index(str(n)) for n in names))
            st = states.index(b["state"])
            nx = states.index(b.get("next", b["state"]))
        except (KeyError, ValueError, IndexError) as exc:
            raise InvalidSystem(f"block {i}: {exc}") from None
        word = tuple(parse_action(tok, space, sigma) for tok in b.get("word", []))
        blocks.append(Block(tuple(syms), st, word, nx, b.get("class", "work"), b.get("name", "")))
    return TuringSystem(space, blocks, str(d.get("name", "")), states, sigma)


def _sigma_text(sg: dict) -> str:
    kind = sg.get("kind", "none")
    if kind == "list":
        return "list:" + ",".join(str(v) for v in sg.get("values", []))
    if kind == "file":
        return "file:" + str(sg["path"])
    return kind


def system_to_dict(sys: TuringSystem) -> dict:
    sp = sys.space
    d = {
        "name": sys.name,
        "tapes": [{"symbols": list(a.symbols)} for a in sp.tapes],
        "states": list(sys.state_names),
        "blocks": [],
    }
    if sys.sigma is not None:
        d["sigma"] = sys.sigma.spec()
    for b in sys.blocks:
        d["blocks"].append({
            "symbols": [[sp.tapes[t].symbols[x] for x in sorted(s)] for t, s in enumerate(b.symbols)],
            "state": sys.state_names[b.state],
            "word": [action_token(a) for a in b.word],
            "next": sys.state_names[b.next],
            "class": b.kind,
            "name": b.name,
        })
    return d


def load_system(source: str, sigma: Optional[SigmaOracle] = None) -> TuringSystem:
    """``builtin:x``, ``builtin:y`` or a path to a JSON config."""
    if source == "builtin:x":
        return build_system_x(sigma if sigma is not None else parse_sigma("none"))
    if source == "builtin:y":
        return build_system_y()
    try:
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSystem(f"cannot read system {source!r}: {exc}") from None
    return system_from_dict(data, sigma)

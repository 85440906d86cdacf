"""Measurable edges, operator expressions and finite Schreier diagrams.

An :class:`Edge` is a group word restricted to a (head-relative) cylinder;
it is a partial bijection of the space.  An :class:`OperatorExpression` is a
finite rational combination of edges; identity-word edges are
multiplication operators by indicator functions.

Orbit classes are found by symbolic closure: starting from a seed cylinder,
every vertex is tested against every edge domain and image.  Whenever a
test is undecided the seed cylinder is split and each half is continued
separately, so each finished branch is a cylinder of points that all share
one labelled diagram.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .linalg import RationalMatrix
from .space import (Cylinder, FactorMove, NeedsRefinement, Shift, SymbolicConfig, apply_word,
                    image_cylinder, invert_word, measure, membership, word_label)


class TooLarge(Exception):
    pass


class StabilizerDetected(Exception):
    pass


class UndecidedVertex(Exception):
    pass


# --------------------------------------------------------------------------
# edges and operator expressions

class Edge:
    """A word of generators restricted to a head-relative cylinder."""

    __slots__ = ("word", "domain", "_image", "name")

    def __init__(self, word: Sequence, domain: Cylinder, name: Optional[str] = None):
        self.word = tuple(word)
        self.domain = domain
        self._image = None
        self.name = name

    @property
    def image(self) -> Cylinder:
        if self._image is None:
            self._image = image_cylinder(self.domain, self.word)
        return self._image

    def inverse(self) -> "Edge":
        return Edge(invert_word(self.word), self.image, None if self.name is None else self.name + "^-1")

    def is_identity_word(self) -> bool:
        return not self.word

    def key(self):
        return (self.word, self.domain.key())

    def __eq__(self, other):
        return isinstance(other, Edge) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def label(self) -> str:
        return self.name or word_label(self.word)

    def __repr__(self):
        return f"Edge({word_label(self.word)} on {self.domain.text() or 'X'})"


def reduce_word(word: Sequence) -> tuple:
    """Merge consecutive shifts of one tape and cancel adjacent inverse pairs."""
    out: list = []
    for a in word:
        if out and isinstance(a, Shift) and isinstance(out[-1], Shift) and out[-1].tape == a.tape:
            d = out[-1].direction + a.direction
            out.pop()
            if d:
                out.append(Shift(a.tape, d))
            continue
        if out and out[-1] == a.inverse() and not isinstance(a, FactorMove):
            out.pop()
            continue
        if isinstance(a, Shift) and a.direction == 0:
            continue
        out.append(a)
    return tuple(out)


def compose_edges(first: Edge, then: Edge) -> Optional[Edge]:
    """Edge doing ``first`` and then ``then``; None if the composite is empty."""
    pulled = image_cylinder(then.domain, invert_word(first.word))
    dom = first.domain.intersect(pulled)
    if dom is None:
        return None
    return Edge(reduce_word(first.word + then.word), dom)


class OperatorExpression:
    """``sum c_i * edge_i``; edge acts by ``zeta_u -> zeta_{word(u)}`` on its domain."""

    def __init__(self, terms: Iterable = ()):
        self.terms = tuple((Fraction(c), e) for c, e in terms if c != 0)

    @classmethod
    def identity(cls, space) -> "OperatorExpression":
        return cls([(1, Edge((), space.whole()))])

    @property
    def norm_bound(self) -> Fraction:
        """Row-sum bound: an upper bound for the operator norm."""
        return sum((abs(c) for c, _ in self.terms), Fraction(0))

    def edges(self) -> list:
        """Distinct non-identity edges used by the terms."""
        seen, out = set(), []
        for _, e in self.terms:
            if e.word and e not in seen:
                seen.add(e)
                out.append(e)
        return out

    def __add__(self, other):
        return OperatorExpression(self.terms + other.terms)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "OperatorExpression":
        return OperatorExpression((c * a, e) for a, e in self.terms)

    def __mul__(self, other):
        """Operator product ``self * other`` (``other`` acts first)."""
        if not isinstance(other, OperatorExpression):
            return self.scale(other)
        out = []
        for b, eb in other.terms:
            for a, ea in self.terms:
                e = compose_edges(eb, ea)
                if e is not None:
                    out.append((a * b, e))
        return OperatorExpression(out).simplify()

    __rmul__ = scale

    def simplify(self) -> "OperatorExpression":
        acc: dict = {}
        order = []
        for c, e in self.terms:
            k = e.key()
            if k not in acc:
                acc[k] = [Fraction(0), e]
                order.append(k)
            acc[k][0] += c
        return OperatorExpression((acc[k][0], acc[k][1]) for k in order)

    def structurally_equal(self, other) -> bool:
        a = sorted((repr(e.key()), c) for c, e in self.simplify().terms)
        b = sorted((repr(e.key()), c) for c, e in other.simplify().terms)
        return a == b

    def __repr__(self):
        return " + ".join(f"{c}*{e!r}" for c, e in self.terms) or "0"


def adjoint(expr: OperatorExpression) -> OperatorExpression:
    """Coefficients conjugated (identity on rationals), edges inverted."""
    return OperatorExpression((c, e.inverse()) for c, e in expr.terms)


# --------------------------------------------------------------------------
# diagrams

@dataclass
class SchreierDiagram:
    origin: Cylinder                  # the class cylinder (points at the root)
    states: list                      # per vertex: (heads, fperm, events)
    root: int
    edges: list                       # (src, dst, edge index)
    tags: list                        # per vertex: frozenset of tag names
    edge_list: list = field(default_factory=list)

    def __len__(self):
        return len(self.states)

    @property
    def n_vertices(self) -> int:
        return len(self.states)

    def config(self, i: int) -> SymbolicConfig:
        h, f, ev = self.states[i]
        return SymbolicConfig(self.origin, h, f, ev)

    @property
    def vertices(self) -> list:
        return [self.config(i) for i in range(len(self.states))]

    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def tagged(self, name: str) -> list:
        return [i for i, t in enumerate(self.tags) if name in t]

    def out_edges(self, i: int) -> list:
        return [(d, k) for s, d, k in self.edges if s == i]

    def rooted_signature(self, root: Optional[int] = None) -> tuple:
        """Labelled-graph signature seen from ``root`` (BFS with sorted labels)."""
        root = self.root if root is None else root
        adj = defaultdict(list)
        for s, d, k in self.edges:
            adj[s].append((0, k, d))
            adj[d].append((1, k, s))
        for v in adj:
            adj[v].sort()
        order = {root: 0}
        queue = [root]
        sig_edges = []
        for v in queue:
            for direction, k, w in adj[v]:
                if w not in order:
                    order[w] = len(order)
                    queue.append(w)
                sig_edges.append((order[v], direction, k, order[w]))
        tags = tuple(tuple(sorted(self.tags[v])) for v in queue)
        return (tags, tuple(sig_edges))

    def canonical_form(self) -> tuple:
        """Root-independent signature: minimum over all choices of root."""
        return min(self.rooted_signature(r) for r in range(len(self.states)))

    def to_dot(self, name: str = "schreier") -> str:
        lines = [f"digraph {name} {{"]
        for i in range(len(self.states)):
            cyl = self.config(i).cylinder().text().replace('"', "'")
            tag = ",".join(sorted(self.tags[i])) or "none"
            shape = "doublecircle" if i == self.root else "circle"
            lines.append(f'  v{i} [shape={shape}, label="{i}\\n{tag}", tooltip="{cyl}"];')
        for s, d, k in self.edges:
            lab = self.edge_list[k].label() if k < len(self.edge_list) else str(k)
            lines.append(f'  v{s} -> v{d} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# closure engine

@dataclass
class _Partial:
    origin: Cylinder
    states: list
    index: dict
    edges: set
    tags: list
    i: int = 0
    j: int = 0

    def copy_with(self, origin: Cylinder) -> "_Partial":
        # the tag set of the vertex in progress is still mutable; children need their own
        tags = [t if isinstance(t, frozenset) else set(t) for t in self.tags]
        return _Partial(origin, list(self.states), dict(self.index), set(self.edges),
                        tags, self.i, self.j)


def _checks(n_edges: int, tag_names: Sequence[str]) -> list:
    return ([("fwd", k) for k in range(n_edges)] + [("bwd", k) for k in range(n_edges)]
            + [("tag", name) for name in tag_names])


def _close(part: _Partial, edges: Sequence[Edge], inv_words: Sequence, tags: dict,
           cap: int, window: Optional[int], mass_floor: Fraction, split_ok: bool):
    """Run the closure; yields ("done", partial) / ("residual", mass) / children via ("split", list)."""
    checks = _checks(len(edges), list(tags))
    while part.i < len(part.states):
        h, f, ev = part.states[part.i]
        cfg = SymbolicConfig(part.origin, h, f, ev)
        if len(part.tags) == part.i:
            part.tags.append(set())
        while part.j < len(checks):
            kind, arg = checks[part.j]
            try:
                if kind == "tag":
                    hit = False
                    for cyl in tags[arg]:
                        if membership(cfg, cyl):
                            hit = True
                            break
                    if hit:
                        part.tags[part.i].add(arg)
                    part.j += 1
                    continue
                e = edges[arg]
                rel = e.domain if kind == "fwd" else e.image
                if membership(cfg, rel):
                    word = e.word if kind == "fwd" else inv_words[arg]
                    nb = apply_word(cfg, word)
                    mk = nb.map_key()
                    w = part.index.get(mk)
                    if w is None:
                        w = len(part.states)
                        part.index[mk] = w
                        part.states.append(mk)
                        if len(part.states) > cap:
                            raise TooLarge(f"orbit exceeds {cap} vertices")
                    part.edges.add((part.i, w, arg) if kind == "fwd" else (w, part.i, arg))
                part.j += 1
            except NeedsRefinement as nr:
                if not split_ok:
                    raise
                sp = nr.splits[0]
                children = cfg.split(sp)
                if sp.kind == "tape" and window is not None:
                    if children and children[0].origin.span(sp.index) > window:
                        return ("residual", measure(part.origin))
                out, lost = [], Fraction(0)
                for ch in children:
                    m = measure(ch.origin)
                    if m < mass_floor:
                        lost += m
                    else:
                        out.append(part.copy_with(ch.origin))
                return ("split", out, lost)
        part.tags[part.i] = frozenset(part.tags[part.i])
        part.i += 1
        part.j = 0
    return ("done", part)


def _finish(part: _Partial, edges) -> SchreierDiagram:
    d = SchreierDiagram(part.origin, part.states, 0, sorted(part.edges), part.tags, list(edges))
    seen = {}
    for i in range(len(d.states)):
        vk = d.config(i).view_key()
        if vk in seen:
            raise StabilizerDetected(
                f"vertices {seen[vk]} and {i} carry the same point set through different words")
        seen[vk] = i
    return d


def _inverse_words(edges):
    return [invert_word(e.word) for e in edges]


def orbit_diagram(seed: SymbolicConfig, edges: Sequence[Edge], cap: int = 10_000,
                  tags: Optional[dict] = None) -> SchreierDiagram:
    """Closure of ``seed`` under ``edges`` and their inverses.

    The seed must already decide every domain test (NeedsRefinement
    otherwise).  Raises TooLarge beyond ``cap`` vertices.
    """
    if seed.map_key() != ((0,) * seed.space.n_tapes, seed.fperm, ()) or seed.events:
        seed = SymbolicConfig(seed.cylinder())
    tags = tags or {}
    part = _Partial(seed.origin, [seed.map_key()], {seed.map_key(): 0}, set(), [])
    res = _close(part, list(edges), _inverse_words(edges), tags, cap, None, Fraction(0), False)
    return _finish(res[1], edges)


@dataclass
class RootedClass:
    cylinder: Cylinder
    diagram: SchreierDiagram
    mass: Fraction          # measure carried by this class in the full space


@dataclass
class ClassEnumeration:
    classes: list           # RootedClass
    residual_mass: Fraction
    stabilizer_mass: Fraction = Fraction(0)


def iter_rooted_classes(edges: Sequence[Edge], window: Optional[int] = None, cap: int = 10_000,
                        tags: Optional[dict] = None, seeds: Optional[Sequence[Cylinder]] = None,
                        fundamental_domain: bool = False, mass_floor=0,
                        residual: Optional[list] = None) -> Iterator[RootedClass]:
    """Depth-first enumeration of rooted orbit classes.

    Every point of every seed cylinder ends up in exactly one yielded class
    or in the residual (accumulated into ``residual[0]``).  With
    ``fundamental_domain`` the seeds must form a set meeting each orbit
    once; the yielded mass is then ``|orbit| * measure(class)``, which is
    the measure of the union of the whole orbit class.
    """
    edges = list(edges)
    if not edges and not seeds:
        raise ValueError("need at least one edge or an explicit seed")
    space = (seeds[0] if seeds else edges[0].domain).space
    tags = dict(tags or {})
    if fundamental_domain:
        tags["__fd__"] = list(seeds)
    inv_words = _inverse_words(edges)
    mass_floor = Fraction(mass_floor)
    if residual is None:
        residual = [Fraction(0)]
    for seed in (seeds or [space.whole()]):
        cfg = SymbolicConfig(seed)
        stack = [_Partial(seed, [cfg.map_key()], {cfg.map_key(): 0}, set(), [])]
        while stack:
            part = stack.pop()
            try:
                res = _close(part, edges, inv_words, tags, cap, window, mass_floor, True)
            except TooLarge:
                residual[0] += measure(part.origin) * (1 if not fundamental_domain else 1)
                continue
            if res[0] == "residual":
                residual[0] += res[1]
                continue
            if res[0] == "split":
                residual[0] += res[2]
                stack.extend(reversed(res[1]))
                continue
            d = _finish(res[1], edges)
            m = measure(d.origin)
            if fundamental_domain:
                hits = len(d.tagged("__fd__"))
                if hits != 1:
                    raise ValueError(f"seed set meets an orbit {hits} times; not a fundamental domain")
                m *= len(d)
            yield RootedClass(d.origin, d, m)


@dataclass
class OrbitClass:
    cylinders: list         # rooted class cylinders aggregated here
    diagram: SchreierDiagram
    mass: Fraction


def enumerate_orbit_classes(edges: Sequence[Edge], window: int, cap: int = 10_000,
                            tags: Optional[dict] = None, seeds=None, fundamental_domain=False,
                            mass_floor=0):
    """Orbit classes aggregated by diagram type, plus residual mass.

    Returns ``(classes, residual_mass)`` where ``classes`` is a list of
    :class:`OrbitClass` and ``sum(mass) + residual_mass`` is the measure of
    the seeds (1 for the default whole-space seed).
    """
    residual = [Fraction(0)]
    groups: dict = {}
    order = []
    for rc in iter_rooted_classes(edges, window, cap, tags, seeds, fundamental_domain,
                                  mass_floor, residual):
        key = rc.diagram.canonical_form()
        g = groups.get(key)
        if g is None:
            g = groups[key] = OrbitClass([], rc.diagram, Fraction(0))
            order.append(key)
        g.cylinders.append(rc.cylinder)
        g.mass += rc.mass
    return [groups[k] for k in order], residual[0]


def convolution_matrix(d: SchreierDiagram, expr: OperatorExpression) -> RationalMatrix:
    """Matrix of ``expr`` on l^2 of the diagram's vertices.

    Column ``u`` holds the image of the basis vector at ``u``: a term
    ``c * edge`` with ``u`` in the edge domain adds ``c`` at row ``word(u)``.
    """
    n = len(d)
    rows = [[0] * n for _ in range(n)]
    index = d.index()
    cfgs = d.vertices
    for c, e in expr.terms:
        for u, cfg in enumerate(cfgs):
            try:
                inside = membership(cfg, e.domain)
            except NeedsRefinement as nr:
                raise UndecidedVertex(f"vertex {u}: {nr}") from None
            if not inside:
                continue
            v = index.get(apply_word(cfg, e.word).map_key()) if e.word else u
            if v is None:
                raise UndecidedVertex(f"term {e!r} leaves the diagram at vertex {u}")
            rows[v][u] += c
    return RationalMatrix(rows, n)

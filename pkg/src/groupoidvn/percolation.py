"""Animal sums for the percolation kernel formula on Z and Z^2.

The kernel dimension of the lamp-projected random walk equals

    sum over finite animals L of  (1/|L|) q^|L| (1-q)^|boundary L| dim ker A_L

with ``q = 1/p`` and ``A_L`` the adjacency operator of the animal.  Animals
containing the origin are grouped by translation class: a class of size
``n`` holds ``n`` rooted animals, which cancels the ``1/|L|``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .linalg import RationalMatrix, kernel_dimension

GROUPS = ("z", "z2")


class CatalogLimit(ValueError):
    pass


class WindowTooSmall(RuntimeError):
    pass


@dataclass(frozen=True)
class PercModel:
    group: str
    p: int

    def __post_init__(self):
        if self.group not in GROUPS:
            raise CatalogLimit(f"unsupported group {self.group!r}; choose from {GROUPS}")
        if self.p < 2:
            raise ValueError("p must be at least 2")

    @property
    def q(self) -> Fraction:
        return Fraction(1, self.p)

    @property
    def neighbours(self) -> tuple:
        return ((1,), (-1,)) if self.group == "z" else ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class Animal:
    """Finite connected vertex set with its outer boundary size.

    Enumerated animals contain the origin; internal class representatives
    are normalized to minimum corner 0 instead.
    """

    cells: frozenset
    boundary: int

    @property
    def size(self) -> int:
        return len(self.cells)

    def rooted(self) -> list:
        """The ``size`` translates that contain the origin."""
        return [frozenset(tuple(c - o for c, o in zip(cell, off)) for cell in self.cells)
                for off in sorted(self.cells)]


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _boundary(cells, nbrs) -> int:
    out = set()
    for c in cells:
        for d in nbrs:
            n = _add(c, d)
            if n not in cells:
                out.add(n)
    return len(out)


def _normalize(cells) -> frozenset:
    mins = [min(c[i] for c in cells) for i in range(len(next(iter(cells))))]
    return frozenset(tuple(x - m for x, m in zip(c, mins)) for c in cells)


def _redelmeier(n_max: int, nbrs) -> Iterator[frozenset]:
    """Every fixed polyomino with at most ``n_max`` cells, exactly once.

    Cells are grown from the origin, which stays the lexicographically
    smallest cell; the untried set holds candidates in order of discovery.
    """
    dim = len(nbrs[0])
    origin = (0,) * dim

    def allowed(c):
        return c > origin  # cells lexicographically below the origin are excluded

    def rec(poly, untried, seen):
        while untried:
            c = untried.pop()
            poly.append(c)
            yield frozenset(poly)
            if len(poly) < n_max:
                new = []
                for d in nbrs:
                    nb = _add(c, d)
                    if nb not in seen and allowed(nb):
                        new.append(nb)
                for nb in new:
                    seen.add(nb)
                yield from rec(poly, untried + new, seen)
                for nb in new:
                    seen.discard(nb)
            poly.pop()

    if n_max < 1:
        return
    yield from rec([], [origin], {origin})


def _classes(model: PercModel, n_max: int) -> Iterator[Animal]:
    """Translation classes with ``1 <= size <= n_max``, normalized to min corner 0."""
    nbrs = model.neighbours
    if model.group == "z":
        for n in range(1, n_max + 1):
            yield Animal(frozenset((i,) for i in range(n)), 2)
        return
    for poly in _redelmeier(n_max, nbrs):
        cells = _normalize(poly)
        yield Animal(cells, _boundary(cells, nbrs))


def enumerate_animals(model: PercModel, n_max: int) -> list:
    """Every animal containing the origin with at most ``n_max`` vertices, once each.

    Returns ``(Animal, weight)`` pairs with ``weight = 1/|L|``, the factor the
    kernel formula attaches to each animal.
    """
    out = []
    for cls in _classes(model, n_max):
        w = Fraction(1, cls.size)
        for cells in cls.rooted():
            out.append((Animal(cells, cls.boundary), w))
    return out


def adjacency(cells, nbrs) -> RationalMatrix:
    idx = {c: i for i, c in enumerate(sorted(cells))}
    n = len(idx)
    rows = [[0] * n for _ in range(n)]
    for c, i in idx.items():
        for d in nbrs:
            j = idx.get(_add(c, d))
            if j is not None:
                rows[i][j] += 1
    return RationalMatrix(rows, n)


def animal_kernel_exact(cells, nbrs) -> int:
    return kernel_dimension(adjacency(cells, nbrs))


_EIG_TOL = 1e-9


def _kernel_batch(mats: np.ndarray) -> np.ndarray:
    """Kernel dimensions of a batch of symmetric 0/1 adjacency matrices.

    The product of the nonzero eigenvalues is a nonzero integer and every
    eigenvalue has modulus at most the maximal degree ``d``, so each nonzero
    eigenvalue exceeds ``d**-(n-1)`` in modulus; for the sizes used here that
    is far above both the threshold and the floating-point error.
    """
    ev = np.linalg.eigvalsh(mats)
    return (np.abs(ev) < _EIG_TOL).sum(axis=1)


def _check_tolerance(n: int, degree: int):
    if float(degree) ** -(n - 1) <= 100 * _EIG_TOL:
        raise CatalogLimit(f"animals of size {n} exceed the certified eigenvalue range")


def _z2_weights(n_max: int, exact: bool = True) -> Counter:
    """Counter of (size, boundary, kernel dimension) over translation classes."""
    nbrs = ((1, 0), (-1, 0), (0, 1), (0, -1))
    model = PercModel("z2", 2)
    counts: Counter = Counter()
    if exact:
        for a in _classes(model, n_max):
            counts[(a.size, a.boundary, animal_kernel_exact(a.cells, nbrs))] += 1
        return counts
    _check_tolerance(n_max, 4)
    buckets: dict = {}

    def flush(n):
        items = buckets.pop(n, [])
        if not items:
            return
        mats = np.zeros((len(items), n, n))
        for k, a in enumerate(items):
            idx = {c: i for i, c in enumerate(sorted(a.cells))}
            for c, i in idx.items():
                for d in nbrs:
                    j = idx.get(_add(c, d))
                    if j is not None:
                        mats[k, i, j] = 1.0
        for a, dk in zip(items, _kernel_batch(mats)):
            counts[(n, a.boundary, int(dk))] += 1

    for a in _classes(model, n_max):
        buckets.setdefault(a.size, []).append(a)
        if len(buckets[a.size]) >= 4096:
            flush(a.size)
    for n in list(buckets):
        flush(n)
    return counts


def lnw_partial(model: PercModel, n_max: int, exact: bool = True) -> tuple:
    """``(partial sum over animals of size <= n_max, certified tail or None)``.

    ``exact=False`` computes Z^2 kernels from batched eigenvalues (see
    :func:`_kernel_batch`); the result is the same rational.
    """
    q = model.q
    if n_max <= 0:
        return Fraction(0), (z_tail(q, 0) if model.group == "z" else None)
    if model.group == "z":
        part = Fraction(0)
        for n in range(1, n_max + 1):
            if n % 2:
                part += q ** n * (1 - q) ** 2     # n rooted paths, weight 1/n each
        return part, z_tail(q, n_max)
    part = Fraction(0)
    for (n, b, dk), c in sorted(_z2_weights(n_max, exact).items()):
        part += c * dk * q ** n * (1 - q) ** b
    return part, None


def z_tail(q: Fraction, n_max: int) -> Fraction:
    """Bound on the sum over sizes above ``n_max`` (``dim ker <= |L|``, ``n`` animals of size ``n``)."""
    N = n_max
    return q ** (N + 1) * ((N + 1) - N * q)


def z_closed_form(q: Fraction) -> Fraction:
    return q * (1 - q) / (1 + q)


def complement_mass(model: PercModel) -> Fraction:
    """Mass of points with a closed origin (the empty-animal reading)."""
    return 1 - model.q


# --------------------------------------------------------------------------
# Monte Carlo

def _z_samples(rng, n, w, q):
    open_ = rng.random((n, 2 * w + 1)) < q
    centre = open_[:, w]
    right = open_[:, w + 1:]
    left = open_[:, :w][:, ::-1]
    # run length = index of first closed site (or full length)
    r = np.where(right.all(axis=1), w, np.argmin(right, axis=1))
    l = np.where(left.all(axis=1), w, np.argmin(left, axis=1))
    size = l + r + 1
    val = np.where(centre, (size % 2 == 1) / size, 0.0)
    flagged = centre & ((r == w) | (l == w))
    return val, flagged


def _z2_samples(rng, n, w, q, cache):
    from scipy import ndimage

    side = 2 * w + 1
    grid = rng.random((n, side, side)) < q
    vals = np.zeros(n)
    flagged = np.zeros(n, dtype=bool)
    nbrs = ((1, 0), (-1, 0), (0, 1), (0, -1))
    for k in np.nonzero(grid[:, w, w])[0]:
        lab, _ = ndimage.label(grid[k])
        ys, xs = np.nonzero(lab == lab[w, w])
        if ys.min() == 0 or xs.min() == 0 or ys.max() == side - 1 or xs.max() == side - 1:
            flagged[k] = True
        cells = _normalize(list(zip(ys.tolist(), xs.tolist())))
        dk = cache.get(cells)
        if dk is None:
            dk = cache[cells] = animal_kernel_exact(cells, nbrs)
        vals[k] = dk / len(cells)
    return vals, flagged


def mc_estimate(model: PercModel, samples: int, window: int = 30, seed: int = 0,
                chunk: int = 100_000, max_flagged: float = 1e-3) -> tuple:
    """``(mean, standard error, flagged fraction)`` of ``dim ker A_L / |L|`` (0 on a closed origin).

    Uses a counter-based generator seeded by ``seed``; results are
    reproducible bit for bit.  Raises WindowTooSmall when more than
    ``max_flagged`` of the samples have a cluster touching the window edge.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    rng = np.random.Generator(np.random.Philox(seed))
    q = float(model.q)
    total = total_sq = 0.0
    n_flag = 0
    done = 0
    cache: dict = {}
    while done < samples:
        n = min(chunk, samples - done)
        if model.group == "z":
            v, f = _z_samples(rng, n, window, q)
        else:
            v, f = _z2_samples(rng, n, window, q, cache)
        total += float(v.sum())
        total_sq += float((v * v).sum())
        n_flag += int(f.sum())
        done += n
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    se = (var / samples) ** 0.5
    frac = n_flag / samples
    if frac > max_flagged:
        raise WindowTooSmall(f"{frac:.3g} of samples reach the window edge; enlarge the window")
    return mean, se, frac

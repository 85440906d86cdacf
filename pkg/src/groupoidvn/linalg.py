"""Dense rational matrices with exact rank, Gram products and power traces."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence


class RationalMatrix:
    __slots__ = ("n_rows", "n_cols", "rows")

    def __init__(self, rows: Sequence[Sequence], n_cols: int | None = None):
        self.rows = [[Fraction(x) for x in r] for r in rows]
        self.n_rows = len(self.rows)
        if n_cols is None:
            if not self.rows:
                raise ValueError("give n_cols for an empty matrix")
            n_cols = len(self.rows[0])
        self.n_cols = n_cols
        if any(len(r) != n_cols for r in self.rows):
            raise ValueError("ragged rows")

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int | None = None) -> "RationalMatrix":
        n_cols = n_rows if n_cols is None else n_cols
        return cls([[0] * n_cols for _ in range(n_rows)], n_cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        m = cls.zeros(n)
        for i in range(n):
            m.rows[i][i] = Fraction(1)
        return m

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __setitem__(self, ij, value):
        i, j = ij
        self.rows[i][j] = Fraction(value)

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.n_cols == other.n_cols and self.rows == other.rows

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix([list(col) for col in zip(*self.rows)] if self.n_rows else [], self.n_rows)

    T = property(transpose)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.n_cols)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError("shape mismatch")
        ocols = _sparse_rows(other)
        out = []
        for r in self.rows:
            acc = {}
            for k, a in enumerate(r):
                if a:
                    for j, b in ocols[k].items():
                        acc[j] = acc.get(j, 0) + a * b
            row = [Fraction(0)] * other.n_cols
            for j, v in acc.items():
                row[j] = v
            out.append(row)
        return RationalMatrix(out, other.n_cols)

    def is_symmetric(self) -> bool:
        return self.n_rows == self.n_cols and all(
            self.rows[i][j] == self.rows[j][i] for i in range(self.n_rows) for j in range(i))

    def trace(self) -> Fraction:
        return sum((self.rows[i][i] for i in range(min(self.n_rows, self.n_cols))), Fraction(0))

    def text(self) -> str:
        def f(x):
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return "\n".join(" ".join(f(x) for x in r) for r in self.rows)

    def __repr__(self):
        return f"RationalMatrix({self.n_rows}x{self.n_cols})"


def _sparse_rows(m: RationalMatrix) -> list:
    return [{j: x for j, x in enumerate(r) if x} for r in m.rows]


def _integer_row(row: dict) -> dict:
    den = 1
    for x in row.values():
        den = den * x.denominator // math.gcd(den, x.denominator)
    return {j: int(x * den) for j, x in row.items()}


def _primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            return row
    return {j: v // g for j, v in row.items()} if g > 1 else row


def rank_of_rows(rows: Iterable[dict]) -> int:
    """Rank of sparse integer rows by fraction-free elimination.

    Each incoming row is reduced against the pivot rows collected so far
    (``r <- p*r - r[c]*pivot``, then divided by its content), so no division
    ever leaves the integers.
    """
    pivots: dict = {}
    for r in rows:
        r = _primitive({j: v for j, v in r.items() if v})
        while r:
            c = min(r)
            prow = pivots.get(c)
            if prow is None:
                pivots[c] = r
                break
            a, p = r[c], prow[c]
            g = math.gcd(a, p)
            fa, fp = p // g, a // g
            new = {j: fa * v for j, v in r.items()}
            for j, v in prow.items():
                w = new.get(j, 0) - fp * v
                if w:
                    new[j] = w
                else:
                    new.pop(j, None)
            r = _primitive(new)
    return len(pivots)


def rank(m: RationalMatrix) -> int:
    return rank_of_rows(_integer_row(r) for r in _sparse_rows(m))


def kernel_dimension(m: RationalMatrix) -> int:
    """``n_cols - rank``: dimension of the right kernel."""
    return m.n_cols - rank(m)


def gram(m: RationalMatrix) -> RationalMatrix:
    """``m^T m``; symmetric positive semidefinite with the same kernel as ``m``."""
    return m.transpose() @ m


def trace_power(m: RationalMatrix, n: int) -> Fraction:
    if m.n_rows != m.n_cols:
        raise ValueError("trace_power needs a square matrix")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Fraction(m.n_rows)
    p = m
    for _ in range(n - 1):
        p = p @ m
    return p.trace()


def trace_powers(m: RationalMatrix, n_max: int) -> list:
    """``[tr m^0, tr m^1, ..., tr m^n_max]``."""
    if m.n_rows != m.n_cols:
        raise ValueError("trace_powers needs a square matrix")
    out = [Fraction(m.n_rows)]
    p = None
    for _ in range(n_max):
        p = m if p is None else p @ m
        out.append(p.trace())
    return out

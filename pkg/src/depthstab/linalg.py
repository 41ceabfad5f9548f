"""Exact linear algebra over Q and prime fields.

Matrices here are small and sparse (boundary maps of simplicial complexes,
incidence and exponent matrices), so ranks are computed by sparse Gaussian
elimination on dict rows.  Over Q the elimination is fraction-free: row
operations stay in the integers and rows are divided by their content
after each update, which keeps entries small.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    """Coefficient field: characteristic 0 means Q, otherwise GF(p)."""

    characteristic: int = 0

    def __post_init__(self):
        c = self.characteristic
        if c != 0 and not is_prime(c):
            raise ValueError(f"field characteristic must be 0 or a prime, got {c}")

    @classmethod
    def parse(cls, text: str | int) -> "Field":
        """Accept ``"Q"``/``"QQ"``/``"0"`` or a prime such as ``"2"``."""
        s = str(text).strip().upper()
        if s in ("Q", "QQ", "0"):
            return cls(0)
        try:
            return cls(int(s))
        except ValueError as exc:
            raise ValueError(f"unrecognised field {text!r}") from exc

    def __str__(self) -> str:
        return "QQ" if self.characteristic == 0 else f"GF({self.characteristic})"


QQ = Field(0)
GF2 = Field(2)
DEFAULT_PRIME = 32003


@dataclass(frozen=True)
class ExactMatrix:
    """Dense matrix with exact (int or Fraction) entries."""

    rows: int
    cols: int
    entries: tuple[tuple, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("matrix dimensions do not match entries")
        for r in self.entries:
            for x in r:
                if not isinstance(x, (int, Fraction)):
                    raise TypeError(f"inexact entry {x!r}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "ExactMatrix":
        rows = tuple(tuple(r) for r in rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else ())

    def column_dicts(self) -> list[dict[int, int | Fraction]]:
        out: list[dict] = [{} for _ in range(self.cols)]
        for i, r in enumerate(self.entries):
            for j, x in enumerate(r):
                if x:
                    out[j][i] = x
        return out

    def rank(self, field: Field = QQ) -> int:
        return sparse_rank(self.column_dicts(), field)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        prod = tuple(
            tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.entries
        )
        return ExactMatrix(self.rows, other.cols, prod)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)


def _clear_denominators(vec: dict) -> dict[int, int]:
    den = 1
    for x in vec.values():
        if isinstance(x, Fraction):
            den = den * x.denominator // gcd(den, x.denominator)
    return {k: int(x * den) for k, x in vec.items()}


def _primitive(vec: dict[int, int]) -> dict[int, int]:
    g = 0
    for x in vec.values():
        g = gcd(g, x)
        if g == 1:
            return vec
    if g > 1:
        return {k: x // g for k, x in vec.items()}
    return vec


def sparse_rank(columns: Iterable[dict], field: Field = QQ) -> int:
    """Rank of a matrix given as a list of sparse columns ``{row: value}``.

    Columns are reduced one at a time against the pivots found so far.  Over
    Q the pivot with the smallest absolute value is preferred inside each
    column, and all arithmetic is done on primitive integer vectors.
    """
    p = field.characteristic
    # pivot row -> (insertion order, reduced column); a pivot column never
    # contains the pivot row of an earlier pivot, so eliminating in insertion
    # order terminates
    pivots: dict[int, tuple[int, dict[int, int]]] = {}
    rank = 0
    for col in columns:
        if p:
            v = {k: int(x) % p for k, x in col.items() if int(x) % p}
        else:
            v = _primitive(_clear_denominators({k: x for k, x in col.items() if x}))
        while v:
            hits = [k for k in v if k in pivots]
            if not hits:
                break
            k = min(hits, key=lambda r: pivots[r][0])
            piv = pivots[k][1]
            a, b = v[k], piv[k]
            if p:
                f = a * pow(b, -1, p) % p
                for r, x in piv.items():
                    y = (v.get(r, 0) - f * x) % p
                    if y:
                        v[r] = y
                    else:
                        v.pop(r, None)
            else:
                g = gcd(a, b)
                ma, mb = b // g, a // g
                w = {r: x * ma for r, x in v.items()}
                for r, x in piv.items():
                    y = w.get(r, 0) - mb * x
                    if y:
                        w[r] = y
                    else:
                        w.pop(r, None)
                v = _primitive(w)
        if v:
            if p:
                k = min(v)
            else:
                k = min(v, key=lambda r: (abs(v[r]), r))
            pivots[k] = (rank, v)
            rank += 1
    return rank


def rank(rows: Sequence[Sequence], field: Field = QQ) -> int:
    """Rank of a dense row-major matrix."""
    if not rows:
        return 0
    return ExactMatrix.from_rows(rows).rank(field)

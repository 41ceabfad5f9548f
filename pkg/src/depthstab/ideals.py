"""Monomial ideals as minimal generating sets of exponent vectors.

A monomial is a plain tuple of non-negative ints of length n (variable
x_i is position i-1).  Ideals always store their unique minimal generating
set, sorted by degree then lexicographically, so equal ideals compare equal.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError, ResourceLimitError, ValidationError
from .linalg import ExactMatrix

Monomial = tuple[int, ...]

GENERATOR_CAP = 20_000
LATTICE_CAP = 200_000

# exponents are held in numpy int64 during bulk work; refuse anything that
# could come close to wrapping
_EXPONENT_LIMIT = 2**40


def _check_exponents(exps: Iterable[int]) -> None:
    for e in exps:
        if e < 0:
            raise ValidationError(f"negative exponent {e}")
        if e > _EXPONENT_LIMIT:
            raise OverflowError(f"exponent {e} too large")


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def multiply(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def degree(a: Monomial) -> int:
    return sum(a)


def unit(n: int) -> Monomial:
    return (0,) * n


def variable(i: int, n: int) -> Monomial:
    """x_i as a monomial (1-indexed)."""
    return tuple(1 if j == i - 1 else 0 for j in range(n))


def support(a: Monomial) -> frozenset[int]:
    return frozenset(i + 1 for i, e in enumerate(a) if e)


def format_monomial(a: Monomial) -> str:
    factors = [f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(a) if e]
    return "*".join(factors) if factors else "1"


_FACTOR = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_monomial(text: str, n: int | None = None) -> Monomial:
    """Parse ``x1^2*x3``; ``1`` is the unit monomial."""
    text = text.strip().replace(" ", "")
    exps: dict[int, int] = {}
    if text != "1":
        for tok in text.split("*"):
            m = _FACTOR.match(tok)
            if not m:
                raise ValueError(f"bad monomial factor {tok!r}")
            i = int(m.group(1))
            if i < 1:
                raise ValueError("variables are 1-indexed")
            exps[i] = exps.get(i, 0) + int(m.group(2) or 1)
    top = max(exps, default=0)
    if n is None:
        n = top
    elif top > n:
        raise ValueError(f"x{top} outside {n} variables")
    return tuple(exps.get(i + 1, 0) for i in range(n))


@dataclass(frozen=True)
class MonomialIdeal:
    n: int
    gens: tuple[Monomial, ...]

    def __post_init__(self):
        for g in self.gens:
            if len(g) != self.n:
                raise ValidationError(f"generator {g} does not have {self.n} exponents")
            _check_exponents(g)

    def __len__(self) -> int:
        return len(self.gens)

    def __contains__(self, mono: Monomial) -> bool:
        return any(divides(g, mono) for g in self.gens)

    def __str__(self) -> str:
        return "(" + ", ".join(format_monomial(g) for g in self.gens) + ")"

    @property
    def degrees(self) -> set[int]:
        return {sum(g) for g in self.gens}

    def is_single_degree(self) -> bool:
        return len(self.degrees) == 1

    def support(self) -> frozenset[int]:
        out: set[int] = set()
        for g in self.gens:
            out |= support(g)
        return frozenset(out)

    def max_exponents(self) -> tuple[int, ...]:
        return tuple(max(col) for col in zip(*self.gens)) if self.gens else unit(self.n)

    def array(self) -> np.ndarray:
        return np.array(self.gens, dtype=np.int64).reshape(len(self.gens), self.n)

    def is_unit_ideal(self) -> bool:
        return any(sum(g) == 0 for g in self.gens)


def parse_ideal(text: str, n: int | None = None) -> MonomialIdeal:
    """Parse ``(x1*x2, x2*x3)``."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    pieces = [p for p in body.split(",") if p.strip()]
    monos = [parse_monomial(p) for p in pieces]
    width = max((len(m) for m in monos), default=0)
    if n is None:
        n = width
    elif width > n:
        raise ValueError(f"ideal uses x{width} but n={n}")
    monos = [m + (0,) * (n - len(m)) for m in monos]
    return minimalize(monos, n)


def _sort_key(g: Monomial):
    return (sum(g), g)


def _minimal_rows(arr: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Rows of a duplicate-free array not divisible by another row."""
    if len(arr) <= 1:
        return arr
    deg = arr.sum(axis=1)
    if (deg == deg[0]).all():
        return arr
    keep = np.ones(len(arr), dtype=bool)
    for start in range(0, len(arr), chunk):
        block = arr[start:start + chunk]
        # divides[i, j]: arr[j] | block[i]
        div = (arr[None, :, :] <= block[:, None, :]).all(axis=2)
        div[np.arange(len(block)), np.arange(start, start + len(block))] = False
        keep[start:start + len(block)] = ~div.any(axis=1)
    return arr[keep]


def minimalize(gens: Sequence[Monomial], n: int) -> MonomialIdeal:
    """Minimal generating set of the ideal generated by gens."""
    gens = [tuple(int(e) for e in g) for g in gens]
    if not gens:
        raise ValidationError("cannot build the zero ideal from an empty generator list")
    for g in gens:
        if len(g) != n:
            raise ValidationError(f"generator {g} does not have {n} exponents")
        _check_exponents(g)
    uniq = sorted(set(gens), key=_sort_key)
    if len(uniq) < 64:
        kept: list[Monomial] = []
        for g in uniq:
            if not any(divides(h, g) for h in kept):
                kept.append(g)
        return MonomialIdeal(n, tuple(kept))
    arr = _minimal_rows(np.array(uniq, dtype=np.int64))
    return MonomialIdeal(n, tuple(sorted((tuple(int(x) for x in r) for r in arr), key=_sort_key)))


def edge_ideal(g) -> MonomialIdeal:
    """I_G generated by x_u x_v over the edges of g."""
    if not g.edges:
        raise PreconditionError("edge ideal of a graph without edges is the zero ideal")
    gens = []
    for u, v in g.edges:
        e = [0] * g.n
        e[u - 1] = e[v - 1] = 1
        gens.append(tuple(e))
    return MonomialIdeal(g.n, tuple(sorted(gens, key=_sort_key)))


def product(a: MonomialIdeal, b: MonomialIdeal, cap: int = GENERATOR_CAP) -> MonomialIdeal:
    if a.n != b.n:
        raise ValidationError("ideals live in different rings")
    A, B = a.array(), b.array()
    if len(A) * len(B) > 50 * cap:
        raise ResourceLimitError("product generator candidates", 50 * cap, len(A) * len(B))
    prods = (A[:, None, :] + B[None, :, :]).reshape(-1, a.n)
    prods = np.unique(prods, axis=0)
    rows = _minimal_rows(prods)
    if len(rows) > cap:
        raise ResourceLimitError("generator count", cap, len(rows))
    gens = sorted((tuple(int(x) for x in r) for r in rows), key=_sort_key)
    return MonomialIdeal(a.n, tuple(gens))


def power(ideal: MonomialIdeal, k: int, cap: int = GENERATOR_CAP) -> MonomialIdeal:
    """Minimal generators of ideal**k, minimalizing after every multiplication."""
    if k < 1:
        raise PreconditionError(f"power needs k >= 1, got {k}")
    result = ideal
    for _ in range(k - 1):
        result = product(result, ideal, cap=cap)
    return result


def powers(ideal: MonomialIdeal, k_max: int, cap: int = GENERATOR_CAP):
    """Yield (k, ideal**k) for k = 1..k_max, each built from the previous one."""
    current = ideal
    for k in range(1, k_max + 1):
        if k > 1:
            current = product(current, ideal, cap=cap)
        yield k, current


def power_by_products(ideal: MonomialIdeal, k: int) -> MonomialIdeal:
    """ideal**k from all degree-k multisets of generators, minimalized once."""
    if k < 1:
        raise PreconditionError(f"power needs k >= 1, got {k}")
    gens = []
    for combo in itertools.combinations_with_replacement(ideal.gens, k):
        acc = unit(ideal.n)
        for g in combo:
            acc = multiply(acc, g)
        gens.append(acc)
    return minimalize(gens, ideal.n)


def substitute(ideal: MonomialIdeal, source: int, target: int) -> MonomialIdeal:
    """Identify x_source with x_target (1-indexed); x_source becomes unused."""
    n = ideal.n
    if source == target:
        raise PreconditionError("substitution needs two distinct variables")
    if not (1 <= source <= n and 1 <= target <= n):
        raise PreconditionError(f"variable index outside 1..{n}")
    return minimalize([substitute_monomial(g, source, target) for g in ideal.gens], n)


def substitute_monomial(mono: Monomial, source: int, target: int) -> Monomial:
    e = list(mono)
    e[target - 1] += e[source - 1]
    e[source - 1] = 0
    return tuple(e)


def localize(ideal: MonomialIdeal, keep: Iterable[int]) -> tuple[MonomialIdeal | None, list[int]]:
    """Set x_j = 1 for j outside keep; return the ideal in the kept variables.

    Returns (None, kept) when the localization is the unit ideal.
    """
    kept = sorted(keep)
    idx = [j - 1 for j in kept]
    gens = [tuple(g[i] for i in idx) for g in ideal.gens]
    if any(sum(g) == 0 for g in gens):
        return None, kept
    return minimalize(gens, len(kept)), kept


def exponent_matrix(ideal: MonomialIdeal) -> ExactMatrix:
    return ExactMatrix(len(ideal.gens), ideal.n, tuple(ideal.gens))


@dataclass(frozen=True)
class LcmLattice:
    """lcm-closure of the minimal generators, ordered by divisibility.

    elements excludes the unit monomial, which plays the role of the bottom.
    """

    n: int
    atoms: tuple[Monomial, ...]
    elements: tuple[Monomial, ...]

    @property
    def top(self) -> Monomial:
        return self.elements[-1]

    def __contains__(self, m: Monomial) -> bool:
        return m in self._index

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def _index(self) -> frozenset:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = frozenset(self.elements)
            object.__setattr__(self, "_idx", idx)
        return idx

    def below(self, m: Monomial) -> list[Monomial]:
        """Elements strictly below m (the unit excluded)."""
        return [e for e in self.elements if e != m and divides(e, m)]


def lcm_lattice(ideal: MonomialIdeal, cap: int = LATTICE_CAP) -> LcmLattice:
    atoms = ideal.gens
    seen = set(atoms)
    frontier = list(atoms)
    while frontier:
        nxt = []
        for e in frontier:
            for a in atoms:
                c = lcm(e, a)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
                    if len(seen) > cap:
                        raise ResourceLimitError("lcm lattice size", cap)
        frontier = nxt
    return LcmLattice(ideal.n, atoms, tuple(sorted(seen, key=_sort_key)))

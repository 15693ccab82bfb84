"""Permutations, the path quadratics Q_pi they generate, and compatibility.

Permutations are 1-indexed everywhere in the public API. Q_pi is the path
sum x_pi(1) x_pi(2) + ... + x_pi(n-1) x_pi(n); two permutations are
compatible when Q_pi + Q_sigma is bent (n even) or near-bent (n odd).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .boolfn import (
    Classification,
    QuadForm,
    classify_spectrum,
    drop_coordinates,
    rank_rows,
    restrict,
    wht,
)

WHT_ROUTE_MAX_N = 16


class RouteDisagreement(RuntimeError):
    """The rank route and the Walsh-Hadamard route gave different answers."""


class DichotomyViolation(RuntimeError):
    """A bent quadratic produced a restriction pattern outside both cases of the WHC dichotomy."""


@dataclass(frozen=True, order=True)
class Perm:
    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise ValueError(f"not a permutation of 1..{len(m)}: {list(m)}")
        object.__setattr__(self, "map", m)

    @classmethod
    def of(cls, *values: int) -> Perm:
        if len(values) == 1 and not isinstance(values[0], int):
            values = tuple(values[0])
        return cls(tuple(values))

    @classmethod
    def identity(cls, n: int) -> Perm:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def parse(cls, text: str) -> Perm:
        m = re.fullmatch(r"\s*\[\s*(\d+(?:\s*,\s*\d+)*)\s*\]\s*", text)
        if not m:
            raise ValueError(f"cannot parse permutation: {text!r}")
        return cls(tuple(int(v) for v in m.group(1).split(",")))

    @property
    def n(self) -> int:
        return len(self.map)

    def __call__(self, k: int) -> int:
        return self.map[k - 1]

    def __len__(self) -> int:
        return len(self.map)

    def __iter__(self):
        return iter(self.map)

    def __str__(self) -> str:
        return "[" + ",".join(str(v) for v in self.map) + "]"

    def __repr__(self) -> str:
        return f"Perm({str(self)})"

    def to_list(self) -> list[int]:
        return list(self.map)

    def reverse(self) -> Perm:
        return Perm(self.map[::-1])

    def inverse(self) -> Perm:
        inv = [0] * self.n
        for k, v in enumerate(self.map, start=1):
            inv[v - 1] = k
        return Perm(tuple(inv))

    def compose(self, other: Perm) -> Perm:
        """(self o other)(k) = self(other(k))."""
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        return Perm(tuple(self.map[v - 1] for v in other.map))

    __matmul__ = compose

    def is_identity(self) -> bool:
        return self.map == tuple(range(1, self.n + 1))


def reverse(p: Perm) -> Perm:
    return p.reverse()


def inverse(p: Perm) -> Perm:
    return p.inverse()


def compose(p: Perm, q: Perm) -> Perm:
    return p.compose(q)


def format_perms(perms: Iterable[Perm]) -> str:
    return "".join(f"{p}\n" for p in perms)


def parse_perms(text: str) -> list[Perm]:
    return [Perm.parse(line) for line in text.splitlines() if line.strip()]


def path_pairs(p: Perm) -> frozenset[tuple[int, int]]:
    out = set()
    for a, b in zip(p.map, p.map[1:]):
        out.add((a, b) if a < b else (b, a))
    return frozenset(out)


def q_pi(p: Perm) -> QuadForm:
    if p.n < 2:
        raise ValueError("Q_pi needs n >= 2")
    return QuadForm(p.n, path_pairs(p))


def path_rows(p: Perm) -> tuple[int, ...]:
    """Symplectic rows of Q_pi as int bitsets (bit k-1 for variable k)."""
    rows = [0] * p.n
    for a, b in zip(p.map, p.map[1:]):
        rows[a - 1] |= 1 << (b - 1)
        rows[b - 1] |= 1 << (a - 1)
    return tuple(rows)


def pair_rank(p: Perm, q: Perm) -> int:
    """F_2 rank of the symplectic matrix of Q_p + Q_q."""
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n}")
    return rank_rows(a ^ b for a, b in zip(path_rows(p), path_rows(q)))


def full_rank(n: int) -> int:
    """Largest rank of an n x n symplectic matrix."""
    return n - (n % 2)


def is_compatible(p: Perm, q: Perm) -> bool:
    """Rank-route compatibility test, the cheap exact check."""
    return pair_rank(p, q) == full_rank(p.n)


@dataclass(frozen=True)
class CompatVerdict:
    compatible: bool
    classification: Classification
    rank: int


def _expected_class(n: int) -> Classification:
    return Classification.BENT if n % 2 == 0 else Classification.NEAR_BENT


def _class_from_rank(n: int, rank: int) -> Classification:
    if rank == full_rank(n) and n >= 2:
        return _expected_class(n)
    return Classification.OTHER


def compatible(p: Perm, q: Perm, method: str = "auto") -> CompatVerdict:
    """Compatibility verdict for (p, q).

    ``method`` is ``"rank"``, ``"wht"``, ``"both"`` or ``"auto"`` (both when
    n <= 16, rank otherwise). With two routes a disagreement raises
    :class:`RouteDisagreement`.
    """
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n}")
    n = p.n
    if n < 2:
        raise ValueError("compatibility needs n >= 2")
    if method == "auto":
        method = "both" if n <= WHT_ROUTE_MAX_N else "rank"
    if method not in ("rank", "wht", "both"):
        raise ValueError(f"unknown method {method!r}")
    form = q_pi(p) + q_pi(q)
    rank = rank_rows(form.symplectic_rows())
    by_rank = _class_from_rank(n, rank)
    cls = by_rank
    if method in ("wht", "both"):
        by_wht = classify_spectrum(wht(form.truth_table()))
        if method == "both" and by_wht is not by_rank:
            raise RouteDisagreement(f"{p} vs {q}: rank says {by_rank}, WHT says {by_wht}")
        cls = by_wht
    return CompatVerdict(cls is _expected_class(n), cls, rank)


class Dichotomy(enum.Enum):
    CASE_I = "I"
    CASE_II = "II"


def _check_whc_args(q: QuadForm, i: int, j: int):
    n = q.n
    if n % 2 or n < 4:
        raise ValueError(f"WHC needs even n >= 4, got n={n}")
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= n, got ({i}, {j})")
    tt = q.truth_table()
    spectrum = wht(tt)
    if classify_spectrum(spectrum) is not Classification.BENT:
        raise ValueError(f"{q} is not bent")
    return tt, spectrum


def restriction_spectra(q: QuadForm, i: int, j: int) -> dict[tuple[int, int], np.ndarray]:
    """Walsh spectra of the four restrictions Q|_{x_i=u, x_j=v}, keyed by (u, v)."""
    tt = q.truth_table()
    return {(u, v): wht(restrict(tt, i, j, u, v)).values for u in (0, 1) for v in (0, 1)}


def prop1_classify(q: QuadForm, i: int, j: int) -> Dichotomy:
    """Classify a bent quadratic at (i, j) by the magnitudes of its four restriction spectra.

    Case I: at every c-bar three restricted values vanish and one has
    magnitude 2^(n/2). Case II: all four have magnitude 2^((n-2)/2).
    """
    _check_whc_args(q, i, j)
    n = q.n
    stack = np.abs(np.stack(list(restriction_spectra(q, i, j).values())))
    big = 1 << (n // 2)
    small = 1 << ((n - 2) // 2)
    case_one = ((stack == 0).sum(axis=0) == 3) & ((stack == big).sum(axis=0) == 1)
    case_two = (stack == small).all(axis=0)
    if case_one.all():
        return Dichotomy.CASE_I
    if case_two.all():
        return Dichotomy.CASE_II
    invalid = np.flatnonzero(~(case_one | case_two))
    detail = f"invalid pattern at c-bar={int(invalid[0])}" if invalid.size else "cases mixed across c-bar"
    raise DichotomyViolation(f"{q} at ({i},{j}): {detail}")


def whc(q: QuadForm, i: int, j: int) -> bool:
    """Walsh-Hadamard condition on (i, j), decided through the restriction dichotomy."""
    return prop1_classify(q, i, j) is Dichotomy.CASE_I


def whc_products(q: QuadForm, i: int, j: int) -> np.ndarray:
    """prod_{a,b} W_q(c + a e_i + b e_j) for every c (exact int64, n <= 24)."""
    _, spectrum = _check_whc_args(q, i, j)
    w = spectrum.values
    c = np.arange(1 << q.n, dtype=np.int64)
    ei, ej = 1 << (i - 1), 1 << (j - 1)
    return w[c] * w[c ^ ei] * w[c ^ ej] * w[c ^ ei ^ ej]


def whc_direct(q: QuadForm, i: int, j: int) -> bool:
    """The product-over-all-c definition, kept as an independent reference."""
    return bool((whc_products(q, i, j) == 1 << (2 * q.n)).all())


def restriction_identity_holds(q: QuadForm, i: int, j: int) -> bool:
    """Check W_Q(c) = sum_{u,v} (-1)^(c_i u + c_j v) W_{Q|u,v}(c-bar) at every c."""
    n = q.n
    w = wht(q.truth_table()).values
    parts = restriction_spectra(q, i, j)
    for c in range(1 << n):
        cb = drop_coordinates(c, n, i, j)
        ci, cj = (c >> (i - 1)) & 1, (c >> (j - 1)) & 1
        total = sum(
            (-1) ** ((ci & u) ^ (cj & v)) * int(parts[(u, v)][cb]) for u in (0, 1) for v in (0, 1)
        )
        if total != int(w[c]):
            return False
    return True


def difference_form(p: Perm, q: Perm) -> QuadForm:
    return q_pi(p) + q_pi(q)


def perms_from_lists(rows: Iterable[Sequence[int]]) -> list[Perm]:
    return [Perm(tuple(r)) for r in rows]

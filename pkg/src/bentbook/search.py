"""Exhaustive search: IS_n, the composition table, the compatibility graph and its maximal cliques."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .quadperm import Perm, compatible, full_rank, path_rows
from .boolfn import rank_rows

DEFAULT_GUARD = 9
IDENTITY = 0  # composition-table code for rho_i^-1 o rho_j = I_n


class GuardError(ValueError):
    """Requested size is above the configured feasibility guard."""


def enumerate_is(n: int, guard: int = DEFAULT_GUARD, force: bool = False) -> list[Perm]:
    """All permutations compatible with I_n, in lexicographic order."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if n > guard and not force:
        raise GuardError(f"n={n} exceeds guard {guard}; override with force (--force)")
    ident = path_rows(Perm.identity(n))
    target = full_rank(n)
    out = []
    for values in itertools.permutations(range(1, n + 1)):
        p = Perm(values)
        if rank_rows(a ^ b for a, b in zip(ident, path_rows(p))) == target:
            out.append(p)
    return out


@dataclass(frozen=True)
class CompositionTable:
    """entries[i][j] is IDENTITY, the 1-based index k of the member it equals, or None."""

    members: tuple[Perm, ...]
    entries: tuple[tuple[int | None, ...], ...]

    def entry(self, i: int, j: int) -> int | None:
        """1-based lookup, rows and columns numbered from 1."""
        return self.entries[i - 1][j - 1]

    def render(self) -> str:
        size = len(self.members)
        width = max(2, len(str(size)))
        cell = lambda v: "-" if v is None else str(v)  # noqa: E731
        lines = [" " * width + " |" + "".join(f" {k:>{width}}" for k in range(1, size + 1))]
        lines.append("-" * len(lines[0]))
        for i, row in enumerate(self.entries, start=1):
            lines.append(f"{i:>{width}} |" + "".join(f" {cell(v):>{width}}" for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, members: Sequence[Perm]) -> CompositionTable:
        rows = []
        for line in text.splitlines():
            if "|" not in line or not line.split("|")[0].strip():
                continue
            cells = line.split("|")[1].split()
            rows.append(tuple(None if c in ("-", "−") else int(c) for c in cells))
        return cls(tuple(members), tuple(rows))


def composition_table(members: Sequence[Perm]) -> CompositionTable:
    members = tuple(members)
    if len({p.n for p in members}) > 1:
        raise ValueError("members must share n")
    if any(p.is_identity() for p in members):
        raise ValueError("the identity must be excluded from the members")
    index = {p: k for k, p in enumerate(members, start=1)}
    rows = []
    for a in members:
        inv = a.inverse()
        row = []
        for b in members:
            c = inv.compose(b)
            row.append(IDENTITY if c.is_identity() else index.get(c))
        rows.append(tuple(row))
    return CompositionTable(members, tuple(rows))


@dataclass(frozen=True)
class CompatGraph:
    vertices: tuple[Perm, ...]
    adjacency: tuple[int, ...]  # bitset over vertex indices

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adjacency[u] >> v) & 1)

    def degree(self, u: int) -> int:
        return self.adjacency[u].bit_count()

    def neighbours(self, u: int) -> list[int]:
        return _members(self.adjacency[u])

    def __len__(self) -> int:
        return len(self.vertices)


def _members(bits: int) -> list[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


def _adjacency_rows(args) -> list[int]:
    rows, lo, hi, target, method = args
    out = []
    for u in range(lo, hi):
        bits = 0
        for v in range(len(rows)):
            if v != u and rank_rows(a ^ b for a, b in zip(rows[u], rows[v])) == target:
                bits |= 1 << v
        out.append(bits)
    return out


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("BENTBOOK_THREADS", "1")))
    except ValueError:
        return 1


def build_graph(candidates: Sequence[Perm], workers: int | None = None, method: str = "rank") -> CompatGraph:
    """Compatibility graph on the candidates; edge(u, v) iff u ~ v.

    ``method="rank"`` uses the symplectic rank; ``"both"`` also runs the
    Walsh route per edge (slow, for cross-checking small graphs).
    """
    vertices = tuple(candidates)
    if len(set(vertices)) != len(vertices):
        raise ValueError("duplicate vertex in candidates")
    if len({p.n for p in vertices}) > 1:
        raise ValueError("candidates must share n")
    if not vertices:
        return CompatGraph((), ())
    n = vertices[0].n
    if method != "rank":
        adj = [0] * len(vertices)
        for u, v in itertools.combinations(range(len(vertices)), 2):
            if compatible(vertices[u], vertices[v], method).compatible:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        return CompatGraph(vertices, tuple(adj))
    rows = [path_rows(p) for p in vertices]
    workers = default_workers() if workers is None else workers
    size = len(vertices)
    if workers <= 1 or size < 256:
        adj = _adjacency_rows((rows, 0, size, full_rank(n), method))
    else:
        step = -(-size // (workers * 4))
        jobs = [(rows, lo, min(size, lo + step), full_rank(n), method) for lo in range(0, size, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            adj = [bits for chunk in pool.map(_adjacency_rows, jobs) for bits in chunk]
    return CompatGraph(vertices, tuple(adj))


def _degeneracy_order(adj: Sequence[int]) -> list[int]:
    remaining = set(range(len(adj)))
    alive = (1 << len(adj)) - 1
    order = []
    while remaining:
        v = min(remaining, key=lambda u: ((adj[u] & alive).bit_count(), u))
        order.append(v)
        remaining.discard(v)
        alive &= ~(1 << v)
    return order


def _bron_kerbosch(adj, r: list[int], p: int, x: int, out: list[list[int]], min_size: int) -> None:
    if not p and not x:
        if len(r) >= min_size:
            out.append(sorted(r))
        return
    if len(r) + p.bit_count() < min_size:
        return
    # pivot: vertex of P | X with most neighbours in P
    pivot = max(_members(p | x), key=lambda u: (adj[u] & p).bit_count())
    for v in _members(p & ~adj[pivot]):
        r.append(v)
        _bron_kerbosch(adj, r, p & adj[v], x & adj[v], out, min_size)
        r.pop()
        p &= ~(1 << v)
        x |= 1 << v


def maximal_cliques(g: CompatGraph, min_size: int = 1) -> list[list[int]]:
    """All maximal cliques with at least ``min_size`` vertices, canonically sorted.

    Bron-Kerbosch with pivoting, run from each vertex in degeneracy order.
    """
    adj = g.adjacency
    out: list[list[int]] = []
    p = (1 << len(adj)) - 1
    x = 0
    for v in _degeneracy_order(adj):
        _bron_kerbosch(adj, [v], p & adj[v], x & adj[v], out, min_size)
        p &= ~(1 << v)
        x |= 1 << v
    return sorted(out)


def cliques_as_perms(g: CompatGraph, cliques: Sequence[Sequence[int]]) -> list[list[Perm]]:
    return [[g.vertices[k] for k in clique] for clique in cliques]


def paterson_bound(n: int) -> int:
    """Largest number of mutually compatible permutations for even n: n(n-1)/2."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return n * (n - 1) // 2
